//! Bessel functions of integer and half-integer order, their derivatives and
//! zeros, and the Airy-zero enclosures of `j_{m,s}`.

mod bessel;
pub(crate) mod second_kind;
mod zeros;

pub use bessel::{
    bessel_j, bessel_j_prime, ln_abs_bessel_j, spherical_j, BesselOrder, MAX_ARGUMENT, MAX_ORDER,
};
pub(crate) use bessel::bessel_pair;
pub use zeros::{airy_zero_enclosure, bessel_prime_zero, bessel_zero, jms_bounds, ZeroEnclosure};
