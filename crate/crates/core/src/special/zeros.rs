//! Zeros of `J_ν` and `J'_ν`, and the Airy-zero enclosures of `j_{m,s}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::{pair, BesselOrder, MAX_ARGUMENT};
use crate::error::{Error, Result};

/// An open interval `(lower, upper)` known to contain a particular zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroEnclosure {
    pub lower: f64,
    pub upper: f64,
}

impl ZeroEnclosure {
    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Enclosure of `|a_s|`, the magnitude of the `s`-th negative zero of `Ai`.
///
/// `|a_s| = t^{2/3} (1 + σ_s)` with `t = 3π(4s-1)/8` and
/// `0 ≤ σ_s ≤ 0.130 [3π(4s-1.051)/8]^{-2}`.
pub fn airy_zero_enclosure(s: u32) -> Result<ZeroEnclosure> {
    if s == 0 {
        return Err(Error::Domain {
            what: "s",
            value: 0.0,
            reason: "zero index starts at 1",
        });
    }
    let s = f64::from(s);
    let lower = (3.0 * PI * (4.0 * s - 1.0) / 8.0).powf(2.0 / 3.0);
    let sigma_max = 0.130 * (3.0 * PI * (4.0 * s - 1.051) / 8.0).powi(-2);
    Ok(ZeroEnclosure {
        lower,
        upper: lower * (1.0 + sigma_max),
    })
}

/// Two-sided bound on `j_{m,s}` for `m ≥ 1`:
///
/// `m + |a_s| m^{1/3} / 2^{1/3} < j_{m,s} < m + |a_s| m^{1/3} / 2^{1/3} + (3/20) a_s² 2^{1/3} / m^{1/3}`.
///
/// `|a_s|` is only known to lie in [`airy_zero_enclosure`], so the lower end
/// uses its smallest value and the upper end its largest.
pub fn jms_bounds(m: u32, s: u32) -> Result<ZeroEnclosure> {
    if m == 0 {
        return Err(Error::Domain {
            what: "m",
            value: 0.0,
            reason: "the Airy-zero bound needs m >= 1",
        });
    }
    let a = airy_zero_enclosure(s)?;
    let mf = f64::from(m);
    let cbrt2 = 2f64.cbrt();
    let m13 = mf.cbrt();
    let lower = mf + a.lower * m13 / cbrt2;
    let upper = mf + a.upper * m13 / cbrt2 + 0.15 * a.upper * a.upper * cbrt2 / m13;
    Ok(ZeroEnclosure { lower, upper })
}

#[derive(Clone, Copy)]
enum Target {
    Function,
    Derivative,
}

fn eval(order: BesselOrder, target: Target, x: f64) -> f64 {
    let p = pair(order, x);
    match target {
        Target::Function => p.j,
        Target::Derivative => p.derivative_mantissa(order.value(), x),
    }
}

/// Value and slope (both on a common scale) for Newton polishing.
fn eval_with_slope(order: BesselOrder, target: Target, x: f64) -> (f64, f64) {
    let nu = order.value();
    let p = pair(order, x);
    let d = p.derivative_mantissa(nu, x);
    match target {
        Target::Function => (p.j, d),
        Target::Derivative => {
            // J'' = -J'/x - (1 - ν²/x²) J
            let dd = -d / x - (1.0 - nu * nu / (x * x)) * p.j;
            (d, dd)
        }
    }
}

/// Counts sign changes of the target upward from a point below the first
/// zero, then bisects and polishes the `s`-th one.
///
/// Zeros of `J_ν` and `J'_ν` for `ν ≥ 0` are more than two units apart, so a
/// unit scan step never steps over a pair of them.
fn isolate(order: BesselOrder, target: Target, s: u32, what: &'static str) -> Result<f64> {
    let fail = || Error::ZeroIsolation {
        what,
        order: order.value(),
        s,
    };
    let nu = order.value();
    let step = 1.0;
    let mut a = nu.max(1e-3);
    let mut fa = eval(order, target, a);
    let mut count = 0;
    let (mut lo, mut hi, mut flo) = loop {
        let b = a + step;
        if b > MAX_ARGUMENT {
            return Err(fail());
        }
        let fb = eval(order, target, b);
        if fb == 0.0 {
            count += 1;
            if count == s {
                return Ok(b);
            }
            // step past the exact zero
            a = b + 1e-9;
            fa = eval(order, target, a);
            continue;
        }
        if fa.signum() != fb.signum() {
            count += 1;
            if count == s {
                break (a, b, fa);
            }
        }
        a = b;
        fa = fb;
    };

    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = eval(order, target, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..2 {
        let (f, df) = eval_with_slope(order, target, x);
        if df == 0.0 {
            break;
        }
        let next = x - f / df;
        if (next - x).abs() < 1e-10 * x.max(1.0) {
            x = next;
        }
    }
    Ok(x)
}

/// `j_{ν,s}`, the `s`-th positive zero of `J_ν`.
pub fn bessel_zero(order: BesselOrder, s: u32) -> Result<f64> {
    if s == 0 {
        return Err(Error::Domain {
            what: "s",
            value: 0.0,
            reason: "zero index starts at 1",
        });
    }
    let z = isolate(order, Target::Function, s, "J")?;
    if !order.is_half_integer() && order.floor() >= 1 {
        let enc = jms_bounds(order.floor(), s)?;
        if !enc.contains(z) {
            return Err(Error::ZeroIsolation {
                what: "J (outside the Airy-zero enclosure)",
                order: order.value(),
                s,
            });
        }
    }
    Ok(z)
}

/// `j'_{ν,s}`, the `s`-th positive zero of `J'_ν`.
///
/// For `ν = 0` the stationary point at the origin is not counted, so
/// `j'_{0,s} = j_{1,s}`.
pub fn bessel_prime_zero(order: BesselOrder, s: u32) -> Result<f64> {
    if s == 0 {
        return Err(Error::Domain {
            what: "s",
            value: 0.0,
            reason: "zero index starts at 1",
        });
    }
    if order.twice() == 0 {
        return bessel_zero(BesselOrder::integer(1), s);
    }
    isolate(order, Target::Derivative, s, "J'")
}
