//! Bessel functions of the second kind, integer and spherical, used by the
//! layered-medium closed form. Values and derivatives share a log scale.

use std::f64::consts::PI;

use super::bessel::{hankel_y, integer_sequence, pair, BesselOrder};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE: f64 = 1e200;
const LN_RESCALE: f64 = 460.517_018_598_809_1;

/// `value · e^{ln_scale}` and `slope · e^{ln_scale}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScaledValue {
    pub value: f64,
    pub slope: f64,
    pub ln_scale: f64,
}

/// `J_m(x)` and `J'_m(x)` for `x > 0`.
pub(crate) fn cylinder_j(m: u32, x: f64) -> ScaledValue {
    let order = BesselOrder::integer(m);
    let p = pair(order, x);
    ScaledValue {
        value: p.j,
        slope: p.derivative_mantissa(order.value(), x),
        ln_scale: p.ln_scale,
    }
}

/// `j_m(x)` and `j'_m(x)` for `x > 0`.
pub(crate) fn sphere_j(m: u32, x: f64) -> ScaledValue {
    let order = BesselOrder::half_integer(m);
    let p = pair(order, x);
    let c = (PI / (2.0 * x)).sqrt();
    let j = c * p.j;
    let jm1 = c * p.jm1;
    ScaledValue {
        value: j,
        slope: jm1 - f64::from(m + 1) / x * j,
        ln_scale: p.ln_scale,
    }
}

/// `Y_0(x)` and `Y_1(x)` from the Neumann series over `J_{2k}`.
fn neumann_y01(x: f64) -> (f64, f64) {
    let n = (x.ceil() + 30.0 + (40.0 * x).sqrt().ceil()) as u32;
    let j = integer_sequence(x, n + 1);
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 <= n as usize {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / PI * lg * j[0] - 4.0 / PI * s0;
    let y1 = 2.0 / PI * (lg * j[1] - j[0] / x) + 2.0 / PI * s1;
    (y0, y1)
}

/// `Y_m(x)` and `Y'_m(x)` for `x > 0`, by upward recurrence from `Y_0, Y_1`.
pub(crate) fn cylinder_y(m: u32, x: f64) -> ScaledValue {
    let (y0, y1) = if x > 40.0 {
        (hankel_y(0.0, x), hankel_y(1.0, x))
    } else {
        neumann_y01(x)
    };
    if m == 0 {
        return ScaledValue {
            value: y0,
            slope: -y1,
            ln_scale: 0.0,
        };
    }
    let (mut prev, mut cur, mut ln_scale) = (y0, y1, 0.0);
    for i in 1..m {
        let next = 2.0 * f64::from(i) / x * cur - prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            ln_scale += LN_RESCALE;
        }
    }
    ScaledValue {
        value: cur,
        slope: prev - f64::from(m) / x * cur,
        ln_scale,
    }
}

/// `y_m(x)` and `y'_m(x)` for `x > 0`, by upward recurrence.
pub(crate) fn sphere_y(m: u32, x: f64) -> ScaledValue {
    let (s, c) = x.sin_cos();
    let y0 = -c / x;
    if m == 0 {
        let y1 = -c / (x * x) - s / x;
        return ScaledValue {
            value: y0,
            slope: -y1,
            ln_scale: 0.0,
        };
    }
    let mut prev = y0;
    let mut cur = -c / (x * x) - s / x;
    let mut ln_scale = 0.0;
    for i in 1..m {
        let next = f64::from(2 * i + 1) / x * cur - prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            ln_scale += LN_RESCALE;
        }
    }
    ScaledValue {
        value: cur,
        slope: prev - f64::from(m + 1) / x * cur,
        ln_scale,
    }
}
