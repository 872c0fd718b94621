//! Gauss–Legendre rules and an adaptive composite integrator.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes per panel of the composite rule.
pub const NODES: usize = 20;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n` from the Tricomi initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(z) and P_{n-1}(z) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

/// `∫_a^b f` with one [`NODES`]-point panel.
pub fn panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    half * x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>()
}

/// `∫_a^b f` by composite Gauss–Legendre on panels no wider than
/// `max_width`. Each panel is compared against its two halves and split
/// until they agree to `abs_tol` (scaled by panel share), down to depth 12.
pub fn integrate(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, max_width: f64, abs_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == panels { b } else { lo + width };
        total += refine(f, lo, hi, abs_tol * (hi - lo) / (b - a), 0);
    }
    total
}

/// As [`integrate`], with the tolerance relative to a first composite
/// estimate of the integral.
pub fn integrate_relative(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, max_width: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let width = (b - a) / panels as f64;
    let rough: f64 = (0..panels)
        .map(|i| panel(f, a + i as f64 * width, (a + (i + 1) as f64 * width).min(b)))
        .map(f64::abs)
        .sum();
    integrate(f, a, b, max_width, rel_tol * rough)
}

fn refine(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let whole = panel(f, a, b);
    let mid = 0.5 * (a + b);
    let halves = panel(f, a, mid) + panel(f, mid, b);
    if (whole - halves).abs() <= tol || depth >= 12 {
        return halves;
    }
    refine(f, a, mid, tol / 2.0, depth + 1) + refine(f, mid, b, tol / 2.0, depth + 1)
}
