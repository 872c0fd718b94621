//! Exact radial solution for piecewise-constant layers.
//!
//! In layer `i`, `φ = A_i Z₁(κ_i r) + B_i Z₂(κ_i r)` with `κ_i = k n_i/√σ_i`,
//! `(Z₁, Z₂) = (J_m, Y_m)` in 2D and `(j_m, y_m)` in 3D. `B₀ = 0`. Across an
//! interface `φ` and `σφ'` are continuous; the 2×2 matching system is solved
//! through the Wronskian of `(Z₁, Z₂)`, which never vanishes.

use std::f64::consts::PI;

use super::{log_sum, Continuation, Dim, Mode, RadialSolution, SolutionSource};
use crate::error::{Error, Result};
use crate::media::MediumProfile;
use crate::quadrature;
use crate::special::second_kind::{cylinder_j, cylinder_y, sphere_j, sphere_y, ScaledValue};

#[derive(Clone, Copy, Debug)]
struct LayerSolution {
    r_hi: f64,
    kappa: f64,
    /// `(mantissa, ln_scale)`
    a: (f64, f64),
    b: (f64, f64),
}

#[derive(Clone, Debug)]
pub(crate) struct Coefficients {
    layers: Vec<LayerSolution>,
}

fn first_kind(dim: Dim, m: u32, x: f64) -> ScaledValue {
    match dim {
        Dim::Two => cylinder_j(m, x),
        Dim::Three => sphere_j(m, x),
    }
}

fn second_kind(dim: Dim, m: u32, x: f64) -> ScaledValue {
    match dim {
        Dim::Two => cylinder_y(m, x),
        Dim::Three => sphere_y(m, x),
    }
}

fn wronskian(dim: Dim, x: f64) -> f64 {
    match dim {
        Dim::Two => 2.0 / (PI * x),
        Dim::Three => 1.0 / (x * x),
    }
}

impl LayerSolution {
    /// `(φ, φ')` as log-scaled pairs.
    fn eval(&self, dim: Dim, m: u32, r: f64) -> ((f64, f64), (f64, f64)) {
        let x = self.kappa * r;
        let z1 = first_kind(dim, m, x);
        let mut value = vec![(self.a.0 * z1.value, self.a.1 + z1.ln_scale)];
        let mut slope = vec![(self.a.0 * z1.slope * self.kappa, self.a.1 + z1.ln_scale)];
        if self.b.0 != 0.0 {
            let z2 = second_kind(dim, m, x);
            value.push((self.b.0 * z2.value, self.b.1 + z2.ln_scale));
            slope.push((self.b.0 * z2.slope * self.kappa, self.b.1 + z2.ln_scale));
        }
        (log_sum(&value), log_sum(&slope))
    }
}

impl Coefficients {
    fn layer_for(&self, r: f64) -> &LayerSolution {
        let i = self.layers.partition_point(|l| l.r_hi < r);
        &self.layers[i.min(self.layers.len() - 1)]
    }

    fn absolute(&self, mode: Mode, r: f64) -> ((f64, f64), (f64, f64)) {
        if r == 0.0 {
            let v = if mode.m == 0 { 1.0 } else { 0.0 };
            let d = if mode.m == 1 { 1.0 } else { 0.0 };
            return ((v, 0.0), (d, 0.0));
        }
        self.layer_for(r).eval(mode.dim, mode.m, r)
    }

    pub(crate) fn value_at(&self, sol: &RadialSolution, r: f64) -> (f64, f64) {
        let (v, d) = self.absolute(sol.mode, r);
        (v.0 * (v.1 - sol.ln_scale).exp(), d.0 * (d.1 - sol.ln_scale).exp())
    }

    pub(crate) fn energy_to(&self, sol: &RadialSolution, tau: f64) -> (f64, f64) {
        let power = (sol.mode.dim.value() - 1) as i32;
        let kmax = self.layers.iter().map(|l| l.kappa).fold(1.0, f64::max);
        let mut f = |r: f64| {
            let (v, _) = self.value_at(sol, r);
            r.powi(power) * v * v
        };
        let mut total = 0.0;
        let mut lo = 0.0;
        for l in &self.layers {
            let hi = l.r_hi.min(tau);
            if hi > lo {
                total += quadrature::integrate_relative(&mut f, lo, hi, 2.0 * PI / kmax, 1e-13);
            }
            lo = l.r_hi;
            if lo >= tau {
                break;
            }
        }
        (total, 2.0 * sol.ln_scale)
    }
}

fn ln_leading_coefficient(dim: Dim, m: u32, kappa: f64) -> f64 {
    let mf = f64::from(m);
    match dim {
        // J_m(x) ~ (x/2)^m / m!
        Dim::Two => (1..=m).map(|j| f64::from(j).ln()).sum::<f64>() + mf * (2.0 / kappa).ln(),
        // j_m(x) ~ x^m / (2m+1)!!
        Dim::Three => (0..=m).map(|j| f64::from(2 * j + 1).ln()).sum::<f64>() - mf * kappa.ln(),
    }
}

/// Radial factor for a layered medium, normalized like the shooting
/// solution (`φ = r^m (1 + O(r²))` at the origin).
pub fn layered_solve(p: &MediumProfile, mode: Mode, k: f64) -> Result<RadialSolution> {
    let layered = p.as_layered().ok_or(Error::WrongProfileKind {
        expected: "layered",
        found: p.kind(),
    })?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            reason: "wavenumber must be positive and finite",
        });
    }
    let (dim, m) = (mode.dim, mode.m);
    let input = layered.layers();
    let mut out: Vec<LayerSolution> = Vec::with_capacity(input.len());
    let kappa0 = k * input[0].n / input[0].sigma.sqrt();
    out.push(LayerSolution {
        r_hi: input[0].r_max,
        kappa: kappa0,
        a: (1.0, ln_leading_coefficient(dim, m, kappa0)),
        b: (0.0, 0.0),
    });
    for i in 1..input.len() {
        let prev = out[i - 1];
        let ri = prev.r_hi;
        let (phi, dphi) = prev.eval(dim, m, ri);
        let kappa = k * input[i].n / input[i].sigma.sqrt();
        let sp = phi.1.max(dphi.1);
        let pv = phi.0 * (phi.1 - sp).exp();
        let dv = input[i - 1].sigma * dphi.0 * (dphi.1 - sp).exp() / (input[i].sigma * kappa);
        let x = kappa * ri;
        let z1 = first_kind(dim, m, x);
        let z2 = second_kind(dim, m, x);
        let w = wronskian(dim, x);
        out.push(LayerSolution {
            r_hi: input[i].r_max,
            kappa,
            a: ((pv * z2.slope - dv * z2.value) / w, sp + z2.ln_scale),
            b: ((dv * z1.value - pv * z1.slope) / w, sp + z1.ln_scale),
        });
    }
    let coeffs = Coefficients { layers: out };

    let ((v1, s1), (d1, sd1)) = coeffs.absolute(mode, 1.0);
    let ln_scale = if v1 != 0.0 { s1 } else { sd1 };
    let kmax = coeffs.layers.iter().map(|l| l.kappa).fold(1.0, f64::max);
    let spacing = (1.0 / 256.0f64).min(PI / (8.0 * kmax));
    let n = (1.0 / spacing).ceil() as usize;
    let grid: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();

    let mut sol = RadialSolution {
        mode,
        k,
        grid,
        phi: Vec::new(),
        dphi: Vec::new(),
        phi1: v1 * (s1 - ln_scale).exp(),
        dphi1: d1 * (sd1 - ln_scale).exp(),
        ln_scale,
        source: SolutionSource::Layered,
        continuation: Continuation::Layered(coeffs.clone()),
    };
    let (phi, dphi): (Vec<f64>, Vec<f64>) = sol.grid.iter().map(|&r| coeffs.value_at(&sol, r)).unzip();
    sol.phi = phi;
    sol.dphi = dphi;
    if !(sol.phi1.is_finite() && sol.dphi1.is_finite()) {
        return Err(Error::NonFinite(format!("layered boundary data at k = {k}, m = {m}")));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::Layer;
    use crate::radial::{solve_radial, DEFAULT_TOL};

    fn layers(spec: &[(f64, f64, f64)]) -> MediumProfile {
        MediumProfile::layered(
            spec.iter()
                .map(|&(r_max, sigma, n)| Layer { r_max, sigma, n })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_layer_matches_shooting() {
        for dim in [Dim::Two, Dim::Three] {
            for m in [0, 4, 15] {
                let mode = Mode::new(dim, m);
                let a = layered_solve(&layers(&[(1.0, 2.0, 1.5)]), mode, 17.0).unwrap();
                let b = solve_radial(&MediumProfile::constant(2.0, 1.5).unwrap(), mode, 17.0, DEFAULT_TOL).unwrap();
                let rel = (a.log_derivative() - b.log_derivative()).abs() / b.log_derivative().abs();
                assert!(rel < 1e-9, "{dim} m={m}: {rel}");
                let va = a.phi1 * a.ln_scale.exp();
                let vb = b.phi1 * b.ln_scale.exp();
                assert!(((va - vb) / vb).abs() < 1e-8, "normalization {va} {vb}");
            }
        }
    }

    #[test]
    fn identical_layers_continue_the_same_solution() {
        for dim in [Dim::Two, Dim::Three] {
            let mode = Mode::new(dim, 3);
            let split = layered_solve(&layers(&[(0.4, 1.0, 2.0), (1.0, 1.0, 2.0)]), mode, 9.0).unwrap();
            let Continuation::Layered(c) = &split.continuation else { unreachable!() };
            let (l0, l1) = (c.layers[0], c.layers[1]);
            assert!((l1.b.0 * l1.b.1.exp()).abs() < 1e-12 * (l0.a.0 * l0.a.1.exp()).abs());
            assert!(((l1.a.0 * l1.a.1.exp()) / (l0.a.0 * l0.a.1.exp()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interface_conditions_hold() {
        let p = layers(&[(0.3, 1.0, 1.0), (0.8, 3.0, 2.5), (1.0, 2.0, 3f64.sqrt())]);
        for dim in [Dim::Two, Dim::Three] {
            let sol = layered_solve(&p, Mode::new(dim, 5), 20.0).unwrap();
            let Continuation::Layered(c) = &sol.continuation else { unreachable!() };
            for (i, (lo, hi)) in [(1.0, 3.0), (3.0, 2.0)].iter().enumerate() {
                let r = c.layers[i].r_hi;
                let (v0, d0) = c.layers[i].eval(dim, 5, r);
                let (v1, d1) = c.layers[i + 1].eval(dim, 5, r);
                let v0 = v0.0 * v0.1.exp();
                let v1 = v1.0 * v1.1.exp();
                let f0 = lo * d0.0 * d0.1.exp();
                let f1 = hi * d1.0 * d1.1.exp();
                assert!((v0 - v1).abs() < 1e-10 * v0.abs().max(1e-300), "{dim}: {v0} {v1}");
                assert!((f0 - f1).abs() < 1e-10 * f0.abs().max(1e-300), "{dim}: {f0} {f1}");
            }
        }
    }

    #[test]
    fn rejects_smooth_profiles() {
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        assert!(layered_solve(&p, Mode::new(Dim::Two, 0), 1.0).is_err());
    }
}
