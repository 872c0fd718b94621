//! Shooting from the origin with an adaptive Dormand–Prince 5(4) pair.
//!
//! The unknown is `g = φ / r^m`, which satisfies
//!
//! `g'' + ((2m+N-1)/r + σ'/σ) g' + (k²n²/σ + (σ'/σ) m/r) g = 0`, `g(0) = 1`,
//!
//! so the `r^m` growth never has to be represented. A third component
//! accumulates `∫ r^{N-1} φ² dr`. The state is rescaled whenever its
//! amplitude leaves `[1e-100, 1e100]`, with the logarithm of the removed
//! factor carried alongside.

use super::{Continuation, Mode, RadialSolution, SolutionSource};
use crate::error::{Error, Result};
use crate::media::{eval_medium, MediumProfile};

/// Default tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Local error target per step, as a fraction of `tol`. Errors from a few
/// hundred steps accumulate, so this keeps the global error of the boundary
/// data near `tol` relative to the local amplitude.
const LOCAL_FRACTION: f64 = 1e-2;

const MAX_STEPS: usize = 2_000_000;
const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub(crate) struct State {
    r: f64,
    /// `[g, g', ∫ r^{N-1} φ²]`; the first two carry `exp(ln)`, the last `exp(2 ln)`.
    y: [f64; 3],
    ln: f64,
}

struct Rhs<'a> {
    p: &'a MediumProfile,
    m: f64,
    k2: f64,
    /// `2m + N - 1`
    drag: f64,
    /// `N - 1 + 2m`
    weight_power: i32,
    mode: Mode,
    k: f64,
}

impl Rhs<'_> {
    fn eval(&self, r: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        let c = eval_medium(self.p, r)?;
        let a = c.dsigma / c.sigma;
        let b = self.k2 * c.n * c.n / c.sigma;
        let ddg = -(self.drag / r + a) * y[1] - (b + a * self.m / r) * y[0];
        let de = r.powi(self.weight_power) * y[0] * y[0];
        if !(ddg.is_finite() && de.is_finite()) {
            return Err(Error::NonFinite(format!(
                "radial right-hand side at r = {r} (k = {}, m = {})",
                self.k, self.mode.m
            )));
        }
        Ok([y[1], ddg, de])
    }
}

struct Stepper<'a> {
    rhs: Rhs<'a>,
    tol: f64,
    /// Scale of `g'` relative to `g`.
    kappa: f64,
    h: f64,
    steps: usize,
}

impl Stepper<'_> {
    fn amplitude(&self, y: &[f64; 3]) -> f64 {
        y[0].hypot(y[1] / self.kappa)
    }

    /// Integrates exactly to `r_end`.
    fn advance(&mut self, mut s: State, r_end: f64) -> Result<State> {
        while s.r < r_end {
            let last = self.h >= r_end - s.r;
            let h = if last { r_end - s.r } else { self.h };
            let mut k = [[0.0; 3]; 7];
            for i in 0..7 {
                let mut yi = s.y;
                for (j, kj) in k.iter().enumerate().take(i) {
                    for c in 0..3 {
                        yi[c] += h * A[i][j] * kj[c];
                    }
                }
                k[i] = self.rhs.eval(s.r + C[i] * h, &yi)?;
            }
            let mut y_new = s.y;
            let mut err = [0.0; 2];
            for (i, ki) in k.iter().enumerate() {
                for c in 0..3 {
                    y_new[c] += h * B[i] * ki[c];
                }
                err[0] += h * E[i] * ki[0];
                err[1] += h * E[i] * ki[1];
            }
            let amp = self.amplitude(&s.y).max(self.amplitude(&y_new)).max(1e-300);
            let ratio = err[0].abs().max(err[1].abs() / self.kappa) / (LOCAL_FRACTION * self.tol * amp);
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(Error::StepUnderflow {
                    r: s.r,
                    k: self.rhs.k,
                    m: self.rhs.mode.m,
                });
            }
            if ratio <= 1.0 {
                s.r = if last { r_end } else { s.r + h };
                s.y = y_new;
                // A clamped final step says nothing about the natural size.
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
                let amp = self.amplitude(&s.y);
                if !(RESCALE_LOW..=RESCALE_HIGH).contains(&amp) && amp > 0.0 {
                    s.y[0] /= amp;
                    s.y[1] /= amp;
                    s.y[2] /= amp * amp;
                    s.ln += amp.ln();
                }
            } else {
                self.h = h * factor;
            }
            if self.h < 4.0 * f64::EPSILON * s.r.max(1e-300) {
                return Err(Error::StepUnderflow {
                    r: s.r,
                    k: self.rhs.k,
                    m: self.rhs.mode.m,
                });
            }
        }
        Ok(s)
    }
}

/// Saved states for re-integrating between grid points.
#[derive(Clone, Debug)]
pub(crate) struct Checkpoints {
    states: Vec<State>,
    tol: f64,
    kappa: f64,
}

impl Checkpoints {
    pub(crate) fn start(&self) -> f64 {
        self.states[0].r
    }

    fn state_at(&self, p: &MediumProfile, sol: &RadialSolution, r: f64) -> Result<State> {
        let i = self.states.partition_point(|s| s.r <= r).max(1) - 1;
        let from = self.states[i];
        if from.r == r {
            return Ok(from);
        }
        let mut stepper = Stepper {
            rhs: rhs(p, sol.mode, sol.k),
            tol: self.tol,
            kappa: self.kappa,
            h: (r - from.r).min(0.1 / self.kappa),
            steps: 0,
        };
        stepper.advance(from, r)
    }

    pub(crate) fn value_at(&self, p: &MediumProfile, sol: &RadialSolution, r: f64) -> Result<(f64, f64)> {
        let s = self.state_at(p, sol, r)?;
        Ok(to_phi(sol.mode.m, &s, sol.ln_scale))
    }

    pub(crate) fn energy_to(&self, p: &MediumProfile, sol: &RadialSolution, tau: f64) -> Result<(f64, f64)> {
        let s = self.state_at(p, sol, tau)?;
        Ok((s.y[2], 2.0 * s.ln))
    }
}

fn rhs(p: &MediumProfile, mode: Mode, k: f64) -> Rhs<'_> {
    let m = f64::from(mode.m);
    Rhs {
        p,
        m,
        k2: k * k,
        drag: 2.0 * m + mode.n() - 1.0,
        weight_power: (mode.dim.value() - 1 + 2 * mode.m) as i32,
        mode,
        k,
    }
}

/// `(φ, φ')` from a state, relative to `exp(ln_ref)`.
fn to_phi(m: u32, s: &State, ln_ref: f64) -> (f64, f64) {
    let mf = f64::from(m);
    let (g, dg) = (s.y[0], s.y[1]);
    let dphi_inner = dg + mf * g / s.r;
    let log_rm = mf * s.r.ln() + s.ln - ln_ref;
    let scale = log_rm.exp();
    (g * scale, dphi_inner * scale)
}

/// Wavenumber bound `k · max n/√σ` sampled on `[0, 1]`.
fn local_wavenumber(p: &MediumProfile, k: f64) -> Result<f64> {
    let mut q: f64 = 0.0;
    for i in 0..=64 {
        let c = eval_medium(p, f64::from(i) / 64.0)?;
        q = q.max(c.n2_over_sigma());
    }
    Ok((k * q.sqrt()).max(1.0))
}

/// Default sample grid: uniform, at least 256 intervals and at least eight
/// samples per local half-wavelength.
fn default_grid(kappa: f64) -> Vec<f64> {
    let spacing = (1.0 / 256.0f64).min(std::f64::consts::PI / (8.0 * kappa));
    let n = (1.0 / spacing).ceil() as usize;
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// Starting radius for the series. `m = 0` is treated like `m = 1`: the
/// truncated series error `O((k r₀)⁴)` would otherwise leak a visible
/// admixture of the singular solution.
fn start_radius(mode: Mode, k: f64) -> f64 {
    (1e-3 / (k * f64::from(mode.m.max(1)) + 1.0)).max(1e-6)
}

/// Shoots `φ_m(·; k)` from the origin to `r = 1` on the default grid.
pub fn solve_radial(p: &MediumProfile, mode: Mode, k: f64, tol: f64) -> Result<RadialSolution> {
    let kappa = local_wavenumber(checked(p)?, k)?;
    solve_radial_on(p, mode, k, tol, &default_grid(kappa))
}

fn checked(p: &MediumProfile) -> Result<&MediumProfile> {
    if p.as_layered().is_some() {
        return Err(Error::WrongProfileKind {
            expected: "smooth or constant",
            found: "layered",
        });
    }
    Ok(p)
}

/// As [`solve_radial`] with an explicit sample grid. The grid must be
/// strictly increasing inside `(r₀, 1]`; `1` is appended if missing.
pub fn solve_radial_on(p: &MediumProfile, mode: Mode, k: f64, tol: f64, grid: &[f64]) -> Result<RadialSolution> {
    checked(p)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            reason: "wavenumber must be positive and finite",
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            reason: "tolerance must be positive",
        });
    }
    let r0 = start_radius(mode, k);
    let mut grid = grid.to_vec();
    if grid.last() != Some(&1.0) {
        grid.push(1.0);
    }
    if grid[0] <= r0 || grid.windows(2).any(|w| !(w[0] < w[1])) || grid[grid.len() - 1] > 1.0 {
        return Err(Error::Domain {
            what: "grid",
            value: grid[0],
            reason: "grid must be strictly increasing inside (r0, 1]",
        });
    }

    let kappa = local_wavenumber(p, k)?;
    let rhs = rhs(p, mode, k);

    // Two-term Frobenius series at the origin.
    let c0 = eval_medium(p, 0.0)?;
    let a0 = c0.dsigma / c0.sigma;
    let a1 = c0.ddsigma / c0.sigma - a0 * a0;
    let b0 = k * k * c0.n * c0.n / c0.sigma;
    let m = rhs.m;
    let c1 = -a0 * m / rhs.drag;
    let c2 = -(a0 * c1 * (m + 1.0) + a1 * m + b0) / (2.0 * (2.0 * m + mode.n()));
    let power = mode.n() + 2.0 * m;
    let start = State {
        r: r0,
        y: [
            1.0 + c1 * r0 + c2 * r0 * r0,
            c1 + 2.0 * c2 * r0,
            (power * r0.ln()).exp() / power,
        ],
        ln: 0.0,
    };

    let mut stepper = Stepper {
        rhs,
        tol,
        kappa,
        h: 0.1 * r0,
        steps: 0,
    };
    let mut states = Vec::with_capacity(grid.len() + 1);
    states.push(start);
    let mut s = start;
    for &r in &grid {
        s = stepper.advance(s, r)?;
        states.push(s);
    }

    let ln_scale = s.ln;
    let (mut phi, mut dphi) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for st in &states[1..] {
        let (v, d) = to_phi(mode.m, st, ln_scale);
        phi.push(v);
        dphi.push(d);
    }
    let (phi1, dphi1) = (phi[phi.len() - 1], dphi[dphi.len() - 1]);
    if !(phi1.is_finite() && dphi1.is_finite()) {
        return Err(Error::NonFinite(format!("boundary data at k = {k}, m = {}", mode.m)));
    }
    Ok(RadialSolution {
        mode,
        k,
        grid,
        phi,
        dphi,
        phi1,
        dphi1,
        ln_scale,
        source: SolutionSource::Shooting,
        continuation: Continuation::Shooting(Checkpoints { states, tol, kappa }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Dim;
    use crate::special::{bessel_j, bessel_j_prime, spherical_j, BesselOrder};

    fn closed_log_derivative(mode: Mode, kappa: f64) -> f64 {
        match mode.dim {
            Dim::Two => {
                let o = BesselOrder::integer(mode.m);
                kappa * bessel_j_prime(o, kappa).unwrap() / bessel_j(o, kappa).unwrap()
            }
            Dim::Three => {
                let (j, d) = spherical_j(mode.m, kappa).unwrap();
                kappa * d / j
            }
        }
    }

    #[test]
    fn free_space_reduces_to_bessel() {
        let p = MediumProfile::constant(1.0, 1.0).unwrap();
        for dim in [Dim::Two, Dim::Three] {
            for m in [0, 3, 12] {
                let mode = Mode::new(dim, m);
                let sol = solve_radial(&p, mode, 20.0, DEFAULT_TOL).unwrap();
                let want = closed_log_derivative(mode, 20.0);
                let got = sol.log_derivative();
                assert!(((got - want) / want).abs() < 1e-8, "{dim} m={m}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn normalization_matches_leading_power() {
        // φ = m! (2/k)^m J_m(k r) for σ = n = 1
        let p = MediumProfile::constant(1.0, 1.0).unwrap();
        let sol = solve_radial(&p, Mode::new(Dim::Two, 2), 3.0, DEFAULT_TOL).unwrap();
        let want = 2.0 * (2.0f64 / 3.0).powi(2) * bessel_j(BesselOrder::integer(2), 3.0).unwrap();
        let got = sol.phi1 * sol.ln_scale.exp();
        assert!((got - want).abs() < 1e-9 * want.abs());
    }

    #[test]
    fn large_order_does_not_overflow() {
        let p = MediumProfile::smooth("2 - r", "2").unwrap();
        let sol = solve_radial(&p, Mode::new(Dim::Three, 150), 250.0, DEFAULT_TOL).unwrap();
        assert!(sol.phi1.is_finite() && sol.phi1 != 0.0);
        assert!(sol.ln_scale.is_finite());
    }

    #[test]
    fn rejects_bad_input() {
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        let mode = Mode::new(Dim::Two, 1);
        assert!(solve_radial(&p, mode, 0.0, DEFAULT_TOL).is_err());
        assert!(solve_radial(&p, mode, 1.0, -1.0).is_err());
        assert!(solve_radial_on(&p, mode, 1.0, DEFAULT_TOL, &[0.5, 0.4]).is_err());
        let layered = MediumProfile::layered(vec![crate::media::Layer {
            r_max: 1.0,
            sigma: 1.0,
            n: 2.0,
        }])
        .unwrap();
        assert!(matches!(
            solve_radial(&layered, mode, 1.0, DEFAULT_TOL),
            Err(Error::WrongProfileKind { .. })
        ));
    }

    #[test]
    fn explicit_grid_gets_boundary_point() {
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        let sol = solve_radial_on(&p, Mode::new(Dim::Two, 1), 4.0, DEFAULT_TOL, &[0.25, 0.5]).unwrap();
        assert_eq!(sol.grid, vec![0.25, 0.5, 1.0]);
        let (v, d) = sol.value_at(&p, 0.5).unwrap();
        assert_eq!((v, d), (sol.phi[1], sol.dphi[1]));
    }
}
