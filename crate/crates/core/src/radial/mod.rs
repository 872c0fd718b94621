//! The radial factor `φ_m(r; k)` of the medium part `u`:
//!
//! `σφ'' + (σ' + (N-1)σ/r)φ' + (k²n² − m(m+N-2)σ/r²)φ = 0`, regular at `r = 0`,
//! normalized so that `φ = r^m (1 + O(r))`.
//!
//! Smooth and constant media are integrated by shooting; layered media use
//! the exact per-layer Bessel solution.

mod layered;
mod shooting;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{eval_sided, MediumProfile, Side};
use crate::special::BesselOrder;

pub use layered::layered_solve;
pub use shooting::{solve_radial, solve_radial_on, DEFAULT_TOL};

/// Spatial dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn value(self) -> u32 {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl TryFrom<u32> for Dim {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::Domain {
                what: "dim",
                value: f64::from(d),
                reason: "dimension must be 2 or 3",
            }),
        }
    }
}

impl From<Dim> for u32 {
    fn from(d: Dim) -> u32 {
        d.value()
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Dimension and angular index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub dim: Dim,
    pub m: u32,
}

impl Mode {
    pub const fn new(dim: Dim, m: u32) -> Self {
        Mode { dim, m }
    }

    /// Order of the Bessel function in the radial factor: `m` in 2D,
    /// `m + 1/2` in 3D.
    pub fn order(self) -> BesselOrder {
        match self.dim {
            Dim::Two => BesselOrder::integer(self.m),
            Dim::Three => BesselOrder::half_integer(self.m),
        }
    }

    pub(crate) fn n(self) -> f64 {
        f64::from(self.dim.value())
    }
}

/// How a [`RadialSolution`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionSource {
    Shooting,
    Layered,
}

/// Samples of `φ_m(r; k)`.
///
/// All stored values are mantissas: the normalized solution is
/// `value · exp(ln_scale)`. `ln_scale` is chosen so that `phi1` is of
/// order one; samples far below the boundary amplitude may be zero.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub mode: Mode,
    pub k: f64,
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub phi1: f64,
    pub dphi1: f64,
    pub ln_scale: f64,
    pub source: SolutionSource,
    pub(crate) continuation: Continuation,
}

#[derive(Clone, Debug)]
pub(crate) enum Continuation {
    Shooting(shooting::Checkpoints),
    Layered(layered::Coefficients),
}

impl RadialSolution {
    /// `φ'(1)/φ(1)`.
    pub fn log_derivative(&self) -> f64 {
        self.dphi1 / self.phi1
    }

    /// `(φ, φ')` at any `r` in the solved range, on this solution's scale.
    pub fn value_at(&self, p: &MediumProfile, r: f64) -> Result<(f64, f64)> {
        self.check_range(r, r)?;
        match &self.continuation {
            Continuation::Shooting(c) => c.value_at(p, self, r),
            Continuation::Layered(c) => Ok(c.value_at(self, r)),
        }
    }

    /// `∫₀^τ r^{N-1} φ² dr` as `(mantissa, ln_scale)`.
    pub fn energy_to(&self, p: &MediumProfile, tau: f64) -> Result<(f64, f64)> {
        self.check_range(tau, tau)?;
        match &self.continuation {
            Continuation::Shooting(c) => c.energy_to(p, self, tau),
            Continuation::Layered(c) => Ok(c.energy_to(self, tau)),
        }
    }

    fn lowest(&self) -> f64 {
        match &self.continuation {
            Continuation::Shooting(c) => c.start(),
            Continuation::Layered(_) => 0.0,
        }
    }

    fn check_range(&self, a: f64, b: f64) -> Result<()> {
        if !(a >= self.lowest() && b <= 1.0 && a <= b) {
            return Err(Error::OutsideGrid(a, b));
        }
        Ok(())
    }
}

/// `ψ/φ` at `r`: `(rσ)^{1/2}` in 2D and `r σ^{1/2}` in 3D.
fn liouville_factor(p: &MediumProfile, dim: Dim, r: f64) -> Result<f64> {
    let sigma = eval_sided(p, r, Side::Inner)?.sigma;
    Ok(match dim {
        Dim::Two => (r * sigma).sqrt(),
        Dim::Three => r * sigma.sqrt(),
    })
}

/// `ψ_m = (rσ)^{1/2} φ_m` (2D) or `r σ^{1/2} φ_m` (3D) on the solution grid,
/// on the solution's scale.
pub fn liouville_psi(sol: &RadialSolution, p: &MediumProfile) -> Result<Vec<f64>> {
    sol.grid
        .iter()
        .zip(&sol.phi)
        .map(|(&r, &phi)| Ok(liouville_factor(p, sol.mode.dim, r)? * phi))
        .collect()
}

/// The potential `Q` of the normal form `ψ'' + Qψ = 0` for smooth media.
pub fn liouville_potential(p: &MediumProfile, mode: Mode, k: f64, r: f64) -> Result<f64> {
    let c = eval_sided(p, r, Side::Inner)?;
    let (s, s1, s2) = (c.sigma, c.dsigma, c.ddsigma);
    let m = f64::from(mode.m);
    let base = k * k * c.n * c.n / s + s1 * s1 / (4.0 * s * s) - s2 / (2.0 * s);
    Ok(match mode.dim {
        Dim::Two => base - s1 / (2.0 * s * r) - (m * m - 0.25) / (r * r),
        Dim::Three => base - s1 / (s * r) - m * (m + 1.0) / (r * r),
    })
}

const PSI_ZERO_TOL: f64 = 1e-9;

/// All zeros of `ψ_m(·; k)` in the open interval `(a, b)`, found from sign
/// changes on the solution grid and refined by bisection on re-integrated
/// values to width `1e-9`.
pub fn psi_zeros_in(sol: &RadialSolution, p: &MediumProfile, a: f64, b: f64) -> Result<Vec<f64>> {
    sol.check_range(a, b)?;
    let psi = |r: f64| -> Result<f64> {
        let (phi, _) = sol.value_at(p, r)?;
        Ok(liouville_factor(p, sol.mode.dim, r)? * phi)
    };
    let mut samples = vec![(a, psi(a)?)];
    for (&r, &phi) in sol.grid.iter().zip(&sol.phi) {
        if r > a && r < b {
            samples.push((r, liouville_factor(p, sol.mode.dim, r)? * phi));
        }
    }
    samples.push((b, psi(b)?));

    let mut zeros = Vec::new();
    for w in samples.windows(2) {
        let (mut lo, mut flo) = w[0];
        let (mut hi, fhi) = w[1];
        if flo == 0.0 {
            if lo > a {
                zeros.push(lo);
            }
            continue;
        }
        if fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        while hi - lo > PSI_ZERO_TOL {
            let mid = 0.5 * (lo + hi);
            let fm = psi(mid)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        zeros.push(0.5 * (lo + hi));
    }
    Ok(zeros)
}

/// Adds `(mantissa, ln_scale)` terms without overflow.
pub(crate) fn log_sum(terms: &[(f64, f64)]) -> (f64, f64) {
    let top = terms
        .iter()
        .filter(|t| t.0 != 0.0)
        .map(|t| t.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return (0.0, 0.0);
    }
    (terms.iter().map(|t| t.0 * (t.1 - top).exp()).sum(), top)
}
