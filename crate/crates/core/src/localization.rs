//! Boundary-localization ratios of eigenfunction parts.
//!
//! Every energy here is the radial integral `∫₀^τ r^{N−1} F(r)² dr`; the
//! angular factor and the constants `2π` / `π²` cancel in every ratio and are
//! dropped. For a Bessel factor `F = J_μ(κ r)` the integral is
//! `∫₀^τ r J_μ(κ r)² dr` in both dimensions (in 3D, `r² j_m(κr)² ∝ r J_{m+½}(κr)²`).
//!
//! Ratios are of squared norms (`ratio_*_sq`); the norm ratio itself is the
//! square root.

use std::f64::consts::{LN_10, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::MediumProfile;
use crate::quadrature;
use crate::radial::{layered_solve, solve_radial, Dim, Mode, RadialSolution, DEFAULT_TOL};
use crate::special::{ln_abs_bessel_j, BesselOrder};
use crate::spectrum::{eigen_sequence, EigenOptions, SkippedMode, TransmissionEigenvalue};

/// Rows whose squared ratio falls below this are left out of slope fits.
pub const UNDERFLOW_FLOOR: f64 = 1e-280;

/// Levels at which decay thresholds are recorded.
pub const THRESHOLD_LEVELS: [f64; 3] = [1e-2, 1e-4, 1e-6];

const REL_TOL: f64 = 1e-14;

/// A radial factor whose energy can be integrated.
#[derive(Clone, Copy, Debug)]
pub enum RadialFactor<'a> {
    /// `J_μ(k r)`.
    Bessel { order: BesselOrder, k: f64 },
    /// A computed radial solution of `profile`.
    Solution {
        solution: &'a RadialSolution,
        profile: &'a MediumProfile,
    },
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
            reason: "tau must lie in (0, 1]",
        });
    }
    Ok(())
}

/// `ln ∫₀^τ r J_μ(k r)² dr`, kept in log form so that tiny energies at
/// large order do not underflow.
fn ln_bessel_energy(order: BesselOrder, k: f64, tau: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            reason: "wavenumber must be positive and finite",
        });
    }
    let ln_integrand = |r: f64| -> f64 {
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        r.ln() + 2.0 * ln_abs_bessel_j(order, k * r).unwrap_or(f64::NEG_INFINITY)
    };
    // reference scale from a sampling fine enough to see every lobe
    ln_abs_bessel_j(order, k * tau)?;
    let cells = ((8.0 * k * tau / PI).ceil() as usize).max(64);
    let reference = (1..=cells)
        .map(|i| ln_integrand(tau * i as f64 / cells as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    if reference == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let mut f = |r: f64| (ln_integrand(r) - reference).exp();
    let total = quadrature::integrate_relative(&mut f, 0.0, tau, 2.0 * PI / k, REL_TOL);
    Ok(total.ln() + reference)
}

/// `ln ∫₀^τ r^{N−1} F(r)² dr`.
pub fn ln_radial_energy(factor: &RadialFactor<'_>, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    match *factor {
        RadialFactor::Bessel { order, k } => ln_bessel_energy(order, k, tau),
        RadialFactor::Solution { solution, profile } => {
            let (v, ln) = solution.energy_to(profile, tau)?;
            Ok(v.ln() + ln)
        }
    }
}

/// `∫₀^τ r^{N−1} F(r)² dr`; may underflow to zero where
/// [`ln_radial_energy`] does not.
pub fn radial_energy(factor: &RadialFactor<'_>, tau: f64) -> Result<f64> {
    Ok(ln_radial_energy(factor, tau)?.exp())
}

/// Where the medium-part ratio came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UPartSource {
    /// `J_μ(kn r/√σ)` for constant media, where the decay is proven.
    ClosedBessel,
    /// The computed radial solution; exploratory.
    RadialSolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRatio {
    pub tau: f64,
    pub ratio_v_sq: f64,
    pub ln_ratio_v_sq: f64,
    pub ratio_u_sq: f64,
    pub ln_ratio_u_sq: f64,
    pub u_source: UPartSource,
}

impl LocalizationRatio {
    pub fn ratio_v(&self) -> f64 {
        self.ratio_v_sq.sqrt()
    }

    pub fn ratio_u(&self) -> f64 {
        self.ratio_u_sq.sqrt()
    }

    /// `log₁₀` of the (unsquared) free-part norm ratio.
    pub fn log10_ratio_v(&self) -> f64 {
        0.5 * self.ln_ratio_v_sq / LN_10
    }
}

fn ln_ratio(factor: &RadialFactor<'_>, tau: f64) -> Result<f64> {
    let whole = ln_radial_energy(factor, 1.0)?;
    if tau == 1.0 {
        return Ok(0.0);
    }
    Ok((ln_radial_energy(factor, tau)? - whole).min(0.0))
}

/// Squared energy ratios `‖·‖²_{B_τ}/‖·‖²_{B_1}` of both eigenfunction parts.
pub fn localization_ratio(p: &MediumProfile, ev: &TransmissionEigenvalue, tau: f64) -> Result<LocalizationRatio> {
    check_tau(tau)?;
    let mode = ev.mode;
    let order = mode.order();
    let ln_v = ln_ratio(&RadialFactor::Bessel { order, k: ev.k }, tau)?;
    let (ln_u, u_source) = match p {
        MediumProfile::Constant { sigma, n } => {
            let kappa = ev.k * n / sigma.sqrt();
            (ln_ratio(&RadialFactor::Bessel { order, k: kappa }, tau)?, UPartSource::ClosedBessel)
        }
        _ => {
            let solution = if p.as_layered().is_some() {
                layered_solve(p, mode, ev.k)?
            } else {
                solve_radial(p, mode, ev.k, DEFAULT_TOL)?
            };
            let factor = RadialFactor::Solution {
                solution: &solution,
                profile: p,
            };
            (ln_ratio(&factor, tau)?, UPartSource::RadialSolution)
        }
    };
    Ok(LocalizationRatio {
        tau,
        ratio_v_sq: ln_v.exp(),
        ln_ratio_v_sq: ln_v,
        ratio_u_sq: ln_u.exp(),
        ln_ratio_u_sq: ln_u,
        u_source,
    })
}

/// Least-squares line `ln(ratio²) ≈ intercept + slope · m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares fit of `y` against `x`; `None` for fewer than two
/// distinct abscissae.
pub fn least_squares(points: &[(f64, f64)]) -> Option<DecayFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(DecayFit {
        slope,
        intercept: my - slope * mx,
        points: points.len(),
    })
}

/// First `m` from which every later row stays below `level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub level: f64,
    pub m: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub mode: Mode,
    pub s0: u32,
    pub k: f64,
    pub ratio: LocalizationRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub dim: Dim,
    pub s0: u32,
    pub tau: f64,
    pub rows: Vec<LocalizationRow>,
    pub skipped: Vec<SkippedMode>,
    /// Fit of `ln(ratio_v²)` against `m`.
    pub fit_v: Option<DecayFit>,
    /// Fit of `ln(ratio_u²)` against `m`.
    pub fit_u: Option<DecayFit>,
    pub thresholds_v: Vec<Threshold>,
    pub thresholds_u: Vec<Threshold>,
}

fn fit(rows: &[LocalizationRow], ln: impl Fn(&LocalizationRatio) -> f64) -> Option<DecayFit> {
    let floor = UNDERFLOW_FLOOR.ln();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (f64::from(r.mode.m), ln(&r.ratio)))
        .filter(|p| p.1 > floor)
        .collect();
    least_squares(&points)
}

fn thresholds(rows: &[LocalizationRow], value: impl Fn(&LocalizationRatio) -> f64) -> Vec<Threshold> {
    THRESHOLD_LEVELS
        .iter()
        .map(|&level| {
            let mut m = None;
            for row in rows.iter().rev() {
                if value(&row.ratio) >= level {
                    break;
                }
                m = Some(row.mode.m);
            }
            Threshold { level, m }
        })
        .collect()
}

/// Eigen-sequence for `m_from..=m_to` followed by the localization ratios
/// of each eigenpair, with decay fits and thresholds.
#[allow(clippy::too_many_arguments)]
pub fn decay_report(
    p: &MediumProfile,
    dim: Dim,
    s0: u32,
    tau: f64,
    m_from: u32,
    m_to: u32,
    opts: &EigenOptions,
) -> Result<LocalizationReport> {
    check_tau(tau)?;
    let seq = eigen_sequence(p, dim, s0, m_from, m_to, opts);
    let mut skipped = seq.skipped;
    let outcomes: Vec<(u32, Result<LocalizationRow>)> = seq
        .eigenvalues
        .par_iter()
        .map(|ev| {
            let row = localization_ratio(p, ev, tau).map(|ratio| LocalizationRow {
                mode: ev.mode,
                s0: ev.s0,
                k: ev.k,
                ratio,
            });
            (ev.mode.m, row)
        })
        .collect();
    let mut rows = Vec::new();
    for (m, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => skipped.push(SkippedMode { m, reason: e.to_string() }),
        }
    }
    skipped.sort_by_key(|s| s.m);
    Ok(LocalizationReport {
        dim,
        s0,
        tau,
        fit_v: fit(&rows, |r| r.ln_ratio_v_sq),
        fit_u: fit(&rows, |r| r.ln_ratio_u_sq),
        thresholds_v: thresholds(&rows, |r| r.ratio_v_sq),
        thresholds_u: thresholds(&rows, |r| r.ratio_u_sq),
        rows,
        skipped,
    })
}
