//! Characteristic functions whose real roots are transmission eigenvalues,
//! Bessel-zero brackets, and certified root finding by bisection.
//!
//! With the free part `v = J_m(kr)` (2D) or `j_m(kr)` (3D) and the medium
//! part `u = α φ_m(r; k)`, the transmission conditions `u = v` and
//! `σ(1)u' = v'` at `r = 1` have a nontrivial solution exactly when
//!
//! * 2D: `f(k) = σ(1)φ'(1)J_m(k) + (mJ_m(k) − kJ_{m−1}(k))φ(1)`
//! * 3D: `f(k) = σ(1)φ'(1)J_{m+½}(k) + ((m+1)J_{m+½}(k) − kJ_{m−½}(k))φ(1)`
//!
//! vanishes.

mod eigenfunction;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{eval_sided, MediumProfile, Side};
use crate::radial::{layered_solve, solve_radial_on, Dim, Mode, DEFAULT_TOL};
use crate::special::bessel_pair;
use crate::special::second_kind::{cylinder_j, sphere_j};

pub use eigenfunction::{assemble_eigenfunction, Eigenfunction};
pub use search::{
    boundary_psi_zeros, eigen_sequence, eigenvalues_in_range, find_eigenvalue, find_eigenvalue_with, scan_modes, Bracket,
    BracketKind, EigenOptions, EigenSequence, PathChoice, SkippedMode, TransmissionEigenvalue, BISECTION_WIDTH,
};

/// Which evaluation produced a characteristic value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    /// Shooting solution of the radial equation.
    Ode,
    /// Closed Bessel form for constant media.
    Closed,
    /// Exact per-layer solution.
    Layered,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Path::Ode => "ode",
            Path::Closed => "closed",
            Path::Layered => "layered",
        })
    }
}

impl std::str::FromStr for Path {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ode" => Ok(Path::Ode),
            "closed" => Ok(Path::Closed),
            "layered" => Ok(Path::Layered),
            _ => Err(Error::Parse {
                offset: 0,
                message: format!("unknown path `{s}`"),
            }),
        }
    }
}

/// A characteristic value `mantissa · e^{ln_scale}`.
///
/// The scale depends on the normalization of the path that produced it, so
/// only signs and roots are comparable between paths. `magnitude` is the sum
/// of the absolute values of the two terms, on the same scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Characteristic {
    pub mantissa: f64,
    pub ln_scale: f64,
    pub magnitude: f64,
    pub path: Path,
}

impl Characteristic {
    fn new(t1: f64, t2: f64, ln_scale: f64, path: Path) -> Result<Self> {
        let c = Characteristic {
            mantissa: t1 + t2,
            ln_scale,
            magnitude: t1.abs() + t2.abs(),
            path,
        };
        if !(c.mantissa.is_finite() && c.magnitude.is_finite()) {
            return Err(Error::NonFinite(format!("characteristic function ({path})")));
        }
        Ok(c)
    }

    /// The value itself; may overflow or underflow.
    pub fn value(&self) -> f64 {
        self.mantissa * self.ln_scale.exp()
    }

    /// `±1`; an exact zero counts as positive.
    pub fn sign(&self) -> f64 {
        if self.mantissa < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// `f / (|term₁| + |term₂|)`, in `[-1, 1]`.
    pub fn scaled(&self) -> f64 {
        if self.magnitude == 0.0 {
            0.0
        } else {
            self.mantissa / self.magnitude
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            reason: "wavenumber must be positive and finite",
        });
    }
    Ok(())
}

/// `(φ(1), φ'(1), ln_scale, path)` from the solver the profile calls for.
pub(crate) fn boundary_data(p: &MediumProfile, mode: Mode, k: f64, tol: f64) -> Result<(f64, f64, f64, Path)> {
    if p.as_layered().is_some() {
        let s = layered_solve(p, mode, k)?;
        Ok((s.phi1, s.dphi1, s.ln_scale, Path::Layered))
    } else {
        let s = solve_radial_on(p, mode, k, tol, &[1.0])?;
        Ok((s.phi1, s.dphi1, s.ln_scale, Path::Ode))
    }
}

/// Assembles `f` from boundary data of the medium part.
pub(crate) fn from_boundary(
    mode: Mode,
    k: f64,
    sigma1: f64,
    (phi1, dphi1, ln_scale, path): (f64, f64, f64, Path),
) -> Result<Characteristic> {
    let pair = bessel_pair(mode.order(), k)?;
    let lead = match mode.dim {
        Dim::Two => f64::from(mode.m),
        Dim::Three => f64::from(mode.m) + 1.0,
    };
    let t1 = sigma1 * dphi1 * pair.j;
    let t2 = (lead * pair.j - k * pair.jm1) * phi1;
    Characteristic::new(t1, t2, ln_scale + pair.ln_scale, path)
}

/// `f_m(k)` from the radial solution (shooting, or the layered closed form).
pub fn characteristic_f(p: &MediumProfile, mode: Mode, k: f64) -> Result<Characteristic> {
    characteristic_f_tol(p, mode, k, DEFAULT_TOL)
}

pub(crate) fn characteristic_f_tol(p: &MediumProfile, mode: Mode, k: f64, tol: f64) -> Result<Characteristic> {
    check_k(k)?;
    let sigma1 = eval_sided(p, 1.0, Side::Inner)?.sigma;
    from_boundary(mode, k, sigma1, boundary_data(p, mode, k, tol)?)
}

/// Closed form for constant `(σ, n)`, `κ = kn/√σ`:
///
/// * 2D: `J_m(κ)J'_m(k) − √σ n J'_m(κ)J_m(k)`
/// * 3D: `j_m(κ)j'_m(k) − √σ n j'_m(κ)j_m(k)`
pub fn characteristic_f_const(sigma: f64, n: f64, mode: Mode, k: f64) -> Result<f64> {
    Ok(closed_form(sigma, n, mode, k)?.value())
}

pub(crate) fn closed_form(sigma: f64, n: f64, mode: Mode, k: f64) -> Result<Characteristic> {
    check_k(k)?;
    for (what, v) in [("sigma", sigma), ("n", n)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain {
                what,
                value: v,
                reason: "coefficient must be positive and finite",
            });
        }
    }
    let kappa = k * n / sigma.sqrt();
    // argument and order checks
    bessel_pair(mode.order(), k)?;
    bessel_pair(mode.order(), kappa)?;
    let eval = match mode.dim {
        Dim::Two => cylinder_j,
        Dim::Three => sphere_j,
    };
    let (a, b) = (eval(mode.m, kappa), eval(mode.m, k));
    let t1 = a.value * b.slope;
    let t2 = -sigma.sqrt() * n * a.slope * b.value;
    Characteristic::new(t1, t2, a.ln_scale + b.ln_scale, Path::Closed)
}
