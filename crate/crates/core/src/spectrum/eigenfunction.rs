use super::TransmissionEigenvalue;
use crate::error::{Error, Result};
use crate::media::{eval_sided, MediumProfile, Side};
use crate::radial::{layered_solve, solve_radial, Dim, RadialSolution};
use crate::special::{bessel_j, bessel_j_prime, spherical_j, BesselOrder};

/// Radial factors of an eigenpair: `v = J_m(kr)` (2D) or `j_m(kr)` (3D)
/// with unit coefficient, and `u = α φ_m(r; k)` with `α = v(1)/φ(1)`.
#[derive(Clone, Debug)]
pub struct Eigenfunction {
    pub eigenvalue: TransmissionEigenvalue,
    pub u: RadialSolution,
    /// `v(1)`.
    pub v1: f64,
    /// `σ(1)`.
    pub sigma1: f64,
}

impl Eigenfunction {
    /// `α = v(1)/φ(1)`, which may overflow for large `m`.
    pub fn alpha(&self) -> f64 {
        self.v1 / self.u.phi1 * (-self.u.ln_scale).exp()
    }

    /// `ln |α|`.
    pub fn ln_abs_alpha(&self) -> f64 {
        (self.v1 / self.u.phi1).abs().ln() - self.u.ln_scale
    }

    /// `(u, u')` at `r`.
    pub fn u_at(&self, p: &MediumProfile, r: f64) -> Result<(f64, f64)> {
        let (phi, dphi) = self.u.value_at(p, r)?;
        let c = self.v1 / self.u.phi1;
        Ok((c * phi, c * dphi))
    }

    /// `(v, v')` at `r`.
    pub fn v_at(&self, r: f64) -> Result<(f64, f64)> {
        free_factor(self.u.mode.dim, self.u.mode.m, self.u.k, r)
    }

    /// Relative mismatch of `u = v` and `σ(1)u' = v'` at `r = 1`. The flux
    /// residual is relative to `max(|v'(1)|, k|v(1)|)`.
    pub fn interface_residuals(&self) -> Result<(f64, f64)> {
        let (v, dv) = self.v_at(1.0)?;
        let u = self.v1;
        let du = self.v1 * self.u.dphi1 / self.u.phi1;
        let value = (u - v).abs() / v.abs().max(1e-300);
        let flux = (self.sigma1 * du - dv).abs() / dv.abs().max(self.u.k * v.abs()).max(1e-300);
        Ok((value, flux))
    }
}

pub(crate) fn free_factor(dim: Dim, m: u32, k: f64, r: f64) -> Result<(f64, f64)> {
    let x = k * r;
    match dim {
        Dim::Two => {
            let o = BesselOrder::integer(m);
            let v = bessel_j(o, x)?;
            let dv = if x == 0.0 {
                if m == 1 {
                    0.5 * k
                } else {
                    0.0
                }
            } else {
                k * bessel_j_prime(o, x)?
            };
            Ok((v, dv))
        }
        Dim::Three => {
            let (v, dv) = spherical_j(m, x)?;
            Ok((v, k * dv))
        }
    }
}

/// Builds the eigenpair of `ev` on `p`. Fails when `φ(1; k)` is too close
/// to zero to normalize `u` against `v`.
pub fn assemble_eigenfunction(p: &MediumProfile, ev: &TransmissionEigenvalue) -> Result<Eigenfunction> {
    if p.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let (mode, k) = (ev.mode, ev.k);
    let u = if p.as_layered().is_some() {
        layered_solve(p, mode, k)?
    } else {
        solve_radial(p, mode, k, crate::radial::DEFAULT_TOL)?
    };
    if u.phi1.abs() <= 1e-10 * u.phi1.hypot(u.dphi1 / k.max(1.0)) {
        return Err(Error::DegenerateNormalization(k));
    }
    let (v1, _) = free_factor(mode.dim, mode.m, k, 1.0)?;
    Ok(Eigenfunction {
        eigenvalue: ev.clone(),
        u,
        v1,
        sigma1: eval_sided(p, 1.0, Side::Inner)?.sigma,
    })
}
