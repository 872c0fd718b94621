//! Flat rows for tabular export. Floating-point fields serialize as text
//! with 17 significant digits, which round-trips every `f64`.

use serde::{Deserialize, Serialize, Serializer};

use crate::localization::LocalizationRow;
use crate::spectrum::{Path, TransmissionEigenvalue};

/// `x` with 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_f64(*x))
}

fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&format_f64(*v)),
        None => s.serialize_str(""),
    }
}

/// One eigenvalue: `dim, m, s0, k, k_squared, residual, bracket_lo,
/// bracket_hi, path`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub dim: u32,
    pub m: u32,
    pub s0: u32,
    #[serde(serialize_with = "sig17")]
    pub k: f64,
    #[serde(serialize_with = "sig17")]
    pub k_squared: f64,
    #[serde(serialize_with = "sig17")]
    pub residual: f64,
    #[serde(serialize_with = "sig17")]
    pub bracket_lo: f64,
    #[serde(serialize_with = "sig17")]
    pub bracket_hi: f64,
    pub path: Path,
}

impl From<&TransmissionEigenvalue> for EigenRecord {
    fn from(ev: &TransmissionEigenvalue) -> Self {
        EigenRecord {
            dim: ev.mode.dim.value(),
            m: ev.mode.m,
            s0: ev.s0,
            k: ev.k,
            k_squared: ev.k_squared(),
            residual: ev.residual,
            bracket_lo: ev.bracket.k_lo,
            bracket_hi: ev.bracket.k_hi,
            path: ev.path,
        }
    }
}

/// One localization row: `dim, m, s0, k, tau, ratio_v_sq, ratio_u_sq,
/// log10_ratio_v`. The ratios are of squared norms; `log10_ratio_v` is of
/// the norm ratio itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRecord {
    pub dim: u32,
    pub m: u32,
    pub s0: u32,
    #[serde(serialize_with = "sig17")]
    pub k: f64,
    #[serde(serialize_with = "sig17")]
    pub tau: f64,
    #[serde(serialize_with = "sig17")]
    pub ratio_v_sq: f64,
    #[serde(serialize_with = "sig17_opt")]
    pub ratio_u_sq: Option<f64>,
    #[serde(serialize_with = "sig17")]
    pub log10_ratio_v: f64,
}

impl From<&LocalizationRow> for LocalizationRecord {
    fn from(row: &LocalizationRow) -> Self {
        LocalizationRecord {
            dim: row.mode.dim.value(),
            m: row.mode.m,
            s0: row.s0,
            k: row.k,
            tau: row.ratio.tau,
            ratio_v_sq: row.ratio.ratio_v_sq,
            ratio_u_sq: Some(row.ratio.ratio_u_sq),
            log10_ratio_v: row.ratio.log10_ratio_v(),
        }
    }
}

/// One radial sample of an eigenpair: `r, u_radial, v_radial, psi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    #[serde(serialize_with = "sig17")]
    pub r: f64,
    #[serde(serialize_with = "sig17")]
    pub u_radial: f64,
    #[serde(serialize_with = "sig17")]
    pub v_radial: f64,
    #[serde(serialize_with = "sig17")]
    pub psi: f64,
}
