use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{boundary_data, characteristic_f_tol, closed_form, Characteristic, Path};
use crate::error::{Error, Result};
use crate::media::{validate_assumption_a, MediumProfile};
use crate::radial::{Dim, Mode, DEFAULT_TOL};
use crate::special::bessel_zero;

/// Width of the final sign-change bracket around every eigenvalue.
pub const BISECTION_WIDTH: f64 = 1e-9;

const BASE_SAMPLES: usize = 64;
const MAX_SAMPLES: usize = 1024;
const ASSUMPTION_GRID: usize = 4001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketKind {
    /// Between consecutive zeros of `k ↦ ψ_m(1; k)` (variable media).
    Sturm,
    /// `[√σ j_{μ,s₀}/n, √σ j_{μ,s₀+1}/n]` for constant media with `n² > σ`.
    Interlace,
    /// `[j_{μ,s₀}, j_{μ,s₀+1}]` for constant media with `n² < σ`: the image
    /// of the dual problem's interlace bracket.
    DualInterlace,
    /// A cell of a uniform scan.
    Scan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub mode: Mode,
    pub s0: u32,
    pub k_lo: f64,
    pub k_hi: f64,
    pub kind: BracketKind,
    /// The ψ-boundary zeros that delimit a Sturm bracket.
    pub witnesses: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmissionEigenvalue {
    pub mode: Mode,
    pub s0: u32,
    pub k: f64,
    /// Scaled residual `|f(k)|/(|term₁| + |term₂|)`.
    pub residual: f64,
    pub bracket: Bracket,
    /// Final interval, at most [`BISECTION_WIDTH`] wide, on whose ends `f`
    /// has opposite signs.
    pub certificate: (f64, f64),
    pub path: Path,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TransmissionEigenvalue {
    pub fn k_squared(&self) -> f64 {
        self.k * self.k
    }

    /// Re-evaluates `f` on the certificate ends along the recorded path.
    pub fn verify(&self, p: &MediumProfile) -> Result<bool> {
        let (a, b) = self.certificate;
        let fa = evaluate(p, self.mode, a, self.path, DEFAULT_TOL)?;
        let fb = evaluate(p, self.mode, b, self.path, DEFAULT_TOL)?;
        Ok(b - a <= BISECTION_WIDTH && fa.sign() != fb.sign())
    }
}

/// Which characteristic function to use for constant media.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathChoice {
    /// Closed form for constant media, otherwise the radial solution.
    #[default]
    Auto,
    Ode,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub path: PathChoice,
    /// Shooting tolerance.
    pub tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            path: PathChoice::Auto,
            tol: DEFAULT_TOL,
        }
    }
}

fn resolve_path(p: &MediumProfile, choice: PathChoice) -> Result<Path> {
    match (choice, p) {
        (_, MediumProfile::Layered(_)) => match choice {
            PathChoice::Closed => Err(Error::WrongProfileKind {
                expected: "constant",
                found: "layered",
            }),
            _ => Ok(Path::Layered),
        },
        (PathChoice::Closed, MediumProfile::Smooth(_)) => Err(Error::WrongProfileKind {
            expected: "constant",
            found: "smooth",
        }),
        (PathChoice::Ode, _) | (PathChoice::Auto, MediumProfile::Smooth(_)) => Ok(Path::Ode),
        (_, MediumProfile::Constant { .. }) => Ok(Path::Closed),
    }
}

fn evaluate(p: &MediumProfile, mode: Mode, k: f64, path: Path, tol: f64) -> Result<Characteristic> {
    match path {
        Path::Closed => {
            let (sigma, n) = p.constant_values().ok_or(Error::WrongProfileKind {
                expected: "constant",
                found: p.kind(),
            })?;
            closed_form(sigma, n, mode, k)
        }
        Path::Ode | Path::Layered => characteristic_f_tol(p, mode, k, tol),
    }
}

/// Bisects a sign change of `f` on `[a, b]` down to [`BISECTION_WIDTH`].
fn bisect<F>(f: &mut F, mut a: f64, mut b: f64, sign_a: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    while b - a > BISECTION_WIDTH {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid)? == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Uniform samples `lo + (hi − lo) i/n`, `i = 0..=n`.
fn samples(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
}

/// All sign changes of `f` on a uniform `n`-cell scan of `[lo, hi]`, each
/// bisected down to [`BISECTION_WIDTH`].
fn sign_changes<F>(f: &mut F, lo: f64, hi: f64, n: usize, first_only: bool) -> Result<(Vec<(f64, f64)>, Vec<f64>)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = Vec::new();
    let mut scanned = Vec::with_capacity(n + 1);
    let mut prev: Option<(f64, f64)> = None;
    for x in samples(lo, hi, n) {
        let s = f(x)?;
        scanned.push(s);
        if let Some((px, ps)) = prev {
            if s != ps {
                out.push(bisect(f, px, x, ps)?);
                if first_only {
                    break;
                }
            }
        }
        prev = Some((x, s));
    }
    Ok((out, scanned))
}

fn finish(
    p: &MediumProfile,
    mode: Mode,
    s0: u32,
    path: Path,
    tol: f64,
    (a, b): (f64, f64),
    bracket: Bracket,
    notes: Vec<String>,
) -> Result<TransmissionEigenvalue> {
    let k = 0.5 * (a + b);
    let residual = evaluate(p, mode, k, path, tol)?.scaled().abs();
    Ok(TransmissionEigenvalue {
        mode,
        s0,
        k,
        residual,
        bracket,
        certificate: (a, b),
        path,
        notes,
    })
}

fn check_s0(s0: u32) -> Result<()> {
    if s0 == 0 {
        return Err(Error::Domain {
            what: "s0",
            value: 0.0,
            reason: "zero index s0 starts at 1",
        });
    }
    Ok(())
}

/// `M₁` from the Assumption A check; errors when the assumption fails.
fn lower_ratio(p: &MediumProfile) -> Result<f64> {
    let report = validate_assumption_a(p, ASSUMPTION_GRID, None);
    if !report.holds {
        let detail: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("{:?}: {}", v.condition, v.detail))
            .collect();
        return Err(Error::AssumptionA(detail.join("; ")));
    }
    Ok(report.m1)
}

/// Zeros of `k ↦ ψ_m(1; k)` in `[j_{μ,s₀}/√M₁, j_{μ,s₀+2}/√M₁]`, scanning
/// `per_gap` cells in each of the two zero gaps. Returns the zeros and the
/// outer interval.
fn psi_boundary_zeros(
    p: &MediumProfile,
    mode: Mode,
    s0: u32,
    m1: f64,
    per_gap: usize,
    tol: f64,
) -> Result<(Vec<f64>, (f64, f64), Vec<f64>)> {
    let order = mode.order();
    let root = m1.sqrt();
    let edges = [
        bessel_zero(order, s0)? / root,
        bessel_zero(order, s0 + 1)? / root,
        bessel_zero(order, s0 + 2)? / root,
    ];
    // ψ(1) = √σ(1) φ(1) has the sign of φ(1).
    let mut psi1 = |k: f64| -> Result<f64> { Ok(sign_of(boundary_data(p, mode, k, tol)?.0)) };
    let mut zeros = Vec::new();
    let mut scanned = Vec::new();
    for g in 0..2 {
        let (found, values) = sign_changes(&mut psi1, edges[g], edges[g + 1], per_gap, false)?;
        zeros.extend(found.into_iter().map(|(a, b)| 0.5 * (a + b)));
        scanned.extend(values);
    }
    zeros.dedup_by(|a, b| (*a - *b).abs() <= BISECTION_WIDTH);
    Ok((zeros, (edges[0], edges[2]), scanned))
}

/// The first two zeros `z_{m,s₀} < z_{m,s₀+1}` of `k ↦ ψ_m(1; k)` above
/// `j_{μ,s₀}/√M₁`, within `j_{μ,s₀+2}/√M₁`. `M₁` is taken from the
/// Assumption A check, which must pass.
pub fn boundary_psi_zeros(p: &MediumProfile, mode: Mode, s0: u32) -> Result<(f64, f64)> {
    check_s0(s0)?;
    if p.as_layered().is_some() {
        return Err(Error::WrongProfileKind {
            expected: "smooth or constant",
            found: "layered",
        });
    }
    let m1 = lower_ratio(p)?;
    let mut per_gap = BASE_SAMPLES;
    loop {
        let (zeros, (lo, hi), scanned) = psi_boundary_zeros(p, mode, s0, m1, per_gap, DEFAULT_TOL)?;
        if zeros.len() >= 2 {
            return Ok((zeros[0], zeros[1]));
        }
        if per_gap >= MAX_SAMPLES {
            return Err(Error::NoSignChange {
                what: "psi(1; k)",
                m: mode.m,
                lo,
                hi,
                samples: scanned,
            });
        }
        per_gap *= 2;
    }
}

/// Eigenvalue for `(mode, s₀)` with default options.
pub fn find_eigenvalue(p: &MediumProfile, mode: Mode, s0: u32) -> Result<TransmissionEigenvalue> {
    find_eigenvalue_with(p, mode, s0, &EigenOptions::default())
}

/// Variable media: the sign of `f` is compared at consecutive zeros of
/// `k ↦ ψ_m(1; k)` and the first pair with a sign change is bisected.
/// Constant media: the interlace bracket is scanned and the first sign
/// change is bisected. Layered media have no bracket theory; use
/// [`eigenvalues_in_range`].
pub fn find_eigenvalue_with(
    p: &MediumProfile,
    mode: Mode,
    s0: u32,
    opts: &EigenOptions,
) -> Result<TransmissionEigenvalue> {
    check_s0(s0)?;
    if p.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let path = resolve_path(p, opts.path)?;
    match p {
        MediumProfile::Layered(_) => Err(Error::WrongProfileKind {
            expected: "smooth or constant",
            found: "layered",
        }),
        MediumProfile::Constant { sigma, n } => constant_eigenvalue(p, mode, s0, *sigma, *n, path, opts.tol),
        MediumProfile::Smooth(_) => sturm_eigenvalue(p, mode, s0, path, opts.tol),
    }
}

#[allow(clippy::too_many_arguments)]
fn constant_eigenvalue(
    p: &MediumProfile,
    mode: Mode,
    s0: u32,
    sigma: f64,
    n: f64,
    path: Path,
    tol: f64,
) -> Result<TransmissionEigenvalue> {
    if n * n == sigma {
        return Err(Error::InvalidMedium(format!(
            "constant media need n² ≠ σ, got n² = σ = {sigma}"
        )));
    }
    let order = mode.order();
    let (j1, j2) = (bessel_zero(order, s0)?, bessel_zero(order, s0 + 1)?);
    let (kind, lo, hi) = if n * n > sigma {
        let c = sigma.sqrt() / n;
        (BracketKind::Interlace, c * j1, c * j2)
    } else {
        (BracketKind::DualInterlace, j1, j2)
    };
    let bracket = Bracket {
        mode,
        s0,
        k_lo: lo,
        k_hi: hi,
        kind,
        witnesses: None,
    };
    let mut f = |k: f64| -> Result<f64> { Ok(evaluate(p, mode, k, path, tol)?.sign()) };
    let mut cells = BASE_SAMPLES;
    loop {
        let (found, scanned) = sign_changes(&mut f, lo, hi, cells, true)?;
        if let Some(&cert) = found.first() {
            return finish(p, mode, s0, path, tol, cert, bracket, Vec::new());
        }
        if cells >= MAX_SAMPLES {
            return Err(Error::NoSignChange {
                what: "f",
                m: mode.m,
                lo,
                hi,
                samples: scanned,
            });
        }
        cells *= 2;
    }
}

fn sturm_eigenvalue(p: &MediumProfile, mode: Mode, s0: u32, path: Path, tol: f64) -> Result<TransmissionEigenvalue> {
    let m1 = lower_ratio(p)?;
    let mut per_gap = BASE_SAMPLES;
    let mut last_count = None;
    loop {
        let (zeros, (lo, hi), _) = psi_boundary_zeros(p, mode, s0, m1, per_gap, tol)?;
        let values: Vec<Characteristic> = zeros
            .iter()
            .map(|&z| evaluate(p, mode, z, path, tol))
            .collect::<Result<_>>()?;
        let pair = (0..zeros.len().saturating_sub(1)).find(|&i| values[i].sign() != values[i + 1].sign());
        if let Some(i) = pair {
            let (za, zb) = (zeros[i], zeros[i + 1]);
            let mut f = |k: f64| -> Result<f64> { Ok(evaluate(p, mode, k, path, tol)?.sign()) };
            let cert = bisect(&mut f, za, zb, values[i].sign())?;
            let mut notes = Vec::new();
            if zeros.len() > 2 {
                notes.push(format!(
                    "{} zeros of psi(1; k) in [{lo:.6}, {hi:.6}]; used pair {} and {}",
                    zeros.len(),
                    i + 1,
                    i + 2
                ));
            }
            let bracket = Bracket {
                mode,
                s0,
                k_lo: za,
                k_hi: zb,
                kind: BracketKind::Sturm,
                witnesses: Some((za, zb)),
            };
            return finish(p, mode, s0, path, tol, cert, bracket, notes);
        }
        // Refining only helps if it can reveal zeros the coarse scan missed.
        if per_gap >= MAX_SAMPLES || last_count == Some(zeros.len()) {
            return Err(Error::NoSignChange {
                what: "f",
                m: mode.m,
                lo,
                hi,
                samples: values.iter().map(Characteristic::scaled).collect(),
            });
        }
        last_count = Some(zeros.len());
        per_gap *= 2;
    }
}

/// An angular index without an eigenvalue, and why.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedMode {
    pub m: u32,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSequence {
    pub eigenvalues: Vec<TransmissionEigenvalue>,
    pub skipped: Vec<SkippedMode>,
    /// `[1/√M₁, (1+√M₁)/(2√M₁)]`, when `M₁ > 1` is known.
    pub ratio_bounds: Option<(f64, f64)>,
    /// Smallest `m` from which every found `k/m` lies within
    /// `ratio_bounds`.
    pub ratio_threshold: Option<u32>,
}

fn lower_ratio_if_known(p: &MediumProfile) -> Option<f64> {
    match p {
        MediumProfile::Constant { sigma, n } => Some(n * n / sigma),
        MediumProfile::Smooth(_) => {
            let r = validate_assumption_a(p, ASSUMPTION_GRID, None);
            r.holds.then_some(r.m1)
        }
        MediumProfile::Layered(_) => None,
    }
}

/// [`find_eigenvalue_with`] for every `m` in `m_from..=m_to`, in parallel.
/// Failures are recorded in `skipped`; results are sorted by `m`.
pub fn eigen_sequence(
    p: &MediumProfile,
    dim: Dim,
    s0: u32,
    m_from: u32,
    m_to: u32,
    opts: &EigenOptions,
) -> EigenSequence {
    let outcomes: Vec<(u32, Result<TransmissionEigenvalue>)> = (m_from..=m_to)
        .into_par_iter()
        .map(|m| (m, find_eigenvalue_with(p, Mode::new(dim, m), s0, opts)))
        .collect();
    let mut eigenvalues = Vec::new();
    let mut skipped = Vec::new();
    for (m, outcome) in outcomes {
        match outcome {
            Ok(ev) => eigenvalues.push(ev),
            Err(e) => skipped.push(SkippedMode { m, reason: e.to_string() }),
        }
    }
    eigenvalues.sort_by(|a, b| (a.mode.m, a.k).partial_cmp(&(b.mode.m, b.k)).unwrap());

    let ratio_bounds = lower_ratio_if_known(p).filter(|&m1| m1 > 1.0).map(|m1| {
        let r = m1.sqrt();
        (1.0 / r, (1.0 + r) / (2.0 * r))
    });
    let ratio_threshold = ratio_bounds.and_then(|(lo, hi)| {
        let mut threshold = None;
        for ev in eigenvalues.iter().rev() {
            let ratio = ev.k / f64::from(ev.mode.m.max(1));
            if ev.mode.m == 0 || !(lo..=hi).contains(&ratio) {
                break;
            }
            threshold = Some(ev.mode.m);
        }
        threshold
    });
    EigenSequence {
        eigenvalues,
        skipped,
        ratio_bounds,
        ratio_threshold,
    }
}

/// Every sign change of `f` on a uniform `cells`-cell scan of
/// `[k_lo, k_hi]`, bisected to [`BISECTION_WIDTH`]. Works for every profile
/// kind; `s0` of the results counts roots from 1 within the range.
pub fn eigenvalues_in_range(
    p: &MediumProfile,
    mode: Mode,
    k_lo: f64,
    k_hi: f64,
    cells: usize,
    opts: &EigenOptions,
) -> Result<Vec<TransmissionEigenvalue>> {
    if !(k_lo > 0.0 && k_lo < k_hi && k_hi.is_finite()) {
        return Err(Error::Domain {
            what: "k_lo",
            value: k_lo,
            reason: "range must satisfy 0 < k_lo < k_hi",
        });
    }
    if p.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let path = resolve_path(p, opts.path)?;
    let mut f = |k: f64| -> Result<f64> { Ok(evaluate(p, mode, k, path, opts.tol)?.sign()) };
    let (found, _) = sign_changes(&mut f, k_lo, k_hi, cells.max(1), false)?;
    let width = (k_hi - k_lo) / cells.max(1) as f64;
    found
        .into_iter()
        .enumerate()
        .map(|(i, cert)| {
            let cell = ((cert.0 - k_lo) / width).floor();
            let bracket = Bracket {
                mode,
                s0: i as u32 + 1,
                k_lo: k_lo + cell * width,
                k_hi: (k_lo + (cell + 1.0) * width).min(k_hi),
                kind: BracketKind::Scan,
                witnesses: None,
            };
            finish(p, mode, i as u32 + 1, path, opts.tol, cert, bracket, Vec::new())
        })
        .collect()
}

/// [`eigenvalues_in_range`] for every `m` in `m_from..=m_to`, in parallel,
/// sorted by `(m, k)`.
#[allow(clippy::too_many_arguments)]
pub fn scan_modes(
    p: &MediumProfile,
    dim: Dim,
    m_from: u32,
    m_to: u32,
    k_lo: f64,
    k_hi: f64,
    cells: usize,
    opts: &EigenOptions,
) -> Result<Vec<TransmissionEigenvalue>> {
    let per_mode: Vec<Vec<TransmissionEigenvalue>> = (m_from..=m_to)
        .into_par_iter()
        .map(|m| eigenvalues_in_range(p, Mode::new(dim, m), k_lo, k_hi, cells, opts))
        .collect::<Result<_>>()?;
    Ok(per_mode.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::BesselOrder;

    fn j(m: u32, s: u32) -> f64 {
        bessel_zero(BesselOrder::integer(m), s).unwrap()
    }

    #[test]
    fn bisection_reaches_width() {
        let mut f = |x: f64| -> Result<f64> { Ok(sign_of(x - 0.3)) };
        let (a, b) = bisect(&mut f, 0.0, 1.0, -1.0).unwrap();
        assert!(b - a <= BISECTION_WIDTH && a <= 0.3 && b >= 0.3);
    }

    #[test]
    fn scan_finds_every_sign_change() {
        let mut f = |x: f64| -> Result<f64> { Ok(sign_of(x.sin())) };
        let (found, scanned) = sign_changes(&mut f, 1.0, 10.0, 90, false).unwrap();
        assert_eq!(scanned.len(), 91);
        assert_eq!(found.len(), 3);
        for (i, (a, b)) in found.iter().enumerate() {
            let want = std::f64::consts::PI * (i + 1) as f64;
            assert!(*a <= want && want <= *b);
        }
    }

    #[test]
    fn constant_eigenvalue_lies_in_interlace_bracket() {
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        let ev = find_eigenvalue(&p, Mode::new(Dim::Two, 10), 1).unwrap();
        assert_eq!(ev.bracket.kind, BracketKind::Interlace);
        assert!(ev.k > j(10, 1) / 2.0 && ev.k < j(10, 2) / 2.0);
        assert!(ev.certificate.1 - ev.certificate.0 <= BISECTION_WIDTH);
        assert!(ev.verify(&p).unwrap());
        assert_eq!(ev.path, Path::Closed);
    }

    #[test]
    fn dual_bracket_for_weak_contrast() {
        let p = MediumProfile::constant(4.0, 1.5).unwrap();
        let ev = find_eigenvalue(&p, Mode::new(Dim::Two, 12), 1).unwrap();
        assert_eq!(ev.bracket.kind, BracketKind::DualInterlace);
        assert!(ev.k > j(12, 1) && ev.k < j(12, 2));
    }

    #[test]
    fn rejections() {
        let mode = Mode::new(Dim::Two, 3);
        let unit = MediumProfile::constant(1.0, 1.0).unwrap();
        assert_eq!(find_eigenvalue(&unit, mode, 1), Err(Error::Degenerate));
        let matched = MediumProfile::constant(4.0, 2.0).unwrap();
        assert!(matches!(find_eigenvalue(&matched, mode, 1), Err(Error::InvalidMedium(_))));
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        assert!(find_eigenvalue(&p, mode, 0).is_err());
        let smooth = MediumProfile::smooth("1 + r", "2").unwrap();
        assert!(matches!(find_eigenvalue(&smooth, mode, 1), Err(Error::AssumptionA(_))));
    }

    #[test]
    fn empty_sequence() {
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        let seq = eigen_sequence(&p, Dim::Two, 1, 5, 4, &EigenOptions::default());
        assert!(seq.eigenvalues.is_empty() && seq.skipped.is_empty());
    }
}
