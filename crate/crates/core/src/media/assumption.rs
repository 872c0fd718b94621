//! Sampled verification of the hypotheses on `(σ, n)` under which the
//! boundary-localized eigenvalue sequences exist.

use serde::{Deserialize, Serialize};

use super::{eval_medium, MediumProfile};

/// Margin applied to the extracted bounds on `n`.
const N_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// `1 < n₁ < n(r) < n₂`
    A1,
    /// `1 < M₁ ≤ M₂`
    A2,
    /// `σ'(r) ≤ 0`
    A3,
    /// `M₁ ≤ n²/σ ≤ M₂`
    A4,
    /// `σ'² ≥ 2σ''σ`
    A5,
    /// `M₁k² ≤ k²n²/σ + σ'²/4σ² − σ''/2σ ≤ M₂k²` with `M₁ > 1`
    CC1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    /// Radius of the worst sample, if the condition is pointwise.
    pub r: Option<f64>,
    pub detail: String,
}

/// The combined condition evaluated at one wavenumber. `m1`, `m2` are the
/// tightest constants for which it holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cc1Check {
    pub k: f64,
    pub m1: f64,
    pub m2: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionAReport {
    /// False for layered media, which are not `C²`.
    pub applicable: bool,
    pub holds: bool,
    pub n1: f64,
    pub n2: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    /// Whether `1 < M₁ < M₂` holds with strict inequality. The report
    /// reads (A2) as `M₁ ≤ M₂`, which constant media need.
    pub strict_a2: bool,
    pub grid_size: usize,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc1: Option<Cc1Check>,
}

/// Checks (A1)–(A5) on `grid_size` uniform samples of `[0, 1]` (both
/// endpoints included), and the combined condition at `k` if given.
/// Failures are reported, not returned as errors.
pub fn validate_assumption_a(p: &MediumProfile, grid_size: usize, k: Option<f64>) -> AssumptionAReport {
    let grid_size = grid_size.max(2);
    if let Some(layered) = p.as_layered() {
        let ns = layered.layers().iter().map(|l| l.n);
        let ratios = layered.layers().iter().map(|l| l.n * l.n / l.sigma);
        return AssumptionAReport {
            applicable: false,
            holds: false,
            n1: ns.clone().fold(f64::INFINITY, f64::min) - N_MARGIN,
            n2: ns.fold(0.0, f64::max) + N_MARGIN,
            m1: ratios.clone().fold(f64::INFINITY, f64::min),
            m2: ratios.fold(0.0, f64::max),
            strict_a2: false,
            grid_size,
            violations: vec![Violation {
                condition: Condition::A3,
                r: None,
                detail: "layered coefficients are discontinuous; Assumption A does not apply".into(),
            }],
            cc1: None,
        };
    }

    let mut n_min = f64::INFINITY;
    let mut n_max = f64::NEG_INFINITY;
    let mut m1 = f64::INFINITY;
    let mut m2 = f64::NEG_INFINITY;
    // (worst value, radius, count) for the pointwise conditions
    let mut a3 = (0.0, 0.0, 0usize);
    let mut a5 = (0.0, 0.0, 0usize);
    let mut cc = (f64::INFINITY, f64::NEG_INFINITY);
    let mut a1_worst = (f64::INFINITY, 0.0);

    for i in 0..grid_size {
        let r = i as f64 / (grid_size - 1) as f64;
        let c = eval_medium(p, r).expect("r lies in [0, 1]");
        n_min = n_min.min(c.n);
        n_max = n_max.max(c.n);
        if c.n < a1_worst.0 {
            a1_worst = (c.n, r);
        }
        let q = c.n2_over_sigma();
        m1 = m1.min(q);
        m2 = m2.max(q);

        let scale = 1.0 + c.sigma.abs();
        if c.dsigma > 1e-12 * scale {
            a3.2 += 1;
            if c.dsigma > a3.0 {
                a3 = (c.dsigma, r, a3.2);
            }
        }
        let gap = c.dsigma * c.dsigma - 2.0 * c.ddsigma * c.sigma;
        if gap < -1e-12 * scale * scale {
            a5.2 += 1;
            if gap < a5.0 {
                a5 = (gap, r, a5.2);
            }
        }
        if let Some(k) = k {
            let correction = gap / (4.0 * c.sigma * c.sigma);
            let v = q + correction / (k * k);
            cc = (cc.0.min(v), cc.1.max(v));
        }
    }

    let n1 = n_min - N_MARGIN;
    let n2 = n_max + N_MARGIN;
    let mut violations = Vec::new();
    if n1 <= 1.0 {
        violations.push(Violation {
            condition: Condition::A1,
            r: Some(a1_worst.1),
            detail: format!("inf n = {n_min} does not exceed 1"),
        });
    }
    if !(m1 > 1.0 && m1 <= m2) {
        violations.push(Violation {
            condition: Condition::A2,
            r: None,
            detail: format!("M1 = {m1} must exceed 1"),
        });
    }
    if a3.2 > 0 {
        violations.push(Violation {
            condition: Condition::A3,
            r: Some(a3.1),
            detail: format!("sigma' = {} > 0 at {} sample(s)", a3.0, a3.2),
        });
    }
    if a5.2 > 0 {
        violations.push(Violation {
            condition: Condition::A5,
            r: Some(a5.1),
            detail: format!("sigma'^2 - 2 sigma'' sigma = {} < 0 at {} sample(s)", a5.0, a5.2),
        });
    }
    let cc1 = k.map(|k| Cc1Check {
        k,
        m1: cc.0,
        m2: cc.1,
        holds: cc.0 > 1.0,
    });
    if let Some(c) = &cc1 {
        if !c.holds {
            violations.push(Violation {
                condition: Condition::CC1,
                r: None,
                detail: format!("combined lower bound {} does not exceed 1 at k = {}", c.m1, c.k),
            });
        }
    }
    // (A4) holds by construction of M₁, M₂ as the sampled extremes.
    let holds = violations.iter().all(|v| v.condition == Condition::CC1);
    AssumptionAReport {
        applicable: true,
        holds,
        n1,
        n2,
        m1,
        m2,
        strict_a2: m1 > 1.0 && m1 < m2,
        grid_size,
        violations,
        cc1,
    }
}
