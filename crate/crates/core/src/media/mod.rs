//! Radially symmetric media `(σ(r), n(r))` on the unit ball.

mod assumption;
mod expr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assumption::{validate_assumption_a, AssumptionAReport, Cc1Check, Condition, Violation};
pub use expr::{Expr, Jet};

/// Which side of a layer interface to evaluate on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The layer with smaller radii.
    Inner,
    /// The layer with larger radii.
    Outer,
}

/// Coefficient values at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub sigma: f64,
    pub dsigma: f64,
    pub ddsigma: f64,
    pub n: f64,
}

impl Coefficients {
    pub fn n2_over_sigma(&self) -> f64 {
        self.n * self.n / self.sigma
    }
}

/// One constant layer `r_{i-1} < r < r_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layer {
    pub r_max: f64,
    pub sigma: f64,
    pub n: f64,
}

/// A smooth profile given by two expressions in `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothProfile {
    sigma: Expr,
    n: Expr,
    /// `n` holds `n²`.
    squared: bool,
}

impl SmoothProfile {
    pub fn sigma(&self) -> &Expr {
        &self.sigma
    }

    fn n_at(&self, r: f64) -> f64 {
        let v = self.n.eval(r).v;
        if self.squared {
            v.sqrt()
        } else {
            v
        }
    }
}

/// Piecewise-constant layers covering `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredProfile {
    layers: Vec<Layer>,
}

impl LayeredProfile {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Interior breakpoints `r_1 < … < r_{L-1}`.
    pub fn interfaces(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.r_max)
    }

    fn layer_index(&self, r: f64, side: Option<Side>) -> Result<usize> {
        for (i, l) in self.layers.iter().enumerate() {
            if r < l.r_max {
                return Ok(i);
            }
            if r == l.r_max {
                if i + 1 == self.layers.len() {
                    return Ok(i);
                }
                return match side {
                    Some(Side::Inner) => Ok(i),
                    Some(Side::Outer) => Ok(i + 1),
                    None => Err(Error::AtInterface(r)),
                };
            }
        }
        Ok(self.layers.len() - 1)
    }
}

/// A radial medium. Immutable once built; cheap to clone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MediumSpec", into = "MediumSpec")]
pub enum MediumProfile {
    Constant { sigma: f64, n: f64 },
    Smooth(SmoothProfile),
    Layered(LayeredProfile),
}

fn positive(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidMedium(format!("{what} must be positive and finite, got {v}")))
    }
}

const SMOOTH_CHECK_POINTS: usize = 1001;

impl MediumProfile {
    pub fn constant(sigma: f64, n: f64) -> Result<Self> {
        Ok(MediumProfile::Constant {
            sigma: positive("sigma", sigma)?,
            n: positive("n", n)?,
        })
    }

    /// Smooth profile from expressions for `σ(r)` and `n(r)`.
    pub fn smooth(sigma: &str, n: &str) -> Result<Self> {
        Self::smooth_from(Expr::parse(sigma)?, Expr::parse(n)?, false)
    }

    /// Smooth profile from expressions for `σ(r)` and `n(r)²`.
    pub fn smooth_n2(sigma: &str, n2: &str) -> Result<Self> {
        Self::smooth_from(Expr::parse(sigma)?, Expr::parse(n2)?, true)
    }

    fn smooth_from(sigma: Expr, n: Expr, squared: bool) -> Result<Self> {
        let p = SmoothProfile { sigma, n, squared };
        for i in 0..SMOOTH_CHECK_POINTS {
            let r = i as f64 / (SMOOTH_CHECK_POINTS - 1) as f64;
            let s = p.sigma.eval(r);
            if !s.is_finite() || s.v <= 0.0 {
                return Err(Error::InvalidMedium(format!(
                    "sigma = {} is not positive with finite derivatives at r = {r}",
                    p.sigma
                )));
            }
            let n = p.n_at(r);
            if !n.is_finite() || n <= 0.0 {
                return Err(Error::InvalidMedium(format!("n is not positive at r = {r}")));
            }
        }
        Ok(MediumProfile::Smooth(p))
    }

    /// Layers listed from the centre outward; the last `r_max` must be 1.
    pub fn layered(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidMedium("a layered profile needs at least one layer".into()));
        }
        let mut prev = 0.0;
        for l in &layers {
            if !(l.r_max > prev) {
                return Err(Error::InvalidMedium(format!(
                    "layer breakpoints must be strictly increasing, got {} after {prev}",
                    l.r_max
                )));
            }
            positive("layer sigma", l.sigma)?;
            positive("layer n", l.n)?;
            prev = l.r_max;
        }
        if prev != 1.0 {
            return Err(Error::InvalidMedium(format!("the outer layer must end at r = 1, got {prev}")));
        }
        Ok(MediumProfile::Layered(LayeredProfile { layers }))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MediumProfile::Constant { .. } => "constant",
            MediumProfile::Smooth(_) => "smooth",
            MediumProfile::Layered(_) => "layered",
        }
    }

    /// `(σ, n)` for constant media.
    pub fn constant_values(&self) -> Option<(f64, f64)> {
        match *self {
            MediumProfile::Constant { sigma, n } => Some((sigma, n)),
            _ => None,
        }
    }

    pub fn as_layered(&self) -> Option<&LayeredProfile> {
        match self {
            MediumProfile::Layered(l) => Some(l),
            _ => None,
        }
    }

    /// `σ ≡ 1` and `n ≡ 1`: the characteristic function vanishes for every `k`.
    pub fn is_degenerate(&self) -> bool {
        match self {
            MediumProfile::Constant { sigma, n } => *sigma == 1.0 && *n == 1.0,
            MediumProfile::Smooth(p) => {
                p.sigma.is_constant()
                    && p.n.is_constant()
                    && p.sigma.eval(0.0).v == 1.0
                    && p.n_at(0.0) == 1.0
            }
            MediumProfile::Layered(l) => l.layers.iter().all(|l| l.sigma == 1.0 && l.n == 1.0),
        }
    }
}

/// `(σ, σ', σ'', n)` at `r ∈ [0, 1]`. Fails on a layer interface; use
/// [`eval_sided`] there.
pub fn eval_medium(p: &MediumProfile, r: f64) -> Result<Coefficients> {
    eval_inner(p, r, None)
}

/// As [`eval_medium`], resolving layer interfaces to the requested side.
pub fn eval_sided(p: &MediumProfile, r: f64, side: Side) -> Result<Coefficients> {
    eval_inner(p, r, Some(side))
}

fn eval_inner(p: &MediumProfile, r: f64, side: Option<Side>) -> Result<Coefficients> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            reason: "radius must lie in [0, 1]",
        });
    }
    Ok(match p {
        MediumProfile::Constant { sigma, n } => Coefficients {
            sigma: *sigma,
            dsigma: 0.0,
            ddsigma: 0.0,
            n: *n,
        },
        MediumProfile::Smooth(s) => {
            let j = s.sigma.eval(r);
            Coefficients {
                sigma: j.v,
                dsigma: j.d1,
                ddsigma: j.d2,
                n: s.n_at(r),
            }
        }
        MediumProfile::Layered(l) => {
            let layer = l.layers[l.layer_index(r, side)?];
            Coefficients {
                sigma: layer.sigma,
                dsigma: 0.0,
                ddsigma: 0.0,
                n: layer.n,
            }
        }
    })
}

/// Maps a constant medium with `n² < σ` to the dual problem with
/// `σ̃ = 1/σ`, `ñ = 1/n` and `k̃ = k n/√σ`.
///
/// The dual problem swaps the roles of `u` and `v`: `ũ = v` and `ṽ = u`, so
/// `k̃` is the wavenumber of the original medium part, `k n/√σ`. Applying the
/// map twice returns `(σ, n, k)`.
pub fn duality_transform(p: &MediumProfile, k: f64) -> Result<(MediumProfile, f64)> {
    let (sigma, n) = p.constant_values().ok_or(Error::WrongProfileKind {
        expected: "constant",
        found: p.kind(),
    })?;
    if n * n >= sigma {
        return Err(Error::InvalidMedium(format!(
            "duality needs n² < σ, got n² = {} and σ = {sigma}",
            n * n
        )));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            reason: "wavenumber must be positive",
        });
    }
    Ok((MediumProfile::constant(1.0 / sigma, 1.0 / n)?, dual_wavenumber(sigma, n, k)))
}

/// `k n/√σ`, the wavenumber map of [`duality_transform`] (its own inverse
/// when applied with the dual coefficients).
pub fn dual_wavenumber(sigma: f64, n: f64, k: f64) -> f64 {
    k * n / sigma.sqrt()
}

// JSON schema

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Expression(String),
}

impl Scalar {
    fn number(&self, what: &str) -> Result<f64> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expression(s) => {
                let e = Expr::parse(s)?;
                if !e.is_constant() {
                    return Err(Error::InvalidMedium(format!("{what} must be a constant here")));
                }
                Ok(e.eval(0.0).v)
            }
        }
    }

    fn expr(&self) -> Result<Expr> {
        match self {
            Scalar::Number(v) => Ok(Expr::constant(*v)),
            Scalar::Expression(s) => Expr::parse(s),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Constant,
    Smooth,
    Layered,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerSpec {
    r_max: f64,
    sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n2: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MediumSpec {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n2: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layers: Option<Vec<LayerSpec>>,
}

fn exactly_one<T>(n: Option<T>, n2: Option<T>, at: &str) -> Result<(T, bool)> {
    match (n, n2) {
        (Some(n), None) => Ok((n, false)),
        (None, Some(n2)) => Ok((n2, true)),
        _ => Err(Error::InvalidMedium(format!("{at}: exactly one of \"n\" and \"n2\" must be given"))),
    }
}

impl TryFrom<MediumSpec> for MediumProfile {
    type Error = Error;

    fn try_from(spec: MediumSpec) -> Result<Self> {
        match spec.kind {
            Kind::Constant | Kind::Smooth => {
                if spec.layers.is_some() {
                    return Err(Error::InvalidMedium("\"layers\" is only valid for kind \"layered\"".into()));
                }
                let sigma = spec
                    .sigma
                    .ok_or_else(|| Error::InvalidMedium("missing \"sigma\"".into()))?;
                let (n, squared) = exactly_one(spec.n, spec.n2, "medium")?;
                if matches!(spec.kind, Kind::Constant) {
                    let sigma = sigma.number("sigma")?;
                    let n = n.number("n")?;
                    let n = if squared { positive("n2", n)?.sqrt() } else { n };
                    MediumProfile::constant(sigma, n)
                } else {
                    MediumProfile::smooth_from(sigma.expr()?, n.expr()?, squared)
                }
            }
            Kind::Layered => {
                if spec.sigma.is_some() || spec.n.is_some() || spec.n2.is_some() {
                    return Err(Error::InvalidMedium(
                        "a layered medium takes its coefficients from \"layers\"".into(),
                    ));
                }
                let layers = spec
                    .layers
                    .ok_or_else(|| Error::InvalidMedium("missing \"layers\"".into()))?
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| {
                        let (n, squared) = exactly_one(l.n, l.n2, &format!("layer {i}"))?;
                        let n = if squared { positive("n2", n)?.sqrt() } else { n };
                        Ok(Layer {
                            r_max: l.r_max,
                            sigma: l.sigma,
                            n,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                MediumProfile::layered(layers)
            }
        }
    }
}

impl From<MediumProfile> for MediumSpec {
    fn from(p: MediumProfile) -> Self {
        let empty = MediumSpec {
            kind: Kind::Constant,
            sigma: None,
            n: None,
            n2: None,
            layers: None,
        };
        match p {
            MediumProfile::Constant { sigma, n } => MediumSpec {
                sigma: Some(Scalar::Number(sigma)),
                n: Some(Scalar::Number(n)),
                ..empty
            },
            MediumProfile::Smooth(s) => {
                let n = Some(Scalar::Expression(s.n.source().to_string()));
                MediumSpec {
                    kind: Kind::Smooth,
                    sigma: Some(Scalar::Expression(s.sigma.source().to_string())),
                    n: if s.squared { None } else { n.clone() },
                    n2: if s.squared { n } else { None },
                    ..empty
                }
            }
            MediumProfile::Layered(l) => MediumSpec {
                kind: Kind::Layered,
                layers: Some(
                    l.layers
                        .into_iter()
                        .map(|l| LayerSpec {
                            r_max: l.r_max,
                            sigma: l.sigma,
                            n: Some(l.n),
                            n2: None,
                        })
                        .collect(),
                ),
                ..empty
            },
        }
    }
}
