//! Run configuration: an optional JSON file overridden by flags. JSON keys
//! and flag names match (`k_range` ↔ `--k-range`).

use std::fmt;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Deserializer};
use serde_json::{Map, Value};
use stratum::media::MediumProfile;
use stratum::radial::Dim;
use stratum::spectrum::PathChoice;

/// Inclusive range `a..b`; a single number `a` means `a..a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: FromStr + Copy> FromStr for Range<T>
where
    T::Err: fmt::Display,
{
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<T>().map_err(|e| format!("`{t}`: {e}"));
        match s.split_once("..") {
            Some((a, b)) => Ok(Range {
                lo: parse(a)?,
                hi: parse(b)?,
            }),
            None => {
                let v = parse(s)?;
                Ok(Range { lo: v, hi: v })
            }
        }
    }
}

impl<'de, T> Deserialize<'de> for Range<T>
where
    T: FromStr + Copy + Deserialize<'de>,
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Text(String),
            Pair([T; 2]),
            Single(T),
        }
        match Raw::<T>::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Pair([lo, hi]) => Ok(Range { lo, hi }),
            Raw::Single(v) => Ok(Range { lo: v, hi: v }),
        }
    }
}

/// Every setting, as read from a config file or flags.
#[derive(Clone, Debug, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Medium as a JSON object (config file only).
    #[arg(skip)]
    pub medium: Option<Value>,
    /// Spatial dimension, 2 or 3.
    #[arg(long)]
    pub dim: Option<u32>,
    /// σ(r): a number or an expression in r.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip)]
    pub sigma: Option<String>,
    /// n(r): a number or an expression in r.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip)]
    pub n: Option<String>,
    /// n(r)² instead of n(r).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip)]
    pub n2: Option<String>,
    /// Angular indices, `a..b` or a single value.
    #[arg(long)]
    pub m: Option<Range<u32>>,
    /// Bessel-zero index of the bracket (from 1).
    #[arg(long)]
    pub s0: Option<u32>,
    /// Inner radius of the localization ratio, in (0, 1).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Wavenumber window `a..b`; scans every sign change inside it.
    #[arg(long)]
    pub k_range: Option<Range<f64>>,
    /// Wavenumber for the combined condition in `validate`.
    #[arg(long)]
    pub k: Option<f64>,
    /// Output file; defaults to `$STRATUM_OUTPUT_DIR/<command>.csv`, else stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Shooting tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Characteristic function: auto, ode or closed.
    #[arg(long, value_parser = parse_path)]
    pub path: Option<PathChoice>,
    /// Cells of a uniform wavenumber scan.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Sample count of the Assumption A check.
    #[arg(long)]
    pub grid: Option<usize>,
}

fn parse_path(s: &str) -> Result<PathChoice, String> {
    serde_json::from_value(Value::String(s.to_owned())).map_err(|_| format!("expected auto, ode or closed, got `{s}`"))
}

/// A medium override from flags: `Some(number)` stays a JSON number.
fn scalar(s: &str) -> Value {
    match s.trim().parse::<f64>() {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(s.to_owned()),
    }
}

fn is_number(v: Option<&Value>) -> bool {
    match v {
        Some(Value::Number(_)) => true,
        Some(Value::String(s)) => s.trim().parse::<f64>().is_ok(),
        _ => false,
    }
}

impl Settings {
    /// Reads the config file, if any, and lays the flags over it.
    pub fn resolve(flags: Settings) -> Result<Settings> {
        let mut base = match &flags.config {
            Some(path) => read_file(path)?,
            None => Settings::default(),
        };
        base.medium = merge_medium(base.medium.take(), &flags)?;
        macro_rules! take {
            ($($field:ident),*) => {$(if flags.$field.is_some() { base.$field = flags.$field.clone(); })*};
        }
        take!(dim, m, s0, tau, k_range, k, output, jobs, tol, path, cells, grid);
        base.config = flags.config;
        Ok(base)
    }

    pub fn profile(&self) -> Result<MediumProfile> {
        let medium = self
            .medium
            .clone()
            .ok_or_else(|| anyhow!("no medium given: use --sigma with --n or --n2, or a config file"))?;
        serde_json::from_value(medium).map_err(|e| anyhow!("invalid medium: {e}"))
    }

    pub fn dim(&self) -> Result<Dim> {
        Dim::try_from(self.dim.unwrap_or(2)).map_err(|e| anyhow!(e))
    }

    pub fn m_range(&self) -> Result<Range<u32>> {
        self.m.ok_or_else(|| anyhow!("missing angular index range (--m a..b)"))
    }

    pub fn s0(&self) -> Result<u32> {
        match self.s0.unwrap_or(1) {
            0 => bail!("s0 starts at 1"),
            s => Ok(s),
        }
    }

    pub fn tau(&self) -> Result<f64> {
        let tau = self.tau.ok_or_else(|| anyhow!("missing --tau"))?;
        if !(tau > 0.0 && tau < 1.0) {
            bail!("tau must lie in (0, 1), got {tau}");
        }
        Ok(tau)
    }

    pub fn k_range(&self) -> Result<Option<(f64, f64)>> {
        match self.k_range {
            None => Ok(None),
            Some(r) if r.lo > 0.0 && r.lo < r.hi && r.hi.is_finite() => Ok(Some((r.lo, r.hi))),
            Some(r) => bail!("k range must satisfy 0 < a < b, got {}..{}", r.lo, r.hi),
        }
    }

    pub fn tol(&self) -> Result<f64> {
        let tol = self.tol.unwrap_or(stratum::radial::DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1e-2) {
            bail!("tol must lie in (0, 1e-2), got {tol}");
        }
        Ok(tol)
    }

    pub fn cells(&self, default: usize) -> Result<usize> {
        match self.cells.unwrap_or(default) {
            0 => bail!("cells must be positive"),
            c => Ok(c),
        }
    }

    /// The output file for `command`, or `None` for stdout.
    pub fn output_path(&self, command: &str, extension: &str) -> Option<PathBuf> {
        if let Some(p) = &self.output {
            return Some(p.clone());
        }
        std::env::var_os("STRATUM_OUTPUT_DIR")
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{command}.{extension}")))
    }
}

fn read_file(path: &FsPath) -> Result<Settings> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    // `command` documents the intended subcommand; the subcommand given
    // on the command line decides.
    if let Value::Object(map) = &mut value {
        map.remove("command");
    }
    serde_json::from_value(value).with_context(|| format!("invalid config {}", path.display()))
}

fn merge_medium(file: Option<Value>, flags: &Settings) -> Result<Option<Value>> {
    if flags.sigma.is_none() && flags.n.is_none() && flags.n2.is_none() {
        return Ok(file);
    }
    if flags.n.is_some() && flags.n2.is_some() {
        bail!("give only one of --n and --n2");
    }
    let mut map = match file {
        Some(Value::Object(m)) => m,
        Some(_) => bail!("config key `medium` must be an object"),
        None => Map::new(),
    };
    if map.get("kind").and_then(Value::as_str) == Some("layered") {
        bail!("--sigma/--n/--n2 cannot override a layered medium");
    }
    if let Some(s) = &flags.sigma {
        map.insert("sigma".into(), scalar(s));
    }
    if let Some(s) = &flags.n {
        map.remove("n2");
        map.insert("n".into(), scalar(s));
    }
    if let Some(s) = &flags.n2 {
        map.remove("n");
        map.insert("n2".into(), scalar(s));
    }
    let constant = is_number(map.get("sigma")) && (is_number(map.get("n")) || is_number(map.get("n2")));
    map.insert("kind".into(), Value::from(if constant { "constant" } else { "smooth" }));
    Ok(Some(Value::Object(map)))
}
