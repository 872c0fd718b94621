use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;
use serde_json::json;
use stratum::localization::decay_report;
use stratum::media::{validate_assumption_a, Layer, MediumProfile};
use stratum::radial::{liouville_psi, Mode};
use stratum::records::{EigenRecord, LocalizationRecord, ProfileRecord};
use stratum::spectrum::{
    assemble_eigenfunction, eigen_sequence, eigenvalues_in_range, find_eigenvalue_with, scan_modes, EigenOptions,
    TransmissionEigenvalue,
};

use crate::config::{Range, Settings};
use crate::Failure;

type Outcome = Result<(), Failure>;

const DEFAULT_ASSUMPTION_GRID: usize = 10_001;
const DEFAULT_SCAN_CELLS: usize = 256;

/// Two-layer benchmark: `(σ, n²) = (1, 1)` for `r < 0.8`, `(2, 3)` outside.
pub const BENCHMARK_TARGET_K2: f64 = 402.989;
const BENCHMARK_WINDOW_K2: (f64, f64) = (390.0, 415.0);

pub fn benchmark_medium() -> MediumProfile {
    MediumProfile::layered(vec![
        Layer {
            r_max: 0.8,
            sigma: 1.0,
            n: 1.0,
        },
        Layer {
            r_max: 1.0,
            sigma: 2.0,
            n: 3f64.sqrt(),
        },
    ])
    .expect("benchmark medium is valid")
}

fn options(s: &Settings) -> Result<EigenOptions, Failure> {
    Ok(EigenOptions {
        path: s.path.unwrap_or_default(),
        tol: s.tol().map_err(Failure::Config)?,
    })
}

fn sink(path: Option<&FsPath>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))
                    .map_err(Failure::Config)?;
            }
            let f = File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .map_err(Failure::Config)?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv<T: Serialize>(path: Option<&FsPath>, rows: &[T]) -> Outcome {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink(path)?);
    for row in rows {
        w.serialize(row).map_err(|e| Failure::Config(e.into()))?;
    }
    w.flush().map_err(|e| Failure::Config(e.into()))
}

fn write_json<T: Serialize>(path: Option<&FsPath>, value: &T) -> Outcome {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Config(e.into()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Failure::Config(e.into()))
}

fn sorted_records(evs: &[TransmissionEigenvalue]) -> Vec<EigenRecord> {
    let mut records: Vec<EigenRecord> = evs.iter().map(EigenRecord::from).collect();
    records.sort_by(|a, b| (a.m, a.k).partial_cmp(&(b.m, b.k)).unwrap());
    records
}

pub fn validate(s: &Settings) -> Outcome {
    let p = s.profile().map_err(Failure::Config)?;
    let report = validate_assumption_a(&p, s.grid.unwrap_or(DEFAULT_ASSUMPTION_GRID), s.k);
    write_json(s.output_path("validate", "json").as_deref(), &report)
}

pub fn eigs(s: &Settings) -> Outcome {
    let p = s.profile().map_err(Failure::Config)?;
    let dim = s.dim().map_err(Failure::Config)?;
    let Range { lo, hi } = s.m_range().map_err(Failure::Config)?;
    let opts = options(s)?;
    let evs = match s.k_range().map_err(Failure::Config)? {
        Some((k_lo, k_hi)) => {
            let cells = s.cells(DEFAULT_SCAN_CELLS).map_err(Failure::Config)?;
            scan_modes(&p, dim, lo, hi, k_lo, k_hi, cells, &opts).map_err(Failure::from_lib)?
        }
        None => {
            if p.as_layered().is_some() {
                return Err(Failure::Config(anyhow!("layered media have no bracket theory; give --k-range")));
            }
            let s0 = s.s0().map_err(Failure::Config)?;
            let check = validate_assumption_a(&p, DEFAULT_ASSUMPTION_GRID, None);
            if !check.holds {
                let detail: Vec<&str> = check.violations.iter().map(|v| v.detail.as_str()).collect();
                return Err(Failure::Config(anyhow!("Assumption A does not hold: {}", detail.join("; "))));
            }
            let seq = eigen_sequence(&p, dim, s0, lo, hi, &opts);
            for skip in &seq.skipped {
                eprintln!("{}", json!({"skipped_m": skip.m, "reason": skip.reason}));
            }
            if seq.eigenvalues.is_empty() {
                if let Some(first) = seq.skipped.first() {
                    return Err(Failure::Numerical {
                        error: anyhow!("no eigenvalue found: {}", first.reason),
                        m: Some(first.m),
                        k: None,
                    });
                }
            }
            seq.eigenvalues
        }
    };
    write_csv(s.output_path("eigs", "csv").as_deref(), &sorted_records(&evs))
}

pub fn localize(s: &Settings) -> Outcome {
    let p = s.profile().map_err(Failure::Config)?;
    let dim = s.dim().map_err(Failure::Config)?;
    let Range { lo, hi } = s.m_range().map_err(Failure::Config)?;
    let tau = s.tau().map_err(Failure::Config)?;
    let s0 = s.s0().map_err(Failure::Config)?;
    if p.as_layered().is_some() {
        return Err(Failure::Config(anyhow!("localize needs a constant or smooth medium")));
    }
    let report = decay_report(&p, dim, s0, tau, lo, hi, &options(s)?).map_err(Failure::from_lib)?;
    let rows: Vec<LocalizationRecord> = report.rows.iter().map(LocalizationRecord::from).collect();
    let csv_path = s.output_path("localize", "csv");
    write_csv(csv_path.as_deref(), &rows)?;
    let summary = json!({
        "dim": report.dim,
        "s0": report.s0,
        "tau": report.tau,
        "fit_v": report.fit_v,
        "fit_u": report.fit_u,
        "thresholds_v": report.thresholds_v,
        "thresholds_u": report.thresholds_u,
        "skipped": report.skipped,
        "columns": {
            "ratio_v_sq": "squared L2 norm ratio of the free part over B_tau vs B_1",
            "ratio_u_sq": "squared L2 norm ratio of the medium part",
            "log10_ratio_v": "log10 of the unsquared free-part norm ratio",
        },
        "fit": "least squares of ln(ratio^2) against m, rows above 1e-280",
    });
    match csv_path {
        Some(path) => write_json(Some(&path.with_extension("json")), &summary),
        None => {
            eprintln!("{summary}");
            Ok(())
        }
    }
}

pub fn profile(s: &Settings) -> Outcome {
    let p = s.profile().map_err(Failure::Config)?;
    let dim = s.dim().map_err(Failure::Config)?;
    let Range { lo, hi } = s.m_range().map_err(Failure::Config)?;
    if lo != hi {
        return Err(Failure::Config(anyhow!("profile needs a single angular index, got {lo}..{hi}")));
    }
    let mode = Mode::new(dim, lo);
    let opts = options(s)?;
    let ev = match s.k_range().map_err(Failure::Config)? {
        Some((k_lo, k_hi)) => {
            let cells = s.cells(DEFAULT_SCAN_CELLS).map_err(Failure::Config)?;
            let found = eigenvalues_in_range(&p, mode, k_lo, k_hi, cells, &opts).map_err(Failure::from_lib)?;
            found.into_iter().next().ok_or_else(|| Failure::Numerical {
                error: anyhow!("no eigenvalue in {k_lo}..{k_hi}"),
                m: Some(lo),
                k: None,
            })?
        }
        None => {
            let s0 = s.s0().map_err(Failure::Config)?;
            find_eigenvalue_with(&p, mode, s0, &opts).map_err(|e| Failure::from_lib(e).at(lo, None))?
        }
    };
    let ef = assemble_eigenfunction(&p, &ev).map_err(|e| Failure::from_lib(e).at(lo, Some(ev.k)))?;
    let psi = liouville_psi(&ef.u, &p).map_err(Failure::from_lib)?;
    let c = ef.v1 / ef.u.phi1;
    let rows = ef
        .u
        .grid
        .iter()
        .zip(&ef.u.phi)
        .zip(&psi)
        .map(|((&r, &phi), &psi)| {
            Ok(ProfileRecord {
                r,
                u_radial: c * phi,
                v_radial: ef.v_at(r)?.0,
                psi: c * psi,
            })
        })
        .collect::<stratum::Result<Vec<_>>>()
        .map_err(Failure::from_lib)?;
    eprintln!("{}", json!({"m": lo, "k": ev.k, "k_squared": ev.k_squared(), "ln_abs_alpha": ef.ln_abs_alpha()}));
    write_csv(s.output_path("profile", "csv").as_deref(), &rows)
}

fn nearest(evs: &[TransmissionEigenvalue], target: f64) -> Option<&TransmissionEigenvalue> {
    evs.iter()
        .min_by(|a, b| (a.k_squared() - target).abs().total_cmp(&(b.k_squared() - target).abs()))
}

pub fn reproduce_benchmark(s: &Settings) -> Outcome {
    let p = benchmark_medium();
    let dim = s.dim().map_err(Failure::Config)?;
    let Range { lo, hi } = s.m.unwrap_or(Range { lo: 0, hi: 40 });
    let (k_lo, k_hi) = s
        .k_range()
        .map_err(Failure::Config)?
        .unwrap_or((BENCHMARK_WINDOW_K2.0.sqrt(), BENCHMARK_WINDOW_K2.1.sqrt()));
    let cells = s.cells(512).map_err(Failure::Config)?;
    let opts = options(s)?;
    let in_window = scan_modes(&p, dim, lo, hi, k_lo, k_hi, cells, &opts).map_err(Failure::from_lib)?;
    let target = BENCHMARK_TARGET_K2;
    // With nothing in the window, look up to 10% either side for the report.
    let (pool, widened) = if in_window.is_empty() {
        let (a, b) = ((0.9 * target).sqrt(), (1.1 * target).sqrt());
        let wide = scan_modes(&p, dim, lo, hi, a, b, 4 * cells, &opts).map_err(Failure::from_lib)?;
        (wide, true)
    } else {
        (in_window.clone(), false)
    };
    let best = nearest(&pool, target);
    let report = json!({
        "target_k_squared": target,
        "window_k": [k_lo, k_hi],
        "m_range": [lo, hi],
        "found_in_window": in_window.len(),
        "searched_wider": widened,
        "nearest": best.map(|ev| json!({
            "m": ev.mode.m,
            "k": ev.k,
            "k_squared": ev.k_squared(),
            "relative_error": (ev.k_squared() - target).abs() / target,
        })),
        "within_1_percent": best.is_some_and(|ev| (ev.k_squared() - target).abs() <= 0.01 * target),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    if let Some(path) = s.output.clone().or_else(|| s.output_path("reproduce-fig1", "csv")) {
        let path: PathBuf = path;
        write_csv(Some(&path), &sorted_records(&pool))?;
    }
    Ok(())
}
