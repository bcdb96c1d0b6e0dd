use std::fmt::Write as _;
use std::io::Write;

use anyhow::Result;
use rabi2p_core::oracle::{self, LevelSelection, SpectrumReport};
use rabi2p_core::solver::{assemble_spectrum_with, collapse_scan, Backend, LevelKind};
use rabi2p_core::travenec::g_travenec;
use rabi2p_core::validate::{run_validation, ValidationReport};
use rabi2p_core::{Error, EvalFlags, GFunction, SymmetrySector};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{BackendChoice, CommandKind, Format, RunConfig, Selection};
use crate::output::{csv_writer, flags_json, float, sink, write_json};

/// Executes a validated configuration. Returns `false` when a validation
/// report contains a failed check.
pub fn run(config: &RunConfig) -> Result<bool> {
    match config.command {
        CommandKind::Scan => scan(config).map(|_| true),
        CommandKind::Spectrum => spectrum(config).map(|_| true),
        CommandKind::Collapse => collapse(config).map(|_| true),
        CommandKind::Oracle => oracle_levels(config).map(|_| true),
        CommandKind::Validate => validate(config),
    }
}

struct Row {
    energy: f64,
    value: f64,
    value_im: Option<f64>,
    flags: EvalFlags,
}

fn failed_row(energy: f64, err: Error) -> Result<Row> {
    let flags = match err {
        Error::PoleProximity { .. } | Error::ContinuedFractionPole { .. } => EvalFlags {
            near_pole: true,
            overflow: true,
            ..EvalFlags::default()
        },
        Error::NotConverged { .. } => EvalFlags {
            not_converged: true,
            ..EvalFlags::default()
        },
        other => return Err(other.into()),
    };
    Ok(Row {
        energy,
        value: f64::NAN,
        value_im: None,
        flags,
    })
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    rabi2p_core::solver::linspace(lo, hi, n)
}

fn scan(config: &RunConfig) -> Result<()> {
    let params = config.params()?;
    let sector = config.sector.unwrap_or(SymmetrySector::EVEN_PLUS);
    let energies = grid(config.e_range.0, config.e_range.1, config.grid);
    let travenec = config.backend == BackendChoice::Travenec;
    let rows: Vec<Row> = if travenec {
        energies
            .par_iter()
            .map(|&e| {
                let s = g_travenec(&params, e, config.z0, config.terms)?;
                Ok(Row {
                    energy: e,
                    value: s.value.re,
                    value_im: Some(s.value.im),
                    flags: s.flags,
                })
            })
            .collect::<Result<_>>()?
    } else {
        let backend = match config.backend {
            BackendChoice::Zhang => Backend::Zhang,
            _ => Backend::Chen,
        };
        let g: Box<dyn GFunction> = backend.build(&params, sector)?;
        energies
            .par_iter()
            .map(|&e| match g.evaluate(e) {
                Ok(s) => Ok(Row {
                    energy: e,
                    value: s.value,
                    value_im: None,
                    flags: s.flags,
                }),
                Err(err) => failed_row(e, err),
            })
            .collect::<Result<_>>()?
    };
    let path = config.output.as_deref();
    match config.format {
        Format::Json => {
            let samples: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut v = json!({
                        "energy": r.energy,
                        "value": r.value,
                        "flags": flags_json(r.flags),
                    });
                    if let Some(im) = r.value_im {
                        v["value_im"] = json!(im);
                    }
                    v
                })
                .collect();
            write_json(
                path,
                "scan",
                json!({
                    "backend": backend_label(config.backend),
                    "omega": config.omega,
                    "delta": config.delta,
                    "sector": sector.label(),
                    "z0": if travenec { json!([config.z0.re, config.z0.im]) } else { Value::Null },
                    "samples": samples,
                }),
            )
        }
        _ => {
            let mut w = csv_writer(path)?;
            if travenec {
                w.write_record(["energy", "value", "value_im", "flags"])?;
            } else {
                w.write_record(["energy", "value", "flags"])?;
            }
            for r in &rows {
                let bits = r.flags.bits().to_string();
                match r.value_im {
                    Some(im) => {
                        w.write_record([float(r.energy), float(r.value), float(im), bits])?
                    }
                    None => w.write_record([float(r.energy), float(r.value), bits])?,
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn backend_label(b: BackendChoice) -> &'static str {
    match b {
        BackendChoice::Auto => "auto",
        BackendChoice::Chen => "chen",
        BackendChoice::Zhang => "zhang",
        BackendChoice::Travenec => "travenec",
        BackendChoice::Oracle => "oracle",
    }
}

fn warn(report: &SpectrumReport) {
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    if !report.converged {
        eprintln!(
            "warning: sector {} not converged at n_max = {} (last change {:e})",
            report.sector, report.n_max, report.last_change
        );
    }
}

fn spectrum(config: &RunConfig) -> Result<()> {
    let params = config.params()?;
    let sector = config.sector.unwrap_or(SymmetrySector::EVEN_PLUS);
    let backend = match config.backend {
        BackendChoice::Chen => Backend::Chen,
        BackendChoice::Zhang => Backend::Zhang,
        _ => Backend::preferred(&params, sector),
    };
    let s = assemble_spectrum_with(&params, sector, config.e_range.1, backend)?;
    warn(&s.oracle);
    for u in &s.unresolved {
        eprintln!(
            "warning: |G| dips without a sign change in [{}, {}]",
            u.0, u.1
        );
    }
    let kind = |k: LevelKind| match k {
        LevelKind::Regular => "regular",
        LevelKind::ExceptionalCandidate => "exceptional",
    };
    let backend_name = match s.backend {
        Backend::Chen => "chen",
        Backend::Zhang => "zhang",
    };
    let path = config.output.as_deref();
    match config.format {
        Format::Json => write_json(
            path,
            "spectrum",
            json!({
                "omega": s.omega,
                "delta": s.delta,
                "sector": s.sector.label(),
                "backend": backend_name,
                "e_max": s.e_max,
                "levels": s.levels.iter().map(|l| json!({
                    "energy": l.energy,
                    "interval": l.interval,
                    "kind": kind(l.kind),
                    "oracle_delta": l.oracle_delta,
                    "suspect": l.suspect,
                })).collect::<Vec<_>>(),
                "interval_counts": s.interval_counts.iter().map(|c| json!({
                    "interval": c.interval,
                    "count": c.count,
                    "complete": c.complete,
                })).collect::<Vec<_>>(),
                "unresolved": s.unresolved.iter().map(|u| json!([u.0, u.1])).collect::<Vec<_>>(),
                "oracle": report_json(&s.oracle),
            }),
        ),
        _ => {
            let mut w = csv_writer(path)?;
            w.write_record(["energy", "interval", "kind", "oracle_delta", "suspect"])?;
            for l in &s.levels {
                w.write_record([
                    float(l.energy),
                    l.interval.to_string(),
                    kind(l.kind).to_string(),
                    l.oracle_delta.map_or_else(String::new, float),
                    l.suspect.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn report_json(r: &SpectrumReport) -> Value {
    json!({
        "sector": r.sector.label(),
        "energies": r.energies,
        "n_max": r.n_max,
        "converged": r.converged,
        "converged_below": if r.converged_below.is_finite() { json!(r.converged_below) } else { Value::Null },
        "last_change": r.last_change,
        "warning": r.warning,
    })
}

fn oracle_levels(config: &RunConfig) -> Result<()> {
    let params = config.params()?;
    let which = match config.selection {
        Selection::Lowest(n) => LevelSelection::Lowest(n),
        Selection::Below(e) => LevelSelection::Below(e),
    };
    let reports = match config.sector {
        Some(s) => vec![oracle::eigenvalues(&params, s, which, config.tol)?],
        None => oracle::all_sectors(&params, which, config.tol)?,
    };
    reports.iter().for_each(warn);
    let path = config.output.as_deref();
    match config.format {
        Format::Json => write_json(
            path,
            "oracle",
            json!({
                "omega": config.omega,
                "delta": config.delta,
                "sectors": reports.iter().map(report_json).collect::<Vec<_>>(),
            }),
        ),
        _ => {
            let mut w = csv_writer(path)?;
            w.write_record(["sector", "index", "energy"])?;
            for r in &reports {
                for (k, e) in r.energies.iter().enumerate() {
                    w.write_record([r.sector.label().to_string(), k.to_string(), float(*e)])?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn collapse(config: &RunConfig) -> Result<()> {
    let levels = match config.selection {
        Selection::Lowest(n) => n,
        Selection::Below(_) => unreachable!("collapse always selects a level count"),
    };
    let rows = collapse_scan(config.delta, &config.omegas, levels);
    let path = config.output.as_deref();
    match config.format {
        Format::Json => write_json(
            path,
            "collapse",
            json!({
                "delta": config.delta,
                "levels": levels,
                "rows": rows.iter().map(|r| json!({
                    "omega": r.omega,
                    "levels": r.levels,
                    "mean_spacing": r.mean_spacing,
                    "pole_gap": r.pole_gap,
                    "spacing_ratios": r.spacing_ratios,
                    "block_deviations": r.block_deviations(),
                    "threshold_estimate": r.threshold_estimate,
                    "oracle_max_delta": r.oracle_max_delta,
                    "error": r.error,
                })).collect::<Vec<_>>(),
            }),
        ),
        _ => {
            let mut w = csv_writer(path)?;
            w.write_record([
                "omega",
                "levels",
                "mean_spacing",
                "pole_gap",
                "max_ratio_deviation",
                "threshold_estimate",
                "oracle_max_delta",
                "error",
            ])?;
            for r in &rows {
                let tail = r
                    .spacing_ratios
                    .get(rabi2p_core::solver::COLLAPSE_FIRST_SPACING..)
                    .unwrap_or(&[]);
                let dev = tail.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
                w.write_record([
                    float(r.omega),
                    r.levels.len().to_string(),
                    float(r.mean_spacing),
                    float(r.pole_gap),
                    float(dev),
                    float(r.threshold_estimate),
                    float(r.oracle_max_delta),
                    r.error.clone().unwrap_or_default(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// Plain-text rendering of a report; identical inputs give identical bytes.
pub fn render_report(report: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "rabi2p validate omega={} delta={}",
        float(report.omega),
        float(report.delta)
    );
    for c in &report.checks {
        let _ = writeln!(
            s,
            "{} {}. {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name
        );
        for f in &c.findings {
            let _ = writeln!(s, "    {f}");
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(
        s,
        "summary: {passed} of {} checks passed",
        report.checks.len()
    );
    s
}

fn validate(config: &RunConfig) -> Result<bool> {
    let params = config.params()?;
    let report = run_validation(&params)?;
    let path = config.output.as_deref();
    match config.format {
        Format::Json => write_json(
            path,
            "validate",
            json!({
                "omega": report.omega,
                "delta": report.delta,
                "passed": report.passed(),
                "checks": report.checks.iter().map(|c| json!({
                    "id": c.id,
                    "name": c.name,
                    "passed": c.passed,
                    "findings": c.findings,
                })).collect::<Vec<_>>(),
            }),
        )?,
        _ => {
            let mut out = sink(path)?;
            out.write_all(render_report(&report).as_bytes())?;
            out.flush()?;
        }
    }
    Ok(report.passed())
}
