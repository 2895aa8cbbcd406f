//! The five subcommands. Each validates every point before computing any of
//! them, evaluates points on the rayon pool and keeps rows in input order.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use otto_core::cycle::{self, Mode};
use otto_core::optimizer::{self, OptimumKind};
use otto_core::stochastic::{chi_square, moments, sample_work, work_pmf};
use otto_core::two_level::relax_endpoints;
use otto_core::{BathContact, CycleConfig, CycleMetrics, TrapShape};
use rayon::prelude::*;

use crate::output::{format_sig, Cell, Table};
use crate::params::{CommandKind, Params};

/// γ pairs reported by the efficiency-at-maximum-power sweep.
pub const EMP_GAMMA_PAIRS: [(f64, f64); 3] = [(2.0, 2.0), (2.0, 4.0), (4.0, 2.0)];

pub struct Outcome {
    pub table: Table,
    /// Points whose computation failed and were written as `NA`.
    pub failed: usize,
    /// Lines for stderr.
    pub log: Vec<String>,
}

type Point = BTreeMap<String, f64>;

pub fn run(params: &Params, seed: u64) -> Result<Outcome> {
    match params.command {
        CommandKind::ModeSweep => mode_sweep(params),
        CommandKind::WorkContour => work_contour(params),
        CommandKind::Tradeoff => tradeoff(params),
        CommandKind::EmpSweep => emp_sweep(params),
        CommandKind::Sample => sample(params, seed),
    }
}

fn cycle_config(p: &Point, omega_h: f64) -> Result<CycleConfig> {
    let shape =
        |key: &str| TrapShape::from_gamma(p[key]).with_context(|| format!("{key} = {}", p[key]));
    Ok(CycleConfig::new(
        p["omega_c"],
        omega_h,
        shape("gamma_c")?,
        shape("gamma_h")?,
        BathContact::new(p["beta_c"], p["sigma_c"], p["tau_c"]).context("cold bath")?,
        BathContact::new(p["beta_h"], p["sigma_h"], p["tau_h"]).context("hot bath")?,
        p["tau_adi"],
    )?)
}

/// Swept symbols that are not one of the command's own columns; they lead
/// each row so that every row stays self-describing.
fn extra_columns(params: &Params, own: &[&str]) -> Vec<String> {
    params
        .swept()
        .into_iter()
        .filter(|k| !own.contains(k))
        .map(str::to_string)
        .collect()
}

fn describe(p: &Point) -> String {
    p.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Builds all configs first so that invalid input fails before any work.
fn validated<T>(points: &[Point], build: impl Fn(&Point) -> Result<T>) -> Result<Vec<T>> {
    points
        .iter()
        .map(|p| build(p).with_context(|| format!("invalid point: {}", describe(p))))
        .collect()
}

/// Evaluates each config on the pool; a failing point yields `NA` cells.
fn evaluate<T: Sync>(
    points: &[Point],
    items: &[T],
    width: usize,
    eval: impl Fn(&T) -> Result<Vec<Cell>> + Sync,
) -> (Vec<Vec<Cell>>, usize, Vec<String>) {
    let results: Vec<Result<Vec<Cell>>> = items.par_iter().map(&eval).collect();
    let mut rows = Vec::with_capacity(results.len());
    let (mut failed, mut log) = (0, Vec::new());
    for (p, r) in points.iter().zip(results) {
        match r {
            Ok(cells) => rows.push(cells),
            Err(e) => {
                failed += 1;
                log.push(format!("point {} failed: {e:#}", describe(p)));
                rows.push(vec![Cell::Missing; width]);
            }
        }
    }
    (rows, failed, log)
}

fn assemble(
    params: &Params,
    own: &[&str],
    columns: &[&str],
    points: &[Point],
    mut rows: Vec<Vec<Cell>>,
) -> Table {
    let extra = extra_columns(params, own);
    let mut header: Vec<String> = extra.clone();
    header.extend(columns.iter().map(|c| c.to_string()));
    for (row, p) in rows.iter_mut().zip(points) {
        let mut full: Vec<Cell> = extra.iter().map(|k| Cell::Num(p[k])).collect();
        full.append(row);
        *row = full;
    }
    Table { header, rows }
}

fn mode_sweep(params: &Params) -> Result<Outcome> {
    let points = params.points();
    let configs = validated(&points, |p| {
        let r = p["r"];
        if r.is_nan() || r <= 0.0 {
            bail!("r must be positive");
        }
        cycle_config(p, r * r * p["omega_c"])
    })?;
    let columns = ["r", "eta_over_etaC", "mode", "mean_work", "work_variance"];
    let (rows, failed, mut log) = evaluate(&points, &configs, columns.len(), |c| {
        let m = CycleMetrics::evaluate(c)?;
        let r = (c.omega_h / c.omega_c).sqrt();
        Ok(vec![
            Cell::Num(r),
            Cell::opt(m.efficiency.map(|e| e / c.carnot_efficiency())),
            Cell::Text(m.mode.to_string()),
            Cell::Num(m.mean_work),
            Cell::Num(m.work_variance),
        ])
    });
    log.push(engine_band_summary(&configs));
    let table = assemble(params, &["r"], &columns, &points, rows);
    Ok(Outcome { table, failed, log })
}

fn engine_band_summary(configs: &[CycleConfig]) -> String {
    let engine: Vec<f64> = configs
        .iter()
        .filter(|c| cycle::classify_mode(c).is_ok_and(|m| m.mode == Mode::Engine && !m.boundary))
        .map(|c| (c.omega_h / c.omega_c).sqrt())
        .collect();
    match (
        engine.iter().copied().reduce(f64::min),
        engine.iter().copied().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) => {
            format!(
                "engine band: r in [{}, {}] ({} of {} points)",
                format_sig(lo, 6),
                format_sig(hi, 6),
                engine.len(),
                configs.len()
            )
        }
        _ => format!(
            "engine band: empty (no positive-work point among {})",
            configs.len()
        ),
    }
}

fn work_contour(params: &Params) -> Result<Outcome> {
    let points = params.points();
    let configs = validated(&points, |p| cycle_config(p, p["omega_h"]))?;
    let columns = ["omega_c", "omega_h", "mean_work", "mode"];
    let (rows, failed, log) = evaluate(&points, &configs, columns.len(), |c| {
        Ok(vec![
            Cell::Num(c.omega_c),
            Cell::Num(c.omega_h),
            Cell::Num(cycle::mean_work(c)?),
            Cell::Text(cycle::classify_mode(c)?.to_string()),
        ])
    });
    let table = assemble(params, &["omega_c", "omega_h"], &columns, &points, rows);
    Ok(Outcome { table, failed, log })
}

fn tradeoff(params: &Params) -> Result<Outcome> {
    let points = params.points();
    let configs = validated(&points, |p| cycle_config(p, p["omega_h"]))?;
    let columns = ["gamma_h", "eta", "f_P", "mean_work", "work_variance"];
    let (rows, failed, log) = evaluate(&points, &configs, columns.len(), |c| {
        let m = CycleMetrics::evaluate(c)?;
        // outside engine mode the efficiency column carries the mode instead
        let eta = match m.efficiency {
            Some(e) => Cell::Num(e),
            None => Cell::Text(m.mode.to_string()),
        };
        Ok(vec![
            Cell::Num(c.gamma_h()),
            eta,
            Cell::opt(m.rel_power_fluct),
            Cell::Num(m.mean_work),
            Cell::Num(m.work_variance),
        ])
    });
    let table = assemble(params, &["gamma_h"], &columns, &points, rows);
    Ok(Outcome { table, failed, log })
}

fn pair_label(prefix: &str, (gc, gh): (f64, f64)) -> String {
    format!("{prefix}_{gc}_{gh}")
}

struct EmpPoint {
    eta_c: f64,
    beta_c: f64,
    beta_h: f64,
    /// Decay factors at the time optimum; `None` in the short-cycle limit.
    decay: Option<(f64, f64)>,
}

fn emp_sweep(params: &Params) -> Result<Outcome> {
    let points = params.points();
    let items = validated(&points, |p| {
        let (eta_c, beta_h) = (p["eta_C"], p["beta_h"]);
        if !(eta_c > 0.0 && eta_c < 1.0) {
            bail!("eta_C must lie in (0, 1)");
        }
        if !(beta_h > 0.0 && beta_h.is_finite()) {
            bail!("beta_h must be positive");
        }
        let t = optimizer::optimize_times(p["sigma_c"], p["sigma_h"], p["tau_adi"])?;
        let decay = (t.kind == OptimumKind::Interior).then(|| {
            (
                (-p["sigma_h"] * t.tau_h).exp(),
                (-p["sigma_c"] * t.tau_c).exp(),
            )
        });
        Ok(EmpPoint {
            eta_c,
            beta_c: beta_h / (1.0 - eta_c),
            beta_h,
            decay,
        })
    })?;

    let mut columns = vec!["eta_C".to_string()];
    columns.extend(EMP_GAMMA_PAIRS.iter().map(|&g| pair_label("eta_star", g)));
    columns.extend(["eta_star_analytic".to_string(), "eta_CA".to_string()]);
    columns.extend(
        EMP_GAMMA_PAIRS
            .iter()
            .map(|&g| pair_label("eta_star_xi", g)),
    );

    // per-cell solver failures become NA; they are counted per point
    let results: Vec<(Vec<Cell>, Vec<String>)> = items
        .par_iter()
        .map(|it| {
            let mut cells = vec![Cell::Num(it.eta_c)];
            let mut errors = Vec::new();
            let mut keep = |r: otto_core::Result<f64>, what: String| match r {
                Ok(v) => Cell::Num(v),
                Err(e) => {
                    errors.push(format!("eta_C={} {what}: {e}", it.eta_c));
                    Cell::Missing
                }
            };
            for &(gc, gh) in &EMP_GAMMA_PAIRS {
                let r = optimizer::emp(it.beta_c, it.beta_h, gc, gh);
                cells.push(keep(r, pair_label("eta_star", (gc, gh))));
            }
            cells.push(keep(optimizer::emp_analytic(it.eta_c), "analytic".into()));
            cells.push(keep(optimizer::ca_efficiency(it.eta_c), "eta_CA".into()));
            for &(gc, gh) in &EMP_GAMMA_PAIRS {
                cells.push(match it.decay {
                    Some((x, y)) => {
                        let r = optimizer::emp_xi_weighted(it.beta_c, it.beta_h, gc, gh, x, y);
                        keep(r, pair_label("eta_star_xi", (gc, gh)))
                    }
                    None => Cell::Missing,
                });
            }
            (cells, errors)
        })
        .collect();
    let mut failed = 0;
    let mut log = Vec::new();
    let mut rows = Vec::with_capacity(results.len());
    for (cells, errors) in results {
        if !errors.is_empty() {
            failed += 1;
            log.extend(errors);
        }
        rows.push(cells);
    }
    if items.iter().any(|it| it.decay.is_none()) {
        log.push(
            "eta_star_xi columns are NA: with tau_adi = 0 the power-optimal contact times vanish"
                .into(),
        );
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let table = assemble(params, &["eta_C"], &cols, &points, rows);
    Ok(Outcome { table, failed, log })
}

fn sample(params: &Params, seed: u64) -> Result<Outcome> {
    if let Some(k) = params.swept().first() {
        bail!("sample takes fixed parameters only; `{k}` is a range");
    }
    let p = &params.points()[0];
    let n = p["n"];
    if !(n >= 1.0 && n.fract() == 0.0 && n <= u64::MAX as f64) {
        bail!("n must be a positive integer");
    }
    let config = cycle_config(p, p["omega_h"])?;
    let pmf = work_pmf(&relax_endpoints(&config)?, &config)?;
    let summary = sample_work(&pmf, n as u64, seed)?;
    let (mean, variance) = moments(&pmf);
    let chi = chi_square(&pmf, &summary);
    let rows = pmf
        .atoms()
        .iter()
        .zip(&summary.counts)
        .map(|(&(w, prob), &count)| {
            vec![
                Cell::Num(w),
                Cell::Num(prob),
                Cell::Int(count),
                Cell::Num(count as f64 / summary.n_samples as f64),
            ]
        })
        .collect();
    let table = Table {
        header: ["work", "probability", "count", "frequency"]
            .map(String::from)
            .to_vec(),
        rows,
    };
    let log = vec![
        format!(
            "samples={} seed={seed} mean={} exact_mean={} standard_error={}",
            summary.n_samples,
            summary.mean,
            mean,
            summary.standard_error()
        ),
        format!("variance={} exact_variance={variance}", summary.variance),
        format!(
            "chi2={} dof={} p_value={}",
            chi.statistic, chi.dof, chi.p_value
        ),
    ];
    Ok(Outcome {
        table,
        failed: 0,
        log,
    })
}
