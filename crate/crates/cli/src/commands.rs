//! Subcommand implementations: single-scenario runs, paper-figure
//! reproduction, and optimizer drivers.

use crate::config::ScenarioConfig;
use crate::output::{atomic_write, csv, fmt_f64, svg_plot, Series};
use crate::scenarios;
use anyhow::Context;
use photonshape_core::interference::{expand_output, fill_probabilities};
use photonshape_core::metrics::{
    run_scheme, sweep_resolution, sweep_splitting, SchemeRun, ShapingScheme,
};
use photonshape_core::optimize::{optimize_scheme, table1_rows};
use photonshape_core::postselect::{joint_density_map, SmearDefinition};
use photonshape_core::shapes::{gram, ShapeKind, WavepacketShape};
use rayon::prelude::*;
use std::path::Path;

const CURVE_COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];
const SHAPE_SAMPLES: usize = 600;
const TABLE1_BUDGET: usize = 20_000;

/// Visually relevant time range of a shape (tighter than numeric support).
fn plot_range(s: &WavepacketShape) -> (f64, f64) {
    match s.kind {
        ShapeKind::ExpDecay => (s.center - 0.3, s.center + 8.0 / s.gamma),
        ShapeKind::ExpRise => (s.center - 8.0 / s.gamma, s.center + 0.3),
        ShapeKind::Gaussian => (s.center - 4.0 / s.gamma, s.center + 4.0 / s.gamma),
    }
}

fn scheme_plot_range(s: &ShapingScheme) -> (f64, f64) {
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for shape in s.inputs.iter().map(|p| &p.shape).chain([&s.target]) {
        let (a, b) = plot_range(shape);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    (lo, hi)
}

/// Run one scheme and write `<prefix>_result.json`, `<prefix>_shape.csv`,
/// `<prefix>_shape.svg` (plus state dumps when requested).
pub fn run_scenario(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    prefix: &str,
    dump_state: bool,
) -> anyhow::Result<SchemeRun> {
    let run = run_scheme(&cfg.scheme)
        .map_err(|e| anyhow::anyhow!("scheme evaluation failed: {e}"))?;

    let json = serde_json::to_string_pretty(&run)?;
    atomic_write(&out_dir.join(format!("{prefix}_result.json")), &json)?;

    let (t_lo, t_hi) = scheme_plot_range(&cfg.scheme);
    let mut rows = Vec::with_capacity(SHAPE_SAMPLES + 1);
    for i in 0..=SHAPE_SAMPLES {
        let tau = t_lo + (t_hi - t_lo) * i as f64 / SHAPE_SAMPLES as f64;
        let out = run.result.output_shape.eval(tau);
        let tgt = cfg.scheme.target.eval(tau);
        rows.push(vec![tau, out.re, out.im, out.norm_sqr(), tgt.re, tgt.im, tgt.norm_sqr()]);
    }
    let header = "tau,re_out,im_out,abs2_out,re_target,im_target,abs2_target";
    atomic_write(&out_dir.join(format!("{prefix}_shape.csv")), &csv(header, &rows))?;

    let out_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[3].sqrt())).collect();
    let tgt_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[6].sqrt())).collect();
    let svg = svg_plot(
        &format!("{prefix}: fidelity {:.4}, P_sel {:.4}", run.fidelity, run.result.selection_probability),
        "t · Γ0",
        "|f(t)|",
        &[
            Series { label: "output", color: CURVE_COLORS[0], points: out_pts },
            Series { label: "target", color: CURVE_COLORS[1], points: tgt_pts },
        ],
    );
    atomic_write(&out_dir.join(format!("{prefix}_shape.svg")), &svg)?;

    if dump_state {
        dump_scheme_state(&cfg.scheme, out_dir, prefix)?;
    }
    Ok(run)
}

/// `--dump-state`: all 20 component probabilities plus the joint detection
/// density around the configured times.
fn dump_scheme_state(s: &ShapingScheme, out_dir: &Path, prefix: &str) -> anyhow::Result<()> {
    let shapes: Vec<_> = s.inputs.iter().map(|p| p.shape).collect();
    let g = gram(&shapes);
    let u = photonshape_core::network::metasurface_unitary(s.s_t)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut comps = expand_output(&s.inputs, &u).map_err(|e| anyhow::anyhow!("{e}"))?;
    fill_probabilities(&mut comps, &g).map_err(|e| anyhow::anyhow!("{e}"))?;
    let listing: Vec<serde_json::Value> = comps
        .iter()
        .map(|c| {
            serde_json::json!({
                "occupation": c.occupation,
                "probability": c.probability,
            })
        })
        .collect();
    atomic_write(
        &out_dir.join(format!("{prefix}_components.json")),
        &serde_json::to_string_pretty(&listing)?,
    )?;

    let (c, g) = s.prepare().map_err(|e| anyhow::anyhow!("{e}"))?;
    let (t1c, t2c) = (s.detections[0].time, s.detections[1].time);
    let n = 41;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let t1 = t1c - 2.0 + 4.0 * i as f64 / (n - 1) as f64;
            let t2 = t2c - 2.0 + 4.0 * j as f64 / (n - 1) as f64;
            grid.push((t1, t2));
        }
    }
    let dens = joint_density_map(&c, &s.pattern(), &s.inputs, &g, &grid)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .zip(&dens)
        .map(|(&(t1, t2), &d)| vec![t1, t2, d])
        .collect();
    atomic_write(&out_dir.join(format!("{prefix}_density.csv")), &csv("t1,t2,density", &rows))?;
    Ok(())
}

fn bundled(name: &str) -> anyhow::Result<ScenarioConfig> {
    let text = scenarios::ALL
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .with_context(|| format!("no bundled scenario `{name}`"))?;
    ScenarioConfig::from_str(text)
}

/// The three conversion schemes used by the sweep figures.
fn sweep_schemes() -> anyhow::Result<Vec<(&'static str, ShapingScheme)>> {
    Ok(vec![
        ("ed_to_gaussian", bundled("fig2")?.scheme),
        ("gaussian_to_er", bundled("fig3_er")?.scheme),
        ("gaussian_to_ed", bundled("fig3_ed")?.scheme),
    ])
}

pub fn reproduce_figure(name: &str, out_dir: &Path, dump_state: bool) -> anyhow::Result<()> {
    run_scenario(&bundled(name)?, out_dir, name, dump_state)?;
    Ok(())
}

/// Fig. 4(a): fidelity vs splitting coefficient, ±10% around nominal,
/// detection times fixed.
pub fn reproduce_fig4a(out_dir: &Path) -> anyhow::Result<()> {
    let schemes = sweep_schemes()?;
    let curves: Vec<(&str, Vec<(f64, f64)>)> = schemes
        .par_iter()
        .map(|(label, scheme)| {
            let nominal = scheme.s_t;
            let values: Vec<f64> = (0..41)
                .map(|i| nominal * (0.90 + 0.20 * i as f64 / 40.0))
                .collect();
            let curve = sweep_splitting(scheme, &values, false)
                .map_err(|e| anyhow::anyhow!("{label}: {e}"))?;
            Ok((*label, curve))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut series = Vec::new();
    for (k, (label, curve)) in curves.iter().enumerate() {
        let rows: Vec<Vec<f64>> = curve.iter().map(|&(x, f)| vec![x, f]).collect();
        atomic_write(&out_dir.join(format!("fig4a_{label}.csv")), &csv("x,fidelity", &rows))?;
        series.push(Series {
            label,
            color: CURVE_COLORS[k % CURVE_COLORS.len()],
            points: curve.clone(),
        });
    }
    atomic_write(
        &out_dir.join("fig4a.svg"),
        &svg_plot("fidelity vs splitting coefficient", "s_t", "fidelity", &series),
    )?;
    Ok(())
}

/// Fig. 4(b): fidelity vs detector resolution window t_R/t0 ∈ [0, 1].
pub fn reproduce_fig4b(out_dir: &Path) -> anyhow::Result<()> {
    let schemes = sweep_schemes()?;
    let t_r: Vec<f64> = (0..21).map(|i| i as f64 * 0.05).collect();
    let curves: Vec<(&str, Vec<(f64, f64)>)> = schemes
        .par_iter()
        .map(|(label, scheme)| {
            let curve = sweep_resolution(scheme, &t_r, SmearDefinition::MixedState)
                .map_err(|e| anyhow::anyhow!("{label}: {e}"))?;
            Ok((*label, curve))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut series = Vec::new();
    for (k, (label, curve)) in curves.iter().enumerate() {
        let rows: Vec<Vec<f64>> = curve.iter().map(|&(x, f)| vec![x, f]).collect();
        atomic_write(&out_dir.join(format!("fig4b_{label}.csv")), &csv("x,fidelity", &rows))?;
        series.push(Series {
            label,
            color: CURVE_COLORS[k % CURVE_COLORS.len()],
            points: curve.clone(),
        });
    }
    atomic_write(
        &out_dir.join("fig4b.svg"),
        &svg_plot("fidelity vs detector resolution", "t_R / t0", "fidelity", &series),
    )?;
    Ok(())
}

/// Table 1: re-optimize every row at its fixed geometry and emit the
/// resulting (P_sel, F) table.
pub fn reproduce_table1(out_dir: &Path, seed: u64) -> anyhow::Result<()> {
    let rows = table1_rows();
    let reports: Vec<_> = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            reproduce_table1_row(row, seed.wrapping_add(i as u64))
                .map_err(|e| anyhow::anyhow!("row {} (s_t={}): {e}", i + 1, row.s_t))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut out = String::from("s_t,component,p_sel_percent,output,f_percent\n");
    for (row, report) in rows.iter().zip(&reports) {
        let comp: Vec<String> = row.component.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},b{},{}\n",
            fmt_f64(row.s_t),
            comp.join("|"),
            fmt_f64(100.0 * report.best_p_sel),
            row.remaining_mode + 1,
            fmt_f64(100.0 * report.best_fidelity),
        ));
    }
    atomic_write(&out_dir.join("table1.csv"), &out)?;
    Ok(())
}

fn reproduce_table1_row(
    row: &photonshape_core::optimize::Table1Row,
    seed: u64,
) -> Result<photonshape_core::optimize::OptimizationReport, photonshape_core::Error> {
    photonshape_core::optimize::reproduce_table1(row, TABLE1_BUDGET, seed)
}

pub fn cmd_optimize(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<()> {
    let spec = cfg
        .optimize
        .as_ref()
        .context("config has no `optimize` section")?;
    let seed = seed_override.unwrap_or(spec.seed);
    let report = optimize_scheme(&cfg.scheme, &spec.params, spec.objective, spec.budget, seed)
        .map_err(|e| anyhow::anyhow!("optimization failed: {e}"))?;

    atomic_write(
        &out_dir.join("opt_report.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;
    let rows: Vec<Vec<f64>> = report
        .trace
        .iter()
        .map(|&(ev, f)| vec![ev as f64, f])
        .collect();
    atomic_write(
        &out_dir.join("opt_trace.csv"),
        &csv("evaluation,best_fidelity", &rows),
    )?;
    Ok(())
}
