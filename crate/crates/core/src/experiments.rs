//! Scripted studies over the exact ensembles: temperature sweeps across the
//! three regimes, coupling-force profiles, window-convergence of the
//! degeneracy prediction, and estimator-versus-exact comparisons. Everything
//! lands in CSV plus a small matplotlib script; the compute core itself has
//! no plotting dependency.
//!
//! Row order is a deterministic function of the sweep parameters, and grid
//! points carry no shared mutable state, so grids run in parallel under the
//! `parallel` feature without changing a byte of output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::automaton::{effective_degeneracy, WrapperAutomaton, GROWTH_TOL};
use crate::ensemble::{
    generalized_force, high_temp_decomposition, partition_function, Coupling, EnsembleParams,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::jarzynski::{estimate, Protocol, WorkEstimate};
use crate::machine::{ObjectId, ProgramTable};
use crate::quadrature::gauss_legendre_unit;

/// What a sweep runs over: ordered pairs, a positive sorted beta grid that
/// must contain ln 2, excess windows, and the coupling strength for the
/// force/TI studies.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub pairs: Vec<(ObjectId, ObjectId)>,
    pub betas: Vec<f64>,
    pub excesses: Vec<u32>,
    pub coupling_strength: f64,
    pub out_dir: PathBuf,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty()
            || self.betas.iter().any(|b| *b <= 0.0 || b.is_nan())
            || self.betas.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::BadSchedule(
                "beta grid must be positive, sorted, distinct".into(),
            ));
        }
        if !self.betas.contains(&std::f64::consts::LN_2) {
            return Err(Error::BadSchedule("beta grid must contain ln 2".into()));
        }
        if self.excesses.is_empty() {
            return Err(Error::BadSchedule("need at least one excess window".into()));
        }
        Ok(())
    }
}

/// Log-spaced grid from `min` to `max` with ln 2 spliced in.
pub fn beta_grid(min: f64, max: f64, points: u32) -> Vec<f64> {
    assert!(min > 0.0 && max > min && points >= 2);
    let (lo, hi) = (min.ln(), max.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (lo + (hi - lo) * f64::from(i) / f64::from(points - 1)).exp())
        .collect();
    // exp(ln x) can be an ulp off; pin the endpoints exactly
    grid[0] = min;
    *grid.last_mut().unwrap() = max;
    let ln2 = std::f64::consts::LN_2;
    if !grid.contains(&ln2) {
        grid.push(ln2);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

/// All ordered pairs (x, y) with x != y.
pub fn all_ordered_pairs(n: u32) -> Vec<(ObjectId, ObjectId)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y {
                out.push((x, y));
            }
        }
    }
    out
}

/// One temperature-sweep row with the three regime annotations: the
/// low-temperature residual `|W - depth|`, the work in bits (at `beta = ln2`
/// this is the Bayesian-update cost), and the high-temperature comparison of
/// `e^{-beta W}` against the window count ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub x: ObjectId,
    pub y: ObjectId,
    pub excess: u32,
    pub work: f64,
    pub depth: f64,
    pub diversity: f64,
    pub log_z_x: f64,
    pub log_z_xy: f64,
    pub work_bits: f64,
    pub low_t_residual: f64,
    pub count_ratio: f64,
    pub count_ratio_rel_gap: f64,
}

/// Exact work for every (beta, pair) grid point at the given excess window.
pub fn beta_sweep(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    spec: &SweepSpec,
    excess: u32,
) -> Result<Vec<SweepRow>> {
    beta_sweep_inner(table, aut, spec, excess, false)
}

/// Single-threaded twin of [`beta_sweep`]; same rows in the same order.
pub fn beta_sweep_sequential(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    spec: &SweepSpec,
    excess: u32,
) -> Result<Vec<SweepRow>> {
    beta_sweep_inner(table, aut, spec, excess, true)
}

fn beta_sweep_inner(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    spec: &SweepSpec,
    excess: u32,
    sequential: bool,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid: Vec<(f64, (ObjectId, ObjectId))> = spec
        .betas
        .iter()
        .flat_map(|&b| spec.pairs.iter().map(move |&p| (b, p)))
        .collect();
    let row = |i: usize| {
        let (beta, (x, y)) = grid[i];
        sweep_row(table, aut, x, y, beta, excess)
    };
    let rows = if sequential {
        exec::map_indexed_seq(grid.len(), row)
    } else {
        exec::map_indexed(grid.len(), row)
    };
    rows.into_iter().collect()
}

fn sweep_row(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    excess: u32,
) -> Result<SweepRow> {
    let check = high_temp_decomposition(table, aut, x, y, beta, excess)?;
    let universe = table.universe();
    let zx = partition_function(table, aut, universe.singleton(x)?, beta, excess)?;
    let zxy = partition_function(table, aut, universe.pair(x, y)?, beta, excess)?;
    let wd = check.decomposition;
    Ok(SweepRow {
        beta,
        x,
        y,
        excess,
        work: wd.work,
        depth: wd.depth,
        diversity: wd.diversity,
        log_z_x: zx.log_value,
        log_z_xy: zxy.log_value,
        // base-2 exponent of the Boltzmann ratio; equals `work` at beta = ln 2
        work_bits: beta * wd.work / std::f64::consts::LN_2,
        low_t_residual: (wd.work - wd.depth).abs(),
        count_ratio: check.count_ratio,
        count_ratio_rel_gap: (check.boltzmann_ratio - check.count_ratio).abs() / check.count_ratio,
    })
}

/// The generalized force sampled on the quadrature grid, plus its integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceProfile {
    pub x: ObjectId,
    pub y: ObjectId,
    pub beta: f64,
    pub coupling_strength: f64,
    pub excess: u32,
    /// (lambda, weight, force) per node.
    pub nodes: Vec<(f64, f64, f64)>,
    pub integral: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn lambda_profile(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    coupling_strength: f64,
    excess: u32,
    nodes: u32,
) -> Result<ForceProfile> {
    if nodes < 2 {
        return Err(Error::TooFewNodes(nodes));
    }
    let (xs, ws) = gauss_legendre_unit(nodes);
    let mut out = Vec::with_capacity(xs.len());
    for (&lambda, &w) in xs.iter().zip(&ws) {
        let params = EnsembleParams {
            beta,
            lambda,
            coupling: Coupling::Soft(coupling_strength),
            excess,
        };
        out.push((lambda, w, generalized_force(table, aut, x, y, &params)?));
    }
    let integral = out.iter().map(|(_, w, f)| w * f).sum();
    Ok(ForceProfile {
        x,
        y,
        beta,
        coupling_strength,
        excess,
        nodes: out,
        integral,
    })
}

/// One window-convergence row: exact work versus the depth + diversity
/// prediction at a given excess.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub excess: u32,
    pub x: ObjectId,
    pub y: ObjectId,
    pub exact_work: f64,
    pub predicted: f64,
    pub abs_error: f64,
    pub m_tilde_x: f64,
    pub m_tilde_xy: f64,
}

/// Sweeps the excess windows at a fixed small beta and reports how the
/// effective-degeneracy prediction tracks the exact work.
pub fn lambda_convergence(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    pairs: &[(ObjectId, ObjectId)],
    beta_small: f64,
    excesses: &[u32],
) -> Result<Vec<ConvergenceRow>> {
    let alpha = aut.growth_rate(GROWTH_TOL)?.alpha;
    let universe = table.universe();
    let grid: Vec<(u32, (ObjectId, ObjectId))> = excesses
        .iter()
        .flat_map(|&e| pairs.iter().map(move |&p| (e, p)))
        .collect();
    let rows = exec::map_indexed(grid.len(), |i| -> Result<ConvergenceRow> {
        let (excess, (x, y)) = grid[i];
        let check = high_temp_decomposition(table, aut, x, y, beta_small, excess)?;
        let m_x = effective_degeneracy(
            &table.spectrum(universe.singleton(x)?, excess)?,
            alpha,
            excess,
        )?;
        let m_xy = effective_degeneracy(
            &table.spectrum(universe.pair(x, y)?, excess)?,
            alpha,
            excess,
        )?;
        let wd = check.decomposition;
        let predicted = wd.depth + wd.diversity;
        Ok(ConvergenceRow {
            excess,
            x,
            y,
            exact_work: wd.work,
            predicted,
            abs_error: (wd.work - predicted).abs(),
            m_tilde_x: m_x,
            m_tilde_xy: m_xy,
        })
    });
    rows.into_iter().collect()
}

/// Mean prediction error per excess window, in the order given.
pub fn mean_convergence_errors(rows: &[ConvergenceRow], excesses: &[u32]) -> Vec<(u32, f64)> {
    excesses
        .iter()
        .map(|&e| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.excess == e)
                .map(|r| r.abs_error)
                .collect();
            (e, errs.iter().sum::<f64>() / errs.len() as f64)
        })
        .collect()
}

fn fmt_row(fields: &[String]) -> String {
    fields.join(",")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut s = String::from(
        "beta,x,y,excess,work,depth,diversity,log_z_x,log_z_xy,work_bits,\
         low_t_residual,count_ratio,count_ratio_rel_gap\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{}",
            fmt_row(&[
                r.beta.to_string(),
                r.x.to_string(),
                r.y.to_string(),
                r.excess.to_string(),
                r.work.to_string(),
                r.depth.to_string(),
                r.diversity.to_string(),
                r.log_z_x.to_string(),
                r.log_z_xy.to_string(),
                r.work_bits.to_string(),
                r.low_t_residual.to_string(),
                r.count_ratio.to_string(),
                r.count_ratio_rel_gap.to_string(),
            ])
        );
    }
    write_file(path, &s)
}

pub fn write_force_csv(path: &Path, profiles: &[ForceProfile]) -> Result<()> {
    let mut s = String::from("x,y,beta,coupling,excess,lambda,force\n");
    for p in profiles {
        for (lambda, _, force) in &p.nodes {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                p.x, p.y, p.beta, p.coupling_strength, p.excess, lambda, force
            );
        }
    }
    write_file(path, &s)
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut s = String::from("excess,x,y,exact_work,predicted,abs_error,m_tilde_x,m_tilde_xy\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.excess, r.x, r.y, r.exact_work, r.predicted, r.abs_error, r.m_tilde_x, r.m_tilde_xy
        );
    }
    write_file(path, &s)
}

pub fn write_jarzynski_csv(
    path: &Path,
    x: ObjectId,
    y: ObjectId,
    protocol: &Protocol,
    est: &WorkEstimate,
) -> Result<()> {
    let mut s = String::from(
        "x,y,steps,sweeps,trajectories,seed,beta,coupling,excess,\
         delta_f_estimate,std_error,mean_work,dissipation,exact_delta_f\n",
    );
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        x,
        y,
        protocol.lambdas.len() - 1,
        protocol.sweeps,
        protocol.trajectories,
        protocol.seed,
        protocol.beta,
        protocol.coupling_strength,
        protocol.excess,
        est.delta_f_estimate,
        est.std_error,
        est.mean_work,
        est.dissipation,
        est.exact_delta_f
    );
    write_file(path, &s)
}

/// Runs the full default study into `spec.out_dir`: sweep, force profile,
/// window convergence, one estimator comparison, a column README, and a
/// matplotlib script over the CSVs.
pub fn run_all(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    spec: &SweepSpec,
    protocol: &Protocol,
) -> Result<()> {
    spec.validate()?;
    let dir = &spec.out_dir;

    let default_excess = spec.excesses[spec.excesses.len() / 2];
    let rows = beta_sweep(table, aut, spec, default_excess)?;
    write_sweep_csv(&dir.join("sweep.csv"), &rows)?;

    let mut profiles = Vec::new();
    for &(x, y) in &spec.pairs {
        profiles.push(lambda_profile(
            table,
            aut,
            x,
            y,
            1.0,
            spec.coupling_strength,
            default_excess,
            64,
        )?);
    }
    write_force_csv(&dir.join("force.csv"), &profiles)?;

    let conv = lambda_convergence(table, aut, &spec.pairs, 1e-3, &spec.excesses)?;
    write_convergence_csv(&dir.join("convergence.csv"), &conv)?;

    let (x, y) = spec.pairs[0];
    let est = estimate(table, aut, x, y, protocol)?;
    write_jarzynski_csv(&dir.join("jarzynski.csv"), x, y, protocol, &est)?;

    write_file(&dir.join("README.md"), OUTPUT_README)?;
    write_file(&dir.join("plot.py"), PLOT_SCRIPT)?;
    Ok(())
}

const OUTPUT_README: &str = "\
# Output columns

## sweep.csv
One row per (beta, ordered pair) at the default excess window.

- `beta`: inverse temperature (lengths in bits, logs natural)
- `x`, `y`: object ids; constraints are \"output contains x\" and \"contains x and y\"
- `excess`: window width above each target's ground length
- `work`: reversible work `F(x,y) - F(x)` under per-constraint windows
- `depth`: ground-length difference
- `diversity`: `-ln(m~_xy / m~_x) / beta` from effective degeneracies
- `log_z_x`, `log_z_xy`: natural logs of the two cutoff partition functions
- `work_bits`: `beta * work / ln 2`, the base-2 exponent of the Boltzmann
  ratio; at `beta = ln 2` it equals `work` and is the negative log2 ratio of
  the Solomonoff-style weights
- `low_t_residual`: `|work - depth|`, the low-temperature annotation
- `count_ratio`: window program-count ratio `C(x,y) / C(x)`
- `count_ratio_rel_gap`: relative gap between `e^{-beta work}` and
  `count_ratio`, the high-temperature annotation

## force.csv
Generalized force profile per pair on the 64-node quadrature grid:
`x,y,beta,coupling,excess,lambda,force`. The quadrature-weighted sum of
`force` is the thermodynamic-integration work.

## convergence.csv
Effective-degeneracy prediction versus exact work at small beta, one row per
(excess, pair): `excess,x,y,exact_work,predicted,abs_error,m_tilde_x,
m_tilde_xy`.

## jarzynski.csv
One summary row for the estimator run: protocol parameters, the estimate
with jackknife standard error, mean work, dissipation gap, and the exact
free-energy difference of the same shared-window ensemble.

All rows are pure functions of the config and seed; reruns are
byte-identical.
";

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots for the CSV outputs in this directory (requires matplotlib)."""
import csv
import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

os.chdir(os.path.dirname(os.path.abspath(__file__)))


def read(name):
    with open(name) as f:
        return list(csv.DictReader(f))


sweep = read("sweep.csv")
by_pair = defaultdict(list)
for r in sweep:
    by_pair[(r["x"], r["y"])].append((float(r["beta"]), float(r["work"])))

fig, ax = plt.subplots(figsize=(7, 4.5))
for (x, y), pts in sorted(by_pair.items()):
    pts.sort()
    ax.plot([b for b, _ in pts], [w for _, w in pts], label=f"({x},{y})", lw=1)
ax.axvline(math.log(2), color="gray", ls="--", lw=0.8, label="beta = ln 2")
ax.set_xscale("log")
ax.set_xlabel("beta")
ax.set_ylabel("reversible work")
ax.legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig("sweep.png", dpi=150)

force = read("force.csv")
fig, ax = plt.subplots(figsize=(7, 4.5))
by_pair = defaultdict(list)
for r in force:
    by_pair[(r["x"], r["y"])].append((float(r["lambda"]), float(r["force"])))
for (x, y), pts in sorted(by_pair.items()):
    pts.sort()
    ax.plot([l for l, _ in pts], [f for _, f in pts], label=f"({x},{y})", lw=1)
ax.set_xlabel("lambda")
ax.set_ylabel("generalized force")
ax.legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig("force.png", dpi=150)

conv = read("convergence.csv")
fig, ax = plt.subplots(figsize=(7, 4.5))
by_excess = defaultdict(list)
for r in conv:
    by_excess[int(r["excess"])].append(float(r["abs_error"]))
xs = sorted(by_excess)
ax.plot(xs, [sum(by_excess[e]) / len(by_excess[e]) for e in xs], "o-")
ax.set_xlabel("excess window")
ax.set_ylabel("mean |exact - predicted|")
fig.tight_layout()
fig.savefig("convergence.png", dpi=150)
print("wrote sweep.png force.png convergence.png")
"#;
