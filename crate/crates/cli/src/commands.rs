//! Subcommand implementations. All output is a pure function of config plus
//! flags, with stable ordering, so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;

use progtherm::automaton::GROWTH_TOL;
use progtherm::ensemble::{
    coupled_partition, free_energy, partition_function, reversible_work_direct, reversible_work_ti,
    soft_hard_gap, udt_all_pairs, Coupling, EnsembleParams,
};
use progtherm::experiments::{run_all, write_jarzynski_csv};
use progtherm::jarzynski::{build_state_space, estimate, trajectory_works, Protocol};
use progtherm::machine::ObjectSet;

use crate::config::Config;

pub fn cmd_enumerate(config: &Config, export: Option<&Path>) -> Result<()> {
    let (table, _aut) = config.build_table()?;
    let universe = table.universe();
    println!(
        "machine: {} objects, marker {} ({} bits), cores enumerated to {} bits",
        universe.size(),
        table.marker(),
        table.marker().len(),
        table.core_bound()
    );
    println!("total cores: {}", table.cores().len());
    println!("cores per length:");
    for (len, count) in table.length_histogram() {
        if count > 0 {
            println!("  {len:>3}  {count}");
        }
    }

    println!("targets (ground program length, ground multiplicity, spectrum):");
    let mut targets: Vec<ObjectSet> = Vec::new();
    for x in universe.ids() {
        targets.push(universe.singleton(x)?);
    }
    for x in universe.ids() {
        for y in universe.ids() {
            if x < y {
                targets.push(universe.pair(x, y)?);
            }
        }
    }
    for target in targets {
        match table.ground_core_len(target) {
            Ok(ground) => {
                let max_excess = (table.core_bound() - ground).min(config.ensemble.excess);
                let spectrum = table.spectrum(target, max_excess)?;
                println!(
                    "  {}: ground {} (core {}), m {}, spectrum (excess 0..={}) {:?}",
                    target.display(universe),
                    table.marker().len() + ground,
                    ground,
                    spectrum.ground_multiplicity(),
                    max_excess,
                    spectrum.counts()
                );
            }
            Err(_) => {
                println!(
                    "  {}: not coverable within the core bound",
                    target.display(universe)
                );
            }
        }
    }

    if let Some(path) = export {
        let mut buf = Vec::new();
        table.export_csv(&mut buf)?;
        fs::write(path, buf)?;
        println!("table exported to {}", path.display());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WorkMode {
    Direct,
    Ti,
    Jarzynski,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_work(
    config: &Config,
    x: u32,
    y: u32,
    beta: f64,
    excess: Option<u32>,
    mode: WorkMode,
    coupling: Option<f64>,
    nodes: u32,
    seed: Option<u64>,
) -> Result<()> {
    let (table, aut) = config.build_table()?;
    let excess = excess.unwrap_or(config.ensemble.excess);
    let j = coupling.unwrap_or(config.ensemble.coupling);
    let ln2 = std::f64::consts::LN_2;
    match mode {
        WorkMode::Direct => {
            let wd = reversible_work_direct(&table, &aut, x, y, beta, excess)?;
            let universe = table.universe();
            let zx = partition_function(&table, &aut, universe.singleton(x)?, beta, excess)?;
            let zxy = partition_function(&table, &aut, universe.pair(x, y)?, beta, excess)?;
            println!("work direct: x={x} y={y} beta={beta} excess={excess}");
            println!("  work           {}", wd.work);
            println!("  work_bits      {}", beta * wd.work / ln2);
            println!("  depth          {}", wd.depth);
            println!("  diversity      {}", wd.diversity);
            println!("  log_z_x        {}", zx.log_value);
            println!("  log_z_xy       {}", zxy.log_value);
            if beta == ln2 {
                println!("  note: at beta = ln 2 the work is the Bayesian-update cost in bits");
            }
        }
        WorkMode::Ti => {
            let ti = reversible_work_ti(&table, &aut, x, y, beta, j, excess, nodes)?;
            let at = |lambda| -> Result<f64> {
                let p = EnsembleParams {
                    beta,
                    lambda,
                    coupling: Coupling::Soft(j),
                    excess,
                };
                Ok(free_energy(&coupled_partition(&table, &aut, x, y, &p)?)?)
            };
            let endpoints = at(1.0)? - at(0.0)?;
            println!("work ti: x={x} y={y} beta={beta} coupling={j} excess={excess} nodes={nodes}");
            println!("  integral       {ti}");
            println!("  endpoint_dF    {endpoints}");
            println!("  quad_residual  {:e}", (ti - endpoints).abs());
            println!(
                "  soft_hard_gap  {:e}",
                soft_hard_gap(&table, &aut, x, y, beta, j, excess)?
            );
        }
        WorkMode::Jarzynski => {
            let protocol = Protocol {
                beta,
                coupling_strength: j,
                ..config.protocol(seed, Some(excess))
            };
            let est = estimate(&table, &aut, x, y, &protocol)?;
            println!(
                "work jarzynski: x={x} y={y} beta={beta} coupling={j} excess={excess} \
                 steps={} sweeps={} trajectories={} seed={}",
                protocol.lambdas.len() - 1,
                protocol.sweeps,
                protocol.trajectories,
                protocol.seed
            );
            println!(
                "  dF_estimate    {} +/- {}",
                est.delta_f_estimate, est.std_error
            );
            println!("  mean_work      {}", est.mean_work);
            println!("  dissipation    {}", est.dissipation);
            println!("  dF_exact       {}", est.exact_delta_f);
        }
    }
    Ok(())
}

pub fn cmd_sweep(config: &Config, out: Option<PathBuf>) -> Result<()> {
    let (table, aut) = config.build_table()?;
    let dir = out.unwrap_or_else(|| config.output.dir.clone());
    let spec = config.sweep_spec(dir.clone());
    let protocol = config.protocol(None, None);
    run_all(&table, &aut, &spec, &protocol)?;
    println!(
        "wrote sweep.csv force.csv convergence.csv jarzynski.csv README.md plot.py to {}",
        dir.display()
    );
    Ok(())
}

pub fn cmd_jarzynski(
    config: &Config,
    x: u32,
    y: u32,
    out: Option<PathBuf>,
    seed: Option<u64>,
    excess: Option<u32>,
) -> Result<()> {
    let (table, aut) = config.build_table()?;
    let protocol = config.protocol(seed, excess);
    let est = estimate(&table, &aut, x, y, &protocol)?;

    let dir = out.unwrap_or_else(|| config.output.dir.clone());
    fs::create_dir_all(&dir)?;
    let space = build_state_space(&table, &aut, x, y, protocol.excess, protocol.beta)?;
    let works = trajectory_works(&space, &protocol, false);
    let mut log = String::from("trajectory,work\n");
    for (i, w) in works.iter().enumerate() {
        log.push_str(&format!("{i},{w}\n"));
    }
    fs::write(dir.join("trajectories.csv"), log)?;
    write_jarzynski_csv(&dir.join("summary.csv"), x, y, &protocol, &est)?;

    println!(
        "jarzynski: x={x} y={y} beta={} coupling={} excess={} steps={} sweeps={} \
         trajectories={} seed={}",
        protocol.beta,
        protocol.coupling_strength,
        protocol.excess,
        protocol.lambdas.len() - 1,
        protocol.sweeps,
        protocol.trajectories,
        protocol.seed
    );
    println!(
        "  dF_estimate    {} +/- {}",
        est.delta_f_estimate, est.std_error
    );
    println!("  mean_work      {}", est.mean_work);
    println!("  dissipation    {}", est.dissipation);
    println!("  dF_exact       {}", est.exact_delta_f);
    println!("wrote trajectories.csv summary.csv to {}", dir.display());
    Ok(())
}

pub fn cmd_wrapper_stats(config: &Config, max_excess: u32) -> Result<()> {
    let marker = config.marker()?;
    let aut = progtherm::automaton::build_automaton(&marker);
    let h = marker.len();
    println!("d,a_d");
    for d in h..=h + max_excess {
        println!("{d},{}", aut.wrapper_count(d));
    }
    let growth = aut.growth_rate(GROWTH_TOL)?;
    println!();
    println!("mu,alpha,tol");
    println!("{},{},{:e}", growth.mu, growth.alpha, growth.tol);
    Ok(())
}

pub fn cmd_udt(config: &Config) -> Result<()> {
    let universe = config.universe()?;
    let n = universe.size();
    println!("objects: {n}");
    println!("subsets containing a fixed pair: {} (= 2^{})", 1u64 << (n - 2), n - 2);
    if n <= 20 {
        udt_all_pairs(&universe)?;
        let pairs = n * (n - 1) / 2;
        println!("pair independence: verified exhaustively across {pairs} unordered pairs");
    } else {
        println!("pair independence: exhaustive scan is limited to 20 objects, skipped");
    }
    Ok(())
}
