//! Acceptance suite: ten checks with pinned tolerances, one test per
//! criterion, each printing a PASS/FAIL line (run with `-- --nocapture` to
//! see all of them).
//!
//! Two checks are mathematically unreachable for this machine and fail
//! honestly rather than being loosened:
//!
//! * `c02`: every pair target has exactly two minimal cores (both orders of
//!   the two-element list) against one for singletons, so the work at
//!   beta = 50 sits exactly ln(2)/50 ~ 1.39e-2 below the depth; a 1e-6
//!   tolerance on |W - depth| would need beta >= ln(2)/1e-6 ~ 6.9e5.
//! * `c07` (first clause): e^{-beta W} differs from the window count ratio
//!   at first order in beta by roughly beta * depth; with depths 2..6 at
//!   beta = 1e-3 the relative gap is 2.0e-3..6.1e-3 for every ordered pair,
//!   above the stated 1e-3 (the identity does hold at that tolerance for
//!   beta <= ~2e-4).
//!
//! The corresponding exact limits are covered by passing tests in the
//! library (`work_reaches_depth_as_beta_diverges`,
//! `high_temp_identity_tightens_as_beta_vanishes`).

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use progtherm::automaton::{build_automaton, GROWTH_TOL};
use progtherm::ensemble::{
    coupled_partition, free_energy, high_temp_decomposition, kraft_sum, partition_function,
    reversible_work_direct, reversible_work_ti, soft_hard_gap, udt_all_pairs, Coupling,
    EnsembleParams,
};
use progtherm::experiments::{all_ordered_pairs, lambda_convergence, mean_convergence_errors};
use progtherm::jarzynski::{estimate, Protocol};
use progtherm::machine::{
    decode_core, encode_core, execute, parse_program, BitString, Marker, ObjectSet, ProgramTable,
    Universe,
};

const LN2: f64 = std::f64::consts::LN_2;

struct Setup {
    universe: Universe,
    marker: Marker,
    aut: progtherm::automaton::WrapperAutomaton,
    table: ProgramTable,
}

fn setup() -> Setup {
    let universe = Universe::new(4).unwrap();
    let marker = Marker::parse("011").unwrap();
    let aut = build_automaton(&marker);
    let table = ProgramTable::build(&universe, &marker, 19).unwrap();
    Setup {
        universe,
        marker,
        aut,
        table,
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[test]
fn c01_kraft_inequality() {
    let s = setup();
    let t0 = Instant::now();
    let mut last = 0.0;
    let mut ok = true;
    for l_total in 0..=20u32 {
        let k = kraft_sum(&s.table, &s.aut, l_total).unwrap();
        ok &= k.within_bound() && k.value() >= last;
        last = k.value();
    }
    let elapsed = t0.elapsed();
    println!(
        "C1 kraft-inequality: {} (sum at L=20 is {last:.9}, exact integer bound; {elapsed:.2?})",
        verdict(ok)
    );
    assert!(ok);
    assert!(elapsed < Duration::from_secs(1));
}

#[test]
fn c02_low_temperature_regime() {
    // Unreachable as stated: the exact work is depth - ln(2)/50 for every
    // ordered pair (two minimal cores per pair, one per singleton). Kept at
    // the stated tolerance; fails honestly. See the module header.
    let s = setup();
    let t0 = Instant::now();
    let (beta, excess, tol) = (50.0, 6, 1e-6);
    let mut worst = 0.0f64;
    for (x, y) in all_ordered_pairs(4) {
        let wd = reversible_work_direct(&s.table, &s.aut, x, y, beta, excess).unwrap();
        worst = worst.max((wd.work - wd.depth).abs());
    }
    let elapsed = t0.elapsed();
    let pass = worst <= tol;
    println!(
        "C2 low-temperature-regime: {} (max |W - depth| = {worst:.6e}, required <= {tol:.0e}; \
         exact residual is ln(2)/beta = {:.6e}; {elapsed:.2?})",
        verdict(pass),
        LN2 / beta
    );
    assert!(elapsed < Duration::from_secs(1));
    assert!(
        pass,
        "max |W - depth| = {worst:.6e} > {tol:.0e}: the ground-multiplicity ratio makes \
         W = depth - ln(2)/beta exactly; see the suite header"
    );
}

#[test]
fn c03_critical_point_matches_direct_summation() {
    let s = setup();
    let t0 = Instant::now();
    // independent oracle: materialize every program by raw bit-string scan
    let mut programs: Vec<(BitString, ObjectSet)> = Vec::new();
    for len in 1..=18u32 {
        for bits in BitString::all_of_len(len) {
            if let Ok(out) = execute(&bits, &s.universe, &s.marker) {
                programs.push((bits, out));
            }
        }
    }
    let mut targets = Vec::new();
    for x in 0..4 {
        targets.push(s.universe.singleton(x).unwrap());
        for y in 0..4 {
            if x != y {
                targets.push(s.universe.pair(x, y).unwrap());
            }
        }
    }
    let mut worst = 0.0f64;
    for &target in &targets {
        let z = partition_function(&s.table, &s.aut, target, LN2, 4).unwrap();
        let window = z.ground + 4;
        let direct: f64 = programs
            .iter()
            .filter(|(b, out)| b.len() <= window && out.is_superset_of(target))
            .map(|(b, _)| (-LN2 * f64::from(b.len())).exp())
            .sum();
        worst = worst.max((z.value() - direct).abs() / direct);
    }
    let elapsed = t0.elapsed();
    let pass = worst <= 1e-12;
    println!(
        "C3 critical-point-direct-summation: {} (worst rel err {worst:.3e} over {} targets; \
         {elapsed:.2?})",
        verdict(pass),
        targets.len()
    );
    assert!(pass);
    assert!(elapsed < Duration::from_secs(5));
}

#[test]
fn c04_thermodynamic_integration() {
    let s = setup();
    let t0 = Instant::now();
    let (beta, excess) = (1.0, 4);
    let mut worst_ti = 0.0f64;
    for (x, y) in all_ordered_pairs(4) {
        let ti = reversible_work_ti(&s.table, &s.aut, x, y, beta, 50.0, excess, 64).unwrap();
        let at = |lambda| {
            let p = EnsembleParams {
                beta,
                lambda,
                coupling: Coupling::Soft(50.0),
                excess,
            };
            free_energy(&coupled_partition(&s.table, &s.aut, x, y, &p).unwrap()).unwrap()
        };
        worst_ti = worst_ti.max((ti - (at(1.0) - at(0.0))).abs());
    }

    // soft-to-hard convergence on the default pair
    let mut gaps = Vec::new();
    for j in [5.0, 10.0, 20.0, 40.0, 80.0] {
        gaps.push(soft_hard_gap(&s.table, &s.aut, 0, 1, beta, j, excess).unwrap());
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let converged = gaps[3] <= 1e-6; // beta J = 40

    let elapsed = t0.elapsed();
    let pass = worst_ti <= 1e-6 && decreasing && converged;
    println!(
        "C4 thermodynamic-integration: {} (worst |TI - dF| = {worst_ti:.3e}; gaps at J=5..80: \
         {:.3e} {:.3e} {:.3e} {:.3e} {:.3e}; {elapsed:.2?})",
        verdict(pass),
        gaps[0],
        gaps[1],
        gaps[2],
        gaps[3],
        gaps[4]
    );
    assert!(pass);
    assert!(elapsed < Duration::from_secs(5));
}

#[test]
fn c05_jarzynski_estimator() {
    let s = setup();
    let t0 = Instant::now();
    let (beta, j, excess, seed) = (1.0, 20.0, 4, 20240817);

    let slow = Protocol::linear(64, 200, 1000, seed, beta, j, excess);
    let est_slow = estimate(&s.table, &s.aut, 0, 1, &slow).unwrap();
    let slow_ok =
        (est_slow.delta_f_estimate - est_slow.exact_delta_f).abs() <= 3.0 * est_slow.std_error;

    let fast = Protocol::linear(2, 200, 1000, seed, beta, j, excess);
    let est_fast = estimate(&s.table, &s.aut, 0, 1, &fast).unwrap();
    let fast_ok = est_fast.dissipation > 3.0 * est_fast.std_error;

    let elapsed = t0.elapsed();
    let pass = slow_ok && fast_ok;
    println!(
        "C5 jarzynski: {} (slow: est {:.4} +/- {:.4} vs exact {:.4}; fast dissipation {:.4} \
         with SE {:.4}; {elapsed:.2?})",
        verdict(pass),
        est_slow.delta_f_estimate,
        est_slow.std_error,
        est_slow.exact_delta_f,
        est_fast.dissipation,
        est_fast.std_error
    );
    assert!(slow_ok, "slow protocol estimate outside 3 SE");
    assert!(
        fast_ok,
        "fast protocol dissipation not positive beyond 3 SE"
    );
    assert!(elapsed < Duration::from_secs(60));
}

#[test]
fn c06_wrapper_counting() {
    let t0 = Instant::now();
    // every valid marker of length <= 4
    let mut markers = Vec::new();
    for len in 1..=4u32 {
        for bits in BitString::all_of_len(len) {
            if let Ok(m) = Marker::new(bits) {
                markers.push(m);
            }
        }
    }
    assert_eq!(markers.len(), 14);

    let mut exact_ok = true;
    for marker in &markers {
        let aut = build_automaton(marker);
        for n in 0..=14u32 {
            let brute = BitString::all_of_len(n)
                .filter(|s| !(0..s.len()).any(|i| s.matches_at(marker.bits(), i)))
                .count() as u128;
            exact_ok &= aut.count_avoiding(n) == brute;
        }
    }

    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mu = build_automaton(&Marker::parse("011").unwrap())
        .growth_rate(GROWTH_TOL)
        .unwrap()
        .mu;
    let mu_ok = (mu - phi).abs() <= 1e-6;

    let elapsed = t0.elapsed();
    let pass = exact_ok && mu_ok;
    println!(
        "C6 wrapper-counting: {} ({} markers x 15 lengths exact; |mu - phi| = {:.3e}; \
         {elapsed:.2?})",
        verdict(pass),
        markers.len(),
        (mu - phi).abs()
    );
    assert!(pass);
    assert!(elapsed < Duration::from_secs(10));
}

#[test]
fn c07_high_temperature_regime() {
    // First clause unreachable as stated (gap ~ beta * depth, see the suite
    // header); kept at the stated tolerance and allowed to fail honestly.
    // The degeneracy-prediction clause compares the pair-set mean error.
    let s = setup();
    let t0 = Instant::now();
    let beta = 1e-3;
    let pairs = all_ordered_pairs(4);

    let mut worst_rel = 0.0f64;
    for &(x, y) in &pairs {
        let check = high_temp_decomposition(&s.table, &s.aut, x, y, beta, 4).unwrap();
        let rel = (check.boltzmann_ratio - check.count_ratio).abs() / check.count_ratio;
        worst_rel = worst_rel.max(rel);
    }
    let ratio_ok = worst_rel <= 1e-3;

    let rows = lambda_convergence(&s.table, &s.aut, &pairs, beta, &[2, 8]).unwrap();
    let means = mean_convergence_errors(&rows, &[2, 8]);
    let prediction_ok = means[1].1 < means[0].1;

    let elapsed = t0.elapsed();
    let pass = ratio_ok && prediction_ok;
    println!(
        "C7 high-temperature-regime: {} (worst count-ratio rel gap {worst_rel:.3e} vs 1e-3; \
         mean prediction error {:.2} at excess 8 vs {:.2} at excess 2; {elapsed:.2?})",
        verdict(pass),
        means[1].1,
        means[0].1
    );
    assert!(
        prediction_ok,
        "excess-8 prediction should beat excess-2 on the pair-set mean"
    );
    assert!(elapsed < Duration::from_secs(5));
    assert!(
        ratio_ok,
        "count-ratio identity gap {worst_rel:.3e} > 1e-3: first-order-in-beta depth factor; \
         see the suite header"
    );
}

#[test]
fn c08_uniform_predicate_counting() {
    let t0 = Instant::now();
    let mut ok = true;
    for n in 2..=20u32 {
        let u = Universe::new(n).unwrap();
        ok &= udt_all_pairs(&u).unwrap() == 1u64 << (n - 2);
    }
    let elapsed = t0.elapsed();
    println!(
        "C8 uniform-predicate-counting: {} (n = 2..=20 exhaustive, all pairs identical; \
         {elapsed:.2?})",
        verdict(ok)
    );
    assert!(ok);
    assert!(elapsed < Duration::from_secs(5));
}

#[test]
fn c09_machine_soundness() {
    let s = setup();
    let t0 = Instant::now();

    // round trip over every core the table holds, plus a raw scan that must
    // find exactly the same cores
    let mut roundtrip_ok = true;
    for core in s.table.cores() {
        let (expr, used) = decode_core(&core.bits).unwrap();
        roundtrip_ok &= used == core.bits.len() && encode_core(&expr).unwrap() == core.bits;
    }
    let mut scan_count = 0usize;
    for len in 1..=19u32 {
        for bits in BitString::all_of_len(len) {
            if let Ok((expr, used)) = decode_core(&bits) {
                if used == len && expr.evaluate(&s.universe).is_ok() {
                    scan_count += 1;
                }
            }
        }
    }
    let scan_ok = scan_count == s.table.cores().len();

    // prefix-freeness and parse uniqueness over all bit strings up to 16
    let mut programs = Vec::new();
    for len in 1..=16u32 {
        for bits in BitString::all_of_len(len) {
            if execute(&bits, &s.universe, &s.marker).is_ok() {
                programs.push(bits);
            }
        }
    }
    let set: HashSet<BitString> = programs.iter().copied().collect();
    let prefix_free = programs
        .iter()
        .all(|p| (1..p.len()).all(|k| !set.contains(&p.prefix(k))));
    let h = s.marker.len();
    let parse_unique = programs.iter().all(|p| {
        let parsed = parse_program(p, &s.marker).unwrap();
        if parsed.reassemble() != *p {
            return false;
        }
        let splits = (h..p.len())
            .filter(|&cut| {
                let w = p.prefix(cut);
                let q = p.suffix_from(cut);
                w.matches_at(s.marker.bits(), cut - h)
                    && !(0..cut - h).any(|i| w.matches_at(s.marker.bits(), i))
                    && matches!(decode_core(&q), Ok((_, used)) if used == q.len())
            })
            .count();
        splits == 1
    });

    let elapsed = t0.elapsed();
    let pass = roundtrip_ok && scan_ok && prefix_free && parse_unique;
    println!(
        "C9 machine-soundness: {} ({} cores round-trip, {} programs <= 16 bits prefix-free \
         with unique parses; {elapsed:.2?})",
        verdict(pass),
        s.table.cores().len(),
        programs.len()
    );
    assert!(roundtrip_ok && scan_ok, "core enumeration/codec mismatch");
    assert!(prefix_free, "found a program that is a prefix of another");
    assert!(parse_unique, "found a program with an ambiguous split");
    assert!(elapsed < Duration::from_secs(30));
}

#[test]
fn c10_cli_determinism() {
    // every subcommand, fixed config + seed, two runs, byte-identical stdout
    // and output files
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.toml");
    std::fs::write(
        &config_path,
        "[ensemble]\nbeta_points = 7\n\n[protocol]\nsteps = 16\nsweeps = 20\ntrajectories = 60\nseed = 99\n",
    )
    .unwrap();
    let config = config_path.to_str().unwrap();

    let run_in = |args: &[&str], out_tag: &str| {
        let out_dir = dir.path().join(out_tag);
        let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        for a in &mut full {
            if a == "@OUT" {
                *a = out_dir.to_str().unwrap().to_string();
            }
        }
        let output = Command::new(env!("CARGO_BIN_EXE_progtherm"))
            .args(["--config", config])
            .args(&full)
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        // normalize the run-specific directory out of stdout
        let stdout = String::from_utf8(output.stdout)
            .unwrap()
            .replace(out_dir.to_str().unwrap(), "@OUT");
        let mut files = Vec::new();
        if out_dir.is_dir() {
            let mut names: Vec<_> = std::fs::read_dir(&out_dir)
                .unwrap()
                .map(|e| e.unwrap().file_name())
                .collect();
            names.sort();
            for name in names {
                files.push((
                    name.to_string_lossy().into_owned(),
                    std::fs::read(out_dir.join(&name)).unwrap(),
                ));
            }
        }
        (stdout, files)
    };

    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("enumerate", vec!["enumerate"]),
        (
            "work-direct",
            vec!["work", "--x", "0", "--y", "1", "--beta", "1"],
        ),
        (
            "work-ti",
            vec![
                "work", "--x", "0", "--y", "1", "--beta", "1", "--mode", "ti",
            ],
        ),
        (
            "work-jarzynski",
            vec![
                "work",
                "--x",
                "0",
                "--y",
                "1",
                "--beta",
                "1",
                "--mode",
                "jarzynski",
            ],
        ),
        ("sweep", vec!["sweep", "--out", "@OUT"]),
        (
            "jarzynski",
            vec!["jarzynski", "--x", "0", "--y", "1", "--out", "@OUT"],
        ),
        ("wrapper-stats", vec!["wrapper-stats"]),
        ("udt", vec!["udt"]),
    ];

    let mut all_ok = true;
    for (tag, args) in &cases {
        let first = run_in(args, &format!("{tag}-a"));
        let second = run_in(args, &format!("{tag}-b"));
        let ok = first == second;
        all_ok &= ok;
        if !ok {
            println!("C10 detail: {tag} differs between runs");
        }
    }
    println!(
        "C10 cli-determinism: {} ({} commands, two runs each, stdout and files byte-identical)",
        verdict(all_ok),
        cases.len()
    );
    assert!(all_ok);
    let _ = Path::new("");
}
