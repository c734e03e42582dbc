//! Acceptance gate for the toolkit. Each test is one release criterion and
//! prints a single `ACCEPTANCE <n> PASS` line on success (visible with
//! `--nocapture`; the harness line per test doubles as the pass/fail
//! verdict). Tolerances are pinned here, next to the checks that use them.

use std::process::Command;
use std::time::Instant;

use tatsp::construction::{
    randomized_greedy, simple_randomized, ConstructionHeuristic, RclParams,
};
use tatsp::eval::{evaluate_tour, gap, COST_EPS};
use tatsp::fileio;
use tatsp::fixtures;
use tatsp::generator::{generate_rg, rg_suite, RgSpec, Scenario};
use tatsp::grasp::{self, GraspConfig};
use tatsp::instance::{Instance, Relation, Tour};
use tatsp::localsearch::{descent, enumerate_moves, evaluate_move, MoveKind};
use tatsp::mip;
use tatsp::oracle::{brute_force_optimum, definitional_evaluate};
use tatsp::seed::mix_seed;
use tatsp::subsolver::SubsolverConfig;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact-agreement tolerance between the incremental evaluator and the
/// literal one: none. They must agree to the bit.
#[test]
fn criterion_1_both_evaluators_agree_bit_for_bit() {
    let started = Instant::now();
    for seed in 0..500u64 {
        let n = 4 + (seed % 6) as usize;
        let relations = (seed % 21) as usize;
        let inst = fixtures::random_instance(seed, n, relations);
        let tour = fixtures::random_tour(seed.wrapping_mul(31), n);
        let fast = evaluate_tour(&inst, &tour).unwrap().total_cost;
        let literal = definitional_evaluate(&inst, &tour).unwrap();
        assert_eq!(
            fast.to_bits(),
            literal.to_bits(),
            "seed {seed}: {fast} vs {literal}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "500 pairs took {elapsed:?}, budget is 10 s");
    println!("ACCEPTANCE 1 PASS: 500 evaluator pairs agree bit-for-bit in {elapsed:?}");
}

#[test]
fn criterion_2_search_never_goes_below_the_exhaustive_optimum() {
    for seed in 0..50u64 {
        let n = 5 + (seed % 4) as usize;
        let inst = fixtures::random_instance(1000 + seed, n, 2 * n);
        let optimum = brute_force_optimum(&inst).unwrap().best_cost;
        let cfg = GraspConfig {
            max_iterations: Some(3),
            time_limit: None,
            seed,
            ..GraspConfig::default()
        };
        let result = grasp::run(&inst, &cfg).unwrap();
        assert!(
            result.cost >= optimum - COST_EPS,
            "seed {seed}: search reported {} below optimum {}",
            result.cost,
            optimum
        );
    }
    println!("ACCEPTANCE 2 PASS: 50 searches stay at or above the exhaustive optimum");
}

#[test]
fn criterion_3_search_quality_on_dense_eight_node_instances() {
    let started = Instant::now();
    let mut optimal = 0;
    for seed in 0..20u64 {
        let spec = RgSpec { scenario: Scenario::Balanced, n: 8, relation_count: 128, seed };
        let inst = generate_rg(&spec).unwrap();
        let optimum = brute_force_optimum(&inst).unwrap().best_cost;
        let cfg = GraspConfig {
            max_iterations: Some(40),
            time_limit: None,
            seed,
            ..GraspConfig::default()
        };
        let result = grasp::run(&inst, &cfg).unwrap();
        let g = gap(result.cost, optimum).unwrap();
        assert!(g <= 5.0, "seed {seed}: gap {g:.3}% exceeds 5%");
        if g <= 1e-7 {
            optimal += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(optimal >= 15, "only {optimal}/20 instances solved to optimality");
    assert!(elapsed.as_secs_f64() < 180.0, "criterion took {elapsed:?}, budget is 180 s");
    println!(
        "ACCEPTANCE 3 PASS: {optimal}/20 dense 8-node instances optimal, all gaps <= 5%, in {elapsed:?}"
    );
}

#[test]
fn criterion_4_descent_ends_in_certified_local_optima() {
    for seed in 0..100u64 {
        let n = 6 + (seed % 4) as usize;
        let inst = fixtures::random_instance(2000 + seed, n, 15);
        let start = fixtures::random_tour(seed, n);
        let (best, cost) = descent(&inst, &start, &MoveKind::ALL).unwrap();
        for kind in MoveKind::ALL {
            for mv in enumerate_moves(kind, n) {
                if let Some(candidate) = evaluate_move(&inst, &best, mv) {
                    assert!(
                        candidate >= cost - COST_EPS,
                        "seed {seed}: {mv:?} still improves ({candidate} < {cost})"
                    );
                }
            }
        }
    }
    println!("ACCEPTANCE 4 PASS: 100 descents certified locally optimal in all neighborhoods");
}

#[test]
fn criterion_5_constructions_price_their_tours_exactly() {
    let heuristics = [
        ConstructionHeuristic::SimpleRandomized,
        ConstructionHeuristic::RandomizedGreedy { alpha: 0.3 },
        ConstructionHeuristic::MipAdditive { alpha: 0.1 },
        ConstructionHeuristic::MipMultiplicative { beta: 1.5 },
        ConstructionHeuristic::MipBiased { alpha: 0.1, beta: 3.0 },
    ];
    let sub = SubsolverConfig::default();
    for run in 0..200u64 {
        let n = 5 + (run % 5) as usize;
        let inst = fixtures::random_instance(3000 + run, n, 12);
        let heuristic = heuristics[(run % 5) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(9, run));
        let constructed = heuristic.construct(&inst, &sub, &mut rng).unwrap();
        let evaluated = evaluate_tour(&inst, &constructed.tour).unwrap().total_cost;
        assert!(
            (constructed.cost - evaluated).abs() <= 1e-9,
            "run {run} ({}): {} vs {}",
            heuristic.label(),
            constructed.cost,
            evaluated
        );
    }
    println!("ACCEPTANCE 5 PASS: 200 constructions report exactly their evaluated cost");
}

#[test]
fn criterion_6_model_prices_tours_and_flags_broken_assignments() {
    for run in 0..200u64 {
        let n = 4 + (run % 5) as usize;
        let inst = fixtures::random_instance(4000 + run, n, 10);
        let tour = fixtures::random_tour(run, n);
        let model = mip::build_model(&inst).unwrap();
        let assignment = mip::tour_assignment(&inst, &tour).unwrap();
        let report = mip::check_assignment(&model, &assignment, 1e-6);
        assert!(report.feasible(), "run {run}: {:?}", report.violations);
        let evaluated = evaluate_tour(&inst, &tour).unwrap().total_cost;
        assert!(
            (report.objective - evaluated).abs() <= 1e-6,
            "run {run}: objective {} vs evaluator {}",
            report.objective,
            evaluated
        );
    }

    // Three targeted corruptions, each caught by the family that owns it.
    let inst = fixtures::fix_b();
    let model = mip::build_model(&inst).unwrap();
    let layout = *model.layout();
    let tour = Tour::new(4, vec![0, 1, 2, 3]).unwrap();

    let mut broken = mip::tour_assignment(&inst, &tour).unwrap();
    broken.set(layout.x(0), 0.0);
    let report = mip::check_assignment(&model, &broken, 1e-6);
    assert!(report.violations.iter().any(|v| v.family == Some(mip::Family::FlowOut)));

    let mut broken = mip::tour_assignment(&inst, &tour).unwrap();
    broken.set(layout.u(1), 3.0);
    broken.set(layout.u(3), 1.0);
    let report = mip::check_assignment(&model, &broken, 1e-6);
    assert!(report.violations.iter().any(|v| v.family == Some(mip::Family::Mtz)));

    let mut arcs = fixtures::complete_digraph_arcs(4, 1.0);
    arcs[0].base_cost = 5.0;
    let reversed = Instance::new(
        "reversed",
        4,
        arcs,
        vec![Relation { trigger: 8, target: 0, cost: 1.0 }],
    )
    .unwrap();
    let model = mip::build_model(&reversed).unwrap();
    let layout = *model.layout();
    let mut broken = mip::tour_assignment(&reversed, &tour).unwrap();
    broken.set(layout.y(0), 1.0);
    let report = mip::check_assignment(&model, &broken, 1e-6);
    assert!(report.violations.iter().any(|v| v.family == Some(mip::Family::Prec)));

    println!(
        "ACCEPTANCE 6 PASS: 200 tour assignments feasible within 1e-6, 3 corruptions attributed"
    );
}

#[test]
fn criterion_7_generator_respects_ranges_and_suite_shape() {
    // Relation costs stay inside the documented scenario ranges, checked on
    // ten thousand relations per scenario.
    for scenario in Scenario::ALL {
        let spec = RgSpec { scenario, n: 25, relation_count: 10_000, seed: 42 };
        let inst = generate_rg(&spec).unwrap();
        assert_eq!(inst.relations().len(), 10_000);
        let mut ratio_sum = 0.0;
        for rel in inst.relations() {
            let base = inst.arcs()[rel.target].base_cost;
            let (lo, hi) = scenario.cost_range(base);
            assert!(
                rel.cost >= lo && rel.cost <= hi,
                "{scenario:?}: cost {} outside [{lo}, {hi}]",
                rel.cost
            );
            ratio_sum += rel.cost / base;
        }
        let mean_ratio = ratio_sum / 10_000.0;
        let expected = match scenario {
            Scenario::Balanced => 1.25,
            Scenario::Increase => 1.5,
            Scenario::Decrease => 0.75,
        };
        assert!(
            (mean_ratio - expected).abs() < 0.05,
            "{scenario:?}: mean ratio {mean_ratio} far from {expected}"
        );
    }

    // Suite shape: 3 scenarios x 4 sizes x 5 densities x 3 replicas.
    let suite = rg_suite(0);
    assert_eq!(suite.len(), 180);
    for scenario in Scenario::ALL {
        assert_eq!(suite.iter().filter(|e| e.spec.scenario == scenario).count(), 60);
    }
    for &n in &[10usize, 15, 20, 25] {
        let with_n: Vec<_> = suite.iter().filter(|e| e.spec.n == n).collect();
        assert_eq!(with_n.len(), 45);
        let mut counts: Vec<usize> = with_n.iter().map(|e| e.spec.relation_count).collect();
        counts.sort_unstable();
        counts.dedup();
        assert_eq!(counts, vec![n / 2, 2 * n, 4 * n, 8 * n, 16 * n]);
    }
    let mut names: Vec<String> = suite.iter().map(|e| e.file_name()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 180, "file names must be unique");
    let mut seeds: Vec<u64> = suite.iter().map(|e| e.spec.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 180, "child seeds must be unique");

    println!("ACCEPTANCE 7 PASS: relation costs in range, suite is 180 instances (60 per scenario)");
}

#[test]
fn criterion_8_informed_construction_beats_uniform_construction() {
    // On every 10-node suite instance, compare mean optimality gaps of the
    // uniform successor walk and the greedy walk with a 0.1-wide candidate
    // list, five constructions each, against the exhaustive optimum.
    let entries: Vec<_> = rg_suite(0).into_iter().filter(|e| e.spec.n == 10).collect();
    assert_eq!(entries.len(), 45);
    let mut uniform_gaps = Vec::new();
    let mut greedy_gaps = Vec::new();
    for entry in &entries {
        let inst = generate_rg(&entry.spec).unwrap();
        let optimum = brute_force_optimum(&inst).unwrap().best_cost;
        for rep in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(entry.spec.seed, rep));
            let c = simple_randomized(&inst, &mut rng).unwrap();
            uniform_gaps.push(gap(c.cost, optimum).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(entry.spec.seed, rep));
            let c = randomized_greedy(&inst, RclParams::new(0.1).unwrap(), &mut rng).unwrap();
            greedy_gaps.push(gap(c.cost, optimum).unwrap());
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (uniform, greedy) = (mean(&uniform_gaps), mean(&greedy_gaps));
    assert!(
        greedy < uniform,
        "greedy construction ({greedy:.2}%) should beat uniform ({uniform:.2}%)"
    );
    println!(
        "ACCEPTANCE 8 PASS: greedy construction gap {greedy:.2}% < uniform {uniform:.2}% over 45 instances"
    );
}

#[test]
fn criterion_9_benchmark_tables_reproduce_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (i, scenario) in Scenario::ALL.into_iter().enumerate() {
        let spec = RgSpec { scenario, n: 8, relation_count: 32, seed: 500 + i as u64 };
        let inst = generate_rg(&spec).unwrap();
        let path = dir.path().join(format!("bench_{i}.tatsp"));
        let mut w = std::io::BufWriter::new(std::fs::File::create(&path).unwrap());
        fileio::write_instance(&inst, &mut w).unwrap();
        paths.push(path);
    }

    let run = |csv: &str| {
        let output = Command::new(env!("CARGO_BIN_EXE_tatsp"))
            .arg("bench")
            .args(&paths)
            .args(["--methods", "src,rgc,mip-bias", "--seeds", "2", "--iteration-cap", "2"])
            .args(["-o", csv])
            .current_dir(dir.path())
            .output()
            .expect("bench runs");
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
        (
            std::fs::read(dir.path().join(csv)).unwrap(),
            String::from_utf8(output.stdout).unwrap(),
        )
    };
    let (table1, summary1) = run("first.csv");
    let (table2, summary2) = run("second.csv");
    assert_eq!(table1, table2, "capped benchmark tables must be byte-identical");
    assert_eq!(summary1, summary2, "aggregate lines must be byte-identical");

    let text = String::from_utf8(table1).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,method,seed,cost,best_known,gap_pct,time_ms,success"
    );
    assert_eq!(lines.count(), 18, "3 instances x 3 methods x 2 seeds");
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(6) == Some("0")));
    println!("ACCEPTANCE 9 PASS: capped benchmark runs reproduce byte-for-byte");
}
