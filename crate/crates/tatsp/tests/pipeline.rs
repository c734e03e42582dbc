//! Cross-module flows: files in and out, search against the exhaustive
//! solver, and solutions priced through the exact model.

use tatsp::eval::{evaluate_tour, COST_EPS};
use tatsp::fileio;
use tatsp::fixtures;
use tatsp::generator::{generate_rg, RgSpec, Scenario};
use tatsp::grasp::{self, GraspConfig};
use tatsp::instance::Tour;
use tatsp::localsearch::{descent, MoveKind};
use tatsp::mip;
use tatsp::oracle::brute_force_optimum;

#[test]
fn generated_instances_survive_a_text_round_trip() {
    for (i, scenario) in Scenario::ALL.into_iter().enumerate() {
        let spec = RgSpec { scenario, n: 12, relation_count: 30, seed: 100 + i as u64 };
        let inst = generate_rg(&spec).unwrap();
        let text = fileio::instance_to_string(&inst);
        let back = fileio::parse_instance(&text).unwrap();
        assert_eq!(inst.node_count(), back.node_count());
        assert_eq!(inst.arcs(), back.arcs());
        assert_eq!(inst.relations(), back.relations());
        // Costs round-trip losslessly, so a second render is byte-identical.
        assert_eq!(text, fileio::instance_to_string(&back));
    }
}

#[test]
fn search_results_never_beat_the_exhaustive_optimum() {
    for seed in 0..12 {
        let inst = fixtures::random_instance(seed, 7, 12);
        let optimum = brute_force_optimum(&inst).unwrap().best_cost;

        let cfg = GraspConfig {
            max_iterations: Some(4),
            time_limit: None,
            seed,
            ..GraspConfig::default()
        };
        let result = grasp::run(&inst, &cfg).unwrap();
        assert!(result.cost >= optimum - COST_EPS, "seed {seed}: search below optimum");

        let start = fixtures::random_tour(seed, 7);
        let (_, cost) = descent(&inst, &start, &MoveKind::ALL).unwrap();
        assert!(cost >= optimum - COST_EPS, "seed {seed}: descent below optimum");
    }
}

#[test]
fn solution_files_reproduce_the_evaluated_cost() {
    let inst = fixtures::fix_c();
    let cfg = GraspConfig { max_iterations: Some(2), time_limit: None, ..GraspConfig::default() };
    let result = grasp::run(&inst, &cfg).unwrap();

    let mut buffer = Vec::new();
    fileio::write_solution(&mut buffer, &result.tour, result.cost).unwrap();
    let text = String::from_utf8(buffer).unwrap();
    let (nodes, stored) = fileio::parse_solution(&text).unwrap();

    let tour = Tour::new(inst.node_count(), nodes).unwrap();
    let evaluated = evaluate_tour(&inst, &tour).unwrap().total_cost;
    assert_eq!(tour.nodes(), result.tour.nodes());
    assert!((evaluated - result.cost).abs() <= COST_EPS);
    assert!((stored.unwrap() - result.cost).abs() <= 1e-6, "file keeps six decimals");
}

#[test]
fn search_results_check_out_against_the_exact_model() {
    for seed in [1, 2, 3] {
        let spec = RgSpec { scenario: Scenario::Balanced, n: 8, relation_count: 24, seed };
        let inst = generate_rg(&spec).unwrap();
        let cfg = GraspConfig {
            max_iterations: Some(3),
            time_limit: None,
            seed,
            ..GraspConfig::default()
        };
        let result = grasp::run(&inst, &cfg).unwrap();

        let model = mip::build_model(&inst).unwrap();
        let assignment = mip::tour_assignment(&inst, &result.tour).unwrap();
        let report = mip::check_assignment(&model, &assignment, mip::CHECK_TOLERANCE);
        assert!(report.feasible(), "seed {seed}: {:?}", report.violations);
        assert!((report.objective - result.cost).abs() <= mip::CHECK_TOLERANCE);
    }
}
