//! Cross-module properties: every partitioner against the exhaustive optimum.

use hetpart::cost::{self, CostSpec};
use hetpart::harness::{self, ExperimentSpec, RunSettings, Variant};
use hetpart::model::{generate_matrix, DvfsMode, Profile, UtilizationMatrix};
use hetpart::{heuristics, oracle, pso};
use proptest::prelude::*;

fn settings(cost: CostSpec, swarm_size: usize, iterations: usize) -> RunSettings {
    RunSettings {
        cost,
        swarm_size,
        iterations,
        oracle_limit: oracle::DEFAULT_LIMIT,
        per_component_random: true,
    }
}

fn small_matrix() -> impl Strategy<Value = UtilizationMatrix> {
    (1usize..=5, 1usize..=3)
        .prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(0.05f64..1.0, m), n))
        .prop_map(|rows| UtilizationMatrix::from_rows(rows).unwrap())
}

fn cost_spec() -> impl Strategy<Value = CostSpec> {
    prop_oneof![Just(CostSpec::makespan()), Just(CostSpec::energy())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn no_variant_beats_the_oracle(u in small_matrix(), spec in cost_spec(), seed in any::<u64>()) {
        let (_, best) = oracle::exhaustive_best(&u, spec).unwrap();
        let s = settings(spec, 12, 12);
        for v in Variant::ALL {
            let rec = harness::run_variant(&u, v, &s, seed).unwrap();
            prop_assert!(rec.best_cost >= best, "{v} {} < {best}", rec.best_cost);
            let recomputed = spec.evaluate(&u, &rec.best_assignment).unwrap();
            prop_assert_eq!(recomputed.to_bits(), rec.best_cost.to_bits());
            if v == Variant::Oracle {
                prop_assert_eq!(rec.best_cost, best);
            }
        }
    }

    #[test]
    fn seeded_swarm_never_loses_to_its_seed(u in small_matrix(), spec in cost_spec(), seed in any::<u64>()) {
        let s = settings(spec, 8, 6);
        let mm = spec.evaluate(&u, &heuristics::min_min(&u).assignment).unwrap();
        let xm = spec.evaluate(&u, &heuristics::max_min(&u).assignment).unwrap();
        let m = harness::run_variant(&u, Variant::PsoM, &s, seed).unwrap();
        let both = harness::run_variant(&u, Variant::PsoMm, &s, seed).unwrap();
        prop_assert!(m.best_cost <= mm);
        prop_assert!(both.best_cost <= mm.min(xm));
    }

    #[test]
    fn runs_replay_exactly(u in small_matrix(), seed in any::<u64>()) {
        let s = settings(CostSpec::makespan(), 10, 15);
        for v in [Variant::PsoFi, Variant::PsoVi, Variant::PsoRe] {
            let a = harness::run_variant(&u, v, &s, seed).unwrap();
            let b = harness::run_variant(&u, v, &s, seed).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.cost_trace.len(), 15);
            prop_assert_eq!(a.evaluations, 150);
            prop_assert!(a.cost_trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn feasibility_flag_matches_loads(u in small_matrix(), seed in any::<u64>()) {
        let rec = harness::run_variant(&u, Variant::PsoVi, &settings(CostSpec::energy(), 6, 6), seed).unwrap();
        let loads = cost::loads(&u, &rec.best_assignment).unwrap();
        prop_assert_eq!(rec.feasible, loads.0.iter().all(|&x| x <= 1.0));
        prop_assert_eq!(rec.energy_per_core.is_some(), rec.feasible);
        if let Some(e) = rec.energy_per_core {
            prop_assert_eq!(e, cost::energy_metric(&loads, DvfsMode::PerCore).unwrap());
        }
    }
}

#[test]
fn swarm_finds_small_optima_on_most_seeds() {
    let spec = CostSpec::makespan();
    let mut hits = 0;
    for seed in 0..20u64 {
        let u = generate_matrix(6, 3, Profile::Medium, 1000 + seed).unwrap();
        let (_, best) = oracle::exhaustive_best(&u, spec).unwrap();
        let config = pso::SwarmConfig {
            rng_seed: seed,
            ..pso::SwarmConfig::default()
        };
        let rec = pso::run_pso(&u, spec, &config).unwrap();
        assert!(rec.best_cost >= best);
        hits += usize::from(rec.best_cost == best);
    }
    assert!(hits > 10, "optimum reached on {hits}/20 seeds");
}

#[test]
fn overloaded_instances_are_reported_infeasible() {
    let u = UtilizationMatrix::from_rows(vec![vec![0.9, 0.9]; 3]).unwrap();
    let s = settings(CostSpec::makespan(), 10, 10);
    for v in Variant::ALL {
        let rec = harness::run_variant(&u, v, &s, 3).unwrap();
        assert!(!rec.feasible, "{v}");
        assert!(rec.best_cost > 1.0, "{v}");
        assert_eq!(rec.energy_full_chip, None);
    }
}

#[test]
fn experiment_tables_are_consistent() {
    let text = r#"
spec_version = 1
profile = "light"
n_values = [5, 7]
m_values = [2, 3]
trials = 3
iteration_budget = 10
swarm_size = 8
dvfs_mode = "percore"
variants = ["pso-vi", "minmin", "oracle"]
master_seed = 11
"#;
    let spec = ExperimentSpec::from_toml(text).unwrap();
    let table = harness::run_experiment(&spec, Some(2)).unwrap();
    assert_eq!(table.rows.len(), 2 * 2 * 3 * 3);

    let results = table.results_csv();
    let mut reader = csv::Reader::from_reader(results.as_bytes());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, harness::RESULTS_HEADER);
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), table.rows.len());
    assert!(records
        .iter()
        .all(|r| &r[4] == "energy" && &r[5] == "percore"));

    // Output order is (n, m, trial, variant); the variant list order is irrelevant.
    let keys: Vec<_> = table
        .rows
        .iter()
        .map(|r| (r.n, r.m, r.trial, r.variant))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    for chunk in table.rows.chunks(3) {
        let oracle = chunk.iter().find(|r| r.variant == Variant::Oracle).unwrap();
        assert!(chunk.iter().all(|r| r.final_cost >= oracle.final_cost));
        let u = harness::trial_matrix(
            spec.profile,
            chunk[0].n,
            chunk[0].m,
            harness::trial_seed(spec.master_seed, chunk[0].n, chunk[0].m, chunk[0].trial),
        )
        .unwrap();
        let mm = spec
            .cost_spec()
            .evaluate(&u, &heuristics::min_min(&u).assignment)
            .unwrap();
        let row = chunk.iter().find(|r| r.variant == Variant::MinMin).unwrap();
        assert_eq!(row.final_cost, mm);
    }

    let aggregates = table.aggregates();
    assert_eq!(aggregates.len(), 2 * 2 * 3);
    assert!(aggregates
        .iter()
        .all(|a| a.trials == 3 && a.min_cost <= a.mean_cost && a.mean_cost <= a.max_cost));

    let serial = harness::run_experiment(&spec, Some(1)).unwrap();
    assert_eq!(serial.traces_csv(), table.traces_csv());
}
