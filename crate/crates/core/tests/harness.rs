use gaussvol::harness::{self, ExperimentSpec, SweepGrid};
use gaussvol::kernels::{self, KernelParams};
use gaussvol::Error;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut spec = ExperimentSpec::fixed_a(2.0, 500, 0.1, 3.0, 64, 99);
    spec.record_trials = true;
    let one = in_pool(1, || harness::run_thm2_undetectable(&spec).unwrap());
    let four = in_pool(4, || harness::run_thm2_undetectable(&spec).unwrap());
    assert_eq!(one.trials, four.trials);
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&four).unwrap()
    );
}

#[test]
fn single_cell_sweep_equals_direct_run() {
    let spec = ExperimentSpec::fixed_a(2.0, 2000, 0.1, 3.0, 200, 5);
    let t = 0.29;
    let table = harness::sweep_phase_transition(&spec, &SweepGrid::T(vec![t])).unwrap();
    let direct = harness::run_thm2_detectable(&spec.clone().with_t(t)).unwrap();
    assert_eq!(table.cells.len(), 1);
    assert_eq!(table.cells[0], direct);
    assert_eq!(table.rows[0].attacker_success, direct.rates["attacker_success"]);
}

#[test]
fn too_small_n_names_the_minimum() {
    let spec = ExperimentSpec::fixed_a(2.0, 3600, 0.05, 3.0, 10, 1);
    match harness::run_thm2_detectable(&spec) {
        Err(Error::InvalidSpec { field, reason }) => {
            assert_eq!(field, "n");
            assert!(reason.contains("3601"), "{reason}");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
    let ok = ExperimentSpec::fixed_a(2.0, 3601, 0.05, 3.0, 10, 1);
    assert!(harness::run_thm2_detectable(&ok).is_ok());
}

#[test]
fn epsilon_must_fit_inside_unit_interval() {
    let spec = ExperimentSpec::fixed_a(2.0, 2000, 0.7, 3.0, 10, 1);
    assert!(matches!(
        harness::run_coupling_validation(&spec),
        Err(Error::InvalidSpec { field, .. }) if field == "epsilon"
    ));
}

#[test]
fn threshold_above_g_lets_the_attacker_through() {
    let g = kernels::eval_big_g(&KernelParams::new(2.0).unwrap()).unwrap().value;
    let spec = ExperimentSpec::fixed_a(2.0, 2000, 0.1, 3.0, 500, 3).with_t(g + 0.1);
    let summary = harness::run_thm2_detectable(&spec).unwrap();
    assert!(!summary.premises["threshold_below_g"].holds);
    assert!(summary.check("overlap_zero").is_none());
    assert!(summary.counts["overlap_events"] > 400);
}

#[test]
fn undetectable_hypercube_warns_outside_hypothesis() {
    let spec = ExperimentSpec::cube_scaling(2.5, 1000, 3.0, 50, 2);
    let summary = harness::run_thm1_undetectable(&spec).unwrap();
    assert!(summary.warnings.iter().any(|w| w.contains("pi/sqrt(2)")));
}

#[test]
fn seeds_change_results() {
    let run = |seed| {
        let mut spec = ExperimentSpec::fixed_a(2.0, 500, 0.1, 3.0, 50, seed);
        spec.record_trials = true;
        harness::run_thm2_undetectable(&spec).unwrap()
    };
    let (a, b) = (run(1), run(2));
    assert_ne!(a.trials, b.trials);
    assert_eq!(a, run(1));
}
