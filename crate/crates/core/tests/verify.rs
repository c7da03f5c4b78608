mod common;

use common::{motor, random_linear, random_state, reversible, rng};
use motorflux::discretize::assemble_system;
use motorflux::evolve::StepConfig;
use motorflux::model::State;
use motorflux::steady::{solve_null_vector, NullVectorOptions};
use motorflux::verify::{
    check_comparison, check_contraction, check_convergence, stationary_target,
    weighted_l1_distance, weighted_mass, CheckContext, CheckRegistry,
};
use motorflux::Error;
use proptest::prelude::*;

fn shifted(u: &State, f: impl Fn(usize) -> f64) -> State {
    u.with_values(u.values().iter().enumerate().map(|(k, v)| v + f(k)).collect())
}

#[test]
fn identical_data_give_a_zero_series() {
    let spec = motor(32);
    let u = spec.initial_state().unwrap();
    let (rep, series) = check_contraction(&spec, &u, &u, &StepConfig::new(0.05, 2.0, 1)).unwrap();
    assert!(rep.pass);
    assert!(series.norms.iter().all(|d| *d == 0.0));
}

#[test]
fn ordered_data_keep_their_mass_gap() {
    let spec = motor(64);
    let a = spec.initial_state().unwrap();
    let b = shifted(&a, |k| 0.1 + 0.05 * (k % 7) as f64);
    let gap = weighted_mass(&b, &spec).unwrap() - weighted_mass(&a, &spec).unwrap();
    let (rep, series) = check_contraction(&spec, &a, &b, &StepConfig::new(0.05, 5.0, 1)).unwrap();
    assert!(rep.pass, "{}", rep.to_ndjson());
    assert!(series.norms.iter().all(|d| (d - gap).abs() <= 1e-10));
}

#[test]
fn sign_changing_difference_contracts_strictly() {
    let spec = motor(64);
    let a = spec.initial_state().unwrap();
    let nc = spec.grid.n_cells();
    let b = shifted(&a, |k| if (k % nc) < nc / 2 { 0.3 } else { -0.3 });
    let (rep, series) = check_contraction(&spec, &a, &b, &StepConfig::new(0.05, 5.0, 1)).unwrap();
    assert!(series.changes_sign_initially());
    assert!(rep.pass, "{}", rep.to_ndjson());
    assert!(series.ratio_at(5.0).unwrap() < 0.99);
}

#[test]
fn zero_lower_datum_stays_zero() {
    let spec = motor(32);
    let high = spec.initial_state().unwrap();
    let rep = check_comparison(&spec, &spec.empty_state(), &high, &StepConfig::new(0.05, 2.0, 1)).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.worst, 0.0);
}

#[test]
fn solutions_stay_under_a_stationary_dome() {
    let spec = random_linear(41, 2, 32);
    let op = assemble_system(&spec).unwrap();
    let v = solve_null_vector(&op, &NullVectorOptions::default()).unwrap().state.scaled(5.0);
    let mut r = rng(41);
    let low = random_state(&spec, &mut r, 0.0, 1.0);
    let low = low.with_values(low.values().iter().zip(v.values()).map(|(a, b)| a * b).collect());
    let rep = check_comparison(&spec, &low, &v, &StepConfig::new(0.05, 3.0, 1)).unwrap();
    assert!(rep.pass, "{}", rep.to_ndjson());
}

#[test]
fn reversible_ordered_pair_under_imex() {
    let spec = reversible(32);
    let mut r = rng(42);
    let low = random_state(&spec, &mut r, 0.0, 1.0);
    let bump = random_state(&spec, &mut r, 0.0, 0.5);
    let high = low.with_values(low.values().iter().zip(bump.values()).map(|(a, b)| a + b).collect());
    let rep = check_comparison(&spec, &low, &high, &StepConfig::new(0.01, 2.0, 1)).unwrap();
    assert!(rep.pass, "{}", rep.to_ndjson());
}

#[test]
fn unordered_data_are_rejected() {
    let spec = motor(16);
    let a = spec.initial_state().unwrap();
    let b = shifted(&a, |k| if k == 3 { -0.1 } else { 0.0 });
    let err = check_comparison(&spec, &a, &b, &StepConfig::new(0.1, 1.0, 1)).unwrap_err();
    assert!(matches!(err, Error::Invalid(_)));
}

#[test]
fn stationary_start_stays_put() {
    let spec = motor(32);
    let u0 = spec.initial_state().unwrap();
    let target = stationary_target(&spec, &u0, &NullVectorOptions::default()).unwrap();
    let rep = check_convergence(&spec, &target.state, &target.state, &StepConfig::new(0.1, 2.0, 1), 1e-6).unwrap();
    assert!(rep.pass);
    assert!(rep.series.iter().all(|d| *d <= 1e-12));
}

#[test]
fn failing_check_reports_its_worst_violation() {
    let spec = motor(32);
    let u0 = spec.initial_state().unwrap();
    let target = stationary_target(&spec, &u0, &NullVectorOptions::default()).unwrap();
    let rep = check_convergence(&spec, &u0, &target.state, &StepConfig::new(0.1, 0.2, 1), 1e-12).unwrap();
    assert!(!rep.pass);
    assert!(rep.worst > rep.tolerance);
    assert_eq!(rep.argmax_time, Some(0.2));
    let line = rep.to_ndjson();
    for key in ["\"name\"", "\"pass\"", "\"worst\"", "\"argmax_time\"", "\"series\""] {
        assert!(line.contains(key), "{line}");
    }
}

#[test]
fn registry_runs_checks_by_name() {
    let reg = CheckRegistry::builtin();
    assert_eq!(reg.names(), vec!["comparison", "contraction", "convergence", "oracle"]);
    let ctx = CheckContext::new(random_linear(43, 2, 8), StepConfig::new(0.1, 30.0, 10));
    for name in reg.names() {
        let rep = reg.run(name, &ctx).unwrap();
        assert!(rep.pass, "{name}: {}", rep.to_ndjson());
    }
    assert!(matches!(reg.run("nope", &ctx), Err(Error::UnknownStrategy { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_signed_distance_is_the_mass_gap(seed in 0u64..10_000) {
        let spec = random_linear(seed, 2, 12);
        let mut r = rng(seed);
        let a = random_state(&spec, &mut r, 0.0, 1.0);
        let bump = random_state(&spec, &mut r, 0.0, 1.0);
        let b = a.with_values(a.values().iter().zip(bump.values()).map(|(x, y)| x + y).collect());
        let d = weighted_l1_distance(&a, &b, &spec).unwrap();
        let gap = weighted_mass(&b, &spec).unwrap() - weighted_mass(&a, &spec).unwrap();
        prop_assert!((d - gap).abs() <= 1e-13 * d.max(1.0));
    }
}
