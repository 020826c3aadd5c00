use super::*;
use crate::dgrad::{DiscreteGradientSpec, GradientStrategy};
use crate::model::PotentialModel;
use crate::vecops::{norm_inf, sub};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn system(potential: PotentialModel) -> (HamiltonianSystem, DiscreteGradientSpec) {
    let spec = DiscreteGradientSpec::preferred(potential.clone());
    (HamiltonianSystem::new(potential), spec)
}

fn config(scheme: Scheme, h: f64, spec: &DiscreteGradientSpec, tol: f64) -> SchemeConfig {
    SchemeConfig::new(scheme, h, spec.clone()).with_solver(SolverSettings::with_tol(tol))
}

fn state(x: &[f64], p: &[f64]) -> PhaseState {
    PhaseState::new(x.to_vec(), p.to_vec()).unwrap()
}

fn circular_kepler_state() -> PhaseState {
    let r: f64 = 3.5;
    state(&[r, 0.0, 0.0], &[0.0, (1.0 / r).sqrt(), 0.0])
}

fn distance(a: &PhaseState, b: &PhaseState) -> f64 {
    norm_inf(&sub(&a.to_vec(), &b.to_vec()))
}

#[test]
fn avf_on_harmonic_is_implicit_midpoint() {
    let (sys, spec) = system(PotentialModel::harmonic(1).unwrap());
    let h = 0.1;
    let y1 = avf_step(
        &sys,
        &config(Scheme::Avf, h, &spec, 1e-14),
        &state(&[1.0], &[0.0]),
        h,
        &mut StepCounters::default(),
    )
    .unwrap();
    let q = h * h / 4.0;
    let x1 = (1.0 - q) / (1.0 + q);
    let p1 = -h / (1.0 + q);
    assert!((y1.x[0] - x1).abs() <= 1e-14);
    assert!((y1.p[0] - p1).abs() <= 1e-14);
    assert!((x1 - 0.99501247).abs() < 1e-8);
    assert!((p1 + 0.09975062).abs() < 1e-8);
}

#[test]
fn zero_step_is_identity() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    let y = circular_kepler_state();
    for scheme in Scheme::ALL {
        let mut counters = StepCounters::default();
        let out = step(
            &sys,
            &config(scheme, 0.1, &spec, 1e-14),
            &y,
            0.0,
            &mut counters,
        )
        .unwrap();
        assert_eq!(out, y);
        assert_eq!(counters, StepCounters::default());
    }
}

#[test]
fn one_step_energy_on_kepler() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    let y = circular_kepler_state();
    let h0 = sys.energy(&y).unwrap();
    for scheme in Scheme::ALL {
        let out = step(
            &sys,
            &config(scheme, 0.2, &spec, 1e-14),
            &y,
            0.2,
            &mut StepCounters::default(),
        )
        .unwrap();
        assert!((sys.energy(&out).unwrap() - h0).abs() <= 1e-13, "{scheme}");
    }
}

#[test]
fn locally_exact_schemes_rotate_the_harmonic_oscillator_exactly() {
    let (sys, spec) = system(PotentialModel::harmonic(1).unwrap());
    let h: f64 = 0.1;
    for scheme in [Scheme::Lex, Scheme::Slex] {
        let out = step(
            &sys,
            &config(scheme, h, &spec, 1e-14),
            &state(&[1.0], &[0.0]),
            h,
            &mut StepCounters::default(),
        )
        .unwrap();
        assert!((out.x[0] - h.cos()).abs() <= 1e-12, "{scheme}");
        assert!((out.p[0] + h.sin()).abs() <= 1e-12, "{scheme}");
    }
    assert!((0.1f64.cos() - 0.99500417).abs() < 1e-8);
}

#[test]
fn lex_reduces_to_avf_for_a_free_particle() {
    let (sys, spec) = system(PotentialModel::radial_power(0.0, 2.0, 2).unwrap());
    let y = state(&[1.0, -2.0], &[0.3, 0.7]);
    let a = avf_step(
        &sys,
        &config(Scheme::Avf, 0.3, &spec, 1e-14),
        &y,
        0.3,
        &mut StepCounters::default(),
    )
    .unwrap();
    let l = lex_step(
        &sys,
        &config(Scheme::Lex, 0.3, &spec, 1e-14),
        &y,
        0.3,
        &mut StepCounters::default(),
    )
    .unwrap();
    assert_eq!(a, l);
}

#[test]
fn time_reversal_round_trips() {
    let (sys, spec) = system(PotentialModel::anharmonic(0.5, 0.01, 3).unwrap());
    let tol = 1e-14;
    let y = state(&[3.5, 0.2, -0.1], &[0.1, 2.4, 0.3]);
    for scheme in [Scheme::Avf, Scheme::Slex] {
        for h in [0.05, 0.2] {
            let cfg = config(scheme, h, &spec, tol);
            let fwd = step(&sys, &cfg, &y, h, &mut StepCounters::default()).unwrap();
            let back = step(&sys, &cfg, &fwd, -h, &mut StepCounters::default()).unwrap();
            assert!(
                distance(&back, &y) <= 10.0 * tol * (1.0 + norm_inf(&y.to_vec())),
                "{scheme} h={h}"
            );
        }
    }
    // LEX anchors the modifier at the start of the step, so it is not symmetric
    let cfg = config(Scheme::Lex, 0.2, &spec, tol);
    let fwd = step(&sys, &cfg, &y, 0.2, &mut StepCounters::default()).unwrap();
    let back = step(&sys, &cfg, &fwd, -0.2, &mut StepCounters::default()).unwrap();
    assert!(distance(&back, &y) > 1e-9);
}

#[test]
fn general_form_matches_separable_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let potentials = [
        PotentialModel::kepler(1.0, 3).unwrap(),
        PotentialModel::anharmonic(0.5, 0.01, 3).unwrap(),
    ];
    for pot in potentials {
        let (sys, spec) = system(pot);
        for _ in 0..10 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(1.0..3.0)).collect();
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let y = state(&x, &p);
            for scheme in [Scheme::Lex, Scheme::Slex] {
                let sep = config(scheme, 0.1, &spec, 1e-14);
                let gen = sep.clone().with_form(SchemeForm::General);
                let a = step(&sys, &sep, &y, 0.1, &mut StepCounters::default()).unwrap();
                let b = step(&sys, &gen, &y, 0.1, &mut StepCounters::default()).unwrap();
                // Both are independent solves converged to tol (1 + |y|_inf).
                let bound =
                    10.0 * 1e-14 * (1.0 + a.to_vec().iter().fold(0.0f64, |m, v| m.max(v.abs())));
                assert!(distance(&a, &b) <= bound, "{scheme}: {}", distance(&a, &b));
            }
        }
    }
}

#[test]
fn trajectory_with_no_steps() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    let y = circular_kepler_state();
    let traj =
        integrate_trajectory(&sys, &config(Scheme::Avf, 0.1, &spec, 1e-14), &y, 0.0).unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(traj.states[0], y);
    assert_eq!(traj.times, vec![0.0]);
}

#[test]
fn trajectory_rejects_fractional_step_counts() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    let err = integrate_trajectory(
        &sys,
        &config(Scheme::Avf, 0.3, &spec, 1e-14),
        &circular_kepler_state(),
        1.0,
    )
    .unwrap_err();
    assert!(matches!(err, Error::InvalidParameter(_)));
}

#[test]
fn avf_kepler_long_run_conserves_energy() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    let traj = integrate_trajectory(
        &sys,
        &config(Scheme::Avf, 0.05, &spec, 1e-14),
        &circular_kepler_state(),
        100.0,
    )
    .unwrap();
    assert_eq!(traj.len(), 2001);
    assert!((traj.final_time() - 100.0).abs() < 1e-12);
    assert!(
        traj.max_energy_drift() <= 1e-10,
        "drift {}",
        traj.max_energy_drift()
    );
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn general_form_conserves_energy() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    for scheme in [Scheme::Lex, Scheme::Slex] {
        let cfg = config(scheme, 0.2, &spec, 1e-14).with_form(SchemeForm::General);
        let traj = integrate_trajectory(&sys, &cfg, &circular_kepler_state(), 40.0).unwrap();
        assert!(
            traj.max_energy_drift() <= 1e-12,
            "{scheme}: {}",
            traj.max_energy_drift()
        );
    }
}

#[test]
fn counters_for_closed_form_avf() {
    let (sys, spec) = system(PotentialModel::kepler(1.0, 3).unwrap());
    let mut counters = StepCounters::default();
    avf_step(
        &sys,
        &config(Scheme::Avf, 0.2, &spec, 1e-14),
        &circular_kepler_state(),
        0.2,
        &mut counters,
    )
    .unwrap();
    // one discrete-gradient expression per solver iteration, plus the predictor
    assert!(counters.solver_iterations >= 2);
    assert_eq!(counters.gradient_evals, counters.solver_iterations + 1);
    assert_eq!(counters.hessian_evals, 0);
    assert_eq!(counters.matrix_function_builds, 0);

    let mut counters = StepCounters::default();
    lex_step(
        &sys,
        &config(Scheme::Lex, 0.2, &spec, 1e-14),
        &circular_kepler_state(),
        0.2,
        &mut counters,
    )
    .unwrap();
    assert_eq!(counters.hessian_evals, 1);
    assert_eq!(counters.matrix_function_builds, 1);
    assert_eq!(counters.gradient_evals, counters.solver_iterations + 1);

    let mut counters = StepCounters::default();
    slex_step(
        &sys,
        &config(Scheme::Slex, 0.2, &spec, 1e-14),
        &circular_kepler_state(),
        0.2,
        &mut counters,
    )
    .unwrap();
    assert_eq!(counters.hessian_evals, counters.solver_iterations);
    assert_eq!(counters.matrix_function_builds, counters.solver_iterations);

    // quadrature strategies pay one gradient per node
    let gl = DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(8), sys.potential().clone())
        .unwrap();
    let mut counters = StepCounters::default();
    avf_step(
        &sys,
        &config(Scheme::Avf, 0.2, &gl, 1e-14),
        &circular_kepler_state(),
        0.2,
        &mut counters,
    )
    .unwrap();
    assert_eq!(counters.gradient_evals, 8 * counters.solver_iterations + 1);
}

#[test]
fn step_failures_carry_the_step_index() {
    let (sys, spec) = system(PotentialModel::harmonic(1).unwrap());
    // (h/2)^2 = (pi/2)^2 hits the tan pole
    let h = std::f64::consts::PI;
    let err = integrate_trajectory(
        &sys,
        &config(Scheme::Lex, h, &spec, 1e-14),
        &state(&[1.0], &[0.0]),
        2.0 * h,
    )
    .unwrap_err();
    match err {
        Error::StepFailed { step, source } => {
            assert_eq!(step, 0);
            assert!(matches!(*source, Error::PoleProximity { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn scheme_names_round_trip() {
    for s in Scheme::ALL {
        assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
    }
    assert_eq!("AVF-SLEX".parse::<Scheme>().unwrap(), Scheme::Slex);
    assert!("rk4".parse::<Scheme>().is_err());
}
