use super::*;
use crate::presets::{example_one, example_one_initial, DISPLAY_TIMESCALES};
use crate::vectorfield::{equilibrium_state, EquilibriumLabel, Orientation, Timescales};

fn ex1() -> FieldParams {
    example_one(Orientation::Eigenvalue, DISPLAY_TIMESCALES)
}

fn unit() -> FieldParams {
    example_one(Orientation::Eigenvalue, Timescales::default())
}

#[test]
fn equilibrium_stays_put() {
    let p = ex1();
    for label in [EquilibriumLabel::Origin, EquilibriumLabel::Super(1), EquilibriumLabel::Sub(2, 3)] {
        let s = equilibrium_state(&p, label);
        let tr = integrate(&s, &p, &IntegratorConfig::default().with_t_end(50.0)).unwrap();
        assert!(tr.is_completed());
        assert_eq!(tr.states.len(), 501);
        for x in &tr.states {
            assert_eq!(x.values(), s.values(), "{label}");
        }
    }
}

#[test]
fn exact_zeros_stay_exact() {
    let p = ex1();
    let mut s = example_one_initial(&p);
    s.set(Coord::Sub(2, 3), 0.0);
    s.set(Coord::Sub(0, 1), 0.0);
    s.set(Coord::Super(2), 0.0);
    let tr = integrate(&s, &p, &IntegratorConfig::default().with_t_end(100.0)).unwrap();
    assert!(tr.is_completed());
    for x in &tr.states {
        for c in [Coord::Sub(2, 3), Coord::Sub(0, 1), Coord::Super(2)] {
            assert_eq!(x.get(c).to_bits(), 0.0f64.to_bits());
        }
    }
}

#[test]
fn zero_horizon_returns_the_initial_state() {
    let p = ex1();
    let s = example_one_initial(&p);
    let tr = integrate(&s, &p, &IntegratorConfig::default().with_t_end(0.0)).unwrap();
    assert_eq!(tr.times, vec![0.0]);
    assert_eq!(tr.states, vec![s]);
}

#[test]
fn sampling_queries() {
    let p = ex1();
    let s = example_one_initial(&p);
    let tr = integrate(&s, &p, &IntegratorConfig::default().with_t_end(10.0)).unwrap();
    assert_eq!(tr.times.len(), 101);
    assert_eq!(sample_at(&tr, 0.0).unwrap(), s);
    assert_eq!(sample_at(&tr, tr.times[37]).unwrap(), tr.states[37]);
    let mid = sample_at(&tr, 0.5 * (tr.times[10] + tr.times[11])).unwrap();
    for k in 0..s.dim() {
        let want = 0.5 * (tr.states[10].values()[k] + tr.states[11].values()[k]);
        assert!((mid.values()[k] - want).abs() <= 1e-15 * want.abs().max(1e-300));
    }
    assert!(matches!(sample_at(&tr, 10.5), Err(IntegrationError::OutOfRange { .. })));
    assert!(matches!(sample_at(&tr, -0.1), Err(IntegrationError::OutOfRange { .. })));
}

#[test]
fn rejects_bad_inputs() {
    let p = ex1();
    let mut s = example_one_initial(&p);
    let bad = IntegratorConfig { rtol: 0.0, ..IntegratorConfig::default() };
    assert!(matches!(integrate(&s, &p, &bad), Err(IntegrationError::InvalidConfig { what: "rtol", .. })));
    let bad = IntegratorConfig { sample_dt: -1.0, ..IntegratorConfig::default() };
    assert!(integrate(&s, &p, &bad).is_err());
    s.set(Coord::Super(0), -0.1);
    assert!(matches!(
        integrate(&s, &p, &IntegratorConfig::default()),
        Err(IntegrationError::InvalidInitialState(_))
    ));
}

fn witness_start(p: &FieldParams, eta: f64) -> HierState {
    let mut s = HierState::zeros(p.layout().clone());
    s.set(Coord::Super(0), 1.0 - eta);
    s.set(Coord::Super(1), eta);
    s.set(Coord::Sub(0, 0), 1.0);
    s.set(Coord::Sub(1, 0), eta);
    s
}

#[test]
fn backward_witness_blows_up_in_a_substructure() {
    let p = unit();
    let s = witness_start(&p, 0.005);
    let tr = integrate(&s, &p, &IntegratorConfig::default().with_t_end(200.0).backward()).unwrap();
    match tr.termination {
        Termination::Diverged { time, coordinate: Coord::Sub(..) } => assert!(time < 200.0),
        other => panic!("{other:?}"),
    }
    assert!(matches!(tr.ensure_completed(), Err(IntegrationError::Diverged { .. })));
    assert_eq!(tr.direction, Direction::Backward);
}

#[test]
fn forward_then_backward_returns_home() {
    let p = unit();
    let s = HierState::from_blocks(
        p.layout().clone(),
        &[0.5, 0.3, 0.2],
        &[vec![0.4, 0.3, 0.2], vec![0.1, 0.6, 0.2], vec![0.3, 0.2, 0.4, 0.1]],
    )
    .unwrap();
    let cfg = IntegratorConfig::default().with_t_end(1.0);
    let fwd = integrate(&s, &p, &cfg).unwrap();
    let back = integrate(fwd.last(), &p, &cfg.backward()).unwrap();
    assert!(back.last().sup_distance(&s) <= 1e-6);
}

#[test]
fn charts_agree_early_on() {
    let p = ex1();
    let s = example_one_initial(&p);
    let cfg = IntegratorConfig::default().with_t_end(50.0);
    let a = integrate(&s, &p, &cfg).unwrap();
    // the reference needs relative error control: under atol = 1e-12 the
    // tiny substructure coordinates lose their phase entirely
    let reference = IntegratorConfig { rtol: 1e-13, atol: 1e-300, ..cfg };
    let b = integrate_original_chart(&s, &p, &reference).unwrap();
    assert_eq!(a.times, b.times);
    let worst = a.states.iter().zip(&b.states).map(|(x, y)| x.sup_distance(y)).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn tighter_tolerance_changes_little() {
    let p = ex1();
    let s = example_one_initial(&p);
    let cfg = IntegratorConfig::default().with_t_end(500.0);
    let a = integrate(&s, &p, &cfg).unwrap();
    let b = integrate(&s, &p, &IntegratorConfig { rtol: 5e-13, atol: 5e-13, ..cfg }).unwrap();
    let worst = a.states.iter().zip(&b.states).map(|(x, y)| x.sup_distance(y)).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
    assert!(b.stats.accepted > a.stats.accepted);
}
