//! Time-dependent checks: steady states as fixed points, blow-up indicator,
//! and the order of the long-wave approximation.

use std::f64::consts::PI;
use thinfilm::evolution::{amplitude_residual, blowup_indicator, Sivashinsky, ThinFilm};
use thinfilm::steady::{local_expansion, SteadySolver};

#[test]
fn branch_profile_is_a_fixed_point() {
    let solver = SteadySolver::new(1.0, 1.0, 64);
    let (guess, m) = local_expansion(1.0, 1.0, 0.2, 64);
    let st = solver.solve_at_amplitude(0.2, &guess, m).unwrap();
    let tf = ThinFilm::new(1.0, st.marangoni, 2.0 * PI, 256).unwrap();
    let h0: Vec<f64> = tf.grid().points().iter().map(|&x| 1.0 + st.profile.eval(x)).collect();
    let end = tf.advance(&tf.state(h0.clone()), 1.0, 1e-3).unwrap();
    let change = end.h.iter().zip(&h0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(change < 1e-5, "{change:e}");
}

#[test]
fn long_run_mass_drift() {
    let tf = ThinFilm::new(1.0, 8.5, 2.0 * PI, 256).unwrap();
    let h: Vec<f64> = tf.grid().points().iter().map(|&x| 1.0 + 0.2 * x.cos()).collect();
    let mut s = tf.state(h);
    let m0 = s.mass;
    for _ in 0..10_000 {
        s = tf.step(&s, 1e-3).unwrap();
    }
    assert!(((s.mass - m0) / m0).abs() < 1e-8);
}

#[test]
fn unstable_film_hits_height_floor() {
    let mut tf = ThinFilm::new(1.0, 12.0, 2.0 * PI, 128).unwrap();
    tf.control.h_floor = 0.3;
    let h: Vec<f64> = tf.grid().points().iter().map(|&x| 1.0 + 0.3 * x.cos()).collect();
    match tf.advance(&tf.state(h), 200.0, 1e-2) {
        Err(thinfilm::Error::HeightFloor { min_height, .. }) => assert!(min_height <= 0.3),
        other => panic!("expected the height floor, got {other:?}"),
    }
}

fn indicator_run(v0: impl Fn(f64) -> f64, t_end: f64, dt: f64) -> (Vec<f64>, bool) {
    let eq = Sivashinsky::new(1.0, 2.0 * PI, 128);
    let mut v: Vec<f64> = eq.grid().points().iter().map(|&x| v0(x)).collect();
    let mut curv = vec![eq.curvature(&v)];
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        let (next, overflow) = eq.step(&v, dt);
        v = next;
        curv.push(eq.curvature(&v));
        if overflow {
            return (blowup_indicator(&curv, dt), true);
        }
    }
    (blowup_indicator(&curv, dt), false)
}

#[test]
fn indicator_bounded_for_decaying_data() {
    let dt = 1e-3;
    let (ind, overflow) = indicator_run(|x| 0.1 * (2.0 * x).cos(), 10.0, dt);
    assert!(!overflow);
    let at1 = ind[(1.0 / dt) as usize];
    assert!(*ind.last().unwrap() < 10.0 * at1);
    assert!(ind.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn indicator_grows_superlinearly_before_overflow() {
    // mean 2 shifts the linear symbol to -l⁴ + 5l², so modes 1 and 2 grow
    let dt = 1e-4;
    let (ind, overflow) = indicator_run(|x| 2.0 + 0.1 * x.cos(), 20.0, dt);
    assert!(overflow);
    let n = ind.len() - 1;
    // increments over successive quarters of the run keep increasing
    let q: Vec<f64> = (0..=4).map(|i| ind[i * n / 4]).collect();
    let inc: Vec<f64> = q.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(inc.windows(2).all(|w| w[1] > w[0]), "{inc:?}");
}

#[test]
fn long_wave_residual_is_higher_order() {
    let length = 4.0 * PI;
    let eq = Sivashinsky::new(1.0, length, 256);
    let v: Vec<f64> = eq.grid().points().iter().map(|&x| 0.8 * (0.5 * x).cos() + 0.3 * x.sin()).collect();
    let eps = [0.2, 0.1, 0.05];
    let ratios: Vec<f64> = eps
        .iter()
        .map(|&e| amplitude_residual(e, 1.0, &v, length).unwrap() / (0.5 * e).powi(6))
        .collect();
    let slope = (ratios[0] / ratios[2]).ln() / (eps[0] / eps[2]).ln();
    assert!(slope >= 1.5, "{ratios:?} slope {slope}");
}
