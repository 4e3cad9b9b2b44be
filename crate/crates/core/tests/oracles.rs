//! Collocation against the independent Hamiltonian-shooting route.

use thinfilm::shooting::shoot_solution;
use thinfilm::steady::{local_expansion, SteadySolver};

fn collocation_at_amplitude(a: f64) -> thinfilm::steady::SteadyState {
    let mut solver = SteadySolver::new(1.0, 1.0, 64);
    let (mut guess, mut m) = local_expansion(1.0, 1.0, 0.05, 64);
    // walk out in amplitude so each Newton solve starts close
    let steps = (a / 0.05).ceil() as usize;
    let mut state = None;
    for i in 1..=steps {
        let amp = a * i as f64 / steps as f64;
        let s = solver.solve_at_amplitude(amp, &guess, m).unwrap();
        guess = s.profile.clone();
        m = s.marangoni;
        state = Some(s);
    }
    let mut state = state.unwrap();
    while state.profile.tail_ratio() > 1e-12 && solver.modes() < 512 {
        solver.set_modes(2 * solver.modes());
        state = solver.solve_at_amplitude(a, &state.profile, state.marangoni).unwrap();
    }
    state
}

#[test]
fn shooting_matches_collocation_at_fixed_marangoni() {
    let solver = SteadySolver::new(1.0, 1.0, 64);
    let (guess, _) = local_expansion(1.0, 1.0, ((8.0_f64 - 7.9) / (49.0 / 6.0)).sqrt(), 64);
    let colloc = solver.newton_solve(&guess, 7.9).unwrap();
    let shot = shoot_solution(7.9, 1.0, 1.0, colloc.profile.amplitude(), 512).unwrap();
    let dist = colloc.profile.sup_distance(&shot.profile);
    assert!(dist < 1e-6, "L∞ distance {dist:e}");
}

#[test]
fn shooting_matches_collocation_along_the_branch() {
    for a in [0.05, 0.2, 0.5] {
        let colloc = collocation_at_amplitude(a);
        let shot = shoot_solution(colloc.marangoni, 1.0, 1.0, a, 1024).unwrap();
        let dist = colloc.profile.sup_distance(&shot.profile);
        assert!(dist < 1e-6, "a = {a}: L∞ distance {dist:e}");
        let dk = (colloc.profile.amplitude() - shot.profile.amplitude()).abs();
        assert!(dk < 1e-6);
    }
}
