use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use thinfilm::continuation::BranchPoint;
use thinfilm::model::mass_constant_batch;
use thinfilm::phase::{energy_interval, period_sweep};
use thinfilm::stability::{bloch_sweep, fill_leading_eigenvalues};
use thinfilm::steady::{local_expansion, SteadySolver};
use thinfilm::{Exec, HamiltonianParams, PeriodicProfile};

fn paths() -> Vec<Exec> {
    if Exec::available() {
        vec![Exec::Sequential, Exec::Parallel]
    } else {
        vec![Exec::Sequential]
    }
}

fn random_profiles(n: usize) -> Vec<PeriodicProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..n)
        .map(|_| {
            let c: Vec<f64> = (0..8).map(|m| rng.gen_range(-0.3..0.3) / (1 + m) as f64).collect();
            PeriodicProfile::new(1.0, c)
        })
        .filter(|v| v.min_height() > 0.05)
        .collect()
}

fn branch_points(n: usize) -> Vec<BranchPoint> {
    let solver = SteadySolver::new(1.0, 1.0, 32);
    (1..=n)
        .map(|i| {
            let a = 0.05 * i as f64;
            let (guess, m) = local_expansion(1.0, 1.0, a, 32);
            let st = solver.solve_at_amplitude(a, &guess, m).unwrap();
            BranchPoint::new(a, st.profile, st.marangoni, 1.0, st.residual).unwrap()
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let profiles = random_profiles(256);
    let p = HamiltonianParams::flat(1.0, 8.0);
    let w = energy_interval(&p).unwrap();
    let energies: Vec<f64> = (1..=200).map(|i| w.e_min + (w.e_max - w.e_min) * i as f64 / 201.0).collect();
    let points = branch_points(6);

    let mut g = c.benchmark_group("parallel_vs_sequential");
    g.sample_size(10);
    for exec in paths() {
        let name = format!("{exec:?}");
        g.bench_with_input(BenchmarkId::new("mass_constant_batch", &name), &exec, |b, &e| {
            b.iter(|| black_box(mass_constant_batch(e, &profiles)))
        });
        g.bench_with_input(BenchmarkId::new("period_sweep", &name), &exec, |b, &e| {
            b.iter(|| black_box(period_sweep(e, &energies, &p)))
        });
        g.bench_with_input(BenchmarkId::new("leading_eigenvalues", &name), &exec, |b, &e| {
            b.iter(|| {
                let mut pts = points.clone();
                fill_leading_eigenvalues(e, &mut pts, 1.0);
                black_box(pts)
            })
        });
        g.bench_with_input(BenchmarkId::new("bloch_sweep", &name), &exec, |b, &e| {
            b.iter(|| black_box(bloch_sweep(e, &points[2], 1.0, 8, 4)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
