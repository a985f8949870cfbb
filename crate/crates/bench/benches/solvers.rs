use std::hint::black_box;

use cdcqed::gate::{
    conditional_amplitudes, fidelity_sweep, log_grid, FidelityDefinition, SweepVariable,
};
use cdcqed::pulse::{
    gaussian_pulse, propagate_frequency, propagate_time, settling_window, time_step_for,
};
use cdcqed::spectra::{find_peaks, sweep, DEFAULT_PROMINENCE};
use cdcqed::steady_state::oracle::oracle_solve;
use cdcqed::{case_params, solve_general, CaseId, Complex64, SpinState, SystemParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn steady_state(c: &mut Criterion) {
    let (p, w) = case_params(CaseId::VII, 30.0).unwrap();
    let mut group = c.benchmark_group("steady_state");
    group.bench_function("solve_general", |b| {
        b.iter(|| solve_general(black_box(&p), black_box(w), SpinState::Up))
    });
    group.bench_function("oracle", |b| {
        b.iter(|| oracle_solve(black_box(&p), black_box(w), SpinState::Up))
    });
    group.bench_function("gate_amplitudes", |b| {
        b.iter(|| conditional_amplitudes(black_box(&p), w))
    });
    group.finish();
}

fn spectra(c: &mut Criterion) {
    let p = SystemParams::symmetric(
        1.0,
        20.0,
        Complex64::new(10.0, 0.0),
        Complex64::new(0.0, 0.0),
        0.1,
    )
    .validate()
    .unwrap();
    let mut group = c.benchmark_group("spectrum");
    for n in [801, 8001] {
        group.bench_with_input(BenchmarkId::new("sweep", n), &n, |b, &n| {
            b.iter(|| sweep(&p, SpinState::Up, -40.0, 40.0, n).unwrap())
        });
    }
    let spec = sweep(&p, SpinState::Up, -40.0, 40.0, 8001).unwrap();
    group.bench_function("find_peaks/8001", |b| {
        b.iter(|| find_peaks(black_box(&spec), DEFAULT_PROMINENCE))
    });
    group.finish();
}

fn fidelity(c: &mut Criterion) {
    let grid = log_grid(3.0, 300.0, 61).unwrap();
    c.bench_function("fidelity_sweep/case_I/61", |b| {
        b.iter(|| {
            fidelity_sweep(
                CaseId::I,
                SweepVariable::Kappa1,
                &grid,
                30.0,
                FidelityDefinition::AmplitudeOverlap,
            )
        })
    });
}

fn pulses(c: &mut Criterion) {
    let (p, w) = case_params(CaseId::II, 3.0).unwrap();
    let tau = 10.0 / p.kappa_e();
    let pulse =
        gaussian_pulse(tau, w, settling_window(&p, tau, 10.0, 1e-10).unwrap(), 2048).unwrap();
    let dt = time_step_for(&p, w, pulse.dt(), 0.05);
    let mut group = c.benchmark_group("pulse/2048");
    group.bench_function("frequency", |b| {
        b.iter(|| propagate_frequency(&p, SpinState::Up, black_box(&pulse)))
    });
    group.bench_function("time_rk4", |b| {
        b.iter(|| propagate_time(&p, SpinState::Up, black_box(&pulse), dt))
    });
    group.finish();
}

criterion_group!(benches, steady_state, spectra, fidelity, pulses);
criterion_main!(benches);
