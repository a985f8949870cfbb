use cdcqed::gate::{
    conditional_amplitudes, conditional_amplitudes_pulse, fidelity, FidelityDefinition,
};
use cdcqed::pulse::{
    gaussian_pulse, propagate_frequency, propagate_time, settling_window, time_step_for,
};
use cdcqed::{case_params, CaseId, Complex64, SpinState, SystemParams, ValidatedParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut ChaCha8Rng) -> ValidatedParams {
    let cplx = |rng: &mut ChaCha8Rng, r: f64| {
        Complex64::from_polar(
            rng.gen_range(0.0..r),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    SystemParams {
        omega_e: rng.gen_range(-1.0..1.0),
        omega_o: rng.gen_range(-1.0..1.0),
        omega_a: rng.gen_range(-1.0..1.0),
        kappa_e0: rng.gen_range(0.0..0.3),
        kappa_o0: rng.gen_range(0.0..0.3),
        kappa_e1: rng.gen_range(0.5..2.0),
        kappa_o1: rng.gen_range(0.5..2.0),
        g_e: cplx(rng, 2.0),
        g_o: cplx(rng, 2.0),
        gamma_s: 0.0,
        gamma_p: rng.gen_range(0.2..1.0),
    }
    .validate()
    .unwrap()
}

#[test]
fn frequency_and_time_domain_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let spin = if rng.gen_bool(0.5) {
            SpinState::Up
        } else {
            SpinState::Down
        };
        let tau = 10.0 / p.kappa_e();
        let window = settling_window(&p, tau, 10.0, 1e-10).unwrap();
        let pulse = gaussian_pulse(tau, 0.0, window, 2048).unwrap();
        let dt = time_step_for(&p, 0.0, pulse.dt(), 0.02);
        let f = propagate_frequency(&p, spin, &pulse).unwrap();
        let t = propagate_time(&p, spin, &pulse, dt).unwrap();
        worst = worst.max(t.relative_l2(&f));
    }
    assert!(worst < 1e-6, "worst relative L2 {worst:e}");
}

#[test]
fn time_domain_energy_ledger_closes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let p = random_params(&mut rng);
        let tau = 10.0 / p.kappa_e();
        let pulse = gaussian_pulse(
            tau,
            0.0,
            settling_window(&p, tau, 10.0, 1e-10).unwrap(),
            2048,
        )
        .unwrap();
        let dt = time_step_for(&p, 0.0, pulse.dt(), 0.02);
        let out = propagate_time(&p, SpinState::Up, &pulse, dt).unwrap();
        let ledger = pulse.energy() - out.norm_t - out.norm_r - out.dissipated - out.stored;
        assert!(ledger.abs() < 1e-6, "{ledger:e}");
        let spectral = propagate_frequency(&p, SpinState::Up, &pulse).unwrap();
        let ledger = 1.0 - spectral.norm_t - spectral.norm_r - spectral.dissipated;
        assert!(ledger.abs() < 1e-10, "{ledger:e}");
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let (p, omega_l) = case_params(CaseId::II, 3.0).unwrap();
    let tau = 10.0 / p.kappa_e();
    let pulse = gaussian_pulse(
        tau,
        omega_l,
        settling_window(&p, tau, 10.0, 1e-12).unwrap(),
        1024,
    )
    .unwrap();
    let reference = propagate_frequency(&p, SpinState::Up, &pulse).unwrap();
    let coarse = time_step_for(&p, omega_l, pulse.dt(), 0.1);
    let e1 = propagate_time(&p, SpinState::Up, &pulse, coarse)
        .unwrap()
        .relative_l2(&reference);
    let e2 = propagate_time(&p, SpinState::Up, &pulse, coarse / 2.0)
        .unwrap()
        .relative_l2(&reference);
    let ratio = e1 / e2;
    assert!(
        (14.0..18.0).contains(&ratio),
        "e1 = {e1:e}, e2 = {e2:e}, ratio = {ratio}"
    );
}

#[test]
fn propagation_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_params(&mut rng);
    let tau = 10.0 / p.kappa_e();
    let pulse = gaussian_pulse(
        tau,
        0.0,
        settling_window(&p, tau, 10.0, 1e-10).unwrap(),
        1024,
    )
    .unwrap();
    let alpha = Complex64::new(-0.4, 1.7);
    let scaled = pulse.scaled(alpha);
    let dt = time_step_for(&p, 0.0, pulse.dt(), 0.05);
    for (a, b) in [
        (
            propagate_frequency(&p, SpinState::Up, &pulse).unwrap(),
            propagate_frequency(&p, SpinState::Up, &scaled).unwrap(),
        ),
        (
            propagate_time(&p, SpinState::Up, &pulse, dt).unwrap(),
            propagate_time(&p, SpinState::Up, &scaled, dt).unwrap(),
        ),
    ] {
        for (x, y) in a
            .transmitted
            .iter()
            .zip(&b.transmitted)
            .chain(a.reflected.iter().zip(&b.reflected))
        {
            assert!((x * alpha - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }
}

#[test]
fn narrowband_reflection_matches_spectrum() {
    // single-mode coupling: γ = κ0/10, κ1 = 20κ0, g = 10κ0, g_o = 0
    let p = SystemParams::symmetric(
        1.0,
        20.0,
        Complex64::new(10.0, 0.0),
        Complex64::new(0.0, 0.0),
        0.1,
    )
    .validate()
    .unwrap();
    let tau = 200.0;
    let pulse = gaussian_pulse(
        tau,
        0.0,
        settling_window(&p, tau, 10.0, 1e-10).unwrap(),
        8192,
    )
    .unwrap();
    let out = propagate_frequency(&p, SpinState::Up, &pulse).unwrap();
    assert!((out.norm_r - 0.870).abs() < 5e-3, "{}", out.norm_r);
}

#[test]
fn pulse_averaged_fidelity_converges_to_monochromatic() {
    let (p, omega_l) = case_params(CaseId::I, 30.0).unwrap();
    let mono = fidelity(
        &conditional_amplitudes(&p, omega_l).unwrap(),
        FidelityDefinition::AmplitudeOverlap,
    );
    let mut errors = Vec::new();
    for tk in [10.0, 100.0, 1000.0] {
        let tau = tk / p.kappa_e();
        let pulse = gaussian_pulse(tau, omega_l, (-10.0 * tau, 10.0 * tau), 4096).unwrap();
        let amps = conditional_amplitudes_pulse(&p, &pulse).unwrap();
        errors.push((fidelity(&amps, FidelityDefinition::AmplitudeOverlap) - mono).abs());
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[2] < 1e-5, "{errors:?}");
}
