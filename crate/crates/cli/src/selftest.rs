//! Built-in consistency checks on seeded random parameter draws.

use std::fmt;
use std::time::Instant;

use cdcqed::steady_state::oracle::oracle_solve;
use cdcqed::steady_state::{
    flux_balance, solve_with_convention, transmission_closed_form, OutputConvention,
};
use cdcqed::{Complex64, SpinState, SystemParams, ValidatedParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DRAWS: usize = 2000;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub draws: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub millis: u128,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<20} draws={:<5} worst={:.3e} tol={:.0e} seed={} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.draws,
            self.worst,
            self.tolerance,
            self.seed,
            self.millis
        )
    }
}

fn spin(rng: &mut ChaCha8Rng) -> SpinState {
    if rng.gen_bool(0.5) {
        SpinState::Up
    } else {
        SpinState::Down
    }
}

/// Arbitrary parameters, including non-degenerate and asymmetric cavities.
pub fn general_draw(rng: &mut ChaCha8Rng) -> ValidatedParams {
    let mut cplx = |r: f64| {
        Complex64::from_polar(
            rng.gen_range(0.0..r),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let (g_e, g_o) = (cplx(40.0), cplx(40.0));
    SystemParams {
        omega_e: rng.gen_range(-10.0..10.0),
        omega_o: rng.gen_range(-10.0..10.0),
        omega_a: rng.gen_range(-10.0..10.0),
        kappa_e0: rng.gen_range(0.0..2.0),
        kappa_o0: rng.gen_range(0.0..2.0),
        kappa_e1: rng.gen_range(0.01..40.0),
        kappa_o1: rng.gen_range(0.01..40.0),
        g_e,
        g_o,
        gamma_s: rng.gen_range(0.0..0.01),
        gamma_p: rng.gen_range(0.01..3.0),
    }
    .validate()
    .expect("draw ranges are valid")
}

/// Degenerate symmetric cavity on the gate branch g_o = −i g_e.
/// Returns the parameters, drive frequency and |g_e|.
pub fn symmetric_draw(rng: &mut ChaCha8Rng) -> (ValidatedParams, f64, f64) {
    let g = rng.gen_range(0.0..60.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let (g_e, g_o) = SystemParams::gate_couplings(Complex64::from_polar(g, phase));
    let mut raw = SystemParams::symmetric(
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.1..60.0),
        g_e,
        g_o,
        rng.gen_range(0.01..3.0),
    );
    raw.omega_a = rng.gen_range(-10.0..10.0);
    let omega_l = rng.gen_range(-20.0..20.0);
    (raw.validate().expect("draw ranges are valid"), omega_l, g)
}

fn timed(
    name: &'static str,
    seed: u64,
    tolerance: f64,
    f: impl FnOnce() -> (usize, f64),
) -> CheckResult {
    let start = Instant::now();
    let (draws, worst) = f();
    CheckResult {
        name,
        passed: worst < tolerance,
        draws,
        worst,
        tolerance,
        seed,
        millis: start.elapsed().as_millis(),
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run all checks. `convention` selects the port output relations used by
/// the solver under test; anything but `Standard` should fail.
pub fn run_checks(seed: u64, convention: OutputConvention) -> Vec<CheckResult> {
    let solve =
        |p: &ValidatedParams, w: f64, s: SpinState| solve_with_convention(p, w, s, convention);
    let failed = f64::INFINITY;
    vec![
        timed("oracle-equivalence", seed, 1e-12, || {
            let mut rng = rng_for(seed, 1);
            let mut worst: f64 = 0.0;
            for _ in 0..DRAWS {
                let p = general_draw(&mut rng);
                let (w, s) = (rng.gen_range(-30.0..30.0), spin(&mut rng));
                let err = match (solve(&p, w, s), oracle_solve(&p, w, s)) {
                    (Ok(a), Ok(b)) => [
                        (a.c_e, b.c_e),
                        (a.c_o, b.c_o),
                        (a.sigma, b.sigma),
                        (a.t, b.t),
                        (a.r, b.r),
                    ]
                    .iter()
                    .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
                    .fold(0.0, f64::max),
                    _ => failed,
                };
                worst = worst.max(err);
            }
            (DRAWS, worst)
        }),
        timed("closed-form", seed, 1e-12, || {
            let mut rng = rng_for(seed, 2);
            let mut worst: f64 = 0.0;
            for _ in 0..DRAWS {
                let (p, w, g) = symmetric_draw(&mut rng);
                let s = spin(&mut rng);
                let d = p.detunings(w);
                let raw = p.raw();
                let err = match (
                    solve(&p, w, s),
                    transmission_closed_form(
                        raw.kappa_e0,
                        raw.kappa_e1,
                        g,
                        p.gamma(),
                        d.delta,
                        d.emitter_cavity,
                        s,
                    ),
                ) {
                    (Ok(a), Ok(cf)) => (a.t - cf.t).norm(),
                    _ => failed,
                };
                worst = worst.max(err);
            }
            (DRAWS, worst)
        }),
        timed("reflection-nullity", seed, 1e-12, || {
            let mut rng = rng_for(seed, 3);
            let mut worst: f64 = 0.0;
            for _ in 0..DRAWS {
                let (p, w, _) = symmetric_draw(&mut rng);
                let s = spin(&mut rng);
                worst = worst.max(solve(&p, w, s).map_or(failed, |a| a.r.norm()));
            }
            (DRAWS, worst)
        }),
        timed("flux-balance", seed, 1e-10, || {
            let mut rng = rng_for(seed, 4);
            let mut worst: f64 = 0.0;
            for _ in 0..DRAWS {
                let p = general_draw(&mut rng);
                let (w, s) = (rng.gen_range(-30.0..30.0), spin(&mut rng));
                worst = worst
                    .max(solve(&p, w, s).map_or(failed, |a| flux_balance(&a, &p).residual.abs()));
            }
            (DRAWS, worst)
        }),
        timed("lossless-unitarity", seed, 1e-10, || {
            let mut rng = rng_for(seed, 5);
            let mut worst: f64 = 0.0;
            for _ in 0..DRAWS {
                let p = general_draw(&mut rng)
                    .map(|raw| SystemParams {
                        kappa_e0: 0.0,
                        kappa_o0: 0.0,
                        gamma_s: 0.0,
                        gamma_p: 0.0,
                        ..raw
                    })
                    .expect("zero loss is valid");
                let (w, s) = (rng.gen_range(-30.0..30.0), spin(&mut rng));
                let err = solve(&p, w, s).map_or(failed, |a| {
                    (a.transmittance() + a.reflectance() - 1.0).abs()
                });
                worst = worst.max(err);
            }
            (DRAWS, worst)
        }),
    ]
}
