//! Single-photon pulse envelopes and their propagation through the
//! cavity, either by filtering each spectral component with the
//! steady-state t(ω), r(ω) or by integrating the linear equations of
//! motion in time.
//!
//! Transform convention: a spectral component at carrier offset ν evolves
//! as e^{−iνt}. On a periodic grid t_n = t_0 + n·dt with N samples,
//!
//! ```text
//! A(ν_k) = dt · Σ_n a(t_n) e^{+iν_k t_n}
//! a(t_n) = 1/(N·dt) · Σ_k A(ν_k) e^{−iν_k t_n}
//! ```
//!
//! so Σ_n |a_n|² dt = Σ_k |A_k|² / (N·dt). Frequencies are stored in FFT
//! order, ν_k = 2πk/(N·dt) for k < N/2 and 2π(k−N)/(N·dt) otherwise.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use libm::erfc;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SpinState, ValidatedParams};
use crate::steady_state::solve_general;

/// Largest tolerated probability mass outside the sampled window, in time
/// or beyond the Nyquist band.
pub const MAX_TAIL_MASS: f64 = 1e-8;
/// Upper bound on dt times the fastest rate of the system.
pub const MAX_STEP_RATE_PRODUCT: f64 = 0.1;

/// Complex envelope in the frame rotating at the carrier.
pub trait PulseShape: Send + Sync + fmt::Debug {
    fn envelope(&self, t: f64) -> Complex64;
}

/// exp(−(t − center)² / (4τ²)); the intensity has standard deviation τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianShape {
    pub tau: f64,
    pub center: f64,
}

impl PulseShape for GaussianShape {
    fn envelope(&self, t: f64) -> Complex64 {
        let x = t - self.center;
        Complex64::new((-x * x / (4.0 * self.tau * self.tau)).exp(), 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct PulseWaveform {
    time: Vec<f64>,
    envelope_t: Vec<Complex64>,
    frequency: Vec<f64>,
    envelope_f: Vec<Complex64>,
    omega_l: f64,
    dt: f64,
    shape: Arc<dyn PulseShape>,
    /// Factor applied to `shape` so that the sampled envelope has unit norm
    /// (times any amplitude applied through [`PulseWaveform::scaled`]).
    amplitude: Complex64,
}

impl PulseWaveform {
    /// Sample `shape` on `n_samples` points of the periodic window
    /// `[t_start, t_end)` and normalize to Σ|a|² dt = 1.
    pub fn from_shape(
        shape: Arc<dyn PulseShape>,
        omega_l: f64,
        t_start: f64,
        t_end: f64,
        n_samples: usize,
    ) -> Result<Self> {
        if n_samples < 2 || !n_samples.is_power_of_two() {
            return Err(Error::InvalidPulse(format!(
                "sample count must be a power of two >= 2, got {n_samples}"
            )));
        }
        if !(t_start < t_end) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "invalid window [{t_start}, {t_end})"
            )));
        }
        let dt = (t_end - t_start) / n_samples as f64;
        let time: Vec<f64> = (0..n_samples).map(|n| t_start + n as f64 * dt).collect();
        let raw: Vec<Complex64> = time.iter().map(|&t| shape.envelope(t)).collect();
        let energy: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>() * dt;
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::InvalidPulse(
                "envelope has zero or non-finite energy".into(),
            ));
        }
        let amplitude = Complex64::new(energy.sqrt().recip(), 0.0);
        Ok(Self::assemble(shape, omega_l, time, dt, amplitude))
    }

    fn assemble(
        shape: Arc<dyn PulseShape>,
        omega_l: f64,
        time: Vec<f64>,
        dt: f64,
        amplitude: Complex64,
    ) -> Self {
        let envelope_t: Vec<Complex64> = time
            .iter()
            .map(|&t| shape.envelope(t) * amplitude)
            .collect();
        let n = time.len();
        let frequency = fft_frequencies(n, dt);
        let envelope_f = to_frequency(&envelope_t, time[0], dt);
        PulseWaveform {
            time,
            envelope_t,
            frequency,
            envelope_f,
            omega_l,
            dt,
            shape,
            amplitude,
        }
    }

    /// The same pulse with its amplitude multiplied by `alpha`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self::assemble(
            Arc::clone(&self.shape),
            self.omega_l,
            self.time.clone(),
            self.dt,
            self.amplitude * alpha,
        )
    }

    /// Envelope at an arbitrary time, from the underlying shape.
    pub fn amplitude_at(&self, t: f64) -> Complex64 {
        self.shape.envelope(t) * self.amplitude
    }

    pub fn time(&self) -> &[f64] {
        &self.time
    }
    pub fn envelope_t(&self) -> &[Complex64] {
        &self.envelope_t
    }
    /// Carrier offsets ν_k in FFT order.
    pub fn frequency(&self) -> &[f64] {
        &self.frequency
    }
    pub fn envelope_f(&self) -> &[Complex64] {
        &self.envelope_f
    }
    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn len(&self) -> usize {
        self.time.len()
    }
    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Σ|a_n|² dt.
    pub fn energy(&self) -> f64 {
        self.envelope_t.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Standard deviation of |A(ν)|² about its mean.
    pub fn spectral_std(&self) -> f64 {
        let w: Vec<f64> = self.envelope_f.iter().map(|a| a.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        let mean: f64 = w
            .iter()
            .zip(&self.frequency)
            .map(|(w, f)| w * f)
            .sum::<f64>()
            / total;
        let var: f64 = w
            .iter()
            .zip(&self.frequency)
            .map(|(w, f)| w * (f - mean).powi(2))
            .sum::<f64>()
            / total;
        var.sqrt()
    }

    /// Normalized spectral weights |A_k|² / Σ|A|².
    pub fn spectral_weights(&self) -> Vec<f64> {
        let w: Vec<f64> = self.envelope_f.iter().map(|a| a.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }
}

/// Gaussian single-photon pulse centered at t = 0, sampled on
/// `[t_span.0, t_span.1)`.
pub fn gaussian_pulse(
    tau: f64,
    omega_l: f64,
    t_span: (f64, f64),
    n_samples: usize,
) -> Result<PulseWaveform> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidPulse(format!(
            "tau must be positive, got {tau}"
        )));
    }
    let (t_start, t_end) = t_span;
    if !(t_start < 0.0 && t_end > 0.0) {
        return Err(Error::InvalidPulse(format!(
            "window [{t_start}, {t_end}) must contain the pulse center 0"
        )));
    }
    let time_tail = 0.5 * erfc(-t_start / (tau * SQRT_2)) + 0.5 * erfc(t_end / (tau * SQRT_2));
    if time_tail > MAX_TAIL_MASS {
        return Err(Error::Truncation {
            what: "time",
            mass: time_tail,
            limit: MAX_TAIL_MASS,
        });
    }
    if n_samples >= 2 {
        let dt = (t_end - t_start) / n_samples as f64;
        let nyquist = PI / dt;
        // |A(ν)|² ∝ exp(−2τ²ν²)
        let spectral_tail = erfc(SQRT_2 * tau * nyquist);
        if spectral_tail > MAX_TAIL_MASS {
            return Err(Error::Truncation {
                what: "spectral",
                mass: spectral_tail,
                limit: MAX_TAIL_MASS,
            });
        }
    }
    PulseWaveform::from_shape(
        Arc::new(GaussianShape { tau, center: 0.0 }),
        omega_l,
        t_start,
        t_end,
        n_samples,
    )
}

/// Window `[−lead·τ, lead·τ + tail)` for a pulse centered at 0, with the
/// tail long enough for the stored amplitude to fall by `settle` after the
/// pulse. Energy decays at least at 2·min(κ_e, κ_o, γ) since the couplings
/// and detunings conserve it.
pub fn settling_window(
    params: &ValidatedParams,
    tau: f64,
    lead: f64,
    settle: f64,
) -> Result<(f64, f64)> {
    let slowest = params.kappa_e().min(params.kappa_o()).min(params.gamma());
    if !(slowest > 0.0) {
        return Err(Error::InvalidPulse(
            "system has an undamped mode; outputs never settle".into(),
        ));
    }
    if !(settle > 0.0 && settle < 1.0) {
        return Err(Error::InvalidPulse(format!(
            "settle fraction must lie in (0, 1), got {settle}"
        )));
    }
    let tail = -settle.ln() / slowest;
    Ok((-lead * tau, lead * tau + tail))
}

/// Largest RK4 step that divides `sample_dt` and keeps dt·max_rate at or
/// below `rate_product`.
pub fn time_step_for(
    params: &ValidatedParams,
    omega_l: f64,
    sample_dt: f64,
    rate_product: f64,
) -> f64 {
    let rate = params.max_rate(omega_l);
    let substeps = (sample_dt * rate / rate_product).ceil().max(1.0);
    sample_dt / substeps
}

pub fn fft_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let dnu = 2.0 * PI / (n as f64 * dt);
    (0..n)
        .map(|k| {
            if k < n / 2 {
                k as f64 * dnu
            } else {
                (k as f64 - n as f64) * dnu
            }
        })
        .collect()
}

/// A(ν_k) = dt · Σ_n a_n e^{+iν_k t_n}.
pub fn to_frequency(samples: &[Complex64], t0: f64, dt: f64) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let nu = fft_frequencies(n, dt);
    buf.iter()
        .zip(&nu)
        .map(|(x, &f)| x * Complex64::from_polar(dt, f * t0))
        .collect()
}

/// a(t_n) = 1/(N·dt) · Σ_k A_k e^{−iν_k t_n}.
pub fn to_time(spectrum: &[Complex64], t0: f64, dt: f64) -> Vec<Complex64> {
    let n = spectrum.len();
    let nu = fft_frequencies(n, dt);
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .zip(&nu)
        .map(|(x, &f)| x * Complex64::from_polar(1.0, -f * t0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64 * dt);
    buf.iter_mut().for_each(|x| *x *= norm);
    buf
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFields {
    pub time: Vec<f64>,
    /// Forward (port 2) output envelope.
    pub transmitted: Vec<Complex64>,
    /// Backward (port 1) output envelope.
    pub reflected: Vec<Complex64>,
    pub norm_t: f64,
    pub norm_r: f64,
    /// Energy absorbed by cavity loss and emitter decay.
    pub dissipated: f64,
    /// Energy still stored in the system at the end of the window (time
    /// domain only; zero for spectral filtering).
    pub stored: f64,
}

impl OutputFields {
    /// Relative L2 distance of the stacked (transmitted, reflected) fields.
    pub fn relative_l2(&self, reference: &OutputFields) -> f64 {
        let mut diff = 0.0;
        let mut norm = 0.0;
        for (a, b) in self
            .transmitted
            .iter()
            .zip(&reference.transmitted)
            .chain(self.reflected.iter().zip(&reference.reflected))
        {
            diff += (a - b).norm_sqr();
            norm += b.norm_sqr();
        }
        if norm == 0.0 {
            diff.sqrt()
        } else {
            (diff / norm).sqrt()
        }
    }
}

fn energy(samples: &[Complex64], dt: f64) -> f64 {
    samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * dt
}

/// Scatter each spectral component with the steady-state t, r at its own
/// frequency and transform back.
pub fn propagate_frequency(
    params: &ValidatedParams,
    spin: SpinState,
    pulse: &PulseWaveform,
) -> Result<OutputFields> {
    let states = pulse
        .frequency()
        .par_iter()
        .map(|&nu| solve_general(params, pulse.omega_l() + nu, spin))
        .collect::<Result<Vec<_>>>()?;
    let spec = pulse.envelope_f();
    let t_spec: Vec<Complex64> = spec.iter().zip(&states).map(|(a, s)| a * s.t).collect();
    let r_spec: Vec<Complex64> = spec.iter().zip(&states).map(|(a, s)| a * s.r).collect();
    let n = pulse.len() as f64;
    let dissipated = spec
        .iter()
        .zip(&states)
        .map(|(a, s)| a.norm_sqr() * s.total_loss())
        .sum::<f64>()
        / (n * pulse.dt());
    let t0 = pulse.time()[0];
    let transmitted = to_time(&t_spec, t0, pulse.dt());
    let reflected = to_time(&r_spec, t0, pulse.dt());
    Ok(OutputFields {
        time: pulse.time().to_vec(),
        norm_t: energy(&transmitted, pulse.dt()),
        norm_r: energy(&reflected, pulse.dt()),
        transmitted,
        reflected,
        dissipated,
        stored: 0.0,
    })
}

/// Linear equations of motion in the frame rotating at the carrier, with
/// the emitter linearized (σ_z = −1).
struct Dynamics {
    a: Complex64,
    b: Complex64,
    d: Complex64,
    p: Complex64,
    q: Complex64,
    u: Complex64,
    v: Complex64,
    x: Complex64,
    y: Complex64,
}

impl Dynamics {
    fn new(params: &ValidatedParams, omega_l: f64, spin: SpinState) -> Self {
        let raw = params.raw();
        let det = params.detunings(omega_l);
        let i = Complex64::i();
        let (g_e, g_o) = match spin {
            SpinState::Up => (raw.g_e, raw.g_o),
            SpinState::Down => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        };
        Dynamics {
            a: Complex64::new(params.kappa_e(), det.delta_el),
            b: Complex64::new(params.kappa_o(), det.delta_ol),
            d: Complex64::new(params.gamma(), det.delta_al),
            p: i * g_e,
            q: i * g_o,
            u: i * g_e.conj(),
            v: i * g_o.conj(),
            x: i * raw.kappa_e1.sqrt(),
            y: Complex64::new(raw.kappa_o1.sqrt(), 0.0),
        }
    }

    fn rhs(&self, s: &[Complex64; 3], input: Complex64) -> [Complex64; 3] {
        [
            self.x * input - self.a * s[0] - self.p * s[2],
            self.y * input - self.b * s[1] - self.q * s[2],
            -(self.d * s[2] + self.u * s[0] + self.v * s[1]),
        ]
    }
}

fn axpy(s: &[Complex64; 3], k: &[Complex64; 3], h: f64) -> [Complex64; 3] {
    [s[0] + k[0] * h, s[1] + k[1] * h, s[2] + k[2] * h]
}

/// Integrate the driven equations with classical RK4 from an empty system
/// at the window start. `dt` must divide the pulse sample spacing.
pub fn propagate_time(
    params: &ValidatedParams,
    spin: SpinState,
    pulse: &PulseWaveform,
    dt: f64,
) -> Result<OutputFields> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidPulse(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let omega_l = pulse.omega_l();
    let rate = match spin {
        SpinState::Up => params.max_rate(omega_l),
        SpinState::Down => params
            .map(|mut raw| {
                raw.g_e = Complex64::new(0.0, 0.0);
                raw.g_o = Complex64::new(0.0, 0.0);
                raw
            })?
            .max_rate(omega_l),
    };
    let product = dt * rate;
    if product > MAX_STEP_RATE_PRODUCT {
        return Err(Error::StepSize {
            dt,
            product,
            limit: MAX_STEP_RATE_PRODUCT,
        });
    }
    let substeps = (pulse.dt() / dt).round();
    if substeps < 1.0 || (substeps * dt - pulse.dt()).abs() > 1e-9 * pulse.dt() {
        return Err(Error::InvalidPulse(format!(
            "time step {dt} does not divide the sample spacing {}",
            pulse.dt()
        )));
    }
    let substeps = substeps as usize;
    let h = pulse.dt() / substeps as f64;

    let raw = params.raw();
    let sys = Dynamics::new(params, omega_l, spin);
    let (sqrt_ke1, sqrt_ko1) = (raw.kappa_e1.sqrt(), raw.kappa_o1.sqrt());
    let i = Complex64::i();
    let loss_rate = |s: &[Complex64; 3]| {
        2.0 * raw.kappa_e0 * s[0].norm_sqr()
            + 2.0 * raw.kappa_o0 * s[1].norm_sqr()
            + 2.0 * params.gamma() * s[2].norm_sqr()
    };

    let n = pulse.len();
    let mut transmitted = Vec::with_capacity(n);
    let mut reflected = Vec::with_capacity(n);
    let mut dissipated = 0.0;
    let mut state = [Complex64::new(0.0, 0.0); 3];
    let t0 = pulse.time()[0];

    for (idx, &input) in pulse.envelope_t().iter().enumerate() {
        let even_out = i * sqrt_ke1 * state[0];
        let odd_out = sqrt_ko1 * state[1];
        transmitted.push(input + even_out - odd_out);
        reflected.push(even_out + odd_out);
        dissipated += loss_rate(&state) * pulse.dt();

        let base = t0 + idx as f64 * pulse.dt();
        for j in 0..substeps {
            let t = base + j as f64 * h;
            let a0 = if j == 0 { input } else { pulse.amplitude_at(t) };
            let a_mid = pulse.amplitude_at(t + 0.5 * h);
            let a1 = pulse.amplitude_at(t + h);
            let k1 = sys.rhs(&state, a0);
            let k2 = sys.rhs(&axpy(&state, &k1, 0.5 * h), a_mid);
            let k3 = sys.rhs(&axpy(&state, &k2, 0.5 * h), a_mid);
            let k4 = sys.rhs(&axpy(&state, &k3, h), a1);
            for c in 0..3 {
                state[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) * (h / 6.0);
            }
        }
    }

    Ok(OutputFields {
        time: pulse.time().to_vec(),
        norm_t: energy(&transmitted, pulse.dt()),
        norm_r: energy(&reflected, pulse.dt()),
        transmitted,
        reflected,
        dissipated,
        stored: state.iter().map(|c| c.norm_sqr()).sum(),
    })
}

/// CSV with header `t,re_in,im_in,re_out_t,im_out_t,re_out_r,im_out_r`.
pub fn write_time_series_csv<W: Write>(
    pulse: &PulseWaveform,
    out: &OutputFields,
    writer: W,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "t", "re_in", "im_in", "re_out_t", "im_out_t", "re_out_r", "im_out_r",
    ])?;
    for k in 0..pulse.len() {
        let a = pulse.envelope_t()[k];
        let t = out.transmitted[k];
        let r = out.reflected[k];
        w.serialize((pulse.time()[k], a.re, a.im, t.re, t.im, r.re, r.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_time_series(
    pulse: &PulseWaveform,
    out: &OutputFields,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_time_series_csv(pulse, out, &mut buf).map_err(|e| Error::csv(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}
