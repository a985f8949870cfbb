//! Driven steady state of the even mode, odd mode and emitter coherence
//! under weak monochromatic drive at port 1.
//!
//! With σ_z replaced by −1 the equations of motion are linear. Setting the
//! time derivatives to zero in the frame rotating at ω_l gives
//!
//! ```text
//! (iδ_el + κ_e) c_e + i g_e σ                 = i √κ_e1
//! (iδ_ol + κ_o) c_o + i g_o σ                 =   √κ_o1
//! (iδ_al + γ)   σ   + i (g_e* c_e + g_o* c_o) = 0
//! ```
//!
//! for unit input at port 1. The even mode couples to both ports with
//! phase i√κ_e1, the odd mode with opposite signs ±√κ_o1, so
//!
//! ```text
//! t = 1 + i √κ_e1 c_e − √κ_o1 c_o      (port 2, forward)
//! r =     i √κ_e1 c_e + √κ_o1 c_o      (port 1, backward)
//! ```
//!
//! Under this convention port 1 drives the supermode (|e⟩ − i|o⟩)/√2 of a
//! symmetric cavity, which the dipole couples to when g_o = −i g_e.

pub mod oracle;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SpinState, ValidatedParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub spin: SpinState,
    pub omega_l: f64,
    pub c_e: Complex64,
    pub c_o: Complex64,
    pub sigma: Complex64,
    /// Forward transmission c_out⁽²⁾ / c_in⁽¹⁾.
    pub t: Complex64,
    /// Backward reflection c_out⁽¹⁾ / c_in⁽¹⁾.
    pub r: Complex64,
    pub loss_cavity_e: f64,
    pub loss_cavity_o: f64,
    pub loss_emitter: f64,
}

impl SteadyState {
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn total_loss(&self) -> f64 {
        self.loss_cavity_e + self.loss_cavity_o + self.loss_emitter
    }
}

/// Sign convention of the port output relations. Only `Standard` is
/// physical; the other exists so verification runs have a negative control.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputConvention {
    #[default]
    Standard,
    FlippedOddOutput,
}

pub fn solve_general(
    params: &ValidatedParams,
    omega_l: f64,
    spin: SpinState,
) -> Result<SteadyState> {
    solve_with_convention(params, omega_l, spin, OutputConvention::Standard)
}

#[doc(hidden)]
pub fn solve_with_convention(
    params: &ValidatedParams,
    omega_l: f64,
    spin: SpinState,
    convention: OutputConvention,
) -> Result<SteadyState> {
    let p = params.raw();
    let det = params.detunings(omega_l);
    let a = Complex64::new(params.kappa_e(), det.delta_el);
    let b = Complex64::new(params.kappa_o(), det.delta_ol);
    let d = Complex64::new(params.gamma(), det.delta_al);
    let sqrt_ke1 = p.kappa_e1.sqrt();
    let sqrt_ko1 = p.kappa_o1.sqrt();
    let x = I * sqrt_ke1;
    let y = Complex64::new(sqrt_ko1, 0.0);

    let singular = || Error::Singular { omega_l };

    let (c_e, c_o, sigma) = match spin {
        // Emitter row decouples; σ stays exactly zero.
        SpinState::Down => {
            if a == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0) {
                return Err(singular());
            }
            (x / a, y / b, Complex64::new(0.0, 0.0))
        }
        SpinState::Up => {
            // Cramer's rule on
            //   [a 0 p] [c_e]   [x]
            //   [0 b q] [c_o] = [y]
            //   [u v d] [σ  ]   [0]
            let pp = I * p.g_e;
            let qq = I * p.g_o;
            let u = I * p.g_e.conj();
            let v = I * p.g_o.conj();
            let det3 = a * (b * d - qq * v) - pp * b * u;
            let scale =
                (a.norm() + pp.norm()) * (b.norm() + qq.norm()) * (u.norm() + v.norm() + d.norm());
            if !det3.is_finite() || det3.norm() <= 4.0 * f64::EPSILON * scale {
                return Err(singular());
            }
            let c_e = (x * (b * d - qq * v) + pp * y * v) / det3;
            let c_o = (a * y * d + x * qq * u - pp * y * u) / det3;
            let sigma = -(a * y * v + x * b * u) / det3;
            (c_e, c_o, sigma)
        }
    };

    let even_out = I * sqrt_ke1 * c_e;
    let odd_out = sqrt_ko1 * c_o;
    let (t, r) = match convention {
        OutputConvention::Standard => (1.0 + even_out - odd_out, even_out + odd_out),
        OutputConvention::FlippedOddOutput => (1.0 + even_out + odd_out, even_out - odd_out),
    };

    Ok(SteadyState {
        spin,
        omega_l,
        c_e,
        c_o,
        sigma,
        t,
        r,
        loss_cavity_e: 2.0 * p.kappa_e0 * c_e.norm_sqr(),
        loss_cavity_o: 2.0 * p.kappa_o0 * c_o.norm_sqr(),
        loss_emitter: 2.0 * params.gamma() * sigma.norm_sqr(),
    })
}

/// Result of the symmetric-cavity closed form. Reflection is identically
/// zero for this parameter class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormTransmission {
    pub t: Complex64,
    /// Set when i(Δ−δ)+γ = 0 with a coupled dipole; `t` is then the
    /// analytic limit 1.
    pub dipole_limit: bool,
}

/// Forward transmission of a degenerate symmetric cavity with the dipole
/// on the coupled branch:
///
/// t = (κ − 2κ₁ − iδ + λ) / (κ − iδ + λ),  λ = 2|g_e|² / (i(Δ − δ) + γ).
pub fn transmission_closed_form(
    kappa0: f64,
    kappa1: f64,
    g_e_mag: f64,
    gamma: f64,
    delta: f64,
    emitter_cavity: f64,
    spin: SpinState,
) -> Result<ClosedFormTransmission> {
    let kappa = kappa0 + kappa1;
    let coupled = spin == SpinState::Up && g_e_mag != 0.0;
    let lambda = if coupled {
        let emitter = Complex64::new(gamma, emitter_cavity - delta);
        if emitter == Complex64::new(0.0, 0.0) {
            return Ok(ClosedFormTransmission {
                t: Complex64::new(1.0, 0.0),
                dipole_limit: true,
            });
        }
        2.0 * g_e_mag * g_e_mag / emitter
    } else {
        Complex64::new(0.0, 0.0)
    };
    let denom = Complex64::new(kappa, -delta) + lambda;
    if denom == Complex64::new(0.0, 0.0) || !denom.is_finite() {
        return Err(Error::Singular { omega_l: delta });
    }
    Ok(ClosedFormTransmission {
        t: (Complex64::new(kappa - 2.0 * kappa1, -delta) + lambda) / denom,
        dipole_limit: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DrivenSupermode {
    Plus,
    Minus,
    Both,
    Neither,
}

/// Amplitudes and couplings in the rotating-mode basis
/// |±⟩ = (|e⟩ ± i|o⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupermodeView {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub g_plus: Complex64,
    pub g_minus: Complex64,
    /// Which supermode a port-1 input excites.
    pub port1_drives: DrivenSupermode,
}

pub fn supermode_transform(params: &ValidatedParams, state: &SteadyState) -> SupermodeView {
    let p = params.raw();
    let (g_e, g_o) = match state.spin {
        SpinState::Up => (p.g_e, p.g_o),
        SpinState::Down => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };
    let plus = |e: Complex64, o: Complex64| (e - I * o) * FRAC_1_SQRT_2;
    let minus = |e: Complex64, o: Complex64| (e + I * o) * FRAC_1_SQRT_2;

    let drive_e = I * p.kappa_e1.sqrt();
    let drive_o = Complex64::new(p.kappa_o1.sqrt(), 0.0);
    let port1_drives = match (
        plus(drive_e, drive_o).norm() > 0.0,
        minus(drive_e, drive_o).norm() > 0.0,
    ) {
        (true, true) => DrivenSupermode::Both,
        (true, false) => DrivenSupermode::Plus,
        (false, true) => DrivenSupermode::Minus,
        (false, false) => DrivenSupermode::Neither,
    };

    SupermodeView {
        c_plus: plus(state.c_e, state.c_o),
        c_minus: minus(state.c_e, state.c_o),
        g_plus: plus(g_e, g_o),
        g_minus: minus(g_e, g_o),
        port1_drives,
    }
}

/// Output and dissipated flux per unit input flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxReport {
    pub transmitted: f64,
    pub reflected: f64,
    pub loss_cavity_e: f64,
    pub loss_cavity_o: f64,
    pub loss_emitter: f64,
    /// 1 − transmitted − reflected − losses.
    pub residual: f64,
}

pub fn flux_balance(state: &SteadyState, params: &ValidatedParams) -> FluxReport {
    let p = params.raw();
    let transmitted = state.t.norm_sqr();
    let reflected = state.r.norm_sqr();
    let loss_cavity_e = 2.0 * p.kappa_e0 * state.c_e.norm_sqr();
    let loss_cavity_o = 2.0 * p.kappa_o0 * state.c_o.norm_sqr();
    let loss_emitter = 2.0 * params.gamma() * state.sigma.norm_sqr();
    FluxReport {
        transmitted,
        reflected,
        loss_cavity_e,
        loss_cavity_o,
        loss_emitter,
        residual: 1.0 - transmitted - reflected - loss_cavity_e - loss_cavity_o - loss_emitter,
    }
}
