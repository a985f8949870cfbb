//! Physical parameters of the cavity-dipole-cavity system.
//!
//! Unit convention: every rate, frequency offset and coupling is an
//! amplitude rate in rad/ns. Published "GHz" values are used as these
//! numbers directly; only ratios such as g²/(κγ), κ0/κ1 and δ/κ enter the
//! dimensionless outputs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in nm/ns.
const SPEED_OF_LIGHT_NM_PER_NS: f64 = 2.997_924_58e8;

/// Default spontaneous emission rate of the lead-sulphide emitter.
pub const DEFAULT_GAMMA_S: f64 = 0.002;
/// Default pure dephasing rate of the lead-sulphide emitter.
pub const DEFAULT_GAMMA_P: f64 = 1.0;
/// Default magnitude of the even-mode coupling.
pub const DEFAULT_G: f64 = 30.0;

/// Raw parameter set. Frequencies are offsets from an arbitrary reference
/// so one set can serve a whole sweep of the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega_e: f64,
    pub omega_o: f64,
    pub omega_a: f64,
    pub kappa_e0: f64,
    pub kappa_o0: f64,
    pub kappa_e1: f64,
    pub kappa_o1: f64,
    pub g_e: Complex64,
    pub g_o: Complex64,
    pub gamma_s: f64,
    pub gamma_p: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            omega_e: 0.0,
            omega_o: 0.0,
            omega_a: 0.0,
            kappa_e0: 0.0,
            kappa_o0: 0.0,
            kappa_e1: 0.0,
            kappa_o1: 0.0,
            g_e: Complex64::new(0.0, 0.0),
            g_o: Complex64::new(0.0, 0.0),
            gamma_s: DEFAULT_GAMMA_S,
            gamma_p: DEFAULT_GAMMA_P,
        }
    }
}

impl SystemParams {
    /// Degenerate cavity with equal intrinsic/external rates on both modes,
    /// all frequencies at the reference zero.
    pub fn symmetric(kappa0: f64, kappa1: f64, g_e: Complex64, g_o: Complex64, gamma: f64) -> Self {
        SystemParams {
            kappa_e0: kappa0,
            kappa_o0: kappa0,
            kappa_e1: kappa1,
            kappa_o1: kappa1,
            g_e,
            g_o,
            gamma_s: 0.0,
            gamma_p: gamma,
            ..SystemParams::default()
        }
    }

    /// Couplings `(g_e, g_o)` on the branch used for all gate calculations,
    /// g_o = -i g_e. This is the branch in which the dipole couples to the
    /// supermode driven from port 1 and backscatter vanishes.
    pub fn gate_couplings(g_e: Complex64) -> (Complex64, Complex64) {
        (g_e, -Complex64::i() * g_e)
    }

    /// Replace (gamma_s, gamma_p) so that gamma_s/2 + gamma_p equals `gamma`,
    /// keeping gamma_s when that leaves gamma_p non-negative.
    pub fn with_total_gamma(mut self, gamma: f64) -> Self {
        if gamma - self.gamma_s / 2.0 >= 0.0 {
            self.gamma_p = gamma - self.gamma_s / 2.0;
        } else {
            self.gamma_s = 2.0 * gamma;
            self.gamma_p = 0.0;
        }
        self
    }

    /// Multiply every rate, frequency offset and coupling by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        SystemParams {
            omega_e: self.omega_e * factor,
            omega_o: self.omega_o * factor,
            omega_a: self.omega_a * factor,
            kappa_e0: self.kappa_e0 * factor,
            kappa_o0: self.kappa_o0 * factor,
            kappa_e1: self.kappa_e1 * factor,
            kappa_o1: self.kappa_o1 * factor,
            g_e: self.g_e * factor,
            g_o: self.g_o * factor,
            gamma_s: self.gamma_s * factor,
            gamma_p: self.gamma_p * factor,
        }
    }

    /// Mean of the two cavity mode frequencies.
    pub fn omega_c(&self) -> f64 {
        0.5 * (self.omega_e + self.omega_o)
    }

    pub fn validate(self) -> Result<ValidatedParams> {
        validate(self)
    }
}

/// Parameters that passed validation, with the derived total rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemParams", into = "SystemParams")]
pub struct ValidatedParams {
    raw: SystemParams,
    kappa_e: f64,
    kappa_o: f64,
    gamma: f64,
}

impl ValidatedParams {
    pub fn raw(&self) -> &SystemParams {
        &self.raw
    }
    /// Total even-mode decay κ_e0 + κ_e1.
    pub fn kappa_e(&self) -> f64 {
        self.kappa_e
    }
    /// Total odd-mode decay κ_o0 + κ_o1.
    pub fn kappa_o(&self) -> f64 {
        self.kappa_o
    }
    /// Emitter coherence decay γ_s/2 + γ_p.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_degenerate(&self) -> bool {
        self.raw.omega_e == self.raw.omega_o
    }

    /// Degenerate, equal rates on both modes.
    pub fn is_symmetric(&self) -> bool {
        self.is_degenerate()
            && self.raw.kappa_e0 == self.raw.kappa_o0
            && self.raw.kappa_e1 == self.raw.kappa_o1
    }

    pub fn detunings(&self, omega_l: f64) -> DetuningSet {
        detunings(self, omega_l)
    }

    /// Largest magnitude among the rates, couplings and detunings that
    /// govern the dynamics at drive frequency `omega_l`.
    pub fn max_rate(&self, omega_l: f64) -> f64 {
        let d = self.detunings(omega_l);
        [
            self.kappa_e,
            self.kappa_o,
            self.gamma,
            self.raw.g_e.norm(),
            self.raw.g_o.norm(),
            d.delta_el.abs(),
            d.delta_ol.abs(),
            d.delta_al.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Re-validate after an edit to the raw parameters.
    pub fn map(&self, f: impl FnOnce(SystemParams) -> SystemParams) -> Result<ValidatedParams> {
        validate(f(self.raw))
    }
}

impl TryFrom<SystemParams> for ValidatedParams {
    type Error = Error;
    fn try_from(p: SystemParams) -> Result<Self> {
        validate(p)
    }
}

impl From<ValidatedParams> for SystemParams {
    fn from(v: ValidatedParams) -> Self {
        v.raw
    }
}

pub fn validate(params: SystemParams) -> Result<ValidatedParams> {
    let p = &params;
    let reals: [(&'static str, f64); 7] = [
        ("omega_e", p.omega_e),
        ("omega_o", p.omega_o),
        ("omega_a", p.omega_a),
        ("g_e", p.g_e.re),
        ("g_e", p.g_e.im),
        ("g_o", p.g_o.re),
        ("g_o", p.g_o.im),
    ];
    for (field, v) in reals {
        if !v.is_finite() {
            return Err(Error::invalid(field, format!("non-finite value {v}")));
        }
    }
    let rates: [(&'static str, f64); 6] = [
        ("kappa_e0", p.kappa_e0),
        ("kappa_o0", p.kappa_o0),
        ("kappa_e1", p.kappa_e1),
        ("kappa_o1", p.kappa_o1),
        ("gamma_s", p.gamma_s),
        ("gamma_p", p.gamma_p),
    ];
    for (field, v) in rates {
        if !v.is_finite() {
            return Err(Error::invalid(field, format!("non-finite value {v}")));
        }
        if v < 0.0 {
            return Err(Error::invalid(field, format!("negative rate {v}")));
        }
    }
    Ok(ValidatedParams {
        raw: params,
        kappa_e: p.kappa_e0 + p.kappa_e1,
        kappa_o: p.kappa_o0 + p.kappa_o1,
        gamma: p.gamma_s / 2.0 + p.gamma_p,
    })
}

/// Detunings in the frame rotating at the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningSet {
    /// ω_e − ω_l
    pub delta_el: f64,
    /// ω_o − ω_l
    pub delta_ol: f64,
    /// ω_a − ω_l
    pub delta_al: f64,
    /// Input-cavity detuning δ = ω_l − ω_c.
    pub delta: f64,
    /// Emitter-cavity detuning Δ = ω_a − ω_c.
    pub emitter_cavity: f64,
    /// False when ω_e ≠ ω_o; `delta` and `emitter_cavity` are then taken
    /// relative to the mean mode frequency ω_c.
    pub degenerate: bool,
}

pub fn detunings(params: &ValidatedParams, omega_l: f64) -> DetuningSet {
    let p = params.raw();
    let delta_el = p.omega_e - omega_l;
    let delta_ol = p.omega_o - omega_l;
    let delta_al = p.omega_a - omega_l;
    let degenerate = p.omega_e == p.omega_o;
    let delta_cl = if degenerate {
        delta_el
    } else {
        p.omega_c() - omega_l
    };
    DetuningSet {
        delta_el,
        delta_ol,
        delta_al,
        delta: -delta_cl,
        emitter_cavity: delta_al - delta_cl,
        degenerate,
    }
}

/// Cavity amplitude decay rate (rad/ns) for quality factor `q` at
/// free-space `wavelength_nm`, κ = ω / (2Q). Infinite Q gives zero.
pub fn q_to_kappa(q: f64, wavelength_nm: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::invalid("q", format!("must be positive, got {q}")));
    }
    if !wavelength_nm.is_finite() || wavelength_nm <= 0.0 {
        return Err(Error::invalid(
            "wavelength",
            format!("must be positive and finite, got {wavelength_nm}"),
        ));
    }
    let omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_NS / wavelength_nm;
    Ok(omega / (2.0 * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinState {
    /// Emitter in |↑⟩; the |↑⟩↔|e₁⟩ transition couples to the cavity.
    Up,
    /// Emitter in |↓⟩; the dipole is decoupled.
    Down,
}

impl FromStr for SpinState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" => Ok(SpinState::Up),
            "down" => Ok(SpinState::Down),
            other => Err(Error::invalid(
                "spin",
                format!("expected `up` or `down`, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinState::Up => "up",
            SpinState::Down => "down",
        })
    }
}

impl Serialize for SpinState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SpinState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The seven named operating points of the gate-fidelity study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl CaseId {
    pub const ALL: [CaseId; 7] = [
        CaseId::I,
        CaseId::II,
        CaseId::III,
        CaseId::IV,
        CaseId::V,
        CaseId::VI,
        CaseId::VII,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::I => "I",
            CaseId::II => "II",
            CaseId::III => "III",
            CaseId::IV => "IV",
            CaseId::V => "V",
            CaseId::VI => "VI",
            CaseId::VII => "VII",
        }
    }

    /// Cases V-VII pin the external decay to the coupling and are
    /// presented as functions of γ; the rest as functions of κ₁.
    pub fn pins_kappa1(&self) -> bool {
        matches!(self, CaseId::V | CaseId::VI | CaseId::VII)
    }

    pub fn spec(&self) -> CaseSpec {
        let base = CaseSpec {
            kappa_e0: 0.1,
            kappa_o0: 0.1,
            odd_external_ratio: 1.0,
            delta_el: 0.0,
            delta_ol: 0.0,
            delta_al: 0.0,
        };
        match self {
            CaseId::I => base,
            CaseId::II | CaseId::V => CaseSpec {
                kappa_e0: 1.0,
                kappa_o0: 1.0,
                ..base
            },
            CaseId::III | CaseId::VI => CaseSpec {
                kappa_e0: 1.0,
                kappa_o0: 1.0,
                delta_al: 5.0,
                ..base
            },
            CaseId::IV => CaseSpec {
                delta_el: 5.0,
                delta_ol: -5.0,
                ..base
            },
            CaseId::VII => CaseSpec {
                kappa_e0: 0.2,
                kappa_o0: 0.1,
                odd_external_ratio: 1.0 / 1.1,
                delta_el: 5.0,
                delta_ol: -5.0,
                delta_al: 1.0,
            },
        }
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CaseId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Laser-relative description of a case. The drive sits at the reference
/// zero, so mode offsets equal the detunings δ_el, δ_ol, δ_al.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseSpec {
    pub kappa_e0: f64,
    pub kappa_o0: f64,
    /// κ_o1 / κ_e1.
    pub odd_external_ratio: f64,
    pub delta_el: f64,
    pub delta_ol: f64,
    pub delta_al: f64,
}

impl CaseSpec {
    /// Parameters with even-mode external decay `kappa1`, coupling
    /// magnitude `g` on the gate branch, and total emitter decay `gamma`
    /// (None keeps the lead-sulphide defaults).
    pub fn build(&self, g: f64, kappa1: f64, gamma: Option<f64>) -> SystemParams {
        let (g_e, g_o) = SystemParams::gate_couplings(Complex64::new(g, 0.0));
        let p = SystemParams {
            omega_e: self.delta_el,
            omega_o: self.delta_ol,
            omega_a: self.delta_al,
            kappa_e0: self.kappa_e0,
            kappa_o0: self.kappa_o0,
            kappa_e1: kappa1,
            kappa_o1: kappa1 * self.odd_external_ratio,
            g_e,
            g_o,
            gamma_s: DEFAULT_GAMMA_S,
            gamma_p: DEFAULT_GAMMA_P,
        };
        match gamma {
            Some(gamma) => p.with_total_gamma(gamma),
            None => p,
        }
    }
}

/// Parameters of a named case at its operating point (κ_e1 = g) together
/// with the drive frequency to evaluate it at.
pub fn case_params(case: CaseId, g_e_magnitude: f64) -> Result<(ValidatedParams, f64)> {
    if !(g_e_magnitude > 0.0) || !g_e_magnitude.is_finite() {
        return Err(Error::invalid(
            "g_e_magnitude",
            format!("must be positive and finite, got {g_e_magnitude}"),
        ));
    }
    let params = case
        .spec()
        .build(g_e_magnitude, g_e_magnitude, None)
        .validate()?;
    Ok((params, 0.0))
}
