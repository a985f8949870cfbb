//! Spin-photon phase gate built from the spin-conditional scattering
//! amplitudes of an h-polarized photon; v-polarized photons bypass the
//! cavity and pass with unit amplitude.
//!
//! Basis order of all two-qubit objects: {h↑, h↓, v↑, v↓}, i.e. photon
//! polarization ⊗ spin with the photon as the more significant index.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Mul;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{CaseId, SpinState, ValidatedParams};
use crate::pulse::PulseWaveform;
use crate::steady_state::solve_general;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const BASIS_LABELS: [&str; 4] = ["h↑", "h↓", "v↑", "v↓"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalAmplitudes {
    pub t_up: Complex64,
    pub t_down: Complex64,
    pub r_up: Complex64,
    pub r_down: Complex64,
}

impl ConditionalAmplitudes {
    /// Ideal gate: t_up = 1, t_down = −1, no reflection.
    pub fn ideal() -> Self {
        ConditionalAmplitudes {
            t_up: ONE,
            t_down: Complex64::new(-1.0, 0.0),
            r_up: ZERO,
            r_down: ZERO,
        }
    }
}

fn check_gate_branch(params: &ValidatedParams) -> Result<()> {
    let p = params.raw();
    let expected = -Complex64::i() * p.g_e;
    if (p.g_o - expected).norm() > 1e-12 * p.g_e.norm().max(p.g_o.norm()) {
        return Err(Error::GateCoupling {
            g_e: p.g_e.to_string(),
            g_o: p.g_o.to_string(),
        });
    }
    Ok(())
}

/// Monochromatic amplitudes at drive frequency `omega_l`.
pub fn conditional_amplitudes(
    params: &ValidatedParams,
    omega_l: f64,
) -> Result<ConditionalAmplitudes> {
    check_gate_branch(params)?;
    let up = solve_general(params, omega_l, SpinState::Up)?;
    let down = solve_general(params, omega_l, SpinState::Down)?;
    Ok(ConditionalAmplitudes {
        t_up: up.t,
        t_down: down.t,
        r_up: up.r,
        r_down: down.r,
    })
}

/// Amplitudes averaged over the pulse spectrum, Σ_k w_k t(ω_l + ν_k) with
/// w_k = |A_k|² / Σ|A|².
pub fn conditional_amplitudes_pulse(
    params: &ValidatedParams,
    pulse: &PulseWaveform,
) -> Result<ConditionalAmplitudes> {
    check_gate_branch(params)?;
    let weights = pulse.spectral_weights();
    let terms = pulse
        .frequency()
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&nu, &w)| {
            let omega = pulse.omega_l() + nu;
            let up = solve_general(params, omega, SpinState::Up)?;
            let down = solve_general(params, omega, SpinState::Down)?;
            Ok([up.t * w, down.t * w, up.r * w, down.r * w])
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = terms.iter().fold([ZERO; 4], |acc, x| {
        [acc[0] + x[0], acc[1] + x[1], acc[2] + x[2], acc[3] + x[3]]
    });
    Ok(ConditionalAmplitudes {
        t_up: sum[0],
        t_down: sum[1],
        r_up: sum[2],
        r_down: sum[3],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FidelityDefinition {
    /// |⟨ψ_ideal|ψ_out⟩| for input (|↑⟩+|↓⟩)/√2 ⊗ |h⟩.
    #[default]
    AmplitudeOverlap,
    /// Square of the amplitude overlap.
    ProbabilityOverlap,
}

/// Overlap of the unnormalized forward output with the ideal output
/// (|↑⟩ − |↓⟩)/√2 ⊗ |h⟩, which gives |t_up − t_down| / 2. Reflected
/// components are orthogonal to the ideal state and only reduce it.
pub fn fidelity(amps: &ConditionalAmplitudes, definition: FidelityDefinition) -> f64 {
    let overlap = (amps.t_up - amps.t_down).norm() / 2.0;
    match definition {
        FidelityDefinition::AmplitudeOverlap => overlap,
        FidelityDefinition::ProbabilityOverlap => overlap * overlap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Kappa1,
    Gamma,
}

impl SweepVariable {
    /// Panel pairing of the cases: I-IV against κ₁, V-VII against γ.
    pub fn default_for(case: CaseId) -> Self {
        if case.pins_kappa1() {
            SweepVariable::Gamma
        } else {
            SweepVariable::Kappa1
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa1" => Ok(SweepVariable::Kappa1),
            "gamma" => Ok(SweepVariable::Gamma),
            other => Err(Error::invalid(
                "variable",
                format!("expected `kappa1` or `gamma`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub x: f64,
    #[serde(rename = "F")]
    pub fidelity: f64,
}

/// Gate fidelity of a case along κ₁ (other parameters fixed, κ_o1 tracking
/// κ_e1 by the case ratio) or along the total emitter decay γ (κ₁ pinned
/// to g). Evaluated at the case operating frequency.
pub fn fidelity_sweep(
    case: CaseId,
    variable: SweepVariable,
    grid: &[f64],
    g_e_magnitude: f64,
    definition: FidelityDefinition,
) -> Result<Vec<SweepPoint>> {
    let spec = case.spec();
    let (_, omega_l) = crate::model::case_params(case, g_e_magnitude)?;
    grid.par_iter()
        .map(|&x| {
            let raw = match variable {
                SweepVariable::Kappa1 => spec.build(g_e_magnitude, x, None),
                SweepVariable::Gamma => spec.build(g_e_magnitude, g_e_magnitude, Some(x)),
            };
            let params = raw.validate()?;
            let amps = conditional_amplitudes(&params, omega_l)?;
            Ok(SweepPoint {
                x,
                fidelity: fidelity(&amps, definition),
            })
        })
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::InvalidGrid(format!(
            "log grid needs 0 < lo < hi and n >= 2, got [{lo}, {hi}], n = {n}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(
    points: &[SweepPoint],
    writer: W,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_sweep(points: &[SweepPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_sweep_csv(points, &mut buf).map_err(|e| Error::csv(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Dense 4x4 operator on the two-qubit space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator(pub [[Complex64; 4]; 4]);

impl Operator {
    pub fn identity() -> Self {
        Self::diagonal([ONE; 4])
    }

    pub fn diagonal(d: [Complex64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for k in 0..4 {
            m[k][k] = d[k];
        }
        Operator(m)
    }

    /// `op ⊗ 1`, acting on the photon polarization.
    pub fn on_photon(op: [[Complex64; 2]; 2]) -> Self {
        Self::kron(op, [[ONE, ZERO], [ZERO, ONE]])
    }

    /// `1 ⊗ op`, acting on the spin.
    pub fn on_spin(op: [[Complex64; 2]; 2]) -> Self {
        Self::kron([[ONE, ZERO], [ZERO, ONE]], op)
    }

    pub fn kron(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = a[i / 2][j / 2] * b[i % 2][j % 2];
            }
        }
        Operator(m)
    }

    pub fn apply(&self, state: &TwoQubitState) -> TwoQubitState {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * state.0[j]).sum();
        }
        TwoQubitState(out)
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Operator(m)
    }
}

/// Row-major, each entry a `[re, im]` pair.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(4))?;
        for row in &self.0 {
            let pairs: Vec<[f64; 2]> = row.iter().map(|z| [z.re, z.im]).collect();
            seq.serialize_element(&pairs)?;
        }
        seq.end()
    }
}

pub fn hadamard() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// Spin-conditional phase gate diag(t_up, t_down, 1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateMatrix {
    pub basis: [&'static str; 4],
    pub matrix: Operator,
}

impl GateMatrix {
    pub fn ideal() -> Self {
        gate_matrix(&ConditionalAmplitudes::ideal())
    }

    pub fn operator(&self) -> Operator {
        self.matrix
    }
}

pub fn gate_matrix(amps: &ConditionalAmplitudes) -> GateMatrix {
    GateMatrix {
        basis: BASIS_LABELS,
        matrix: Operator::diagonal([amps.t_up, amps.t_down, ONE, ONE]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState(pub [Complex64; 4]);

impl TwoQubitState {
    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        let arr: [Complex64; 4] = amps.try_into().map_err(|_| Error::Dimension {
            expected: 4,
            got: amps.len(),
        })?;
        Ok(TwoQubitState(arr))
    }

    pub fn basis(index: usize) -> Self {
        let mut a = [ZERO; 4];
        a[index] = ONE;
        TwoQubitState(a)
    }

    /// (|h⟩ + |v⟩)(|↑⟩ + |↓⟩)/2.
    pub fn plus_plus() -> Self {
        TwoQubitState([Complex64::new(0.5, 0.0); 4])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(TwoQubitState(self.0.map(|a| a / n)))
    }
}

/// Pure-state concurrence 2|a₀₀a₁₁ − a₀₁a₁₀| of the renormalized state.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    let a = state.normalized()?.0;
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthRow {
    pub input: &'static str,
    pub output: &'static str,
    /// [re, im] of the output amplitude.
    pub amplitude: [f64; 2],
    pub ideal: [f64; 2],
    /// |amplitude − ideal|.
    pub deviation: f64,
}

impl fmt::Display for TruthRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}> -> ({:+.6}{:+.6}i)|{}>   deviation {:.3e}",
            self.input, self.amplitude[0], self.amplitude[1], self.output, self.deviation
        )
    }
}

/// Each basis input mapped through the gate, against the ideal sign
/// pattern h↑ → h↑, h↓ → −h↓, v↑ → v↑, v↓ → v↓.
pub fn truth_table(amps: &ConditionalAmplitudes) -> Vec<TruthRow> {
    let actual = gate_matrix(amps).matrix;
    let ideal = GateMatrix::ideal().matrix;
    (0..4)
        .map(|k| {
            let a = actual.0[k][k];
            let i = ideal.0[k][k];
            TruthRow {
                input: BASIS_LABELS[k],
                output: BASIS_LABELS[k],
                amplitude: [a.re, a.im],
                ideal: [i.re, i.im],
                deviation: (a - i).norm(),
            }
        })
        .collect()
}
