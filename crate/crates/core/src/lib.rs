//! Cavity-dipole-cavity QED: a spin-selective emitter coupled to the two
//! opposite-parity modes of a standing-wave cavity that is side-coupled to
//! a waveguide.
//!
//! - [`model`]: parameters, detunings, named cases.
//! - [`steady_state`]: monochromatic transmission/reflection, closed forms,
//!   supermode view, flux ledger, and a reference solver.
//! - [`spectra`]: detuning sweeps and reflection peaks.
//! - [`pulse`]: pulse envelopes, spectral and time-domain propagation.
//! - [`gate`]: the spin-photon phase gate, fidelity, two-qubit algebra.

// `!(x > 0.0)` guards are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gate;
pub mod model;
pub mod pulse;
pub mod spectra;
pub mod steady_state;

pub use error::{Error, Result};
pub use gate::{
    ConditionalAmplitudes, FidelityDefinition, GateMatrix, Operator, SweepPoint, SweepVariable,
    TruthRow, TwoQubitState,
};
pub use model::{case_params, CaseId, DetuningSet, SpinState, SystemParams, ValidatedParams};
pub use pulse::{OutputFields, PulseWaveform};
pub use spectra::{Peak, Spectrum};
pub use steady_state::{solve_general, FluxReport, SteadyState, SupermodeView};

pub use num_complex::Complex64;
