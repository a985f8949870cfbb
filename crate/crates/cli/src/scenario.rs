//! JSON scenario documents. A scenario names its parameters (a case preset
//! or an explicit parameter set) and carries exactly one command block.

use std::path::{Path, PathBuf};

use cdcqed::model::DEFAULT_G;
use cdcqed::{CaseId, SpinState, SystemParams, ValidatedParams};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub case: Option<CaseId>,
    /// Coupling magnitude for case presets.
    pub g: Option<f64>,
    pub params: Option<SystemParams>,
    pub spectrum: Option<SpectrumBlock>,
    pub fidelity_sweep: Option<FidelitySweepBlock>,
    pub pulse: Option<PulseBlock>,
    pub gate: Option<GateBlock>,
    pub truth_table: Option<TruthTableBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub spin: SpinState,
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
    pub min_prominence: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelitySweepBlock {
    /// `kappa1` or `gamma`; defaults by case.
    pub variable: Option<String>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    /// `amplitude` (default) or `probability`.
    pub definition: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    pub spin: SpinState,
    /// Pulse duration; defaults to `tau_kappa / κ_e`.
    pub tau: Option<f64>,
    pub tau_kappa: Option<f64>,
    pub samples: usize,
    /// `frequency` (default) or `time`.
    pub method: Option<String>,
    /// Carrier frequency; defaults to the mean cavity frequency.
    pub omega_l: Option<f64>,
    /// Window lead in units of τ on each side of the pulse center.
    pub lead: Option<f64>,
    /// Residual stored amplitude fraction at the end of the window.
    pub settle: Option<f64>,
    /// dt · max_rate for the time-domain integrator.
    pub rate_product: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateBlock {
    pub omega_l: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthTableBlock {
    #[serde(default)]
    pub ideal: bool,
    pub omega_l: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("scenario {}: {e}", path.display())))?;
        scenario.check_single_block()?;
        Ok(scenario)
    }

    fn check_single_block(&self) -> Result<(), CliError> {
        let present = [
            self.spectrum.is_some(),
            self.fidelity_sweep.is_some(),
            self.pulse.is_some(),
            self.gate.is_some(),
            self.truth_table.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if present > 1 {
            return Err(CliError::Config(
                "scenario must contain exactly one command block".into(),
            ));
        }
        Ok(())
    }

    /// Resolve the parameter set, letting `case_override` replace the
    /// scenario's own source. Returns the parameters and the default drive
    /// frequency.
    pub fn resolve_params(
        &self,
        case_override: Option<CaseId>,
    ) -> Result<(ValidatedParams, f64), CliError> {
        let g = self.g.unwrap_or(DEFAULT_G);
        if let Some(case) = case_override {
            return cdcqed::case_params(case, g).map_err(CliError::from_config);
        }
        match (self.case, &self.params) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "`case` and `params` are mutually exclusive".into(),
            )),
            (Some(case), None) => cdcqed::case_params(case, g).map_err(CliError::from_config),
            (None, Some(raw)) => {
                let p = raw.validate().map_err(CliError::from_config)?;
                Ok((p, raw.omega_c()))
            }
            (None, None) => Err(CliError::Config(
                "scenario needs either `case` or `params`".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_two_blocks() {
        let s: Scenario =
            serde_json::from_str(r#"{"case":"I","gate":{},"truth_table":{}}"#).unwrap();
        assert!(s.check_single_block().is_err());
    }

    #[test]
    fn explicit_params_default_to_mean_cavity_frequency() {
        let s: Scenario = serde_json::from_str(
            r#"{"params":{"omega_e":1,"omega_o":3,"omega_a":0,"kappa_e0":0.1,"kappa_o0":0.1,
                "kappa_e1":1,"kappa_o1":1,"g_e":[1,0],"g_o":[0,-1],"gamma_s":0,"gamma_p":1}}"#,
        )
        .unwrap();
        let (_, omega_l) = s.resolve_params(None).unwrap();
        assert_eq!(omega_l, 2.0);
    }

    #[test]
    fn unknown_fields_and_bad_cases_rejected() {
        assert!(serde_json::from_str::<Scenario>(r#"{"case":"IX"}"#).is_err());
        assert!(serde_json::from_str::<Scenario>(r#"{"case":"I","bogus":1}"#).is_err());
        let s: Scenario = serde_json::from_str(r#"{}"#).unwrap();
        assert!(s.resolve_params(None).is_err());
    }
}
