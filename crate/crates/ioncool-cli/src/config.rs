//! Run-config schema. All schemas are strict: unknown keys are rejected and
//! the error message names the offending key. Physical quantities carry
//! explicit units in their key names (`nu_hz`, `mass_amu`, ...); frequencies
//! given in Hz are ordinary frequencies, converted to rad/s internally.

use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: String,
    /// Output directory; overridden by `--out`, defaults to the current dir.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub parameters: serde_json::Value,
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DopplerLimitParams {
    pub species: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DopplerParams {
    pub species: String,
    pub t0_k: f64,
    /// Laser detuning Delta/2pi; negative = red.
    pub detuning_hz: f64,
    pub saturation: f64,
    pub duration_s: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResistiveParams {
    pub mass_amu: f64,
    pub charge_e: f64,
    pub half_gap_m: f64,
    pub resistance_ohm: f64,
    pub initial_energy_j: f64,
    pub duration_s: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidebandCoolParams {
    pub nu_hz: f64,
    pub mass_amu: f64,
    pub rabi_hz: f64,
    pub eta: f64,
    pub gamma_eff_hz: f64,
    #[serde(default)]
    pub heating_quanta_per_s: f64,
    pub initial_nbar: f64,
    pub n_max: usize,
    pub duration_s: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub full_hamiltonian: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min_gamma: f64,
    pub max_gamma: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EitSpectrumParams {
    /// All rates/detunings in units of the decay rate gamma of |2>.
    pub omega1_gamma: f64,
    pub omega3_gamma: f64,
    pub delta1_gamma: f64,
    pub beta: f64,
    pub grid: GridSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagicExperimentParams {
    pub mass_amu: f64,
    pub nu_hz: f64,
    /// Magnetic-gradient-induced qubit frequency gradient |d omega/dz| / 2pi.
    pub gradient_hz_per_m: f64,
    /// Optical Lamb-Dicke parameter (0 for pure RF driving).
    #[serde(default)]
    pub eta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainModesParams {
    pub n_ions: usize,
    pub nu_hz: f64,
    pub mass_amu: f64,
    pub charge_e: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimodeCoolParams {
    pub n_ions: usize,
    pub nu_hz: f64,
    pub mass_amu: f64,
    pub charge_e: f64,
    pub eta: f64,
    pub rabi_hz: f64,
    pub gamma_eff_hz: f64,
    #[serde(default)]
    pub heating_quanta_per_s: f64,
    pub initial_nbar: f64,
    pub duration_s: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    /// True: apply the designed per-ion offsets; false: no gradient.
    pub designed_offsets: bool,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    Carrier,
    Blue,
    Red,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiFlopParams {
    pub branch: BranchName,
    pub n_initial: usize,
    pub n_max: usize,
    pub eta: f64,
    pub rabi_hz: f64,
    pub duration_s: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}
