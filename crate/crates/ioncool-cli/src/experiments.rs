//! Experiment dispatch: translate a validated config into library calls and
//! deterministic artifacts.

use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::Path;

use ioncool::constants::{AMU, QE};
use ioncool::cooling::{self, ResistiveConfig, SidebandCoolOptions, SpeciesParams};
use ioncool::dynamics::{evolve_schrodinger, HamiltonianSource};
use ioncool::hamiltonians::{
    blue_sideband_hamiltonian, carrier_hamiltonian, effective_ldp, magic_kappa,
    red_sideband_hamiltonian, EITConfig, LaserDrive, TrapParams,
};
use ioncool::quantum::{HilbertSpace, QuantumState};
use ioncool::{species, IonError};

use crate::config::*;
use crate::output::ArtifactWriter;
use crate::CliError;

const TWO_PI: f64 = 2.0 * PI;

pub const EXPERIMENTS: &[(&str, &str, &str)] = &[
    (
        "doppler",
        "species, t0_k, detuning_hz, saturation, duration_s[, n_samples]",
        "Two-beam Doppler cooling: thermal-ensemble temperature trajectory",
    ),
    ("doppler-limit", "species", "Doppler limit T = hbar*gamma/(2 kB) for a species"),
    (
        "resistive",
        "mass_amu, charge_e, half_gap_m, resistance_ohm, initial_energy_j, duration_s[, n_samples]",
        "Resistive (image-current) cooling: time constant and energy decay",
    ),
    (
        "sideband-cool",
        "nu_hz, mass_amu, rabi_hz, eta, gamma_eff_hz, initial_nbar, n_max, duration_s[, heating_quanta_per_s, n_samples, full_hamiltonian]",
        "Resolved-sideband cooling on the master equation: nbar(t), P(n)",
    ),
    (
        "eit-spectrum",
        "omega1_gamma, omega3_gamma, delta1_gamma, beta, grid{min_gamma,max_gamma,points}",
        "Steady-state EIT absorption spectrum vs probe detuning",
    ),
    (
        "magic",
        "mass_amu, nu_hz, gradient_hz_per_m[, eta]",
        "Magnetic-gradient coupling: kappa and effective Lamb-Dicke parameter",
    ),
    (
        "chain-modes",
        "n_ions, nu_hz, mass_amu, charge_e",
        "Axial normal modes and equilibrium positions of a linear ion chain",
    ),
    (
        "multimode-cool",
        "n_ions, nu_hz, mass_amu, charge_e, eta, rabi_hz, gamma_eff_hz, initial_nbar, duration_s, designed_offsets[, heating_quanta_per_s, n_samples]",
        "Rate-equation model of simultaneous multi-mode sideband cooling",
    ),
    (
        "rabi-flop",
        "branch, n_initial, n_max, eta, rabi_hz, duration_s[, n_samples]",
        "Carrier/sideband Rabi oscillations of P(excited) from |g,n>",
    ),
];

fn parse<T: DeserializeOwned>(parameters: &Value) -> Result<T, CliError> {
    serde_json::from_value(parameters.clone())
        .map_err(|e| CliError::Config(format!("invalid parameters: {e}")))
}

fn physics(e: IonError) -> CliError {
    match e {
        IonError::Numerical(msg) => CliError::Numerical(msg),
        other => CliError::Config(other.to_string()),
    }
}

fn sweep_threads() -> usize {
    std::env::var("IONCOOL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

pub fn dispatch(experiment: &str, parameters: &Value, out: &Path) -> Result<ArtifactWriter, CliError> {
    let mut w = ArtifactWriter::new(out)?;
    match experiment {
        "doppler-limit" => {
            let p: DopplerLimitParams = parse(parameters)?;
            let sp = species::lookup(&p.species).map_err(physics)?;
            let params = SpeciesParams::from_species(sp);
            w.json(
                "doppler_limit.json",
                &json!({
                    "species": sp.name,
                    "T_K": cooling::doppler_limit(&params),
                }),
            )?;
        }
        "doppler" => {
            let p: DopplerParams = parse(parameters)?;
            let sp = species::lookup(&p.species).map_err(physics)?;
            let params = SpeciesParams::from_species(sp);
            let res = cooling::doppler_cool_trajectory(
                p.t0_k,
                TWO_PI * p.detuning_hz,
                p.saturation,
                &params,
                (0.0, p.duration_s),
                p.n_samples,
            )
            .map_err(physics)?;
            if res.equilibrium_t.is_some() && !res.converged {
                return Err(CliError::Numerical(format!(
                    "temperature did not converge to equilibrium within {} s (final T = {:.4e} K, \
                     equilibrium {:.4e} K)",
                    p.duration_s,
                    res.temperatures.last().unwrap(),
                    res.equilibrium_t.unwrap()
                )));
            }
            let rows: Vec<Vec<f64>> = res
                .times
                .iter()
                .zip(&res.temperatures)
                .map(|(&t, &temp)| vec![t, temp])
                .collect();
            w.csv("doppler.csv", &["time_s", "temperature_k"], &rows)?;
            w.json(
                "summary.json",
                &json!({
                    "species": sp.name,
                    "equilibrium_T_K": res.equilibrium_t,
                    "doppler_limit_K": res.doppler_limit_t,
                    "converged": res.converged,
                }),
            )?;
        }
        "resistive" => {
            let p: ResistiveParams = parse(parameters)?;
            let cfg = ResistiveConfig {
                mass: p.mass_amu * AMU,
                charge: p.charge_e * QE,
                half_gap: p.half_gap_m,
                resistance: p.resistance_ohm,
                initial_energy: p.initial_energy_j,
            };
            let tau = cooling::resistive_time_constant(&cfg).map_err(physics)?;
            if p.n_samples < 2 || p.duration_s <= 0.0 {
                return Err(CliError::Config(
                    "duration_s must be > 0 and n_samples >= 2".into(),
                ));
            }
            let dt = p.duration_s / (p.n_samples - 1) as f64;
            let rows: Vec<Vec<f64>> = (0..p.n_samples)
                .map(|i| {
                    let t = i as f64 * dt;
                    vec![t, cfg.initial_energy * (-t / tau).exp()]
                })
                .collect();
            w.csv("energy.csv", &["time_s", "energy_j"], &rows)?;
            w.json("resistive.json", &json!({ "tau_s": tau }))?;
        }
        "sideband-cool" => {
            let p: SidebandCoolParams = parse(parameters)?;
            let nu = TWO_PI * p.nu_hz;
            let trap = TrapParams::new(nu, p.mass_amu * AMU).map_err(physics)?;
            let drive = LaserDrive::new(TWO_PI * p.rabi_hz, -nu, 0.0, p.eta).map_err(physics)?;
            let opts = SidebandCoolOptions {
                n_max: p.n_max,
                n_samples: p.n_samples,
                full_hamiltonian: p.full_hamiltonian,
            };
            let res = cooling::sideband_cool(
                p.initial_nbar,
                &drive,
                &trap,
                TWO_PI * p.gamma_eff_hz,
                p.heating_quanta_per_s,
                p.duration_s,
                &opts,
            )
            .map_err(physics)?;
            for warning in &res.warnings {
                eprintln!("warning: {warning}");
            }
            let rows: Vec<Vec<f64>> = res
                .trajectory
                .times
                .iter()
                .zip(&res.nbar)
                .map(|(&t, &nb)| vec![t, nb])
                .collect();
            w.csv("cooling.csv", &["time_s", "nbar"], &rows)?;
            let pops: Vec<Vec<f64>> = res
                .final_populations
                .iter()
                .enumerate()
                .map(|(n, &pr)| vec![n as f64, pr])
                .collect();
            w.csv("fock_populations.csv", &["n", "probability"], &pops)?;
            w.json(
                "summary.json",
                &json!({
                    "final_nbar": res.nbar.last(),
                    "warnings": res.warnings,
                }),
            )?;
        }
        "eit-spectrum" => {
            let p: EitSpectrumParams = parse(parameters)?;
            if p.grid.points < 2 || !(p.grid.max_gamma > p.grid.min_gamma) {
                return Err(CliError::Config(
                    "grid requires points >= 2 and max_gamma > min_gamma".into(),
                ));
            }
            let cfg = EITConfig {
                omega1: p.omega1_gamma,
                omega3: p.omega3_gamma,
                delta1: p.delta1_gamma,
                delta3: 0.0,
                gamma: 1.0,
                beta: p.beta,
            };
            let step = (p.grid.max_gamma - p.grid.min_gamma) / (p.grid.points - 1) as f64;
            let grid: Vec<f64> =
                (0..p.grid.points).map(|i| p.grid.min_gamma + i as f64 * step).collect();
            let spec =
                cooling::eit_absorption_spectrum(&cfg, &grid, sweep_threads()).map_err(physics)?;
            let rows: Vec<Vec<f64>> = spec
                .delta3
                .iter()
                .zip(&spec.absorption)
                .map(|(&d, &a)| vec![d, a])
                .collect();
            w.csv("spectrum.csv", &["delta3", "absorption_norm"], &rows)?;
        }
        "magic" => {
            let p: MagicExperimentParams = parse(parameters)?;
            let trap = TrapParams::new(TWO_PI * p.nu_hz, p.mass_amu * AMU).map_err(physics)?;
            let kappa = magic_kappa(&trap, TWO_PI * p.gradient_hz_per_m);
            let magic = effective_ldp(p.eta, kappa).map_err(physics)?;
            w.json(
                "magic.json",
                &json!({
                    "kappa": magic.kappa,
                    "eta": magic.eta,
                    "eta_eff_abs": magic.eta_prime,
                    "theta_rad": magic.theta,
                    "z0_m": trap.z0(),
                }),
            )?;
        }
        "chain-modes" => {
            let p: ChainModesParams = parse(parameters)?;
            let nu = TWO_PI * p.nu_hz;
            let modes =
                cooling::chain_normal_modes(p.n_ions, nu, p.mass_amu * AMU, p.charge_e * QE)
                    .map_err(physics)?;
            let rows: Vec<Vec<f64>> = modes
                .frequencies
                .iter()
                .enumerate()
                .map(|(i, &f)| vec![(i + 1) as f64, f / TWO_PI, f / nu])
                .collect();
            w.csv("modes.csv", &["mode", "frequency_hz", "frequency_ratio"], &rows)?;
            let pos: Vec<Vec<f64>> = modes
                .equilibrium_positions
                .iter()
                .enumerate()
                .map(|(i, &z)| vec![(i + 1) as f64, z])
                .collect();
            w.csv("positions.csv", &["ion", "position_m"], &pos)?;
            let mut header: Vec<String> = vec!["ion".into()];
            header.extend((1..=p.n_ions).map(|m| format!("mode_{m}")));
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let vec_rows: Vec<Vec<f64>> = (0..p.n_ions)
                .map(|i| {
                    let mut row = vec![(i + 1) as f64];
                    row.extend((0..p.n_ions).map(|m| modes.mode_vectors[(i, m)]));
                    row
                })
                .collect();
            w.csv("mode_vectors.csv", &header_refs, &vec_rows)?;
        }
        "multimode-cool" => {
            let p: MultimodeCoolParams = parse(parameters)?;
            let nu = TWO_PI * p.nu_hz;
            let modes =
                cooling::chain_normal_modes(p.n_ions, nu, p.mass_amu * AMU, p.charge_e * QE)
                    .map_err(physics)?;
            let offsets = if p.designed_offsets {
                cooling::design_simultaneous_gradient(&modes)
            } else {
                vec![0.0; p.n_ions]
            };
            let eta = vec![p.eta; p.n_ions];
            let heat = vec![p.heating_quanta_per_s; p.n_ions];
            let nbar0 = vec![p.initial_nbar; p.n_ions];
            let res = cooling::multimode_cool_sim(
                &modes,
                &offsets,
                &eta,
                TWO_PI * p.rabi_hz,
                TWO_PI * p.gamma_eff_hz,
                &heat,
                &nbar0,
                p.duration_s,
                p.n_samples,
            )
            .map_err(physics)?;
            let mut header: Vec<String> = vec!["time_s".into()];
            header.extend((1..=p.n_ions).map(|m| format!("nbar_{m}")));
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let rows: Vec<Vec<f64>> = res
                .times
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    let mut row = vec![t];
                    row.extend((0..p.n_ions).map(|m| res.nbar[m][k]));
                    row
                })
                .collect();
            w.csv("multimode.csv", &header_refs, &rows)?;
            let off_rows: Vec<Vec<f64>> = offsets
                .iter()
                .enumerate()
                .map(|(i, &o)| vec![(i + 1) as f64, o / TWO_PI])
                .collect();
            w.csv("offsets.csv", &["ion", "offset_hz"], &off_rows)?;
        }
        "rabi-flop" => {
            let p: RabiFlopParams = parse(parameters)?;
            let space = HilbertSpace::two_level(p.n_max);
            let drive = LaserDrive::new(TWO_PI * p.rabi_hz, 0.0, 0.0, p.eta).map_err(physics)?;
            let h = match p.branch {
                BranchName::Carrier => carrier_hamiltonian(&drive, space),
                BranchName::Blue => blue_sideband_hamiltonian(&drive, space),
                BranchName::Red => red_sideband_hamiltonian(&drive, space),
            }
            .map_err(physics)?;
            let psi0 = QuantumState::basis(space, 0, p.n_initial).map_err(physics)?;
            let excited =
                ioncool::hamiltonians::excited_projector(space).map_err(physics)?;
            let traj = evolve_schrodinger(
                &HamiltonianSource::Static(h),
                &psi0,
                (0.0, p.duration_s),
                p.duration_s,
                p.n_samples,
                &[("p_excited".into(), excited)],
            )
            .map_err(physics)?;
            let pe = traj.real_series("p_excited").unwrap();
            let rows: Vec<Vec<f64>> =
                traj.times.iter().zip(&pe).map(|(&t, &v)| vec![t, v]).collect();
            w.csv("rabi.csv", &["time_s", "p_excited"], &rows)?;
        }
        other => {
            let known: Vec<&str> = EXPERIMENTS.iter().map(|(n, _, _)| *n).collect();
            return Err(CliError::Config(format!(
                "unknown experiment '{other}' (known: {})",
                known.join(", ")
            )));
        }
    }
    Ok(w)
}
