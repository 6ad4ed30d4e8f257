//! The cooling schemes as runnable experiments: semiclassical two-beam
//! Doppler model, resistive (image-current) cooling, resolved-sideband
//! cooling on the full master equation, EIT absorption spectra with a
//! cooling figure of merit, ion-chain normal modes and gradient-designed
//! simultaneous multi-mode cooling.

use crate::constants::{HBAR, KB, K_COULOMB};
use crate::dynamics::{
    lindblad_evolve, observables, steady_state, CollapseChannel, HamiltonianSource, Trajectory,
};
use crate::hamiltonians::{
    eit_hamiltonian, full_interaction_hamiltonian, red_sideband_hamiltonian, EITConfig,
    ExpansionOrder, LaserDrive, TrapParams,
};
use crate::ode::{integrate, OdeOptions};
use crate::quantum::{internal_operators, ladder_operators, thermal_state, HilbertSpace};
use crate::species::Species;
use crate::{C64, IonError, Result};
use nalgebra::{DMatrix, DVector};

// ---------------------------------------------------------------------------
// Doppler cooling
// ---------------------------------------------------------------------------

/// Cooling-transition parameters of one species.
#[derive(Debug, Clone)]
pub struct SpeciesParams {
    mass: f64,
    wavelength: f64,
    linewidth: f64,
    name: String,
}

impl SpeciesParams {
    pub fn new(mass: f64, wavelength: f64, linewidth: f64, name: impl Into<String>) -> Result<Self> {
        if mass <= 0.0 || wavelength <= 0.0 || linewidth <= 0.0 {
            return Err(IonError::InvalidParameter(format!(
                "species parameters must be positive (mass={mass}, wavelength={wavelength}, linewidth={linewidth})"
            )));
        }
        Ok(Self { mass, wavelength, linewidth, name: name.into() })
    }

    pub fn from_species(s: &Species) -> Self {
        Self {
            mass: s.mass_kg(),
            wavelength: s.wavelength_m(),
            linewidth: s.gamma(),
            name: s.name.clone(),
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Natural linewidth gamma, rad/s.
    pub fn gamma(&self) -> f64 {
        self.linewidth
    }

    /// k = 2 pi / lambda.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Outcome of a Doppler-cooling integration.
#[derive(Debug, Clone)]
pub struct DopplerResult {
    pub times: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// Self-consistent equilibrium of the rate balance; `None` when no
    /// stable equilibrium exists (blue detuning).
    pub equilibrium_t: Option<f64>,
    pub doppler_limit_t: f64,
    /// True when the trajectory ended within 5% of `equilibrium_t`.
    pub converged: bool,
}

/// Two counter-propagating beams, Lorentzian response:
/// F(v) = (hbar k gamma / 2) [ s0/(1+s0+(2(Delta-kv)/gamma)^2)
///                           - s0/(1+s0+(2(Delta+kv)/gamma)^2) ].
pub fn doppler_force(v: f64, detuning: f64, sat: f64, species: &SpeciesParams) -> f64 {
    let k = species.wavenumber();
    let g = species.gamma();
    let lorentz = |delta_eff: f64| sat / (1.0 + sat + (2.0 * delta_eff / g).powi(2));
    0.5 * HBAR * k * g * (lorentz(detuning - k * v) - lorentz(detuning + k * v))
}

/// Total two-beam photon scattering rate at velocity v.
pub fn doppler_scattering_rate(v: f64, detuning: f64, sat: f64, species: &SpeciesParams) -> f64 {
    let k = species.wavenumber();
    let g = species.gamma();
    let lorentz = |delta_eff: f64| sat / (1.0 + sat + (2.0 * delta_eff / g).powi(2));
    0.5 * g * (lorentz(detuning - k * v) + lorentz(detuning + k * v))
}

/// T = hbar gamma / (2 k_B).
pub fn doppler_limit(species: &SpeciesParams) -> f64 {
    0.5 * HBAR * species.gamma() / KB
}

/// Recursive adaptive Simpson on [a, b].
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 30)
}

/// <g(v)> over a 1-D Maxwell-Boltzmann distribution at temperature T.
/// The grid is split at the beam resonance velocities so the narrow
/// Lorentzian features are never straddled by a single panel.
fn thermal_average(
    g: &impl Fn(f64) -> f64,
    temp: f64,
    detuning: f64,
    species: &SpeciesParams,
) -> f64 {
    let sigma = (KB * temp / species.mass()).sqrt();
    let k = species.wavenumber();
    let v_res = detuning.abs() / k;
    let v_width = species.gamma() / k;
    let v_max = (8.0 * sigma).max(v_res + 12.0 * v_width);
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let integrand = |v: f64| g(v) * norm * (-0.5 * (v / sigma).powi(2)).exp();
    let mut cuts = vec![-v_max, -v_res, -4.0 * sigma, 0.0, 4.0 * sigma, v_res, v_max];
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < f64::EPSILON * v_max);
    // coarse probe of each segment fixes an absolute tolerance; the scale
    // cannot come from any single point (the friction integrand is odd)
    let mut rough = 0.0f64;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let len = w[1] - w[0];
        let peak = (0..=16)
            .map(|i| integrand(w[0] + len * i as f64 / 16.0).abs())
            .fold(0.0, f64::max);
        rough += peak * len;
    }
    let tol = (1e-11 * rough).max(1e-280);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += adaptive_simpson(&integrand, w[0], w[1], tol);
        }
    }
    total
}

/// dT/dt of the 1-D kinetic-energy balance at temperature T:
/// (k_B/2) dT/dt = <F(v) v> + (hbar^2 k^2 / 2m) <R_sc(v)>.
pub fn doppler_rate(temp: f64, detuning: f64, sat: f64, species: &SpeciesParams) -> f64 {
    let k = species.wavenumber();
    let cool = thermal_average(
        &|v| doppler_force(v, detuning, sat, species) * v,
        temp,
        detuning,
        species,
    );
    let heat = thermal_average(
        &|v| doppler_scattering_rate(v, detuning, sat, species),
        temp,
        detuning,
        species,
    ) * HBAR * HBAR * k * k / (2.0 * species.mass());
    2.0 / KB * (cool + heat)
}

/// Root of dT/dt between brackets spanning the Doppler limit, or None when
/// the balance has no stable equilibrium (dT/dt > 0 everywhere).
fn doppler_equilibrium(detuning: f64, sat: f64, species: &SpeciesParams) -> Option<f64> {
    if detuning >= 0.0 {
        return None;
    }
    let t_d = doppler_limit(species);
    let mut lo = t_d * 1e-3;
    let mut hi = t_d;
    // dT/dt > 0 at T -> 0 (recoil wins); walk hi up until the rate turns negative
    let mut f_hi = doppler_rate(hi, detuning, sat, species);
    let mut tries = 0;
    while f_hi > 0.0 {
        lo = hi;
        hi *= 4.0;
        f_hi = doppler_rate(hi, detuning, sat, species);
        tries += 1;
        if tries > 20 {
            return None;
        }
    }
    let mut f_lo = doppler_rate(lo, detuning, sat, species);
    if f_lo < 0.0 {
        return None; // no sign change: numerically degenerate bracket
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = doppler_rate(mid, detuning, sat, species);
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if (hi - lo) < 1e-6 * hi {
            break;
        }
    }
    let _ = (f_lo, f_hi);
    Some(0.5 * (lo + hi))
}

/// Integrate the thermal-ensemble temperature equation from `t0_k`.
pub fn doppler_cool_trajectory(
    t0_k: f64,
    detuning: f64,
    sat: f64,
    species: &SpeciesParams,
    t_span: (f64, f64),
    n_samples: usize,
) -> Result<DopplerResult> {
    if t0_k <= 0.0 {
        return Err(IonError::InvalidParameter(format!("T0 must be > 0, got {t0_k}")));
    }
    if sat < 0.0 {
        return Err(IonError::InvalidParameter(format!("saturation must be >= 0, got {sat}")));
    }
    if n_samples < 2 || !(t_span.1 > t_span.0) {
        return Err(IonError::InvalidParameter("need t1 > t0 and n_samples >= 2".into()));
    }
    let dt = (t_span.1 - t_span.0) / (n_samples - 1) as f64;
    let out_times: Vec<f64> = (0..n_samples).map(|i| t_span.0 + i as f64 * dt).collect();

    let mut rhs = |_t: f64, y: &DVector<f64>| {
        let temp = y[0].max(1e-12);
        DVector::from_element(1, doppler_rate(temp, detuning, sat, species))
    };
    let mut temps = Vec::with_capacity(n_samples);
    let opts = OdeOptions { rtol: 1e-8, atol: 1e-12, dt_max: f64::INFINITY };
    integrate(
        &mut rhs,
        t_span.0,
        DVector::from_element(1, t0_k),
        &out_times,
        &opts,
        &mut |_y| Ok(()),
        &mut |_k, _t, y: &DVector<f64>| {
            temps.push(y[0]);
            Ok(())
        },
    )?;

    let equilibrium_t = doppler_equilibrium(detuning, sat, species);
    let t_final = *temps.last().unwrap();
    let converged = equilibrium_t.map_or(false, |te| (t_final - te).abs() < 0.05 * te);
    Ok(DopplerResult {
        times: out_times,
        temperatures: temps,
        equilibrium_t,
        doppler_limit_t: doppler_limit(species),
        converged,
    })
}

// ---------------------------------------------------------------------------
// Resistive cooling
// ---------------------------------------------------------------------------

/// Charged particle oscillating between plates separated by 2 z0, damped
/// by image currents through an external resistor.
#[derive(Debug, Clone, Copy)]
pub struct ResistiveConfig {
    pub mass: f64,
    pub charge: f64,
    pub half_gap: f64,
    pub resistance: f64,
    pub initial_energy: f64,
}

impl ResistiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mass <= 0.0
            || self.charge <= 0.0
            || self.half_gap <= 0.0
            || self.resistance <= 0.0
            || self.initial_energy <= 0.0
        {
            return Err(IonError::InvalidParameter(
                "resistive config requires all fields positive".into(),
            ));
        }
        Ok(())
    }
}

/// tau = 4 m z0^2 / (q^2 R).
pub fn resistive_time_constant(cfg: &ResistiveConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(4.0 * cfg.mass * cfg.half_gap * cfg.half_gap / (cfg.charge * cfg.charge * cfg.resistance))
}

/// Image current induced by axial velocity v_z: i = q v_z / (2 z0).
pub fn resistive_induced_current(cfg: &ResistiveConfig, v_z: f64) -> f64 {
    cfg.charge * v_z / (2.0 * cfg.half_gap)
}

/// E(t) = E0 e^{-t/tau}.
pub fn resistive_energy(cfg: &ResistiveConfig, t: f64) -> Result<f64> {
    let tau = resistive_time_constant(cfg)?;
    Ok(cfg.initial_energy * (-t / tau).exp())
}

// ---------------------------------------------------------------------------
// Sideband cooling
// ---------------------------------------------------------------------------

/// Options for [`sideband_cool`] beyond the physical drive parameters.
#[derive(Debug, Clone)]
pub struct SidebandCoolOptions {
    /// Fock-space cutoff. P(n_max) must stay below 1e-4 at every sample.
    pub n_max: usize,
    pub n_samples: usize,
    /// When set, use the time-dependent first-order Hamiltonian with the
    /// carrier and off-resonant blue sideband terms retained instead of the
    /// static resonant red-sideband (Jaynes-Cummings) form.
    pub full_hamiltonian: bool,
}

impl Default for SidebandCoolOptions {
    fn default() -> Self {
        Self { n_max: 40, n_samples: 101, full_hamiltonian: false }
    }
}

/// Sideband-cooling run: the n-bar trajectory plus diagnostic notes.
#[derive(Debug)]
pub struct SidebandCoolResult {
    pub trajectory: Trajectory,
    pub nbar: Vec<f64>,
    /// Fock populations at the final sample.
    pub final_populations: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Resolved-sideband cooling of a thermal state on the master equation:
/// red-sideband drive, repump-broadened effective decay sqrt(Gamma_eff)
/// sigma_-, optional constant phenomenological heating (quanta/s).
pub fn sideband_cool(
    initial_nbar: f64,
    drive: &LaserDrive,
    trap: &TrapParams,
    repump_rate: f64,
    heating_rate: f64,
    duration: f64,
    opts: &SidebandCoolOptions,
) -> Result<SidebandCoolResult> {
    if initial_nbar < 0.0 || repump_rate <= 0.0 || heating_rate < 0.0 || duration <= 0.0 {
        return Err(IonError::InvalidParameter(
            "sideband_cool requires nbar >= 0, Gamma_eff > 0, heating >= 0, duration > 0".into(),
        ));
    }
    let space = HilbertSpace::two_level(opts.n_max);
    let mut warnings = Vec::new();
    let ld = drive.ldp * (2.0 * initial_nbar + 1.0).sqrt();
    if ld > 0.3 {
        warnings.push(format!(
            "Lamb-Dicke parameter check: eta sqrt(2 nbar + 1) = {ld:.3} is not << 1; \
             first-order sideband treatment is inaccurate"
        ));
    }

    let h = if opts.full_hamiltonian {
        let drive = drive.clone();
        let trap = trap.clone();
        HamiltonianSource::TimeDependent(Box::new(move |t| {
            full_interaction_hamiltonian(&drive, &trap, t, ExpansionOrder::FirstOrder, space)
                .expect("two-level space is valid for the interaction Hamiltonian")
        }))
    } else {
        HamiltonianSource::Static(red_sideband_hamiltonian(drive, space)?)
    };

    let (_, _, sm) = internal_operators(space)?;
    let mut channels =
        vec![CollapseChannel::new(sm.scale(C64::new(repump_rate.sqrt(), 0.0)), "repump")?];
    if heating_rate > 0.0 {
        let (a, adag) = ladder_operators(space);
        let r = C64::new(heating_rate.sqrt(), 0.0);
        channels.push(CollapseChannel::new(adag.scale(r), "heating_up")?);
        channels.push(CollapseChannel::new(a.scale(r), "heating_down")?);
    }

    let rho0 = thermal_state(initial_nbar, space, 0)?;
    let mut obs = vec![("nbar".to_string(), observables::number_operator(space))];
    obs.push(("p_top".to_string(), observables::fock_projector(space, opts.n_max)));
    let traj = lindblad_evolve(&h, &channels, &rho0, (0.0, duration), opts.n_samples, &obs)?;

    // the t = 0 sample reflects the caller's chosen initial state, not a
    // dynamical overflow, so the truncation guard starts at the next sample
    for (t, p) in traj.times.iter().zip(traj.series("p_top").unwrap()).skip(1) {
        if p.re > 1e-4 {
            return Err(IonError::Numerical(format!(
                "Fock truncation overflow: P(n_max={}) = {:.3e} at t = {t:.3e}",
                opts.n_max, p.re
            )));
        }
    }
    let nbar = traj.real_series("nbar").unwrap();
    let (_, final_populations) = crate::dynamics::phonon_statistics(&traj.final_state);
    Ok(SidebandCoolResult { trajectory: traj, nbar, final_populations, warnings })
}

// ---------------------------------------------------------------------------
// EIT spectra and cooling assessment
// ---------------------------------------------------------------------------

/// Normalized steady-state absorption vs probe detuning.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub delta3: Vec<f64>,
    /// Scattering rate normalized to its maximum over the grid.
    pub absorption: Vec<f64>,
}

/// Decay channels out of |2>: branching (1-beta) to |1> and beta to |3>.
pub fn eit_decay_channels(cfg: &EITConfig, space: HilbertSpace) -> Result<Vec<CollapseChannel>> {
    cfg.validate()?;
    let mut to1 = crate::CMatrix::zeros(3, 3);
    to1[(0, 1)] = C64::new(((1.0 - cfg.beta) * cfg.gamma).sqrt(), 0.0);
    let mut to3 = crate::CMatrix::zeros(3, 3);
    to3[(2, 1)] = C64::new((cfg.beta * cfg.gamma).sqrt(), 0.0);
    Ok(vec![
        CollapseChannel::new(crate::quantum::Operator::new(space, to1)?, "decay_to_1")?,
        CollapseChannel::new(crate::quantum::Operator::new(space, to3)?, "decay_to_3")?,
    ])
}

/// Steady-state absorption spectrum over `delta3_grid`. `threads` caps the
/// number of worker threads (1 = sequential); output order follows the
/// grid regardless of scheduling.
pub fn eit_absorption_spectrum(
    base: &EITConfig,
    delta3_grid: &[f64],
    threads: usize,
) -> Result<Spectrum> {
    base.validate()?;
    if delta3_grid.is_empty() || delta3_grid.iter().any(|d| !d.is_finite()) {
        return Err(IonError::InvalidParameter("delta3 grid must be finite and non-empty".into()));
    }
    let space = HilbertSpace::three_level_bare();
    let point = |d3: f64| -> Result<f64> {
        let cfg = EITConfig { delta3: d3, ..*base };
        let h = eit_hamiltonian(&cfg, space)?;
        let channels = eit_decay_channels(&cfg, space)?;
        let sol = steady_state(&h, &channels)?;
        crate::dynamics::scattering_rate(&sol.state, cfg.gamma, 1)
    };

    let threads = threads.max(1).min(delta3_grid.len());
    let rates: Vec<f64> = if threads == 1 {
        delta3_grid.iter().map(|&d| point(d)).collect::<Result<_>>()?
    } else {
        let chunk = delta3_grid.len().div_ceil(threads);
        let mut results: Vec<Result<Vec<f64>>> = Vec::new();
        std::thread::scope(|s| {
            let handles: Vec<_> = delta3_grid
                .chunks(chunk)
                .map(|block| s.spawn(move || block.iter().map(|&d| point(d)).collect()))
                .collect();
            for h in handles {
                results.push(h.join().expect("spectrum worker panicked"));
            }
        });
        let mut flat = Vec::with_capacity(delta3_grid.len());
        for r in results {
            flat.extend(r?);
        }
        flat
    };

    let peak = rates.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Err(IonError::Numerical("spectrum is identically zero".into()));
    }
    Ok(Spectrum {
        delta3: delta3_grid.to_vec(),
        absorption: rates.iter().map(|r| r / peak).collect(),
    })
}

/// Sideband-resolved figures of merit read off an absorption spectrum.
#[derive(Debug, Clone, Copy)]
pub struct EITAssessment {
    pub a_red: f64,
    pub a_carrier: f64,
    pub a_blue: f64,
    /// a_red / (a_carrier + a_blue); large when the red sideband sits on a
    /// sharp absorption feature while carrier and blue sideband are dark.
    pub selectivity: f64,
}

/// Sample the spectrum at carrier, carrier + nu (red sideband absorption)
//// and carrier - nu (blue). Refuses when the nearest grid sample is more
/// than 0.02 gamma away from a requested offset.
pub fn eit_cooling_assess(
    spectrum: &Spectrum,
    nu: f64,
    carrier_detuning: f64,
    gamma: f64,
) -> Result<EITAssessment> {
    if nu <= 0.0 || gamma <= 0.0 {
        return Err(IonError::InvalidParameter("nu and gamma must be > 0".into()));
    }
    let sample = |target: f64| -> Result<f64> {
        let (best, dist) = spectrum
            .delta3
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, (d - target).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or_else(|| IonError::InvalidParameter("empty spectrum".into()))?;
        if dist > 0.02 * gamma {
            return Err(IonError::InvalidParameter(format!(
                "spectrum grid too coarse: nearest sample to detuning {target:.4} is {dist:.4} away \
                 (> 0.02 gamma)"
            )));
        }
        Ok(spectrum.absorption[best])
    };
    let a_carrier = sample(carrier_detuning)?;
    let a_red = sample(carrier_detuning + nu)?;
    let a_blue = sample(carrier_detuning - nu)?;
    let selectivity = a_red / (a_carrier + a_blue).max(f64::MIN_POSITIVE);
    Ok(EITAssessment { a_red, a_carrier, a_blue, selectivity })
}

// ---------------------------------------------------------------------------
// Ion chains: normal modes and gradient-designed multi-mode cooling
// ---------------------------------------------------------------------------

/// Axial normal modes of a linear N-ion chain.
#[derive(Debug, Clone)]
pub struct ChainModes {
    /// Mode frequencies, rad/s, ascending (lowest = COM at nu).
    pub frequencies: Vec<f64>,
    /// Orthonormal mode vectors, one column per mode.
    pub mode_vectors: DMatrix<f64>,
    /// Equilibrium positions, m, ascending.
    pub equilibrium_positions: Vec<f64>,
}

/// Dimensionless equilibrium positions minimizing
/// sum u_i^2/2 + sum_{i<j} 1/|u_i - u_j| (Newton iteration).
fn chain_equilibrium(n: usize) -> Result<DVector<f64>> {
    let mut u =
        DVector::from_iterator(n, (0..n).map(|i| (i as f64 - 0.5 * (n - 1) as f64) * 1.5));
    for _ in 0..200 {
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            grad[i] = u[i];
            hess[(i, i)] = 1.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = u[i] - u[j];
                grad[i] -= d.signum() / (d * d);
                let c = 2.0 / d.abs().powi(3);
                hess[(i, i)] += c;
                hess[(i, j)] -= c;
            }
        }
        let gnorm = grad.norm();
        if gnorm < 1e-14 {
            return Ok(u);
        }
        let step = hess
            .lu()
            .solve(&grad)
            .ok_or_else(|| IonError::Numerical("singular chain Hessian in Newton step".into()))?;
        u -= step;
    }
    Err(IonError::Numerical(format!("chain equilibrium Newton failed to converge for N = {n}")))
}

/// Equilibrium positions and axial normal modes. Frequencies in units of
/// nu depend only on N; positions scale with (K q^2 / (m nu^2))^{1/3}.
pub fn chain_normal_modes(n: usize, nu: f64, mass: f64, charge: f64) -> Result<ChainModes> {
    if n == 0 {
        return Err(IonError::InvalidParameter("need at least one ion".into()));
    }
    if nu <= 0.0 || mass <= 0.0 {
        return Err(IonError::InvalidParameter("nu and mass must be > 0".into()));
    }
    if n > 1 && charge == 0.0 {
        return Err(IonError::InvalidParameter(
            "multi-ion chains require a non-zero charge".into(),
        ));
    }
    if n == 1 {
        return Ok(ChainModes {
            frequencies: vec![nu],
            mode_vectors: DMatrix::identity(1, 1),
            equilibrium_positions: vec![0.0],
        });
    }
    let u = chain_equilibrium(n)?;
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        hess[(i, i)] = 1.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let c = 2.0 / (u[i] - u[j]).abs().powi(3);
            hess[(i, i)] += c;
            hess[(i, j)] -= c;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(hess);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let frequencies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].sqrt() * nu).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        // fix the overall sign so output is deterministic
        if v.iter().cloned().fold(0.0, |acc: f64, x| if acc.abs() >= x.abs() { acc } else { x })
            < 0.0
        {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    let scale = (K_COULOMB * charge * charge / (mass * nu * nu)).powf(1.0 / 3.0);
    Ok(ChainModes {
        frequencies,
        mode_vectors: vectors,
        equilibrium_positions: u.iter().map(|x| x * scale).collect(),
    })
}

/// Per-ion resonance offsets so ion i's red sideband of mode i all sit on
/// one common drive frequency: delta omega_i = nu_i - nu_1 (zero for ion 1).
pub fn design_simultaneous_gradient(modes: &ChainModes) -> Vec<f64> {
    modes.frequencies.iter().map(|&f| f - modes.frequencies[0]).collect()
}

/// Per-mode n-bar trajectories from the multi-mode rate-equation model.
#[derive(Debug, Clone)]
pub struct MultimodeTrajectory {
    pub times: Vec<f64>,
    /// nbar[p] is the trajectory of mode p.
    pub nbar: Vec<Vec<f64>>,
}

/// Classical rate-equation model of simultaneous sideband cooling with a
/// single drive: mode p cools at (eta_p Omega)^2 / Gamma_eff suppressed by
/// the Lorentzian overlap of its shifted red sideband with the drive,
/// plus a constant heating term.
#[allow(clippy::too_many_arguments)]
pub fn multimode_cool_sim(
    modes: &ChainModes,
    offsets: &[f64],
    eta_eff: &[f64],
    rabi: f64,
    gamma_eff: f64,
    heating_rates: &[f64],
    initial_nbar: &[f64],
    duration: f64,
    n_samples: usize,
) -> Result<MultimodeTrajectory> {
    let n = modes.frequencies.len();
    if offsets.len() != n
        || eta_eff.len() != n
        || heating_rates.len() != n
        || initial_nbar.len() != n
    {
        return Err(IonError::DimensionMismatch(format!(
            "expected {n} offsets/couplings/heating rates/initial nbar values"
        )));
    }
    if rabi < 0.0 || gamma_eff <= 0.0 || duration <= 0.0 || n_samples < 2 {
        return Err(IonError::InvalidParameter(
            "need rabi >= 0, Gamma_eff > 0, duration > 0, n_samples >= 2".into(),
        ));
    }
    // cooling rate of mode p under the common drive
    let rates: Vec<f64> = (0..n)
        .map(|p| {
            let mismatch = offsets[p] - (modes.frequencies[p] - modes.frequencies[0]);
            let overlap = 1.0 / (1.0 + (2.0 * mismatch / gamma_eff).powi(2));
            (eta_eff[p] * rabi).powi(2) / gamma_eff * overlap
        })
        .collect();

    let dt = duration / (n_samples - 1) as f64;
    let out_times: Vec<f64> = (0..n_samples).map(|i| i as f64 * dt).collect();
    let mut rhs = |_t: f64, y: &DVector<f64>| {
        DVector::from_iterator(n, (0..n).map(|p| -rates[p] * y[p] + heating_rates[p]))
    };
    let mut nbar: Vec<Vec<f64>> = vec![Vec::with_capacity(n_samples); n];
    let opts = OdeOptions { rtol: 1e-10, atol: 1e-14, dt_max: f64::INFINITY };
    integrate(
        &mut rhs,
        0.0,
        DVector::from_column_slice(initial_nbar),
        &out_times,
        &opts,
        &mut |_y| Ok(()),
        &mut |_k, _t, y: &DVector<f64>| {
            for (p, series) in nbar.iter_mut().enumerate() {
                series.push(y[p]);
            }
            Ok(())
        },
    )?;
    Ok(MultimodeTrajectory { times: out_times, nbar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    const TWO_PI: f64 = 2.0 * PI;

    fn rb() -> SpeciesParams {
        SpeciesParams::from_species(species::lookup("rb87").unwrap())
    }

    fn na() -> SpeciesParams {
        SpeciesParams::from_species(species::lookup("na23").unwrap())
    }

    #[test]
    fn doppler_force_zero_at_rest_and_odd() {
        let s = rb();
        let d = -0.5 * s.gamma();
        assert_eq!(doppler_force(0.0, d, 0.1, &s), 0.0);
        for &v in &[0.01, 0.5, 3.0, 40.0] {
            let fp = doppler_force(v, d, 0.1, &s);
            let fm = doppler_force(-v, d, 0.1, &s);
            assert_relative_eq!(fp, -fm, max_relative = 1e-12);
        }
    }

    #[test]
    fn doppler_force_slope_sign_and_scale() {
        let s = rb();
        let dv = 1e-4;
        let slope = |det: f64| {
            (doppler_force(dv, det, 0.05, &s) - doppler_force(-dv, det, 0.05, &s)) / (2.0 * dv)
        };
        let red = slope(-0.5 * s.gamma());
        assert!(red < 0.0, "red-detuned slope {red} should be negative (friction)");
        // magnitude of order hbar k^2 times an order-unity saturation factor
        let scale = HBAR * s.wavenumber().powi(2);
        assert!(red.abs() > 1e-3 * scale && red.abs() < 10.0 * scale, "slope {red} vs {scale}");
        assert!(slope(0.5 * s.gamma()) > 0.0, "blue detuning must heat");
    }

    #[test]
    fn doppler_limit_values() {
        // hand evaluation: T = hbar gamma / 2 k_B
        let t_rb = doppler_limit(&rb());
        let t_na = doppler_limit(&na());
        assert_relative_eq!(t_rb, HBAR * TWO_PI * 6.07e6 / (2.0 * KB), max_relative = 1e-12);
        assert!((t_rb * 1e6 - 146.0).abs() < 2.0, "Rb limit {t_rb}");
        assert!((t_na * 1e6 - 235.0).abs() < 3.0, "Na limit {t_na}");
        // linear in gamma
        let s2 = SpeciesParams::new(rb().mass(), 780.24e-9, 2.0 * rb().gamma(), "x").unwrap();
        assert_relative_eq!(doppler_limit(&s2), 2.0 * t_rb, max_relative = 1e-14);
    }

    #[test]
    fn thermal_average_against_gaussian_moments() {
        // <v^2> = k_B T / m and <1> = 1 for any split placement
        let s = rb();
        let temp = 1e-3;
        let one = thermal_average(&|_v| 1.0, temp, -0.5 * s.gamma(), &s);
        assert_relative_eq!(one, 1.0, max_relative = 1e-9);
        let v2 = thermal_average(&|v| v * v, temp, -0.5 * s.gamma(), &s);
        assert_relative_eq!(v2, KB * temp / s.mass(), max_relative = 1e-8);
    }

    #[test]
    fn doppler_equilibrium_near_limit() {
        let s = rb();
        let te = doppler_equilibrium(-0.5 * s.gamma(), 0.05, &s).unwrap();
        let td = doppler_limit(&s);
        assert!(te > 0.5 * td && te < 2.0 * td, "equilibrium {te} vs limit {td}");
        assert!(doppler_equilibrium(0.5 * s.gamma(), 0.05, &s).is_none());
    }

    #[test]
    fn doppler_trajectory_from_hot_start() {
        // start well above equilibrium, cool into the band
        let s = rb();
        let d = -0.5 * s.gamma();
        let res = doppler_cool_trajectory(0.05, d, 0.1, &s, (0.0, 0.05), 21).unwrap();
        let te = res.equilibrium_t.unwrap();
        assert!(res.converged, "final T {} vs eq {te}", res.temperatures.last().unwrap());
        // monotone decrease down to the equilibrium band
        for w in res.temperatures.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) || (w[1] - te).abs() < 0.05 * te);
        }
        assert!(te >= res.doppler_limit_t * 0.5);
    }

    #[test]
    fn doppler_trajectory_blue_detuning_heats() {
        let s = rb();
        let res = doppler_cool_trajectory(1e-3, 0.5 * s.gamma(), 0.1, &s, (0.0, 1e-3), 11).unwrap();
        assert!(res.equilibrium_t.is_none());
        for w in res.temperatures.windows(2) {
            assert!(w[1] > w[0], "blue detuning should heat monotonically");
        }
    }

    #[test]
    fn doppler_limit_start_stays_in_band() {
        let s = rb();
        let d = -0.5 * s.gamma();
        let td = doppler_limit(&s);
        let res = doppler_cool_trajectory(td, d, 0.05, &s, (0.0, 0.02), 11).unwrap();
        for t in &res.temperatures {
            assert!(
                (*t - td).abs() < 0.5 * td,
                "T = {t} left the 50% band around the limit {td}"
            );
        }
    }

    #[test]
    fn resistive_proton_example() {
        // tau = 4 m z0^2 / q^2 R = 4 * 1.67e-27 * (5e-3)^2 / ((1.602e-19)^2 * 1e6)
        let cfg = ResistiveConfig {
            mass: 1.67e-27,
            charge: crate::constants::QE,
            half_gap: 5e-3,
            resistance: 1e6,
            initial_energy: 1e-20,
        };
        let tau = resistive_time_constant(&cfg).unwrap();
        assert_relative_eq!(tau, 6.51, max_relative = 0.01);
        // q -> 2q gives tau/4 exactly
        let cfg2 = ResistiveConfig { charge: 2.0 * cfg.charge, ..cfg };
        assert_relative_eq!(resistive_time_constant(&cfg2).unwrap(), tau / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn resistive_energy_semigroup() {
        let cfg = ResistiveConfig {
            mass: 1.67e-27,
            charge: crate::constants::QE,
            half_gap: 5e-3,
            resistance: 1e6,
            initial_energy: 2.5e-20,
        };
        let tau = resistive_time_constant(&cfg).unwrap();
        assert_relative_eq!(
            resistive_energy(&cfg, tau).unwrap(),
            cfg.initial_energy / std::f64::consts::E,
            max_relative = 1e-14
        );
        // E(t1 + t2) = E(t1) e^{-t2/tau}
        let (t1, t2) = (0.7 * tau, 1.3 * tau);
        let lhs = resistive_energy(&cfg, t1 + t2).unwrap();
        let rhs = resistive_energy(&cfg, t1).unwrap() * (-t2 / tau).exp();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        // induced current
        assert_relative_eq!(
            resistive_induced_current(&cfg, 100.0),
            cfg.charge * 100.0 / (2.0 * cfg.half_gap),
            max_relative = 1e-14
        );
    }

    #[test]
    fn sideband_cool_ground_state_stays_cold() {
        let nu = TWO_PI * 1.0e5;
        let trap = TrapParams::new(nu, 40.0 * crate::constants::AMU).unwrap();
        let drive = LaserDrive::new(0.1 * nu, -nu, 0.0, 0.1).unwrap();
        let opts = SidebandCoolOptions { n_max: 10, n_samples: 11, ..Default::default() };
        let res =
            sideband_cool(0.0, &drive, &trap, 0.05 * nu, 0.0, 200.0 / nu, &opts).unwrap();
        for nb in &res.nbar {
            assert!(*nb < 1e-6, "ground state heated to nbar = {nb}");
        }
    }

    #[test]
    fn sideband_cool_matches_rate_equation_oracle() {
        // deep weak-coupling regime: eta Omega sqrt(n) << Gamma_eff, so the
        // adiabatic rate model dnbar/dt = -(eta Omega)^2 / Gamma_eff * nbar
        // is an independent oracle for the master equation.
        let nu = TWO_PI * 1.0e5;
        let eta = 0.1;
        let omega = 0.02 * nu;
        let gamma_eff = 0.05 * nu;
        let trap = TrapParams::new(nu, 40.0 * crate::constants::AMU).unwrap();
        let drive = LaserDrive::new(omega, -nu, 0.0, eta).unwrap();
        let w = (eta * omega).powi(2) / gamma_eff;
        let duration = 2.5 / w;
        let opts = SidebandCoolOptions { n_max: 25, n_samples: 21, ..Default::default() };
        let res = sideband_cool(2.0, &drive, &trap, gamma_eff, 0.0, duration, &opts).unwrap();
        assert!(res.warnings.is_empty());
        for (t, nb) in res.trajectory.times.iter().zip(&res.nbar) {
            let oracle = 2.0 * (-w * t).exp();
            assert!(
                (nb - oracle).abs() < 0.10 * oracle.max(0.05),
                "t = {t:.3e}: nbar {nb:.4} vs oracle {oracle:.4}"
            );
        }
        // non-increasing without heating
        for pair in res.nbar.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-6);
        }
    }

    #[test]
    fn sideband_cool_heating_only_is_linear() {
        let nu = TWO_PI * 1.0e5;
        let trap = TrapParams::new(nu, 40.0 * crate::constants::AMU).unwrap();
        let drive = LaserDrive::new(0.0, -nu, 0.0, 0.1).unwrap();
        let rate = 20.0 * nu / TWO_PI / 1e5; // quanta/s, small vs duration
        let duration = 400.0 / nu;
        let opts = SidebandCoolOptions { n_max: 16, n_samples: 9, ..Default::default() };
        let res = sideband_cool(0.5, &drive, &trap, 0.05 * nu, rate, duration, &opts).unwrap();
        for (t, nb) in res.trajectory.times.iter().zip(&res.nbar) {
            // 1e-5 slack absorbs the truncated thermal tail of the input
            assert_abs_diff_eq!(*nb, 0.5 + rate * t, epsilon = 1e-5);
        }
    }

    #[test]
    fn sideband_cool_warns_outside_lamb_dicke() {
        let nu = TWO_PI * 1.0e5;
        let trap = TrapParams::new(nu, 40.0 * crate::constants::AMU).unwrap();
        let drive = LaserDrive::new(0.05 * nu, -nu, 0.0, 0.4).unwrap();
        let opts = SidebandCoolOptions { n_max: 18, n_samples: 5, ..Default::default() };
        let res = sideband_cool(1.0, &drive, &trap, 0.05 * nu, 0.0, 10.0 / nu, &opts).unwrap();
        assert_eq!(res.warnings.len(), 1);
        assert!(res.warnings[0].contains("Lamb-Dicke"));
    }

    #[test]
    fn sideband_cool_truncation_overflow_errors() {
        let nu = TWO_PI * 1.0e5;
        let trap = TrapParams::new(nu, 40.0 * crate::constants::AMU).unwrap();
        let drive = LaserDrive::new(0.1 * nu, -nu, 0.0, 0.1).unwrap();
        // nbar = 3 thermal on a 5-level ladder puts far too much weight at the top
        let opts = SidebandCoolOptions { n_max: 5, n_samples: 5, ..Default::default() };
        let err = sideband_cool(3.0, &drive, &trap, 0.05 * nu, 0.0, 10.0 / nu, &opts);
        match err {
            Err(IonError::Numerical(msg)) => assert!(msg.contains("truncation"), "{msg}"),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    fn fig6_config(omega3: f64, delta1: f64) -> EITConfig {
        EITConfig { omega1: 1.0, omega3, delta1, delta3: 0.0, gamma: 1.0, beta: 0.5 }
    }

    #[test]
    fn eit_spectrum_dark_resonance_and_doublet() {
        // strong coupling on resonance: dark point at two-photon resonance,
        // Autler-Townes doublet at +/- Omega1/2
        let grid: Vec<f64> = (0..=800).map(|i| -2.0 + i as f64 * 4.0 / 800.0).collect();
        let spec = eit_absorption_spectrum(&fig6_config(0.01, 0.0), &grid, 1).unwrap();
        let at_zero = spec.absorption[400];
        assert!(at_zero < 1e-6, "absorption at two-photon resonance: {at_zero}");
        // peak positions
        let imax = spec
            .absorption
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(
            (spec.delta3[imax].abs() - 0.5).abs() < 0.02,
            "peak at {} not at +/-0.5",
            spec.delta3[imax]
        );
        // mirror symmetry
        for i in 0..spec.delta3.len() {
            let j = spec.delta3.len() - 1 - i;
            assert_abs_diff_eq!(spec.absorption[i], spec.absorption[j], epsilon = 1e-6);
        }
    }

    #[test]
    fn eit_spectrum_zero_follows_delta1() {
        let grid: Vec<f64> = (0..=600).map(|i| -1.0 + i as f64 * 4.0 / 600.0).collect();
        let spec = eit_absorption_spectrum(&fig6_config(0.2, 1.0), &grid, 1).unwrap();
        let imin = spec
            .absorption
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(
            (spec.delta3[imin] - 1.0).abs() < 0.01,
            "dark point at {} != 1.0",
            spec.delta3[imin]
        );
    }

    #[test]
    fn eit_spectrum_lorentzian_limit() {
        // Omega1 -> 0 with the 1-2 resonance parked outside the grid and a
        // closed probe cycle (beta = 1): the dark structure disappears and a
        // single power-broadened two-level Lorentzian remains at delta3 = 0.
        let cfg =
            EITConfig { omega1: 0.01, omega3: 0.05, delta1: 3.0, delta3: 0.0, gamma: 1.0, beta: 1.0 };
        let grid: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 * 2.0 / 400.0).collect();
        let spec = eit_absorption_spectrum(&cfg, &grid, 1).unwrap();
        let imax = spec
            .absorption
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(spec.delta3[imax].abs() < 0.02, "peak at {}", spec.delta3[imax]);
        // driven two-level steady state: rho_22 ~ 1/(delta3^2 + omega3^2/2 + 1/4)
        let w2 = cfg.omega3 * cfg.omega3 / 2.0 + 0.25;
        for (d, a) in spec.delta3.iter().zip(&spec.absorption) {
            let lorentz = w2 / (d * d + w2);
            assert_abs_diff_eq!(*a, lorentz, epsilon = 0.02);
        }
    }

    #[test]
    fn eit_spectrum_parallel_matches_sequential() {
        let grid: Vec<f64> = (0..=100).map(|i| -2.0 + i as f64 * 4.0 / 100.0).collect();
        let cfg = fig6_config(0.2, 1.0);
        let seq = eit_absorption_spectrum(&cfg, &grid, 1).unwrap();
        let par = eit_absorption_spectrum(&cfg, &grid, 4).unwrap();
        for (a, b) in seq.absorption.iter().zip(&par.absorption) {
            assert_eq!(a, b, "parallel sweep must be bitwise deterministic");
        }
    }

    #[test]
    fn eit_assess_selectivity() {
        // Carrier parked on the dark point at delta3 = 1, with the trap
        // frequency placing the red sideband near the sharp bright feature.
        let grid: Vec<f64> = (0..=3000).map(|i| -0.5 + i as f64 * 3.0 / 3000.0).collect();
        let spec = eit_absorption_spectrum(&fig6_config(0.2, 1.0), &grid, 1).unwrap();
        // narrow dressed-state peak sits at (delta1 + sqrt(delta1^2 + omega1^2))/2
        let nu = (1.0 + 2.0f64.sqrt()) / 2.0 - 1.0;
        let a = eit_cooling_assess(&spec, nu, 1.0, 1.0).unwrap();
        assert!(a.a_carrier < 1e-4, "carrier absorption {}", a.a_carrier);
        // blue sideband still sees the broad dressed peak's shoulder, so the
        // ratio is large but not huge at these drive strengths
        assert!(a.selectivity > 5.0, "selectivity {}", a.selectivity);
        // swapped sidebands flag misconfiguration
        let b = eit_cooling_assess(&spec, nu, 1.0 + nu, 1.0).unwrap();
        assert!(b.selectivity < 1.0, "misconfigured selectivity {}", b.selectivity);
    }

    #[test]
    fn eit_assess_rejects_coarse_grid() {
        let grid: Vec<f64> = (0..=10).map(|i| -2.0 + i as f64 * 4.0 / 10.0).collect();
        let spec = eit_absorption_spectrum(&fig6_config(0.2, 1.0), &grid, 1).unwrap();
        assert!(eit_cooling_assess(&spec, 0.13, 1.0, 1.0).is_err());
    }

    #[test]
    fn chain_modes_small_n() {
        let nu = TWO_PI * 1.0e6;
        let m = 40.0 * crate::constants::AMU;
        let q = crate::constants::QE;
        let one = chain_normal_modes(1, nu, m, q).unwrap();
        assert_relative_eq!(one.frequencies[0], nu, max_relative = 1e-12);

        let two = chain_normal_modes(2, nu, m, q).unwrap();
        assert_relative_eq!(two.frequencies[0], nu, max_relative = 1e-9);
        assert_relative_eq!(two.frequencies[1], 3.0f64.sqrt() * nu, max_relative = 1e-9);

        let three = chain_normal_modes(3, nu, m, q).unwrap();
        assert_relative_eq!(three.frequencies[0], nu, max_relative = 1e-9);
        assert_relative_eq!(three.frequencies[1], 3.0f64.sqrt() * nu, max_relative = 1e-6);
        assert_relative_eq!(three.frequencies[2], (29.0f64 / 5.0).sqrt() * nu, max_relative = 1e-6);
    }

    #[test]
    fn chain_modes_orthonormal_and_scale_invariant() {
        let nu = TWO_PI * 5.0e5;
        let m = 171.0 * crate::constants::AMU;
        let q = crate::constants::QE;
        let modes = chain_normal_modes(4, nu, m, q).unwrap();
        let gram = modes.mode_vectors.transpose() * &modes.mode_vectors;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(i, j)], expect, epsilon = 1e-10);
            }
        }
        // dimensionless frequencies independent of mass and charge
        let other = chain_normal_modes(4, nu, 2.0 * m, 3.0 * q).unwrap();
        for (a, b) in modes.frequencies.iter().zip(&other.frequencies) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // COM mode displaces all ions equally
        let com = modes.mode_vectors.column(0);
        for x in com.iter() {
            assert_relative_eq!(x.abs(), 0.5, max_relative = 1e-9);
        }
        // positions ascending, symmetric about the origin
        for w in modes.equilibrium_positions.windows(2) {
            assert!(w[1] > w[0]);
        }
        let mid: f64 = modes.equilibrium_positions.iter().sum();
        assert_abs_diff_eq!(mid, 0.0, epsilon = 1e-20);
    }

    #[test]
    fn chain_two_ion_spacing_analytic() {
        // two ions sit at u = +/- (1/4)^{1/3} in scaled units
        let nu = TWO_PI * 1.0e6;
        let m = 40.0 * crate::constants::AMU;
        let q = crate::constants::QE;
        let modes = chain_normal_modes(2, nu, m, q).unwrap();
        let scale = (K_COULOMB * q * q / (m * nu * nu)).powf(1.0 / 3.0);
        let expect = 0.25f64.powf(1.0 / 3.0) * scale;
        assert_relative_eq!(modes.equilibrium_positions[1], expect, max_relative = 1e-10);
        assert_relative_eq!(modes.equilibrium_positions[0], -expect, max_relative = 1e-10);
    }

    #[test]
    fn gradient_design_equalizes_sidebands() {
        let nu = TWO_PI * 1.0e6;
        let modes =
            chain_normal_modes(3, nu, 171.0 * crate::constants::AMU, crate::constants::QE)
                .unwrap();
        let offsets = design_simultaneous_gradient(&modes);
        assert_eq!(offsets[0], 0.0);
        assert_relative_eq!(offsets[1], (3.0f64.sqrt() - 1.0) * nu, max_relative = 1e-9);
        // omega_i - nu_i identical for all i, exactly by construction
        for (off, f) in offsets.iter().zip(&modes.frequencies) {
            assert_eq!(off - (f - modes.frequencies[0]), 0.0);
        }
    }

    #[test]
    fn multimode_designed_offsets_cool_everything() {
        let nu = TWO_PI * 1.0e5;
        let modes =
            chain_normal_modes(3, nu, 171.0 * crate::constants::AMU, crate::constants::QE)
                .unwrap();
        let offsets = design_simultaneous_gradient(&modes);
        let eta = [0.1; 3];
        let nbar0 = [2.0; 3];
        let heat = [0.0; 3];
        let rabi = 0.1 * nu;
        let gamma_eff = 0.05 * nu;
        let duration = 3000.0 / nu;
        let res = multimode_cool_sim(
            &modes, &offsets, &eta, rabi, gamma_eff, &heat, &nbar0, duration, 21,
        )
        .unwrap();
        let w = (0.1f64 * rabi).powi(2) / gamma_eff;
        for p in 0..3 {
            let end = *res.nbar[p].last().unwrap();
            assert!(end < 0.1, "mode {p} ended at nbar {end}");
            // analytic solution of the linear rate equation as oracle
            let analytic = 2.0 * (-w * duration).exp();
            assert_relative_eq!(end, analytic, max_relative = 1e-6);
        }
    }

    #[test]
    fn multimode_zero_offsets_cool_only_resonant_mode() {
        let nu = TWO_PI * 1.0e5;
        let modes =
            chain_normal_modes(3, nu, 171.0 * crate::constants::AMU, crate::constants::QE)
                .unwrap();
        let offsets = [0.0; 3];
        let eta = [0.1; 3];
        let nbar0 = [2.0; 3];
        let heat = [0.0; 3];
        let res = multimode_cool_sim(
            &modes, &offsets, &eta, 0.1 * nu, 0.05 * nu, &heat, &nbar0, 3000.0 / nu, 21,
        )
        .unwrap();
        assert!(*res.nbar[0].last().unwrap() < 0.1);
        for p in 1..3 {
            let end = *res.nbar[p].last().unwrap();
            assert!(
                (nbar0[p] - end).abs() < 0.1 * nbar0[p],
                "off-resonant mode {p} moved from {} to {end}",
                nbar0[p]
            );
        }
    }

    #[test]
    fn multimode_zero_coupling_is_static() {
        let nu = TWO_PI * 1.0e5;
        let modes =
            chain_normal_modes(2, nu, 40.0 * crate::constants::AMU, crate::constants::QE).unwrap();
        let res = multimode_cool_sim(
            &modes,
            &[0.0, 0.0],
            &[0.0, 0.0],
            0.1 * nu,
            0.05 * nu,
            &[0.0, 0.0],
            &[1.5, 2.5],
            1000.0 / nu,
            5,
        )
        .unwrap();
        for t in 0..5 {
            assert_abs_diff_eq!(res.nbar[0][t], 1.5, epsilon = 1e-12);
            assert_abs_diff_eq!(res.nbar[1][t], 2.5, epsilon = 1e-12);
        }
    }
}
