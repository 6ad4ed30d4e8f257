//! Hamiltonian builders: carrier and sideband interaction Hamiltonians,
//! the full exponential form, MAGIC effective Lamb-Dicke coupling, Raman
//! beam geometry and the semiclassical three-level EIT Hamiltonian.
//!
//! All builders return operators in energy units (J) when driven with
//! angular frequencies in rad/s; dividing by ħ recovers the stated
//! frequency-domain forms.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::constants::HBAR;
use crate::quantum::{
    internal_operators, ladder_operators, matrix_exponential, tensor, HilbertSpace, Operator,
};
use crate::{C64, IonError, Result};

/// Harmonic trap parameters. `z0` is derived, never stored independently.
#[derive(Debug, Clone, Copy)]
pub struct TrapParams {
    nu: f64,
    mass: f64,
}

impl TrapParams {
    pub fn new(nu: f64, mass: f64) -> Result<Self> {
        if nu <= 0.0 || mass <= 0.0 {
            return Err(IonError::InvalidParameter(format!(
                "trap requires nu > 0 and mass > 0, got nu={nu}, mass={mass}"
            )));
        }
        Ok(Self { nu, mass })
    }

    /// Secular angular frequency (rad/s).
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Ion mass (kg).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// RMS ground-state extension z0 = sqrt(hbar / 2 m nu) (m).
    pub fn z0(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.nu)).sqrt()
    }
}

/// A classical laser drive on the two-level transition.
#[derive(Debug, Clone, Copy)]
pub struct LaserDrive {
    pub rabi: f64,
    pub detuning: f64,
    pub phase: f64,
    pub ldp: f64,
}

impl LaserDrive {
    pub fn new(rabi: f64, detuning: f64, phase: f64, ldp: f64) -> Result<Self> {
        if rabi < 0.0 || ldp < 0.0 {
            return Err(IonError::InvalidParameter(format!(
                "drive requires rabi >= 0 and ldp >= 0, got rabi={rabi}, ldp={ldp}"
            )));
        }
        Ok(Self { rabi, detuning, phase, ldp })
    }
}

/// Effective Lamb-Dicke coupling under a magnetic field gradient:
/// eta_eff = eta + i kappa = eta_prime e^{i theta}.
#[derive(Debug, Clone, Copy)]
pub struct MagicParams {
    pub eta: f64,
    pub kappa: f64,
    pub theta: f64,
    pub eta_prime: f64,
}

impl MagicParams {
    /// eta_eff as a complex number.
    pub fn eta_eff(&self) -> C64 {
        C64::new(self.eta, self.kappa)
    }
}

/// Three-level system driven by a strong field (1-2) and a probe (3-2),
/// all rates in units of the total decay rate of level |2>.
#[derive(Debug, Clone, Copy)]
pub struct EITConfig {
    pub omega1: f64,
    pub omega3: f64,
    pub delta1: f64,
    pub delta3: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl EITConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma <= 0.0 {
            return Err(IonError::InvalidParameter("gamma must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(IonError::InvalidParameter(format!(
                "beta must lie in [0,1], got {}",
                self.beta
            )));
        }
        if self.omega1 < 0.0 || self.omega3 < 0.0 {
            return Err(IonError::InvalidParameter("Rabi frequencies must be >= 0".into()));
        }
        Ok(())
    }
}

fn require_two_level(space: HilbertSpace) -> Result<()> {
    if space.internal_dim() != 2 {
        return Err(IonError::InvalidParameter(format!(
            "two-level space required, internal_dim = {}",
            space.internal_dim()
        )));
    }
    Ok(())
}

/// H = (hbar Omega / 2)(sigma_+ + sigma_-): resonant carrier drive.
pub fn carrier_hamiltonian(drive: &LaserDrive, space: HilbertSpace) -> Result<Operator> {
    require_two_level(space)?;
    let (_, sp, sm) = internal_operators(space)?;
    Ok((&sp + &sm).scale(C64::new(HBAR * drive.rabi / 2.0, 0.0)))
}

/// H = (hbar Omega eta / 2)(a^dag sigma_+ + a sigma_-): anti-Jaynes-Cummings.
pub fn blue_sideband_hamiltonian(drive: &LaserDrive, space: HilbertSpace) -> Result<Operator> {
    require_two_level(space)?;
    let (_, sp, sm) = internal_operators(space)?;
    let (a, adag) = ladder_operators(space);
    let h = &(&adag * &sp) + &(&a * &sm);
    Ok(h.scale(C64::new(HBAR * drive.rabi * drive.ldp / 2.0, 0.0)))
}

/// H = (hbar Omega eta / 2)(a sigma_+ + a^dag sigma_-): Jaynes-Cummings.
pub fn red_sideband_hamiltonian(drive: &LaserDrive, space: HilbertSpace) -> Result<Operator> {
    require_two_level(space)?;
    let (_, sp, sm) = internal_operators(space)?;
    let (a, adag) = ladder_operators(space);
    let h = &(&a * &sp) + &(&adag * &sm);
    Ok(h.scale(C64::new(HBAR * drive.rabi * drive.ldp / 2.0, 0.0)))
}

/// Expansion order of the displacement factor in the interaction-picture
/// Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    /// Full exponential e^{i eta (a~ + a~^dag)}.
    Exact,
    /// 1 + i eta (a e^{-i nu t} + a^dag e^{i nu t}).
    FirstOrder,
}

/// Interaction-picture Hamiltonian at time `t`:
/// H(t) = (hbar Omega / 2) e^{i eta (a~ + a~^dag)} sigma_+ e^{-i(Delta t + phi)} + H.c.
/// with a~ = a e^{-i nu t}. Hermitian at every t by construction.
pub fn full_interaction_hamiltonian(
    drive: &LaserDrive,
    trap: &TrapParams,
    t: f64,
    order: ExpansionOrder,
    space: HilbertSpace,
) -> Result<Operator> {
    require_two_level(space)?;
    let (_, sp, _) = internal_operators(space)?;
    let (a, adag) = ladder_operators(space);
    let nu = trap.nu();
    let phase_m = C64::new(0.0, -nu * t).exp();
    // a~ + a~^dag, Hermitian at each t
    let x_t = &a.scale(phase_m) + &adag.scale(phase_m.conj());
    let disp = match order {
        ExpansionOrder::Exact => matrix_exponential(&x_t, C64::new(0.0, drive.ldp))?,
        ExpansionOrder::FirstOrder => {
            let eye = Operator::identity(space);
            &eye + &x_t.scale(C64::new(0.0, drive.ldp))
        }
    };
    let laser_phase = C64::new(0.0, -(drive.detuning * t + drive.phase)).exp();
    let half = (&disp * &sp).scale(C64::new(HBAR * drive.rabi / 2.0, 0.0) * laser_phase);
    Ok(&half + &half.dagger())
}

/// Sideband branch selector for [`rabi_coupling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Carrier,
    Blue,
    Red,
}

/// Modified Rabi frequency for transitions out of |g, n> (rad/s):
/// carrier Omega (1 - eta^2 n), blue eta Omega sqrt(n+1), red eta Omega sqrt(n).
pub fn rabi_coupling(n: usize, branch: Branch, drive: &LaserDrive) -> f64 {
    let eta = drive.ldp;
    let omega = drive.rabi;
    match branch {
        Branch::Carrier => omega * (1.0 - eta * eta * n as f64),
        Branch::Blue => eta * omega * ((n + 1) as f64).sqrt(),
        Branch::Red => eta * omega * (n as f64).sqrt(),
    }
}

/// Gradient coupling kappa = z0 |d omega / dz| / nu.
pub fn magic_kappa(trap: &TrapParams, freq_gradient: f64) -> f64 {
    trap.z0() * freq_gradient / trap.nu()
}

/// Same kappa computed through the equilibrium-shift route
/// Delta z / z0 with Delta z = F / (m nu^2) and F = (hbar/2)|d omega / dz|.
pub fn magic_kappa_via_shift(trap: &TrapParams, freq_gradient: f64) -> f64 {
    let force = 0.5 * HBAR * freq_gradient;
    let delta_z = force / (trap.mass() * trap.nu() * trap.nu());
    delta_z / trap.z0()
}

/// eta_eff = eta + i kappa = eta' e^{i theta}.
pub fn effective_ldp(eta: f64, kappa: f64) -> Result<MagicParams> {
    if eta < 0.0 || kappa < 0.0 {
        return Err(IonError::InvalidParameter(format!(
            "effective_ldp requires eta, kappa >= 0, got eta={eta}, kappa={kappa}"
        )));
    }
    Ok(MagicParams { eta, kappa, theta: kappa.atan2(eta), eta_prime: eta.hypot(kappa) })
}

/// MAGIC interaction Hamiltonian at time `t`, first order in eta_eff:
/// H = (hbar Omega_R/2) [ e^{-i(Delta t + phi)} sigma_+
///       (1 + i eta_eff (a^dag e^{i nu_z t} + a e^{-i nu_z t})) ] + H.c.
pub fn magic_hamiltonian(
    rabi: f64,
    magic: &MagicParams,
    detuning: f64,
    nu_z: f64,
    phi: f64,
    t: f64,
    space: HilbertSpace,
) -> Result<Operator> {
    require_two_level(space)?;
    let (_, sp, _) = internal_operators(space)?;
    let (a, adag) = ladder_operators(space);
    let up = C64::new(0.0, nu_z * t).exp();
    let motion = &adag.scale(up) + &a.scale(up.conj());
    let eye = Operator::identity(space);
    let bracket = &eye + &motion.scale(C64::new(0.0, 1.0) * magic.eta_eff());
    let laser_phase = C64::new(0.0, -(detuning * t + phi)).exp();
    let half = (&sp * &bracket).scale(C64::new(HBAR * rabi / 2.0, 0.0) * laser_phase);
    Ok(&half + &half.dagger())
}

/// Effective Lamb-Dicke parameter of a stimulated Raman pair:
/// eta = |(k1 - k2) . axis| z0, with k2 the stimulated-emission beam.
pub fn raman_effective_ldp(
    k1: [f64; 3],
    k2: [f64; 3],
    axis: [f64; 3],
    trap: &TrapParams,
) -> Result<f64> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(IonError::InvalidParameter(format!(
            "axis must be a unit vector, |axis| = {norm}"
        )));
    }
    let proj: f64 = (0..3).map(|i| (k1[i] - k2[i]) * axis[i]).sum();
    Ok(proj.abs() * trap.z0())
}

/// Semiclassical rotating-frame three-level Hamiltonian:
/// H/hbar = -Delta1 |2><2| + (Delta3 - Delta1)|3><3|
///          + (Omega1/2)(|2><1| + |1><2|) + (Omega3/2)(|2><3| + |3><2|).
/// Basis order |1>, |2>, |3>; requires a bare 3-level space.
pub fn eit_hamiltonian(cfg: &EITConfig, space: HilbertSpace) -> Result<Operator> {
    cfg.validate()?;
    if space.internal_dim() != 3 || space.n_max() != 0 {
        return Err(IonError::InvalidParameter(
            "eit_hamiltonian requires a bare 3-level space (internal_dim = 3, n_max = 0)".into(),
        ));
    }
    let r = |x: f64| C64::new(x, 0.0);
    let mut h = DMatrix::<C64>::zeros(3, 3);
    h[(1, 1)] = r(-cfg.delta1);
    h[(2, 2)] = r(cfg.delta3 - cfg.delta1);
    h[(1, 0)] = r(cfg.omega1 / 2.0);
    h[(0, 1)] = r(cfg.omega1 / 2.0);
    h[(1, 2)] = r(cfg.omega3 / 2.0);
    h[(2, 1)] = r(cfg.omega3 / 2.0);
    Operator::hermitian(space, h * r(HBAR))
}

/// Dressed states of the driven {|1>, |2>} block. Returns eigenpairs
/// (energies ascending, in the same angular-frequency units as the inputs)
/// of the 2x2 block [[0, Omega1/2], [Omega1/2, -Delta1]].
pub fn dressed_states(omega1: f64, delta1: f64) -> ([f64; 2], [Vector2<f64>; 2]) {
    let h = Matrix2::new(0.0, omega1 / 2.0, omega1 / 2.0, -delta1);
    let eig = h.symmetric_eigen();
    let mut idx = [0usize, 1usize];
    if eig.eigenvalues[0] > eig.eigenvalues[1] {
        idx = [1, 0];
    }
    let energies = [eig.eigenvalues[idx[0]], eig.eigenvalues[idx[1]]];
    let states = [
        Vector2::new(eig.eigenvectors[(0, idx[0])], eig.eigenvectors[(1, idx[0])]),
        Vector2::new(eig.eigenvectors[(0, idx[1])], eig.eigenvectors[(1, idx[1])]),
    ];
    (energies, states)
}

/// Conserved quantity of the blue-sideband (anti-JC) Hamiltonian:
/// Q = a^dag a - |e><e|.
pub fn blue_conserved_charge(space: HilbertSpace) -> Result<Operator> {
    let (a, adag) = ladder_operators(space);
    let proj_e = excited_projector(space)?;
    Ok(&(&adag * &a) - &proj_e)
}

/// Conserved quantity of the red-sideband (JC) Hamiltonian:
/// Q = a^dag a + |e><e|.
pub fn red_conserved_charge(space: HilbertSpace) -> Result<Operator> {
    let (a, adag) = ladder_operators(space);
    let proj_e = excited_projector(space)?;
    Ok(&(&adag * &a) + &proj_e)
}

/// |e><e| ⊗ I on a two-level composite space.
pub fn excited_projector(space: HilbertSpace) -> Result<Operator> {
    require_two_level(space)?;
    let mut pe = DMatrix::<C64>::zeros(2, 2);
    pe[(1, 1)] = C64::new(1.0, 0.0);
    let eye = DMatrix::<C64>::identity(space.motional_dim(), space.motional_dim());
    tensor(space, &pe, &eye)
}
