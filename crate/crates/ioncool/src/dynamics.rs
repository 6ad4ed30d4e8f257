//! Time evolution and steady states: unitary Schrödinger propagation,
//! Lindblad master-equation integration, Liouvillian steady-state solving
//! and observable extraction.

use crate::constants::HBAR;
use crate::gemm::{gemm, gemm_acc};
use crate::ode::{integrate, OdeOptions};
use crate::quantum::{
    expm, ladder_operators, max_abs, min_eigenvalue, HilbertSpace, Operator, QuantumState,
    StateData,
};
use crate::{C64, CMatrix, CVector, IonError, Result};

const TRACE_TOL: f64 = 1e-8;

/// Jump operator pre-scaled by the square root of its rate.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    operator: Operator,
    label: String,
}

impl CollapseChannel {
    pub fn new(operator: Operator, label: impl Into<String>) -> Result<Self> {
        if operator.matrix().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(IonError::InvalidParameter("collapse operator has non-finite entries".into()));
        }
        Ok(Self { operator, label: label.into() })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Hamiltonian supplied to the evolution routines: either a constant
/// operator or a time-dependent builder.
pub enum HamiltonianSource<'a> {
    Static(Operator),
    TimeDependent(Box<dyn Fn(f64) -> Operator + 'a>),
}

impl<'a> HamiltonianSource<'a> {
    fn space(&self) -> HilbertSpace {
        match self {
            Self::Static(op) => op.space(),
            Self::TimeDependent(f) => f(0.0).space(),
        }
    }

    fn at(&self, t: f64) -> Operator {
        match self {
            Self::Static(op) => op.clone(),
            Self::TimeDependent(f) => f(t),
        }
    }
}

/// Named observable series sampled on a uniform time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    observables: Vec<(String, Vec<C64>)>,
    pub final_state: QuantumState,
}

impl Trajectory {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.observables.iter().map(|(n, _)| n.as_str())
    }

    pub fn series(&self, name: &str) -> Option<&[C64]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn real_series(&self, name: &str) -> Option<Vec<f64>> {
        self.series(name).map(|s| s.iter().map(|z| z.re).collect())
    }
}

/// Uniform output grid over `t_span` with `n_samples` points (endpoints
/// included; n_samples >= 2).
fn output_grid(t_span: (f64, f64), n_samples: usize) -> Result<Vec<f64>> {
    let (t0, t1) = t_span;
    if !(t1 > t0) || n_samples < 2 {
        return Err(IonError::InvalidParameter(format!(
            "need t1 > t0 and n_samples >= 2, got span ({t0}, {t1}) with {n_samples} samples"
        )));
    }
    let dt = (t1 - t0) / (n_samples - 1) as f64;
    Ok((0..n_samples).map(|k| t0 + k as f64 * dt).collect())
}

fn check_hermitian(h: &CMatrix, _t: f64) -> Result<()> {
    let dev = max_abs(&(h - h.adjoint()));
    let scale = max_abs(h).max(1.0);
    if dev > 1e-12 * scale {
        return Err(IonError::NotHermitian(dev));
    }
    Ok(())
}

/// Unitary Schrödinger evolution of a pure state. Propagation is by the
/// exponential of H evaluated at the midpoint of each (sub)step, which is
/// exact for time-independent H and second order in the step otherwise;
/// time-dependent segments use adaptive step doubling.
pub fn evolve_schrodinger(
    h: &HamiltonianSource,
    psi0: &QuantumState,
    t_span: (f64, f64),
    dt_max: f64,
    n_samples: usize,
    observables: &[(String, Operator)],
) -> Result<Trajectory> {
    let space = h.space();
    if psi0.space() != space {
        return Err(IonError::DimensionMismatch("state/Hamiltonian space mismatch".into()));
    }
    let psi = match psi0.data() {
        StateData::Pure(psi) => psi.clone(),
        StateData::Density(_) => {
            return Err(IonError::InvalidState(
                "evolve_schrodinger requires a pure state".into(),
            ))
        }
    };
    if dt_max <= 0.0 {
        return Err(IonError::InvalidParameter("dt_max must be > 0".into()));
    }
    let times = output_grid(t_span, n_samples)?;
    let mut series: Vec<(String, Vec<C64>)> =
        observables.iter().map(|(n, _)| (n.clone(), Vec::with_capacity(n_samples))).collect();

    let record = |psi: &CVector, series: &mut Vec<(String, Vec<C64>)>| {
        for (slot, (_, op)) in series.iter_mut().zip(observables) {
            slot.1.push((psi.adjoint() * op.matrix() * psi)[(0, 0)]);
        }
    };

    let mut psi_t = psi;
    record(&psi_t, &mut series);

    match h {
        HamiltonianSource::Static(op) => {
            check_hermitian(op.matrix(), t_span.0)?;
            let spacing = times[1] - times[0];
            let substeps = (spacing / dt_max).ceil().max(1.0) as usize;
            let dt = spacing / substeps as f64;
            let u = expm(&(op.matrix() * C64::new(0.0, -dt / HBAR)));
            for _ in 1..n_samples {
                for _ in 0..substeps {
                    psi_t = &u * psi_t;
                }
                record(&psi_t, &mut series);
            }
        }
        HamiltonianSource::TimeDependent(_) => {
            let mut t = t_span.0;
            for &t_next in &times[1..] {
                psi_t = propagate_adaptive(h, psi_t, t, t_next, dt_max)?;
                t = t_next;
                record(&psi_t, &mut series);
            }
        }
    }

    let norm = psi_t.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(IonError::Numerical(format!("norm drift: |psi| = {norm}")));
    }
    // remove accumulated rounding before constructing the result state
    let final_state = QuantumState::pure(space, psi_t.clone() / C64::new(norm, 0.0))?;
    Ok(Trajectory { times, observables: series, final_state })
}

/// Midpoint-exponential stepping with step doubling for the local error
/// estimate. Each step is unitary, so the norm is preserved exactly up to
/// rounding.
fn propagate_adaptive(
    h: &HamiltonianSource,
    mut psi: CVector,
    t0: f64,
    t1: f64,
    dt_max: f64,
) -> Result<CVector> {
    const RTOL: f64 = 1e-9;
    let span = t1 - t0;
    let mut t = t0;
    let mut dt = dt_max.min(span);
    let step = |t: f64, dt: f64, psi: &CVector| -> Result<CVector> {
        let hm = h.at(t + dt / 2.0);
        check_hermitian(hm.matrix(), t + dt / 2.0)?;
        let u = expm(&(hm.matrix() * C64::new(0.0, -dt / HBAR)));
        Ok(&u * psi)
    };
    while t < t1 - span * 1e-14 {
        if dt < span * 1e-13 {
            return Err(IonError::Numerical(format!("step size underflow at t = {t}")));
        }
        let dt_step = dt.min(t1 - t);
        let full = step(t, dt_step, &psi)?;
        let half1 = step(t, dt_step / 2.0, &psi)?;
        let half2 = step(t + dt_step / 2.0, dt_step / 2.0, &half1)?;
        let err = (&full - &half2).norm();
        if err <= RTOL {
            t += dt_step;
            psi = half2;
            let grow = if err > 0.0 { 0.9 * (RTOL / err).powf(1.0 / 3.0) } else { 2.0 };
            dt = (dt_step * grow.clamp(0.5, 2.0)).min(dt_max);
        } else {
            dt = dt_step * 0.5;
        }
    }
    Ok(psi)
}

/// Master-equation evolution
/// rho' = -(i/hbar)[H, rho] + sum_k (C_k rho C_k^dag - 1/2 {C_k^dag C_k, rho}).
///
/// Pure input states are promoted to density matrices. The trace is
/// monitored at every output sample and the run aborts if it drifts by
/// more than 1e-8; Hermiticity is enforced by symmetrisation after every
/// accepted step.
pub fn lindblad_evolve(
    h: &HamiltonianSource,
    channels: &[CollapseChannel],
    rho0: &QuantumState,
    t_span: (f64, f64),
    n_samples: usize,
    observables: &[(String, Operator)],
) -> Result<Trajectory> {
    let space = h.space();
    if rho0.space() != space {
        return Err(IonError::DimensionMismatch("state/Hamiltonian space mismatch".into()));
    }
    for ch in channels {
        if ch.operator().space() != space {
            return Err(IonError::DimensionMismatch(format!(
                "collapse channel '{}' lives on a different space",
                ch.label()
            )));
        }
    }
    let times = output_grid(t_span, n_samples)?;
    let dim = space.dim();
    let rho = rho0.density_matrix();

    // Static Hamiltonians use the folded drift A = -(i/hbar) H - 1/2 sum C^dag C,
    // so the rhs is A rho + (A rho)^dag + sum C rho C^dag (rho Hermitian).
    let jump_ops: Vec<&CMatrix> = channels.iter().map(|c| c.operator().matrix()).collect();
    let jump_dags: Vec<CMatrix> = jump_ops.iter().map(|c| c.adjoint()).collect();
    let mut cdc_sum = CMatrix::zeros(dim, dim);
    for (c, cd) in jump_ops.iter().zip(&jump_dags) {
        gemm_acc(C64::new(1.0, 0.0), cd, c, C64::new(1.0, 0.0), &mut cdc_sum);
    }
    let drift_static = match h {
        HamiltonianSource::Static(op) => {
            check_hermitian(op.matrix(), t_span.0)?;
            Some(op.matrix() * C64::new(0.0, -1.0 / HBAR) - &cdc_sum * C64::new(0.5, 0.0))
        }
        HamiltonianSource::TimeDependent(_) => None,
    };

    let mut work = CMatrix::zeros(dim, dim);
    let mut work2 = CMatrix::zeros(dim, dim);
    let mut rhs = |t: f64, rho: &CMatrix| -> CMatrix {
        let drift = match &drift_static {
            Some(a) => a.clone(),
            None => {
                let ht = h.at(t);
                ht.matrix() * C64::new(0.0, -1.0 / HBAR) - &cdc_sum * C64::new(0.5, 0.0)
            }
        };
        gemm(&drift, rho, &mut work);
        let mut out = &work + work.adjoint();
        for (c, cd) in jump_ops.iter().zip(&jump_dags) {
            gemm(c, rho, &mut work);
            gemm(&work, cd, &mut work2);
            out += &work2;
        }
        out
    };

    // user observables plus two built-in diagnostics checked by callers
    let mut series: Vec<(String, Vec<C64>)> =
        observables.iter().map(|(n, _)| (n.clone(), Vec::with_capacity(n_samples))).collect();
    series.push(("trace".into(), Vec::with_capacity(n_samples)));
    series.push(("min_eigenvalue".into(), Vec::with_capacity(n_samples)));
    let mut final_rho = rho.clone();

    let opts = OdeOptions { rtol: 1e-9, atol: 1e-13, dt_max: f64::INFINITY };
    integrate(
        &mut rhs,
        t_span.0,
        rho,
        &times,
        &opts,
        &mut |r: &mut CMatrix| {
            let sym = (&*r + r.adjoint()) * C64::new(0.5, 0.0);
            *r = sym;
            Ok(())
        },
        &mut |_k, t, r| {
            let tr = r.trace();
            if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
                return Err(IonError::Numerical(format!(
                    "trace drift at t = {t}: Tr rho = {tr}"
                )));
            }
            for (slot, (_, op)) in series.iter_mut().zip(observables) {
                slot.1.push(trace_of_product(r, op.matrix()));
            }
            let n_user = observables.len();
            series[n_user].1.push(tr);
            series[n_user + 1].1.push(C64::new(min_eigenvalue(r), 0.0));
            final_rho = r.clone();
            Ok(())
        },
    )?;

    let final_state = QuantumState::density_unchecked(space, final_rho);
    Ok(Trajectory { times, observables: series, final_state })
}

/// Tr(A B) without forming the product: sum_ij A_ij B_ji.
fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Steady-state solution with diagnostics.
#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub state: QuantumState,
    /// Dimension of the Liouvillian null space found by SVD.
    pub null_space_dim: usize,
    /// max |L vec(rho_ss)| relative to the largest Liouvillian entry.
    pub residual: f64,
    /// Set when the null space is degenerate (dim > 1); the returned state
    /// is then only one representative.
    pub degenerate: bool,
}

/// Stationary state of the Liouvillian via dense null-space extraction
/// (SVD of the vectorised superoperator).
pub fn steady_state(h: &Operator, channels: &[CollapseChannel]) -> Result<SteadySolution> {
    if channels.is_empty() {
        return Err(IonError::InvalidParameter(
            "steady_state requires at least one collapse channel".into(),
        ));
    }
    let space = h.space();
    check_hermitian(h.matrix(), 0.0)?;
    let liou = liouvillian_matrix(h, channels)?;
    let dim = space.dim();
    let lnorm = max_abs(&liou).max(f64::MIN_POSITIVE);

    let svd = liou.clone().svd(false, true);
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| IonError::Numerical("SVD failed to produce right singular vectors".into()))?;
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = smax * 1e-10;
    let null_rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    if null_rows.is_empty() {
        return Err(IonError::Numerical(format!(
            "no Liouvillian null space found (smallest singular value {:.3e})",
            svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    // pick the null vector with the largest trace after reshaping
    let mut best: Option<(f64, CMatrix)> = None;
    for &row in &null_rows {
        // rows of V^T are conjugated right singular vectors
        let vec: CVector = CVector::from_iterator(dim * dim, v_t.row(row).iter().map(|z| z.conj()));
        let rho = CMatrix::from_column_slice(dim, dim, vec.as_slice());
        let tr = rho.trace().norm();
        if best.as_ref().map_or(true, |(t, _)| tr > *t) {
            best = Some((tr, rho));
        }
    }
    let (tr_mag, rho) = best.unwrap();
    if tr_mag < 1e-12 {
        return Err(IonError::Numerical("null vector has vanishing trace".into()));
    }
    let rho = &rho / rho.trace();
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let rho = &rho / rho.trace();

    let flat = CVector::from_column_slice(rho.as_slice());
    let residual = (&liou * &flat).iter().fold(0.0f64, |acc, z| acc.max(z.norm())) / lnorm;
    if residual > 1e-10 {
        return Err(IonError::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds 1e-10"
        )));
    }
    let state = QuantumState::density(space, rho)?;
    Ok(SteadySolution {
        state,
        null_space_dim: null_rows.len(),
        residual,
        degenerate: null_rows.len() > 1,
    })
}

/// Dense vectorised Liouvillian, column-stacking convention:
/// vec(A X B) = (B^T ⊗ A) vec(X).
pub fn liouvillian_matrix(h: &Operator, channels: &[CollapseChannel]) -> Result<CMatrix> {
    let space = h.space();
    let dim = space.dim();
    let eye = CMatrix::identity(dim, dim);
    let hm = h.matrix();
    let mut liou = (eye.kronecker(hm) - hm.transpose().kronecker(&eye)) * C64::new(0.0, -1.0 / HBAR);
    for ch in channels {
        if ch.operator().space() != space {
            return Err(IonError::DimensionMismatch(format!(
                "collapse channel '{}' lives on a different space",
                ch.label()
            )));
        }
        let c = ch.operator().matrix();
        let cdc = c.adjoint() * c;
        liou += c.conjugate().kronecker(c)
            - (eye.kronecker(&cdc) + cdc.transpose().kronecker(&eye)) * C64::new(0.5, 0.0);
    }
    Ok(liou)
}

/// Total photon-scattering rate Gamma * P(excited internal level).
pub fn scattering_rate(rho: &QuantumState, gamma: f64, excited_level: usize) -> Result<f64> {
    let space = rho.space();
    if excited_level >= space.internal_dim() {
        return Err(IonError::InvalidParameter(format!(
            "excited level {excited_level} outside internal_dim {}",
            space.internal_dim()
        )));
    }
    let m = rho.density_matrix();
    let mut pop = 0.0;
    for n in 0..space.motional_dim() {
        let idx = space.index(excited_level, n);
        pop += m[(idx, idx)].re;
    }
    Ok(gamma * pop)
}

/// Mean phonon number and Fock populations P(n) = sum_internal <i,n|rho|i,n>.
pub fn phonon_statistics(state: &QuantumState) -> (f64, Vec<f64>) {
    let space = state.space();
    let m = state.density_matrix();
    let mut pops = vec![0.0f64; space.motional_dim()];
    for (n, p) in pops.iter_mut().enumerate() {
        for i in 0..space.internal_dim() {
            let idx = space.index(i, n);
            *p += m[(idx, idx)].re;
        }
    }
    let n_bar = pops.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    (n_bar, pops)
}

/// Observable helpers shared by the cooling experiments.
pub mod observables {
    use super::*;

    /// Number operator a^dag a.
    pub fn number_operator(space: HilbertSpace) -> Operator {
        let (a, adag) = ladder_operators(space);
        &adag * &a
    }

    /// Projector |internal, n><internal, n|.
    pub fn basis_projector(space: HilbertSpace, internal: usize, n: usize) -> Operator {
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        let idx = space.index(internal, n);
        m[(idx, idx)] = C64::new(1.0, 0.0);
        Operator::new(space, m).expect("projector dimensions are consistent")
    }

    /// Projector onto Fock level n (summed over internal states).
    pub fn fock_projector(space: HilbertSpace, n: usize) -> Operator {
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        for i in 0..space.internal_dim() {
            let idx = space.index(i, n);
            m[(idx, idx)] = C64::new(1.0, 0.0);
        }
        Operator::new(space, m).expect("projector dimensions are consistent")
    }
}
