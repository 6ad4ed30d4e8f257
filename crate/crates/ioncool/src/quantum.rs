//! State and operator algebra on a composite internal ⊗ motional space.
//!
//! The factor order is fixed globally: internal first, motional second.
//! A composite basis index is `internal * (n_max + 1) + n`.

use nalgebra::DMatrix;

use crate::{C64, CMatrix, CVector, IonError, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = -1e-8;

/// Composite Hilbert space: `internal_dim` internal levels tensored with a
/// harmonic oscillator truncated at Fock state `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    internal_dim: usize,
    fock_cutoff: usize,
}

impl HilbertSpace {
    pub fn new(internal_dim: usize, fock_cutoff: usize) -> Result<Self> {
        if internal_dim < 2 {
            return Err(IonError::InvalidParameter(format!(
                "internal_dim must be >= 2, got {internal_dim}"
            )));
        }
        Ok(Self { internal_dim, fock_cutoff })
    }

    /// Two-level atom tensored with a truncated oscillator.
    pub fn two_level(n_max: usize) -> Self {
        Self { internal_dim: 2, fock_cutoff: n_max }
    }

    /// Bare three-level system, no motional factor.
    pub fn three_level_bare() -> Self {
        Self { internal_dim: 3, fock_cutoff: 0 }
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    /// Fock cutoff `n_max` (highest retained phonon number).
    pub fn n_max(&self) -> usize {
        self.fock_cutoff
    }

    pub fn motional_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.internal_dim * self.motional_dim()
    }

    /// Composite basis index of |internal, n>.
    pub fn index(&self, internal: usize, n: usize) -> usize {
        debug_assert!(internal < self.internal_dim && n <= self.fock_cutoff);
        internal * self.motional_dim() + n
    }

    /// Interior-subspace margin below which truncation effects are
    /// considered negligible for a drive of Lamb-Dicke parameter `eta`.
    pub fn truncation_margin(&self, eta: f64) -> usize {
        let m = (3.0 * eta * (self.fock_cutoff as f64).sqrt()).ceil() as usize;
        m.max(5)
    }
}

/// Dense operator tied to a [`HilbertSpace`].
#[derive(Debug, Clone)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(IonError::DimensionMismatch(format!(
                "operator is {}x{}, space dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(Self { space, matrix })
    }

    /// Like [`Operator::new`] but additionally verifies Hermiticity to 1e-12.
    pub fn hermitian(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let op = Self::new(space, matrix)?;
        let dev = op.hermiticity_deviation();
        if dev >= HERMITIAN_TOL {
            return Err(IonError::NotHermitian(dev));
        }
        Ok(op)
    }

    pub fn zero(space: HilbertSpace) -> Self {
        Self { space, matrix: CMatrix::zeros(space.dim(), space.dim()) }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self { space, matrix: CMatrix::identity(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { space: self.space, matrix: &self.matrix * s }
    }

    /// max_ij |M - M^dag|_ij
    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() < HERMITIAN_TOL
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Operator) -> Operator {
        debug_assert_eq!(self.space, other.space);
        Operator {
            space: self.space,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator { space: self.space, matrix: &self.matrix + &rhs.matrix }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator { space: self.space, matrix: &self.matrix - &rhs.matrix }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator { space: self.space, matrix: &self.matrix * &rhs.matrix }
    }
}

/// Pure state or density matrix on a [`HilbertSpace`].
#[derive(Debug, Clone)]
pub enum StateData {
    Pure(CVector),
    Density(CMatrix),
}

#[derive(Debug, Clone)]
pub struct QuantumState {
    space: HilbertSpace,
    data: StateData,
}

impl QuantumState {
    /// Normalised pure state; the norm must already be 1 within 1e-10.
    pub fn pure(space: HilbertSpace, psi: CVector) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(IonError::DimensionMismatch(format!(
                "state vector length {} vs space dimension {}",
                psi.len(),
                space.dim()
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(IonError::InvalidState(format!(
                "pure state norm {norm} deviates from 1 by more than 1e-10"
            )));
        }
        Ok(Self { space, data: StateData::Pure(psi) })
    }

    /// Density matrix; must be Hermitian, unit trace and positive
    /// semidefinite within the documented tolerances.
    pub fn density(space: HilbertSpace, rho: CMatrix) -> Result<Self> {
        if rho.nrows() != space.dim() || rho.ncols() != space.dim() {
            return Err(IonError::DimensionMismatch(format!(
                "density matrix {}x{} vs space dimension {}",
                rho.nrows(),
                rho.ncols(),
                space.dim()
            )));
        }
        let herm_dev = max_abs(&(&rho - rho.adjoint()));
        if herm_dev > STATE_TOL {
            return Err(IonError::InvalidState(format!(
                "density matrix not Hermitian, deviation {herm_dev:.3e}"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(IonError::InvalidState(format!("density trace {tr} != 1")));
        }
        let min_eig = min_eigenvalue(&rho);
        if min_eig < POSITIVITY_TOL {
            return Err(IonError::InvalidState(format!(
                "density matrix has eigenvalue {min_eig:.3e} < -1e-8"
            )));
        }
        Ok(Self { space, data: StateData::Density(rho) })
    }

    /// Internal constructor for matrices already validated elsewhere.
    pub(crate) fn density_unchecked(space: HilbertSpace, rho: CMatrix) -> Self {
        Self { space, data: StateData::Density(rho) }
    }

    /// Basis state |internal, n>.
    pub fn basis(space: HilbertSpace, internal: usize, n: usize) -> Result<Self> {
        if internal >= space.internal_dim() || n > space.n_max() {
            return Err(IonError::InvalidParameter(format!(
                "basis label ({internal}, {n}) outside space"
            )));
        }
        let mut psi = CVector::zeros(space.dim());
        psi[space.index(internal, n)] = C64::new(1.0, 0.0);
        Ok(Self { space, data: StateData::Pure(psi) })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    /// Density-matrix view; promotes a pure state to |psi><psi|.
    pub fn density_matrix(&self) -> CMatrix {
        match &self.data {
            StateData::Pure(psi) => psi * psi.adjoint(),
            StateData::Density(rho) => rho.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&CVector> {
        match &self.data {
            StateData::Pure(psi) => Some(psi),
            StateData::Density(_) => None,
        }
    }
}

/// Motional ladder operators on the full composite space:
/// identity on the internal factor, truncated a / a^dag on the motional one.
pub fn ladder_operators(space: HilbertSpace) -> (Operator, Operator) {
    let md = space.motional_dim();
    let mut a_m = DMatrix::<C64>::zeros(md, md);
    for n in 1..md {
        a_m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let eye = DMatrix::<C64>::identity(space.internal_dim(), space.internal_dim());
    let a = eye.kronecker(&a_m);
    let adag = a.adjoint();
    (
        Operator { space, matrix: a },
        Operator { space, matrix: adag },
    )
}

/// Pauli-type operators for a two-level internal factor, identity on the
/// motional factor. Returns (sigma_z, sigma_plus, sigma_minus) with the
/// convention |g> = level 0, |e> = level 1, sigma_plus = |e><g|.
pub fn internal_operators(space: HilbertSpace) -> Result<(Operator, Operator, Operator)> {
    if space.internal_dim() != 2 {
        return Err(IonError::InvalidParameter(format!(
            "internal_operators requires internal_dim = 2, got {}",
            space.internal_dim()
        )));
    }
    let one = C64::new(1.0, 0.0);
    let mut sz = DMatrix::<C64>::zeros(2, 2);
    sz[(0, 0)] = -one;
    sz[(1, 1)] = one;
    let mut sp = DMatrix::<C64>::zeros(2, 2);
    sp[(1, 0)] = one;
    let sm = sp.adjoint();
    let eye = DMatrix::<C64>::identity(space.motional_dim(), space.motional_dim());
    Ok((
        Operator { space, matrix: sz.kronecker(&eye) },
        Operator { space, matrix: sp.kronecker(&eye) },
        Operator { space, matrix: sm.kronecker(&eye) },
    ))
}

/// Kronecker product of an internal-factor matrix and a motional-factor
/// matrix, in the fixed order internal ⊗ motional.
pub fn tensor(space: HilbertSpace, internal: &CMatrix, motional: &CMatrix) -> Result<Operator> {
    if internal.nrows() != space.internal_dim() || internal.ncols() != space.internal_dim() {
        return Err(IonError::DimensionMismatch(format!(
            "internal factor {}x{} vs internal_dim {}",
            internal.nrows(),
            internal.ncols(),
            space.internal_dim()
        )));
    }
    if motional.nrows() != space.motional_dim() || motional.ncols() != space.motional_dim() {
        return Err(IonError::DimensionMismatch(format!(
            "motional factor {}x{} vs motional dimension {}",
            motional.nrows(),
            motional.ncols(),
            space.motional_dim()
        )));
    }
    Ok(Operator { space, matrix: internal.kronecker(motional) })
}

/// exp(scale * M).
pub fn matrix_exponential(m: &Operator, scale: C64) -> Result<Operator> {
    let scaled = &m.matrix * scale;
    if scaled.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(IonError::Numerical("non-finite entries in matrix exponential input".into()));
    }
    Ok(Operator { space: m.space, matrix: expm(&scaled) })
}

/// exp(M) by scaling-and-squaring with Padé approximation.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// D(eta) = exp(i eta (a + a^dag)) on the motional factor, identity on the
/// internal factor. Unitary on the interior subspace n <= n_max - margin.
pub fn displacement_operator(eta: f64, space: HilbertSpace) -> Operator {
    let (a, adag) = ladder_operators(space);
    let x = &a + &adag;
    let gen = x.matrix() * C64::new(0.0, eta);
    Operator { space, matrix: expm(&gen) }
}

/// <psi|O|psi> for a pure state, Tr(rho O) for a density matrix.
pub fn expectation(state: &QuantumState, obs: &Operator) -> Result<C64> {
    if state.space() != obs.space() {
        return Err(IonError::DimensionMismatch(
            "state and observable live on different spaces".into(),
        ));
    }
    Ok(match state.data() {
        StateData::Pure(psi) => (psi.adjoint() * obs.matrix() * psi)[(0, 0)],
        StateData::Density(rho) => (rho * obs.matrix()).trace(),
    })
}

/// Thermal motional state with mean phonon number `n_bar`, internal factor
/// in the pure level `internal`. P(n) ∝ (n_bar/(n_bar+1))^n, renormalised
/// over the truncated ladder so the trace is exactly 1.
pub fn thermal_state(n_bar: f64, space: HilbertSpace, internal: usize) -> Result<QuantumState> {
    if n_bar < 0.0 || !n_bar.is_finite() {
        return Err(IonError::InvalidParameter(format!("n_bar must be >= 0, got {n_bar}")));
    }
    if internal >= space.internal_dim() {
        return Err(IonError::InvalidParameter(format!(
            "internal label {internal} outside internal_dim {}",
            space.internal_dim()
        )));
    }
    let md = space.motional_dim();
    let mut weights = vec![0.0f64; md];
    if n_bar == 0.0 {
        weights[0] = 1.0;
    } else {
        let r = n_bar / (n_bar + 1.0);
        let mut w = 1.0;
        for wn in weights.iter_mut() {
            *wn = w;
            w *= r;
        }
        let z: f64 = weights.iter().sum();
        for wn in weights.iter_mut() {
            *wn /= z;
        }
    }
    let dim = space.dim();
    let mut rho = CMatrix::zeros(dim, dim);
    for (n, w) in weights.iter().enumerate() {
        let idx = space.index(internal, n);
        rho[(idx, idx)] = C64::new(*w, 0.0);
    }
    Ok(QuantumState { space, data: StateData::Density(rho) })
}

/// Largest entry magnitude (max norm).
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    // symmetric_eigen treats the matrix as Hermitian.
    let eig = m.clone().symmetric_eigenvalues();
    eig.iter().fold(f64::INFINITY, |acc, &x| acc.min(x))
}
