use super::{eigh, CMatrix, HermitianOperator, LinalgError, LinalgResult, C64};

/// Normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub const NORM_TOLERANCE: f64 = 1e-10;

    /// Accepts amplitudes whose norm is 1 within [`Self::NORM_TOLERANCE`].
    pub fn new(amplitudes: Vec<C64>) -> LinalgResult<Self> {
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(LinalgError::InvalidDensityMatrix(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails for the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> LinalgResult<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z / norm).collect() })
    }

    pub(crate) fn from_amplitudes_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

/// Positive-semidefinite Hermitian matrix with trace in (0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub const EIGENVALUE_FLOOR: f64 = -1e-10;
    pub const TRACE_SLACK: f64 = 1e-10;

    pub fn new(m: CMatrix) -> LinalgResult<Self> {
        let h = HermitianOperator::new(m)?;
        let trace = h.matrix().trace().re;
        if !(trace > 0.0 && trace <= 1.0 + Self::TRACE_SLACK) {
            return Err(LinalgError::InvalidDensityMatrix(format!("trace {trace} outside (0, 1]")));
        }
        let min = eigh(&h)?.values.first().copied().unwrap_or(0.0);
        if min < Self::EIGENVALUE_FLOOR {
            return Err(LinalgError::NegativeEigenvalue { value: min });
        }
        Ok(Self(h.into_matrix()))
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self(psi.projector())
    }

    /// Skips validation. Used by integrators that enforce their own bounds.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `rho / Tr(rho)`, the state conditioned on survival.
    pub fn normalized(&self) -> Self {
        Self(self.0.scaled_real(1.0 / self.trace()))
    }

    pub fn eigenvalues(&self) -> LinalgResult<Vec<f64>> {
        Ok(eigh(&HermitianOperator::new(self.0.clone())?)?.values)
    }
}

/// `S = -Tr(rho ln rho)` in nats for a unit-trace density matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are treated as zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> LinalgResult<f64> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(LinalgError::NotNormalized { trace });
    }
    let mut s = 0.0;
    for w in rho.eigenvalues()? {
        if w < DensityMatrix::EIGENVALUE_FLOOR {
            return Err(LinalgError::NegativeEigenvalue { value: w });
        }
        if w > 0.0 {
            s -= w * w.ln();
        }
    }
    let max = (rho.dim() as f64).ln();
    Ok(s.clamp(0.0, max))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}
