use super::{eigh, Eigh, HermitianOperator, LinalgError, LinalgResult, StateVector, C64};

/// Time-independent unitary evolution `exp(-iHt)`, diagonalised once and
/// reused for every requested time.
#[derive(Clone, Debug)]
pub struct Propagator {
    eig: Eigh,
}

impl Propagator {
    pub fn new(h: &HermitianOperator) -> LinalgResult<Self> {
        Ok(Self { eig: eigh(h)? })
    }

    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }

    pub fn eigen(&self) -> &Eigh {
        &self.eig
    }

    /// Coefficients of `psi0` in the eigenbasis, `U† psi0`.
    fn eigen_coefficients(&self, psi0: &StateVector) -> LinalgResult<Vec<C64>> {
        let n = self.dim();
        if psi0.dim() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: psi0.dim() });
        }
        let u = &self.eig.vectors;
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for (i, &a) in psi0.amplitudes().iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (c, &uij) in coeffs.iter_mut().zip(u.row(i)) {
                *c += uij.conj() * a;
            }
        }
        Ok(coeffs)
    }

    fn synthesize(&self, coeffs: &[C64], t: f64) -> StateVector {
        let phased: Vec<C64> =
            coeffs.iter().zip(&self.eig.values).map(|(&c, &w)| c * C64::from_polar(1.0, -w * t)).collect();
        StateVector::from_amplitudes_unchecked(self.eig.vectors.mul_vec(&phased))
    }

    /// `exp(-iHt) psi0`. At `t = 0` the input is returned unchanged rather
    /// than a round-off reconstruction of it.
    pub fn evolve(&self, psi0: &StateVector, t: f64) -> LinalgResult<StateVector> {
        let coeffs = self.eigen_coefficients(psi0)?;
        Ok(if t == 0.0 { psi0.clone() } else { self.synthesize(&coeffs, t) })
    }

    /// States at each of `times`, sharing one basis change of `psi0`.
    pub fn trajectory(&self, psi0: &StateVector, times: &[f64]) -> LinalgResult<Vec<StateVector>> {
        let coeffs = self.eigen_coefficients(psi0)?;
        Ok(times.iter().map(|&t| if t == 0.0 { psi0.clone() } else { self.synthesize(&coeffs, t) }).collect())
    }
}

/// `exp(-iHt) psi0` via eigendecomposition.
pub fn propagate(h: &HermitianOperator, psi0: &StateVector, t: f64) -> LinalgResult<StateVector> {
    if h.dim() != psi0.dim() {
        return Err(LinalgError::DimensionMismatch { expected: h.dim(), found: psi0.dim() });
    }
    Propagator::new(h)?.evolve(psi0, t)
}
