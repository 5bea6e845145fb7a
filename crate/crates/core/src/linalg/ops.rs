//! Checked matrix algebra.

use super::{CMatrix, LinalgError, LinalgResult, C64};

fn check(a: &CMatrix, b: &CMatrix) -> LinalgResult<()> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn trace(a: &CMatrix) -> C64 {
    a.trace()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> LinalgResult<CMatrix> {
    check(a, b)?;
    Ok(a.mul_mat(b))
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> LinalgResult<CMatrix> {
    check(a, b)?;
    Ok(a.mul_mat(b).add_scaled(&b.mul_mat(a), -1.0))
}

/// `{A, B} = AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> LinalgResult<CMatrix> {
    check(a, b)?;
    Ok(a.mul_mat(b).add_scaled(&b.mul_mat(a), 1.0))
}

/// `A B A†`.
pub fn sandwich(a: &CMatrix, b: &CMatrix) -> LinalgResult<CMatrix> {
    check(a, b)?;
    Ok(a.mul_mat(b).mul_mat(&a.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli() -> [CMatrix; 3] {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        [
            CMatrix::from_rows(&[vec![z, o], vec![o, z]]).unwrap(),
            CMatrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap(),
            CMatrix::from_rows(&[vec![o, z], vec![z, -o]]).unwrap(),
        ]
    }

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = pauli();
        let c = commutator(&x, &y).unwrap();
        assert!(c.max_abs_diff(&z.scaled(C64::new(0.0, 2.0))) < 1e-15);
        let a = anticommutator(&x, &y).unwrap();
        assert!(a.max_abs() < 1e-15);
        let xx = anticommutator(&x, &x).unwrap();
        assert!(xx.max_abs_diff(&CMatrix::identity(2).scaled_real(2.0)) < 1e-15);
    }

    #[test]
    fn sandwich_rotates() {
        let [x, _, z] = pauli();
        let s = sandwich(&x, &z).unwrap();
        assert!(s.max_abs_diff(&z.scaled_real(-1.0)) < 1e-15);
    }

    #[test]
    fn mismatch() {
        let e = matmul(&CMatrix::zeros(2), &CMatrix::zeros(3));
        assert_eq!(e, Err(LinalgError::DimensionMismatch { expected: 2, found: 3 }));
        assert!(commutator(&CMatrix::zeros(1), &CMatrix::zeros(2)).is_err());
    }
}
