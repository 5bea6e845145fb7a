use std::ops::{Index, IndexMut};

use super::{LinalgError, LinalgResult, C64};

/// Dense square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> LinalgResult<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> LinalgResult<Self> {
        if a.len() != b.len() {
            return Err(LinalgError::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        Ok(Self::from_fn(a.len(), |i, j| a[i] * b[j].conj()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every entry has a zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Largest `|A_ij - conj(A_ji)|` over all index pairs.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scaled_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self + s * other`, panicking on mismatched dimensions.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b * s).collect() }
    }

    /// Matrix product, panicking on mismatched dimensions. See
    /// [`ops::matmul`](super::ops::matmul) for the checked form.
    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul_mat");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in mul_vec");
        (0..self.dim).map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// A complex matrix known to be Hermitian.
///
/// Construction accepts deviations up to `1e-12` of the largest entry and
/// stores the exact Hermitian part, so downstream code may rely on exact
/// symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: CMatrix) -> LinalgResult<Self> {
        if !m.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let tolerance = Self::TOLERANCE * m.max_abs();
        let deviation = m.hermitian_deviation();
        if deviation > tolerance {
            return Err(LinalgError::NonHermitianInput { deviation, tolerance });
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(CMatrix::from_real_diagonal(diag))
    }

    /// Builds a real symmetric operator from its upper triangle.
    pub fn from_real_symmetric(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = C64::new(f(i, j), 0.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// `<psi|H|psi>`; real up to round-off.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let h_psi = self.0.mul_vec(psi);
        psi.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    /// Writes one entry and its mirror. Crate-internal: callers use it to
    /// assemble models whose structure they control.
    pub(crate) fn set_pair(&mut self, i: usize, j: usize, v: C64) {
        if i == j {
            self.0[(i, i)] = C64::new(v.re, 0.0);
        } else {
            self.0[(i, j)] = v;
            self.0[(j, i)] = v.conj();
        }
    }
}

impl Index<(usize, usize)> for HermitianOperator {
    type Output = C64;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl TryFrom<CMatrix> for HermitianOperator {
    type Error = LinalgError;

    fn try_from(m: CMatrix) -> LinalgResult<Self> {
        Self::new(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, 1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(LinalgError::NonHermitianInput { .. })));
    }

    #[test]
    fn accepts_round_off_and_symmetrises() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(1.0, 1e-15), C64::new(0.5, 0.25)],
            vec![C64::new(0.5, -0.25 + 1e-14), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
        assert_eq!(h[(0, 0)].im, 0.0);
    }

    #[test]
    fn rejects_nan() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert_eq!(HermitianOperator::new(m), Err(LinalgError::NonFinite));
    }

    #[test]
    fn ragged_rows_are_a_dimension_mismatch() {
        let rows = vec![vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]];
        assert!(matches!(CMatrix::from_rows(&rows), Err(LinalgError::DimensionMismatch { .. })));
    }
}
