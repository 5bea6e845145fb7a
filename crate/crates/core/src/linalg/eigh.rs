//! Hermitian eigensolver: Householder reduction to tridiagonal form followed
//! by implicit QL iterations with Wilkinson-style shifts.
//!
//! Real-valued input (every imaginary part exactly zero) runs the same code
//! over `f64`, which is roughly four times cheaper than the complex path.

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::{CMatrix, HermitianOperator, LinalgError, LinalgResult, C64};

/// Eigen-decomposition `H = U diag(values) U†`.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

impl Eigh {
    /// `U diag(values) U†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        CMatrix::from_fn(n, |i, j| (0..n).map(|k| u[(i, k)] * self.values[k] * u[(j, k)].conj()).sum())
    }
}

/// QL iteration cap per eigenvalue.
const MAX_QL_ITERATIONS: usize = 60;

/// Eigen-decomposition of a Hermitian operator.
pub fn eigh(h: &HermitianOperator) -> LinalgResult<Eigh> {
    let m = h.matrix();
    let n = m.dim();
    if n == 0 {
        return Ok(Eigh { values: Vec::new(), vectors: CMatrix::zeros(0) });
    }
    if m.is_real() {
        let a: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
        let (values, vt) = solve(a, n)?;
        Ok(Eigh { values, vectors: CMatrix::from_fn(n, |i, j| C64::new(vt[j * n + i], 0.0)) })
    } else {
        let (values, vt) = solve(m.as_slice().to_vec(), n)?;
        Ok(Eigh { values, vectors: CMatrix::from_fn(n, |i, j| vt[j * n + i]) })
    }
}

trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign<f64>
{
    const ZERO: Self;
    const ONE: Self;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn abs2(self) -> f64;
    fn re(self) -> f64;
    /// `self / |self|`, or one for zero.
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for C64 {
    const ZERO: Self = C64 { re: 0.0, im: 0.0 };
    const ONE: Self = C64 { re: 1.0, im: 0.0 };
    #[inline]
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    #[inline]
    fn abs(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Self::ONE
        } else {
            self * (1.0 / r)
        }
    }
}

/// Returns ascending eigenvalues and the eigenvectors as rows of a row-major
/// `n x n` buffer.
fn solve<T: Scalar>(mut a: Vec<T>, n: usize) -> LinalgResult<(Vec<f64>, Vec<T>)> {
    let reflectors = tridiagonalize(&mut a, n);

    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re()).collect();
    let sub: Vec<T> = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i]).collect();

    // Diagonal unitary D making the tridiagonal matrix real: T = D T_r D†.
    let mut phases = vec![T::ONE; n];
    let mut off = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        phases[i + 1] = phases[i] * sub[i].phase();
        off[i] = sub[i].abs();
    }

    // Rows of `vt` are columns of Q D, where Q is the product of reflectors.
    let mut vt = vec![T::ZERO; n * n];
    for i in 0..n {
        let row = &mut vt[i * n..(i + 1) * n];
        row[i] = phases[i];
        apply_reflectors(&reflectors, row);
    }
    tql2(&mut diag, &mut off, &mut vt, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut sorted = Vec::with_capacity(n * n);
    for &i in &order {
        sorted.extend_from_slice(&vt[i * n..(i + 1) * n]);
    }
    Ok((values, sorted))
}

struct Reflector<T> {
    /// First row/column the reflector acts on.
    start: usize,
    /// Unit vector `v`; the reflector is `I - 2 v v†`.
    v: Vec<T>,
}

/// Reduces the Hermitian matrix `a` to tridiagonal form in place, returning
/// the reflectors `P_0, P_1, ...` with `A = Q T Q†`, `Q = P_0 P_1 ...`.
fn tridiagonalize<T: Scalar>(a: &mut [T], n: usize) -> Vec<Reflector<T>> {
    let mut reflectors = Vec::new();
    if n < 3 {
        return reflectors;
    }
    let mut p = vec![T::ZERO; n];
    for k in 0..n - 2 {
        let start = k + 1;
        let m = n - start;
        // Column k below the diagonal equals the conjugate of row k to the right.
        let x: Vec<T> = (start..n).map(|j| a[k * n + j].conj()).collect();
        let norm = x.iter().map(|z| z.abs2()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.abs2()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let x0_abs = x[0].abs();
        let alpha = -(x[0].phase() * norm);
        let mut v = x;
        v[0] -= alpha;
        let v_norm = (2.0 * norm * (norm + x0_abs)).sqrt();
        for z in &mut v {
            *z *= 1.0 / v_norm;
        }

        // p = A_sub v, K = v† p, w = p - K v, A_sub -= 2 (v w† + w v†).
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a[(start + i) * n + start..(start + i + 1) * n];
            let mut acc = T::ZERO;
            for (&aij, &vj) in row.iter().zip(&v) {
                acc += aij * vj;
            }
            *pi = acc;
        }
        let kappa: f64 = v.iter().zip(p.iter()).map(|(&vi, &pi)| (vi.conj() * pi).re()).sum();
        for (pi, &vi) in p.iter_mut().zip(&v) {
            *pi -= vi * kappa;
        }
        for i in 0..m {
            let vi2 = v[i] * 2.0;
            let wi2 = p[i] * 2.0;
            let row = &mut a[(start + i) * n + start..(start + i + 1) * n];
            for j in 0..m {
                row[j] -= vi2 * p[j].conj() + wi2 * v[j].conj();
            }
        }

        a[start * n + k] = alpha;
        a[k * n + start] = alpha.conj();
        for j in start + 1..n {
            a[j * n + k] = T::ZERO;
            a[k * n + j] = T::ZERO;
        }
        reflectors.push(Reflector { start, v });
    }
    reflectors
}

/// Computes `Q y` in place for `Q = P_0 P_1 ... P_last`.
fn apply_reflectors<T: Scalar>(reflectors: &[Reflector<T>], y: &mut [T]) {
    for r in reflectors.iter().rev() {
        let tail = &mut y[r.start..];
        let mut dot = T::ZERO;
        for (&vi, &yi) in r.v.iter().zip(tail.iter()) {
            dot += vi.conj() * yi;
        }
        let s = dot * 2.0;
        for (yi, &vi) in tail.iter_mut().zip(&r.v) {
            *yi -= vi * s;
        }
    }
}

/// Implicit QL on the real symmetric tridiagonal matrix (`diag`, `off` with
/// `off[i] = T[i+1][i]`). Rotations are applied to rows of `vt`, so on exit
/// row `i` of `vt` is the eigenvector belonging to `diag[i]`.
fn tql2<T: Scalar>(diag: &mut [f64], off: &mut [f64], vt: &mut [T], n: usize) -> LinalgResult<()> {
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut shift_acc = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(diag[l].abs() + off[l].abs());
        let mut m = l;
        while m < n - 1 {
            if off[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(LinalgError::ConvergenceFailure { iterations: MAX_QL_ITERATIONS });
                }
                let g = diag[l];
                let mut p = (diag[l + 1] - g) / (2.0 * off[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                diag[l] = off[l] / (p + r);
                diag[l + 1] = off[l] * (p + r);
                let dl1 = diag[l + 1];
                let mut h = g - diag[l];
                for d in &mut diag[l + 2..n] {
                    *d -= h;
                }
                shift_acc += h;

                p = diag[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = off[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * off[i];
                    h = c * p;
                    r = p.hypot(off[i]);
                    off[i + 1] = s * r;
                    s = off[i] / r;
                    c = p / r;
                    p = c * diag[i] - s * g;
                    diag[i + 1] = h + s * (c * g + s * diag[i]);

                    let (lo, hi) = vt.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_i1 = &mut hi[..n];
                    for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                        let old_b = *b;
                        *b = *a * s + old_b * c;
                        *a = *a * c - old_b * s;
                    }
                }
                p = -s * s2 * c3 * el1 * off[l] / dl1;
                off[l] = s * p;
                diag[l] = c * p;
                if off[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        diag[l] += shift_acc;
        off[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    fn unitarity_error(u: &CMatrix) -> f64 {
        u.adjoint().mul_mat(u).max_abs_diff(&CMatrix::identity(u.dim()))
    }

    #[test]
    fn already_diagonal() {
        let e = eigh(&HermitianOperator::from_real_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        assert!(e.vectors.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let h = HermitianOperator::from_real_symmetric(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let e = eigh(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_spectrum() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = C64::new(0.0, -1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        let e = eigh(&HermitianOperator::new(m).unwrap()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        assert!(e.reconstruct().max_abs_diff(&e.reconstruct().adjoint()) < 1e-15);
    }

    #[test]
    fn random_50_reconstructs() {
        let h = random_hermitian(50, 7);
        let e = eigh(&h).unwrap();
        let residual = e.reconstruct().max_abs_diff(h.matrix());
        assert!(residual < 1e-9 * h.matrix().max_abs(), "residual {residual:e}");
        assert!(unitarity_error(&e.vectors) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_spectrum() {
        // Identity plus a rank-one term: eigenvalue 1 with multiplicity n-1.
        let n = 12;
        let h = HermitianOperator::from_real_symmetric(n, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            base + 0.5
        });
        let e = eigh(&h).unwrap();
        for &w in &e.values[..n - 1] {
            assert!((w - 1.0).abs() < 1e-13);
        }
        assert!((e.values[n - 1] - (1.0 + 0.5 * n as f64)).abs() < 1e-12);
        assert!(unitarity_error(&e.vectors) < 1e-12);
    }

    #[test]
    fn zero_and_one_dimensional() {
        assert!(eigh(&HermitianOperator::zeros(0)).unwrap().values.is_empty());
        let e = eigh(&HermitianOperator::from_real_diagonal(&[-2.5])).unwrap();
        assert_eq!(e.values, vec![-2.5]);
    }

    #[test]
    fn zero_matrix() {
        let e = eigh(&HermitianOperator::zeros(5)).unwrap();
        assert!(e.values.iter().all(|&w| w == 0.0));
        assert!(unitarity_error(&e.vectors) < 1e-15);
    }
}
