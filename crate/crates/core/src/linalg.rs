//! Small dense complex linear algebra.
//!
//! Everything here works on row-major `ComplexMatrix` values. The dimensions in
//! this crate stay in the low hundreds, so plain `O(n^3)` loops are used
//! throughout and no BLAS is involved.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::{HERMITIAN_TOL, JACOBI_MAX_SWEEPS};

pub type C64 = Complex64;

/// Dense row-major complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch { expected: rows, found: bad.len() });
        }
        let mut data = vec![C64::new(0.0, 0.0); rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                data[i * cols + j] = z;
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![C64::new(0.0, 0.0); n * m];
        for i in 0..n {
            let row = &mut out[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let other_row = &other.data[l * m..(l + 1) * m];
                for (o, &b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: n, cols: m, data: out })
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self * self^*`, computed on the upper triangle and mirrored so the
    /// result is exactly Hermitian.
    pub fn gram_outer(&self) -> Self {
        let (n, k) = (self.rows, self.cols);
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            let ri = &self.data[i * k..(i + 1) * k];
            for j in i..n {
                let rj = &self.data[j * k..(j + 1) * k];
                let s: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                if i == j {
                    out[(i, i)] = C64::new(s.re, 0.0);
                } else {
                    out[(i, j)] = s;
                    out[(j, i)] = s.conj();
                }
            }
        }
        out
    }

    /// `self + shift * I`.
    pub fn shift_diagonal(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] += shift;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let asymmetry = self.hermitian_asymmetry();
        if asymmetry > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigenResult {
    /// Sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest off-diagonal magnitude at exit, relative to `max(1, ||A||_F)`.
    pub residual: f64,
    pub sweeps: usize,
}

/// All eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Converges once the off-diagonal Frobenius mass drops to `tol * max(1, ||A||_F)`.
pub fn hermitian_eigenvalues(a: &ComplexMatrix, tol: f64) -> Result<HermitianEigenResult> {
    a.check_hermitian()?;
    let n = a.rows;
    let mut w = a.data.clone();
    let sweeps = jacobi_in_place(&mut w, n, tol)?;
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| w[i * n + i].re).collect();
    eigenvalues.sort_by(f64::total_cmp);
    let scale = a.frobenius_norm_sqr().sqrt().max(1.0);
    let mut max_off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off = max_off.max(w[i * n + j].norm());
            }
        }
    }
    Ok(HermitianEigenResult { eigenvalues, residual: max_off / scale, sweeps })
}

/// Diagonalizes the row-major `n x n` Hermitian matrix in `w` in place; the
/// eigenvalues are left unsorted on the diagonal. The caller guarantees that
/// `w` is Hermitian. Returns the number of sweeps.
pub fn jacobi_in_place(w: &mut [C64], n: usize, tol: f64) -> Result<usize> {
    let mut norm_sqr = 0.0;
    for i in 0..n {
        w[i * n + i].im = 0.0;
    }
    for v in w.iter() {
        norm_sqr += v.norm_sqr();
    }
    let scale = norm_sqr.sqrt().max(1.0);
    let target = tol * scale;
    // Entries below this cannot move the off-diagonal mass across `target`.
    let negligible = 1e-3 * target / n as f64;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(w, n);
        if off <= target {
            return Ok(sweeps);
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off / scale });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[p * n + q];
                let r = apq.norm();
                if r <= negligible {
                    continue;
                }
                rotate(w, n, p, q, apq, r);
            }
        }
        sweeps += 1;
    }
}

fn off_diagonal_mass(w: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * w[i * n + j].norm_sqr();
        }
    }
    s.sqrt()
}

/// One rotation `A <- U^* A U` annihilating `a_pq`.
///
/// `U = D P` where `D` rotates the phase of index `q` so that `a_pq` becomes
/// real and `P` is the real symmetric Jacobi rotation.
#[inline]
fn rotate(w: &mut [C64], n: usize, p: usize, q: usize, apq: C64, r: f64) {
    let app = w[p * n + p].re;
    let aqq = w[q * n + q].re;
    let zeta = (aqq - app) / (2.0 * r);
    let t = zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = apq / r; // e^{i phi}
    let phase_conj = phase.conj();
    let u_qp = phase_conj * (-s);
    let u_qq = phase_conj * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w[k * n + p];
        let akq = w[k * n + q];
        let bkp = akp * c + akq * u_qp;
        let bkq = akp * s + akq * u_qq;
        w[k * n + p] = bkp;
        w[k * n + q] = bkq;
        w[p * n + k] = bkp.conj();
        w[q * n + k] = bkq.conj();
    }
    w[p * n + p] = C64::new(app - t * r, 0.0);
    w[q * n + q] = C64::new(aqq + t * r, 0.0);
    w[p * n + q] = C64::new(0.0, 0.0);
    w[q * n + p] = C64::new(0.0, 0.0);
}

/// Whether the Hermitian matrix `a` is positive definite, by attempting a
/// Cholesky factorization `A = L L^*`.
pub fn is_positive_definite(a: &ComplexMatrix) -> Result<bool> {
    a.check_hermitian()?;
    let n = a.rows;
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = a.data[j * n + j].re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return Ok(false);
        }
        let d = d.sqrt();
        l[j * n + j] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut v = a.data[i * n + j];
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = v / d;
        }
    }
    Ok(true)
}

/// Unitary DFT matrix, entry `(k, l) = exp(-2 pi i k l / M) / sqrt(M)`.
pub fn dft_matrix(m: usize) -> ComplexMatrix {
    let norm = 1.0 / (m as f64).sqrt();
    ComplexMatrix::from_fn(m, m, |k, l| root_of_unity((k * l) % m, m).conj() * norm)
}

/// `exp(2 pi i r / M)`.
#[inline]
pub fn root_of_unity(r: usize, m: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64)
}

/// `Tr(A^m)` for Hermitian `A`, via `m - 1` explicit products.
pub fn trace_power(a: &ComplexMatrix, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("trace power needs m >= 1".into()));
    }
    a.check_hermitian()?;
    let mut p = a.clone();
    for _ in 1..m {
        p = p.matmul(a)?;
    }
    let tr = p.trace();
    debug_assert!(tr.im.abs() <= 1e-9 * tr.re.abs().max(1.0), "complex trace {tr}");
    Ok(tr.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_definiteness() {
        assert!(is_positive_definite(&ComplexMatrix::identity(3)).unwrap());
        assert!(!is_positive_definite(&ComplexMatrix::diagonal(&[1.0, 0.0, 2.0])).unwrap());
        assert!(!is_positive_definite(&ComplexMatrix::diagonal(&[1.0, -1e-3])).unwrap());
        for seed in 0..20 {
            let a = random_hermitian(6, seed);
            let lo = hermitian_eigenvalues(&a, JACOBI_TOL).unwrap().eigenvalues[0];
            assert!(is_positive_definite(&a.shift_diagonal(-lo + 1e-6)).unwrap());
            assert!(!is_positive_definite(&a.shift_diagonal(-lo - 1e-6)).unwrap());
        }
    }
    use crate::tolerances::JACOBI_TOL;
    use rand::Rng;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = crate::rng::stream(seed);
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = C64::new(rng.random_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    /// det(A - xI) by Gaussian elimination with partial pivoting. For Hermitian
    /// A the value is real up to rounding.
    fn char_poly(a: &ComplexMatrix, x: f64) -> f64 {
        let n = a.rows();
        let mut w = a.shift_diagonal(-x);
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| w[(i, col)].norm().total_cmp(&w[(j, col)].norm())).unwrap();
            if w[(piv, col)].norm() == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    let tmp = w[(col, j)];
                    w[(col, j)] = w[(piv, j)];
                    w[(piv, j)] = tmp;
                }
                det = -det;
            }
            let d = w[(col, col)];
            det *= d;
            for i in col + 1..n {
                let f = w[(i, col)] / d;
                for j in col..n {
                    let v = w[(col, j)];
                    w[(i, j)] -= f * v;
                }
            }
        }
        det.re
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        let r = hermitian_eigenvalues(&ComplexMatrix::identity(3), JACOBI_TOL).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 1.0, 1.0]);
        let r = hermitian_eigenvalues(&ComplexMatrix::diagonal(&[5.0, 2.0]), JACOBI_TOL).unwrap();
        assert_eq!(r.eigenvalues, vec![2.0, 5.0]);
        assert!(r.residual <= JACOBI_TOL);
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial_roots() {
        let a = random_hermitian(4, 11);
        let eig = hermitian_eigenvalues(&a, JACOBI_TOL).unwrap().eigenvalues;
        // Scan for sign changes of det(A - xI) on a fine grid, then bisect.
        let bound = 1.0 + a.max_abs() * 4.0;
        let steps = 20_000;
        let mut roots = Vec::new();
        let mut prev_x = -bound;
        let mut prev = char_poly(&a, prev_x);
        for s in 1..=steps {
            let x = -bound + 2.0 * bound * s as f64 / steps as f64;
            let v = char_poly(&a, x);
            if prev == 0.0 || prev.signum() != v.signum() {
                let (mut lo, mut hi, mut flo) = (prev_x, x, prev);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = char_poly(&a, mid);
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev = v;
        }
        assert_eq!(roots.len(), 4, "roots {roots:?}");
        for (r, e) in roots.iter().zip(&eig) {
            assert!((r - e).abs() < 1e-9, "{r} vs {e}");
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigenvalues(&a, JACOBI_TOL), Err(Error::NotHermitian { .. })));
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigenvalues(&b, JACOBI_TOL), Err(Error::NotSquare { .. })));
        assert!(matches!(trace_power(&a, 2), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ComplexMatrix::new(2, 2, vec![C64::new(0.0, 0.0); 3]).is_err());
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn small_dft_matrices() {
        assert!(dft_matrix(1).approx_eq(&ComplexMatrix::identity(1), 0.0));
        let h = 1.0 / 2f64.sqrt();
        let expected = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)],
        )
        .unwrap();
        assert!(dft_matrix(2).approx_eq(&expected, 1e-15));
        let f = dft_matrix(4);
        assert!(f.matmul(&f.adjoint()).unwrap().approx_eq(&ComplexMatrix::identity(4), 1e-12));
    }

    #[test]
    fn dft_unitary_up_to_256() {
        for m in 1..=256 {
            let f = dft_matrix(m);
            let g = f.gram_outer();
            assert!(g.approx_eq(&ComplexMatrix::identity(m), 1e-11), "M = {m}");
        }
    }

    #[test]
    fn trace_power_examples() {
        assert_eq!(trace_power(&ComplexMatrix::identity(3), 5).unwrap(), 3.0);
        assert_eq!(trace_power(&ComplexMatrix::diagonal(&[1.0, -2.0]), 2).unwrap(), 5.0);
        let a = random_hermitian(5, 3);
        let eig = hermitian_eigenvalues(&a, JACOBI_TOL).unwrap().eigenvalues;
        let want: f64 = eig.iter().map(|l| l.powi(4)).sum();
        let got = trace_power(&a, 4).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn trace_equals_eigenvalue_sum(n in 1usize..12, seed in any::<u64>()) {
                let a = random_hermitian(n, seed);
                let eig = hermitian_eigenvalues(&a, JACOBI_TOL).unwrap();
                let sum: f64 = eig.eigenvalues.iter().sum();
                prop_assert!((sum - a.trace().re).abs() <= 1e-9 * n as f64);
                prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            }

            #[test]
            fn shift_covariance(n in 1usize..10, seed in any::<u64>(), c in -5.0f64..5.0) {
                let a = random_hermitian(n, seed);
                let e0 = hermitian_eigenvalues(&a, JACOBI_TOL).unwrap().eigenvalues;
                let e1 = hermitian_eigenvalues(&a.shift_diagonal(c), JACOBI_TOL).unwrap().eigenvalues;
                for (x, y) in e0.iter().zip(&e1) {
                    prop_assert!((x + c - y).abs() <= 1e-9);
                }
            }

            #[test]
            fn trace_power_matches_explicit_product(n in 1usize..=16, m in 1u32..=8, seed in any::<u64>()) {
                let a = random_hermitian(n, seed);
                let eig = hermitian_eigenvalues(&a, JACOBI_TOL).unwrap().eigenvalues;
                let want: f64 = eig.iter().map(|l| l.powi(m as i32)).sum();
                let got = trace_power(&a, m).unwrap();
                let scale: f64 = eig.iter().map(|l| l.abs().powi(m as i32)).sum::<f64>().max(1.0);
                prop_assert!((got - want).abs() <= 1e-8 * scale, "{} vs {}", got, want);
            }
        }
    }
}
