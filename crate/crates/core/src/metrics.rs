//! Frame bounds, condition numbers, coherence and frame potential.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, is_positive_definite, ComplexMatrix, C64};
use crate::tolerances::{FRAME_LOWER_TOL, JACOBI_TOL, TIGHT_TOL, UNIT_NORM_TOL};

/// Spectrum of a frame operator `Phi Phi^*` and the quantities derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Eigenvalues of the frame operator, ascending.
    pub eigenvalues: Vec<f64>,
    /// Optimal lower frame bound `A`.
    pub lower_bound: f64,
    /// Optimal upper frame bound `B`.
    pub upper_bound: f64,
    /// `sqrt(B / A)`; infinite when the vectors do not span.
    pub cond: f64,
    /// `max_j |(M/N) sigma_j^2 - 1|`.
    pub delta: f64,
    pub frame_size: usize,
    pub dim: usize,
    pub is_frame: bool,
}

impl SpectrumReport {
    /// Builds the report from a frame operator of `frame_size` vectors.
    pub fn from_operator(operator: &ComplexMatrix, frame_size: usize) -> Result<Self> {
        let mut eigenvalues = hermitian_eigenvalues(operator, JACOBI_TOL)?.eigenvalues;
        let dim = eigenvalues.len();
        if frame_size < dim {
            // rank deficiency forces dim - N exact zeros
            for e in eigenvalues.iter_mut().take(dim - frame_size) {
                *e = 0.0;
            }
        }
        let lower_bound = eigenvalues[0];
        let upper_bound = eigenvalues[dim - 1];
        let is_frame = lower_bound > FRAME_LOWER_TOL;
        let cond = if is_frame { (upper_bound / lower_bound).sqrt() } else { f64::INFINITY };
        let ratio = dim as f64 / frame_size as f64;
        let delta = eigenvalues.iter().map(|&e| (ratio * e - 1.0).abs()).fold(0.0, f64::max);
        Ok(Self { eigenvalues, lower_bound, upper_bound, cond, delta, frame_size, dim, is_frame })
    }

    pub fn is_tight(&self) -> bool {
        self.delta <= TIGHT_TOL
    }

    pub fn csv_header() -> &'static str {
        "M,N,A,B,cond,delta"
    }

    pub fn to_json(&self) -> Value {
        json!({
            "M": self.dim,
            "N": self.frame_size,
            "eigenvalues": self.eigenvalues,
            "A": self.lower_bound,
            "B": self.upper_bound,
            "cond": if self.cond.is_finite() { json!(self.cond) } else { Value::Null },
            "cond_is_inf": !self.cond.is_finite(),
            "delta": self.delta,
            "is_frame": self.is_frame,
        })
    }
}

/// Frame bounds of the columns of `phi` via the `M x M` frame operator.
pub fn frame_bounds(phi: &ComplexMatrix) -> Result<SpectrumReport> {
    SpectrumReport::from_operator(&phi.gram_outer(), phi.cols())
}

/// Whether every eigenvalue of the Hermitian `operator` lies strictly inside
/// `(lower, upper)`, decided by two Cholesky factorizations.
pub fn spectrum_inside(operator: &ComplexMatrix, lower: f64, upper: f64) -> Result<bool> {
    Ok(is_positive_definite(&operator.shift_diagonal(-lower))?
        && is_positive_definite(&operator.shift_diagonal(-upper).scaled(-1.0))?)
}

fn column_norm(phi: &ComplexMatrix, j: usize) -> f64 {
    (0..phi.rows()).map(|i| phi[(i, j)].norm_sqr()).sum::<f64>().sqrt()
}

pub fn check_unit_norm(phi: &ComplexMatrix) -> Result<()> {
    for j in 0..phi.cols() {
        let norm = column_norm(phi, j);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { column: j, norm });
        }
    }
    Ok(())
}

/// `max_{j != j'} |<phi_j, phi_j'>|` for a unit-norm frame.
pub fn coherence(phi: &ComplexMatrix) -> Result<f64> {
    check_unit_norm(phi)?;
    let cols = phi.columns();
    let mut worst = 0.0f64;
    for a in 0..cols.len() {
        for b in a + 1..cols.len() {
            worst = worst.max(inner(&cols[a], &cols[b]).norm());
        }
    }
    Ok(worst)
}

/// `<x, y> = sum x_i conj(y_i)`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// `FP = sum_{j,j'} |<phi_j, phi_j'>|^2`, evaluated as `||Phi Phi^*||_F^2`.
pub fn frame_potential(phi: &ComplexMatrix) -> f64 {
    phi.gram_outer().frobenius_norm_sqr()
}

/// `H = Phi Phi^* - (N/M) I`.
pub fn h_matrix(phi: &ComplexMatrix) -> ComplexMatrix {
    centered(&phi.gram_outer(), phi.cols())
}

/// `S - (N/M) I` for a frame operator `S` of `n` vectors.
pub fn centered(operator: &ComplexMatrix, n: usize) -> ComplexMatrix {
    operator.shift_diagonal(-(n as f64) / operator.rows() as f64)
}

/// Lower bound on `A` for unit-norm frames:
/// `N/M - (M-1)/(2M) - Tr(H^2)/2`.
pub fn lower_bound_welch(phi: &ComplexMatrix) -> Result<f64> {
    check_unit_norm(phi)?;
    let (m, n) = (phi.rows() as f64, phi.cols() as f64);
    let tr_h2 = h_matrix(phi).frobenius_norm_sqr();
    Ok(n / m - (m - 1.0) / (2.0 * m) - 0.5 * tr_h2)
}
