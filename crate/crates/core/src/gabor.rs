//! Time-frequency shifts and Gabor synthesis matrices.

use crate::error::{Error, Result};
use crate::frameset::{FrameSet, TfPoint};
use crate::linalg::{root_of_unity, ComplexMatrix, C64};
use crate::window::Window;

/// `pi(k, l) x`, i.e. `M_l T_k x`: `result[j] = exp(2 pi i l j / M) x[j - k]`.
pub fn tf_shift(x: &[C64], k: usize, l: usize) -> Vec<C64> {
    let m = x.len();
    if m == 0 {
        return Vec::new();
    }
    let (k, l) = (k % m, l % m);
    (0..m).map(|j| root_of_unity(l * j % m, m) * x[(j + m - k) % m]).collect()
}

/// The unimodular `c` with `pi(a) pi(b) = c * pi(a + b)`, namely
/// `exp(-2 pi i k_a l_b / M)`.
pub fn composition_phase(a: TfPoint, b: TfPoint, m: usize) -> C64 {
    root_of_unity((a.0 % m) * (b.1 % m) % m, m).conj()
}

/// The matrix of `pi(k, l)` acting on `C^M`.
pub fn tf_operator(m: usize, k: usize, l: usize) -> ComplexMatrix {
    let columns: Vec<Vec<C64>> = (0..m)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); m];
            e[j] = C64::new(1.0, 0.0);
            tf_shift(&e, k, l)
        })
        .collect();
    ComplexMatrix::from_columns(&columns).expect("square operator")
}

/// Synthesis matrix of a frame. Gabor frames carry the `(k, l)` label of each
/// column; arbitrary frames have no labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisMatrix {
    pub matrix: ComplexMatrix,
    pub labels: Vec<TfPoint>,
}

impl SynthesisMatrix {
    pub fn from_matrix(matrix: ComplexMatrix) -> Self {
        Self { matrix, labels: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.cols() == 0
    }
}

/// Columns `pi(lambda) g` for `lambda` in lexicographic order.
pub fn synthesize(g: &Window, lambda: &FrameSet) -> Result<SynthesisMatrix> {
    if g.dim() != lambda.dim() {
        return Err(Error::DimensionMismatch { expected: lambda.dim(), found: g.dim() });
    }
    let columns: Vec<Vec<C64>> = lambda.points().iter().map(|&(k, l)| tf_shift(g.values(), k, l)).collect();
    Ok(SynthesisMatrix { matrix: ComplexMatrix::from_columns(&columns)?, labels: lambda.points().to_vec() })
}

/// Frame operator of `(g, Lambda)` without forming the synthesis matrix.
///
/// `S(a, b) = sum_k g(a - k) conj(g(b - k)) sum_{l in A_k} exp(2 pi i l (a - b) / M)`,
/// which costs `O(|Lambda| M + K M^2)` for `K` non-empty fibers.
pub fn gabor_frame_operator(g: &[C64], lambda: &FrameSet) -> Result<ComplexMatrix> {
    let m = lambda.dim();
    if g.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: g.len() });
    }
    let roots: Vec<C64> = (0..m).map(|r| root_of_unity(r, m)).collect();
    // fiber_sums[i][d] = sum_{l in A_k} w^{l d} for the i-th non-empty fiber k
    let fibers: Vec<(usize, Vec<C64>)> = lambda
        .fibers()
        .into_iter()
        .enumerate()
        .filter(|(_, f)| !f.is_empty())
        .map(|(k, fiber)| {
            let sums = (0..m).map(|d| fiber.iter().map(|&l| roots[l * d % m]).sum()).collect();
            (k, sums)
        })
        .collect();

    let mut s = ComplexMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let d = (a + m - b) % m;
            let mut acc = C64::new(0.0, 0.0);
            for (k, sums) in &fibers {
                acc += g[(a + m - k) % m] * g[(b + m - k) % m].conj() * sums[d];
            }
            if a == b {
                s[(a, a)] = C64::new(acc.re, 0.0);
            } else {
                s[(a, b)] = acc;
                s[(b, a)] = acc.conj();
            }
        }
    }
    Ok(s)
}
