//! Trace moments `E[Tr H^m]` of random Gabor frames: closed forms, an exact
//! combinatorial sum and Monte-Carlo estimators.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frameset::FrameSet;
use crate::gabor::gabor_frame_operator;
use crate::linalg::{root_of_unity, ComplexMatrix, C64};
use crate::metrics::centered;
use crate::rng;
use crate::tolerances::{EXACT_TRACE_TERM_LIMIT, MAX_BIJECTION_ORDER, MC_ROUNDING_TOL};
use crate::window::{Window, WindowKind};

/// `E[Tr H^2] = |Lambda| - (1/M) sum_k |A_k|^2` for Steinhaus windows.
pub fn expected_trace2_steinhaus(lambda: &FrameSet) -> f64 {
    let fiber_sq: usize = lambda.fibers().iter().map(|f| f.len() * f.len()).sum();
    lambda.cardinality() as f64 - fiber_sq as f64 / lambda.dim() as f64
}

/// `E[Tr H^2] = |Lambda|` for Gaussian windows.
pub fn expected_trace2_gaussian(lambda: &FrameSet) -> f64 {
    lambda.cardinality() as f64
}

/// Monte-Carlo estimate of `E[Tr H^m]` over random windows with `Lambda` fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMomentEstimate {
    pub kind: WindowKind,
    pub dim: usize,
    pub lambda_size: usize,
    pub m: u32,
    pub mean: f64,
    /// Standard error of the mean from the unbiased sample variance.
    pub std_error: f64,
    pub samples: usize,
}

impl TraceMomentEstimate {
    /// `(M / |Lambda|)^m` times the mean.
    pub fn normalized_mean(&self) -> f64 {
        self.normalization() * self.mean
    }

    pub fn normalized_std_error(&self) -> f64 {
        self.normalization() * self.std_error
    }

    fn normalization(&self) -> f64 {
        (self.dim as f64 / self.lambda_size as f64).powi(self.m as i32)
    }

    pub fn csv_header() -> &'static str {
        "M,lambda_size,kind,m,samples,mean,std_error,normalized_mean"
    }

    /// Whether `value` lies in `mean +- z * std_error`, up to rounding.
    pub fn covers(&self, value: f64, z: f64) -> bool {
        (value - self.mean).abs() <= z * self.std_error + MC_ROUNDING_TOL * value.abs().max(1.0)
    }
}

/// `Tr(H^m)` for each requested order. Powers up to `ceil(max / 2)` are
/// formed explicitly; `Tr(H^(a+b)) = sum_ij H^a(i,j) H^b(j,i)`.
pub fn trace_powers(h: &ComplexMatrix, orders: &[u32]) -> Result<Vec<f64>> {
    if orders.contains(&0) {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let top = orders.iter().copied().max().unwrap_or(0);
    let half = top.div_ceil(2).max(1) as usize;
    let mut powers = vec![h.clone()];
    while powers.len() < half {
        let next = powers.last().expect("non-empty").matmul(h)?;
        powers.push(next);
    }
    let n = h.rows();
    Ok(orders
        .iter()
        .map(|&m| {
            let a = (m as usize).div_ceil(2);
            let b = m as usize - a;
            if b == 0 {
                return powers[a - 1].trace().re;
            }
            let (pa, pb) = (&powers[a - 1], &powers[b - 1]);
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += pa[(i, j)] * pb[(j, i)];
                }
            }
            acc.re
        })
        .collect())
}

/// Estimates `E[Tr H^m]` for several orders at once. Sample `i` draws its
/// window from `substream(seed, i)`, so results do not depend on the number
/// of worker threads.
pub fn mc_trace_moments(
    kind: WindowKind,
    lambda: &FrameSet,
    orders: &[u32],
    samples: usize,
    seed: u64,
) -> Result<Vec<TraceMomentEstimate>> {
    if !kind.is_random() {
        return Err(Error::InvalidParameter(format!("{kind} windows are not random")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are needed".into()));
    }
    if orders.is_empty() {
        return Err(Error::InvalidParameter("no moment orders requested".into()));
    }
    let m = lambda.dim();
    let n = lambda.cardinality();
    let traces: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(seed, i as u64);
            let g = Window::sample(kind, m, &mut r)?;
            let h = centered(&gabor_frame_operator(g.values(), lambda)?, n);
            trace_powers(&h, orders)
        })
        .collect::<Result<_>>()?;

    Ok(orders
        .iter()
        .enumerate()
        .map(|(o, &order)| {
            let values = traces.iter().map(|t| t[o]);
            let (mean, std_error) = mean_and_std_error(values, samples);
            TraceMomentEstimate { kind, dim: m, lambda_size: n, m: order, mean, std_error, samples }
        })
        .collect())
}

pub fn mc_trace_moment(
    kind: WindowKind,
    lambda: &FrameSet,
    m: u32,
    samples: usize,
    seed: u64,
) -> Result<TraceMomentEstimate> {
    Ok(mc_trace_moments(kind, lambda, &[m], samples, seed)?.remove(0))
}

fn mean_and_std_error(values: impl Iterator<Item = f64> + Clone, count: usize) -> (f64, f64) {
    let c = count as f64;
    let mean = values.clone().sum::<f64>() / c;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (c - 1.0);
    (mean, (var / c).sqrt())
}

/// `1 / M^m` when some permutation `a` of `{1..m}` has
/// `j_t - k_t = j_a(t) - k_(a(t)-1) (mod M)` for every `t` (cyclic, `k_0 = k_m`),
/// otherwise `0`.
pub fn bijection_weight(j: &[usize], k: &[usize], dim: usize) -> Result<f64> {
    let m = j.len();
    if m != k.len() {
        return Err(Error::DimensionMismatch { expected: m, found: k.len() });
    }
    if m == 0 || dim == 0 {
        return Err(Error::InvalidParameter("tuples and dimension must be non-empty".into()));
    }
    if m > MAX_BIJECTION_ORDER {
        return Err(Error::MTooLarge(m));
    }
    let lhs: Vec<usize> = (0..m).map(|t| (j[t] % dim + dim - k[t] % dim) % dim).collect();
    let rhs: Vec<usize> = (0..m).map(|t| (j[t] % dim + dim - k[(t + m - 1) % m] % dim) % dim).collect();
    let mut used = vec![false; m];
    Ok(if match_all(&lhs, &rhs, 0, &mut used) { (dim as f64).powi(-(m as i32)) } else { 0.0 })
}

fn match_all(lhs: &[usize], rhs: &[usize], t: usize, used: &mut [bool]) -> bool {
    if t == lhs.len() {
        return true;
    }
    for s in 0..rhs.len() {
        if !used[s] && rhs[s] == lhs[t] {
            used[s] = true;
            if match_all(lhs, rhs, t + 1, used) {
                return true;
            }
            used[s] = false;
        }
    }
    false
}

/// Exact `E[Tr H^m]` for Steinhaus windows by summing over all index tuples
/// with cyclically distinct `j`.
pub fn exact_trace_moment_steinhaus(lambda: &FrameSet, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let dim = lambda.dim();
    let terms = (dim as f64).powi(m as i32) * (lambda.cardinality() as f64).powi(m as i32);
    if terms > EXACT_TRACE_TERM_LIMIT {
        return Err(Error::TooManyTerms { terms, limit: EXACT_TRACE_TERM_LIMIT });
    }
    let m = m as usize;
    if m == 1 {
        return Ok(0.0);
    }
    // fiber_sums[k][d] = sum_{l in A_k} w^{l d}
    let fibers: Vec<(usize, Vec<C64>)> = lambda
        .fibers()
        .into_iter()
        .enumerate()
        .filter(|(_, f)| !f.is_empty())
        .map(|(k, f)| (k, (0..dim).map(|d| f.iter().map(|&l| root_of_unity(l * d % dim, dim)).sum()).collect()))
        .collect();

    let mut total = C64::new(0.0, 0.0);
    let mut j = vec![0usize; m];
    let mut kidx = vec![0usize; m];
    for jcode in 0..dim.pow(m as u32) {
        decode(jcode, dim, &mut j);
        if (0..m).any(|t| j[t] == j[(t + 1) % m]) {
            continue;
        }
        for kcode in 0..fibers.len().pow(m as u32) {
            decode(kcode, fibers.len(), &mut kidx);
            let k: Vec<usize> = kidx.iter().map(|&i| fibers[i].0).collect();
            let w = bijection_weight(&j, &k, dim)?;
            if w == 0.0 {
                continue;
            }
            let mut prod = C64::new(w, 0.0);
            for t in 0..m {
                let d = (j[t] + dim - j[(t + 1) % m]) % dim;
                prod *= fibers[kidx[t]].1[d];
            }
            total += prod;
        }
    }
    Ok(total.re)
}

fn decode(mut code: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut() {
        *slot = code % base;
        code /= base;
    }
}

/// `min(1, (M/|Lambda|)^(2m) delta^(-2m) E[Tr H^(2m)])`, an upper bound on the
/// probability that the frame bounds leave `(1 +- delta) |Lambda| / M`.
pub fn deviation_probability_bound(lambda: &FrameSet, m: u32, delta: f64, trace_moment_2m: f64) -> Result<f64> {
    if !(delta > 0.0) || !(trace_moment_2m >= 0.0) {
        return Err(Error::InvalidParameter("need delta > 0 and a non-negative trace moment".into()));
    }
    let ratio = lambda.dim() as f64 / lambda.cardinality() as f64;
    let e = 2 * m as i32;
    Ok((ratio.powi(e) * delta.powi(-e) * trace_moment_2m).min(1.0))
}
