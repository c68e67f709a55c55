//! Numerically erasure-robust frames: worst-case subframe condition numbers,
//! trace-based estimates, MUB certification and bounds, and `Delta(p)`.

use rand::seq::index;
use rayon::prelude::*;

use crate::combin::{binomial, colex_next, colex_rank, colex_unrank};
use crate::error::{Error, Result};
use crate::frameset::{FrameSet, FrameSetSpec};
use crate::gabor::{gabor_frame_operator, synthesize, tf_shift};
use crate::linalg::{hermitian_eigenvalues, jacobi_in_place, ComplexMatrix, C64};
use crate::metrics::inner;
use crate::rng;
use crate::tolerances::{EXHAUSTIVE_SUBSET_LIMIT, FRAME_LOWER_TOL, JACOBI_TOL, MUB_TOL, UNIT_NORM_TOL};
use crate::window::{Window, WindowKind};

/// `sqrt((1 + delta) / (1 - delta))`, infinite once `delta >= 1`.
pub fn cond_from_delta(delta: f64) -> f64 {
    if delta < 1.0 {
        ((1.0 + delta) / (1.0 - delta)).sqrt()
    } else {
        f64::INFINITY
    }
}

/// `sqrt(B / A)`, infinite when `A` does not exceed the spanning threshold.
fn cond_from_bounds(lower: f64, upper: f64) -> f64 {
    if lower > FRAME_LOWER_TOL {
        (upper / lower).sqrt()
    } else {
        f64::INFINITY
    }
}

/// `J = round((1 - p) N)`.
pub fn retained_count(p: f64, n: usize) -> usize {
    ((1.0 - p) * n as f64).round() as usize
}

/// A frame made of `m` orthonormal bases of `C^M` with cross-basis
/// coherence at most `1 / sqrt(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MubProfile {
    pub bases: usize,
    pub dim: usize,
    /// Basis index of every column.
    pub assignment: Vec<usize>,
    /// `m / M`.
    pub alpha: f64,
}

impl MubProfile {
    /// `|A_i|`: how many of the given columns come from each basis.
    pub fn fiber_sizes(&self, columns: &[usize]) -> Vec<usize> {
        let mut sizes = vec![0; self.bases];
        for &c in columns {
            sizes[self.assignment[c]] += 1;
        }
        sizes
    }
}

/// Checks that `phi` is an MUB frame under the given column-to-basis map.
pub fn verify_mub(phi: &ComplexMatrix, assignment: &[usize]) -> Result<MubProfile> {
    let (dim, n) = (phi.rows(), phi.cols());
    if assignment.len() != n {
        return Err(Error::InvalidAssignment(format!("{} labels for {n} columns", assignment.len())));
    }
    let bases = assignment.iter().copied().max().map_or(0, |b| b + 1);
    if bases == 0 || n != bases * dim {
        return Err(Error::InvalidAssignment(format!("{n} columns do not form {bases} bases of C^{dim}")));
    }
    let mut blocks = vec![Vec::new(); bases];
    for (c, &b) in assignment.iter().enumerate() {
        blocks[b].push(c);
    }
    if let Some(b) = blocks.iter().position(|blk| blk.len() != dim) {
        return Err(Error::InvalidAssignment(format!("basis {b} has {} columns, expected {dim}", blocks[b].len())));
    }
    let cols = phi.columns();
    for (b, blk) in blocks.iter().enumerate() {
        for (x, &i) in blk.iter().enumerate() {
            for &j in &blk[x..] {
                let target = if i == j { 1.0 } else { 0.0 };
                if (inner(&cols[i], &cols[j]) - C64::new(target, 0.0)).norm() > MUB_TOL {
                    return Err(Error::NotOrthonormalBasis(b));
                }
            }
        }
    }
    let limit = 1.0 / (dim as f64).sqrt() + MUB_TOL;
    for a in 0..bases {
        for b in a + 1..bases {
            for &i in &blocks[a] {
                for &j in &blocks[b] {
                    let v = inner(&cols[i], &cols[j]).norm();
                    if v > limit {
                        return Err(Error::CoherenceExceeded(a, b, v));
                    }
                }
            }
        }
    }
    Ok(MubProfile { bases, dim, assignment: assignment.to_vec(), alpha: bases as f64 / dim as f64 })
}

/// The full Alltop Gabor frame for prime `M >= 5`, columns grouped by
/// translation so that column `k M + l` belongs to basis `k`. With
/// `with_standard`, the standard basis is appended as basis `M`.
pub fn alltop_mub_frame(dim: usize, with_standard: bool) -> Result<(ComplexMatrix, Vec<usize>)> {
    let g = Window::generate(WindowKind::Alltop, dim, None)?;
    let phi = synthesize(&g, &FrameSet::build(dim, &FrameSetSpec::Full)?)?;
    let mut columns = phi.matrix.columns();
    let mut assignment: Vec<usize> = phi.labels.iter().map(|&(k, _)| k).collect();
    if with_standard {
        for i in 0..dim {
            let mut e = vec![C64::new(0.0, 0.0); dim];
            e[i] = C64::new(1.0, 0.0);
            columns.push(e);
            assignment.push(dim);
        }
    }
    Ok((ComplexMatrix::from_columns(&columns)?, assignment))
}

/// Condition number guaranteed for every subframe of an `m`-MUB frame with
/// `alpha = m / M` after erasing a fraction `p`: `delta = sqrt(p / (alpha (1 - p)))`.
pub fn mub_nerf_bound(p: f64, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) || !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("need p in [0, 1) and alpha > 0, got p = {p}, alpha = {alpha}")));
    }
    Ok(cond_from_delta((p / (alpha * (1.0 - p))).sqrt()))
}

/// Exact largest `delta_J` at trace order 1 over all `J`-column subframes of
/// an MUB frame, from the balanced split of `J` across the bases.
pub fn mub_trace_m1_via_partitions(profile: &MubProfile, j: usize) -> Result<f64> {
    let (m, dim) = (profile.bases, profile.dim);
    if j == 0 || j > m * dim {
        return Err(Error::InvalidParameter(format!("J must lie in 1..={}, got {j}", m * dim)));
    }
    let (q, r) = (j / m, j % m);
    let min_sq = (r * (q + 1) * (q + 1) + (m - r) * q * q) as f64;
    let (jf, mf) = (j as f64, dim as f64);
    let delta_sq = (mf / jf).powi(2) * (jf - min_sq / mf);
    Ok(cond_from_delta(delta_sq.max(0.0).sqrt()))
}

/// How subframes are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMode {
    /// Every `J`-subset, guarded by the exhaustive limit.
    Exhaustive,
    /// `count` uniform `J`-subsets, subset `i` drawn from `substream(seed, i)`.
    Sample { count: usize, seed: u64 },
}

/// Worst-case statistics over the visited `J`-column subframes.
#[derive(Debug, Clone, PartialEq)]
pub struct SubframeAudit {
    pub retained: usize,
    pub visited: u64,
    pub worst_cond: f64,
    /// The first maximizer: colex-first when exhaustive, lowest sample
    /// index when sampled.
    pub worst_subset: Vec<usize>,
    /// Largest `delta_J = ((M/J)^(2m) Tr(H_J^(2m)))^(1/(2m))` for `m = 1, 2`.
    pub max_delta: [f64; 2],
}

impl SubframeAudit {
    /// The condition-number estimate at trace order `m` in `{1, 2}`.
    pub fn trace_estimate(&self, m: usize) -> f64 {
        cond_from_delta(self.max_delta[m - 1])
    }
}

#[derive(Clone, Copy)]
struct Partial {
    cond: f64,
    key: u64,
    delta: [f64; 2],
}

impl Partial {
    const EMPTY: Partial = Partial { cond: f64::NEG_INFINITY, key: u64::MAX, delta: [0.0; 2] };

    fn merge(self, other: Partial) -> Partial {
        let better = other.cond > self.cond || (other.cond == self.cond && other.key < self.key);
        let (cond, key) = if better { (other.cond, other.key) } else { (self.cond, self.key) };
        Partial { cond, key, delta: [self.delta[0].max(other.delta[0]), self.delta[1].max(other.delta[1])] }
    }
}

/// Per-column outer products, used to assemble subframe operators.
struct Outer {
    dim: usize,
    n: usize,
    /// `n` row-major `dim x dim` blocks.
    blocks: Vec<C64>,
    total: Vec<C64>,
}

impl Outer {
    fn new(phi: &ComplexMatrix) -> Self {
        let (dim, n) = (phi.rows(), phi.cols());
        let mut blocks = vec![C64::new(0.0, 0.0); n * dim * dim];
        for c in 0..n {
            let col = phi.column(c);
            let block = &mut blocks[c * dim * dim..(c + 1) * dim * dim];
            for a in 0..dim {
                for b in 0..dim {
                    block[a * dim + b] = col[a] * col[b].conj();
                }
            }
        }
        let mut total = vec![C64::new(0.0, 0.0); dim * dim];
        for c in 0..n {
            for (t, v) in total.iter_mut().zip(&blocks[c * dim * dim..(c + 1) * dim * dim]) {
                *t += v;
            }
        }
        Self { dim, n, blocks, total }
    }

    /// Frame operator of the listed columns (ascending). Sums whichever of
    /// the subset and its complement is smaller.
    fn operator(&self, subset: &[usize], out: &mut [C64], mask: &mut [bool]) {
        let d2 = self.dim * self.dim;
        if 2 * subset.len() <= self.n {
            out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for &c in subset {
                for (t, v) in out.iter_mut().zip(&self.blocks[c * d2..(c + 1) * d2]) {
                    *t += v;
                }
            }
        } else {
            out.copy_from_slice(&self.total);
            mask.iter_mut().for_each(|m| *m = false);
            for &c in subset {
                mask[c] = true;
            }
            for c in (0..self.n).filter(|&c| !mask[c]) {
                for (t, v) in out.iter_mut().zip(&self.blocks[c * d2..(c + 1) * d2]) {
                    *t -= v;
                }
            }
        }
    }
}

struct Scratch {
    op: Vec<C64>,
    h: Vec<C64>,
    mask: Vec<bool>,
}

impl Scratch {
    fn new(dim: usize, n: usize) -> Self {
        Self { op: vec![C64::new(0.0, 0.0); dim * dim], h: vec![C64::new(0.0, 0.0); dim * dim], mask: vec![false; n] }
    }
}

fn evaluate(outer: &Outer, subset: &[usize], key: u64, scratch: &mut Scratch) -> Result<Partial> {
    let dim = outer.dim;
    outer.operator(subset, &mut scratch.op, &mut scratch.mask);
    let j = subset.len() as f64;
    let h = &mut scratch.h;
    h.copy_from_slice(&scratch.op);
    for i in 0..dim {
        h[i * dim + i] -= j / dim as f64;
    }
    let tr2: f64 = h.iter().map(C64::norm_sqr).sum();
    let mut tr4 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let mut v = C64::new(0.0, 0.0);
            for c in 0..dim {
                v += h[a * dim + c] * h[c * dim + b];
            }
            tr4 += v.norm_sqr();
        }
    }
    let ratio = dim as f64 / j;
    let delta = [(ratio * ratio * tr2).sqrt(), (ratio.powi(4) * tr4).powf(0.25)];
    let cond = if subset.len() < dim {
        f64::INFINITY
    } else {
        // the operator is exactly Hermitian by construction
        jacobi_in_place(&mut scratch.op, dim, JACOBI_TOL)?;
        let diag = (0..dim).map(|i| scratch.op[i * dim + i].re);
        let (lo, hi) = diag.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
        cond_from_bounds(lo, hi)
    };
    Ok(Partial { cond, key, delta })
}

const CHUNK: u64 = 1 << 15;

fn exhaustive_guard(n: usize, j: usize) -> Result<u64> {
    let count = binomial(n, j).map_or(f64::INFINITY, |c| c as f64);
    if count > EXHAUSTIVE_SUBSET_LIMIT {
        return Err(Error::SubsetTooLarge { n, k: j, count, limit: EXHAUSTIVE_SUBSET_LIMIT });
    }
    Ok(count as u64)
}

fn sample_subset(n: usize, j: usize, seed: u64, i: usize) -> Vec<usize> {
    let mut r = rng::substream(seed, i as u64);
    let mut s = index::sample(&mut r, n, j).into_vec();
    s.sort_unstable();
    s
}

/// Visits `J`-column subframes of `phi` and records the worst condition
/// number and the largest trace deviations. Results do not depend on the
/// number of worker threads.
pub fn audit_subframes(phi: &ComplexMatrix, j: usize, mode: SubsetMode) -> Result<SubframeAudit> {
    let n = phi.cols();
    if j == 0 || j > n {
        return Err(Error::InvalidParameter(format!("J must lie in 1..={n}, got {j}")));
    }
    let outer = Outer::new(phi);
    let dim = phi.rows();
    let scratch = || Scratch::new(dim, n);

    let (visited, best) = match mode {
        SubsetMode::Exhaustive => {
            let total = exhaustive_guard(n, j)?;
            let chunks = total.div_ceil(CHUNK);
            let partials: Vec<Partial> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut sc = scratch();
                    let start = c * CHUNK;
                    let end = (start + CHUNK).min(total);
                    let mut comb = colex_unrank(start, j);
                    let mut acc = Partial::EMPTY;
                    for rank in start..end {
                        acc = acc.merge(evaluate(&outer, &comb, rank, &mut sc)?);
                        colex_next(&mut comb, n);
                    }
                    Ok(acc)
                })
                .collect::<Result<_>>()?;
            (total, partials.into_iter().fold(Partial::EMPTY, Partial::merge))
        }
        SubsetMode::Sample { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidParameter("sample count must be positive".into()));
            }
            let partials: Vec<Partial> = (0..count)
                .into_par_iter()
                .map_init(scratch, |sc, i| evaluate(&outer, &sample_subset(n, j, seed, i), i as u64, sc))
                .collect::<Result<_>>()?;
            (count as u64, partials.into_iter().fold(Partial::EMPTY, Partial::merge))
        }
    };
    let worst_subset = match mode {
        SubsetMode::Exhaustive => colex_unrank(best.key, j),
        SubsetMode::Sample { seed, .. } => sample_subset(n, j, seed, best.key as usize),
    };
    debug_assert!(matches!(mode, SubsetMode::Sample { .. }) || colex_rank(&worst_subset) == best.key);
    Ok(SubframeAudit { retained: j, visited, worst_cond: best.cond, worst_subset, max_delta: best.delta })
}

/// Largest `Cond` over `J`-column subframes and a subset attaining it.
pub fn enumerate_worst_cond(phi: &ComplexMatrix, j: usize, mode: SubsetMode) -> Result<(f64, Vec<usize>)> {
    let audit = audit_subframes(phi, j, mode)?;
    Ok((audit.worst_cond, audit.worst_subset))
}

/// `sqrt((1 + delta*) / (1 - delta*))` for the largest trace deviation
/// `delta*` at order `m` in `{1, 2}` over `J`-column subframes.
pub fn trace_cond_estimate(phi: &ComplexMatrix, j: usize, m: usize, mode: SubsetMode) -> Result<f64> {
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidParameter(format!("trace order must be 1 or 2, got {m}")));
    }
    Ok(audit_subframes(phi, j, mode)?.trace_estimate(m))
}

/// One erasure rate of a NERF table.
#[derive(Debug, Clone, PartialEq)]
pub struct NerfRow {
    pub p: f64,
    pub retained: usize,
    pub est_trace_m1: f64,
    pub est_trace_m2: f64,
    pub est_theoretical: f64,
    pub worst_cond: f64,
}

impl NerfRow {
    pub fn csv_header() -> &'static str {
        "p,J,est_trace_m1,est_trace_m2,est_theoretical,worst_cond"
    }
}

/// One row per erasure rate for an MUB frame, with `J = round((1 - p) N)`.
/// The theoretical column uses the realized rate `1 - J/N`, which differs
/// from `p` when `(1 - p) N` is not an integer.
pub fn nerf_table(phi: &ComplexMatrix, profile: &MubProfile, rates: &[f64], mode: SubsetMode) -> Result<Vec<NerfRow>> {
    rates
        .iter()
        .map(|&p| {
            let j = retained_count(p, phi.cols());
            mub_nerf_bound(p, profile.alpha)?;
            let theoretical = mub_nerf_bound(1.0 - j as f64 / phi.cols() as f64, profile.alpha)?;
            let audit = audit_subframes(phi, j, mode)?;
            Ok(NerfRow {
                p,
                retained: j,
                est_trace_m1: audit.trace_estimate(1),
                est_trace_m2: audit.trace_estimate(2),
                est_theoretical: theoretical,
                worst_cond: audit.worst_cond,
            })
        })
        .collect()
}

/// `|<pi(lambda) g, g>|^2` over all of `Z_M x Z_M`, in decreasing order.
pub fn ambiguity_sequence(g: &Window) -> Vec<f64> {
    let m = g.dim();
    let mut d: Vec<f64> = (0..m)
        .flat_map(|k| (0..m).map(move |l| (k, l)))
        .map(|(k, l)| inner(&tf_shift(g.values(), k, l), g.values()).norm_sqr())
        .collect();
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

/// Condition-number guarantee for the full Gabor frame of a unit-norm `g`
/// after erasing a fraction `p` of its `M^2` vectors:
/// `sqrt(M) / sqrt(J/M - (M-1)/(2M) - (J sum_{j<=J} d_j - J^2/M) / 2)` with
/// `J = round((1 - p) M^2)` and `d` the decreasing ambiguity sequence;
/// infinite when the radicand is not positive.
pub fn gabor_nerf_bound(g: &Window, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1), got {p}")));
    }
    let norm = g.norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NotUnitNorm { column: 0, norm });
    }
    let m = g.dim() as f64;
    let d = ambiguity_sequence(g);
    let j = retained_count(p, d.len());
    let jf = j as f64;
    let head: f64 = d[..j].iter().sum();
    let radicand = jf / m - (m - 1.0) / (2.0 * m) - 0.5 * (jf * head - jf * jf / m);
    Ok(if radicand > 0.0 { (m / radicand).sqrt() } else { f64::INFINITY })
}

/// Smallest lower frame bound over subsets `Lambda'` of `Lambda` with
/// `ceil((1 - p) |Lambda|)` points.
pub fn delta_p(g: &Window, lambda: &FrameSet, p: f64, mode: SubsetMode) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1), got {p}")));
    }
    let n = lambda.cardinality();
    let size = (((1.0 - p) * n as f64) - 1e-9).ceil().max(1.0) as usize;
    let lower = |positions: &[usize]| -> Result<f64> {
        let s = gabor_frame_operator(g.values(), &lambda.subset(positions)?)?;
        Ok(hermitian_eigenvalues(&s, JACOBI_TOL)?.eigenvalues[0])
    };
    match mode {
        SubsetMode::Exhaustive => {
            let total = exhaustive_guard(n, size)?;
            let mut comb: Vec<usize> = (0..size).collect();
            let mut best = f64::INFINITY;
            for _ in 0..total {
                best = best.min(lower(&comb)?);
                colex_next(&mut comb, n);
            }
            Ok(best)
        }
        SubsetMode::Sample { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidParameter("sample count must be positive".into()));
            }
            let values: Vec<f64> = (0..count)
                .into_par_iter()
                .map(|i| lower(&sample_subset(n, size, seed, i)))
                .collect::<Result<_>>()?;
            Ok(values.into_iter().fold(f64::INFINITY, f64::min))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::frame_bounds;
    use crate::frameset::Side;

    fn alltop5() -> (ComplexMatrix, MubProfile) {
        let (phi, assignment) = alltop_mub_frame(5, false).unwrap();
        let profile = verify_mub(&phi, &assignment).unwrap();
        (phi, profile)
    }

    #[test]
    fn cond_from_delta_domain() {
        assert_eq!(cond_from_delta(0.0), 1.0);
        assert!((cond_from_delta(0.5) - 3f64.sqrt()).abs() < 1e-15);
        assert!(cond_from_delta(1.0).is_infinite());
    }

    #[test]
    fn retained_counts() {
        let j: Vec<usize> = (0..18).map(|i| retained_count(0.04 * i as f64, 25)).collect();
        assert_eq!(j, (8..=25).rev().collect::<Vec<_>>());
    }

    #[test]
    fn mub_certification() {
        for m in [5, 7] {
            let (phi, a) = alltop_mub_frame(m, false).unwrap();
            let p = verify_mub(&phi, &a).unwrap();
            assert_eq!((p.bases, p.alpha), (m, 1.0));
            let (phi, a) = alltop_mub_frame(m, true).unwrap();
            let p = verify_mub(&phi, &a).unwrap();
            assert!((p.alpha - (1.0 + 1.0 / m as f64)).abs() < 1e-15);
        }
        let id = ComplexMatrix::identity(4);
        assert_eq!(verify_mub(&id, &[0; 4]).unwrap().bases, 1);
    }

    #[test]
    fn mub_rejections() {
        let (phi, a) = alltop_mub_frame(5, false).unwrap();
        let mut swapped = a.clone();
        swapped.swap(0, 5);
        swapped.swap(1, 6);
        assert!(matches!(verify_mub(&phi, &swapped), Err(Error::NotOrthonormalBasis(_))));
        assert!(matches!(verify_mub(&phi, &a[1..]), Err(Error::InvalidAssignment(_))));
        // two copies of the same basis: coherence 1
        let twice = ComplexMatrix::from_columns(&[ComplexMatrix::identity(3).columns(), ComplexMatrix::identity(3).columns()].concat()).unwrap();
        assert!(matches!(verify_mub(&twice, &[0, 0, 0, 1, 1, 1]), Err(Error::CoherenceExceeded(0, 1, _))));
        let uneven = vec![0, 0, 0, 0, 1, 1];
        assert!(matches!(verify_mub(&twice, &uneven), Err(Error::InvalidAssignment(_))));
    }

    #[test]
    fn mub_nerf_bound_values() {
        assert_eq!(mub_nerf_bound(0.0, 0.7).unwrap(), 1.0);
        assert!((mub_nerf_bound(0.2, 1.0).unwrap() - 3f64.sqrt()).abs() < 1e-9);
        assert!((mub_nerf_bound(0.4, 1.0).unwrap() - 3.146264).abs() < 1e-5);
        assert!(mub_nerf_bound(0.52, 1.0).unwrap().is_infinite());
        assert!(mub_nerf_bound(1.0, 1.0).is_err());
        let mut last = 1.0;
        for i in 1..10 {
            let c = mub_nerf_bound(0.04 * i as f64, 1.0).unwrap();
            assert!(c > last);
            assert!(mub_nerf_bound(0.04 * i as f64, 1.2).unwrap() < c);
            last = c;
        }
    }

    #[test]
    fn partition_estimate_examples() {
        let (_, profile) = alltop5();
        assert!((mub_trace_m1_via_partitions(&profile, 24).unwrap() - 1.207488).abs() < 1e-6);
        assert_eq!(mub_trace_m1_via_partitions(&profile, 25).unwrap(), 1.0);
        assert!(mub_trace_m1_via_partitions(&profile, 12).unwrap().is_infinite());
        assert!(mub_trace_m1_via_partitions(&profile, 26).is_err());
    }

    #[test]
    fn small_rows_match_reference_values() {
        let (phi, profile) = alltop5();
        let rows = nerf_table(&phi, &profile, &[0.0, 0.04, 0.08], SubsetMode::Exhaustive).unwrap();
        let expected = [
            [1.0, 1.0, 1.0, 1.0],
            [1.207488, 1.184004, 1.230022, 1.118034],
            [1.326102, 1.265527, 1.355143, 1.186316],
        ];
        for (row, want) in rows.iter().zip(expected) {
            let got = [row.est_trace_m1, row.est_trace_m2, row.est_theoretical, row.worst_cond];
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-5, "p = {}: {got:?}", row.p);
            }
        }
        for j in [23, 24, 25] {
            let exact = audit_subframes(&phi, j, SubsetMode::Exhaustive).unwrap().trace_estimate(1);
            assert!((exact - mub_trace_m1_via_partitions(&profile, j).unwrap()).abs() < 1e-9);
        }
    }

    /// Worst condition number by direct per-subset frame bounds.
    fn brute_worst_cond(phi: &ComplexMatrix, j: usize) -> (f64, Vec<usize>) {
        let n = phi.cols();
        let mut comb: Vec<usize> = (0..j).collect();
        let mut best = (f64::NEG_INFINITY, Vec::new());
        loop {
            let c = frame_bounds(&phi.select_columns(&comb)).unwrap().cond;
            if c > best.0 {
                best = (c, comb.clone());
            }
            if !colex_next(&mut comb, n) {
                return best;
            }
        }
    }

    #[test]
    fn audit_matches_brute_force() {
        let g = Window::generate(WindowKind::Sphere, 3, Some(4)).unwrap();
        let phi = synthesize(&g, &FrameSet::build(3, &FrameSetSpec::Full).unwrap()).unwrap().matrix;
        for j in [2, 3, 5, 8, 9] {
            let audit = audit_subframes(&phi, j, SubsetMode::Exhaustive).unwrap();
            let (cond, subset) = brute_worst_cond(&phi, j);
            if cond.is_finite() {
                assert!((audit.worst_cond - cond).abs() < 1e-9 * cond);
            } else {
                assert!(audit.worst_cond.is_infinite());
                assert_eq!(audit.worst_subset, subset);
            }
            assert_eq!(audit.visited, binomial(9, j).unwrap());
        }
    }

    #[test]
    fn sampled_audit_is_reproducible_and_bounded() {
        let (phi, _) = alltop5();
        let a = audit_subframes(&phi, 20, SubsetMode::Sample { count: 300, seed: 8 }).unwrap();
        let b = audit_subframes(&phi, 20, SubsetMode::Sample { count: 300, seed: 8 }).unwrap();
        assert_eq!(a, b);
        assert!(a.worst_cond <= 1.451066 + 1e-6);
        assert_eq!(a.worst_subset.len(), 20);
        let (c, _) = enumerate_worst_cond(&phi, 20, SubsetMode::Sample { count: 300, seed: 8 }).unwrap();
        assert_eq!(c, a.worst_cond);
    }

    #[test]
    fn exhaustive_guard_trips() {
        let g = Window::generate(WindowKind::Steinhaus, 6, Some(1)).unwrap();
        let phi = synthesize(&g, &FrameSet::build(6, &FrameSetSpec::Full).unwrap()).unwrap().matrix;
        assert!(matches!(audit_subframes(&phi, 18, SubsetMode::Exhaustive), Err(Error::SubsetTooLarge { .. })));
        assert!(audit_subframes(&phi, 0, SubsetMode::Exhaustive).is_err());
        assert!(trace_cond_estimate(&phi, 30, 3, SubsetMode::Exhaustive).is_err());
    }

    #[test]
    fn alltop_ambiguity_sequence() {
        let g = Window::generate(WindowKind::Alltop, 5, None).unwrap();
        let d = ambiguity_sequence(&g);
        assert!((d[0] - 1.0).abs() < 1e-10);
        assert!(d[1..21].iter().all(|&v| (v - 0.2).abs() < 1e-10));
        assert!(d[21..].iter().all(|&v| v.abs() < 1e-10));
    }

    #[test]
    fn gabor_nerf_bound_is_sound_at_small_erasures() {
        let (phi, _) = alltop5();
        let g = Window::generate(WindowKind::Alltop, 5, None).unwrap();
        let c = gabor_nerf_bound(&g, 0.04).unwrap();
        assert!((c - 2.5f64.sqrt()).abs() < 1e-9);
        for p in [0.0, 0.04, 0.08, 0.12] {
            let bound = gabor_nerf_bound(&g, p).unwrap();
            let (worst, _) = enumerate_worst_cond(&phi, retained_count(p, 25), SubsetMode::Exhaustive).unwrap();
            assert!(bound.is_infinite() || worst <= bound + 1e-9, "p = {p}");
        }
        assert!(gabor_nerf_bound(&g, 0.6).unwrap().is_infinite());
        let loud = Window::custom(vec![C64::new(2.0, 0.0); 3]).unwrap();
        assert!(matches!(gabor_nerf_bound(&loud, 0.1), Err(Error::NotUnitNorm { .. })));
    }

    #[test]
    fn delta_p_examples() {
        let g = Window::generate(WindowKind::Steinhaus, 6, Some(3)).unwrap();
        let full = FrameSet::build(6, &FrameSetSpec::Full).unwrap();
        let a = delta_p(&g, &full, 0.0, SubsetMode::Sample { count: 3, seed: 1 }).unwrap();
        assert!((a - 6.0).abs() < 1e-9);
        // one erasure from the full Steinhaus frame: M - 1 <= A
        let p = 1.0 / 36.0;
        let one = delta_p(&g, &full, p, SubsetMode::Exhaustive).unwrap();
        assert!((5.0 - 1e-9..=6.0 + 1e-9).contains(&one));
        let sampled = delta_p(&g, &full, p, SubsetMode::Sample { count: 50, seed: 2 }).unwrap();
        assert!(sampled >= one - 1e-12);
        let lambda = FrameSet::build(6, &FrameSetSpec::Product { set: vec![0, 2], side: Side::Time }).unwrap();
        let r1 = delta_p(&g, &lambda, 0.3, SubsetMode::Sample { count: 40, seed: 5 }).unwrap();
        let r2 = delta_p(&g, &lambda, 0.3, SubsetMode::Sample { count: 40, seed: 5 }).unwrap();
        assert_eq!(r1, r2);
        assert!(delta_p(&g, &lambda, 1.0, SubsetMode::Exhaustive).is_err());
    }
}
