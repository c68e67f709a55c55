//! Fourier bias of subsets of `Z_M` and Monte-Carlo checks of tail bounds
//! for random sets, random roots of unity and Gaussian vectors.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, C64};
use crate::rng;
use crate::window::gaussian;

/// A sorted set of distinct residues modulo `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetOfZM {
    dim: usize,
    members: Vec<usize>,
}

impl SubsetOfZM {
    pub fn new(dim: usize, mut members: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("modulus must be positive".into()));
        }
        if let Some(v) = members.iter().find(|&&v| v >= dim) {
            return Err(Error::InvalidParameter(format!("{v} is not a residue modulo {dim}")));
        }
        members.sort_unstable();
        let before = members.len();
        members.dedup();
        if members.len() != before {
            return Err(Error::InvalidParameter("subset members must be distinct".into()));
        }
        Ok(Self { dim, members })
    }

    pub fn full(dim: usize) -> Self {
        Self { dim, members: (0..dim).collect() }
    }

    /// Keeps each residue independently with probability `tau`.
    pub fn bernoulli(dim: usize, tau: f64, rng: &mut rng::Rng) -> Self {
        Self { dim, members: (0..dim).filter(|_| rng.random::<f64>() < tau).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn complement(&self) -> Self {
        let mut keep = vec![true; self.dim];
        for &c in &self.members {
            keep[c] = false;
        }
        Self { dim: self.dim, members: (0..self.dim).filter(|&c| keep[c]).collect() }
    }

    /// `{a c + b : c in C}`.
    pub fn affine_image(&self, a: usize, b: usize) -> Result<Self> {
        Self::new(self.dim, self.members.iter().map(|&c| (a * c + b) % self.dim).collect())
    }
}

/// `max_{m != 0} |sum_{c in C} exp(2 pi i c m / M)|`.
pub fn fourier_bias(set: &SubsetOfZM) -> Result<f64> {
    let m = set.dim;
    if m < 2 {
        return Err(Error::InvalidParameter("Fourier bias needs M >= 2".into()));
    }
    let roots: Vec<C64> = (0..m).map(|r| root_of_unity(r, m)).collect();
    let bias = (1..m)
        .map(|freq| set.members.iter().map(|&c| roots[c * freq % m]).sum::<C64>().norm())
        .fold(0.0, f64::max);
    Ok(bias)
}

/// The bias measured with the unitary DFT, i.e. divided by `sqrt(M)`.
pub fn fourier_bias_normalized(set: &SubsetOfZM) -> Result<f64> {
    Ok(fourier_bias(set)? / (set.dim as f64).sqrt())
}

/// Outcome of a Monte-Carlo tail check.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCheckReport {
    pub lemma: &'static str,
    pub dim: usize,
    /// Parameters as `key=value` pairs joined by `;`.
    pub params: String,
    pub trials: usize,
    pub violations: usize,
    pub empirical_rate: f64,
    pub theoretical_bound: f64,
}

impl TailCheckReport {
    fn new(lemma: &'static str, dim: usize, params: String, trials: usize, violations: usize, bound: f64) -> Self {
        Self {
            lemma,
            dim,
            params,
            trials,
            violations,
            empirical_rate: violations as f64 / trials as f64,
            theoretical_bound: bound,
        }
    }

    pub fn csv_header() -> &'static str {
        "lemma,M,params,trials,violations,empirical_rate,theoretical_bound"
    }

    /// `bound + 3 sqrt(bound (1 - bound) / trials) + 0.01`.
    pub fn allowed_rate(&self) -> f64 {
        let b = self.theoretical_bound.clamp(0.0, 1.0);
        b + 3.0 * (b * (1.0 - b) / self.trials as f64).sqrt() + 0.01
    }

    pub fn within_bound(&self) -> bool {
        self.empirical_rate <= self.allowed_rate()
    }
}

fn count_violations(trials: usize, seed: u64, violates: impl Fn(&mut rng::Rng) -> bool + Sync) -> Result<usize> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    Ok((0..trials).into_par_iter().filter(|&i| violates(&mut rng::substream(seed, i as u64))).count())
}

/// Counts Bernoulli(`tau`) subsets `B` of `Z_M` with bias at least `C log M`,
/// against the bound `M^-(C / (2 sqrt 2) - 2)`.
pub fn roots_of_unity_tail_check(dim: usize, tau: f64, c: f64, trials: usize, seed: u64) -> Result<TailCheckReport> {
    if c <= 4.0 * std::f64::consts::SQRT_2 {
        return Err(Error::InvalidParameter(format!("C must exceed 4 sqrt(2), got {c}")));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter(format!("tau must lie in (0, 1), got {tau}")));
    }
    if dim < 2 {
        return Err(Error::InvalidParameter("M must be at least 2".into()));
    }
    let threshold = c * (dim as f64).ln();
    let violations = count_violations(trials, seed, |r| {
        let b = SubsetOfZM::bernoulli(dim, tau, r);
        fourier_bias(&b).expect("M >= 2") >= threshold
    })?;
    let bound = (dim as f64).powf(-(c / (2.0 * std::f64::consts::SQRT_2) - 2.0));
    Ok(TailCheckReport::new("roots-of-unity", dim, format!("tau={tau};C={c}"), trials, violations, bound))
}

/// Counts draws of a Bernoulli(`tau`) set in `Z_M x Z_M` whose size deviates
/// from `tau M^2` by more than `t M^2`, against `2 exp(-2 t^2 M^2)`.
pub fn hoeffding_cardinality_check(dim: usize, tau: f64, t: f64, trials: usize, seed: u64) -> Result<TailCheckReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if !(0.0..=1.0).contains(&tau) || dim == 0 {
        return Err(Error::InvalidParameter("need tau in [0, 1] and M >= 1".into()));
    }
    let n = (dim * dim) as f64;
    let violations = count_violations(trials, seed, |r| {
        let size = (0..dim * dim).filter(|_| r.random::<f64>() < tau).count() as f64;
        (size - tau * n).abs() > t * n
    })?;
    let bound = (2.0 * (-2.0 * t * t * n).exp()).min(1.0);
    Ok(TailCheckReport::new("hoeffding", dim, format!("tau={tau};t={t}"), trials, violations, bound))
}

/// Whether `h` violates `1/2 < ||h||_2 < 2`.
pub fn gaussian_norm_violates(h: &[C64]) -> bool {
    let norm = h.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    !(norm > 0.5 && norm < 2.0)
}

/// Counts complex Gaussian vectors with covariance `I / M` whose norm leaves
/// `(1/2, 2)`, against `exp(-M/2) + exp(-9M/32)`.
pub fn gaussian_norm_check(dim: usize, trials: usize, seed: u64) -> Result<TailCheckReport> {
    if dim < 8 {
        return Err(Error::InvalidParameter(format!("M must be at least 8, got {dim}")));
    }
    let violations = count_violations(trials, seed, |r| gaussian_norm_violates(&gaussian(dim, r)))?;
    let m = dim as f64;
    let bound = ((-m / 2.0).exp() + (-9.0 * m / 32.0).exp()).min(1.0);
    Ok(TailCheckReport::new("gaussian-norm", dim, String::new(), trials, violations, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn bias_examples() {
        assert!(fourier_bias(&SubsetOfZM::full(12)).unwrap() < 1e-12);
        assert_eq!(fourier_bias(&SubsetOfZM::new(12, vec![]).unwrap()).unwrap(), 0.0);
        assert!((fourier_bias(&SubsetOfZM::new(9, vec![0]).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!(fourier_bias(&SubsetOfZM::new(1, vec![0]).unwrap()).is_err());
    }

    #[test]
    fn progression_bias_matches_dirichlet_kernel() {
        let set = SubsetOfZM::new(16, (0..8).collect()).unwrap();
        let oracle = (1..16)
            .map(|m| {
                let x = std::f64::consts::PI * m as f64;
                ((x / 2.0).sin() / (x / 16.0).sin()).abs()
            })
            .fold(0.0, f64::max);
        assert!((fourier_bias(&set).unwrap() - oracle).abs() < 1e-10);
        let n = fourier_bias_normalized(&set).unwrap();
        assert!((n - oracle / 4.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_subsets() {
        assert!(SubsetOfZM::new(4, vec![4]).is_err());
        assert!(SubsetOfZM::new(4, vec![1, 1]).is_err());
        assert!(SubsetOfZM::new(0, vec![]).is_err());
        assert_eq!(SubsetOfZM::new(5, vec![3, 0]).unwrap().members(), &[0, 3]);
    }

    #[test]
    fn roots_of_unity_check_within_bound() {
        let r = roots_of_unity_tail_check(64, 0.5, 8.0, 1000, 2024).unwrap();
        assert_eq!(r.empirical_rate, r.violations as f64 / 1000.0);
        assert!(r.empirical_rate <= r.theoretical_bound + 0.02, "{r:?}");
        let c = 4.0 * std::f64::consts::SQRT_2 + 1e-3;
        let r = roots_of_unity_tail_check(256, 0.3, c, 5, 1).unwrap();
        assert_eq!(r.theoretical_bound, 256f64.powf(-(c / (2.0 * std::f64::consts::SQRT_2) - 2.0)));
        assert!(roots_of_unity_tail_check(64, 0.5, 5.0, 10, 1).is_err());
        assert!(roots_of_unity_tail_check(64, 1.0, 8.0, 10, 1).is_err());
        // tiny tau makes B empty almost always, which is never a violation
        let r = roots_of_unity_tail_check(32, 1e-9, 8.0, 100, 3).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn hoeffding_check() {
        let r = hoeffding_cardinality_check(32, 0.5, 0.1, 10_000, 7).unwrap();
        assert!(r.empirical_rate <= 2.0 * (-2.0f64 * 0.01 * 1024.0).exp() + 0.01);
        assert!(r.within_bound());
        assert_eq!(hoeffding_cardinality_check(8, 0.3, 0.7, 200, 7).unwrap().violations, 0);
        let r = hoeffding_cardinality_check(4, 0.5, 0.01, 2, 1).unwrap();
        assert!([0.0, 0.5, 1.0].contains(&r.empirical_rate));
        assert!(hoeffding_cardinality_check(4, 0.5, 0.0, 2, 1).is_err());
    }

    #[test]
    fn gaussian_norm() {
        let r = gaussian_norm_check(64, 10_000, 99).unwrap();
        assert_eq!(r.violations, 0);
        let r8 = gaussian_norm_check(8, 10, 1).unwrap();
        assert!((r8.theoretical_bound - ((-4.0f64).exp() + (-2.25f64).exp())).abs() < 1e-15);
        assert!((r8.theoretical_bound - 0.124).abs() < 1e-3);
        let unit = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        assert!(!gaussian_norm_violates(&unit));
        assert!(gaussian_norm_violates(&[C64::new(0.5, 0.0)]));
        assert!(gaussian_norm_check(7, 10, 1).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(
            roots_of_unity_tail_check(32, 0.4, 6.0, 50, 5).unwrap(),
            roots_of_unity_tail_check(32, 0.4, 6.0, 50, 5).unwrap()
        );
    }

    proptest! {
        #[test]
        fn bias_invariances(m in 2usize..40, mask in any::<u64>(), shift in 0usize..40, unit in 1usize..40) {
            let set = SubsetOfZM::new(m, (0..m).filter(|&c| mask >> (c % 64) & 1 == 1).collect()).unwrap();
            let b = fourier_bias(&set).unwrap();
            prop_assert!(b <= set.len() as f64 + 1e-9);
            let moved = set.affine_image(1, shift % m).unwrap();
            prop_assert!((fourier_bias(&moved).unwrap() - b).abs() < 1e-9);
            if gcd(unit % m, m) == 1 {
                let dilated = set.affine_image(unit % m, 0).unwrap();
                prop_assert!((fourier_bias(&dilated).unwrap() - b).abs() < 1e-9);
            }
            prop_assert!((fourier_bias(&set.complement()).unwrap() - b).abs() < 1e-9);
        }
    }
}
