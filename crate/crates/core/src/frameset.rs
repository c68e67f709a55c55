//! Subsets of the time-frequency plane `Z_M x Z_M`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A time-frequency point `(k, l)`: translation by `k`, modulation by `l`.
pub type TfPoint = (usize, usize);

/// Which coordinate a product set constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `F x Z_M`
    Time,
    /// `Z_M x F`
    Frequency,
}

/// Recipe for a frame set.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameSetSpec {
    Full,
    Product { set: Vec<usize>, side: Side },
    /// `times x freqs`.
    Grid { times: Vec<usize>, freqs: Vec<usize> },
    Explicit(Vec<TfPoint>),
    /// Each lattice point kept independently with probability `tau`.
    Bernoulli { tau: f64, seed: u64 },
}

/// A non-empty set `Lambda` of distinct points of `Z_M x Z_M`, kept in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSet {
    dim: usize,
    points: Vec<TfPoint>,
}

impl FrameSet {
    pub fn new(dim: usize, points: Vec<TfPoint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("frame set dimension must be positive".into()));
        }
        if let Some(&(k, l)) = points.iter().find(|&&(k, l)| k >= dim || l >= dim) {
            return Err(Error::InvalidParameter(format!("point ({k}, {l}) outside Z_{dim} x Z_{dim}")));
        }
        let set: BTreeSet<TfPoint> = points.iter().copied().collect();
        if set.len() != points.len() {
            return Err(Error::InvalidParameter("frame set contains duplicate points".into()));
        }
        if set.is_empty() {
            return Err(Error::EmptyFrameSet);
        }
        Ok(Self { dim, points: set.into_iter().collect() })
    }

    pub fn build(dim: usize, spec: &FrameSetSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("frame set dimension must be positive".into()));
        }
        let all = || (0..dim).flat_map(move |k| (0..dim).map(move |l| (k, l)));
        let points: Vec<TfPoint> = match spec {
            FrameSetSpec::Full => all().collect(),
            FrameSetSpec::Product { set, side } => {
                let set = dedup_checked(set, dim)?;
                if set.is_empty() {
                    return Err(Error::EmptyFrameSet);
                }
                match side {
                    Side::Time => set.iter().flat_map(|&k| (0..dim).map(move |l| (k, l))).collect(),
                    Side::Frequency => (0..dim).flat_map(|k| set.iter().map(move |&l| (k, l))).collect(),
                }
            }
            FrameSetSpec::Grid { times, freqs } => {
                let times = dedup_checked(times, dim)?;
                let freqs = dedup_checked(freqs, dim)?;
                times.iter().flat_map(|&k| freqs.iter().map(move |&l| (k, l))).collect()
            }
            FrameSetSpec::Explicit(list) => list.clone(),
            FrameSetSpec::Bernoulli { tau, seed } => {
                check_tau(*tau)?;
                let mut rng = rng::stream(*seed);
                bernoulli_points(dim, *tau, &mut rng)
            }
        };
        Self::new(dim, points)
    }

    /// Bernoulli frame set drawn from an existing stream: one uniform draw per
    /// lattice point in row-major order.
    pub fn bernoulli(dim: usize, tau: f64, rng: &mut rng::Rng) -> Result<Self> {
        check_tau(tau)?;
        Self::new(dim, bernoulli_points(dim, tau, rng))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[TfPoint] {
        &self.points
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, p: TfPoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// Fibers `A_k = { l : (k, l) in Lambda }` for every `k in Z_M`.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.dim];
        for &(k, l) in &self.points {
            fibers[k].push(l);
        }
        fibers
    }

    /// The subset at the given positions of `points()`.
    pub fn subset(&self, positions: &[usize]) -> Result<Self> {
        Self::new(self.dim, positions.iter().map(|&i| self.points[i]).collect())
    }

    /// `{(l, -k) : (k, l) in Lambda}`.
    pub fn fourier_dual(&self) -> Self {
        let m = self.dim;
        let points = self.points.iter().map(|&(k, l)| (l, (m - k) % m)).collect();
        Self::new(m, points).expect("the dual map is a bijection of Z_M x Z_M")
    }

    pub fn to_json(&self) -> String {
        let doc = FrameSetDoc { m: self.dim, points: self.points.iter().map(|&(k, l)| [k, l]).collect() };
        serde_json::to_string(&doc).expect("frame set serializes")
    }

    /// Parses `{"M": int, "points": [[k, l], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FrameSetDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(doc.m, doc.points.into_iter().map(|[k, l]| (k, l)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct FrameSetDoc {
    #[serde(rename = "M")]
    m: usize,
    points: Vec<[usize; 2]>,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tau must lie in (0, 1], got {tau}")))
    }
}

fn bernoulli_points(dim: usize, tau: f64, rng: &mut rng::Rng) -> Vec<TfPoint> {
    let mut points = Vec::new();
    for k in 0..dim {
        for l in 0..dim {
            if rng.random::<f64>() < tau {
                points.push((k, l));
            }
        }
    }
    points
}

fn dedup_checked(values: &[usize], dim: usize) -> Result<Vec<usize>> {
    if let Some(v) = values.iter().find(|&&v| v >= dim) {
        return Err(Error::InvalidParameter(format!("index {v} outside Z_{dim}")));
    }
    let set: BTreeSet<usize> = values.iter().copied().collect();
    Ok(set.into_iter().collect())
}
