//! Gabor windows: random (Steinhaus, Gaussian, sphere) and the deterministic Alltop chirp.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, C64};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Steinhaus,
    Gaussian,
    Sphere,
    Alltop,
    Custom,
}

impl WindowKind {
    pub fn is_random(self) -> bool {
        matches!(self, WindowKind::Steinhaus | WindowKind::Gaussian | WindowKind::Sphere)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::Steinhaus => "steinhaus",
            WindowKind::Gaussian => "gaussian",
            WindowKind::Sphere => "sphere",
            WindowKind::Alltop => "alltop",
            WindowKind::Custom => "custom",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steinhaus" => Ok(WindowKind::Steinhaus),
            "gaussian" => Ok(WindowKind::Gaussian),
            "sphere" => Ok(WindowKind::Sphere),
            "alltop" => Ok(WindowKind::Alltop),
            "custom" => Ok(WindowKind::Custom),
            other => Err(Error::Parse(format!("unknown window kind `{other}`"))),
        }
    }
}

/// A window vector `g` in `C^M` together with how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    seed: Option<u64>,
    values: Vec<C64>,
}

impl Window {
    /// Draws or constructs a window. Random kinds require a seed; the same
    /// `(kind, M, seed)` always yields the same values.
    pub fn generate(kind: WindowKind, m: usize, seed: Option<u64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("window dimension must be positive".into()));
        }
        let values = match kind {
            WindowKind::Alltop => {
                if m < 5 || !is_prime(m) {
                    return Err(Error::AlltopRequiresPrime(m));
                }
                alltop(m)
            }
            WindowKind::Custom => {
                return Err(Error::InvalidParameter("custom windows are built with Window::custom".into()))
            }
            random => {
                let seed = seed.ok_or_else(|| {
                    Error::InvalidParameter(format!("a seed is required for the {random} window"))
                })?;
                let mut rng = rng::stream(seed);
                draw(random, m, &mut rng)
            }
        };
        let seed = if kind.is_random() { seed } else { None };
        Ok(Self { kind, seed, values })
    }

    /// Draws a random window from an existing stream (no seed recorded).
    pub fn sample(kind: WindowKind, m: usize, rng: &mut rng::Rng) -> Result<Self> {
        if !kind.is_random() {
            return Self::generate(kind, m, None);
        }
        Ok(Self { kind, seed: None, values: draw(kind, m, rng) })
    }

    pub fn custom(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("window must be non-empty".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { kind: WindowKind::Custom, seed: None, values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// The window `F_M g`.
    pub fn fourier_transform(&self) -> Window {
        let m = self.dim();
        let norm = 1.0 / (m as f64).sqrt();
        let values = (0..m)
            .map(|k| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(l, &v)| v * root_of_unity((k * l) % m, m).conj())
                    .sum::<C64>()
                    * norm
            })
            .collect();
        Window { kind: WindowKind::Custom, seed: None, values }
    }

    pub fn to_json(&self) -> String {
        let doc = WindowDoc {
            m: self.dim(),
            kind: self.kind,
            seed: self.seed,
            re: self.values.iter().map(|z| z.re).collect(),
            im: self.values.iter().map(|z| z.im).collect(),
        };
        serde_json::to_string(&doc).expect("window serializes")
    }

    /// Parses `{"M": int, "kind": str, "seed": int|null, "re": [...], "im": [...]}`
    /// and checks the kind-specific invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WindowDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.m == 0 || doc.re.len() != doc.m || doc.im.len() != doc.m {
            return Err(Error::Parse(format!(
                "window of dimension {} has {} real and {} imaginary parts",
                doc.m,
                doc.re.len(),
                doc.im.len()
            )));
        }
        let values: Vec<C64> = doc.re.iter().zip(&doc.im).map(|(&re, &im)| C64::new(re, im)).collect();
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if doc.kind.is_random() != doc.seed.is_some() {
            return Err(Error::Parse(format!("window kind {} and seed presence disagree", doc.kind)));
        }
        let window = Window { kind: doc.kind, seed: doc.seed, values };
        window.check_kind_invariants()?;
        Ok(window)
    }

    fn check_kind_invariants(&self) -> Result<()> {
        let m = self.dim();
        match self.kind {
            WindowKind::Steinhaus => {
                let target = 1.0 / (m as f64).sqrt();
                if self.values.iter().any(|z| (z.norm() - target).abs() > 1e-12) {
                    return Err(Error::Parse("Steinhaus entries must have modulus 1/sqrt(M)".into()));
                }
            }
            WindowKind::Sphere | WindowKind::Alltop => {
                if (self.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::Parse(format!("{} window must be unit-norm", self.kind)));
                }
            }
            WindowKind::Gaussian | WindowKind::Custom => {}
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WindowDoc {
    #[serde(rename = "M")]
    m: usize,
    kind: WindowKind,
    seed: Option<u64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn draw(kind: WindowKind, m: usize, rng: &mut rng::Rng) -> Vec<C64> {
    let amp = 1.0 / (m as f64).sqrt();
    match kind {
        WindowKind::Steinhaus => {
            (0..m).map(|_| C64::from_polar(amp, 2.0 * PI * rng.random::<f64>())).collect()
        }
        WindowKind::Gaussian => gaussian(m, rng),
        WindowKind::Sphere => {
            let mut h = gaussian(m, rng);
            let norm = h.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
            h.iter_mut().for_each(|z| *z /= norm);
            h
        }
        WindowKind::Alltop | WindowKind::Custom => unreachable!("not a random window kind"),
    }
}

/// Entries with i.i.d. real and imaginary parts `N(0, 1/(2M))`.
pub(crate) fn gaussian(m: usize, rng: &mut rng::Rng) -> Vec<C64> {
    let normal = Normal::new(0.0, (0.5 / m as f64).sqrt()).expect("valid std-dev");
    (0..m).map(|_| C64::new(normal.sample(rng), normal.sample(rng))).collect()
}

/// `g(j) = exp(2 pi i j^3 / M) / sqrt(M)`.
fn alltop(m: usize) -> Vec<C64> {
    let amp = 1.0 / (m as f64).sqrt();
    (0..m).map(|j| root_of_unity((j * j % m) * j % m, m) * amp).collect()
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
