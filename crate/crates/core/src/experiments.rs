//! Seeded experiment drivers producing tables for CSV or JSON output.

use serde_json::{Map, Value};

use crate::bias::{gaussian_norm_check, hoeffding_cardinality_check, roots_of_unity_tail_check, TailCheckReport};
use crate::erasure::{alltop_mub_frame, delta_p, nerf_table, verify_mub, NerfRow, SubsetMode};
use crate::error::{Error, Result};
use crate::frameset::{FrameSet, FrameSetSpec, Side};
use crate::gabor::gabor_frame_operator;
use crate::metrics::SpectrumReport;
use crate::moments::{mc_trace_moment, TraceMomentEstimate};
use crate::parse::{Expr, LambdaSpec};
use crate::rng::{self, derive_seed};
use crate::window::{Window, WindowKind};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Column-labelled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

fn format_float(v: f64, full_precision: bool) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if full_precision {
        format!("{v:?}")
    } else {
        let s = format!("{v:.6}");
        // avoid "-0.000000"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') { format!("{:.6}", 0.0) } else { s }
    }
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self { columns: header.split(',').map(str::to_string).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Comma-separated values with a header line. Floats carry six decimals
    /// unless `full_precision`; infinities print as `inf`.
    pub fn to_csv(&self, full_precision: bool) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Float(v) => format_float(*v, full_precision),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// An array of row objects with the same rounding as the CSV. A column
    /// holding any infinity gets a companion `<name>_is_inf` flag and `null`
    /// in place of the infinite values.
    pub fn to_json(&self, full_precision: bool) -> String {
        let inf_columns: Vec<bool> = (0..self.columns.len())
            .map(|i| self.rows.iter().any(|r| matches!(r[i], Cell::Float(v) if v.is_infinite())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (i, cell) in row.iter().enumerate() {
                    let name = &self.columns[i];
                    let value = match cell {
                        Cell::Int(v) => Value::from(*v),
                        Cell::Text(s) => Value::from(s.as_str()),
                        Cell::Float(v) if !v.is_finite() => Value::Null,
                        Cell::Float(v) => {
                            let rounded: f64 = format_float(*v, full_precision).parse().expect("formatted float");
                            Value::from(rounded)
                        }
                    };
                    obj.insert(name.clone(), value);
                    if inf_columns[i] {
                        let flag = matches!(cell, Cell::Float(v) if v.is_infinite());
                        obj.insert(format!("{name}_is_inf"), Value::Bool(flag));
                    }
                }
                Value::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&Value::Array(rows)).expect("table serializes");
        text.push('\n');
        text
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::InvalidParameter(format!("--seed is required for {what}")))
}

fn require_positive(value: usize, name: &str) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be positive")));
    }
    Ok(())
}

fn require_dims(ms: &[usize]) -> Result<()> {
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    Ok(())
}

/// Frame bounds of `(g, Lambda)` for each dimension.
#[derive(Debug, Clone)]
pub struct FrameBoundsConfig {
    pub dims: Vec<usize>,
    pub window: WindowKind,
    pub lambda: LambdaSpec,
    pub seed: Option<u64>,
}

pub fn frame_bounds_table(cfg: &FrameBoundsConfig) -> Result<Table> {
    require_dims(&cfg.dims)?;
    let seed = if cfg.window.is_random() || cfg.lambda.is_random() {
        Some(require_seed(cfg.seed, "random windows or frame sets")?)
    } else {
        cfg.seed
    };
    let mut table = Table::new(SpectrumReport::csv_header());
    for &m in &cfg.dims {
        let g = Window::generate(cfg.window, m, seed.map(|s| derive_seed(s, &[0, m as u64])))?;
        let lambda = cfg.lambda.build(m, seed.map(|s| derive_seed(s, &[1, m as u64])))?;
        let s = gabor_frame_operator(g.values(), &lambda)?;
        let r = SpectrumReport::from_operator(&s, lambda.cardinality())?;
        table.push(vec![m.into(), r.frame_size.into(), r.lower_bound.into(), r.upper_bound.into(), r.cond.into(), r.delta.into()]);
    }
    Ok(table)
}

/// Spread of frame bounds for random windows and Bernoulli frame sets.
#[derive(Debug, Clone)]
pub struct SvDistributionConfig {
    pub dims: Vec<usize>,
    pub window: WindowKind,
    pub tau: Expr,
    pub trials: usize,
    pub bins: usize,
    /// Histogram range `[0, hist_max)` for eigenvalues divided by `|Lambda| / M`.
    pub hist_max: f64,
    pub seed: u64,
}

impl SvDistributionConfig {
    pub fn new(dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self { dims, window: WindowKind::Steinhaus, tau: "4/M".parse().expect("valid"), trials, bins: 60, hist_max: 3.0, seed }
    }
}

pub fn sv_distribution_table(cfg: &SvDistributionConfig) -> Result<Table> {
    require_dims(&cfg.dims)?;
    require_positive(cfg.trials, "trials")?;
    require_positive(cfg.bins, "bins")?;
    if !cfg.window.is_random() {
        return Err(Error::InvalidParameter("sv-distribution needs a random window".into()));
    }
    if !(cfg.hist_max > 0.0) {
        return Err(Error::InvalidParameter("histogram range must be positive".into()));
    }
    let mut table = Table::new("M,mean_A_norm,mean_B_norm,hist_bin,hist_count");
    for &m in &cfg.dims {
        let tau = cfg.tau.eval(m as f64);
        let base = derive_seed(cfg.seed, &[m as u64]);
        let draws: Vec<(f64, f64, Vec<f64>)> = {
            use rayon::prelude::*;
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng::substream(base, t as u64);
                    let lambda = FrameSet::bernoulli(m, tau, &mut r)?;
                    let g = Window::sample(cfg.window, m, &mut r)?;
                    let s = gabor_frame_operator(g.values(), &lambda)?;
                    let rep = SpectrumReport::from_operator(&s, lambda.cardinality())?;
                    let scale = m as f64 / lambda.cardinality() as f64;
                    let normalized = rep.eigenvalues.iter().map(|e| e * scale).collect();
                    Ok((rep.lower_bound * scale, rep.upper_bound * scale, normalized))
                })
                .collect::<Result<_>>()?
        };
        let mean_a = draws.iter().map(|d| d.0).sum::<f64>() / cfg.trials as f64;
        let mean_b = draws.iter().map(|d| d.1).sum::<f64>() / cfg.trials as f64;
        let width = cfg.hist_max / cfg.bins as f64;
        let mut counts = vec![0u64; cfg.bins];
        for v in draws.iter().flat_map(|d| d.2.iter()) {
            let bin = ((v / width).floor().max(0.0) as usize).min(cfg.bins - 1);
            counts[bin] += 1;
        }
        for (b, &count) in counts.iter().enumerate() {
            let center = (b as f64 + 0.5) * width;
            table.push(vec![m.into(), mean_a.into(), mean_b.into(), center.into(), count.into()]);
        }
    }
    Ok(table)
}

/// Normalized `E[Tr H^m]` over a grid of dimensions and density constants.
#[derive(Debug, Clone)]
pub struct TraceHeatmapConfig {
    pub dims: Vec<usize>,
    pub constants: Vec<f64>,
    pub window: WindowKind,
    pub m: u32,
    pub samples: usize,
    pub seed: u64,
}

/// The two frame sets of the heatmap: Bernoulli with `tau = C / M`, and
/// `F x {0..floor(M/2) - 1}` with `F = {0..2C - 1}`.
pub fn heatmap_sets(m: usize, c: f64, seed: u64) -> Result<[(&'static str, FrameSet); 2]> {
    let bernoulli = FrameSet::build(m, &FrameSetSpec::Bernoulli { tau: (c / m as f64).min(1.0), seed })?;
    let f_size = ((2.0 * c).round() as usize).clamp(1, m);
    let product = FrameSet::build(
        m,
        &FrameSetSpec::Grid { times: (0..f_size).collect(), freqs: (0..(m / 2).max(1)).collect() },
    )?;
    Ok([("bernoulli", bernoulli), ("product", product)])
}

pub fn trace_heatmap_table(cfg: &TraceHeatmapConfig) -> Result<Table> {
    require_dims(&cfg.dims)?;
    if cfg.m == 0 {
        return Err(Error::InvalidParameter("moment order must be positive".into()));
    }
    if cfg.constants.is_empty() || cfg.constants.iter().any(|c| !(*c > 0.0)) {
        return Err(Error::InvalidParameter("constants C must be positive".into()));
    }
    let mut table = Table::new("M,C,mode,normalized_trace");
    for &m in &cfg.dims {
        for (ci, &c) in cfg.constants.iter().enumerate() {
            let set_seed = derive_seed(cfg.seed, &[m as u64, ci as u64, 0]);
            for (mi, (mode, lambda)) in heatmap_sets(m, c, set_seed)?.into_iter().enumerate() {
                let sample_seed = derive_seed(cfg.seed, &[m as u64, ci as u64, 1 + mi as u64]);
                let est = mc_trace_moment(cfg.window, &lambda, cfg.m, cfg.samples, sample_seed)?;
                table.push(vec![m.into(), c.into(), mode.into(), est.normalized_mean().into()]);
            }
        }
    }
    Ok(table)
}

/// Monte-Carlo trace moments for a single frame set.
pub fn trace_moment_rows(estimates: &[TraceMomentEstimate]) -> Table {
    let mut table = Table::new(TraceMomentEstimate::csv_header());
    for e in estimates {
        table.push(vec![
            e.dim.into(),
            e.lambda_size.into(),
            e.kind.as_str().into(),
            (e.m as usize).into(),
            e.samples.into(),
            e.mean.into(),
            e.std_error.into(),
            e.normalized_mean().into(),
        ]);
    }
    table
}

/// NERF table of the full Alltop Gabor frame.
#[derive(Debug, Clone)]
pub struct MubTableConfig {
    pub dim: usize,
    pub rates: Vec<f64>,
    pub mode: SubsetMode,
}

/// The erasure rates `0.00, 0.04, ..., 0.68`.
pub fn default_rates() -> Vec<f64> {
    (0..18).map(|i| (i as f64 * 0.04 * 100.0).round() / 100.0).collect()
}

pub fn mub_table(cfg: &MubTableConfig) -> Result<Vec<NerfRow>> {
    if cfg.rates.is_empty() {
        return Err(Error::InvalidParameter("no erasure rates given".into()));
    }
    if let Some(p) = cfg.rates.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("erasure rate {p} outside [0, 1)")));
    }
    let (phi, assignment) = alltop_mub_frame(cfg.dim, false)?;
    let profile = verify_mub(&phi, &assignment)?;
    nerf_table(&phi, &profile, &cfg.rates, cfg.mode)
}

pub fn nerf_rows_table(rows: &[NerfRow]) -> Table {
    let mut table = Table::new(NerfRow::csv_header());
    for r in rows {
        table.push(vec![
            r.p.into(),
            r.retained.into(),
            r.est_trace_m1.into(),
            r.est_trace_m2.into(),
            r.est_theoretical.into(),
            r.worst_cond.into(),
        ]);
    }
    table
}

/// `Delta(p)` for windows on the sphere and `Lambda = F x Z_M`.
#[derive(Debug, Clone)]
pub struct DeltaPConfig {
    pub dims: Vec<usize>,
    pub window: WindowKind,
    pub f_size: usize,
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn delta_p_table(cfg: &DeltaPConfig) -> Result<Table> {
    require_dims(&cfg.dims)?;
    require_positive(cfg.samples, "samples")?;
    require_positive(cfg.f_size, "|F|")?;
    let mut table = Table::new("M,delta_p");
    for &m in &cfg.dims {
        if cfg.f_size > m {
            return Err(Error::InvalidParameter(format!("|F| = {} exceeds M = {m}", cfg.f_size)));
        }
        let g = Window::generate(cfg.window, m, Some(derive_seed(cfg.seed, &[m as u64, 0])))?;
        let lambda = FrameSet::build(m, &FrameSetSpec::Product { set: (0..cfg.f_size).collect(), side: Side::Time })?;
        let mode = SubsetMode::Sample { count: cfg.samples, seed: derive_seed(cfg.seed, &[m as u64, 1]) };
        table.push(vec![m.into(), delta_p(&g, &lambda, cfg.p, mode)?.into()]);
    }
    Ok(table)
}

/// Which tail bound to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    Hoeffding,
    GaussianNorm,
    RootsOfUnity,
}

impl std::str::FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hoeffding" => Ok(Lemma::Hoeffding),
            "gaussian-norm" => Ok(Lemma::GaussianNorm),
            "roots-of-unity" => Ok(Lemma::RootsOfUnity),
            _ => Err(Error::Parse(format!("unknown lemma `{s}`; expected hoeffding, gaussian-norm or roots-of-unity"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbChecksConfig {
    pub lemma: Lemma,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub tau: f64,
    /// Deviation `t` for the cardinality check.
    pub t: f64,
    /// Constant `C` for the roots-of-unity check.
    pub c: f64,
    pub seed: u64,
}

pub fn prob_checks_table(cfg: &ProbChecksConfig) -> Result<Table> {
    require_dims(&cfg.dims)?;
    require_positive(cfg.trials, "trials")?;
    let mut table = Table::new(TailCheckReport::csv_header());
    for &m in &cfg.dims {
        let seed = derive_seed(cfg.seed, &[m as u64]);
        let r = match cfg.lemma {
            Lemma::Hoeffding => hoeffding_cardinality_check(m, cfg.tau, cfg.t, cfg.trials, seed)?,
            Lemma::GaussianNorm => gaussian_norm_check(m, cfg.trials, seed)?,
            Lemma::RootsOfUnity => roots_of_unity_tail_check(m, cfg.tau, cfg.c, cfg.trials, seed)?,
        };
        table.push(vec![
            r.lemma.into(),
            r.dim.into(),
            r.params.clone().into(),
            r.trials.into(),
            r.violations.into(),
            r.empirical_rate.into(),
            r.theoretical_bound.into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_formatting() {
        let mut t = Table::new("p,J,cond");
        t.push(vec![0.04.into(), 24usize.into(), 1.2074881234.into()]);
        t.push(vec![0.52.into(), 12usize.into(), f64::INFINITY.into()]);
        t.push(vec![(-1e-9).into(), 1usize.into(), 1.0.into()]);
        assert_eq!(t.to_csv(false), "p,J,cond\n0.040000,24,1.207488\n0.520000,12,inf\n0.000000,1,1.000000\n");
        assert!(t.to_csv(true).contains("1.2074881234"));
        let v: Value = serde_json::from_str(&t.to_json(false)).unwrap();
        assert_eq!(v[0]["cond"], Value::from(1.207488));
        assert_eq!(v[0]["cond_is_inf"], Value::Bool(false));
        assert_eq!(v[1]["cond"], Value::Null);
        assert_eq!(v[1]["cond_is_inf"], Value::Bool(true));
        assert!(v[1].get("p_is_inf").is_none());
    }

    #[test]
    fn default_rate_grid() {
        let r = default_rates();
        assert_eq!(r.len(), 18);
        assert_eq!(r[5], 0.2);
        assert_eq!(r[17], 0.68);
    }

    #[test]
    fn frame_bounds_command() {
        let cfg = FrameBoundsConfig {
            dims: vec![16],
            window: WindowKind::Steinhaus,
            lambda: "product:F=0,1,2:time".parse().unwrap(),
            seed: Some(7),
        };
        let t = frame_bounds_table(&cfg).unwrap();
        assert_eq!(t.to_csv(false), "M,N,A,B,cond,delta\n16,48,3.000000,3.000000,1.000000,0.000000\n");
        let alltop = FrameBoundsConfig { dims: vec![5], window: WindowKind::Alltop, lambda: LambdaSpec::Full, seed: None };
        assert_eq!(
            frame_bounds_table(&alltop).unwrap().to_csv(false),
            "M,N,A,B,cond,delta\n5,25,5.000000,5.000000,1.000000,0.000000\n"
        );
        let unseeded = FrameBoundsConfig { seed: None, ..cfg };
        assert!(matches!(frame_bounds_table(&unseeded), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn full_steinhaus_distribution_is_a_point_mass() {
        let mut cfg = SvDistributionConfig::new(vec![6], 3, 1);
        cfg.tau = "1".parse().unwrap();
        let t = sv_distribution_table(&cfg).unwrap();
        let one_bin = (1.0 / (3.0 / 60.0)) as usize;
        for (b, row) in t.rows.iter().enumerate() {
            let expected = if b == one_bin { 18 } else { 0 };
            assert_eq!(row[4], Cell::Int(expected));
            assert!(matches!(row[1], Cell::Float(a) if (a - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn heatmap_product_sets() {
        let [(_, b), (_, p)] = heatmap_sets(20, 2.0, 3).unwrap();
        assert_eq!(p.cardinality(), 4 * 10);
        assert!(b.cardinality() > 0);
        let cfg = TraceHeatmapConfig { dims: vec![12], constants: vec![1.0, 2.0], window: WindowKind::Steinhaus, m: 4, samples: 20, seed: 5 };
        let t = trace_heatmap_table(&cfg).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t, trace_heatmap_table(&cfg).unwrap());
    }

    #[test]
    fn small_mub_table() {
        let rows = mub_table(&MubTableConfig { dim: 5, rates: vec![0.0, 0.2], mode: SubsetMode::Exhaustive }).unwrap();
        let csv = nerf_rows_table(&rows).to_csv(false);
        assert_eq!(
            csv,
            "p,J,est_trace_m1,est_trace_m2,est_theoretical,worst_cond\n\
             0.000000,25,1.000000,1.000000,1.000000,1.000000\n\
             0.200000,20,1.732051,1.578976,1.732051,1.451066\n"
        );
        assert!(mub_table(&MubTableConfig { dim: 6, rates: vec![0.0], mode: SubsetMode::Exhaustive }).is_err());
        assert!(mub_table(&MubTableConfig { dim: 5, rates: vec![1.0], mode: SubsetMode::Exhaustive }).is_err());
    }

    #[test]
    fn delta_p_command() {
        let cfg = DeltaPConfig { dims: vec![8, 10], window: WindowKind::Sphere, f_size: 3, p: 0.0, samples: 2, seed: 4 };
        let t = delta_p_table(&cfg).unwrap();
        assert_eq!(t.rows.len(), 2);
        let bad = DeltaPConfig { f_size: 9, dims: vec![8], ..cfg };
        assert!(delta_p_table(&bad).is_err());
    }

    #[test]
    fn prob_checks_command() {
        let cfg = ProbChecksConfig { lemma: Lemma::Hoeffding, dims: vec![8], trials: 50, tau: 0.3, t: 0.8, c: 8.0, seed: 1 };
        let t = prob_checks_table(&cfg).unwrap();
        assert_eq!(t.to_csv(false), "lemma,M,params,trials,violations,empirical_rate,theoretical_bound\nhoeffding,8,tau=0.3;t=0.8,50,0,0.000000,0.000000\n");
        assert!("nope".parse::<Lemma>().is_err());
    }
}
