//! Grid-cover estimators.
//!
//! Covers are restricted to axis-aligned half-open grid cells
//! `prod_i [origin_i + j_i*eps, origin_i + (j_i+1)*eps)`. The infimum over all
//! eps-covers is not computable, so every sum reported here is an upper bound
//! on the finite-scale Hausdorff sum it stands in for. A cell of side `eps`
//! in `R^k` has diameter `eps * sqrt(k)`, and that diameter enters
//! [`cover_sum`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

const PAR_SORT_THRESHOLD: usize = 1 << 15;
pub const DEFAULT_PROFILE_POINTS: usize = 61;

/// Family of nested grids with side `base^-k` for `k` in `k_min..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    base: f64,
    origin: Option<Vec<f64>>,
    k_min: i32,
    k_max: i32,
}

impl GridSpec {
    pub fn new(base: f64, k_min: i32, k_max: i32) -> Result<Self> {
        if !(base.is_finite() && base > 1.0) {
            return Err(Error::InvalidArgument(format!("grid base must exceed 1, got {base}")));
        }
        if k_min > k_max {
            return Err(Error::InvalidArgument(format!("empty level range {k_min}..={k_max}")));
        }
        Ok(GridSpec { base, origin: None, k_min, k_max })
    }

    /// Base-2 grid with the given levels.
    pub fn dyadic(k_min: i32, k_max: i32) -> Self {
        GridSpec::new(2.0, k_min, k_max).expect("valid dyadic grid")
    }

    /// Base-3 grid with the given levels.
    pub fn triadic(k_min: i32, k_max: i32) -> Self {
        GridSpec::new(3.0, k_min, k_max).expect("valid triadic grid")
    }

    pub fn with_origin(mut self, origin: Vec<f64>) -> Result<Self> {
        if origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.origin = Some(origin);
        Ok(self)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    /// Cell side at level `k`, `base^-k`.
    pub fn scale(&self, k: i32) -> f64 {
        if k >= 0 {
            1.0 / self.base.powi(k)
        } else {
            self.base.powi(-k)
        }
    }

    fn origin_for(&self, dim: usize) -> Result<Vec<f64>> {
        match &self.origin {
            None => Ok(vec![0.0; dim]),
            Some(o) if o.len() == dim => Ok(o.clone()),
            Some(o) => Err(Error::DimensionMismatch { expected: dim, found: o.len() }),
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::dyadic(1, 8)
    }
}

/// Occupied cells of one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCount {
    pub count: usize,
    /// Sorted, distinct integer cell indices.
    pub cells: Vec<Vec<i64>>,
}

fn cell_keys(cloud: &PointCloud, scale: f64, origin: &[f64]) -> Result<Vec<i64>> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let dim = cloud.dim();
    let mut keys = Vec::with_capacity(cloud.coords().len());
    for p in cloud.points() {
        for (c, o) in p.iter().zip(origin) {
            let j = ((c - o) / scale).floor();
            if !j.is_finite() {
                return Err(Error::NonFinite);
            }
            if j.abs() >= 9.0e18 {
                return Err(Error::CellOverflow { scale });
            }
            keys.push(j as i64);
        }
    }
    debug_assert_eq!(keys.len() % dim, 0);
    Ok(keys)
}

/// Sorted order of distinct keys (one representative index per cell).
fn distinct_cells(keys: &[i64], dim: usize) -> Vec<usize> {
    let n = keys.len() / dim;
    let key = |i: usize| &keys[i * dim..(i + 1) * dim];
    let mut order: Vec<usize> = (0..n).collect();
    if n >= PAR_SORT_THRESHOLD {
        order.par_sort_unstable_by(|&a, &b| key(a).cmp(key(b)));
    } else {
        order.sort_unstable_by(|&a, &b| key(a).cmp(key(b)));
    }
    order.dedup_by(|a, b| key(*a) == key(*b));
    order
}

fn occupied(cloud: &PointCloud, scale: f64, origin: &[f64]) -> Result<usize> {
    let keys = cell_keys(cloud, scale, origin)?;
    Ok(distinct_cells(&keys, cloud.dim()).len())
}

/// Number of distinct grid cells of side `scale` containing a point of the
/// cloud. Cell index on each axis is `floor((x - origin) / scale)`.
pub fn grid_count(cloud: &PointCloud, scale: f64, grid: &GridSpec) -> Result<GridCount> {
    let origin = grid.origin_for(cloud.dim())?;
    let keys = cell_keys(cloud, scale, &origin)?;
    let dim = cloud.dim();
    let cells: Vec<Vec<i64>> =
        distinct_cells(&keys, dim).into_iter().map(|i| keys[i * dim..(i + 1) * dim].to_vec()).collect();
    Ok(GridCount { count: cells.len(), cells })
}

/// Grid-cover upper bound `N(eps) * (eps * sqrt(k))^delta`.
pub fn cover_sum(cloud: &PointCloud, scale: f64, delta: f64, grid: &GridSpec) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let origin = grid.origin_for(cloud.dim())?;
    let n = occupied(cloud, scale, &origin)?;
    Ok(n as f64 * cell_diameter(scale, cloud.dim()).powf(delta))
}

pub fn cell_diameter(scale: f64, dim: usize) -> f64 {
    scale * (dim as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub scale: f64,
    pub count: usize,
}

/// Occupied-cell counts at strictly decreasing scales.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScaleSeries {
    pub entries: Vec<ScaleEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub stderr: f64,
}

/// Result of [`box_dimension`]: the full series over the requested levels
/// and the fit over the levels that were kept.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimension {
    pub series: ScaleSeries,
    pub fit: DimensionFit,
    /// Levels that entered the regression.
    pub fitted_levels: std::ops::RangeInclusive<i32>,
}

/// Ordinary least squares of `y` on `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<DimensionFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::DegenerateRegression(format!("need at least 2 scales, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateRegression("fewer than 2 distinct scales".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(DimensionFit { slope, intercept, r_squared, stderr })
}

/// Box-counting dimension: slope of `ln N(eps)` against `ln(1/eps)` over the
/// grid levels.
///
/// Once the count saturates at the number of distinct points on two
/// consecutive levels, finer levels are dropped from the fit (the series
/// still reports them). At least two levels are always fitted.
pub fn box_dimension(cloud: &PointCloud, grid: &GridSpec) -> Result<BoxDimension> {
    let levels: Vec<i32> = grid.levels().collect();
    if levels.len() < 2 {
        return Err(Error::DegenerateRegression("need at least 2 grid levels".into()));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let origin = grid.origin_for(cloud.dim())?;
    let counts: Vec<usize> = levels
        .par_iter()
        .map(|&k| occupied(cloud, grid.scale(k), &origin))
        .collect::<Result<_>>()?;
    let entries: Vec<ScaleEntry> =
        levels.iter().zip(&counts).map(|(&k, &count)| ScaleEntry { scale: grid.scale(k), count }).collect();

    let saturated = cloud.distinct_count();
    let mut used = counts.len();
    if let Some(i) = counts.windows(2).position(|w| w[0] == saturated && w[1] == saturated) {
        used = (i + 1).max(2);
    }
    let x: Vec<f64> = entries[..used].iter().map(|e| -e.scale.ln()).collect();
    let y: Vec<f64> = entries[..used].iter().map(|e| (e.count as f64).ln()).collect();
    let fit = least_squares(&x, &y)?;
    Ok(BoxDimension {
        series: ScaleSeries { entries },
        fit,
        fitted_levels: levels[0]..=levels[used - 1],
    })
}

/// The map `delta -> cover_sum(cloud, epsilon, delta)` on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureProfile {
    pub epsilon: f64,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// 61 exponents spanning `[0.05, dim + 0.5]`.
pub fn default_deltas(dim: usize) -> Vec<f64> {
    linspace(0.05, dim as f64 + 0.5, DEFAULT_PROFILE_POINTS)
}

pub fn measure_profile(cloud: &PointCloud, epsilon: f64, deltas: &[f64], grid: &GridSpec) -> Result<MeasureProfile> {
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("no delta values".into()));
    }
    if deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidArgument("delta values must be positive".into()));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("delta values must be strictly increasing".into()));
    }
    let origin = grid.origin_for(cloud.dim())?;
    let n = occupied(cloud, epsilon, &origin)? as f64;
    let diam = cell_diameter(epsilon, cloud.dim());
    Ok(MeasureProfile {
        epsilon,
        deltas: deltas.to_vec(),
        values: deltas.iter().map(|d| n * diam.powf(*d)).collect(),
    })
}

/// The exponent where the profile crosses 1, by linear interpolation of
/// `ln(value)` against `delta` on the first bracketing pair.
pub fn crossover_dimension(profile: &MeasureProfile) -> Result<f64> {
    let (d, v) = (&profile.deltas, &profile.values);
    if d.len() != v.len() {
        return Err(Error::InvalidArgument("profile deltas and values differ in length".into()));
    }
    if let Some(i) = v.iter().position(|&x| x == 1.0) {
        return Ok(d[i]);
    }
    for i in 0..v.len().saturating_sub(1) {
        let (a, b) = (v[i], v[i + 1]);
        if (a > 1.0) != (b > 1.0) && a > 0.0 && b > 0.0 {
            let (la, lb) = (a.ln(), b.ln());
            return Ok(d[i] + (0.0 - la) * (d[i + 1] - d[i]) / (lb - la));
        }
    }
    Err(Error::NoCrossing)
}
