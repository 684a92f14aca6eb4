//! Iterated function systems and attractor sampling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, PointCloud};
use crate::moran::{moran_dimension, ScaleList};

/// Default cap on the number of generated points.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_BURN_IN: usize = 100;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Wire form of one map: `{ "linear": [[...]], "offset": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub linear: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

/// Wire form of an IFS: `{ "dim": k, "maps": [...], "weights": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSpec {
    pub dim: usize,
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Operator norms of every map, failing on the first map that is not a strict
/// contraction or whose dimension disagrees with `dim`.
pub fn validate(spec: &IfsSpec) -> Result<Vec<f64>> {
    Ok(ContractionSystem::from_spec(spec)?.ratios())
}

/// An ordered set of contractions with optional sampling weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionSystem {
    dim: usize,
    maps: Vec<AffineMap>,
    weights: Option<Vec<f64>>,
}

impl ContractionSystem {
    pub fn new(maps: Vec<AffineMap>, weights: Option<Vec<f64>>) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::InvalidArgument("system has no maps".into()))?;
        let dim = first.dim();
        if let Some(m) = maps.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
        }
        if let Some(w) = &weights {
            check_weights(w, maps.len())?;
        }
        Ok(ContractionSystem { dim, maps, weights })
    }

    pub fn from_spec(spec: &IfsSpec) -> Result<Self> {
        if spec.maps.is_empty() {
            return Err(Error::InvalidArgument("system has no maps".into()));
        }
        let mut maps = Vec::with_capacity(spec.maps.len());
        for (i, m) in spec.maps.iter().enumerate() {
            if m.offset.len() != spec.dim {
                return Err(Error::InvalidArgument(format!(
                    "map {i}: offset has dimension {}, expected {}",
                    m.offset.len(),
                    spec.dim
                )));
            }
            let map = AffineMap::new_indexed(m.linear.clone(), m.offset.clone(), i).map_err(|e| match e {
                Error::DimensionMismatch { expected, found } => Error::InvalidArgument(format!(
                    "map {i}: linear part has a row or column count {found}, expected {expected}"
                )),
                other => other,
            })?;
            maps.push(map);
        }
        ContractionSystem::new(maps, spec.weights.clone())
    }

    pub fn to_spec(&self) -> IfsSpec {
        IfsSpec {
            dim: self.dim,
            maps: self.maps.iter().map(|m| MapSpec { linear: m.linear_rows(), offset: m.offset().to_vec() }).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: IfsSpec = serde_json::from_str(text).map_err(|e| Error::Format(format!("IFS JSON: {e}")))?;
        ContractionSystem::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("IFS spec serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(AffineMap::ratio).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }

    pub fn scale_list(&self) -> ScaleList {
        ScaleList::new(self.ratios()).expect("contraction ratios lie in (0, 1)")
    }

    pub fn similarity_dimension(&self) -> f64 {
        moran_dimension(&self.scale_list())
    }

    /// Weights used by the chaos game: explicit weights if given, otherwise
    /// `r_i^d` with `d` the similarity dimension.
    pub fn sampling_weights(&self) -> Vec<f64> {
        if let Some(w) = &self.weights {
            return w.clone();
        }
        let d = self.similarity_dimension();
        let raw: Vec<f64> = self.ratios().iter().map(|r| r.powf(d)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_vec(&self.to_spec()).expect("IFS spec serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

fn check_weights(w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::InvalidArgument(format!("{} weights given for {n} maps", w.len())));
    }
    if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidArgument(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMethod {
    Deterministic,
    Chaos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorSample {
    pub cloud: PointCloud,
    /// Depth for deterministic samples, point count for the chaos game.
    pub depth_or_count: u64,
    pub method: SampleMethod,
    pub system_hash: String,
}

/// All images `S_{i1} ∘ ... ∘ S_{idepth}(p0)` where `p0` is the fixed point of
/// the first map. Produces exactly `n^depth` points.
pub fn deterministic_attractor(system: &ContractionSystem, depth: u32, budget: u64) -> Result<AttractorSample> {
    let n = system.len() as u128;
    let requested = n.checked_pow(depth).unwrap_or(u128::MAX);
    if requested > u128::from(budget) {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    let dim = system.dim();
    let mut level = system.maps()[0].fixed_point()?.into_vec();
    for _ in 0..depth {
        level = expand(system, &level);
    }
    Ok(AttractorSample {
        cloud: PointCloud::new(dim, level)?,
        depth_or_count: u64::from(depth),
        method: SampleMethod::Deterministic,
        system_hash: system.content_hash(),
    })
}

/// One refinement step: for each point `q` and each map `S_i`, emit `S_i(q)`
/// (point-major order).
fn expand(system: &ContractionSystem, level: &[f64]) -> Vec<f64> {
    const PAR_THRESHOLD: usize = 1 << 14;
    let dim = system.dim();
    let stride = dim * system.len();
    let mut next = vec![0.0; level.len() * system.len()];
    let fill = |(src, dst): (&[f64], &mut [f64])| {
        for (map, out) in system.maps().iter().zip(dst.chunks_exact_mut(dim)) {
            map.apply_into(src, out);
        }
    };
    if level.len() / dim >= PAR_THRESHOLD {
        level.par_chunks_exact(dim).zip(next.par_chunks_exact_mut(stride)).for_each(fill);
    } else {
        level.chunks_exact(dim).zip(next.chunks_exact_mut(stride)).for_each(fill);
    }
    next
}

/// Random iteration `x <- S_I(x)` from the origin, `I` drawn by
/// [`ContractionSystem::sampling_weights`]. The first `burn_in` iterates are
/// discarded. Output is a pure function of `(system, count, seed, burn_in)`.
pub fn chaos_game(system: &ContractionSystem, count: usize, seed: u64, burn_in: usize) -> Result<AttractorSample> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let dim = system.dim();
    let dist = WeightedIndex::new(system.sampling_weights())
        .map_err(|e| Error::InvalidArgument(format!("sampling weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    for _ in 0..burn_in {
        system.maps()[dist.sample(&mut rng)].apply_into(&x, &mut tmp);
        std::mem::swap(&mut x, &mut tmp);
    }
    let mut coords = Vec::with_capacity(count * dim);
    for _ in 0..count {
        system.maps()[dist.sample(&mut rng)].apply_into(&x, &mut tmp);
        std::mem::swap(&mut x, &mut tmp);
        coords.extend_from_slice(&x);
    }
    Ok(AttractorSample {
        cloud: PointCloud::new(dim, coords)?,
        depth_or_count: count as u64,
        method: SampleMethod::Chaos,
        system_hash: system.content_hash(),
    })
}
