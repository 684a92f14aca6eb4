//! Euclidean primitives shared by every other module: points, clouds,
//! bounding boxes and affine contractions of `R^k`.

use crate::error::{Error, Result};
use crate::kdtree::KdTree;

/// Tolerance for the Jacobi singular value sweep.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

/// A point of `R^k` with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point must have at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if min.dim() != max.dim() {
            return Err(Error::DimensionMismatch { expected: min.dim(), found: max.dim() });
        }
        if min.0.iter().zip(&max.0).any(|(a, b)| a > b) {
            return Err(Error::InvalidArgument("box min exceeds max on some axis".into()));
        }
        Ok(BoundingBox { min: min.0, max: max.0 })
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn diameter(&self) -> f64 {
        distance(&self.min, &self.max)
    }
}

/// A finite sample of a set in `R^dim`, stored as a flat coordinate buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            coords.extend_from_slice(p);
        }
        PointCloud::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.points();
        let first = it.next()?;
        let (mut min, mut max) = (first.to_vec(), first.to_vec());
        for p in it {
            for (i, &c) in p.iter().enumerate() {
                min[i] = min[i].min(c);
                max[i] = max[i].max(c);
            }
        }
        Some(BoundingBox { min, max })
    }

    /// Uniform scaling `x -> factor * x`.
    pub fn scaled(&self, factor: f64) -> PointCloud {
        PointCloud { dim: self.dim, coords: self.coords.iter().map(|c| c * factor).collect() }
    }

    pub fn mapped(&self, map: &AffineMap) -> Result<PointCloud> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: map.dim() });
        }
        let mut coords = vec![0.0; self.coords.len()];
        for (src, dst) in self.points().zip(coords.chunks_exact_mut(self.dim)) {
            map.apply_into(src, dst);
        }
        Ok(PointCloud { dim: self.dim, coords })
    }

    /// Concatenation of two clouds of equal dimension.
    pub fn union(&self, other: &PointCloud) -> Result<PointCloud> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointCloud { dim: self.dim, coords })
    }

    /// Number of distinct points (exact coordinate equality).
    pub fn distinct_count(&self) -> usize {
        let mut keys: Vec<Vec<u64>> =
            self.points().map(|p| p.iter().map(|c| normalize_zero(*c).to_bits()).collect()).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

fn normalize_zero(c: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c
    }
}

/// An affine map `x -> linear * x + offset` of `R^k` whose linear part has
/// operator norm `ratio` in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    dim: usize,
    /// Row-major `dim x dim`.
    linear: Vec<f64>,
    offset: Vec<f64>,
    ratio: f64,
}

impl AffineMap {
    /// Builds the map and verifies it is a strict, non-degenerate contraction.
    pub fn new(linear: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        Self::new_indexed(linear, offset, 0)
    }

    pub(crate) fn new_indexed(linear: Vec<Vec<f64>>, offset: Vec<f64>, index: usize) -> Result<Self> {
        let dim = offset.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("map offset must be non-empty".into()));
        }
        if linear.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: linear.len() });
        }
        let mut flat = Vec::with_capacity(dim * dim);
        for row in &linear {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            flat.extend_from_slice(row);
        }
        if flat.iter().chain(&offset).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let ratio = operator_norm(&flat, dim);
        if ratio >= 1.0 {
            return Err(Error::NotContraction { index, ratio });
        }
        if ratio == 0.0 {
            return Err(Error::DegenerateMap { index });
        }
        Ok(AffineMap { dim, linear: flat, offset, ratio })
    }

    /// Similarity `x -> scale * rotation(angle) * x + offset` in the plane.
    pub fn similarity_2d(scale: f64, angle: f64, offset: [f64; 2]) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        AffineMap::new(vec![vec![scale * c, -scale * s], vec![scale * s, scale * c]], offset.to_vec())
    }

    /// `x -> scale * x + offset` on the line.
    pub fn scaling_1d(scale: f64, offset: f64) -> Result<Self> {
        AffineMap::new(vec![vec![scale]], vec![offset])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn linear_entry(&self, row: usize, col: usize) -> f64 {
        self.linear[row * self.dim + col]
    }

    pub fn linear_rows(&self) -> Vec<Vec<f64>> {
        self.linear.chunks_exact(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.linear, self.dim)
    }

    pub fn apply(&self, p: &[f64]) -> Result<Point> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        let mut out = vec![0.0; self.dim];
        self.apply_into(p, &mut out);
        Ok(Point(out))
    }

    /// Unchecked hot-path variant of [`AffineMap::apply`]; slices must have length `dim`.
    #[inline]
    pub fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.linear[i * self.dim..(i + 1) * self.dim];
            *o = row.iter().zip(p).map(|(a, x)| a * x).sum::<f64>() + self.offset[i];
        }
    }

    /// The unique fixed point, solving `(I - linear) p = offset`.
    pub fn fixed_point(&self) -> Result<Point> {
        let k = self.dim;
        let mut system: Vec<f64> = (0..k * k)
            .map(|idx| {
                let (r, c) = (idx / k, idx % k);
                f64::from(u8::from(r == c)) - self.linear[idx]
            })
            .collect();
        let lu = system.clone();
        let mut p = solve(&mut system, self.offset.clone(), k)
            .ok_or_else(|| Error::Internal("I - linear is singular".into()))?;
        // one step of iterative refinement
        let mut residual = self.offset.clone();
        for (i, r) in residual.iter_mut().enumerate() {
            *r -= (0..k).map(|j| lu[i * k + j] * p[j]).sum::<f64>();
        }
        let mut system = lu;
        if let Some(correction) = solve(&mut system, residual, k) {
            for (x, dx) in p.iter_mut().zip(correction) {
                *x += dx;
            }
        }
        Ok(Point(p))
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let k = self.dim;
        let rows = (0..k)
            .map(|i| (0..k).map(|j| (0..k).map(|m| self.linear[i * k + m] * other.linear[m * k + j]).sum()).collect())
            .collect();
        let mut offset = vec![0.0; k];
        self.apply_into(&other.offset, &mut offset);
        AffineMap::new(rows, offset)
    }
}

/// Gaussian elimination with partial pivoting on a row-major `k x k` system.
fn solve(a: &mut [f64], mut b: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    for col in 0..k {
        let pivot = (col..k).max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))?;
        if a[pivot * k + col].abs() < f64::MIN_POSITIVE {
            return None;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..k {
            let f = a[row * k + col] / a[col * k + col];
            for j in col..k {
                a[row * k + j] -= f * a[col * k + j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|j| a[row * k + j] * x[j]).sum();
        x[row] = (b[row] - s) / a[row * k + row];
    }
    Some(x)
}

fn determinant(m: &[f64], k: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k).max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs())).unwrap();
        if a[pivot * k + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            det = -det;
        }
        det *= a[col * k + col];
        for row in col + 1..k {
            let f = a[row * k + col] / a[col * k + col];
            for j in col..k {
                a[row * k + j] -= f * a[col * k + j];
            }
        }
    }
    det
}

/// Singular values of a row-major `k x k` matrix by one-sided Jacobi
/// rotations, in descending order.
pub fn singular_values(m: &[f64], k: usize) -> Vec<f64> {
    // work on columns: cols[j] is column j
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| (0..k).map(|i| m[i * k + j]).collect()).collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value.
pub fn operator_norm(m: &[f64], k: usize) -> f64 {
    singular_values(m, k)[0]
}

/// Symmetric Hausdorff distance between two finite clouds.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// `max_{x in from} min_{y in to} |x - y|`.
pub fn directed_hausdorff(from: &PointCloud, to: &PointCloud) -> f64 {
    use rayon::prelude::*;
    let tree = KdTree::build(to);
    from.coords()
        .par_chunks_exact(from.dim())
        .map(|p| tree.nearest_distance(p))
        .reduce(|| 0.0, f64::max)
}
