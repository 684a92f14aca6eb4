//! Numerical check of the open set condition for a candidate convex open set
//! `V`: every image `S_i(V)` must lie in `V` and the images must have pairwise
//! disjoint interiors.
//!
//! A failed check only says this particular `V` does not work; it is not a
//! proof that no suitable open set exists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, AffineMap};
use crate::ifs::ContractionSystem;

/// Relative tolerance; the absolute band is this times `diam(V)`.
pub const RELATIVE_TOL: f64 = 1e-9;

/// An open interval `(a, b)` or the interior of a convex polygon with
/// counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexRegion {
    Interval { a: f64, b: f64 },
    Polygon(Vec<[f64; 2]>),
}

/// Wire form: `{ "dim": 1, "interval": [a, b] }` or `{ "dim": 2, "polygon": [[x, y], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>()
}

impl ConvexRegion {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite);
        }
        if b <= a {
            return Err(Error::DegenerateRegion(format!("interval ({a}, {b}) is empty")));
        }
        Ok(ConvexRegion::Interval { a, b })
    }

    /// Convex polygon; clockwise input is reversed to counterclockwise.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateRegion("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let area = signed_area(&vertices);
        if area < 0.0 {
            vertices.reverse();
        }
        let diam = polygon_diameter(&vertices);
        if area.abs() <= RELATIVE_TOL * diam * diam {
            return Err(Error::DegenerateRegion("polygon has zero area".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c < -RELATIVE_TOL * diam * diam {
                return Err(Error::DegenerateRegion("polygon is not convex".into()));
            }
        }
        Ok(ConvexRegion::Polygon(vertices))
    }

    pub fn from_spec(spec: &RegionSpec) -> Result<Self> {
        match (spec.dim, &spec.interval, &spec.polygon) {
            (1, Some([a, b]), None) => ConvexRegion::interval(*a, *b),
            (2, None, Some(v)) => ConvexRegion::polygon(v.clone()),
            (1 | 2, _, _) => Err(Error::Format(format!(
                "a dim {} region needs exactly one \"{}\" field",
                spec.dim,
                if spec.dim == 1 { "interval" } else { "polygon" }
            ))),
            (d, _, _) => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn to_spec(&self) -> RegionSpec {
        match self {
            ConvexRegion::Interval { a, b } => RegionSpec { dim: 1, interval: Some([*a, *b]), polygon: None },
            ConvexRegion::Polygon(v) => RegionSpec { dim: 2, interval: None, polygon: Some(v.clone()) },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: RegionSpec = serde_json::from_str(text).map_err(|e| Error::Format(format!("region JSON: {e}")))?;
        ConvexRegion::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("region serializes")
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexRegion::Interval { .. } => 1,
            ConvexRegion::Polygon(_) => 2,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexRegion::Interval { a, b } => b - a,
            ConvexRegion::Polygon(v) => polygon_diameter(v),
        }
    }
}

fn polygon_diameter(v: &[[f64; 2]]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in v.iter().enumerate() {
        for q in &v[i + 1..] {
            d = d.max(distance(p, q));
        }
    }
    d
}

/// Image of a convex region under an affine map.
pub fn map_region(map: &AffineMap, region: &ConvexRegion) -> Result<ConvexRegion> {
    if map.dim() != region.dim() {
        return Err(Error::DimensionMismatch { expected: region.dim(), found: map.dim() });
    }
    match region {
        ConvexRegion::Interval { a, b } => {
            let (fa, fb) = (map.apply(&[*a])?.coords()[0], map.apply(&[*b])?.coords()[0]);
            ConvexRegion::interval(fa.min(fb), fa.max(fb))
        }
        ConvexRegion::Polygon(v) => {
            let mut out = Vec::with_capacity(v.len());
            for p in v {
                let q = map.apply(p)?;
                out.push([q.coords()[0], q.coords()[1]]);
            }
            if map.determinant() < 0.0 {
                out.reverse();
            }
            ConvexRegion::polygon(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `S_i(V)` inside `V`; margin is the smallest inward distance of an image
    /// vertex to the boundary of `V` (negative means outside).
    Containment,
    /// Interiors of `S_i(V)` and `S_j(V)`; margin is the largest separation
    /// along any axis (negative means overlap depth).
    Disjointness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub constraint: Constraint,
    pub maps: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub disjoint: bool,
    /// Overlapping interval of two 1-D images, when they overlap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscReport {
    pub contained: Vec<bool>,
    pub disjoint: Vec<PairCheck>,
    pub margins: Vec<Margin>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl OscReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Containment margin of `image` in `region`: smallest signed distance of an
/// image vertex inside the region boundary.
fn containment_margin(region: &ConvexRegion, image: &ConvexRegion) -> f64 {
    match (region, image) {
        (ConvexRegion::Interval { a, b }, ConvexRegion::Interval { a: c, b: d }) => (c - a).min(b - d),
        (ConvexRegion::Polygon(outer), ConvexRegion::Polygon(inner)) => {
            let n = outer.len();
            let mut margin = f64::INFINITY;
            for e in 0..n {
                let (p, q) = (outer[e], outer[(e + 1) % n]);
                let len = distance(&p, &q);
                for v in inner {
                    margin = margin.min(cross(p, q, *v) / len);
                }
            }
            margin
        }
        _ => unreachable!("regions share a dimension"),
    }
}

/// Largest separating gap between two convex polygons over the edge normals
/// of both; non-negative iff their interiors are disjoint.
fn polygon_separation(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for poly in [a, b] {
        let n = poly.len();
        for e in 0..n {
            let (p, q) = (poly[e], poly[(e + 1) % n]);
            let len = distance(&p, &q);
            let axis = [(q[1] - p[1]) / len, -(q[0] - p[0]) / len];
            let project = |v: &[[f64; 2]]| {
                v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    let t = x[0] * axis[0] + x[1] * axis[1];
                    (lo.min(t), hi.max(t))
                })
            };
            let ((alo, ahi), (blo, bhi)) = (project(a), project(b));
            best = best.max((blo - ahi).max(alo - bhi));
        }
    }
    best
}

pub fn check_osc(system: &ContractionSystem, region: &ConvexRegion) -> Result<OscReport> {
    if system.dim() > 2 {
        return Err(Error::UnsupportedDimension(system.dim()));
    }
    if system.dim() != region.dim() {
        return Err(Error::DimensionMismatch { expected: region.dim(), found: system.dim() });
    }
    let tol = RELATIVE_TOL * region.diameter();
    let images: Vec<ConvexRegion> = system.maps().iter().map(|m| map_region(m, region)).collect::<Result<_>>()?;

    let mut margins = Vec::new();
    let mut contained = Vec::with_capacity(images.len());
    for (i, img) in images.iter().enumerate() {
        let m = containment_margin(region, img);
        contained.push(m >= -tol);
        margins.push(Margin { constraint: Constraint::Containment, maps: vec![i], value: m });
    }

    let mut disjoint = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let (sep, overlap) = match (&images[i], &images[j]) {
                (ConvexRegion::Interval { a, b }, ConvexRegion::Interval { a: c, b: d }) => {
                    let (lo, hi) = (a.max(*c), b.min(*d));
                    (lo - hi, (hi - lo > tol).then_some([lo, hi]))
                }
                (ConvexRegion::Polygon(p), ConvexRegion::Polygon(q)) => (polygon_separation(p, q), None),
                _ => unreachable!("images share a dimension"),
            };
            disjoint.push(PairCheck { i, j, disjoint: sep >= -tol, overlap });
            margins.push(Margin { constraint: Constraint::Disjointness, maps: vec![i, j], value: sep });
        }
    }

    let pass = contained.iter().all(|&c| c) && disjoint.iter().all(|p| p.disjoint);
    let note = if pass {
        "open set condition holds for this region; the similarity dimension equals the Hausdorff dimension".to_string()
    } else {
        "check failed for this region only; this does not disprove the open set condition, and the similarity \
         dimension is an upper bound only"
            .to_string()
    };
    Ok(OscReport {
        contained,
        disjoint,
        margins,
        tolerance: tol,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system_1d(maps: &[(f64, f64)]) -> ContractionSystem {
        ContractionSystem::new(maps.iter().map(|&(r, t)| AffineMap::scaling_1d(r, t).unwrap()).collect(), None).unwrap()
    }

    #[test]
    fn interval_images() {
        let v = ConvexRegion::interval(0.0, 1.0).unwrap();
        let s = AffineMap::scaling_1d(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(map_region(&s, &v).unwrap(), ConvexRegion::Interval { a: 2.0 / 3.0, b: 1.0 });
        let flip = AffineMap::scaling_1d(-0.5, 1.0).unwrap();
        assert_eq!(map_region(&flip, &v).unwrap(), ConvexRegion::Interval { a: 0.5, b: 1.0 });
    }

    #[test]
    fn triangle_image_half_scale() {
        let h = 3f64.sqrt() / 2.0;
        let t0 = ConvexRegion::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        let s = AffineMap::similarity_2d(0.5, 0.0, [0.0, 0.0]).unwrap();
        assert_eq!(map_region(&s, &t0).unwrap(), ConvexRegion::Polygon(vec![[0.0, 0.0], [0.5, 0.0], [0.25, h / 2.0]]));
    }

    #[test]
    fn reflection_keeps_counterclockwise_order() {
        let sq = ConvexRegion::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let mirror = AffineMap::new(vec![vec![-0.5, 0.0], vec![0.0, 0.5]], vec![1.0, 0.0]).unwrap();
        let ConvexRegion::Polygon(v) = map_region(&mirror, &sq).unwrap() else { panic!() };
        assert!(signed_area(&v) > 0.0);
    }

    #[test]
    fn cantor_passes_overlap_fails() {
        let v = ConvexRegion::interval(0.0, 1.0).unwrap();
        assert!(check_osc(&system_1d(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]), &v).unwrap().passed());
        let r = check_osc(&system_1d(&[(0.9, 0.0), (0.9, 0.1)]), &v).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let [lo, hi] = r.disjoint[0].overlap.unwrap();
        assert!((lo - 0.1).abs() < 1e-15 && (hi - 0.9).abs() < 1e-15);
        assert!(r.note.contains("upper bound"));
    }

    #[test]
    fn touching_intervals_are_disjoint() {
        let v = ConvexRegion::interval(0.0, 1.0).unwrap();
        assert!(check_osc(&system_1d(&[(0.5, 0.0), (0.5, 0.5)]), &v).unwrap().passed());
    }

    #[test]
    fn image_outside_region_fails_containment() {
        let v = ConvexRegion::interval(0.0, 1.0).unwrap();
        let r = check_osc(&system_1d(&[(0.5, 0.0), (0.5, 0.6)]), &v).unwrap();
        assert_eq!(r.contained, vec![true, false]);
    }

    #[test]
    fn region_validation() {
        assert!(ConvexRegion::interval(1.0, 1.0).is_err());
        assert!(ConvexRegion::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        let dart = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.2], [0.5, 1.0]];
        assert!(ConvexRegion::polygon(dart).is_err());
        let cw = ConvexRegion::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let ConvexRegion::Polygon(v) = cw else { panic!() };
        assert!(signed_area(&v) > 0.0);
    }

    #[test]
    fn region_json_forms() {
        let r = ConvexRegion::from_json(r#"{ "dim": 1, "interval": [0, 1] }"#).unwrap();
        assert_eq!(r, ConvexRegion::Interval { a: 0.0, b: 1.0 });
        let p = ConvexRegion::from_json(r#"{ "dim": 2, "polygon": [[0,0],[1,0],[0,1]] }"#).unwrap();
        assert_eq!(ConvexRegion::from_json(&p.to_json()).unwrap(), p);
        assert_eq!(ConvexRegion::from_json(r#"{ "dim": 3, "polygon": [] }"#), Err(Error::UnsupportedDimension(3)));
        assert!(ConvexRegion::from_json(r#"{ "dim": 1 }"#).is_err());
    }

    #[test]
    fn three_dimensional_system_is_unsupported() {
        let id3 = |t: f64| {
            AffineMap::new(vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.5]], vec![t, 0.0, 0.0]).unwrap()
        };
        let s = ContractionSystem::new(vec![id3(0.0), id3(0.5)], None).unwrap();
        let v = ConvexRegion::interval(0.0, 1.0).unwrap();
        assert_eq!(check_osc(&s, &v), Err(Error::UnsupportedDimension(3)));
    }
}
