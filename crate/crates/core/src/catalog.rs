//! Built-in constructions: Cantor set, Koch curve and snowflake, Sierpinski
//! triangle and pseudo-Hilbert curves, as explicit level-n geometry and (where
//! they are self-similar) as contraction systems.

use std::f64::consts::FRAC_PI_3;

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, PointCloud};
use crate::ifs::ContractionSystem;
use crate::osc::ConvexRegion;

pub const MAX_CANTOR_LEVEL: u32 = 30;
pub const MAX_HILBERT_ORDER: u32 = 12;

fn sqrt3() -> f64 {
    3f64.sqrt()
}

fn check_budget(base: u128, n: u32, budget: u64) -> Result<()> {
    let requested = base.checked_pow(n).unwrap_or(u128::MAX);
    if requested > u128::from(budget) {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    Ok(())
}

/// Sorted disjoint closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet(Vec<[f64; 2]>);

impl IntervalSet {
    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn midpoints(&self) -> PointCloud {
        PointCloud::new(1, self.0.iter().map(|[a, b]| 0.5 * (a + b)).collect()).expect("finite midpoints")
    }

    pub fn total_length(&self) -> f64 {
        self.0.iter().map(|[a, b]| b - a).sum()
    }
}

/// Open polygonal chain in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline(Vec<[f64; 2]>);

impl Polyline {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument("polyline needs at least 2 vertices".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("consecutive polyline vertices coincide".into()));
        }
        Ok(Polyline(vertices))
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.0.windows(2).map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt()).sum()
    }

    pub fn to_cloud(&self) -> PointCloud {
        PointCloud::from_points(2, &self.0).expect("finite vertices")
    }
}

pub type Triangle = [[f64; 2]; 3];

pub fn triangle_area(t: &Triangle) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1])).abs()
}

/// Level `n` of the middle-thirds construction: `2^n` intervals of length `3^-n`.
pub fn cantor_level(n: u32, budget: u64) -> Result<IntervalSet> {
    if n > MAX_CANTOR_LEVEL {
        return Err(Error::InvalidArgument(format!("Cantor level {n} exceeds {MAX_CANTOR_LEVEL}")));
    }
    check_budget(2, n, budget)?;
    let width = 1.0 / 3f64.powi(n as i32);
    // left endpoints are sums of 2 * 3^-j over the chosen digits
    let mut lefts = vec![0.0f64];
    for j in 1..=n {
        let step = 2.0 / 3f64.powi(j as i32);
        lefts = lefts.iter().flat_map(|&l| [l, l + step]).collect();
    }
    Ok(IntervalSet(lefts.into_iter().map(|l| [l, l + width]).collect()))
}

/// Midpoints of the level-`n` Cantor intervals. Midpoints never sit on a
/// triadic cell boundary, so triadic grid counts are exact.
pub fn cantor_midpoints(n: u32, budget: u64) -> Result<PointCloud> {
    Ok(cantor_level(n, budget)?.midpoints())
}

pub fn cantor_ifs() -> ContractionSystem {
    ContractionSystem::new(
        vec![
            AffineMap::scaling_1d(1.0 / 3.0, 0.0).expect("contraction"),
            AffineMap::scaling_1d(1.0 / 3.0, 2.0 / 3.0).expect("contraction"),
        ],
        None,
    )
    .expect("valid system")
}

pub fn cantor_region() -> ConvexRegion {
    ConvexRegion::interval(0.0, 1.0).expect("valid interval")
}

/// `S1 = x/3`, `S2 = R(60°)x/3 + (1/3, 0)`, `S3 = R(-60°)x/3 + (1/2, √3/6)`,
/// `S4 = x/3 + (2/3, 0)`.
pub fn koch_ifs() -> ContractionSystem {
    let third = 1.0 / 3.0;
    ContractionSystem::new(
        vec![
            AffineMap::similarity_2d(third, 0.0, [0.0, 0.0]).expect("contraction"),
            AffineMap::similarity_2d(third, FRAC_PI_3, [third, 0.0]).expect("contraction"),
            AffineMap::similarity_2d(third, -FRAC_PI_3, [0.5, sqrt3() / 6.0]).expect("contraction"),
            AffineMap::similarity_2d(third, 0.0, [2.0 * third, 0.0]).expect("contraction"),
        ],
        None,
    )
    .expect("valid system")
}

/// Interior of the isosceles triangle on `[0, 1]` with apex height `1/(2√3)`.
pub fn koch_region() -> ConvexRegion {
    ConvexRegion::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0 / (2.0 * sqrt3())]]).expect("valid triangle")
}

fn koch_refine(vertices: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (s, c) = FRAC_PI_3.sin_cos();
    let mut out = Vec::with_capacity(4 * vertices.len());
    for w in vertices.windows(2) {
        let (p, q) = (w[0], w[1]);
        let d = [(q[0] - p[0]) / 3.0, (q[1] - p[1]) / 3.0];
        let a = [p[0] + d[0], p[1] + d[1]];
        let apex = [a[0] + c * d[0] - s * d[1], a[1] + s * d[0] + c * d[1]];
        let b = [p[0] + 2.0 * d[0], p[1] + 2.0 * d[1]];
        out.extend_from_slice(&[p, a, apex, b]);
    }
    out.push(*vertices.last().expect("non-empty"));
    out
}

/// Level `n` of the Koch curve on `[0, 1]`: `4^n` segments of length `3^-n`.
pub fn koch_level(n: u32, budget: u64) -> Result<Polyline> {
    check_budget(4, n, budget)?;
    let mut v = vec![[0.0, 0.0], [1.0, 0.0]];
    for _ in 0..n {
        v = koch_refine(&v);
    }
    Polyline::new(v)
}

/// Three level-`n` Koch curves on the sides of the unit equilateral triangle,
/// spikes pointing outward. Closed: the last vertex repeats the first.
pub fn snowflake_level(n: u32, budget: u64) -> Result<Polyline> {
    check_budget(4, n, budget.saturating_div(3))?;
    let h = sqrt3() / 2.0;
    // clockwise, so the left-hand Koch spikes face outward
    let mut v = vec![[0.0, 0.0], [0.5, h], [1.0, 0.0], [0.0, 0.0]];
    for _ in 0..n {
        v = koch_refine(&v);
    }
    Polyline::new(v)
}

/// `x -> x/2 + v` for `v` in `{(0,0), (1/2,0), (1/4,√3/4)}`.
pub fn sierpinski_ifs() -> ContractionSystem {
    ContractionSystem::new(
        [[0.0, 0.0], [0.5, 0.0], [0.25, sqrt3() / 4.0]]
            .into_iter()
            .map(|v| AffineMap::similarity_2d(0.5, 0.0, v).expect("contraction"))
            .collect(),
        None,
    )
    .expect("valid system")
}

/// The unit equilateral triangle on base `[0, 1]`.
pub fn sierpinski_base() -> Triangle {
    [[0.0, 0.0], [1.0, 0.0], [0.5, sqrt3() / 2.0]]
}

pub fn sierpinski_region() -> ConvexRegion {
    ConvexRegion::polygon(sierpinski_base().to_vec()).expect("valid triangle")
}

/// Level `n`: `3^n` triangles of side `2^-n`.
pub fn sierpinski_level(n: u32, budget: u64) -> Result<Vec<Triangle>> {
    check_budget(3, n, budget)?;
    let mut tris = vec![sierpinski_base()];
    let mid = |a: [f64; 2], b: [f64; 2]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    for _ in 0..n {
        tris = tris
            .iter()
            .flat_map(|&[a, b, c]| {
                let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                [[a, ab, ca], [ab, b, bc], [ca, bc, c]]
            })
            .collect();
    }
    Ok(tris)
}

/// Cell `(x, y)` of the `2^order` grid visited at step `d`.
fn hilbert_cell(order: u32, d: u64) -> (u64, u64) {
    let side = 1u64 << order;
    let (mut x, mut y, mut t) = (0u64, 0u64, d);
    let mut s = 1u64;
    while s < side {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x, y)
}

/// Order-`n` pseudo-Hilbert curve through the centres of the `2^n x 2^n`
/// cells of the unit square, entering at the lower-left cell and leaving at
/// the lower-right one.
pub fn hilbert_curve(order: u32) -> Result<Polyline> {
    if !(1..=MAX_HILBERT_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!("Hilbert order must be in 1..={MAX_HILBERT_ORDER}, got {order}")));
    }
    let side = (1u64 << order) as f64;
    let v = (0..1u64 << (2 * order))
        .map(|d| {
            let (x, y) = hilbert_cell(order, d);
            [(x as f64 + 0.5) / side, (y as f64 + 0.5) / side]
        })
        .collect();
    Polyline::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::DEFAULT_POINT_BUDGET as B;

    fn close(a: [f64; 2], b: [f64; 2]) -> bool {
        (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15
    }

    #[test]
    fn cantor_levels() {
        assert_eq!(cantor_level(0, B).unwrap().intervals(), &[[0.0, 1.0]]);
        let c1 = cantor_level(1, B).unwrap();
        assert_eq!(c1.intervals(), &[[0.0, 1.0 / 3.0], [2.0 / 3.0, 1.0]]);
        let c2 = cantor_level(2, B).unwrap();
        let lefts: Vec<f64> = c2.intervals().iter().map(|i| i[0]).collect();
        for (l, e) in lefts.iter().zip([0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0]) {
            assert!((l - e).abs() < 1e-15);
        }
        assert!(c2.intervals().iter().all(|[a, b]| (b - a - 1.0 / 9.0).abs() < 1e-15));
        assert!(cantor_level(31, u64::MAX).is_err());
        assert!(cantor_level(20, 1000).is_err());
    }

    #[test]
    fn koch_first_level() {
        assert_eq!(koch_level(0, B).unwrap().vertices(), &[[0.0, 0.0], [1.0, 0.0]]);
        let k1 = koch_level(1, B).unwrap();
        let expected = [[0.0, 0.0], [1.0 / 3.0, 0.0], [0.5, sqrt3() / 6.0], [2.0 / 3.0, 0.0], [1.0, 0.0]];
        assert_eq!(k1.len(), 5);
        assert!(k1.vertices().iter().zip(expected).all(|(a, b)| close(*a, b)));
    }

    #[test]
    fn koch_length_grows() {
        for n in 0..7 {
            let k = koch_level(n, B).unwrap();
            assert_eq!(k.len(), 4usize.pow(n) + 1);
            assert!((k.length() - (4.0f64 / 3.0).powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn snowflake_is_closed_and_outward() {
        let s = snowflake_level(1, B).unwrap();
        assert_eq!(s.len(), 13);
        assert_eq!(s.vertices()[0], s.vertices()[12]);
        // first spike of the left side points away from the triangle centroid
        let apex = s.vertices()[2];
        assert!(apex[0] < 0.25);
    }

    #[test]
    fn sierpinski_levels() {
        assert_eq!(sierpinski_level(0, B).unwrap(), vec![sierpinski_base()]);
        let t1 = sierpinski_level(1, B).unwrap();
        assert_eq!(t1.len(), 3);
        // touching pairwise at single corners
        for i in 0..3 {
            for j in i + 1..3 {
                let shared = t1[i].iter().filter(|v| t1[j].contains(v)).count();
                assert_eq!(shared, 1);
            }
        }
        let t2 = sierpinski_level(2, B).unwrap();
        assert_eq!(t2.len(), 9);
        for t in &t2 {
            assert!((((t[1][0] - t[0][0]).powi(2) + (t[1][1] - t[0][1]).powi(2)).sqrt() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn sierpinski_area_vanishes() {
        let base = triangle_area(&sierpinski_base());
        for n in 0..8 {
            let area: f64 = sierpinski_level(n, B).unwrap().iter().map(triangle_area).sum();
            assert!((area - 0.75f64.powi(n as i32) * base).abs() < 1e-12);
        }
    }

    #[test]
    fn hilbert_order_one() {
        let h = hilbert_curve(1).unwrap();
        assert_eq!(h.vertices(), &[[0.25, 0.25], [0.25, 0.75], [0.75, 0.75], [0.75, 0.25]]);
        assert!(hilbert_curve(0).is_err());
        assert!(hilbert_curve(13).is_err());
    }

    #[test]
    fn ifs_ratios() {
        assert_eq!(cantor_ifs().ratios(), vec![1.0 / 3.0; 2]);
        assert_eq!(sierpinski_ifs().ratios(), vec![0.5; 3]);
        assert!(koch_ifs().ratios().iter().all(|r| (r - 1.0 / 3.0).abs() < 1e-15));
    }
}
