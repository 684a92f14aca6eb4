//! Similarity dimension: the root `d` of `sum_i r_i^d = 1`.

use crate::error::{Error, Result};

const BISECTION_WIDTH: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-12;
const MAX_NEWTON_STEPS: usize = 50;

/// Non-empty list of scale factors, each strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleList(Vec<f64>);

impl ScaleList {
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidArgument("scale list is empty".into()));
        }
        if let Some((i, r)) = ratios.iter().enumerate().find(|(_, r)| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::InvalidArgument(format!("ratio {i} = {r} is not in (0, 1)")));
        }
        Ok(ScaleList(ratios))
    }

    pub fn ratios(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_ratio(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

/// `f(d) = sum_i r_i^d`.
pub fn moran_value(scales: &ScaleList, d: f64) -> f64 {
    scales.0.iter().map(|r| r.powf(d)).sum()
}

fn moran_derivative(scales: &ScaleList, d: f64) -> f64 {
    scales.0.iter().map(|r| r.powf(d) * r.ln()).sum()
}

/// Root of the Moran equation. Bisection on `[0, ln n / ln(1/r_max)]` down to
/// width 1e-6, then Newton steps until the residual is at most 1e-12.
pub fn moran_dimension(scales: &ScaleList) -> f64 {
    let n = scales.len();
    if n == 1 {
        return 0.0;
    }
    // the all-equal-ratio root bounds the true one; for equal ratios it is the
    // root itself, so pad it to keep rounding from clamping Newton short of it
    let (mut lo, mut hi) = (0.0, (n as f64).ln() / -(scales.max_ratio() - 1.0).ln_1p());
    hi = hi * (1.0 + 1e-9) + BISECTION_WIDTH;
    // f(lo) >= 1 >= f(hi)
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if moran_value(scales, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut d = 0.5 * (lo + hi);
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_NEWTON_STEPS {
        let residual = moran_value(scales, d) - 1.0;
        let step = residual / moran_derivative(scales, d);
        // polish past the residual target until steps stop shrinking, so the
        // root is accurate to a few ulps regardless of summation order
        if residual.abs() <= RESIDUAL_TOL && (step.abs() >= last_step || step.abs() <= 4.0 * f64::EPSILON * d) {
            break;
        }
        last_step = step.abs();
        // f is convex and decreasing; the clamp only matters on float noise
        d = (d - step).clamp(lo, hi);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scales(r: &[f64]) -> ScaleList {
        ScaleList::new(r.to_vec()).unwrap()
    }

    /// Plain bisection to machine precision, independent of the Newton finish.
    fn bisection_oracle(s: &ScaleList) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 64.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if s.ratios().iter().map(|r| r.powf(mid)).sum::<f64>() > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn equal_ratios_near_one_reach_the_root() {
        // 8 maps of ratio ~0.988: d ~ 175, where ln 8 / ln(1/r) carries rounding error
        let r = 0.9881881280138571;
        let d = moran_dimension(&scales(&[r; 8]));
        assert!((d - 175.00495895689713).abs() < 1e-12, "{d}");
    }

    #[test]
    fn moran_value_examples() {
        let cantor = scales(&[1.0 / 3.0, 1.0 / 3.0]);
        assert!((moran_value(&cantor, 2f64.ln() / 3f64.ln()) - 1.0).abs() < 1e-15);
        assert_eq!(moran_value(&scales(&[0.2, 0.7, 0.9]), 0.0), 3.0);
        assert_eq!(moran_value(&scales(&[0.5, 0.25]), 1.0), 0.75);
    }

    #[test]
    fn closed_form_dimensions() {
        let cases: [(&[f64], f64); 4] = [
            (&[1.0 / 3.0; 2], 0.6309297535714574),
            (&[1.0 / 3.0; 4], 1.2618595071429148),
            (&[0.5; 3], 1.5849625007211562),
            (&[0.5; 2], 1.0),
        ];
        for (r, expected) in cases {
            let s = scales(r);
            let d = moran_dimension(&s);
            assert!((d - expected).abs() < 1e-12, "{r:?}: {d} vs {expected}");
            assert!((moran_value(&s, d) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn golden_ratio_case() {
        // x = 2^-d solves x + x^2 = 1, so x = (sqrt 5 - 1) / 2
        let s = scales(&[0.5, 0.25]);
        let closed = (2.0 / (5f64.sqrt() - 1.0)).log2();
        assert!((closed - 0.6942419136306174).abs() < 1e-15);
        assert!((bisection_oracle(&s) - closed).abs() < 1e-13);
        assert!((moran_dimension(&s) - closed).abs() < 1e-12);
    }

    #[test]
    fn single_map_has_dimension_zero() {
        assert_eq!(moran_dimension(&scales(&[0.4])), 0.0);
    }

    #[test]
    fn rejects_bad_ratios() {
        assert!(ScaleList::new(vec![]).is_err());
        assert!(ScaleList::new(vec![0.5, 1.0]).is_err());
        assert!(ScaleList::new(vec![0.0]).is_err());
        assert!(ScaleList::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn root_lies_in_bracket_and_matches_oracle() {
        let s = scales(&[0.1, 0.35, 0.6, 0.2, 0.05]);
        let d = moran_dimension(&s);
        let upper = (5f64).ln() / (1.0 / 0.6f64).ln();
        assert!((0.0..=upper).contains(&d));
        assert!((d - bisection_oracle(&s)).abs() < 1e-11);
    }
}
