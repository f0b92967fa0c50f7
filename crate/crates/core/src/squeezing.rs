//! Closed-form squeezing parameters at which the P-representation boundary
//! meets the invariant separability bound, and the identities that certify
//! the coincidence.

use serde::{Deserialize, Serialize};

use crate::covariance::SqueezeParams;
use crate::criteria::{analytic_bound, sqrt_big_d, RayQuery};
use crate::error::{Error, Result};

/// Squeezers `(r₁, r₂)` along the ray `q`:
///
/// ```text
/// r₁ = (ab(1−t²) + √D) / (at + b)
/// r₂ = (ab(1−t²) + √D) / (a + bt)
/// ```
///
/// They satisfy `1 ≤ r₁ ≤ 2a`, `1 ≤ r₂ ≤ 2b`, with `r = (1, 1)` at `t = 1`
/// and `r = (2a, 2b)` at `t = 0`.
pub fn analytic_squeeze(q: &RayQuery) -> SqueezeParams {
    let (a, b, t) = (q.a(), q.b(), q.t());
    let num = a * b * (1.0 - t * t) + sqrt_big_d(q);
    // rounding can step just outside [1, 2a] when the interval is a point
    SqueezeParams { r1: (num / (a * t + b)).clamp(1.0, 2.0 * a), r2: (num / (a + b * t)).clamp(1.0, 2.0 * b) }
}

/// Solution `r₂(r₁)` of the ratio equation
/// `(ar₁ − ½)/(a/r₁ − ½) = (br₂ − ½)/(b/r₂ − ½)`.
pub fn r2_of_r1(a: f64, b: f64, r1: f64) -> Result<f64> {
    if !(a >= 0.5 && b >= 0.5) {
        return Err(Error::UnphysicalParams(format!("need a, b ≥ 1/2, got a = {a}, b = {b}")));
    }
    let hi = 2.0 * a;
    let slack = 1e-12 * hi;
    if !(r1 >= 1.0 - slack && r1 <= hi + slack) {
        return Err(Error::Domain(format!("r1 = {r1} outside [1, {hi}]")));
    }
    if hi - 1.0 <= slack {
        // a = 1/2 collapses the interval to r₁ = 1, where the ratio is 0/0.
        return Err(Error::Domain("r2(r1) is undetermined for a = 1/2".into()));
    }
    let r1 = r1.clamp(1.0, hi);
    let x = (hi / r1 - 1.0) / (hi * r1 - 1.0);
    let one_minus = 1.0 - x;
    Ok(4.0 * b / ((one_minus * one_minus + 16.0 * b * b * x).sqrt() + one_minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityResiduals {
    /// Cross-multiplied ratio equation.
    pub ratio: f64,
    /// Fixed-point residuals for `r₁` and `r₂`; absent at `t = 0`.
    pub fix1: Option<f64>,
    pub fix2: Option<f64>,
}

pub fn stationarity_residuals(q: &RayQuery, r: &SqueezeParams) -> StationarityResiduals {
    let (a, b, t) = (q.a(), q.b(), q.t());
    let (r1, r2) = (r.r1, r.r2);
    let ratio = (a * r1 - 0.5) * (b / r2 - 0.5) - (b * r2 - 0.5) * (a / r1 - 0.5);
    if t == 0.0 {
        return StationarityResiduals { ratio, fix1: None, fix2: None };
    }
    let fix1 = r1 - (r2 * a / t + 0.5) / (a + r2 / (2.0 * t));
    let fix2 = r2 - (r1 * b / t + 0.5) / (b + r1 / (2.0 * t));
    StationarityResiduals { ratio, fix1: Some(fix1), fix2: Some(fix2) }
}

/// The three expressions that coincide at the analytic squeezers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryIdentity {
    /// `(a − 1/(2r₁))(b − 1/(2r₂))`
    pub lhs_outer: f64,
    /// `(a − r₁/2)(b − r₂/2) / t²`
    pub lhs_inner: f64,
    /// `([2ab(1+t²)+t] − 2√D) / (4t²)`, taken from [`analytic_bound`] whose
    /// rationalized form stays exact where the difference cancels.
    pub rhs: f64,
}

impl BoundaryIdentity {
    /// Largest pairwise deviation.
    pub fn residual(&self) -> f64 {
        let v = [self.lhs_outer, self.lhs_inner, self.rhs];
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

fn require_positive_t(q: &RayQuery) -> Result<()> {
    if q.t() > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("identity degenerates at t = 0".into()))
    }
}

pub fn boundary_identity(q: &RayQuery) -> Result<BoundaryIdentity> {
    require_positive_t(q)?;
    let (a, b, t) = (q.a(), q.b(), q.t());
    let r = analytic_squeeze(q);
    let lhs_outer = (a - 0.5 / r.r1) * (b - 0.5 / r.r2);
    let lhs_inner = (a - 0.5 * r.r1) * (b - 0.5 * r.r2) / (t * t);
    let rhs = analytic_bound(q).0;
    Ok(BoundaryIdentity { lhs_outer, lhs_inner, rhs })
}

/// Square-root form of the boundary identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtIdentity {
    pub term1: f64,
    pub term2: f64,
    pub rhs_root: f64,
}

impl SqrtIdentity {
    pub fn residual(&self) -> f64 {
        let v = [self.term1, self.term2, self.rhs_root];
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

pub fn sqrt_identity(q: &RayQuery) -> Result<SqrtIdentity> {
    require_positive_t(q)?;
    let (a, b, t) = (q.a(), q.b(), q.t());
    let r = analytic_squeeze(q);
    let (r1, r2) = (r.r1, r.r2);
    let root_prod = (r1 * r2).sqrt();
    let term1 = ((a * r1 - 0.5) * (b * r2 - 0.5)).max(0.0).sqrt() / root_prod;
    let term2 = ((a / r1 - 0.5) * (b / r2 - 0.5)).max(0.0).sqrt() / (t / root_prod);
    let rhs_root = analytic_bound(q).0.max(0.0).sqrt();
    Ok(SqrtIdentity { term1, term2, rhs_root })
}

/// Largest `c₁²` admitted by the P-representation condition at squeezers
/// `(r₁, r₂(r₁))` on the ray: the minimum of the two determinant bounds.
/// The analytic `r₁` maximizes this.
pub fn prep_c1sq_limit(q: &RayQuery, r1: f64) -> Result<f64> {
    let (a, b, t) = (q.a(), q.b(), q.t());
    let r2 = r2_of_r1(a, b, r1)?;
    let outer = (a - 0.5 / r1) * (b - 0.5 / r2);
    if t == 0.0 {
        return Ok(outer);
    }
    let inner = (a - 0.5 * r1) * (b - 0.5 * r2) / (t * t);
    Ok(outer.min(inner))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: f64, b: f64, t: f64) -> RayQuery {
        RayQuery::new(a, b, t).unwrap()
    }

    // (1 + √3)/2 and (3 − √3)/2
    const R_HALF: f64 = 1.366_025_403_784_438_6;
    const C1_HALF: f64 = 0.633_974_596_215_561_4;

    #[test]
    fn analytic_squeeze_endpoints() {
        for &(a, b) in &[(1.0, 1.0), (0.5, 3.0), (4.0, 0.7)] {
            let r = analytic_squeeze(&q(a, b, 1.0));
            assert!((r.r1 - 1.0).abs() < 1e-15 && (r.r2 - 1.0).abs() < 1e-15);
            let r = analytic_squeeze(&q(a, b, 0.0));
            assert!((r.r1 - 2.0 * a).abs() < 1e-14 && (r.r2 - 2.0 * b).abs() < 1e-14);
        }
        let r = analytic_squeeze(&q(1.0, 1.0, 0.5));
        assert!((r.r1 - R_HALF).abs() < 1e-15 && (r.r2 - R_HALF).abs() < 1e-15);
    }

    #[test]
    fn r2_of_r1_examples() {
        assert!((r2_of_r1(1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((r2_of_r1(1.3, 2.1, 2.6).unwrap() - 4.2).abs() < 1e-14);
        assert!((r2_of_r1(1.0, 1.0, R_HALF).unwrap() - R_HALF).abs() < 1e-14);
        assert!(matches!(r2_of_r1(1.0, 1.0, 2.5), Err(Error::Domain(_))));
        assert!(matches!(r2_of_r1(1.0, 1.0, 0.9), Err(Error::Domain(_))));
        assert!(r2_of_r1(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn r2_of_r1_solves_ratio_equation() {
        let (a, b) = (1.7, 0.8);
        for i in 0..=20 {
            let r1 = 1.0 + (2.0 * a - 1.0) * i as f64 / 20.0;
            let r2 = r2_of_r1(a, b, r1).unwrap();
            let res = stationarity_residuals(&q(a, b, 0.5), &SqueezeParams { r1, r2 });
            assert!(res.ratio.abs() < 1e-10, "r1 = {r1}: {}", res.ratio);
        }
    }

    #[test]
    fn stationarity_examples() {
        let qq = q(1.0, 1.0, 0.5);
        let res = stationarity_residuals(&qq, &analytic_squeeze(&qq));
        assert!(res.ratio.abs() < 1e-10);
        assert!(res.fix1.unwrap().abs() < 1e-10 && res.fix2.unwrap().abs() < 1e-10);

        let one = SqueezeParams { r1: 1.0, r2: 1.0 };
        let res = stationarity_residuals(&q(1.0, 1.0, 1.0), &one);
        assert_eq!((res.ratio, res.fix1, res.fix2), (0.0, Some(0.0), Some(0.0)));

        let res = stationarity_residuals(&qq, &one);
        assert_eq!(res.ratio, 0.0);
        assert!((res.fix1.unwrap() + 0.25).abs() < 1e-15);

        let res = stationarity_residuals(&q(1.0, 1.0, 0.0), &one);
        assert!(res.fix1.is_none() && res.fix2.is_none());
    }

    #[test]
    fn boundary_identity_examples() {
        let id = boundary_identity(&q(1.0, 1.0, 0.5)).unwrap();
        for v in [id.lhs_outer, id.lhs_inner, id.rhs] {
            assert!((v - C1_HALF * C1_HALF).abs() < 1e-14);
        }
        let id = boundary_identity(&q(1.0, 1.0, 1.0)).unwrap();
        assert!(id.residual() < 1e-15 && (id.rhs - 0.25).abs() < 1e-15);
        let id = boundary_identity(&q(2.0, 1.0, 1.0)).unwrap();
        assert!(id.residual() < 1e-15 && (id.rhs - 0.75).abs() < 1e-15);
        assert!(matches!(boundary_identity(&q(1.0, 1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn sqrt_identity_examples() {
        let id = sqrt_identity(&q(1.0, 1.0, 0.5)).unwrap();
        assert!((id.term1 - C1_HALF).abs() < 1e-14 && id.residual() < 1e-14);
        let id = sqrt_identity(&q(1.0, 1.0, 1.0)).unwrap();
        assert!((id.rhs_root - 0.5).abs() < 1e-15 && id.residual() < 1e-15);
        let id = sqrt_identity(&q(1.0, 2.0, 1.0)).unwrap();
        assert!((id.rhs_root - 0.75f64.sqrt()).abs() < 1e-15 && id.residual() < 1e-14);
        assert!(sqrt_identity(&q(1.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn analytic_squeezer_maximizes_prep_limit() {
        let qq = q(1.0, 1.0, 0.5);
        let r1 = analytic_squeeze(&qq).r1;
        let best = prep_c1sq_limit(&qq, r1).unwrap();
        assert!((best - C1_HALF * C1_HALF).abs() < 1e-14);
        for h in [-1e-4, 1e-4] {
            assert!(prep_c1sq_limit(&qq, r1 + h).unwrap() < best);
        }
    }
}
