//! The squeezed weak condition and the root equation `f(r₁*) = 0` of the
//! EPR-variance formulation, bracketed on `[1, r₁]` with `r₁` the analytic
//! squeezer.

use crate::covariance::{SqueezeParams, StandardForm};
use crate::criteria::{separability_verdict, RayQuery};
use crate::error::{Error, Result};
use crate::squeezing::{analytic_squeeze, r2_of_r1};

const MAX_BISECTIONS: usize = 200;
const INTERVAL_TOL: f64 = 1e-12;

/// `√([ar₁ + a/r₁ − 1][br₂ + b/r₂ − 1]) − √(r₁r₂)|c₁| − |c₂|/√(r₁r₂)`.
pub fn duan_margin(sf: &StandardForm, r: &SqueezeParams) -> Result<f64> {
    let (a, b) = (sf.a(), sf.b());
    if a < 0.5 || b < 0.5 {
        return Err(Error::UnphysicalParams(format!("need a, b ≥ 1/2, got a = {a}, b = {b}")));
    }
    let left = a * r.r1 + a / r.r1 - 1.0;
    let right = b * r.r2 + b / r.r2 - 1.0;
    if left < 0.0 || right < 0.0 {
        return Err(Error::UnphysicalParams(format!("negative variance factor ({left}, {right})")));
    }
    let s = (r.r1 * r.r2).sqrt();
    Ok((left * right).sqrt() - s * sf.c1().abs() - sf.c2().abs() / s)
}

/// `f(r₁) = (√(r₁r₂) − t/√(r₁r₂))|c₁| − √((ar₁−½)(br₂−½)) + √((a/r₁−½)(b/r₂−½))`
/// with `r₂ = r₂(r₁)` from the ratio equation.
pub fn duan_f(sf: &StandardForm, r1: f64) -> Result<f64> {
    let (a, b) = (sf.a(), sf.b());
    let r2 = r2_of_r1(a, b, r1)?;
    let r1 = r1.clamp(1.0, 2.0 * a);
    let s = (r1 * r2).sqrt();
    let t = sf.t();
    let outer = ((a * r1 - 0.5) * (b * r2 - 0.5)).max(0.0).sqrt();
    let inner = ((a / r1 - 0.5) * (b / r2 - 0.5)).max(0.0).sqrt();
    Ok((s - t / s) * sf.c1().abs() - outer + inner)
}

/// Root `r₁* ∈ [1, r₁]` of [`duan_f`] for a separable standard form.
pub fn duan_root(sf: &StandardForm, tol: f64) -> Result<f64> {
    if !separability_verdict(sf, tol).is_separable() {
        return Err(Error::EntangledInput);
    }
    if sf.c1() == 0.0 || sf.t() == 1.0 {
        return Ok(1.0);
    }
    let q = RayQuery::from_standard_form(sf)?;
    let mut lo = 1.0;
    let mut hi = analytic_squeeze(&q).r1.min(2.0 * sf.a());
    let f_lo = duan_f(sf, lo)?;
    let f_hi = duan_f(sf, hi)?;
    if f_lo < -tol || f_hi > tol {
        return Err(Error::NoRootBracket { f_lo, f_hi });
    }
    if f_lo <= 0.0 {
        return Ok(lo);
    }
    if f_hi >= 0.0 {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= INTERVAL_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if duan_f(sf, mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
