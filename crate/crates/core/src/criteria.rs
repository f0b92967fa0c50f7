//! Separability and P-representability tests on standard forms and
//! covariance matrices.

use serde::{Deserialize, Serialize};

use crate::covariance::{self, quad2, CovarianceMatrix, Mat2, SqueezeParams, StandardForm, SYMPLECTIC_J};
use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};

/// Default tolerance for verdicts and feasibility checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A ray `|c₂| = t|c₁|` at fixed local purities `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayQuery {
    a: f64,
    b: f64,
    t: f64,
}

impl RayQuery {
    pub fn new(a: f64, b: f64, t: f64) -> Result<Self> {
        if !(a >= 0.5 && b >= 0.5) || !a.is_finite() || !b.is_finite() {
            return Err(Error::UnphysicalParams(format!("need a, b ≥ 1/2, got a = {a}, b = {b}")));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
        }
        Ok(Self { a, b, t })
    }

    /// The ray through a physical standard form.
    pub fn from_standard_form(sf: &StandardForm) -> Result<Self> {
        Self::new(sf.a(), sf.b(), sf.t())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Upper limit on `c₁²` from the weak condition, `(2a−1)(2b−1)/(1+t)²`.
    pub fn weak_c1sq_limit(&self) -> f64 {
        (2.0 * self.a - 1.0) * (2.0 * self.b - 1.0) / ((1.0 + self.t) * (1.0 + self.t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Unphysical,
    Separable,
    Entangled,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub classification: Classification,
    pub det_margin: f64,
    pub weak_margin: f64,
}

impl Verdict {
    /// Separable in the strict sense or on the boundary of the separable set.
    pub fn is_separable(&self) -> bool {
        matches!(self.classification, Classification::Separable | Classification::Boundary)
    }
}

/// Closed-form spectrum of `V₀ − SSᵀ/2` for the diagonal squeeze Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepEigenvalues {
    pub lambda1_plus: f64,
    pub lambda1_minus: f64,
    pub lambda2_plus: f64,
    pub lambda2_minus: f64,
    pub feasible: bool,
}

impl PrepEigenvalues {
    pub fn min(&self) -> f64 {
        self.lambda1_minus.min(self.lambda2_minus)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.lambda1_plus, self.lambda1_minus, self.lambda2_plus, self.lambda2_minus]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProbeVectors {
    pub d: [f64; 2],
    pub f: [f64; 2],
    pub g: [f64; 2],
    pub h: [f64; 2],
}

fn margins_clamped(sf: &StandardForm) -> (f64, f64) {
    let (a, b, c1, c2) = (sf.a(), sf.b(), sf.c1().abs(), sf.c2().abs());
    let ab = a * b;
    let det = 4.0 * (ab - c1 * c1) * (ab - c2 * c2) - (a * a + b * b) - 2.0 * c1 * c2 + 0.25;
    let weak = ((2.0 * a - 1.0).max(0.0) * (2.0 * b - 1.0).max(0.0)).sqrt() - (c1 + c2);
    (det, weak)
}

/// `(det_margin, weak_margin)` of the two invariant separability inequalities.
pub fn simon_margins(sf: &StandardForm) -> Result<(f64, f64)> {
    if sf.a() < 0.5 || sf.b() < 0.5 {
        return Err(Error::UnphysicalParams(format!("need a, b ≥ 1/2, got a = {}, b = {}", sf.a(), sf.b())));
    }
    Ok(margins_clamped(sf))
}

/// Classifies a standard form. Margins are compared against
/// `tol · (1 + ab)`; the weak margin is evaluated with `2a−1` and `2b−1`
/// clamped at zero so it stays finite for unphysical input.
pub fn separability_verdict(sf: &StandardForm, tol: f64) -> Verdict {
    let (det_margin, weak_margin) = margins_clamped(sf);
    let band = tol * (1.0 + sf.a() * sf.b());
    let physical =
        sf.a() >= 0.5 - tol && sf.b() >= 0.5 - tol && covariance::uncertainty_check(&sf.to_covariance(), false, tol);
    let worst = det_margin.min(weak_margin);
    let classification = if !physical {
        Classification::Unphysical
    } else if worst.abs() <= band {
        Classification::Boundary
    } else if worst > band {
        Classification::Separable
    } else {
        Classification::Entangled
    };
    Verdict { classification, det_margin, weak_margin }
}

/// `D(a, b, t) = a²b²(1−t²)² + t(a+bt)(at+b)`.
pub fn big_d(q: &RayQuery) -> f64 {
    let (a, b, t) = (q.a, q.b, q.t);
    let u = 1.0 - t * t;
    a * a * b * b * u * u + t * (a + b * t) * (a * t + b)
}

/// `√D`, with rounding-level negatives clamped to zero.
pub(crate) fn sqrt_big_d(q: &RayQuery) -> f64 {
    let d = big_d(q);
    if d < 0.0 && d > -1e-15 {
        0.0
    } else {
        d.sqrt()
    }
}

/// Largest separable `(c₁², c₂²)` on the ray.
///
/// The smaller root of the quadratic in `c₁²` is evaluated in the
/// rationalized form `f(0) / ([2ab(1+t²)+t] + 2√D)`, which is the same
/// quantity as `([2ab(1+t²)+t] − 2√D)/(4t²)` without the cancellation at
/// small `t`. At `t = 0` this is the limit `(a − 1/(4a))(b − 1/(4b))`.
pub fn analytic_bound(q: &RayQuery) -> (f64, f64) {
    let (a, b, t) = (q.a, q.b, q.t);
    if t == 0.0 {
        let c1sq = (a - 0.25 / a) * (b - 0.25 / b);
        return (c1sq, 0.0);
    }
    let f0 = 4.0 * (a * a - 0.25) * (b * b - 0.25);
    let c1sq = f0 / (2.0 * a * b * (1.0 + t * t) + t + 2.0 * sqrt_big_d(q));
    (c1sq, t * t * c1sq)
}

/// `f(c₁²) = 4(ab − c₁²)(ab − t²c₁²) − (a² + b²) − 2tc₁² + 1/4`.
pub fn f_quartic(c1sq: f64, q: &RayQuery) -> f64 {
    let (a, b, t) = (q.a, q.b, q.t);
    let ab = a * b;
    4.0 * (ab - c1sq) * (ab - t * t * c1sq) - (a * a + b * b) - 2.0 * t * c1sq + 0.25
}

/// P-representability: `V − I/2 ≥ 0`.
pub fn prep_check(v: &CovarianceMatrix, tol: f64) -> bool {
    let shifted = v.matrix().add_scaled(&SymMatrix::identity(4).unwrap(), -0.5).unwrap();
    linalg::is_psd(&shifted, tol)
}

/// `V₀ − SSᵀ/2` assembled as a 4×4 matrix.
pub fn prep_matrix(sf: &StandardForm, r: &SqueezeParams) -> SymMatrix {
    sf.to_covariance().matrix().add_scaled(&covariance::squeeze_gram(r), -0.5).unwrap()
}

fn pair_eigenvalues(x: f64, y: f64, c: f64) -> (f64, f64) {
    let root = ((x - y) * (x - y) + 4.0 * c * c).sqrt();
    (0.5 * (x + y + root), 0.5 * (x + y - root))
}

/// Closed-form eigenvalues of `V₀ − SSᵀ/2`; the q-quadratures couple through
/// `c₁` and the p-quadratures through `c₂`.
pub fn prep_eigensystem(sf: &StandardForm, r: &SqueezeParams, tol: f64) -> PrepEigenvalues {
    let (a, b) = (sf.a(), sf.b());
    let (l1p, l1m) = pair_eigenvalues(a - 0.5 / r.r1, b - 0.5 / r.r2, sf.c1());
    let (l2p, l2m) = pair_eigenvalues(a - 0.5 * r.r1, b - 0.5 * r.r2, sf.c2());
    let feasible = [l1p, l1m, l2p, l2m].iter().all(|&l| l >= -tol);
    PrepEigenvalues { lambda1_plus: l1p, lambda1_minus: l1m, lambda2_plus: l2p, lambda2_minus: l2m, feasible }
}

/// Left side minus right side of the quadratic-form separability condition
/// `dᵀAd + fᵀBf + 2dᵀCf + gᵀAg + hᵀBh + 2gᵀCh ≥ |dᵀJg| + |fᵀJh|`.
pub fn condition6_margin(v: &CovarianceMatrix, p: &ProbeVectors) -> f64 {
    let (a, b, c): (Mat2, Mat2, Mat2) = (v.block_a(), v.block_b(), v.block_c());
    let j = SYMPLECTIC_J;
    let lhs = quad2(&p.d, &a, &p.d)
        + quad2(&p.f, &b, &p.f)
        + 2.0 * quad2(&p.d, &c, &p.f)
        + quad2(&p.g, &a, &p.g)
        + quad2(&p.h, &b, &p.h)
        + 2.0 * quad2(&p.g, &c, &p.h);
    lhs - quad2(&p.d, &j, &p.g).abs() - quad2(&p.f, &j, &p.h).abs()
}
