//! Brute-force verifiers and seeded generators used to cross-check the
//! closed forms.
//!
//! Randomness comes from a xoshiro256++ stream seeded through splitmix64, so
//! a seed alone fixes every sample.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::covariance::{self, mul2, transpose2, CovarianceMatrix, LocalSymplectic, Mat2, StandardForm, SYMPLECTIC_J};
use crate::criteria::{analytic_bound, condition6_margin, f_quartic, ProbeVectors, RayQuery};
use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};

pub type SeedState = Xoshiro256PlusPlus;

pub fn seed_state(seed: u64) -> SeedState {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

const MAX_REJECTIONS: usize = 100_000;

/// Parameters of the random standard-form generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub t_range: (f64, f64),
    /// Probability that a separable sample sits exactly on the bound.
    pub fraction_boundary: f64,
    /// Emit `c₂ = +t·c₁` instead of the entangling sign.
    #[serde(default)]
    pub flip_sign: bool,
}

impl RandomSpec {
    /// `a, b ∈ [1/2, 10]`, `t ∈ [0, 1]`.
    pub fn physical(seed: u64, fraction_boundary: f64) -> Self {
        Self {
            seed,
            a_range: (0.5, 10.0),
            b_range: (0.5, 10.0),
            t_range: (0.0, 1.0),
            fraction_boundary,
            flip_sign: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok_range(self.a_range) || !ok_range(self.b_range) || !ok_range(self.t_range) {
            return Err(Error::InvalidParameter("ranges must be finite with lo ≤ hi".into()));
        }
        if self.a_range.0 < 0.5 || self.b_range.0 < 0.5 {
            return Err(Error::InvalidParameter("a and b ranges must start at or above 1/2".into()));
        }
        if self.t_range.0 < 0.0 || self.t_range.1 > 1.0 {
            return Err(Error::InvalidParameter("t range must lie within [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.fraction_boundary) {
            return Err(Error::InvalidParameter("fraction_boundary must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleKind {
    Interior,
    Boundary,
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub standard_form: StandardForm,
    pub kind: SampleKind,
}

/// Largest `c₁` whose ray state with `c₂ = -t·c₁` still obeys the
/// uncertainty relation: the smaller root of
/// `4t²x² − (4ab(1+t²) − 2t)x + 4(a²−¼)(b²−¼)` in `x = c₁²`.
pub fn physical_c1sq_limit(q: &RayQuery) -> f64 {
    let (a, b, t) = (q.a(), q.b(), q.t());
    let f0 = 4.0 * (a * a - 0.25) * (b * b - 0.25);
    let u = 1.0 - t * t;
    let dp = (a * a * b * b * u * u - t * (a - b * t) * (b - a * t)).max(0.0);
    f0 / (2.0 * a * b * (1.0 + t * t) - t + 2.0 * dp.sqrt())
}

/// The state at `c₁² = fraction · c1sq_max` on the ray.
pub fn standard_form_on_ray(q: &RayQuery, fraction: f64, flip_sign: bool) -> StandardForm {
    let c1 = (fraction * analytic_bound(q).0).max(0.0).sqrt();
    with_c1(q, c1, flip_sign)
}

fn with_c1(q: &RayQuery, c1: f64, flip_sign: bool) -> StandardForm {
    let c2 = if flip_sign { q.t() * c1 } else { -q.t() * c1 };
    StandardForm::new(q.a(), q.b(), c1, c2).expect("a, b ≥ 1/2")
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

fn draw_ray<R: Rng>(spec: &RandomSpec, rng: &mut R) -> RayQuery {
    let a = uniform(rng, spec.a_range);
    let b = uniform(rng, spec.b_range);
    let t = uniform(rng, spec.t_range);
    RayQuery::new(a, b, t).expect("validated ranges")
}

/// A separable standard form: `c₁` uniform in `[0, √c1sq_max]`, or exactly on
/// the bound with probability `fraction_boundary`.
pub fn random_sample<R: Rng>(spec: &RandomSpec, rng: &mut R) -> Sample {
    let q = draw_ray(spec, rng);
    let limit = analytic_bound(&q).0.max(0.0).sqrt();
    let (c1, kind) = if rng.gen::<f64>() < spec.fraction_boundary {
        (limit, SampleKind::Boundary)
    } else {
        (rng.gen::<f64>() * limit, SampleKind::Interior)
    };
    Sample { standard_form: with_c1(&q, c1, spec.flip_sign), kind }
}

pub fn random_standard_form<R: Rng>(spec: &RandomSpec, rng: &mut R) -> StandardForm {
    random_sample(spec, rng).standard_form
}

fn entangled_on_window<R: Rng>(
    spec: &RandomSpec,
    rng: &mut R,
    lower: impl Fn(&RayQuery) -> f64,
) -> Result<StandardForm> {
    for _ in 0..MAX_REJECTIONS {
        let q = draw_ray(spec, rng);
        let lo = lower(&q);
        let hi = physical_c1sq_limit(&q);
        if (hi - lo).is_nan() || hi - lo <= 1e-6 * (1.0 + hi) {
            continue;
        }
        let u: f64 = rng.gen_range(1e-3..1.0 - 1e-3);
        let sf = with_c1(&q, (lo + u * (hi - lo)).sqrt(), false);
        if covariance::uncertainty_check(&sf.to_covariance(), false, 1e-12) {
            return Ok(sf);
        }
    }
    Err(Error::InvalidParameter("generator ranges admit no physical entangled states".into()))
}

/// A physical entangled standard form: `c₁²` beyond the separable bound but
/// within the uncertainty relation, with the entangling sign `c₂ = −t·c₁`.
pub fn random_entangled<R: Rng>(spec: &RandomSpec, rng: &mut R) -> Result<StandardForm> {
    entangled_on_window(spec, rng, |q| analytic_bound(q).0)
}

/// A physical entangled standard form that also violates the weak
/// condition `√((2a−1)(2b−1)) ≥ |c₁| + |c₂|`.
pub fn random_weak_violating<R: Rng>(spec: &RandomSpec, rng: &mut R) -> Result<StandardForm> {
    entangled_on_window(spec, rng, |q| q.weak_c1sq_limit().max(analytic_bound(q).0))
}

pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// `R(θ)·diag(eˢ, e⁻ˢ)·R(φ)`.
pub fn single_mode_symplectic(theta: f64, s: f64, phi: f64) -> Mat2 {
    let squeeze = [[s.exp(), 0.0], [0.0, (-s).exp()]];
    mul2(&mul2(&rotation(theta), &squeeze), &rotation(phi))
}

pub fn random_local_symplectic<R: Rng>(rng: &mut R) -> LocalSymplectic {
    let mut factor = || {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let s = rng.gen_range(-1.0..=1.0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        single_mode_symplectic(theta, s, phi)
    };
    let s1 = factor();
    let s2 = factor();
    LocalSymplectic::new(s1, s2).expect("product of unit-determinant factors")
}

/// `I/2 + Σ wwᵀ` over one to four random vectors, which always admits a
/// P-representation.
pub fn random_p_representable<R: Rng>(rng: &mut R) -> CovarianceMatrix {
    let rank = rng.gen_range(1..=4);
    let mut m = [0.0; 16];
    for i in 0..4 {
        m[i * 4 + i] = 0.5;
    }
    for _ in 0..rank {
        let w: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        for i in 0..4 {
            for j in 0..4 {
                m[i * 4 + j] += w[i] * w[j];
            }
        }
    }
    CovarianceMatrix::new(SymMatrix::new(4, &m).unwrap()).unwrap()
}

/// Largest `c₁²` with `f ≥ 0` on `[0, c₁²]` that also respects the weak
/// limit, found by bisection on the quadratic `f(c₁²)`.
pub fn numeric_c1_bound(q: &RayQuery, tol: f64) -> f64 {
    let t = q.t();
    let weak = q.weak_c1sq_limit();
    let vertex = if t > 0.0 {
        let (a, b) = (q.a(), q.b());
        (2.0 * a * b * (1.0 + t * t) + t) / (4.0 * t * t)
    } else {
        f64::INFINITY
    };
    let mut lo = 0.0;
    let mut hi = weak.min(vertex);
    if hi <= 0.0 || f_quartic(hi, q) >= 0.0 {
        return hi.max(0.0);
    }
    let width = tol.max(0.0) * 1e-3;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= width * (1.0 + hi) || mid <= lo || mid >= hi {
            break;
        }
        if f_quartic(mid, q) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn random_vec<R: Rng>(rng: &mut R) -> [f64; 2] {
    [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)]
}

fn apply(m: &Mat2, v: &[f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Minimum of the quadratic-form margin over probe sets restricted to
/// `g = Jᵀd`, `h = ±Jᵀf`. For each random `d` both a random `f` and the
/// minimizing `f` are tried.
pub fn structured_probe<R: Rng>(v: &CovarianceMatrix, n: usize, rng: &mut R) -> f64 {
    let jt = transpose2(&SYMPLECTIC_J);
    let c = v.block_c();
    let jcjt = mul2(&mul2(&SYMPLECTIC_J, &c), &jt);
    let tr_b = v.block_b()[0][0] + v.block_b()[1][1];
    let mut best = f64::INFINITY;
    for _ in 0..n {
        let d = random_vec(rng);
        let f_rand = random_vec(rng);
        for sign in [1.0, -1.0] {
            let mut candidates = vec![f_rand];
            if tr_b > 1.0 {
                // f minimizing (tr B − 1)|f|² + 2dᵀ(C ± JCJᵀ)f
                let m: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| c[i][j] + sign * jcjt[i][j]));
                let mtd = apply(&transpose2(&m), &d);
                candidates.push([-mtd[0] / (tr_b - 1.0), -mtd[1] / (tr_b - 1.0)]);
            }
            for f in candidates {
                let g = apply(&jt, &d);
                let h0 = apply(&jt, &f);
                let h = [sign * h0[0], sign * h0[1]];
                best = best.min(condition6_margin(v, &ProbeVectors { d, f, g, h }));
            }
        }
    }
    best
}

/// Minimum of the quadratic-form margin over `n` random probe sets with
/// components uniform on `[−1, 1]`, together with the structured choices.
pub fn condition6_probe<R: Rng>(v: &CovarianceMatrix, n: usize, rng: &mut R) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..n {
        let p = ProbeVectors { d: random_vec(rng), f: random_vec(rng), g: random_vec(rng), h: random_vec(rng) };
        best = best.min(condition6_margin(v, &p));
    }
    best.min(structured_probe(v, n, rng))
}

/// Probe set read off the lowest eigenvector `u + iw` of the partially
/// transposed uncertainty matrix, with `u = (d, f)` and `w = (g, h)`. Its
/// margin is at most the (negative, for an entangled state) eigenvalue
/// times `|u|² + |w|²`.
pub fn ppt_probe(v: &CovarianceMatrix) -> ProbeVectors {
    let (_, vecs) = linalg::hermitian_eigen(v.matrix(), &covariance::symplectic_form(true)).expect("4×4 blocks");
    let (u, w) = &vecs[0];
    ProbeVectors { d: [u[0], u[1]], f: [u[2], u[3]], g: [w[0], w[1]], h: [w[2], w[3]] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{det2, uncertainty_check};
    use crate::criteria::{separability_verdict, Classification};

    const C1_HALF: f64 = 0.633_974_596_215_561_4;

    fn q(a: f64, b: f64, t: f64) -> RayQuery {
        RayQuery::new(a, b, t).unwrap()
    }

    #[test]
    fn numeric_bound_examples() {
        assert!((numeric_c1_bound(&q(1.0, 1.0, 0.5), 1e-10) - 0.401_923_788_646_684).abs() < 1e-8);
        assert!((numeric_c1_bound(&q(1.0, 1.0, 1.0), 1e-10) - 0.25).abs() < 1e-12);
        assert!((numeric_c1_bound(&q(1.0, 1.0, 0.0), 1e-10) - 0.5625).abs() < 1e-8);
        assert_eq!(numeric_c1_bound(&q(0.5, 2.0, 0.3), 1e-10), 0.0);
    }

    #[test]
    fn symplectic_factors() {
        let id = single_mode_symplectic(0.0, 0.0, 0.0);
        assert_eq!(id, [[1.0, 0.0], [0.0, 1.0]]);
        let sq = single_mode_symplectic(0.0, 2f64.sqrt().ln(), 0.0);
        assert!((sq[0][0] - 2f64.sqrt()).abs() < 1e-15 && (sq[1][1] - 0.5f64.sqrt()).abs() < 1e-15);
        let mut rng = seed_state(3);
        for _ in 0..1000 {
            let s = random_local_symplectic(&mut rng);
            assert!((det2(&s.s1()) - 1.0).abs() < 1e-12 && (det2(&s.s2()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ray_samples() {
        let s = standard_form_on_ray(&q(1.0, 1.0, 0.5), 1.0, false);
        assert!((s.c1() - C1_HALF).abs() < 1e-15 && (s.c2() + 0.5 * C1_HALF).abs() < 1e-15);
        let s = standard_form_on_ray(&q(1.0, 2.0, 1.0), 1.0, false);
        assert!((s.c1() - 3f64.sqrt() / 2.0).abs() < 1e-15 && (s.c2() + s.c1()).abs() < 1e-15);
        let s = standard_form_on_ray(&q(1.0, 2.0, 0.4), 0.0, false);
        assert_eq!((s.c1(), s.c2()), (0.0, 0.0));
        assert_eq!(separability_verdict(&s, 1e-9).classification, Classification::Separable);
    }

    #[test]
    fn generated_states_are_physical() {
        let spec = RandomSpec::physical(7, 0.2);
        let mut rng = seed_state(spec.seed);
        for _ in 0..500 {
            let s = random_standard_form(&spec, &mut rng);
            assert!(uncertainty_check(&s.to_covariance(), false, 1e-9));
            let e = random_entangled(&spec, &mut rng).unwrap();
            assert!(uncertainty_check(&e.to_covariance(), false, 1e-9));
            assert_eq!(separability_verdict(&e, 1e-9).classification, Classification::Entangled);
        }
        let flipped = RandomSpec { flip_sign: true, ..spec };
        let s = random_standard_form(&flipped, &mut rng);
        assert!(s.c2() >= 0.0);
    }

    #[test]
    fn weak_violating_states() {
        let spec = RandomSpec::physical(11, 0.0);
        let mut rng = seed_state(spec.seed);
        for _ in 0..200 {
            let s = random_weak_violating(&spec, &mut rng).unwrap();
            let v = separability_verdict(&s, 1e-9);
            assert_eq!(v.classification, Classification::Entangled);
            assert!(v.weak_margin < 0.0);
        }
    }

    #[test]
    fn ppt_probe_detects_entanglement() {
        let spec = RandomSpec::physical(5, 0.0);
        let mut rng = seed_state(spec.seed);
        for _ in 0..200 {
            let v = random_entangled(&spec, &mut rng).unwrap().to_covariance();
            assert!(condition6_margin(&v, &ppt_probe(&v)) < 0.0);
        }
        let v = CovarianceMatrix::vacuum();
        assert!(condition6_margin(&v, &ppt_probe(&v)) >= -1e-12);
    }

    #[test]
    fn physical_limit_matches_eigen_check() {
        for &(a, b, t) in &[(1.0, 1.0, 0.5), (2.0, 0.8, 0.7), (1.5, 1.5, 1.0), (3.0, 1.0, 0.2)] {
            let qq = q(a, b, t);
            let x = physical_c1sq_limit(&qq);
            let inside = with_c1(&qq, (x * (1.0 - 1e-6)).sqrt(), false);
            let outside = with_c1(&qq, (x * (1.0 + 1e-6)).sqrt(), false);
            assert!(uncertainty_check(&inside.to_covariance(), false, 1e-12));
            assert!(!uncertainty_check(&outside.to_covariance(), false, 1e-12));
        }
    }

    #[test]
    fn seeded_determinism() {
        let spec = RandomSpec::physical(42, 0.3);
        let run = |seed| {
            let mut rng = seed_state(seed);
            (0..50).map(|_| random_standard_form(&spec, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn spec_validation() {
        assert!(RandomSpec::physical(0, 0.5).validate().is_ok());
        assert!(RandomSpec { a_range: (0.4, 1.0), ..RandomSpec::physical(0, 0.5) }.validate().is_err());
        assert!(RandomSpec { t_range: (0.0, 1.1), ..RandomSpec::physical(0, 0.5) }.validate().is_err());
        assert!(RandomSpec::physical(0, 1.5).validate().is_err());
    }

    #[test]
    fn probe_examples() {
        let mut rng = seed_state(5);
        assert!(condition6_probe(&CovarianceMatrix::vacuum(), 1000, &mut rng) >= -1e-12);
        let sep = standard_form_on_ray(&q(1.0, 1.0, 0.5), 1.0, false).to_covariance();
        assert!(condition6_probe(&sep, 10_000, &mut rng) >= -1e-9);
        let ent = StandardForm::new(1.0, 1.0, 0.7, -0.35).unwrap().to_covariance();
        assert!(structured_probe(&ent, 10_000, &mut rng) < 0.0);
        assert!(condition6_probe(&ent, 10_000, &mut rng) < 0.0);
    }
}
