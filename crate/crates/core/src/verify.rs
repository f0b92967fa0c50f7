//! Self-verification suite run by `cvsep verify`: every module invariant is
//! evaluated on a parameter grid or on seeded random samples and reported
//! with its worst observed residual.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::covariance::{self, apply_local_symplectic, to_standard_form, SqueezeParams, StandardForm};
use crate::criteria::{self, analytic_bound, f_quartic, prep_check, prep_eigensystem, separability_verdict, RayQuery};
use crate::duan::{duan_f, duan_margin, duan_root};
use crate::linalg::{self, AntiSymMatrix, SymMatrix};
use crate::oracle::{self, RandomSpec, SampleKind};
use crate::squeezing::{analytic_squeeze, boundary_identity, prep_c1sq_limit, r2_of_r1, sqrt_identity};

pub const DEFAULT_GRID: usize = 20;
pub const DEFAULT_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub threshold: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub grid: usize,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Tracks the worst residual of one invariant; a residual counts as a
/// failure when it exceeds the threshold or is NaN.
struct Check {
    name: &'static str,
    threshold: f64,
    worst: f64,
    failed: bool,
    cases: usize,
}

impl Check {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self { name, threshold, worst: 0.0, failed: false, cases: 0 }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() || residual > self.threshold {
            self.failed = true;
        }
        if residual.is_nan() || residual > self.worst {
            self.worst = residual;
        }
    }

    /// Records a boolean property as residual 0 (holds) or 1 (violated).
    fn record_bool(&mut self, holds: bool) {
        self.record(if holds { 0.0 } else { 1.0 });
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: !self.failed,
            max_residual: self.worst,
            threshold: self.threshold,
            cases: self.cases,
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

/// All `(a, b, t)` with `a, b ∈ [1/2, 10]` and `t ∈ [0, 1]`.
pub fn ray_grid(n: usize) -> Vec<RayQuery> {
    let ab = linspace(0.5, 10.0, n);
    let ts = linspace(0.0, 1.0, n);
    let mut out = Vec::with_capacity(n * n * n);
    for &a in &ab {
        for &b in &ab {
            for &t in &ts {
                out.push(RayQuery::new(a, b, t).expect("grid inside the physical domain"));
            }
        }
    }
    out
}

fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> SymMatrix {
    let entries: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    SymMatrix::new(n, &entries).unwrap()
}

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let (_, vecs) = linalg::sym_eigen(&random_symmetric(rng, n));
    vecs.into_iter().flatten().collect()
}

fn sf_distance(x: &StandardForm, y: &StandardForm) -> f64 {
    [(x.a(), y.a()), (x.b(), y.b()), (x.c1(), y.c1()), (x.c2(), y.c2())]
        .iter()
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + x.abs().max(y.abs()))
}

fn linalg_checks<R: Rng>(rng: &mut R, samples: usize, out: &mut Vec<CheckResult>) {
    let mut ortho = Check::new("linalg.orthogonal_invariance", 1e-10);
    let mut herm = Check::new("linalg.hermitian_reduces_to_psd", 0.0);
    let mut pairs = Check::new("linalg.embedding_pairs", 1e-10);
    for i in 0..samples {
        let n = [2, 4, 8][i % 3];
        let m = random_symmetric(rng, n);
        let q = random_orthogonal(rng, n);
        let a = linalg::sym_eigenvalues(&m);
        let b = linalg::sym_eigenvalues(&m.conjugate(&q).unwrap());
        ortho.record(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));

        let tol = 1e-9;
        let zero = AntiSymMatrix::zeros(n).unwrap();
        herm.record_bool(linalg::hermitian_psd(&m, &zero, tol).unwrap() == linalg::is_psd(&m, tol));

        let y: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let y = AntiSymMatrix::new(n, &y).unwrap();
        let spec = linalg::hermitian_embedding_spectrum(&m, &y).unwrap();
        pairs.record(spec.chunks(2).map(|p| (p[0] - p[1]).abs()).fold(0.0, f64::max));
    }
    out.extend([ortho.finish(), herm.finish(), pairs.finish()]);
}

fn covariance_checks<R: Rng>(rng: &mut R, samples: usize, out: &mut Vec<CheckResult>) {
    let spec = RandomSpec::physical(0, 0.2);
    let mut recover = Check::new("covariance.standard_form_invariance", 1e-8);
    let mut invariants = Check::new("covariance.local_invariants_preserved", 1e-10);
    let mut halves = Check::new("covariance.physical_implies_half", 0.0);
    for i in 0..samples {
        let sf = if i % 2 == 0 {
            oracle::random_standard_form(&spec, rng)
        } else {
            oracle::random_entangled(&spec, rng).expect("entangled window")
        };
        let v0 = sf.to_covariance();
        let s = oracle::random_local_symplectic(rng);
        let v = apply_local_symplectic(&v0, &s);
        match to_standard_form(&v, 1e-9) {
            Ok(back) => recover.record(sf_distance(&sf, &back)),
            Err(_) => recover.record(f64::INFINITY),
        }
        let (x, y) = (v0.local_invariants(), v.local_invariants());
        invariants.record(x.iter().zip(&y).map(|(p, q)| rel(*p, *q)).fold(0.0, f64::max));

        let w = apply_local_symplectic(&oracle::random_p_representable(rng), &s);
        if covariance::uncertainty_check(&w, false, 1e-9) {
            let tol = 1e-9;
            let ok = to_standard_form(&w, tol).map(|s| s.a() >= 0.5 - tol && s.b() >= 0.5 - tol).unwrap_or(false);
            halves.record_bool(ok);
        }
    }
    out.extend([recover.finish(), invariants.finish(), halves.finish()]);
}

fn criteria_checks<R: Rng>(rng: &mut R, grid: &[RayQuery], samples: usize, out: &mut Vec<CheckResult>) {
    let tol = criteria::DEFAULT_TOL;
    let spec = RandomSpec::physical(0, 0.1);

    let mut equivalence = Check::new("criteria.ppt_equivalence", 0.0);
    for i in 0..samples {
        let sf = if i % 2 == 0 {
            oracle::random_standard_form(&spec, rng)
        } else {
            oracle::random_entangled(&spec, rng).expect("entangled window")
        };
        let v = separability_verdict(&sf, tol);
        if v.det_margin.abs() <= 10.0 * tol || v.weak_margin.abs() <= 10.0 * tol {
            continue;
        }
        let ppt = covariance::uncertainty_check(&sf.to_covariance(), true, 1e-12);
        equivalence.record_bool(ppt == v.is_separable());
    }

    let mut consistency = Check::new("criteria.bound_saturates_quartic", 1e-9);
    let mut dominance = Check::new("criteria.weak_condition_dominance", 1e-12);
    for q in grid {
        let (c1sq, _) = analytic_bound(q);
        let scale = 1.0 + q.a() * q.b();
        consistency.record(f_quartic(c1sq, q).abs() / (scale * scale));
        let weak = q.weak_c1sq_limit();
        let excess = (c1sq - weak) / scale;
        let generic = q.a() > 0.5 && q.b() > 0.5;
        if q.t() == 1.0 {
            dominance.record(excess.abs());
        } else if generic {
            // strictly below the weak limit away from t = 1
            dominance.record(if excess < 0.0 { 0.0 } else { excess.max(1.0) });
        } else {
            dominance.record(excess.max(0.0));
        }
    }

    let mut implies6 = Check::new("criteria.prep_implies_condition6", 1e-9);
    let states = (samples / 20).max(10);
    for _ in 0..states {
        let v = oracle::random_p_representable(rng);
        if !prep_check(&v, 1e-12) {
            continue;
        }
        let scale = 1.0 + v.matrix().trace();
        implies6.record((-oracle::condition6_probe(&v, 1000, rng) / scale).max(0.0));
    }

    let mut closed = Check::new("criteria.prep_closed_form", 1e-10);
    for _ in 0..samples {
        let sf = oracle::random_standard_form(&spec, rng);
        let r = SqueezeParams::new(rng.gen_range(1.0..2.0 * sf.a()), rng.gen_range(1.0..2.0 * sf.b())).unwrap();
        let e = prep_eigensystem(&sf, &r, tol);
        let mut c = e.as_array().to_vec();
        c.sort_by(f64::total_cmp);
        let n = linalg::sym_eigenvalues(&criteria::prep_matrix(&sf, &r));
        closed.record(c.iter().zip(&n).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    out.extend([equivalence.finish(), consistency.finish(), dominance.finish(), implies6.finish(), closed.finish()]);
}

fn squeezing_checks(grid: &[RayQuery], out: &mut Vec<CheckResult>) {
    let mut range = Check::new("squeezing.range", 1e-12);
    let mut ratio = Check::new("squeezing.ratio_bound", 1e-12);
    let mut consistency = Check::new("squeezing.r2_of_r1_consistency", 1e-9);
    let mut symmetry = Check::new("squeezing.swap_symmetry", 1e-12);
    let mut identity = Check::new("squeezing.boundary_identity", 1e-10);
    let mut sqrt_id = Check::new("squeezing.sqrt_identity", 1e-10);
    let mut extremal = Check::new("squeezing.extremality", 1e-9);
    for q in grid {
        let (a, b, t) = (q.a(), q.b(), q.t());
        let r = analytic_squeeze(q);
        let mut excess = [1.0 - r.r1, r.r1 - 2.0 * a, 1.0 - r.r2, r.r2 - 2.0 * b].into_iter().fold(0.0, f64::max);
        if t == 1.0 {
            excess = excess.max((r.r1 - 1.0).abs()).max((r.r2 - 1.0).abs());
        }
        if t == 0.0 {
            excess = excess.max((r.r1 - 2.0 * a).abs()).max((r.r2 - 2.0 * b).abs());
        }
        range.record(excess);

        let swapped = analytic_squeeze(&RayQuery::new(b, a, t).unwrap());
        symmetry.record((swapped.r1 - r.r2).abs().max((swapped.r2 - r.r1).abs()));

        if a > 0.5 {
            consistency.record((r2_of_r1(a, b, r.r1).unwrap() - r.r2).abs());
        }
        if t > 0.0 {
            ratio.record((1.0 - r.r1 / t).max(1.0 - r.r2 / t).max(0.0));
            let id = boundary_identity(q).unwrap();
            identity.record(id.residual() / (1.0 + id.rhs.abs()));
            let sid = sqrt_identity(q).unwrap();
            sqrt_id.record(sid.residual() / (1.0 + sid.rhs_root.abs()));
        }
        if a > 0.5 && t > 0.0 && t < 1.0 {
            let best = prep_c1sq_limit(q, r.r1).unwrap();
            for h in [-1e-4, 1e-4] {
                let r1 = (r.r1 + h).clamp(1.0, 2.0 * a);
                extremal.record((prep_c1sq_limit(q, r1).unwrap() - best).max(0.0));
            }
        }
    }
    out.extend([
        range.finish(),
        ratio.finish(),
        consistency.finish(),
        symmetry.finish(),
        identity.finish(),
        sqrt_id.finish(),
        extremal.finish(),
    ]);
}

fn duan_checks<R: Rng>(rng: &mut R, samples: usize, out: &mut Vec<CheckResult>) {
    let tol = criteria::DEFAULT_TOL;
    let spec = RandomSpec::physical(0, 0.2);
    let mut linear = Check::new("duan.affine_in_c1", 1e-12);
    let mut chain = Check::new("duan.sign_chain", 1e-12);
    let mut coincide = Check::new("duan.coincidence_only_on_bound", 0.0);
    let mut saturation = Check::new("duan.saturation", 1e-8);
    for _ in 0..samples {
        let sample = oracle::random_sample(&spec, rng);
        let sf = sample.standard_form;
        let q = RayQuery::from_standard_form(&sf).unwrap();
        let r = analytic_squeeze(&q);
        if sf.c1() == 0.0 || q.a() == 0.5 {
            continue;
        }

        // three collinear points along |c₁| on the same ray, squeezers fixed
        let at = |c1: f64| duan_f(&StandardForm::new(sf.a(), sf.b(), c1, -q.t() * c1).unwrap(), r.r1.min(2.0 * sf.a()));
        let (c0, c1, c2) = (0.25 * sf.c1(), 0.5 * sf.c1(), 0.75 * sf.c1());
        if let (Ok(f0), Ok(f1), Ok(f2)) = (at(c0), at(c1), at(c2)) {
            linear.record(((f2 - f1) - (f1 - f0)).abs().max(f0 - f1).max(0.0));
        }

        let lo = duan_f(&sf, 1.0).unwrap();
        let hi = duan_f(&sf, r.r1.min(2.0 * sf.a())).unwrap();
        chain.record((-lo).max(hi).max(0.0));

        let margin = duan_margin(&sf, &r).unwrap();
        let on_bound = sample.kind == SampleKind::Boundary;
        saturation.record(if on_bound { margin.abs() } else { (-margin).max(0.0) });

        // strictly inside the bound the root stays below r₁
        let deep = sf.c1() * sf.c1() < 0.98 * analytic_bound(&q).0 && q.t() < 1.0;
        match duan_root(&sf, tol) {
            Ok(root) if on_bound => coincide.record_bool((root - r.r1).abs() <= 1e-6),
            Ok(root) if deep => coincide.record_bool(root < r.r1 - 1e-9),
            Ok(_) => {}
            Err(_) => coincide.record(f64::INFINITY),
        }
    }
    out.extend([linear.finish(), chain.finish(), coincide.finish(), saturation.finish()]);
}

fn oracle_checks<R: Rng>(rng: &mut R, grid: &[RayQuery], samples: usize, seed: u64, out: &mut Vec<CheckResult>) {
    let mut bound = Check::new("oracle.numeric_bound_agreement", 1e-8);
    for q in grid {
        bound.record((oracle::numeric_c1_bound(q, 1e-10) - analytic_bound(q).0).abs());
    }
    let spec = RandomSpec::physical(seed, 0.3);
    let mut physical = Check::new("oracle.samples_physical", 0.0);
    for _ in 0..samples {
        let sf = oracle::random_standard_form(&spec, rng);
        physical.record_bool(covariance::uncertainty_check(&sf.to_covariance(), false, 1e-9));
    }
    let mut determinism = Check::new("oracle.seeded_determinism", 0.0);
    let draw = |s: u64| {
        let mut g = oracle::seed_state(s);
        (0..100).map(|_| oracle::random_standard_form(&spec, &mut g)).collect::<Vec<_>>()
    };
    determinism.record_bool(draw(seed) == draw(seed));
    out.extend([bound.finish(), physical.finish(), determinism.finish()]);
}

/// Runs every invariant on an `grid³` ray grid and `samples` random states.
pub fn run_verify(grid: usize, seed: u64, samples: usize) -> VerifySummary {
    let rays = ray_grid(grid.max(2));
    let mut rng = oracle::seed_state(seed);
    let mut checks = Vec::new();
    linalg_checks(&mut rng, samples, &mut checks);
    covariance_checks(&mut rng, samples, &mut checks);
    criteria_checks(&mut rng, &rays, samples, &mut checks);
    squeezing_checks(&rays, &mut checks);
    duan_checks(&mut rng, samples, &mut checks);
    oracle_checks(&mut rng, &rays, samples, seed, &mut checks);
    let passed = checks.iter().all(|c| c.passed);
    VerifySummary { grid, samples, seed, passed, checks }
}
