//! Two-mode covariance matrices in the quadrature order (q₁, p₁, q₂, p₂),
//! normalized so the vacuum is `I/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, AntiSymMatrix, SymMatrix};

pub type Mat2 = [[f64; 2]; 2];

/// Single-mode symplectic form.
pub const SYMPLECTIC_J: Mat2 = [[0.0, 1.0], [-1.0, 0.0]];

const DET_TOL: f64 = 1e-12;

pub(crate) fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub(crate) fn mul2(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

pub(crate) fn transpose2(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub(crate) fn trace2(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

pub(crate) fn quad2(x: &[f64; 2], m: &Mat2, y: &[f64; 2]) -> f64 {
    x[0] * (m[0][0] * y[0] + m[0][1] * y[1]) + x[1] * (m[1][0] * y[0] + m[1][1] * y[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    v: SymMatrix,
}

impl CovarianceMatrix {
    pub fn new(v: SymMatrix) -> Result<Self> {
        if v.dim() != 4 {
            return Err(Error::Dimension(format!("covariance matrix must be 4×4, got {0}×{0}", v.dim())));
        }
        if let Some(i) = (0..4).find(|&i| v.get(i, i).is_nan() || v.get(i, i) <= 0.0) {
            return Err(Error::InvalidCovariance(format!("diagonal entry {i} is {} (must be > 0)", v.get(i, i))));
        }
        if v.entries().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCovariance("entries must be finite".into()));
        }
        Ok(Self { v })
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(rows)?)
    }

    /// The standard-form matrix `V₀` of `(a, b, c₁, c₂)`.
    pub fn from_standard_form(sf: &StandardForm) -> Self {
        let (a, b, c1, c2) = (sf.a(), sf.b(), sf.c1(), sf.c2());
        Self::from_rows([[a, 0.0, c1, 0.0], [0.0, a, 0.0, c2], [c1, 0.0, b, 0.0], [0.0, c2, 0.0, b]])
            .expect("standard form has positive diagonal")
    }

    pub fn vacuum() -> Self {
        Self::new(SymMatrix::from_diag(&[0.5; 4]).unwrap()).unwrap()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.v
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.v.get(i, j)
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.v.get(i, j);
            }
        }
        r
    }

    fn block(&self, r0: usize, c0: usize) -> Mat2 {
        [[self.v.get(r0, c0), self.v.get(r0, c0 + 1)], [self.v.get(r0 + 1, c0), self.v.get(r0 + 1, c0 + 1)]]
    }

    pub fn block_a(&self) -> Mat2 {
        self.block(0, 0)
    }

    pub fn block_b(&self) -> Mat2 {
        self.block(2, 2)
    }

    pub fn block_c(&self) -> Mat2 {
        self.block(0, 2)
    }

    pub fn det(&self) -> f64 {
        let m = self.rows();
        // Laplace expansion in 2×2 minors of the first two rows.
        let minor = |r: usize, i: usize, j: usize| m[r][i] * m[r + 1][j] - m[r][j] * m[r + 1][i];
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut det = 0.0;
        for &(i, j) in &pairs {
            let (k, l) = match (i, j) {
                (0, 1) => (2, 3),
                (0, 2) => (1, 3),
                (0, 3) => (1, 2),
                (1, 2) => (0, 3),
                (1, 3) => (0, 2),
                _ => (0, 1),
            };
            let sign = if (i + j) % 2 == 1 { 1.0 } else { -1.0 };
            det += sign * minor(0, i, j) * minor(2, k, l);
        }
        det
    }

    /// The four local symplectic invariants `(det A, det B, det C, det V)`.
    pub fn local_invariants(&self) -> [f64; 4] {
        [det2(&self.block_a()), det2(&self.block_b()), det2(&self.block_c()), self.det()]
    }
}

/// `(a, b, c₁, c₂)` with `c₁ ≥ |c₂|`; the sign of `c₁c₂` lives on `c₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStandardForm", into = "RawStandardForm")]
pub struct StandardForm {
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawStandardForm {
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
}

impl TryFrom<RawStandardForm> for StandardForm {
    type Error = Error;
    fn try_from(r: RawStandardForm) -> Result<Self> {
        StandardForm::new(r.a, r.b, r.c1, r.c2)
    }
}

impl From<StandardForm> for RawStandardForm {
    fn from(s: StandardForm) -> Self {
        RawStandardForm { a: s.a, b: s.b, c1: s.c1, c2: s.c2 }
    }
}

impl StandardForm {
    /// Canonicalizes the correlations: the larger magnitude becomes `c1 ≥ 0`
    /// and `c2` carries `sign(c₁c₂)`.
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        if ![a, b, c1, c2].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter("standard form entries must be finite".into()));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!("a and b must be positive, got a = {a}, b = {b}")));
        }
        let (m1, m2) = if c1.abs() >= c2.abs() { (c1.abs(), c2.abs()) } else { (c2.abs(), c1.abs()) };
        let negative = (c1 < 0.0) != (c2 < 0.0) && c1 != 0.0 && c2 != 0.0;
        let c2 = if negative { -m2 } else { m2 };
        Ok(Self { a, b, c1: m1, c2 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Ratio `|c₂|/|c₁|` in `[0, 1]`, taken as 0 when `c₁ = 0`.
    pub fn t(&self) -> f64 {
        if self.c1 == 0.0 {
            0.0
        } else {
            (self.c2.abs() / self.c1).min(1.0)
        }
    }

    pub fn to_covariance(&self) -> CovarianceMatrix {
        CovarianceMatrix::from_standard_form(self)
    }
}

/// A pair of single-mode symplectic matrices acting as `S₁ ⊕ S₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSymplectic {
    s1: Mat2,
    s2: Mat2,
}

impl LocalSymplectic {
    pub fn new(s1: Mat2, s2: Mat2) -> Result<Self> {
        for (name, s) in [("S1", &s1), ("S2", &s2)] {
            let d = det2(s);
            if (d - 1.0).abs() > DET_TOL {
                return Err(Error::InvalidParameter(format!("{name} has determinant {d}, expected 1")));
            }
        }
        Ok(Self { s1, s2 })
    }

    pub fn identity() -> Self {
        let i = [[1.0, 0.0], [0.0, 1.0]];
        Self { s1: i, s2: i }
    }

    pub fn s1(&self) -> Mat2 {
        self.s1
    }

    pub fn s2(&self) -> Mat2 {
        self.s2
    }

    fn direct_sum(&self) -> [f64; 16] {
        let mut m = [0.0; 16];
        for i in 0..2 {
            for j in 0..2 {
                m[i * 4 + j] = self.s1[i][j];
                m[(i + 2) * 4 + (j + 2)] = self.s2[i][j];
            }
        }
        m
    }
}

/// Diagonal squeezing parameters `(r₁, r₂)`, both at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r1: f64,
    pub r2: f64,
}

/// Rounding slack admitted below `r = 1`.
pub const SQUEEZE_SLACK: f64 = 1e-12;

impl SqueezeParams {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 >= 1.0 - SQUEEZE_SLACK && r2 >= 1.0 - SQUEEZE_SLACK) || !r1.is_finite() || !r2.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing parameters must be ≥ 1, got ({r1}, {r2})")));
        }
        Ok(Self { r1, r2 })
    }
}

pub(crate) fn symplectic_form(ppt: bool) -> AntiSymMatrix {
    let s = if ppt { -0.5 } else { 0.5 };
    #[rustfmt::skip]
    let y = [
        0.0, 0.5, 0.0, 0.0,
        -0.5, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, s,
        0.0, 0.0, -s, 0.0,
    ];
    AntiSymMatrix::new(4, &y).unwrap()
}

/// Minimum eigenvalue of `V + (i/2)(J ⊕ ±J)`; the minus sign on the second
/// block is the partial transpose.
pub fn uncertainty_min_eigenvalue(v: &CovarianceMatrix, ppt: bool) -> f64 {
    linalg::hermitian_min_eigenvalue(&v.v, &symplectic_form(ppt)).expect("4×4 blocks")
}

/// `V + (i/2)(J ⊕ J) ≥ 0` (physicality) or, with `ppt`, the same with the
/// second block flipped (positivity under partial transposition).
pub fn uncertainty_check(v: &CovarianceMatrix, ppt: bool, tol: f64) -> bool {
    linalg::hermitian_psd(&v.v, &symplectic_form(ppt), tol).expect("4×4 blocks")
}

/// `(S₁ ⊕ S₂) V (S₁ ⊕ S₂)ᵀ`.
pub fn apply_local_symplectic(v: &CovarianceMatrix, s: &LocalSymplectic) -> CovarianceMatrix {
    let m = v.v.conjugate(&s.direct_sum()).expect("4×4");
    CovarianceMatrix::new(m).expect("congruence by an invertible matrix keeps the diagonal positive")
}

/// Reduces `V` to its standard form through the local invariants.
///
/// `c₁² + c₂²` is taken from the invariant `tr(AJCJBJCᵀJ) = ab(c₁² + c₂²)`
/// and `c₁²c₂² = (det C)²`, so no iterative decomposition is needed.
pub fn to_standard_form(v: &CovarianceMatrix, tol: f64) -> Result<StandardForm> {
    let (a_blk, b_blk, c_blk) = (v.block_a(), v.block_b(), v.block_c());
    let det_a = det2(&a_blk);
    let det_b = det2(&b_blk);
    if !(det_a > 0.0 && det_b > 0.0) {
        return Err(Error::NonPhysicalBlocks { det_a, det_b });
    }
    let a = det_a.sqrt();
    let b = det_b.sqrt();
    let det_c = det2(&c_blk);

    let j = SYMPLECTIC_J;
    let chain = [a_blk, j, c_blk, j, b_blk, j, transpose2(&c_blk), j];
    let product = chain[1..].iter().fold(chain[0], |acc, m| mul2(&acc, m));
    let sum = trace2(&product) / (a * b);

    let scale = 1.0 + sum.abs();
    if sum < -tol * scale {
        return Err(Error::InconsistentInvariants(format!("c1² + c2² = {sum} is negative")));
    }
    let sum = sum.max(0.0);
    let prod = det_c * det_c;
    let disc = sum * sum - 4.0 * prod;
    if disc < -tol * scale * scale {
        return Err(Error::InconsistentInvariants(format!("negative discriminant {disc}")));
    }
    let larger = 0.5 * (sum + disc.max(0.0).sqrt());
    let smaller = if larger > 0.0 { prod / larger } else { 0.0 };
    let c1 = larger.sqrt();
    let c2 = smaller.sqrt().min(c1);
    let c2 = if det_c < 0.0 { -c2 } else { c2 };
    StandardForm::new(a, b, c1, c2)
}

/// `diag(1/r₁, r₁, 1/r₂, r₂)`.
pub fn squeeze_gram(r: &SqueezeParams) -> SymMatrix {
    SymMatrix::from_diag(&[1.0 / r.r1, r.r1, 1.0 / r.r2, r.r2]).unwrap()
}
