//! Small dense kernels for real symmetric matrices (n ≤ 8) and for Hermitian
//! matrices handled through their real symmetric embedding.

use crate::error::{Error, Result};

/// Largest dimension handled by the internal Jacobi solver (8×8 Hermitian
/// matrices embed into 16×16 real ones).
const MAX_DIM: usize = 16;
const MAX_SWEEPS: usize = 100;
const CONVERGENCE: f64 = 1e-14;

/// Real symmetric matrix of dimension 2, 4 or 8, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Real antisymmetric matrix, the imaginary part of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiSymMatrix {
    n: usize,
    data: Vec<f64>,
}

fn check_dim(n: usize, len: usize) -> Result<()> {
    if !matches!(n, 2 | 4 | 8) {
        return Err(Error::Dimension(format!("unsupported dimension {n}, expected 2, 4 or 8")));
    }
    if len != n * n {
        return Err(Error::Dimension(format!("expected {} entries for a {n}×{n} matrix, got {len}", n * n)));
    }
    Ok(())
}

impl SymMatrix {
    /// Builds a symmetric matrix from row-major entries, replacing each
    /// off-diagonal pair by its mean.
    pub fn new(n: usize, entries: &[f64]) -> Result<Self> {
        check_dim(n, entries.len())?;
        let mut data = entries.to_vec();
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                data[i * n + j] = m;
                data[j * n + i] = m;
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Result<Self> {
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(N, &flat)
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self::new(n, &data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &SymMatrix, alpha: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Dimension(format!("cannot add {}×{} to {}×{}", other.n, other.n, self.n, self.n)));
        }
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x + alpha * y).collect();
        Ok(Self { n: self.n, data })
    }

    /// `Q M Qᵀ` for a square `Q` of the same dimension (row-major).
    pub fn conjugate(&self, q: &[f64]) -> Result<Self> {
        let n = self.n;
        if q.len() != n * n {
            return Err(Error::Dimension(format!("conjugating matrix must have {} entries", n * n)));
        }
        let mut qm = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let qik = q[i * n + k];
                if qik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    qm[i * n + j] += qik * self.data[k * n + j];
                }
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| qm[i * n + k] * q[j * n + k]).sum();
            }
        }
        Self::new(n, &out)
    }
}

impl AntiSymMatrix {
    /// Builds an antisymmetric matrix from row-major entries, keeping the
    /// antisymmetric part `(Y - Yᵀ)/2`.
    pub fn new(n: usize, entries: &[f64]) -> Result<Self> {
        check_dim(n, entries.len())?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * (entries[i * n + j] - entries[j * n + i]);
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, &vec![0.0; n * n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// Cyclic Jacobi diagonalization of a dense symmetric `n×n` buffer.
///
/// Returns eigenvalues in ascending order and, when requested, the matching
/// eigenvectors as rows.
fn jacobi(n: usize, mut a: Vec<f64>, want_vectors: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert!(n <= MAX_DIM && a.len() == n * n);
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    } else {
        Vec::new()
    };

    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = CONVERGENCE * norm;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged && off(&a) > threshold {
        // Jacobi always converges on symmetric input; reaching this is a bug.
        panic!("Jacobi eigen-solver exceeded {MAX_SWEEPS} sweeps");
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors =
        if want_vectors { order.iter().map(|&j| (0..n).map(|k| v[k * n + j]).collect()).collect() } else { Vec::new() };
    (values, vectors)
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// # Panics
///
/// Panics if the Jacobi iteration fails to converge within 100 sweeps, which
/// cannot happen for finite symmetric input.
pub fn sym_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    jacobi(m.n, m.data.clone(), false).0
}

/// Eigenvalues (ascending) with unit eigenvectors, one per row.
pub fn sym_eigen(m: &SymMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    jacobi(m.n, m.data.clone(), true)
}

fn psd_from_spectrum(spectrum: &[f64], tol: f64) -> bool {
    let min = spectrum[0];
    let max = spectrum[spectrum.len() - 1];
    min >= -tol * (1.0 + max.abs())
}

/// Positive semidefiniteness with a relative tolerance: the minimum
/// eigenvalue must be at least `-tol * (1 + |λ_max|)`.
pub fn is_psd(m: &SymMatrix, tol: f64) -> bool {
    psd_from_spectrum(&sym_eigenvalues(m), tol)
}

/// Real symmetric embedding `[[X, -Y], [Y, X]]` of the Hermitian matrix `X + iY`.
fn embedding(x: &SymMatrix, y: &AntiSymMatrix) -> Result<(usize, Vec<f64>)> {
    if x.n != y.n {
        return Err(Error::Dimension(format!("real part is {}×{} but imaginary part is {}×{}", x.n, x.n, y.n, y.n)));
    }
    let n = x.n;
    let m = 2 * n;
    let mut e = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let xv = x.get(i, j);
            let yv = y.get(i, j);
            e[i * m + j] = xv;
            e[(i + n) * m + (j + n)] = xv;
            e[i * m + (j + n)] = -yv;
            e[(i + n) * m + j] = yv;
        }
    }
    Ok((m, e))
}

/// Spectrum of the real embedding of `X + iY`: every eigenvalue of the
/// Hermitian matrix appears twice.
pub fn hermitian_embedding_spectrum(x: &SymMatrix, y: &AntiSymMatrix) -> Result<Vec<f64>> {
    let (m, e) = embedding(x, y)?;
    Ok(jacobi(m, e, false).0)
}

/// Real and imaginary parts of a complex vector.
pub type ComplexVector = (Vec<f64>, Vec<f64>);

/// Eigenvalues of `X + iY` (ascending, each listed once) with complex
/// eigenvectors returned as `(real part, imaginary part)`.
pub fn hermitian_eigen(x: &SymMatrix, y: &AntiSymMatrix) -> Result<(Vec<f64>, Vec<ComplexVector>)> {
    let (m, e) = embedding(x, y)?;
    let n = x.n;
    let (values, vectors) = jacobi(m, e, true);
    // The embedding vector (u, w) maps to u + i w; pairs (u, w) and (-w, u)
    // describe the same complex line, so every other entry is kept.
    let vals = values.iter().step_by(2).copied().collect();
    let vecs = vectors.iter().step_by(2).map(|v| (v[..n].to_vec(), v[n..].to_vec())).collect();
    Ok((vals, vecs))
}

/// Decides `X + iY ≥ 0` through the real embedding, with the same relative
/// tolerance as [`is_psd`].
pub fn hermitian_psd(x: &SymMatrix, y: &AntiSymMatrix, tol: f64) -> Result<bool> {
    Ok(psd_from_spectrum(&hermitian_embedding_spectrum(x, y)?, tol))
}

/// Minimum eigenvalue of `X + iY`.
pub fn hermitian_min_eigenvalue(x: &SymMatrix, y: &AntiSymMatrix) -> Result<f64> {
    Ok(hermitian_embedding_spectrum(x, y)?[0])
}
