//! Small dense linear-algebra helpers shared by the quantum modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type CVector = DVector<Complex64>;
pub(crate) type CMatrix = DMatrix<Complex64>;

/// Largest number of complex amplitudes any routine will materialize.
pub const MAX_AMPLITUDES: usize = 1_000_000;

pub(crate) fn guard(amplitudes: usize) -> Result<()> {
    if amplitudes > MAX_AMPLITUDES {
        return Err(Error::DimensionGuard {
            amplitudes,
            limit: MAX_AMPLITUDES,
        });
    }
    Ok(())
}

/// Shannon entropy in bits; negative entries are clipped and `0 log 0 = 0`.
pub fn entropy_bits(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights
        .into_iter()
        .map(|w| w.max(0.0))
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Eigenvalues of a real symmetric matrix, sorted descending.
pub(crate) fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigenpairs of a Hermitian matrix with eigenvalue above `tol`, largest first.
pub(crate) fn hermitian_eigenpairs(m: &CMatrix, tol: f64) -> Vec<(f64, CVector)> {
    let eig = m.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > tol)
        .map(|(k, &l)| (l, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

pub(crate) fn kron(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, &u) in a.iter().enumerate() {
        for (j, &v) in b.iter().enumerate() {
            out[i * b.len() + j] = u * v;
        }
    }
    out
}

pub(crate) fn basis(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// `|<a|b>|^2` for normalized vectors.
pub(crate) fn fidelity(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}

/// Max-abs deviation of `m^† m` from the identity.
pub(crate) fn isometry_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let id = CMatrix::identity(g.nrows(), g.ncols());
    (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Reduced density matrix of factor `keep` when `psi` lives on a tensor
/// product of `dims` (first factor most significant).
pub(crate) fn reduced_density(psi: &CVector, dims: &[usize], keep: usize) -> CMatrix {
    let d = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let mut rho = CMatrix::zeros(d, d);
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..d {
                let pa = psi[(o * d + a) * inner + i];
                if pa.norm_sqr() == 0.0 {
                    continue;
                }
                for b in 0..d {
                    let pb = psi[(o * d + b) * inner + i];
                    rho[(a, b)] += pa * pb.conj();
                }
            }
        }
    }
    rho
}

/// Orthonormal combinations of `sources`: returns the coefficient rows `c`
/// with `a_m = Σ_j c[m][j] sources_j` orthonormal, skipping vectors whose
/// residual norm falls below `tol`.
fn gram_schmidt_coefficients(sources: &[CVector], tol: f64) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<CVector> = Vec::new();
    let mut coeffs: Vec<Vec<Complex64>> = Vec::new();
    let n = sources.len();
    for (j, s) in sources.iter().enumerate() {
        let mut v = s.clone();
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[j] = Complex64::new(1.0, 0.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for (b, cb) in basis.iter().zip(&coeffs) {
                let proj = b.dotc(&v);
                v -= b * proj;
                for (ci, bi) in c.iter_mut().zip(cb) {
                    *ci -= proj * bi;
                }
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / Complex64::new(norm, 0.0));
            coeffs.push(c.into_iter().map(|z| z / norm).collect());
        }
    }
    coeffs
}

fn combine(vectors: &[CVector], coeffs: &[Complex64]) -> CVector {
    let mut out = CVector::zeros(vectors[0].len());
    for (v, &c) in vectors.iter().zip(coeffs) {
        if c.norm_sqr() > 0.0 {
            out += v * c;
        }
    }
    out
}

fn gram(vectors: &[CVector]) -> CMatrix {
    CMatrix::from_fn(vectors.len(), vectors.len(), |i, j| {
        vectors[i].dotc(&vectors[j])
    })
}

/// Orthonormal bases `(A, B)` of `span{sources}` and `span{targets}` such
/// that the map `A_m -> B_m` sends each source to its target. Requires equal
/// Gram matrices.
fn paired_bases(
    sources: &[CVector],
    targets: &[CVector],
    tol: f64,
) -> Result<(Vec<CVector>, Vec<CVector>)> {
    if sources.len() != targets.len() || sources.is_empty() {
        return Err(Error::NumericalRankFailure(
            "source and target families differ in size".into(),
        ));
    }
    let defect = (gram(sources) - gram(targets))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > 1e-9 {
        return Err(Error::NumericalRankFailure(format!(
            "source and target overlaps differ by {defect:.3e}"
        )));
    }
    let coeffs = gram_schmidt_coefficients(sources, tol);
    let a: Vec<CVector> = coeffs.iter().map(|c| combine(sources, c)).collect();
    let b: Vec<CVector> = coeffs.iter().map(|c| combine(targets, c)).collect();
    Ok((a, b))
}

/// Isometry (`target_dim × source_dim`) sending every source to its target.
/// Defined on the span of the sources and zero on its complement.
pub(crate) fn span_map(sources: &[CVector], targets: &[CVector], tol: f64) -> Result<CMatrix> {
    let (a, b) = paired_bases(sources, targets, tol)?;
    let mut m = CMatrix::zeros(targets[0].len(), sources[0].len());
    for (am, bm) in a.iter().zip(&b) {
        m += bm * am.adjoint();
    }
    Ok(m)
}

/// Extends orthonormal `vectors` in dimension `dim` to a full orthonormal basis.
fn complete_basis(mut vectors: Vec<CVector>, dim: usize) -> Result<Vec<CVector>> {
    for k in 0..dim {
        if vectors.len() == dim {
            break;
        }
        let mut v = basis(dim, k);
        for _ in 0..2 {
            for b in &vectors {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            vectors.push(v / Complex64::new(norm, 0.0));
        }
    }
    if vectors.len() != dim {
        return Err(Error::NumericalRankFailure(format!(
            "basis completion produced {} of {dim} vectors",
            vectors.len()
        )));
    }
    Ok(vectors)
}

/// Unitary on a `dim`-dimensional space sending every source to its target.
pub(crate) fn unitary_completion(
    sources: &[CVector],
    targets: &[CVector],
    tol: f64,
) -> Result<CMatrix> {
    let dim = sources[0].len();
    if targets[0].len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: targets[0].len(),
        });
    }
    guard(dim * dim)?;
    let (a, b) = paired_bases(sources, targets, tol)?;
    let a = complete_basis(a, dim)?;
    let b = complete_basis(b, dim)?;
    let mut u = CMatrix::zeros(dim, dim);
    for (am, bm) in a.iter().zip(&b) {
        u += bm * am.adjoint();
    }
    let defect = isometry_defect(&u);
    if defect > 1e-9 {
        return Err(Error::NumericalRankFailure(format!(
            "completed operator deviates from unitarity by {defect:.3e}"
        )));
    }
    Ok(u)
}
