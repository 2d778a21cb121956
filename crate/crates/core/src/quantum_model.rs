//! Quantum causal states and the quantum memory cost `Q_X`.
//!
//! Causal state `s_i` is assigned the pure state
//! `|s_i> = ⊗_x Σ_{y,k} sqrt(T[i][x][y][k]) |y>|k>`. Only the overlaps of these
//! states matter for memory: they span at most `n` dimensions, so everything
//! here works with the `n × n` Gram matrix and its compressed vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical_analysis::{occupancy, StationaryOccupancy};
use crate::error::{Error, Result};
use crate::linalg::{entropy_bits, sym_eigenvalues, CMatrix, CVector};
use crate::process_model::{InputDistribution, TransducerSpec, EPS_PROB};

/// Eigenvalues below this are treated as zero when fixing the rank.
pub const RANK_TOL: f64 = 1e-9;

/// `<s_i|s_j> = Π_x Σ_{y,k} sqrt(T[i][x][y][k] T[j][x][y][k])`.
pub fn quantum_overlap(spec: &TransducerSpec, i: usize, j: usize) -> f64 {
    (0..spec.n_inputs())
        .map(|x| {
            let mut s = 0.0;
            for y in 0..spec.n_outputs() {
                for k in 0..spec.n_states() {
                    s += (spec.prob(i, x, y, k) * spec.prob(j, x, y, k)).sqrt();
                }
            }
            s
        })
        .product()
}

/// Overlaps of the quantum causal states.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    /// Checks symmetry, unit diagonal and positive semidefiniteness.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.ncols(),
            });
        }
        for i in 0..n {
            if (entries[(i, i)] - 1.0).abs() > 1e-9 {
                return Err(Error::NotPsd(entries[(i, i)]));
            }
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 {
                    return Err(Error::NotPsd(f64::NAN));
                }
            }
        }
        let min = sym_eigenvalues(&entries).last().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn rank(&self) -> usize {
        sym_eigenvalues(&self.entries)
            .into_iter()
            .filter(|&l| l > RANK_TOL)
            .count()
    }
}

pub fn gram_matrix(spec: &TransducerSpec) -> Result<GramMatrix> {
    let n = spec.n_states();
    let mut g = DMatrix::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let o = quantum_overlap(spec, i, j);
            g[(i, j)] = o;
            g[(j, i)] = o;
        }
    }
    GramMatrix::new(g)
}

/// Vectors `τ_i` in a `rank(G)`-dimensional space with `<τ_i|τ_j> = G_ij`,
/// stored as the columns of a `rank × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedStates {
    vectors: CMatrix,
}

impl CompressedStates {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.vectors
    }

    /// Overlaps reproduced by the vectors.
    pub fn gram(&self) -> DMatrix<f64> {
        (self.vectors.adjoint() * &self.vectors).map(|z| z.re)
    }
}

/// Builds compressed causal states.
///
/// The rank and a first factor come from the eigendecomposition of `G`
/// (eigenvalues below [`RANK_TOL`] dropped). The factor is then rotated into
/// upper-trapezoidal form by a QR step, which gives the same vectors as
/// Gram-Schmidt on the states in index order: `τ_0 = (1, 0, ...)`, `τ_1` in
/// the first two coordinates, and so on, each pivot positive.
pub fn compressed_states(g: &GramMatrix) -> CompressedStates {
    let n = g.len();
    let eig = g.entries.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > RANK_TOL)
        .collect();
    let r = kept.len().max(1);
    let mut factor = DMatrix::<f64>::zeros(r, n);
    for (row, &k) in kept.iter().enumerate() {
        let scale = eig.eigenvalues[k].sqrt();
        for i in 0..n {
            factor[(row, i)] = scale * eig.eigenvectors[(i, k)];
        }
    }
    let mut tri = if r <= n { factor.qr().r() } else { factor };
    for mut row in tri.row_iter_mut() {
        if let Some(pivot) = row.iter().copied().find(|v| v.abs() > 1e-12) {
            if pivot < 0.0 {
                row.neg_mut();
            }
        }
    }
    CompressedStates {
        vectors: tri.map(|a| Complex64::new(a, 0.0)),
    }
}

/// `ρ_X = Σ_i p_X(i) |τ_i><τ_i|` on the compressed space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .rho
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Von Neumann entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(self.eigenvalues())
    }
}

pub fn density_matrix(g: &GramMatrix, occ: &StationaryOccupancy) -> Result<DensityMatrix> {
    if occ.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: occ.len(),
        });
    }
    let tau = compressed_states(g);
    let mut rho = CMatrix::zeros(tau.dim(), tau.dim());
    for (i, &p) in occ.probs().iter().enumerate() {
        let v = tau.vector(i);
        rho += &v * v.adjoint() * Complex64::new(p, 0.0);
    }
    Ok(DensityMatrix { rho })
}

/// `Q_X` from an occupancy: entropy of `sqrt(p_i p_j) G_ij`, which has the
/// same non-zero spectrum as `ρ_X`.
pub fn quantum_complexity_from(g: &GramMatrix, occ: &StationaryOccupancy) -> Result<f64> {
    if occ.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: occ.len(),
        });
    }
    let p = occ.probs();
    let n = g.len();
    let w = DMatrix::from_fn(n, n, |i, j| (p[i] * p[j]).sqrt() * g.get(i, j));
    Ok(entropy_bits(sym_eigenvalues(&w)))
}

/// Input-dependent quantum complexity `Q_X` in bits.
pub fn quantum_complexity(spec: &TransducerSpec, dist: &InputDistribution) -> Result<f64> {
    let occ = occupancy(spec, dist)?;
    quantum_complexity_from(&gram_matrix(spec)?, &occ)
}

/// True when all quantum causal states are mutually orthogonal.
pub fn condition_i_orthogonal(spec: &TransducerSpec) -> bool {
    let n = spec.n_states();
    (0..n).all(|i| (i + 1..n).all(|j| quantum_overlap(spec, i, j) <= EPS_PROB))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Memory {
    Classical,
    Quantum,
}

impl std::str::FromStr for Memory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Memory::Classical),
            "quantum" => Ok(Memory::Quantum),
            other => Err(Error::Parse(format!(
                "expected classical|quantum, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralComplexity {
    pub value_bits: f64,
    pub argmax: InputDistribution,
}

/// Default number of grid steps per simplex coordinate.
pub const DEFAULT_RESOLUTION: usize = 64;

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Supremum of `C_X` or `Q_X` over IID inputs.
///
/// Every point of the simplex grid with `resolution` steps per coordinate is
/// evaluated (points with a reducible induced chain are skipped), then the
/// best point is polished by a compass search that moves probability mass
/// between pairs of inputs with halving step sizes. This is a lower bound on
/// the supremum over all stationary input processes.
pub fn structural_complexity(
    spec: &TransducerSpec,
    which: Memory,
    resolution: usize,
) -> Result<StructuralComplexity> {
    if resolution == 0 {
        return Err(Error::InvalidDistribution(
            "grid resolution must be positive".into(),
        ));
    }
    let gram = match which {
        Memory::Quantum => Some(gram_matrix(spec)?),
        Memory::Classical => None,
    };
    let objective = |u: &[f64]| -> Option<f64> {
        let dist = InputDistribution::from_probs(u.to_vec()).ok()?;
        let occ = occupancy(spec, &dist).ok()?;
        match &gram {
            Some(g) => quantum_complexity_from(g, &occ).ok(),
            None => Some(occ.entropy_bits()),
        }
    };

    let grid = compositions(resolution, spec.n_inputs());
    let scores: Vec<Option<f64>> = grid
        .par_iter()
        .map(|c| {
            let u: Vec<f64> = c.iter().map(|&k| k as f64 / resolution as f64).collect();
            objective(&u)
        })
        .collect();
    // first maximum in grid order, so ties resolve deterministically
    let (best_idx, mut best) = scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|v| (i, v)))
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((i, v)),
        })
        .ok_or(Error::ReducibleChain)?;
    let mut u: Vec<f64> = grid[best_idx]
        .iter()
        .map(|&k| k as f64 / resolution as f64)
        .collect();

    let k = u.len();
    let mut step = 0.5 / resolution as f64;
    while step > 1e-9 {
        let mut improved = false;
        'moves: for a in 0..k {
            for b in 0..k {
                if a == b || u[b] < step {
                    continue;
                }
                let mut cand = u.clone();
                cand[a] += step;
                cand[b] -= step;
                if let Some(v) = objective(&cand) {
                    if v > best + 1e-15 {
                        best = v;
                        u = cand;
                        improved = true;
                        break 'moves;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let total: f64 = u.iter().sum();
    u.iter_mut().for_each(|p| *p /= total);
    Ok(StructuralComplexity {
        value_bits: best,
        argmax: InputDistribution::from_probs(u)?,
    })
}
