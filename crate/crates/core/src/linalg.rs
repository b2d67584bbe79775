//! Decompositions backed by `nalgebra`: Hermitian eigensystems, SVD, QR,
//! plus the Schmidt decomposition and Uhlmann fidelity built on them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{permute_tensor, ComplexMatrix, DensityOperator, StateVector, C64};

/// Eigenvalues below this are clamped to zero when taking square roots.
pub const SQRT_CLAMP: f64 = 1e-12;

pub(crate) fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub(crate) fn from_na(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns the eigenvalues and a matrix whose columns are the matching
/// orthonormal eigenvectors. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = to_na(&m.hermitian_part()).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(&m.hermitian_part())
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Number of eigenvalues of a Hermitian matrix above `tol`.
pub fn hermitian_rank(m: &ComplexMatrix, tol: f64) -> usize {
    hermitian_eigenvalues(m)
        .iter()
        .filter(|&&x| x > tol)
        .count()
}

/// Square root of a positive semidefinite matrix; eigenvalues below
/// [`SQRT_CLAMP`] are treated as zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let roots: Vec<C64> = vals
        .iter()
        .map(|&x| C64::new(if x > SQRT_CLAMP { x.sqrt() } else { 0.0 }, 0.0))
        .collect();
    let scaled = &vecs * &ComplexMatrix::diagonal(&roots);
    &scaled * &vecs.adjoint()
}

/// Inverse square root on the support; eigenvalues below `tol` are dropped.
pub fn psd_inverse_sqrt(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let roots: Vec<C64> = vals
        .iter()
        .map(|&x| C64::new(if x > tol { 1.0 / x.sqrt() } else { 0.0 }, 0.0))
        .collect();
    let scaled = &vecs * &ComplexMatrix::diagonal(&roots);
    &scaled * &vecs.adjoint()
}

/// Thin SVD `m = U diag(s) V†`, singular values nonincreasing.
pub fn svd(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let s = to_na(m).svd(true, true);
    let u = s.u.expect("left vectors requested");
    let v_t = s.v_t.expect("right vectors requested");
    let mut order: Vec<usize> = (0..s.singular_values.len()).collect();
    order.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    let k = order.len();
    let values = order.iter().map(|&i| s.singular_values[i]).collect();
    let uu = ComplexMatrix::from_fn(u.nrows(), k, |i, j| u[(i, order[j])]);
    // columns of V = rows of V† conjugated
    let vv = ComplexMatrix::from_fn(v_t.ncols(), k, |i, j| v_t[(order[j], i)].conj());
    (uu, values, vv)
}

/// `m = Q R` with `Q` unitary (square input).
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let q = to_na(m).qr();
    (from_na(&q.q()), from_na(&q.r()))
}

pub fn determinant(m: &ComplexMatrix) -> C64 {
    to_na(m).determinant()
}

/// Schmidt coefficients and local bases of a bipartite pure state.
#[derive(Clone, Debug)]
pub struct SchmidtData {
    /// Nonincreasing `λ_i` summing to one (squares of the singular values).
    pub coefficients: Vec<f64>,
    /// Columns `|i_H⟩`.
    pub left_basis: ComplexMatrix,
    /// Columns `|i_K⟩`.
    pub right_basis: ComplexMatrix,
}

impl SchmidtData {
    /// `Σ √λ_i |i_H⟩ ⊗ |i_K⟩` in (left factors, right factors) order.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (dl, dr) = (self.left_basis.rows(), self.right_basis.rows());
        let mut out = vec![C64::new(0.0, 0.0); dl * dr];
        for (k, &lam) in self.coefficients.iter().enumerate() {
            let s = lam.sqrt();
            for a in 0..dl {
                let l = self.left_basis[(a, k)] * s;
                for b in 0..dr {
                    out[a * dr + b] += l * self.right_basis[(b, k)];
                }
            }
        }
        out
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&l| l > tol).count()
    }
}

/// Schmidt decomposition across `left | rest`, where `left` lists the factors
/// of the first party. Factors not in `left` form the second party.
pub fn schmidt_decompose(v: &StateVector, left: &[usize]) -> Result<SchmidtData> {
    let n = v.dims().len();
    let mut sorted = left.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty()
        || sorted.len() == n
        || sorted.len() != left.len()
        || sorted.iter().any(|&k| k >= n)
    {
        return Err(Error::InvalidSubsystems(format!(
            "split {left:?} does not define a bipartition of {n} factors"
        )));
    }
    let right: Vec<usize> = (0..n).filter(|k| !sorted.contains(k)).collect();
    let mut perm = sorted.clone();
    perm.extend(&right);
    let (amps, _) = permute_tensor(v.amplitudes(), v.dims(), &perm)?;
    let dl: usize = sorted.iter().map(|&k| v.dims()[k]).product();
    let dr: usize = right.iter().map(|&k| v.dims()[k]).product();
    let m = ComplexMatrix::new(dl, dr, amps)?;
    let (u, s, vv) = svd(&m);
    let total: f64 = s.iter().map(|x| x * x).sum();
    let coefficients = s.iter().map(|x| x * x / total).collect();
    Ok(SchmidtData {
        coefficients,
        left_basis: u,
        right_basis: vv.conj(),
    })
}

/// Uhlmann (root) fidelity `tr √(√σ ρ √σ)`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(fidelity_of_matrices(rho.matrix(), sigma.matrix()))
}

pub(crate) fn fidelity_of_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let s = psd_sqrt(sigma);
    let inner = &(&s * rho) * &s;
    let f: f64 = hermitian_eigenvalues(&inner)
        .iter()
        .map(|&x| if x > SQRT_CLAMP { x.sqrt() } else { 0.0 })
        .sum();
    f.clamp(0.0, 1.0)
}
