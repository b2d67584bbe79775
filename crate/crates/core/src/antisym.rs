//! Wedge vectors, the antisymmetrizer isometries `A_n : (C^d)^{⊗n} → (C^d)^{⊗(d−n)}`,
//! the indexed operators `A^{n;m}_w` and projectors onto antisymmetric subspaces.
//!
//! Basis labels are 0-based: the wedge `|∧_{1,2}⟩` of 1-based notation is
//! `WedgeIndex::new(d, vec![0, 1])` here.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, combinations, factorial, permutation_sign, permutations, tuple_index,
};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, StateVector, C64, ZERO};

/// Largest `d` for which `A_n` is built densely.
pub const MAX_ANTISYM_DIM: usize = 6;
/// Largest operator side built densely.
pub const MAX_DENSE_SIDE: usize = 4096;

/// Strictly increasing list of basis labels in `0..d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeIndex {
    d: usize,
    indices: Vec<usize>,
}

impl WedgeIndex {
    pub fn new(d: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidWedge("empty index list".into()));
        }
        if indices.len() > d {
            return Err(Error::InvalidWedge(format!(
                "{} indices exceed d = {d}",
                indices.len()
            )));
        }
        if indices.iter().any(|&i| i >= d) {
            return Err(Error::InvalidWedge(format!(
                "{indices:?} out of range 0..{d}"
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidWedge(format!(
                "{indices:?} is not strictly increasing"
            )));
        }
        Ok(Self { d, indices })
    }

    /// `(0, 1, …, d−1)`.
    pub fn full(d: usize) -> Result<Self> {
        Self::new(d, (0..d).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `|∧_w⟩ = (1/√m!) Σ_τ sgn(τ) |w_{τ(1)} … w_{τ(m)}⟩` over `m = |w|` factors of `C^d`.
pub fn wedge_vector(w: &WedgeIndex) -> StateVector {
    let m = w.len();
    let d = w.d();
    let mut amps = vec![ZERO; d.pow(m as u32)];
    let norm = 1.0 / factorial(m).sqrt();
    for tau in permutations(m) {
        let idx = tuple_index(tau.iter().map(|&t| w.indices[t]), d);
        amps[idx] += C64::new(permutation_sign(&tau) as f64 * norm, 0.0);
    }
    StateVector::new(vec![d; m], amps).expect("wedge vectors are normalized")
}

/// The isometry `A_n` together with its defining parameters.
#[derive(Clone, Debug)]
pub struct Antisymmetrizer {
    d: usize,
    n: usize,
    matrix: ComplexMatrix,
}

impl Antisymmetrizer {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of output copies, `d − n`.
    pub fn m(&self) -> usize {
        self.d - self.n
    }

    /// `d^{d−n} × d^n` matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `P_{Λ^n}`, the domain on which `A_n` is isometric.
    pub fn domain_projector(&self) -> ComplexMatrix {
        antisym_projector(self.d, self.n)
            .expect("valid by construction")
            .matrix
    }

    /// `P_{Λ^{d−n}} = A_n A_n†`.
    pub fn range_projector(&self) -> ComplexMatrix {
        &self.matrix * &self.matrix.adjoint()
    }
}

fn check_antisym_params(d: usize, n: usize) -> Result<()> {
    if d < 2 || n == 0 || n >= d {
        return Err(Error::OutOfRange(format!(
            "antisymmetrizer needs 1 <= n <= d-1, got d = {d}, n = {n}"
        )));
    }
    if d > MAX_ANTISYM_DIM {
        return Err(Error::TooLarge(format!(
            "dense antisymmetrizer capped at d <= {MAX_ANTISYM_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// `A_n = (1/√((d−n)! n!)) Σ_{π∈S_d} sgn(π) |π_{n+1} … π_d⟩⟨π_1 … π_n|`.
pub fn antisymmetrizer(d: usize, n: usize) -> Result<Antisymmetrizer> {
    check_antisym_params(d, n)?;
    let m = d - n;
    let mut matrix = ComplexMatrix::zeros(d.pow(m as u32), d.pow(n as u32));
    let norm = 1.0 / (factorial(m) * factorial(n)).sqrt();
    for pi in permutations(d) {
        let row = tuple_index(pi[n..].iter().copied(), d);
        let col = tuple_index(pi[..n].iter().copied(), d);
        matrix[(row, col)] += C64::new(permutation_sign(&pi) as f64 * norm, 0.0);
    }
    Ok(Antisymmetrizer { d, n, matrix })
}

/// `A_n` assembled from wedge vectors over order-preserving shuffles `ν`:
/// `Σ_ν (−1)^{n(n+1)/2 + Σ_k ν_k} |∧_{ν_{n+1..d}}⟩⟨∧_{ν_{1..n}}|` (1-based `ν_k`).
pub fn antisymmetrizer_from_wedges(d: usize, n: usize) -> Result<Antisymmetrizer> {
    check_antisym_params(d, n)?;
    let m = d - n;
    let mut matrix = ComplexMatrix::zeros(d.pow(m as u32), d.pow(n as u32));
    for head in combinations(d, n) {
        let tail: Vec<usize> = (0..d).filter(|i| !head.contains(i)).collect();
        let exponent = n * (n + 1) / 2 + head.iter().map(|&v| v + 1).sum::<usize>();
        let sign = if exponent.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let out = wedge_vector(&WedgeIndex::new(d, tail)?);
        let inp = wedge_vector(&WedgeIndex::new(d, head)?);
        matrix.add_scaled(
            &ComplexMatrix::outer(out.amplitudes(), inp.amplitudes()),
            C64::new(sign, 0.0),
        );
    }
    Ok(Antisymmetrizer { d, n, matrix })
}

/// `A^{n;m}_w = (1/√((n+m)!)) Σ_{π∈S_{n+m}} sgn(π) |w_{π(n+1)} … w_{π(n+m)}⟩⟨w_{π(1)} … w_{π(n)}|`,
/// a `d^m × d^n` matrix.
pub fn indexed_antisymmetrizer(
    d: usize,
    n: usize,
    m: usize,
    w: &WedgeIndex,
) -> Result<ComplexMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange(format!(
            "n = {n}, m = {m} must both be positive"
        )));
    }
    if w.d() != d || w.len() != n + m {
        return Err(Error::InvalidWedge(format!(
            "need {} indices in 0..{d}, got {:?} over d = {}",
            n + m,
            w.indices(),
            w.d()
        )));
    }
    let (rows, cols) = (d.pow(m as u32), d.pow(n as u32));
    if rows > MAX_DENSE_SIDE || cols > MAX_DENSE_SIDE {
        return Err(Error::TooLarge(format!("{rows}x{cols} operator")));
    }
    let mut matrix = ComplexMatrix::zeros(rows, cols);
    let norm = 1.0 / factorial(n + m).sqrt();
    for pi in permutations(n + m) {
        let row = tuple_index(pi[n..].iter().map(|&p| w.indices()[p]), d);
        let col = tuple_index(pi[..n].iter().map(|&p| w.indices()[p]), d);
        matrix[(row, col)] += C64::new(permutation_sign(&pi) as f64 * norm, 0.0);
    }
    Ok(matrix)
}

/// Projector onto `Λ^m ⊂ (C^d)^{⊗m}`.
#[derive(Clone, Debug)]
pub struct AntisymProjector {
    pub d: usize,
    pub m: usize,
    pub matrix: ComplexMatrix,
    /// `binomial(d, m)`.
    pub rank: usize,
    /// Set when `m > d`: the subspace is trivial and `matrix` is zero.
    pub empty: bool,
}

/// `P_{Λ^m} = Σ_{w} |∧_w⟩⟨∧_w|` over increasing `w` of length `m`.
pub fn antisym_projector(d: usize, m: usize) -> Result<AntisymProjector> {
    if d == 0 || m == 0 {
        return Err(Error::OutOfRange(format!(
            "projector needs d, m >= 1, got d = {d}, m = {m}"
        )));
    }
    let side = d
        .checked_pow(m as u32)
        .filter(|&s| s <= MAX_DENSE_SIDE)
        .ok_or_else(|| Error::TooLarge(format!("projector on ({d})^{m}")))?;
    let mut matrix = ComplexMatrix::zeros(side, side);
    for w in combinations(d, m) {
        let v = wedge_vector(&WedgeIndex::new(d, w)?);
        let support: Vec<(usize, C64)> = v
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, z)| (i, *z))
            .collect();
        for &(i, a) in &support {
            for &(j, b) in &support {
                matrix[(i, j)] += a * b.conj();
            }
        }
    }
    Ok(AntisymProjector {
        d,
        m,
        matrix,
        rank: binomial(d, m),
        empty: m > d,
    })
}
