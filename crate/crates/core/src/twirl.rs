//! Haar twirls of operators on four copies of `C^d` under `V⊗V⊗W⊗W`.
//!
//! The commutant of `V⊗V` is spanned by the symmetric and antisymmetric
//! projectors `P_S = (I+F)/2`, `P_A = (I−F)/2` (`F` the swap), so the exact
//! twirl is `Σ_ij p_ij P_i ⊗ P_j` with `p_ij = tr[(P_i⊗P_j)X] / (r_i r_j)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChoiOperator;
use crate::error::{Error, Result};
use crate::random::{derive_seeds, haar_unitary_with, rng_from_seed};
use crate::tensor::{
    conjugate_by_local_product, kron, permute_operator, ComplexMatrix, C64, ONE, ZERO,
};

/// Samples summed per parallel task; fixed so results do not depend on the
/// thread count.
const CHUNK: usize = 256;

/// Which factor pairs carry the same Haar unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorPairing {
    /// `V` on factors (0,1), `W` on (2,3): input pair then output pair.
    Adjacent,
    /// `V` on (0,2), `W` on (1,3): the comb layout `B1 K1 B2 K2`.
    Interleaved,
}

impl FactorPairing {
    /// Permutation taking this layout to the adjacent one (an involution).
    fn to_adjacent(self) -> [usize; 4] {
        match self {
            FactorPairing::Adjacent => [0, 1, 2, 3],
            FactorPairing::Interleaved => [0, 2, 1, 3],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    S,
    A,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwirlDecomposition {
    pub d: usize,
    pub pairing: FactorPairing,
    #[serde(rename = "pSS")]
    pub p_ss: f64,
    #[serde(rename = "pSA")]
    pub p_sa: f64,
    #[serde(rename = "pAS")]
    pub p_as: f64,
    #[serde(rename = "pAA")]
    pub p_aa: f64,
    /// `‖X − Σ p_ij P_i⊗P_j‖_F`; zero exactly when `X` is twirl-invariant.
    pub residual_norm: f64,
}

impl TwirlDecomposition {
    pub fn coefficient(&self, i: Component, j: Component) -> f64 {
        match (i, j) {
            (Component::S, Component::S) => self.p_ss,
            (Component::S, Component::A) => self.p_sa,
            (Component::A, Component::S) => self.p_as,
            (Component::A, Component::A) => self.p_aa,
        }
    }

    /// `(i, j, p_ij)` rows in the order SS, SA, AS, AA.
    pub fn table(&self) -> Vec<(Component, Component, f64)> {
        use Component::*;
        [(S, S), (S, A), (A, S), (A, A)]
            .into_iter()
            .map(|(i, j)| (i, j, self.coefficient(i, j)))
            .collect()
    }

    /// `Σ p_ij P_i ⊗ P_j` in the decomposition's own factor layout.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (ps, pa) = (symmetric_projector(self.d), antisymmetric_projector(self.d));
        let mut out = ComplexMatrix::zeros(ps.rows().pow(2), ps.rows().pow(2));
        for (i, j, p) in self.table() {
            let a = if i == Component::S { &ps } else { &pa };
            let b = if j == Component::S { &ps } else { &pa };
            out.add_scaled(&kron(a, b), C64::new(p, 0.0));
        }
        let perm = self.pairing.to_adjacent();
        permute_operator(&out, &[self.d; 4], &perm).expect("square by construction")
    }
}

/// Swap operator on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = ONE;
        }
    }
    f
}

pub fn symmetric_projector(d: usize) -> ComplexMatrix {
    let mut p = swap_operator(d);
    p.add_scaled(&ComplexMatrix::identity(d * d), ONE);
    p.scale_real(0.5)
}

pub fn antisymmetric_projector(d: usize) -> ComplexMatrix {
    let mut p = swap_operator(d).scale_real(-1.0);
    p.add_scaled(&ComplexMatrix::identity(d * d), ONE);
    p.scale_real(0.5)
}

pub fn symmetric_rank(d: usize) -> usize {
    d * (d + 1) / 2
}

pub fn antisymmetric_rank(d: usize) -> usize {
    d * (d - 1) / 2
}

fn check_four_factor(x: &ComplexMatrix, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "twirl needs d >= 2, got {d}"
        )));
    }
    let side = d.pow(4);
    if x.shape() != (side, side) {
        return Err(Error::InvalidShape(format!(
            "{}x{} is not an operator on four factors of dimension {d}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Schur-basis coefficients of the Haar twirl of `x`.
pub fn exact_twirl(
    x: &ComplexMatrix,
    d: usize,
    pairing: FactorPairing,
) -> Result<TwirlDecomposition> {
    check_four_factor(x, d)?;
    let y = permute_operator(x, &[d; 4], &pairing.to_adjacent())?;
    // t[a][b] = tr[(F^a ⊗ F^b) Y]
    let mut t = [[ZERO; 2]; 2];
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * d + j) * d + k) * d + l;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let col = idx(i, j, k, l);
                    t[0][0] += y[(col, col)];
                    t[1][0] += y[(idx(j, i, k, l), col)];
                    t[0][1] += y[(idx(i, j, l, k), col)];
                    t[1][1] += y[(idx(j, i, l, k), col)];
                }
            }
        }
    }
    let (rs, ra) = (symmetric_rank(d) as f64, antisymmetric_rank(d) as f64);
    // P_S⊗P_S etc. expand into the four swap traces with signs ±1/4
    let proj =
        |si: f64, sj: f64| (t[0][0] + si * t[1][0] + sj * t[0][1] + si * sj * t[1][1]).re / 4.0;
    let mut dec = TwirlDecomposition {
        d,
        pairing,
        p_ss: proj(1.0, 1.0) / (rs * rs),
        p_sa: proj(1.0, -1.0) / (rs * ra),
        p_as: proj(-1.0, 1.0) / (ra * rs),
        p_aa: proj(-1.0, -1.0) / (ra * ra),
        residual_norm: 0.0,
    };
    dec.residual_norm = (x - &dec.reconstruct()).frobenius_norm();
    Ok(dec)
}

/// [`exact_twirl`] of a Choi operator whose input and output are each two
/// copies of `C^d`.
pub fn exact_twirl_choi(x: &ChoiOperator, pairing: FactorPairing) -> Result<TwirlDecomposition> {
    let d = (x.dim_in as f64).sqrt().round() as usize;
    if d * d != x.dim_in || x.dim_in != x.dim_out {
        return Err(Error::InvalidShape(format!(
            "Choi operator {} -> {} is not two copies to two copies",
            x.dim_in, x.dim_out
        )));
    }
    exact_twirl(&x.matrix, d, pairing)
}

/// Monte-Carlo estimate of the twirl from `samples` Haar pairs `(V, W)`.
///
/// Sample `k` uses its own seed derived from `seed`, and samples are summed
/// in fixed-size chunks, so the result is independent of the thread count.
pub fn monte_carlo_twirl(
    x: &ComplexMatrix,
    d: usize,
    samples: usize,
    seed: u64,
    pairing: FactorPairing,
) -> Result<ComplexMatrix> {
    check_four_factor(x, d)?;
    if samples == 0 {
        return Err(Error::OutOfRange("at least one sample required".into()));
    }
    let seeds = derive_seeds(seed, samples);
    let partials: Vec<ComplexMatrix> = seeds
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = ComplexMatrix::zeros(x.rows(), x.cols());
            for &s in chunk {
                let mut rng = rng_from_seed(s);
                let v = haar_unitary_with(d, &mut rng).expect("d >= 2");
                let w = haar_unitary_with(d, &mut rng).expect("d >= 2");
                let locals = match pairing {
                    FactorPairing::Adjacent => [&v, &v, &w, &w],
                    FactorPairing::Interleaved => [&v, &w, &v, &w],
                };
                let y = conjugate_by_local_product(x, &[d; 4], &locals).expect("shape checked");
                acc.add_scaled(&y, ONE);
            }
            acc
        })
        .collect();
    let mut total = ComplexMatrix::zeros(x.rows(), x.cols());
    for p in &partials {
        total.add_scaled(p, ONE);
    }
    Ok(total.scale_real(1.0 / samples as f64))
}

/// Choi operator of `ρ ↦ WρW†` for a Haar-random `W` on `C^d ⊗ C^d`, laid out
/// as (input pair, output pair). Unit-scale entries make it a useful
/// Monte-Carlo test input.
pub fn random_unitary_choi<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let w = haar_unitary_with(d * d, rng)?;
    let n = d * d;
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        for o in 0..n {
            v[i * n + o] = w[(o, i)];
        }
    }
    Ok(ComplexMatrix::outer(&v, &v))
}
