//! The encoder/decoder comb that turns `d − n` uses of a black-box unitary `u`
//! into `(u*)^{⊗n}` on the antisymmetric subspace `Λ^n`, plus the rank
//! witness showing that a single use cannot work for `d ≥ 3`.
//!
//! The circuit reproduces `u*` only up to the phase `det(u)`, so operators are
//! compared with [`phase_invariant_distance`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antisym::{antisymmetrizer, Antisymmetrizer};
use crate::channel::{choi_of, complete_to_tp, CpMap, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::hermitian_rank;
use crate::random::{derive_seeds, haar_unitary_with, rng_from_seed};
use crate::tensor::{
    apply_tensor_power, conjugate_by_local_product, tensor_power, ComplexMatrix, DensityOperator,
    ONE,
};
use crate::twirl::{antisymmetric_projector, symmetric_projector};

/// Largest `d` for which the dense encoder/decoder channels are built. The
/// decoder completion is a `d^{d−1} × d^{d−1}` matrix, about 1 GB at `d = 6`.
pub const MAX_CIRCUIT_DIM: usize = 5;

/// Tolerance on the unitarity of black-box inputs.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Largest admissible weight outside `Λ^n` for [`conjugate_channel_on_state`].
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

/// `min_φ ‖x − e^{iφ} y‖_F`, with `φ = arg tr[y† x]`.
pub fn phase_invariant_distance(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let overlap = y.hs_inner(x);
    let phase = if overlap.norm() == 0.0 {
        ONE
    } else {
        overlap / overlap.norm()
    };
    (x - &y.scale(phase)).frobenius_norm()
}

/// Encoder `U[A_n]` and decoder `U[A_n†]`, each completed to a channel.
#[derive(Clone, Debug)]
pub struct ConjugationCircuit {
    d: usize,
    n: usize,
    a: Antisymmetrizer,
    encoder: KrausChannel,
    decoder: KrausChannel,
}

impl ConjugationCircuit {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d > MAX_CIRCUIT_DIM {
            return Err(Error::TooLarge(format!(
                "circuit channels are built for d <= {MAX_CIRCUIT_DIM}, got {d}"
            )));
        }
        let a = antisymmetrizer(d, n)?;
        let encoder = complete_to_tp(
            &KrausChannel::from_operator(a.matrix().clone())?,
            &a.domain_projector(),
        )?;
        let dec_iso = KrausChannel::from_operator(a.matrix().adjoint())?;
        let decoder = complete_to_tp(&dec_iso, &a.range_projector())?;
        Ok(Self {
            d,
            n,
            a,
            encoder,
            decoder,
        })
    }

    /// The single-copy comb of the qubit-to-qudit construction, `n = 1`.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(d, 1)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Black-box uses, `d − n`.
    pub fn uses(&self) -> usize {
        self.d - self.n
    }

    pub fn antisymmetrizer(&self) -> &Antisymmetrizer {
        &self.a
    }

    pub fn encoder(&self) -> &KrausChannel {
        &self.encoder
    }

    pub fn decoder(&self) -> &KrausChannel {
        &self.decoder
    }

    /// `D ∘ U[u]^{⊗(d−n)} ∘ E` as a CP map on `(C^d)^{⊗n}`.
    pub fn circuit_map(&self, u: &ComplexMatrix) -> Result<CpMap> {
        check_unitary(u, self.d)?;
        let mut kraus = Vec::with_capacity(self.encoder.kraus().len() * self.decoder.kraus().len());
        for e in self.encoder.kraus() {
            let ue = apply_tensor_power(u, self.uses(), e)?;
            for dk in self.decoder.kraus() {
                kraus.push(dk * &ue);
            }
        }
        let side = self.d.pow(self.n as u32);
        CpMap::new(side, side, kraus)
    }

    /// Max-norm distance between the Choi operators of the circuit and of
    /// `U[(u*)^{⊗n}]`, both restricted to inputs in `Λ^n`.
    pub fn channel_distance(&self, u: &ComplexMatrix) -> Result<f64> {
        let p = self.a.domain_projector();
        let circuit = self.circuit_map(u)?;
        let restricted: Vec<ComplexMatrix> = circuit.kraus().iter().map(|k| k * &p).collect();
        let side = p.rows();
        let lhs = choi_of(&CpMap::new(side, side, restricted)?);
        let target = &tensor_power(&u.conj(), self.n) * &p;
        let rhs = choi_of(&CpMap::from_operator(target));
        Ok(lhs.matrix.max_abs_diff(&rhs.matrix))
    }
}

fn check_unitary(u: &ComplexMatrix, d: usize) -> Result<()> {
    if u.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} black box for d = {d}",
            u.rows(),
            u.cols()
        )));
    }
    let dev = u.unitarity_deviation();
    if dev > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// `A_n† u^{⊗(d−n)} A_n`, which equals `det(u) (u*)^{⊗n} P_{Λ^n}`.
///
/// Works from the antisymmetrizer alone (no completed channels), so it is
/// available up to the antisymmetrizer's own size cap.
pub fn effective_operator(a: &Antisymmetrizer, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_unitary(u, a.d())?;
    let ua = apply_tensor_power(u, a.m(), a.matrix())?;
    Ok(&a.matrix().adjoint() * &ua)
}

/// Effective operator of the circuit on input `u`; `∝ u*` for `n = 1`.
pub fn conjugate_unitary(c: &ConjugationCircuit, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    effective_operator(&c.a, u)
}

/// Runs a state on `Λ^n` through the circuit channel.
///
/// Rejects inputs with more than [`LEAKAGE_TOLERANCE`] weight outside `Λ^n`.
pub fn conjugate_channel_on_state(
    c: &ConjugationCircuit,
    u: &ComplexMatrix,
    rho: &DensityOperator,
) -> Result<DensityOperator> {
    check_unitary(u, c.d)?;
    let p = c.a.domain_projector();
    if rho.matrix().shape() != p.shape() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for {} copies of C^{}",
            rho.dim(),
            c.n,
            c.d
        )));
    }
    let leakage = 1.0 - (&p * rho.matrix()).trace().re;
    if leakage > LEAKAGE_TOLERANCE {
        return Err(Error::Leakage(leakage));
    }
    let encoded = c.encoder.map().apply_matrix(rho.matrix())?;
    let dims = vec![c.d; c.uses()];
    let locals = vec![u; c.uses()];
    let evolved = conjugate_by_local_product(&encoded, &dims, &locals)?;
    let out = c.decoder.map().apply_matrix(&evolved)?;
    DensityOperator::new(vec![c.d; c.n], out.hermitian_part())
}

/// `A v†` / `v A†` variant of the single-copy comb: returns the effective
/// operator `v A† u^{⊗(d−1)} A v† ∝ v u* v†`.
pub fn antiunitary_transform(
    v: &ComplexMatrix,
    u: &ComplexMatrix,
    c: &ConjugationCircuit,
) -> Result<ComplexMatrix> {
    if c.n != 1 {
        return Err(Error::OutOfRange(format!(
            "antiunitary variant needs the single-copy circuit, got n = {}",
            c.n
        )));
    }
    check_unitary(v, c.d)?;
    let inner = effective_operator(&c.a, u)?;
    Ok(&(v * &inner) * &v.adjoint())
}

/// Channel version of [`antiunitary_transform`]: encoder `U[A v†]`, decoder
/// `U[v] ∘ D`.
pub fn antiunitary_circuit_map(
    v: &ComplexMatrix,
    u: &ComplexMatrix,
    c: &ConjugationCircuit,
) -> Result<CpMap> {
    if c.n != 1 {
        return Err(Error::OutOfRange(format!(
            "antiunitary variant needs the single-copy circuit, got n = {}",
            c.n
        )));
    }
    check_unitary(v, c.d)?;
    let pre = CpMap::from_operator(v.adjoint());
    let post = CpMap::from_operator(v.clone());
    pre.then(&c.circuit_map(u)?)?.then(&post)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessComponent {
    /// `"SS"`, `"SA"`, `"AS"` or `"AA"`.
    pub label: String,
    pub ranks: [usize; 2],
    pub feasible: bool,
}

/// Ranks of the Schur components that a single-use comb would need to be
/// maximally entangled (rank one).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NogoWitness {
    pub d: usize,
    pub rank_symmetric: usize,
    pub rank_antisymmetric: usize,
    pub components: Vec<WitnessComponent>,
    pub feasible: bool,
}

/// Ranks are computed numerically from the projectors.
pub fn single_use_nogo_witness(d: usize) -> Result<NogoWitness> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("witness needs d >= 2, got {d}")));
    }
    let rs = hermitian_rank(&symmetric_projector(d), 0.5);
    let ra = hermitian_rank(&antisymmetric_projector(d), 0.5);
    let rank = |c: char| if c == 'S' { rs } else { ra };
    let components: Vec<WitnessComponent> = ["SS", "SA", "AS", "AA"]
        .iter()
        .map(|label| {
            let mut it = label.chars();
            let ranks = [rank(it.next().unwrap()), rank(it.next().unwrap())];
            WitnessComponent {
                label: label.to_string(),
                ranks,
                feasible: ranks == [1, 1],
            }
        })
        .collect();
    let feasible = components.iter().any(|c| c.feasible);
    Ok(NogoWitness {
        d,
        rank_symmetric: rs,
        rank_antisymmetric: ra,
        components,
        feasible,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    /// `None` when the channel route is skipped (`d >` [`MAX_CIRCUIT_DIM`]).
    pub max_channel_distance: Option<f64>,
    pub max_operator_distance: f64,
    pub witness: NogoWitness,
}

impl VerificationReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_operator_distance < tolerance
            && self.max_channel_distance.is_none_or(|c| c < tolerance)
    }
}

/// Haar-sampled check of the circuit for `trials` unitaries.
///
/// Operator distance compares `A_n† u^{⊗(d−n)} A_n` with `(u*)^{⊗n} P_{Λ^n}`
/// up to phase; the channel distance is [`ConjugationCircuit::channel_distance`].
pub fn verify_conjugation(
    d: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("at least one trial required".into()));
    }
    let a = antisymmetrizer(d, n)?;
    let circuit = if d <= MAX_CIRCUIT_DIM {
        Some(ConjugationCircuit::new(d, n)?)
    } else {
        None
    };
    let p = a.domain_projector();
    let seeds = derive_seeds(seed, trials);
    let results: Vec<(f64, Option<f64>)> = seeds
        .par_iter()
        .map(|&s| -> Result<(f64, Option<f64>)> {
            let u = haar_unitary_with(d, &mut rng_from_seed(s))?;
            let eff = effective_operator(&a, &u)?;
            let target = &tensor_power(&u.conj(), n) * &p;
            let op = phase_invariant_distance(&eff, &target);
            let ch = circuit
                .as_ref()
                .map(|c| c.channel_distance(&u))
                .transpose()?;
            Ok((op, ch))
        })
        .collect::<Result<_>>()?;
    let max_operator_distance = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_channel_distance = circuit
        .as_ref()
        .map(|_| results.iter().filter_map(|r| r.1).fold(0.0, f64::max));
    Ok(VerificationReport {
        d,
        n,
        trials,
        max_channel_distance,
        max_operator_distance,
        witness: single_use_nogo_witness(d)?,
    })
}
