//! Concurrence-type entanglement measures of bipartite pure states.
//!
//! Multi-copy states `|ψ⟩^{•k}` on `(H⊗K)^{⊗k}` are built interleaved
//! (`H K H K …`) and reordered to grouped form (`H…H K…K`) by
//! [`bullet_to_grouped`] before any operator `X ⊗ Y` acts on them.
//!
//! Normalizations: `α = d` for the G-concurrence and
//! `α_k = d / binomial(d, k)^{1/k}` for `C_k`, so every monotone is one on the
//! maximally entangled state.

use serde::{Deserialize, Serialize};

use crate::antisym::{antisymmetrizer, indexed_antisymmetrizer, WedgeIndex};
use crate::channel::CpMap;
use crate::combinatorics::{binomial, combinations};
use crate::error::{Error, Result};
use crate::linalg::schmidt_decompose;
use crate::tensor::{
    inner, partial_trace, permute_subsystems, ComplexMatrix, DensityOperator, StateVector, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    SigmaY,
    WedgeOverlap,
    SchmidtFormula,
    FQuantity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub method: Method,
    pub params: MeasureParams,
}

/// Which measure to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Concurrence2Qubit,
    ConcurrenceG,
    ConcurrenceGAlt {
        n: usize,
    },
    GConcurrence,
    MonotoneK {
        k: usize,
    },
    /// `C_F^{n;m}` with `F = (E^{n;m})^{⊗2}`.
    FQuantity {
        n: usize,
        m: usize,
    },
    Rungta,
}

/// Factor order taking `(H K)^{⊗k}` to `H^{⊗k} K^{⊗k}`; new factor `j` is old
/// factor `perm[j]`.
pub fn bullet_to_grouped(k: usize) -> Vec<usize> {
    (0..k)
        .map(|j| 2 * j)
        .chain((0..k).map(|j| 2 * j + 1))
        .collect()
}

/// `|ψ⟩^{•k}` in grouped layout.
pub fn grouped_power(psi: &StateVector, k: usize) -> Result<StateVector> {
    if psi.dims().len() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "bipartite state expected, got dims {:?}",
            psi.dims()
        )));
    }
    let mut v = psi.clone();
    for _ in 1..k {
        v = v.tensor(psi);
    }
    permute_subsystems(&v, &bullet_to_grouped(k))
}

fn equal_local_dims(psi: &StateVector) -> Result<usize> {
    match psi.dims() {
        [a, b] if a == b => Ok(*a),
        dims => Err(Error::DimensionMismatch(format!(
            "need a state on C^d ⊗ C^d, got dims {dims:?}"
        ))),
    }
}

/// Local dimension used by the Schmidt-coefficient formulas: the smaller
/// factor of a bipartite state.
fn schmidt_dim(psi: &StateVector) -> Result<usize> {
    match psi.dims() {
        [a, b] => Ok((*a).min(*b)),
        dims => Err(Error::InvalidSubsystems(format!(
            "bipartite state expected, got dims {dims:?}"
        ))),
    }
}

/// Schmidt coefficients, padded with zeros to the smaller local dimension.
pub fn schmidt_coefficients(psi: &StateVector) -> Result<Vec<f64>> {
    let d = schmidt_dim(psi)?;
    let mut l = schmidt_decompose(psi, &[0])?.coefficients;
    l.resize(d, 0.0);
    Ok(l)
}

/// `S_k(λ)`, the `k`-th elementary symmetric polynomial.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in values {
        for j in (1..=k).rev() {
            e[j] += e[j - 1] * x;
        }
    }
    e[k]
}

/// `|⟨ψ|σ_y⊗σ_y|ψ*⟩|` for a two-qubit state.
pub fn concurrence_2qubit(psi: &StateVector) -> Result<f64> {
    if psi.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit state expected, got dims {:?}",
            psi.dims()
        )));
    }
    let a = psi.amplitudes();
    // σ_y⊗σ_y |ψ*⟩ = (−ψ₁₁*, ψ₁₀*, ψ₀₁*, −ψ₀₀*)
    let flipped = [-a[3].conj(), a[2].conj(), a[1].conj(), -a[0].conj()];
    Ok(inner(a, &flipped).norm())
}

/// `|⟨ψ|^{•(d−1)} (A ⊗ A) |ψ*⟩|` with `A = A_1`.
pub fn concurrence_g(psi: &StateVector) -> Result<f64> {
    let d = equal_local_dims(psi)?;
    let a = antisymmetrizer(d, 1)?;
    wedge_overlap(psi, a.matrix(), 1, d - 1)
}

/// `|⟨ψ|^{•m} (B ⊗ B) |ψ*⟩^{•n}|` for a `d^m × d^n` operator `B`.
fn wedge_overlap(psi: &StateVector, b: &ComplexMatrix, n: usize, m: usize) -> Result<f64> {
    let src = grouped_power(&psi.conj(), n)?;
    let dst = grouped_power(psi, m)?;
    // (B⊗B)|x⟩ for grouped |x⟩ = vec(X) is vec(B X Bᵀ)
    let side = b.cols();
    let x = ComplexMatrix::new(side, side, src.amplitudes().to_vec())?;
    let y = &(b * &x) * &b.transpose();
    Ok(inner(dst.amplitudes(), y.as_slice()).norm())
}

/// `|⟨ψ|^{•(d−N)} (A^{N;d−N}_w ⊗ A^{N;d−N}_w) |ψ*⟩^{•N}|` with `w` the full index set.
pub fn concurrence_g_alt(psi: &StateVector, big_n: usize, w: &WedgeIndex) -> Result<f64> {
    let d = equal_local_dims(psi)?;
    if big_n == 0 || big_n >= d {
        return Err(Error::OutOfRange(format!(
            "need 1 <= N <= d-1, got N = {big_n}, d = {d}"
        )));
    }
    let b = indexed_antisymmetrizer(d, big_n, d - big_n, w)?;
    wedge_overlap(psi, &b, big_n, d - big_n)
}

/// `α (λ₁ … λ_d)^{1/d}` with `α = d`.
pub fn g_concurrence(psi: &StateVector) -> Result<f64> {
    let l = schmidt_coefficients(psi)?;
    let d = l.len();
    let prod: f64 = l.iter().map(|x| x.max(0.0)).product();
    Ok(d as f64 * prod.powf(1.0 / d as f64))
}

/// `α_k S_k(λ)^{1/k}` with `α_k = d / binomial(d, k)^{1/k}`.
pub fn concurrence_monotone_k(psi: &StateVector, k: usize) -> Result<f64> {
    let l = schmidt_coefficients(psi)?;
    let d = l.len();
    if k < 2 || k > d {
        return Err(Error::OutOfRange(format!(
            "need 2 <= k <= d, got k = {k}, d = {d}"
        )));
    }
    let kf = k as f64;
    let alpha = d as f64 / (binomial(d, k) as f64).powf(1.0 / kf);
    Ok(alpha * elementary_symmetric(&l, k).max(0.0).powf(1.0 / kf))
}

/// `E^{n;m} = Σ_w U[A^{n;m}_w]` over all increasing `w` of length `n + m`.
pub fn monotone_family_map(d: usize, n: usize, m: usize) -> Result<CpMap> {
    if n + m > d {
        return Err(Error::OutOfRange(format!(
            "n + m = {} exceeds d = {d}",
            n + m
        )));
    }
    let kraus = combinations(d, n + m)
        .into_iter()
        .map(|w| indexed_antisymmetrizer(d, n, m, &WedgeIndex::new(d, w)?))
        .collect::<Result<Vec<_>>>()?;
    CpMap::new(d.pow(n as u32), d.pow(m as u32), kraus)
}

/// `tr[ψ^{•m} F((ψ*)^{•n})] = Σ_K |⟨ψ^{•m}|K|ψ*^{•n}⟩|²` for a map `F` from
/// `(H⊗K)^{•n}` to `(H⊗K)^{•m}` in grouped layout.
pub fn f_quantity(psi: &StateVector, f: &CpMap, n: usize, m: usize) -> Result<f64> {
    let (da, db) = match psi.dims() {
        [a, b] => (*a, *b),
        dims => {
            return Err(Error::InvalidSubsystems(format!(
                "bipartite state expected, got dims {dims:?}"
            )))
        }
    };
    let local = da * db;
    if f.dim_in() != local.pow(n as u32) || f.dim_out() != local.pow(m as u32) {
        return Err(Error::DimensionMismatch(format!(
            "map {} -> {} for n = {n}, m = {m} copies of dimension {local}",
            f.dim_in(),
            f.dim_out()
        )));
    }
    let src = grouped_power(&psi.conj(), n)?;
    let dst = grouped_power(psi, m)?;
    let mut total = 0.0;
    for k in f.kraus() {
        let kv = k.matvec(src.amplitudes())?;
        total += inner(dst.amplitudes(), &kv).norm_sqr();
    }
    Ok(total)
}

/// `√((d/(d−1))(1 − tr ρ_H²))` with `d` the smaller local dimension.
pub fn rungta_concurrence(psi: &StateVector) -> Result<f64> {
    let d = schmidt_dim(psi)? as f64;
    if d < 2.0 {
        return Ok(0.0);
    }
    let rho = partial_trace(&DensityOperator::from_pure(psi), &[0])?;
    let r = rho.matrix();
    // 1 − tr ρ² = (tr ρ)² − tr ρ² = 2 Σ_{i<j} (ρ_ii ρ_jj − |ρ_ij|²)
    let mut linear_entropy = 0.0;
    for i in 0..r.rows() {
        for j in i + 1..r.rows() {
            linear_entropy += 2.0 * (r[(i, i)].re * r[(j, j)].re - r[(i, j)].norm_sqr());
        }
    }
    Ok((d / (d - 1.0) * linear_entropy).max(0.0).sqrt())
}

/// Evaluates one measure and records how it was computed.
pub fn evaluate(psi: &StateVector, measure: Measure) -> Result<MeasureResult> {
    let d = schmidt_dim(psi)?;
    let mut params = MeasureParams {
        d,
        ..Default::default()
    };
    let (value, method) = match measure {
        Measure::Concurrence2Qubit => (concurrence_2qubit(psi)?, Method::SigmaY),
        Measure::ConcurrenceG => (concurrence_g(psi)?, Method::WedgeOverlap),
        Measure::ConcurrenceGAlt { n } => {
            params.n = Some(n);
            params.m = Some(d.saturating_sub(n));
            (
                concurrence_g_alt(psi, n, &WedgeIndex::full(d)?)?,
                Method::WedgeOverlap,
            )
        }
        Measure::GConcurrence => {
            params.k = Some(d);
            (g_concurrence(psi)?, Method::SchmidtFormula)
        }
        Measure::MonotoneK { k } => {
            params.k = Some(k);
            (concurrence_monotone_k(psi, k)?, Method::SchmidtFormula)
        }
        Measure::FQuantity { n, m } => {
            params.n = Some(n);
            params.m = Some(m);
            let e = monotone_family_map(equal_local_dims(psi)?, n, m)?;
            (f_quantity(psi, &e.tensor(&e), n, m)?, Method::FQuantity)
        }
        Measure::Rungta => (rungta_concurrence(psi)?, Method::SchmidtFormula),
    };
    Ok(MeasureResult {
        value,
        method,
        params,
    })
}

/// `(C^g)² / ∏λ`, or `None` when the product vanishes.
pub fn cg_ratio(psi: &StateVector) -> Result<Option<f64>> {
    let prod: f64 = schmidt_coefficients(psi)?.iter().product();
    if prod < 1e-14 {
        return Ok(None);
    }
    Ok(Some(concurrence_g(psi)?.powi(2) / prod))
}

/// `Σ_i √λ_i |i i⟩` on `C^d ⊗ C^d`.
pub fn schmidt_form_state(coefficients: &[f64]) -> Result<StateVector> {
    let d = coefficients.len();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (i, &l) in coefficients.iter().enumerate() {
        amps[i * d + i] = C64::new(l.sqrt(), 0.0);
    }
    StateVector::normalized(vec![d, d], amps)
}
