//! Amplification of a probabilistic `m`-clone instrument over `l` blocks and
//! the fidelity bounds that contradict the optimal universal-NOT.
//!
//! Blocks are processed in order `i = 1..l`. Block `i` runs the instrument on
//! its own `m` clones; on success the output register is swapped in (the old
//! register content is discarded), on failure the register is kept. The
//! register starts in `|0⟩⟨0|`.

use serde::{Deserialize, Serialize};

use crate::channel::{KrausChannel, TRACE_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::fidelity_of_matrices;
use crate::tensor::{
    apply_kraus_on_factors, partial_trace_operator, ComplexMatrix, DensityOperator, StateVector,
    C64, ONE, ZERO,
};

/// Largest number of outcome branches simulated, `2^l`.
pub const MAX_BLOCKS: usize = 20;

/// Largest dense state side for the full-tensor path.
const MAX_FULL_TENSOR_SIDE: usize = 1024;

/// Strict-inequality margin for [`contradiction_crossing`]: `c^n (n+2)` must
/// fall below `1 − CROSSING_MARGIN`, so exact ties do not count as crossings.
pub const CROSSING_MARGIN: f64 = 1e-12;

/// Values of `c` above this are reported as degenerate.
pub const DEGENERATE_C: f64 = 1.0 - 1e-12;

/// `{E, E'}` acting on `m` clones of `C^d`.
#[derive(Clone, Debug)]
pub struct Instrument {
    success: KrausChannel,
    failure: KrausChannel,
    d: usize,
    m: usize,
}

impl Instrument {
    /// Both branches must share the input `(C^d)^{⊗m}`, and `E + E'` must be
    /// trace preserving.
    pub fn new(success: KrausChannel, failure: KrausChannel, d: usize, m: usize) -> Result<Self> {
        if d < 1 || m < 1 {
            return Err(Error::OutOfRange(format!(
                "instrument needs d, m >= 1, got d = {d}, m = {m}"
            )));
        }
        let din = d
            .checked_pow(m as u32)
            .ok_or_else(|| Error::TooLarge(format!("{m} clones of C^{d}")))?;
        if success.dim_in() != din || failure.dim_in() != din {
            return Err(Error::DimensionMismatch(format!(
                "branches act on {} and {}, expected {din}",
                success.dim_in(),
                failure.dim_in()
            )));
        }
        let mut total = success.map().kraus_sum();
        total.add_scaled(&failure.map().kraus_sum(), ONE);
        let dev = total.max_abs_diff(&ComplexMatrix::identity(din));
        if dev > TRACE_TOLERANCE {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self {
            success,
            failure,
            d,
            m,
        })
    }

    /// `{√ε U[o], √(1−ε) U[o']}` on a single clone.
    pub fn heralded_unitary(
        success_op: &ComplexMatrix,
        failure_op: &ComplexMatrix,
        epsilon: f64,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        let d = success_op.cols();
        let s = KrausChannel::from_operator(success_op.scale_real(epsilon.sqrt()))?;
        let f = KrausChannel::from_operator(failure_op.scale_real((1.0 - epsilon).sqrt()))?;
        Self::new(s, f, d, 1)
    }

    pub fn success(&self) -> &KrausChannel {
        &self.success
    }

    pub fn failure(&self) -> &KrausChannel {
        &self.failure
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::OutOfRange(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct AmplificationReport {
    /// Measured per-block success probability `tr E(ψ^{⊗m})`.
    pub epsilon: f64,
    pub l: usize,
    pub m: usize,
    pub output_state: DensityOperator,
    /// Total weight of branches with at least one success.
    pub success_weight: f64,
    /// Branch weights indexed by outcome bitstring (bit `i` set: block `i+1` succeeded).
    pub branch_weights: Vec<f64>,
}

fn clone_input(psi: &StateVector, m: usize) -> ComplexMatrix {
    let mut v = psi.clone();
    for _ in 1..m {
        v = v.tensor(psi);
    }
    v.projector()
}

fn register_dim(inst: &Instrument, target: &KrausChannel) -> Result<usize> {
    let dr = inst.success.dim_out();
    if target.dim_out() != dr {
        return Err(Error::DimensionMismatch(format!(
            "instrument outputs dimension {dr}, target map outputs {}",
            target.dim_out()
        )));
    }
    Ok(dr)
}

fn ground_state(dr: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dr, dr);
    g[(0, 0)] = ONE;
    g
}

/// Simulates the amplification channel by expanding all `2^l` outcome branches.
pub fn amplify(
    inst: &Instrument,
    target: &KrausChannel,
    psi: &StateVector,
    l: usize,
) -> Result<AmplificationReport> {
    if l == 0 || l > MAX_BLOCKS {
        return Err(Error::OutOfRange(format!(
            "blocks must lie in 1..={MAX_BLOCKS}, got {l}"
        )));
    }
    if psi.dim() != inst.d {
        return Err(Error::DimensionMismatch(format!(
            "clone of dimension {} for an instrument on C^{}",
            psi.dim(),
            inst.d
        )));
    }
    let dr = register_dim(inst, target)?;
    let input = clone_input(psi, inst.m);
    let y = inst.success.map().apply_matrix(&input)?;
    let q = inst.failure.map().apply_matrix(&input)?.trace().re;
    let p = y.trace().re;
    let ground = ground_state(dr);

    let mut output = ComplexMatrix::zeros(dr, dr);
    let mut branch_weights = Vec::with_capacity(1 << l);
    for bits in 0..(1usize << l) {
        // register content along this branch, unnormalized
        let mut reg = ground.clone();
        for i in 0..l {
            if bits >> i & 1 == 1 {
                let w = reg.trace().re;
                reg = y.scale_real(w);
            } else {
                reg = reg.scale_real(q);
            }
        }
        branch_weights.push(reg.trace().re);
        output.add_scaled(&reg, ONE);
    }
    let success_weight = branch_weights[1..].iter().sum();
    Ok(AmplificationReport {
        epsilon: p,
        l,
        m: inst.m,
        output_state: DensityOperator::new(vec![dr], output.hermitian_part())?,
        success_weight,
        branch_weights,
    })
}

/// `(1−(1−p)^l) T(ψ) + (1−p)^l |0⟩⟨0|`.
pub fn closed_form_output(
    target: &KrausChannel,
    psi: &StateVector,
    p: f64,
    l: usize,
) -> Result<ComplexMatrix> {
    let t = target.map().apply_matrix(&psi.projector())?;
    let fail = (1.0 - p).powi(l as i32);
    let mut out = t.scale_real(1.0 - fail);
    out.add_scaled(&ground_state(target.dim_out()), C64::new(fail, 0.0));
    Ok(out)
}

/// Dense simulation of the same protocol with explicit flag qubits and
/// controlled swaps. Restricted to small instances.
pub fn amplify_full_tensor(
    inst: &Instrument,
    target: &KrausChannel,
    psi: &StateVector,
    l: usize,
) -> Result<ComplexMatrix> {
    if l == 0 {
        return Err(Error::OutOfRange("at least one block required".into()));
    }
    let dr = register_dim(inst, target)?;
    if inst.failure.dim_out() != dr {
        return Err(Error::DimensionMismatch(format!(
            "full-tensor path needs equal branch outputs, got {dr} and {}",
            inst.failure.dim_out()
        )));
    }
    let (d, m) = (inst.d, inst.m);
    let side = d.pow((m * l) as u32) * dr;
    if side > MAX_FULL_TENSOR_SIDE
        || dr * dr * 2 * d.pow((m * (l - 1)) as u32) > MAX_FULL_TENSOR_SIDE
    {
        return Err(Error::TooLarge(format!(
            "{l} blocks of {m} clones of C^{d}"
        )));
    }

    // instrument with a flag: E_k ⊗ |1⟩ and E'_k ⊗ |0⟩, output factors (O, K)
    let mut flagged = Vec::new();
    for (branch, flag) in [(&inst.success, 1usize), (&inst.failure, 0usize)] {
        for k in branch.kraus() {
            let mut big = ComplexMatrix::zeros(dr * 2, k.cols());
            for o in 0..dr {
                for c in 0..k.cols() {
                    big[(o * 2 + flag, c)] = k[(o, c)];
                }
            }
            flagged.push(big);
        }
    }
    // |0⟩⟨0|_K ⊗ I + |1⟩⟨1|_K ⊗ SWAP on (K, O, R)
    let mut cswap = ComplexMatrix::zeros(2 * dr * dr, 2 * dr * dr);
    for o in 0..dr {
        for r in 0..dr {
            cswap[(o * dr + r, o * dr + r)] = ONE;
            cswap[(dr * dr + r * dr + o, dr * dr + o * dr + r)] = ONE;
        }
    }

    // factors: R first, then the clones of blocks 1..l
    let mut rho = ground_state(dr);
    let clones = clone_input(psi, m * l);
    rho = crate::tensor::kron(&rho, &clones);
    let mut dims = vec![dr];
    dims.extend(std::iter::repeat_n(d, m * l));
    for _ in 0..l {
        // the current block's clones sit right after R
        let targets: Vec<usize> = (1..=m).collect();
        let (r1, d1) = apply_kraus_on_factors(&rho, &dims, &targets, &flagged, &[dr, 2])?;
        // d1 = [O, K, R, remaining clones]
        let (r2, d2) =
            apply_kraus_on_factors(&r1, &d1, &[1, 0, 2], &[cswap.clone()], &[2, dr, dr])?;
        // d2 = [K, O, R, remaining clones]; drop K and O
        let keep: Vec<usize> = (2..d2.len()).collect();
        rho = partial_trace_operator(&r2, &d2, &keep)?;
        dims = d2[2..].to_vec();
    }
    Ok(rho)
}

/// `1 − c^n` together with the constant `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityBound {
    pub c: f64,
    pub bound: f64,
    /// `c` is numerically indistinguishable from one.
    pub degenerate: bool,
}

/// `c = max{√(1−ε), (1 − d^{−1/2})^{1/m}}`, clamped below one.
pub fn scaling_constant(epsilon: f64, m: usize, d: usize) -> Result<(f64, bool)> {
    check_epsilon(epsilon)?;
    if m < 1 || d < 2 {
        return Err(Error::OutOfRange(format!(
            "need m >= 1 and d >= 2, got m = {m}, d = {d}"
        )));
    }
    let first = (1.0 - epsilon).sqrt();
    let second = (1.0 - 1.0 / (d as f64).sqrt()).powf(1.0 / m as f64);
    let c = first.max(second);
    if c > DEGENERATE_C {
        return Ok((DEGENERATE_C, true));
    }
    Ok((c, false))
}

pub fn fidelity_lower_bound(epsilon: f64, m: usize, n: usize, d: usize) -> Result<FidelityBound> {
    if n < 1 {
        return Err(Error::OutOfRange(format!("need n >= 1, got {n}")));
    }
    let (c, degenerate) = scaling_constant(epsilon, m, d)?;
    Ok(FidelityBound {
        c,
        bound: 1.0 - c.powi(n.min(i32::MAX as usize) as i32),
        degenerate,
    })
}

/// `1 − 1/(n+2)`, evaluated as `(n+1)/(n+2)` with a single rounding.
pub fn unot_optimal_fidelity(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::OutOfRange(format!("need n >= 1, got {n}")));
    }
    Ok((n as f64 + 1.0) / (n as f64 + 2.0))
}

/// `ln(c^n (n+2))`.
fn log_gap(ln_c: f64, n: u64) -> f64 {
    n as f64 * ln_c + (n as f64 + 2.0).ln()
}

/// Smallest `n ≥ 1` with `c^n < 1/(n+2)`, i.e. `1 − c^n > 1 − (n+2)^{−1}`.
///
/// `ln(c^n (n+2))` is concave in `n`, so past its maximum it decreases and a
/// binary search finds the crossing even when `c` is close to one.
pub fn contradiction_crossing(epsilon: f64, m: usize, d: usize) -> Result<u64> {
    let (c, _) = scaling_constant(epsilon, m, d)?;
    let ln_c = c.ln();
    let threshold = (1.0 - CROSSING_MARGIN).ln();
    let below = |n: u64| log_gap(ln_c, n) < threshold;
    // maximum of n ln c + ln(n+2) sits at n = −1/ln c − 2
    if below(1) {
        return Ok(1);
    }
    // between 1 and the peak the gap only grows, so the crossing lies past it
    let mut lo = (-1.0 / ln_c - 2.0).max(1.0).floor() as u64;
    let mut hi = lo.saturating_mul(2).max(2);
    while !below(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// CLI-facing summary of one amplification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NogoReport {
    pub epsilon: f64,
    pub m: usize,
    pub l: usize,
    pub d: usize,
    pub success_weight: f64,
    /// `1 − (1−ε)^l`.
    pub closed_form: f64,
    /// Root fidelity between `T(ψ)` and the simulated output.
    pub fidelity: f64,
    /// `1 − c^n` at `n = crossingN`.
    pub bound: f64,
    #[serde(rename = "crossingN")]
    pub crossing_n: u64,
}

/// Runs the heralded-identity instrument `{√ε I, √(1−ε) I}` with `T = id` on a
/// qubit state, and evaluates the crossing for the same `(ε, m, d)`.
pub fn nogo_report(
    epsilon: f64,
    m: usize,
    l: usize,
    d: usize,
    psi: &StateVector,
) -> Result<NogoReport> {
    check_epsilon(epsilon)?;
    if psi.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for d = {d}",
            psi.dim()
        )));
    }
    // the success branch acts on the first clone and discards the others
    let din = d.pow(m as u32);
    let rest = din / d;
    let discard: Vec<ComplexMatrix> = (0..rest)
        .map(|r| ComplexMatrix::from_fn(d, din, |o, c| if c == o * rest + r { ONE } else { ZERO }))
        .collect();
    let succ = KrausChannel::new(
        din,
        d,
        discard
            .iter()
            .map(|k| k.scale_real(epsilon.sqrt()))
            .collect(),
    )?;
    let fail = KrausChannel::new(
        din,
        d,
        discard
            .iter()
            .map(|k| k.scale_real((1.0 - epsilon).sqrt()))
            .collect(),
    )?;
    let inst = Instrument::new(succ, fail, d, m)?;
    let target = KrausChannel::identity(d);
    let report = amplify(&inst, &target, psi, l)?;
    let t = target.map().apply_matrix(&psi.projector())?;
    let fidelity = fidelity_of_matrices(&t, report.output_state.matrix());
    let crossing_n = contradiction_crossing(epsilon, m, d)?;
    let (c, _) = scaling_constant(epsilon, m, d)?;
    Ok(NogoReport {
        epsilon,
        m,
        l,
        d,
        success_weight: report.success_weight,
        closed_form: 1.0 - (1.0 - epsilon).powi(l as i32),
        fidelity,
        bound: 1.0 - c.powf(crossing_n as f64),
        crossing_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_random_unitary, random_state, rng_from_seed};

    fn plus() -> StateVector {
        StateVector::normalized(vec![2], vec![ONE, ONE]).unwrap()
    }

    #[test]
    fn scaled_identity_two_blocks() {
        let id = ComplexMatrix::identity(2);
        let inst = Instrument::heralded_unitary(&id, &id, 0.5).unwrap();
        let t = KrausChannel::identity(2);
        let psi = plus();
        let r = amplify(&inst, &t, &psi, 2).unwrap();
        assert!((r.success_weight - 0.75).abs() < 1e-12);
        assert!((r.branch_weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let expect = closed_form_output(&t, &psi, 0.5, 2).unwrap();
        assert!(r.output_state.matrix().max_abs_diff(&expect) < 1e-12);
        let full = amplify_full_tensor(&inst, &t, &psi, 2).unwrap();
        assert!(full.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn single_block() {
        let id = ComplexMatrix::identity(2);
        let inst = Instrument::heralded_unitary(&id, &id, 0.3).unwrap();
        let t = KrausChannel::identity(2);
        let psi = plus();
        let r = amplify(&inst, &t, &psi, 1).unwrap();
        let mut expect = psi.projector().scale_real(0.3);
        expect[(0, 0)] += C64::new(0.7, 0.0);
        assert!(r.output_state.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn unitary_success_branch() {
        let u = haar_random_unitary(2, 12).unwrap();
        let inst = Instrument::heralded_unitary(&u, &ComplexMatrix::identity(2), 0.9).unwrap();
        let t = KrausChannel::from_operator(u.clone()).unwrap();
        let psi = random_state(&[2], &mut rng_from_seed(2)).unwrap();
        let r = amplify(&inst, &t, &psi, 3).unwrap();
        let expect = closed_form_output(&t, &psi, 0.9, 3).unwrap();
        assert!(r.output_state.matrix().max_abs_diff(&expect) < 1e-12);
        let full = amplify_full_tensor(&inst, &t, &psi, 2).unwrap();
        let two = closed_form_output(&t, &psi, 0.9, 2).unwrap();
        assert!(full.max_abs_diff(&two) < 1e-12);
    }

    #[test]
    fn instrument_must_be_tp() {
        let id = ComplexMatrix::identity(2);
        let s = KrausChannel::from_operator(id.scale_real(0.5)).unwrap();
        let f = KrausChannel::from_operator(id.scale_real(0.5)).unwrap();
        assert!(matches!(
            Instrument::new(s, f, 2, 1),
            Err(Error::NotTracePreserving(_))
        ));
        assert!(Instrument::heralded_unitary(&id, &id, 0.0).is_err());
    }

    #[test]
    fn bound_values() {
        let b = fidelity_lower_bound(0.5, 1, 6, 2).unwrap();
        assert!((b.bound - 0.875).abs() < 1e-12);
        assert!(!b.degenerate);
        let b = fidelity_lower_bound(1.0, 1, 200, 2).unwrap();
        assert!((b.c - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!(b.bound > 1.0 - 1e-12);
        assert!(fidelity_lower_bound(1e-20, 1, 3, 2).unwrap().degenerate);
        assert!(fidelity_lower_bound(0.0, 1, 3, 2).is_err());
        assert!(fidelity_lower_bound(1.5, 1, 3, 2).is_err());
    }

    #[test]
    fn unot_values() {
        assert_eq!(unot_optimal_fidelity(1).unwrap(), 2.0 / 3.0);
        assert_eq!(unot_optimal_fidelity(2).unwrap(), 0.75);
        assert!(unot_optimal_fidelity(0).is_err());
    }

    #[test]
    fn crossing_values() {
        assert_eq!(contradiction_crossing(0.5, 1, 2).unwrap(), 7);
        assert_eq!(contradiction_crossing(1.0, 1, 2).unwrap(), 1);
        let mut prev = u64::MAX;
        for eps in [0.01, 0.05, 0.1, 0.3, 0.5, 0.8, 1.0] {
            let n = contradiction_crossing(eps, 1, 2).unwrap();
            assert!(n <= prev);
            prev = n;
        }
        // terminates for c extremely close to one
        assert!(contradiction_crossing(1e-13, 1, 2).unwrap() > 1_000_000);
    }

    #[test]
    fn report_fields() {
        let r = nogo_report(0.5, 1, 2, 2, &plus()).unwrap();
        assert!((r.success_weight - 0.75).abs() < 1e-12);
        assert_eq!(r.crossing_n, 7);
        assert!(r.fidelity >= 0.75 - 1e-10);
        let r2 = nogo_report(0.5, 2, 2, 2, &plus()).unwrap();
        assert!((r2.success_weight - 0.75).abs() < 1e-12);
    }
}
