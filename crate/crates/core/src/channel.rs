//! Completely positive maps in Kraus form, their Choi operators and
//! trace-preserving completions.
//!
//! Choi convention: `F̃ = Σ_ij |i⟩⟨j| ⊗ F(|i⟩⟨j|)` with the input factor first,
//! i.e. `(id ⊗ F)(|Φ⟩⟨Φ|)` for the unnormalized `|Φ⟩ = Σ_i |i i⟩`.

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::tensor::{kron, partial_trace_operator, ComplexMatrix, DensityOperator, C64, ONE, ZERO};

/// Tolerance for trace non-increase and trace preservation.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// A completely positive map given by Kraus operators, with no trace constraint.
#[derive(Clone, Debug)]
pub struct CpMap {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl CpMap {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidDimension(format!("{dim_in} -> {dim_out}")));
        }
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} for a {dim_in} -> {dim_out} map",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    /// `X ↦ O X O†`.
    pub fn from_operator(o: ComplexMatrix) -> Self {
        Self {
            dim_in: o.cols(),
            dim_out: o.rows(),
            kraus: vec![o],
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ K†K`.
    pub fn kraus_sum(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s.add_scaled(&(&k.adjoint() * k), ONE);
        }
        s
    }

    /// `Σ K X K†`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} input for a map on dimension {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out.add_scaled(&k.conjugate(x)?, ONE);
        }
        Ok(out)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CpMap) -> Result<CpMap> {
        if self.dim_out != next.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "composing {} -> {} with {} -> {}",
                self.dim_in, self.dim_out, next.dim_in, next.dim_out
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        CpMap::new(self.dim_in, next.dim_out, kraus)
    }

    /// `self + other` as Kraus-list concatenation.
    pub fn sum(&self, other: &CpMap) -> Result<CpMap> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch(
                "summing maps of different shape".into(),
            ));
        }
        let mut kraus = self.kraus.clone();
        kraus.extend(other.kraus.iter().cloned());
        CpMap::new(self.dim_in, self.dim_out, kraus)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &CpMap) -> CpMap {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| kron(a, b)))
            .collect();
        CpMap {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            kraus,
        }
    }
}

impl AsRef<CpMap> for CpMap {
    fn as_ref(&self) -> &CpMap {
        self
    }
}

/// Trace non-increasing CP map.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    map: CpMap,
    is_tp: bool,
}

impl KrausChannel {
    /// Rejects Kraus lists with `Σ K†K ≰ I` (tolerance [`TRACE_TOLERANCE`]).
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::from_map(CpMap::new(dim_in, dim_out, kraus)?)
    }

    pub fn from_map(map: CpMap) -> Result<Self> {
        let s = map.kraus_sum();
        let tp_dev = s.max_abs_diff(&ComplexMatrix::identity(map.dim_in));
        if tp_dev <= TRACE_TOLERANCE {
            return Ok(Self { map, is_tp: true });
        }
        let top = *hermitian_eigenvalues(&s).last().expect("nonempty");
        if top > 1.0 + TRACE_TOLERANCE {
            return Err(Error::TraceIncreasing(top - 1.0));
        }
        Ok(Self { map, is_tp: false })
    }

    /// `U[O] : ρ ↦ O ρ O†`.
    pub fn from_operator(o: ComplexMatrix) -> Result<Self> {
        Self::from_map(CpMap::from_operator(o))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            map: CpMap::from_operator(ComplexMatrix::identity(d)),
            is_tp: true,
        }
    }

    /// `ρ ↦ tr(ρ) I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let s = 1.0 / (d as f64).sqrt();
        let mut kraus = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = C64::new(s, 0.0);
                kraus.push(k);
            }
        }
        Self {
            map: CpMap {
                dim_in: d,
                dim_out: d,
                kraus,
            },
            is_tp: true,
        }
    }

    pub fn map(&self) -> &CpMap {
        &self.map
    }

    pub fn dim_in(&self) -> usize {
        self.map.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.map.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.map.kraus
    }

    pub fn is_tp(&self) -> bool {
        self.is_tp
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        Self::from_map(self.map.then(&next.map)?)
    }

    pub fn sum(&self, other: &KrausChannel) -> Result<KrausChannel> {
        Self::from_map(self.map.sum(&other.map)?)
    }

    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        KrausChannel {
            map: self.map.tensor(&other.map),
            is_tp: self.is_tp && other.is_tp,
        }
    }
}

impl AsRef<CpMap> for KrausChannel {
    fn as_ref(&self) -> &CpMap {
        &self.map
    }
}

/// Choi operator on `H_in ⊗ H_out`.
#[derive(Clone, Debug)]
pub struct ChoiOperator {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: ComplexMatrix,
}

impl ChoiOperator {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let side = dim_in * dim_out;
        if matrix.shape() != (side, side) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Choi matrix for {dim_in} -> {dim_out}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            matrix,
        })
    }

    /// `tr_out F̃`, which equals `(Σ K†K)^T`.
    pub fn partial_trace_output(&self) -> ComplexMatrix {
        partial_trace_operator(&self.matrix, &[self.dim_in, self.dim_out], &[0])
            .expect("valid shape")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    pub fn is_psd(&self, floor: f64) -> bool {
        self.matrix.is_hermitian(1e-10) && self.min_eigenvalue() >= floor
    }

    /// Trace preservation read off the Choi operator: `tr_out F̃ = I`.
    pub fn is_tp(&self, tol: f64) -> bool {
        self.partial_trace_output()
            .max_abs_diff(&ComplexMatrix::identity(self.dim_in))
            <= tol
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Choi operator of a CP map: `Σ_K |v_K⟩⟨v_K|` with `|v_K⟩ = Σ_i |i⟩ ⊗ K|i⟩`.
pub fn choi_of<M: AsRef<CpMap>>(map: &M) -> ChoiOperator {
    let map = map.as_ref();
    let (din, dout) = (map.dim_in, map.dim_out);
    let side = din * dout;
    let mut matrix = ComplexMatrix::zeros(side, side);
    for k in &map.kraus {
        let mut v = vec![ZERO; side];
        for i in 0..din {
            for o in 0..dout {
                v[i * dout + o] = k[(o, i)];
            }
        }
        let nz: Vec<usize> = (0..side).filter(|&i| v[i] != ZERO).collect();
        for &a in &nz {
            for &b in &nz {
                matrix[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    ChoiOperator {
        dim_in: din,
        dim_out: dout,
        matrix,
    }
}

/// Output of a trace non-increasing map together with its success weight.
#[derive(Clone, Debug)]
pub struct ChannelOutput {
    /// `Σ K ρ K†` (unnormalized).
    pub matrix: ComplexMatrix,
    /// `tr Σ K ρ K†`.
    pub weight: f64,
}

pub fn apply(ch: &KrausChannel, rho: &DensityOperator) -> Result<ChannelOutput> {
    let matrix = ch.map.apply_matrix(rho.matrix())?;
    let weight = matrix.trace().re;
    Ok(ChannelOutput { matrix, weight })
}

/// Extends a single-Kraus map `U[A]` that is isometric on `domain_projector`
/// to a trace-preserving channel.
///
/// The added Kraus operators are consecutive row blocks of `I − P`, so they
/// vanish on the domain and `Σ K†K = A†A + (I − P) = I`.
pub fn complete_to_tp(
    iso: &KrausChannel,
    domain_projector: &ComplexMatrix,
) -> Result<KrausChannel> {
    let [a] = iso.kraus() else {
        return Err(Error::NotIsometry(f64::NAN));
    };
    let (dout, din) = a.shape();
    if domain_projector.shape() != (din, din) {
        return Err(Error::DimensionMismatch(format!(
            "domain projector {}x{} for input dimension {din}",
            domain_projector.rows(),
            domain_projector.cols()
        )));
    }
    let dev = (&a.adjoint() * a).max_abs_diff(domain_projector);
    if dev > TRACE_TOLERANCE {
        return Err(Error::NotIsometry(dev));
    }
    let complement = &ComplexMatrix::identity(din) - domain_projector;
    let mut kraus = vec![a.clone()];
    for start in (0..din).step_by(dout) {
        let block = ComplexMatrix::from_fn(dout, din, |r, c| {
            let row = start + r;
            if row < din {
                complement[(row, c)]
            } else {
                ZERO
            }
        });
        if block.max_abs() > 1e-14 {
            kraus.push(block);
        }
    }
    let ch = KrausChannel::new(din, dout, kraus)?;
    if !ch.is_tp() {
        let dev = ch
            .map
            .kraus_sum()
            .max_abs_diff(&ComplexMatrix::identity(din));
        return Err(Error::NotTracePreserving(dev));
    }
    Ok(ch)
}
