//! Dense complex matrices, pure states and density operators over a declared
//! tensor factorization.
//!
//! Basis labels are 0-based throughout: the label `|1⟩` of the usual 1-based
//! physics notation is index `0` here. Multi-factor indices are row-major with
//! the first factor most significant, so `|i j⟩` on dims `(dA, dB)` is
//! `i * dB + j`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    /// Builds a matrix from nested rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&(re, im)| C64::new(re, im)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// Column vector `|v⟩`.
    pub fn column(v: &[C64]) -> Self {
        Self::from_raw(v.len(), 1, v.to_vec())
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_vec(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z.conj()).collect(),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z * s).collect(),
        )
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance `max_ij |a_ij − b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            self.shape(),
            other.shape(),
            "shape mismatch in max_abs_diff"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_raw(self.rows, rhs.cols, out))
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A X A†`.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    /// `max |A†A − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = &self.adjoint() * self;
        g.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        Self::from_raw(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `self += s * rhs`.
    pub fn add_scaled(&mut self, rhs: &Self, s: C64) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += s * b;
        }
    }

    /// Hilbert-Schmidt inner product `tr[A† B]`.
    pub fn hs_inner(&self, rhs: &Self) -> C64 {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(16) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(16) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let cols = ca * cb;
    let mut data = vec![ZERO; ra * rb * cols];
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                let row = (i * rb + k) * cols + j * cb;
                for l in 0..cb {
                    data[row + l] = s * b[(k, l)];
                }
            }
        }
    }
    ComplexMatrix::from_raw(ra * rb, cols, data)
}

/// `u^{⊗k}`; `k = 0` gives the 1×1 identity.
pub fn tensor_power(u: &ComplexMatrix, k: usize) -> ComplexMatrix {
    (0..k).fold(ComplexMatrix::identity(1), |acc, _| kron(&acc, u))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Reorders the tensor factors of a flat amplitude array.
///
/// New factor `k` is old factor `perm[k]`.
pub fn permute_tensor(
    data: &[C64],
    dims: &[usize],
    perm: &[usize],
) -> Result<(Vec<C64>, Vec<usize>)> {
    validate_permutation(perm, dims.len())?;
    let total: usize = dims.iter().product();
    if data.len() != total {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for dims {dims:?}",
            data.len()
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    // stride in the old layout of each new factor
    let mapped: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let mut out = Vec::with_capacity(total);
    let mut counter = vec![0usize; dims.len()];
    let mut src = 0usize;
    for _ in 0..total {
        out.push(data[src]);
        for k in (0..new_dims.len()).rev() {
            counter[k] += 1;
            src += mapped[k];
            if counter[k] < new_dims[k] {
                break;
            }
            src -= mapped[k] * new_dims[k];
            counter[k] = 0;
        }
    }
    Ok((out, new_dims))
}

/// Reorders the factors of an operator on both sides.
pub fn permute_operator(
    op: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if op.shape() != (total, total) {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} over dims {dims:?}",
            op.rows(),
            op.cols()
        )));
    }
    // treat the operator as a 2n-factor tensor (row factors, column factors)
    let n = dims.len();
    let mut dd = dims.to_vec();
    dd.extend_from_slice(dims);
    let mut pp: Vec<usize> = perm.to_vec();
    pp.extend(perm.iter().map(|p| p + n));
    let (data, _) = permute_tensor(op.as_slice(), &dd, &pp)?;
    Ok(ComplexMatrix::from_raw(total, total, data))
}

pub(crate) fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {n} factors",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Applies the `d×d` matrix `u` to factor `k` of each column of a row-major
/// `rows × cols` block whose row index factorizes as `dims`.
///
/// Equivalent to left-multiplying by `I ⊗ … ⊗ u ⊗ … ⊗ I` without forming it.
pub(crate) fn apply_factor_rows(
    data: &mut Vec<C64>,
    dims: &[usize],
    cols: usize,
    k: usize,
    u: &ComplexMatrix,
) {
    let d = dims[k];
    debug_assert_eq!(u.shape(), (d, d));
    let pre: usize = dims[..k].iter().product();
    let post: usize = dims[k + 1..].iter().product();
    let block = post * cols;
    let mut out = vec![ZERO; data.len()];
    for a in 0..pre {
        let base = a * d * block;
        for i in 0..d {
            let dst = &mut out[base + i * block..base + (i + 1) * block];
            for j in 0..d {
                let c = u[(i, j)];
                if c == ZERO {
                    continue;
                }
                let src = &data[base + j * block..base + (j + 1) * block];
                for (o, &s) in dst.iter_mut().zip(src) {
                    *o += c * s;
                }
            }
        }
    }
    *data = out;
}

/// Left-multiplies a matrix whose rows factorize as `dims` by `⊗_k locals[k]`
/// (square, same factor dims).
pub(crate) fn apply_local_product_rows(
    x: &ComplexMatrix,
    dims: &[usize],
    locals: &[&ComplexMatrix],
) -> ComplexMatrix {
    let mut data = x.data.clone();
    for (k, u) in locals.iter().enumerate() {
        apply_factor_rows(&mut data, dims, x.cols, k, u);
    }
    ComplexMatrix::from_raw(x.rows, x.cols, data)
}

/// `U X U†` with `U = ⊗_k locals[k]`, applied factor by factor.
pub fn conjugate_by_local_product(
    x: &ComplexMatrix,
    dims: &[usize],
    locals: &[&ComplexMatrix],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if x.shape() != (total, total) || locals.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator, dims {dims:?}, {} local factors",
            x.rows,
            x.cols,
            locals.len()
        )));
    }
    for (u, &d) in locals.iter().zip(dims) {
        if u.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "local factor {}x{} on dim {d}",
                u.rows, u.cols
            )));
        }
    }
    let left = apply_local_product_rows(x, dims, locals);
    let both = apply_local_product_rows(&left.adjoint(), dims, locals);
    Ok(both.adjoint())
}

/// `u^{⊗k}` applied to the columns of `x` (rows factorized as `k` copies of `u`'s dim).
pub fn apply_tensor_power(u: &ComplexMatrix, k: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = u.rows();
    if !u.is_square() || d.checked_pow(k as u32) != Some(x.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} to the power {k} against {} rows",
            u.rows(),
            u.cols(),
            x.rows()
        )));
    }
    let dims = vec![d; k];
    let locals = vec![u; k];
    Ok(apply_local_product_rows(x, &dims, &locals))
}

/// Partial trace of an operator over the factors not listed in `keep`.
///
/// `keep` must be nonempty; the kept factors retain their relative order.
pub fn partial_trace_operator(
    op: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let (keep, traced) = split_factors(dims.len(), keep)?;
    let total: usize = dims.iter().product();
    if op.shape() != (total, total) {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} over dims {dims:?}",
            op.rows, op.cols
        )));
    }
    let mut perm = keep.clone();
    perm.extend(&traced);
    let permuted = permute_operator(op, dims, &perm)?;
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    Ok(ComplexMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| permuted[(i * dt + t, j * dt + t)]).sum()
    }))
}

fn split_factors(n: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::InvalidSubsystems("keep set is empty".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || sorted.iter().any(|&k| k >= n) {
        return Err(Error::InvalidSubsystems(format!(
            "{keep:?} for {n} factors"
        )));
    }
    let traced = (0..n).filter(|k| !sorted.contains(k)).collect();
    Ok((sorted, traced))
}

/// Applies Kraus operators to a subset of factors of a multipartite operator.
///
/// The targets are moved to the front (in the listed order), each Kraus
/// operator `K` (mapping `∏ dims[targets]` to `∏ out_dims`) acts as `K ⊗ I`,
/// and the result is returned with the output factors first followed by the
/// untouched factors in their original order.
pub fn apply_kraus_on_factors(
    rho: &ComplexMatrix,
    dims: &[usize],
    targets: &[usize],
    kraus: &[ComplexMatrix],
    out_dims: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    validate_targets(targets, dims.len())?;
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !targets.contains(k)).collect();
    let mut perm = targets.to_vec();
    perm.extend(&rest);
    let permuted = permute_operator(rho, dims, &perm)?;
    let din: usize = targets.iter().map(|&t| dims[t]).product();
    let dout: usize = out_dims.iter().product();
    let drest: usize = rest.iter().map(|&k| dims[k]).product();
    let n_out = dout * drest;
    let mut out = ComplexMatrix::zeros(n_out, n_out);
    for k in kraus {
        if k.shape() != (dout, din) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {}x{} for {din} -> {dout}",
                k.rows, k.cols
            )));
        }
        let big = kron(k, &ComplexMatrix::identity(drest));
        let term = big.conjugate(&permuted)?;
        out.add_scaled(&term, ONE);
    }
    let mut new_dims = out_dims.to_vec();
    new_dims.extend(rest.iter().map(|&k| dims[k]));
    Ok((out, new_dims))
}

fn validate_targets(targets: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &t in targets {
        if t >= n || seen[t] {
            return Err(Error::InvalidSubsystems(format!(
                "targets {targets:?} for {n} factors"
            )));
        }
        seen[t] = true;
    }
    if targets.is_empty() {
        return Err(Error::InvalidSubsystems("no target factors".into()));
    }
    Ok(())
}

/// Pure state over a declared tensor factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

pub const NORM_TOLERANCE: f64 = 1e-12;

impl StateVector {
    /// Validates dims and the unit norm (within `1e-12`).
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::OutOfRange(format!(
                "basis index {index} for dimension {total}"
            )));
        }
        let mut amps = vec![ZERO; total];
        amps[index] = ONE;
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// Entrywise complex conjugate `|ψ*⟩`.
    pub fn conj(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `|ψ⟩ ⊗ |φ⟩` with concatenated factor lists.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Applies a unitary to the whole register.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        let amps = u.matvec(&self.amplitudes)?;
        Self::normalized(self.dims.clone(), amps)
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidDimension(format!("factor dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != len {
        return Err(Error::DimensionMismatch(format!(
            "{len} amplitudes for dims {dims:?}"
        )));
    }
    Ok(())
}

/// Reorders the tensor factors of a state; new factor `k` is old factor `perm[k]`.
pub fn permute_subsystems(v: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let (amplitudes, dims) = permute_tensor(&v.amplitudes, &v.dims, perm)?;
    Ok(StateVector { dims, amplitudes })
}

/// Positive unit-trace operator over a declared tensor factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let total = dims.iter().product::<usize>();
        check_dims(&dims, total)?;
        if matrix.shape() != (total, total) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims {dims:?}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidTrace(tr));
        }
        let min = crate::linalg::hermitian_eigenvalues(&matrix)[0];
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { dims, matrix })
    }

    /// Hermitian-symmetrizes and rescales to unit trace before validating.
    pub fn from_unnormalized(dims: Vec<usize>, matrix: &ComplexMatrix) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(dims, h.scale_real(1.0 / tr))
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self {
            dims: psi.dims.clone(),
            matrix: psi.projector(),
        }
    }

    /// `I/d` on a single factor.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            dims: vec![d],
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.hs_inner(&self.matrix).re
    }
}

/// Partial trace keeping the listed factors.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let m = partial_trace_operator(&rho.matrix, &rho.dims, keep)?;
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    let dims = sorted.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityOperator {
        dims,
        matrix: m.hermitian_part(),
    })
}
