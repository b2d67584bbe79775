//! Brute-force reference evaluators, written independently of the library's
//! optimized paths (own permutation enumeration, explicit index sums).

#![allow(dead_code)]

use conjcomb_core::tensor::{ComplexMatrix, StateVector, C64};

/// Heap's algorithm; returns every permutation of `0..k` with its sign.
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn heap(k: usize, a: &mut Vec<usize>, sign: &mut f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if k <= 1 {
            out.push((a.clone(), *sign));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, sign, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heap(k - 1, a, sign, out);
    }
    let mut a: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    let mut sign = 1.0;
    heap(k, &mut a, &mut sign, &mut out);
    out
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// `A_n` straight from its defining sum over `S_d`.
pub fn antisymmetrizer_oracle(d: usize, n: usize) -> ComplexMatrix {
    let m = d - n;
    let mut a = ComplexMatrix::zeros(d.pow(m as u32), d.pow(n as u32));
    let norm = 1.0 / (fact(n) * fact(m)).sqrt();
    for (p, s) in signed_permutations(d) {
        let row = p[n..].iter().fold(0, |acc, &x| acc * d + x);
        let col = p[..n].iter().fold(0, |acc, &x| acc * d + x);
        a[(row, col)] += C64::new(s * norm, 0.0);
    }
    a
}

/// Coefficient matrix `M` of `|ψ⟩ = Σ M_ab |a⟩|b⟩`.
pub fn coefficient_matrix(psi: &StateVector) -> ComplexMatrix {
    let (da, db) = (psi.dims()[0], psi.dims()[1]);
    ComplexMatrix::from_fn(da, db, |a, b| psi.amplitudes()[a * db + b])
}

/// `⟨ψ|^{•m} (A_w ⊗ A_v) |ψ*⟩^{•n}` by a double sum over `S_{n+m}`, where
/// `A_w` is the indexed antisymmetrizer with normalization `1/√((n+m)!)`.
///
/// Each pair of permutations `(π, σ)` contributes the matrix element between
/// the basis tuples it selects; the interleaved pairing of `H` and `K`
/// factors is spelled out index by index.
pub fn wedge_amplitude_oracle(
    psi: &StateVector,
    n: usize,
    m: usize,
    w: &[usize],
    v: &[usize],
) -> C64 {
    let k = n + m;
    let mm = coefficient_matrix(psi);
    let perms = signed_permutations(k);
    let mut total = C64::new(0.0, 0.0);
    for (p, sp) in &perms {
        for (q, sq) in &perms {
            // output copy j: (H, K) labels (w[p[n+j]], v[q[n+j]]); bra gives conj(M)
            let mut amp = C64::new(sp * sq, 0.0);
            for j in 0..m {
                amp *= mm[(w[p[n + j]], v[q[n + j]])].conj();
            }
            // input copy j: |ψ*⟩ supplies conj(M) at (w[p[j]], v[q[j]])
            for j in 0..n {
                amp *= mm[(w[p[j]], v[q[j]])].conj();
            }
            total += amp;
        }
    }
    total / fact(k)
}

/// `C^g` from the oracle: `A_1 = √(d!/(d−1)!) · A^{1;d−1}_{full}`.
pub fn concurrence_g_oracle(psi: &StateVector) -> f64 {
    let d = psi.dims()[0];
    let full: Vec<usize> = (0..d).collect();
    let scale = fact(d) / fact(d - 1);
    (wedge_amplitude_oracle(psi, 1, d - 1, &full, &full) * scale).norm()
}

/// `C_F^{n;m}` for `F = (E^{n;m})^{⊗2}` as `Σ_{w,v} |amplitude(w, v)|²`.
pub fn f_quantity_oracle(psi: &StateVector, n: usize, m: usize) -> f64 {
    let d = psi.dims()[0];
    let sets = increasing_sets(d, n + m);
    let mut total = 0.0;
    for w in &sets {
        for v in &sets {
            total += wedge_amplitude_oracle(psi, n, m, w, v).norm_sqr();
        }
    }
    total
}

pub fn increasing_sets(d: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << d)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..d).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Schmidt coefficients from the eigenvalues of `M M†` via Jacobi sweeps on
/// the real 2d×2d embedding, independent of the library SVD.
pub fn schmidt_oracle(psi: &StateVector) -> Vec<f64> {
    let mm = coefficient_matrix(psi);
    let g = &mm * &mm.adjoint();
    let n = g.rows();
    // real symmetric embedding [[Re, −Im], [Im, Re]] doubles every eigenvalue
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = g[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    let size = 2 * n;
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..size {
            for q in p + 1..size {
                off += a[p][q] * a[p][q];
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (arp, arq) = (row[p], row[q]);
                    row[p] = c * arp - s * arq;
                    row[q] = s * arp + c * arq;
                }
                let (top, bottom) = a.split_at_mut(q);
                for (xp, xq) in top[p].iter_mut().zip(bottom[0].iter_mut()) {
                    let (apr, aqr) = (*xp, *xq);
                    *xp = c * apr - s * aqr;
                    *xq = s * apr + c * aqr;
                }
            }
        }
        if off < 1e-32 {
            break;
        }
    }
    let mut ev: Vec<f64> = (0..size).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    // each eigenvalue appears twice
    ev.iter().step_by(2).copied().collect()
}

pub fn elementary_symmetric_oracle(l: &[f64], k: usize) -> f64 {
    increasing_sets(l.len(), k)
        .iter()
        .map(|s| s.iter().map(|&i| l[i]).product::<f64>())
        .sum()
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
