//! Dense complex linear algebra sized for multi-register quantum states.
//!
//! The workhorse type is [`CMatrix`], a row-major dense matrix of `Complex64`.
//! On top of it this module provides the tensor-product tools every other
//! module leans on (Kronecker products, partial traces, factor permutations,
//! single-factor conjugation) and a self-contained cyclic Jacobi eigensolver
//! for Hermitian matrices. Dimensions stay modest (a few thousand at most),
//! so straightforward dense algorithms are the right trade: no external
//! solver dependency, fully deterministic, and accurate to near machine
//! precision.

use crate::tol::DIM_CAP;
use crate::{Error, Result};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    /// Number of rows.
    pub rows: usize,
    /// Number of columns.
    pub cols: usize,
    /// Row-major entries, `data[i * cols + j]`.
    pub data: Vec<C64>,
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    /// All-zeros matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::ZERO; rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::ONE);
        }
        m
    }

    /// Build a matrix from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Build from nested row slices (handy in tests).
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        CMatrix { rows: r, cols: c, data }
    }

    /// Diagonal matrix from complex entries.
    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, c64(e, 0.0));
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    /// True when the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column `j` as a plain vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise sum.
    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Multiply every entry by a complex scalar.
    pub fn scale(&self, s: C64) -> CMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch in matmul");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        // i-k-j loop order keeps the inner traversal contiguous for row-major data.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let trow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (t, o) in trow.iter_mut().zip(orow) {
                    *t += a * o;
                }
            }
        }
        out
    }

    /// Trace (sum of diagonal entries).
    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise comparison within an absolute tolerance.
    pub fn approx_eq(&self, other: &CMatrix, atol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= atol
    }

    /// Hermitian within `atol` (largest deviation between `A` and `A†`).
    pub fn is_hermitian(&self, atol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > atol {
                    return false;
                }
            }
        }
        true
    }

    /// Unitary within `atol` (`A† A = I` entrywise).
    pub fn is_unitary(&self, atol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = self.dagger().matmul(self);
        prod.max_abs_diff(&CMatrix::identity(self.rows)) <= atol
    }

    /// Replace the matrix by its Hermitian part `(A + A†)/2`.
    pub fn hermitize(&self) -> CMatrix {
        assert!(self.is_square(), "hermitize of non-square matrix");
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Outer product `|u><v|` (conjugating `v`).
pub fn vec_outer(u: &[C64], v: &[C64]) -> CMatrix {
    CMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// Inner product `<u|v>` (conjugating `u`).
pub fn vec_inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "dimension mismatch in inner product");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Matrix-vector product.
pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    assert_eq!(m.cols, v.len(), "dimension mismatch in mat_vec");
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j) * v[j]).sum())
        .collect()
}

/// Kronecker product `a ⊗ b`.
///
/// Fails when the resulting row or column count would exceed the global
/// dimension cap; the cap protects against accidental exponential blowups
/// when composing many registers, not against memory limits per se.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or(Error::DimensionCap(usize::MAX, DIM_CAP))?;
    let cols = a.cols.checked_mul(b.cols).ok_or(Error::DimensionCap(usize::MAX, DIM_CAP))?;
    if rows > DIM_CAP || cols > DIM_CAP {
        return Err(Error::DimensionCap(rows.max(cols), DIM_CAP));
    }
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let av = a.get(i, j);
            if av == C64::ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, av * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> Result<CMatrix> {
    assert!(!factors.is_empty(), "kron_all needs at least one factor");
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = kron(&acc, f)?;
    }
    Ok(acc)
}

fn check_dims(m: &CMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!("expected square matrix, got {}x{}", m.rows, m.cols)));
    }
    let total: usize = dims.iter().product();
    if total != m.rows || dims.iter().any(|&d| d == 0) {
        return Err(Error::Shape(format!(
            "subsystem dims {:?} do not factor dimension {}",
            dims, m.rows
        )));
    }
    Ok(())
}

/// Flat-index strides for a list of subsystem dimensions.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over the selected subsystems.
fn subsystem_offsets(dims: &[usize], subset: &[usize], stride: &[usize]) -> Vec<usize> {
    let count: usize = subset.iter().map(|&i| dims[i]).product();
    let mut offsets = Vec::with_capacity(count);
    for mut idx in 0..count {
        let mut off = 0usize;
        for &sub in subset.iter().rev() {
            let d = dims[sub];
            off += (idx % d) * stride[sub];
            idx /= d;
        }
        offsets.push(off);
    }
    offsets
}

/// Partial trace over the subsystems *not* listed in `keep`.
///
/// `dims` are the tensor factors of `m` in order; `keep` must be strictly
/// increasing. The kept subsystems retain their original relative order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(m, dims)?;
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape(format!(
            "keep set {:?} invalid for {} subsystems",
            keep,
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let stride = strides(dims);
    let keep_off = subsystem_offsets(dims, keep, &stride);
    let trace_off = subsystem_offsets(dims, &traced, &stride);
    let dk = keep_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            let mut acc = C64::ZERO;
            for &t in &trace_off {
                acc += m.get(ro + t, co + t);
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Reorder tensor factors: output factor `k` is input factor `perm[k]`.
pub fn permute_systems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    check_dims(m, dims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Shape(format!("invalid permutation {:?}", perm)));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_stride = strides(dims);
    let new_stride = strides(&new_dims);
    let total = m.rows;
    // Map every old flat index to its new position once, then copy entries.
    let mut map = vec![0usize; total];
    for old in 0..total {
        let mut new_idx = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            let digit = (old / old_stride[p]) % dims[p];
            new_idx += digit * new_stride[k];
        }
        map[old] = new_idx;
    }
    let mut out = CMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out.set(map[r], map[c], m.get(r, c));
        }
    }
    Ok(out)
}

/// Conjugate one tensor factor: `(I ⊗ u ⊗ I) m (I ⊗ u ⊗ I)†`.
///
/// Costs `O(dim² · dims[idx])` — much cheaper than embedding `u` densely and
/// doing two full matrix products.
pub fn conjugate_factor(m: &CMatrix, dims: &[usize], idx: usize, u: &CMatrix) -> Result<CMatrix> {
    check_dims(m, dims)?;
    if idx >= dims.len() || u.rows != dims[idx] || !u.is_square() {
        return Err(Error::Shape(format!(
            "factor {} of dims {:?} incompatible with {}x{} operator",
            idx, dims, u.rows, u.cols
        )));
    }
    let d = dims[idx];
    let right: usize = dims[idx + 1..].iter().product();
    let total = m.rows;
    let block = d * right; // contiguous span covering the factor and everything right of it
    // Left multiply by (I ⊗ u ⊗ I).
    let mut tmp = CMatrix::zeros(total, total);
    for base in (0..total).step_by(block) {
        for a in 0..d {
            for b in 0..d {
                let w = u.get(a, b);
                if w == C64::ZERO {
                    continue;
                }
                for r in 0..right {
                    let dst = (base + a * right + r) * total;
                    let src = (base + b * right + r) * total;
                    for col in 0..total {
                        tmp.data[dst + col] += w * m.data[src + col];
                    }
                }
            }
        }
    }
    // Right multiply by (I ⊗ u ⊗ I)†: out[.., (l,a,r)] = Σ_b tmp[.., (l,b,r)] conj(u[a,b]).
    let mut out = CMatrix::zeros(total, total);
    for row in 0..total {
        let trow = &tmp.data[row * total..(row + 1) * total];
        let orow = &mut out.data[row * total..(row + 1) * total];
        for base in (0..total).step_by(block) {
            for a in 0..d {
                for b in 0..d {
                    let w = u.get(a, b).conj();
                    if w == C64::ZERO {
                        continue;
                    }
                    for r in 0..right {
                        orow[base + a * right + r] += trow[base + b * right + r] * w;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Dense embedding `I ⊗ u ⊗ I` of an operator on one tensor factor.
pub fn embed_factor(u: &CMatrix, dims: &[usize], idx: usize) -> Result<CMatrix> {
    if idx >= dims.len() || u.rows != dims[idx] || !u.is_square() {
        return Err(Error::Shape(format!(
            "factor {} of dims {:?} incompatible with {}x{} operator",
            idx, dims, u.rows, u.cols
        )));
    }
    let left: usize = dims[..idx].iter().product();
    let right: usize = dims[idx + 1..].iter().product();
    let eye_l = CMatrix::identity(left);
    let eye_r = CMatrix::identity(right);
    kron_all(&[&eye_l, u, &eye_r])
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary whose column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// Rebuild `V diag(λ) V†` (used by tests and by matrix functions).
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows;
        let mut scaled = v.clone();
        for j in 0..n {
            let w = c64(self.eigenvalues[j], 0.0);
            for i in 0..n {
                scaled.set(i, j, v.get(i, j) * w);
            }
        }
        scaled.matmul(&v.dagger())
    }

    /// Apply a real function to the spectrum: `V diag(f(λ)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows;
        let mut scaled = v.clone();
        for j in 0..n {
            let w = c64(f(self.eigenvalues[j]), 0.0);
            for i in 0..n {
                scaled.set(i, j, v.get(i, j) * w);
            }
        }
        scaled.matmul(&v.dagger())
    }
}

/// Relative Frobenius threshold at which the Jacobi sweep loop stops.
const JACOBI_CONV: f64 = 1e-12;
/// Hard cap on Jacobi sweeps; random Hermitian input converges in well under
/// twenty, so hitting the cap signals a genuine problem.
const JACOBI_MAX_SWEEPS: usize = 100;
/// A matrix is accepted as Hermitian if `max|A - A†|` stays below this times
/// `max(1, max|A|)`.
const HERMITICITY_TOL: f64 = 1e-10;

fn offdiag_norm(m: &CMatrix) -> f64 {
    let n = m.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += m.get(i, j).norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

/// Cyclic complex Jacobi iteration. Returns eigenvalues (ascending) and,
/// when requested, the matching eigenvector matrix.
fn jacobi(a: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    if !a.is_square() {
        return Err(Error::Shape(format!("eigh of non-square {}x{}", a.rows, a.cols)));
    }
    let scale = a.max_abs().max(1.0);
    if !a.is_hermitian(HERMITICITY_TOL * scale) {
        return Err(Error::Domain("matrix is not Hermitian within tolerance".into()));
    }
    let n = a.rows;
    let mut m = a.hermitize();
    // Eigenvectors accumulated as rows of Vᵀ so every update is contiguous.
    let mut vt = if want_vectors { Some(CMatrix::identity(n)) } else { None };
    let anorm = m.frobenius_norm();
    let target = JACOBI_CONV * anorm;
    if anorm == 0.0 || n <= 1 {
        let eigs: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
        return Ok((eigs, vt));
    }
    // Entries individually below this cannot keep the off-diagonal norm
    // above the target, so late sweeps skip them instead of rotating noise.
    let skip = target / n as f64;
    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if offdiag_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let beta = apq.norm();
                if beta <= skip {
                    continue;
                }
                let phase = apq / beta; // apq = beta * phase, |phase| = 1
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (aqq - app) / (2.0 * beta);
                // Stable root of t² − 2τt − 1 = 0, the zeroing condition for
                // the phase-stripped block under [[c, −s], [s, c]].
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // 2x2 unitary U = [[cs, -sn], [conj(phase) sn, conj(phase) cs]]
                // diagonalizes the (p,q) block; apply A <- U† A U.
                let u_qp = phase.conj() * sn;
                let u_qq = phase.conj() * cs;
                // Column update: A <- A U.
                for i in 0..n {
                    let aip = m.get(i, p);
                    let aiq = m.get(i, q);
                    m.set(i, p, aip * cs + aiq * u_qp);
                    m.set(i, q, -aip * sn + aiq * u_qq);
                }
                // Row update: A <- U† A.
                for j in 0..n {
                    let row_p = p * n + j;
                    let row_q = q * n + j;
                    let apj = m.data[row_p];
                    let aqj = m.data[row_q];
                    m.data[row_p] = apj * cs + aqj * u_qp.conj();
                    m.data[row_q] = -apj * sn + aqj * u_qq.conj();
                }
                // Clean the rotated block: exact zeros off-diagonal, real diagonal.
                m.set(p, q, C64::ZERO);
                m.set(q, p, C64::ZERO);
                let dp = m.get(p, p);
                let dq = m.get(q, q);
                m.set(p, p, c64(dp.re, 0.0));
                m.set(q, q, c64(dq.re, 0.0));
                if let Some(vt) = vt.as_mut() {
                    // V <- V U mixes columns p,q of V, i.e. rows p,q of Vᵀ.
                    for j in 0..n {
                        let vp = vt.data[p * n + j];
                        let vq = vt.data[q * n + j];
                        vt.data[p * n + j] = vp * cs + vq * u_qp;
                        vt.data[q * n + j] = -vp * sn + vq * u_qq;
                    }
                }
            }
        }
    }
    if !converged && offdiag_norm(&m) > target {
        return Err(Error::Convergence(format!(
            "Jacobi did not converge in {} sweeps (off-diagonal {:.3e}, target {:.3e})",
            JACOBI_MAX_SWEEPS,
            offdiag_norm(&m),
            target
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let vectors = vt.map(|vt| {
        // Column k of the output is row order[k] of Vᵀ.
        CMatrix::from_fn(n, n, |i, k| vt.get(order[k], i))
    });
    Ok((sorted, vectors))
}

/// Eigendecomposition of a Hermitian matrix (cyclic complex Jacobi).
///
/// The input may deviate from exact Hermiticity by floating-point noise; it
/// is symmetrized before iterating. Eigenvalues come back ascending.
pub fn eigh(a: &CMatrix) -> Result<SpectralDecomposition> {
    let (eigenvalues, vectors) = jacobi(a, true)?;
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: vectors.unwrap() })
}

/// Eigenvalues only (ascending); skips eigenvector accumulation.
pub fn eigvalsh(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(a, false)?.0)
}

/// Trace norm `‖A‖₁ = Tr √(A†A)` (sum of singular values).
///
/// Hermitian inputs take the direct spectral route; general square inputs go
/// through `A†A`.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    if a.is_square() && a.is_hermitian(1e-12 * a.max_abs().max(1.0)) {
        return Ok(eigvalsh(a)?.iter().map(|l| l.abs()).sum());
    }
    let gram = a.dagger().matmul(a);
    Ok(eigvalsh(&gram)?.iter().map(|l| l.max(0.0).sqrt()).sum())
}

/// Trace distance `½‖a − b‖₁`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&a.sub(b))?)
}

/// Rigorous upper bound on the trace distance: `½ √rank · ‖a−b‖_F ≤ ½√n‖·‖_F`.
///
/// Cheap certificate used by large-dimension tests: when it already sits
/// below the tolerance there is no need for an eigensolve.
pub fn trace_distance_upper(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * (a.rows as f64).sqrt() * a.sub(b).frobenius_norm()
}

/// Positive-semidefinite square root via the spectral decomposition,
/// clipping tiny negative eigenvalues to zero.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let dec = eigh(a)?;
    if let Some(l) = dec.eigenvalues.first() {
        if *l < -crate::tol::ATOL_EXACT {
            return Err(Error::Domain(format!("matrix has negative eigenvalue {:.3e}", l)));
        }
    }
    Ok(dec.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

/// Root fidelity `F(ρ,σ) = Tr √(√ρ σ √ρ)`, in `[0, 1]` for density inputs.
pub fn root_fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.rows != sigma.rows || !rho.is_square() || !sigma.is_square() {
        return Err(Error::Shape("fidelity needs equal square matrices".into()));
    }
    let s = psd_sqrt(rho)?;
    let inner = s.matmul(sigma).matmul(&s).hermitize();
    let eigs = eigvalsh(&inner)?;
    if let Some(l) = eigs.first() {
        if *l < -crate::tol::ATOL_EXACT {
            return Err(Error::Domain(format!(
                "fidelity inner matrix has negative eigenvalue {:.3e}",
                l
            )));
        }
    }
    Ok(eigs.iter().map(|l| l.max(0.0).sqrt()).sum())
}
