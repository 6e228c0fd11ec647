//! Measurement bases, multi-register density states, and device
//! distributions.
//!
//! A [`Basis`] is an orthonormal basis of `C^d` stored as the columns of a
//! unitary. A [`DensityState`] is a density operator together with the
//! dimensions and names of its tensor factors, so callers address registers
//! by label ("S", "M1", ...) instead of hand-counting Kronecker positions.
//! A [`DeviceDistribution`] is the classical preparation of a pointer
//! register: a probability vector over computational basis values.
//!
//! All random constructions (Haar bases, random densities) take explicit
//! seeds and use a fixed portable generator, so every artifact derived from
//! them is reproducible bit for bit.

use crate::linalg::{
    c64, conjugate_factor, eigh, eigvalsh, kron, partial_trace, permute_systems, vec_inner,
    vec_norm, vec_outer, CMatrix, C64,
};
use crate::tol::{ATOL_EXACT, EIG_FLOOR};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Orthonormal measurement basis of `C^d`; column `j` of `vectors` is `|b_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    /// Unitary matrix whose columns are the basis vectors.
    pub vectors: CMatrix,
}

impl Basis {
    /// Wrap a unitary as a basis, checking orthonormality.
    pub fn new(vectors: CMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::Shape("basis matrix must be square".into()));
        }
        if !vectors.is_unitary(ATOL_EXACT) {
            return Err(Error::Domain("basis columns are not orthonormal".into()));
        }
        Ok(Basis { vectors })
    }

    /// The computational basis `{|0>, ..., |d-1>}`.
    pub fn standard(d: usize) -> Self {
        Basis { vectors: CMatrix::identity(d) }
    }

    /// The discrete Fourier basis: `|f_k> = d^{-1/2} Σ_j ω^{jk} |j>`.
    pub fn fourier(d: usize) -> Self {
        let norm = 1.0 / (d as f64).sqrt();
        let vectors = CMatrix::from_fn(d, d, |j, k| {
            let angle = 2.0 * PI * (j * k % d) as f64 / d as f64;
            c64(norm * angle.cos(), norm * angle.sin())
        });
        Basis { vectors }
    }

    /// Real rotation of the qubit basis by `theta`:
    /// `|b_0> = (cos θ, sin θ)`, `|b_1> = (−sin θ, cos θ)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let vectors = CMatrix::from_rows(&[
            &[c64(c, 0.0), c64(-s, 0.0)],
            &[c64(s, 0.0), c64(c, 0.0)],
        ]);
        Basis { vectors }
    }

    /// Haar-random basis of `C^d`, deterministic in `seed`.
    pub fn haar(d: usize, seed: u64) -> Self {
        Basis { vectors: haar_unitary(d, seed) }
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.vectors.rows
    }

    /// Basis vector `|b_j>`.
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column(j)
    }

    /// Rank-one projector `|b_j><b_j|`.
    pub fn projector(&self, j: usize) -> CMatrix {
        let v = self.vector(j);
        vec_outer(&v, &v)
    }

    /// True when every overlap with `other` equals `1/d` within `atol`
    /// (mutually unbiased bases).
    pub fn is_mub_with(&self, other: &Basis, atol: f64) -> bool {
        let d = self.dim();
        if other.dim() != d {
            return false;
        }
        let inv_d = 1.0 / d as f64;
        overlap_matrix(self, other)
            .iter()
            .flatten()
            .all(|p| (p - inv_d).abs() <= atol)
    }
}

/// All squared overlaps `|<x_j|z_k>|²` as a `d × d` table indexed `[j][k]`.
pub fn overlap_matrix(x: &Basis, z: &Basis) -> Vec<Vec<f64>> {
    let d = x.dim();
    assert_eq!(d, z.dim(), "basis dimension mismatch");
    // Column j of X† Z is the amplitude vector <x_·|z_j>; build it in one product.
    let gram = x.vectors.dagger().matmul(&z.vectors);
    (0..d)
        .map(|j| (0..d).map(|k| gram.get(j, k).norm_sqr()).collect())
        .collect()
}

/// Maximum squared overlap `c = max_{j,k} |<x_j|z_k>|²` between two bases.
///
/// `c = 1/d` iff the bases are mutually unbiased; `c = 1` iff they share a
/// vector (up to phase).
pub fn overlap_c(x: &Basis, z: &Basis) -> f64 {
    overlap_matrix(x, z)
        .iter()
        .flatten()
        .fold(0.0, |m, &p| m.max(p))
}

/// Transition distribution `{|<x_j|z_k>|²}_k` for one fixed `j`.
pub fn overlap_row(x: &Basis, z: &Basis, j: usize) -> Vec<f64> {
    overlap_matrix(x, z)[j].clone()
}

/// Phase operator of a basis: `Σ_j ω^j |b_j><b_j|` with `ω = e^{2πi/d}`.
pub fn phase_operator(b: &Basis) -> CMatrix {
    let d = b.dim();
    let w = &b.vectors;
    let phases: Vec<C64> = (0..d)
        .map(|j| {
            let angle = 2.0 * PI * j as f64 / d as f64;
            c64(angle.cos(), angle.sin())
        })
        .collect();
    let mut scaled = w.clone();
    for j in 0..d {
        for i in 0..d {
            scaled.set(i, j, w.get(i, j) * phases[j]);
        }
    }
    scaled.matmul(&w.dagger())
}

/// Cyclic shift on the computational basis: `Σ_k |k+1 mod d><k|`.
pub fn shift_operator(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { C64::ONE } else { C64::ZERO })
}

/// Density operator over named tensor factors.
#[derive(Debug, Clone)]
pub struct DensityState {
    /// The density matrix on the full product space.
    pub op: CMatrix,
    /// Dimension of each tensor factor, in order.
    pub dims: Vec<usize>,
    /// Unique name of each tensor factor, in order.
    pub labels: Vec<String>,
}

impl DensityState {
    /// Build and fully validate (Hermitian, unit trace, positive
    /// semidefinite within tolerance).
    pub fn new(op: CMatrix, dims: &[usize], labels: &[&str]) -> Result<Self> {
        let state = Self::assemble(op, dims, labels)?;
        state.validate()?;
        Ok(state)
    }

    /// Build without the eigenvalue check. For internal use on states
    /// produced by trace-preserving maps from validated inputs.
    pub(crate) fn new_unchecked(op: CMatrix, dims: Vec<usize>, labels: Vec<String>) -> Self {
        DensityState { op, dims, labels }
    }

    fn assemble(op: CMatrix, dims: &[usize], labels: &[&str]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !op.is_square() || op.rows != total {
            return Err(Error::Shape(format!(
                "operator is {}x{} but dims {:?} give {}",
                op.rows, op.cols, dims, total
            )));
        }
        if labels.len() != dims.len() {
            return Err(Error::Shape("one label per tensor factor required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if labels.iter().any(|l| !seen.insert(*l)) {
            return Err(Error::Shape(format!("duplicate subsystem label in {:?}", labels)));
        }
        Ok(DensityState {
            op,
            dims: dims.to_vec(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Rank-one state from a normalized vector.
    pub fn from_pure(psi: &[C64], dims: &[usize], labels: &[&str]) -> Result<Self> {
        if (vec_norm(psi) - 1.0).abs() > ATOL_EXACT {
            return Err(Error::Domain(format!(
                "pure state vector has norm {:.12}, expected 1",
                vec_norm(psi)
            )));
        }
        Self::assemble(vec_outer(psi, psi), dims, labels)
    }

    /// Check the density-operator invariants.
    pub fn validate(&self) -> Result<()> {
        let scale = self.op.max_abs().max(1.0);
        if !self.op.is_hermitian(ATOL_EXACT * scale) {
            return Err(Error::Domain("state is not Hermitian".into()));
        }
        let tr = self.op.trace();
        if (tr.re - 1.0).abs() > ATOL_EXACT || tr.im.abs() > ATOL_EXACT {
            return Err(Error::Domain(format!("state trace is {:.12}+{:.3e}i, expected 1", tr.re, tr.im)));
        }
        let eigs = eigvalsh(&self.op)?;
        if let Some(l) = eigs.first() {
            if *l < -ATOL_EXACT {
                return Err(Error::Domain(format!("state has negative eigenvalue {:.3e}", l)));
            }
        }
        Ok(())
    }

    /// Total Hilbert-space dimension.
    pub fn total_dim(&self) -> usize {
        self.op.rows
    }

    /// Position of a labeled factor.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Partial trace keeping only the named factors (in their current order).
    pub fn reduce(&self, keep_labels: &[&str]) -> Result<DensityState> {
        let mut keep: Vec<usize> = keep_labels
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<_>>()?;
        keep.sort_unstable();
        keep.dedup();
        let op = partial_trace(&self.op, &self.dims, &keep)?;
        let dims: Vec<usize> = keep.iter().map(|&i| self.dims[i]).collect();
        let labels: Vec<String> = keep.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(DensityState { op, dims, labels })
    }

    /// Reorder factors into the order given by `new_order` labels.
    pub fn permute(&self, new_order: &[&str]) -> Result<DensityState> {
        let perm: Vec<usize> = new_order
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<_>>()?;
        if perm.len() != self.dims.len() {
            return Err(Error::Shape("permutation must mention every factor".into()));
        }
        let op = permute_systems(&self.op, &self.dims, &perm)?;
        let dims = perm.iter().map(|&i| self.dims[i]).collect();
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(DensityState { op, dims, labels })
    }

    /// Replace all labels (dimension layout unchanged).
    pub fn relabel(mut self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.dims.len() {
            return Err(Error::Shape("one label per tensor factor required".into()));
        }
        self.labels = labels.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    /// `Tr ρ²` — equals 1 exactly on pure states. For Hermitian ρ this is
    /// the squared Frobenius norm, so no product is formed.
    pub fn purity(&self) -> f64 {
        let f = self.op.frobenius_norm();
        f * f
    }

    /// Outcome distribution of a projective measurement of one factor.
    pub fn probs_in_basis(&self, label: &str, basis: &Basis) -> Result<Vec<f64>> {
        let reduced = self.reduce(&[label])?;
        let d = reduced.total_dim();
        if basis.dim() != d {
            return Err(Error::Shape("basis dimension does not match factor".into()));
        }
        Ok((0..d)
            .map(|j| {
                let v = basis.vector(j);
                let mv = crate::linalg::mat_vec(&reduced.op, &v);
                vec_inner(&v, &mv).re
            })
            .collect())
    }
}

/// Remove coherences of one factor in a given basis:
/// `ρ ↦ Σ_j (|b_j><b_j| ⊗ 1) ρ (|b_j><b_j| ⊗ 1)`.
///
/// The register afterwards carries the classical measurement record in the
/// chosen basis.
pub fn dephase(state: &DensityState, label: &str, basis: &Basis) -> Result<DensityState> {
    let idx = state.index_of(label)?;
    let d = state.dims[idx];
    if basis.dim() != d {
        return Err(Error::Shape("basis dimension does not match factor".into()));
    }
    // Rotate the factor into the basis frame, drop cross-blocks, rotate back.
    let rotated = conjugate_factor(&state.op, &state.dims, idx, &basis.vectors.dagger())?;
    let right: usize = state.dims[idx + 1..].iter().product();
    let total = rotated.rows;
    let block = d * right;
    let mut kept = CMatrix::zeros(total, total);
    for r in 0..total {
        let digit_r = (r % block) / right;
        for c in 0..total {
            let digit_c = (c % block) / right;
            if digit_r == digit_c {
                kept.set(r, c, rotated.get(r, c));
            }
        }
    }
    let op = conjugate_factor(&kept, &state.dims, idx, &basis.vectors)?;
    Ok(DensityState::new_unchecked(op, state.dims.clone(), state.labels.clone()))
}

/// Classical preparation of a pointer register: probabilities over the
/// computational basis values.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceDistribution {
    /// `probs[q]` is the weight of pointer value `|q>`.
    pub probs: Vec<f64>,
}

impl DeviceDistribution {
    /// Validate and wrap a probability vector.
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("device distribution must be non-empty".into()));
        }
        if probs.iter().any(|&p| p < -1e-12) {
            return Err(Error::Domain("device distribution has negative weight".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ATOL_EXACT {
            return Err(Error::Domain(format!("device distribution sums to {:.12}", sum)));
        }
        Ok(DeviceDistribution { probs: probs.iter().map(|&p| p.max(0.0)).collect() })
    }

    /// Sharp pointer at `|0>` (the ideal device).
    pub fn pure(d: usize) -> Self {
        let mut probs = vec![0.0; d];
        probs[0] = 1.0;
        DeviceDistribution { probs }
    }

    /// Uniformly random pointer value (the useless device).
    pub fn uniform(d: usize) -> Self {
        DeviceDistribution { probs: vec![1.0 / d as f64; d] }
    }

    /// Dimension of the pointer register.
    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// True when the pointer starts sharply at `|0>`.
    pub fn is_pure(&self) -> bool {
        self.probs[0] == 1.0 && self.probs.iter().skip(1).all(|&p| p == 0.0)
    }

    /// Diagonal density matrix of the pointer register.
    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::diag_real(&self.probs)
    }
}

/// Maximally entangled state `|Φ> = d^{-1/2} Σ_j |b_j> ⊗ |j>` as a density
/// state labeled ("S", "Sp").
pub fn maximally_entangled(b: &Basis) -> DensityState {
    let psi = maximally_entangled_vec(b);
    DensityState::from_pure(&psi, &[b.dim(), b.dim()], &["S", "Sp"])
        .expect("maximally entangled state is always valid")
}

/// Vector form of the maximally entangled state for basis `b`.
pub fn maximally_entangled_vec(b: &Basis) -> Vec<C64> {
    let d = b.dim();
    let norm = 1.0 / (d as f64).sqrt();
    let mut psi = vec![C64::ZERO; d * d];
    for j in 0..d {
        let col = b.vector(j);
        for (i, &a) in col.iter().enumerate() {
            psi[i * d + j] = a * norm;
        }
    }
    psi
}

/// Standard purification of a single-factor state: appends a reference of
/// the same dimension so the reduced state on the original factor is `ρ`.
pub fn purify(state: &DensityState, ref_label: &str) -> Result<DensityState> {
    if state.dims.len() != 1 {
        return Err(Error::Unsupported(
            "purify expects a single-factor state; reduce or relabel first".into(),
        ));
    }
    let d = state.dims[0];
    let dec = eigh(&state.op)?;
    let mut psi = vec![C64::ZERO; d * d];
    for i in 0..d {
        let lam = dec.eigenvalues[i];
        if lam <= EIG_FLOOR {
            continue;
        }
        let root = lam.sqrt();
        for s in 0..d {
            // |ψ> = Σ_i √λ_i |v_i> ⊗ |i>
            psi[s * d + i] += dec.eigenvectors.get(s, i) * root;
        }
    }
    let labels: Vec<&str> = vec![&state.labels[0], ref_label];
    DensityState::from_pure(&psi, &[d, d], &labels)
}

/// Haar-distributed random unitary, deterministic in `seed`.
///
/// Complex Ginibre matrix through modified Gram-Schmidt QR; the positive
/// diagonal of R produced by the orthogonalization fixes the phase gauge, so
/// the Q factor is Haar-distributed.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|_| (0..d).map(|_| ginibre_entry(&mut rng)).collect())
        .collect();
    // Modified Gram-Schmidt over columns.
    for j in 0..d {
        for k in 0..j {
            let proj = vec_inner(&cols[k], &cols[j]);
            let prev = cols[k].clone();
            for (x, p) in cols[j].iter_mut().zip(&prev) {
                *x -= proj * p;
            }
        }
        let norm = vec_norm(&cols[j]);
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

fn ginibre_entry(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im)
}

/// Haar-random pure state vector on `C^d`, deterministic in `seed`.
pub fn random_pure(d: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..d).map(|_| ginibre_entry(&mut rng)).collect();
    let norm = vec_norm(&v);
    for x in v.iter_mut() {
        *x /= norm;
    }
    v
}

/// Random rank-`rank` density state on `C^d` labeled "S": the reduced state
/// of a Haar-random pure state on `C^d ⊗ C^rank`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityState> {
    if rank == 0 || rank > d {
        return Err(Error::Domain(format!("rank {} out of range 1..={}", rank, d)));
    }
    let psi = random_pure(d * rank, seed);
    let mut op = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::ZERO;
            for r in 0..rank {
                acc += psi[i * rank + r] * psi[j * rank + r].conj();
            }
            op.set(i, j, acc);
        }
    }
    DensityState::new(op, &[d], &["S"])
}

/// Tensor two states side by side, concatenating labels.
pub fn tensor(a: &DensityState, b: &DensityState) -> Result<DensityState> {
    let op = kron(&a.op, &b.op)?;
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let mut labels = a.labels.clone();
    labels.extend_from_slice(&b.labels);
    if labels.len()
        != labels.iter().collect::<std::collections::HashSet<_>>().len()
    {
        return Err(Error::Shape("tensor would duplicate a subsystem label".into()));
    }
    Ok(DensityState::new_unchecked(op, dims, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_6;

    #[test]
    fn fourier_basis_is_unbiased_with_standard() {
        for d in 2..=16 {
            let x = Basis::standard(d);
            let z = Basis::fourier(d);
            assert!(z.vectors.is_unitary(1e-12));
            assert!(x.is_mub_with(&z, 1e-12), "d = {}", d);
            assert!((overlap_c(&x, &z) - 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_basis_overlaps() {
        let x = Basis::standard(2);
        let z = Basis::rotation(FRAC_PI_6);
        let m = overlap_matrix(&x, &z);
        assert!((m[0][0] - 0.75).abs() < 1e-12);
        assert!((m[0][1] - 0.25).abs() < 1e-12);
        assert!((m[1][0] - 0.25).abs() < 1e-12);
        assert!((m[1][1] - 0.75).abs() < 1e-12);
        assert!((overlap_c(&x, &z) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn identical_bases_have_unit_overlap() {
        let z = Basis::haar(3, 7);
        assert!((overlap_c(&z, &z) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_operator_of_standard_basis_is_clock() {
        let sx = phase_operator(&Basis::standard(3));
        let w = 2.0 * PI / 3.0;
        for j in 0..3 {
            let expect = c64((w * j as f64).cos(), (w * j as f64).sin());
            assert!((sx.get(j, j) - expect).norm() < 1e-12);
        }
        assert!(sx.is_unitary(1e-12));
    }

    #[test]
    fn shift_operator_cycles_standard_basis() {
        let s = shift_operator(3);
        let v = crate::linalg::mat_vec(&s, &[C64::ONE, C64::ZERO, C64::ZERO]);
        assert_eq!(v[1], C64::ONE);
        let mut acc = CMatrix::identity(3);
        for _ in 0..3 {
            acc = s.matmul(&acc);
        }
        assert!(acc.approx_eq(&CMatrix::identity(3), 1e-12));
    }

    #[test]
    fn weyl_commutation_for_standard_fourier_pair() {
        // σ_Z σ_X = ω σ_X σ_Z for the phase operators of a Fourier-conjugate pair.
        for d in 2..=5 {
            let sx = phase_operator(&Basis::standard(d));
            let sz = phase_operator(&Basis::fourier(d));
            let w = c64((2.0 * PI / d as f64).cos(), (2.0 * PI / d as f64).sin());
            let lhs = sz.matmul(&sx);
            let rhs = sx.matmul(&sz).scale(w);
            assert!(lhs.approx_eq(&rhs, 1e-12), "d = {}", d);
        }
    }

    #[test]
    fn maximally_entangled_marginals_are_mixed() {
        for d in 2..=4 {
            let phi = maximally_entangled(&Basis::fourier(d));
            for label in ["S", "Sp"] {
                let red = phi.reduce(&[label]).unwrap();
                let mixed = CMatrix::identity(d).scale(c64(1.0 / d as f64, 0.0));
                assert!(red.op.approx_eq(&mixed, 1e-12));
            }
        }
    }

    #[test]
    fn purify_recovers_marginal() {
        let rho = random_density(3, 2, 11).unwrap();
        let pure = purify(&rho, "R").unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let back = pure.reduce(&["S"]).unwrap();
        assert!(back.op.approx_eq(&rho.op, 1e-10));
    }

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        for d in [2usize, 3, 5, 8] {
            let u = haar_unitary(d, 99);
            assert!(u.is_unitary(1e-12), "d = {}", d);
            assert!(u.approx_eq(&haar_unitary(d, 99), 0.0));
        }
        assert!(haar_unitary(4, 1).max_abs_diff(&haar_unitary(4, 2)) > 1e-3);
    }

    #[test]
    fn haar_unitary_first_entry_statistics() {
        // |U_00|² is uniform on [0,1] for d = 2, so the mean over seeds is 1/2.
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| haar_unitary(2, s as u64).get(0, 0).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean = {}", mean);
    }

    #[test]
    fn random_density_has_requested_rank() {
        let rho = random_density(4, 2, 5).unwrap();
        let eigs = eigvalsh(&rho.op).unwrap();
        let significant = eigs.iter().filter(|&&l| l > 1e-10).count();
        assert_eq!(significant, 2);
        rho.validate().unwrap();
    }

    #[test]
    fn dephase_in_own_basis_keeps_diagonal() {
        let b = Basis::haar(2, 3);
        let rho = random_density(2, 2, 8).unwrap();
        let deph = dephase(&rho, "S", &b).unwrap();
        // Twice dephasing changes nothing more.
        let again = dephase(&deph, "S", &b).unwrap();
        assert!(deph.op.approx_eq(&again.op, 1e-12));
        // Probabilities are preserved.
        let p0 = rho.probs_in_basis("S", &b).unwrap();
        let p1 = deph.probs_in_basis("S", &b).unwrap();
        for (a, b) in p0.iter().zip(&p1) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn device_distribution_validation() {
        assert!(DeviceDistribution::new(&[0.5, 0.5]).is_ok());
        assert!(DeviceDistribution::new(&[0.6, 0.6]).is_err());
        assert!(DeviceDistribution::new(&[-0.1, 1.1]).is_err());
        assert!(DeviceDistribution::pure(3).is_pure());
        assert!(!DeviceDistribution::uniform(3).is_pure());
    }

    #[test]
    fn probs_in_basis_match_projector_traces() {
        let rho = random_density(3, 3, 21).unwrap();
        let b = Basis::haar(3, 22);
        let probs = rho.probs_in_basis("S", &b).unwrap();
        let sum: f64 = probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        for (j, &p) in probs.iter().enumerate() {
            let expected = b.projector(j).matmul(&rho.op).trace().re;
            assert!((p - expected).abs() < 1e-12);
        }
    }
}
