//! Entropies: classical, von Neumann, relative, and the one-shot
//! conditional min-/max-entropy pair.
//!
//! Everything is in bits (base-2 logarithms). Conditional min-entropy is
//! computed from its semidefinite formulation
//!
//! ```text
//!   2^{-Hmin(A|B)} = min { Tr σ : σ ⪰ 0,  1_A ⊗ σ ⪰ ρ_AB },
//! ```
//!
//! solved with a self-contained barrier interior-point method: for growing
//! `t`, minimize `t·Tr σ − ln det(1⊗σ − ρ)` by a damped Newton iteration
//! over the real coordinates of Hermitian `σ`. Max-entropy comes from
//! duality, `Hmax(A|B) = −Hmin(A|C)` on a purification. The solver returns
//! the witness `σ` along with its duality gap and the slack spectrum edge,
//! so callers can re-certify the answer independently of the iteration.

use crate::linalg::{eigh, eigvalsh, root_fidelity, CMatrix, C64};
use crate::qstate::DensityState;
use crate::tol::EIG_FLOOR;
use crate::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Which classical entropy functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyVariant {
    Shannon,
    Min,
}

/// Entropy of a probability vector, in bits.
pub fn classical_entropy(p: &[f64], variant: EntropyVariant) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::Domain("empty distribution".into()));
    }
    if p.iter().any(|&x| x < -1e-12) {
        return Err(Error::Domain("distribution has negative weight".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("distribution sums to {:.12}", sum)));
    }
    Ok(match variant {
        EntropyVariant::Shannon => p
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.log2())
            .sum(),
        EntropyVariant::Min => -p.iter().cloned().fold(0.0_f64, f64::max).log2(),
    })
}

/// Binary Shannon entropy `h(p) = −p log p − (1−p) log(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

fn spectrum_entropy(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&l| l > EIG_FLOOR)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Von Neumann entropy of a density matrix, in bits.
pub fn von_neumann_op(rho: &CMatrix) -> Result<f64> {
    let eigs = eigvalsh(rho)?;
    let tr: f64 = eigs.iter().sum();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("operator trace is {:.12}, expected 1", tr)));
    }
    if let Some(&l) = eigs.first() {
        if l < -1e-8 {
            return Err(Error::Domain(format!("operator has negative eigenvalue {:.3e}", l)));
        }
    }
    Ok(spectrum_entropy(&eigs))
}

/// Von Neumann entropy of a state.
pub fn von_neumann(state: &DensityState) -> Result<f64> {
    von_neumann_op(&state.op)
}

/// Conditional entropy `H(A|B) = H(AB) − H(B)` for labeled factor groups.
/// An empty `b` gives the plain entropy of the `a` marginal.
pub fn conditional_vn(state: &DensityState, a: &[&str], b: &[&str]) -> Result<f64> {
    for la in a {
        if b.contains(la) {
            return Err(Error::Domain(format!("label {:?} on both sides of the bar", la)));
        }
    }
    if b.is_empty() {
        return von_neumann(&state.reduce(a)?);
    }
    let mut ab: Vec<&str> = a.to_vec();
    ab.extend_from_slice(b);
    let h_ab = von_neumann(&state.reduce(&ab)?)?;
    let h_b = von_neumann(&state.reduce(b)?)?;
    Ok(h_ab - h_b)
}

/// Which relative-entropy functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelEntropyKind {
    /// `D(ρ‖σ) = Tr ρ (log ρ − log σ)`.
    VonNeumann,
    /// `Dmax(ρ‖σ) = log λmax(σ^{-1/2} ρ σ^{-1/2})`.
    Max,
    /// `−log F(ρ,σ)²` with the square-root fidelity `F`.
    Fidelity,
}

/// A possibly infinite entropy value. Divergences on mismatched supports
/// return the distinguished `Infinite` variant instead of a float sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, EntropyValue::Infinite)
    }

    /// The finite value, if there is one.
    pub fn finite(&self) -> Option<f64> {
        match self {
            EntropyValue::Finite(v) => Some(*v),
            EntropyValue::Infinite => None,
        }
    }

    /// As an `f64`, mapping `Infinite` to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            EntropyValue::Finite(v) => *v,
            EntropyValue::Infinite => f64::INFINITY,
        }
    }
}

/// Relative entropy `D(ρ‖σ)` between density matrices, in bits.
///
/// Support leakage of `ρ` outside `supp σ` below `1e-9` is treated as
/// rounding noise; anything larger yields `Infinite`.
pub fn relative_entropy(
    rho: &CMatrix,
    sigma: &CMatrix,
    kind: RelEntropyKind,
) -> Result<EntropyValue> {
    if !rho.is_square() || !sigma.is_square() || rho.rows != sigma.rows {
        return Err(Error::Shape("relative entropy needs equal square shapes".into()));
    }
    for (name, m) in [("first", rho), ("second", sigma)] {
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::Domain(format!("{} argument is not unit trace", name)));
        }
    }
    match kind {
        RelEntropyKind::Fidelity => {
            let f = root_fidelity(rho, sigma)?;
            if f <= 1e-7 {
                return Ok(EntropyValue::Infinite);
            }
            Ok(EntropyValue::Finite(-2.0 * f.log2()))
        }
        RelEntropyKind::VonNeumann | RelEntropyKind::Max => {
            let drho = eigh(rho)?;
            let dsig = eigh(sigma)?;
            // overlap[i][j] = |<v_i|u_j>|²
            let cross = drho.eigenvectors.dagger().matmul(&dsig.eigenvectors);
            let n = rho.rows;
            let leaked: f64 = (0..n)
                .filter(|&i| drho.eigenvalues[i] > EIG_FLOOR)
                .map(|i| {
                    drho.eigenvalues[i]
                        * (0..n)
                            .filter(|&j| dsig.eigenvalues[j] <= EIG_FLOOR)
                            .map(|j| cross.get(i, j).norm_sqr())
                            .sum::<f64>()
                })
                .sum();
            if leaked > 1e-9 {
                return Ok(EntropyValue::Infinite);
            }
            match kind {
                RelEntropyKind::VonNeumann => {
                    let mut d = -spectrum_entropy(&drho.eigenvalues);
                    for i in 0..n {
                        let l = drho.eigenvalues[i];
                        if l <= EIG_FLOOR {
                            continue;
                        }
                        for j in 0..n {
                            let m = dsig.eigenvalues[j];
                            if m <= EIG_FLOOR {
                                continue;
                            }
                            d -= l * cross.get(i, j).norm_sqr() * m.log2();
                        }
                    }
                    Ok(EntropyValue::Finite(d))
                }
                RelEntropyKind::Max => {
                    // σ^{-1/2} on the support.
                    let inv_sqrt = crate::linalg::SpectralDecomposition {
                        eigenvalues: dsig.eigenvalues.clone(),
                        eigenvectors: dsig.eigenvectors.clone(),
                    }
                    .map_eigenvalues(|m| if m > EIG_FLOOR { 1.0 / m.sqrt() } else { 0.0 });
                    let mid = inv_sqrt.matmul(rho).matmul(&inv_sqrt).hermitize();
                    let top = eigvalsh(&mid)?.last().copied().unwrap_or(0.0);
                    Ok(EntropyValue::Finite(top.max(EIG_FLOOR).log2()))
                }
                RelEntropyKind::Fidelity => unreachable!(),
            }
        }
    }
}

/// Outcome of the conditional min-entropy program.
#[derive(Debug, Clone)]
pub struct SdpResult {
    /// Optimal `Tr σ` (equals `2^{-Hmin}`).
    pub value: f64,
    /// `Hmin(A|B) = −log2(value)`.
    pub hmin: f64,
    /// The minimizing conditioner `σ` on the `B` factors.
    pub sigma: CMatrix,
    /// Residual barrier duality gap `m/t` at termination.
    pub gap: f64,
    /// Smallest eigenvalue of the slack `1 ⊗ σ − ρ` (certifies feasibility
    /// when ≥ −1e-8).
    pub feasibility: f64,
    /// Total Newton iterations across all barrier stages.
    pub newton_iterations: usize,
}

/// Conditional min-entropy `Hmin(A|B)` for labeled factor groups.
pub fn hmin_conditional(state: &DensityState, a: &[&str], b: &[&str]) -> Result<SdpResult> {
    let (rho, d_a, d_b) = bipartition_matrix(state, a, b)?;
    hmin_of_bipartition(&rho, d_a, d_b)
}

/// Conditional max-entropy `Hmax(A|B) = −Hmin(A|C)` evaluated on a
/// purification whose purifying register `C` has dimension `rank(ρ_AB)`.
pub fn hmax_conditional(state: &DensityState, a: &[&str], b: &[&str]) -> Result<f64> {
    let (rho, d_a, d_b) = bipartition_matrix(state, a, b)?;
    let dec = eigh(&rho)?;
    let kept: Vec<usize> =
        (0..rho.rows).filter(|&i| dec.eigenvalues[i] > EIG_FLOOR).collect();
    let rank = kept.len().max(1);
    // ψ[(a,b), c] = √λ_c · v_c[(a,b)];  ρ_AC = Tr_B |ψ><ψ|.
    let mut rho_ac = CMatrix::zeros(d_a * rank, d_a * rank);
    for (ci, &i) in kept.iter().enumerate() {
        let li = dec.eigenvalues[i].sqrt();
        for (cj, &j) in kept.iter().enumerate() {
            let lj = dec.eigenvalues[j].sqrt();
            for ai in 0..d_a {
                for aj in 0..d_a {
                    let mut acc = C64::ZERO;
                    for b_idx in 0..d_b {
                        acc += dec.eigenvectors.get(ai * d_b + b_idx, i)
                            * dec.eigenvectors.get(aj * d_b + b_idx, j).conj();
                    }
                    let cur = rho_ac.get(ai * rank + ci, aj * rank + cj);
                    rho_ac.set(ai * rank + ci, aj * rank + cj, cur + acc * (li * lj));
                }
            }
        }
    }
    let res = hmin_of_bipartition(&rho_ac, d_a, rank)?;
    Ok(-res.hmin)
}

fn bipartition_matrix(
    state: &DensityState,
    a: &[&str],
    b: &[&str],
) -> Result<(CMatrix, usize, usize)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("both sides of the bipartition must be non-empty".into()));
    }
    for la in a {
        if b.contains(la) {
            return Err(Error::Domain(format!("label {:?} on both sides of the bar", la)));
        }
    }
    let mut order: Vec<&str> = a.to_vec();
    order.extend_from_slice(b);
    let reduced = state.reduce(&order)?.permute(&order)?;
    let d_a: usize = reduced.dims[..a.len()].iter().product();
    let d_b: usize = reduced.dims[a.len()..].iter().product();
    Ok((reduced.op, d_a, d_b))
}

// ---------------------------------------------------------------------------
// Barrier interior-point solver for  min { Tr σ : 1_A ⊗ σ ⪰ ρ }.
// ---------------------------------------------------------------------------

/// Barrier stages stop once `m/t` drops below this duality-gap target.
const SDP_GAP_TOL: f64 = 1e-8;
/// A stage is centered when the squared Newton decrement falls below this.
const SDP_NEWTON_TOL: f64 = 1e-10;
/// Accept a stage at the iteration cap if the decrement at least reached this.
const SDP_NEWTON_LOOSE: f64 = 1e-5;
const SDP_MAX_NEWTON: usize = 60;

/// Real coordinates for Hermitian matrices on the `B` factor: diagonal
/// entries, then `√2`-normalized real and imaginary off-diagonal parts.
#[derive(Clone, Copy)]
enum HermCoord {
    Diag(usize),
    Sym(usize, usize),
    Anti(usize, usize),
}

fn herm_coords(d: usize) -> Vec<HermCoord> {
    let mut v: Vec<HermCoord> = (0..d).map(HermCoord::Diag).collect();
    for i in 0..d {
        for j in i + 1..d {
            v.push(HermCoord::Sym(i, j));
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            v.push(HermCoord::Anti(i, j));
        }
    }
    v
}

fn sigma_from_coords(x: &[f64], coords: &[HermCoord], d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d, d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (v, c) in x.iter().zip(coords) {
        match *c {
            HermCoord::Diag(i) => {
                let cur = s.get(i, i);
                s.set(i, i, cur + crate::linalg::c64(*v, 0.0));
            }
            HermCoord::Sym(i, j) => {
                let w = crate::linalg::c64(v * r, 0.0);
                s.set(i, j, s.get(i, j) + w);
                s.set(j, i, s.get(j, i) + w);
            }
            HermCoord::Anti(i, j) => {
                s.set(i, j, s.get(i, j) + crate::linalg::c64(0.0, v * r));
                s.set(j, i, s.get(j, i) + crate::linalg::c64(0.0, -v * r));
            }
        }
    }
    s
}

/// Coordinates of a Hermitian matrix in the same basis (adjoint of
/// `sigma_from_coords` for the trace inner product).
fn coords_from_herm(g: &CMatrix, coords: &[HermCoord]) -> Vec<f64> {
    let r = std::f64::consts::SQRT_2;
    coords
        .iter()
        .map(|c| match *c {
            HermCoord::Diag(i) => g.get(i, i).re,
            HermCoord::Sym(i, j) => r * g.get(i, j).re,
            HermCoord::Anti(i, j) => r * g.get(i, j).im,
        })
        .collect()
}

/// Nonzero entries of a basis element as `(row, col, weight)`.
fn coord_entries(c: HermCoord) -> Vec<(usize, usize, C64)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match c {
        HermCoord::Diag(i) => vec![(i, i, C64::ONE)],
        HermCoord::Sym(i, j) => vec![
            (i, j, crate::linalg::c64(r, 0.0)),
            (j, i, crate::linalg::c64(r, 0.0)),
        ],
        HermCoord::Anti(i, j) => vec![
            (i, j, crate::linalg::c64(0.0, r)),
            (j, i, crate::linalg::c64(0.0, -r)),
        ],
    }
}

/// Complex Cholesky factor `L` (lower, `L L† = m`), or `None` when the
/// matrix is not positive definite.
fn cholesky(m: &CMatrix) -> Option<CMatrix> {
    let n = m.rows;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l.set(j, j, crate::linalg::c64(dj, 0.0));
        for i in j + 1..n {
            let mut acc = m.get(i, j);
            for k in 0..j {
                acc -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, acc / dj);
        }
    }
    Some(l)
}

fn chol_logdet(l: &CMatrix) -> f64 {
    (0..l.rows).map(|j| 2.0 * l.get(j, j).re.ln()).sum()
}

/// Inverse of a lower-triangular matrix by forward substitution.
fn lower_inverse(l: &CMatrix) -> CMatrix {
    let n = l.rows;
    let mut x = CMatrix::zeros(n, n);
    for j in 0..n {
        x.set(j, j, C64::ONE / l.get(j, j));
        for i in j + 1..n {
            let mut acc = C64::ZERO;
            for k in j..i {
                acc += l.get(i, k) * x.get(k, j);
            }
            x.set(i, j, -acc / l.get(i, i));
        }
    }
    x
}

/// `T[b1,b2,b3,b4] = Σ_{a,a'} W[(a,b4),(a',b1)] · W[(a',b2),(a,b3)]`,
/// so that `Tr[W (1⊗X) W (1⊗Y)] = Σ T[b1,b2,b3,b4] X[b1,b2] Y[b3,b4]`.
fn t_tensor(w: &CMatrix, d_a: usize, d_b: usize) -> Vec<C64> {
    let mut t = vec![C64::ZERO; d_b * d_b * d_b * d_b];
    for b1 in 0..d_b {
        for b2 in 0..d_b {
            for b3 in 0..d_b {
                for b4 in 0..d_b {
                    let mut acc = C64::ZERO;
                    for a in 0..d_a {
                        for a1 in 0..d_a {
                            acc += w.get(a * d_b + b4, a1 * d_b + b1)
                                * w.get(a1 * d_b + b2, a * d_b + b3);
                        }
                    }
                    t[((b1 * d_b + b2) * d_b + b3) * d_b + b4] = acc;
                }
            }
        }
    }
    t
}

/// Solve the real symmetric system `h x = −g`, adding a ridge if needed.
fn newton_direction(h: &[f64], g: &[f64], p: usize) -> Result<Vec<f64>> {
    let max_diag = (0..p).map(|i| h[i * p + i].abs()).fold(0.0_f64, f64::max).max(1.0);
    let mut ridge = 0.0;
    for _ in 0..8 {
        if let Some(x) = real_chol_solve(h, g, p, ridge) {
            return Ok(x);
        }
        ridge = if ridge == 0.0 { 1e-12 * max_diag } else { ridge * 100.0 };
    }
    Err(Error::Convergence("Newton system is numerically singular".into()))
}

fn real_chol_solve(h: &[f64], g: &[f64], p: usize, ridge: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0_f64; p * p];
    for j in 0..p {
        let mut d = h[j * p + j] + ridge;
        for k in 0..j {
            d -= l[j * p + k] * l[j * p + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l[j * p + j] = dj;
        for i in j + 1..p {
            let mut acc = h[i * p + j];
            for k in 0..j {
                acc -= l[i * p + k] * l[j * p + k];
            }
            l[i * p + j] = acc / dj;
        }
    }
    // Forward then back substitution for  L Lᵀ x = −g.
    let mut y = vec![0.0_f64; p];
    for i in 0..p {
        let mut acc = -g[i];
        for k in 0..i {
            acc -= l[i * p + k] * y[k];
        }
        y[i] = acc / l[i * p + i];
    }
    let mut x = vec![0.0_f64; p];
    for i in (0..p).rev() {
        let mut acc = y[i];
        for k in i + 1..p {
            acc -= l[k * p + i] * x[k];
        }
        x[i] = acc / l[i * p + i];
    }
    Some(x)
}

struct Centered {
    logdet: f64,
    w: CMatrix,
}

/// Slack `1_A ⊗ σ − ρ`.
fn slack_matrix(rho: &CMatrix, sigma: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    let n = d_a * d_b;
    let mut m = rho.scale(crate::linalg::c64(-1.0, 0.0));
    for a in 0..d_a {
        for i in 0..d_b {
            for j in 0..d_b {
                let r = a * d_b + i;
                let c = a * d_b + j;
                m.set(r, c, m.get(r, c) + sigma.get(i, j));
            }
        }
    }
    debug_assert_eq!(m.rows, n);
    m
}

fn centered_state(rho: &CMatrix, sigma: &CMatrix, d_a: usize, d_b: usize) -> Option<Centered> {
    let m = slack_matrix(rho, sigma, d_a, d_b);
    let l = cholesky(&m)?;
    let logdet = chol_logdet(&l);
    let linv = lower_inverse(&l);
    let w = linv.dagger().matmul(&linv);
    Some(Centered { logdet, w })
}

/// Minimize `Tr σ` subject to `1_A ⊗ σ ⪰ ρ_AB` for a density matrix on a
/// `d_a × d_b` bipartition (row index `a·d_b + b`).
pub fn hmin_of_bipartition(rho: &CMatrix, d_a: usize, d_b: usize) -> Result<SdpResult> {
    if !rho.is_square() || rho.rows != d_a * d_b {
        return Err(Error::Shape(format!(
            "state is {}x{} but bipartition gives {}",
            rho.rows,
            rho.cols,
            d_a * d_b
        )));
    }
    let rho = rho.hermitize();
    let eigs = eigvalsh(&rho)?;
    let lam_max = eigs.last().copied().unwrap_or(0.0);

    if d_b == 1 {
        // σ is a scalar; the optimum is the largest eigenvalue of ρ.
        let value = lam_max.max(EIG_FLOOR);
        return Ok(SdpResult {
            value,
            hmin: -value.log2(),
            sigma: CMatrix::from_rows(&[&[crate::linalg::c64(value, 0.0)]]),
            gap: 0.0,
            feasibility: 0.0,
            newton_iterations: 0,
        });
    }

    let coords = herm_coords(d_b);
    let p = coords.len();
    let mut x = vec![0.0_f64; p];
    for (i, c) in coords.iter().enumerate() {
        if let HermCoord::Diag(_) = c {
            x[i] = lam_max + 0.1;
        }
    }

    let m_param = (d_a * d_b) as f64;
    let mut t = 1.0_f64;
    let mut total_iters = 0usize;
    loop {
        total_iters += newton_center(&rho, &mut x, &coords, t, d_a, d_b)?;
        if m_param / t <= SDP_GAP_TOL {
            break;
        }
        t *= 10.0;
    }

    let sigma = sigma_from_coords(&x, &coords, d_b);
    let value: f64 = (0..d_b).map(|i| sigma.get(i, i).re).sum();
    let slack = slack_matrix(&rho, &sigma, d_a, d_b);
    let feasibility = eigvalsh(&slack)?.first().copied().unwrap_or(0.0);
    Ok(SdpResult {
        value,
        hmin: -value.log2(),
        sigma,
        gap: m_param / t,
        feasibility,
        newton_iterations: total_iters,
    })
}

fn newton_center(
    rho: &CMatrix,
    x: &mut Vec<f64>,
    coords: &[HermCoord],
    t: f64,
    d_a: usize,
    d_b: usize,
) -> Result<usize> {
    let p = coords.len();
    let mut last_dec = f64::INFINITY;
    for iter in 0..SDP_MAX_NEWTON {
        let sigma = sigma_from_coords(x, coords, d_b);
        let cur = centered_state(rho, &sigma, d_a, d_b)
            .ok_or_else(|| Error::Convergence("barrier iterate lost feasibility".into()))?;

        // Gradient of  t·Tr σ − ln det(1⊗σ − ρ):  G = t·1_B − Tr_A W.
        let mut g_mat = CMatrix::zeros(d_b, d_b);
        for i in 0..d_b {
            for j in 0..d_b {
                let mut acc = C64::ZERO;
                for a in 0..d_a {
                    acc += cur.w.get(a * d_b + i, a * d_b + j);
                }
                let t_term = if i == j { crate::linalg::c64(t, 0.0) } else { C64::ZERO };
                g_mat.set(i, j, t_term - acc);
            }
        }
        let g = coords_from_herm(&g_mat, coords);

        let tt = t_tensor(&cur.w, d_a, d_b);
        let mut h = vec![0.0_f64; p * p];
        let entries: Vec<Vec<(usize, usize, C64)>> =
            coords.iter().map(|&c| coord_entries(c)).collect();
        for al in 0..p {
            for be in al..p {
                let mut acc = C64::ZERO;
                for &(r1, c1, w1) in &entries[al] {
                    for &(r2, c2, w2) in &entries[be] {
                        acc += w1
                            * w2
                            * tt[((r1 * d_b + c1) * d_b + r2) * d_b + c2];
                    }
                }
                h[al * p + be] = acc.re;
                h[be * p + al] = acc.re;
            }
        }

        let delta = newton_direction(&h, &g, p)?;
        let dec_sq: f64 = -g.iter().zip(&delta).map(|(gi, di)| gi * di).sum::<f64>();
        last_dec = dec_sq;
        if dec_sq <= SDP_NEWTON_TOL {
            return Ok(iter + 1);
        }

        let lambda = dec_sq.max(0.0).sqrt();
        let tr_delta: f64 = coords
            .iter()
            .zip(&delta)
            .filter_map(|(c, v)| matches!(c, HermCoord::Diag(_)).then_some(*v))
            .sum();
        if lambda <= 0.25 {
            // Full step; halve defensively if it ever leaves the cone.
            let mut s = 1.0;
            loop {
                let trial: Vec<f64> =
                    x.iter().zip(&delta).map(|(xi, di)| xi + s * di).collect();
                let sig_t = sigma_from_coords(&trial, coords, d_b);
                if cholesky(&slack_matrix(rho, &sig_t, d_a, d_b)).is_some() {
                    *x = trial;
                    break;
                }
                s *= 0.5;
                if s < 1e-18 {
                    return Err(Error::Convergence("full Newton step lost the cone".into()));
                }
            }
        } else {
            // Damped phase: backtrack on the exact objective difference
            //   Δf = t·s·Tr Δ − (logdet_new − logdet_old),
            // which stays well conditioned even at large t.
            let mut s = 1.0;
            loop {
                let trial: Vec<f64> =
                    x.iter().zip(&delta).map(|(xi, di)| xi + s * di).collect();
                let sig_t = sigma_from_coords(&trial, coords, d_b);
                if let Some(l) = cholesky(&slack_matrix(rho, &sig_t, d_a, d_b)) {
                    let df = t * s * tr_delta - (chol_logdet(&l) - cur.logdet);
                    if df <= -0.25 * s * dec_sq {
                        *x = trial;
                        break;
                    }
                }
                s *= 0.5;
                if s < 1e-18 {
                    return Err(Error::Convergence("barrier line search stalled".into()));
                }
            }
        }
    }
    if last_dec <= SDP_NEWTON_LOOSE {
        Ok(SDP_MAX_NEWTON)
    } else {
        Err(Error::Convergence(format!(
            "Newton decrement {:.3e} above tolerance at iteration cap",
            last_dec
        )))
    }
}

/// Pinsker lower bound on relative entropy from the trace distance, in bits:
/// `D(ρ‖σ) ≥ (2/ln 2)·T(ρ,σ)²`.
pub fn pinsker_lower_bound(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let t = crate::linalg::trace_distance(rho, sigma)?;
    Ok(2.0 * t * t / LN2)
}
