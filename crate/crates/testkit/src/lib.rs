//! Slow, independent reference implementations used to cross-check the main
//! crate in tests. Everything here favors obviousness over speed: explicit
//! sums over all indices, derivative-free optimization, closed formulas.

use seqmeas::linalg::{c64, eigvalsh, CMatrix, C64};

/// Direct sum-over-histories state after two coherent measurement steps.
///
/// With projectors `P_j = |x_j><x_j|`, `Q_l = |z_l><z_l|` and pointer
/// preparations `alpha`, `beta`, the joint state on `(S, M1, M2)` is
///
/// ```text
///   Σ_{q,r,j,k,l,m} α_q β_r · Q_l P_j ρ P_k Q_m ⊗ |q+j><q+k| ⊗ |r+l><r+m|
/// ```
///
/// with pointer sums mod `d`. Roughly `d^6` small-matrix products — fine as
/// a test oracle, never as a simulator.
pub fn closed_form_two_step(
    rho: &CMatrix,
    x_vectors: &CMatrix,
    z_vectors: &CMatrix,
    alpha: &[f64],
    beta: &[f64],
) -> CMatrix {
    let d = rho.rows;
    let proj = |u: &CMatrix, j: usize| {
        let col = u.column(j);
        seqmeas::linalg::vec_outer(&col, &col)
    };
    let total = d * d * d;
    let mut out = CMatrix::zeros(total, total);
    for j in 0..d {
        for k in 0..d {
            let a_jk = proj(x_vectors, j).matmul(rho).matmul(&proj(x_vectors, k));
            for l in 0..d {
                for m in 0..d {
                    let b = proj(z_vectors, l).matmul(&a_jk).matmul(&proj(z_vectors, m));
                    for (q, &aq) in alpha.iter().enumerate() {
                        if aq == 0.0 {
                            continue;
                        }
                        for (r, &br) in beta.iter().enumerate() {
                            if br == 0.0 {
                                continue;
                            }
                            let w = c64(aq * br, 0.0);
                            let row_m1 = (q + j) % d;
                            let col_m1 = (q + k) % d;
                            let row_m2 = (r + l) % d;
                            let col_m2 = (r + m) % d;
                            for s in 0..d {
                                for t in 0..d {
                                    let val = b.get(s, t) * w;
                                    if val == C64::ZERO {
                                        continue;
                                    }
                                    let rr = (s * d + row_m1) * d + row_m2;
                                    let cc = (t * d + col_m1) * d + col_m2;
                                    out.set(rr, cc, out.get(rr, cc) + val);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Nelder–Mead minimization of `f` from `x0`, with initial simplex spread
/// `scale`. Returns the best point and value found.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    scale: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if (values[worst] - values[best]).abs() < 1e-13 {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for (idx, v) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let blend = |a: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + a * (c - w))
                .collect()
        };

        let reflected = blend(1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = blend(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = blend(-0.5);
            let fc = f(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[best].clone();
                for idx in 0..=n {
                    if idx == best {
                        continue;
                    }
                    for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                        *x = a + 0.5 * (*x - a);
                    }
                    values[idx] = f(&simplex[idx]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Brute-force value of `min { Tr σ : 1_A ⊗ σ ⪰ ρ }` for a qubit-sized
/// conditioner (`d_b = 2`), independent of any SDP machinery.
///
/// Writing `σ = s0·1 + V` with `V = v·(Pauli vector)` traceless, feasibility
/// pins `s0 = λmax(ρ − 1_A ⊗ V)`, so the value is the unconstrained convex
/// minimum of `2·λmax(ρ − 1_A ⊗ V)` over `v ∈ R³`, found by Nelder–Mead
/// with restarts.
pub fn min_trace_conditioner(rho: &CMatrix, d_a: usize) -> f64 {
    assert_eq!(rho.rows, d_a * 2, "oracle expects a qubit conditioner");
    let objective = |v: &[f64]| -> f64 {
        let pauli = CMatrix::from_rows(&[
            &[c64(v[2], 0.0), c64(v[0], -v[1])],
            &[c64(v[0], v[1]), c64(-v[2], 0.0)],
        ]);
        let mut m = rho.clone();
        for a in 0..d_a {
            for i in 0..2 {
                for j in 0..2 {
                    let r = a * 2 + i;
                    let c = a * 2 + j;
                    m.set(r, c, m.get(r, c) - pauli.get(i, j));
                }
            }
        }
        let eigs = eigvalsh(&m).expect("affine Pauli family stays Hermitian");
        2.0 * eigs.last().copied().unwrap()
    };

    let mut best = f64::INFINITY;
    let starts = [
        vec![0.0, 0.0, 0.0],
        vec![0.2, 0.0, -0.2],
        vec![-0.15, 0.15, 0.1],
    ];
    for start in &starts {
        let (x, v) = nelder_mead(objective, start, 0.25, 4000);
        // Polish from the found point with a tighter simplex.
        let (_, v2) = nelder_mead(objective, &x, 0.01, 2000);
        best = best.min(v).min(v2);
    }
    best
}

/// Best entanglement fidelity over the measure-and-phase-correct recovery
/// family on a `(Sp, M1, M2)` qubit state: measure `M2` in the computational
/// basis, apply `diag(1, e^{iφ_l})` on `M1` given outcome `l`, output `M1`.
///
/// The optimum over `(φ_0, φ_1)` is analytic; the returned value is a valid
/// lower bound on the best recovery fidelity achievable by any channel.
pub fn qubit_phase_recovery_fidelity(rho: &CMatrix) -> f64 {
    assert_eq!(rho.rows, 8, "expects three qubits (Sp, M1, M2)");
    let mut total = 0.0;
    for l in 0..2 {
        // Basis indices of |0>_Sp|0>_M1|l> and |1>_Sp|1>_M1|l>.
        let lo = l;
        let hi = 6 + l;
        total += rho.get(lo, lo).re + rho.get(hi, hi).re + 2.0 * rho.get(lo, hi).norm();
    }
    0.5 * total
}
