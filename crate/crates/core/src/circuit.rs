//! Sequential coherent measurement circuits.
//!
//! One measurement step couples the system `S` to a fresh pointer register
//! through the controlled-shift unitary
//!
//! ```text
//!   U = Σ_j |b_j><b_j| ⊗ S^j,     S|k> = |k+1 mod d>,
//! ```
//!
//! so the pointer shifts by the outcome index without the outcome ever being
//! read out. A [`Scenario`] lists the initial state, the measured bases and
//! the classical pointer preparations; [`simulate`] plays the steps and
//! returns the whole [`Trajectory`] of intermediate states on the full
//! register layout `(S, M1, ..., Mn[, Sp])`, where `Sp` is an optional
//! untouched reference that purifies the input.
//!
//! Each step is applied in factored form — rotate `S` into the measured
//! basis, permute pointer indices, rotate back — which costs `O(d·D²)` on a
//! `D`-dimensional total space instead of the `O(D³)` of dense conjugation.

use crate::linalg::{conjugate_factor, kron, kron_all, vec_outer, CMatrix, C64};
use crate::qstate::{
    maximally_entangled_vec, overlap_c, phase_operator, purify, shift_operator, Basis,
    DensityState, DeviceDistribution,
};
use crate::tol::DIM_CAP;
use crate::{Error, Result};
use std::f64::consts::PI;

/// One coherent measurement: the basis that is measured and the classical
/// preparation of the pointer register that records it.
#[derive(Debug, Clone)]
pub struct MeasurementStep {
    pub basis: Basis,
    pub device: DeviceDistribution,
}

impl MeasurementStep {
    /// Step with an ideal (sharp) pointer.
    pub fn pure(basis: Basis) -> Self {
        let d = basis.dim();
        MeasurementStep { basis, device: DeviceDistribution::pure(d) }
    }

    /// Step with a classically mixed pointer.
    pub fn mixed(basis: Basis, device: DeviceDistribution) -> Self {
        MeasurementStep { basis, device }
    }
}

/// A full experiment description: input state, measurement steps, and
/// whether to carry a purifying reference along.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Input on `S` alone (one factor) or on `S` plus a reference (two
    /// factors, the second of which is never touched).
    pub initial: DensityState,
    pub steps: Vec<MeasurementStep>,
    /// When true and the input has one factor, it is purified first and the
    /// purifying register is carried as `Sp`.
    pub track_reference: bool,
}

impl Scenario {
    /// Scenario on a bare system state.
    pub fn new(initial: DensityState, steps: Vec<MeasurementStep>) -> Self {
        Scenario { initial, steps, track_reference: false }
    }

    /// Scenario that keeps a purifying reference register.
    pub fn with_reference(initial: DensityState, steps: Vec<MeasurementStep>) -> Self {
        Scenario { initial, steps, track_reference: true }
    }
}

/// The simulated history: the state after every step, on the fixed register
/// layout `(S, M1, ..., Mn[, Sp])`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `states[m]` is the state after `m` steps; `states[0]` is the input
    /// embedded on the full space with all pointers still untouched.
    pub states: Vec<DensityState>,
    pub bases: Vec<Basis>,
    pub devices: Vec<DeviceDistribution>,
    /// `overlaps[m]` is the maximum squared overlap between the bases of
    /// steps `m` and `m+1`.
    pub overlaps: Vec<f64>,
    /// System dimension.
    pub d: usize,
    /// Whether the layout ends with a reference factor `Sp`.
    pub has_reference: bool,
}

impl Trajectory {
    /// Number of measurement steps.
    pub fn n_steps(&self) -> usize {
        self.bases.len()
    }

    /// State after the last step.
    pub fn final_state(&self) -> &DensityState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    /// Labels of the pointer registers, in measurement order.
    pub fn device_labels(&self) -> Vec<String> {
        (1..=self.n_steps()).map(|m| format!("M{}", m)).collect()
    }
}

/// Dense controlled-shift unitary `Σ_j |b_j><b_j| ⊗ S^j` acting on
/// `S ⊗ M1 ⊗ ... ⊗ Mn`, shifting pointer `slot` (zero-based).
pub fn measurement_unitary(basis: &Basis, slot: usize, n_devices: usize) -> Result<CMatrix> {
    let d = basis.dim();
    if slot >= n_devices {
        return Err(Error::Shape(format!("slot {} out of range for {} devices", slot, n_devices)));
    }
    let total = d
        .checked_pow((1 + n_devices) as u32)
        .filter(|&t| t <= DIM_CAP)
        .ok_or(Error::DimensionCap(0, DIM_CAP))?;
    let shift = shift_operator(d);
    let mut shift_pow = CMatrix::identity(d);
    let mut u = CMatrix::zeros(total, total);
    for j in 0..d {
        if j > 0 {
            shift_pow = shift.matmul(&shift_pow);
        }
        let left = CMatrix::identity(d.pow(slot as u32));
        let right = CMatrix::identity(d.pow((n_devices - 1 - slot) as u32));
        let term = kron_all(&[&basis.projector(j), &left, &shift_pow, &right])?;
        u = u.add(&term);
    }
    Ok(u)
}

/// Index map of the controlled shift: pointer digit of `factor` advances by
/// the system digit (factor 0).
fn controlled_shift_map(dims: &[usize], factor: usize) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let d = dims[0];
    let stride0: usize = dims[1..].iter().product();
    let stride_t: usize = dims[factor + 1..].iter().product();
    let mut map = Vec::with_capacity(total);
    for idx in 0..total {
        let s = idx / stride0 % d;
        let t = idx / stride_t % dims[factor];
        let t_new = (t + s) % dims[factor];
        map.push(idx - t * stride_t + t_new * stride_t);
    }
    map
}

fn apply_controlled_shift(m: &CMatrix, dims: &[usize], factor: usize) -> CMatrix {
    let map = controlled_shift_map(dims, factor);
    let n = m.rows;
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        let nr = map[r] * n;
        let or = r * n;
        for c in 0..n {
            out.data[nr + map[c]] = m.data[or + c];
        }
    }
    out
}

/// Run the scenario and record the state after every step.
pub fn simulate(scenario: &Scenario) -> Result<Trajectory> {
    if scenario.steps.is_empty() {
        return Err(Error::Unsupported("scenario needs at least one step".into()));
    }
    let d = scenario.steps[0].basis.dim();
    for step in &scenario.steps {
        if step.basis.dim() != d {
            return Err(Error::Shape("all steps must share the system dimension".into()));
        }
        if step.device.dim() != d {
            return Err(Error::Shape("pointer dimension must match the system".into()));
        }
    }
    scenario.initial.validate()?;

    // Normalize the input to (S) or (S, Sp).
    let initial = match scenario.initial.dims.len() {
        1 => {
            let relabeled = scenario.initial.clone().relabel(&["S"])?;
            if scenario.track_reference {
                purify(&relabeled, "Sp")?
            } else {
                relabeled
            }
        }
        2 => scenario.initial.clone().relabel(&["S", "Sp"])?,
        k => {
            return Err(Error::Unsupported(format!(
                "initial state must have 1 or 2 factors, got {}",
                k
            )))
        }
    };
    if initial.dims[0] != d {
        return Err(Error::Shape(format!(
            "system dimension {} does not match basis dimension {}",
            initial.dims[0], d
        )));
    }
    let has_reference = initial.dims.len() == 2;
    let n = scenario.steps.len();

    // Assemble the t = 0 state on (S, M1..Mn [, Sp]).
    let device_mats: Vec<CMatrix> =
        scenario.steps.iter().map(|s| s.device.to_matrix()).collect();
    let mut parts: Vec<&CMatrix> = vec![&initial.op];
    parts.extend(device_mats.iter());
    // kron_all checks the dimension cap.
    let mut op = kron_all(&parts)?;
    let mut dims = vec![d];
    let mut labels = vec!["S".to_string()];
    if has_reference {
        // Layout is (S, Sp, M1..Mn); move Sp to the back.
        let r = initial.dims[1];
        let mut in_dims = vec![d, r];
        in_dims.extend(std::iter::repeat(d).take(n));
        let mut perm = vec![0];
        perm.extend(2..n + 2);
        perm.push(1);
        op = crate::linalg::permute_systems(&op, &in_dims, &perm)?;
    }
    for m in 1..=n {
        dims.push(d);
        labels.push(format!("M{}", m));
    }
    if has_reference {
        dims.push(initial.dims[1]);
        labels.push("Sp".to_string());
    }

    let mut states = vec![DensityState::new_unchecked(op, dims.clone(), labels.clone())];
    for (m, step) in scenario.steps.iter().enumerate() {
        let w = &step.basis.vectors;
        let prev = &states[m].op;
        let rotated = conjugate_factor(prev, &dims, 0, &w.dagger())?;
        let shifted = apply_controlled_shift(&rotated, &dims, 1 + m);
        let next = conjugate_factor(&shifted, &dims, 0, w)?;
        states.push(DensityState::new_unchecked(next, dims.clone(), labels.clone()));
    }

    let bases: Vec<Basis> = scenario.steps.iter().map(|s| s.basis.clone()).collect();
    let devices: Vec<DeviceDistribution> =
        scenario.steps.iter().map(|s| s.device.clone()).collect();
    let overlaps = (0..n.saturating_sub(1))
        .map(|m| overlap_c(&bases[m], &bases[m + 1]))
        .collect();
    Ok(Trajectory { states, bases, devices, overlaps, d, has_reference })
}

/// Reduced channel on the system: the final state traced down to `S`.
pub fn system_channel(traj: &Trajectory) -> Result<DensityState> {
    traj.final_state().reduce(&["S"])
}

/// Complementary channel: run the scenario on `input` and keep only the
/// pointer registers.
pub fn complementary_channel(scenario: &Scenario, input: &DensityState) -> Result<DensityState> {
    if input.dims.len() != 1 {
        return Err(Error::Unsupported("complementary channel expects a bare system input".into()));
    }
    let mut run = scenario.clone();
    run.initial = input.clone();
    run.track_reference = false;
    let traj = simulate(&run)?;
    let labels = traj.device_labels();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    traj.final_state().reduce(&refs)
}

/// Uniform two-sided twirl by the phase operators of two bases:
/// `ρ ↦ d^{-2} Σ_{k,l} V_z^k V_x^l ρ V_x^{-l} V_z^{-k}`.
///
/// For two ideal-pointer steps this reproduces the reduced system channel.
pub fn random_phase_twirl(rho: &CMatrix, x: &Basis, z: &Basis) -> Result<CMatrix> {
    let d = x.dim();
    if z.dim() != d || rho.rows != d || !rho.is_square() {
        return Err(Error::Shape("twirl needs matching dimensions".into()));
    }
    let vx = phase_operator(x);
    let vz = phase_operator(z);
    let mut out = CMatrix::zeros(d, d);
    let mut zk = CMatrix::identity(d);
    for _k in 0..d {
        let mut xl = CMatrix::identity(d);
        for _l in 0..d {
            let u = zk.matmul(&xl);
            out = out.add(&u.matmul(rho).matmul(&u.dagger()));
            xl = vx.matmul(&xl);
        }
        zk = vz.matmul(&zk);
    }
    Ok(out.scale(crate::linalg::c64(1.0 / (d * d) as f64, 0.0)))
}

/// Result of undoing the last measurement step by local operations on `S`
/// and its pointer plus the shared outcome.
#[derive(Debug, Clone)]
pub struct LoccUndo {
    /// The deterministic post-correction state; equals the pre-step state
    /// with the undone pointer reset to `|0>`.
    pub restored: DensityState,
    /// Normalized state of each correction branch (all identical for an
    /// ideal pointer).
    pub branches: Vec<DensityState>,
    /// Probability of each branch (uniform `1/d`).
    pub branch_probs: Vec<f64>,
    /// The branch operators on `S ⊗ M_last`, in that factor order.
    pub kraus: Vec<CMatrix>,
}

/// Undo the last step of a trajectory whose last pointer was ideal.
///
/// The pointer is measured in the conjugate Fourier basis
/// `|q_k> = d^{-1/2} Σ_m ω^{-mk} |m>` and, on outcome `k`, the phase
/// correction `(Σ_j ω^{jk} |b_j><b_j|)†` is applied to `S`. Every branch
/// reproduces the previous trajectory state exactly, so the step costs no
/// entanglement between `S` and the remaining pointers.
pub fn locc_undo_last(traj: &Trajectory) -> Result<LoccUndo> {
    let n = traj.n_steps();
    let last = n - 1;
    if !traj.devices[last].is_pure() {
        return Err(Error::Unsupported(
            "undo requires the last pointer to start sharply at |0>".into(),
        ));
    }
    let d = traj.d;
    let basis = &traj.bases[last];
    let phase = phase_operator(basis);
    let state = traj.final_state();
    let dims = &state.dims;
    let pointer_factor = 1 + last;

    let mut kraus = Vec::with_capacity(d);
    let mut branches = Vec::with_capacity(d);
    let mut branch_probs = Vec::with_capacity(d);
    let mut restored_op = CMatrix::zeros(state.op.rows, state.op.cols);
    let norm = 1.0 / (d as f64).sqrt();
    let mut u_k = CMatrix::identity(d);
    for k in 0..d {
        if k > 0 {
            u_k = phase.matmul(&u_k);
        }
        // |q_k> = d^{-1/2} Σ_m ω^{-mk} |m>
        let q_k: Vec<C64> = (0..d)
            .map(|m| {
                let angle = -2.0 * PI * ((m * k) % d) as f64 / d as f64;
                crate::linalg::c64(norm * angle.cos(), norm * angle.sin())
            })
            .collect();
        let zero: Vec<C64> = (0..d).map(|i| if i == 0 { C64::ONE } else { C64::ZERO }).collect();
        let pointer_op = vec_outer(&zero, &q_k);
        let sys_op = u_k.dagger();
        kraus.push(kron(&sys_op, &pointer_op)?);

        // K ρ K† applied factor by factor: K = sys_op ⊗ pointer_op on
        // non-adjacent factors 0 and pointer_factor.
        let partial = conjugate_factor(&state.op, dims, 0, &sys_op)?;
        let branch_op = conjugate_factor(&partial, dims, pointer_factor, &pointer_op)?;
        let p = branch_op.trace().re;
        restored_op = restored_op.add(&branch_op);
        branch_probs.push(p);
        let scaled = branch_op.scale(crate::linalg::c64(1.0 / p, 0.0));
        branches.push(DensityState::new_unchecked(
            scaled,
            state.dims.clone(),
            state.labels.clone(),
        ));
    }
    let restored =
        DensityState::new_unchecked(restored_op, state.dims.clone(), state.labels.clone());
    Ok(LoccUndo { restored, branches, branch_probs, kraus })
}

/// Decompose the final state by the computational value of one pointer
/// register (zero-based step index). Entries are `(probability, state)`
/// with `state = None` when the probability vanishes.
pub fn conditional_states_given_device(
    traj: &Trajectory,
    device: usize,
) -> Result<Vec<(f64, Option<DensityState>)>> {
    let n = traj.n_steps();
    if device >= n {
        return Err(Error::Shape(format!("device {} out of range for {} steps", device, n)));
    }
    let state = traj.final_state();
    let dims = &state.dims;
    let factor = 1 + device;
    let dq = dims[factor];
    let right: usize = dims[factor + 1..].iter().product();
    let total = state.op.rows;
    let mut out = Vec::with_capacity(dq);
    for q in 0..dq {
        let mut block = CMatrix::zeros(total, total);
        for r in 0..total {
            if r / right % dq != q {
                continue;
            }
            for c in 0..total {
                if c / right % dq != q {
                    continue;
                }
                block.set(r, c, state.op.get(r, c));
            }
        }
        let p = block.trace().re;
        if p <= 1e-12 {
            out.push((p.max(0.0), None));
        } else {
            let cond = block.scale(crate::linalg::c64(1.0 / p, 0.0));
            out.push((
                p,
                Some(DensityState::new_unchecked(cond, state.dims.clone(), state.labels.clone())),
            ));
        }
    }
    Ok(out)
}

/// Maximally entangled input `(S, Sp)` in the basis of the first step,
/// ready to be used as a scenario initial state.
pub fn entangled_probe(basis: &Basis) -> DensityState {
    let psi = maximally_entangled_vec(basis);
    let d = basis.dim();
    DensityState::from_pure(&psi, &[d, d], &["S", "Sp"])
        .expect("maximally entangled probe is always valid")
}
