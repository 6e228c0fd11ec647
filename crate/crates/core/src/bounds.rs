//! Certified checks of the entropic laws obeyed by sequential coherent
//! measurements.
//!
//! Every check evaluates both sides of one inequality or identity on a
//! concrete trajectory and returns a [`BoundReport`]: the two sides, the
//! direction, the signed slack (oriented so that nonnegative means
//! satisfied), a pass flag, and a metadata map with the auxiliary quantities
//! a reader needs to audit the number. Checks validate their own
//! preconditions and refuse trajectories outside them instead of silently
//! reporting vacuous numbers.
//!
//! The central quantity is the coherent-measurement entanglement
//! `E = −H(S|M1..Mn)` of the final state: how much the system ends up
//! entangled with the chain of unread pointer registers.

use crate::circuit::{locc_undo_last, simulate, MeasurementStep, Scenario, Trajectory};
use crate::entropy::{
    classical_entropy, conditional_vn, hmax_conditional, hmin_conditional, pinsker_lower_bound,
    relative_entropy, von_neumann, EntropyValue, EntropyVariant, RelEntropyKind,
};
use crate::linalg::{kron, trace_distance, trace_distance_upper, CMatrix};
use crate::qstate::{
    maximally_entangled, overlap_c, overlap_row, Basis, DensityState,
};
use crate::tol::Tolerances;
use crate::{Error, Result};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

/// Which way a report's inequality points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundDirection {
    /// `lhs ≥ rhs`.
    GreaterEq,
    /// `lhs ≤ rhs`.
    LessEq,
    /// `lhs = rhs`.
    Equal,
}

impl BoundDirection {
    fn as_str(&self) -> &'static str {
        match self {
            BoundDirection::GreaterEq => "ge",
            BoundDirection::LessEq => "le",
            BoundDirection::Equal => "eq",
        }
    }
}

/// Round to 12 significant digits, for stable serialized output.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().expect("formatted float always parses")
}

/// The outcome of one verified inequality or identity.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub name: String,
    /// Left side; may be `f64::INFINITY` for divergent relative entropies.
    pub lhs: f64,
    pub rhs: f64,
    pub direction: BoundDirection,
    /// Signed margin, oriented so that `slack ≥ −tol ⇔ holds`; `None` when
    /// either side is non-finite.
    pub slack: Option<f64>,
    pub holds: bool,
    /// Auxiliary quantities for auditing the check.
    pub meta: BTreeMap<String, Value>,
}

impl BoundReport {
    fn new(name: &str, lhs: f64, rhs: f64, direction: BoundDirection, tol: f64) -> Self {
        let (slack, holds) = if lhs.is_finite() && rhs.is_finite() {
            let s = match direction {
                BoundDirection::GreaterEq => lhs - rhs,
                BoundDirection::LessEq => rhs - lhs,
                BoundDirection::Equal => -(lhs - rhs).abs(),
            };
            (Some(s), s >= -tol)
        } else {
            // Infinities satisfy only the strict orderings they imply.
            let ok = match direction {
                BoundDirection::GreaterEq => lhs > rhs || lhs == rhs,
                BoundDirection::LessEq => lhs < rhs || lhs == rhs,
                BoundDirection::Equal => lhs == rhs,
            };
            (None, ok)
        };
        BoundReport {
            name: name.to_string(),
            lhs,
            rhs,
            direction,
            slack,
            holds,
            meta: BTreeMap::new(),
        }
    }

    fn with_f64(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.to_string(), json_f64(value));
        self
    }

    fn with_value(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    /// And the pass flag with an extra named condition, recording it in the
    /// metadata.
    fn also_require(mut self, key: &str, ok: bool) -> Self {
        self.meta.insert(key.to_string(), Value::Bool(ok));
        self.holds &= ok;
        self
    }

    /// Serialize with floats rounded to 12 significant digits and infinite
    /// sides encoded as the string `"inf"`.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("lhs".into(), json_f64(self.lhs));
        m.insert("rhs".into(), json_f64(self.rhs));
        m.insert("direction".into(), Value::String(self.direction.as_str().into()));
        m.insert(
            "slack".into(),
            self.slack.map(|s| json_f64(s)).unwrap_or(Value::Null),
        );
        m.insert("holds".into(), Value::Bool(self.holds));
        m.insert("meta".into(), Value::Object(self.meta.clone().into_iter().collect()));
        Value::Object(m)
    }
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(round12(x))
    } else if x > 0.0 {
        Value::String("inf".into())
    } else if x < 0.0 {
        Value::String("-inf".into())
    } else {
        Value::String("nan".into())
    }
}

/// `E = −H(S | M1..Mn)` on the final state of a trajectory.
pub fn entanglement_coherent(traj: &Trajectory) -> Result<f64> {
    let labels = traj.device_labels();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    Ok(-conditional_vn(traj.final_state(), &["S"], &refs)?)
}

fn require_sharp_devices(traj: &Trajectory, what: &str) -> Result<()> {
    if traj.devices.iter().any(|d| !d.is_pure()) {
        return Err(Error::Unsupported(format!("{} requires ideal (sharp) pointers", what)));
    }
    Ok(())
}

fn require_pure_input(traj: &Trajectory, what: &str) -> Result<()> {
    let mut keep = vec!["S"];
    if traj.has_reference {
        keep.push("Sp");
    }
    let sys = traj.states[0].reduce(&keep)?;
    if (sys.purity() - 1.0).abs() > 1e-9 {
        return Err(Error::Unsupported(format!(
            "{} requires a pure input; track the reference to purify a mixed one",
            what
        )));
    }
    Ok(())
}

fn require_two_steps(traj: &Trajectory, what: &str) -> Result<()> {
    if traj.n_steps() != 2 {
        return Err(Error::Unsupported(format!("{} is stated for exactly two steps", what)));
    }
    Ok(())
}

/// Entropic uncertainty of two measurements on one state:
/// `H(p_x) + H(p_z) ≥ log2(1/c)`.
pub fn check_preparation_uncertainty(
    rho: &CMatrix,
    x: &Basis,
    z: &Basis,
    tols: &Tolerances,
) -> Result<BoundReport> {
    let d = x.dim();
    if z.dim() != d || rho.rows != d || !rho.is_square() {
        return Err(Error::Shape("state and bases must share one dimension".into()));
    }
    let state = DensityState::new(rho.clone(), &[d], &["S"])?;
    let px = state.probs_in_basis("S", x)?;
    let pz = state.probs_in_basis("S", z)?;
    let c = overlap_c(x, z);
    let lhs = classical_entropy(&px, EntropyVariant::Shannon)?
        + classical_entropy(&pz, EntropyVariant::Shannon)?;
    let rhs = -c.log2();
    Ok(BoundReport::new("maassen_uffink", lhs, rhs, BoundDirection::GreaterEq, tols.slack_tol)
        .with_f64("c", c)
        .with_value("d", json!(d)))
}

/// The two lower bounds on coherent-measurement entanglement after two sharp
/// steps, plus the record/reference identities when the global state is pure.
#[derive(Debug, Clone)]
pub struct EntanglementBounds {
    /// `E = −H(S|M1M2)` of the final state.
    pub entanglement: f64,
    /// `E ≥ log2(1/c)`.
    pub overlap: BoundReport,
    /// `E ≥ Σ_j p_j H({|<x_j|z_k>|²}_k)` — never weaker than the overlap
    /// bound.
    pub outcome: BoundReport,
    /// `H(X|M1) = 0` and `H(Z|Sp) = E` on the intermediate state; present
    /// only when a reference is tracked.
    pub memory_identity: Option<BoundReport>,
}

/// Verify the entanglement lower bounds on a two-step sharp-pointer
/// trajectory with pure global input.
pub fn check_entanglement_bounds(
    traj: &Trajectory,
    tols: &Tolerances,
) -> Result<EntanglementBounds> {
    require_two_steps(traj, "the entanglement bound")?;
    require_sharp_devices(traj, "the entanglement bound")?;
    require_pure_input(traj, "the entanglement bound")?;

    let e = entanglement_coherent(traj)?;
    let c = traj.overlaps[0];
    let d = traj.d;
    let overlap = BoundReport::new(
        "entanglement_overlap_bound",
        e,
        -c.log2(),
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_f64("c", c)
    .with_value("d", json!(d));

    let px = traj.states[0].reduce(&["S"])?.probs_in_basis("S", &traj.bases[0])?;
    let mut rhs_outcome = 0.0;
    for (j, &p) in px.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let row = overlap_row(&traj.bases[0], &traj.bases[1], j);
        rhs_outcome += p * classical_entropy(&row, EntropyVariant::Shannon)?;
    }
    let rhs_overlap = -c.log2();
    let outcome = BoundReport::new(
        "entanglement_outcome_average_bound",
        e,
        rhs_outcome,
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_f64("c", c)
    .with_f64("overlap_rhs", rhs_overlap)
    .also_require("dominates_overlap_rhs", rhs_outcome >= rhs_overlap - tols.slack_tol);

    let memory_identity = if traj.has_reference {
        Some(check_memory_identity(traj, e, tols)?)
    } else {
        None
    };

    Ok(EntanglementBounds { entanglement: e, overlap, outcome, memory_identity })
}

/// The two intermediate-state identities behind the entanglement bound: the
/// first record predicts the first measurement perfectly, `H(X|M1) = 0`,
/// and the second measurement's uncertainty given the reference equals the
/// final entanglement, `H(Z|Sp) = E`.
fn check_memory_identity(traj: &Trajectory, e: f64, tols: &Tolerances) -> Result<BoundReport> {
    let mid = &traj.states[1];
    let x_classical = crate::qstate::dephase(mid, "S", &traj.bases[0])?;
    let h_x = conditional_vn(&x_classical, &["S"], &["M1"])?;
    let z_classical = crate::qstate::dephase(&mid.reduce(&["S", "Sp"])?, "S", &traj.bases[1])?;
    let h_z = conditional_vn(&z_classical, &["S"], &["Sp"])?;
    let lhs = h_x.abs().max((h_z - e).abs());
    Ok(BoundReport::new(
        "memory_uncertainty_identity",
        lhs,
        0.0,
        BoundDirection::Equal,
        tols.atol_exact,
    )
    .with_f64("h_x_given_record", h_x)
    .with_f64("h_z_given_reference", h_z)
    .with_f64("entanglement", e))
}

/// `E = log2 d` exactly when the two sharp steps use mutually unbiased
/// bases.
pub fn check_mub_saturation(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    require_two_steps(traj, "saturation")?;
    require_sharp_devices(traj, "saturation")?;
    require_pure_input(traj, "saturation")?;
    if !traj.bases[0].is_mub_with(&traj.bases[1], tols.atol_exact) {
        return Err(Error::Domain("saturation check needs mutually unbiased bases".into()));
    }
    let e = entanglement_coherent(traj)?;
    let d = traj.d as f64;
    Ok(BoundReport::new("mub_saturation", e, d.log2(), BoundDirection::Equal, tols.slack_tol)
        .with_f64("c", traj.overlaps[0])
        .with_value("d", json!(traj.d)))
}

/// For mutually unbiased sharp steps, a unitary on the two records alone
/// factorizes the final state into a maximally entangled `(S, M2)` pair and
/// a copy of the input on `M1`:
///
/// ```text
///   U_{M1M2} (H ⊗ 1) ρ⁽²⁾ (H ⊗ 1)† U_{M1M2}† = [Φ]_{S M2} ⊗ ρ⁰_{M1}
/// ```
///
/// with `H = Σ_j |x_j><j|`, `U = Σ_l D_l ⊗ |l><l|`,
/// `D_l = √d Σ_j <x_j|z_l> |x_j><x_j|`, and `|Φ> = d^{-1/2} Σ_l |z_l>|l>`.
pub fn check_mub_factorization(
    rho0: &CMatrix,
    x: &Basis,
    z: &Basis,
    tols: &Tolerances,
) -> Result<BoundReport> {
    let d = x.dim();
    if !x.is_mub_with(z, tols.atol_exact) {
        return Err(Error::Domain("factorization requires mutually unbiased bases".into()));
    }
    let initial = DensityState::new(rho0.clone(), &[d], &["S"])?;
    let sc = Scenario::new(
        initial,
        vec![MeasurementStep::pure(x.clone()), MeasurementStep::pure(z.clone())],
    );
    let traj = simulate(&sc)?;
    let rho2 = &traj.final_state().op;

    // Disentangler W = (1_S ⊗ U·(H ⊗ 1)) on records only.
    let h = &x.vectors;
    let root_d = (d as f64).sqrt();
    let mut u = CMatrix::zeros(d * d, d * d);
    for l in 0..d {
        let mut dl = CMatrix::zeros(d, d);
        for j in 0..d {
            let xj = x.vector(j);
            let zl = z.vector(l);
            let amp = crate::linalg::vec_inner(&xj, &zl) * root_d;
            let proj = x.projector(j);
            dl = dl.add(&proj.scale(amp));
        }
        let el = CMatrix::from_fn(d, d, |r, c| {
            if r == l && c == l {
                crate::linalg::C64::ONE
            } else {
                crate::linalg::C64::ZERO
            }
        });
        u = u.add(&kron(&dl, &el)?);
    }
    let w_records = u.matmul(&kron(h, &CMatrix::identity(d))?);
    let w = kron(&CMatrix::identity(d), &w_records)?;
    let mapped = w.matmul(rho2).matmul(&w.dagger());

    // Target [Φ]_{S,M2} ⊗ ρ⁰_{M1}, assembled on (S, M2, M1) then reordered.
    let phi = maximally_entangled(z);
    let target_sm2_m1 = kron(&phi.op, rho0)?;
    let target = crate::linalg::permute_systems(&target_sm2_m1, &[d, d, d], &[0, 2, 1])?;

    let lhs = trace_distance(&mapped, &target)?;
    Ok(BoundReport::new(
        "mub_factorization",
        lhs,
        0.0,
        BoundDirection::Equal,
        tols.atol_exact,
    )
    .with_value("d", json!(d))
    .also_require("disentangler_unitary", w_records.is_unitary(1e-9)))
}

/// Decoupling of the system from its reference:
/// `D(ρ_SSp ‖ 1/d ⊗ ρ_Sp) ≤ log2(d·c_min)` after sharp measurements in
/// bases whose consecutive overlaps are at most `c_min`.
pub fn check_decoupling(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    if !traj.has_reference {
        return Err(Error::Unsupported("decoupling needs a tracked reference".into()));
    }
    if traj.n_steps() < 2 {
        return Err(Error::Unsupported("decoupling needs at least two steps".into()));
    }
    require_sharp_devices(traj, "decoupling")?;
    require_pure_input(traj, "decoupling")?;

    let joint = traj.final_state().reduce(&["S", "Sp"])?;
    let r_dim = joint.dims[1];
    let rho_ref = joint.reduce(&["Sp"])?;
    let sigma = kron(
        &CMatrix::identity(traj.d).scale(crate::linalg::c64(1.0 / traj.d as f64, 0.0)),
        &rho_ref.op,
    )?;
    let lhs = relative_entropy(&joint.op, &sigma, RelEntropyKind::VonNeumann)?;
    let c_min = traj.overlaps.iter().cloned().fold(1.0_f64, f64::min);
    let rhs = (traj.d as f64 * c_min).log2();

    let lhs_f = lhs.to_f64();
    let mut report =
        BoundReport::new("decoupling_relative_entropy", lhs_f, rhs, BoundDirection::LessEq, tols.slack_tol)
            .with_f64("c_min", c_min)
            .with_value("d", json!(traj.d))
            .with_value("reference_dim", json!(r_dim));
    if let EntropyValue::Finite(v) = lhs {
        let pinsker = pinsker_lower_bound(&joint.op, &sigma)?;
        let identity = (traj.d as f64).log2() - conditional_vn(&joint, &["S"], &["Sp"])?;
        report = report
            .with_f64("pinsker_lower", pinsker)
            .with_f64("identity_residual", (v - identity).abs())
            .also_require("dominates_pinsker", v >= pinsker - tols.slack_tol)
            .also_require("matches_conditional_entropy_identity", (v - identity).abs() <= tols.slack_tol);
    }
    Ok(report)
}

/// Convexity-style bound for negative conditional entropy of a mixture:
/// `−H(A|B)_ρ̄ ≥ Σ_j p_j (−H(A|B)_{ρ_j}) − H(p)`.
pub fn check_mixture_bound(
    parts: &[(f64, DensityState)],
    a: &[&str],
    b: &[&str],
    tols: &Tolerances,
) -> Result<BoundReport> {
    if parts.is_empty() {
        return Err(Error::Domain("mixture needs at least one part".into()));
    }
    let probs: Vec<f64> = parts.iter().map(|(p, _)| *p).collect();
    let h_p = classical_entropy(&probs, EntropyVariant::Shannon)?;
    let dims = parts[0].1.dims.clone();
    let mut acc = CMatrix::zeros(parts[0].1.op.rows, parts[0].1.op.cols);
    let mut avg_neg = 0.0;
    for (p, st) in parts {
        if st.dims != dims {
            return Err(Error::Shape("mixture parts must share the register layout".into()));
        }
        acc = acc.add(&st.op.scale(crate::linalg::c64(*p, 0.0)));
        if *p > 0.0 {
            avg_neg += p * -conditional_vn(st, a, b)?;
        }
    }
    let labels: Vec<&str> = parts[0].1.labels.iter().map(|s| s.as_str()).collect();
    let mixed = DensityState::new(acc, &dims, &labels)?;
    let lhs = -conditional_vn(&mixed, a, b)?;
    let rhs = avg_neg - h_p;
    Ok(BoundReport::new(
        "conditional_entropy_mixture_bound",
        lhs,
        rhs,
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_f64("h_p", h_p)
    .with_value("n_parts", json!(parts.len())))
}

/// Entanglement bound with classically mixed pointers:
/// `E ≥ log2(1/c) − H(α) − H(β)`.
pub fn check_mixed_device_bound(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    require_two_steps(traj, "the mixed-pointer bound")?;
    require_pure_input(traj, "the mixed-pointer bound")?;
    let e = entanglement_coherent(traj)?;
    let c = traj.overlaps[0];
    let h_a = classical_entropy(&traj.devices[0].probs, EntropyVariant::Shannon)?;
    let h_b = classical_entropy(&traj.devices[1].probs, EntropyVariant::Shannon)?;
    let rhs = -c.log2() - h_a - h_b;
    Ok(BoundReport::new(
        "mixed_device_entanglement_bound",
        e,
        rhs,
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_f64("c", c)
    .with_f64("h_alpha", h_a)
    .with_f64("h_beta", h_b))
}

/// Coherent-information lower bound on what the pointer chain can send
/// onward: at maximally mixed input,
/// `H(M1..Mn) − H(S) ≥ log2(1/c) − H(α) − H(β)`.
///
/// Two steps may use mixed pointers; longer chains require sharp ones, and
/// the bound then uses the smallest consecutive overlap.
pub fn check_coherent_info_capacity(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    let rhs = transfer_rhs_log(traj, "the capacity bound")?;
    let d = traj.d;
    let mixed = DensityState::new(
        CMatrix::identity(d).scale(crate::linalg::c64(1.0 / d as f64, 0.0)),
        &[d],
        &["S"],
    )?;
    let steps: Vec<MeasurementStep> = traj
        .bases
        .iter()
        .zip(&traj.devices)
        .map(|(b, dev)| MeasurementStep::mixed(b.clone(), dev.clone()))
        .collect();
    let run = simulate(&Scenario::new(mixed, steps))?;
    let labels = run.device_labels();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let h_m = von_neumann(&run.final_state().reduce(&refs)?)?;
    let h_s = von_neumann(&run.final_state().reduce(&["S"])?)?;
    let lhs = h_m - h_s;
    Ok(BoundReport::new(
        "coherent_info_capacity_bound",
        lhs,
        rhs,
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_f64("h_records", h_m)
    .with_f64("h_system", h_s)
    .with_value("d", json!(d)))
}

/// Right-hand side `log2(1/c) − Σ H(device)` shared by the transfer bounds,
/// with the two-step/mixed versus multi-step/sharp precondition.
fn transfer_rhs_log(traj: &Trajectory, what: &str) -> Result<f64> {
    if traj.n_steps() < 2 {
        return Err(Error::Unsupported(format!("{} needs at least two steps", what)));
    }
    if traj.n_steps() == 2 {
        let h_a = classical_entropy(&traj.devices[0].probs, EntropyVariant::Shannon)?;
        let h_b = classical_entropy(&traj.devices[1].probs, EntropyVariant::Shannon)?;
        Ok(-traj.overlaps[0].log2() - h_a - h_b)
    } else {
        require_sharp_devices(traj, &format!("{} with more than two steps", what))?;
        let c_min = traj.overlaps.iter().cloned().fold(1.0_f64, f64::min);
        Ok(-c_min.log2())
    }
}

/// One-shot recovery bound: feeding half of a maximally entangled pair
/// through the steps, the best entanglement fidelity of any recovery from
/// the records,
///
/// ```text
///   F = (1/d)·2^{−Hmin(Sp|M1..Mn)}  ≥  (1/(d·c))·2^{−H(α)−H(β)} ,
/// ```
///
/// with the multi-step sharp variant using the smallest consecutive
/// overlap. The left side is exact (it is the semidefinite dual of the
/// optimal recovery problem), so this also certifies the min-entropy solver.
pub fn check_recovery_fidelity(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    let rhs_log = transfer_rhs_log(traj, "the recovery bound")?;
    let d = traj.d;
    let probe = maximally_entangled(&Basis::standard(d));
    let steps: Vec<MeasurementStep> = traj
        .bases
        .iter()
        .zip(&traj.devices)
        .map(|(b, dev)| MeasurementStep::mixed(b.clone(), dev.clone()))
        .collect();
    let run = simulate(&Scenario::new(probe, steps))?;
    let labels = run.device_labels();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let sdp = hmin_conditional(run.final_state(), &["Sp"], &refs)?;
    let lhs = 2.0_f64.powf(-sdp.hmin) / d as f64;
    let rhs = 2.0_f64.powf(rhs_log) / d as f64;
    let h_cond = conditional_vn(run.final_state(), &["Sp"], &refs)?;
    Ok(BoundReport::new(
        "recovery_fidelity_bound",
        lhs,
        rhs,
        BoundDirection::GreaterEq,
        tols.slack_tol_sdp,
    )
    .with_f64("hmin", sdp.hmin)
    .with_f64("h_conditional", h_cond)
    .with_f64("sdp_gap", sdp.gap)
    .with_f64("sdp_feasibility", sdp.feasibility)
    .with_value("d", json!(d))
    .also_require("sdp_witness_feasible", sdp.feasibility > -1e-8)
    .also_require("hmin_below_vn", sdp.hmin <= h_cond + tols.slack_tol_sdp))
}

/// Entanglement never decreases along a sharp-pointer chain, because each
/// step can be undone by local operations: `E_{m+1} ≥ E_m` for all `m`,
/// verified together with the undo itself.
pub fn check_monotonicity(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    require_sharp_devices(traj, "monotonicity")?;
    let n = traj.n_steps();
    if n < 2 {
        return Err(Error::Unsupported("monotonicity needs at least two steps".into()));
    }
    let mut sequence = Vec::with_capacity(n);
    for m in 1..=n {
        let labels: Vec<String> = (1..=m).map(|i| format!("M{}", i)).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        sequence.push(-conditional_vn(&traj.states[m], &["S"], &refs)?);
    }
    let lhs = sequence
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);

    let undo = locc_undo_last(traj)?;
    let expect = &traj.states[n - 1];
    let residual = certified_trace_distance(&undo.restored.op, &expect.op, tols.atol_exact)?;
    let mut branch_residual = 0.0_f64;
    for branch in &undo.branches {
        branch_residual =
            branch_residual.max(certified_trace_distance(&branch.op, &expect.op, tols.atol_exact)?);
    }

    let seq_json: Vec<Value> = sequence.iter().map(|&e| json_f64(e)).collect();
    Ok(BoundReport::new(
        "entanglement_monotonicity",
        lhs,
        0.0,
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_value("entanglement_sequence", Value::Array(seq_json))
    .with_f64("undo_residual", residual)
    .with_f64("max_branch_residual", branch_residual)
    .also_require("undo_restores_state", residual <= tols.atol_exact)
    .also_require("branches_restore_state", branch_residual <= tols.atol_exact))
}

/// Multi-step entanglement bound from any pair of consecutive sharp steps:
/// `E_final ≥ log2(1/min_m c_{m,m+1})`.
pub fn check_consecutive_overlap(traj: &Trajectory, tols: &Tolerances) -> Result<BoundReport> {
    if traj.n_steps() < 2 {
        return Err(Error::Unsupported("needs at least two steps".into()));
    }
    require_sharp_devices(traj, "the consecutive-overlap bound")?;
    require_pure_input(traj, "the consecutive-overlap bound")?;
    let e = entanglement_coherent(traj)?;
    let c_min = traj.overlaps.iter().cloned().fold(1.0_f64, f64::min);
    Ok(BoundReport::new(
        "consecutive_overlap_bound",
        e,
        -c_min.log2(),
        BoundDirection::GreaterEq,
        tols.slack_tol,
    )
    .with_f64("c_min", c_min)
    .with_value("n_steps", json!(traj.n_steps())))
}

/// Ordering of the three conditional entropies on one bipartition:
/// `Hmin(A|B) ≤ H(A|B) ≤ Hmax(A|B)`. The report's left side is the smaller
/// of the two gaps, so a single nonnegative slack certifies the whole chain.
pub fn check_entropy_order(
    state: &DensityState,
    a: &[&str],
    b: &[&str],
    tols: &Tolerances,
) -> Result<BoundReport> {
    let sdp = hmin_conditional(state, a, b)?;
    let h = conditional_vn(state, a, b)?;
    let hmax = hmax_conditional(state, a, b)?;
    let lhs = (h - sdp.hmin).min(hmax - h);
    Ok(BoundReport::new(
        "conditional_entropy_order",
        lhs,
        0.0,
        BoundDirection::GreaterEq,
        tols.slack_tol_sdp,
    )
    .with_f64("hmin", sdp.hmin)
    .with_f64("h", h)
    .with_f64("hmax", hmax)
    .with_f64("sdp_gap", sdp.gap))
}

/// Self-consistency of the min/max pair through purification: on a pure
/// state over `A ∪ B ∪ C`, `Hmin(A|B) = −Hmax(A|C)`, where the two sides
/// are computed along independent code paths (a direct cone program versus
/// a freshly built purification of `ρ_AC`).
pub fn check_minmax_duality(
    state: &DensityState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tols: &Tolerances,
) -> Result<BoundReport> {
    let mut all: Vec<&str> = Vec::new();
    all.extend_from_slice(a);
    all.extend_from_slice(b);
    all.extend_from_slice(c);
    let joint = state.reduce(&all)?;
    if (joint.purity() - 1.0).abs() > tols.atol_exact {
        return Err(Error::Domain(
            "min/max duality needs a pure state over the three registers".into(),
        ));
    }
    let hmin = hmin_conditional(state, a, b)?.hmin;
    let hmax = hmax_conditional(state, a, c)?;
    Ok(BoundReport::new(
        "minmax_purification_duality",
        (hmin + hmax).abs(),
        0.0,
        BoundDirection::Equal,
        tols.slack_tol_sdp,
    )
    .with_f64("hmin_given_b", hmin)
    .with_f64("hmax_given_c", hmax))
}

/// Trace distance, certified cheaply when possible: the Frobenius bound
/// `½·√n·‖a−b‖_F` avoids the spectral decomposition whenever it already
/// sits below `tol`.
fn certified_trace_distance(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<f64> {
    let upper = trace_distance_upper(a, b);
    if upper <= tol {
        Ok(upper)
    } else {
        trace_distance(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{MeasurementStep, Scenario};
    use crate::entropy::binary_entropy;
    use crate::qstate::{random_density, random_pure, DeviceDistribution};
    use std::f64::consts::FRAC_PI_6;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn rotated_pair_trajectory(track: bool) -> Trajectory {
        let initial = DensityState::from_pure(
            &[crate::linalg::C64::ONE, crate::linalg::C64::ZERO],
            &[2],
            &["S"],
        )
        .unwrap();
        let sc = Scenario {
            initial,
            steps: vec![
                MeasurementStep::pure(Basis::standard(2)),
                MeasurementStep::pure(Basis::rotation(FRAC_PI_6)),
            ],
            track_reference: track,
        };
        simulate(&sc).unwrap()
    }

    #[test]
    fn frozen_rotated_pair_bounds() {
        let traj = rotated_pair_trajectory(true);
        let b = check_entanglement_bounds(&traj, &tols()).unwrap();
        let e_expect = binary_entropy(0.75);
        assert!((b.entanglement - e_expect).abs() < 1e-10, "E = {}", b.entanglement);
        assert!((b.overlap.rhs - (4.0_f64 / 3.0).log2()).abs() < 1e-12);
        assert!(b.overlap.holds);
        // For the |0> input the outcome-average bound is tight.
        assert!((b.outcome.rhs - e_expect).abs() < 1e-10);
        assert!(b.outcome.holds);
        let mem = b.memory_identity.unwrap();
        assert!(mem.holds, "memory identity: {:?}", mem);
    }

    #[test]
    fn frozen_rotated_pair_decoupling() {
        let traj = rotated_pair_trajectory(true);
        let r = check_decoupling(&traj, &tols()).unwrap();
        assert!((r.rhs - 1.5_f64.log2()).abs() < 1e-12);
        assert!((r.lhs - (1.0 - binary_entropy(0.75))).abs() < 1e-9, "lhs = {}", r.lhs);
        assert!(r.holds, "decoupling: {:?}", r);
    }

    #[test]
    fn frozen_rotated_pair_recovery() {
        let traj = rotated_pair_trajectory(false);
        let r = check_recovery_fidelity(&traj, &tols()).unwrap();
        assert!((r.rhs - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.holds, "recovery: {:?}", r);
        assert!(r.lhs <= 1.0 + 1e-6);
    }

    #[test]
    fn mub_pair_saturates_and_factorizes() {
        for d in [2usize, 3] {
            let psi = random_pure(d, 600 + d as u64);
            let initial = DensityState::from_pure(&psi, &[d], &["S"]).unwrap();
            let sc = Scenario::new(
                initial,
                vec![
                    MeasurementStep::pure(Basis::standard(d)),
                    MeasurementStep::pure(Basis::fourier(d)),
                ],
            );
            let traj = simulate(&sc).unwrap();
            let sat = check_mub_saturation(&traj, &tols()).unwrap();
            assert!(sat.holds, "saturation failed at d = {}: {:?}", d, sat);

            let rho0 = random_density(d, d, 610 + d as u64).unwrap();
            let fac = check_mub_factorization(
                &rho0.op,
                &Basis::standard(d),
                &Basis::fourier(d),
                &tols(),
            )
            .unwrap();
            assert!(fac.holds, "factorization failed at d = {}: {:?}", d, fac);
        }
    }

    #[test]
    fn factorization_rejects_biased_bases() {
        let rho0 = random_density(2, 1, 620).unwrap();
        let err = check_mub_factorization(
            &rho0.op,
            &Basis::standard(2),
            &Basis::rotation(FRAC_PI_6),
            &tols(),
        );
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn preparation_uncertainty_tight_for_mub_and_eigenstate() {
        let rho = crate::linalg::vec_outer(
            &[crate::linalg::C64::ONE, crate::linalg::C64::ZERO],
            &[crate::linalg::C64::ONE, crate::linalg::C64::ZERO],
        );
        let r = check_preparation_uncertainty(
            &rho,
            &Basis::standard(2),
            &Basis::fourier(2),
            &tols(),
        )
        .unwrap();
        assert!(r.holds);
        assert!((r.lhs - 1.0).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_bound_families() {
        let t = tols();
        // Flags on the conditioned side with one common tail: equality.
        let sigma = random_density(2, 2, 700).unwrap();
        let mut parts = Vec::new();
        for j in 0..2usize {
            let mut flag = CMatrix::zeros(2, 2);
            flag.set(j, j, crate::linalg::C64::ONE);
            let op = kron(&flag, &sigma.op).unwrap();
            parts.push((
                if j == 0 { 0.3 } else { 0.7 },
                DensityState::new(op, &[2, 2], &["A", "B"]).unwrap(),
            ));
        }
        let r = check_mixture_bound(&parts, &["A"], &["B"], &t).unwrap();
        assert!(r.holds);
        assert!(r.slack.unwrap().abs() < 1e-9, "equality family slack = {:?}", r.slack);

        // Flags on the conditioning side: slack is exactly H(p).
        let tail = random_density(2, 2, 701).unwrap();
        let mut parts = Vec::new();
        for j in 0..2usize {
            let mut flag = CMatrix::zeros(2, 2);
            flag.set(j, j, crate::linalg::C64::ONE);
            let op = kron(&tail.op, &flag).unwrap();
            parts.push((
                if j == 0 { 0.3 } else { 0.7 },
                DensityState::new(op, &[2, 2], &["A", "B"]).unwrap(),
            ));
        }
        let r = check_mixture_bound(&parts, &["A"], &["B"], &t).unwrap();
        assert!(r.holds);
        let h_p = binary_entropy(0.3);
        assert!((r.slack.unwrap() - h_p).abs() < 1e-9, "slack = {:?}", r.slack);
    }

    #[test]
    fn mixed_pointer_bound_frozen_value() {
        let psi = random_pure(2, 710);
        let initial = DensityState::from_pure(&psi, &[2], &["S"]).unwrap();
        let sc = Scenario::new(
            initial,
            vec![
                MeasurementStep::mixed(
                    Basis::standard(2),
                    DeviceDistribution::new(&[0.9, 0.1]).unwrap(),
                ),
                MeasurementStep::pure(Basis::fourier(2)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        let r = check_mixed_device_bound(&traj, &tols()).unwrap();
        assert!((r.rhs - (1.0 - binary_entropy(0.9))).abs() < 1e-12);
        assert!(r.holds, "mixed-pointer bound: {:?}", r);
    }

    #[test]
    fn capacity_bound_on_mub_qubits() {
        let sc = Scenario::new(
            random_density(2, 1, 720).unwrap(),
            vec![
                MeasurementStep::pure(Basis::standard(2)),
                MeasurementStep::pure(Basis::fourier(2)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        let r = check_coherent_info_capacity(&traj, &tols()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9, "capacity lhs = {}", r.lhs);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn recovery_is_perfect_for_mub_qubits() {
        let sc = Scenario::new(
            random_density(2, 1, 730).unwrap(),
            vec![
                MeasurementStep::pure(Basis::standard(2)),
                MeasurementStep::pure(Basis::fourier(2)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        let r = check_recovery_fidelity(&traj, &tols()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-5, "MUB recovery fidelity = {}", r.lhs);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn monotonicity_and_consecutive_bound_on_three_steps() {
        let d = 2;
        let psi = random_pure(d, 740);
        let initial = DensityState::from_pure(&psi, &[d], &["S"]).unwrap();
        let sc = Scenario::new(
            initial,
            vec![
                MeasurementStep::pure(Basis::haar(d, 741)),
                MeasurementStep::pure(Basis::haar(d, 742)),
                MeasurementStep::pure(Basis::haar(d, 743)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        let mono = check_monotonicity(&traj, &tols()).unwrap();
        assert!(mono.holds, "monotonicity: {:?}", mono);
        let cons = check_consecutive_overlap(&traj, &tols()).unwrap();
        assert!(cons.holds, "consecutive: {:?}", cons);
    }

    #[test]
    fn precondition_errors() {
        // Mixed pointer where sharp is required.
        let sc = Scenario::new(
            random_density(2, 1, 750).unwrap(),
            vec![
                MeasurementStep::mixed(
                    Basis::standard(2),
                    DeviceDistribution::uniform(2),
                ),
                MeasurementStep::pure(Basis::fourier(2)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        assert!(matches!(
            check_entanglement_bounds(&traj, &tols()),
            Err(Error::Unsupported(_))
        ));
        // Missing reference for decoupling.
        let sc = Scenario::new(
            random_density(2, 1, 751).unwrap(),
            vec![
                MeasurementStep::pure(Basis::standard(2)),
                MeasurementStep::pure(Basis::fourier(2)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        assert!(matches!(check_decoupling(&traj, &tols()), Err(Error::Unsupported(_))));
        // Mixed input without a reference.
        let sc = Scenario::new(
            random_density(2, 2, 752).unwrap(),
            vec![
                MeasurementStep::pure(Basis::standard(2)),
                MeasurementStep::pure(Basis::fourier(2)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        assert!(matches!(
            check_entanglement_bounds(&traj, &tols()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn report_json_shape() {
        let traj = rotated_pair_trajectory(true);
        let r = check_decoupling(&traj, &tols()).unwrap();
        let v = r.to_json();
        assert_eq!(v["name"], "decoupling_relative_entropy");
        assert_eq!(v["direction"], "le");
        assert!(v["holds"].as_bool().unwrap());
        assert!(v["lhs"].is_number());
        assert!(v["meta"]["c_min"].is_number());
    }

    #[test]
    fn round12_is_format_stable() {
        for &x in &[0.0, 1.0 / 3.0, -2.0e-13, 6.02e23, f64::MIN_POSITIVE] {
            let r = round12(x);
            assert_eq!(r, round12(r));
        }
    }

    #[test]
    fn entropy_order_on_random_bipartite_states() {
        for seed in [31_u64, 32, 33] {
            let rho = random_density(6, 4, seed).unwrap();
            let state = DensityState::new(rho.op.clone(), &[2, 3], &["A", "B"]).unwrap();
            let r = check_entropy_order(&state, &["A"], &["B"], &tols()).unwrap();
            assert!(r.holds, "order chain: {:?}", r);
            let hmin = r.meta["hmin"].as_f64().unwrap();
            let hmax = r.meta["hmax"].as_f64().unwrap();
            assert!(hmin <= hmax + 1e-5);
        }
    }

    #[test]
    fn minmax_duality_on_tripartite_pure_state() {
        let psi = random_pure(12, 77);
        let state = DensityState::from_pure(&psi, &[2, 3, 2], &["A", "B", "C"]).unwrap();
        let r = check_minmax_duality(&state, &["A"], &["B"], &["C"], &tols()).unwrap();
        assert!(r.holds, "duality: {:?}", r);

        // A mixed joint state is outside the identity's domain.
        let mixed = random_density(8, 3, 78).unwrap();
        let mixed = DensityState::new(mixed.op.clone(), &[2, 2, 2], &["A", "B", "C"]).unwrap();
        assert!(matches!(
            check_minmax_duality(&mixed, &["A"], &["B"], &["C"], &tols()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn monotonicity_reports_branch_residuals() {
        let initial =
            DensityState::from_pure(&random_pure(2, 91), &[2], &["S"]).unwrap();
        let sc = Scenario::new(
            initial,
            vec![
                MeasurementStep::pure(Basis::standard(2)),
                MeasurementStep::pure(Basis::fourier(2)),
                MeasurementStep::pure(Basis::haar(2, 92)),
            ],
        );
        let traj = simulate(&sc).unwrap();
        let r = check_monotonicity(&traj, &tols()).unwrap();
        assert!(r.holds, "monotonicity: {:?}", r);
        assert!(r.meta["max_branch_residual"].as_f64().unwrap() <= 1e-9);
        assert_eq!(r.meta["branches_restore_state"], Value::Bool(true));
    }
}
