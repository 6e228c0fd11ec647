//! The `verify` campaign: every bound checker, exercised over seeded random
//! instance families, with deterministic output independent of worker count.

use seqmeas::bounds::{
    check_coherent_info_capacity, check_consecutive_overlap, check_decoupling,
    check_entanglement_bounds, check_entropy_order, check_minmax_duality, check_mixed_device_bound,
    check_mixture_bound, check_mub_factorization, check_mub_saturation, check_monotonicity,
    check_preparation_uncertainty, check_recovery_fidelity, BoundDirection, BoundReport,
};
use seqmeas::circuit::{entangled_probe, simulate, MeasurementStep, Scenario, Trajectory};
use seqmeas::qstate::{random_density, random_pure, Basis, DensityState, DeviceDistribution};
use seqmeas::tol::Tolerances;
use seqmeas::Error;
use std::collections::BTreeMap;
use std::fs;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::{instance_seed, RunConfig};
use crate::report::{Record, Summary};
use crate::scenario::ScenarioSpec;
use crate::CliError;

/// The instance families the campaign covers, in output order. Each drives
/// one or more checkers against its own seeded random scenarios.
pub const FAMILIES: &[&str] = &[
    "uncertainty",
    "entanglement",
    "mub",
    "decoupling",
    "teleport",
    "mixed_device",
    "mixture",
    "multistep",
    "entropy_order",
    "duality",
];

/// One unit of campaign work.
#[derive(Debug, Clone)]
pub struct Task {
    pub family: &'static str,
    pub d: usize,
    pub instance: usize,
    pub seed: u64,
}

/// Enumerate the campaign deterministically: families in fixed order, then
/// dimensions in the configured order, then instances.
pub fn build_tasks(cfg: &RunConfig) -> Vec<Task> {
    let mut tasks = Vec::new();
    for &family in FAMILIES {
        for &d in &cfg.dims {
            for instance in 0..cfg.trials {
                tasks.push(Task {
                    family,
                    d,
                    instance,
                    seed: instance_seed(cfg.seed, family, d, instance),
                });
            }
        }
    }
    tasks
}

/// A uniform draw in `[0.05, 1.05)` per slot, normalized: a strictly
/// positive random pointer distribution.
pub fn random_probs(d: usize, seed: u64) -> Vec<f64> {
    let mut s = seed;
    let mut vals = Vec::with_capacity(d);
    let mut total = 0.0;
    for _ in 0..d {
        s = crate::config::splitmix(s);
        let u = (s >> 11) as f64 / (1u64 << 53) as f64;
        let v = 0.05 + u;
        total += v;
        vals.push(v);
    }
    for v in &mut vals {
        *v /= total;
    }
    vals
}

fn failure_report(context: &str, err: &Error) -> BoundReport {
    BoundReport {
        name: format!("error:{}", context),
        lhs: f64::NAN,
        rhs: f64::NAN,
        direction: BoundDirection::Equal,
        slack: None,
        holds: false,
        meta: BTreeMap::from([(
            "error".to_string(),
            serde_json::Value::String(err.to_string()),
        )]),
    }
}

/// Run one task to its reports. Checker errors become failing reports so a
/// convergence problem in one instance fails the campaign without aborting
/// it.
pub fn run_task(task: &Task, tols: &Tolerances) -> Vec<BoundReport> {
    match run_task_inner(task, tols) {
        Ok(reports) => reports,
        Err(e) => vec![failure_report(task.family, &e)],
    }
}

fn haar_pair(d: usize, seed: u64) -> (Basis, Basis) {
    (Basis::haar(d, seed), Basis::haar(d, seed.wrapping_add(1)))
}

/// Pure input on even instances, mixed (with the rank cycling over 2..=d)
/// on odd ones.
pub fn seeded_input(d: usize, instance: usize, seed: u64) -> Result<DensityState, Error> {
    if instance % 2 == 0 {
        DensityState::from_pure(&random_pure(d, seed), &[d], &["S"])
    } else {
        let rank = 2 + instance % (d - 1).max(1);
        random_density(d, rank.min(d), seed)
    }
}

fn two_sharp_steps(x: Basis, z: Basis) -> Vec<MeasurementStep> {
    vec![MeasurementStep::pure(x), MeasurementStep::pure(z)]
}

fn run_task_inner(task: &Task, tols: &Tolerances) -> Result<Vec<BoundReport>, Error> {
    let d = task.d;
    let seed = task.seed;
    let instance = task.instance;
    match task.family {
        "uncertainty" => {
            let (x, z) = haar_pair(d, seed);
            let input = seeded_input(d, instance, seed.wrapping_add(2))?;
            Ok(vec![check_preparation_uncertainty(&input.op, &x, &z, tols)?])
        }
        "entanglement" => {
            let (x, z) = haar_pair(d, seed);
            let input = seeded_input(d, instance, seed.wrapping_add(2))?;
            let traj = simulate(&Scenario::with_reference(input, two_sharp_steps(x, z)))?;
            let b = check_entanglement_bounds(&traj, tols)?;
            let mut out = vec![b.overlap, b.outcome];
            out.extend(b.memory_identity);
            Ok(out)
        }
        "mub" => {
            let x = Basis::standard(d);
            let z = Basis::fourier(d);
            let input = seeded_input(d, instance, seed)?;
            let factorization = check_mub_factorization(&input.op, &x, &z, tols)?;
            let traj = simulate(&Scenario::with_reference(input, two_sharp_steps(x, z)))?;
            Ok(vec![check_mub_saturation(&traj, tols)?, factorization])
        }
        "decoupling" => {
            // Every tenth instance pins the mutually unbiased case, which
            // must decouple exactly.
            let (x, z) = if instance % 10 == 0 {
                (Basis::standard(d), Basis::fourier(d))
            } else {
                haar_pair(d, seed)
            };
            let probe = entangled_probe(&Basis::standard(d));
            let traj = simulate(&Scenario::new(probe, two_sharp_steps(x, z)))?;
            Ok(vec![check_decoupling(&traj, tols)?])
        }
        "teleport" => {
            let (x, z) = haar_pair(d, seed);
            let (alpha, beta) = if instance % 2 == 0 {
                (DeviceDistribution::pure(d), DeviceDistribution::pure(d))
            } else {
                (
                    DeviceDistribution::new(&random_probs(d, seed.wrapping_add(2)))?,
                    DeviceDistribution::new(&random_probs(d, seed.wrapping_add(3)))?,
                )
            };
            let input = DensityState::from_pure(&random_pure(d, seed.wrapping_add(4)), &[d], &["S"])?;
            let steps = vec![
                MeasurementStep::mixed(x, alpha),
                MeasurementStep::mixed(z, beta),
            ];
            let traj = simulate(&Scenario::new(input, steps))?;
            Ok(vec![
                check_coherent_info_capacity(&traj, tols)?,
                check_recovery_fidelity(&traj, tols)?,
            ])
        }
        "mixed_device" => {
            let (x, z) = haar_pair(d, seed);
            // Every fourth instance takes the sharp limit, where the bound
            // must coincide with the plain overlap bound.
            let (alpha, beta) = if instance % 4 == 3 {
                (DeviceDistribution::pure(d), DeviceDistribution::pure(d))
            } else {
                (
                    DeviceDistribution::new(&random_probs(d, seed.wrapping_add(2)))?,
                    DeviceDistribution::new(&random_probs(d, seed.wrapping_add(3)))?,
                )
            };
            let input = DensityState::from_pure(&random_pure(d, seed.wrapping_add(4)), &[d], &["S"])?;
            let steps = vec![
                MeasurementStep::mixed(x, alpha),
                MeasurementStep::mixed(z, beta),
            ];
            let traj = simulate(&Scenario::new(input, steps))?;
            Ok(vec![check_mixed_device_bound(&traj, tols)?])
        }
        "mixture" => {
            let n_parts = 2 + instance % 3;
            let probs = random_probs(n_parts, seed);
            let mut parts = Vec::with_capacity(n_parts);
            for (k, &p) in probs.iter().enumerate() {
                let rank = 1 + (instance + k) % 3;
                let part = random_density(2 * d, rank.min(2 * d), seed.wrapping_add(10 + k as u64))?;
                let part = DensityState::new(part.op.clone(), &[d, 2], &["A", "B"])?;
                parts.push((p, part));
            }
            Ok(vec![check_mixture_bound(&parts, &["A"], &["B"], tols)?])
        }
        "multistep" => {
            let steps: Vec<MeasurementStep> = (0..3)
                .map(|k| MeasurementStep::pure(Basis::haar(d, seed.wrapping_add(k))))
                .collect();
            let input = DensityState::from_pure(&random_pure(d, seed.wrapping_add(5)), &[d], &["S"])?;
            let traj = simulate(&Scenario::new(input, steps))?;
            Ok(vec![
                check_monotonicity(&traj, tols)?,
                check_consecutive_overlap(&traj, tols)?,
            ])
        }
        "entropy_order" => {
            let rank = 1 + instance % (2 * d);
            let rho = random_density(2 * d, rank, seed)?;
            let state = DensityState::new(rho.op.clone(), &[d, 2], &["A", "B"])?;
            Ok(vec![check_entropy_order(&state, &["A"], &["B"], tols)?])
        }
        "duality" => {
            let psi = random_pure(4 * d, seed);
            let state = DensityState::from_pure(&psi, &[d, 2, 2], &["A", "B", "C"])?;
            Ok(vec![check_minmax_duality(&state, &["A"], &["B"], &["C"], tols)?])
        }
        other => Err(Error::UnknownLabel(format!("instance family '{}'", other))),
    }
}

/// Run the whole campaign (or a single scenario file) and assemble records
/// in deterministic task order.
pub fn run_campaign(cfg: &RunConfig) -> Result<(Vec<Record>, Summary), CliError> {
    let records = match &cfg.scenario_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {}", path.display(), e)))?;
            let spec = ScenarioSpec::from_json(&text)?;
            run_scenario_records(&spec, cfg)?
        }
        None => {
            let tasks = build_tasks(cfg);
            let outputs = run_parallel(&tasks, cfg);
            let mut records = Vec::new();
            for (task, reports) in tasks.iter().zip(outputs) {
                for bound in reports {
                    records.push(Record {
                        family: task.family.to_string(),
                        d: task.d,
                        instance: task.instance,
                        seed: task.seed,
                        bound,
                    });
                }
            }
            records
        }
    };
    let mut summary = Summary::default();
    for record in &records {
        summary.absorb(record);
    }
    Ok((records, summary))
}

fn run_parallel(tasks: &[Task], cfg: &RunConfig) -> Vec<Vec<BoundReport>> {
    let tols = cfg.tolerances;
    if cfg.workers <= 1 {
        return tasks.iter().map(|t| run_task(t, &tols)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Vec<BoundReport>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let out = run_task(&tasks[i], &tols);
                *slots[i].lock().expect("result slot poisoned") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("result slot poisoned").expect("every task ran"))
        .collect()
}

/// Verify a user-supplied scenario: run every checker whose preconditions
/// the trajectory satisfies; checkers that refuse it are skipped, checkers
/// that fail numerically count against the run.
fn run_scenario_records(spec: &ScenarioSpec, cfg: &RunConfig) -> Result<Vec<Record>, CliError> {
    let scenario = spec.build()?;
    let traj = simulate(&scenario)
        .map_err(|e| CliError::Usage(format!("scenario does not simulate: {}", e)))?;
    let tols = &cfg.tolerances;
    let mut reports = Vec::new();
    let mut push = |result: Result<Vec<BoundReport>, Error>, context: &str| match result {
        Ok(mut r) => reports.append(&mut r),
        Err(Error::Unsupported(_)) | Err(Error::Domain(_)) => {}
        Err(e) => reports.push(failure_report(context, &e)),
    };

    push(scenario_entanglement(&traj, tols), "entanglement");
    push(check_mub_saturation(&traj, tols).map(|r| vec![r]), "mub_saturation");
    push(scenario_factorization(&scenario, &traj, tols), "mub_factorization");
    push(check_decoupling(&traj, tols).map(|r| vec![r]), "decoupling");
    push(check_mixed_device_bound(&traj, tols).map(|r| vec![r]), "mixed_device");
    push(check_coherent_info_capacity(&traj, tols).map(|r| vec![r]), "capacity");
    push(check_recovery_fidelity(&traj, tols).map(|r| vec![r]), "recovery");
    push(check_monotonicity(&traj, tols).map(|r| vec![r]), "monotonicity");
    push(check_consecutive_overlap(&traj, tols).map(|r| vec![r]), "consecutive_overlap");
    push(scenario_uncertainty(&scenario, &traj, tols), "uncertainty");

    if reports.is_empty() {
        return Err(CliError::Usage(
            "no checker accepts this scenario (so nothing was verified)".into(),
        ));
    }
    Ok(reports
        .into_iter()
        .map(|bound| Record {
            family: "scenario".to_string(),
            d: traj.d,
            instance: 0,
            seed: cfg.seed,
            bound,
        })
        .collect())
}

fn scenario_entanglement(
    traj: &Trajectory,
    tols: &Tolerances,
) -> Result<Vec<BoundReport>, Error> {
    let b = check_entanglement_bounds(traj, tols)?;
    let mut out = vec![b.overlap, b.outcome];
    out.extend(b.memory_identity);
    Ok(out)
}

fn scenario_factorization(
    scenario: &Scenario,
    traj: &Trajectory,
    tols: &Tolerances,
) -> Result<Vec<BoundReport>, Error> {
    if scenario.initial.dims.len() != 1 || traj.n_steps() != 2 {
        return Err(Error::Unsupported("factorization needs a bare two-step scenario".into()));
    }
    Ok(vec![check_mub_factorization(
        &scenario.initial.op,
        &traj.bases[0],
        &traj.bases[1],
        tols,
    )?])
}

fn scenario_uncertainty(
    scenario: &Scenario,
    traj: &Trajectory,
    tols: &Tolerances,
) -> Result<Vec<BoundReport>, Error> {
    if scenario.initial.dims.len() != 1 || traj.n_steps() < 2 {
        return Err(Error::Unsupported("uncertainty needs a bare input and two bases".into()));
    }
    Ok(vec![check_preparation_uncertainty(
        &scenario.initial.op,
        &traj.bases[0],
        &traj.bases[1],
        tols,
    )?])
}

/// Full `verify` subcommand: campaign, serialization, summary.
///
/// Returns whether every report held. The JSON stream goes to `cfg.out_path`
/// or stdout; the failure digest goes to stderr.
pub fn cmd_verify(cfg: &RunConfig) -> Result<bool, CliError> {
    cfg.validate()?;
    let (records, summary) = run_campaign(cfg)?;
    let mut body = String::new();
    for record in &records {
        body.push_str(&record.to_json_line());
        body.push('\n');
    }
    body.push_str(&summary.to_json_line());
    body.push('\n');
    crate::write_output(&body, cfg.out_path.as_deref())?;
    if !summary.all_hold() {
        eprintln!(
            "verify: {} of {} reports failed",
            summary.failed, summary.total
        );
        for line in summary.failures.iter().take(20) {
            eprintln!("  {}", line);
        }
        if summary.failures.len() > 20 {
            eprintln!("  ... and {} more", summary.failures.len() - 20);
        }
    }
    Ok(summary.all_hold())
}
