//! Acceptance gate: ten criteria, one printed pass/fail line each.
//!
//! Run with `cargo test -p seqmeas-cli --test acceptance -- --nocapture`
//! to see the lines; each test also asserts, so the suite fails loudly.
//! Tolerances are pinned here, in code, next to the checks they gate.

use seqmeas::bounds::{
    check_coherent_info_capacity, check_consecutive_overlap, check_decoupling,
    check_entanglement_bounds, check_entropy_order, check_minmax_duality, check_mixed_device_bound,
    check_mixture_bound, check_mub_factorization, check_mub_saturation, check_monotonicity,
    check_recovery_fidelity,
};
use seqmeas::circuit::{entangled_probe, simulate, MeasurementStep, Scenario};
use seqmeas::entropy::{binary_entropy, hmin_conditional};
use seqmeas::linalg::C64;
use seqmeas::qstate::{random_density, random_pure, Basis, DensityState, DeviceDistribution};
use seqmeas::tol::Tolerances;
use seqmeas_cli::config::instance_seed;
use seqmeas_cli::verify::{random_probs, seeded_input};
use std::f64::consts::FRAC_PI_6;
use std::time::Instant;

const MASTER_SEED: u64 = 42;

fn tols() -> Tolerances {
    Tolerances::default()
}

/// Print the one-line verdict and assert it.
fn conclude(n: u32, what: &str, problems: &[String], started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    let pass = problems.is_empty() && elapsed < budget_s;
    println!(
        "criterion {:02} ({}): {} [{:.2}s of {:.0}s budget]",
        n,
        what,
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        budget_s
    );
    for p in problems.iter().take(10) {
        println!("  problem: {}", p);
    }
    assert!(
        problems.is_empty(),
        "criterion {:02} ({}): {} problems, first: {}",
        n,
        what,
        problems.len(),
        problems.first().map(String::as_str).unwrap_or("")
    );
    assert!(
        elapsed < budget_s,
        "criterion {:02} ({}): {:.2}s exceeded the {:.0}s budget",
        n,
        what,
        elapsed,
        budget_s
    );
}

fn two_sharp(x: Basis, z: Basis) -> Vec<MeasurementStep> {
    vec![MeasurementStep::pure(x), MeasurementStep::pure(z)]
}

#[test]
fn criterion_01_mub_saturation() {
    let started = Instant::now();
    let mut problems = Vec::new();
    for d in 2..=5usize {
        for instance in 0..20 {
            let seed = instance_seed(MASTER_SEED, "acc1", d, instance);
            let input = seeded_input(d, instance, seed).unwrap();
            let traj = simulate(&Scenario::with_reference(
                input,
                two_sharp(Basis::standard(d), Basis::fourier(d)),
            ))
            .unwrap();
            let r = check_mub_saturation(&traj, &tols()).unwrap();
            let gap = (r.lhs - (d as f64).log2()).abs();
            if gap > 1e-9 {
                problems.push(format!("d={} instance={}: |E - log2 d| = {:.2e}", d, instance, gap));
            }
        }
    }
    conclude(1, "complementary steps reach log2 d exactly", &problems, started, 5.0);
}

#[test]
fn criterion_02_factorization() {
    let started = Instant::now();
    let mut problems = Vec::new();
    for d in 2..=5usize {
        for instance in 0..10 {
            let seed = instance_seed(MASTER_SEED, "acc2", d, instance);
            let input = seeded_input(d, instance, seed).unwrap();
            let r =
                check_mub_factorization(&input.op, &Basis::standard(d), &Basis::fourier(d), &tols())
                    .unwrap();
            if r.lhs > 1e-9 || !r.holds {
                problems.push(format!("d={} instance={}: residual = {:.2e}", d, instance, r.lhs));
            }
        }
    }
    conclude(2, "records factor into a Bell pair plus the input", &problems, started, 10.0);
}

#[test]
fn criterion_03_main_bounds_and_identity() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let mut count = 0;
    for (d, n) in [(2usize, 334usize), (3, 333), (4, 333)] {
        for instance in 0..n {
            count += 1;
            let seed = instance_seed(MASTER_SEED, "acc3", d, instance);
            let x = Basis::haar(d, seed);
            let z = Basis::haar(d, seed.wrapping_add(1));
            let input = seeded_input(d, instance, seed.wrapping_add(2)).unwrap();
            let traj = simulate(&Scenario::with_reference(input, two_sharp(x, z))).unwrap();
            let b = check_entanglement_bounds(&traj, &tols()).unwrap();
            if b.overlap.slack.unwrap_or(f64::NEG_INFINITY) < -1e-7 {
                problems.push(format!("d={} i={}: overlap slack {:?}", d, instance, b.overlap.slack));
            }
            if b.outcome.slack.unwrap_or(f64::NEG_INFINITY) < -1e-7 {
                problems.push(format!("d={} i={}: outcome slack {:?}", d, instance, b.outcome.slack));
            }
            if b.outcome.meta["dominates_overlap_rhs"] != serde_json::Value::Bool(true) {
                problems.push(format!("d={} i={}: outcome rhs below overlap rhs", d, instance));
            }
            let mem = b.memory_identity.expect("reference tracked");
            if mem.lhs > 1e-9 {
                problems.push(format!("d={} i={}: identity residual {:.2e}", d, instance, mem.lhs));
            }
        }
    }
    assert_eq!(count, 1000);
    conclude(3, "both lower bounds and the record/reference identity on 1000 draws", &problems, started, 120.0);
}

#[test]
fn criterion_04_frozen_spot_value() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let mut psi = vec![C64::ZERO; 2];
    psi[0] = C64::ONE;
    let input = DensityState::from_pure(&psi, &[2], &["S"]).unwrap();
    let traj = simulate(&Scenario::with_reference(
        input,
        two_sharp(Basis::standard(2), Basis::rotation(FRAC_PI_6)),
    ))
    .unwrap();
    let b = check_entanglement_bounds(&traj, &tols()).unwrap();
    let e_expect = 0.8112781244591328;
    if (b.entanglement - e_expect).abs() > 1e-9 {
        problems.push(format!("E = {} (expected h2(3/4) = {})", b.entanglement, e_expect));
    }
    if (binary_entropy(0.75) - e_expect).abs() > 1e-12 {
        problems.push("binary entropy drifted from the frozen constant".into());
    }
    let rhs_expect = (4.0_f64 / 3.0).log2();
    if (b.overlap.rhs - rhs_expect).abs() > 1e-9 {
        problems.push(format!("overlap rhs = {} (expected log2(4/3) = {})", b.overlap.rhs, rhs_expect));
    }
    conclude(4, "pi/6 qubit scenario reproduces the closed-form numbers", &problems, started, 5.0);
}

#[test]
fn criterion_05_decoupling() {
    let started = Instant::now();
    let mut problems = Vec::new();
    // Complementary steps decouple exactly.
    for d in 2..=5usize {
        let probe = entangled_probe(&Basis::standard(d));
        let traj = simulate(&Scenario::new(
            probe,
            two_sharp(Basis::standard(d), Basis::fourier(d)),
        ))
        .unwrap();
        let r = check_decoupling(&traj, &tols()).unwrap();
        if r.lhs.abs() > 1e-9 {
            problems.push(format!("MUB d={}: relative entropy {:.2e} should vanish", d, r.lhs));
        }
    }
    // Random pairs: bounded by log2(d*c) and never below the Pinsker floor.
    for (d, n) in [(2usize, 100usize), (3, 100), (4, 100)] {
        for instance in 0..n {
            let seed = instance_seed(MASTER_SEED, "acc5", d, instance);
            let x = Basis::haar(d, seed);
            let z = Basis::haar(d, seed.wrapping_add(1));
            let probe = entangled_probe(&Basis::standard(d));
            let traj = simulate(&Scenario::new(probe, two_sharp(x, z))).unwrap();
            let r = check_decoupling(&traj, &tols()).unwrap();
            if r.slack.unwrap_or(f64::NEG_INFINITY) < -1e-7 {
                problems.push(format!("d={} i={}: slack {:?}", d, instance, r.slack));
            }
            if r.meta["dominates_pinsker"] != serde_json::Value::Bool(true) {
                problems.push(format!("d={} i={}: Pinsker violated", d, instance));
            }
        }
    }
    conclude(5, "system-reference decoupling bounded by log2(d*c)", &problems, started, 60.0);
}

#[test]
fn criterion_06_coherent_teleportation() {
    let started = Instant::now();
    let mut problems = Vec::new();

    // Complementary qubit steps saturate both transfer figures exactly.
    let input = DensityState::from_pure(&random_pure(2, 6), &[2], &["S"]).unwrap();
    let traj = simulate(&Scenario::new(
        input,
        two_sharp(Basis::standard(2), Basis::fourier(2)),
    ))
    .unwrap();
    let cap = check_coherent_info_capacity(&traj, &tols()).unwrap();
    let fid = check_recovery_fidelity(&traj, &tols()).unwrap();
    if (cap.lhs - 1.0).abs() > 1e-6 {
        problems.push(format!("MUB qubit capacity lhs = {}", cap.lhs));
    }
    if (fid.lhs - 1.0).abs() > 1e-6 {
        problems.push(format!("MUB qubit fidelity lhs = {}", fid.lhs));
    }

    // Random qubit/qutrit instances, sharp and mixed pointers.
    for (d, n) in [(2usize, 100usize), (3, 100)] {
        for instance in 0..n {
            let seed = instance_seed(MASTER_SEED, "acc6", d, instance);
            let x = Basis::haar(d, seed);
            let z = Basis::haar(d, seed.wrapping_add(1));
            let (alpha, beta) = if instance % 2 == 0 {
                (DeviceDistribution::pure(d), DeviceDistribution::pure(d))
            } else {
                (
                    DeviceDistribution::new(&random_probs(d, seed.wrapping_add(2))).unwrap(),
                    DeviceDistribution::new(&random_probs(d, seed.wrapping_add(3))).unwrap(),
                )
            };
            let input =
                DensityState::from_pure(&random_pure(d, seed.wrapping_add(4)), &[d], &["S"])
                    .unwrap();
            let steps = vec![MeasurementStep::mixed(x, alpha), MeasurementStep::mixed(z, beta)];
            let traj = simulate(&Scenario::new(input, steps)).unwrap();
            let cap = check_coherent_info_capacity(&traj, &tols()).unwrap();
            let fid = check_recovery_fidelity(&traj, &tols()).unwrap();
            if !cap.holds {
                problems.push(format!("d={} i={}: capacity report failed", d, instance));
            }
            if !fid.holds {
                problems.push(format!("d={} i={}: fidelity report failed", d, instance));
            }
        }
    }

    // The cone program agrees with an exhaustive search over two-dimensional
    // conditioners.
    for (k, (d_a, seed)) in [(2usize, 61u64), (3, 62), (4, 63), (2, 64), (3, 65)]
        .into_iter()
        .enumerate()
    {
        let rho = random_density(2 * d_a, 1 + k % 3, seed).unwrap();
        let state = DensityState::new(rho.op.clone(), &[d_a, 2], &["A", "B"]).unwrap();
        let sdp = hmin_conditional(&state, &["A"], &["B"]).unwrap();
        let oracle = seqmeas_testkit::min_trace_conditioner(&state.op, d_a);
        let gap = (2.0_f64.powf(-sdp.hmin) - oracle).abs();
        if gap > 1e-4 {
            problems.push(format!("oracle gap {:.2e} on instance {}", gap, k));
        }
    }
    conclude(6, "records carry full capacity and perfect recovery", &problems, started, 180.0);
}

#[test]
fn criterion_07_mixed_devices() {
    let started = Instant::now();
    let mut problems = Vec::new();
    for (d, n) in [(2usize, 150usize), (3, 150)] {
        for instance in 0..n {
            let seed = instance_seed(MASTER_SEED, "acc7", d, instance);
            let x = Basis::haar(d, seed);
            let z = Basis::haar(d, seed.wrapping_add(1));
            let alpha = DeviceDistribution::new(&random_probs(d, seed.wrapping_add(2))).unwrap();
            let beta = DeviceDistribution::new(&random_probs(d, seed.wrapping_add(3))).unwrap();
            let input =
                DensityState::from_pure(&random_pure(d, seed.wrapping_add(4)), &[d], &["S"])
                    .unwrap();
            let steps = vec![
                MeasurementStep::mixed(x.clone(), alpha),
                MeasurementStep::mixed(z.clone(), beta),
            ];
            let traj = simulate(&Scenario::new(input.clone(), steps)).unwrap();
            let r = check_mixed_device_bound(&traj, &tols()).unwrap();
            if r.slack.unwrap_or(f64::NEG_INFINITY) < -1e-7 {
                problems.push(format!("d={} i={}: mixed-pointer slack {:?}", d, instance, r.slack));
            }

            // Random mixtures obey the convexity-style bound.
            let n_parts = 2 + instance % 3;
            let probs = random_probs(n_parts, seed.wrapping_add(5));
            let mut parts = Vec::new();
            for (k, &p) in probs.iter().enumerate() {
                let rank = 1 + (instance + k) % 3;
                let rho =
                    random_density(2 * d, rank.min(2 * d), seed.wrapping_add(10 + k as u64)).unwrap();
                parts.push((p, DensityState::new(rho.op.clone(), &[d, 2], &["A", "B"]).unwrap()));
            }
            let mix = check_mixture_bound(&parts, &["A"], &["B"], &tols()).unwrap();
            if mix.slack.unwrap_or(f64::NEG_INFINITY) < -1e-7 {
                problems.push(format!("d={} i={}: mixture slack {:?}", d, instance, mix.slack));
            }

            // Sharp limit: the mixed-pointer bound degenerates to the plain
            // overlap bound, with numerically identical sides.
            if instance < 10 {
                let sharp = vec![MeasurementStep::pure(x.clone()), MeasurementStep::pure(z)];
                let traj = simulate(&Scenario::with_reference(input, sharp)).unwrap();
                let mixed_r = check_mixed_device_bound(&traj, &tols()).unwrap();
                let exact = check_entanglement_bounds(&traj, &tols()).unwrap();
                if mixed_r.lhs != exact.overlap.lhs || mixed_r.rhs != exact.overlap.rhs {
                    problems.push(format!(
                        "d={} i={}: sharp limit differs ({} vs {}, {} vs {})",
                        d, instance, mixed_r.lhs, exact.overlap.lhs, mixed_r.rhs, exact.overlap.rhs
                    ));
                }
            }
        }
    }
    conclude(7, "noisy pointers cost exactly their entropy", &problems, started, 120.0);
}

#[test]
fn criterion_08_multistep_chains() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let cases: [(usize, usize, usize); 4] = [(3, 2, 70), (4, 2, 60), (3, 3, 50), (4, 3, 20)];
    let mut count = 0;
    for (steps, d, n) in cases {
        for instance in 0..n {
            count += 1;
            let seed = instance_seed(MASTER_SEED, "acc8", d * 10 + steps, instance);
            let chain: Vec<MeasurementStep> = (0..steps)
                .map(|k| MeasurementStep::pure(Basis::haar(d, seed.wrapping_add(k as u64))))
                .collect();
            let input =
                DensityState::from_pure(&random_pure(d, seed.wrapping_add(9)), &[d], &["S"])
                    .unwrap();
            let traj = simulate(&Scenario::new(input, chain)).unwrap();
            let mono = check_monotonicity(&traj, &tols()).unwrap();
            if mono.slack.unwrap_or(f64::NEG_INFINITY) < -1e-7 {
                problems.push(format!("{}x d={} i={}: monotonicity slack {:?}", steps, d, instance, mono.slack));
            }
            if mono.meta["undo_residual"].as_f64().unwrap() > 1e-9 {
                problems.push(format!("{}x d={} i={}: undo residual too large", steps, d, instance));
            }
            if mono.meta["branches_restore_state"] != serde_json::Value::Bool(true) {
                problems.push(format!("{}x d={} i={}: a branch failed to restore", steps, d, instance));
            }
            let consec = check_consecutive_overlap(&traj, &tols()).unwrap();
            if !consec.holds {
                problems.push(format!("{}x d={} i={}: consecutive-overlap bound failed", steps, d, instance));
            }
        }
    }
    assert_eq!(count, 200);
    conclude(8, "entanglement only accumulates and every step is undoable", &problems, started, 120.0);
}

#[test]
fn criterion_09_entropy_order_and_duality() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let shapes = [(2usize, 2usize), (2, 3), (3, 2), (2, 4)];
    for instance in 0..200 {
        let (da, db) = shapes[instance % shapes.len()];
        let seed = instance_seed(MASTER_SEED, "acc9", da * 10 + db, instance);
        let rank = 1 + instance % (da * db);
        let rho = random_density(da * db, rank, seed).unwrap();
        let state = DensityState::new(rho.op.clone(), &[da, db], &["A", "B"]).unwrap();
        let r = check_entropy_order(&state, &["A"], &["B"], &tols()).unwrap();
        if r.slack.unwrap_or(f64::NEG_INFINITY) < -1e-5 {
            problems.push(format!("i={}: order-chain slack {:?}", instance, r.slack));
        }

        let (da, db, dc) = match instance % 4 {
            0 => (2, 2, 2),
            1 => (2, 3, 2),
            2 => (3, 2, 2),
            _ => (2, 2, 3),
        };
        let psi = random_pure(da * db * dc, seed.wrapping_add(1));
        let state = DensityState::from_pure(&psi, &[da, db, dc], &["A", "B", "C"]).unwrap();
        let dual = check_minmax_duality(&state, &["A"], &["B"], &["C"], &tols()).unwrap();
        if dual.lhs > 1e-5 {
            problems.push(format!("i={}: duality residual {:.2e}", instance, dual.lhs));
        }
    }
    conclude(9, "min/Shannon/max entropies are ordered and dual", &problems, started, 120.0);
}

#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let bin = env!("CARGO_BIN_EXE_seqmeas");
    let dir = std::env::temp_dir().join("seqmeas-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let out_a = dir.join("run_a.jsonl");
    let out_b = dir.join("run_b.jsonl");
    let out_c = dir.join("run_c.jsonl");

    let run = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs")
    };
    let base = ["verify", "--seed", "7", "--trials", "4", "--dims", "2,3"];
    let status_a = run(&[&base[..], &["--out", out_a.to_str().unwrap()]].concat());
    let status_b = run(&[&base[..], &["--out", out_b.to_str().unwrap()]].concat());
    let status_c = run(&[
        &base[..],
        &["--workers", "4", "--out", out_c.to_str().unwrap()],
    ]
    .concat());
    if !status_a.status.success() || !status_b.status.success() || !status_c.status.success() {
        problems.push("a verify run exited nonzero".into());
    }
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    let bytes_c = std::fs::read(&out_c).unwrap();
    if bytes_a != bytes_b {
        problems.push("same seed, same flags: outputs differ".into());
    }
    if bytes_a != bytes_c {
        problems.push("worker count changed the output".into());
    }
    if bytes_a.is_empty() {
        problems.push("verify wrote nothing".into());
    }
    conclude(10, "identical configuration gives byte-identical reports", &problems, started, 120.0);
}
