//! Cross-checks of the main crate against the independent reference
//! implementations in the testkit: a sum-over-histories simulator and a
//! derivative-free search for the min-entropy program.

use seqmeas::circuit::{simulate, MeasurementStep, Scenario};
use seqmeas::entropy::hmin_of_bipartition;
use seqmeas::qstate::{random_density, Basis, DeviceDistribution};
use seqmeas_testkit::{closed_form_two_step, min_trace_conditioner};

#[test]
fn simulator_matches_sum_over_histories() {
    for d in [2usize, 3] {
        let x = Basis::haar(d, 20 + d as u64);
        let z = Basis::haar(d, 30 + d as u64);
        let rho = random_density(d, d, 40 + d as u64).unwrap();
        let mut alpha = vec![0.0; d];
        alpha[0] = 0.8;
        alpha[1] = 0.2;
        let mut beta = vec![1.0 / d as f64; d];
        let rest: f64 = beta.iter().skip(1).sum();
        beta[0] = 1.0 - rest;
        let sc = Scenario::new(
            rho.clone(),
            vec![
                MeasurementStep::mixed(x.clone(), DeviceDistribution::new(&alpha).unwrap()),
                MeasurementStep::mixed(z.clone(), DeviceDistribution::new(&beta).unwrap()),
            ],
        );
        let traj = simulate(&sc).unwrap();
        let oracle = closed_form_two_step(&rho.op, &x.vectors, &z.vectors, &alpha, &beta);
        assert!(
            traj.final_state().op.approx_eq(&oracle, 1e-10),
            "closed form mismatch at d = {}",
            d
        );
    }
}

#[test]
fn min_entropy_solver_matches_exhaustive_search() {
    for seed in 0..3u64 {
        let da = if seed == 2 { 3 } else { 2 };
        let rho = random_density(da * 2, da * 2, 500 + seed).unwrap().op;
        let sdp = hmin_of_bipartition(&rho, da, 2).unwrap();
        let brute = min_trace_conditioner(&rho, da);
        assert!(
            (sdp.value - brute).abs() < 1e-4,
            "sdp {} vs search {} (seed {})",
            sdp.value,
            brute,
            seed
        );
    }
}
