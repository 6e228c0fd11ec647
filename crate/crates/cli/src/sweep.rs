//! The `sweep` subcommand: render the verified quantities as CSV curves
//! along one axis — measurement-basis angle, system dimension, or pointer
//! mixing.

use seqmeas::bounds::{
    check_coherent_info_capacity, check_decoupling, check_entanglement_bounds,
    check_mixed_device_bound, check_recovery_fidelity,
};
use seqmeas::circuit::{simulate, MeasurementStep, Scenario};
use seqmeas::linalg::C64;
use seqmeas::qstate::{Basis, DensityState, DeviceDistribution};
use std::f64::consts::FRAC_PI_4;

use crate::config::RunConfig;
use crate::CliError;

/// Which parameter the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// Angle between the two qubit measurement bases, from aligned (0) to
    /// mutually unbiased (π/4). Rows are d = 2 only.
    Theta,
    /// System dimension with mutually unbiased standard/fourier steps.
    Dimension,
    /// Pointer mixing parameter: 0 is a sharp pointer, 1 a uniformly random
    /// one, interpolating linearly in between.
    DeviceMixing,
}

/// Format one float with 12 significant digits; parsing the field back and
/// re-formatting reproduces the byte string (the stability contract for the
/// CSV output).
pub fn fmt12(x: f64) -> String {
    // Adding +0.0 folds a negative zero into +0.0 (and changes nothing
    // else), so equal values always render to identical bytes.
    format!("{:.11e}", x + 0.0)
}

fn basis_state_zero(d: usize) -> DensityState {
    let mut psi = vec![C64::ZERO; d];
    psi[0] = C64::ONE;
    DensityState::from_pure(&psi, &[d], &["S"]).expect("basis state is valid")
}

/// Default angle grid: nine evenly spaced points over `[0, π/4]`.
pub fn default_theta_grid() -> Vec<f64> {
    (0..9).map(|k| FRAC_PI_4 * k as f64 / 8.0).collect()
}

/// Default mixing grid: eleven evenly spaced points over `[0, 1]`.
pub fn default_mixing_grid() -> Vec<f64> {
    (0..11).map(|k| k as f64 / 10.0).collect()
}

/// Render the CSV for one axis. The header names the axis column(s); every
/// numeric cell uses [`fmt12`].
pub fn render_sweep(cfg: &RunConfig, axis: Axis, grid: Option<Vec<f64>>) -> Result<String, CliError> {
    match axis {
        Axis::Theta => {
            let grid = grid.unwrap_or_else(default_theta_grid);
            if grid.is_empty() {
                return Err(CliError::Usage("theta grid is empty".into()));
            }
            theta_sweep(cfg, &grid)
        }
        Axis::Dimension => {
            if grid.is_some() {
                return Err(CliError::Usage(
                    "the dimension sweep takes its grid from --dims, not --grid".into(),
                ));
            }
            dimension_sweep(cfg)
        }
        Axis::DeviceMixing => {
            let grid = grid.unwrap_or_else(default_mixing_grid);
            if grid.is_empty() {
                return Err(CliError::Usage("mixing grid is empty".into()));
            }
            if let Some(bad) = grid.iter().find(|&&m| !(0.0..=1.0).contains(&m)) {
                return Err(CliError::Usage(format!(
                    "mixing value {} outside [0, 1]",
                    bad
                )));
            }
            mixing_sweep(cfg, &grid)
        }
    }
}

fn theta_sweep(cfg: &RunConfig, grid: &[f64]) -> Result<String, CliError> {
    let tols = &cfg.tolerances;
    let mut out = String::from(
        "theta,d,c,E_coherent,rhs_overlap,rhs_outcome,decoupling_lhs,decoupling_rhs,fidelity_lhs,fidelity_rhs\n",
    );
    for &theta in grid {
        let steps = vec![
            MeasurementStep::pure(Basis::standard(2)),
            MeasurementStep::pure(Basis::rotation(theta)),
        ];
        let traj = simulate(&Scenario::with_reference(basis_state_zero(2), steps))
            .map_err(|e| CliError::Usage(format!("sweep scenario failed: {}", e)))?;
        let b = check_entanglement_bounds(&traj, tols)
            .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
        let dec = check_decoupling(&traj, tols)
            .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
        let fid = check_recovery_fidelity(&traj, tols)
            .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
        out.push_str(&format!(
            "{},2,{},{},{},{},{},{},{},{}\n",
            fmt12(theta),
            fmt12(traj.overlaps[0]),
            fmt12(b.entanglement),
            fmt12(b.overlap.rhs),
            fmt12(b.outcome.rhs),
            fmt12(dec.lhs),
            fmt12(dec.rhs),
            fmt12(fid.lhs),
            fmt12(fid.rhs),
        ));
    }
    Ok(out)
}

fn dimension_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let tols = &cfg.tolerances;
    let mut out = String::from(
        "d,c,E_coherent,rhs_overlap,rhs_outcome,decoupling_lhs,decoupling_rhs,fidelity_lhs,fidelity_rhs\n",
    );
    for &d in &cfg.dims {
        let steps = vec![
            MeasurementStep::pure(Basis::standard(d)),
            MeasurementStep::pure(Basis::fourier(d)),
        ];
        let traj = simulate(&Scenario::with_reference(basis_state_zero(d), steps))
            .map_err(|e| CliError::Usage(format!("sweep scenario failed: {}", e)))?;
        let b = check_entanglement_bounds(&traj, tols)
            .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
        let dec = check_decoupling(&traj, tols)
            .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
        let fid = check_recovery_fidelity(&traj, tols)
            .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            d,
            fmt12(traj.overlaps[0]),
            fmt12(b.entanglement),
            fmt12(b.overlap.rhs),
            fmt12(b.outcome.rhs),
            fmt12(dec.lhs),
            fmt12(dec.rhs),
            fmt12(fid.lhs),
            fmt12(fid.rhs),
        ));
    }
    Ok(out)
}

/// Pointer distribution interpolating sharp (`mixing = 0`) to uniform
/// (`mixing = 1`).
pub fn mixed_pointer(d: usize, mixing: f64) -> DeviceDistribution {
    let probs: Vec<f64> = (0..d)
        .map(|j| {
            let sharp = if j == 0 { 1.0 } else { 0.0 };
            (1.0 - mixing) * sharp + mixing / d as f64
        })
        .collect();
    DeviceDistribution::new(&probs).expect("interpolated distribution is valid")
}

fn mixing_sweep(cfg: &RunConfig, grid: &[f64]) -> Result<String, CliError> {
    let tols = &cfg.tolerances;
    let mut out = String::from(
        "mixing,d,c,E_coherent,rhs_mixed,capacity_lhs,capacity_rhs,fidelity_lhs,fidelity_rhs\n",
    );
    for &mixing in grid {
        for &d in &cfg.dims {
            let steps = vec![
                MeasurementStep::mixed(Basis::standard(d), mixed_pointer(d, mixing)),
                MeasurementStep::mixed(Basis::fourier(d), mixed_pointer(d, mixing)),
            ];
            let traj = simulate(&Scenario::new(basis_state_zero(d), steps))
                .map_err(|e| CliError::Usage(format!("sweep scenario failed: {}", e)))?;
            let mixed = check_mixed_device_bound(&traj, tols)
                .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
            let cap = check_coherent_info_capacity(&traj, tols)
                .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
            let fid = check_recovery_fidelity(&traj, tols)
                .map_err(|e| CliError::Usage(format!("sweep check failed: {}", e)))?;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt12(mixing),
                d,
                fmt12(traj.overlaps[0]),
                fmt12(mixed.lhs),
                fmt12(mixed.rhs),
                fmt12(cap.lhs),
                fmt12(cap.rhs),
                fmt12(fid.lhs),
                fmt12(fid.rhs),
            ));
        }
    }
    Ok(out)
}

/// Full `sweep` subcommand.
pub fn cmd_sweep(cfg: &RunConfig, axis: Axis, grid: Option<Vec<f64>>) -> Result<bool, CliError> {
    cfg.validate()?;
    let body = render_sweep(cfg, axis, grid)?;
    crate::write_output(&body, cfg.out_path.as_deref())?;
    Ok(true)
}
