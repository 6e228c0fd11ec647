//! Run configuration shared by the subcommands, plus deterministic
//! per-instance seeding.

use seqmeas::tol::Tolerances;
use std::path::PathBuf;

use crate::CliError;

/// Everything a campaign needs to be reproducible: the master seed, the
/// dimensions and instance counts to cover, optional tolerance overrides,
/// where to write, and how many worker threads may claim instances.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub scenario_path: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            dims: vec![2, 3],
            trials: 100,
            scenario_path: None,
            out_path: None,
            tolerances: Tolerances::default(),
            workers: 1,
        }
    }
}

/// Largest system dimension the campaigns accept: the recovery check feeds
/// half of a maximally entangled pair through two steps, so the full
/// register space reaches `d⁴`, which must stay within the tensor cap.
pub const MAX_DIM: usize = 8;

impl RunConfig {
    /// Reject configurations that cannot run (empty or out-of-range
    /// dimension lists, zero trials, zero workers).
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        if self.dims.is_empty() {
            return Err(CliError::Usage("--dims must name at least one dimension".into()));
        }
        for &d in &self.dims {
            if !(2..=MAX_DIM).contains(&d) {
                return Err(CliError::Usage(format!(
                    "dimension {} out of range (2..={})",
                    d, MAX_DIM
                )));
            }
        }
        Ok(())
    }

    /// Apply one `key=value` tolerance override.
    pub fn set_tolerance(&mut self, spec: &str) -> Result<(), CliError> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("tolerance override '{}' is not key=value", spec)))?;
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance value '{}' is not a number", value)))?;
        if !self.tolerances.set(key.trim(), value) {
            return Err(CliError::Usage(format!("unknown tolerance key '{}'", key)));
        }
        Ok(())
    }
}

/// Parse a comma-separated dimension list such as `2,3,4`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<usize>().map_err(|e| format!("bad dimension '{}': {}", part, e)))
        .collect()
}

/// Parse a comma-separated float grid such as `0,0.39,0.79`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<f64>().map_err(|e| format!("bad grid value '{}': {}", part, e)))
        .collect()
}

/// Deterministic per-instance seed: a splitmix-style hash of the master
/// seed with the family tag, dimension, and instance index, so any instance
/// can be regenerated in isolation and the stream never depends on worker
/// scheduling.
pub fn instance_seed(master: u64, family: &str, d: usize, instance: usize) -> u64 {
    let mut h = master ^ 0x9e37_79b9_7f4a_7c15;
    for &byte in family.as_bytes() {
        h = splitmix(h ^ byte as u64);
    }
    h = splitmix(h ^ d as u64);
    h = splitmix(h ^ instance as u64);
    h
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
