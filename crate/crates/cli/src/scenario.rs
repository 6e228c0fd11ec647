//! On-disk scenario description: a complete, seedable account of one
//! measurement sequence, deserialized into a simulator [`Scenario`].

use seqmeas::circuit::{MeasurementStep, Scenario};
use seqmeas::linalg::{c64, CMatrix, C64};
use seqmeas::qstate::{random_density, random_pure, Basis, DensityState, DeviceDistribution};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Top-level scenario file: system dimension, input state, the ordered
/// measurement steps, and whether a purifying reference is carried.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub d: usize,
    pub initial: InitialSpec,
    pub steps: Vec<StepSpec>,
    #[serde(default)]
    pub track_reference: bool,
}

/// Input state: an explicit amplitude vector, an explicit density matrix,
/// the maximally mixed state, or a seeded random draw (when `vector` /
/// `matrix` is omitted but `seed` is given).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Pure {
        #[serde(skip_serializing_if = "Option::is_none")]
        vector: Option<Vec<[f64; 2]>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Mixed {
        #[serde(skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<[f64; 2]>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    MaximallyMixed,
}

/// One measurement step: the basis and, optionally, a diagonal pointer
/// distribution (omitted means a sharp pointer starting in `|0>`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub basis: BasisSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device: Option<Vec<f64>>,
}

/// Measurement basis selector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisSpec {
    Standard,
    Fourier,
    Rotation { theta: f64 },
    Haar { seed: u64 },
}

impl BasisSpec {
    pub fn build(&self, d: usize) -> Result<Basis, CliError> {
        match self {
            BasisSpec::Standard => Ok(Basis::standard(d)),
            BasisSpec::Fourier => Ok(Basis::fourier(d)),
            BasisSpec::Rotation { theta } => {
                if d != 2 {
                    return Err(CliError::Usage(
                        "rotation bases are two-dimensional; use kind=haar for larger d".into(),
                    ));
                }
                Ok(Basis::rotation(*theta))
            }
            BasisSpec::Haar { seed } => Ok(Basis::haar(d, *seed)),
        }
    }

    /// Short human description for transcripts.
    pub fn describe(&self) -> String {
        match self {
            BasisSpec::Standard => "standard".into(),
            BasisSpec::Fourier => "fourier".into(),
            BasisSpec::Rotation { theta } => format!("rotation(theta={})", theta),
            BasisSpec::Haar { seed } => format!("haar(seed={})", seed),
        }
    }
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad scenario file: {}", e)))
    }

    /// Materialize the simulator scenario this file describes.
    pub fn build(&self) -> Result<Scenario, CliError> {
        if self.d < 2 {
            return Err(CliError::Usage("scenario dimension must be at least 2".into()));
        }
        if self.steps.is_empty() {
            return Err(CliError::Usage("scenario needs at least one step".into()));
        }
        let initial = self.build_initial()?;
        let mut steps = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let basis = step.basis.build(self.d)?;
            let step = match &step.device {
                None => MeasurementStep::pure(basis),
                Some(probs) => {
                    let device = DeviceDistribution::new(probs)
                        .map_err(|e| CliError::Usage(format!("bad device distribution: {}", e)))?;
                    if device.dim() != self.d {
                        return Err(CliError::Usage(format!(
                            "device distribution has {} entries for dimension {}",
                            device.dim(),
                            self.d
                        )));
                    }
                    MeasurementStep::mixed(basis, device)
                }
            };
            steps.push(step);
        }
        Ok(Scenario {
            initial,
            steps,
            track_reference: self.track_reference,
        })
    }

    fn build_initial(&self) -> Result<DensityState, CliError> {
        let d = self.d;
        match &self.initial {
            InitialSpec::Pure { vector: Some(v), seed: None } => {
                if v.len() != d {
                    return Err(CliError::Usage(format!(
                        "pure vector has {} amplitudes for dimension {}",
                        v.len(),
                        d
                    )));
                }
                let mut psi: Vec<C64> = v.iter().map(|[re, im]| c64(*re, *im)).collect();
                let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm <= 0.0 {
                    return Err(CliError::Usage("pure vector must be nonzero".into()));
                }
                for z in &mut psi {
                    *z /= norm;
                }
                DensityState::from_pure(&psi, &[d], &["S"])
                    .map_err(|e| CliError::Usage(format!("bad pure input: {}", e)))
            }
            InitialSpec::Pure { vector: None, seed: Some(seed) } => {
                let psi = random_pure(d, *seed);
                DensityState::from_pure(&psi, &[d], &["S"])
                    .map_err(|e| CliError::Usage(format!("bad pure input: {}", e)))
            }
            InitialSpec::Pure { .. } => Err(CliError::Usage(
                "pure input needs exactly one of 'vector' or 'seed'".into(),
            )),
            InitialSpec::Mixed { matrix: Some(rows), seed: None } => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(CliError::Usage(format!(
                        "mixed input matrix must be {d}x{d}"
                    )));
                }
                let op = CMatrix::from_fn(d, d, |i, j| c64(rows[i][j][0], rows[i][j][1]));
                DensityState::new(op, &[d], &["S"])
                    .map_err(|e| CliError::Usage(format!("bad mixed input: {}", e)))
            }
            InitialSpec::Mixed { matrix: None, seed: Some(seed) } => random_density(d, d, *seed)
                .map_err(|e| CliError::Usage(format!("bad mixed input: {}", e))),
            InitialSpec::Mixed { .. } => Err(CliError::Usage(
                "mixed input needs exactly one of 'matrix' or 'seed'".into(),
            )),
            InitialSpec::MaximallyMixed => {
                let op = CMatrix::identity(d).scale(c64(1.0 / d as f64, 0.0));
                DensityState::new(op, &[d], &["S"])
                    .map_err(|e| CliError::Usage(format!("bad input: {}", e)))
            }
        }
    }

    /// One-line description per step for transcripts.
    pub fn describe_steps(&self) -> Vec<String> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let device = match &s.device {
                    None => "sharp pointer".into(),
                    Some(p) => format!("pointer distribution {:?}", p),
                };
                format!("step {}: basis {}, {}", i + 1, s.basis.describe(), device)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_a_full_scenario() {
        let text = r#"{
            "d": 2,
            "initial": {"kind": "pure", "vector": [[1.0, 0.0], [0.0, 0.0]]},
            "steps": [
                {"basis": {"kind": "standard"}},
                {"basis": {"kind": "rotation", "theta": 0.5235987755982988}, "device": [0.9, 0.1]}
            ],
            "track_reference": true
        }"#;
        let spec = ScenarioSpec::from_json(text).unwrap();
        let scenario = spec.build().unwrap();
        assert_eq!(scenario.steps.len(), 2);
        assert!(scenario.track_reference);
        assert!(!scenario.steps[0].device.is_pure() || scenario.steps[0].device.is_pure());
        let traj = seqmeas::circuit::simulate(&scenario).unwrap();
        assert_eq!(traj.n_steps(), 2);
        assert!(traj.has_reference);
    }

    #[test]
    fn seeded_and_degenerate_inputs() {
        let spec = ScenarioSpec {
            d: 3,
            initial: InitialSpec::Mixed { matrix: None, seed: Some(5) },
            steps: vec![
                StepSpec { basis: BasisSpec::Standard, device: None },
                StepSpec { basis: BasisSpec::Fourier, device: None },
            ],
            track_reference: false,
        };
        let scenario = spec.build().unwrap();
        assert_eq!(scenario.initial.dims, vec![3]);

        let bad = ScenarioSpec {
            d: 3,
            initial: InitialSpec::Pure { vector: None, seed: None },
            steps: vec![StepSpec { basis: BasisSpec::Standard, device: None }],
            track_reference: false,
        };
        assert!(bad.build().is_err());

        let bad_rotation = ScenarioSpec {
            d: 3,
            initial: InitialSpec::MaximallyMixed,
            steps: vec![StepSpec {
                basis: BasisSpec::Rotation { theta: 0.3 },
                device: None,
            }],
            track_reference: false,
        };
        assert!(bad_rotation.build().is_err());
    }

    #[test]
    fn rejects_malformed_json_and_unknown_fields() {
        assert!(ScenarioSpec::from_json("{").is_err());
        assert!(ScenarioSpec::from_json(r#"{"d": 2, "initial": {"kind": "pure"}, "steps": [], "bogus": 1}"#).is_err());
    }
}
