//! File formats shared by the library and the command line: Lindbladian
//! specs, trajectory records and report serialisation.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{Jump, JumpOperator, Trajectory};
use crate::linalg::MatrixJson;
use crate::pauli::{BlockDiagPauli, PauliString};
use crate::LindbladSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum JumpJson {
    Pauli { g: f64, pauli_blocks: Vec<String> },
    Dense { g: f64, dense: MatrixJson },
}

/// `{"n": int, "jumps": [...]}` where `n` counts every qubit the jumps act
/// on, block-index qubits included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindbladSpecJson {
    pub n: usize,
    pub jumps: Vec<JumpJson>,
}

impl LindbladSpecJson {
    pub fn to_spec(&self) -> Result<LindbladSpec> {
        let jumps = self
            .jumps
            .iter()
            .map(|j| match j {
                JumpJson::Pauli { g, pauli_blocks } => {
                    let blocks = pauli_blocks
                        .iter()
                        .map(|s| s.parse::<PauliString>())
                        .collect::<Result<Vec<_>>>()?;
                    let f = BlockDiagPauli::new(blocks)?;
                    match f.total_qubits() {
                        Some(q) if q == self.n => Ok(Jump {
                            rate: *g,
                            op: JumpOperator::Pauli(f),
                        }),
                        Some(q) => Err(Error::QubitMismatch { left: q, right: self.n }),
                        None => Err(Error::Shape("block count must be a power of two".into())),
                    }
                }
                JumpJson::Dense { g, dense } => Ok(Jump {
                    rate: *g,
                    op: JumpOperator::Dense(dense.to_operator()?),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        LindbladSpec::new(self.n, jumps)
    }

    pub fn from_spec(spec: &LindbladSpec) -> Self {
        LindbladSpecJson {
            n: spec.num_qubits(),
            jumps: spec
                .jumps()
                .iter()
                .map(|j| match &j.op {
                    JumpOperator::Pauli(p) => JumpJson::Pauli {
                        g: j.rate,
                        pauli_blocks: p.blocks().iter().map(|b| b.to_string()).collect(),
                    },
                    JumpOperator::Dense(m) => JumpJson::Dense {
                        g: j.rate,
                        dense: MatrixJson::from_operator(m),
                    },
                })
                .collect(),
        }
    }
}

pub fn parse_lindblad_spec(s: &str) -> Result<LindbladSpec> {
    from_json_str::<LindbladSpecJson>(s)?.to_spec()
}

/// One line of trajectory output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub shot: u64,
    pub k: usize,
    pub sequence: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_state: Option<Vec<[f64; 2]>>,
}

impl TrajectoryRecord {
    pub fn new(t: &Trajectory<f64>, with_state: bool) -> Self {
        TrajectoryRecord {
            seed: t.seed,
            shot: t.shot,
            k: t.k,
            sequence: t.sequence.clone(),
            final_state: with_state.then(|| t.state.iter().map(|z| [z.re, z.im]).collect()),
        }
    }
}

pub fn trajectories_to_jsonl(ts: &[Trajectory<f64>], with_state: bool) -> Result<String> {
    let mut out = String::new();
    for t in ts {
        out.push_str(&to_json_line(&TrajectoryRecord::new(t, with_state))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Serialization(e.to_string()))
}

fn to_json_line<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{sample_trajectories, TrajectoryPath};
    use crate::scalar::cx;

    const DEPHASING: &str = r#"{"n": 2, "jumps": [
        {"g": 0.5, "pauli_blocks": ["+X", "-iZ"]},
        {"g": 1.0, "dense": [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[-1,0],[0,0],[0,0]],
                             [[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[-1,0]]]}
    ]}"#;

    #[test]
    fn parses_both_jump_forms() {
        let spec = parse_lindblad_spec(DEPHASING).unwrap();
        assert_eq!(spec.num_qubits(), 2);
        assert_eq!(spec.num_jumps(), 2);
        assert!(!spec.is_pauli());
        let back = LindbladSpecJson::from_spec(&spec);
        assert_eq!(back.to_spec().unwrap(), spec);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(parse_lindblad_spec("{"), Err(Error::Parse(_))));
        assert!(parse_lindblad_spec(r#"{"n": 3, "jumps": [{"g": 1, "pauli_blocks": ["X", "Z"]}]}"#).is_err());
        assert!(parse_lindblad_spec(r#"{"n": 2, "jumps": [{"g": 1, "pauli_blocks": ["X", "Z", "Y"]}]}"#).is_err());
        assert!(parse_lindblad_spec(r#"{"n": 1, "jumps": [{"g": 1, "dense": [[[1,0],[0,0]],[[0,0],[2,0]]]}]}"#).is_err());
        assert!(parse_lindblad_spec(r#"{"n": 1, "jumps": []}"#).is_err());
    }

    #[test]
    fn jsonl_lines_round_trip() {
        let spec = parse_lindblad_spec(r#"{"n": 1, "jumps": [{"g": 1, "pauli_blocks": ["Z"]}]}"#).unwrap();
        let psi = vec![cx(1.0, 0.0), cx(0.0, 0.0)];
        let ts = sample_trajectories(&spec, &psi, 1.0, 1e-3, 4, 5, TrajectoryPath::Pauli).unwrap();
        let text = trajectories_to_jsonl(&ts, true).unwrap();
        let recs: Vec<TrajectoryRecord> = text.lines().map(|l| from_json_str(l).unwrap()).collect();
        assert_eq!(recs.len(), 5);
        for (r, t) in recs.iter().zip(&ts) {
            assert_eq!(r, &TrajectoryRecord::new(t, true));
        }
        assert!(!trajectories_to_jsonl(&ts, false).unwrap().contains("final_state"));
    }
}
