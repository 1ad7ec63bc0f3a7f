//! JSON forms of states, circuits and partitions. Qubit and wire indices are
//! 1-based in every JSON document.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind, QuantumCircuit};
use crate::qstate::Qustring;
use crate::separability::BlockPartition;
use crate::{Error, Result};

/// Tolerance on the norm of a state read from JSON; within it the state is
/// rescaled and the correction recorded.
pub const READ_NORM_TOLERANCE: f64 = 1e-6;

/// `{"n": 2, "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&Qustring> for StateJson {
    fn from(s: &Qustring) -> Self {
        Self { n: s.n(), amplitudes: s.amplitudes().iter().map(|z| [z.re, z.im]).collect() }
    }
}

/// A state read from JSON, with the rescaling that was applied.
#[derive(Clone, Debug)]
pub struct LoadedState {
    pub state: Qustring,
    /// Norm of the amplitudes as given.
    pub input_norm: f64,
    pub renormalized: bool,
}

impl StateJson {
    pub fn into_state(self) -> Result<LoadedState> {
        if self.n == 0 || self.n > 24 || self.amplitudes.len() != 1usize << self.n {
            return Err(Error::DimensionMismatch {
                expected: if self.n <= 24 { 1usize << self.n } else { 0 },
                actual: self.amplitudes.len(),
            });
        }
        let amps: Vec<Complex64> = self.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > READ_NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        let renormalized = norm != 1.0;
        Ok(LoadedState { state: Qustring::normalized(amps)?, input_norm: norm, renormalized })
    }
}

pub fn state_from_json(text: &str) -> Result<LoadedState> {
    serde_json::from_str::<StateJson>(text)?.into_state()
}

pub fn state_to_json(s: &Qustring) -> String {
    serde_json::to_string(&StateJson::from(s)).expect("plain data")
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    state_from_json(&std::fs::read_to_string(path)?)
}

/// `{"g": "CNOT", "t": [1, 2]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateJson {
    pub g: String,
    pub t: Vec<usize>,
}

/// `{"inputs": n, "ancillas": p, "output": q, "gates": [...]}`; `output`
/// defaults to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub inputs: usize,
    #[serde(default)]
    pub ancillas: usize,
    #[serde(default = "one")]
    pub output: usize,
    #[serde(default)]
    pub gates: Vec<GateJson>,
}

fn one() -> usize {
    1
}

impl From<QuantumCircuit> for CircuitJson {
    fn from(c: QuantumCircuit) -> Self {
        Self::from(&c)
    }
}

impl From<&QuantumCircuit> for CircuitJson {
    fn from(c: &QuantumCircuit) -> Self {
        Self {
            inputs: c.inputs(),
            ancillas: c.ancillas(),
            output: c.output() + 1,
            gates: c
                .gates()
                .iter()
                .map(|g| GateJson { g: g.kind().name().to_string(), t: g.wires().iter().map(|q| q + 1).collect() })
                .collect(),
        }
    }
}

impl TryFrom<CircuitJson> for QuantumCircuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Self> {
        let one_based = |v: usize| {
            v.checked_sub(1).ok_or_else(|| Error::InvalidCircuit("wire indices are 1-based".into()))
        };
        let mut c = QuantumCircuit::new(j.inputs, j.ancillas)?.with_output(one_based(j.output)?)?;
        for g in j.gates {
            let kind = GateKind::from_name(&g.g)?;
            let wires = g.t.iter().map(|&v| one_based(v)).collect::<Result<Vec<_>>>()?;
            c.push(Gate::from_parts(kind, &wires)?)?;
        }
        Ok(c)
    }
}

pub fn circuit_from_json(text: &str) -> Result<QuantumCircuit> {
    serde_json::from_str::<CircuitJson>(text)?.try_into()
}

pub fn circuit_to_json(c: &QuantumCircuit) -> String {
    serde_json::to_string(&CircuitJson::from(c)).expect("plain data")
}

pub fn read_circuit(path: &Path) -> Result<QuantumCircuit> {
    circuit_from_json(&std::fs::read_to_string(path)?)
}

/// `{"n": 4, "blocks": [[1, 3], [2, 4]], "sigma": [...], "sectioning": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
    pub sigma: Vec<usize>,
    pub sectioning: Vec<usize>,
}

impl From<&BlockPartition> for PartitionJson {
    fn from(p: &BlockPartition) -> Self {
        Self {
            n: p.n(),
            blocks: p.blocks_one_based(),
            sigma: p.sigma().to_one_based(),
            sectioning: p.sectioning().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_and_renormalization() {
        let s = Qustring::bell();
        let back = state_from_json(&state_to_json(&s)).unwrap();
        assert!(back.state.equal_up_to_phase(&s, 1e-15));

        let loose = r#"{"n": 1, "amplitudes": [[1.0000004, 0], [0, 0]]}"#;
        let l = state_from_json(loose).unwrap();
        assert!(l.renormalized);
        assert_eq!(l.state.amplitudes()[0].re, 1.0);

        let bad = r#"{"n": 1, "amplitudes": [[0.9, 0], [0, 0]]}"#;
        assert!(matches!(state_from_json(bad), Err(Error::NotNormalized(_))));
        assert!(state_from_json(r#"{"n": 2, "amplitudes": [[1, 0], [0, 0]]}"#).is_err());
        let e = state_from_json("{\"n\": 1,\n \"amplitudes\": [[1, 0], [0, 0]").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn circuit_round_trip() {
        let text = r#"{"inputs": 2, "ancillas": 1, "output": 3,
            "gates": [{"g": "H", "t": [1]}, {"g": "CNOT", "t": [1, 2]}, {"g": "cswap", "t": [1, 3, 2]}]}"#;
        let c = circuit_from_json(text).unwrap();
        assert_eq!(c.output(), 2);
        assert_eq!(c.gates()[2], Gate::cswap(0, 1, 2));
        assert_eq!(circuit_from_json(&circuit_to_json(&c)).unwrap(), c);
        let via_serde: QuantumCircuit = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(via_serde, c);
        assert!(circuit_from_json(r#"{"inputs": 1, "gates": [{"g": "X", "t": [0]}]}"#).is_err());
        assert!(circuit_from_json(r#"{"inputs": 1, "gates": [{"g": "Y", "t": [1]}]}"#).is_err());
        assert!(circuit_from_json(r#"{"inputs": 1, "gates": [{"g": "CNOT", "t": [1, 2]}]}"#).is_err());
    }
}
