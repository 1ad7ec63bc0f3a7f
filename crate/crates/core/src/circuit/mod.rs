//! Circuits over the gate set `{I, X, H, T, CNOT, CSWAP}`, their simulation,
//! the unary prefix codec, a constructor and approximator library, and the
//! canonical bit encoding used as the description-length measure.
//!
//! Wires `0..inputs` carry the input state, the following `ancillas` wires
//! start in `|0⟩`, and the decision bit is read from `output`.

mod encoding;
mod gate;
mod hybrid;
mod library;
mod prefix;
mod simulate;
mod transform;

pub use encoding::{
    decode_circuit, decode_circuit_prefix, encode_circuit, encoding_length, gamma_length,
    ENCODING_VERSION,
};
pub(crate) use encoding::gate_length;
pub use gate::{Gate, GateKind};
pub use hybrid::{acceptance_form, acceptance_with_prefix, HYBRID_REGISTER_LIMIT};
pub use library::{
    basis_constructor, constructor_library, ghz_constructor, pairwise_constructor,
    perturbed_ghz_approximator, phase_constructor, random_circuit, Approximator, Constructor,
    ConstructorName, EnsembleSpec,
};
pub use prefix::{
    decode_prefix, distinguisher_inputs, encode_prefix, parse_bits, prefix_length, PrefixEncoding,
};
pub(crate) use simulate::simulate_from_zero;
pub use simulate::{acceptance_probability, simulate, DENSE_LIMIT};
pub use transform::{normalize_t_powers, permutation_network, reverse_circuit};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Identifier of the gate set, embedded in reports.
pub const GATE_SET_ID: &str = "I,X,H,T,CNOT,CSWAP";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "crate::io::CircuitJson", into = "crate::io::CircuitJson")]
pub struct QuantumCircuit {
    inputs: usize,
    ancillas: usize,
    output: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    /// An empty circuit whose decision bit is wire 0.
    pub fn new(inputs: usize, ancillas: usize) -> Result<Self> {
        if inputs + ancillas == 0 {
            return Err(Error::InvalidCircuit("circuit needs at least one wire".into()));
        }
        Ok(Self { inputs, ancillas, output: 0, gates: Vec::new() })
    }

    pub fn from_gates(inputs: usize, ancillas: usize, output: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(inputs, ancillas)?.with_output(output)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn with_output(mut self, output: usize) -> Result<Self> {
        if output >= self.width() {
            return Err(Error::InvalidCircuit(format!(
                "output wire {} beyond width {}",
                output + 1,
                self.width()
            )));
        }
        self.output = output;
        Ok(self)
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.width())?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<&mut Self> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn ancillas(&self) -> usize {
        self.ancillas
    }

    pub fn width(&self) -> usize {
        self.inputs + self.ancillas
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gate count.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// The same gates on a wider register: `inputs` and `ancillas` replaced,
    /// wires mapped through `f`.
    pub fn relabeled(
        &self,
        inputs: usize,
        ancillas: usize,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        Self::from_gates(inputs, ancillas, f(self.output), self.gates.iter().map(|g| g.map_wires(&f)).collect())
    }
}

impl std::fmt::Display for QuantumCircuit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let g: Vec<String> = self.gates.iter().map(|g| g.to_string()).collect();
        write!(
            f,
            "[{} in, {} anc, out {}] {}",
            self.inputs,
            self.ancillas,
            self.output + 1,
            if g.is_empty() { "(empty)".to_string() } else { g.join(" ") }
        )
    }
}
