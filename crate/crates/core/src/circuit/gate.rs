use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gate kinds in the fixed universal set, in tag order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    H,
    T,
    #[serde(rename = "CNOT")]
    Cnot,
    #[serde(rename = "CSWAP")]
    Cswap,
}

impl GateKind {
    pub const ALL: [GateKind; 6] =
        [GateKind::I, GateKind::X, GateKind::H, GateKind::T, GateKind::Cnot, GateKind::Cswap];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            GateKind::Cswap => 3,
            _ => 1,
        }
    }

    /// 3-bit tag in the canonical encoding; `111` terminates a gate list.
    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
            GateKind::Cswap => "CSWAP",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidCircuit(format!("unknown gate {s:?}")))
    }
}

/// A gate with 0-based wire indices.
///
/// `Cswap` keeps its swapped pair ordered (`a < b`); use [`Gate::cswap`] to
/// build one from any order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    I(usize),
    X(usize),
    H(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Cswap { control: usize, a: usize, b: usize },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Gate::Cswap { control, a: a.min(b), b: a.max(b) }
    }

    /// Builds a gate of `kind` from its wires in encoding order.
    pub fn from_parts(kind: GateKind, wires: &[usize]) -> Result<Self> {
        if wires.len() != kind.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{} takes {} wires, got {}",
                kind.name(),
                kind.arity(),
                wires.len()
            )));
        }
        let g = match kind {
            GateKind::I => Gate::I(wires[0]),
            GateKind::X => Gate::X(wires[0]),
            GateKind::H => Gate::H(wires[0]),
            GateKind::T => Gate::T(wires[0]),
            GateKind::Cnot => Gate::cnot(wires[0], wires[1]),
            GateKind::Cswap => Gate::cswap(wires[0], wires[1], wires[2]),
        };
        if !g.distinct() {
            return Err(Error::InvalidCircuit(format!("{g} repeats a wire")));
        }
        Ok(g)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::I(_) => GateKind::I,
            Gate::X(_) => GateKind::X,
            Gate::H(_) => GateKind::H,
            Gate::T(_) => GateKind::T,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cswap { .. } => GateKind::Cswap,
        }
    }

    /// Wires in encoding order: control first.
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::I(q) | Gate::X(q) | Gate::H(q) | Gate::T(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.wires().contains(&q)
    }

    fn distinct(&self) -> bool {
        match *self {
            Gate::Cnot { control, target } => control != target,
            Gate::Cswap { control, a, b } => control != a && control != b && a != b,
            _ => true,
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        if !self.distinct() {
            return Err(Error::InvalidCircuit(format!("{self} repeats a wire")));
        }
        if let Some(q) = self.wires().into_iter().find(|&q| q >= width) {
            return Err(Error::InvalidCircuit(format!("{self}: wire {} beyond width {width}", q + 1)));
        }
        Ok(())
    }

    /// The same gate with every wire passed through `f`.
    pub fn map_wires(&self, f: impl Fn(usize) -> usize) -> Self {
        match *self {
            Gate::I(q) => Gate::I(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::H(q) => Gate::H(f(q)),
            Gate::T(q) => Gate::T(f(q)),
            Gate::Cnot { control, target } => Gate::cnot(f(control), f(target)),
            Gate::Cswap { control, a, b } => Gate::cswap(f(control), f(a), f(b)),
        }
    }
}

impl std::fmt::Display for Gate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let w: Vec<String> = self.wires().iter().map(|q| (q + 1).to_string()).collect();
        write!(f, "{}({})", self.kind().name(), w.join(","))
    }
}
