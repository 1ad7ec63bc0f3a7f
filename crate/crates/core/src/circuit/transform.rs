use super::{Gate, QuantumCircuit};
use crate::qstate::QubitPermutation;

/// The inverse circuit: gates in reverse order, each replaced by its inverse
/// (`T†` written as `T⁷`), followed by [`normalize_t_powers`].
pub fn reverse_circuit(c: &QuantumCircuit) -> QuantumCircuit {
    let mut gates = Vec::with_capacity(c.size());
    for g in c.gates().iter().rev() {
        match *g {
            Gate::T(q) => gates.extend(std::iter::repeat_n(Gate::T(q), 7)),
            other => gates.push(other),
        }
    }
    let raw = QuantumCircuit::from_gates(c.inputs(), c.ancillas(), c.output(), gates)
        .expect("same wires as a valid circuit");
    normalize_t_powers(&raw)
}

/// Collapses every run of consecutive `T` gates on one wire to its length
/// modulo 8.
pub fn normalize_t_powers(c: &QuantumCircuit) -> QuantumCircuit {
    let mut out: Vec<Gate> = Vec::with_capacity(c.size());
    let gates = c.gates();
    let mut i = 0;
    while i < gates.len() {
        if let Gate::T(q) = gates[i] {
            let mut j = i;
            while j < gates.len() && gates[j] == Gate::T(q) {
                j += 1;
            }
            out.extend(std::iter::repeat_n(Gate::T(q), (j - i) % 8));
            i = j;
        } else {
            out.push(gates[i]);
            i += 1;
        }
    }
    QuantumCircuit::from_gates(c.inputs(), c.ancillas(), c.output(), out).expect("subset of valid gates")
}

/// A network of SWAPs (three CNOTs each) mapping `|φ⟩` to `σ(|φ⟩)`: after
/// it, wire `i` holds what was on wire `σ(i)`. Uses at most `n − 1` SWAPs.
pub fn permutation_network(sigma: &QubitPermutation) -> QuantumCircuit {
    let n = sigma.n();
    let mut c = QuantumCircuit::new(n, 0).expect("n ≥ 1");
    // holds[p] = original wire currently on position p
    let mut holds: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let p = holds.iter().position(|&w| w == sigma.image(i)).expect("bijection");
        if p != i {
            c.extend(swap_gates(i, p)).expect("wires in range");
            holds.swap(i, p);
        }
    }
    c
}

pub(crate) fn swap_gates(a: usize, b: usize) -> [Gate; 3] {
    [Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)]
}
