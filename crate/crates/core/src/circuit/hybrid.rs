//! Simulation with classically tracked wires.
//!
//! Prefix bits and fresh ancillas start as classical basis values and stay
//! classical until a gate could put them in superposition (an `H`, or being
//! the target of a quantum-controlled gate). Only the payload and promoted
//! wires carry amplitudes. Because a classical wire's value never depends on
//! the payload, the register layout is a function of the circuit and the
//! prefix alone, so every payload basis state can be pushed through the same
//! register structure.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::simulate::apply_gate;
use super::{Gate, QuantumCircuit};
use crate::qstate::StateRef;
use crate::{Error, Result};

/// Largest number of wires the hybrid simulator keeps in superposition.
pub const HYBRID_REGISTER_LIMIT: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Wire {
    Classical(bool),
    Quantum(usize),
}

struct Hybrid {
    wires: Vec<Wire>,
    reg: usize,
    /// One register vector per payload column.
    cols: Vec<Vec<Complex64>>,
}

impl Hybrid {
    fn promote(&mut self, w: usize) -> Result<usize> {
        match self.wires[w] {
            Wire::Quantum(p) => Ok(p),
            Wire::Classical(bit) => {
                if self.reg >= HYBRID_REGISTER_LIMIT {
                    return Err(Error::Capability(format!(
                        "more than {HYBRID_REGISTER_LIMIT} wires in superposition"
                    )));
                }
                for col in &mut self.cols {
                    let mut wide = vec![Complex64::new(0.0, 0.0); col.len() * 2];
                    for (x, a) in col.iter().enumerate() {
                        wide[(x << 1) | usize::from(bit)] = *a;
                    }
                    *col = wide;
                }
                let p = self.reg;
                self.reg += 1;
                self.wires[w] = Wire::Quantum(p);
                Ok(p)
            }
        }
    }

    fn apply(&mut self, g: Gate) {
        let reg = self.reg;
        for col in &mut self.cols {
            apply_gate(col, reg, &g);
        }
    }

    fn flip(&mut self, w: usize) {
        match self.wires[w] {
            Wire::Classical(b) => self.wires[w] = Wire::Classical(!b),
            Wire::Quantum(p) => self.apply(Gate::X(p)),
        }
    }

    fn step(&mut self, g: &Gate) -> Result<()> {
        match *g {
            Gate::I(_) => {}
            Gate::X(q) => self.flip(q),
            Gate::T(q) => {
                // On a basis bit, T is at most a global phase.
                if let Wire::Quantum(p) = self.wires[q] {
                    self.apply(Gate::T(p));
                }
            }
            Gate::H(q) => {
                let p = self.promote(q)?;
                self.apply(Gate::H(p));
            }
            Gate::Cnot { control, target } => match self.wires[control] {
                Wire::Classical(false) => {}
                Wire::Classical(true) => self.flip(target),
                Wire::Quantum(pc) => {
                    let pt = self.promote(target)?;
                    self.apply(Gate::cnot(pc, pt));
                }
            },
            Gate::Cswap { control, a, b } => match self.wires[control] {
                Wire::Classical(false) => {}
                Wire::Classical(true) => self.wires.swap(a, b),
                Wire::Quantum(pc) => {
                    if let (Wire::Classical(x), Wire::Classical(y)) = (self.wires[a], self.wires[b]) {
                        if x == y {
                            return Ok(());
                        }
                    }
                    let pa = self.promote(a)?;
                    let pb = self.promote(b)?;
                    self.apply(Gate::cswap(pc, pa, pb));
                }
            },
        }
        Ok(())
    }
}

fn run(c: &QuantumCircuit, prefix: &[bool], cols: Vec<Vec<Complex64>>) -> Result<Hybrid> {
    let payload = c.inputs().checked_sub(prefix.len()).ok_or_else(|| {
        Error::DimensionMismatch { expected: c.inputs(), actual: prefix.len() }
    })?;
    if payload > HYBRID_REGISTER_LIMIT {
        return Err(Error::Capability(format!("payload of {payload} qubits is too wide")));
    }
    let mut wires: Vec<Wire> = prefix.iter().map(|&b| Wire::Classical(b)).collect();
    wires.extend((0..payload).map(Wire::Quantum));
    wires.extend((0..c.ancillas()).map(|_| Wire::Classical(false)));
    let mut h = Hybrid { wires, reg: payload, cols };
    for g in c.gates() {
        h.step(g)?;
    }
    Ok(h)
}

fn payload_len(c: &QuantumCircuit, prefix: &[bool], dim: usize) -> Result<()> {
    let expected = c.inputs().saturating_sub(prefix.len());
    if prefix.len() > c.inputs() || dim != 1usize << expected {
        return Err(Error::DimensionMismatch { expected, actual: dim.trailing_zeros() as usize });
    }
    Ok(())
}

/// The payload operator `M` with `M_ab = ⟨U(p,a)| Π₁ |U(p,b)⟩`, where `p` is
/// the classical prefix and `Π₁` projects the output wire on `|1⟩`, so that
/// the acceptance probability of payload `ρ` is `Tr(ρ M)`.
pub fn acceptance_form(c: &QuantumCircuit, prefix: &[bool]) -> Result<DMatrix<Complex64>> {
    let n = c.inputs().checked_sub(prefix.len()).ok_or_else(|| Error::DimensionMismatch {
        expected: c.inputs(),
        actual: prefix.len(),
    })?;
    if n > 12 {
        return Err(Error::Capability(format!("acceptance form on {n} payload qubits")));
    }
    let d = 1usize << n;
    let cols = (0..d)
        .map(|b| {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[b] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let h = run(c, prefix, cols)?;
    let weight = output_weights(&h, c.output());
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let v: Complex64 = h.cols[a]
                .iter()
                .zip(&h.cols[b])
                .zip(&weight)
                .map(|((x, y), &w)| x.conj() * y * w)
                .sum();
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
    }
    Ok(m)
}

/// Per-register-index indicator of the output wire reading 1.
fn output_weights(h: &Hybrid, output: usize) -> Vec<f64> {
    let len = 1usize << h.reg;
    match h.wires[output] {
        Wire::Classical(b) => vec![if b { 1.0 } else { 0.0 }; len],
        Wire::Quantum(p) => {
            let m = 1usize << (h.reg - 1 - p);
            (0..len).map(|x| if x & m != 0 { 1.0 } else { 0.0 }).collect()
        }
    }
}

/// Acceptance probability on input `prefix ⊗ payload`, with the prefix
/// given as classical bits on the leading input wires.
pub fn acceptance_with_prefix<'a>(
    c: &QuantumCircuit,
    prefix: &[bool],
    payload: impl Into<StateRef<'a>>,
) -> Result<f64> {
    let p = match payload.into() {
        StateRef::Pure(psi) => {
            payload_len(c, prefix, psi.dim())?;
            let h = run(c, prefix, vec![psi.amplitudes().to_vec()])?;
            let w = output_weights(&h, c.output());
            h.cols[0].iter().zip(&w).map(|(a, w)| a.norm_sqr() * w).sum::<f64>()
        }
        StateRef::Mixed(rho) => {
            payload_len(c, prefix, rho.dim())?;
            let m = acceptance_form(c, prefix)?;
            rho.matrix().iter().zip(m.transpose().iter()).map(|(r, m)| (r * m).re).sum::<f64>()
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::Qustring;
    use approx::assert_abs_diff_eq;

    #[test]
    fn classical_control_relabels_and_flips() {
        // prefix bit 1 controls a swap of the payload into an ancilla, which is
        // then the output.
        let c = QuantumCircuit::from_gates(2, 1, 2, vec![Gate::cswap(0, 1, 2)]).unwrap();
        let one = Qustring::from_bits("1").unwrap();
        assert_abs_diff_eq!(acceptance_with_prefix(&c, &[true], &one).unwrap(), 1.0);
        assert_abs_diff_eq!(acceptance_with_prefix(&c, &[false], &one).unwrap(), 0.0);
        let c = QuantumCircuit::from_gates(2, 1, 2, vec![Gate::cnot(0, 2)]).unwrap();
        assert_abs_diff_eq!(acceptance_with_prefix(&c, &[true], &one).unwrap(), 1.0);
    }

    #[test]
    fn form_is_hermitian_psd_and_bounded() {
        let mut rng = crate::rng::seeded(5);
        let c = super::super::random_circuit(&mut rng, 3, 1, 15).unwrap();
        let m = acceptance_form(&c, &[true]).unwrap();
        assert_abs_diff_eq!((&m - m.adjoint()).norm(), 0.0, epsilon = 1e-12);
        let ev = m.symmetric_eigenvalues();
        assert!(ev.iter().all(|&l| (-1e-12..=1.0 + 1e-12).contains(&l)));
    }

    #[test]
    fn prefix_must_fit() {
        let c = QuantumCircuit::new(1, 0).unwrap();
        let psi = Qustring::zeros(1).unwrap();
        assert!(acceptance_with_prefix(&c, &[true, false], &psi).is_err());
    }
}
