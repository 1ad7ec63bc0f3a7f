use num_complex::Complex64;

use super::{Gate, QuantumCircuit};
use crate::qstate::{Qustring, StateRef};
use crate::{Error, Result};

/// Largest register width simulated as a dense vector.
pub const DENSE_LIMIT: usize = 24;

const T_PHASE: Complex64 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);

#[inline]
fn mask(width: usize, q: usize) -> usize {
    1usize << (width - 1 - q)
}

/// Applies `gate` to a dense `width`-qubit amplitude vector.
pub(crate) fn apply_gate(amps: &mut [Complex64], width: usize, gate: &Gate) {
    match *gate {
        Gate::I(_) => {}
        Gate::X(q) => {
            let m = mask(width, q);
            for x in 0..amps.len() {
                if x & m == 0 {
                    amps.swap(x, x | m);
                }
            }
        }
        Gate::H(q) => {
            let m = mask(width, q);
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for x in 0..amps.len() {
                if x & m == 0 {
                    let (a, b) = (amps[x], amps[x | m]);
                    amps[x] = (a + b) * h;
                    amps[x | m] = (a - b) * h;
                }
            }
        }
        Gate::T(q) => {
            let m = mask(width, q);
            for (x, a) in amps.iter_mut().enumerate() {
                if x & m != 0 {
                    *a *= T_PHASE;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (mc, mt) = (mask(width, control), mask(width, target));
            for x in 0..amps.len() {
                if x & mc != 0 && x & mt == 0 {
                    amps.swap(x, x | mt);
                }
            }
        }
        Gate::Cswap { control, a, b } => {
            let (mc, ma, mb) = (mask(width, control), mask(width, a), mask(width, b));
            for x in 0..amps.len() {
                if x & mc != 0 && x & ma != 0 && x & mb == 0 {
                    amps.swap(x, (x & !ma) | mb);
                }
            }
        }
    }
}

/// The full output state `C(|φ⟩ ⊗ |0^{ancillas}⟩)` on all wires.
pub fn simulate(c: &QuantumCircuit, input: &Qustring) -> Result<Qustring> {
    if input.n() != c.inputs() {
        return Err(Error::DimensionMismatch { expected: c.inputs(), actual: input.n() });
    }
    if c.width() > DENSE_LIMIT {
        return Err(Error::Capability(format!(
            "dense simulation is limited to {DENSE_LIMIT} wires (got {})",
            c.width()
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << c.width()];
    for (x, a) in input.amplitudes().iter().enumerate() {
        amps[x << c.ancillas()] = *a;
    }
    for g in c.gates() {
        apply_gate(&mut amps, c.width(), g);
    }
    Ok(Qustring::from_raw(c.width(), amps))
}

/// Runs an ancilla-only circuit (no inputs) from the all-zeros state.
pub(crate) fn simulate_from_zero(c: &QuantumCircuit) -> Result<Qustring> {
    if c.width() > DENSE_LIMIT {
        return Err(Error::Capability(format!("dense simulation is limited to {DENSE_LIMIT} wires")));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << c.width()];
    amps[0] = Complex64::new(1.0, 0.0);
    for g in c.gates() {
        apply_gate(&mut amps, c.width(), g);
    }
    Ok(Qustring::from_raw(c.width(), amps))
}

/// `Prob[C(ρ) = 1]`: the exact probability that measuring the output wire
/// gives 1. Mixed inputs are handled through the acceptance form
/// `p(ρ) = Tr(ρ M)`.
pub fn acceptance_probability<'a>(c: &QuantumCircuit, input: impl Into<StateRef<'a>>) -> Result<f64> {
    super::hybrid::acceptance_with_prefix(c, &[], input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::DensityOperator;
    use approx::assert_abs_diff_eq;

    fn circuit(inputs: usize, ancillas: usize, gates: Vec<Gate>) -> QuantumCircuit {
        QuantumCircuit::from_gates(inputs, ancillas, 0, gates).unwrap()
    }

    #[test]
    fn empty_circuit_pads_ancillas() {
        let mut rng = crate::rng::seeded(1);
        let phi = Qustring::random(2, &mut rng).unwrap();
        let out = simulate(&circuit(2, 1, vec![]), &phi).unwrap();
        assert_eq!(out, phi.tensor(&Qustring::zeros(1).unwrap()));
    }

    #[test]
    fn bell_from_h_cnot() {
        let c = circuit(2, 0, vec![Gate::H(0), Gate::cnot(0, 1)]);
        let out = simulate(&c, &Qustring::zeros(2).unwrap()).unwrap();
        assert!(out.equal_up_to_phase(&Qustring::bell(), 1e-15));
    }

    #[test]
    fn x_is_an_involution_and_norm_is_kept() {
        let mut rng = crate::rng::seeded(2);
        let phi = Qustring::random(3, &mut rng).unwrap();
        let out = simulate(&circuit(3, 0, vec![Gate::X(1), Gate::X(1)]), &phi).unwrap();
        assert_eq!(out, phi);
        let c = circuit(3, 0, vec![Gate::H(0), Gate::T(1), Gate::cswap(2, 0, 1), Gate::cnot(1, 2)]);
        assert_abs_diff_eq!(simulate(&c, &phi).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn basic_acceptance() {
        let zero = Qustring::zeros(1).unwrap();
        assert_abs_diff_eq!(acceptance_probability(&circuit(1, 0, vec![Gate::X(0)]), &zero).unwrap(), 1.0);
        assert_abs_diff_eq!(
            acceptance_probability(&circuit(1, 0, vec![Gate::H(0)]), &zero).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn acceptance_is_linear_in_the_input() {
        let mut rng = crate::rng::seeded(3);
        let c = circuit(2, 1, vec![Gate::H(0), Gate::cnot(0, 2), Gate::T(2), Gate::H(2), Gate::cswap(2, 0, 1)]);
        let r1 = DensityOperator::random(2, &mut rng).unwrap();
        let r2 = DensityOperator::random(2, &mut rng).unwrap();
        let half = num_complex::Complex64::new(0.5, 0.0);
        let mix = DensityOperator::new((r1.matrix() + r2.matrix()) * half).unwrap();
        let lhs = acceptance_probability(&c, &mix).unwrap();
        let rhs = 0.5 * acceptance_probability(&c, &r1).unwrap() + 0.5 * acceptance_probability(&c, &r2).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn hybrid_matches_dense_readout() {
        let mut rng = crate::rng::seeded(4);
        for _ in 0..20 {
            let c = super::super::random_circuit(&mut rng, 2, 2, 12).unwrap();
            let phi = Qustring::random(2, &mut rng).unwrap();
            let full = simulate(&c, &phi).unwrap();
            let m = mask(c.width(), c.output());
            let dense: f64 = full.amplitudes().iter().enumerate().filter(|(x, _)| x & m != 0).map(|(_, a)| a.norm_sqr()).sum();
            assert_abs_diff_eq!(acceptance_probability(&c, &phi).unwrap(), dense, epsilon = 1e-12);
            assert_abs_diff_eq!(acceptance_probability(&c, &phi.to_density()).unwrap(), dense, epsilon = 1e-12);
        }
    }
}
