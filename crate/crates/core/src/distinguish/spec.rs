use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{
    acceptance_form, acceptance_with_prefix, encode_prefix, permutation_network, prefix_length,
    reverse_circuit, Approximator, Gate, QuantumCircuit,
};
use crate::qstate::{QubitPermutation, StateRef};
use crate::{Error, Result};

/// A `(σ, m)` pair announced through the unary prefix.
pub type PrefixPair = (QubitPermutation, Vec<usize>);

/// A distinguisher circuit for `n`-qubit payloads.
///
/// Without a prefix the payload occupies input wires `0..n`. With one, the
/// inputs are the `prefix_length(n, k)` prefix wires followed by the payload.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguisherSpec {
    pub circuit: QuantumCircuit,
    pub n: usize,
    pub k: usize,
    pub accepts_prefix: bool,
    /// Pairs with a dispatch branch; `None` when every prefix is handled.
    pub covered: Option<Vec<PrefixPair>>,
}

impl DistinguisherSpec {
    /// Wraps a circuit whose first `n` inputs are the payload.
    pub fn plain(circuit: QuantumCircuit, n: usize, k: usize) -> Result<Self> {
        if circuit.inputs() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: circuit.inputs() });
        }
        check_k(n, k)?;
        Ok(Self { circuit, n, k, accepts_prefix: false, covered: None })
    }

    /// Wraps a circuit taking `1^{σ,m}` followed by an `n`-qubit payload.
    pub fn with_prefix_input(circuit: QuantumCircuit, n: usize, k: usize) -> Result<Self> {
        check_k(n, k)?;
        let expected = prefix_length(n, k) + n;
        if circuit.inputs() != expected {
            return Err(Error::DimensionMismatch { expected, actual: circuit.inputs() });
        }
        Ok(Self { circuit, n, k, accepts_prefix: true, covered: None })
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        check_k(self.n, k)?;
        if self.accepts_prefix && k != self.k {
            return Err(Error::InvalidArgument("prefix width fixes k".into()));
        }
        self.k = k;
        Ok(self)
    }

    /// A prefix-accepting version that ignores its prefix.
    pub fn lift_to_prefix(&self) -> Result<Self> {
        if self.accepts_prefix {
            return Ok(self.clone());
        }
        let l = prefix_length(self.n, self.k);
        let circuit = self.circuit.relabeled(l + self.n, self.circuit.ancillas(), |w| w + l)?;
        Ok(Self { circuit, n: self.n, k: self.k, accepts_prefix: true, covered: None })
    }

    /// Index of the first payload wire.
    pub fn payload_offset(&self) -> usize {
        if self.accepts_prefix {
            prefix_length(self.n, self.k)
        } else {
            0
        }
    }

    pub fn size(&self) -> usize {
        self.circuit.size()
    }

    fn prefix_bits(&self, pair: Option<(&QubitPermutation, &[usize])>) -> Result<Vec<bool>> {
        if !self.accepts_prefix {
            return Ok(Vec::new());
        }
        let (sigma, m) = pair.ok_or_else(|| {
            Error::InvalidArgument("this distinguisher needs a (σ, m) prefix".into())
        })?;
        if sigma.n() != self.n || m.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "prefix for n = {}, k = {} does not fit this distinguisher (n = {}, k = {})",
                sigma.n(),
                m.len(),
                self.n,
                self.k
            )));
        }
        if let Some(cov) = &self.covered {
            if !cov.iter().any(|(s, mm)| s == sigma && mm.as_slice() == m) {
                return Err(Error::MissingPair(format!("σ = {sigma}, m = {m:?}")));
            }
        }
        Ok(encode_prefix(sigma, m)?.bits)
    }

    /// Acceptance probability on payload `input`, with prefix `pair` when
    /// the distinguisher takes one.
    pub fn acceptance<'a>(
        &self,
        pair: Option<(&QubitPermutation, &[usize])>,
        input: impl Into<StateRef<'a>>,
    ) -> Result<f64> {
        acceptance_with_prefix(&self.circuit, &self.prefix_bits(pair)?, input)
    }

    /// The payload operator `M` with `p(ρ) = Tr(ρ M)` for the given prefix.
    pub fn form(&self, pair: Option<(&QubitPermutation, &[usize])>) -> Result<DMatrix<Complex64>> {
        acceptance_form(&self.circuit, &self.prefix_bits(pair)?)
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

/// Undo the constructor, then test the payload for all zeros.
///
/// The zero test flips every payload bit and walks a single excitation along
/// an ancilla chain, one controlled swap per payload bit, so it reaches the
/// last ancilla (the output) exactly when every payload bit was 0. The
/// acceptance probability on `|φ⟩` is therefore `|⟨ξ|φ⟩|²`.
pub fn build_reversal_distinguisher(constructor: &QuantumCircuit) -> Result<DistinguisherSpec> {
    if constructor.ancillas() != 0 {
        return Err(Error::InvalidCircuit("constructor must not use ancillas".into()));
    }
    let n = constructor.inputs();
    let mut c = QuantumCircuit::new(n, n + 1)?;
    c.extend(reverse_circuit(constructor).gates().iter().copied())?;
    c.extend((0..n).map(Gate::X))?;
    c.push(Gate::X(n))?;
    c.extend((0..n).map(|i| Gate::cswap(i, n + i, n + i + 1)))?;
    let c = c.with_output(2 * n)?;
    DistinguisherSpec::plain(c, n, if n >= 2 { 2 } else { 1 })
}

/// The swap test between an `n`-qubit payload (wires `0..n`) and a second
/// register (wires `n..2n`), with the control on wire `2n`. The output is the
/// complemented control, so it accepts with probability `½ + ½ Tr(ρ σ)`.
pub fn swap_test_core(n: usize) -> Result<QuantumCircuit> {
    let c = 2 * n;
    let mut circ = QuantumCircuit::new(2 * n, 1)?;
    circ.push(Gate::H(c))?;
    circ.extend((0..n).map(|i| Gate::cswap(c, i, n + i)))?;
    circ.push(Gate::H(c))?;
    circ.push(Gate::X(c))?;
    circ.with_output(c)
}

/// Prepares the approximator's state next to the payload and runs the swap
/// test against it. The control sits on wire `n`, the approximator's wires
/// follow it.
pub fn build_swap_test_distinguisher(approx: &Approximator, n: usize) -> Result<DistinguisherSpec> {
    if approx.n != n {
        return Err(Error::DimensionMismatch { expected: n, actual: approx.n });
    }
    let ctrl = n;
    let base = n + 1;
    let mut c = QuantumCircuit::new(n, 1 + approx.circuit.width())?;
    c.extend(approx.circuit.gates().iter().map(|g| g.map_wires(|w| w + base)))?;
    c.push(Gate::H(ctrl))?;
    c.extend((0..n).map(|i| Gate::cswap(ctrl, i, base + i)))?;
    c.push(Gate::H(ctrl))?;
    c.push(Gate::X(ctrl))?;
    let c = c.with_output(ctrl)?;
    DistinguisherSpec::plain(c, n, if n >= 2 { 2 } else { 1 })
}

/// Prepends a permutation network for `σ⁻¹` on the payload, turning a
/// distinguisher for `ξ` into one for `σ(ξ)`.
pub fn conjugate_by_permutation(d: &DistinguisherSpec, sigma: &QubitPermutation) -> Result<DistinguisherSpec> {
    if sigma.n() != d.n {
        return Err(Error::DimensionMismatch { expected: d.n, actual: sigma.n() });
    }
    let off = d.payload_offset();
    let net = permutation_network(&sigma.inverse());
    let mut gates: Vec<Gate> = net.gates().iter().map(|g| g.map_wires(|w| w + off)).collect();
    gates.extend_from_slice(d.circuit.gates());
    let circuit =
        QuantumCircuit::from_gates(d.circuit.inputs(), d.circuit.ancillas(), d.circuit.output(), gates)?;
    Ok(DistinguisherSpec { circuit, ..d.clone() })
}

/// One prefix-accepting circuit that recognizes each listed `(σ, m)` and
/// runs the matching sub-distinguisher on the payload.
///
/// Wire layout after the prefix and payload: the shared output, a scratch
/// chain of `L + 1` wires (`L` the prefix length), one flag per pair, then
/// one private workspace per pair. For each pair the prefix is compared with
/// the pair's pattern by an excitation walking the scratch chain (undone
/// afterwards), leaving a classical flag. Under that flag the payload is
/// swapped into the pair's workspace, the sub-circuit runs there, and its
/// output is swapped into the shared output.
pub fn combine_distinguishers(per_pair: &[(PrefixPair, DistinguisherSpec)]) -> Result<DistinguisherSpec> {
    let ((s0, m0), _) = per_pair
        .first()
        .ok_or_else(|| Error::InvalidArgument("no distinguishers to combine".into()))?;
    let (n, k) = (s0.n(), m0.len());
    let l = prefix_length(n, k);
    for ((s, m), d) in per_pair {
        if s.n() != n || m.len() != k || d.n != n {
            return Err(Error::InvalidArgument("all pairs must share n and k".into()));
        }
        if d.accepts_prefix && d.k != k {
            return Err(Error::InvalidArgument("prefix-accepting sub-circuit with another k".into()));
        }
    }
    for (i, ((s, m), _)) in per_pair.iter().enumerate() {
        if per_pair[..i].iter().any(|((s2, m2), _)| s2 == s && m2 == m) {
            return Err(Error::InvalidArgument(format!("pair σ = {s}, m = {m:?} listed twice")));
        }
    }
    let inputs = l + n;
    let out = inputs;
    let scratch = out + 1;
    let flags = scratch + l + 1;
    let mut work = flags + per_pair.len();
    let mut bases = Vec::with_capacity(per_pair.len());
    for (_, d) in per_pair {
        bases.push(work);
        work += d.circuit.width();
    }
    let mut c = QuantumCircuit::new(inputs, work - inputs)?;
    for (j, ((s, m), d)) in per_pair.iter().enumerate() {
        let pattern = encode_prefix(s, m)?.bits;
        let f = flags + j;
        let zeros: Vec<usize> = (0..l).filter(|&i| !pattern[i]).collect();
        let ladder: Vec<Gate> = (0..l).map(|i| Gate::cswap(i, scratch + i, scratch + i + 1)).collect();
        c.extend(zeros.iter().map(|&i| Gate::X(i)))?;
        c.push(Gate::X(scratch))?;
        c.extend(ladder.iter().copied())?;
        c.push(Gate::cnot(scratch + l, f))?;
        c.extend(ladder.iter().rev().copied())?;
        c.push(Gate::X(scratch))?;
        c.extend(zeros.iter().map(|&i| Gate::X(i)))?;

        let base = bases[j];
        let payload_in_sub = if d.accepts_prefix { l } else { 0 };
        if d.accepts_prefix {
            c.extend((0..l).map(|i| Gate::cnot(i, base + i)))?;
        }
        c.extend((0..n).map(|i| Gate::cswap(f, l + i, base + payload_in_sub + i)))?;
        c.extend(d.circuit.gates().iter().map(|g| g.map_wires(|w| w + base)))?;
        c.push(Gate::cswap(f, base + d.circuit.output(), out))?;
    }
    let c = c.with_output(out)?;
    let mut spec = DistinguisherSpec::with_prefix_input(c, n, k)?;
    spec.covered = Some(per_pair.iter().map(|(p, _)| p.clone()).collect());
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ghz_constructor, perturbed_ghz_approximator, random_circuit};
    use crate::qstate::{DensityOperator, Qustring};
    use approx::assert_abs_diff_eq;

    #[test]
    fn reversal_accepts_with_fidelity_squared() {
        let mut rng = crate::rng::seeded(11);
        for n in 2..=4 {
            let con = ghz_constructor(n).unwrap();
            let d = build_reversal_distinguisher(&con.circuit).unwrap();
            assert_abs_diff_eq!(d.acceptance(None, &con.target).unwrap(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.acceptance(None, &Qustring::zeros(n).unwrap()).unwrap(), 0.5, epsilon = 1e-12);
            for _ in 0..5 {
                let phi = Qustring::random(n, &mut rng).unwrap();
                let f2 = con.target.overlap(&phi).unwrap().powi(2);
                assert_abs_diff_eq!(d.acceptance(None, &phi).unwrap(), f2, epsilon = 1e-9);
            }
        }
        let with_anc = QuantumCircuit::new(2, 1).unwrap();
        assert!(build_reversal_distinguisher(&with_anc).is_err());
    }

    #[test]
    fn swap_test_law() {
        let mut rng = crate::rng::seeded(12);
        let core = swap_test_core(2).unwrap();
        for _ in 0..10 {
            let rho = DensityOperator::random(2, &mut rng).unwrap();
            let psi = Qustring::random(2, &mut rng).unwrap();
            let joint = psi.to_density().tensor(&rho);
            let p = crate::circuit::acceptance_probability(&core, &joint).unwrap();
            assert_abs_diff_eq!(p, 0.5 + rho.expectation(&psi).unwrap() / 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn approximator_swap_test() {
        let a = perturbed_ghz_approximator(3).unwrap();
        let d = build_swap_test_distinguisher(&a, 3).unwrap();
        let rho = a.output_state().unwrap();
        let mut rng = crate::rng::seeded(13);
        for _ in 0..5 {
            let psi = Qustring::random(3, &mut rng).unwrap();
            let p = d.acceptance(None, &psi).unwrap();
            assert_abs_diff_eq!(p, 0.5 + rho.expectation(&psi).unwrap() / 2.0, epsilon = 1e-9);
        }
        assert!(build_swap_test_distinguisher(&a, 2).is_err());
    }

    #[test]
    fn combined_dispatch_matches_each_branch() {
        let mut rng = crate::rng::seeded(14);
        let n = 3;
        let pairs: Vec<PrefixPair> = vec![
            (QubitPermutation::identity(3), vec![1, 2]),
            (QubitPermutation::from_one_based(&[3, 1, 2]).unwrap(), vec![2, 1]),
        ];
        let subs: Vec<DistinguisherSpec> = (0..2)
            .map(|_| DistinguisherSpec::plain(random_circuit(&mut rng, 3, 1, 10).unwrap(), n, 2).unwrap())
            .collect();
        let lifted = subs[1].lift_to_prefix().unwrap();
        let per_pair = vec![(pairs[0].clone(), subs[0].clone()), (pairs[1].clone(), lifted.clone())];
        let comb = combine_distinguishers(&per_pair).unwrap();
        assert_eq!(comb.circuit.inputs(), crate::circuit::distinguisher_inputs(3, 2));
        for _ in 0..5 {
            let phi = Qustring::random(3, &mut rng).unwrap();
            for (j, (s, m)) in pairs.iter().enumerate() {
                let want = subs[j].acceptance(None, &phi).unwrap();
                let got = comb.acceptance(Some((s, m)), &phi).unwrap();
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
        let missing = QubitPermutation::from_one_based(&[2, 1, 3]).unwrap();
        let phi = Qustring::zeros(3).unwrap();
        assert!(matches!(comb.acceptance(Some((&missing, &[1, 2])), &phi), Err(Error::MissingPair(_))));
    }

    #[test]
    fn conjugation_tracks_permuted_targets() {
        let mut rng = crate::rng::seeded(15);
        let target = Qustring::from_bits("1").unwrap().tensor(&Qustring::bell());
        let c = crate::circuit::basis_constructor(&[true, false, false]).unwrap();
        let mut circ = c.circuit.clone();
        circ.extend([Gate::H(1), Gate::cnot(1, 2)]).unwrap();
        let d = build_reversal_distinguisher(&circ).unwrap();
        assert_abs_diff_eq!(d.acceptance(None, &target).unwrap(), 1.0, epsilon = 1e-12);
        let sigma = QubitPermutation::random(3, &mut rng);
        let dc = conjugate_by_permutation(&d, &sigma).unwrap();
        assert_abs_diff_eq!(dc.acceptance(None, &target.permute(&sigma).unwrap()).unwrap(), 1.0, epsilon = 1e-12);
    }
}
