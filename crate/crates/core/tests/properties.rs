//! Property checks over seeded random instances.

use proptest::prelude::*;
use qentangle::circuit::{
    acceptance_probability, encoding_length, permutation_network, random_circuit, simulate, Gate, QuantumCircuit,
};
use qentangle::descriptive::{qca, sqcd, transfer_value};
use qentangle::distinguish::{worst_case_advantage, AdvantageOptions, DistinguisherSpec};
use qentangle::qstate::{
    fidelity, metrics, partial_trace, trace_distance, von_neumann_entropy, DensityOperator, QubitPermutation,
    Qustring,
};
use qentangle::rng::seeded;
use qentangle::separability::{finest_factorization, is_k_separable, sdis_oracle, sdis_with, SdisOptions};
use qentangle::Error;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// A random state that is a product over a random partition into `k` blocks,
/// with its qubits shuffled.
fn random_k_product(rng: &mut impl Rng, n: usize, k: usize) -> Qustring {
    let mut sizes = vec![1; k];
    for _ in k..n {
        let i = rng.random_range(0..k);
        sizes[i] += 1;
    }
    let factors: Vec<Qustring> = sizes.iter().map(|&m| Qustring::random(m, rng).unwrap()).collect();
    let sigma = QubitPermutation::random(n, rng);
    Qustring::tensor_all(&factors).unwrap().permute(&sigma).unwrap()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn metrics_are_permutation_invariant(seed: u64, n in 1usize..=4) {
        let mut rng = seeded(seed);
        let a = Qustring::random(n, &mut rng).unwrap();
        let b = Qustring::random(n, &mut rng).unwrap();
        let s = QubitPermutation::random(n, &mut rng);
        let m0 = metrics(&a, &b).unwrap();
        let m1 = metrics(&a.permute(&s).unwrap(), &b.permute(&s).unwrap()).unwrap();
        prop_assert!((m0.trace_distance - m1.trace_distance).abs() < 1e-9);
        prop_assert!((m0.fidelity - m1.fidelity).abs() < 1e-9);
        prop_assert!((m0.bures - m1.bures).abs() < 1e-9);
        prop_assert!((m0.l2().unwrap() - m1.l2().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn pure_trace_distance_matches_fidelity(seed: u64, n in 1usize..=4) {
        let mut rng = seeded(seed);
        let a = Qustring::random(n, &mut rng).unwrap();
        let b = Qustring::random(n, &mut rng).unwrap();
        let f = fidelity(&a, &b).unwrap();
        let td = trace_distance(&a.to_density(), &b.to_density()).unwrap();
        prop_assert!((td - (1.0 - f * f).max(0.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_is_contractive(seed: u64, n in 2usize..=4) {
        let mut rng = seeded(seed);
        let a = DensityOperator::random(n, &mut rng).unwrap();
        let b = DensityOperator::random(n, &mut rng).unwrap();
        let mut keep: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if keep.is_empty() {
            keep.push(rng.random_range(0..n));
        }
        let (ra, rb) = (partial_trace(&a, &keep).unwrap(), partial_trace(&b, &keep).unwrap());
        prop_assert!(trace_distance(&ra, &rb).unwrap() <= trace_distance(&a, &b).unwrap() + 1e-9);
    }

    #[test]
    fn entropy_vanishes_exactly_on_pure_states(seed: u64, n in 1usize..=3) {
        let mut rng = seeded(seed);
        let pure = Qustring::random(n, &mut rng).unwrap().to_density();
        prop_assert!(von_neumann_entropy(&pure) < 1e-6);
        let mixed = DensityOperator::random(n, &mut rng).unwrap();
        prop_assert_eq!(von_neumann_entropy(&mixed) < 1e-6, mixed.purity() >= 1.0 - 1e-9);
    }

    #[test]
    fn sdis_is_monotone_in_k(seed: u64, n in 2usize..=4) {
        let mut rng = seeded(seed);
        let phi = Qustring::random(n, &mut rng).unwrap();
        let opts = SdisOptions::default().with_seed(seed);
        let mut last = 0.0;
        for k in 1..=n {
            let s = sdis_with(&phi, k, &opts).unwrap().value;
            prop_assert!(s >= last - 1e-9, "k = {}: {} < {}", k, s, last);
            last = s;
        }
    }

    #[test]
    fn sdis_vanishes_on_separable_states(seed: u64, n in 2usize..=5) {
        let mut rng = seeded(seed);
        let k = rng.random_range(2..=n);
        let phi = random_k_product(&mut rng, n, k);
        prop_assert!(is_k_separable(&phi, k).unwrap());
        prop_assert!(sdis_with(&phi, k, &SdisOptions::default()).unwrap().value < 1e-6);
        let report = finest_factorization(&phi).unwrap();
        prop_assert!(report.sind >= k);
        prop_assert!(trace_distance(&report.reconstruct().unwrap(), &phi).unwrap() < 1e-7);
    }

    #[test]
    fn sdis_is_below_the_oracle(seed: u64, n in 2usize..=3) {
        let mut rng = seeded(seed);
        let phi = Qustring::random(n, &mut rng).unwrap();
        let k = rng.random_range(2..=n);
        let s = sdis_with(&phi, k, &SdisOptions::default()).unwrap().value;
        let o = sdis_oracle(&phi, k, 12).unwrap();
        prop_assert!(s <= o.value + 1e-6);
    }

    #[test]
    fn simulation_preserves_norm(seed: u64, n in 1usize..=4, anc in 0usize..=2, size in 0usize..=30) {
        let mut rng = seeded(seed);
        let c = random_circuit(&mut rng, n, anc, size).unwrap();
        let out = simulate(&c, &Qustring::random(n, &mut rng).unwrap()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gates_after_the_output_is_final_do_not_matter(seed: u64, n in 2usize..=4, size in 0usize..=12) {
        let mut rng = seeded(seed);
        let c = random_circuit(&mut rng, n, 1, size).unwrap();
        let out = c.output();
        let extra = random_circuit(&mut rng, n + 1, 0, 8).unwrap();
        let mut d = c.clone();
        for g in extra.gates().iter().filter(|g| !g.touches(out)) {
            d.push(*g).unwrap();
        }
        let phi = Qustring::random(n, &mut rng).unwrap();
        let (p, q) = (acceptance_probability(&c, &phi).unwrap(), acceptance_probability(&d, &phi).unwrap());
        prop_assert!((p - q).abs() < 1e-12);
    }

    #[test]
    fn adding_a_gate_lengthens_the_encoding(seed: u64, n in 1usize..=4, size in 0usize..=20) {
        let mut rng = seeded(seed);
        let c = random_circuit(&mut rng, n, 1, size).unwrap();
        let len = encoding_length(&c);
        prop_assert!(len >= c.size());
        let mut d = c.clone();
        d.push(Gate::X(rng.random_range(0..n + 1))).unwrap();
        prop_assert!(encoding_length(&d) > len);
    }

    #[test]
    fn permutation_network_realizes_sigma(seed: u64, n in 1usize..=5) {
        let mut rng = seeded(seed);
        let s = QubitPermutation::random(n, &mut rng);
        let phi = Qustring::random(n, &mut rng).unwrap();
        let out = simulate(&permutation_network(&s), &phi).unwrap();
        prop_assert!(out.equal_up_to_phase(&phi.permute(&s).unwrap(), 1e-9));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn advantage_is_monotone_in_k(seed: u64, size in 2usize..=10) {
        let mut rng = seeded(seed);
        let n = 3;
        let c = random_circuit(&mut rng, n, 1, size).unwrap();
        let target = Qustring::random(n, &mut rng).unwrap();
        let opts = AdvantageOptions::default().with_seed(seed);
        let e2 = worst_case_advantage(&DistinguisherSpec::plain(c.clone(), n, 2).unwrap(), &target, &opts)
            .unwrap()
            .epsilon_star;
        let e3 = worst_case_advantage(&DistinguisherSpec::plain(c, n, 3).unwrap(), &target, &opts)
            .unwrap()
            .epsilon_star;
        prop_assert!(e3 >= e2 - 1e-9, "ε*₃ = {} < ε*₂ = {}", e3, e2);
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn qca_is_antitone_in_size_and_its_witness_replays(seed: u64) {
        let mut rng = seeded(seed);
        let target = Qustring::random(1, &mut rng).unwrap();
        let small = qca(&target, 1).unwrap();
        let large = qca(&target, 2).unwrap();
        prop_assert!(large.value <= small.value + 1e-9);
        let w = &large.witness;
        let replay = QuantumCircuit::from_gates(w.width(), 0, w.output(), w.gates().to_vec()).unwrap();
        let out = simulate(&replay, &Qustring::zeros(w.width()).unwrap()).unwrap();
        let f = partial_trace(&out.to_density(), &[0]).unwrap().expectation(&target).unwrap().sqrt();
        prop_assert!((f - large.fidelity_or_advantage).abs() < 1e-9, "{} vs {} for {}", f, large.fidelity_or_advantage, w);
    }

    #[test]
    fn sqcd_respects_its_lower_bound_and_the_transfer_bound(seed: u64) {
        let mut rng = seeded(seed);
        let target = Qustring::random(2, &mut rng).unwrap();
        let s = sdis_with(&target, 2, &SdisOptions::default()).unwrap().value;
        match sqcd(&target, 2, 3) {
            Ok(e) => {
                prop_assert!(e.value > -s.log2() + 1e-9);
                let d = DistinguisherSpec::plain(e.witness.clone(), 2, 2).unwrap();
                let eps = worst_case_advantage(&d, &target, &AdvantageOptions::default()).unwrap().epsilon_star;
                prop_assert!((eps - e.fidelity_or_advantage).abs() < 1e-9);
                prop_assert!(e.value <= transfer_value(&e.witness, eps).unwrap() + 1e-9);
            }
            Err(Error::Undefined(_)) => {}
            Err(other) => prop_assert!(false, "{}", other),
        }
    }
}
