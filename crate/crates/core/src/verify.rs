//! Named property suites, one per proved statement, each checking the
//! statement on seeded random instances and reporting a pass/fail tally.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    decode_circuit, decode_prefix, encode_circuit, encode_prefix, encoding_length, ghz_constructor,
    pairwise_constructor, perturbed_ghz_approximator, prefix_length, random_circuit, EnsembleSpec,
};
use crate::descriptive::{basis_overhead, bound_audit, qca, sqcd, sqcd_pair, AuditOptions};
use crate::distinguish::{
    build_reversal_distinguisher, build_swap_test_distinguisher, canonical_pairs, combine_distinguishers,
    conjugate_by_permutation, data_processing_gap, indistinguishability_check, povm_witness, swap_test_core,
    worst_case_advantage, AdvantageOptions, DistinguisherSpec,
};
use crate::qstate::{fidelity, is_isotopic, metrics, DensityOperator, QubitPermutation, Qustring};
use crate::rng::{seeded, SeededRng};
use crate::separability::{
    entropy_gap_check, finest_factorization, is_k_separable, sdis_oracle, sdis_with, BlockPartition, SdisOptions,
};
use crate::{Error, Result};

/// Outcome of one suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub statement: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest amount by which any case overshot its tolerance.
    pub worst_excess: f64,
    /// The first few failing cases.
    pub notes: Vec<String>,
    pub passed: bool,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    worst_excess: f64,
    notes: Vec<String>,
}

impl Tally {
    /// Records `lhs ≤ rhs + tol`.
    fn le(&mut self, lhs: f64, rhs: f64, tol: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        let excess = lhs - rhs - tol;
        if excess > 0.0 || lhs.is_nan() || rhs.is_nan() {
            self.fail(excess, what);
        }
    }

    fn close(&mut self, a: f64, b: f64, tol: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        let excess = (a - b).abs() - tol;
        if excess > 0.0 || a.is_nan() || b.is_nan() {
            self.fail(excess, what);
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(0.0, what);
        }
    }

    fn fail(&mut self, excess: f64, what: impl FnOnce() -> String) {
        self.failures += 1;
        if excess.is_finite() {
            self.worst_excess = self.worst_excess.max(excess);
        }
        if self.notes.len() < 5 {
            self.notes.push(what());
        }
    }
}

type SuiteFn = fn(&mut SeededRng, &mut Tally) -> Result<()>;

const SUITES: &[(&str, &str, SuiteFn)] = &[
    ("ghz-distance", "sdis₂(GHZ_n) = 1/√2 ≥ 1/2, matching the Schmidt oracle", ghz_distance),
    ("sdis-permutation-invariance", "sdis(σ(φ), k) = sdis(φ, k)", permutation_invariance),
    ("sdis-monotone-in-k", "sdis(φ, k + 1) ≥ sdis(φ, k)", monotone_in_k),
    ("sdis-zero-iff-separable", "sdis(φ, k) = 0 exactly when φ is k-separable", zero_iff_separable),
    ("sdis-oracle-bound", "sdis never exceeds the grid oracle", oracle_bound),
    ("structure-recovery", "ψ_2n has sind n and is isotopic to Bell^⊗n", structure_recovery),
    ("entropy-gap", "|E(ξ) − E(φ*)| ≤ sdis·n + η(sdis) when sdis ≤ 1/e", entropy_gap),
    ("data-processing-cap", "|p(ρ) − p(τ)| ≤ trace distance for every circuit", data_processing),
    ("close-implies-indistinguishable", "no circuit separates ξ from its nearest φ* by more than sdis", close_indist),
    ("reversal-fidelity-law", "the reversal distinguisher accepts φ with probability F(ξ, φ)²", reversal_law),
    ("swap-test-law", "the swap test accepts ψ with probability ½ + ⟨ψ|ρ|ψ⟩/2", swap_law),
    ("approximate-implies-distinguishable", "an ε-approximator yields advantage ≥ ((δ − ε)² − ε)/2", approx_distinguish),
    ("distinguisher-permutation-closure", "conjugating by σ certifies the same ε* for σ(ξ)", permutation_closure),
    ("distinguisher-monotone-in-k", "ε* at k + 1 is at least ε* at k", advantage_monotone),
    ("combining-dispatch", "the combined distinguisher behaves as the matching sub-circuit", combining),
    ("povm-witness", "W = I − |ξ⟩⟨ξ| has gap sdis² over k-separable states", povm),
    ("prefix-codec", "1^{σ,m} round-trips and has length n(n+5)/2 + k + 2", prefix_codec),
    ("encoding-roundtrip", "circuits round-trip and encode to at least one bit per gate", encoding_roundtrip),
    ("qca-basis-bound", "QCA ≤ 2n + c for 2-qubit targets", qca_basis),
    ("sqcd-lower-bound", "sQCD_k > −log₂ sdis_k and sQCD_{σ,m} ≤ sQCD_k", sqcd_lower),
    ("bound-audit", "the upper bounds on sQCD hold with the frozen constants", audit),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Runs one suite by name with the given seed.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let (i, &(name, statement, f)) = SUITES
        .iter()
        .enumerate()
        .find(|(_, s)| s.0 == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {name:?}; known: {:?}", suite_names())))?;
    let mut rng = seeded(crate::rng::derive_seed(seed, i as u64));
    let mut t = Tally::default();
    f(&mut rng, &mut t)?;
    Ok(SuiteResult {
        name: name.to_string(),
        statement: statement.to_string(),
        passed: t.failures == 0 && t.cases > 0,
        cases: t.cases,
        failures: t.failures,
        worst_excess: t.worst_excess,
        notes: t.notes,
    })
}

/// `"all"` or a single suite name.
pub fn run_suites(selection: &str, seed: u64) -> Result<Vec<SuiteResult>> {
    if selection == "all" {
        SUITES.iter().map(|s| run_suite(s.0, seed)).collect()
    } else {
        Ok(vec![run_suite(selection, seed)?])
    }
}

/// Random product of `k` random blocks on shuffled qubits, plus `noise`
/// times a random vector, renormalized.
pub fn near_separable_state<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, noise: f64) -> Result<Qustring> {
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    labels.shuffle(rng);
    let p = BlockPartition::from_labels(&labels)?;
    let factors = p
        .blocks()
        .iter()
        .map(|b| Qustring::random(b.len(), rng))
        .collect::<Result<Vec<_>>>()?;
    let prod = Qustring::tensor_all(&factors)?.permute(&p.sigma().inverse())?;
    let r = Qustring::random(n, rng)?;
    let mixed: Vec<_> = prod.amplitudes().iter().zip(r.amplitudes()).map(|(a, b)| a + b * noise).collect();
    Qustring::normalized(mixed)
}

fn opts() -> SdisOptions {
    SdisOptions::default()
}

fn ghz_distance(_: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for n in 2..=6 {
        let g = Qustring::ghz(n)?;
        let s = sdis_with(&g, 2, &opts())?;
        t.le(0.5, s.value, 0.0, || format!("n = {n}: sdis {} below 1/2", s.value));
        t.close(s.value, 0.5f64.sqrt(), 1e-6, || format!("n = {n}: sdis {}", s.value));
        let m = metrics(&g, &Qustring::zeros(n)?)?;
        t.le(2.0 - 2f64.sqrt(), m.bures, 1e-6, || format!("n = {n}: Bures {}", m.bures));
        if n <= 4 {
            let o = sdis_oracle(&g, 2, 8)?;
            if let Some(sch) = o.schmidt {
                t.close(s.value, sch, 1e-4, || format!("n = {n}: Schmidt oracle {sch}"));
            }
        }
    }
    Ok(())
}

fn permutation_invariance(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..50 {
        let n = rng.random_range(3..=5);
        let k = rng.random_range(2..=n);
        let phi = Qustring::random(n, rng)?;
        let sigma = QubitPermutation::random(n, rng);
        let a = sdis_with(&phi, k, &opts())?.value;
        let b = sdis_with(&phi.permute(&sigma)?, k, &opts())?.value;
        t.close(a, b, 1e-6, || format!("n = {n}, k = {k}, σ = {sigma}: {a} vs {b}"));
    }
    Ok(())
}

fn monotone_in_k(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..15 {
        let n = rng.random_range(3..=5);
        let phi = if rng.random_bool(0.5) { Qustring::random(n, rng)? } else { near_separable_state(rng, n, 2, 0.1)? };
        let mut prev = 0.0;
        for k in 1..=n {
            let s = sdis_with(&phi, k, &opts())?.value;
            t.le(prev, s, 1e-9, || format!("n = {n}: sdis at k = {k} is {s} < {prev}"));
            prev = s;
        }
    }
    Ok(())
}

fn zero_iff_separable(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let k = rng.random_range(1..=n);
        let phi = if rng.random_bool(0.5) { near_separable_state(rng, n, k, 0.0)? } else { Qustring::random(n, rng)? };
        let s = sdis_with(&phi, k, &opts())?.value;
        let sep = is_k_separable(&phi, k)?;
        t.check(sep == (s == 0.0) || (!sep && s > 1e-6), || format!("n = {n}, k = {k}: separable {sep}, sdis {s}"));
        if !sep {
            t.check(s > 0.0, || format!("n = {n}, k = {k}: entangled state with sdis 0"));
        }
    }
    Ok(())
}

fn oracle_bound(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..6 {
        let phi = Qustring::random(3, rng)?;
        let s = sdis_with(&phi, 2, &opts())?.value;
        let o = sdis_oracle(&phi, 2, 6)?;
        t.le(s, o.value, 1e-6, || format!("sdis {s} above oracle {}", o.value));
    }
    Ok(())
}

fn structure_recovery(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for m in 2..=4 {
        let psi = Qustring::pairwise(m)?;
        let r = finest_factorization(&psi)?;
        t.check(r.sind == m, || format!("ψ_{}: sind {}", 2 * m, r.sind));
        let back = r.reconstruct()?;
        let td = metrics(&back, &psi)?.trace_distance;
        t.le(td, 0.0, 1e-7, || format!("ψ_{}: reconstruction distance {td}", 2 * m));
        let bells = Qustring::tensor_all(&vec![Qustring::bell(); m])?;
        t.check(is_isotopic(&psi, &bells)?.is_some(), || format!("ψ_{} not isotopic to Bell^{m}", 2 * m));
        let sigma = QubitPermutation::random(2 * m, rng);
        let shuffled = psi.permute(&sigma)?;
        t.check(finest_factorization(&shuffled)?.sind == m, || format!("shuffled ψ_{}", 2 * m));
        let c = pairwise_constructor(2 * m)?;
        t.check(crate::circuit::simulate(&c.circuit, &Qustring::zeros(2 * m)?)?.equal_up_to_phase(&psi, 1e-9), || {
            format!("constructor for ψ_{}", 2 * m)
        });
    }
    Ok(())
}

fn entropy_gap(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    let mut applicable = 0;
    for _ in 0..200 {
        if applicable >= 30 {
            break;
        }
        let k = rng.random_range(2..=3);
        let noise = rng.random_range(0.02..0.3);
        let phi = near_separable_state(rng, 4, k, noise)?;
        let r = entropy_gap_check(&phi, k, &opts())?;
        if let Some(h) = r.holds {
            applicable += 1;
            t.check(h, || format!("k = {k}: lhs {} above bound {} (sdis {})", r.lhs, r.bound, r.sdis));
        }
    }
    Ok(())
}

fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DensityOperator> {
    if rng.random_bool(0.5) {
        Ok(Qustring::random(n, rng)?.to_density())
    } else {
        DensityOperator::random(n, rng)
    }
}

fn data_processing(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..500 {
        let n = rng.random_range(1..=3);
        let anc = rng.random_range(0..=2);
        let size = rng.random_range(0..=20);
        let c = random_circuit(rng, n, anc, size)?;
        let (a, b) = (random_state(rng, n)?, random_state(rng, n)?);
        let gap = data_processing_gap(&c, &a, &b)?;
        t.le(0.0, gap, 1e-9, || format!("{c}: gap {gap}"));
    }
    Ok(())
}

fn close_indist(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for target in [Qustring::ghz(4)?, Qustring::w(3)?, Qustring::random(3, rng)?] {
        let n = target.n();
        let circuits = (0..40)
            .map(|_| {
                let size = rng.random_range(1..=20);
                random_circuit(rng, n, 1, size)
            })
            .collect::<Result<Vec<_>>>()?;
        let r = indistinguishability_check(&target, 2, &circuits, &opts())?;
        t.le(r.max_advantage, r.sdis, 1e-9, || format!("n = {n}: advantage {} above sdis {}", r.max_advantage, r.sdis));
        t.close(r.optimal_gap, r.sdis, 1e-6, || format!("optimal gap {} vs sdis {}", r.optimal_gap, r.sdis));
    }
    Ok(())
}

fn reversal_law(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..10 {
        let n = rng.random_range(2..=4);
        let size = rng.random_range(1..=12);
        let ctor = random_circuit(rng, n, 0, size)?;
        let d = build_reversal_distinguisher(&ctor)?;
        let xi = crate::circuit::simulate(&ctor, &Qustring::zeros(n)?)?;
        let phi = Qustring::random(n, rng)?;
        let p = d.acceptance(None, &phi)?;
        let f = fidelity(&xi, &phi)?;
        t.close(p, f * f, 1e-9, || format!("{ctor}: p {p} vs F² {}", f * f));
    }
    for n in 2..=4 {
        let g = ghz_constructor(n)?;
        let d = build_reversal_distinguisher(&g.circuit)?;
        let r = worst_case_advantage(&d, &g.target, &AdvantageOptions::default())?;
        t.close(r.epsilon_star, 0.5, 1e-3, || format!("GHZ_{n}: ε* {}", r.epsilon_star));
    }
    Ok(())
}

fn swap_law(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..30 {
        let n = rng.random_range(1..=3);
        let rho = random_state(rng, n)?;
        let psi = Qustring::random(n, rng)?;
        let core = swap_test_core(n)?;
        // Core inputs: the payload, then the reference register.
        let joint = psi.to_density().tensor(&rho);
        let p = crate::circuit::acceptance_probability(&core, &joint)?;
        let want = 0.5 + rho.expectation(&psi)? / 2.0;
        t.close(p, want, 1e-9, || format!("n = {n}: p {p} vs {want}"));
    }
    Ok(())
}

fn approx_distinguish(_: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for n in 2..=4 {
        let a = perturbed_ghz_approximator(n)?;
        t.le(a.distance()?, a.epsilon, 0.0, || format!("n = {n}: approximator off by {}", a.distance().unwrap_or(f64::NAN)));
        let d = build_swap_test_distinguisher(&a, n)?;
        let delta = sdis_with(&a.target, 2, &opts())?.value;
        let r = worst_case_advantage(&d, &a.target, &AdvantageOptions::default())?;
        let bound = ((delta - a.epsilon).powi(2) - a.epsilon) / 2.0;
        t.le(bound, r.epsilon_star, 1e-9, || format!("n = {n}: ε* {} below {bound}", r.epsilon_star));
    }
    Ok(())
}

fn permutation_closure(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    let mut found = 0;
    for _ in 0..500 {
        if found == 8 {
            break;
        }
        let n = 3;
        let size = rng.random_range(4..=14);
        let ctor = random_circuit(rng, n, 0, size)?;
        let xi = crate::circuit::simulate(&ctor, &Qustring::zeros(n)?)?;
        if is_k_separable(&xi, 2)? {
            continue;
        }
        found += 1;
        let d = build_reversal_distinguisher(&ctor)?;
        let sigma = QubitPermutation::random(n, rng);
        let dc = conjugate_by_permutation(&d, &sigma)?;
        let opts = AdvantageOptions::default();
        let a = worst_case_advantage(&d, &xi, &opts)?.epsilon_star;
        let b = worst_case_advantage(&dc, &xi.permute(&sigma)?, &opts)?.epsilon_star;
        t.close(a, b, 1e-9, || format!("{ctor}, σ = {sigma}: {a} vs {b}"));
    }
    Ok(())
}

fn advantage_monotone(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..6 {
        let n = rng.random_range(3..=4);
        let size = rng.random_range(1..=15);
        let c = random_circuit(rng, n, 1, size)?;
        let target = Qustring::random(n, rng)?;
        let mut prev = 0.0;
        for k in 2..=n {
            let d = DistinguisherSpec::plain(c.clone(), n, k)?;
            let e = worst_case_advantage(&d, &target, &AdvantageOptions::default())?.epsilon_star;
            t.le(prev, e, 1e-9, || format!("{c}: ε* at k = {k} is {e} < {prev}"));
            prev = e;
        }
    }
    Ok(())
}

fn combining(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    let g = ghz_constructor(3)?;
    let base = build_reversal_distinguisher(&g.circuit)?;
    let pairs = canonical_pairs(3, 2);
    let per: Vec<_> = pairs.iter().map(|p| (p.clone(), base.clone())).collect();
    let comb = combine_distinguishers(&per)?;
    for (s, m) in &pairs {
        let phi = Qustring::random(3, rng)?;
        let a = comb.acceptance(Some((s, m)), &phi)?;
        let b = base.acceptance(None, &phi)?;
        t.close(a, b, 1e-9, || format!("σ = {s}, m = {m:?}: {a} vs {b}"));
    }
    let r = worst_case_advantage(&comb, &g.target, &AdvantageOptions::default())?;
    t.close(r.epsilon_star, 0.5, 1e-6, || format!("combined ε* {}", r.epsilon_star));
    let missing = comb.acceptance(Some((&QubitPermutation::new(vec![2, 1, 0])?, &[2, 1])), &g.target);
    t.check(matches!(missing, Err(Error::MissingPair(_))), || "uncovered pair was accepted".into());
    Ok(())
}

fn povm(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    let g = povm_witness(&Qustring::ghz(3)?, 2, &opts())?;
    t.close(g.gap, 0.5, 1e-4, || format!("GHZ_3 gap {}", g.gap));
    for _ in 0..5 {
        let phi = Qustring::random(3, rng)?;
        let w = povm_witness(&phi, 2, &opts())?;
        t.le(w.sdis_squared, w.gap, 1e-6, || format!("gap {} below sdis² {}", w.gap, w.sdis_squared));
    }
    Ok(())
}

fn prefix_codec(_: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for n in 1..=5 {
        for sigma in QubitPermutation::all(n) {
            for k in 1..=n {
                for p in BlockPartition::enumerate(n, k) {
                    let m = p.sectioning().to_vec();
                    let enc = encode_prefix(&sigma, &m)?;
                    t.check(enc.bits.len() == prefix_length(n, k), || format!("length for n = {n}, k = {k}"));
                    let (s2, m2) = decode_prefix(&enc.bits)?;
                    t.check(s2 == sigma && m2 == m, || format!("round trip of {sigma}, {m:?}"));
                }
            }
        }
    }
    Ok(())
}

fn encoding_roundtrip(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..200 {
        let inputs = rng.random_range(0..=4);
        let anc = rng.random_range(usize::from(inputs == 0)..=3);
        let size = rng.random_range(0..=25);
        let c = random_circuit(rng, inputs, anc, size)?;
        let bits = encode_circuit(&c);
        t.check(bits.len() == encoding_length(&c) && bits.len() >= c.size(), || format!("{c}: length"));
        t.check(decode_circuit(&bits)? == c, || format!("{c}: round trip"));
    }
    Ok(())
}

fn qca_basis(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    let c = basis_overhead(2)? as f64;
    for _ in 0..8 {
        let target = Qustring::random(2, rng)?;
        let e = qca(&target, 3)?;
        t.le(e.value, 4.0 + c, 1e-9, || format!("QCA {} above 2n + c", e.value));
        t.check(e.exhaustive, || "enumeration truncated".into());
    }
    Ok(())
}

fn sqcd_lower(rng: &mut SeededRng, t: &mut Tally) -> Result<()> {
    for _ in 0..4 {
        let target = Qustring::random(2, rng)?;
        let s = sdis_with(&target, 2, &opts())?.value;
        let e = match sqcd(&target, 2, 3) {
            Ok(e) => e,
            Err(Error::Undefined(_)) => continue,
            Err(e) => return Err(e),
        };
        t.check(e.value > -s.log2() + 1e-9, || format!("sQCD {} not above −log₂ sdis = {}", e.value, -s.log2()));
        let p = sqcd_pair(&target, &QubitPermutation::identity(2), &[1, 1], 3)?;
        t.le(p.value, e.value, 1e-9, || format!("pair value {} above {}", p.value, e.value));
    }
    Ok(())
}

fn audit(_: &mut SeededRng, t: &mut Tally) -> Result<()> {
    let r = bound_audit(&EnsembleSpec::named("ghz")?, 2, 2..=3, &AuditOptions::default())?;
    t.check(r.frozen, || "no frozen constants for ghz, k = 2".into());
    t.check(r.all_hold, || "a bound failed".into());
    for (a, b) in [
        (r.fitted.c_approximable, r.used.c_approximable),
        (r.fitted.c_constructible, r.used.c_constructible),
        (r.fitted.c_approximate, r.used.c_approximate),
    ] {
        t.close(a, b, 1e-9, || format!("fitted {a} vs frozen {b}"));
    }
    Ok(())
}
