//! Size-bounded approximating and separability-distinguishing complexities,
//! with the circuit encoding length standing in for description length.

use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::enumerate::{minimize, Shape, DEFAULT_BUDGET, ENUMERATION_WIDTH_LIMIT};
use crate::circuit::{
    acceptance_form, basis_constructor, encoding_length, simulate, simulate_from_zero, QuantumCircuit,
};
use crate::distinguish::{certify_branch, report_from_branches, AdvantageOptions, PrefixPair};
use crate::qstate::{QubitPermutation, Qustring};
use crate::rng::derive_seed;
use crate::separability::{best_product_overlap, is_k_separable, BlockPartition, OverlapOptions};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexityKind {
    #[serde(rename = "QCA")]
    Qca,
    #[serde(rename = "sQCD")]
    Sqcd,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub kind: ComplexityKind,
    /// Bits: `encoding_length(witness) − log₂ F²` or `− log₂ ε*`.
    pub value: f64,
    pub witness: QuantumCircuit,
    pub witness_length: usize,
    /// Fidelity of the witness output (QCA) or its certified advantage.
    pub fidelity_or_advantage: f64,
    pub size_bound: usize,
    pub k: Option<usize>,
    /// Set for the fixed-pair variant.
    pub pair: Option<PrefixPair>,
    /// The search covered every circuit within the size bound.
    pub exhaustive: bool,
    /// Circuits visited by the enumeration.
    pub visited: u64,
    /// Encoding length at which the budget stopped the enumeration.
    pub truncated_at: Option<usize>,
}

impl ComplexityEstimate {
    fn found(
        kind: ComplexityKind,
        out: super::enumerate::SearchOutcome<f64>,
        size_bound: usize,
        none: impl FnOnce() -> Error,
    ) -> Result<Self> {
        let (exhaustive, visited, truncated_at) = (out.exhaustive, out.visited, out.truncated_at);
        let found = out.best.ok_or_else(none)?;
        let mut e = Self::new(kind, found.circuit, found.data, size_bound, exhaustive, visited);
        e.truncated_at = truncated_at;
        Ok(e)
    }

    fn new(
        kind: ComplexityKind,
        witness: QuantumCircuit,
        metric: f64,
        size_bound: usize,
        exhaustive: bool,
        visited: u128,
    ) -> Self {
        let witness_length = encoding_length(&witness);
        let penalty = match kind {
            ComplexityKind::Qca => -(metric * metric).log2(),
            ComplexityKind::Sqcd => -metric.log2(),
        };
        Self {
            kind,
            value: witness_length as f64 + penalty.max(0.0),
            witness,
            witness_length,
            fidelity_or_advantage: metric,
            size_bound,
            k: None,
            pair: None,
            exhaustive,
            visited: visited.min(u64::MAX as u128) as u64,
            truncated_at: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Most circuits one search may visit.
    pub budget: u128,
    /// Extra ancilla wires beyond what the output needs.
    pub max_extra_ancillas: usize,
    pub advantage: AdvantageOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            max_extra_ancillas: 1,
            advantage: AdvantageOptions::default().with_restarts(4),
        }
    }
}

fn shapes(inputs: usize, min_ancillas: usize, extra: usize, outputs: bool) -> Result<Vec<(Shape, Vec<usize>)>> {
    let list: Vec<(Shape, Vec<usize>)> = (min_ancillas..=min_ancillas + extra)
        .map(|a| Shape::new(inputs, a))
        .filter(|s| s.width() <= ENUMERATION_WIDTH_LIMIT)
        .map(|s| (s, if outputs { (0..s.width()).collect() } else { vec![0] }))
        .collect();
    if list.is_empty() {
        return Err(Error::Capability(format!(
            "circuit enumeration is limited to {ENUMERATION_WIDTH_LIMIT} wires, needs {}",
            inputs + min_ancillas
        )));
    }
    Ok(list)
}

/// `F(ξ, ρ)²` where `ρ` is the first `n` wires of `out`.
fn fidelity_sq(target: &Qustring, out: &Qustring) -> Result<f64> {
    let n = target.n();
    if out.n() == n {
        return Ok(target.overlap(out)?.powi(2));
    }
    let keep: Vec<usize> = (0..n).collect();
    out.reduced(&keep)?.expectation(target)
}

const NEGLIGIBLE: f64 = 1e-12;

pub fn qca(target: &Qustring, size_bound: usize) -> Result<ComplexityEstimate> {
    qca_with(target, size_bound, &SearchOptions::default())
}

/// Minimizes `encoding_length(D) − log₂ F(ξ, ρ_D)²` over circuits with at
/// most `size_bound` gates, where `ρ_D` is the first `n` wires of `D|0…0⟩`.
pub fn qca_with(target: &Qustring, size_bound: usize, opts: &SearchOptions) -> Result<ComplexityEstimate> {
    let shapes = shapes(target.n(), 0, opts.max_extra_ancillas, false)?;
    let out = minimize(&shapes, size_bound, opts.budget, |c| {
        let f2 = fidelity_sq(target, &simulate_from_zero(c)?)?;
        Ok((f2 > NEGLIGIBLE).then(|| (-f2.log2().min(0.0), f2.sqrt())))
    })?;
    ComplexityEstimate::found(ComplexityKind::Qca, out, size_bound, || {
        Error::Undefined("no circuit overlaps the target".into())
    })
}

/// The conditional form: `D` runs on `|aux⟩|0…0⟩`. The condition itself is
/// not charged.
pub fn qca_given(target: &Qustring, aux: &Qustring, size_bound: usize) -> Result<ComplexityEstimate> {
    let opts = SearchOptions::default();
    let min_anc = target.n().saturating_sub(aux.n());
    let shapes = shapes(aux.n(), min_anc, opts.max_extra_ancillas, false)?;
    let out = minimize(&shapes, size_bound, opts.budget, |c| {
        let f2 = fidelity_sq(target, &simulate(c, aux)?)?;
        Ok((f2 > NEGLIGIBLE).then(|| (-f2.log2().min(0.0), f2.sqrt())))
    })?;
    ComplexityEstimate::found(ComplexityKind::Qca, out, size_bound, || {
        Error::Undefined("no circuit overlaps the target".into())
    })
}

/// The basis state `|x⟩` of largest overlap with the target (fewest ones,
/// then smallest index, on ties), prepared by X gates. Since
/// `max_x |⟨ξ|x⟩|² ≥ 2^{−n}`, its value is at most `encoding_length + n`.
pub fn trivial_upper_bound(target: &Qustring) -> Result<ComplexityEstimate> {
    let n = target.n();
    let amps = target.amplitudes();
    let best = amps.iter().map(|a| a.norm_sqr()).fold(0.0f64, f64::max);
    let x = (0..amps.len())
        .filter(|&x| amps[x].norm_sqr() >= best * (1.0 - 1e-12))
        .min_by_key(|&x| (x.count_ones(), x))
        .expect("nonempty");
    let bits: Vec<bool> = (0..n).map(|q| (x >> (n - 1 - q)) & 1 == 1).collect();
    let c = basis_constructor(&bits)?.circuit;
    let size = c.size();
    Ok(ComplexityEstimate::new(ComplexityKind::Qca, c, amps[x].norm(), size, false, 0))
}

/// `c` in `QCA ≤ 2n + c`: the encoding length of the basis circuit for
/// `|1^n⟩`, less `n`.
pub fn basis_overhead(n: usize) -> Result<usize> {
    let c = basis_constructor(&vec![true; n])?.circuit;
    Ok(encoding_length(&c) - n)
}

/// Exact-key cache of certified advantages by acceptance form.
#[derive(Default)]
struct FormCache(Mutex<HashMap<Vec<i64>, f64>>);

impl FormCache {
    fn key(m: &DMatrix<Complex64>) -> Vec<i64> {
        m.iter().flat_map(|z| [(z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64]).collect()
    }
}

/// Certified `ε*` of a prefix-idle distinguisher with form `m` against
/// products on `partitions`, or 0 when the target's acceptance is matched
/// by a basis state bracket (product states are connected, so some product
/// state then hits it exactly).
fn certified_epsilon(
    m: &DMatrix<Complex64>,
    target: &Qustring,
    partitions: &[BlockPartition],
    opts: &AdvantageOptions,
) -> Result<f64> {
    let v = nalgebra::DVector::from_column_slice(target.amplitudes());
    let p_t = (v.adjoint() * m * &v)[(0, 0)].re;
    let diag = m.diagonal();
    let lo = diag.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let hi = diag.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if lo <= p_t && p_t <= hi {
        return Ok(0.0);
    }
    let branches = partitions
        .iter()
        .enumerate()
        .map(|(i, p)| certify_branch(m, p_t, target, p, None, derive_seed(opts.seed, p.key() ^ i as u64), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(report_from_branches(target.n(), partitions[0].k(), branches, opts.restarts)?.epsilon_star)
}

fn sqcd_search(
    target: &Qustring,
    partitions: &[BlockPartition],
    size_bound: usize,
    opts: &SearchOptions,
) -> Result<(super::enumerate::SearchOutcome<f64>, usize)> {
    let shapes = shapes(target.n(), 0, opts.max_extra_ancillas, true)?;
    let cache = FormCache::default();
    let out = minimize(&shapes, size_bound, opts.budget, |c| {
        let m = acceptance_form(c, &[])?;
        let key = FormCache::key(&m);
        let cached = cache.0.lock().expect("cache lock").get(&key).copied();
        let eps = match cached {
            Some(e) => e,
            None => {
                let e = certified_epsilon(&m, target, partitions, &opts.advantage)?;
                cache.0.lock().expect("cache lock").insert(key, e);
                e
            }
        };
        Ok((eps > NEGLIGIBLE).then(|| (-eps.log2(), eps)))
    })?;
    let distinct = cache.0.lock().expect("cache lock").len();
    Ok((out, distinct))
}

pub fn sqcd(target: &Qustring, k: usize, size_bound: usize) -> Result<ComplexityEstimate> {
    sqcd_with(target, k, size_bound, &SearchOptions::default())
}

/// Minimizes `encoding_length(D) − log₂ ε*(D)` over distinguishers whose
/// gates act on the payload and at most one ancilla; the prefix wires are
/// left idle, so `ε*` is the same for every `(σ, m)` and is certified over
/// all `k`-block partitions. `D` is charged as the payload circuit; lifting
/// it past the prefix is a fixed relabeling. Circuits with no advantage are
/// skipped. The advantage comes from an optimizer, so the value is an upper
/// bound.
pub fn sqcd_with(target: &Qustring, k: usize, size_bound: usize, opts: &SearchOptions) -> Result<ComplexityEstimate> {
    if is_k_separable(target, k)? {
        return Err(Error::Undefined(format!("target is {k}-separable, so no circuit has positive advantage")));
    }
    let partitions = BlockPartition::enumerate(target.n(), k);
    let (out, _) = sqcd_search(target, &partitions, size_bound, opts)?;
    let mut e = ComplexityEstimate::found(ComplexityKind::Sqcd, out, size_bound, || {
        Error::Undefined(format!("no circuit with at most {size_bound} gates has positive advantage"))
    })?;
    e.k = Some(k);
    Ok(e)
}

/// As [`sqcd`], certified only against products on the one partition
/// achieved by `(σ, m)`.
pub fn sqcd_pair(
    target: &Qustring,
    sigma: &QubitPermutation,
    m: &[usize],
    size_bound: usize,
) -> Result<ComplexityEstimate> {
    let opts = SearchOptions::default();
    let partition = BlockPartition::from_sigma_sectioning(sigma, m)?;
    let ov = best_product_overlap(target, &partition, &OverlapOptions::default())?;
    if ov.overlap >= 1.0 - 1e-9 {
        return Err(Error::Undefined(format!("target is a product across {partition}")));
    }
    let (out, _) = sqcd_search(target, std::slice::from_ref(&partition), size_bound, &opts)?;
    let mut e = ComplexityEstimate::found(ComplexityKind::Sqcd, out, size_bound, || {
        Error::Undefined(format!("no circuit with at most {size_bound} gates has positive advantage"))
    })?;
    e.k = Some(m.len());
    e.pair = Some((sigma.clone(), m.to_vec()));
    Ok(e)
}

/// `encoding_length(D) − log₂ ε` for a circuit certified at advantage `ε`.
pub fn transfer_value(d: &QuantumCircuit, epsilon: f64) -> Result<f64> {
    if epsilon <= 0.0 || epsilon > 1.0 {
        return Err(Error::Undefined(format!("advantage {epsilon} outside (0, 1]")));
    }
    Ok(encoding_length(d) as f64 - epsilon.log2())
}
