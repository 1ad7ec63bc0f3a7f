//! Upper-bound checks on what any circuit can achieve, and a sampling
//! cross-check of exact acceptance probabilities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::distr::weighted::WeightedIndex;
use serde::{Deserialize, Serialize};

use super::form::{extremes_of, ProductExtremes, ProductForm};
use crate::circuit::{acceptance_probability, QuantumCircuit};
use crate::qstate::{trace_distance, Qustring, StateRef};
use crate::rng::seeded;
use crate::separability::{sdis_with, BlockPartition, SdisOptions};
use crate::{Error, Result};

/// Slack allowed on the advantage cap.
pub const CAP_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct IndistinguishabilityReport {
    pub k: usize,
    pub sdis: f64,
    /// The nearest `k`-separable state found by `sdis`.
    pub nearest: Qustring,
    /// `|p(target) − p(nearest)|` for each circuit, in input order.
    pub advantages: Vec<f64>,
    pub max_advantage: f64,
    /// Circuits whose advantage exceeds `sdis + CAP_SLACK`.
    pub violations: Vec<usize>,
    /// Advantage of the best two-outcome measurement between target and
    /// nearest state; equals `sdis` for pure states.
    pub optimal_gap: f64,
    pub holds: bool,
}

/// Runs every circuit on the target and on its nearest `k`-separable state.
/// No circuit can beat the trace distance between the two, which is `sdis`.
pub fn indistinguishability_check(
    target: &Qustring,
    k: usize,
    circuits: &[QuantumCircuit],
    opts: &SdisOptions,
) -> Result<IndistinguishabilityReport> {
    let s = sdis_with(target, k, opts)?;
    let mut advantages = Vec::with_capacity(circuits.len());
    for c in circuits {
        if c.inputs() != target.n() {
            return Err(Error::DimensionMismatch { expected: target.n(), actual: c.inputs() });
        }
        let a = acceptance_probability(c, target)?;
        let b = acceptance_probability(c, &s.nearest)?;
        advantages.push((a - b).abs());
    }
    let max_advantage = advantages.iter().copied().fold(0.0, f64::max);
    let violations: Vec<usize> =
        advantages.iter().enumerate().filter(|(_, &a)| a > s.value + CAP_SLACK).map(|(i, _)| i).collect();
    let optimal_gap = optimal_measurement_gap(target, &s.nearest)?;
    Ok(IndistinguishabilityReport {
        k,
        sdis: s.value,
        holds: violations.is_empty() && (optimal_gap - s.value).abs() <= 1e-6,
        nearest: s.nearest,
        advantages,
        max_advantage,
        violations,
        optimal_gap,
    })
}

/// `max_P Tr(P(ρ − τ))` over `0 ≤ P ≤ I`: the sum of the positive
/// eigenvalues of `ρ − τ`.
pub fn optimal_measurement_gap<'a, 'b>(
    rho: impl Into<StateRef<'a>>,
    tau: impl Into<StateRef<'b>>,
) -> Result<f64> {
    let (rho, tau) = (rho.into(), tau.into());
    if rho.n() != tau.n() {
        return Err(Error::DimensionMismatch { expected: rho.n(), actual: tau.n() });
    }
    let diff = rho.density().matrix() - tau.density().matrix();
    let diff = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(diff.symmetric_eigenvalues().iter().filter(|&&l| l > 0.0).sum())
}

/// `trace_distance(ρ, τ) − |p_C(ρ) − p_C(τ)|`, never below `−CAP_SLACK`
/// for a valid circuit.
pub fn data_processing_gap<'a, 'b>(
    c: &QuantumCircuit,
    rho: impl Into<StateRef<'a>>,
    tau: impl Into<StateRef<'b>>,
) -> Result<f64> {
    let (rho, tau) = (rho.into(), tau.into());
    let adv = (acceptance_probability(c, rho)? - acceptance_probability(c, tau)?).abs();
    Ok(trace_distance(rho, tau)? - adv)
}

#[derive(Clone, Debug)]
pub struct PovmWitness {
    /// `W = I − |ξ⟩⟨ξ|`.
    pub operator: DMatrix<Complex64>,
    /// Smallest `⟨φ|W|φ⟩` found over `k`-separable `φ`.
    pub gap: f64,
    /// The product state attaining `gap`.
    pub state: Qustring,
    pub partition: BlockPartition,
    pub sdis_squared: f64,
    /// `gap ≥ sdis² − 1e-6`.
    pub consistent: bool,
}

/// The projector complement of the target and its worst-case expectation
/// gap. The gap is found by minimizing the form over product states on every
/// partition, separately from the overlap optimizer behind `sdis`.
pub fn povm_witness(target: &Qustring, k: usize, opts: &SdisOptions) -> Result<PovmWitness> {
    let s = sdis_with(target, k, opts)?;
    let d = target.dim();
    let v = nalgebra::DVector::from_column_slice(target.amplitudes());
    let operator = DMatrix::<Complex64>::identity(d, d) - &v * v.adjoint();
    let mut best: Option<(f64, Qustring, BlockPartition)> = None;
    for (i, p) in BlockPartition::enumerate(target.n(), k).into_iter().enumerate() {
        let (gap, state) = if p.k() == 1 {
            (0.0, target.clone())
        } else {
            let form = ProductForm::new(&operator, &p)?;
            let seed = crate::rng::derive_seed(opts.seed, p.key() ^ i as u64);
            let e = extremes_of(&form, &p, &[], opts.restarts.max(1), seed, 1e-14, opts.max_sweeps)?;
            (e.min.max(0.0), ProductExtremes::state(&p, &e.min_blocks)?)
        };
        if best.as_ref().is_none_or(|b| gap < b.0) {
            best = Some((gap, state, p));
        }
    }
    let (gap, state, partition) = best.ok_or_else(|| Error::InvalidArgument("no partitions".into()))?;
    let sdis_squared = s.value * s.value;
    Ok(PovmWitness { operator, gap, state, partition, sdis_squared, consistent: gap >= sdis_squared - 1e-6 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub estimate: f64,
    pub exact: f64,
    /// Hoeffding half-width: `|estimate − exact| ≤ epsilon` with
    /// probability at least `1 − delta`.
    pub epsilon: f64,
    pub delta: f64,
    pub within: bool,
}

/// Samples `⌈ln(2/δ) / (2ε²)⌉` runs of the circuit. A mixed input is
/// sampled from its eigen-ensemble, then each run is a single output shot.
pub fn estimate_acceptance<'a>(
    c: &QuantumCircuit,
    input: impl Into<StateRef<'a>>,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < ε, δ < 1, got ε = {epsilon}, δ = {delta}")));
    }
    let input = input.into();
    let samples = ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as usize;
    let (weights, probs): (Vec<f64>, Vec<f64>) = match input {
        StateRef::Pure(s) => (vec![1.0], vec![acceptance_probability(c, s)?]),
        StateRef::Mixed(r) => {
            let eig = crate::qstate::hermitian_eigen(r.matrix());
            let mut w = Vec::new();
            let mut p = Vec::new();
            for (l, vec) in eig {
                if l > 1e-15 {
                    w.push(l);
                    p.push(acceptance_probability(c, &Qustring::normalized(vec)?)?);
                }
            }
            (w, p)
        }
    };
    let exact: f64 = weights.iter().zip(&probs).map(|(w, p)| w * p).sum::<f64>() / weights.iter().sum::<f64>();
    let mut rng = seeded(seed);
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let shots: Vec<Bernoulli> = probs
        .iter()
        .map(|p| Bernoulli::new(p.clamp(0.0, 1.0)).expect("clamped"))
        .collect();
    let hits = (0..samples).filter(|_| shots[pick.sample(&mut rng)].sample(&mut rng)).count();
    let estimate = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        samples,
        estimate,
        exact,
        epsilon,
        delta,
        within: (estimate - exact).abs() <= epsilon,
    })
}
