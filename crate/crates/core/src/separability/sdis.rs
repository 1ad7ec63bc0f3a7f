use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_product_overlap, finest_factorization, BlockPartition, OverlapOptions};
use crate::qstate::{average_entropy, binary_entropy_eta, Qustring};
use crate::rng::{derive_seed, DEFAULT_SEED};
use crate::{Error, Result};

/// Largest qubit count accepted by [`sdis`].
pub const SDIS_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdisOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for SdisOptions {
    fn default() -> Self {
        let o = OverlapOptions::default();
        Self { restarts: o.restarts, tol: o.tol, max_sweeps: o.max_sweeps, seed: DEFAULT_SEED }
    }
}

impl SdisOptions {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn overlap_options(&self, partition: &BlockPartition) -> OverlapOptions {
        OverlapOptions {
            restarts: self.restarts,
            tol: self.tol,
            max_sweeps: self.max_sweeps,
            seed: derive_seed(self.seed, partition.key()),
        }
    }
}

/// Distance to the nearest `k`-separable state.
#[derive(Clone, Debug)]
pub struct SdisResult {
    pub k: usize,
    /// Trace distance `√(1 − overlap²)`.
    pub value: f64,
    pub overlap: f64,
    /// The product state attaining `value`, in the original qubit order and
    /// phase-aligned with the input.
    pub nearest: Qustring,
    pub partition: BlockPartition,
    /// Block factors of `nearest`, in partition block order.
    pub factors: Vec<Qustring>,
    pub converged: bool,
    pub partitions_checked: usize,
}

pub fn sdis(phi: &Qustring, k: usize) -> Result<SdisResult> {
    sdis_with(phi, k, &SdisOptions::default())
}

/// Minimizes the product-state distance over every partition into `k` blocks.
///
/// Each partition is optimized with its own seed derived from the partition,
/// and the best one is selected with ties going to the earliest partition, so
/// the result does not depend on the number of worker threads.
pub fn sdis_with(phi: &Qustring, k: usize, opts: &SdisOptions) -> Result<SdisResult> {
    let n = phi.n();
    if n > SDIS_LIMIT {
        return Err(Error::Capability(format!(
            "sdis enumerates all set partitions and is limited to n ≤ {SDIS_LIMIT} (got {n})"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let report = finest_factorization(phi)?;
    if report.sind >= k {
        let mut part = report.finest_partition.clone();
        let mut factors = report.factors.clone();
        while part.k() > k {
            let last = factors.pop().expect("k ≥ 1");
            let prev = factors.pop().expect("k ≥ 2");
            let (a, b) = (&part.blocks()[part.k() - 2], &part.blocks()[part.k() - 1]);
            let mut merged_qubits: Vec<usize> = a.iter().chain(b).copied().collect();
            let joint = prev.tensor(&last);
            let order: Vec<usize> = a.iter().chain(b).copied().collect();
            merged_qubits.sort_unstable();
            let sigma: Vec<usize> =
                merged_qubits.iter().map(|q| order.iter().position(|p| p == q).unwrap()).collect();
            factors.push(joint.permute(&crate::qstate::QubitPermutation::new(sigma)?)?);
            part = part.merge(part.k() - 2, part.k() - 1)?;
        }
        return Ok(SdisResult {
            k,
            value: 0.0,
            overlap: 1.0,
            nearest: phi.clone(),
            partition: part,
            factors,
            converged: true,
            partitions_checked: 0,
        });
    }
    let partitions = BlockPartition::enumerate(n, k);
    let results = partitions
        .par_iter()
        .map(|p| best_product_overlap(phi, p, &opts.overlap_options(p)))
        .collect::<Result<Vec<_>>>()?;
    let (best_i, best) = results
        .iter()
        .enumerate()
        .fold(None::<(usize, &super::ProductOverlap)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.overlap >= r.overlap => acc,
            _ => Some((i, r)),
        })
        .expect("S(n, k) ≥ 1");
    let partition = partitions[best_i].clone();
    let product = Qustring::tensor_all(&best.witness)?;
    let nearest = product.permute(&partition.sigma().inverse())?.aligned_to(phi)?;
    let overlap = best.overlap;
    Ok(SdisResult {
        k,
        value: (1.0 - overlap * overlap).max(0.0).sqrt(),
        overlap,
        nearest,
        partition,
        factors: best.witness.clone(),
        converged: best.converged,
        partitions_checked: partitions.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Closeness {
    Close,
    Far,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub class: Closeness,
    pub sdis: f64,
    pub delta: f64,
    pub margin: f64,
}

/// Close when the `k`-separability distance is at most `delta`.
pub fn classify_closeness(
    phi: &Qustring,
    k: usize,
    delta: f64,
    opts: &SdisOptions,
) -> Result<ClosenessReport> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside [0, 1]")));
    }
    let s = sdis_with(phi, k, opts)?.value;
    let class = if s <= delta { Closeness::Close } else { Closeness::Far };
    Ok(ClosenessReport { class, sdis: s, delta, margin: (s - delta).abs() })
}

/// Compares the average-entropy change to the nearest `k`-separable state
/// against `γ·n + η(γ)` where `γ` is the separability distance. Only
/// meaningful for `γ ≤ 1/e`; `holds` is `None` otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyGapReport {
    pub sdis: f64,
    pub lhs: f64,
    pub bound: f64,
    pub holds: Option<bool>,
}

impl EntropyGapReport {
    pub fn applicable(&self) -> bool {
        self.holds.is_some()
    }
}

pub fn entropy_gap_check(phi: &Qustring, k: usize, opts: &SdisOptions) -> Result<EntropyGapReport> {
    let s = sdis_with(phi, k, opts)?;
    let lhs = (average_entropy(phi)? - average_entropy(&s.nearest)?).abs();
    let bound = s.value * phi.n() as f64 + binary_entropy_eta(s.value);
    let applicable = s.value <= (-1f64).exp();
    Ok(EntropyGapReport {
        sdis: s.value,
        lhs,
        bound,
        holds: applicable.then_some(lhs <= bound + 1e-9),
    })
}
