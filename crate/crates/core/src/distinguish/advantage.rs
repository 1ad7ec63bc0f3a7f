//! Certified worst-case advantage of a distinguisher against product states.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::form::{blocks_to_state, crossing_point, extremes_of, ProductForm};
use super::spec::{DistinguisherSpec, PrefixPair};
use crate::qstate::{QubitPermutation, Qustring};
use crate::rng::{derive_seed, SeededRng, DEFAULT_SEED};
use crate::separability::{best_product_overlap, BlockPartition, OverlapOptions};
use crate::{Error, Result};

/// Largest payload `worst_case_advantage` accepts.
pub const ADVANTAGE_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageOptions {
    /// Random starts per optimizer direction, on top of the structured ones.
    pub restarts: usize,
    /// Extra random `σ` per partition for prefix-accepting distinguishers.
    pub random_sigmas: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for AdvantageOptions {
    fn default() -> Self {
        Self { restarts: 8, random_sigmas: 3, seed: DEFAULT_SEED, tol: 1e-13, max_sweeps: 2000 }
    }
}

impl AdvantageOptions {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_random_sigmas(mut self, r: usize) -> Self {
        self.random_sigmas = r;
        self
    }
}

/// One certified branch: a partition with the prefix it was checked under.
#[derive(Clone, Debug)]
pub struct PairAdvantage {
    pub partition: BlockPartition,
    /// `None` when the distinguisher takes no prefix.
    pub pair: Option<PrefixPair>,
    pub p_target: f64,
    /// Range of acceptance found over product states on the partition.
    pub p_min: f64,
    pub p_max: f64,
    pub epsilon: f64,
    /// Product state attaining `epsilon`.
    pub witness: Qustring,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct AdvantageReport {
    pub n: usize,
    pub k: usize,
    /// Acceptance on the target in the worst branch.
    pub p_target: f64,
    pub epsilon_star: f64,
    pub worst_partition: BlockPartition,
    pub worst_pair: Option<PrefixPair>,
    pub worst_state: Qustring,
    pub restarts: usize,
    /// Every branch converged.
    pub converged: bool,
    pub branches: Vec<PairAdvantage>,
}

impl AdvantageReport {
    pub fn worst(&self) -> &PairAdvantage {
        self.branches
            .iter()
            .find(|b| b.epsilon == self.epsilon_star && b.partition == self.worst_partition && b.pair == self.worst_pair)
            .expect("worst branch is recorded")
    }
}

struct Branch {
    partition: BlockPartition,
    pair: Option<PrefixPair>,
}

fn branches(d: &DistinguisherSpec, opts: &AdvantageOptions) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    if !d.accepts_prefix {
        for p in BlockPartition::enumerate(d.n, d.k) {
            out.push(Branch { partition: p, pair: None });
        }
        return Ok(out);
    }
    if let Some(cov) = &d.covered {
        // A combined distinguisher is only defined on the pairs it covers.
        for (s, m) in cov {
            let partition = BlockPartition::from_sigma_sectioning(s, m)?;
            out.push(Branch { partition, pair: Some((s.clone(), m.clone())) });
        }
        return Ok(out);
    }
    for p in BlockPartition::enumerate(d.n, d.k) {
        let mut seen: Vec<PrefixPair> = vec![(p.sigma().clone(), p.sectioning().to_vec())];
        let mut rng = SeededRng::seed_from_u64(derive_seed(opts.seed ^ 0x5157_4d41, p.key()));
        for _ in 0..opts.random_sigmas {
            let pair = p.random_achieving(&mut rng);
            if !seen.contains(&pair) {
                seen.push(pair);
            }
        }
        for pair in seen {
            out.push(Branch { partition: p.clone(), pair: Some(pair) });
        }
    }
    Ok(out)
}

/// Minimizes `|p(target) − p(φ)|` over product states `φ` on every
/// `k`-block partition of the payload, under the canonical `σ` of each
/// partition and `random_sigmas` further achieving `σ` when the
/// distinguisher reads a prefix. Both extremes of `p` over each partition
/// are searched; when `p(target)` lies between them the branch value is 0
/// and the witness is a product state found on the path between the two
/// extreme states.
///
/// The reported minimum runs over converged branches; if none converged
/// it runs over all of them and `converged` is false.
pub fn worst_case_advantage(
    d: &DistinguisherSpec,
    target: &Qustring,
    opts: &AdvantageOptions,
) -> Result<AdvantageReport> {
    if target.n() != d.n {
        return Err(Error::DimensionMismatch { expected: d.n, actual: target.n() });
    }
    if d.n > ADVANTAGE_LIMIT {
        return Err(Error::Capability(format!(
            "advantage certification supports payloads up to {ADVANTAGE_LIMIT} qubits, got {}",
            d.n
        )));
    }
    let list = branches(d, opts)?;
    // Without a prefix the form does not depend on the branch.
    let shared = if d.accepts_prefix { None } else { Some(d.form(None)?) };
    let results: Vec<Result<PairAdvantage>> = list
        .par_iter()
        .enumerate()
        .map(|(idx, b)| {
            let seed = derive_seed(opts.seed, b.partition.key().wrapping_add(idx as u64));
            let pair_ref = b.pair.as_ref().map(|(s, m)| (s, m.as_slice()));
            let m = match &shared {
                Some(m) => m.clone(),
                None => d.form(pair_ref)?,
            };
            let p_target = d.acceptance(pair_ref, target)?;
            certify_branch(&m, p_target, target, &b.partition, b.pair.clone(), seed, opts)
        })
        .collect();
    let branches: Vec<PairAdvantage> = results.into_iter().collect::<Result<_>>()?;
    report_from_branches(d.n, d.k, branches, opts.restarts)
}

/// The minimum over branches, preferring converged ones.
pub(crate) fn report_from_branches(
    n: usize,
    k: usize,
    branches: Vec<PairAdvantage>,
    restarts: usize,
) -> Result<AdvantageReport> {
    let all_converged = branches.iter().all(|b| b.converged);
    let any_converged = branches.iter().any(|b| b.converged);
    let worst = branches
        .iter()
        .enumerate()
        .filter(|(_, b)| b.converged || !any_converged)
        .min_by(|(i, a), (j, b)| a.epsilon.total_cmp(&b.epsilon).then(i.cmp(j)))
        .map(|(_, b)| b.clone())
        .ok_or_else(|| Error::InvalidArgument("no partitions to certify".into()))?;
    Ok(AdvantageReport {
        n,
        k,
        p_target: worst.p_target,
        epsilon_star: worst.epsilon,
        worst_partition: worst.partition,
        worst_pair: worst.pair,
        worst_state: worst.witness,
        restarts,
        converged: all_converged,
        branches,
    })
}

/// Extremes of `M` over product states on `partition`, compared with
/// `p_target`.
pub(crate) fn certify_branch(
    m: &nalgebra::DMatrix<num_complex::Complex64>,
    p_target: f64,
    target: &Qustring,
    partition: &BlockPartition,
    pair: Option<PrefixPair>,
    seed: u64,
    opts: &AdvantageOptions,
) -> Result<PairAdvantage> {
    let form = ProductForm::new(m, partition)?;
    let nearest =
        best_product_overlap(target, partition, &OverlapOptions { restarts: 4, seed, ..Default::default() })?;
    let seeds = vec![nearest.witness];
    let ext = extremes_of(&form, partition, &seeds, opts.restarts, seed, opts.tol, opts.max_sweeps)?;
    let (epsilon, psis) = if p_target > ext.max {
        (p_target - ext.max, blocks_of(&ext.max_blocks))
    } else if p_target < ext.min {
        (ext.min - p_target, blocks_of(&ext.min_blocks))
    } else {
        (0.0, crossing_point(&form, &ext.min_blocks, &ext.max_blocks, p_target))
    };
    let witness = blocks_to_state(partition, &psis)?;
    Ok(PairAdvantage {
        partition: partition.clone(),
        pair,
        p_target,
        p_min: ext.min,
        p_max: ext.max,
        epsilon: epsilon.clamp(0.0, 1.0),
        witness,
        converged: ext.converged,
    })
}

fn blocks_of(blocks: &[Qustring]) -> Vec<Vec<num_complex::Complex64>> {
    blocks.iter().map(|q| q.amplitudes().to_vec()).collect()
}

/// Every `(σ, m)` whose blocks are `k`-block partitions of `n` qubits, one
/// canonical `σ` per partition.
pub fn canonical_pairs(n: usize, k: usize) -> Vec<(QubitPermutation, Vec<usize>)> {
    BlockPartition::enumerate(n, k)
        .into_iter()
        .map(|p| (p.sigma().clone(), p.sectioning().to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ghz_constructor, QuantumCircuit};
    use crate::distinguish::{build_reversal_distinguisher, combine_distinguishers};
    use approx::assert_abs_diff_eq;

    #[test]
    fn reversal_of_ghz4_gives_one_half() {
        let c = ghz_constructor(4).unwrap();
        let d = build_reversal_distinguisher(&c.circuit).unwrap();
        let r = worst_case_advantage(&d, &c.target, &AdvantageOptions::default()).unwrap();
        assert_abs_diff_eq!(r.epsilon_star, 0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(r.p_target, 1.0, epsilon = 1e-12);
        assert!(r.converged);
        let td = crate::qstate::trace_distance(&r.worst_state, &c.target).unwrap();
        assert!(r.epsilon_star <= td + 1e-9);
    }

    #[test]
    fn constant_circuit_has_no_advantage() {
        let c = QuantumCircuit::new(3, 1).unwrap().with_output(3).unwrap();
        let d = DistinguisherSpec::plain(c, 3, 2).unwrap();
        let r = worst_case_advantage(&d, &Qustring::ghz(3).unwrap(), &AdvantageOptions::default()).unwrap();
        assert_eq!(r.epsilon_star, 0.0);
    }

    #[test]
    fn straddling_target_reports_zero_with_matching_witness() {
        // H on qubit 0 then read it, so p ranges over [0, 1] on products.
        let mut c = QuantumCircuit::new(2, 0).unwrap();
        c.push(crate::circuit::Gate::H(0)).unwrap();
        let d = DistinguisherSpec::plain(c, 2, 2).unwrap();
        let bell = Qustring::bell();
        let r = worst_case_advantage(&d, &bell, &AdvantageOptions::default()).unwrap();
        assert_abs_diff_eq!(r.epsilon_star, 0.0, epsilon = 1e-12);
        let p = d.acceptance(None, &r.worst_state).unwrap();
        assert_abs_diff_eq!(p, r.p_target, epsilon = 1e-9);
    }

    #[test]
    fn combined_takes_the_minimum_branch() {
        let g = ghz_constructor(3).unwrap();
        let base = build_reversal_distinguisher(&g.circuit).unwrap();
        let pairs = canonical_pairs(3, 2);
        let per: Vec<_> = pairs.iter().map(|pr| (pr.clone(), base.clone())).collect();
        let comb = combine_distinguishers(&per).unwrap();
        let r = worst_case_advantage(&comb, &g.target, &AdvantageOptions::default()).unwrap();
        assert_abs_diff_eq!(r.epsilon_star, 0.5, epsilon = 1e-9);
        assert_eq!(r.branches.len(), 3);
    }
}
