use rand::seq::SliceRandom;
use rand::Rng;

use crate::qstate::QubitPermutation;
use crate::{Error, Result};

/// A partition of the qubits `0..n` into `k` nonempty blocks, together with
/// the canonical permutation that lays the blocks out contiguously.
///
/// Blocks keep the order they were given in; each block is sorted. `sigma`
/// lists the blocks one after another, so `apply_permutation(sigma, φ)` is
/// the contiguous arrangement and `sectioning` gives the block sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    sigma: QubitPermutation,
    sectioning: Vec<usize>,
}

impl BlockPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || blocks.is_empty() {
            return Err(Error::InvalidArgument("partition needs n ≥ 1 and k ≥ 1".into()));
        }
        let mut seen = vec![false; n];
        let mut blocks = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            b.sort_unstable();
            for &q in b.iter() {
                if q >= n || std::mem::replace(&mut seen[q], true) {
                    return Err(Error::InvalidQubits(format!("{blocks:?} does not partition 0..{n}")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidQubits(format!("{blocks:?} does not cover 0..{n}")));
        }
        let sigma = QubitPermutation::new(blocks.concat())?;
        let sectioning = blocks.iter().map(Vec::len).collect();
        Ok(Self { n, blocks, sigma, sectioning })
    }

    /// The partition into consecutive runs of `sigma` of lengths `m`.
    pub fn from_sigma_sectioning(sigma: &QubitPermutation, m: &[usize]) -> Result<Self> {
        if m.iter().sum::<usize>() != sigma.n() || m.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "sectioning {m:?} does not split {} qubits",
                sigma.n()
            )));
        }
        let mut start = 0;
        let blocks = m
            .iter()
            .map(|&len| {
                let b = sigma.as_slice()[start..start + len].to_vec();
                start += len;
                b
            })
            .collect();
        Self::new(sigma.n(), blocks)
    }

    pub fn single(n: usize) -> Result<Self> {
        Self::new(n, vec![(0..n).collect()])
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|q| vec![q]).collect())
    }

    /// Decodes a restricted growth string (`labels[0] = 0`, each label at
    /// most one more than the running maximum).
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (q, &l) in labels.iter().enumerate() {
            blocks[l].push(q);
        }
        Self::new(labels.len(), blocks)
    }

    /// Every partition of `0..n` into exactly `k` blocks, blocks ordered by
    /// their smallest element. The count is the Stirling number `S(n, k)`.
    pub fn enumerate(n: usize, k: usize) -> Vec<Self> {
        let mut out = Vec::new();
        if k == 0 || k > n {
            return out;
        }
        let mut labels = vec![0usize; n];
        fn rec(labels: &mut [usize], i: usize, used: usize, k: usize, out: &mut Vec<BlockPartition>) {
            let n = labels.len();
            if n - i < k - used {
                return;
            }
            if i == n {
                out.push(BlockPartition::from_labels(labels).expect("valid growth string"));
                return;
            }
            for l in 0..used.min(k) {
                labels[i] = l;
                rec(labels, i + 1, used, k, out);
            }
            if used < k {
                labels[i] = used;
                rec(labels, i + 1, used + 1, k, out);
            }
        }
        rec(&mut labels, 0, 0, k, &mut out);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn sigma(&self) -> &QubitPermutation {
        &self.sigma
    }

    pub fn sectioning(&self) -> &[usize] {
        &self.sectioning
    }

    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|q| q + 1).collect()).collect()
    }

    /// The same partition with blocks ordered by smallest element.
    pub fn canonical(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort_by_key(|b| b[0]);
        Self::new(self.n, blocks).expect("already valid")
    }

    /// Block label of every qubit under the canonical block order.
    pub fn labels(&self) -> Vec<usize> {
        let canon = self.canonical();
        let mut labels = vec![0; self.n];
        for (j, b) in canon.blocks.iter().enumerate() {
            for &q in b {
                labels[q] = j;
            }
        }
        labels
    }

    /// A stable integer key identifying the set partition.
    pub fn key(&self) -> u64 {
        self.labels()
            .iter()
            .fold(self.n as u64, |acc, &l| acc.wrapping_mul(31).wrapping_add(l as u64 + 1))
    }

    /// Whether the set partitions agree, ignoring block order.
    pub fn same_sets(&self, other: &Self) -> bool {
        self.n == other.n && self.labels() == other.labels()
    }

    /// A uniformly random `(σ, m)` pair whose sectioning realizes this
    /// partition: block order and order within each block are shuffled.
    pub fn random_achieving<R: Rng + ?Sized>(&self, rng: &mut R) -> (QubitPermutation, Vec<usize>) {
        let mut blocks = self.blocks.clone();
        blocks.shuffle(rng);
        for b in &mut blocks {
            b.shuffle(rng);
        }
        let m = blocks.iter().map(Vec::len).collect();
        (QubitPermutation::new(blocks.concat()).expect("bijection"), m)
    }

    /// Merges blocks `i` and `j` (`i ≠ j`).
    pub fn merge(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.k() || j >= self.k() {
            return Err(Error::InvalidArgument(format!("cannot merge blocks {i} and {j}")));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let mut blocks = self.blocks.clone();
        let moved = blocks.remove(hi);
        blocks[lo].extend(moved);
        Self::new(self.n, blocks)
    }
}

impl std::fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .blocks_one_based()
            .iter()
            .map(|b| b.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{{{}}}", parts.join("|"))
    }
}

/// Stirling number of the second kind.
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}
