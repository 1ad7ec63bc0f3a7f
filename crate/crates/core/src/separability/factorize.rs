use nalgebra::DMatrix;
use num_complex::Complex64;

use super::BlockPartition;
use crate::qstate::Qustring;
use crate::{Error, Result};

/// Largest qubit count accepted by [`finest_factorization`].
pub const FACTORIZE_LIMIT: usize = 14;

/// A subset splits off when the purity of its reduced state is at least
/// `1 − PURITY_TOLERANCE`.
pub const PURITY_TOLERANCE: f64 = 1e-9;

const BORDERLINE: f64 = 1e-6;
// Squared residual of the largest-column rank-one fit above which a cut can
// not have purity defect ≤ 1e-6 for any block of at most 7 qubits.
const QUICK_REJECT: f64 = 1e-2;

/// Finest tensor factorization of a pure state.
#[derive(Clone, Debug)]
pub struct SeparabilityReport {
    pub sind: usize,
    /// Blocks ordered by smallest qubit.
    pub finest_partition: BlockPartition,
    /// One factor per block, on that block's qubits in ascending order.
    pub factors: Vec<Qustring>,
    /// `1 − Tr ρ_B²` of each block's reduced state.
    pub residual: Vec<f64>,
    /// Some tested cut had a purity defect in `[1e-9, 1e-6]`.
    pub borderline: bool,
}

impl SeparabilityReport {
    /// The product of the factors with qubits returned to their original
    /// positions.
    pub fn reconstruct(&self) -> Result<Qustring> {
        let product = Qustring::tensor_all(&self.factors)?;
        product.permute(&self.finest_partition.sigma().inverse())
    }
}

/// Computes the finest partition of the qubits such that the state is a
/// product across blocks.
///
/// The smallest splitting subset of the remaining qubits is always an
/// irreducible block, so the search tries subsets in increasing size, splits
/// the first hit off and continues on the remainder.
// `min_size` only changes right before the search restarts.
#[allow(clippy::mut_range_bound)]
pub fn finest_factorization(phi: &Qustring) -> Result<SeparabilityReport> {
    let n = phi.n();
    if n > FACTORIZE_LIMIT {
        return Err(Error::Capability(format!(
            "factorization scans subset purities and is limited to n ≤ {FACTORIZE_LIMIT} (got {n})"
        )));
    }
    let mut borderline = false;
    let mut found: Vec<(Vec<usize>, Qustring)> = Vec::new();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut state = phi.clone();
    let mut min_size = 1;
    'outer: loop {
        let r = labels.len();
        for size in min_size..=r / 2 {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                let (split, defect) = try_split(&state, &subset)?;
                borderline |= (PURITY_TOLERANCE..=BORDERLINE).contains(&defect);
                if let Some((a, b)) = split {
                    found.push((subset.iter().map(|&i| labels[i]).collect(), a));
                    labels = (0..r).filter(|i| !subset.contains(i)).map(|i| labels[i]).collect();
                    state = b;
                    min_size = size;
                    continue 'outer;
                }
                if !next_combination(&mut subset, r) {
                    break;
                }
            }
        }
        found.push((labels.clone(), state));
        break;
    }
    found.sort_by_key(|(b, _)| b[0]);
    let blocks: Vec<Vec<usize>> = found.iter().map(|(b, _)| b.clone()).collect();
    let factors: Vec<Qustring> = found.into_iter().map(|(_, f)| f).collect();
    let partition = BlockPartition::new(n, blocks)?;
    let residual = partition
        .blocks()
        .iter()
        .map(|b| Ok((1.0 - phi.purity(b)?).max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparabilityReport { sind: partition.k(), finest_partition: partition, factors, residual, borderline })
}

/// Whether `phi` is `k`-separable, i.e. its separability index is at least `k`.
pub fn is_k_separable(phi: &Qustring, k: usize) -> Result<bool> {
    if k == 0 || k > phi.n() {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={}", phi.n())));
    }
    if k == 1 {
        return Ok(true);
    }
    Ok(finest_factorization(phi)?.sind >= k)
}

/// The subset-by-rest amplitude matrix with the (small) subset indexing
/// columns.
fn cut_matrix(state: &Qustring, subset: &[usize]) -> Result<DMatrix<Complex64>> {
    Ok(state.split_matrix(subset)?.transpose())
}

/// Squared residual of approximating `m` by projecting every column onto the
/// largest one, and that column's index.
fn column_fit(m: &DMatrix<Complex64>) -> (f64, usize) {
    let (best, _) = m
        .column_iter()
        .map(|c| c.norm_squared())
        .enumerate()
        .fold((0, -1.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    let u = m.column(best).normalize();
    let resid = m.column_iter().map(|c| (c - &u * u.dotc(&c)).norm_squared()).sum();
    (resid, best)
}

/// Splits `state` into (subset factor, remainder factor) when the subset's
/// reduced purity passes the threshold, also returning the purity defect
/// (reported as 1 when the quick rank-one test already rules the cut out).
type Split = (Option<(Qustring, Qustring)>, f64);

fn try_split(state: &Qustring, subset: &[usize]) -> Result<Split> {
    let m = cut_matrix(state, subset)?;
    let (resid, best) = column_fit(&m);
    if resid > QUICK_REJECT {
        return Ok((None, 1.0));
    }
    let defect = (1.0 - state.purity(subset)?).max(0.0);
    if defect >= PURITY_TOLERANCE {
        return Ok((None, defect));
    }
    // m[(rest, sub)] ≈ b[rest] a[sub]: take the largest column as b.
    let b = m.column(best).normalize();
    let a: Vec<Complex64> = m.column_iter().map(|c| b.dotc(&c)).collect();
    let a = Qustring::normalized(a)?;
    let b = Qustring::normalized(b.iter().copied().collect())?;
    Ok((Some((a, b)), defect))
}

/// Advances a sorted `k`-combination of `0..r` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], r: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < r - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
