use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BlockPartition;
use crate::qstate::Qustring;
use crate::rng::{random_unit_vector, seeded, SeededRng, DEFAULT_SEED};
use crate::{Error, Result};

/// Controls for the alternating product-state optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapOptions {
    pub restarts: usize,
    /// Stop once a full sweep gains less than this much overlap.
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        Self { restarts: 16, tol: 1e-10, max_sweeps: 2000, seed: DEFAULT_SEED }
    }
}

/// Largest overlap found with a product state across a partition.
#[derive(Clone, Debug)]
pub struct ProductOverlap {
    pub overlap: f64,
    /// One unit vector per block, on the block's qubits in ascending order.
    pub witness: Vec<Qustring>,
    /// The best restart met the tolerance before the sweep cap.
    pub converged: bool,
}

/// Maximizes `|⟨φ| ⊗ᵢ ψᵢ⟩|` over unit vectors `ψᵢ` on the partition's blocks.
///
/// Each sweep replaces every block in turn by the normalized contraction of
/// `φ` against the other blocks, which is that block's exact optimum given
/// the rest. The first restart starts from the leading singular vectors of
/// each block's unfolding, later ones from Haar-random vectors.
pub fn best_product_overlap(
    phi: &Qustring,
    partition: &BlockPartition,
    opts: &OverlapOptions,
) -> Result<ProductOverlap> {
    if partition.n() != phi.n() {
        return Err(Error::DimensionMismatch { expected: phi.n(), actual: partition.n() });
    }
    if partition.k() == 1 {
        return Ok(ProductOverlap { overlap: 1.0, witness: vec![phi.clone()], converged: true });
    }
    let layout = Layout::new(phi, partition)?;
    let mut rng = seeded(opts.seed);
    let mut best: Option<(f64, Vec<Vec<Complex64>>, bool)> = None;
    for restart in 0..opts.restarts.max(1) {
        let init = if restart == 0 {
            layout.svd_start()
        } else {
            layout.dims.iter().map(|&d| random_unit_vector(&mut rng, d)).collect()
        };
        let (ov, psis, converged) = layout.optimize(init, opts, &mut rng);
        if best.as_ref().is_none_or(|b| ov > b.0) {
            best = Some((ov, psis, converged));
        }
        if ov >= 1.0 - 1e-14 {
            break;
        }
    }
    let (overlap, psis, converged) = best.expect("at least one restart");
    let witness = psis.into_iter().map(Qustring::normalized).collect::<Result<Vec<_>>>()?;
    Ok(ProductOverlap { overlap: overlap.min(1.0), witness, converged })
}

/// A vector rearranged so the partition's blocks are contiguous, plus the
/// per-block bit layout.
pub(crate) struct Layout {
    pub(crate) amps: Vec<Complex64>,
    pub(crate) dims: Vec<usize>,
    shifts: Vec<usize>,
}

impl Layout {
    pub(crate) fn new(phi: &Qustring, partition: &BlockPartition) -> Result<Self> {
        Ok(Self::from_contiguous(phi.permute(partition.sigma())?.into_amplitudes(), partition.sectioning()))
    }

    pub(crate) fn from_contiguous(amps: Vec<Complex64>, sectioning: &[usize]) -> Self {
        let m = sectioning;
        let shifts = (0..m.len()).map(|i| m[i + 1..].iter().sum()).collect();
        Self { amps, dims: m.iter().map(|&s| 1usize << s).collect(), shifts }
    }

    #[inline]
    fn digit(&self, x: usize, i: usize) -> usize {
        (x >> self.shifts[i]) & (self.dims[i] - 1)
    }

    /// `⟨⊗_{i≠j} ψᵢ | φ⟩` as a vector on block `j`.
    pub(crate) fn contract(&self, psis: &[Vec<Complex64>], j: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dims[j]];
        for (x, &a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut w = a;
            for (i, psi) in psis.iter().enumerate() {
                if i != j {
                    w *= psi[self.digit(x, i)].conj();
                }
            }
            v[self.digit(x, j)] += w;
        }
        v
    }

    fn optimize(
        &self,
        mut psis: Vec<Vec<Complex64>>,
        opts: &OverlapOptions,
        rng: &mut SeededRng,
    ) -> (f64, Vec<Vec<Complex64>>, bool) {
        let k = self.dims.len();
        let mut prev = -1.0;
        let mut ov = 0.0;
        for _ in 0..opts.max_sweeps.max(1) {
            for j in 0..k {
                let v = self.contract(&psis, j);
                let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nrm < 1e-14 {
                    psis[j] = random_unit_vector(rng, self.dims[j]);
                    ov = 0.0;
                } else {
                    psis[j] = v.into_iter().map(|z| z / nrm).collect();
                    ov = nrm;
                }
            }
            if ov - prev < opts.tol && ov > 0.0 {
                return (ov, psis, true);
            }
            prev = ov;
        }
        (ov, psis, false)
    }

    /// Leading left singular vector of each block's unfolding.
    pub(crate) fn svd_start(&self) -> Vec<Vec<Complex64>> {
        let total = self.amps.len();
        (0..self.dims.len())
            .map(|j| {
                let d = self.dims[j];
                let rest = total / d;
                let mut m = DMatrix::<Complex64>::zeros(d, rest);
                let low = (1usize << self.shifts[j]) - 1;
                for (x, &a) in self.amps.iter().enumerate() {
                    let r = ((x >> (self.shifts[j] + d.trailing_zeros() as usize)) << self.shifts[j]) | (x & low);
                    m[(self.digit(x, j), r)] = a;
                }
                leading_left_singular_vector(&m)
            })
            .collect()
    }
}

pub(crate) fn leading_left_singular_vector(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let u = if m.nrows() <= m.ncols() {
        let g = m * m.adjoint();
        top_eigenvector(&g)
    } else {
        let g = m.adjoint() * m;
        let w = nalgebra::DVector::from_vec(top_eigenvector(&g));
        (m * w).iter().copied().collect()
    };
    let nrm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm < 1e-300 {
        let mut e = vec![Complex64::new(0.0, 0.0); m.nrows()];
        e[0] = Complex64::new(1.0, 0.0);
        return e;
    }
    u.into_iter().map(|z| z / nrm).collect()
}

pub(crate) fn top_eigenvector(g: &DMatrix<Complex64>) -> Vec<Complex64> {
    let h = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let (imax, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
    eig.eigenvectors.column(imax).iter().copied().collect()
}
