//! Extremes of a Hermitian form `⟨φ|M|φ⟩` over product states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;

use crate::qstate::{QubitPermutation, Qustring};
use crate::rng::{random_unit_vector, SeededRng};
use crate::separability::{BlockPartition, Layout};
use crate::{Error, Result};

/// `offset + Σ w_r |⟨u_r|φ⟩|²`, an eigen-expansion of `M` around its
/// smallest or largest eigenvalue (whichever leaves fewer terms), with each
/// `u_r` rearranged for one partition.
pub(crate) struct ProductForm {
    offset: f64,
    weights: Vec<f64>,
    terms: Vec<Layout>,
}

const TERM_CUTOFF: f64 = 1e-13;

impl ProductForm {
    pub(crate) fn new(m: &DMatrix<Complex64>, partition: &BlockPartition) -> Result<Self> {
        let d = m.nrows();
        if d != 1usize << partition.n() || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: 1 << partition.n(), actual: d });
        }
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let above = ev.iter().filter(|&&l| l - lo > TERM_CUTOFF).count();
        let below = ev.iter().filter(|&&l| hi - l > TERM_CUTOFF).count();
        let offset = if above <= below { lo } else { hi };
        let mut weights = Vec::new();
        let mut terms = Vec::new();
        for (r, &l) in ev.iter().enumerate() {
            let w = l - offset;
            if w.abs() > TERM_CUTOFF {
                let u: Vec<Complex64> = eig.eigenvectors.column(r).iter().copied().collect();
                let u = Qustring::normalized(u)?.permute(partition.sigma())?.into_amplitudes();
                weights.push(w);
                terms.push(Layout::from_contiguous(u, partition.sectioning()));
            }
        }
        Ok(Self { offset, weights, terms })
    }

    /// `A_j` with `⟨φ|M|φ⟩ = offset + ψ_j† A_j ψ_j` when the other blocks
    /// are held fixed.
    fn block_operator(&self, psis: &[Vec<Complex64>], j: usize, dim: usize) -> DMatrix<Complex64> {
        let mut a = DMatrix::zeros(dim, dim);
        for (w, t) in self.weights.iter().zip(&self.terms) {
            // ⟨u|φ⟩ = ⟨ψ_j| v⟩* with v the contraction of u against the rest.
            let v = nalgebra::DVector::from_vec(t.contract(psis, j));
            a += (&v * v.adjoint()) * Complex64::new(*w, 0.0);
        }
        a
    }

    pub(crate) fn value(&self, psis: &[Vec<Complex64>]) -> f64 {
        let prod = product_vector(psis);
        self.offset
            + self
                .weights
                .iter()
                .zip(&self.terms)
                .map(|(w, t)| {
                    let ip: Complex64 = t.amps.iter().zip(&prod).map(|(u, p)| u.conj() * p).sum();
                    w * ip.norm_sqr()
                })
                .sum::<f64>()
    }

    fn dims(&self) -> Option<&[usize]> {
        self.terms.first().map(|t| t.dims.as_slice())
    }
}

/// `ψ_1 ⊗ … ⊗ ψ_k` in contiguous layout.
pub(crate) fn product_vector(psis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for p in psis {
        out = out.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
    }
    out
}

/// Largest and smallest values found for a form over product states of one
/// partition, with their block factors.
#[derive(Clone, Debug)]
pub struct ProductExtremes {
    pub max: f64,
    pub max_blocks: Vec<Qustring>,
    pub min: f64,
    pub min_blocks: Vec<Qustring>,
    pub converged: bool,
}

impl ProductExtremes {
    /// The full product state for a list of blocks, back in original order.
    pub fn state(partition: &BlockPartition, blocks: &[Qustring]) -> Result<Qustring> {
        Qustring::tensor_all(blocks)?.permute(&partition.sigma().inverse())
    }
}

pub(crate) struct Search<'a> {
    pub form: &'a ProductForm,
    pub dims: Vec<usize>,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Search<'_> {
    /// Alternating block-eigenvector ascent (or descent).
    pub(crate) fn run(
        &self,
        mut psis: Vec<Vec<Complex64>>,
        maximize: bool,
        rng: &mut SeededRng,
    ) -> (f64, Vec<Vec<Complex64>>, bool) {
        if self.form.terms.is_empty() {
            return (self.form.offset, psis, true);
        }
        let k = self.dims.len();
        let mut prev = self.form.value(&psis);
        for _ in 0..self.max_sweeps.max(1) {
            for j in 0..k {
                let a = self.form.block_operator(&psis, j, self.dims[j]);
                if a.norm() < 1e-15 {
                    continue;
                }
                let eig = a.symmetric_eigen();
                let pick = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .fold(None::<(usize, f64)>, |acc, (i, &l)| match acc {
                        Some((_, b)) if (maximize && b >= l) || (!maximize && b <= l) => acc,
                        _ => Some((i, l)),
                    })
                    .expect("nonempty");
                let v: Vec<Complex64> = eig.eigenvectors.column(pick.0).iter().copied().collect();
                let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                psis[j] = if nrm > 1e-300 {
                    v.into_iter().map(|z| z / nrm).collect()
                } else {
                    random_unit_vector(rng, self.dims[j])
                };
            }
            let cur = self.form.value(&psis);
            let gain = if maximize { cur - prev } else { prev - cur };
            if gain < self.tol {
                return (cur, psis, true);
            }
            prev = cur;
        }
        (prev, psis, false)
    }
}

/// Maximizes and minimizes `⟨φ|M|φ⟩` over product states `φ` across
/// `partition`, using alternating block updates from the leading (trailing)
/// eigenvector's block unfoldings, any `seeds` given as block lists, and
/// `restarts` random starts.
pub fn extreme_product_values(
    m: &DMatrix<Complex64>,
    partition: &BlockPartition,
    seeds: &[Vec<Qustring>],
    restarts: usize,
    seed: u64,
) -> Result<ProductExtremes> {
    let form = ProductForm::new(m, partition)?;
    extremes_of(&form, partition, seeds, restarts, seed, 1e-13, 2000)
}

pub(crate) fn extremes_of(
    form: &ProductForm,
    partition: &BlockPartition,
    seeds: &[Vec<Qustring>],
    restarts: usize,
    seed: u64,
    tol: f64,
    max_sweeps: usize,
) -> Result<ProductExtremes> {
    let dims: Vec<usize> = partition.sectioning().iter().map(|&s| 1usize << s).collect();
    if let Some(d) = form.dims() {
        debug_assert_eq!(d, dims.as_slice());
    }
    let mut rng = SeededRng::seed_from_u64(seed);
    let search = Search { form, dims: dims.clone(), tol, max_sweeps };
    let mut starts: Vec<Vec<Vec<Complex64>>> = Vec::new();
    for s in seeds {
        if s.len() == dims.len() && s.iter().zip(&dims).all(|(q, &d)| q.dim() == d) {
            starts.push(s.iter().map(|q| q.amplitudes().to_vec()).collect());
        }
    }
    // Unfoldings of the dominant terms.
    let dominant = |want_positive: bool| {
        form.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| (**w > 0.0) == want_positive)
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| form.terms[i].svd_start())
    };
    type Best = Option<(f64, Vec<Vec<Complex64>>, bool)>;
    let mut best_max: Best = None;
    let mut best_min: Best = None;
    for maximize in [true, false] {
        let mut inits = starts.clone();
        if let Some(s) = dominant(maximize) {
            inits.push(s);
        }
        for _ in 0..restarts {
            inits.push(dims.iter().map(|&d| random_unit_vector(&mut rng, d)).collect());
        }
        if inits.is_empty() {
            inits.push(dims.iter().map(|&d| random_unit_vector(&mut rng, d)).collect());
        }
        let slot = if maximize { &mut best_max } else { &mut best_min };
        for init in inits {
            let r = search.run(init, maximize, &mut rng);
            let better = match slot {
                None => true,
                Some((v, _, _)) => (maximize && r.0 > *v) || (!maximize && r.0 < *v),
            };
            if better {
                *slot = Some(r);
            }
        }
    }
    let to_blocks = |psis: Vec<Vec<Complex64>>| -> Result<Vec<Qustring>> {
        psis.into_iter().map(Qustring::normalized).collect()
    };
    let (max, maxb, c1) = best_max.expect("at least one start");
    let (min, minb, c2) = best_min.expect("at least one start");
    Ok(ProductExtremes {
        max,
        max_blocks: to_blocks(maxb)?,
        min,
        min_blocks: to_blocks(minb)?,
        converged: c1 && c2,
    })
}

/// A product state on the path from `from` to `to` (block lists) where the
/// form equals `level`, found by bisection. Blocks move one at a time along
/// great circles, so the form is continuous along the path.
pub(crate) fn crossing_point(
    form: &ProductForm,
    from: &[Qustring],
    to: &[Qustring],
    level: f64,
) -> Vec<Vec<Complex64>> {
    let a: Vec<Vec<Complex64>> = from.iter().map(|q| q.amplitudes().to_vec()).collect();
    let b: Vec<Vec<Complex64>> = to.iter().map(|q| q.amplitudes().to_vec()).collect();
    let at = |stage: usize, theta: f64| -> Vec<Vec<Complex64>> {
        let mut cur: Vec<Vec<Complex64>> =
            (0..a.len()).map(|i| if i < stage { b[i].clone() } else { a[i].clone() }).collect();
        if stage < a.len() {
            cur[stage] = geodesic(&a[stage], &b[stage], theta);
        }
        cur
    };
    let sign = |v: f64| v - level;
    let mut prev = at(0, 0.0);
    let mut prev_val = sign(form.value(&prev));
    if prev_val.abs() < 1e-15 {
        return prev;
    }
    for stage in 0..a.len() {
        let end = at(stage, 1.0);
        let end_val = sign(form.value(&end));
        if end_val == 0.0 || (end_val > 0.0) != (prev_val > 0.0) {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let v = sign(form.value(&at(stage, mid)));
                if (v > 0.0) == (prev_val > 0.0) && v != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let lo_state = at(stage, lo);
            let hi_state = at(stage, hi);
            return if sign(form.value(&lo_state)).abs() <= sign(form.value(&hi_state)).abs() {
                lo_state
            } else {
                hi_state
            };
        }
        prev = end;
        prev_val = end_val;
    }
    prev
}

/// Point at fraction `t` of the great circle from `a` to the ray of `b`.
fn geodesic(a: &[Complex64], b: &[Complex64], t: f64) -> Vec<Complex64> {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if ip.norm() > 1e-300 { ip.conj() / ip.norm() } else { Complex64::new(1.0, 0.0) };
    let b: Vec<Complex64> = b.iter().map(|z| z * phase).collect();
    let c = ip.norm().min(1.0);
    let mut perp: Vec<Complex64> = b.iter().zip(a).map(|(y, x)| y - x * c).collect();
    let pn = perp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if pn < 1e-14 {
        return a.to_vec();
    }
    perp.iter_mut().for_each(|z| *z /= pn);
    let theta = t * c.acos();
    a.iter().zip(&perp).map(|(x, p)| x * theta.cos() + p * theta.sin()).collect()
}

/// Contiguous block vectors to a full product state in original order.
pub(crate) fn blocks_to_state(partition: &BlockPartition, psis: &[Vec<Complex64>]) -> Result<Qustring> {
    let inv: QubitPermutation = partition.sigma().inverse();
    Qustring::normalized(product_vector(psis))?.permute(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rank_one_form_gives_product_overlap() {
        let ghz = Qustring::ghz(3).unwrap();
        let v = nalgebra::DVector::from_column_slice(ghz.amplitudes());
        let m = &v * v.adjoint();
        let p = BlockPartition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let e = extreme_product_values(&m, &p, &[], 4, 1).unwrap();
        assert_abs_diff_eq!(e.max, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(e.min, 0.0, epsilon = 1e-9);
        let st = ProductExtremes::state(&p, &e.max_blocks).unwrap();
        assert_abs_diff_eq!(st.overlap(&ghz).unwrap().powi(2), e.max, epsilon = 1e-9);
    }

    #[test]
    fn crossing_point_hits_the_level() {
        let mut rng = crate::rng::seeded(3);
        let c = crate::circuit::random_circuit(&mut rng, 3, 1, 12).unwrap();
        let m = crate::circuit::acceptance_form(&c, &[]).unwrap();
        let p = BlockPartition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        let form = ProductForm::new(&m, &p).unwrap();
        let e = extremes_of(&form, &p, &[], 4, 2, 1e-13, 2000).unwrap();
        if e.max - e.min > 1e-6 {
            let level = 0.5 * (e.max + e.min);
            let x = crossing_point(&form, &e.min_blocks, &e.max_blocks, level);
            assert_abs_diff_eq!(form.value(&x), level, epsilon = 1e-10);
            let st = blocks_to_state(&p, &x).unwrap();
            let direct = crate::circuit::acceptance_probability(&c, &st).unwrap();
            assert_abs_diff_eq!(direct, level, epsilon = 1e-9);
        }
    }
}
