use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{gather_indices, normalize_subset, QubitPermutation, Qustring};
use crate::{Error, Result};

/// A density operator on `n` qubits: Hermitian, positive semidefinite and of
/// unit trace (each within `1e-9`).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub const TOLERANCE: f64 = 1e-9;

    /// Validates `matrix` as a density operator.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensity(format!(
                "{}x{} is not a 2^n square matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_err = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > Self::TOLERANCE {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm_err:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > Self::TOLERANCE || tr.im.abs() > Self::TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let out = Self { n: dim.trailing_zeros() as usize, matrix };
        let min = out.raw_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -Self::TOLERANCE {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(out)
    }

    pub(crate) fn from_matrix_unchecked(n: usize, matrix: DMatrix<Complex64>) -> Self {
        Self { n, matrix }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > 14 {
            return Err(Error::InvalidArgument(format!("maximally mixed state with n = {n}")));
        }
        let d = 1usize << n;
        Ok(Self { n, matrix: DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0) })
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &Qustring)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidDensity("empty mixture".into()))?;
        let n = first.1.n();
        let d = first.1.dim();
        let mut m = DMatrix::zeros(d, d);
        let mut total = 0.0;
        for (p, psi) in parts {
            if psi.n() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: psi.n() });
            }
            if *p < 0.0 {
                return Err(Error::InvalidDensity(format!("negative weight {p}")));
            }
            total += p;
            let v = DVector::from_column_slice(psi.amplitudes());
            m += (&v * v.adjoint()) * Complex64::new(*p, 0.0);
        }
        if (total - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::InvalidDensity(format!("weights sum to {total}")));
        }
        Ok(Self { n, matrix: m })
    }

    /// A random full-rank state `G G† / Tr(G G†)` with Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > 10 {
            return Err(Error::InvalidArgument(format!("random density with n = {n}")));
        }
        let d = 1usize << n;
        let g = DMatrix::from_vec(d, d, crate::rng::random_unit_vector(rng, d * d));
        let m = &g * g.adjoint();
        let tr = m.trace();
        Ok(Self { n, matrix: m / tr })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr ρ² = Σ |ρ_ij|².
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - Self::TOLERANCE
    }

    fn raw_eigenvalues(&self) -> DVector<f64> {
        hermitian(&self.matrix).symmetric_eigenvalues()
    }

    /// Eigenvalues in ascending order, clipped to `[0, 1]`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.raw_eigenvalues().iter().map(|l| l.clamp(0.0, 1.0)).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Partial trace keeping the (sorted) qubits in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidQubits("empty keep set".into()));
        }
        let keep = normalize_subset(self.n, keep)?;
        if keep.len() == self.n {
            return Ok(self.clone());
        }
        let rest: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let ka = gather_indices(self.n, &keep);
        let ra = gather_indices(self.n, &rest);
        let (dk, dr) = (1usize << keep.len(), 1usize << rest.len());
        let mut index = vec![0usize; dk * dr];
        for x in 0..self.dim() {
            index[ka[x] * dr + ra[x]] = x;
        }
        let mut out = DMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                out[(a, b)] = (0..dr).map(|r| self.matrix[(index[a * dr + r], index[b * dr + r])]).sum();
            }
        }
        Ok(Self { n: keep.len(), matrix: out })
    }

    /// `σ ρ σ†` for the qubit permutation `σ`.
    pub fn permute(&self, sigma: &QubitPermutation) -> Result<Self> {
        if sigma.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: sigma.n() });
        }
        let n = self.n;
        let map: Vec<usize> = (0..self.dim())
            .map(|x| {
                (0..n).fold(0usize, |acc, i| {
                    (acc << 1) | usize::from(x & super::qubit_mask(n, sigma.image(i)) != 0)
                })
            })
            .collect();
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for x in 0..self.dim() {
            for y in 0..self.dim() {
                out[(map[x], map[y])] = self.matrix[(x, y)];
            }
        }
        Ok(Self { n, matrix: out })
    }

    /// `ρ ⊗ τ`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self { n: self.n + other.n, matrix: self.matrix.kronecker(&other.matrix) }
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &Qustring) -> Result<f64> {
        if psi.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: psi.n() });
        }
        let v = DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }
}

impl From<&Qustring> for DensityOperator {
    fn from(psi: &Qustring) -> Self {
        psi.to_density()
    }
}

/// Symmetrizes away rounding noise before an eigen-solve.
pub(crate) fn hermitian(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> Vec<(f64, Vec<Complex64>)> {
    let eig = hermitian(m).symmetric_eigen();
    let mut out: Vec<(f64, Vec<Complex64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).iter().copied().collect()))
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

/// Principal square root of a PSD Hermitian matrix.
pub(crate) fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = hermitian(m).symmetric_eigen();
    let d = eig
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn validation() {
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)],
        );
        assert!(DensityOperator::new(bad).is_err());
        let nonherm = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        );
        assert!(DensityOperator::new(nonherm).is_err());
        let ok = DensityOperator::maximally_mixed(2).unwrap();
        assert!(DensityOperator::new(ok.matrix().clone()).is_ok());
    }

    #[test]
    fn partial_trace_keep_all_is_identity() {
        let mut rng = crate::rng::seeded(1);
        let rho = DensityOperator::random(3, &mut rng).unwrap();
        assert_eq!(rho.partial_trace(&[0, 1, 2]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_matches_pure_reduction() {
        let mut rng = crate::rng::seeded(2);
        let psi = Qustring::random(4, &mut rng).unwrap();
        let a = psi.to_density().partial_trace(&[1, 3]).unwrap();
        let b = psi.reduced(&[1, 3]).unwrap();
        assert_abs_diff_eq!((a.matrix() - b.matrix()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.trace(), 1.0, epsilon = 1e-12);
        assert!(a.eigenvalues()[0] >= 0.0);
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let r = Qustring::bell().to_density().partial_trace(&[0]).unwrap();
        let mm = DensityOperator::maximally_mixed(1).unwrap();
        assert_abs_diff_eq!((r.matrix() - mm.matrix()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn permute_matches_pure_permutation() {
        let mut rng = crate::rng::seeded(4);
        let psi = Qustring::random(3, &mut rng).unwrap();
        let sigma = QubitPermutation::from_one_based(&[3, 1, 2]).unwrap();
        let a = psi.to_density().permute(&sigma).unwrap();
        let b = psi.permute(&sigma).unwrap().to_density();
        assert_abs_diff_eq!((a.matrix() - b.matrix()).norm(), 0.0, epsilon = 1e-14);
    }
}
