//! Pure states (qustrings), density operators and the distance and entropy
//! functionals defined on them.
//!
//! Basis convention: for an `n`-qubit state, qubit `q` (0-based) is bit
//! `n - 1 - q` of the basis index, so qubit 0 is the most significant bit and
//! amplitudes are listed in lexicographic order of basis strings.

mod density;
mod entropy;
mod isotopy;
mod metrics;
mod permutation;

pub use density::DensityOperator;
pub(crate) use density::hermitian_eigen;
pub use entropy::{average_entropy, binary_entropy_eta, von_neumann_entropy};
pub use isotopy::{is_isotopic, ISOTOPY_LIMIT};
pub use metrics::{fidelity, metrics, trace_distance, Metrics, StateRef};
pub use permutation::QubitPermutation;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result};

/// Bit mask of qubit `q` in an `n`-qubit basis index.
#[inline]
pub(crate) fn qubit_mask(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Validates and sorts a qubit subset of `0..n`.
pub(crate) fn normalize_subset(n: usize, qubits: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qubits.len() {
        return Err(Error::InvalidQubits(format!("duplicate qubit in {qubits:?}")));
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidQubits(format!("qubit {q} out of range for n = {n}")));
    }
    Ok(sorted)
}

/// For every basis index of an `n`-qubit register, the index restricted to
/// `subset` (bits gathered in subset order, first element most significant).
pub(crate) fn gather_indices(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..1usize << n)
        .map(|x| {
            subset.iter().fold(0usize, |acc, &q| {
                (acc << 1) | usize::from(x & qubit_mask(n, q) != 0)
            })
        })
        .collect()
}

/// A normalized pure state of `n ≥ 1` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Qustring {
    n: usize,
    amps: Vec<Complex64>,
}

impl Qustring {
    pub const NORM_TOLERANCE: f64 = 1e-9;

    /// Builds a state, requiring `| ‖a‖² − 1 | ≤ 1e-9`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr.sqrt()));
        }
        Ok(Self { n, amps: amplitudes })
    }

    /// Builds a state from an arbitrary nonzero vector by rescaling it.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, amps: amplitudes.into_iter().map(|z| z / norm).collect() })
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    /// The computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize || index >= 1usize << n {
            return Err(Error::InvalidArgument(format!("basis index {index} for n = {n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Basis state from a string of `0`/`1` characters, e.g. `"0101"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let mut index = 0usize;
        for c in bits.chars() {
            index = (index << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::InvalidArgument(format!("bad bit string {bits:?}"))),
                };
        }
        Self::basis(bits.len(), index)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// `(|0^n⟩ + |1^n⟩)/√2`.
    pub fn ghz(n: usize) -> Result<Self> {
        Self::ghz_with_sign(n, false)
    }

    /// `(|0^n⟩ + (−1)^{odd}|1^n⟩)/√2`.
    pub fn ghz_with_sign(n: usize, odd: bool) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        s.amps[0] = Complex64::new(h, 0.0);
        let last = s.amps.len() - 1;
        s.amps[last] = Complex64::new(if odd { -h } else { h }, 0.0);
        Ok(s)
    }

    pub fn bell() -> Self {
        Self::ghz(2).expect("two qubits")
    }

    /// The W state: uniform superposition of the weight-one basis strings.
    pub fn w(n: usize) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        let a = 1.0 / (n as f64).sqrt();
        for q in 0..n {
            s.amps[qubit_mask(n, q)] = Complex64::new(a, 0.0);
        }
        Ok(s)
    }

    /// `2^{−m/2} Σ_{x ∈ {0,1}^m} |x x⟩` on `2m` qubits: qubit `i` is paired
    /// with qubit `m + i`.
    pub fn pairwise(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("pairwise state needs m ≥ 1".into()));
        }
        let n = 2 * m;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let a = (0.5f64).powf(m as f64 / 2.0);
        for x in 0..1usize << m {
            amps[(x << m) | x] = Complex64::new(a, 0.0);
        }
        Ok(Self { n, amps })
    }

    /// Uniform superposition over all `2^n` basis states.
    pub fn uniform(n: usize) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        let a = (s.amps.len() as f64).sqrt().recip();
        s.amps.iter_mut().for_each(|z| *z = Complex64::new(a, 0.0));
        Ok(s)
    }

    /// A Haar-random state.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(Error::InvalidArgument(format!("random state with n = {n}")));
        }
        Ok(Self { n, amps: crate::rng::random_unit_vector(rng, 1 << n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_len(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|`, clamped to `[0, 1]`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm().min(1.0))
    }

    /// `self ⊗ other`; `self` occupies the leading (most significant) qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Self { n: self.n + other.n, amps }
    }

    /// Tensor product of a nonempty sequence of states, in order.
    pub fn tensor_all<'a, I: IntoIterator<Item = &'a Qustring>>(states: I) -> Result<Self> {
        let mut it = states.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty tensor product".into()))?
            .clone();
        Ok(it.fold(first, |acc, s| acc.tensor(s)))
    }

    /// `σ(|φ⟩)`: the output qubit at position `i` is input qubit `σ(i)`.
    pub fn permute(&self, sigma: &QubitPermutation) -> Result<Self> {
        if sigma.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: sigma.n() });
        }
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (x, &a) in self.amps.iter().enumerate() {
            let y = (0..n).fold(0usize, |acc, i| {
                (acc << 1) | usize::from(x & qubit_mask(n, sigma.image(i)) != 0)
            });
            out[y] = a;
        }
        Ok(Self { n, amps: out })
    }

    /// Reshapes the amplitudes into a `2^{|keep|} × 2^{n−|keep|}` matrix with
    /// rows indexed by the (sorted) kept qubits.
    pub(crate) fn split_matrix(&self, keep: &[usize]) -> Result<DMatrix<Complex64>> {
        let keep = normalize_subset(self.n, keep)?;
        let rest: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let rows = gather_indices(self.n, &keep);
        let cols = gather_indices(self.n, &rest);
        let mut m = DMatrix::zeros(1 << keep.len(), 1 << rest.len());
        for (x, &a) in self.amps.iter().enumerate() {
            m[(rows[x], cols[x])] = a;
        }
        Ok(m)
    }

    /// Reduced density operator on `keep` (sorted; traced over the rest).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::InvalidQubits("empty keep set".into()));
        }
        let m = self.split_matrix(keep)?;
        let rho = &m * m.adjoint();
        Ok(DensityOperator::from_matrix_unchecked(keep.len(), rho))
    }

    /// Purity `Tr ρ_S²` of the reduced state on `subset`.
    pub fn purity(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() || subset.len() == self.n {
            normalize_subset(self.n, subset)?;
            return Ok(1.0);
        }
        let m = self.split_matrix(subset)?;
        let gram = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        Ok(gram.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Multiplies by the global phase that makes `⟨reference|self⟩` real and
    /// nonnegative.
    pub fn aligned_to(&self, reference: &Self) -> Result<Self> {
        let ip = reference.inner(self)?;
        if ip.norm() < 1e-300 {
            return Ok(self.clone());
        }
        let phase = ip.conj() / ip.norm();
        Ok(Self { n: self.n, amps: self.amps.iter().map(|z| z * phase).collect() })
    }

    /// Equality of rays: `|⟨self|other⟩| ≥ 1 − tol`.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.overlap(other).map(|f| f >= 1.0 - tol).unwrap_or(false)
    }

    pub fn to_density(&self) -> DensityOperator {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityOperator::from_matrix_unchecked(self.n, &v * v.adjoint())
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        Ok(())
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "amplitude vector length {len} is not 2^n with n ≥ 1"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// `a ⊗ b`.
pub fn tensor_product(a: &Qustring, b: &Qustring) -> Qustring {
    a.tensor(b)
}

/// `σ(|φ⟩)`.
pub fn apply_permutation(sigma: &QubitPermutation, phi: &Qustring) -> Result<Qustring> {
    phi.permute(sigma)
}

/// Partial trace keeping the qubits in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = Qustring::from_bits("0").unwrap().tensor(&Qustring::from_bits("1").unwrap());
        assert_eq!(s.amplitudes(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn bell_tensor_bell_is_pairwise_product_form() {
        let bb = Qustring::bell().tensor(&Qustring::bell());
        // ((|00⟩+|11⟩)/√2)^{⊗2}: nonzero exactly on 0000, 0011, 1100, 1111.
        for (x, a) in bb.amplitudes().iter().enumerate() {
            let expected = if [0b0000, 0b0011, 0b1100, 0b1111].contains(&x) { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(a.re, expected, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Qustring::new(vec![c(1.0)]).is_err());
        assert!(Qustring::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(Qustring::new(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(Qustring::normalized(vec![c(0.0), c(0.0)]).is_err());
        assert!(Qustring::from_bits("012").is_err());
    }

    #[test]
    fn interleave_unwinds_pairwise_state() {
        let psi4 = Qustring::pairwise(2).unwrap();
        let sigma = QubitPermutation::from_one_based(&[1, 3, 2, 4]).unwrap();
        let out = psi4.permute(&sigma).unwrap();
        let bb = Qustring::bell().tensor(&Qustring::bell());
        for (a, b) in out.amplitudes().iter().zip(bb.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn identity_permutation_is_exact() {
        let mut rng = crate::rng::seeded(3);
        let phi = Qustring::random(4, &mut rng).unwrap();
        let out = phi.permute(&QubitPermutation::identity(4)).unwrap();
        assert_eq!(out, phi);
    }

    #[test]
    fn reduced_state_of_product_and_bell() {
        let s = Qustring::from_bits("01").unwrap();
        let r = s.reduced(&[0]).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 0.0, epsilon = 1e-15);

        let r = Qustring::bell().reduced(&[0]).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert!(Qustring::bell().reduced(&[]).is_err());
        assert!(Qustring::bell().reduced(&[2]).is_err());
    }

    #[test]
    fn purity_detects_factorization() {
        let bb = Qustring::bell().tensor(&Qustring::bell());
        assert_abs_diff_eq!(bb.purity(&[0, 1]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bb.purity(&[0, 2]).unwrap(), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(bb.purity(&[0]).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn phase_alignment() {
        let b = Qustring::bell();
        let i = Complex64::new(0.0, 1.0);
        let rotated =
            Qustring::new(b.amplitudes().iter().map(|z| z * i).collect()).unwrap();
        assert!(rotated.equal_up_to_phase(&b, 1e-12));
        let aligned = rotated.aligned_to(&b).unwrap();
        assert_abs_diff_eq!((aligned.inner(&b).unwrap() - c(1.0)).norm(), 0.0, epsilon = 1e-14);
    }
}
