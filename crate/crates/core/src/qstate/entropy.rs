use super::{DensityOperator, Qustring};
use crate::{Error, Result};

/// `η(x) = −x log₂ x` with `η(0) = 0`.
pub fn binary_entropy_eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

fn shannon(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().map(|p| binary_entropy_eta(p.clamp(0.0, 1.0))).sum::<f64>().max(0.0)
}

/// `S(ρ) = −Σ λ log₂ λ` in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon(rho.eigenvalues()).min(rho.n() as f64)
}

/// Entropy of the reduced state of a pure state on `keep`, computed from the
/// Schmidt coefficients.
pub(crate) fn entanglement_entropy(psi: &Qustring, keep: &[usize]) -> Result<f64> {
    if keep.is_empty() || keep.len() == psi.n() {
        return Ok(0.0);
    }
    let m = psi.split_matrix(keep)?;
    let sv = m.singular_values();
    Ok(shannon(sv.iter().map(|s| s * s)))
}

/// Mean entropy of the prefix reductions: the average over `i = 1..n−1` of the
/// entropy of the state kept on the first `i` qubits.
pub fn average_entropy(psi: &Qustring) -> Result<f64> {
    let n = psi.n();
    if n < 2 {
        return Err(Error::InvalidArgument("average entropy needs n ≥ 2".into()));
    }
    let mut total = 0.0;
    for i in 1..n {
        let keep: Vec<usize> = (0..i).collect();
        total += entanglement_entropy(psi, &keep)?;
    }
    Ok(total / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basic_entropies() {
        let zero = Qustring::zeros(1).unwrap().to_density();
        assert_abs_diff_eq!(von_neumann_entropy(&zero), 0.0, epsilon = 1e-12);
        let mm = DensityOperator::maximally_mixed(1).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mm), 1.0, epsilon = 1e-12);
        let red = Qustring::bell().to_density().partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&red), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn average_entropy_values() {
        for n in 2..=8 {
            assert_abs_diff_eq!(average_entropy(&Qustring::zeros(n).unwrap()).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(average_entropy(&Qustring::ghz(n).unwrap()).unwrap(), 1.0, epsilon = 1e-9);
        }
        // Prefix cuts: {q1} is maximally mixed, {q1,q2} is pure.
        let s = Qustring::bell().tensor(&Qustring::zeros(1).unwrap());
        let direct = (von_neumann_entropy(&s.to_density().partial_trace(&[0]).unwrap())
            + von_neumann_entropy(&s.to_density().partial_trace(&[0, 1]).unwrap()))
            / 2.0;
        assert_abs_diff_eq!(direct, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(average_entropy(&s).unwrap(), direct, epsilon = 1e-9);
        assert!(average_entropy(&Qustring::zeros(1).unwrap()).is_err());
    }

    #[test]
    fn schmidt_path_matches_eigen_path() {
        let mut rng = crate::rng::seeded(5);
        let psi = Qustring::random(5, &mut rng).unwrap();
        let keep = [0, 2];
        let a = entanglement_entropy(&psi, &keep).unwrap();
        let b = von_neumann_entropy(&psi.reduced(&keep).unwrap());
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }
}
