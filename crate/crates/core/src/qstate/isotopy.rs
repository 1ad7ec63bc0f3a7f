use super::{QubitPermutation, Qustring};
use crate::{Error, Result};

/// Largest qubit count handled by the exhaustive isotopy search.
pub const ISOTOPY_LIMIT: usize = 8;

const MATCH_TOL: f64 = 1e-8;
const SPECTRUM_TOL: f64 = 1e-6;

/// Finds `σ` with `σ(φ) = ψ` up to global phase, if one exists.
///
/// Candidate assignments are pruned by requiring the single-qubit reduced
/// spectra of paired qubits to agree.
pub fn is_isotopic(phi: &Qustring, psi: &Qustring) -> Result<Option<QubitPermutation>> {
    let n = phi.n();
    if psi.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: psi.n() });
    }
    if n > ISOTOPY_LIMIT {
        return Err(Error::Capability(format!(
            "isotopy search is exhaustive and limited to n ≤ {ISOTOPY_LIMIT} (got {n})"
        )));
    }
    let fp_phi = fingerprints(phi)?;
    let fp_psi = fingerprints(psi)?;
    let mut a = fp_phi.clone();
    let mut b = fp_psi.clone();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > SPECTRUM_TOL) {
        return Ok(None);
    }
    let mut map = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(search(phi, psi, &fp_phi, &fp_psi, &mut map, &mut used))
}

fn search(
    phi: &Qustring,
    psi: &Qustring,
    fp_phi: &[f64],
    fp_psi: &[f64],
    map: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<QubitPermutation> {
    let i = map.len();
    if i == phi.n() {
        let sigma = QubitPermutation::new(map.clone()).ok()?;
        let f = phi.permute(&sigma).ok()?.overlap(psi).ok()?;
        return (f >= 1.0 - MATCH_TOL).then_some(sigma);
    }
    for j in 0..phi.n() {
        if used[j] || (fp_phi[j] - fp_psi[i]).abs() > SPECTRUM_TOL {
            continue;
        }
        used[j] = true;
        map.push(j);
        if let Some(found) = search(phi, psi, fp_phi, fp_psi, map, used) {
            return Some(found);
        }
        map.pop();
        used[j] = false;
    }
    None
}

/// Smaller eigenvalue of each single-qubit reduced state.
fn fingerprints(s: &Qustring) -> Result<Vec<f64>> {
    (0..s.n())
        .map(|q| Ok(s.reduced(&[q])?.eigenvalues()[0]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_isotopy_is_identity() {
        let mut rng = crate::rng::seeded(8);
        let phi = Qustring::random(4, &mut rng).unwrap();
        assert!(is_isotopic(&phi, &phi).unwrap().unwrap().is_identity());
    }

    #[test]
    fn pairwise_is_isotopic_to_bell_pairs() {
        let psi4 = Qustring::pairwise(2).unwrap();
        let bb = Qustring::bell().tensor(&Qustring::bell());
        let sigma = is_isotopic(&psi4, &bb).unwrap().expect("isotopic");
        assert!(psi4.permute(&sigma).unwrap().equal_up_to_phase(&bb, 1e-12));
    }

    #[test]
    fn ghz_is_not_isotopic_to_zero_bell() {
        let a = Qustring::ghz(3).unwrap();
        let b = Qustring::zeros(1).unwrap().tensor(&Qustring::bell());
        assert!(is_isotopic(&a, &b).unwrap().is_none());
    }

    #[test]
    fn limits() {
        let big = Qustring::zeros(9).unwrap();
        assert!(matches!(is_isotopic(&big, &big), Err(Error::Capability(_))));
        assert!(is_isotopic(&Qustring::bell(), &Qustring::zeros(3).unwrap()).is_err());
    }
}
