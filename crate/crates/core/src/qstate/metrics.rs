use serde::{Deserialize, Serialize};

use super::density::{hermitian, psd_sqrt};
use super::{DensityOperator, Qustring};
use crate::{Error, Result};

/// Either kind of state accepted by [`metrics`].
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a Qustring),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a Qustring> for StateRef<'a> {
    fn from(s: &'a Qustring) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(s: &'a DensityOperator) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub(crate) fn n(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.n(),
            StateRef::Mixed(r) => r.n(),
        }
    }

    pub(crate) fn density(&self) -> DensityOperator {
        match self {
            StateRef::Pure(s) => s.to_density(),
            StateRef::Mixed(r) => (*r).clone(),
        }
    }
}

/// Fidelity, trace distance (½-normalized), Bures distance `2(1 − F)` and,
/// for two pure inputs, the Euclidean distance of the amplitude vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub fidelity: f64,
    pub trace_distance: f64,
    pub bures: f64,
    pub l2: Option<f64>,
}

impl Metrics {
    /// The Euclidean distance, which only exists for pure inputs.
    pub fn l2(&self) -> Result<f64> {
        self.l2
            .ok_or_else(|| Error::InvalidArgument("l2 distance needs two pure states".into()))
    }
}

pub fn metrics<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<Metrics> {
    let (a, b) = (a.into(), b.into());
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), actual: b.n() });
    }
    let f = fidelity_refs(a, b)?;
    let t = match (a, b) {
        (StateRef::Pure(_), StateRef::Pure(_)) => (1.0 - f * f).max(0.0).sqrt(),
        _ => trace_distance_mixed(&a.density(), &b.density()),
    };
    let l2 = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => Some(
            x.amplitudes()
                .iter()
                .zip(y.amplitudes())
                .map(|(p, q)| (p - q).norm_sqr())
                .sum::<f64>()
                .sqrt(),
        ),
        _ => None,
    };
    Ok(Metrics { fidelity: f, trace_distance: t, bures: 2.0 * (1.0 - f), l2 })
}

pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), actual: b.n() });
    }
    fidelity_refs(a, b)
}

pub fn trace_distance<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    Ok(metrics(a, b)?.trace_distance)
}

fn fidelity_refs(a: StateRef<'_>, b: StateRef<'_>) -> Result<f64> {
    let f = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.overlap(y)?,
        (StateRef::Pure(x), StateRef::Mixed(r)) | (StateRef::Mixed(r), StateRef::Pure(x)) => {
            r.expectation(x)?.max(0.0).sqrt()
        }
        (StateRef::Mixed(r), StateRef::Mixed(s)) => {
            let sr = psd_sqrt(r.matrix());
            let inner = &sr * s.matrix() * &sr;
            hermitian(&inner)
                .symmetric_eigenvalues()
                .iter()
                .map(|l| l.max(0.0).sqrt())
                .sum()
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

fn trace_distance_mixed(a: &DensityOperator, b: &DensityOperator) -> f64 {
    let diff = a.matrix() - b.matrix();
    let t: f64 = hermitian(&diff).symmetric_eigenvalues().iter().map(|l| l.abs()).sum();
    (0.5 * t).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn self_metrics() {
        let mut rng = crate::rng::seeded(9);
        let phi = Qustring::random(3, &mut rng).unwrap();
        let m = metrics(&phi, &phi).unwrap();
        assert_abs_diff_eq!(m.fidelity, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.trace_distance, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m.bures, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.l2().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_versus_zero() {
        let m = metrics(&Qustring::bell(), &Qustring::zeros(2).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(m.fidelity, h, epsilon = 1e-12);
        assert_abs_diff_eq!(m.trace_distance, h, epsilon = 1e-12);
        assert_abs_diff_eq!(m.bures, 2.0 - 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(m.l2.unwrap(), (2.0 - 2f64.sqrt()).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn pure_and_mixed_paths_agree() {
        let mut rng = crate::rng::seeded(10);
        let a = Qustring::random(2, &mut rng).unwrap();
        let b = Qustring::random(2, &mut rng).unwrap();
        let pp = metrics(&a, &b).unwrap();
        let mm = metrics(&a.to_density(), &b.to_density()).unwrap();
        let pm = metrics(&a, &b.to_density()).unwrap();
        assert_abs_diff_eq!(pp.fidelity, mm.fidelity, epsilon = 1e-7);
        assert_abs_diff_eq!(pp.trace_distance, mm.trace_distance, epsilon = 1e-9);
        assert_abs_diff_eq!(pp.fidelity, pm.fidelity, epsilon = 1e-12);
        assert!(mm.l2.is_none() && mm.l2().is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(metrics(&Qustring::bell(), &Qustring::zeros(3).unwrap()).is_err());
    }
}
