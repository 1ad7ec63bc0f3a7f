use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A bijection on qubit positions, stored 0-based: output position `i`
/// carries input qubit `image(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct QubitPermutation {
    map: Vec<usize>,
}

impl QubitPermutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// From 0-based images.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("{map:?} is not a bijection")));
            }
        }
        Ok(Self { map })
    }

    /// From 1-based images, e.g. `[1, 3, 2, 4]`.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        if map.contains(&0) {
            return Err(Error::InvalidPermutation(format!("{map:?} contains 0")));
        }
        Self::new(map.iter().map(|v| v - 1).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Self { map }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Self { map: inv }
    }

    /// The permutation equivalent to applying `self` and then `then`.
    pub fn then(&self, then: &Self) -> Result<Self> {
        if self.n() != then.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: then.n() });
        }
        Ok(Self { map: then.map.iter().map(|&j| self.map[j]).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        let mut next = Some((0..n).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut p = cur.clone();
            if let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) {
                let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
                p.swap(i, j);
                p[i + 1..].reverse();
                next = Some(p);
            }
            Some(Self { map: cur })
        })
    }
}

impl TryFrom<Vec<usize>> for QubitPermutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<QubitPermutation> for Vec<usize> {
    fn from(p: QubitPermutation) -> Self {
        p.map
    }
}

impl std::fmt::Display for QubitPermutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.to_one_based().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(QubitPermutation::new(vec![0, 0]).is_err());
        assert!(QubitPermutation::new(vec![0, 2]).is_err());
        assert!(QubitPermutation::new(vec![]).is_err());
        assert!(QubitPermutation::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn enumerates_factorial_many() {
        assert_eq!(QubitPermutation::all(4).count(), 24);
        assert_eq!(QubitPermutation::all(1).count(), 1);
        let first = QubitPermutation::all(3).next().unwrap();
        assert!(first.is_identity());
    }

    #[test]
    fn inverse_and_composition() {
        let p = QubitPermutation::from_one_based(&[2, 3, 1]).unwrap();
        assert!(p.then(&p.inverse()).unwrap().is_identity());
        assert_eq!(p.to_string(), "(2,3,1)");
    }
}
