//! The unary prefix `1^{σ,m} = 1^{σ(1)}0 … 1^{σ(n)}0 0 1^{m₁}0 … 1^{m_k}0 0`
//! that announces a permutation and block sizes to a distinguisher.
//! Permutation images are written 1-based.

use serde::{Deserialize, Serialize};

use crate::qstate::QubitPermutation;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixEncoding {
    pub n: usize,
    pub k: usize,
    pub sigma: QubitPermutation,
    pub sectioning: Vec<usize>,
    pub bits: Vec<bool>,
}

impl PrefixEncoding {
    /// ASCII rendering, e.g. `"10110010100"`.
    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// `n²/2 + 5n/2 + k + 2`.
pub fn prefix_length(n: usize, k: usize) -> usize {
    n * (n + 5) / 2 + k + 2
}

/// Input wires of a prefix-accepting distinguisher: prefix plus payload,
/// `n²/2 + 7n/2 + k + 2`.
pub fn distinguisher_inputs(n: usize, k: usize) -> usize {
    prefix_length(n, k) + n
}

pub fn encode_prefix(sigma: &QubitPermutation, sectioning: &[usize]) -> Result<PrefixEncoding> {
    let n = sigma.n();
    if sectioning.is_empty() || sectioning.contains(&0) || sectioning.iter().sum::<usize>() != n {
        return Err(Error::InvalidArgument(format!(
            "sectioning {sectioning:?} is not a composition of {n}"
        )));
    }
    let mut bits = Vec::with_capacity(prefix_length(n, sectioning.len()));
    let run = |len: usize, bits: &mut Vec<bool>| {
        bits.extend(std::iter::repeat_n(true, len));
        bits.push(false);
    };
    for v in sigma.to_one_based() {
        run(v, &mut bits);
    }
    bits.push(false);
    for &m in sectioning {
        run(m, &mut bits);
    }
    bits.push(false);
    Ok(PrefixEncoding {
        n,
        k: sectioning.len(),
        sigma: sigma.clone(),
        sectioning: sectioning.to_vec(),
        bits,
    })
}

/// Inverse of [`encode_prefix`]; the whole slice must be consumed.
pub fn decode_prefix(bits: &[bool]) -> Result<(QubitPermutation, Vec<usize>)> {
    let mut pos = 0;
    let mut section = || -> Result<Vec<usize>> {
        let mut runs = Vec::new();
        loop {
            let start = pos;
            while pos < bits.len() && bits[pos] {
                pos += 1;
            }
            if pos >= bits.len() {
                return Err(Error::Malformed("prefix ends inside a run".into()));
            }
            let len = pos - start;
            pos += 1;
            if len == 0 {
                return Ok(runs);
            }
            runs.push(len);
        }
    };
    let images = section()?;
    let m = section()?;
    if pos != bits.len() {
        return Err(Error::Malformed(format!("{} trailing bits after prefix", bits.len() - pos)));
    }
    let sigma = QubitPermutation::from_one_based(&images)
        .map_err(|e| Error::Malformed(format!("prefix permutation: {e}")))?;
    if m.is_empty() || m.iter().sum::<usize>() != sigma.n() {
        return Err(Error::Malformed(format!("prefix sectioning {m:?} does not cover {} qubits", sigma.n())));
    }
    Ok((sigma, m))
}

/// Parses an ASCII `0`/`1` string.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Malformed(format!("bad bit character {c:?}"))),
        })
        .collect()
}
