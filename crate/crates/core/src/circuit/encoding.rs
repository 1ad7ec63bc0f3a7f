//! Canonical self-delimiting bit encoding of circuits (format version 1).
//!
//! ```text
//! gamma(inputs + 1) gamma(ancillas + 1) output[w]
//! { tag[3] wire[w] * arity }*
//! 111
//! ```
//!
//! `gamma` is the Elias gamma code, `w = ⌈log₂ width⌉` (0 for a single
//! wire), wires are 0-based and big-endian, and tags are `I=000 X=001 H=010
//! T=011 CNOT=100 CSWAP=101`. A CSWAP writes its swapped pair in increasing
//! order. Every gate costs at least 3 bits, so the length is never below the
//! gate count.

use super::{Gate, GateKind, QuantumCircuit};
use crate::{Error, Result};

pub const ENCODING_VERSION: u32 = 1;

const TERMINATOR: u8 = 0b111;

/// Bits of `gamma(x)` for `x ≥ 1`.
pub fn gamma_length(x: usize) -> usize {
    debug_assert!(x >= 1);
    2 * (usize::BITS - 1 - x.leading_zeros()) as usize + 1
}

pub(crate) fn wire_bits(width: usize) -> usize {
    if width <= 1 {
        0
    } else {
        (usize::BITS - (width - 1).leading_zeros()) as usize
    }
}

/// Header length for a circuit of the given shape.
pub(crate) fn header_length(inputs: usize, ancillas: usize) -> usize {
    gamma_length(inputs + 1) + gamma_length(ancillas + 1) + wire_bits(inputs + ancillas)
}

/// Encoded length of a single gate record on a register of `width` wires.
pub(crate) fn gate_length(kind: GateKind, width: usize) -> usize {
    3 + kind.arity() * wire_bits(width)
}

/// Length in bits of [`encode_circuit`]'s output, computed without encoding.
pub fn encoding_length(c: &QuantumCircuit) -> usize {
    header_length(c.inputs(), c.ancillas())
        + c.gates().iter().map(|g| gate_length(g.kind(), c.width())).sum::<usize>()
        + 3
}

fn push_bits(out: &mut Vec<bool>, value: usize, len: usize) {
    for i in (0..len).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

fn push_gamma(out: &mut Vec<bool>, x: usize) {
    let len = (usize::BITS - x.leading_zeros()) as usize;
    out.extend(std::iter::repeat_n(false, len - 1));
    push_bits(out, x, len);
}

pub fn encode_circuit(c: &QuantumCircuit) -> Vec<bool> {
    let w = wire_bits(c.width());
    let mut out = Vec::with_capacity(encoding_length(c));
    push_gamma(&mut out, c.inputs() + 1);
    push_gamma(&mut out, c.ancillas() + 1);
    push_bits(&mut out, c.output(), w);
    for g in c.gates() {
        push_bits(&mut out, g.kind().tag() as usize, 3);
        for q in g.wires() {
            push_bits(&mut out, q, w);
        }
    }
    push_bits(&mut out, TERMINATOR as usize, 3);
    out
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<usize> {
        if self.pos + len > self.bits.len() {
            return Err(Error::Malformed("encoding ends early".into()));
        }
        let v = self.bits[self.pos..self.pos + len].iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        self.pos += len;
        Ok(v)
    }

    fn gamma(&mut self) -> Result<usize> {
        let mut zeros = 0;
        while self.take(1)? == 0 {
            zeros += 1;
            if zeros >= 32 {
                return Err(Error::Malformed("gamma code too long".into()));
            }
        }
        Ok((1 << zeros) | self.take(zeros)?)
    }
}

/// Decodes one circuit from the start of `bits`, returning it and the number
/// of bits consumed.
pub fn decode_circuit_prefix(bits: &[bool]) -> Result<(QuantumCircuit, usize)> {
    let mut r = Reader { bits, pos: 0 };
    let inputs = r.gamma()? - 1;
    let ancillas = r.gamma()? - 1;
    let width = inputs + ancillas;
    let w = wire_bits(width);
    let output = r.take(w)?;
    let mut c = QuantumCircuit::new(inputs, ancillas)?.with_output(output)?;
    loop {
        let tag = r.take(3)? as u8;
        if tag == TERMINATOR {
            break;
        }
        let kind = GateKind::from_tag(tag).ok_or_else(|| Error::Malformed(format!("unknown tag {tag:03b}")))?;
        let wires = (0..kind.arity()).map(|_| r.take(w)).collect::<Result<Vec<_>>>()?;
        let g = Gate::from_parts(kind, &wires).map_err(|e| Error::Malformed(e.to_string()))?;
        if g.wires() != wires {
            return Err(Error::Malformed(format!("non-canonical wire order in {g}")));
        }
        c.push(g).map_err(|e| Error::Malformed(e.to_string()))?;
    }
    Ok((c, r.pos))
}

/// Decodes a complete encoding; trailing bits are an error.
pub fn decode_circuit(bits: &[bool]) -> Result<QuantumCircuit> {
    let (c, used) = decode_circuit_prefix(bits)?;
    if used != bits.len() {
        return Err(Error::Malformed(format!("{} trailing bits", bits.len() - used)));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn gamma_codes() {
        let mut v = Vec::new();
        push_gamma(&mut v, 1);
        assert_eq!(s(&v), "1");
        v.clear();
        push_gamma(&mut v, 5);
        assert_eq!(s(&v), "00101");
        assert_eq!(gamma_length(5), 5);
        assert_eq!(wire_bits(1), 0);
        assert_eq!(wire_bits(2), 1);
        assert_eq!(wire_bits(3), 2);
        assert_eq!(wire_bits(4), 2);
        assert_eq!(wire_bits(5), 3);
    }

    #[test]
    fn golden_encodings() {
        let empty = QuantumCircuit::new(1, 0).unwrap();
        assert_eq!(s(&encode_circuit(&empty)), "0101111");
        assert_eq!(encoding_length(&empty), 7);

        let ghz2 = QuantumCircuit::from_gates(2, 0, 0, vec![Gate::H(0), Gate::cnot(0, 1)]).unwrap();
        // gamma(3) gamma(1) out | H q0 | CNOT q0 q1 | end
        assert_eq!(s(&encode_circuit(&ghz2)), "011_1_0_010_0_100_0_1_111".replace('_', ""));
        assert_eq!(encoding_length(&ghz2), 17);

        let empty2 = QuantumCircuit::new(2, 0).unwrap();
        assert_eq!(encoding_length(&empty2), 8);
    }

    #[test]
    fn decode_inverts_and_rejects_garbage() {
        let c = QuantumCircuit::from_gates(2, 2, 3, vec![Gate::cswap(3, 2, 0), Gate::T(1), Gate::I(0)]).unwrap();
        let bits = encode_circuit(&c);
        assert_eq!(bits.len(), encoding_length(&c));
        assert_eq!(decode_circuit(&bits).unwrap(), c);
        let mut extra = bits.clone();
        extra.push(false);
        assert!(decode_circuit(&extra).is_err());
        assert!(decode_circuit(&bits[..bits.len() - 1]).is_err());
    }
}
