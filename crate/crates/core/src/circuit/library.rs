use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::simulate::simulate_from_zero;
use super::transform::permutation_network;
use super::{Gate, GateKind, QuantumCircuit};
use crate::qstate::{trace_distance, DensityOperator, QubitPermutation, Qustring};
use crate::{Error, Result};

/// Which exact constructor to build.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructorName {
    Ghz,
    /// `ψ_ℓ = 2^{−ℓ/4} Σ_x |xx⟩` on an even number `ℓ` of qubits.
    Pairwise,
    /// GHZ with relative sign `(−1)^{f}` for the supplied value `f`.
    Phase(u64),
    /// The basis state with the given bits.
    Basis(Vec<bool>),
}

impl std::str::FromStr for ConstructorName {
    type Err = Error;

    /// Accepts `ghz`, `pairwise`, `phase:<f>` and `basis:<bits>`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a)));
        match (head.to_ascii_lowercase().as_str(), arg) {
            ("ghz", None) => Ok(Self::Ghz),
            ("pairwise", None) => Ok(Self::Pairwise),
            ("phase", Some(f)) => f
                .parse()
                .map(Self::Phase)
                .map_err(|_| Error::InvalidArgument(format!("bad phase value {f:?}"))),
            ("basis", Some(bits)) => Ok(Self::Basis(super::parse_bits(bits)?)),
            _ => Err(Error::InvalidArgument(format!("unknown constructor {s:?}"))),
        }
    }
}

/// An ancilla-free circuit and the state it prepares from `|0…0⟩`.
#[derive(Clone, Debug)]
pub struct Constructor {
    pub circuit: QuantumCircuit,
    pub target: Qustring,
}

/// One `H` and a chain of `n − 1` CNOTs.
pub fn ghz_constructor(n: usize) -> Result<Constructor> {
    let mut c = QuantumCircuit::new(n, 0)?;
    c.push(Gate::H(0))?;
    for q in 1..n {
        c.push(Gate::cnot(q - 1, q))?;
    }
    Ok(Constructor { circuit: c, target: Qustring::ghz(n)? })
}

/// Bell pairs on neighbouring wires followed by a permutation network that
/// moves the partner of qubit `i` to position `ℓ/2 + i`.
pub fn pairwise_constructor(len: usize) -> Result<Constructor> {
    if len == 0 || !len.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("pairwise state needs even length, got {len}")));
    }
    let m = len / 2;
    let mut c = QuantumCircuit::new(len, 0)?;
    for i in 0..m {
        c.push(Gate::H(2 * i))?;
        c.push(Gate::cnot(2 * i, 2 * i + 1))?;
    }
    // Interleaving maps ψ to Bell pairs; its inverse maps them back.
    let interleave: Vec<usize> = (0..len).map(|p| if p % 2 == 0 { p / 2 } else { m + p / 2 }).collect();
    let net = permutation_network(&QubitPermutation::new(interleave)?.inverse());
    c.extend(net.gates().iter().copied())?;
    Ok(Constructor { circuit: c, target: Qustring::pairwise(m)? })
}

/// The GHZ constructor followed, when `f` is odd, by `T⁴ = Z` on wire 0.
pub fn phase_constructor(n: usize, f: u64) -> Result<Constructor> {
    let Constructor { mut circuit, .. } = ghz_constructor(n)?;
    let odd = f % 2 == 1;
    if odd {
        circuit.extend(std::iter::repeat_n(Gate::T(0), 4))?;
    }
    Ok(Constructor { circuit, target: Qustring::ghz_with_sign(n, odd)? })
}

/// `X` on every wire whose bit is 1.
pub fn basis_constructor(bits: &[bool]) -> Result<Constructor> {
    let mut c = QuantumCircuit::new(bits.len(), 0)?;
    let mut index = 0;
    for (q, &b) in bits.iter().enumerate() {
        if b {
            c.push(Gate::X(q))?;
        }
        index = (index << 1) | usize::from(b);
    }
    Ok(Constructor { circuit: c, target: Qustring::basis(bits.len(), index)? })
}

/// Constructor for a named family at length `n`. For `Basis` the length
/// comes from the bit string and must equal `n`.
pub fn constructor_library(name: &ConstructorName, n: usize) -> Result<Constructor> {
    match name {
        ConstructorName::Ghz => ghz_constructor(n),
        ConstructorName::Pairwise => pairwise_constructor(n),
        ConstructorName::Phase(f) => phase_constructor(n, *f),
        ConstructorName::Basis(bits) => {
            if bits.len() != n {
                return Err(Error::InvalidArgument(format!("basis string has {} bits, n = {n}", bits.len())));
            }
            basis_constructor(bits)
        }
    }
}

/// A family of states `ξ_n` of strictly increasing length `ℓ(n)`.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleSpec {
    pub name: &'static str,
    size_factor: fn(usize) -> usize,
    generator: fn(usize) -> Result<Qustring>,
    constructor: Option<fn(usize) -> Result<Constructor>>,
}

fn alternating_bits(n: usize) -> Vec<bool> {
    (0..n).map(|i| i % 2 == 0).collect()
}

impl EnsembleSpec {
    pub const NAMES: [&'static str; 5] = ["ghz", "pairwise", "w", "basis", "phase"];

    /// Built-in ensembles: `ghz` (ℓ = n), `pairwise` (ψ_{2n}, ℓ = 2n), `w`
    /// (ℓ = n), `basis` (`|1010…⟩`, ℓ = n) and `phase` (GHZ with sign
    /// `(−1)^n`, ℓ = n).
    pub fn named(name: &str) -> Result<Self> {
        let spec = match name.to_ascii_lowercase().as_str() {
            "ghz" => Self {
                name: "ghz",
                size_factor: |n| n,
                generator: Qustring::ghz,
                constructor: Some(ghz_constructor),
            },
            "pairwise" => Self {
                name: "pairwise",
                size_factor: |n| 2 * n,
                generator: Qustring::pairwise,
                constructor: Some(|n| pairwise_constructor(2 * n)),
            },
            "w" => Self { name: "w", size_factor: |n| n, generator: Qustring::w, constructor: None },
            "basis" => Self {
                name: "basis",
                size_factor: |n| n,
                generator: |n| basis_constructor(&alternating_bits(n)).map(|c| c.target),
                constructor: Some(|n| basis_constructor(&alternating_bits(n))),
            },
            "phase" => Self {
                name: "phase",
                size_factor: |n| n,
                generator: |n| Qustring::ghz_with_sign(n, n % 2 == 1),
                constructor: Some(|n| phase_constructor(n, n as u64)),
            },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown ensemble {name:?}; expected one of {:?}",
                    Self::NAMES
                )))
            }
        };
        Ok(spec)
    }

    /// `ℓ(n)`.
    pub fn length(&self, n: usize) -> usize {
        (self.size_factor)(n)
    }

    /// `ξ_n`.
    pub fn state(&self, n: usize) -> Result<Qustring> {
        if n == 0 {
            return Err(Error::InvalidArgument("ensemble index starts at 1".into()));
        }
        let s = (self.generator)(n)?;
        debug_assert_eq!(s.n(), self.length(n));
        Ok(s)
    }

    /// An exact constructor for `ξ_n`, when the family has one in the gate set.
    pub fn constructor(&self, n: usize) -> Option<Result<Constructor>> {
        self.constructor.map(|f| f(n))
    }
}

/// A circuit with no inputs whose first `n` wires, after tracing out the
/// rest, approximate `target` within trace distance `epsilon`.
#[derive(Clone, Debug)]
pub struct Approximator {
    pub circuit: QuantumCircuit,
    pub n: usize,
    pub epsilon: f64,
    pub target: Qustring,
}

impl Approximator {
    pub fn new(circuit: QuantumCircuit, n: usize, epsilon: f64, target: Qustring) -> Result<Self> {
        if circuit.inputs() != 0 || n == 0 || n > circuit.width() || target.n() != n {
            return Err(Error::InvalidCircuit(format!(
                "approximator must have no inputs and at least {n} wires matching the target"
            )));
        }
        Ok(Self { circuit, n, epsilon, target })
    }

    /// The reduced output state on the first `n` wires.
    pub fn output_state(&self) -> Result<DensityOperator> {
        let full = simulate_from_zero(&self.circuit)?;
        full.reduced(&(0..self.n).collect::<Vec<_>>())
    }

    /// Actual trace distance between the output and the target.
    pub fn distance(&self) -> Result<f64> {
        trace_distance(&self.output_state()?, &self.target)
    }
}

/// GHZ preparation plus a weak controlled phase: an ancilla `a` rotated by
/// `H T H T³ H T H` (so it reads 1 with probability ≈ 0.0732) switches on a
/// `T` on wire 0, applied by swapping wire 0 into a spare wire `z` under
/// control of `a`. The declared tolerance is 0.05.
pub fn perturbed_ghz_approximator(n: usize) -> Result<Approximator> {
    let (a, z) = (n, n + 1);
    let mut c = QuantumCircuit::new(0, n + 2)?;
    c.extend(ghz_constructor(n)?.circuit.gates().iter().copied())?;
    for g in [
        Gate::H(a),
        Gate::T(a),
        Gate::H(a),
        Gate::T(a),
        Gate::T(a),
        Gate::T(a),
        Gate::H(a),
        Gate::T(a),
        Gate::H(a),
    ] {
        c.push(g)?;
    }
    c.extend([Gate::cswap(a, 0, z), Gate::T(z), Gate::cswap(a, 0, z)])?;
    Approximator::new(c, n, 0.05, Qustring::ghz(n)?)
}

/// A uniformly random circuit of exactly `size` gates.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    inputs: usize,
    ancillas: usize,
    size: usize,
) -> Result<QuantumCircuit> {
    let width = inputs + ancillas;
    let mut c = QuantumCircuit::new(inputs, ancillas)?.with_output(rng.random_range(0..width.max(1)))?;
    let kinds: Vec<GateKind> = GateKind::ALL.into_iter().filter(|k| k.arity() <= width).collect();
    for _ in 0..size {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let mut wires: Vec<usize> = (0..width).collect();
        let (chosen, _) = wires.partial_shuffle(rng, kind.arity());
        c.push(Gate::from_parts(kind, chosen)?)?;
    }
    Ok(c)
}
