//! Exhaustive circuit enumeration in nondecreasing encoding length.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{encode_circuit, encoding_length, Gate, GateKind, QuantumCircuit};
use crate::{Error, Result};

/// Widest register the enumerator accepts.
pub const ENUMERATION_WIDTH_LIMIT: usize = 4;

/// Default cap on circuits visited by one search.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub inputs: usize,
    pub ancillas: usize,
}

impl Shape {
    pub fn new(inputs: usize, ancillas: usize) -> Self {
        Self { inputs, ancillas }
    }

    pub fn width(&self) -> usize {
        self.inputs + self.ancillas
    }

    /// Encoded length of the empty circuit of this shape.
    pub fn base_length(&self) -> Result<usize> {
        Ok(encoding_length(&QuantumCircuit::new(self.inputs, self.ancillas)?))
    }
}

/// Every gate on `width` wires: `I, X, H, T` on each wire, CNOT on each
/// ordered pair, CSWAP for each control and unordered swapped pair.
pub fn alphabet(width: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for kind in GateKind::ALL {
        match kind.arity() {
            1 => out.extend((0..width).map(|q| Gate::from_parts(kind, &[q]).expect("valid"))),
            2 => {
                for c in 0..width {
                    for t in (0..width).filter(|&t| t != c) {
                        out.push(Gate::cnot(c, t));
                    }
                }
            }
            _ => {
                for c in 0..width {
                    for a in (0..width).filter(|&a| a != c) {
                        for b in (a + 1..width).filter(|&b| b != c) {
                            out.push(Gate::cswap(c, a, b));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of gate sequences of length at most `max_size` on `width` wires.
pub fn census(width: usize, max_size: usize) -> u128 {
    let a = alphabet(width).len() as u128;
    (0..=max_size).map(|s| a.pow(s as u32)).sum()
}

/// Sequence counts by gate count and total gate cost.
struct CostTable {
    costs: Vec<usize>,
    /// `count[s][r]`: sequences of exactly `s` gates costing `r` bits.
    count: Vec<Vec<u128>>,
}

impl CostTable {
    fn new(gates: &[Gate], width: usize, max_size: usize) -> Self {
        let costs: Vec<usize> =
            gates.iter().map(|g| crate::circuit::gate_length(g.kind(), width)).collect();
        let top = costs.iter().copied().max().unwrap_or(0) * max_size;
        let mut count = vec![vec![0u128; top + 1]; max_size + 1];
        count[0][0] = 1;
        for s in 1..=max_size {
            for r in 0..=top {
                count[s][r] = costs.iter().filter(|&&c| c <= r).map(|&c| count[s - 1][r - c]).sum();
            }
        }
        Self { costs, count }
    }

    /// Some sequence of at most `slots` gates costs exactly `r`.
    fn reachable(&self, slots: usize, r: usize) -> bool {
        r < self.count[0].len() && (0..=slots).any(|s| self.count[s][r] > 0)
    }

    fn at_cost(&self, r: usize) -> u128 {
        self.count.iter().map(|row| row.get(r).copied().unwrap_or(0)).sum()
    }
}

/// A block of circuits sharing shape, output wire and encoding length.
#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub output: usize,
    pub length: usize,
    gate_cost: usize,
    pub count: u128,
}

pub(crate) struct Space {
    shape: Shape,
    gates: Vec<Gate>,
    table: CostTable,
    max_size: usize,
}

impl Space {
    pub(crate) fn new(shape: Shape, max_size: usize) -> Result<Self> {
        if shape.width() > ENUMERATION_WIDTH_LIMIT {
            return Err(Error::Capability(format!(
                "circuit enumeration is limited to {ENUMERATION_WIDTH_LIMIT} wires, got {}",
                shape.width()
            )));
        }
        let gates = alphabet(shape.width());
        let table = CostTable::new(&gates, shape.width(), max_size);
        Ok(Self { shape, gates, table, max_size })
    }

    pub(crate) fn levels(&self, outputs: &[usize]) -> Result<Vec<Level>> {
        let base = self.shape.base_length()?;
        let mut out = Vec::new();
        for r in 0..self.table.count[0].len() {
            let count = self.table.at_cost(r);
            if count > 0 {
                for &o in outputs {
                    out.push(Level { output: o, length: base + r, gate_cost: r, count });
                }
            }
        }
        Ok(out)
    }

    /// Calls `f` on every circuit of `level` whose first gate is
    /// `self.gates[first]` (or the empty circuit when `first` is `None`).
    fn walk(&self, level: &Level, first: Option<usize>, f: &mut dyn FnMut(&QuantumCircuit) -> Result<()>) -> Result<()> {
        let mut stack = Vec::with_capacity(self.max_size);
        match first {
            None => {
                if level.gate_cost == 0 {
                    f(&self.build(level, &stack)?)?;
                }
                Ok(())
            }
            Some(i) => {
                let c = self.table.costs[i];
                if self.max_size == 0 || c > level.gate_cost || !self.table.reachable(self.max_size - 1, level.gate_cost - c) {
                    return Ok(());
                }
                stack.push(i);
                self.dfs(level, &mut stack, level.gate_cost - c, f)
            }
        }
    }

    fn dfs(
        &self,
        level: &Level,
        stack: &mut Vec<usize>,
        remaining: usize,
        f: &mut dyn FnMut(&QuantumCircuit) -> Result<()>,
    ) -> Result<()> {
        if remaining == 0 {
            return f(&self.build(level, stack)?);
        }
        let slots = self.max_size - stack.len();
        for (i, &c) in self.table.costs.iter().enumerate() {
            if c <= remaining && self.table.reachable(slots - 1, remaining - c) {
                stack.push(i);
                self.dfs(level, stack, remaining - c, f)?;
                stack.pop();
            }
        }
        Ok(())
    }

    fn build(&self, level: &Level, stack: &[usize]) -> Result<QuantumCircuit> {
        QuantumCircuit::from_gates(
            self.shape.inputs,
            self.shape.ancillas,
            level.output,
            stack.iter().map(|&i| self.gates[i]).collect(),
        )
    }

    fn first_choices(&self) -> Vec<Option<usize>> {
        std::iter::once(None).chain((0..self.gates.len()).map(Some)).collect()
    }
}

/// Circuits of one shape in nondecreasing encoding length.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub circuits: Vec<QuantumCircuit>,
    /// Every circuit within the size bound was produced.
    pub exhaustive: bool,
    /// Encoding length of the first level left out by the budget.
    pub truncated_at: Option<usize>,
}

/// Every circuit on `qubits` wires (no ancillas, output on wire 0) with at
/// most `max_size` gates.
pub fn enumerate_circuits(qubits: usize, max_size: usize) -> Result<Enumeration> {
    enumerate_shape(Shape::new(qubits, 0), max_size, DEFAULT_BUDGET)
}

pub fn enumerate_shape(shape: Shape, max_size: usize, budget: u128) -> Result<Enumeration> {
    let space = Space::new(shape, max_size)?;
    let mut circuits = Vec::new();
    let mut visited = 0u128;
    for level in space.levels(&[0])? {
        if visited + level.count > budget {
            return Ok(Enumeration { circuits, exhaustive: false, truncated_at: Some(level.length) });
        }
        visited += level.count;
        for first in space.first_choices() {
            space.walk(&level, first, &mut |c| {
                circuits.push(c.clone());
                Ok(())
            })?;
        }
    }
    Ok(Enumeration { circuits, exhaustive: true, truncated_at: None })
}

/// Best circuit found by [`minimize`].
#[derive(Clone, Debug)]
pub(crate) struct Found<T> {
    pub value: f64,
    pub circuit: QuantumCircuit,
    pub data: T,
}

/// A candidate with its encoding bits, used to break ties.
type Candidate<T> = Option<(Found<T>, Vec<bool>)>;

pub(crate) struct SearchOutcome<T> {
    pub best: Option<Found<T>>,
    pub exhaustive: bool,
    pub visited: u128,
    pub truncated_at: Option<usize>,
}

/// Minimizes `encoding_length(c) + penalty(c)` over every circuit of the
/// given shapes and output wires with at most `max_size` gates. `eval`
/// returns `None` to skip a circuit and otherwise a nonnegative penalty, so
/// levels at or beyond the best value found cannot improve it and end the
/// scan. Within a level, first gates are scanned in parallel and merged by
/// `(value, encoding)`.
pub(crate) fn minimize<T, F>(
    shapes: &[(Shape, Vec<usize>)],
    max_size: usize,
    budget: u128,
    eval: F,
) -> Result<SearchOutcome<T>>
where
    T: Send + Clone,
    F: Fn(&QuantumCircuit) -> Result<Option<(f64, T)>> + Sync,
{
    let spaces: Vec<Space> = shapes.iter().map(|(s, _)| Space::new(*s, max_size)).collect::<Result<_>>()?;
    let mut levels: Vec<(usize, Level)> = Vec::new();
    for (i, (space, (_, outputs))) in spaces.iter().zip(shapes).enumerate() {
        levels.extend(space.levels(outputs)?.into_iter().map(|l| (i, l)));
    }
    levels.sort_by_key(|(i, l)| (l.length, *i, l.output));
    let mut best: Option<(Found<T>, Vec<bool>)> = None;
    let mut visited = 0u128;
    for (i, level) in &levels {
        if best.as_ref().is_some_and(|(b, _)| b.value < level.length as f64) {
            break;
        }
        if visited + level.count > budget {
            return Ok(SearchOutcome {
                best: best.map(|b| b.0),
                exhaustive: false,
                visited,
                truncated_at: Some(level.length),
            });
        }
        visited += level.count;
        let space = &spaces[*i];
        let locals: Vec<Result<Candidate<T>>> = space
            .first_choices()
            .into_par_iter()
            .map(|first| {
                let mut local: Candidate<T> = None;
                space.walk(level, first, &mut |c| {
                    if let Some((penalty, data)) = eval(c)? {
                        let value = level.length as f64 + penalty;
                        keep_better(&mut local, Found { value, circuit: c.clone(), data });
                    }
                    Ok(())
                })?;
                Ok(local)
            })
            .collect();
        for l in locals {
            if let Some((found, _)) = l? {
                keep_better(&mut best, found);
            }
        }
    }
    Ok(SearchOutcome { best: best.map(|b| b.0), exhaustive: true, visited, truncated_at: None })
}

fn keep_better<T>(slot: &mut Option<(Found<T>, Vec<bool>)>, cand: Found<T>) {
    let bits = encode_circuit(&cand.circuit);
    let better = match slot {
        None => true,
        Some((b, bb)) => cand.value < b.value || (cand.value == b.value && bits < *bb),
    };
    if better {
        *slot = Some((cand, bits));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_circuits(1, 0).unwrap().circuits.len(), 1);
        let one = enumerate_circuits(1, 1).unwrap().circuits;
        assert_eq!(one.iter().filter(|c| c.size() == 1).count(), 4);
        assert_eq!(one.len(), 5);
        assert_eq!(alphabet(1).len(), 4);
        assert_eq!(alphabet(2).len(), 10);
        assert_eq!(alphabet(3).len(), 21);
        let e = enumerate_circuits(2, 1).unwrap();
        assert_eq!(e.circuits.iter().filter(|c| c.size() == 1).count(), 10);
        assert_eq!(e.circuits.len(), 11);
        assert!(e.exhaustive);
    }

    #[test]
    fn census_matches_enumeration_and_order() {
        let e = enumerate_circuits(2, 3).unwrap();
        assert_eq!(e.circuits.len() as u128, census(2, 3));
        assert_eq!(census(2, 3), 1111);
        let lens: Vec<usize> = e.circuits.iter().map(encoding_length).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
        let mut enc: Vec<Vec<bool>> = e.circuits.iter().map(encode_circuit).collect();
        enc.sort();
        enc.dedup();
        assert_eq!(enc.len(), 1111);
    }

    #[test]
    fn budget_truncates_at_a_level_boundary() {
        let e = enumerate_shape(Shape::new(2, 0), 3, 50).unwrap();
        assert!(!e.exhaustive);
        assert_eq!(e.circuits.len(), 11);
        assert!(e.truncated_at.is_some());
    }

    #[test]
    fn minimize_finds_shortest_match() {
        let out = minimize(&[(Shape::new(2, 0), vec![0])], 2, DEFAULT_BUDGET, |c| {
            Ok(c.gates().contains(&Gate::H(1)).then_some((0.0, ())))
        })
        .unwrap();
        let best = out.best.unwrap();
        assert_eq!(best.circuit.gates(), &[Gate::H(1)]);
        assert!(out.exhaustive);
    }

    #[test]
    fn wide_registers_are_refused() {
        assert!(matches!(enumerate_shape(Shape::new(3, 2), 1, 10), Err(Error::Capability(_))));
    }
}
