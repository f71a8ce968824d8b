//! Boolean circuits: representation, plaintext evaluation and builders.
//!
//! Gates carry arbitrary two-input truth tables. A gate is *XOR-class* when
//! the algebraic normal form of its table has no `u·v` term and *AND-class*
//! otherwise; only AND-class gates cost oblivious transfers when the table
//! entries are computed jointly.

mod blocks;
mod builder;
mod format;
mod random;

pub mod atm;

pub use blocks::{
    build_adder, build_cmp_block, build_manhattan, build_min_block, build_min_tree, build_nearest_atm, build_sub,
    NEAREST_ATM_COORD_BITS, NEAREST_ATM_INDEX_BITS,
};
pub use builder::{CircuitBuilder, Lit};
pub use format::{bundled_adder_32, circuit_digest, parse_circuit_file, serialize_circuit, ParseError, ParseErrorKind};
pub use random::{random_circuit, random_circuit_with};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("expected {expected} input bits, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("constant-one wire {0} must carry 1")]
    ConstantWire(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid circuit structure: {0}")]
    Structure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Wire(pub usize);

impl Wire {
    pub fn id(self) -> usize {
        self.0
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coefficients of `f(u,v) = c0 ⊕ c1·u ⊕ c2·v ⊕ c3·u·v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anf {
    pub c0: bool,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
}

/// A two-input truth table; bit `2u+v` holds `f(u,v)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable(u8);

impl TruthTable {
    pub const AND: TruthTable = TruthTable(0b1000);
    pub const XOR: TruthTable = TruthTable(0b0110);
    pub const XNOR: TruthTable = TruthTable(0b1001);
    pub const OR: TruthTable = TruthTable(0b1110);
    /// `f(u,v) = u`
    pub const LEFT: TruthTable = TruthTable(0b1100);
    /// `f(u,v) = ¬u`
    pub const NOT_LEFT: TruthTable = TruthTable(0b0011);

    pub fn from_bits(bits: u8) -> Result<Self, CircuitError> {
        if bits > 0x0f {
            return Err(CircuitError::Parameter(format!("truth table {bits:#x} wider than 4 bits")));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn eval(self, u: bool, v: bool) -> bool {
        (self.0 >> ((u as u8) << 1 | v as u8)) & 1 == 1
    }

    pub fn anf(self) -> Anf {
        let t = |u, v| self.eval(u, v);
        let c0 = t(false, false);
        Anf {
            c0,
            c1: c0 ^ t(true, false),
            c2: c0 ^ t(false, true),
            c3: c0 ^ t(false, true) ^ t(true, false) ^ t(true, true),
        }
    }

    pub fn is_and_class(self) -> bool {
        self.anf().c3
    }

    fn from_fn(f: impl Fn(bool, bool) -> bool) -> Self {
        let mut bits = 0u8;
        for u in [false, true] {
            for v in [false, true] {
                if f(u, v) {
                    bits |= 1 << ((u as u8) << 1 | v as u8);
                }
            }
        }
        Self(bits)
    }

    /// `f(¬u, v)`
    pub fn negate_left(self) -> Self {
        Self::from_fn(|u, v| self.eval(!u, v))
    }

    /// `f(u, ¬v)`
    pub fn negate_right(self) -> Self {
        Self::from_fn(|u, v| self.eval(u, !v))
    }

    /// `¬f(u, v)`
    pub fn negate_output(self) -> Self {
        Self(!self.0 & 0x0f)
    }

    /// `t0t1t2t3` with `t_i = f(u,v)` for `(u,v)` = 00, 01, 10, 11.
    pub fn to_text(self) -> String {
        [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .map(|&(u, v)| if self.eval(u, v) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({})", self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub left: Wire,
    pub right: Wire,
    pub out: Wire,
    pub table: TruthTable,
}

impl Gate {
    pub fn eval(&self, u: bool, v: bool) -> bool {
        self.table.eval(u, v)
    }

    pub fn is_and_class(&self) -> bool {
        self.table.is_and_class()
    }
}

/// Gate counts of a named sub-block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockCount {
    pub name: String,
    pub xor_class: usize,
    pub and_class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateCountReport {
    pub xor_class: usize,
    pub and_class: usize,
    pub breakdown: Vec<BlockCount>,
}

impl GateCountReport {
    pub fn total(&self) -> usize {
        self.xor_class + self.and_class
    }
}

#[derive(Clone, Debug)]
pub struct BooleanCircuit {
    wire_count: usize,
    gates: Vec<Gate>,
    inputs: Vec<Wire>,
    outputs: Vec<Wire>,
    const_one: Option<Wire>,
    breakdown: Vec<BlockCount>,
}

/// Equality ignores the block breakdown, which is builder metadata.
impl PartialEq for BooleanCircuit {
    fn eq(&self, other: &Self) -> bool {
        self.wire_count == other.wire_count
            && self.gates == other.gates
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.const_one == other.const_one
    }
}

impl Eq for BooleanCircuit {}

impl BooleanCircuit {
    /// Validates and assembles a circuit.
    ///
    /// Wire ids must be dense in `0..wire_count`, every non-input wire must be
    /// driven by exactly one gate, and gates must be listed in topological
    /// order.
    pub fn new(
        wire_count: usize,
        gates: Vec<Gate>,
        inputs: Vec<Wire>,
        outputs: Vec<Wire>,
        const_one: Option<Wire>,
    ) -> Result<Self, CircuitError> {
        let structure = |msg: String| Err(CircuitError::Structure(msg));
        if inputs.len() + gates.len() != wire_count {
            return structure(format!(
                "{} inputs + {} gates does not equal {} wires",
                inputs.len(),
                gates.len(),
                wire_count
            ));
        }
        let mut defined = vec![false; wire_count];
        for &w in &inputs {
            if w.0 >= wire_count {
                return structure(format!("input wire {w} out of range"));
            }
            if defined[w.0] {
                return structure(format!("input wire {w} listed twice"));
            }
            defined[w.0] = true;
        }
        if let Some(c) = const_one {
            if !inputs.contains(&c) {
                return structure(format!("constant-one wire {c} is not an input"));
            }
        }
        for (pos, g) in gates.iter().enumerate() {
            for w in [g.left, g.right] {
                if w.0 >= wire_count {
                    return structure(format!("gate {pos} reads wire {w}, which does not exist"));
                }
                if !defined[w.0] {
                    return structure(format!("gate {pos} reads wire {w} before it is driven"));
                }
            }
            if g.out == g.left || g.out == g.right {
                return structure(format!("gate {pos} feeds its own output {}", g.out));
            }
            if g.out.0 >= wire_count {
                return structure(format!("gate {pos} drives wire {}, which does not exist", g.out));
            }
            if defined[g.out.0] {
                return structure(format!("wire {} driven twice (gate {pos})", g.out));
            }
            defined[g.out.0] = true;
        }
        for &w in &outputs {
            if w.0 >= wire_count {
                return structure(format!("output wire {w} out of range"));
            }
        }
        Ok(Self { wire_count, gates, inputs, outputs, const_one, breakdown: Vec::new() })
    }

    pub(crate) fn with_breakdown(mut self, breakdown: Vec<BlockCount>) -> Self {
        self.breakdown = breakdown;
        self
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn inputs(&self) -> &[Wire] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Wire] {
        &self.outputs
    }

    pub fn const_one(&self) -> Option<Wire> {
        self.const_one
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    /// Input bits a caller supplies, i.e. all inputs except the constant-one wire.
    pub fn num_user_inputs(&self) -> usize {
        self.inputs.len() - self.const_one.is_some() as usize
    }

    /// `(XOR-class, AND-class)`.
    pub fn gate_counts(&self) -> (usize, usize) {
        let and = self.gates.iter().filter(|g| g.is_and_class()).count();
        (self.gates.len() - and, and)
    }

    pub fn gate_count_report(&self) -> GateCountReport {
        let (xor_class, and_class) = self.gate_counts();
        let breakdown = if self.breakdown.is_empty() {
            vec![BlockCount { name: "total".into(), xor_class, and_class }]
        } else {
            self.breakdown.clone()
        };
        GateCountReport { xor_class, and_class, breakdown }
    }

    /// Wires read by at least one gate.
    pub fn gate_input_wires(&self) -> Vec<Wire> {
        let mut used = vec![false; self.wire_count];
        for g in &self.gates {
            used[g.left.0] = true;
            used[g.right.0] = true;
        }
        (0..self.wire_count).filter(|&w| used[w]).map(Wire).collect()
    }

    /// Inserts the constant 1 at the constant-one position of `user_bits`.
    pub fn assemble_inputs(&self, user_bits: &[bool]) -> Result<Vec<bool>, CircuitError> {
        let expected = self.num_user_inputs();
        if user_bits.len() != expected {
            return Err(CircuitError::InputArity { expected, got: user_bits.len() });
        }
        let mut it = user_bits.iter();
        Ok(self.inputs.iter().map(|&w| if Some(w) == self.const_one { true } else { *it.next().unwrap() }).collect())
    }

    /// Values of every wire, indexed by wire id.
    pub fn eval_wires(&self, input_bits: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if input_bits.len() != self.inputs.len() {
            return Err(CircuitError::InputArity { expected: self.inputs.len(), got: input_bits.len() });
        }
        let mut values = vec![false; self.wire_count];
        for (&w, &b) in self.inputs.iter().zip(input_bits) {
            if Some(w) == self.const_one && !b {
                return Err(CircuitError::ConstantWire(w.0));
            }
            values[w.0] = b;
        }
        for g in &self.gates {
            values[g.out.0] = g.eval(values[g.left.0], values[g.right.0]);
        }
        Ok(values)
    }

    /// Ordinary Boolean evaluation; `input_bits` covers all `W_i` inputs.
    pub fn eval_plaintext(&self, input_bits: &[bool]) -> Result<Vec<bool>, CircuitError> {
        let values = self.eval_wires(input_bits)?;
        Ok(self.outputs.iter().map(|w| values[w.0]).collect())
    }
}

/// Free-function form of [`BooleanCircuit::eval_plaintext`].
pub fn eval_plaintext(c: &BooleanCircuit, input_bits: &[bool]) -> Result<Vec<bool>, CircuitError> {
    c.eval_plaintext(input_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_circuit() -> BooleanCircuit {
        BooleanCircuit::new(
            3,
            vec![Gate { left: Wire(0), right: Wire(1), out: Wire(2), table: TruthTable::AND }],
            vec![Wire(0), Wire(1)],
            vec![Wire(2)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_and_gate() {
        let c = and_circuit();
        assert_eq!(c.eval_plaintext(&[true, true]).unwrap(), vec![true]);
        assert_eq!(c.eval_plaintext(&[true, false]).unwrap(), vec![false]);
        assert_eq!(c.gate_counts(), (0, 1));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let c = and_circuit();
        assert_eq!(c.eval_plaintext(&[true]), Err(CircuitError::InputArity { expected: 2, got: 1 }));
    }

    #[test]
    fn anf_classification_covers_all_tables() {
        // AND-class exactly when the table has odd weight.
        for bits in 0u8..16 {
            let t = TruthTable::from_bits(bits).unwrap();
            assert_eq!(t.is_and_class(), bits.count_ones() % 2 == 1, "{t:?}");
            let a = t.anf();
            for u in [false, true] {
                for v in [false, true] {
                    let anf = a.c0 ^ (a.c1 & u) ^ (a.c2 & v) ^ (a.c3 & u & v);
                    assert_eq!(anf, t.eval(u, v));
                }
            }
        }
    }

    #[test]
    fn negations_fold_into_table() {
        let t = TruthTable::XOR.negate_right();
        assert_eq!(t, TruthTable::XNOR);
        assert_eq!(TruthTable::AND.negate_output().to_text(), "1110");
        assert_eq!(TruthTable::NOT_LEFT.to_text(), "1100");
    }

    #[test]
    fn rejects_non_topological_order() {
        let r = BooleanCircuit::new(
            4,
            vec![
                Gate { left: Wire(0), right: Wire(3), out: Wire(2), table: TruthTable::AND },
                Gate { left: Wire(0), right: Wire(1), out: Wire(3), table: TruthTable::AND },
            ],
            vec![Wire(0), Wire(1)],
            vec![Wire(2)],
            None,
        );
        assert!(matches!(r, Err(CircuitError::Structure(_))));
    }

    #[test]
    fn constant_wire_must_be_one() {
        let c = BooleanCircuit::new(
            3,
            vec![Gate { left: Wire(0), right: Wire(1), out: Wire(2), table: TruthTable::AND }],
            vec![Wire(0), Wire(1)],
            vec![Wire(2)],
            Some(Wire(1)),
        )
        .unwrap();
        assert_eq!(c.eval_plaintext(&[true, false]), Err(CircuitError::ConstantWire(1)));
        assert_eq!(c.assemble_inputs(&[true]).unwrap(), vec![true, true]);
    }
}
