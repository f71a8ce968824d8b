use super::{BlockCount, BooleanCircuit, CircuitError, Gate, TruthTable, Wire};

/// A wire reference with an optional pending negation.
///
/// Negations are never materialized as gates; they are folded into the
/// truth table of whichever gate consumes the literal. Constants are the
/// constant-one wire, negated for 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lit {
    pub wire: Wire,
    pub negated: bool,
}

impl Lit {
    pub fn positive(wire: Wire) -> Self {
        Self { wire, negated: false }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Self { wire: self.wire, negated: !self.negated }
    }
}

#[derive(Default)]
pub struct CircuitBuilder {
    next_wire: usize,
    gates: Vec<Gate>,
    inputs: Vec<Wire>,
    outputs: Vec<Wire>,
    const_one: Option<Wire>,
    blocks: Vec<BlockCount>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self) -> Lit {
        let w = Wire(self.next_wire);
        self.next_wire += 1;
        self.inputs.push(w);
        Lit::positive(w)
    }

    pub fn inputs(&mut self, n: usize) -> Vec<Lit> {
        (0..n).map(|_| self.input()).collect()
    }

    /// The constant-one input, allocated on first use.
    pub fn const_one(&mut self) -> Lit {
        match self.const_one {
            Some(w) => Lit::positive(w),
            None => {
                let lit = self.input();
                self.const_one = Some(lit.wire);
                lit
            }
        }
    }

    pub fn constant(&mut self, bit: bool) -> Lit {
        let one = self.const_one();
        if bit {
            one
        } else {
            one.not()
        }
    }

    /// `value` as `width` constant literals, least significant first.
    pub fn constant_bits(&mut self, value: u64, width: usize) -> Vec<Lit> {
        (0..width).map(|i| self.constant(i < 64 && (value >> i) & 1 == 1)).collect()
    }

    pub fn gate(&mut self, table: TruthTable, a: Lit, b: Lit) -> Lit {
        let mut t = table;
        if a.negated {
            t = t.negate_left();
        }
        if b.negated {
            t = t.negate_right();
        }
        let out = Wire(self.next_wire);
        self.next_wire += 1;
        self.gates.push(Gate { left: a.wire, right: b.wire, out, table: t });
        Lit::positive(out)
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        self.gate(TruthTable::XOR, a, b)
    }

    pub fn xnor(&mut self, a: Lit, b: Lit) -> Lit {
        self.gate(TruthTable::XNOR, a, b)
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        self.gate(TruthTable::AND, a, b)
    }

    /// Single-input gate `f(a)`; both gate inputs read the same wire.
    pub fn unary(&mut self, f: impl Fn(bool) -> bool, a: Lit) -> Lit {
        let mut bits = 0u8;
        for u in [false, true] {
            for v in [false, true] {
                if f(u) {
                    bits |= 1 << ((u as u8) << 1 | v as u8);
                }
            }
        }
        self.gate(TruthTable(bits), a, a)
    }

    /// Marks `lit` as a circuit output. A negated literal costs one extra
    /// XOR-class gate; the builders in this crate never produce one.
    pub fn output(&mut self, lit: Lit) {
        let lit = if lit.negated { self.unary(|u| u, lit) } else { lit };
        self.outputs.push(lit.wire);
    }

    pub fn outputs(&mut self, lits: &[Lit]) {
        for &l in lits {
            self.output(l);
        }
    }

    /// `(XOR-class, AND-class)` gates emitted so far.
    pub fn counts(&self) -> (usize, usize) {
        let and = self.gates.iter().filter(|g| g.is_and_class()).count();
        (self.gates.len() - and, and)
    }

    /// Runs `f` and records the gates it adds under `name`.
    pub fn block<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let (x0, a0) = self.counts();
        let r = f(self);
        let (x1, a1) = self.counts();
        match self.blocks.iter_mut().find(|b| b.name == name) {
            Some(b) => {
                b.xor_class += x1 - x0;
                b.and_class += a1 - a0;
            }
            None => self.blocks.push(BlockCount { name: name.to_string(), xor_class: x1 - x0, and_class: a1 - a0 }),
        }
        r
    }

    pub fn finish(self) -> Result<BooleanCircuit, CircuitError> {
        let c = BooleanCircuit::new(self.next_wire, self.gates, self.inputs, self.outputs, self.const_one)?;
        Ok(c.with_breakdown(self.blocks))
    }
}
