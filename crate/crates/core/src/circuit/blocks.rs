//! Arithmetic blocks and the application circuits assembled from them.
//!
//! All multi-bit values are least-significant-bit first. Per-bit costs:
//! adder and subtractor 4 XOR-class + 1 AND-class, comparator 3 + 1,
//! multiplexer 2 + 1, conditional inverter 1 + 0, incrementer 1 + 1 (plus one
//! XOR-class gate for the top bit).

use super::builder::{CircuitBuilder, Lit};
use super::{BooleanCircuit, CircuitError};

pub const NEAREST_ATM_COORD_BITS: usize = 11;
pub const NEAREST_ATM_INDEX_BITS: usize = 2 * NEAREST_ATM_COORD_BITS;

fn check_width(l: usize) -> Result<(), CircuitError> {
    if l == 0 {
        return Err(CircuitError::Parameter("bit width must be at least 1".into()));
    }
    Ok(())
}

fn recorded<T>(b: &mut CircuitBuilder, record: bool, name: &str, f: impl FnOnce(&mut CircuitBuilder) -> T) -> T {
    if record {
        b.block(name, f)
    } else {
        f(b)
    }
}

/// Full-adder chain `s = (x⊕c)⊕y`, `c' = c⊕((x⊕c)·(y⊕c))`.
///
/// Returns the `l` sum bits and the carry out; with `invert_carry` the last
/// carry gate is built as XNOR, yielding the complemented carry for free.
fn ripple(b: &mut CircuitBuilder, x: &[Lit], y: &[Lit], cin: Lit, invert_carry: bool) -> (Vec<Lit>, Lit) {
    debug_assert_eq!(x.len(), y.len());
    let mut c = cin;
    let mut sums = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let t1 = b.xor(x[i], c);
        let t2 = b.xor(y[i], c);
        sums.push(b.xor(t1, y[i]));
        let p = b.and(t1, t2);
        c = if invert_carry && i + 1 == x.len() { b.xnor(c, p) } else { b.xor(c, p) };
    }
    (sums, c)
}

/// `x − y` as `x + ¬y + 1`; returns the low `l` bits and the sign bit
/// (complement of the final carry, 1 iff `x < y`).
fn sub_lits(b: &mut CircuitBuilder, x: &[Lit], y: &[Lit]) -> (Vec<Lit>, Lit) {
    let one = b.const_one();
    let ny: Vec<Lit> = y.iter().map(|l| l.not()).collect();
    ripple(b, x, &ny, one, true)
}

/// Carry-only subtractor: 1 iff `right < left`.
fn cmp_lits(b: &mut CircuitBuilder, left: &[Lit], right: &[Lit]) -> Lit {
    let mut c = b.const_one();
    for i in 0..left.len() {
        let t1 = b.xor(right[i], c);
        let t2 = b.xor(left[i].not(), c);
        let p = b.and(t1, t2);
        c = if i + 1 == left.len() { b.xnor(c, p) } else { b.xor(c, p) };
    }
    c
}

/// `sel ? right : left`, as `left ⊕ sel·(left ⊕ right)`.
fn mux_lits(b: &mut CircuitBuilder, sel: Lit, left: &[Lit], right: &[Lit]) -> Vec<Lit> {
    left.iter()
        .zip(right)
        .map(|(&l, &r)| {
            let d = b.xor(l, r);
            let e = b.and(sel, d);
            b.xor(l, e)
        })
        .collect()
}

fn inv_lits(b: &mut CircuitBuilder, d: &[Lit], sign: Lit) -> Vec<Lit> {
    d.iter().map(|&x| b.xor(x, sign)).collect()
}

/// Adds a single bit to an `(l+1)`-bit value: `l` half adders and one XOR for
/// the top bit (no carry out).
fn inc_lits(b: &mut CircuitBuilder, r: &[Lit], bit: Lit) -> Vec<Lit> {
    let mut c = bit;
    let mut out = Vec::with_capacity(r.len());
    for (i, &ri) in r.iter().enumerate() {
        out.push(b.xor(ri, c));
        if i + 1 < r.len() {
            c = b.and(ri, c);
        }
    }
    out
}

fn manhattan_lits(b: &mut CircuitBuilder, xa: &[Lit], ya: &[Lit], xb: &[Lit], yb: &[Lit], record: bool) -> Vec<Lit> {
    let (dx, sx) = recorded(b, record, "SUB", |b| sub_lits(b, xa, xb));
    let (dy, sy) = recorded(b, record, "SUB", |b| sub_lits(b, ya, yb));
    let ex = recorded(b, record, "INV", |b| inv_lits(b, &dx, sx));
    let ey = recorded(b, record, "INV", |b| inv_lits(b, &dy, sy));
    let sum = recorded(b, record, "ADD", |b| {
        let (mut s, c) = ripple(b, &ex, &ey, sx, false);
        s.push(c);
        s
    });
    recorded(b, record, "INC", |b| inc_lits(b, &sum, sy))
}

type Leaf = (Vec<Lit>, Vec<Lit>);

fn min_block_lits(b: &mut CircuitBuilder, left: &Leaf, right: &Leaf, record: bool) -> Leaf {
    let lt = recorded(b, record, "CMP", |b| cmp_lits(b, &left.0, &right.0));
    let v = recorded(b, record, "MUX_min", |b| mux_lits(b, lt, &left.0, &right.0));
    let i = recorded(b, record, "MUX_index", |b| mux_lits(b, lt, &left.1, &right.1));
    (v, i)
}

/// Balanced pairing, level by level; an odd node is promoted unchanged.
/// The left operand of every block always covers lower leaf indices, so
/// ties resolve to the lowest index.
fn min_tree_lits(b: &mut CircuitBuilder, mut level: Vec<Leaf>, record: bool) -> Leaf {
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.chunks(2);
        for pair in &mut it {
            if pair.len() == 2 {
                next.push(min_block_lits(b, &pair[0], &pair[1], record));
            } else {
                next.push(pair[0].clone());
            }
        }
        level = next;
    }
    level.pop().expect("non-empty tree")
}

/// Ripple-carry adder: inputs `x[l]`, `y[l]`, carry-in; outputs `l+1` bits.
pub fn build_adder(l: usize) -> Result<BooleanCircuit, CircuitError> {
    check_width(l)?;
    let mut b = CircuitBuilder::new();
    let x = b.inputs(l);
    let y = b.inputs(l);
    let cin = b.input();
    let out = b.block("ADD", |b| {
        let (mut s, c) = ripple(b, &x, &y, cin, false);
        s.push(c);
        s
    });
    b.outputs(&out);
    b.finish()
}

/// Subtractor: inputs `x[l]`, `y[l]` (plus constant one); outputs the low
/// `l` bits of `x − y` followed by the sign bit.
pub fn build_sub(l: usize) -> Result<BooleanCircuit, CircuitError> {
    check_width(l)?;
    let mut b = CircuitBuilder::new();
    let x = b.inputs(l);
    let y = b.inputs(l);
    b.const_one();
    let (d, sign) = b.block("SUB", |b| sub_lits(b, &x, &y));
    b.outputs(&d);
    b.output(sign);
    b.finish()
}

/// Manhattan distance: inputs `x_a, y_a, x_b, y_b` (`l` bits each, plus
/// constant one); output `|x_a−x_b| + |y_a−y_b|` in `l+1` bits.
pub fn build_manhattan(l: usize) -> Result<BooleanCircuit, CircuitError> {
    check_width(l)?;
    let mut b = CircuitBuilder::new();
    let xa = b.inputs(l);
    let ya = b.inputs(l);
    let xb = b.inputs(l);
    let yb = b.inputs(l);
    b.const_one();
    let d = manhattan_lits(&mut b, &xa, &ya, &xb, &yb, true);
    b.outputs(&d);
    b.finish()
}

/// Comparator alone: inputs `left[w]`, `right[w]`; output 1 iff `right < left`.
pub fn build_cmp_block(width: usize) -> Result<BooleanCircuit, CircuitError> {
    check_width(width)?;
    let mut b = CircuitBuilder::new();
    let left = b.inputs(width);
    let right = b.inputs(width);
    let lt = b.block("CMP", |b| cmp_lits(b, &left, &right));
    b.output(lt);
    b.finish()
}

/// Tree of `leaves − 1` MIN blocks.
///
/// Inputs: `leaves` values of `value_width` bits, then `leaves` indices of
/// `index_width` bits (plus constant one). Outputs: minimum value, then the
/// index of its left-most occurrence.
pub fn build_min_tree(value_width: usize, index_width: usize, leaves: usize) -> Result<BooleanCircuit, CircuitError> {
    check_width(value_width)?;
    if leaves < 2 {
        return Err(CircuitError::Parameter(format!("min tree needs at least 2 leaves, got {leaves}")));
    }
    let mut b = CircuitBuilder::new();
    let values: Vec<Vec<Lit>> = (0..leaves).map(|_| b.inputs(value_width)).collect();
    let indices: Vec<Vec<Lit>> = (0..leaves).map(|_| b.inputs(index_width)).collect();
    b.const_one();
    let level = values.into_iter().zip(indices).collect();
    let (v, i) = min_tree_lits(&mut b, level, true);
    b.outputs(&v);
    b.outputs(&i);
    b.finish()
}

/// One MIN block (comparator plus value and index multiplexers).
pub fn build_min_block(value_width: usize, index_width: usize) -> Result<BooleanCircuit, CircuitError> {
    build_min_tree(value_width, index_width, 2)
}

/// Nearest-location circuit over hard-coded `(east, south)` coordinates.
///
/// Inputs: client east then south (`l` bits each, plus constant one).
/// Outputs: the `2l`-bit index of the nearest location (east bits, then
/// south bits) followed by its `(l+1)`-bit Manhattan distance. Ties go to
/// the earlier location in `locations`.
pub fn build_nearest_atm(l: usize, locations: &[(u64, u64)]) -> Result<BooleanCircuit, CircuitError> {
    check_width(l)?;
    if locations.len() < 2 {
        return Err(CircuitError::Parameter("need at least 2 locations".into()));
    }
    if l < 64 {
        if let Some(&(e, s)) = locations.iter().find(|&&(e, s)| e >> l != 0 || s >> l != 0) {
            return Err(CircuitError::Parameter(format!("location ({e}, {s}) does not fit in {l} bits")));
        }
    }
    let mut b = CircuitBuilder::new();
    let xa = b.inputs(l);
    let ya = b.inputs(l);
    b.const_one();
    let mut leaves = Vec::with_capacity(locations.len());
    for &(east, south) in locations {
        let xb = b.constant_bits(east, l);
        let yb = b.constant_bits(south, l);
        let d = b.block("DIST(L)", |b| manhattan_lits(b, &xa, &ya, &xb, &yb, false));
        let mut index = xb;
        index.extend(yb);
        leaves.push((d, index));
    }
    let (d, index) = b.block("T(MIN)", |b| min_tree_lits(b, leaves, false));
    b.outputs(&index);
    b.outputs(&d);
    b.finish()
}
