//! The per-entry circuit whose secure evaluation yields one garbled-table row.

use crate::circuit::{BooleanCircuit, CircuitBuilder, CircuitError, TruthTable};

/// Offsets inside one party's private input vector for the entry circuit:
/// `λx, λy, λz, G_b(α_a), G_a(β_b), γ0, γ1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntryLayout {
    pub n: usize,
    pub k: usize,
}

impl EntryLayout {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, k }
    }

    /// Garbled value length `nk + 1`.
    pub fn value_bits(&self) -> usize {
        self.n * self.k + 1
    }

    /// Bits per party: `3 + 2(nk+1) + 2k`.
    pub fn m(&self) -> usize {
        3 + 2 * self.value_bits() + 2 * self.k
    }

    pub const LX: usize = 0;
    pub const LY: usize = 1;
    pub const LZ: usize = 2;

    pub fn g_left(&self) -> usize {
        3
    }

    pub fn g_right(&self) -> usize {
        3 + self.value_bits()
    }

    pub fn gamma0(&self) -> usize {
        3 + 2 * self.value_bits()
    }

    pub fn gamma1(&self) -> usize {
        self.gamma0() + self.k
    }

    /// Assembles one party's private vector.
    pub fn private_vector(
        &self,
        lambdas: [bool; 3],
        g_left: &[bool],
        g_right: &[bool],
        gamma0: &[bool],
        gamma1: &[bool],
    ) -> Vec<bool> {
        assert_eq!(g_left.len(), self.value_bits());
        assert_eq!(g_right.len(), self.value_bits());
        assert_eq!(gamma0.len(), self.k);
        assert_eq!(gamma1.len(), self.k);
        let mut v = Vec::with_capacity(self.m());
        v.extend_from_slice(&lambdas);
        v.extend_from_slice(g_left);
        v.extend_from_slice(g_right);
        v.extend_from_slice(gamma0);
        v.extend_from_slice(gamma1);
        v
    }
}

/// Builds the entry circuit for row `(a, b)` of a gate with table `op`.
///
/// Inputs are the parties' private vectors back to back. The row constants
/// are folded in as single-input gates `λ ⊕ a` and `λ ⊕ b`. Outputs are the
/// `nk + 1` bits of the row value.
pub fn build_entry_circuit(
    n: usize,
    k: usize,
    op: TruthTable,
    a: bool,
    b: bool,
) -> Result<BooleanCircuit, CircuitError> {
    if n == 0 || k == 0 {
        return Err(CircuitError::Parameter(format!("entry circuit needs n ≥ 1 and k ≥ 1, got n={n}, k={k}")));
    }
    let layout = EntryLayout::new(n, k);
    let mut bld = CircuitBuilder::new();
    let ins: Vec<_> = (0..n).map(|_| bld.inputs(layout.m())).collect();
    let chain = |bld: &mut CircuitBuilder, off: usize| {
        let mut acc = ins[0][off];
        for party in &ins[1..] {
            acc = bld.xor(acc, party[off]);
        }
        acc
    };
    let lx = chain(&mut bld, EntryLayout::LX);
    let lx = bld.unary(move |u| u ^ a, lx);
    let ly = chain(&mut bld, EntryLayout::LY);
    let ly = bld.unary(move |u| u ^ b, ly);
    let lz = chain(&mut bld, EntryLayout::LZ);
    let core = bld.gate(op, lx, ly);
    let s = bld.xor(core, lz);
    let mut row = Vec::with_capacity(layout.value_bits());
    for party in &ins {
        for t in 0..k {
            let g0 = party[layout.gamma0() + t];
            let g1 = party[layout.gamma1() + t];
            let d = bld.xor(g0, g1);
            let e = bld.and(d, s);
            row.push(bld.xor(e, g0));
        }
    }
    row.push(s);
    for (pos, bit) in row.iter_mut().enumerate() {
        for party in &ins {
            *bit = bld.xor(*bit, party[layout.g_left() + pos]);
            *bit = bld.xor(*bit, party[layout.g_right() + pos]);
        }
    }
    bld.outputs(&row);
    bld.finish()
}

/// The row value computed directly from all parties' private vectors.
pub fn entry_value(n: usize, k: usize, op: TruthTable, a: bool, b: bool, private: &[Vec<bool>]) -> Vec<bool> {
    let layout = EntryLayout::new(n, k);
    assert_eq!(private.len(), n);
    let xor_at = |off: usize| private.iter().fold(false, |acc, p| acc ^ p[off]);
    let s = op.eval(xor_at(EntryLayout::LX) ^ a, xor_at(EntryLayout::LY) ^ b) ^ xor_at(EntryLayout::LZ);
    let gamma = if s { layout.gamma1() } else { layout.gamma0() };
    let mut row: Vec<bool> = private.iter().flat_map(|p| p[gamma..gamma + k].iter().copied()).collect();
    row.push(s);
    for (pos, bit) in row.iter_mut().enumerate() {
        *bit ^= xor_at(layout.g_left() + pos) ^ xor_at(layout.g_right() + pos);
    }
    row
}

/// `(XOR-class, AND-class)` gate counts of the entry circuit, `op` excluded:
/// `3n + 2nk + 2n(nk+1)` and `nk`.
pub fn entry_counts_without_op(n: usize, k: usize) -> (usize, usize) {
    (3 * n + 2 * n * k + 2 * n * (n * k + 1), n * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn six_parties_128_bits() {
        let c = build_entry_circuit(6, 128, TruthTable::AND, false, true).unwrap();
        assert_eq!(c.gate_counts(), (10782, 769));
    }

    #[test]
    fn two_parties_one_bit() {
        let c = build_entry_circuit(2, 1, TruthTable::AND, true, true).unwrap();
        assert_eq!(c.gate_counts(), (22, 3));
        let x = build_entry_circuit(2, 1, TruthTable::XOR, true, true).unwrap();
        assert_eq!(x.gate_counts(), (23, 2));
    }

    #[test]
    fn counts_follow_the_formula() {
        for n in 1..=8 {
            for k in [1, 2, 64, 128] {
                let (x, a) = entry_counts_without_op(n, k);
                let c = build_entry_circuit(n, k, TruthTable::AND, false, false).unwrap();
                assert_eq!(c.gate_counts(), (x, a + 1), "n={n} k={k}");
                assert_eq!(c.inputs().len(), n * EntryLayout::new(n, k).m());
                assert_eq!(c.outputs().len(), n * k + 1);
            }
        }
    }

    #[test]
    fn plaintext_matches_direct_formula() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(1..=5);
            let op = TruthTable::from_bits(rng.gen_range(0..16)).unwrap();
            let (a, b) = (rng.gen(), rng.gen());
            let c = build_entry_circuit(n, k, op, a, b).unwrap();
            let m = EntryLayout::new(n, k).m();
            let private: Vec<Vec<bool>> = (0..n).map(|_| (0..m).map(|_| rng.gen()).collect()).collect();
            let flat: Vec<bool> = private.concat();
            assert_eq!(c.eval_plaintext(&flat).unwrap(), entry_value(n, k, op, a, b, &private));
        }
    }

    #[test]
    fn rejects_zero_parameters() {
        assert!(build_entry_circuit(0, 4, TruthTable::AND, false, false).is_err());
        assert!(build_entry_circuit(2, 0, TruthTable::AND, false, false).is_err());
    }
}
