use crate::bits::BitString;
use crate::circuit::BooleanCircuit;
use crate::exec::Exec;
use crate::randomness::{BbsPublic, BbsState, Expander, WireShare, WireShareLayout};

/// `(G_0(key), G_1(key))` for both of a wire's key shares, indexed by the
/// key's plaintext bit.
pub type WireExpansion = [(BitString, BitString); 2];

/// A garbler's own material: its share of every wire and the expander
/// outputs of the shares of every wire that feeds a gate.
pub struct PartyWires {
    pub shares: Vec<WireShare>,
    expansions: Vec<Option<WireExpansion>>,
    /// Generator bits consumed.
    pub bbs_bits: u64,
    /// Expander output bits produced.
    pub g_bits: u64,
}

impl PartyWires {
    /// Runs the party's generator sequentially over all `W` wires.
    pub fn generate(
        bbs: &BbsPublic,
        circuit: &BooleanCircuit,
        n: usize,
        k: usize,
        expander: &dyn Expander,
        exec: Exec,
    ) -> Self {
        let layout = WireShareLayout::new(k);
        let mut st = BbsState::new(bbs);
        let stream = st.take(layout.total_bits(circuit.wire_count()));
        Self::from_shares(layout.split_stream(&stream), circuit, n, k, expander, exec)
    }

    pub fn from_shares(
        shares: Vec<WireShare>,
        circuit: &BooleanCircuit,
        n: usize,
        k: usize,
        expander: &dyn Expander,
        exec: Exec,
    ) -> Self {
        let half = n * k + 1;
        let used = circuit.gate_input_wires();
        let expanded = exec.map(&used, |w| {
            let s = &shares[w.0];
            [expander.g_pair(&s.share0, half), expander.g_pair(&s.share1, half)]
        });
        let mut expansions = vec![None; circuit.wire_count()];
        for (w, e) in used.iter().zip(expanded) {
            expansions[w.0] = Some(e);
        }
        let bbs_bits = (shares.len() * (2 * k + 1)) as u64;
        let g_bits = (used.len() * 4 * half) as u64;
        Self { shares, expansions, bbs_bits, g_bits }
    }

    /// `G_sel(key share of wire for plaintext bit)`.
    pub fn expansion(&self, wire: usize, bit: bool, sel: bool) -> &BitString {
        let (g0, g1) = &self.expansions[wire].as_ref().expect("wire feeds a gate")[bit as usize];
        if sel {
            g1
        } else {
            g0
        }
    }
}

/// Every party's wire shares together; only a test harness or the client
/// (for individual wires) ever sees this much.
#[derive(Clone, Debug)]
pub struct WireSecrets {
    pub n: usize,
    pub k: usize,
    /// `shares[i][ω]`: party `i+1`'s shares of wire `ω`.
    pub shares: Vec<Vec<WireShare>>,
}

impl WireSecrets {
    pub fn lambda(&self, wire: usize) -> bool {
        self.shares.iter().fold(false, |acc, p| acc ^ p[wire].lambda)
    }

    /// `ω_b = ω_{b1} ∥ … ∥ ω_{bn} ∥ b`.
    pub fn garbled_value(&self, wire: usize, bit: bool) -> BitString {
        let mut v = BitString::concat(self.shares.iter().map(|p| p[wire].share(bit)));
        v.push(bit);
        v
    }

    /// The garbled value that encodes plaintext `x` on `wire`.
    pub fn encode(&self, wire: usize, x: bool) -> BitString {
        self.garbled_value(wire, x ^ self.lambda(wire))
    }
}
