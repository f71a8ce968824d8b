//! Closed-form cost model: entry-circuit size, oblivious-transfer traffic,
//! random bits, garbled-circuit size and client work, all in exact integers.

use serde::Serialize;

use crate::circuit::BooleanCircuit;
use crate::simnet::Phase;

/// Size parameters of one garbling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CostParams {
    pub n: u64,
    pub k: u64,
    /// Bit length of the OT group's prime.
    pub p_bits: u64,
    /// Bit length of the generator modulus.
    pub modulus_bits: u64,
    pub wires: u64,
    pub inputs: u64,
    pub outputs: u64,
    pub gates: u64,
}

impl CostParams {
    pub fn for_circuit(c: &BooleanCircuit, n: usize, k: usize, p_bits: u64, modulus_bits: u64) -> Self {
        Self {
            n: n as u64,
            k: k as u64,
            p_bits,
            modulus_bits,
            wires: c.wire_count() as u64,
            inputs: c.inputs().len() as u64,
            outputs: c.outputs().len() as u64,
            gates: c.num_gates() as u64,
        }
    }

    pub fn garbled_value_bits(&self) -> u64 {
        garbled_value_bits(self.n, self.k)
    }

    pub fn pairs(&self) -> u64 {
        self.n * (self.n - 1) / 2
    }
}

/// `nk + 1`.
pub fn garbled_value_bits(n: u64, k: u64) -> u64 {
    n * k + 1
}

/// Entry-circuit gate counts `(XOR-class, AND-class)`, the per-entry gate
/// counted in the class of its table.
pub fn bprime_counts(n: u64, k: u64, op_is_and: bool) -> (u64, u64) {
    let xor = 3 * n + 2 * n * k + 2 * n * (n * k + 1);
    let and = n * k;
    if op_is_and {
        (xor, and + 1)
    } else {
        (xor + 1, and)
    }
}

/// Input bits per party of one entry circuit: `3 + 2(nk+1) + 2k`.
pub fn entry_inputs_per_party(n: u64, k: u64) -> u64 {
    3 + 2 * (n * k + 1) + 2 * k
}

/// `s_{1:2} = 4|p| + 2k`.
pub fn ot2_bits(p_bits: u64, k: u64) -> u64 {
    4 * p_bits + 2 * k
}

/// `s_{1:4} = 2 s_{1:2} + 4k = 8(|p| + k)`.
pub fn ot4_bits(p_bits: u64, k: u64) -> u64 {
    2 * ot2_bits(p_bits, k) + 4 * k
}

/// OTs for one entry with an AND-class gate: `t_{1:4} = (nk+1) n(n-1)/2`.
pub fn entry_ot_count(n: u64, k: u64) -> u64 {
    (n * k + 1) * n * (n - 1) / 2
}

/// Bits the combiner receives per entry: `s* = n(nk+1)`.
pub fn entry_share_bits(n: u64, k: u64) -> u64 {
    n * (n * k + 1)
}

/// `T = t_{1:4} s_{1:4} + s* = (nk+1)[4(|p|+k) n(n-1) + n]`.
pub fn entry_traffic(n: u64, k: u64, p_bits: u64) -> u64 {
    entry_ot_count(n, k) * ot4_bits(p_bits, k) + entry_share_bits(n, k)
}

/// Random bits generated by all garblers while garbling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RandomBits {
    /// Generator output: `n(2k+1)W`.
    pub b1: u64,
    /// Expander output: `4n(nk+1)(W - W_o)`.
    pub b2: u64,
    /// Input-share masks: `8n(n-1)m N_g`.
    pub b3: u64,
    /// OT-internal randomness: `4 N_g (nk+1) n(n-1)/2 (8|p| + 4k - 2)`.
    pub b4: u64,
}

impl RandomBits {
    pub fn total(&self) -> u64 {
        self.b1 + self.b2 + self.b3 + self.b4
    }

    /// Total divided over the `4 N_g` entries.
    pub fn per_entry_mbits(&self, gates: u64) -> f64 {
        mbits(self.total()) / (4 * gates) as f64
    }
}

pub fn random_bits(p: &CostParams) -> RandomBits {
    let (n, k) = (p.n, p.k);
    let v = garbled_value_bits(n, k);
    RandomBits {
        b1: n * (2 * k + 1) * p.wires,
        b2: 4 * n * v * (p.wires - p.outputs),
        b3: 8 * n * (n - 1) * entry_inputs_per_party(n, k) * p.gates,
        b4: 4 * p.gates * v * p.pairs() * (8 * p.p_bits + 4 * k - 2),
    }
}

/// `4 N_g (nk+1)`.
pub fn gc_size_bits(gates: u64, n: u64, k: u64) -> u64 {
    4 * gates * garbled_value_bits(n, k)
}

/// `n[|N| + (n-1)k + W_i(k+1) + W_o(2k+1)]`.
pub fn client_bits(p: &CostParams) -> u64 {
    p.n * (p.modulus_bits + (p.n - 1) * p.k + p.inputs * (p.k + 1) + p.outputs * (2 * p.k + 1))
}

/// Bits of the garbled-circuit transfer header.
pub const GC_HEADER_BITS: u64 = 320;

/// Seed-message payload per garbler: `N ∥ s_i ∥ digest ∥ pairwise seeds`.
pub fn seed_message_bits(n: u64, k: u64, modulus_bits: u64) -> u64 {
    2 * modulus_bits + 256 + (n - 1) * k
}

/// Exact payload bits per network phase for one run on `circuit`. OT
/// traffic follows each gate's class: an entry for an XOR-class gate runs
/// `nk` products, an AND-class one `nk + 1`.
pub fn predict_phase_bits(circuit: &BooleanCircuit, p: &CostParams) -> Vec<(Phase, u64)> {
    let (n, k) = (p.n, p.k);
    let v = garbled_value_bits(n, k);
    let (xor_gates, and_gates) = circuit.gate_counts();
    let products = 4 * (xor_gates as u64 * n * k + and_gates as u64 * (n * k + 1));
    vec![
        (Phase::SeedDistribution, n * seed_message_bits(n, k, p.modulus_bits)),
        (Phase::Ot, products * p.pairs() * ot4_bits(p.p_bits, k)),
        (Phase::ShareExchange, n * gc_size_bits(p.gates, n, k)),
        (Phase::GcTransfer, GC_HEADER_BITS + gc_size_bits(p.gates, n, k)),
        (Phase::GarbledInput, p.inputs * v),
        (Phase::GarbledOutput, p.outputs * v),
    ]
}

/// Random bits with the OT term following each gate's class (see
/// [`predict_phase_bits`]) and the expander term counting the wires that
/// actually feed gates.
pub fn predict_random_bits(circuit: &BooleanCircuit, p: &CostParams, q_bits: u64) -> RandomBits {
    let (n, k) = (p.n, p.k);
    let (xor_gates, and_gates) = circuit.gate_counts();
    let products = 4 * (xor_gates as u64 * n * k + and_gates as u64 * (n * k + 1));
    RandomBits {
        b2: 4 * n * garbled_value_bits(n, k) * circuit.gate_input_wires().len() as u64,
        b4: products * p.pairs() * (6 * p.p_bits + 4 * k + 2 * q_bits),
        ..random_bits(p)
    }
}

/// `bits / 2^20`.
pub fn mbits(bits: u64) -> f64 {
    bits as f64 / (1u64 << 20) as f64
}

/// `bits / (8 · 2^20)`.
pub fn mbytes(bits: u64) -> f64 {
    mbits(bits) / 8.0
}

/// One row of the analysis grid.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisRow {
    pub n: u64,
    pub k: u64,
    pub p_bits: u64,
    pub modulus_bits: u64,
    pub garbled_value_bits: u64,
    pub bprime_xor: u64,
    pub bprime_and: u64,
    pub ot2_bits: u64,
    pub ot4_bits: u64,
    pub entry_ots: u64,
    pub entry_traffic_bits: u64,
    pub entry_traffic_mb: f64,
    pub b1: u64,
    pub b2: u64,
    pub b3: u64,
    pub b4: u64,
    pub random_bits: u64,
    pub random_mbits_per_entry: f64,
    pub gc_bits: u64,
    pub gc_mb: f64,
    pub client_bits: u64,
}

pub fn analyze(p: &CostParams) -> AnalysisRow {
    let (xor, and) = bprime_counts(p.n, p.k, true);
    let rb = random_bits(p);
    let t = entry_traffic(p.n, p.k, p.p_bits);
    let gc = gc_size_bits(p.gates, p.n, p.k);
    AnalysisRow {
        n: p.n,
        k: p.k,
        p_bits: p.p_bits,
        modulus_bits: p.modulus_bits,
        garbled_value_bits: p.garbled_value_bits(),
        bprime_xor: xor,
        bprime_and: and,
        ot2_bits: ot2_bits(p.p_bits, p.k),
        ot4_bits: ot4_bits(p.p_bits, p.k),
        entry_ots: entry_ot_count(p.n, p.k),
        entry_traffic_bits: t,
        entry_traffic_mb: mbytes(t),
        b1: rb.b1,
        b2: rb.b2,
        b3: rb.b3,
        b4: rb.b4,
        random_bits: rb.total(),
        random_mbits_per_entry: rb.per_entry_mbits(p.gates),
        gc_bits: gc,
        gc_mb: mbytes(gc),
        client_bits: client_bits(p),
    }
}
