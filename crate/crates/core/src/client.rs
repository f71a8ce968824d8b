//! The client: generator setup, garbled inputs through the factoring
//! shortcut, and recovery plus verification of the returned outputs.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use crate::bits::BitString;
use crate::circuit::{BooleanCircuit, CircuitError};
use crate::randomness::{
    bbs_bit_at_counted, generate_trapdoor, random_seed, BbsPublic, BbsTrapdoor, RandomnessError, WireShareLayout,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error(transparent)]
    Randomness(#[from] RandomnessError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("wire {0} is not an input wire")]
    NotInputWire(usize),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("malformed seed message: {0}")]
    SeedMessage(String),
    #[error("need at least one garbler and k >= 1")]
    Parameters,
}

/// Bits the client generates or sends, by purpose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClientLedger {
    /// `n|N| + n(n-1)k`: every seed plus each garbler's pairwise seeds.
    pub seed_bits: u64,
    /// `nk + n` per garbled input.
    pub input_bits: u64,
    /// `2nk + n` per output expectation.
    pub output_bits: u64,
    /// Generator bits read through the shortcut.
    pub shortcut_bits: u64,
    /// Modular multiplications spent by the shortcut.
    pub shortcut_mults: u64,
}

impl ClientLedger {
    pub fn total(&self) -> u64 {
        self.seed_bits + self.input_bits + self.output_bits
    }
}

/// What garbler `i` receives from the client: the public generator
/// parameters, a digest naming the circuit, and its pairwise seeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedMessage {
    pub modulus: BigUint,
    pub seed: BigUint,
    pub circuit_digest: [u8; 32],
    /// `(peer, seed)` for every other garbler, in peer order.
    pub pair_seeds: Vec<(usize, BitString)>,
}

impl SeedMessage {
    /// `2|N| + 256 + (n-1)k`.
    pub fn payload_bits(modulus_bits: usize, n: usize, k: usize) -> u64 {
        (2 * modulus_bits + 256 + (n - 1) * k) as u64
    }

    /// `N ∥ s_i` big-endian at `⌈|N|/8⌉` bytes each, the digest, then the
    /// pairwise seeds packed back to back.
    pub fn encode(&self, modulus_bits: usize) -> Vec<u8> {
        let width = modulus_bits.div_ceil(8);
        let mut out = Vec::new();
        for x in [&self.modulus, &self.seed] {
            let b = x.to_bytes_be();
            out.extend(std::iter::repeat_n(0, width.saturating_sub(b.len())));
            out.extend(b);
        }
        out.extend(self.circuit_digest);
        out.extend(BitString::concat(self.pair_seeds.iter().map(|(_, s)| s)).to_bytes());
        out
    }

    pub fn decode(bytes: &[u8], modulus_bits: usize, n: usize, k: usize, me: usize) -> Result<Self, ClientError> {
        let width = modulus_bits.div_ceil(8);
        let seeds_len = ((n - 1) * k).div_ceil(8);
        if bytes.len() != 2 * width + 32 + seeds_len {
            return Err(ClientError::SeedMessage(format!(
                "{} bytes, expected {}",
                bytes.len(),
                2 * width + 32 + seeds_len
            )));
        }
        let modulus = BigUint::from_bytes_be(&bytes[..width]);
        let seed = BigUint::from_bytes_be(&bytes[width..2 * width]);
        let circuit_digest = bytes[2 * width..2 * width + 32].try_into().expect("32 bytes");
        let all = BitString::from_bytes(&bytes[2 * width + 32..], (n - 1) * k);
        let pair_seeds =
            (1..=n).filter(|&j| j != me).enumerate().map(|(i, j)| (j, all.slice(i * k..(i + 1) * k))).collect();
        Ok(Self { modulus, seed, circuit_digest, pair_seeds })
    }
}

/// The client's two candidate garbled values and mask for one output wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputExpectation {
    pub wire: usize,
    pub values: [BitString; 2],
    pub lambda: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// The first output (by position) that matched neither candidate.
    Reject {
        output: usize,
        wire: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub verdict: Verdict,
    /// Plaintext outputs; present only when every output verified.
    pub plaintext: Option<Vec<bool>>,
    /// Positions of every mismatching output (diagnostics).
    pub mismatches: Vec<usize>,
}

impl Verification {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

/// Client state. The trapdoor never leaves this struct.
pub struct Client {
    n: usize,
    k: usize,
    trapdoor: BbsTrapdoor,
    seeds: Vec<BigUint>,
    pair_seeds: BTreeMap<(usize, usize), BitString>,
    ledger: ClientLedger,
}

impl Client {
    /// Generates `N = pq`, one seed per garbler and one seed per unordered
    /// pair of garblers.
    pub fn setup<R: RngCore + ?Sized>(n: usize, k: usize, modulus_bits: u64, rng: &mut R) -> Result<Self, ClientError> {
        let trapdoor = generate_trapdoor(modulus_bits, rng)?;
        Self::with_trapdoor(n, k, trapdoor, rng)
    }

    pub fn with_trapdoor<R: RngCore + ?Sized>(
        n: usize,
        k: usize,
        trapdoor: BbsTrapdoor,
        rng: &mut R,
    ) -> Result<Self, ClientError> {
        if n == 0 || k == 0 {
            return Err(ClientError::Parameters);
        }
        let seeds: Vec<BigUint> = (0..n).map(|_| random_seed(trapdoor.modulus(), rng)).collect();
        let mut pair_seeds = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                pair_seeds.insert((i, j), BitString::random(rng, k));
            }
        }
        let modulus_bits = trapdoor.modulus().bits();
        let ledger =
            ClientLedger { seed_bits: n as u64 * modulus_bits + (n * (n - 1) * k) as u64, ..Default::default() };
        Ok(Self { n, k, trapdoor, seeds, pair_seeds, ledger })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &BigUint {
        self.trapdoor.modulus()
    }

    pub fn modulus_bits(&self) -> usize {
        self.trapdoor.modulus().bits() as usize
    }

    pub fn ledger(&self) -> ClientLedger {
        self.ledger
    }

    /// Garbler `i`'s generator parameters (1-based).
    pub fn public(&self, i: usize) -> BbsPublic {
        BbsPublic::new(self.modulus().clone(), self.seeds[i - 1].clone()).expect("seed is a unit mod N")
    }

    pub fn pair_seed(&self, i: usize, j: usize) -> &BitString {
        &self.pair_seeds[&(i.min(j), i.max(j))]
    }

    pub fn seed_message(&self, i: usize, circuit_digest: [u8; 32]) -> SeedMessage {
        SeedMessage {
            modulus: self.modulus().clone(),
            seed: self.seeds[i - 1].clone(),
            circuit_digest,
            pair_seeds: (1..=self.n).filter(|&j| j != i).map(|j| (j, self.pair_seed(i, j).clone())).collect(),
        }
    }

    fn bit(&mut self, party: usize, j: u64) -> bool {
        let (b, mults) = bbs_bit_at_counted(&self.trapdoor, &self.seeds[party], j).expect("indices start at 1");
        self.ledger.shortcut_bits += 1;
        self.ledger.shortcut_mults += mults;
        b
    }

    fn bits(&mut self, party: usize, from: u64, len: usize) -> BitString {
        (0..len as u64).map(|t| self.bit(party, from + t)).collect()
    }

    /// Every garbler's mask share of `wire`, read through the shortcut.
    pub fn lambda_shares(&mut self, wire: usize) -> Vec<bool> {
        let layout = WireShareLayout::new(self.k);
        let j = layout.base(wire) + 2 * self.k as u64 + 1;
        (0..self.n).map(|p| self.bit(p, j)).collect()
    }

    /// `ω_b` with `b = x ⊕ λ_ω`: the `n` shares of the selected key plus the
    /// signal bit. Reads `nk + n` generator bits.
    pub fn garbled_input(&mut self, circuit: &BooleanCircuit, wire: usize, x: bool) -> Result<BitString, ClientError> {
        if !circuit.inputs().iter().any(|w| w.0 == wire) {
            return Err(ClientError::NotInputWire(wire));
        }
        let lambda = self.lambda_shares(wire).into_iter().fold(false, |a, b| a ^ b);
        let b = x ^ lambda;
        let base = WireShareLayout::new(self.k).base(wire) + 1 + if b { self.k as u64 } else { 0 };
        let mut v = BitString::default();
        for p in 0..self.n {
            v.extend_from(&self.bits(p, base, self.k));
        }
        v.push(b);
        self.ledger.input_bits += (self.n * self.k + self.n) as u64;
        Ok(v)
    }

    /// Garbled values for every input wire, in input order. `user_bits`
    /// excludes the constant-one wire, which is filled in here.
    pub fn garbled_inputs(
        &mut self,
        circuit: &BooleanCircuit,
        user_bits: &[bool],
    ) -> Result<Vec<BitString>, ClientError> {
        let all = circuit.assemble_inputs(user_bits)?;
        circuit.inputs().iter().zip(all).map(|(w, x)| self.garbled_input(circuit, w.0, x)).collect()
    }

    /// Both garbled values and the mask of every output wire. Reads
    /// `2nk + n` generator bits per output.
    pub fn expect_outputs(&mut self, circuit: &BooleanCircuit) -> Vec<OutputExpectation> {
        let layout = WireShareLayout::new(self.k);
        let k = self.k;
        circuit
            .outputs()
            .iter()
            .map(|w| {
                let base = layout.base(w.0) + 1;
                let mut v0 = BitString::default();
                let mut v1 = BitString::default();
                let mut lambda = false;
                for p in 0..self.n {
                    v0.extend_from(&self.bits(p, base, k));
                    v1.extend_from(&self.bits(p, base + k as u64, k));
                    lambda ^= self.bit(p, base + 2 * k as u64);
                }
                v0.push(false);
                v1.push(true);
                self.ledger.output_bits += (2 * self.n * k + self.n) as u64;
                OutputExpectation { wire: w.0, values: [v0, v1], lambda }
            })
            .collect()
    }
}

/// Accepts only if every returned value equals one of its wire's two
/// candidates; the plaintext is then `LSB ⊕ λ`.
pub fn recover_and_verify(expect: &[OutputExpectation], returned: &[BitString]) -> Result<Verification, ClientError> {
    if expect.len() != returned.len() {
        return Err(ClientError::Arity { expected: expect.len(), got: returned.len() });
    }
    let mut plaintext = Vec::with_capacity(expect.len());
    let mut mismatches = Vec::new();
    for (i, (e, r)) in expect.iter().zip(returned).enumerate() {
        if e.values.iter().any(|v| v == r) {
            plaintext.push(r.lsb() ^ e.lambda);
        } else {
            mismatches.push(i);
        }
    }
    let verdict = match mismatches.first() {
        None => Verdict::Accept,
        Some(&output) => Verdict::Reject { output, wire: expect[output].wire },
    };
    let plaintext = mismatches.is_empty().then_some(plaintext);
    Ok(Verification { verdict, plaintext, mismatches })
}

/// The mask values consistent with what a coalition knows: the XOR of its
/// members' shares combined with every assignment of the others' shares.
pub fn coalition_lambda_candidates(shares: &[bool], coalition: &[usize]) -> Vec<bool> {
    let known = coalition.iter().fold(false, |a, &i| a ^ shares[i]);
    let missing = shares.len() - coalition.len();
    let mut seen = Vec::new();
    for assignment in 0u64..1 << missing {
        let v = known ^ (assignment.count_ones() % 2 == 1);
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen.sort_unstable();
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::{derive_wire_shares, BbsState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn client(n: usize, k: usize) -> Client {
        Client::setup(n, k, 64, &mut ChaCha20Rng::seed_from_u64(11)).unwrap()
    }

    #[test]
    fn seed_ledger_matches_formula() {
        let c = client(3, 8);
        assert_eq!(c.ledger().seed_bits, 3 * 64 + 3 * 2 * 8);
        for i in 1..=3 {
            let p = c.public(i);
            assert_eq!(num_integer::Integer::gcd(&p.seed, &p.modulus), BigUint::from(1u32));
        }
    }

    #[test]
    fn full_size_seed_ledger() {
        // 3072-bit profile: setup and the shortcut only.
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let c = Client::setup(5, 128, 3072, &mut rng).unwrap();
        assert_eq!(c.ledger().seed_bits, 5 * (3072 + 4 * 128));
    }

    #[test]
    fn distinct_runs_give_distinct_moduli() {
        let a = Client::setup(2, 4, 64, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let b = Client::setup(2, 4, 64, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        assert_ne!(a.modulus(), b.modulus());
    }

    #[test]
    fn seed_message_roundtrip() {
        let c = client(4, 5);
        let m = c.seed_message(2, [9; 32]);
        let bytes = m.encode(c.modulus_bits());
        assert_eq!(SeedMessage::decode(&bytes, c.modulus_bits(), 4, 5, 2).unwrap(), m);
        assert_eq!(m.pair_seeds.iter().map(|(j, _)| *j).collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!(c.pair_seed(3, 2), c.pair_seed(2, 3));
        assert!(SeedMessage::decode(&bytes[1..], c.modulus_bits(), 4, 5, 2).is_err());
    }

    #[test]
    fn garbled_input_matches_sequential_generator() {
        let circuit = crate::circuit::build_adder(2).unwrap();
        let (n, k) = (3, 4);
        let mut c = client(n, k);
        let layout = WireShareLayout::new(k);
        let shares: Vec<Vec<_>> = (1..=n)
            .map(|i| {
                let mut st = BbsState::new(&c.public(i));
                layout.split_stream(&st.take(layout.total_bits(circuit.wire_count())))
            })
            .collect();
        for w in circuit.inputs() {
            let lambda = shares.iter().fold(false, |a, s| a ^ s[w.0].lambda);
            for x in [false, true] {
                let v = c.garbled_input(&circuit, w.0, x).unwrap();
                let b = x ^ lambda;
                let mut want = BitString::concat(shares.iter().map(|s| s[w.0].share(b)));
                want.push(b);
                assert_eq!(v, want);
            }
            assert_ne!(c.garbled_input(&circuit, w.0, false).unwrap(), c.garbled_input(&circuit, w.0, true).unwrap());
        }
        let led = c.ledger();
        assert_eq!(led.input_bits, 4 * circuit.inputs().len() as u64 * (n * k + n) as u64);
        assert_eq!(led.shortcut_bits, led.input_bits);
        let out = circuit.outputs()[0].0;
        assert_eq!(c.garbled_input(&circuit, out, true), Err(ClientError::NotInputWire(out)));
    }

    #[test]
    fn expectations_match_direct_derivation() {
        let circuit = crate::circuit::build_adder(3).unwrap();
        let (n, k) = (2, 3);
        let mut c = client(n, k);
        let ex = c.expect_outputs(&circuit);
        assert_eq!(ex.len(), circuit.outputs().len());
        assert_eq!(c.ledger().output_bits, (ex.len() * (2 * n * k + n)) as u64);
        let layout = WireShareLayout::new(k);
        for e in &ex {
            let per: Vec<_> =
                (1..=n).map(|i| derive_wire_shares(&c.trapdoor, &c.public(i).seed, layout, e.wire).unwrap()).collect();
            assert_eq!(e.lambda, per.iter().fold(false, |a, s| a ^ s.lambda));
            assert!(!e.values[0].lsb() && e.values[1].lsb());
            assert_eq!(e.values[1].slice(0..k), per[0].share1);
        }
    }

    #[test]
    fn verdicts() {
        let circuit = crate::circuit::build_adder(2).unwrap();
        let mut c = client(2, 4);
        let ex = c.expect_outputs(&circuit);
        let zeros: Vec<BitString> = ex.iter().map(|e| e.values[0].clone()).collect();
        let v = recover_and_verify(&ex, &zeros).unwrap();
        assert!(v.accepted());
        assert_eq!(v.plaintext.unwrap(), ex.iter().map(|e| e.lambda).collect::<Vec<_>>());

        let mut bad = zeros.clone();
        bad[1].flip(0);
        bad[2].flip(8);
        let v = recover_and_verify(&ex, &bad).unwrap();
        assert_eq!(v.verdict, Verdict::Reject { output: 1, wire: ex[1].wire });
        assert_eq!(v.mismatches, vec![1, 2]);
        assert_eq!(v.plaintext, None);
        assert_eq!(recover_and_verify(&ex, &zeros[1..]), Err(ClientError::Arity { expected: 3, got: 2 }));
    }

    #[test]
    fn coalitions_short_of_everyone_learn_nothing() {
        for shares in 0u8..8 {
            let s: Vec<bool> = (0..3).map(|i| shares >> i & 1 == 1).collect();
            for mask in 0u8..7 {
                let coalition: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
                assert_eq!(coalition_lambda_candidates(&s, &coalition), vec![false, true]);
            }
            let all = coalition_lambda_candidates(&s, &[0, 1, 2]);
            assert_eq!(all, vec![s[0] ^ s[1] ^ s[2]]);
        }
    }

    #[test]
    fn client_never_steps_the_generator() {
        let src = include_str!("client.rs");
        let head = &src[..src.find("#[cfg(test)]").unwrap()];
        assert!(!head.contains("BbsState") && !head.contains("next_bit"));
    }
}
