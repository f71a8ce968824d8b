//! n-party evaluation of Boolean circuits over XOR shares.
//!
//! Linear gates are evaluated locally. For an AND-class gate with input
//! shares `u_i, v_i` the identity
//!
//! ```text
//! (⊕u)(⊕v) = ⊕_{i<j} (u_i ⊕ u_j)(v_i ⊕ v_j)  ⊕  (n mod 2)·⊕_i u_i v_i
//! ```
//!
//! is used: every pair runs one 1-of-4 transfer in which the lower-indexed
//! party offers `ρ ⊕ (u_i ⊕ σ1)(v_i ⊕ σ2)` for all four `(σ1, σ2)` and the
//! higher-indexed party selects with its own shares. All AND gates at the
//! same AND-depth, across every circuit instance in a batch, share one
//! three-flight exchange per pair.

mod sharing;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::BitString;
use crate::circuit::BooleanCircuit;
use crate::exec::Exec;
use crate::ot::{Ot4Chooser, Ot4Flight1, Ot4Flight2, Ot4Flight3, Ot4Sender, OtError, SafePrimeGroup};
use crate::randomness::hash_bits;
use crate::simnet::{Endpoint, NetError, PartyId, Phase};

pub use sharing::{directional_seed, ShareKeys};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GmwError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("transfer with party {peer} in AND layer {layer} failed: {source}")]
    Ot { peer: usize, layer: usize, source: OtError },
    #[error("party {peer} sent {got} bytes in AND layer {layer}, expected {expected}")]
    FlightSize { peer: usize, layer: usize, expected: usize, got: usize },
    #[error("instance {instance} has {got} input shares, circuit expects {expected}")]
    InputArity { instance: usize, expected: usize, got: usize },
    #[error("AND layer {0} does not fit a 24-bit session tag")]
    TooDeep(usize),
}

/// A circuit with its gates grouped by AND-depth.
#[derive(Clone, Debug)]
pub struct PreparedCircuit {
    circuit: BooleanCircuit,
    /// `and_layers[d-1]`: AND-class gates at AND-depth `d`.
    and_layers: Vec<Vec<usize>>,
    /// `linear_layers[d]`: XOR-class gates at AND-depth `d`, in gate order.
    linear_layers: Vec<Vec<usize>>,
}

impl PreparedCircuit {
    pub fn new(circuit: BooleanCircuit) -> Self {
        let mut depth = vec![0usize; circuit.wire_count()];
        let mut and_layers: Vec<Vec<usize>> = Vec::new();
        let mut linear_layers: Vec<Vec<usize>> = vec![Vec::new()];
        for (gi, g) in circuit.gates().iter().enumerate() {
            let d = depth[g.left.0].max(depth[g.right.0]);
            if g.is_and_class() {
                if and_layers.len() <= d {
                    and_layers.resize(d + 1, Vec::new());
                }
                and_layers[d].push(gi);
                depth[g.out.0] = d + 1;
            } else {
                if linear_layers.len() <= d {
                    linear_layers.resize(d + 1, Vec::new());
                }
                linear_layers[d].push(gi);
                depth[g.out.0] = d;
            }
        }
        linear_layers.resize(and_layers.len() + 1, Vec::new());
        Self { circuit, and_layers, linear_layers }
    }

    pub fn circuit(&self) -> &BooleanCircuit {
        &self.circuit
    }

    /// Number of AND layers, i.e. rounds of transfers.
    pub fn and_depth(&self) -> usize {
        self.and_layers.len()
    }

    pub fn and_count(&self) -> usize {
        self.and_layers.iter().map(Vec::len).sum()
    }
}

/// One circuit evaluation within a batch: which circuit, and this party's
/// share of every input wire (in input order, constant wire included).
pub struct Instance<'c> {
    pub circuit: &'c PreparedCircuit,
    pub input_shares: Vec<bool>,
}

/// A party's fixed parameters for a batch.
pub struct GmwParty<'a> {
    /// Own index, 1-based.
    pub me: usize,
    pub n: usize,
    pub group: &'a SafePrimeGroup,
    /// Transfer message length; each offered bit is padded to this many bits.
    pub ot_len: usize,
    /// Private key for this party's transfer randomness and masks.
    pub secret: [u8; 32],
    pub exec: Exec,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GmwStats {
    pub ot_as_sender: u64,
    pub ot_as_chooser: u64,
    /// Transfer-internal random bits at declared sizes.
    pub ot_random_bits: u64,
    /// Fresh `ρ` bits drawn as sender.
    pub mask_bits: u64,
    pub rounds: u64,
}

/// `c1·u ⊕ c2·v ⊕ c0` with the constant applied by party 1 only.
pub fn eval_linear_share(table: crate::circuit::TruthTable, u: bool, v: bool, me: usize) -> bool {
    let a = table.anf();
    debug_assert!(!a.c3, "linear evaluation of an AND-class gate");
    (a.c1 & u) ^ (a.c2 & v) ^ (a.c0 & (me == 1))
}

fn pad(bit: bool, len: usize) -> BitString {
    let mut b = BitString::zeros(len);
    b.set(0, bit);
    b
}

impl GmwParty<'_> {
    fn session_rng(&self, tag: &[u8], layer: usize, peer: usize, index: usize) -> ChaCha20Rng {
        let mut h = Sha256::new();
        h.update(self.secret);
        h.update(tag);
        h.update((layer as u64).to_be_bytes());
        h.update((peer as u64).to_be_bytes());
        h.update((index as u64).to_be_bytes());
        ChaCha20Rng::from_seed(h.finalize().into())
    }

    fn rho(&self, layer: usize, peer: usize, index: usize) -> bool {
        let mut key = Vec::with_capacity(56);
        key.extend_from_slice(&self.secret);
        for x in [layer, peer, index] {
            key.extend_from_slice(&(x as u64).to_be_bytes());
        }
        hash_bits(b"gmw-rho", &[&key], 1).get(0)
    }

    fn recv_flight(
        &self,
        ep: &mut Endpoint<'_>,
        peer: usize,
        layer: usize,
        expected: usize,
    ) -> Result<Vec<u8>, GmwError> {
        let m = ep.recv_expect(PartyId::Garbler(peer), Phase::Ot, layer as u32)?;
        if m.body.len() != expected {
            return Err(GmwError::FlightSize { peer, layer, expected, got: m.body.len() });
        }
        Ok(m.body)
    }

    /// Runs the pairwise transfers for one AND layer. `uv` holds this
    /// party's input shares for each gate; returns the XOR of its pair
    /// sub-shares per gate.
    fn and_layer(
        &self,
        ep: &mut Endpoint<'_>,
        layer: usize,
        uv: &[(bool, bool)],
        stats: &mut GmwStats,
    ) -> Result<Vec<bool>, GmwError> {
        let (me, n, group, k) = (self.me, self.n, self.group, self.ot_len);
        let count = uv.len();
        let session =
            u32::try_from(layer).ok().filter(|&s| s <= crate::simnet::MAX_SESSION).ok_or(GmwError::TooDeep(layer))?;
        let ot_err = |peer| move |source| GmwError::Ot { peer, layer, source };
        let mut acc = vec![false; count];
        let higher: Vec<usize> = (me + 1..=n).collect();
        let lower: Vec<usize> = (1..me).collect();

        // flight 1: this party sends as the lower index
        let mut senders = Vec::with_capacity(higher.len());
        for &j in &higher {
            let started =
                self.exec.map_range(count, |t| Ot4Sender::start(group, &mut self.session_rng(b"start", layer, j, t)));
            let mut body = Vec::with_capacity(count * Ot4Flight1::encoded_len(group));
            for (_, f) in &started {
                f.encode(group, &mut body);
            }
            ep.send(PartyId::Garbler(j), Phase::Ot, session, body, count as u64 * Ot4Flight1::payload_bits(group))?;
            senders.push(started.into_iter().map(|(s, _)| s).collect::<Vec<_>>());
        }

        // flight 2: answer every lower-indexed sender
        let mut choosers = Vec::with_capacity(lower.len());
        for &j in &lower {
            let w = Ot4Flight1::encoded_len(group);
            let body = self.recv_flight(ep, j, layer, count * w)?;
            let flights = body
                .chunks(w)
                .map(|c| Ot4Flight1::decode(group, c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(ot_err(j))?;
            let answered = self
                .exec
                .map_range(count, |t| {
                    Ot4Chooser::respond(group, &flights[t], uv[t], &mut self.session_rng(b"choose", layer, j, t))
                })
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(ot_err(j))?;
            let mut out = Vec::with_capacity(count * Ot4Flight2::encoded_len(group));
            for (_, f) in &answered {
                f.encode(group, &mut out);
            }
            ep.send(PartyId::Garbler(j), Phase::Ot, session, out, count as u64 * Ot4Flight2::payload_bits(group))?;
            choosers.push(answered.into_iter().map(|(c, _)| c).collect::<Vec<_>>());
            stats.ot_as_chooser += count as u64;
            stats.ot_random_bits += count as u64 * Ot4Chooser::random_bits(group);
        }

        // flight 3: seal the four offers for every higher-indexed chooser
        for (&j, sessions) in higher.iter().zip(&senders) {
            let w = Ot4Flight2::encoded_len(group);
            let body = self.recv_flight(ep, j, layer, count * w)?;
            let flights = body
                .chunks(w)
                .map(|c| Ot4Flight2::decode(group, c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(ot_err(j))?;
            let sealed = self
                .exec
                .map_range(count, |t| {
                    let rho = self.rho(layer, j, t);
                    let (u, v) = uv[t];
                    let offers: [BitString; 4] =
                        std::array::from_fn(|s| pad(rho ^ ((u ^ (s >> 1 == 1)) & (v ^ (s & 1 == 1))), k));
                    sessions[t]
                        .finish(group, &flights[t], &offers, &mut self.session_rng(b"finish", layer, j, t))
                        .map(|f| (rho, f))
                })
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(ot_err(j))?;
            let mut out = Vec::with_capacity(count * Ot4Flight3::encoded_len(group, k));
            for (t, (rho, f)) in sealed.iter().enumerate() {
                acc[t] ^= rho;
                f.encode(group, &mut out);
            }
            ep.send(PartyId::Garbler(j), Phase::Ot, session, out, count as u64 * Ot4Flight3::payload_bits(group, k))?;
            stats.ot_as_sender += count as u64;
            stats.ot_random_bits += count as u64 * Ot4Sender::random_bits(group, k);
            stats.mask_bits += count as u64;
        }

        // unmask the selected offers
        for (&j, sessions) in lower.iter().zip(&choosers) {
            let w = Ot4Flight3::encoded_len(group, k);
            let body = self.recv_flight(ep, j, layer, count * w)?;
            let flights = body
                .chunks(w)
                .map(|c| Ot4Flight3::decode(group, k, c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(ot_err(j))?;
            let bits = self
                .exec
                .map_range(count, |t| sessions[t].finish(group, &flights[t]).map(|m| m.get(0)))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(ot_err(j))?;
            for (a, b) in acc.iter_mut().zip(bits) {
                *a ^= b;
            }
        }
        Ok(acc)
    }

    /// Evaluates every instance; returns this party's shares of each
    /// instance's output wires.
    pub fn run(
        &self,
        ep: &mut Endpoint<'_>,
        instances: &[Instance<'_>],
    ) -> Result<(Vec<Vec<bool>>, GmwStats), GmwError> {
        let mut stats = GmwStats::default();
        let mut wires: Vec<Vec<bool>> = Vec::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            let c = inst.circuit.circuit();
            if inst.input_shares.len() != c.inputs().len() {
                return Err(GmwError::InputArity {
                    instance: i,
                    expected: c.inputs().len(),
                    got: inst.input_shares.len(),
                });
            }
            let mut w = vec![false; c.wire_count()];
            for (wire, &b) in c.inputs().iter().zip(&inst.input_shares) {
                w[wire.0] = b;
            }
            wires.push(w);
        }
        let depth = instances.iter().map(|i| i.circuit.and_depth()).max().unwrap_or(0);
        let local_term = self.n % 2 == 1;
        for d in 0..=depth {
            if d > 0 {
                let mut refs = Vec::new();
                let mut uv = Vec::new();
                for (ii, inst) in instances.iter().enumerate() {
                    for &gi in inst.circuit.and_layers.get(d - 1).map(Vec::as_slice).unwrap_or(&[]) {
                        let g = &inst.circuit.circuit().gates()[gi];
                        refs.push((ii, gi));
                        uv.push((wires[ii][g.left.0], wires[ii][g.right.0]));
                    }
                }
                if !refs.is_empty() && self.n > 1 {
                    stats.rounds += 1;
                }
                let pair_shares =
                    if self.n > 1 { self.and_layer(ep, d, &uv, &mut stats)? } else { vec![false; refs.len()] };
                for (((ii, gi), (u, v)), p) in refs.into_iter().zip(uv).zip(pair_shares) {
                    let g = &instances[ii].circuit.circuit().gates()[gi];
                    let a = g.table.anf();
                    wires[ii][g.out.0] = p ^ (local_term & u & v) ^ (a.c1 & u) ^ (a.c2 & v) ^ (a.c0 & (self.me == 1));
                }
            }
            for (ii, inst) in instances.iter().enumerate() {
                let w = &mut wires[ii];
                for &gi in inst.circuit.linear_layers.get(d).map(Vec::as_slice).unwrap_or(&[]) {
                    let g = &inst.circuit.circuit().gates()[gi];
                    w[g.out.0] = eval_linear_share(g.table, w[g.left.0], w[g.right.0], self.me);
                }
            }
        }
        let outputs = instances
            .iter()
            .zip(&wires)
            .map(|(inst, w)| inst.circuit.circuit().outputs().iter().map(|o| w[o.0]).collect())
            .collect();
        Ok((outputs, stats))
    }
}

/// Derives a 32-byte private key from arbitrary party secret material.
pub fn party_secret(material: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"gmw-party-secret");
    h.update(material);
    h.finalize().into()
}
