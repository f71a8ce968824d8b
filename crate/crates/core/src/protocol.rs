//! The complete flow over the simulated network: the client seeds the
//! garblers, the garblers jointly garble and send their shares to the
//! combiner, the combiner forwards the circuit to the evaluator, the client
//! sends garbled inputs, and the evaluator returns garbled outputs for the
//! client to verify.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::bmr::{
    combine_shares, garble_share, BmrError, EntryCircuits, GarbleParams, GarbledCircuit, GarblerStats, GcShare,
    PartyWires,
};
use crate::circuit::{circuit_digest, BooleanCircuit};
use crate::client::{recover_and_verify, Client, ClientError, ClientLedger, SeedMessage, Verification};
use crate::cost::{predict_phase_bits, CostParams};
use crate::evaluator::{evaluate_cheating, CheatMode, EvalError, EvalStats};
use crate::exec::Exec;
use crate::gmw::{party_secret, ShareKeys};
use crate::ot::SafePrimeGroup;
use crate::randomness::{AesExpander, BbsPublic, RandomnessError};
use crate::simnet::{run, Endpoint, NetConfig, NetError, PartyFn, PartyId, Phase, TrafficLedger};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("client: {0}")]
    Client(#[from] ClientError),
    #[error("network: {0}")]
    Net(#[from] NetError),
    #[error("garbling: {0}")]
    Bmr(#[from] BmrError),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("generator parameters: {0}")]
    Randomness(#[from] RandomnessError),
    #[error("garbler {party} was seeded for a different circuit")]
    DigestMismatch { party: usize },
    #[error("garbler {party} received inconsistent pairwise seeds")]
    PairSeeds { party: usize },
    #[error("{what} message has {got} bits, expected {expected}")]
    MessageLength { what: &'static str, expected: u64, got: u64 },
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub n: usize,
    pub k: usize,
    pub modulus_bits: u64,
    pub group: SafePrimeGroup,
    /// Seeds both the client's key generation and the scheduler.
    pub seed: u64,
    /// One thread per party with free interleaving instead of the
    /// reproducible token-passing schedule.
    pub concurrent: bool,
    pub exec: Exec,
    pub cheat: Option<CheatMode>,
    /// Garbler whose share never reaches the combiner.
    pub drop_share_from: Option<usize>,
}

impl ProtocolConfig {
    /// Small parameters that run in seconds.
    pub fn desk(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            modulus_bits: 128,
            group: SafePrimeGroup::tiny(),
            seed: 0,
            concurrent: false,
            exec: Exec::default(),
            cheat: None,
            drop_share_from: None,
        }
    }

    fn net(&self) -> NetConfig {
        if self.concurrent {
            NetConfig::concurrent(self.n)
        } else {
            NetConfig::deterministic(self.n, self.seed)
        }
    }
}

/// Everything observed in one run.
pub struct RunOutcome {
    pub verification: Verification,
    pub ledger: TrafficLedger,
    /// Payload bits per phase predicted by the cost model.
    pub predicted: Vec<(Phase, u64)>,
    pub client_ledger: ClientLedger,
    pub garbler_stats: Vec<GarblerStats>,
    pub eval_stats: EvalStats,
    pub steps: u64,
    pub trace_jsonl: String,
    /// The garbled circuit as the evaluator received it.
    pub gc: GarbledCircuit,
    pub client: Client,
}

impl RunOutcome {
    /// `(phase, measured payload bits, predicted payload bits)`.
    pub fn phase_comparison(&self) -> Vec<(Phase, u64, u64)> {
        self.predicted.iter().map(|&(ph, want)| (ph, self.ledger.phase_total(ph).payload_bits, want)).collect()
    }

    /// Evaluates further inputs on the same garbled circuit without the
    /// network. A deployment garbles afresh for every evaluation; this
    /// exists so tests can cover many inputs per garbling.
    pub fn evaluate_again(
        &mut self,
        circuit: &BooleanCircuit,
        user_bits: &[bool],
        cheat: Option<CheatMode>,
    ) -> Result<Verification, ProtocolError> {
        let inputs = self.client.garbled_inputs(circuit, user_bits)?;
        let (outs, _) = evaluate_cheating(circuit, &self.gc, &inputs, &AesExpander, Exec::Sequential, cheat)?;
        let expect = self.client.expect_outputs(circuit);
        Ok(recover_and_verify(&expect, &outs)?)
    }
}

enum PartyOutput {
    Garbler(GarblerStats),
    Combiner,
    Evaluator(Box<GarbledCircuit>, EvalStats),
    Client(Box<Client>, Verification),
}

type PartyResult = Result<PartyOutput, ProtocolError>;

/// Runs the whole flow once for `user_bits`.
pub fn run_protocol(
    circuit: &BooleanCircuit,
    user_bits: &[bool],
    cfg: &ProtocolConfig,
) -> Result<RunOutcome, ProtocolError> {
    let (n, k) = (cfg.n, cfg.k);
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let client = Client::setup(n, k, cfg.modulus_bits, &mut rng)?;
    let modulus_bits = client.modulus_bits();
    let digest = circuit_digest(circuit);
    let entries = EntryCircuits::for_circuit(circuit, n, k)?;
    let params = GarbleParams { n, k, group: &cfg.group, exec: cfg.exec, expander: &AesExpander };
    let user_bits = user_bits.to_vec();

    let mut parties: Vec<(PartyId, PartyFn<'_, PartyResult>)> = Vec::new();
    for me in 1..=n {
        let entries = &entries;
        let drop = cfg.drop_share_from == Some(me);
        parties.push((
            PartyId::Garbler(me),
            Box::new(move |ep| garbler(ep, circuit, entries, params, me, modulus_bits, digest, drop)),
        ));
    }
    parties.push((PartyId::Combiner, Box::new(move |ep| combiner(ep, n, k, digest, circuit.num_gates()))));
    let cheat = cfg.cheat;
    let exec = cfg.exec;
    parties.push((PartyId::Evaluator, Box::new(move |ep| evaluator(ep, circuit, cheat, exec))));
    parties.push((PartyId::Client, Box::new(move |ep| client_party(ep, client, circuit, &user_bits, digest))));

    let report = run(cfg.net(), parties)?;
    let trace_jsonl = report.trace_jsonl();
    let mut garbler_stats = Vec::new();
    let mut gc = None;
    let mut client_out = None;
    let mut eval_stats = EvalStats::default();
    let mut errors = Vec::new();
    for (id, out) in report.outputs {
        match out {
            Ok(PartyOutput::Garbler(s)) => garbler_stats.push(s),
            Ok(PartyOutput::Combiner) => {}
            Ok(PartyOutput::Evaluator(g, s)) => {
                gc = Some(*g);
                eval_stats = s;
            }
            Ok(PartyOutput::Client(c, v)) => client_out = Some((*c, v)),
            Err(e) => errors.push((id, e)),
        }
    }
    // A party that failed makes its downstream peers fail with
    // `PeerFinished`; report the original cause.
    if let Some((_, e)) =
        errors.iter().find(|(_, e)| !matches!(e, ProtocolError::Net(NetError::PeerFinished { .. }))).or(errors.first())
    {
        return Err(e.clone());
    }
    let (client, verification) = client_out.expect("client output present");
    let cost = CostParams::for_circuit(circuit, n, k, cfg.group.p_bits(), modulus_bits as u64);
    Ok(RunOutcome {
        verification,
        ledger: report.ledger,
        predicted: predict_phase_bits(circuit, &cost),
        client_ledger: client.ledger(),
        garbler_stats,
        eval_stats,
        steps: report.steps,
        trace_jsonl,
        gc: gc.expect("evaluator output present"),
        client,
    })
}

#[allow(clippy::too_many_arguments)]
fn garbler(
    ep: &mut Endpoint<'_>,
    circuit: &BooleanCircuit,
    entries: &EntryCircuits,
    params: GarbleParams<'_>,
    me: usize,
    modulus_bits: usize,
    digest: [u8; 32],
    drop_share: bool,
) -> PartyResult {
    let (n, k) = (params.n, params.k);
    let msg = ep.recv_expect(PartyId::Client, Phase::SeedDistribution, 0)?;
    let seeds = SeedMessage::decode(&msg.body, modulus_bits, n, k, me)?;
    if seeds.circuit_digest != digest {
        return Err(ProtocolError::DigestMismatch { party: me });
    }
    let secret = party_secret(&seeds.seed.to_bytes_be());
    let bbs = BbsPublic::new(seeds.modulus, seeds.seed)?;
    let wires = PartyWires::generate(&bbs, circuit, n, k, params.expander, params.exec);
    let pair: BTreeMap<usize, BitString> = seeds.pair_seeds.into_iter().collect();
    let keys = ShareKeys::new(me, n, &pair).ok_or(ProtocolError::PairSeeds { party: me })?;
    let (share, stats) = garble_share(ep, circuit, entries, params, me, &wires, &keys, secret)?;
    if !drop_share {
        ep.send(PartyId::Combiner, Phase::ShareExchange, 0, share.bits.to_bytes(), share.bits.len() as u64)?;
    }
    Ok(PartyOutput::Garbler(stats))
}

fn combiner(ep: &mut Endpoint<'_>, n: usize, k: usize, digest: [u8; 32], gates: usize) -> PartyResult {
    let mut shares = Vec::with_capacity(n);
    for i in 1..=n {
        match ep.recv_expect(PartyId::Garbler(i), Phase::ShareExchange, 0) {
            Ok(m) => {
                let len = (m.body_bits as usize).min(m.body.len() * 8);
                shares.push(Some(GcShare { party: i, bits: BitString::from_bytes(&m.body, len) }));
            }
            Err(NetError::PeerFinished { .. }) => shares.push(None),
            Err(e) => return Err(e.into()),
        }
    }
    let gc = combine_shares(n, k, digest, gates, &shares)?;
    let bits = crate::cost::GC_HEADER_BITS + gc.size_bits() as u64;
    ep.send(PartyId::Evaluator, Phase::GcTransfer, 0, gc.encode(), bits)?;
    Ok(PartyOutput::Combiner)
}

fn evaluator(ep: &mut Endpoint<'_>, circuit: &BooleanCircuit, cheat: Option<CheatMode>, exec: Exec) -> PartyResult {
    let gc = GarbledCircuit::decode(&ep.recv_expect(PartyId::Combiner, Phase::GcTransfer, 0)?.body)?;
    let v = gc.value_bits();
    let msg = ep.recv_expect(PartyId::Client, Phase::GarbledInput, 0)?;
    let want = (circuit.inputs().len() * v) as u64;
    if msg.body_bits != want {
        return Err(ProtocolError::MessageLength { what: "garbled input", expected: want, got: msg.body_bits });
    }
    let all = BitString::from_bytes(&msg.body, want as usize);
    let inputs: Vec<BitString> = (0..circuit.inputs().len()).map(|i| all.slice(i * v..(i + 1) * v)).collect();
    let (outs, stats) = evaluate_cheating(circuit, &gc, &inputs, &AesExpander, exec, cheat)?;
    let body = BitString::concat(&outs);
    ep.send(PartyId::Client, Phase::GarbledOutput, 0, body.to_bytes(), body.len() as u64)?;
    Ok(PartyOutput::Evaluator(Box::new(gc), stats))
}

fn client_party(
    ep: &mut Endpoint<'_>,
    mut client: Client,
    circuit: &BooleanCircuit,
    user_bits: &[bool],
    digest: [u8; 32],
) -> PartyResult {
    let (n, k) = (client.n(), client.k());
    let modulus_bits = client.modulus_bits();
    for i in 1..=n {
        let m = client.seed_message(i, digest);
        ep.send(
            PartyId::Garbler(i),
            Phase::SeedDistribution,
            0,
            m.encode(modulus_bits),
            SeedMessage::payload_bits(modulus_bits, n, k),
        )?;
    }
    let inputs = client.garbled_inputs(circuit, user_bits)?;
    let body = BitString::concat(&inputs);
    ep.send(PartyId::Evaluator, Phase::GarbledInput, 0, body.to_bytes(), body.len() as u64)?;
    let expect = client.expect_outputs(circuit);
    let v = n * k + 1;
    let msg = ep.recv_expect(PartyId::Evaluator, Phase::GarbledOutput, 0)?;
    let want = (expect.len() * v) as u64;
    if msg.body_bits != want {
        return Err(ProtocolError::MessageLength { what: "garbled output", expected: want, got: msg.body_bits });
    }
    let all = BitString::from_bytes(&msg.body, want as usize);
    let outs: Vec<BitString> = (0..expect.len()).map(|i| all.slice(i * v..(i + 1) * v)).collect();
    let verification = recover_and_verify(&expect, &outs)?;
    Ok(PartyOutput::Client(Box::new(client), verification))
}
