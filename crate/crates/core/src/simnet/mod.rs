//! In-process network between the garblers, combiner, evaluator and client.
//!
//! Every party runs on its own thread and talks through [`Endpoint`]s. In
//! [`Schedule::Deterministic`] mode a single token is passed between the
//! threads, so exactly one party runs at a time and a party gives up the
//! token only when it blocks on an empty channel or returns. The next holder
//! is chosen by walking a seeded permutation of the parties, so a seed fixes
//! the whole interleaving. [`Schedule::Concurrent`] lets all threads run freely.

mod ledger;

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Condvar, Mutex, MutexGuard};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

pub use ledger::{Counters, PartyId, Phase, TrafficLedger};

/// Frame header: 4-byte body length, 1-byte phase, 3-byte session ordinal.
pub const FRAME_HEADER_BYTES: usize = 8;
pub const MAX_SESSION: u32 = (1 << 24) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("deadlock: every remaining party is waiting ({})", fmt_waits(.waiting))]
    Deadlock { waiting: Vec<(PartyId, PartyId)> },
    #[error("step bound {0} exceeded")]
    StepBound(u64),
    #[error("{at} waited on {from}, which finished without sending")]
    PeerFinished { at: PartyId, from: PartyId },
    #[error("no channel from {from} to {to}")]
    NoChannel { from: PartyId, to: PartyId },
    #[error("{party} is not part of this network")]
    UnknownParty { party: PartyId },
    #[error("message from {from}: expected {expected} session {session}, got {got_phase} session {got_session}")]
    Unexpected { from: PartyId, expected: Phase, session: u32, got_phase: Phase, got_session: u32 },
    #[error("frame field out of range: {0}")]
    Frame(String),
}

fn fmt_waits(w: &[(PartyId, PartyId)]) -> String {
    w.iter().map(|(a, b)| format!("{a} on {b}")).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub phase: Phase,
    pub session: u32,
    pub body: Vec<u8>,
    pub body_bits: u64,
}

struct Frame {
    header: [u8; FRAME_HEADER_BYTES],
    body: Vec<u8>,
    body_bits: u64,
}

impl Frame {
    fn new(phase: Phase, session: u32, body: Vec<u8>, body_bits: u64) -> Result<Self, NetError> {
        let len = u32::try_from(body.len()).map_err(|_| NetError::Frame(format!("body of {} bytes", body.len())))?;
        if session > MAX_SESSION {
            return Err(NetError::Frame(format!("session {session} needs more than 24 bits")));
        }
        let mut header = [0u8; FRAME_HEADER_BYTES];
        header[..4].copy_from_slice(&len.to_be_bytes());
        header[4] = phase.code();
        header[5..].copy_from_slice(&session.to_be_bytes()[1..]);
        Ok(Self { header, body, body_bits })
    }

    fn into_message(self) -> Message {
        let phase = Phase::from_code(self.header[4]).expect("header written by Frame::new");
        let session = u32::from_be_bytes([0, self.header[5], self.header[6], self.header[7]]);
        debug_assert_eq!(u32::from_be_bytes(self.header[..4].try_into().unwrap()) as usize, self.body.len());
        Message { phase, session, body: self.body, body_bits: self.body_bits }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub step: u64,
    pub from: String,
    pub to: String,
    pub phase: Phase,
    pub session: u32,
    pub bytes: usize,
    pub bits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Deterministic { seed: u64 },
    Concurrent,
}

#[derive(Clone, Debug)]
pub struct NetConfig {
    pub garblers: usize,
    pub schedule: Schedule,
    /// Upper bound on send plus receive operations across all parties.
    pub step_bound: u64,
}

impl NetConfig {
    pub fn deterministic(garblers: usize, seed: u64) -> Self {
        Self { garblers, schedule: Schedule::Deterministic { seed }, step_bound: 10_000_000 }
    }

    pub fn concurrent(garblers: usize) -> Self {
        Self { garblers, schedule: Schedule::Concurrent, step_bound: 10_000_000 }
    }

    /// Whether `from` may send to `to`.
    pub fn has_channel(&self, from: PartyId, to: PartyId) -> bool {
        use PartyId::*;
        let valid = |p: PartyId| match p {
            Garbler(i) => (1..=self.garblers).contains(&i),
            _ => true,
        };
        valid(from)
            && valid(to)
            && match (from, to) {
                (Garbler(i), Garbler(j)) => i != j,
                (Client, Garbler(_)) | (Client, Evaluator) => true,
                (Garbler(_), Combiner) | (Combiner, Evaluator) | (Evaluator, Client) => true,
                _ => false,
            }
    }
}

#[derive(Default)]
struct State {
    queues: HashMap<(PartyId, PartyId), VecDeque<Frame>>,
    ledger: TrafficLedger,
    received: HashMap<(PartyId, PartyId), u64>,
    trace: Vec<TraceEvent>,
    steps: u64,
    finished: HashSet<PartyId>,
    waiting: HashMap<PartyId, PartyId>,
    order: Vec<PartyId>,
    token: Option<PartyId>,
    error: Option<NetError>,
}

impl State {
    fn queue_nonempty(&self, from: PartyId, to: PartyId) -> bool {
        self.queues.get(&(from, to)).is_some_and(|q| !q.is_empty())
    }

    fn can_run(&self, p: PartyId) -> bool {
        !self.finished.contains(&p)
            && match self.waiting.get(&p) {
                None => true,
                Some(&from) => self.queue_nonempty(from, p) || self.finished.contains(&from),
            }
    }

    fn deadlock(&self) -> NetError {
        let mut waiting: Vec<_> = self.waiting.iter().map(|(&a, &b)| (a, b)).collect();
        waiting.sort();
        NetError::Deadlock { waiting }
    }

    /// Hands the token to the next runnable party after `me`.
    fn pass_token(&mut self, me: PartyId) {
        let pos = self.order.iter().position(|&p| p == me).unwrap_or(0);
        let n = self.order.len();
        let next = (1..=n).map(|d| self.order[(pos + d) % n]).find(|&p| self.can_run(p));
        self.token = next;
        if next.is_none() && self.finished.len() < n && self.error.is_none() {
            self.error = Some(self.deadlock());
        }
    }

    /// Concurrent-mode check: nobody can make progress.
    fn stalled(&self) -> bool {
        self.finished.len() < self.order.len() && self.order.iter().all(|&p| !self.can_run(p))
    }
}

struct Shared {
    config: NetConfig,
    state: Mutex<State>,
    cv: Condvar,
}

impl Shared {
    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn deterministic(&self) -> bool {
        matches!(self.config.schedule, Schedule::Deterministic { .. })
    }

    fn wait_for_turn<'a>(&'a self, mut st: MutexGuard<'a, State>, me: PartyId) -> MutexGuard<'a, State> {
        while self.deterministic() && st.token != Some(me) && st.error.is_none() {
            st = self.cv.wait(st).unwrap_or_else(|e| e.into_inner());
        }
        st
    }

    fn finish(&self, me: PartyId) {
        let mut st = self.lock();
        st.finished.insert(me);
        st.waiting.remove(&me);
        if self.deterministic() {
            if st.token == Some(me) {
                st.pass_token(me);
            }
        } else if st.stalled() && st.error.is_none() {
            st.error = Some(st.deadlock());
        }
        self.cv.notify_all();
    }
}

/// A party's handle on the network.
pub struct Endpoint<'a> {
    id: PartyId,
    shared: &'a Shared,
}

impl Endpoint<'_> {
    pub fn id(&self) -> PartyId {
        self.id
    }

    pub fn garblers(&self) -> usize {
        self.shared.config.garblers
    }

    pub fn send(
        &mut self,
        to: PartyId,
        phase: Phase,
        session: u32,
        body: Vec<u8>,
        body_bits: u64,
    ) -> Result<(), NetError> {
        if !self.shared.config.has_channel(self.id, to) {
            return Err(NetError::NoChannel { from: self.id, to });
        }
        let frame = Frame::new(phase, session, body, body_bits)?;
        let mut st = self.shared.lock();
        if let Some(e) = &st.error {
            return Err(e.clone());
        }
        st.steps += 1;
        if st.steps > self.shared.config.step_bound {
            let e = NetError::StepBound(self.shared.config.step_bound);
            st.error = Some(e.clone());
            self.shared.cv.notify_all();
            return Err(e);
        }
        let bytes = frame.body.len();
        st.ledger.record(
            phase,
            self.id,
            to,
            Counters {
                payload_bits: body_bits,
                payload_bytes: bytes as u64,
                framing_bytes: FRAME_HEADER_BYTES as u64,
                messages: 1,
            },
        );
        let step = st.steps;
        st.trace.push(TraceEvent {
            step,
            from: self.id.to_string(),
            to: to.to_string(),
            phase,
            session,
            bytes,
            bits: body_bits,
        });
        st.queues.entry((self.id, to)).or_default().push_back(frame);
        self.shared.cv.notify_all();
        Ok(())
    }

    /// Next message from `from`, blocking until one arrives.
    pub fn recv(&mut self, from: PartyId) -> Result<Message, NetError> {
        if !self.shared.config.has_channel(from, self.id) {
            return Err(NetError::NoChannel { from, to: self.id });
        }
        let me = self.id;
        let mut st = self.shared.lock();
        loop {
            if let Some(e) = &st.error {
                return Err(e.clone());
            }
            if let Some(frame) = st.queues.get_mut(&(from, me)).and_then(VecDeque::pop_front) {
                st.waiting.remove(&me);
                st.steps += 1;
                *st.received.entry((from, me)).or_default() += frame.body.len() as u64;
                return Ok(frame.into_message());
            }
            if st.finished.contains(&from) {
                st.waiting.remove(&me);
                return Err(NetError::PeerFinished { at: me, from });
            }
            st.waiting.insert(me, from);
            if self.shared.deterministic() {
                st.pass_token(me);
            } else if st.stalled() {
                st.error = Some(st.deadlock());
            }
            self.shared.cv.notify_all();
            st = self.shared.cv.wait(st).unwrap_or_else(|e| e.into_inner());
            st = self.shared.wait_for_turn(st, me);
        }
    }

    /// Receives and checks the phase and session tag.
    pub fn recv_expect(&mut self, from: PartyId, phase: Phase, session: u32) -> Result<Message, NetError> {
        let m = self.recv(from)?;
        if m.phase != phase || m.session != session {
            return Err(NetError::Unexpected {
                from,
                expected: phase,
                session,
                got_phase: m.phase,
                got_session: m.session,
            });
        }
        Ok(m)
    }
}

/// Marks the party finished even if its closure panics.
struct FinishGuard<'a> {
    id: PartyId,
    shared: &'a Shared,
}

impl Drop for FinishGuard<'_> {
    fn drop(&mut self) {
        self.shared.finish(self.id);
    }
}

pub type PartyFn<'s, T> = Box<dyn FnOnce(&mut Endpoint<'_>) -> T + Send + 's>;

#[derive(Debug)]
pub struct RunReport<T> {
    pub outputs: Vec<(PartyId, T)>,
    pub ledger: TrafficLedger,
    pub trace: Vec<TraceEvent>,
    pub steps: u64,
    /// Payload bytes still queued per channel when all parties returned.
    pub undelivered: Vec<((PartyId, PartyId), u64)>,
    /// Payload bytes delivered per channel.
    pub delivered: Vec<((PartyId, PartyId), u64)>,
}

impl<T> RunReport<T> {
    pub fn output(&self, id: PartyId) -> Option<&T> {
        self.outputs.iter().find(|(p, _)| *p == id).map(|(_, t)| t)
    }

    pub fn into_output(self, id: PartyId) -> Option<T> {
        self.outputs.into_iter().find(|(p, _)| *p == id).map(|(_, t)| t)
    }

    /// JSON-lines export of the message trace.
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|e| serde_json::to_string(e).expect("trace serializes") + "\n").collect()
    }
}

/// Runs every party to completion. Returns an error if the run deadlocked
/// or hit the step bound; errors a party observes itself (such as a peer
/// finishing early) are part of that party's output.
pub fn run<'s, T: Send + 's>(
    config: NetConfig,
    parties: Vec<(PartyId, PartyFn<'s, T>)>,
) -> Result<RunReport<T>, NetError> {
    let mut ids: Vec<PartyId> = parties.iter().map(|(p, _)| *p).collect();
    let mut seen = HashSet::new();
    for &p in &ids {
        if !seen.insert(p) || matches!(p, PartyId::Garbler(i) if i == 0 || i > config.garblers) {
            return Err(NetError::UnknownParty { party: p });
        }
    }
    ids.sort();
    let token = match config.schedule {
        Schedule::Deterministic { seed } => {
            ids.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
            ids.first().copied()
        }
        Schedule::Concurrent => None,
    };
    let shared =
        Shared { config, state: Mutex::new(State { order: ids, token, ..State::default() }), cv: Condvar::new() };
    let outputs = std::thread::scope(|s| {
        let handles: Vec<_> = parties
            .into_iter()
            .map(|(id, f)| {
                let shared = &shared;
                let h = s.spawn(move || {
                    let _guard = FinishGuard { id, shared };
                    drop(shared.wait_for_turn(shared.lock(), id));
                    f(&mut Endpoint { id, shared })
                });
                (id, h)
            })
            .collect::<Vec<_>>();
        handles
            .into_iter()
            .map(|(id, h)| (id, h.join().unwrap_or_else(|p| std::panic::resume_unwind(p))))
            .collect::<Vec<_>>()
    });
    let st = shared.state.into_inner().unwrap_or_else(|e| e.into_inner());
    if let Some(e) = st.error {
        return Err(e);
    }
    let mut undelivered: Vec<_> = st
        .queues
        .iter()
        .map(|(&k, q)| (k, q.iter().map(|f| f.body.len() as u64).sum::<u64>()))
        .filter(|&(_, b)| b > 0)
        .collect();
    undelivered.sort();
    let mut delivered: Vec<_> = st.received.into_iter().collect();
    delivered.sort();
    Ok(RunReport { outputs, ledger: st.ledger, trace: st.trace, steps: st.steps, undelivered, delivered })
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = Result<Vec<u8>, NetError>;

    fn ping_pong(schedule_seed: u64) -> RunReport<R> {
        let p1 = PartyId::Garbler(1);
        let p2 = PartyId::Garbler(2);
        let parties: Vec<(PartyId, PartyFn<R>)> = vec![
            (
                p1,
                Box::new(move |ep| {
                    let mut got = Vec::new();
                    for i in 0..5u8 {
                        ep.send(p2, Phase::Ot, i as u32, vec![i; 10], 80)?;
                        got.extend(ep.recv(p2)?.body);
                    }
                    Ok(got)
                }),
            ),
            (
                p2,
                Box::new(move |ep| {
                    let mut got = Vec::new();
                    for i in 0..5u8 {
                        let m = ep.recv_expect(p1, Phase::Ot, i as u32)?;
                        got.push(m.body[0]);
                        ep.send(p1, Phase::Ot, i as u32, vec![m.body[0] * 2], 8)?;
                    }
                    Ok(got)
                }),
            ),
        ];
        run(NetConfig::deterministic(2, schedule_seed), parties).unwrap()
    }

    #[test]
    fn ledger_counts_payload_and_framing() {
        let r = ping_pong(1);
        let c = r.ledger.channel_total(PartyId::Garbler(1), PartyId::Garbler(2));
        assert_eq!((c.payload_bytes, c.payload_bits, c.framing_bytes, c.messages), (50, 400, 40, 5));
        assert_eq!(r.output(PartyId::Garbler(1)).unwrap().as_ref().unwrap(), &vec![0, 2, 4, 6, 8]);
        assert_eq!(r.output(PartyId::Garbler(2)).unwrap().as_ref().unwrap(), &vec![0, 1, 2, 3, 4]);
        assert!(r.undelivered.is_empty());
        // conservation
        let sent = r.ledger.channel_total(PartyId::Garbler(1), PartyId::Garbler(2)).payload_bytes;
        assert_eq!(r.delivered.iter().find(|(k, _)| *k == (PartyId::Garbler(1), PartyId::Garbler(2))).unwrap().1, sent);
    }

    #[test]
    fn same_seed_same_trace() {
        for seed in 0..4 {
            let a = ping_pong(seed);
            let b = ping_pong(seed);
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.ledger, b.ledger);
            assert_eq!(a.trace_jsonl(), b.trace_jsonl());
        }
    }

    fn fifo_parties<'s>() -> Vec<(PartyId, PartyFn<'s, R>)> {
        let (a, b) = (PartyId::Client, PartyId::Evaluator);
        vec![
            (
                a,
                Box::new(move |ep| {
                    for i in 0..50u8 {
                        ep.send(b, Phase::GarbledInput, 0, vec![i], 8)?;
                    }
                    Ok(vec![])
                }),
            ),
            (b, Box::new(move |ep| (0..50).map(|_| ep.recv(a).map(|m| m.body[0])).collect())),
        ]
    }

    #[test]
    fn fifo_per_direction() {
        for config in [NetConfig::deterministic(1, 3), NetConfig::concurrent(1)] {
            let r = run(config, fifo_parties()).unwrap();
            assert_eq!(r.output(PartyId::Evaluator).unwrap().as_ref().unwrap(), &(0..50).collect::<Vec<u8>>());
        }
    }

    #[test]
    fn mutual_wait_is_a_deadlock() {
        for config in [NetConfig::deterministic(2, 0), NetConfig::concurrent(2)] {
            let parties: Vec<(PartyId, PartyFn<R>)> = vec![
                (PartyId::Garbler(1), Box::new(|ep| ep.recv(PartyId::Garbler(2)).map(|m| m.body))),
                (PartyId::Garbler(2), Box::new(|ep| ep.recv(PartyId::Garbler(1)).map(|m| m.body))),
            ];
            assert!(matches!(run(config, parties), Err(NetError::Deadlock { .. })));
        }
    }

    #[test]
    fn finished_peer_is_reported() {
        let parties: Vec<(PartyId, PartyFn<R>)> = vec![
            (PartyId::Garbler(1), Box::new(|_| Ok(vec![]))),
            (PartyId::Combiner, Box::new(|ep| ep.recv(PartyId::Garbler(1)).map(|m| m.body))),
        ];
        let r = run(NetConfig::deterministic(1, 9), parties).unwrap();
        assert_eq!(
            r.output(PartyId::Combiner).unwrap(),
            &Err(NetError::PeerFinished { at: PartyId::Combiner, from: PartyId::Garbler(1) })
        );
    }

    #[test]
    fn step_bound_stops_chatter() {
        let mut cfg = NetConfig::deterministic(2, 0);
        cfg.step_bound = 100;
        let parties: Vec<(PartyId, PartyFn<R>)> = vec![
            (
                PartyId::Garbler(1),
                Box::new(|ep| loop {
                    ep.send(PartyId::Garbler(2), Phase::Ot, 0, vec![], 0)?;
                }),
            ),
            (PartyId::Garbler(2), Box::new(|_| Ok(vec![]))),
        ];
        assert_eq!(run(cfg, parties).unwrap_err(), NetError::StepBound(100));
    }

    #[test]
    fn channels_follow_the_topology() {
        let cfg = NetConfig::deterministic(3, 0);
        assert!(cfg.has_channel(PartyId::Garbler(1), PartyId::Garbler(3)));
        assert!(!cfg.has_channel(PartyId::Garbler(1), PartyId::Garbler(4)));
        assert!(!cfg.has_channel(PartyId::Garbler(2), PartyId::Garbler(2)));
        assert!(!cfg.has_channel(PartyId::Evaluator, PartyId::Combiner));
        assert!(cfg.has_channel(PartyId::Client, PartyId::Garbler(2)));
        let parties: Vec<(PartyId, PartyFn<R>)> = vec![(
            PartyId::Evaluator,
            Box::new(|ep| ep.send(PartyId::Garbler(1), Phase::Ot, 0, vec![], 0).map(|_| vec![])),
        )];
        let r = run(cfg, parties).unwrap();
        assert!(matches!(r.outputs[0].1, Err(NetError::NoChannel { .. })));
    }

    #[test]
    fn oversized_session_rejected() {
        let parties: Vec<(PartyId, PartyFn<R>)> = vec![(
            PartyId::Client,
            Box::new(|ep| ep.send(PartyId::Evaluator, Phase::GarbledInput, MAX_SESSION + 1, vec![], 0).map(|_| vec![])),
        )];
        let r = run(NetConfig::deterministic(1, 0), parties).unwrap();
        assert!(matches!(r.outputs[0].1, Err(NetError::Frame(_))));
    }
}
