use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// A participant in the simulated deployment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PartyId {
    /// Garbling server `p_i`, numbered from 1.
    Garbler(usize),
    Combiner,
    Evaluator,
    Client,
}

impl PartyId {
    pub fn garbler_index(self) -> Option<usize> {
        match self {
            PartyId::Garbler(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Garbler(i) => write!(f, "p{i}"),
            PartyId::Combiner => f.write_str("pc"),
            PartyId::Evaluator => f.write_str("pe"),
            PartyId::Client => f.write_str("client"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    SeedDistribution,
    Ot,
    ShareExchange,
    GcTransfer,
    GarbledInput,
    GarbledOutput,
}

impl Phase {
    pub const ALL: [Phase; 6] = [
        Phase::SeedDistribution,
        Phase::Ot,
        Phase::ShareExchange,
        Phase::GcTransfer,
        Phase::GarbledInput,
        Phase::GarbledOutput,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Phase> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::SeedDistribution => "seed-distribution",
            Phase::Ot => "ot",
            Phase::ShareExchange => "share-exchange",
            Phase::GcTransfer => "gc-transfer",
            Phase::GarbledInput => "garbled-input",
            Phase::GarbledOutput => "garbled-output",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Traffic on one channel direction within one phase.
///
/// `payload_bits` is the declared information content of the message bodies
/// (group elements count `|p|` bits, bit strings their length); it is what
/// the cost formulas predict. `payload_bytes` is the encoded body size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub payload_bits: u64,
    pub payload_bytes: u64,
    pub framing_bytes: u64,
    pub messages: u64,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, o: Self) {
        self.payload_bits += o.payload_bits;
        self.payload_bytes += o.payload_bytes;
        self.framing_bytes += o.framing_bytes;
        self.messages += o.messages;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrafficLedger {
    entries: BTreeMap<(Phase, PartyId, PartyId), Counters>,
}

#[derive(Serialize)]
struct CsvRow {
    phase: Phase,
    from: String,
    to: String,
    payload_bits: u64,
    payload_bytes: u64,
    framing_bytes: u64,
    messages: u64,
}

impl TrafficLedger {
    pub fn record(&mut self, phase: Phase, from: PartyId, to: PartyId, counters: Counters) {
        *self.entries.entry((phase, from, to)).or_default() += counters;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Phase, PartyId, PartyId), &Counters)> {
        self.entries.iter()
    }

    pub fn phase_total(&self, phase: Phase) -> Counters {
        self.sum(|p, _, _| p == phase)
    }

    pub fn channel_total(&self, from: PartyId, to: PartyId) -> Counters {
        self.sum(|_, f, t| f == from && t == to)
    }

    pub fn total(&self) -> Counters {
        self.sum(|_, _, _| true)
    }

    pub fn sum(&self, pred: impl Fn(Phase, PartyId, PartyId) -> bool) -> Counters {
        let mut acc = Counters::default();
        for (&(p, f, t), c) in &self.entries {
            if pred(p, f, t) {
                acc += *c;
            }
        }
        acc
    }

    pub fn merge(&mut self, other: &TrafficLedger) {
        for (&(p, f, t), c) in &other.entries {
            self.record(p, f, t, *c);
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (&(phase, from, to), c) in &self.entries {
            w.serialize(CsvRow {
                phase,
                from: from.to_string(),
                to: to.to_string(),
                payload_bits: c.payload_bits,
                payload_bytes: c.payload_bytes,
                framing_bytes: c.framing_bytes,
                messages: c.messages,
            })
            .expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
    }
}
