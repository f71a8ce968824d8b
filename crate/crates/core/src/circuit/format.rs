//! Circuit text formats.
//!
//! Native format, one record per line, `#` starts a comment:
//!
//! ```text
//! W W_i W_o N_g
//! IN <wire>                      (W_i lines, input order)
//! ONE <wire>                     (optional: the constant-one input)
//! G <left> <right> <out> <t0t1t2t3>
//! OUT <wire>                     (W_o lines, output order)
//! ```
//!
//! Files in the Bristol netlist format (`N_g W` header, gates such as
//! `2 1 a b out XOR` and `1 1 a out INV`) are imported as well. An INV/NOT
//! gate becomes a single-input XOR-class gate computing `1 ⊕ x`, so the wire
//! count is unchanged.

use std::collections::HashSet;
use std::fmt::Write as _;

use sha2::Digest;
use thiserror::Error;

use super::{BooleanCircuit, Gate, TruthTable, Wire};

const ADDER_32: &str = include_str!("../../data/adder_32bit.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("wire {0} is never defined")]
    UndefinedWire(usize),
    #[error("wire {0} is read before the gate that drives it")]
    NonTopological(usize),
    #[error("wire {0} is driven more than once")]
    DuplicateDriver(usize),
    #[error("unsupported gate type {0}")]
    UnsupportedGate(String),
    #[error("{0}")]
    Count(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn num(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| ParseError { line, kind: ParseErrorKind::Malformed(format!("expected a number, found {tok:?}")) })
}

/// Meaningful lines with 1-based line numbers, comments stripped.
fn records(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let toks: Vec<&str> = l.split_whitespace().collect();
            (!toks.is_empty()).then_some((i + 1, toks))
        })
        .collect()
}

/// Parses the native format or a Bristol netlist, detected from the header.
pub fn parse_circuit_file(text: &str) -> Result<BooleanCircuit, ParseError> {
    let recs = records(text);
    match recs.first() {
        None => err(1, ParseErrorKind::Malformed("empty circuit file".into())),
        Some((_, toks)) if toks.len() == 4 => parse_native(&recs),
        Some((_, toks)) if toks.len() == 2 => parse_bristol(&recs),
        Some((line, _)) => err(*line, ParseErrorKind::Malformed("unrecognized header".into())),
    }
}

struct RawGate {
    line: usize,
    left: usize,
    right: usize,
    out: usize,
    table: TruthTable,
}

fn assemble(
    header_line: usize,
    wire_count: usize,
    inputs: Vec<(usize, usize)>,
    const_one: Option<(usize, usize)>,
    gates: Vec<RawGate>,
    outputs: Vec<(usize, usize)>,
) -> Result<BooleanCircuit, ParseError> {
    let mut driven: HashSet<usize> = HashSet::new();
    for &(line, w) in &inputs {
        if w >= wire_count {
            return err(line, ParseErrorKind::UndefinedWire(w));
        }
        if !driven.insert(w) {
            return err(line, ParseErrorKind::DuplicateDriver(w));
        }
    }
    let all_outs: HashSet<usize> = gates.iter().map(|g| g.out).collect();
    let mut defined = driven.clone();
    for g in &gates {
        for w in [g.left, g.right] {
            if !defined.contains(&w) {
                let kind = if w < wire_count && all_outs.contains(&w) {
                    ParseErrorKind::NonTopological(w)
                } else {
                    ParseErrorKind::UndefinedWire(w)
                };
                return err(g.line, kind);
            }
        }
        if g.out >= wire_count {
            return err(g.line, ParseErrorKind::UndefinedWire(g.out));
        }
        if g.out == g.left || g.out == g.right || !defined.insert(g.out) {
            return err(g.line, ParseErrorKind::DuplicateDriver(g.out));
        }
    }
    for &(line, w) in &outputs {
        if !defined.contains(&w) {
            return err(line, ParseErrorKind::UndefinedWire(w));
        }
    }
    if let Some((line, w)) = const_one {
        if !driven.contains(&w) {
            return err(line, ParseErrorKind::Malformed(format!("constant-one wire {w} is not an input")));
        }
    }
    if defined.len() != wire_count {
        return err(
            header_line,
            ParseErrorKind::Count(format!("header declares {wire_count} wires, {} are defined", defined.len())),
        );
    }
    BooleanCircuit::new(
        wire_count,
        gates
            .iter()
            .map(|g| Gate { left: Wire(g.left), right: Wire(g.right), out: Wire(g.out), table: g.table })
            .collect(),
        inputs.iter().map(|&(_, w)| Wire(w)).collect(),
        outputs.iter().map(|&(_, w)| Wire(w)).collect(),
        const_one.map(|(_, w)| Wire(w)),
    )
    .map_err(|e| ParseError { line: header_line, kind: ParseErrorKind::Malformed(e.to_string()) })
}

fn parse_native(recs: &[(usize, Vec<&str>)]) -> Result<BooleanCircuit, ParseError> {
    let (hline, header) = &recs[0];
    let w = num(*hline, header[0])?;
    let wi = num(*hline, header[1])?;
    let wo = num(*hline, header[2])?;
    let ng = num(*hline, header[3])?;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut gates = Vec::new();
    let mut const_one = None;
    for (line, toks) in &recs[1..] {
        let line = *line;
        match (toks[0], toks.len()) {
            ("IN", 2) => inputs.push((line, num(line, toks[1])?)),
            ("OUT", 2) => outputs.push((line, num(line, toks[1])?)),
            ("ONE", 2) => {
                if const_one.is_some() {
                    return err(line, ParseErrorKind::Malformed("second ONE record".into()));
                }
                const_one = Some((line, num(line, toks[1])?));
            }
            ("G", 5) => {
                let t = toks[4];
                if t.len() != 4 || !t.chars().all(|c| c == '0' || c == '1') {
                    return err(line, ParseErrorKind::Malformed(format!("bad truth table {t:?}")));
                }
                let mut bits = 0u8;
                for (i, c) in t.chars().enumerate() {
                    if c == '1' {
                        bits |= 1 << i;
                    }
                }
                gates.push(RawGate {
                    line,
                    left: num(line, toks[1])?,
                    right: num(line, toks[2])?,
                    out: num(line, toks[3])?,
                    table: TruthTable(bits),
                });
            }
            _ => return err(line, ParseErrorKind::Malformed(toks.join(" "))),
        }
    }
    if inputs.len() != wi || outputs.len() != wo || gates.len() != ng {
        return err(
            *hline,
            ParseErrorKind::Count(format!(
                "header declares {wi} inputs, {wo} outputs, {ng} gates; found {}, {}, {}",
                inputs.len(),
                outputs.len(),
                gates.len()
            )),
        );
    }
    assemble(*hline, w, inputs, const_one, gates, outputs)
}

fn parse_bristol(recs: &[(usize, Vec<&str>)]) -> Result<BooleanCircuit, ParseError> {
    let (hline, header) = &recs[0];
    let ng = num(*hline, header[0])?;
    let w = num(*hline, header[1])?;
    let is_gate = |toks: &Vec<&str>| toks.last().is_some_and(|t| t.chars().all(|c| c.is_ascii_alphabetic()));
    let header_lines: Vec<&(usize, Vec<&str>)> = recs[1..].iter().take_while(|(_, t)| !is_gate(t)).collect();
    let (n_in, n_out) = match header_lines.as_slice() {
        // old format: "n1 n2 n_out"
        [(l, t)] if t.len() == 3 => (num(*l, t[0])? + num(*l, t[1])?, num(*l, t[2])?),
        // Bristol Fashion: "niv s_1 .. s_niv" / "nov o_1 .. o_nov"
        [(l1, t1), (l2, t2)] => {
            let sum = |l: usize, t: &[&str]| -> Result<usize, ParseError> {
                let k = num(l, t[0])?;
                if t.len() != k + 1 {
                    return err(l, ParseErrorKind::Malformed("size list does not match its count".into()));
                }
                t[1..].iter().map(|s| num(l, s)).sum()
            };
            (sum(*l1, t1)?, sum(*l2, t2)?)
        }
        _ => return err(*hline + 1, ParseErrorKind::Malformed("unrecognized Bristol header".into())),
    };
    let mut gates = Vec::with_capacity(ng);
    for (line, toks) in &recs[1 + header_lines.len()..] {
        let line = *line;
        let op = *toks.last().unwrap();
        let arity = |t: &[&str], nin: usize| -> Result<Vec<usize>, ParseError> {
            if t.len() != nin + 4 || num(line, t[0])? != nin || num(line, t[1])? != 1 {
                return err(line, ParseErrorKind::Malformed(t.join(" ")));
            }
            t[2..2 + nin + 1].iter().map(|s| num(line, s)).collect()
        };
        let g = match op {
            "XOR" | "AND" => {
                let v = arity(toks, 2)?;
                let table = if op == "XOR" { TruthTable::XOR } else { TruthTable::AND };
                RawGate { line, left: v[0], right: v[1], out: v[2], table }
            }
            "INV" | "NOT" => {
                let v = arity(toks, 1)?;
                RawGate { line, left: v[0], right: v[0], out: v[1], table: TruthTable::NOT_LEFT }
            }
            other => return err(line, ParseErrorKind::UnsupportedGate(other.to_string())),
        };
        gates.push(g);
    }
    if gates.len() != ng {
        return err(*hline, ParseErrorKind::Count(format!("header declares {ng} gates, found {}", gates.len())));
    }
    if n_in + n_out > w {
        return err(*hline, ParseErrorKind::Count("more inputs and outputs than wires".into()));
    }
    let inputs = (0..n_in).map(|i| (*hline, i)).collect();
    let outputs = (w - n_out..w).map(|i| (*hline, i)).collect();
    assemble(*hline, w, inputs, None, gates, outputs)
}

/// SHA-256 of the serialized circuit; binds messages to one topology.
pub fn circuit_digest(c: &BooleanCircuit) -> [u8; 32] {
    sha2::Sha256::digest(serialize_circuit(c).as_bytes()).into()
}

pub fn serialize_circuit(c: &BooleanCircuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {} {}", c.wire_count(), c.inputs().len(), c.outputs().len(), c.num_gates());
    for w in c.inputs() {
        let _ = writeln!(s, "IN {w}");
    }
    if let Some(w) = c.const_one() {
        let _ = writeln!(s, "ONE {w}");
    }
    for g in c.gates() {
        let _ = writeln!(s, "G {} {} {} {}", g.left, g.right, g.out, g.table.to_text());
    }
    for w in c.outputs() {
        let _ = writeln!(s, "OUT {w}");
    }
    s
}

/// The bundled 32-bit adder netlist (inputs `a[32]`, `b[32]`, outputs 33 bits).
pub fn bundled_adder_32() -> BooleanCircuit {
    parse_circuit_file(ADDER_32).expect("bundled adder parses")
}
