//! The evaluator: runs a garbled circuit on garbled inputs.
//!
//! This module sees only the circuit topology, the garbled tables, the
//! garbled input values and the public expander. It has no access to seeds,
//! mask shares or the generator trapdoor.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::bmr::GarbledCircuit;
use crate::circuit::BooleanCircuit;
use crate::exec::Exec;
use crate::randomness::Expander;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expected {expected} garbled inputs, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("garbled value for input {index} has {got} bits, expected {expected}")]
    ValueLength { index: usize, expected: usize, got: usize },
    #[error("garbled circuit has {got} tables, circuit has {expected} gates")]
    GateCount { expected: usize, got: usize },
}

/// Misbehaviour injected into the returned outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheatMode {
    /// Replace every output with uniformly random bits.
    RandomOutputs { seed: u64 },
    /// Honest evaluation, then flip bit `position` of output `output`.
    FlipBit { output: usize, position: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Expander invocations; each yields both halves for one key share.
    pub g_calls: u64,
}

/// Honest evaluation. Returns one garbled value per output wire.
pub fn evaluate(
    circuit: &BooleanCircuit,
    gc: &GarbledCircuit,
    inputs: &[BitString],
    expander: &dyn Expander,
    exec: Exec,
) -> Result<(Vec<BitString>, EvalStats), EvalError> {
    if gc.num_gates() != circuit.num_gates() {
        return Err(EvalError::GateCount { expected: circuit.num_gates(), got: gc.num_gates() });
    }
    if inputs.len() != circuit.inputs().len() {
        return Err(EvalError::InputArity { expected: circuit.inputs().len(), got: inputs.len() });
    }
    let (n, k) = (gc.n, gc.k);
    let v = gc.value_bits();
    if let Some((index, got)) = inputs.iter().enumerate().find(|(_, x)| x.len() != v).map(|(i, x)| (i, x.len())) {
        return Err(EvalError::ValueLength { index, expected: v, got });
    }

    let wc = circuit.wire_count();
    let mut values: Vec<Option<BitString>> = vec![None; wc];
    for (w, x) in circuit.inputs().iter().zip(inputs) {
        values[w.0] = Some(x.clone());
    }
    // Expansions of the n key shares of each resolved wire, computed once.
    let mut expanded: Vec<Option<Vec<(BitString, BitString)>>> = vec![None; wc];
    let expand = |x: &BitString| -> Vec<(BitString, BitString)> {
        (0..n).map(|i| expander.g_pair(&x.slice(i * k..(i + 1) * k), v)).collect()
    };
    let mut stats = EvalStats::default();

    for level in levels(circuit) {
        let fresh: Vec<usize> = {
            let mut ws: Vec<usize> = level
                .iter()
                .flat_map(|&g| [circuit.gates()[g].left.0, circuit.gates()[g].right.0])
                .filter(|&w| expanded[w].is_none())
                .collect();
            ws.sort_unstable();
            ws.dedup();
            ws
        };
        let exps = exec.map(&fresh, |&w| expand(values[w].as_ref().expect("wire resolved")));
        stats.g_calls += (fresh.len() * n) as u64;
        for (w, e) in fresh.into_iter().zip(exps) {
            expanded[w] = Some(e);
        }
        let outs = exec.map(&level, |&g| {
            let gate = &circuit.gates()[g];
            let (x, y) = (gate.left.0, gate.right.0);
            let a = values[x].as_ref().expect("resolved").lsb();
            let b = values[y].as_ref().expect("resolved").lsb();
            let mut gamma = gc.tables[g][2 * a as usize + b as usize].clone();
            for (g0, g1) in expanded[x].as_ref().expect("expanded") {
                gamma ^= if b { g1 } else { g0 };
            }
            for (g0, g1) in expanded[y].as_ref().expect("expanded") {
                gamma ^= if a { g1 } else { g0 };
            }
            gamma
        });
        for (&g, out) in level.iter().zip(outs) {
            values[circuit.gates()[g].out.0] = Some(out);
        }
    }

    let outputs = circuit.outputs().iter().map(|w| values[w.0].clone().expect("output resolved")).collect();
    Ok((outputs, stats))
}

/// Evaluation with optional misbehaviour; `None` is [`evaluate`].
pub fn evaluate_cheating(
    circuit: &BooleanCircuit,
    gc: &GarbledCircuit,
    inputs: &[BitString],
    expander: &dyn Expander,
    exec: Exec,
    mode: Option<CheatMode>,
) -> Result<(Vec<BitString>, EvalStats), EvalError> {
    let (mut outs, stats) = evaluate(circuit, gc, inputs, expander, exec)?;
    match mode {
        None => {}
        Some(CheatMode::RandomOutputs { seed }) => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            for o in &mut outs {
                *o = BitString::random(&mut rng as &mut dyn RngCore, o.len());
            }
        }
        Some(CheatMode::FlipBit { output, position }) => {
            if let Some(o) = outs.get_mut(output) {
                if position < o.len() {
                    o.flip(position);
                }
            }
        }
    }
    Ok((outs, stats))
}

/// Gates grouped by depth; gates in a group depend only on earlier groups.
fn levels(circuit: &BooleanCircuit) -> Vec<Vec<usize>> {
    let mut depth = vec![0usize; circuit.wire_count()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        let d = depth[g.left.0].max(depth[g.right.0]);
        depth[g.out.0] = d + 1;
        if out.len() <= d {
            out.resize_with(d + 1, Vec::new);
        }
        out[d].push(i);
    }
    out
}
