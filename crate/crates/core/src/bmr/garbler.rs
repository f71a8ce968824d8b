use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::{BmrError, EntryLayout, GcShare, PartyWires};
use crate::bits::BitString;
use crate::circuit::{BooleanCircuit, TruthTable};
use crate::exec::Exec;
use crate::gmw::{GmwParty, GmwStats, Instance, PreparedCircuit, ShareKeys};
use crate::ot::SafePrimeGroup;
use crate::randomness::Expander;
use crate::simnet::Endpoint;

use super::build_entry_circuit;

/// Shared garbling parameters.
#[derive(Clone, Copy)]
pub struct GarbleParams<'a> {
    pub n: usize,
    pub k: usize,
    pub group: &'a SafePrimeGroup,
    pub exec: Exec,
    pub expander: &'a dyn Expander,
}

/// Entry circuits for every `(table, a, b)` that occurs in a circuit.
pub struct EntryCircuits {
    map: HashMap<(TruthTable, bool, bool), PreparedCircuit>,
}

impl EntryCircuits {
    pub fn for_circuit(circuit: &BooleanCircuit, n: usize, k: usize) -> Result<Self, BmrError> {
        let mut map = HashMap::new();
        for g in circuit.gates() {
            for ab in 0..4 {
                let key = (g.table, ab >> 1 == 1, ab & 1 == 1);
                if let Entry::Vacant(slot) = map.entry(key) {
                    slot.insert(PreparedCircuit::new(build_entry_circuit(n, k, key.0, key.1, key.2)?));
                }
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, table: TruthTable, a: bool, b: bool) -> &PreparedCircuit {
        &self.map[&(table, a, b)]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GarblerStats {
    pub bbs_bits: u64,
    pub g_bits: u64,
    pub r_bits: u64,
    pub gmw: GmwStats,
}

/// Party `me`'s part of the joint garbling: builds its private entry inputs
/// for every gate and row, runs the joint evaluation with the other
/// garblers, and returns its share of the garbled circuit.
#[allow(clippy::too_many_arguments)]
pub fn garble_share(
    ep: &mut Endpoint<'_>,
    circuit: &BooleanCircuit,
    entries: &EntryCircuits,
    params: GarbleParams<'_>,
    me: usize,
    wires: &PartyWires,
    keys: &ShareKeys,
    secret: [u8; 32],
) -> Result<(GcShare, GarblerStats), BmrError> {
    let GarbleParams { n, k, group, exec, .. } = params;
    let layout = EntryLayout::new(n, k);
    let m = layout.m();
    let gates = circuit.gates();
    let built = exec.map_range(4 * gates.len(), |idx| {
        let (gi, ab) = (idx / 4, idx % 4);
        let g = &gates[gi];
        let (a, b) = (ab >> 1 == 1, ab & 1 == 1);
        let (x, y, z) = (g.left.0, g.right.0, g.out.0);
        let sh = &wires.shares;
        let private = layout.private_vector(
            [sh[x].lambda, sh[y].lambda, sh[z].lambda],
            wires.expansion(x, a, b).as_bools(),
            wires.expansion(y, b, a).as_bools(),
            sh[z].share0.as_bools(),
            sh[z].share1.as_bools(),
        );
        let mut r_bits = 0;
        let mut input = Vec::with_capacity(n * m);
        for owner in 1..=n {
            input.extend(keys.share_inputs(
                owner,
                (owner == me).then_some(&private[..]),
                m,
                gi as u64,
                ab as u8,
                &mut r_bits,
            ));
        }
        (input, r_bits)
    });
    let mut r_bits = 0;
    let instances: Vec<Instance> = built
        .into_iter()
        .enumerate()
        .map(|(idx, (input_shares, r))| {
            r_bits += r;
            let g = &gates[idx / 4];
            Instance { circuit: entries.get(g.table, idx & 2 != 0, idx & 1 != 0), input_shares }
        })
        .collect();
    let party = GmwParty { me, n, group, ot_len: k, secret, exec };
    let (outs, gmw) = party.run(ep, &instances)?;
    let bits = BitString::from_bools(outs.concat());
    let stats = GarblerStats { bbs_bits: wires.bbs_bits, g_bits: wires.g_bits, r_bits, gmw };
    Ok((GcShare { party: me, bits }, stats))
}
