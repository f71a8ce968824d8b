//! Central computation of the garbled circuit from every party's shares,
//! used as a reference for the distributed construction.

use super::{GarbledCircuit, WireSecrets};
use crate::bits::BitString;
use crate::circuit::BooleanCircuit;
use crate::randomness::Expander;

/// `A_ab = γ_s ⊕ ⊕_i G_b(α_ai) ⊕ ⊕_i G_a(β_bi)` with
/// `s = f(λx ⊕ a, λy ⊕ b) ⊕ λz`, for every gate and row.
pub fn dealer_garble(
    circuit: &BooleanCircuit,
    secrets: &WireSecrets,
    expander: &dyn Expander,
    circuit_digest: [u8; 32],
) -> GarbledCircuit {
    let (n, k) = (secrets.n, secrets.k);
    let half = n * k + 1;
    let tables = circuit
        .gates()
        .iter()
        .map(|g| {
            let (x, y, z) = (g.left.0, g.right.0, g.out.0);
            let (lx, ly, lz) = (secrets.lambda(x), secrets.lambda(y), secrets.lambda(z));
            std::array::from_fn(|ab| {
                let (a, b) = (ab >> 1 == 1, ab & 1 == 1);
                let s = g.table.eval(lx ^ a, ly ^ b) ^ lz;
                let mut row = secrets.garbled_value(z, s);
                for party in &secrets.shares {
                    let (l0, l1) = expander.g_pair(party[x].share(a), half);
                    row ^= if b { &l1 } else { &l0 };
                    let (r0, r1) = expander.g_pair(party[y].share(b), half);
                    row ^= if a { &r1 } else { &r0 };
                }
                row
            })
        })
        .collect::<Vec<[BitString; 4]>>();
    GarbledCircuit { n, k, circuit_digest, tables }
}
