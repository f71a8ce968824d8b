//! Joint garbling: the per-entry circuit, the parties' share of the
//! garbled tables, the combiner, and a central reference construction.

mod dealer;
mod entry;
mod garbler;
mod types;
mod wires;

use thiserror::Error;

use crate::circuit::CircuitError;
use crate::gmw::GmwError;

pub use dealer::dealer_garble;
pub use entry::{build_entry_circuit, entry_counts_without_op, entry_value, EntryLayout};
pub use garbler::{garble_share, EntryCircuits, GarbleParams, GarblerStats};
pub use types::{combine_shares, GarbledCircuit, GcShare, GC_HEADER_BYTES};
pub use wires::{PartyWires, WireExpansion, WireSecrets};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BmrError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Gmw(#[from] GmwError),
    #[error("{what}: expected {expected}, got {got}")]
    Length { what: &'static str, expected: usize, got: usize },
    #[error("no share received from party {party}")]
    MissingShare { party: usize },
    #[error("share from party {party} has {got} bits, expected {expected}")]
    ShareLength { party: usize, expected: usize, got: usize },
}
