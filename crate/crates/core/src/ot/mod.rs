//! Naor-Pinkas 1-out-of-2 oblivious transfer and the 1-out-of-4 transfer
//! built from two of them.
//!
//! Each protocol is exposed both as a one-shot function (for tests and
//! benchmarks) and as per-party state machines whose flights the network
//! layer can batch.

mod group;
mod ot2;
mod ot4;

use thiserror::Error;

pub use group::SafePrimeGroup;
pub use ot2::{hash_to_bits, ot2, public_keys, Ot2Chooser, Ot2Cipher, Ot2Sender, Ot2Transcript};
pub use ot4::{keyed_mask, ot4, Ot4Chooser, Ot4Flight1, Ot4Flight2, Ot4Flight3, Ot4Sender, Ot4Transcript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OtError {
    #[error("invalid group: {0}")]
    Group(String),
    #[error("received {0} is not in the prime-order subgroup")]
    NotInSubgroup(&'static str),
    #[error("messages must be {expected} bits, got {got}")]
    MessageLength { expected: usize, got: usize },
    #[error("cannot decode flight: {0}")]
    Decode(String),
}

/// Byte width of a packed `k`-bit string.
pub(crate) fn bit_bytes(k: usize) -> usize {
    k.div_ceil(8)
}
