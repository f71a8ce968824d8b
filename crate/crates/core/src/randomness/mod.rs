//! Pseudorandomness: the Blum-Blum-Shub generator with its trapdoor shortcut,
//! the per-wire share layout, and the keyed expanders `G` and `R`.

mod bbs;
mod expander;
mod layout;
mod primes;

use thiserror::Error;

pub use bbs::{bbs_bit_at, bbs_bit_at_counted, BbsPublic, BbsState, BbsTrapdoor};
pub use expander::{expand_g, expand_g_pair, expand_r, hash_bits, AesExpander, Expander, ZeroExpander};
pub use layout::{derive_wire_shares, WireShare, WireShareLayout};
pub use primes::{generate_trapdoor, is_probable_prime, random_blum_prime, random_seed};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomnessError {
    #[error("bit index {0} is out of range (generator output starts at index 1)")]
    Index(u64),
    #[error("expander key must be {expected} bits, got {got}")]
    KeyLength { expected: usize, got: usize },
    #[error("invalid modulus: {0}")]
    Modulus(String),
    #[error("seed is not a unit modulo N")]
    Seed,
    #[error("no suitable {bits}-bit prime found after {attempts} attempts")]
    PrimeGeneration { bits: u64, attempts: usize },
}
