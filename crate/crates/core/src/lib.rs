//! Multi-party garbled-circuit construction with client-side verification.
//!
//! A client seeds `n` garblers with Blum-Blum-Shub parameters. The garblers
//! jointly compute XOR shares of every garbled-table entry with a
//! GMW-style protocol over 1-out-of-4 oblivious transfers, a combiner XORs
//! the shares, and an evaluator runs the result. Knowing the factorization
//! of the generator modulus, the client derives inputs and checks outputs
//! without replaying the generators.
//!
//! [`protocol::run_protocol`] drives the whole flow over the simulated
//! network in [`simnet`]; [`cost`] predicts its traffic and randomness.

pub mod bits;
pub mod bmr;
pub mod circuit;
pub mod client;
pub mod cost;
pub mod evaluator;
pub mod exec;
pub mod gmw;
pub mod ot;
pub mod protocol;
pub mod randomness;
pub mod simnet;

pub use protocol::{run_protocol, ProtocolConfig, ProtocolError, RunOutcome};
