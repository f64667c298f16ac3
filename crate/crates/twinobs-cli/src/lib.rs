//! Support library for the `twinobs` command-line tool: flat-file fixtures,
//! deterministic random instance generation, and the self-test suite that
//! certifies the coherence-entropy and twin-observable identities end to
//! end.
//!
//! Everything here is plumbing around the [`twinobs`] library — numerics
//! live there; serialization, pseudo-randomness, aggregation, and process
//! concerns live here.

pub mod fixtures;
pub mod random;
pub mod selftest;
