//! Construction and certification of entanglement-assisted codeword
//! stabilized (EACWS) quantum codes in which Bob's ebit halves are noisy too.
//!
//! The pipeline runs from a graph and an ebit count to standard-form word
//! stabilizers ([`construction`]), reduces single-qubit errors on both sides
//! to Z-only effective errors ([`effective`]), finds classical codes that
//! avoid every effective-error difference ([`search`]), turns codewords into
//! word operators ([`word_ops`]) and checks the result on dense state vectors
//! ([`kl`]). [`equivalence`] handles the separate check-matrix reduction that
//! relates `[[n,k,d]]` stabilizer codes to `[[n-c,k,d;c]]` entanglement-assisted ones,
//! and [`record`] ties a finished code to its verification and the shipped fixtures.

pub mod construction;
pub mod effective;
pub mod equivalence;
pub mod error;
pub mod gf2;
pub mod kl;
pub mod pauli;
pub mod record;
pub mod search;
pub mod word_ops;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec};
pub use pauli::{Pauli, PauliOperator, QubitLayout};
