//! Finite-field OFDM: global coded multiplexing over GF(2^s).
//!
//! `n·s` binary streams are locally encoded with a prime-length cyclic code
//! and its Hadamard equivalents, stacked into GF(2^s) composite words,
//! interleaved and passed through a Galois Fourier transform. The result is a
//! codeword of a QC-LDPC code whose binary parity-check matrix is the CPM
//! dispersion of the base code's check matrix, so the receiver can decode the
//! `s` binary layers independently with scaled min-sum before inverting the
//! transform.

pub mod channel;
pub mod config;
pub mod cyclic;
pub mod decoder;
pub mod error;
pub mod galois;
pub mod geometry;
pub mod sim;
pub mod txrx;

pub use error::{Error, Result};
