//! Kyber CPA encryption with three ciphertext treatments: the standard
//! compression, Lloyd-Max quantization, and a semi-compressed form whose raw
//! second part carries a BCH-coded, Gray-mapped p-PAM plaintext. Alongside the
//! schemes sits the analysis engine for quantization error, decryption failure
//! rate and ciphertext expansion.

pub mod analysis;
pub mod coding;
pub mod error;
pub mod params;
pub mod pke;
pub mod quantization;
pub mod ring;
pub mod sampling;

pub use error::{Error, Result};
pub use params::{builtin_param_sets, cer, param_set_by_name, CodeSpec, ParamSet, Variant};
