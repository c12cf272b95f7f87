//! The semi-compressed plaintext encoding: a shortened binary BCH code, Gray
//! mapping onto `p`-PAM symbols, and the inverse with rounding.

mod bch;
mod gf;
mod gray;

pub use bch::{BchCode, Decoded};
pub use gf::{default_primitive_poly, GF2mField};
pub use gray::{bits_per_symbol, gray_demap, gray_map, SymbolWord};

use rug::ops::RemRounding;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::params::N;

fn check_shape(code: &BchCode, p: u16) -> Result<()> {
    let b = bits_per_symbol(p)?;
    if code.spec().n != N * b {
        return Err(Error::Config(format!(
            "code length {} does not fill {N} symbols of {p}-PAM",
            code.spec().n
        )));
    }
    Ok(())
}

/// `m -> Gray(BCH(m))`.
pub fn enc_pipeline(message: &[u8], code: &BchCode, p: u16) -> Result<SymbolWord> {
    check_shape(code, p)?;
    gray_map(&code.encode(message)?, p)
}

/// Decodes already-rounded symbols.
pub fn dec_symbols(word: &SymbolWord, code: &BchCode) -> Result<Decoded> {
    check_shape(code, word.order())?;
    if word.len() != N {
        return Err(Error::Dimension { expected: N, actual: word.len() });
    }
    code.decode(&gray_demap(word))
}

/// Rounds each observation to the nearest integer (ties up), reduces mod
/// `p`, and decodes.
pub fn dec_pipeline(observations: &[Rational], code: &BchCode, p: u16) -> Result<Decoded> {
    if observations.len() != N {
        return Err(Error::Dimension { expected: N, actual: observations.len() });
    }
    let half = Rational::from((1, 2));
    let modulus = Integer::from(p);
    let symbols = observations
        .iter()
        .map(|y| {
            let rounded = Rational::from(y + &half).floor();
            let s = rounded.numer().clone().rem_euc(&modulus);
            s.to_u16().expect("residue below p")
        })
        .collect();
    dec_symbols(&SymbolWord::new(symbols, p)?, code)
}
