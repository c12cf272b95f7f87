//! Scalar quantization of `Z_q` coefficients: Kyber's compress/decompress and
//! Lloyd-Max MMSE codebooks, with exact rational error statistics.

mod codebook;
mod compress;
mod lloyd_max;
mod pmf;

pub use codebook::{QuantCodebook, ScaledCodebook};
pub use compress::{compress, compress_error_pmf, compress_poly, decompress, decompress_poly};
pub use lloyd_max::{dp_optimal_quantizer, lloyd_max, lloyd_max_report, LloydMaxReport, DP_WORK_LIMIT};
pub use pmf::{DiscretePmf, ErrorPmf};

use crate::error::Result;
use crate::params::Q;

/// The Lloyd-Max codebook with `2^bits` levels for `x` uniform on `Z_q`.
pub fn uniform_codebook(bits: u32) -> Result<QuantCodebook> {
    lloyd_max(&DiscretePmf::uniform(Q)?, 1usize << bits)
}
