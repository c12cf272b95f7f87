use rug::Float;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Gaussian tail `Q(x) = P(Z > x) = erfc(x / sqrt 2) / 2`.
pub fn gaussian_tail(x: &Float, prec: u32) -> Float {
    let sqrt2 = Float::with_val(prec, 2).sqrt();
    Float::with_val(prec, x / &sqrt2).erfc() / 2
}

/// Marcum `Q_{1/2}(a, b)` via `Q(b - a) + Q(b + a)`.
///
/// This is `P(|X| > b)` for `X ~ N(a, 1)`; MPFR's exponent range keeps tails
/// far below `2^-1000` representable.
pub fn marcum_q_half(a: &Float, b: &Float, prec: u32) -> Float {
    let lo = Float::with_val(prec, b - a);
    let hi = Float::with_val(prec, b + a);
    gaussian_tail(&lo, prec) + gaussian_tail(&hi, prec)
}

pub fn marcum_q_half_f64(a: f64, b: f64) -> f64 {
    let prec = 128;
    marcum_q_half(&Float::with_val(prec, a), &Float::with_val(prec, b), prec).to_f64()
}
