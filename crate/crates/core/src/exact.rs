//! Exact rational helpers.
//!
//! Ratios of set sizes are kept as `Ratio<u128>` until they reach a report.

use num_rational::Ratio;

/// Exact nonnegative rational.
pub type Exact = Ratio<u128>;

/// Build `num / den` as an exact ratio. `den` must be nonzero.
pub fn ratio(num: u128, den: u128) -> Exact {
    Ratio::new(num, den)
}

/// Lossy conversion for reports.
pub fn to_f64(r: &Exact) -> f64 {
    // Reduce before converting so huge but equal numerators/denominators stay accurate.
    let (n, d) = (r.numer(), r.denom());
    if *n == 0 {
        return 0.0;
    }
    let shift = (128 - n.leading_zeros()).max(128 - d.leading_zeros()).saturating_sub(100);
    (*n >> shift) as f64 / (*d >> shift) as f64
}

/// `base^exp` with overflow detection.
pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}
