//! Exact scalars, polynomials in one variable, truncated q-series and dense
//! linear algebra over the rationals.

pub mod linalg;
pub mod poly;
pub mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use linalg::{Matrix, Span};
pub use poly::{interpolate_poly, Poly};
pub use series::{product_series, series_compare, CharacterSeries, Comparison, Factor, Progression};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Serializes as `numerator/denominator`, including integers (`3/1`).
pub fn format_rat(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `a/b` or a bare integer `a`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// `Some(n)` when `x` is an integer fitting in `i64`.
pub fn to_i64(x: &Rat) -> Option<i64> {
    if !is_integer(x) {
        return None;
    }
    i64::try_from(x.numer()).ok()
}

pub fn is_odd_integer(x: &Rat) -> bool {
    is_integer(x) && x.numer().abs() % 2u32 == BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings() {
        assert_eq!(format_rat(&rat(-2, 4)), "-1/2");
        assert_eq!(format_rat(&int(3)), "3/1");
        assert_eq!(parse_rat("7/5"), Some(rat(7, 5)));
        assert_eq!(parse_rat(" -4 "), Some(int(-4)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
    }

    #[test]
    fn parity() {
        assert!(is_odd_integer(&int(-3)));
        assert!(!is_odd_integer(&int(2)));
        assert!(!is_odd_integer(&rat(1, 3)));
    }
}
