//! Exact rational arithmetic helpers.
//!
//! All game data (chance probabilities, payoffs) and all exact solver output
//! are arbitrary-precision rationals. `num::BigRational` keeps every value in
//! lowest terms with a positive denominator after each operation, which is
//! exactly the invariant the rest of the crate relies on.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` as a rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders as `num/den` (always with the denominator, so that parsing is
/// unambiguous and files round-trip exactly).
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_ratio(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// Lossy conversion for reporting. Values in this crate stay well inside the
/// f64 range.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// found by walking the continued-fraction convergents (with the usual
/// semiconvergent correction at the cut-off). Used to lift float strategies
/// into exact arithmetic before certification.
pub fn approximate(x: f64, max_den: u64) -> Rational {
    assert!(max_den >= 1);
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let x = x.abs();

    // Convergents p/q of the continued fraction of x.
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut frac = x;
    loop {
        let a = frac.floor();
        if a > 1e30 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int.saturating_mul(p1).saturating_add(p0);
        let q2 = a_int.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den as u128 {
            // Largest semiconvergent with denominator within bound.
            let k = (max_den as u128 - q0) / q1.max(1);
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            let best = if qs > 0 {
                let semi = ps as f64 / qs as f64;
                let conv = p1 as f64 / q1.max(1) as f64;
                if (semi - x).abs() < (conv - x).abs() {
                    (ps, qs)
                } else {
                    (p1, q1)
                }
            } else {
                (p1, q1)
            };
            let r = Rational::new(BigInt::from(best.0), BigInt::from(best.1.max(1)));
            return if neg { -r } else { r };
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a;
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1.max(1)));
    if neg {
        -r
    } else {
        r
    }
}

/// Normalizes a nonnegative rational vector to sum 1. Returns `None` when the
/// sum is zero.
pub fn normalize(v: &mut [Rational]) -> Option<()> {
    let sum: Rational = v.iter().cloned().sum();
    if sum.is_zero() {
        return None;
    }
    for x in v.iter_mut() {
        *x = &*x / &sum;
    }
    Some(())
}

pub fn is_one(r: &Rational) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_roundtrip() {
        let r = ratio(731, 1782);
        assert_eq!(format_ratio(&r), "731/1782");
        assert_eq!(parse_ratio("731/1782").unwrap(), r);
        assert_eq!(parse_ratio("-3").unwrap(), int(-3));
        assert!(parse_ratio("1/0").is_none());
    }

    #[test]
    fn approximate_recovers_simple_fractions() {
        for (n, d) in [(1i64, 3i64), (5, 18), (731, 1782), (2, 3), (67, 120)] {
            let x = n as f64 / d as f64;
            assert_eq!(approximate(x, 1_000_000), ratio(n, d));
        }
        assert_eq!(approximate(0.0, 10), int(0));
        assert_eq!(approximate(-0.25, 100), ratio(-1, 4));
    }

    #[test]
    fn approximate_respects_denominator_bound() {
        let r = approximate(std::f64::consts::PI, 100);
        assert!(*r.denom() <= BigInt::from(100));
        assert!((to_f64(&r) - std::f64::consts::PI).abs() < 1e-3);
    }
}
