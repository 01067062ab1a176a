//! Closed-form lower bounds for δ-Lipschitz fillings.
//!
//! Discrete bounds are exact rationals; callers decide whether to use the
//! raw value or its ceiling. The area bound involves `√3` and is returned as
//! an `f64` accurate to about `1e-12` relative.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};

/// `1/(π√3)`: the hemisphere's normalized vertex density.
pub const DSTAR_UPPER: f64 = 0.183_776_298_473_930_6;
/// `1/8`: the asymptotic constant of the vertex bound.
pub const DSTAR_LOWER: f64 = 0.125;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("cycle length {0} < 3")]
    CycleTooShort(u64),
    #[error("delta {0} outside (0, 1]")]
    DeltaOutOfRange(String),
    #[error("circumference {0} is not positive")]
    NonPositiveLength(f64),
}

/// An exact bound together with its integer ceiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub exact: BigRational,
}

impl BoundValue {
    pub fn ceil(&self) -> BigInt {
        self.exact.ceil().to_integer()
    }

    pub fn ceil_i64(&self) -> i64 {
        self.ceil().to_i64().expect("bound ceiling fits in i64")
    }

    pub fn to_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn check(n: u64, delta: &Rational) -> Result<(), BoundsError> {
    if n < 3 {
        return Err(BoundsError::CycleTooShort(n));
    }
    if *delta <= Rational::zero() || *delta > Rational::one() {
        return Err(BoundsError::DeltaOutOfRange(rational::Display(delta).to_string()));
    }
    Ok(())
}

/// `δ³(n−1)²/8 + (n−1)/2` vertices.
pub fn vertex_lower_bound(n: u64, delta: &Rational) -> Result<BoundValue, BoundsError> {
    check(n, delta)?;
    let d = big(delta);
    let m = BigRational::from_integer(BigInt::from(n - 1));
    let exact = &d * &d * &d * &m * &m / BigRational::from_integer(8.into())
        + m / BigRational::from_integer(2.into());
    Ok(BoundValue { exact })
}

/// `δ³(n−1)²/4 + 1 − 2χ` triangles, with `χ` the Euler characteristic of the
/// closed-up complex.
pub fn triangle_lower_bound(n: u64, delta: &Rational, chi: i64) -> Result<BoundValue, BoundsError> {
    check(n, delta)?;
    let d = big(delta);
    let m = BigRational::from_integer(BigInt::from(n - 1));
    let exact = &d * &d * &d * &m * &m / BigRational::from_integer(4.into())
        + BigRational::from_integer(BigInt::from(1 - 2 * chi));
    Ok(BoundValue { exact })
}

/// `k(k+2)/2`: least total cycle distance of `k` pairs with distinct
/// endpoints on the two sides of a cut.
pub fn path_sum_bound(k: u64) -> Rational {
    let k = k as i64;
    Rational::new(k * (k + 2), 2)
}

/// `(√3/16)·δ³·ℓ²`.
pub fn continuous_area_bound(delta: f64, ell: f64) -> Result<f64, BoundsError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(BoundsError::DeltaOutOfRange(delta.to_string()));
    }
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(BoundsError::NonPositiveLength(ell));
    }
    Ok(3f64.sqrt() / 16.0 * delta.powi(3) * ell * ell)
}

/// `num_vertices / n²`.
pub fn dstar_ratio(num_vertices: u64, n: u64) -> Result<f64, BoundsError> {
    if n < 3 {
        return Err(BoundsError::CycleTooShort(n));
    }
    Ok(num_vertices as f64 / (n as f64 * n as f64))
}

/// Path count guaranteed by the separator argument: `⌈δ·⌊n/2⌋⌉ − 1`.
pub fn menger_path_floor(n: u64, delta: &Rational) -> i64 {
    let half = (n / 2) as i64;
    let v = *delta * Rational::from_integer(half);
    let (q, r) = v.numer().div_rem(v.denom());
    let ceil = if r > 0 { q + 1 } else { q };
    ceil - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Rational {
        Rational::from_integer(1)
    }

    fn br(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn vertex_bound_examples() {
        let b = vertex_lower_bound(9, &one()).unwrap();
        assert_eq!(b.exact, br(12, 1));
        assert_eq!(b.ceil_i64(), 12);

        let b = vertex_lower_bound(3, &one()).unwrap();
        assert_eq!(b.exact, br(3, 2));
        assert_eq!(b.ceil_i64(), 2);

        let b = vertex_lower_bound(10_000, &one()).unwrap();
        assert!((b.to_f64() / 1e8 - 0.125).abs() < 1e-3);
    }

    #[test]
    fn triangle_bound_examples() {
        assert_eq!(triangle_lower_bound(9, &one(), 2).unwrap().exact, br(13, 1));
        assert_eq!(triangle_lower_bound(3, &one(), 2).unwrap().exact, br(-2, 1));
    }

    #[test]
    fn triangle_bound_is_twice_vertex_bound_shifted() {
        for n in 3..40u64 {
            for (p, q) in [(1, 1), (1, 2), (2, 3), (7, 9), (1, 10)] {
                let d = Rational::new(p, q);
                for chi in -3..=2 {
                    let t = triangle_lower_bound(n, &d, chi).unwrap().exact;
                    let v = vertex_lower_bound(n, &d).unwrap().exact;
                    let rhs = v * br(2, 1) - br(n as i64, 1) + br(2 - 2 * chi, 1);
                    assert_eq!(t, rhs);
                }
            }
        }
    }

    #[test]
    fn vertex_bound_is_monotone() {
        let deltas: Vec<Rational> = (1..=12).map(|p| Rational::new(p, 12)).collect();
        for n in 3..60u64 {
            for w in deltas.windows(2) {
                let a = vertex_lower_bound(n, &w[0]).unwrap().exact;
                let b = vertex_lower_bound(n, &w[1]).unwrap().exact;
                assert!(a <= b);
            }
            for d in &deltas {
                let a = vertex_lower_bound(n, d).unwrap().exact;
                let b = vertex_lower_bound(n + 1, d).unwrap().exact;
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(vertex_lower_bound(2, &one()).is_err());
        assert!(vertex_lower_bound(5, &Rational::from_integer(0)).is_err());
        assert!(triangle_lower_bound(5, &Rational::new(5, 4), 2).is_err());
        assert!(continuous_area_bound(0.0, 1.0).is_err());
        assert!(continuous_area_bound(1.0, 0.0).is_err());
        assert!(dstar_ratio(12, 2).is_err());
    }

    #[test]
    fn path_sum_examples() {
        assert_eq!(path_sum_bound(1), Rational::new(3, 2));
        assert_eq!(path_sum_bound(2), Rational::from_integer(4));
        assert_eq!(path_sum_bound(0), Rational::from_integer(0));
    }

    #[test]
    fn area_bound_examples() {
        let pi = std::f64::consts::PI;
        let v = continuous_area_bound(1.0, 2.0 * pi).unwrap();
        assert!((v - 3f64.sqrt() / 4.0 * pi * pi).abs() < 1e-12);
        assert!((v - 4.2729).abs() < 1e-3);
        assert!((v / pi - 1.36).abs() < 5e-3);
        assert!((continuous_area_bound(1.0, 1.0).unwrap() - 0.108_253_175_473).abs() < 1e-12);
        assert!(continuous_area_bound(1e-9, 1.0).unwrap() < 1e-27);
    }

    #[test]
    fn dstar_constants() {
        assert!((DSTAR_UPPER - 1.0 / (std::f64::consts::PI * 3f64.sqrt())).abs() < 1e-15);
        assert!((DSTAR_UPPER - 0.1838).abs() < 1e-4);
        assert!((dstar_ratio(12, 9).unwrap() - 0.148_148).abs() < 1e-6);
    }

    #[test]
    fn menger_floor() {
        assert_eq!(menger_path_floor(8, &one()), 3);
        assert_eq!(menger_path_floor(9, &Rational::new(1, 2)), 1);
        assert_eq!(menger_path_floor(5, &Rational::new(2, 3)), 1);
    }
}
