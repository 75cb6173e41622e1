//! Exact non-negative dyadic numbers `M * 2^(-s)` and positional digit
//! extraction in bases of the form `2^alpha`.
//!
//! Every graph density here is a single power of two and every partition
//! function is a finite sum of them, so this domain is closed under all the
//! arithmetic the toolkit performs. Nothing ever rounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact value `mantissa * 2^(-shift)`.
///
/// Canonical form: either `shift == 0`, or the mantissa is odd; zero is
/// stored as `(0, 0)`. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigUint,
    shift: u64,
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic {
            mantissa: BigUint::zero(),
            shift: 0,
        }
    }

    pub fn one() -> Dyadic {
        Dyadic {
            mantissa: BigUint::one(),
            shift: 0,
        }
    }

    pub fn new(mantissa: BigUint, shift: u64) -> Dyadic {
        let mut d = Dyadic { mantissa, shift };
        d.normalize();
        d
    }

    pub fn from_natural<T: Into<BigUint>>(value: T) -> Dyadic {
        Dyadic::new(value.into(), 0)
    }

    /// Exactly `2^e`, for either sign of `e`.
    pub fn pow2(e: i64) -> Dyadic {
        if e >= 0 {
            Dyadic {
                mantissa: BigUint::one() << (e as u64),
                shift: 0,
            }
        } else {
            Dyadic {
                mantissa: BigUint::one(),
                shift: e.unsigned_abs(),
            }
        }
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.shift = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        let drop = tz.min(self.shift);
        if drop > 0 {
            self.mantissa >>= drop;
            self.shift -= drop;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    /// Integer part `floor(self)`.
    pub fn floor(&self) -> BigUint {
        &self.mantissa >> self.shift
    }

    /// Fractional part `self - floor(self)`.
    pub fn fract(&self) -> Dyadic {
        let int = self.floor() << self.shift;
        Dyadic::new(&self.mantissa - int, self.shift)
    }

    pub fn is_integer(&self) -> bool {
        self.shift == 0
    }

    /// Exact product with `2^e`; errors are impossible, the domain is closed.
    pub fn mul_pow2(&self, e: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if e >= 0 {
            let e = e as u64;
            let drop = e.min(self.shift);
            Dyadic::new(
                &self.mantissa << (e - drop),
                self.shift - drop,
            )
        } else {
            Dyadic {
                mantissa: self.mantissa.clone(),
                shift: self.shift + e.unsigned_abs(),
            }
        }
    }

    /// Exact difference, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Dyadic) -> Option<Dyadic> {
        let s = self.shift.max(other.shift);
        let a = &self.mantissa << (s - self.shift);
        let b = &other.mantissa << (s - other.shift);
        if a < b {
            None
        } else {
            Some(Dyadic::new(a - b, s))
        }
    }

    /// Mantissa scaled to `[0.5, 1)` plus a base-2 exponent, for lossy
    /// conversion of probability ratios. Zero maps to `(0.0, 0)`.
    pub fn frexp(&self) -> (f64, i64) {
        if self.is_zero() {
            return (0.0, 0);
        }
        let bits = self.mantissa.bits();
        let take = bits.min(64);
        let top: u64 = (&self.mantissa >> (bits - take))
            .try_into()
            .expect("fits in 64 bits");
        let mant = top as f64 / (1u128 << take) as f64;
        (mant, bits as i64 - self.shift as i64)
    }

    /// Lossy conversion; underflows to 0 and overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        let (m, e) = self.frexp();
        m * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, other: &Dyadic) -> Dyadic {
        let s = self.shift.max(other.shift);
        let a = &self.mantissa << (s - self.shift);
        let b = &other.mantissa << (s - other.shift);
        Dyadic::new(a + b, s)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, other: Dyadic) -> Dyadic {
        &self + &other
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, other: &Dyadic) -> Dyadic {
        Dyadic::new(
            &self.mantissa * &other.mantissa,
            self.shift + other.shift,
        )
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, other: Dyadic) -> Dyadic {
        &self * &other
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = &self.mantissa << other.shift;
        let b = &other.mantissa << self.shift;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    /// Serialized as `M*2^-s` with `M` decimal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^-{}", self.mantissa, self.shift)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Dyadic> {
        let (m, rest) = s
            .split_once("*2^-")
            .ok_or_else(|| Error::Parse(format!("expected M*2^-s, got {s:?}")))?;
        let mantissa: BigUint = m
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad mantissa {m:?}")))?;
        let shift: u64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad shift {rest:?}")))?;
        Ok(Dyadic::new(mantissa, shift))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sum an iterator of dyadics; any grouping gives the same exact result.
pub fn dyadic_sum<I: IntoIterator<Item = Dyadic>>(items: I) -> Dyadic {
    items.into_iter().fold(Dyadic::zero(), |acc, d| acc + d)
}

/// Digits `d_0 ... d_m` of a natural number in base `2^base_exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitVector {
    pub base_exponent: u64,
    #[serde(with = "biguint_decimal_vec")]
    pub digits: Vec<BigUint>,
}

impl DigitVector {
    /// `sum_i digits[i] * 2^(i * base_exponent)`.
    pub fn reconstruct(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for (i, d) in self.digits.iter().enumerate() {
            acc += d << (i as u64 * self.base_exponent);
        }
        acc
    }
}

mod biguint_decimal_vec {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Serializer>(
        v: &[BigUint],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(|d| d.to_string()).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigUint>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .into_iter()
            .map(|s| s.parse().map_err(|_| D::Error::custom("bad digit")))
            .collect()
    }
}

/// Digits `d_0 ... d_m` of `floor(z)` in base `2^alpha`, discarding the
/// fractional part.
///
/// Errors with [`Error::OverflowDigits`] when `floor(z) >= 2^((m+1) alpha)`,
/// i.e. the caller asked for too few digits.
pub fn integer_part_digits(z: &Dyadic, alpha: u64, m: usize) -> Result<DigitVector> {
    if alpha == 0 {
        return Err(Error::InvalidArgument("alpha must be >= 1".into()));
    }
    let mut rest = z.floor();
    let base_mask = (BigUint::one() << alpha) - BigUint::one();
    let mut digits = Vec::with_capacity(m + 1);
    for _ in 0..=m {
        digits.push(&rest & &base_mask);
        rest >>= alpha;
    }
    if !rest.is_zero() {
        return Err(Error::OverflowDigits(format!(
            "integer part needs more than {} digits in base 2^{alpha}",
            m + 1
        )));
    }
    Ok(DigitVector {
        base_exponent: alpha,
        digits,
    })
}

/// `floor(z / 2^from_bit)` as a natural number.
pub fn shift_window(z: &Dyadic, from_bit: u64) -> BigUint {
    z.mantissa() >> (z.shift() + from_bit)
}
