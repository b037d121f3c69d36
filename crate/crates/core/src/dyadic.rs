//! Exact dyadic rationals `numerator / 2^exponent`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitString;

/// `numerator / 2^exponent`, kept unreduced so that the denominator a value
/// was computed under (e.g. `2^L` for a partial halting probability) survives
/// into its textual form. Equality and ordering compare values.
#[derive(Clone, Debug)]
pub struct Dyadic {
    numerator: BigUint,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: impl Into<BigUint>, exponent: u32) -> Self {
        Dyadic { numerator: numerator.into(), exponent }
    }

    pub fn zero(exponent: u32) -> Self {
        Dyadic::new(BigUint::zero(), exponent)
    }

    pub fn integer(n: u64) -> Self {
        Dyadic::new(n, 0)
    }

    /// `0.b1 b2 ... bk` read as a binary fraction.
    pub fn from_binary_fraction(bits: &BitString) -> Self {
        let numerator =
            bits.bits().iter().fold(BigUint::zero(), |acc, &b| (acc << 1u32) + BigUint::from(b as u8));
        Dyadic { numerator, exponent: bits.len() as u32 }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.exponent
    }

    /// Adds `2^-k` in place. `k` must not exceed the exponent.
    pub fn add_pow2_neg(&mut self, k: u32) {
        assert!(k <= self.exponent, "2^-{k} not representable over 2^{}", self.exponent);
        self.numerator += BigUint::one() << (self.exponent - k);
    }

    fn aligned(&self, other: &Dyadic) -> (BigUint, BigUint) {
        let e = self.exponent.max(other.exponent);
        (&self.numerator << (e - self.exponent), &other.numerator << (e - other.exponent))
    }

    pub fn to_f64(&self) -> f64 {
        let n: f64 = self.numerator.to_string().parse().unwrap_or(f64::INFINITY);
        n / 2f64.powi(self.exponent as i32)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}
