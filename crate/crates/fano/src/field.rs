//! Exact scalar fields: the rationals, prime fields and their quadratic extensions.
//!
//! Elements are plain values; all arithmetic goes through a field context so that a
//! prime field can be chosen at run time.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime used for all interpolation work: 2^31 - 1.
pub const INTERPOLATION_PRIME: u64 = 2_147_483_647;

/// Arithmetic context for a field whose elements are of type `Elem`.
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// A random element; for the rationals a small integer.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Number of elements, `None` when infinite.
    fn size(&self) -> Option<u64>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field of order `p`, an odd prime below 2^32.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p >= (1 << 32) || !is_prime(p) {
            return Err(Error::InvalidField(format!(
                "{p} is not an odd prime below 2^32"
            )));
        }
        Ok(Fp { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduce an arbitrary integer into `[0, p)`.
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_big(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = ((v % &p) + &p) % &p;
        r.to_u64().expect("residue fits")
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn lift(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn is_square(&self, a: u64) -> bool {
        a == 0 || self.pow(&a, (self.p - 1) / 2) == 1
    }

    /// Square root by Tonelli-Shanks, `None` for non-squares.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return Some(0);
        }
        if !self.is_square(a) {
            return None;
        }
        let p = self.p;
        if p % 4 == 3 {
            return Some(self.pow(&a, (p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while self.is_square(z) {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow(&z, q);
        let mut t = self.pow(&a, q);
        let mut r = self.pow(&a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul(&tt, &tt);
                i += 1;
            }
            let b = self.pow(&c, 1 << (m - i - 1));
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }

    /// Smallest quadratic non-residue.
    pub fn non_square(&self) -> u64 {
        (2..self.p)
            .find(|&a| !self.is_square(a))
            .expect("odd prime has a non-square")
    }
}

impl Field for Fp {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce(v)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on signed values
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Some(s0.rem_euclid(self.p as i64) as u64)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn size(&self) -> Option<u64> {
        Some(self.p)
    }
}

/// The field of order p^2, elements `a + b*s` with `s^2` a fixed non-square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2 {
    base: Fp,
    nonsq: u64,
}

impl Fp2 {
    pub fn new(p: u64) -> Result<Self> {
        let base = Fp::new(p)?;
        let nonsq = base.non_square();
        Ok(Fp2 { base, nonsq })
    }

    pub fn base(&self) -> Fp {
        self.base
    }

    pub fn non_square(&self) -> u64 {
        self.nonsq
    }

    pub fn embed(&self, a: u64) -> (u64, u64) {
        (a, 0)
    }

    /// Square root of an element of the base field, always present in the extension.
    pub fn sqrt_base(&self, a: u64) -> (u64, u64) {
        let f = &self.base;
        match f.sqrt(a) {
            Some(r) => (r, 0),
            None => {
                let q = f.div(&a, &self.nonsq).expect("non-square is nonzero");
                (0, f.sqrt(q).expect("a / s^2 is a square"))
            }
        }
    }
}

impl Field for Fp2 {
    type Elem = (u64, u64);

    fn zero(&self) -> (u64, u64) {
        (0, 0)
    }
    fn one(&self) -> (u64, u64) {
        (1, 0)
    }
    fn from_i64(&self, v: i64) -> (u64, u64) {
        (self.base.reduce(v), 0)
    }
    fn add(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        (self.base.add(&a.0, &b.0), self.base.add(&a.1, &b.1))
    }
    fn sub(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        (self.base.sub(&a.0, &b.0), self.base.sub(&a.1, &b.1))
    }
    fn mul(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        let f = &self.base;
        let re = f.add(&f.mul(&a.0, &b.0), &f.mul(&self.nonsq, &f.mul(&a.1, &b.1)));
        let im = f.add(&f.mul(&a.0, &b.1), &f.mul(&a.1, &b.0));
        (re, im)
    }
    fn neg(&self, a: &(u64, u64)) -> (u64, u64) {
        (self.base.neg(&a.0), self.base.neg(&a.1))
    }
    fn inv(&self, a: &(u64, u64)) -> Option<(u64, u64)> {
        let f = &self.base;
        let norm = f.sub(&f.mul(&a.0, &a.0), &f.mul(&self.nonsq, &f.mul(&a.1, &a.1)));
        let ni = f.inv(&norm)?;
        Some((f.mul(&a.0, &ni), f.neg(&f.mul(&a.1, &ni))))
    }
    fn is_zero(&self, a: &(u64, u64)) -> bool {
        a.0 == 0 && a.1 == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        (self.base.random(rng), self.base.random(rng))
    }
    fn size(&self) -> Option<u64> {
        Some(self.base.p * self.base.p)
    }
}

/// The rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-9..=9))
    }
    fn size(&self) -> Option<u64> {
        None
    }
}

/// Integer numerator of a rational known to be integral.
pub fn rational_to_i64(a: &BigRational) -> Option<i64> {
    if a.is_integer() {
        a.numer().to_i64()
    } else {
        None
    }
}

/// Run-time description of a scalar field, as stored in instance files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Rationals,
    Prime { p: u64 },
    PrimeSquare { p: u64 },
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::Prime { p } | FieldSpec::PrimeSquare { p } => Fp::new(*p).map(|_| ()),
        }
    }

    /// The prime field used for computations: the field itself, the prime subfield of a
    /// quadratic extension, or the interpolation prime for rational data.
    pub fn prime_field(&self) -> Fp {
        match self {
            FieldSpec::Rationals => Fp::new(INTERPOLATION_PRIME).expect("prime"),
            FieldSpec::Prime { p } | FieldSpec::PrimeSquare { p } => {
                Fp::new(*p).expect("validated")
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime { p } | FieldSpec::PrimeSquare { p } => *p,
        }
    }

    /// Parse `q`, `rationals`, `p=101`, `101`, `p2=101`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = if s == "q" || s == "Q" || s == "rationals" {
            FieldSpec::Rationals
        } else if let Some(rest) = s.strip_prefix("p2=").or_else(|| s.strip_prefix("p^2=")) {
            FieldSpec::PrimeSquare {
                p: parse_u64(rest)?,
            }
        } else {
            let rest = s.strip_prefix("p=").unwrap_or(s);
            FieldSpec::Prime {
                p: parse_u64(rest)?,
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::InvalidField(format!("cannot parse field `{s}`")))
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime { p } => write!(f, "F_{p}"),
            FieldSpec::PrimeSquare { p } => write!(f, "F_{p}^2"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primality() {
        assert!(is_prime(INTERPOLATION_PRIME));
        assert!(is_prime(1009));
        assert!(!is_prime(1001));
        assert!(Fp::new(9).is_err());
        assert!(Fp::new(2).is_err());
    }

    #[test]
    fn sqrt_small_fields() {
        for p in [3u64, 5, 7, 13, 17, 97, 101, 1009] {
            let f = Fp::new(p).unwrap();
            for a in 0..p {
                match f.sqrt(a) {
                    Some(r) => assert_eq!(f.mul(&r, &r), a),
                    None => assert!((0..p).all(|x| f.mul(&x, &x) != a)),
                }
            }
        }
    }

    #[test]
    fn fp2_every_base_element_is_a_square() {
        let f = Fp2::new(11).unwrap();
        for a in 0..11 {
            let r = f.sqrt_base(a);
            assert_eq!(f.mul(&r, &r), (a, 0));
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(FieldSpec::parse("q").unwrap(), FieldSpec::Rationals);
        assert_eq!(
            FieldSpec::parse("101").unwrap(),
            FieldSpec::Prime { p: 101 }
        );
        assert_eq!(
            FieldSpec::parse("p2=7").unwrap(),
            FieldSpec::PrimeSquare { p: 7 }
        );
        assert!(FieldSpec::parse("p=100").is_err());
        let json = serde_json::to_string(&FieldSpec::Prime { p: 5 }).unwrap();
        assert_eq!(json, r#"{"kind":"prime","p":5}"#);
    }

    proptest! {
        #[test]
        fn fp_inverse(a in 1u64..INTERPOLATION_PRIME) {
            let f = Fp::new(INTERPOLATION_PRIME).unwrap();
            let ai = f.inv(&a).unwrap();
            prop_assert_eq!(f.mul(&a, &ai), 1);
        }

        #[test]
        fn fp2_field_axioms(a0 in 0u64..13, a1 in 0u64..13, b0 in 0u64..13, b1 in 0u64..13) {
            let f = Fp2::new(13).unwrap();
            let a = (a0, a1);
            let b = (b0, b1);
            prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            if !f.is_zero(&a) {
                let ai = f.inv(&a).unwrap();
                prop_assert_eq!(f.mul(&a, &ai), f.one());
            }
            let s = f.add(&a, &b);
            prop_assert_eq!(f.sub(&s, &b), a);
        }
    }
}
