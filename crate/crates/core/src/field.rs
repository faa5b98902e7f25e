//! Exact scalars: arbitrary-precision rationals and residues modulo a prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The base field every computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Prime field of order `p`; rejects composite moduli.
    pub fn prime(p: u64) -> Result<Field> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Mod(ModInt { value: (v as i128).rem_euclid(p as i128) as u64, modulus: p }),
        }
    }

    pub fn from_big(self, v: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar::Mod(ModInt { value: r.to_u64().expect("residue fits"), modulus: p })
            }
        }
    }

    /// Maps `num/den` into the field; fails when the denominator vanishes in it.
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        self.from_big(num).checked_div(&self.from_big(den))
    }

    /// Parses a scalar literal: an integer, `num/den`, or `r mod p` (the modulus must match).
    pub fn parse(self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some((r, p)) = s.split_once(" mod ") {
            let p: u64 = p.trim().parse().map_err(|_| Error::ParseScalar(s.to_string()))?;
            if self != Field::Prime(p) {
                return Err(Error::FieldMismatch { left: self, right: Field::Prime(p) });
            }
            let r: BigInt = r.trim().parse().map_err(|_| Error::ParseScalar(s.to_string()))?;
            return Ok(self.from_big(&r));
        }
        let bad = || Error::ParseScalar(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                self.from_ratio(&n, &d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(self.from_big(&n))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// `q` for the rationals, `fp:<p>` for a prime field.
    fn from_str(s: &str) -> Result<Field> {
        match s {
            "q" | "Q" => Ok(Field::Rational),
            _ => {
                let p = s
                    .strip_prefix("fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown field `{s}`")))?;
                Field::prime(p)
            }
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Residue class modulo a prime, stored as its least non-negative representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModInt {
    value: u64,
    modulus: u64,
}

impl ModInt {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    fn pow(self, mut e: u64) -> ModInt {
        let p = self.modulus;
        let mut base = self.value;
        let mut acc = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mul_mod(acc, base, p);
            }
            base = Self::mul_mod(base, base, p);
            e >>= 1;
        }
        ModInt { value: acc, modulus: p }
    }
}

/// An exact field element in canonical form.
///
/// Rationals are kept in lowest terms with positive denominator, residues in `[0, p)`,
/// so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Mod(ModInt),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Mod(m) => Field::Prime(m.modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Mod(m) => m.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Mod(m) => m.value == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Mod(_) => None,
        }
    }

    fn mismatch(&self, other: &Scalar) -> Error {
        Error::FieldMismatch { left: self.field(), right: other.field() }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Mod(a), Scalar::Mod(b)) if a.modulus == b.modulus => {
                let p = a.modulus;
                let s = (a.value as u128 + b.value as u128) % p as u128;
                Ok(Scalar::Mod(ModInt { value: s as u64, modulus: p }))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Mod(a), Scalar::Mod(b)) if a.modulus == b.modulus => {
                Ok(Scalar::Mod(ModInt { value: ModInt::mul_mod(a.value, b.value, a.modulus), modulus: a.modulus }))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            // Fermat: a^(p-2) = a^-1.
            Scalar::Mod(m) => Scalar::Mod(m.pow(m.modulus - 2)),
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Mod(m) => Scalar::Mod(ModInt { value: (m.modulus - m.value) % m.modulus, modulus: m.modulus }),
        }
    }

    /// Integer value for rationals with denominator one.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(r) if r.is_integer() => Some(r.to_integer()),
            Scalar::Mod(m) => Some(BigInt::from(m.value)),
            _ => None,
        }
    }

    pub fn abs_height(&self) -> BigInt {
        match self {
            Scalar::Rational(r) => r.numer().abs().max(r.denom().clone()),
            Scalar::Mod(m) => BigInt::from(m.value),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Mod(m) => write!(f, "{} mod {}", m.value, m.modulus),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        let field = match s.split_once(" mod ") {
            Some((_, p)) => {
                let p = p.trim().parse().map_err(serde::de::Error::custom)?;
                Field::prime(p).map_err(serde::de::Error::custom)?
            }
            None => Field::Rational,
        };
        field.parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;

            /// Panics when the operands live in different fields; use the `checked_*`
            /// methods where that is not already ruled out.
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar operands from different fields")
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;

            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = ModInt { value: a % n, modulus: n }.pow(d).value;
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ModInt::mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
