//! Univariate polynomials over a [`Field`], stored lowest degree first.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{Field, Scalar};

/// Largest integer whose divisors are enumerated when searching for rational roots.
const ROOT_SEARCH_LIMIT: u64 = 1_000_000_000_000;
/// Largest prime for which roots are found by exhaustive search.
const PRIME_SEARCH_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Poly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Field) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Poly {
        Poly::new(c.field(), vec![c])
    }

    /// `x - a`
    pub fn linear(a: &Scalar) -> Poly {
        Poly::new(a.field(), vec![-a, a.field().one()])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero leading coefficient");
        Poly::new(self.field, self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn scale(&self, k: &Scalar) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.leading().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); self.coeffs.len().saturating_sub(d)];
        while rem.len() > d {
            let top = rem.len() - 1;
            let c = &rem[top] * &lead_inv;
            if !c.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    let idx = top - d + i;
                    rem[idx] = &rem[idx] - &(&c * dc);
                }
            }
            quot[top - d] = c;
            rem.pop();
        }
        (Poly::new(self.field, quot), Poly::new(self.field, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.ext_gcd(other).0
    }

    /// `(g, u, v)` with `u*self + v*other = g`, `g` monic (or zero when both inputs are).
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = self.field;
        let one = Poly::constant(f.one());
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (one.clone(), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().inv().expect("nonzero");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &Scalar) -> usize {
        let lin = Poly::linear(a);
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                break;
            }
            p = q;
            k += 1;
        }
        k
    }

    /// Distinct roots lying in the base field, in increasing order of discovery.
    ///
    /// Over the rationals this is the rational root test; it gives up (returning only
    /// the roots found so far) when the relevant integers exceed a fixed size. Over a
    /// prime field the search is exhaustive for small primes.
    pub fn roots(&self) -> Vec<Scalar> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let zero = self.field.zero();
        if self.eval(&zero).is_zero() {
            roots.push(zero);
        }
        match self.field {
            Field::Prime(p) if p <= PRIME_SEARCH_LIMIT => {
                roots.extend((1..p as i64).map(|v| self.field.from_i64(v)).filter(|x| self.eval(x).is_zero()));
            }
            Field::Prime(_) => {}
            Field::Rational => roots.extend(self.nonzero_rational_roots()),
        }
        roots
    }

    fn nonzero_rational_roots(&self) -> Vec<Scalar> {
        // Clear denominators, then drop the x^k factor.
        let lcm = self.coeffs.iter().filter_map(|c| c.as_rational()).fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| {
                let r = c.as_rational().expect("rational coefficients");
                (r * num_rational::BigRational::from_integer(lcm.clone())).to_integer()
            })
            .collect();
        let Some(low) = ints.iter().find(|c| !c.is_zero()) else {
            return Vec::new();
        };
        let high = ints.last().expect("nonzero polynomial");
        let (Some(low_divs), Some(high_divs)) = (divisors(low), divisors(high)) else {
            return Vec::new();
        };
        let mut found: Vec<Scalar> = Vec::new();
        for n in &low_divs {
            for d in &high_divs {
                for sign in [1i64, -1] {
                    let cand = Field::Rational
                        .from_ratio(&(BigInt::from(sign) * BigInt::from(*n)), &BigInt::from(*d))
                        .expect("positive denominator");
                    if !found.contains(&cand) && self.eval(&cand).is_zero() {
                        found.push(cand);
                    }
                }
            }
        }
        found
    }
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64().filter(|&n| n <= ROOT_SEARCH_LIMIT)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

impl Add<&Poly> for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = self.field.zero();
        let coeffs = (0..n).map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero)).collect();
        Poly::new(self.field, coeffs)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(&-self.field.one())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(self.field, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn p(c: &[i64]) -> Poly {
        Poly::new(Q, c.iter().map(|&x| Q.from_i64(x)).collect())
    }

    #[test]
    fn division() {
        // x^3 - 1 = (x - 1)(x^2 + x + 1)
        let (q, r) = p(&[-1, 0, 0, 1]).div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn bezout_identity() {
        let a = p(&[0, 0, 1, 1]); // x^2 (x + 1)
        let b = p(&[-2, 1]); // x - 2
        let (g, u, v) = a.ext_gcd(&b);
        assert_eq!(g, p(&[1]));
        assert_eq!(&(&u * &a) + &(&v * &b), g);
        assert_eq!(p(&[2, -3, 1]).gcd(&p(&[-1, 1])), p(&[-1, 1]));
    }

    #[test]
    fn rational_roots() {
        // (2x - 1)(x + 3) x^2 (x^2 + 1)
        let f = &(&p(&[-1, 2]) * &p(&[3, 1])) * &(&p(&[0, 0, 1]) * &p(&[1, 0, 1]));
        let mut roots: Vec<String> = f.roots().iter().map(ToString::to_string).collect();
        roots.sort();
        assert_eq!(roots, vec!["-3", "0", "1/2"]);
        assert_eq!(f.root_multiplicity(&Q.zero()), 2);
        assert!(p(&[-2, 0, 1]).roots().is_empty());
    }

    #[test]
    fn prime_field_roots() {
        let f7 = Field::Prime(7);
        // x^2 - 2 = (x - 3)(x - 4) mod 7
        let f = Poly::new(f7, vec![f7.from_i64(-2), f7.zero(), f7.one()]);
        assert_eq!(f.roots(), vec![f7.from_i64(3), f7.from_i64(4)]);
    }
}
