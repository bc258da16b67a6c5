//! Dense univariate polynomials over the rationals.
//!
//! Coefficient vectors are kept trimmed (no trailing zeros); the empty
//! vector is the zero polynomial.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Q = BigRational;

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![q_one()])
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// c * x^k
    pub fn monomial(c: Q, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![q_zero(); k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn from_coeffs(v: Vec<Q>) -> Self {
        let mut p = Poly(v);
        p.trim();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        if self.0.is_empty() {
            0
        } else {
            self.0.len() - 1
        }
    }

    pub fn trim(&mut self) {
        while let Some(c) = self.0.last() {
            if c.is_zero() {
                self.0.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(q_zero)
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::from_coeffs(v)
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::from_coeffs(v)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![q_zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on division by the zero polynomial.
    pub fn divrem(&self, rhs: &Poly) -> (Poly, Poly) {
        assert!(!rhs.is_zero(), "polynomial division by zero");
        if self.degree() < rhs.degree() || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.0.clone();
        let dq = self.degree() - rhs.degree();
        let mut quot = vec![q_zero(); dq + 1];
        let lead = rhs.0.last().unwrap().clone();
        for k in (0..=dq).rev() {
            let idx = k + rhs.degree();
            if rem.len() <= idx || rem[idx].is_zero() {
                continue;
            }
            let f = &rem[idx] / &lead;
            quot[k] = f.clone();
            for (j, b) in rhs.0.iter().enumerate() {
                let t = b * &f;
                rem[k + j] -= t;
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, rhs: &Poly) -> Poly {
        self.divrem(rhs).1
    }

    /// Leading coefficient scaled to 1.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lead = self.0.last().unwrap().clone();
        Poly(self.0.iter().map(|c| c / &lead).collect())
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic_or_zero();
        }
        a.monic_or_zero()
    }

    fn monic_or_zero(&self) -> Poly {
        if self.is_zero() {
            Poly::zero()
        } else {
            self.monic()
        }
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*rhs = g, g monic.
    pub fn xgcd(&self, rhs: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (Poly::zero(), Poly::zero(), Poly::zero());
        }
        let lead = r0.0.last().unwrap().clone();
        let inv = q_one() / lead;
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Divide out the rational content and make the leading integer
    /// coefficient positive. Used to keep reduced fractions canonical.
    pub fn primitive_part(&self) -> (Q, Poly) {
        if self.is_zero() {
            return (q_one(), Poly::zero());
        }
        let mut den = BigInt::one();
        for c in &self.0 {
            den = num::integer::lcm(den, c.denom().clone());
        }
        let mut num_gcd = BigInt::zero();
        for c in &self.0 {
            let n = c.numer() * (&den / c.denom());
            num_gcd = num::integer::gcd(num_gcd, n);
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        if self.0.last().unwrap().is_negative() {
            num_gcd = -num_gcd;
        }
        let content = Q::new(num_gcd.clone(), den.clone());
        let inv = Q::new(den, num_gcd);
        (content, self.scale(&inv))
    }
}

/// N-th cyclotomic polynomial, computed by dividing x^N - 1 by the
/// cyclotomic polynomials of the proper divisors of N.
pub fn cyclotomic(n: usize) -> Poly {
    assert!(n >= 1);
    fn inner(n: usize, memo: &mut Vec<Option<Poly>>) -> Poly {
        if let Some(p) = &memo[n] {
            return p.clone();
        }
        // x^n - 1
        let mut v = vec![q_zero(); n + 1];
        v[0] = -q_one();
        v[n] = q_one();
        let mut f = Poly::from_coeffs(v);
        for d in 1..n {
            if n % d == 0 {
                let phi_d = inner(d, memo);
                let (q, r) = f.divrem(&phi_d);
                debug_assert!(r.is_zero());
                f = q;
            }
        }
        memo[n] = Some(f.clone());
        f
    }
    let mut memo = vec![None; n + 1];
    inner(n, &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        // phi_1 = x - 1, phi_2 = x + 1, phi_4 = x^2 + 1, phi_6 = x^2 - x + 1
        assert_eq!(cyclotomic(1).0, vec![q_int(-1), q_int(1)]);
        assert_eq!(cyclotomic(2).0, vec![q_int(1), q_int(1)]);
        assert_eq!(cyclotomic(4).0, vec![q_int(1), q_int(0), q_int(1)]);
        assert_eq!(cyclotomic(6).0, vec![q_int(1), q_int(-1), q_int(1)]);
    }

    #[test]
    fn cyclotomic_96_has_unit_coeffs() {
        let p = cyclotomic(96);
        assert_eq!(p.degree(), 32);
        for c in &p.0 {
            assert!(c.denom().is_one());
            assert!(c.numer().abs() <= BigInt::one());
        }
    }

    #[test]
    fn xgcd_inverts() {
        // invert x + 2 modulo x^2 + 1
        let a = Poly::from_coeffs(vec![q_int(2), q_int(1)]);
        let m = Poly::from_coeffs(vec![q_int(1), q_int(0), q_int(1)]);
        let (g, s, _t) = a.xgcd(&m);
        assert_eq!(g, Poly::one());
        let prod = a.mul(&s).rem(&m);
        assert_eq!(prod, Poly::one());
    }

    #[test]
    fn divrem_roundtrip() {
        let a = Poly::from_coeffs(vec![q_int(3), q_int(0), q_int(-2), q_int(5)]);
        let b = Poly::from_coeffs(vec![q_int(1), q_int(4)]);
        let (q, r) = a.divrem(&b);
        assert_eq!(a, b.mul(&q).add(&r));
        assert!(r.degree() < b.degree());
    }
}
