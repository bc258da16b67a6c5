//! Exact scalar arithmetic for the two coefficient modes.
//!
//! `Cyclotomic(n, k)` works in the cyclotomic field generated by a root
//! zeta of order 8nh, h = k + n, with q = zeta^{4n}; every power
//! q^{m/(4n)} is an integer power of zeta.  Elements are sparse
//! polynomials in zeta reduced modulo zeta^{4nh} = -1; the zero test
//! divides by the 8nh-th cyclotomic polynomial, which is exact.
//!
//! `GenericQ(n)` treats q as a formal indeterminate: q = xi^{4n} and
//! scalars are reduced rational functions of xi over the rationals.

pub mod poly;

use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Zero};
use serde::Serialize;

use poly::{q_one, q_zero, Poly, Q};

#[derive(Debug)]
enum ModeRepr {
    Cyclotomic {
        n: usize,
        k: usize,
        h: usize,
        /// 4nh; zeta^fold = -1.
        fold: usize,
        /// Cyclotomic polynomial of order 8nh (minimal polynomial of zeta).
        phi: Poly,
    },
    GenericQ { n: usize },
}

/// Coefficient field selector, shared by every scalar built from it.
#[derive(Clone, Debug)]
pub struct FieldMode(Arc<ModeRepr>);

impl PartialEq for FieldMode {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.0, &*other.0) {
            (
                ModeRepr::Cyclotomic { n: a, k: b, .. },
                ModeRepr::Cyclotomic { n: c, k: d, .. },
            ) => a == c && b == d,
            (ModeRepr::GenericQ { n: a }, ModeRepr::GenericQ { n: b }) => a == b,
            _ => false,
        }
    }
}
impl Eq for FieldMode {}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            ModeRepr::Cyclotomic { n, k, .. } => write!(f, "cyclotomic(n={n},k={k})"),
            ModeRepr::GenericQ { n } => write!(f, "generic(n={n})"),
        }
    }
}

impl FieldMode {
    /// q is the primitive root e^{-i pi/h}, h = k + n.
    pub fn cyclotomic(n: usize, k: usize) -> Self {
        assert!(n >= 2 && k >= 1);
        let h = k + n;
        let fold = 4 * n * h;
        let phi = poly::cyclotomic(8 * n * h);
        FieldMode(Arc::new(ModeRepr::Cyclotomic { n, k, h, fold, phi }))
    }

    /// q = xi^{4n} for a formal indeterminate xi.
    pub fn generic_q(n: usize) -> Self {
        assert!(n >= 2);
        FieldMode(Arc::new(ModeRepr::GenericQ { n }))
    }

    pub fn n(&self) -> usize {
        match &*self.0 {
            ModeRepr::Cyclotomic { n, .. } => *n,
            ModeRepr::GenericQ { n } => *n,
        }
    }

    pub fn is_cyclotomic(&self) -> bool {
        matches!(&*self.0, ModeRepr::Cyclotomic { .. })
    }

    /// Height h = k + n in cyclotomic mode.
    pub fn height(&self) -> Option<usize> {
        match &*self.0 {
            ModeRepr::Cyclotomic { h, .. } => Some(*h),
            ModeRepr::GenericQ { .. } => None,
        }
    }

    pub fn level(&self) -> Option<usize> {
        match &*self.0 {
            ModeRepr::Cyclotomic { k, .. } => Some(*k),
            ModeRepr::GenericQ { .. } => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match &*self.0 {
            ModeRepr::Cyclotomic { .. } => Scalar {
                mode: self.clone(),
                repr: Repr::Cyc(Vec::new()),
            },
            ModeRepr::GenericQ { .. } => Scalar {
                mode: self.clone(),
                repr: Repr::Gen {
                    off: 0,
                    num: Poly::zero(),
                    den: Poly::one(),
                },
            },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(q_one())
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        self.from_rational(poly::q_int(v))
    }

    pub fn from_rational(&self, c: Q) -> Scalar {
        if c.is_zero() {
            return self.zero();
        }
        match &*self.0 {
            ModeRepr::Cyclotomic { .. } => Scalar {
                mode: self.clone(),
                repr: Repr::Cyc(vec![(0, c)]),
            },
            ModeRepr::GenericQ { .. } => Scalar {
                mode: self.clone(),
                repr: Repr::Gen {
                    off: 0,
                    num: Poly::constant(c),
                    den: Poly::one(),
                },
            },
        }
    }

    /// q^{num/(4n)} — the generator raised to an integer power.
    pub fn qpow(&self, num: i64) -> Scalar {
        match &*self.0 {
            ModeRepr::Cyclotomic { fold, .. } => {
                let (e, sign) = fold_exponent(num, *fold);
                let c = if sign { -q_one() } else { q_one() };
                Scalar {
                    mode: self.clone(),
                    repr: Repr::Cyc(vec![(e, c)]),
                }
            }
            ModeRepr::GenericQ { .. } => Scalar {
                mode: self.clone(),
                repr: Repr::Gen {
                    off: num,
                    num: Poly::one(),
                    den: Poly::one(),
                },
            },
        }
    }

    /// q^m for integer m.
    pub fn q_int_pow(&self, m: i64) -> Scalar {
        self.qpow(m * 4 * self.n() as i64)
    }

    /// Quantum bracket [m] = (q^m - q^{-m}) / (q - q^{-1}).
    pub fn qint(&self, m: i64) -> Scalar {
        let a = m.unsigned_abs();
        let mut acc = self.zero();
        for j in 0..a {
            let e = a as i64 - 1 - 2 * j as i64;
            acc = &acc + &self.q_int_pow(e);
        }
        if m < 0 {
            acc = -&acc;
        }
        acc
    }

    /// [m]! = [m][m-1]...[1].
    pub fn qfact(&self, m: u32) -> Scalar {
        let mut acc = self.one();
        for j in 1..=m {
            acc = &acc * &self.qint(j as i64);
        }
        acc
    }

    fn phi(&self) -> Option<&Poly> {
        match &*self.0 {
            ModeRepr::Cyclotomic { phi, .. } => Some(phi),
            ModeRepr::GenericQ { .. } => None,
        }
    }

    fn fold(&self) -> Option<usize> {
        match &*self.0 {
            ModeRepr::Cyclotomic { fold, .. } => Some(*fold),
            ModeRepr::GenericQ { .. } => None,
        }
    }
}

/// Reduce zeta^num with zeta^fold = -1 to (exponent in [0, fold), sign flag).
fn fold_exponent(num: i64, fold: usize) -> (u32, bool) {
    let f = fold as i64;
    let mut e = num.rem_euclid(2 * f);
    let mut sign = false;
    if e >= f {
        e -= f;
        sign = true;
    }
    (e as u32, sign)
}

#[derive(Debug, Clone)]
enum Repr {
    /// Sparse polynomial in zeta, exponents in [0, 4nh), sorted.
    Cyc(Vec<(u32, Q)>),
    /// num = xi^off * poly (constant term nonzero), den monic with
    /// nonzero constant term, gcd(num, den) = 1.
    Gen { off: i64, num: Poly, den: Poly },
}

/// An element of the active coefficient field.
#[derive(Debug, Clone)]
pub struct Scalar {
    mode: FieldMode,
    repr: Repr,
}

impl Scalar {
    pub fn mode(&self) -> &FieldMode {
        &self.mode
    }

    /// Structural zero test: sufficient in generic mode; in cyclotomic
    /// mode a structurally nonzero residue may still denote zero, which
    /// `is_zero` resolves by dividing by the minimal polynomial.
    pub fn is_structural_zero(&self) -> bool {
        match &self.repr {
            Repr::Cyc(t) => t.is_empty(),
            Repr::Gen { num, .. } => num.is_zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Cyc(t) => {
                if t.is_empty() {
                    return true;
                }
                // monomials are unit multiples, and any nonzero residue of
                // degree below deg(phi) cannot be divisible by phi
                let phi = self.mode.phi().unwrap();
                if t.len() == 1 || (t.last().unwrap().0 as usize) < phi.degree() {
                    return false;
                }
                cyc_to_dense(t).rem(phi).is_zero()
            }
            Repr::Gen { num, .. } => num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        (self - &self.mode.one()).is_zero()
    }

    pub fn eq_exact(&self, other: &Scalar) -> bool {
        (self - other).is_zero()
    }

    pub fn inv(&self) -> Option<Scalar> {
        match &self.repr {
            Repr::Cyc(t) => {
                if t.is_empty() {
                    return None;
                }
                if t.len() == 1 {
                    // unit times a power of the base root
                    let (e, c) = &t[0];
                    let fold = self.mode.fold().unwrap() as i64;
                    let (e_inv, sign) = fold_exponent(-(*e as i64), fold as usize);
                    let ci = q_one() / c;
                    return Some(Scalar {
                        mode: self.mode.clone(),
                        repr: Repr::Cyc(vec![(e_inv, if sign { -ci } else { ci })]),
                    });
                }
                let phi = self.mode.phi().unwrap();
                let r = cyc_to_dense(t).rem(phi);
                if r.is_zero() {
                    return None;
                }
                let (g, s, _) = r.xgcd(phi);
                debug_assert_eq!(g, Poly::one());
                Some(Scalar {
                    mode: self.mode.clone(),
                    repr: Repr::Cyc(dense_to_cyc(&s)),
                })
            }
            Repr::Gen { off, num, den } => {
                if num.is_zero() {
                    return None;
                }
                let mut new = Scalar {
                    mode: self.mode.clone(),
                    repr: Repr::Gen {
                        off: -off,
                        num: den.clone(),
                        den: num.clone(),
                    },
                };
                new.normalize_gen();
                Some(new)
            }
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = self.mode.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn normalize_gen(&mut self) {
        if let Repr::Gen { off, num, den } = &mut self.repr {
            if num.is_zero() {
                *off = 0;
                *den = Poly::one();
                return;
            }
            // pull monomial factors out of num and den into the offset
            let shift_n = num.0.iter().take_while(|c| c.is_zero()).count();
            if shift_n > 0 {
                num.0.drain(0..shift_n);
                *off += shift_n as i64;
            }
            let shift_d = den.0.iter().take_while(|c| c.is_zero()).count();
            if shift_d > 0 {
                den.0.drain(0..shift_d);
                *off -= shift_d as i64;
            }
            if !den.is_one_poly() {
                let g = num.gcd(den);
                if g.degree() > 0 {
                    let (qn, rn) = num.divrem(&g);
                    debug_assert!(rn.is_zero());
                    let (qd, rd) = den.divrem(&g);
                    debug_assert!(rd.is_zero());
                    *num = qn;
                    *den = qd;
                }
            }
            // den monic
            let lead = den.0.last().unwrap().clone();
            if !lead.is_one() {
                let inv = q_one() / lead;
                *den = den.scale(&inv);
                *num = num.scale(&inv);
            }
        }
    }

    /// Canonical coefficient data for machine-readable reports.
    pub fn serialize_canonical(&self) -> serde_json::Value {
        match &self.repr {
            Repr::Cyc(t) => {
                let terms: Vec<(u32, String)> =
                    t.iter().map(|(e, c)| (*e, c.to_string())).collect();
                serde_json::json!({ "zeta_terms": terms })
            }
            Repr::Gen { off, num, den } => serde_json::json!({
                "xi_offset": off,
                "num": num.0.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "den": den.0.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }),
        }
    }
}

trait PolyOneExt {
    fn is_one_poly(&self) -> bool;
}
impl PolyOneExt for Poly {
    fn is_one_poly(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }
}

fn cyc_to_dense(t: &[(u32, Q)]) -> Poly {
    if t.is_empty() {
        return Poly::zero();
    }
    let deg = t.last().unwrap().0 as usize;
    let mut v = vec![q_zero(); deg + 1];
    for (e, c) in t {
        v[*e as usize] = c.clone();
    }
    Poly::from_coeffs(v)
}

fn dense_to_cyc(p: &Poly) -> Vec<(u32, Q)> {
    p.0.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e as u32, c.clone()))
        .collect()
}

fn merge_terms(mut terms: Vec<(u32, Q)>) -> Vec<(u32, Q)> {
    terms.sort_by_key(|(e, _)| *e);
    let mut out: Vec<(u32, Q)> = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        if let Some(last) = out.last_mut() {
            if last.0 == e {
                last.1 += c;
                if last.1.is_zero() {
                    out.pop();
                }
                continue;
            }
        }
        if !c.is_zero() {
            out.push((e, c));
        }
    }
    out
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        assert_eq!(self.mode, rhs.mode, "field mode mismatch");
        match (&self.repr, &rhs.repr) {
            (Repr::Cyc(a), Repr::Cyc(b)) => {
                let mut t = a.clone();
                t.extend(b.iter().cloned());
                Scalar {
                    mode: self.mode.clone(),
                    repr: Repr::Cyc(merge_terms(t)),
                }
            }
            (
                Repr::Gen { off: o1, num: n1, den: d1 },
                Repr::Gen { off: o2, num: n2, den: d2 },
            ) => {
                if n1.is_zero() {
                    return rhs.clone();
                }
                if n2.is_zero() {
                    return self.clone();
                }
                // common offset: xi^o1 n1/d1 + xi^o2 n2/d2
                let o = (*o1).min(*o2);
                let p1 = shift_up(n1, (o1 - o) as usize).mul(d2);
                let p2 = shift_up(n2, (o2 - o) as usize).mul(d1);
                let mut s = Scalar {
                    mode: self.mode.clone(),
                    repr: Repr::Gen {
                        off: o,
                        num: p1.add(&p2),
                        den: d1.mul(d2),
                    },
                };
                s.normalize_gen();
                s
            }
            _ => unreachable!("mode mismatch"),
        }
    }
}

fn shift_up(p: &Poly, k: usize) -> Poly {
    if p.is_zero() || k == 0 {
        return p.clone();
    }
    let mut v = vec![q_zero(); k];
    v.extend(p.0.iter().cloned());
    Poly(v)
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.repr {
            Repr::Cyc(t) => Scalar {
                mode: self.mode.clone(),
                repr: Repr::Cyc(t.iter().map(|(e, c)| (*e, -c.clone())).collect()),
            },
            Repr::Gen { off, num, den } => Scalar {
                mode: self.mode.clone(),
                repr: Repr::Gen {
                    off: *off,
                    num: num.neg(),
                    den: den.clone(),
                },
            },
        }
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        assert_eq!(self.mode, rhs.mode, "field mode mismatch");
        match (&self.repr, &rhs.repr) {
            (Repr::Cyc(a), Repr::Cyc(b)) => {
                if a.is_empty() || b.is_empty() {
                    return self.mode.zero();
                }
                let fold = self.mode.fold().unwrap();
                let mut t = Vec::with_capacity(a.len() * b.len());
                for (e1, c1) in a {
                    for (e2, c2) in b {
                        let (e, sign) = fold_exponent(*e1 as i64 + *e2 as i64, fold);
                        let c = c1 * c2;
                        t.push((e, if sign { -c } else { c }));
                    }
                }
                Scalar {
                    mode: self.mode.clone(),
                    repr: Repr::Cyc(merge_terms(t)),
                }
            }
            (
                Repr::Gen { off: o1, num: n1, den: d1 },
                Repr::Gen { off: o2, num: n2, den: d2 },
            ) => {
                if n1.is_zero() || n2.is_zero() {
                    return self.mode.zero();
                }
                let mut s = Scalar {
                    mode: self.mode.clone(),
                    repr: Repr::Gen {
                        off: o1 + o2,
                        num: n1.mul(n2),
                        den: d1.mul(d2),
                    },
                };
                s.normalize_gen();
                s
            }
            _ => unreachable!("mode mismatch"),
        }
    }
}

impl Scalar {
    pub fn div(&self, rhs: &Scalar) -> Option<Scalar> {
        rhs.inv().map(|i| self * &i)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Cyc(t) => {
                if t.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = t
                    .iter()
                    .map(|(e, c)| {
                        if *e == 0 {
                            format!("{c}")
                        } else if c.is_one() {
                            format!("z^{e}")
                        } else {
                            format!("{c}*z^{e}")
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
            Repr::Gen { off, num, den } => {
                if num.is_zero() {
                    return write!(f, "0");
                }
                let pp = |p: &Poly| -> String {
                    p.0.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(e, c)| {
                            if e == 0 {
                                format!("{c}")
                            } else if c.is_one() {
                                format!("x^{e}")
                            } else {
                                format!("{c}*x^{e}")
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" + ")
                };
                write!(f, "x^{off}*({})", pp(num))?;
                if !(den.0.len() == 1 && den.0[0].is_one()) {
                    write!(f, "/({})", pp(den))?;
                }
                Ok(())
            }
        }
    }
}

/// Witness string for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarRepr {
    pub text: String,
    pub canonical: serde_json::Value,
}

impl From<&Scalar> for ScalarRepr {
    fn from(s: &Scalar) -> Self {
        ScalarRepr {
            text: s.to_string(),
            canonical: s.serialize_canonical(),
        }
    }
}

pub fn big_rational_from(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn modes() -> Vec<FieldMode> {
        vec![
            FieldMode::cyclotomic(2, 1),
            FieldMode::cyclotomic(2, 2),
            FieldMode::cyclotomic(3, 1),
            FieldMode::generic_q(2),
            FieldMode::generic_q(3),
        ]
    }

    #[test]
    fn qpow_zero_is_one() {
        for m in modes() {
            assert!(m.qpow(0).is_one());
        }
    }

    #[test]
    fn q_to_the_h_is_minus_one() {
        // q^h = e^{-i pi} = -1
        let m = FieldMode::cyclotomic(2, 2);
        let h = m.height().unwrap() as i64;
        let qh = m.q_int_pow(h);
        assert!((&qh + &m.one()).is_zero());
    }

    #[test]
    fn generic_qpow_is_monomial() {
        let m = FieldMode::generic_q(2);
        // q^{1/4} = xi^2
        let s = m.qpow(2);
        assert!(s.eq_exact(&(&m.qpow(1) * &m.qpow(1))));
    }

    #[test]
    fn qpow_is_homomorphism() {
        for m in modes() {
            for a in [-7i64, -1, 0, 3, 11] {
                for b in [-2i64, 5, 9] {
                    let lhs = m.qpow(a + b);
                    let rhs = &m.qpow(a) * &m.qpow(b);
                    assert!(lhs.eq_exact(&rhs), "mode {m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn qint_basics() {
        for m in modes() {
            assert!(m.qint(1).is_one());
            assert!(m.qint(0).is_zero());
            // [2] = q + q^{-1}
            let two = &m.q_int_pow(1) + &m.q_int_pow(-1);
            assert!(m.qint(2).eq_exact(&two));
            // [-m] = -[m]
            assert!(m.qint(-3).eq_exact(&(-&m.qint(3))));
        }
    }

    #[test]
    fn qint_recursion() {
        // [m+1] + [m-1] = [2][m]
        for m in modes() {
            for v in [-4i64, -1, 0, 1, 2, 5, 8] {
                let lhs = &m.qint(v + 1) + &m.qint(v - 1);
                let rhs = &m.qint(2) * &m.qint(v);
                assert!(lhs.eq_exact(&rhs), "mode {m}, m={v}");
            }
        }
    }

    #[test]
    fn bracket_vanishing_pattern() {
        let m = FieldMode::cyclotomic(2, 1); // h = 3
        assert!(m.qint(3).is_zero());
        assert!(m.qint(6).is_zero());
        assert!(!m.qint(2).is_zero());
        assert!(!m.qint(4).is_zero());
        let g = FieldMode::generic_q(2);
        for v in 1..=8 {
            assert!(!g.qint(v).is_zero());
        }
    }

    #[test]
    fn hidden_zero_detected() {
        // 1 + w + w^2 for w a primitive cube root of unity is zero but
        // structurally nonzero in the residue representation.
        let m = FieldMode::cyclotomic(2, 1); // order 48, 48/3 = 16
        let w = m.qpow(16);
        let s = &(&m.one() + &w) + &(&w * &w);
        assert!(!s.is_structural_zero());
        assert!(s.is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        for m in modes() {
            for s in [m.qint(2), &m.qpow(3) + &m.qint(3), m.q_int_pow(-2)] {
                let i = s.inv().expect("nonzero");
                assert!((&s * &i).is_one(), "mode {m}");
            }
            assert!(m.zero().inv().is_none());
        }
    }

    #[test]
    fn division_exactness() {
        for m in modes() {
            let a = &m.qint(3) * &m.qint(2);
            let b = m.qint(2);
            let c = a.div(&b).unwrap();
            assert!(c.eq_exact(&m.qint(3)));
        }
    }
}
