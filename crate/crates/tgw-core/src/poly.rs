//! Sparse multivariate polynomials over [`Scalar`].
//!
//! Variables are named by opaque string ids (one per edge of a multiquiver;
//! the id may be empty for a single anonymous variable, printed plain `u`).
//! Polynomials are kept canonical: no zero coefficients, monomials ordered
//! lexicographically with the lexicographically smallest variable id most
//! significant.  A thread-local total-degree guard (default 512) aborts
//! runaway products with a clear error instead of exhausting memory.

use crate::error::Error;
use crate::scalar::Scalar;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub const DEFAULT_DEGREE_CAP: usize = 512;

thread_local! {
    static DEGREE_CAP: Cell<usize> = const { Cell::new(DEFAULT_DEGREE_CAP) };
}

/// Current total-degree guard for this thread.
pub fn degree_cap() -> usize {
    DEGREE_CAP.with(|c| c.get())
}

/// Overrides the total-degree guard for this thread.
pub fn set_degree_cap(cap: usize) {
    DEGREE_CAP.with(|c| c.set(cap));
}

fn guard_degree(degree: usize) -> Result<(), Error> {
    let cap = degree_cap();
    if degree > cap {
        Err(Error::DegreeCapExceeded { degree, cap })
    } else {
        Ok(())
    }
}

/// A power product of variables, stored as `(id, exponent)` pairs sorted by
/// id with all exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(id: &str) -> Self {
        Monomial(vec![(id.to_string(), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|(_, e)| *e as usize).sum()
    }

    pub fn exponent(&self, id: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v == id)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(v, _)| v.as_str())
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(String, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let mut ia = self.0.iter().peekable();
        let mut ib = other.0.iter().peekable();
        loop {
            match (ia.peek(), ib.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(ia.next().unwrap().clone()),
                (None, Some(_)) => out.push(ib.next().unwrap().clone()),
                (Some((va, _)), Some((vb, _))) => match va.cmp(vb) {
                    Ordering::Less => out.push(ia.next().unwrap().clone()),
                    Ordering::Greater => out.push(ib.next().unwrap().clone()),
                    Ordering::Equal => {
                        let (v, ea) = ia.next().unwrap();
                        let (_, eb) = ib.next().unwrap();
                        out.push((v.clone(), ea + eb));
                    }
                },
            }
        }
        Monomial(out)
    }

    /// The monomial with one variable removed entirely.
    fn without(&self, id: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| v != id).cloned().collect())
    }
}

impl Ord for Monomial {
    /// Lexicographic order: scan variables in id order; the monomial with
    /// the higher exponent on the earliest differing variable is larger.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut ia = self.0.iter();
        let mut ib = other.0.iter();
        let mut a = ia.next();
        let mut b = ib.next();
        loop {
            match (a, b) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            a = ia.next();
                            b = ib.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: monomial -> nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(Scalar::from_int(n))
    }

    /// The variable `u_<id>`.
    pub fn var(id: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(id), Scalar::one());
        Poly { terms }
    }

    /// `u_<id> + c` for integer `c`.
    pub fn var_plus(id: &str, c: i64) -> Self {
        Poly::var(id) + Poly::from_int(c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::one())
                .map(Scalar::is_one)
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value as a scalar if the polynomial is constant.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.is_zero() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            self.terms.get(&Monomial::one()).cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, id: &str) -> usize {
        self.terms
            .keys()
            .map(|m| m.exponent(id) as usize)
            .max()
            .unwrap_or(0)
    }

    /// All variable ids that occur with positive exponent.
    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().map(str::to_string))
            .collect()
    }

    fn insert(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), c * v)).collect(),
        }
    }

    /// Conjugates every coefficient; variables are fixed.
    pub fn conj(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.conj()))
                .collect(),
        }
    }

    /// Product behind the total-degree guard.
    pub fn checked_mul(&self, rhs: &Poly) -> Result<Poly, Error> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Poly::zero());
        }
        guard_degree(self.total_degree() + rhs.total_degree())?;
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// `self^k` behind the total-degree guard.
    pub fn checked_pow(&self, k: u32) -> Result<Poly, Error> {
        guard_degree(self.total_degree() * k as usize)?;
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    /// Substitutes `u_v -> u_v + offset(v)` for every variable.  Total
    /// degree is preserved, so no guard is needed.
    pub fn translate<F>(&self, offset: F) -> Poly
    where
        F: Fn(&str) -> i64,
    {
        let mut out = Poly::zero();
        for (mono, coeff) in &self.terms {
            let mut term = Poly::constant(coeff.clone());
            for (var, exp) in mono.factors() {
                let c = offset(var);
                let factor = if c == 0 {
                    let mut p = Poly::zero();
                    p.insert(Monomial(vec![(var.clone(), *exp)]), Scalar::one());
                    p
                } else {
                    shifted_power(var, c, *exp)
                };
                term = term
                    .checked_mul(&factor)
                    .expect("translate preserves total degree");
            }
            out += term;
        }
        out
    }

    /// Substitutes a whole polynomial for one variable.
    pub fn substitute(&self, id: &str, replacement: &Poly) -> Result<Poly, Error> {
        let mut out = Poly::zero();
        for (mono, coeff) in &self.terms {
            let exp = mono.exponent(id);
            let rest = mono.without(id);
            let mut term = Poly::zero();
            term.insert(rest, coeff.clone());
            if exp > 0 {
                term = term.checked_mul(&replacement.checked_pow(exp)?)?;
            }
            out += term;
        }
        Ok(out)
    }

    /// Evaluates at an integer point; every variable of the polynomial must
    /// be assigned.
    pub fn eval_int(&self, point: &BTreeMap<String, i64>) -> Result<Scalar, Error> {
        let mut acc = Scalar::zero();
        for (mono, coeff) in &self.terms {
            let mut val = coeff.clone();
            for (var, exp) in mono.factors() {
                let x = point
                    .get(var)
                    .ok_or_else(|| Error::UnknownVariable(var.clone()))?;
                for _ in 0..*exp {
                    val *= Scalar::from_int(*x);
                }
            }
            acc += val;
        }
        Ok(acc)
    }
}

/// `(u + c)^e` expanded by the binomial theorem.
fn shifted_power(var: &str, c: i64, e: u32) -> Poly {
    let c = BigInt::from(c);
    let mut binom = BigInt::one();
    let mut out = Poly::zero();
    // k runs over the exponent of u; binom = C(e, k) built multiplicatively.
    for k in 0..=e {
        let coeff = &binom * c.pow(e - k);
        let mono = if k == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(var.to_string(), k)])
        };
        out.insert(
            mono,
            Scalar::new(BigRational::from_integer(coeff), BigRational::zero()),
        );
        if k < e {
            binom = binom * BigInt::from(e - k) / BigInt::from(k + 1);
        }
    }
    out
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.insert(m, c);
        }
        self
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.insert(m, c);
        }
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for Poly {
    type Output = Poly;
    /// Guarded product; panics if the degree guard trips.  Growth-prone
    /// paths use [`Poly::checked_mul`] and surface the error instead.
    fn mul(self, rhs: Poly) -> Poly {
        self.checked_mul(&rhs).expect("degree guard exceeded")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("degree guard exceeded")
    }
}

impl serde::Serialize for Poly {
    /// Serializes as the canonical display string.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Poly {
    /// Parses the canonical display string back.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::parse::parse_poly(&text).map_err(serde::de::Error::custom)
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.factors()
        .iter()
        .map(|(v, e)| {
            let name = if v.is_empty() {
                "u".to_string()
            } else {
                format!("u_{v}")
            };
            if *e == 1 {
                name
            } else {
                format!("{name}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Poly {
    /// Canonical rendering: terms in decreasing monomial order, signs
    /// absorbed into the separators, mixed complex coefficients
    /// parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, coeff) in self.terms.iter().rev() {
            // A coefficient is sign-splittable when it is purely real or
            // purely imaginary; mixed values keep a leading `+` and parens.
            let (negative, magnitude) = if coeff.is_real() && coeff.re().is_negative() {
                (true, -coeff.clone())
            } else if coeff.re().is_zero() && coeff.im().is_negative() {
                (true, -coeff.clone())
            } else {
                (false, coeff.clone())
            };
            let mixed = !magnitude.re().is_zero() && !magnitude.im().is_zero();
            let coeff_str = if mixed {
                format!("({magnitude})")
            } else {
                magnitude.to_string()
            };
            let body = if mono.is_one() {
                coeff_str
            } else if magnitude.is_one() {
                fmt_monomial(mono)
            } else {
                format!("{}*{}", coeff_str, fmt_monomial(mono))
            };
            if first {
                if negative {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else if negative {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(id: &str) -> Poly {
        Poly::var(id)
    }

    #[test]
    fn canonical_form_drops_zero_coefficients() {
        let p = u("a") - u("a");
        assert!(p.is_zero());
        let q = (u("a") + Poly::one()) * (u("a") - Poly::one());
        assert_eq!(q, u("a") * u("a") - Poly::one());
    }

    #[test]
    fn translate_shifts_each_variable_independently() {
        // (u_a + u_b)^2 under a -> a+1, b -> b-2.
        let p = (u("a") + u("b")).checked_pow(2).unwrap();
        let shifted = p.translate(|v| if v == "a" { 1 } else { -2 });
        let expected = ((u("a") + Poly::one()) + (u("b") - Poly::from_int(2)))
            .checked_pow(2)
            .unwrap();
        assert_eq!(shifted, expected);
    }

    #[test]
    fn substitute_replaces_a_variable_by_a_polynomial() {
        // u_b -> 2 - u_a inside u_b^2 + u_b.
        let p = u("b").checked_pow(2).unwrap() + u("b");
        let repl = Poly::from_int(2) - u("a");
        let got = p.substitute("b", &repl).unwrap();
        let expected = repl.checked_pow(2).unwrap() + repl;
        assert_eq!(got, expected);
    }

    #[test]
    fn display_uses_lex_order_and_clean_signs() {
        let p = u("a") * u("a") - u("a") * u("b") + Poly::from_int(3);
        assert_eq!(p.to_string(), "u_a^2 - u_a*u_b + 3");
        let anon = Poly::var("") - Poly::one();
        assert_eq!(anon.to_string(), "u - 1");
        let imag = Poly::constant(Scalar::i()).scale(&Scalar::from_fraction(1, 2));
        assert_eq!(imag.to_string(), "1/2*i");
    }

    #[test]
    fn degree_guard_reports_cap() {
        let cap = degree_cap();
        set_degree_cap(4);
        let p = u("a").checked_pow(3).unwrap();
        let err = p.checked_mul(&p).unwrap_err();
        assert_eq!(err, Error::DegreeCapExceeded { degree: 6, cap: 4 });
        set_degree_cap(cap);
    }

    #[test]
    fn eval_int_requires_every_variable() {
        let p = u("a") + u("b");
        let mut point = BTreeMap::new();
        point.insert("a".to_string(), 3);
        assert!(matches!(p.eval_int(&point), Err(Error::UnknownVariable(v)) if v == "b"));
        point.insert("b".to_string(), -1);
        assert_eq!(p.eval_int(&point).unwrap(), Scalar::from_int(2));
    }
}
