//! Exact normal-ordered arithmetic in a multivariate Weyl algebra.
//!
//! For each edge `e` there are generators `x_e`, `y_e` with
//! `y_e x_e - x_e y_e = 1`; distinct edges commute.  Writing
//! `u_e = y_e x_e`, every element has a unique normal form
//! `sum_g p_g(u) z^g` where `g` is an integer vector over the edges,
//! `z^g` is the product of `x_e^{g_e}` (positive entries) and
//! `y_e^{-g_e}` (negative entries), and the polynomial coefficient sits to
//! the left of `z^g`.
//!
//! Products of `z`-monomials on one edge produce the structure polynomials
//! `P_{m,n}`: `z^(m) z^(n) = P_{m,n}(u) z^(m+n)`.  The closed forms used
//! by multiplication are validated once per process against
//! [`normal_order_word`], an independent single-step rewriting engine, on
//! the whole range `|m|, |n| <= 8`; any mismatch aborts loudly.

use crate::error::Error;
use crate::graph::DegreeE;
use crate::parse::{parse_ast, Ast};
use crate::poly::Poly;
use crate::scalar::Scalar;
use num::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

/// One letter of a Weyl word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum WeylGen {
    /// `x_e`.
    X(String),
    /// `y_e`.
    Y(String),
    /// A polynomial coefficient in the `u` variables.
    Coeff(Poly),
}

/// An element in normal form: degree vector -> nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct WeylElement {
    terms: BTreeMap<DegreeE, Poly>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement::default()
    }

    pub fn one() -> Self {
        WeylElement::from_poly(Poly::one())
    }

    /// A degree-zero element.
    pub fn from_poly(p: Poly) -> Self {
        let mut out = WeylElement::zero();
        out.add_term(DegreeE::new(), p);
        out
    }

    /// The monomial `z^g` with coefficient 1.
    pub fn z(g: DegreeE) -> Self {
        let mut out = WeylElement::zero();
        out.add_term(g, Poly::one());
        out
    }

    /// `x_e`.
    pub fn x(edge: &str) -> Self {
        WeylElement::z(DegreeE::unit(edge))
    }

    /// `y_e`.
    pub fn y(edge: &str) -> Self {
        WeylElement::z(DegreeE::unit(edge).negated())
    }

    /// `u_e` as a degree-zero element.
    pub fn u(edge: &str) -> Self {
        WeylElement::from_poly(Poly::var(edge))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DegreeE, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &DegreeE) -> Poly {
        self.terms.get(g).cloned().unwrap_or_else(Poly::zero)
    }

    /// Degrees with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &DegreeE> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, g: DegreeE, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn plus(&self, other: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (g, p) in &other.terms {
            out.add_term(g.clone(), p.clone());
        }
        out
    }

    pub fn minus(&self, other: &WeylElement) -> WeylElement {
        self.plus(&other.negated())
    }

    pub fn negated(&self) -> WeylElement {
        WeylElement {
            terms: self
                .terms
                .iter()
                .map(|(g, p)| (g.clone(), -p.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> WeylElement {
        let mut out = WeylElement::zero();
        for (g, p) in &self.terms {
            out.add_term(g.clone(), p.scale(c));
        }
        out
    }

    /// Normal-ordered product.  For each pair of terms
    /// `(p z^g)(q z^h) = p * q(u - g) * prod_e P_{g_e, h_e}(u_e) * z^{g+h}`.
    pub fn mul(&self, rhs: &WeylElement) -> Result<WeylElement, Error> {
        let mut out = WeylElement::zero();
        for (g, p) in &self.terms {
            for (h, q) in &rhs.terms {
                let mut coeff = p.checked_mul(&q.translate(|e| -g.get(e)))?;
                for (e, m) in g.iter() {
                    let n = h.get(e);
                    if m > 0 && n < 0 || m < 0 && n > 0 {
                        coeff = coeff.checked_mul(&pmn(m, n)?.as_poly(e)?)?;
                    }
                }
                out.add_term(g.plus(h), coeff);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<WeylElement, Error> {
        let mut out = WeylElement::one();
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `ab - ba`.
    pub fn commutator(&self, rhs: &WeylElement) -> Result<WeylElement, Error> {
        Ok(self.mul(rhs)?.minus(&rhs.mul(self)?))
    }

    /// The star involution: `x_e <-> y_e`, scalars conjugated,
    /// anti-multiplicative.  On normal forms
    /// `star(p z^g) = conj(p)(u + g) z^{-g}`.
    pub fn star(&self) -> WeylElement {
        let mut out = WeylElement::zero();
        for (g, p) in &self.terms {
            out.add_term(g.negated(), p.conj().translate(|e| g.get(e)));
        }
        out
    }
}

/// A monic product of linear factors `u - r` with integer roots; the shape
/// every structure polynomial has.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PmnPoly {
    /// Roots in increasing order (with multiplicity, though none repeat).
    roots: Vec<i64>,
}

impl PmnPoly {
    pub fn constant_one() -> Self {
        PmnPoly::default()
    }

    pub fn from_roots(mut roots: Vec<i64>) -> Self {
        roots.sort_unstable();
        PmnPoly { roots }
    }

    pub fn roots(&self) -> &[i64] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn is_one(&self) -> bool {
        self.roots.is_empty()
    }

    /// Instantiates at the variable of one edge.  The degree equals the
    /// root count, which the multiplicities do not bound, so the guard
    /// can trip.
    pub fn as_poly(&self, edge: &str) -> Result<Poly, Error> {
        let mut out = Poly::one();
        for r in &self.roots {
            out = out.checked_mul(&Poly::var_plus(edge, -r))?;
        }
        Ok(out)
    }
}

/// The structure polynomial `P_{m,n}` with `z^(m) z^(n) = P_{m,n}(u) z^(m+n)`
/// on a single edge.  `P_{m,n} = 1` when `m n >= 0`; otherwise it is a monic
/// product of `min(|m|, |n|)` linear factors whose roots are positive
/// integers for `m > 0 > n` and non-positive integers for `m < 0 < n`.
///
/// The closed form is validated against [`normal_order_word`] over the
/// range `|m|, |n| <= 8` on first use; a mismatch panics.
pub fn pmn(m: i64, n: i64) -> Result<PmnPoly, Error> {
    static VALIDATED: OnceLock<()> = OnceLock::new();
    VALIDATED.get_or_init(|| {
        // The sweep needs intermediate degrees around twice the range, so
        // it runs under its own cap even when the caller tightened theirs.
        let caller_cap = crate::poly::degree_cap();
        crate::poly::set_degree_cap(caller_cap.max(64));
        let outcome = validate_pmn_closed_forms(8);
        crate::poly::set_degree_cap(caller_cap);
        outcome.expect("structure polynomial closed forms disagree with the word-rewriting engine");
    });
    pmn_closed_form(m, n)
}

fn pmn_closed_form(m: i64, n: i64) -> Result<PmnPoly, Error> {
    if m >= 0 && n >= 0 || m <= 0 && n <= 0 {
        return Ok(PmnPoly::constant_one());
    }
    let count = m.abs().min(n.abs());
    let roots = if m > 0 {
        // m > 0 > n: roots m, m-1, ..., m-count+1, all positive.
        (0..count).map(|j| m - j).collect()
    } else {
        // m < 0 < n: roots 1-|m|, ..., down from 0, all non-positive.
        (0..count).map(|j| -(m.abs() - 1 - j)).collect()
    };
    Ok(PmnPoly::from_roots(roots))
}

/// Checks the closed forms against the word-rewriting engine on the full
/// square `|m|, |n| <= range`.
pub fn validate_pmn_closed_forms(range: i64) -> Result<(), Error> {
    for m in -range..=range {
        for n in -range..=range {
            let mut word = Vec::new();
            push_z_word(&mut word, "", m);
            push_z_word(&mut word, "", n);
            let ordered = normal_order_word(&word)?;
            let mut expected = WeylElement::zero();
            let mut g = DegreeE::new();
            g.add_to("", m + n);
            expected.add_term(g, pmn_closed_form(m, n)?.as_poly("")?);
            if ordered != expected {
                return Err(Error::CrossCheck(format!(
                    "P({m},{n}): closed form {} but word engine found {}",
                    expected, ordered
                )));
            }
        }
    }
    Ok(())
}

/// Appends the letters of `z^(k)` on one edge to a word.
pub fn push_z_word(word: &mut Vec<WeylGen>, edge: &str, k: i64) {
    for _ in 0..k.abs() {
        word.push(if k > 0 {
            WeylGen::X(edge.to_string())
        } else {
            WeylGen::Y(edge.to_string())
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Letter {
    X(String),
    Y(String),
}

impl Letter {
    fn edge(&self) -> &str {
        match self {
            Letter::X(e) | Letter::Y(e) => e,
        }
    }

    /// +1 for x, -1 for y: the degree contribution.
    fn step(&self) -> i64 {
        match self {
            Letter::X(_) => 1,
            Letter::Y(_) => -1,
        }
    }
}

/// Normal-orders an arbitrary word in the `x_e`, `y_e` and polynomial
/// coefficients by single-step rewriting:
///
/// * generators of distinct edges commute,
/// * `x_e y_e -> y_e x_e - 1`,
/// * `y_e x_e -> u_e`,
/// * coefficients move to the front through `x_e q(u_e) = q(u_e - 1) x_e`
///   and `y_e q(u_e) = q(u_e + 1) y_e`.
///
/// This engine never consults the `P_{m,n}` closed forms, so it serves as
/// the independent reference for them and for [`WeylElement::mul`].
pub fn normal_order_word(word: &[WeylGen]) -> Result<WeylElement, Error> {
    // Absorb every coefficient into a front polynomial.  A coefficient
    // moving left through a letter picks up the letter's shift; the total
    // shift only depends on the net degree of the letters passed.
    let mut coeff = Poly::one();
    let mut letters: Vec<Letter> = Vec::new();
    let mut net = DegreeE::new();
    for atom in word {
        match atom {
            WeylGen::X(e) => {
                letters.push(Letter::X(e.clone()));
                net.add_to(e, 1);
            }
            WeylGen::Y(e) => {
                letters.push(Letter::Y(e.clone()));
                net.add_to(e, -1);
            }
            WeylGen::Coeff(p) => {
                let moved = p.translate(|e| -net.get(e));
                coeff = coeff.checked_mul(&moved)?;
            }
        }
    }

    let mut finished = WeylElement::zero();
    let mut work: BTreeMap<Vec<Letter>, Poly> = BTreeMap::new();
    if !coeff.is_zero() {
        work.insert(letters, coeff);
    }
    while let Some((word, coeff)) = work.pop_first() {
        match first_rewrite(&word) {
            None => {
                // Fully ordered: per edge a pure x-run or pure y-run.
                let mut degree = DegreeE::new();
                for l in &word {
                    degree.add_to(l.edge(), l.step());
                }
                finished.add_term(degree, coeff);
            }
            Some((i, Rewrite::Swap)) => {
                let mut w = word;
                w.swap(i, i + 1);
                merge(&mut work, w, coeff);
            }
            Some((i, Rewrite::XtoY)) => {
                // x y = y x - 1.
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                let mut dropped = word;
                dropped.drain(i..i + 2);
                merge(&mut work, swapped, coeff.clone());
                merge(&mut work, dropped, -coeff);
            }
            Some((i, Rewrite::YtoU)) => {
                // y x = u, and the new coefficient moves to the front,
                // shifted by the net degree of the prefix.
                let edge = word[i].edge().to_string();
                let mut shift = 0i64;
                for l in &word[..i] {
                    if l.edge() == edge {
                        shift += l.step();
                    }
                }
                let u = Poly::var_plus(&edge, -shift);
                let mut w = word;
                w.drain(i..i + 2);
                merge(&mut work, w, coeff.checked_mul(&u)?);
            }
        }
    }
    Ok(finished)
}

enum Rewrite {
    Swap,
    XtoY,
    YtoU,
}

fn first_rewrite(word: &[Letter]) -> Option<(usize, Rewrite)> {
    for i in 0..word.len().saturating_sub(1) {
        let (a, b) = (&word[i], &word[i + 1]);
        if a.edge() == b.edge() {
            match (a, b) {
                (Letter::X(_), Letter::Y(_)) => return Some((i, Rewrite::XtoY)),
                (Letter::Y(_), Letter::X(_)) => return Some((i, Rewrite::YtoU)),
                _ => {}
            }
        } else if a.edge() > b.edge() {
            return Some((i, Rewrite::Swap));
        }
    }
    None
}

fn merge(work: &mut BTreeMap<Vec<Letter>, Poly>, word: Vec<Letter>, coeff: Poly) {
    if coeff.is_zero() {
        return;
    }
    match work.entry(word) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().clone() + coeff;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Interprets a parsed expression as a Weyl element.  Symbols: `x_<e>`,
/// `y_<e>`, `u_<e>`, the anonymous forms `x`, `y`, `u`, and the imaginary
/// unit `i`.
pub fn ast_to_weyl(ast: &Ast) -> Result<WeylElement, Error> {
    match ast {
        Ast::Sum(terms) => {
            let mut acc = WeylElement::zero();
            for (neg, t) in terms {
                let w = ast_to_weyl(t)?;
                acc = acc.plus(&if *neg { w.negated() } else { w });
            }
            Ok(acc)
        }
        Ast::Prod(factors) => {
            let mut acc = WeylElement::one();
            for f in factors {
                acc = acc.mul(&ast_to_weyl(f)?)?;
            }
            Ok(acc)
        }
        Ast::Pow(base, e) => ast_to_weyl(base)?.pow(*e),
        Ast::Num(n) => Ok(WeylElement::from_poly(Poly::constant(Scalar::new(
            n.clone(),
            BigRational::from_integer(0.into()),
        )))),
        Ast::Sym(s) => {
            if s == "i" {
                return Ok(WeylElement::from_poly(Poly::constant(Scalar::i())));
            }
            for (prefix, builder) in [
                ("x", WeylElement::x as fn(&str) -> WeylElement),
                ("y", WeylElement::y),
                ("u", WeylElement::u),
            ] {
                if s == prefix {
                    return Ok(builder(""));
                }
                if let Some(id) = s.strip_prefix(&format!("{prefix}_")) {
                    return Ok(builder(id));
                }
            }
            Err(Error::Parse(format!(
                "symbol `{s}` is not a Weyl generator"
            )))
        }
    }
}

/// Parses a Weyl expression such as `x x y` or `u_a^2 * y_a + i`.
pub fn parse_weyl(input: &str) -> Result<WeylElement, Error> {
    ast_to_weyl(&parse_ast(input)?)
}

fn fmt_z_monomial(g: &DegreeE) -> String {
    g.iter()
        .map(|(e, k)| {
            let gen = if k > 0 { "x" } else { "y" };
            let name = if e.is_empty() {
                gen.to_string()
            } else {
                format!("{gen}_{e}")
            };
            if k.abs() == 1 {
                name
            } else {
                format!("{name}^{}", k.abs())
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for WeylElement {
    /// Terms sorted by degree vector, each `coefficient * z-monomial` with
    /// multi-term coefficients parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, p) in &self.terms {
            let single_term = p.terms().count() == 1;
            // Pull a minus sign out of single-term real or imaginary
            // coefficients so sums print cleanly.
            let (negative, shown) = if single_term {
                let s = p.to_string();
                match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                }
            } else {
                (false, format!("({p})"))
            };
            let body = if g.is_zero() {
                // A leading degree-zero term prints bare; later ones keep
                // the parentheses so the joining sign stays unambiguous.
                if first && !single_term {
                    p.to_string()
                } else {
                    shown
                }
            } else if shown == "1" {
                fmt_z_monomial(g)
            } else {
                format!("{shown} * {}", fmt_z_monomial(g))
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
