//! The canonical representation of the algebra of a multiquiver by
//! differential operators, word reduction inside the algebra, and the
//! structural reports built on top of them.
//!
//! The generator `X_v` maps to `z^{gamma(v)}` and `Y_v` to `z^{-gamma(v)}`
//! in the Weyl algebra over the edge set; polynomial coefficients map to
//! themselves.  Everything downstream of that assignment is computed in the
//! exact normal-ordered engine of [`crate::weyl`].

use crate::error::Error;
use crate::graph::{DegreeE, DegreeV, EquilibriumReport, Multiquiver};
use crate::parse::{parse_ast, Ast};
use crate::poly::Poly;
use crate::ring::{shift_apply, TgwDatum};
use crate::scalar::Scalar;
use crate::weyl::{pmn, WeylElement};
use num::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One generator letter, indexed by a vertex id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TgwLetter {
    X(String),
    Y(String),
}

impl TgwLetter {
    pub fn vertex(&self) -> &str {
        match self {
            TgwLetter::X(v) | TgwLetter::Y(v) => v,
        }
    }

    /// Contribution to the vertex degree: +1 for `X_v`, -1 for `Y_v`.
    pub fn degree_step(&self) -> i64 {
        match self {
            TgwLetter::X(_) => 1,
            TgwLetter::Y(_) => -1,
        }
    }
}

impl fmt::Display for TgwLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TgwLetter::X(v) => write!(f, "X_{v}"),
            TgwLetter::Y(v) => write!(f, "Y_{v}"),
        }
    }
}

impl Serialize for TgwLetter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TgwLetter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if let Some(v) = text.strip_prefix("X_") {
            return Ok(TgwLetter::X(v.to_string()));
        }
        if let Some(v) = text.strip_prefix("Y_") {
            return Ok(TgwLetter::Y(v.to_string()));
        }
        Err(serde::de::Error::custom(format!(
            "`{text}` is not a generator letter"
        )))
    }
}

/// The vertex degree of a word.
pub fn word_degree(word: &[TgwLetter]) -> DegreeV {
    let mut d = DegreeV::new();
    for l in word {
        d.add_to(l.vertex(), l.degree_step());
    }
    d
}

/// A sum of terms `coeff * word`, the coefficient written on the left of
/// the word.  Terms with equal words are merged.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TgwExpr {
    terms: BTreeMap<Vec<TgwLetter>, Poly>,
}

impl TgwExpr {
    pub fn zero() -> Self {
        TgwExpr::default()
    }

    pub fn from_poly(p: Poly) -> Self {
        let mut out = TgwExpr::zero();
        out.add_term(Vec::new(), p);
        out
    }

    pub fn letter(l: TgwLetter) -> Self {
        let mut out = TgwExpr::zero();
        out.add_term(vec![l], Poly::one());
        out
    }

    pub fn word(word: Vec<TgwLetter>) -> Self {
        let mut out = TgwExpr::zero();
        out.add_term(word, Poly::one());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<TgwLetter>, &Poly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, word: Vec<TgwLetter>, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
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

    pub fn plus(&self, other: &TgwExpr) -> TgwExpr {
        let mut out = self.clone();
        for (w, p) in &other.terms {
            out.add_term(w.clone(), p.clone());
        }
        out
    }

    pub fn negated(&self) -> TgwExpr {
        TgwExpr {
            terms: self
                .terms
                .iter()
                .map(|(w, p)| (w.clone(), -p.clone()))
                .collect(),
        }
    }
}

/// One term of an expression in its serialized shape.
#[derive(Serialize, Deserialize)]
struct TermView {
    coeff: Poly,
    word: Vec<TgwLetter>,
}

impl Serialize for TgwExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let views: Vec<TermView> = self
            .terms
            .iter()
            .map(|(w, p)| TermView {
                coeff: p.clone(),
                word: w.clone(),
            })
            .collect();
        views.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TgwExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let views = Vec::<TermView>::deserialize(d)?;
        let mut out = TgwExpr::zero();
        for v in views {
            out.add_term(v.word, v.coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for TgwExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, p) in &self.terms {
            let single_term = p.terms().count() == 1;
            let (negative, shown) = if single_term {
                let s = p.to_string();
                match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                }
            } else {
                (false, format!("({p})"))
            };
            let mono = word
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("*");
            let body = if word.is_empty() {
                if first && !single_term {
                    p.to_string()
                } else {
                    shown
                }
            } else if shown == "1" {
                mono
            } else {
                format!("{shown} * {mono}")
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

/// Product of two expressions.  Coefficients of the right factor are pulled
/// to the front through the left factor's letters, which shifts them by the
/// incidence image of the passed degree.
pub fn expr_mul(graph: &Multiquiver, a: &TgwExpr, b: &TgwExpr) -> Result<TgwExpr, Error> {
    let mut out = TgwExpr::zero();
    for (w1, p1) in a.terms() {
        let d = word_degree(w1);
        for (w2, p2) in b.terms() {
            let moved = shift_apply(graph, &d, p2)?;
            let mut word = w1.clone();
            word.extend(w2.iter().cloned());
            out.add_term(word, p1.checked_mul(&moved)?);
        }
    }
    Ok(out)
}

pub fn expr_pow(graph: &Multiquiver, a: &TgwExpr, k: u32) -> Result<TgwExpr, Error> {
    let mut out = TgwExpr::from_poly(Poly::one());
    for _ in 0..k {
        out = expr_mul(graph, &out, a)?;
    }
    Ok(out)
}

/// Interprets a parsed expression over a datum.  Symbols: `X_<v>`, `Y_<v>`,
/// `u_<e>`, `t_<v>` (expands to the vertex polynomial) and `i`.
pub fn ast_to_tgw(datum: &TgwDatum, ast: &Ast) -> Result<TgwExpr, Error> {
    let graph = datum.graph();
    match ast {
        Ast::Sum(terms) => {
            let mut acc = TgwExpr::zero();
            for (neg, t) in terms {
                let e = ast_to_tgw(datum, t)?;
                acc = acc.plus(&if *neg { e.negated() } else { e });
            }
            Ok(acc)
        }
        Ast::Prod(factors) => {
            let mut acc = TgwExpr::from_poly(Poly::one());
            for f in factors {
                acc = expr_mul(graph, &acc, &ast_to_tgw(datum, f)?)?;
            }
            Ok(acc)
        }
        Ast::Pow(base, e) => expr_pow(graph, &ast_to_tgw(datum, base)?, *e),
        Ast::Num(n) => Ok(TgwExpr::from_poly(Poly::constant(Scalar::new(
            n.clone(),
            BigRational::from_integer(0.into()),
        )))),
        Ast::Sym(s) => {
            if s == "i" {
                return Ok(TgwExpr::from_poly(Poly::constant(Scalar::i())));
            }
            if let Some(v) = s.strip_prefix("X_") {
                if !graph.has_vertex(v) {
                    return Err(Error::UnknownVertex(v.to_string()));
                }
                return Ok(TgwExpr::letter(TgwLetter::X(v.to_string())));
            }
            if let Some(v) = s.strip_prefix("Y_") {
                if !graph.has_vertex(v) {
                    return Err(Error::UnknownVertex(v.to_string()));
                }
                return Ok(TgwExpr::letter(TgwLetter::Y(v.to_string())));
            }
            if let Some(v) = s.strip_prefix("t_") {
                return Ok(TgwExpr::from_poly(datum.t(v)?.clone()));
            }
            if let Some(e) = s.strip_prefix("u_") {
                if graph.edge(e).is_none() {
                    return Err(Error::UnknownEdge(e.to_string()));
                }
                return Ok(TgwExpr::from_poly(Poly::var(e)));
            }
            Err(Error::Parse(format!(
                "symbol `{s}` is not a generator of the algebra"
            )))
        }
    }
}

/// Parses an expression such as `Y_2 X_1 X_2` or `X_1 Y_1 - t_1`.
pub fn parse_tgw(datum: &TgwDatum, input: &str) -> Result<TgwExpr, Error> {
    ast_to_tgw(datum, &parse_ast(input)?)
}

/// Image of one letter under the representation.
pub fn phi_letter(graph: &Multiquiver, letter: &TgwLetter) -> Result<WeylElement, Error> {
    let col = graph.gamma_column(letter.vertex())?;
    Ok(match letter {
        TgwLetter::X(_) => WeylElement::z(col),
        TgwLetter::Y(_) => WeylElement::z(col.negated()),
    })
}

/// Image of an expression under the representation.
pub fn phi_expr(graph: &Multiquiver, expr: &TgwExpr) -> Result<WeylElement, Error> {
    let mut out = WeylElement::zero();
    for (word, coeff) in expr.terms() {
        for var in coeff.vars() {
            if graph.edge(&var).is_none() {
                return Err(Error::UnknownVariable(var));
            }
        }
        let mut acc = WeylElement::from_poly(coeff.clone());
        for l in word {
            acc = acc.mul(&phi_letter(graph, l)?)?;
        }
        out = out.plus(&acc);
    }
    Ok(out)
}

/// The ordered product identity: for distinct vertices `v_1 < ... < v_k`
/// in the given order,
/// `phi(X_{v_1} ... X_{v_k}) = prod_{a<b} prod_e P_{gamma_{e,v_a}, gamma_{e,v_b}}(u_e) * z^{gamma(sum)}`
/// with `e` running over proper edges joining the pair.  The closed form is
/// recomputed through the normal-ordered engine and both sides must agree.
pub fn ordered_product_formula(
    graph: &Multiquiver,
    order: &[String],
) -> Result<(Poly, DegreeE), Error> {
    let mut seen = BTreeSet::new();
    for v in order {
        if !graph.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        if !seen.insert(v.clone()) {
            return Err(Error::DuplicateId(v.clone()));
        }
    }
    let mut coeff = Poly::one();
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            for edge in graph.edges().filter(|e| e.is_proper()) {
                let s1 = &edge.source.as_ref().unwrap().vertex;
                let t1 = &edge.target.as_ref().unwrap().vertex;
                let joins =
                    (s1 == &order[a] && t1 == &order[b]) || (s1 == &order[b] && t1 == &order[a]);
                if joins {
                    let m = graph.gamma_entry(&edge.id, &order[a]);
                    let n = graph.gamma_entry(&edge.id, &order[b]);
                    coeff = coeff.checked_mul(&pmn(m, n)?.as_poly(&edge.id)?)?;
                }
            }
        }
    }
    let mut degree = DegreeE::new();
    for v in order {
        degree = degree.plus(&graph.gamma_column(v)?);
    }

    // Recompute the product letter by letter in the Weyl engine.
    let mut direct = WeylElement::one();
    for v in order {
        direct = direct.mul(&phi_letter(graph, &TgwLetter::X(v.clone()))?)?;
    }
    let mut expected = WeylElement::zero();
    expected.add_term(degree.clone(), coeff.clone());
    if direct != expected {
        return Err(Error::CrossCheck(format!(
            "ordered product over {:?}: closed form {} but engine found {}",
            order, expected, direct
        )));
    }
    Ok((coeff, degree))
}

/// A sum of reduced terms: every word has all `Y` letters before all `X`
/// letters, and no vertex appears in both blocks of one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub expr: TgwExpr,
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

fn is_reduced_word(word: &[TgwLetter]) -> bool {
    let first_x = word
        .iter()
        .position(|l| matches!(l, TgwLetter::X(_)))
        .unwrap_or(word.len());
    let (ys, xs) = word.split_at(first_x);
    if xs.iter().any(|l| matches!(l, TgwLetter::Y(_))) {
        return false;
    }
    let y_support: BTreeSet<&str> = ys.iter().map(TgwLetter::vertex).collect();
    xs.iter().all(|l| !y_support.contains(l.vertex()))
}

/// Reduces one word to `coeff * (reduced word)` using only the defining
/// relations: letters of distinct vertices exchange past each other where
/// the relations allow it, `Y_v X_v` contracts to `t_v`, `X_v Y_v` to
/// `sigma_v(t_v)`, and coefficients move to the front through the
/// automorphisms.
fn reduce_word(datum: &TgwDatum, word: &[TgwLetter]) -> Result<(Poly, Vec<TgwLetter>), Error> {
    let Some(p) = word.iter().position(|l| matches!(l, TgwLetter::X(_))) else {
        return Ok((Poly::one(), word.to_vec()));
    };
    let i = word[p].vertex().to_string();
    // Everything before position p is a Y letter.
    if let Some(q) = word[..p].iter().rposition(|l| l.vertex() == i) {
        // Slide X_i left past the Y letters of other vertices until it
        // meets Y_i, contract to t_i, and move t_i to the front.
        let mut c = datum.t(&i)?.clone();
        for l in word[..q].iter().rev() {
            c = datum.sigma_inv(l.vertex(), &c)?;
        }
        let mut rest = word[..q].to_vec();
        rest.extend_from_slice(&word[q + 1..p]);
        rest.extend_from_slice(&word[p + 1..]);
        let (c2, reduced) = reduce_word(datum, &rest)?;
        Ok((c.checked_mul(&c2)?, reduced))
    } else {
        // No Y_i on the left: extract X_i to the front, reduce the rest,
        // then slide X_i back to its place in the reduced word.
        let mut rest = word[..p].to_vec();
        rest.extend_from_slice(&word[p + 1..]);
        let (c, reduced) = reduce_word(datum, &rest)?;
        let coeff = datum.sigma(&i, &c)?;
        let mut k = 0;
        while k < reduced.len() {
            match &reduced[k] {
                TgwLetter::Y(j) if *j == i => {
                    // X_i meets Y_i: contract to sigma_i(t_i) and move it
                    // to the front past the Y letters already crossed.
                    let mut c2 = datum.sigma(&i, datum.t(&i)?)?;
                    for l in reduced[..k].iter().rev() {
                        c2 = datum.sigma_inv(l.vertex(), &c2)?;
                    }
                    let mut out = reduced[..k].to_vec();
                    out.extend_from_slice(&reduced[k + 1..]);
                    return Ok((coeff.checked_mul(&c2)?, out));
                }
                TgwLetter::Y(_) => k += 1,
                TgwLetter::X(_) => break,
            }
        }
        let mut out = reduced[..k].to_vec();
        out.push(TgwLetter::X(i));
        out.extend_from_slice(&reduced[k..]);
        Ok((coeff, out))
    }
}

/// Reduces an expression term by term.  The result is verified two ways:
/// every reduced word must have the block shape with disjoint vertex
/// support, and the representation images of input and output must agree.
pub fn reduce(datum: &TgwDatum, expr: &TgwExpr) -> Result<ReducedForm, Error> {
    let graph = datum.graph();
    let mut out = TgwExpr::zero();
    for (word, p) in expr.terms() {
        let (c, reduced) = reduce_word(datum, word)?;
        if !is_reduced_word(&reduced) {
            return Err(Error::CrossCheck(format!(
                "word reduction produced a non-reduced word {:?}",
                reduced.iter().map(|l| l.to_string()).collect::<Vec<_>>()
            )));
        }
        out.add_term(reduced, p.checked_mul(&c)?);
    }
    let lhs = phi_expr(graph, expr)?;
    let rhs = phi_expr(graph, &out)?;
    if lhs != rhs {
        return Err(Error::CrossCheck(format!(
            "word reduction changed the representation image: {} vs {}",
            lhs, rhs
        )));
    }
    Ok(ReducedForm { expr: out })
}

/// The parity of a proper edge under a total order: +1 when the source
/// vertex comes first.  `None` when the edge is not proper or an endpoint
/// is missing from the order.
pub fn parity_of_order(graph: &Multiquiver, order: &[String], edge_id: &str) -> Option<i64> {
    let edge = graph.edge(edge_id)?;
    if !edge.is_proper() {
        return None;
    }
    let s1 = &edge.source.as_ref().unwrap().vertex;
    let t1 = &edge.target.as_ref().unwrap().vertex;
    let ps = order.iter().position(|v| v == s1)?;
    let pt = order.iter().position(|v| v == t1)?;
    Some(if ps < pt { 1 } else { -1 })
}

/// Finds a total order realizing a requested parity on a set of proper
/// edges: `+1` forces the source before the target, `-1` the reverse.
/// Unconstrained vertices are placed in id order.  When the constraints
/// form a directed cycle the error lists its vertices; otherwise the
/// returned order is checked to reproduce the parity exactly.
pub fn order_for_parity(
    graph: &Multiquiver,
    parity: &BTreeMap<String, i64>,
) -> Result<Vec<String>, Error> {
    let mut arcs: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut indegree: BTreeMap<&str, usize> = graph.vertex_ids().map(|v| (v, 0)).collect();
    for (eid, sign) in parity {
        let edge = graph
            .edge(eid)
            .ok_or_else(|| Error::UnknownEdge(eid.clone()))?;
        if !edge.is_proper() {
            return Err(Error::Unsupported(format!(
                "edge `{eid}` is a leaf and has no parity"
            )));
        }
        if *sign != 1 && *sign != -1 {
            return Err(Error::Parse(format!(
                "parity of edge `{eid}` must be 1 or -1"
            )));
        }
        let s1 = edge.source.as_ref().unwrap().vertex.as_str();
        let t1 = edge.target.as_ref().unwrap().vertex.as_str();
        let (from, to) = if *sign == 1 { (s1, t1) } else { (t1, s1) };
        if arcs.entry(from).or_default().insert(to) {
            *indegree.get_mut(to).unwrap() += 1;
        }
    }

    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(v, _)| *v)
        .collect();
    let mut order: Vec<String> = Vec::new();
    let mut placed: BTreeSet<&str> = BTreeSet::new();
    while let Some(v) = ready.iter().next().copied() {
        ready.remove(v);
        placed.insert(v);
        order.push(v.to_string());
        if let Some(next) = arcs.get(v) {
            for w in next {
                let d = indegree.get_mut(w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(w);
                }
            }
        }
    }
    if order.len() < indegree.len() {
        // Walk arcs inside the unplaced set until a vertex repeats.
        let remaining: BTreeSet<&str> = indegree
            .keys()
            .filter(|v| !placed.contains(**v))
            .copied()
            .collect();
        let start = *remaining.iter().next().unwrap();
        let mut seen: Vec<&str> = vec![start];
        let mut v = start;
        loop {
            let next = arcs
                .get(v)
                .and_then(|ws| ws.iter().find(|w| remaining.contains(**w)))
                .copied()
                .expect("an unplaced vertex always has an unplaced successor");
            if let Some(pos) = seen.iter().position(|s| *s == next) {
                let cycle = seen[pos..].iter().map(|s| s.to_string()).collect();
                return Err(Error::CyclePresent(cycle));
            }
            seen.push(next);
            v = next;
        }
    }

    for (eid, sign) in parity {
        if parity_of_order(graph, &order, eid) != Some(*sign) {
            return Err(Error::CrossCheck(format!(
                "constructed order fails the parity of edge `{eid}`"
            )));
        }
    }
    Ok(order)
}

/// Faithfulness of the representation, decided two independent ways that
/// must agree: the rational kernel of the incidence matrix, and the count
/// of components in equilibrium.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub faithful: bool,
    /// Rank of the grading-group kernel of the representation.
    pub kernel_rank: usize,
    /// Basis of integer vectors spanning the kernel of the incidence map.
    pub kernel_basis: Vec<DegreeV>,
    pub equilibrium: EquilibriumReport,
}

pub fn faithfulness_report(graph: &Multiquiver) -> Result<FaithfulnessReport, Error> {
    let equilibrium = graph.equilibrium_analysis();
    let basis = graph.incidence_matrix().kernel_basis()?;
    let in_eq = equilibrium
        .components
        .iter()
        .filter(|c| c.in_equilibrium)
        .count();
    if in_eq != basis.len() || equilibrium.kernel_rank != basis.len() {
        return Err(Error::CrossCheck(format!(
            "kernel rank {} vs {} components in equilibrium",
            basis.len(),
            in_eq
        )));
    }
    Ok(FaithfulnessReport {
        faithful: basis.is_empty(),
        kernel_rank: basis.len(),
        kernel_basis: basis,
        equilibrium,
    })
}

/// One generator of the obstruction ideal on the failure path: the factor
/// guaranteed to divide every ordered product whose parity at `edge`
/// equals `parity`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionGenerator {
    pub edge: String,
    /// The edge parity selecting this factor: +1 is source-first.
    pub parity: i64,
    pub factor: Poly,
    pub roots: Vec<i64>,
    /// Total orders of the cycle vertices that this generator covers.
    pub orders: Vec<Vec<String>>,
}

/// Evidence that the representation misses some weight component: a cycle,
/// a parity function no order realizes, and a common zero of one chosen
/// factor from every ordered product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionWitness {
    /// The weight the image provably misses: the sum of the cycle vertices.
    pub degree: DegreeV,
    pub cycle_vertices: Vec<String>,
    pub cycle_edges: Vec<String>,
    /// The unrealizable parity function, on the cycle edges.
    pub parity_target: BTreeMap<String, i64>,
    /// The directed constraint cycle proving no order realizes it.
    pub constraint_cycle: Vec<String>,
    pub generators: Vec<ObstructionGenerator>,
    /// A point where every generator vanishes, by edge variable.
    pub common_zero: BTreeMap<String, i64>,
}

/// Exhaustive no-common-zero evidence on the success path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityCertificate {
    /// The weight certified reached: the sum of the inspected vertices.
    pub degree: DegreeV,
    pub orders_checked: usize,
    pub distinct_products: usize,
    pub candidate_points_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityReport {
    pub locally_surjective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spanning_forest: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SurjectivityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ObstructionWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Vertex-count cap for the exhaustive order enumerations.
const ORDER_ENUMERATION_CAP: usize = 9;

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, head) in items.iter().enumerate() {
        let mut rest: Vec<String> = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// The factor of the ordered-product coefficient contributed by one proper
/// edge in one direction: +1 reads the incidence entries source-first.
fn directional_factor(
    graph: &Multiquiver,
    edge_id: &str,
    parity: i64,
) -> Result<crate::weyl::PmnPoly, Error> {
    let edge = graph
        .edge(edge_id)
        .ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
    let s1 = edge.source.as_ref().unwrap().vertex.clone();
    let t1 = edge.target.as_ref().unwrap().vertex.clone();
    let ms = graph.gamma_entry(edge_id, &s1);
    let mt = graph.gamma_entry(edge_id, &t1);
    if parity == 1 {
        pmn(ms, mt)
    } else {
        pmn(mt, ms)
    }
}

/// Decides local surjectivity of the representation.  The verdict is
/// acyclicity of the underlying graph; the report carries evidence for
/// whichever side holds.  `degree`, when given, must be a sum of distinct
/// vertices and selects the weight the success certificate inspects; the
/// default is the sum of all vertices.
pub fn local_surjectivity_report(
    graph: &Multiquiver,
    degree: Option<&DegreeV>,
) -> Result<SurjectivityReport, Error> {
    let inspected: Vec<String> = match degree {
        Some(d) => {
            for (v, k) in d.iter() {
                if !graph.has_vertex(v) {
                    return Err(Error::UnknownVertex(v.to_string()));
                }
                if k != 1 {
                    return Err(Error::Parse(format!(
                        "test degree must be a sum of distinct vertices, got coefficient {k} at `{v}`"
                    )));
                }
            }
            d.support().map(str::to_string).collect()
        }
        None => graph.vertex_ids().map(str::to_string).collect(),
    };
    if graph.is_acyclic() {
        let forest = graph.spanning_forest();
        let (certificate, note) = if inspected.len() <= ORDER_ENUMERATION_CAP {
            match success_certificate(graph, &inspected) {
                Ok(c) => (Some(c), None),
                Err(Error::Unsupported(msg)) => (None, Some(msg)),
                Err(other) => return Err(other),
            }
        } else {
            (
                None,
                Some(format!(
                    "order enumeration skipped: {} vertices exceed the cap {}",
                    inspected.len(),
                    ORDER_ENUMERATION_CAP
                )),
            )
        };
        return Ok(SurjectivityReport {
            locally_surjective: true,
            spanning_forest: Some(forest),
            certificate,
            witness: None,
            note,
        });
    }

    let (cycle_vertices, cycle_edges) = graph
        .find_cycle()
        .expect("a graph that is not acyclic contains a cycle");

    // The parity function: the cycle order itself on all edges but the
    // last, flipped on the closing edge.  No total order realizes it.
    let position: BTreeMap<&str, usize> = cycle_vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut parity_target = BTreeMap::new();
    for (k, eid) in cycle_edges.iter().enumerate() {
        let edge = graph.edge(eid).unwrap();
        let ps = position[edge.source.as_ref().unwrap().vertex.as_str()];
        let pt = position[edge.target.as_ref().unwrap().vertex.as_str()];
        let along = if ps < pt { 1 } else { -1 };
        let sign = if k + 1 == cycle_edges.len() {
            -along
        } else {
            along
        };
        parity_target.insert(eid.clone(), sign);
    }
    let constraint_cycle = match order_for_parity(graph, &parity_target) {
        Err(Error::CyclePresent(cycle)) => cycle,
        other => {
            return Err(Error::CrossCheck(format!(
                "the flipped cycle parity should admit no order, got {:?}",
                other
            )))
        }
    };

    // One generator per order of the cycle vertices: the factor at the
    // first cycle edge whose parity disagrees with the target.  Keyed by
    // (edge, parity); only the direction opposite the target can appear.
    let mut selected: BTreeMap<(String, i64), Vec<Vec<String>>> = BTreeMap::new();
    if cycle_vertices.len() <= ORDER_ENUMERATION_CAP {
        let mut base = cycle_vertices.clone();
        base.sort();
        for order in permutations(&base) {
            let mut chosen = None;
            for eid in &cycle_edges {
                let p = parity_of_order(graph, &order, eid)
                    .expect("cycle edges are proper with both endpoints on the cycle");
                if p != parity_target[eid] {
                    chosen = Some((eid.clone(), p));
                    break;
                }
            }
            let Some(key) = chosen else {
                return Err(Error::CrossCheck(format!(
                    "order {:?} realizes the supposedly unrealizable parity",
                    order
                )));
            };
            selected.entry(key).or_default().push(order);
        }
    } else {
        // Too many orders to enumerate; the anti-target direction of every
        // cycle edge still covers them all.
        for eid in &cycle_edges {
            selected.insert((eid.clone(), -parity_target[eid]), Vec::new());
        }
    }

    let mut generators = Vec::new();
    let mut common_zero: BTreeMap<String, i64> = BTreeMap::new();
    for ((eid, parity), orders) in selected {
        let factor = directional_factor(graph, &eid, parity)?;
        let root = *factor
            .roots()
            .iter()
            .min()
            .expect("a proper edge factor is never constant");
        common_zero.insert(eid.clone(), root);
        generators.push(ObstructionGenerator {
            edge: eid.clone(),
            parity,
            factor: factor.as_poly(&eid)?,
            roots: factor.roots().to_vec(),
            orders,
        });
    }
    for g in &generators {
        let value = g.factor.eval_int(&common_zero)?;
        if !value.is_zero() {
            return Err(Error::CrossCheck(format!(
                "generator at edge `{}` does not vanish at the common zero",
                g.edge
            )));
        }
    }

    let mut witness_degree = DegreeV::new();
    for v in &cycle_vertices {
        witness_degree.add_to(v, 1);
    }
    Ok(SurjectivityReport {
        locally_surjective: false,
        spanning_forest: None,
        certificate: None,
        witness: Some(ObstructionWitness {
            degree: witness_degree,
            cycle_vertices,
            cycle_edges,
            parity_target,
            constraint_cycle,
            generators,
            common_zero,
        }),
        note: None,
    })
}

/// On an acyclic graph, checks exhaustively that the ordered products over
/// all vertex orders admit no common integer zero.  Products are kept in
/// factored form as roots per edge, so vanishing at an integer point is a
/// root-membership test and the candidate grid (every root plus one
/// sentinel per edge) is exhaustive.
fn success_certificate(
    graph: &Multiquiver,
    vertices: &[String],
) -> Result<SurjectivityCertificate, Error> {
    let orders = permutations(vertices);
    let orders_checked = orders.len();
    let mut products: BTreeSet<BTreeMap<String, Vec<i64>>> = BTreeSet::new();
    for order in &orders {
        let mut product: BTreeMap<String, Vec<i64>> = BTreeMap::new();
        for a in 0..order.len() {
            for b in a + 1..order.len() {
                for edge in graph.edges().filter(|e| e.is_proper()) {
                    let s1 = &edge.source.as_ref().unwrap().vertex;
                    let t1 = &edge.target.as_ref().unwrap().vertex;
                    let joins = (s1 == &order[a] && t1 == &order[b])
                        || (s1 == &order[b] && t1 == &order[a]);
                    if joins {
                        let m = graph.gamma_entry(&edge.id, &order[a]);
                        let n = graph.gamma_entry(&edge.id, &order[b]);
                        let factor = pmn(m, n)?;
                        product
                            .entry(edge.id.clone())
                            .or_default()
                            .extend(factor.roots());
                    }
                }
            }
        }
        for roots in product.values_mut() {
            roots.sort_unstable();
        }
        products.insert(product);
    }

    // Candidate values per edge: every root seen anywhere, plus one value
    // that is a root nowhere.
    let mut candidates: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for product in &products {
        for (e, roots) in product {
            candidates.entry(e.clone()).or_default().extend(roots);
        }
    }
    for values in candidates.values_mut() {
        values.sort_unstable();
        values.dedup();
        let sentinel = values.last().copied().unwrap_or(0) + 1;
        values.push(sentinel);
    }
    let edge_order: Vec<String> = candidates.keys().cloned().collect();
    let mut grid: u64 = 1;
    for values in candidates.values() {
        grid = grid.saturating_mul(values.len() as u64);
    }
    if grid > 2_000_000 {
        return Err(Error::Unsupported(format!(
            "no-common-zero search grid of {grid} points is too large"
        )));
    }

    let mut point: BTreeMap<String, i64> = BTreeMap::new();
    let mut indices = vec![0usize; edge_order.len()];
    let mut candidate_points_checked = 0usize;
    loop {
        candidate_points_checked += 1;
        for (k, e) in edge_order.iter().enumerate() {
            point.insert(e.clone(), candidates[e][indices[k]]);
        }
        let kills_all = products.iter().all(|product| {
            product.iter().any(|(e, roots)| {
                roots
                    .binary_search(point.get(e).unwrap_or(&i64::MIN))
                    .is_ok()
            })
        });
        if kills_all {
            return Err(Error::CrossCheck(format!(
                "acyclic graph but the ordered products share the zero {:?}",
                point
            )));
        }
        // Advance the mixed-radix counter.
        let mut k = 0;
        loop {
            if k == edge_order.len() {
                let mut degree = DegreeV::new();
                for v in vertices {
                    degree.add_to(v, 1);
                }
                return Ok(SurjectivityCertificate {
                    degree,
                    orders_checked,
                    distinct_products: products.len(),
                    candidate_points_checked,
                });
            }
            indices[k] += 1;
            if indices[k] < candidates[&edge_order[k]].len() {
                break;
            }
            indices[k] = 0;
            k += 1;
        }
    }
}
