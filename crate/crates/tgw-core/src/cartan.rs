//! Cartan-side structure extracted from a multiquiver: the generalized
//! Cartan matrix, the Dynkin diagram obtained by dropping leaves and
//! merging parallel edges, Serre-relation verification in the Weyl
//! engine, the two distinguished graph families realizing `gl` and `sp`,
//! and the comparison datum attached to a symmetric GCM together with
//! the homomorphism onto the algebra of its quiver.
//!
//! Matrix entries are computed two independent ways: a closed formula in
//! the incidence entries, and the order of vanishing of difference
//! operators on the `t` polynomials.  The two must agree; the Dynkin
//! diagram read back as a matrix must agree again.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::{synthesized_ids, DegreeV, Edge, Endpoint, Multiquiver};
use crate::poly::Poly;
use crate::rep::{faithfulness_report, phi_letter, TgwLetter};
use crate::ring::{build_t, shift_apply, TgwDatum};
use crate::scalar::Scalar;
use crate::weyl::WeylElement;

/// Square integer matrix with the generalized Cartan matrix axioms:
/// diagonal 2, non-positive off-diagonal, symmetric zero pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gcm {
    vertex_ids: Vec<String>,
    rows: Vec<Vec<i64>>,
}

impl Gcm {
    pub fn new(vertex_ids: Vec<String>, rows: Vec<Vec<i64>>) -> Result<Self, Error> {
        let n = vertex_ids.len();
        let distinct: BTreeSet<&String> = vertex_ids.iter().collect();
        if distinct.len() != n {
            return Err(Error::DuplicateId("repeated index id".to_string()));
        }
        if rows.len() != n {
            return Err(Error::BadMatrixShape(format!(
                "{} rows for {} indices",
                rows.len(),
                n
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadMatrixShape(format!(
                    "row {} has {} entries, want {}",
                    i,
                    row.len(),
                    n
                )));
            }
            if row[i] != 2 {
                return Err(Error::BadMatrixRow(format!(
                    "diagonal entry at {} is {}, want 2",
                    vertex_ids[i], row[i]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && rows[i][j] > 0 {
                    return Err(Error::BadMatrixRow(format!(
                        "positive off-diagonal entry {} at ({}, {})",
                        rows[i][j], vertex_ids[i], vertex_ids[j]
                    )));
                }
                if (rows[i][j] == 0) != (rows[j][i] == 0) {
                    return Err(Error::BadMatrixRow(format!(
                        "zero pattern asymmetric at ({}, {})",
                        vertex_ids[i], vertex_ids[j]
                    )));
                }
            }
        }
        Ok(Gcm { vertex_ids, rows })
    }

    pub fn size(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertex_ids.iter().position(|v| v == id)
    }

    pub fn entry_at(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn entry(&self, i: &str, j: &str) -> Result<i64, Error> {
        let a = self
            .index_of(i)
            .ok_or_else(|| Error::UnknownVertex(i.to_string()))?;
        let b = self
            .index_of(j)
            .ok_or_else(|| Error::UnknownVertex(j.to_string()))?;
        Ok(self.rows[a][b])
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    /// Exponent of the two-variable relation attached to the pair: the
    /// entry determines a polynomial `(x - 1)^(1 - a_ij)`, and this is
    /// that exponent.
    pub fn serre_exponent(&self, i: &str, j: &str) -> Result<u32, Error> {
        if i == j {
            return Err(Error::Parse(format!(
                "the relation exponent needs two distinct indices, got `{i}` twice"
            )));
        }
        Ok((1 - self.entry(i, j)?) as u32)
    }

    /// Rows of space-separated entries, index order, one row per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Gcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.render().trim_end())
    }
}

/// The matrix by the closed formula: off-diagonal entry at (i, j) is
/// minus the sum of |incidence at j| over all edges meeting i.
pub fn gcm(g: &Multiquiver) -> Result<Gcm, Error> {
    let ids: Vec<String> = g.vertex_ids().map(str::to_string).collect();
    let n = ids.len();
    let mut rows = vec![vec![0i64; n]; n];
    for (a, i) in ids.iter().enumerate() {
        for (b, j) in ids.iter().enumerate() {
            if a == b {
                rows[a][b] = 2;
                continue;
            }
            let mut total = 0i64;
            for edge in g.edges() {
                if g.gamma_entry(&edge.id, i) != 0 {
                    total += g.gamma_entry(&edge.id, j).abs();
                }
            }
            rows[a][b] = -total;
        }
    }
    Gcm::new(ids, rows)
}

/// Independent recomputation of the matrix: the off-diagonal entry is
/// `1 - k` where `k` is the order of vanishing of the difference
/// operator `sigma_i - id` on `t_j`.  Must agree with the formula.
pub fn gcm_oracle(g: &Multiquiver) -> Result<Gcm, Error> {
    let datum = TgwDatum::new(g)?;
    let ids: Vec<String> = g.vertex_ids().map(str::to_string).collect();
    let n = ids.len();
    let mut rows = vec![vec![0i64; n]; n];
    for (a, i) in ids.iter().enumerate() {
        for (b, j) in ids.iter().enumerate() {
            if a == b {
                rows[a][b] = 2;
                continue;
            }
            let tj = datum.t(j)?;
            // Each application of the difference lowers the degree, so
            // vanishing must occur within deg + 2 steps.
            let bound = tj.total_degree() as u32 + 2;
            let mut minimal = None;
            let mut current = tj.clone();
            for k in 1..=bound {
                current = datum.sigma(i, &current)? - current;
                if current.is_zero() {
                    minimal = Some(k);
                    break;
                }
            }
            let Some(k) = minimal else {
                return Err(Error::CrossCheck(format!(
                    "difference powers of t_{j} under sigma_{i} do not vanish within {bound} steps"
                )));
            };
            if !datum.difference_power(i, k, tj)?.is_zero() {
                return Err(Error::CrossCheck(format!(
                    "incremental differences of t_{j} under sigma_{i} disagree with the power operator at {k}"
                )));
            }
            rows[a][b] = 1 - k as i64;
        }
    }
    let oracle = Gcm::new(ids, rows)?;
    let formula = gcm(g)?;
    if oracle != formula {
        return Err(Error::CrossCheck(format!(
            "matrix mismatch: difference oracle gives\n{}\nbut the incidence formula gives\n{}",
            oracle.render(),
            formula.render()
        )));
    }
    Ok(oracle)
}

/// One undirected bond of the Dynkin diagram, labeled by the matrix
/// entries in both directions (both negative).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynkinBond {
    pub i: String,
    pub j: String,
    pub a_ij: i64,
    pub a_ji: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynkinDiagram {
    vertices: Vec<String>,
    bonds: Vec<DynkinBond>,
    name: String,
}

impl DynkinDiagram {
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn bonds(&self) -> &[DynkinBond] {
        &self.bonds
    }

    /// Named type for connected diagrams of rank at most 8 matching one
    /// of the patterns A/B/C/D/G_2, otherwise "unnamed".
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Reads the matrix back off the diagram: bond labels off the
    /// diagonal, 2 on it, 0 for unbonded pairs.
    pub fn induced_gcm(&self) -> Result<Gcm, Error> {
        let n = self.vertices.len();
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            rows[i][i] = 2;
        }
        let pos: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| (v.as_str(), k))
            .collect();
        for bond in &self.bonds {
            let a = pos[bond.i.as_str()];
            let b = pos[bond.j.as_str()];
            rows[a][b] = bond.a_ij;
            rows[b][a] = bond.a_ji;
        }
        Gcm::new(self.vertices.clone(), rows)
    }

    /// One line per bond: `i -- j (a_ij, a_ji)`.
    pub fn render(&self) -> String {
        if self.bonds.is_empty() {
            return "(no bonds)".to_string();
        }
        let lines: Vec<String> = self
            .bonds
            .iter()
            .map(|b| format!("{} -- {} ({}, {})", b.i, b.j, b.a_ij, b.a_ji))
            .collect();
        lines.join("\n")
    }
}

impl fmt::Display for DynkinDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Dynkin diagram of a multiquiver: leaves dropped, directions
/// forgotten, parallel edges merged by adding multiplicities.  The
/// diagram's own matrix is checked against the formula matrix.
pub fn dynkin_diagram(g: &Multiquiver) -> Result<DynkinDiagram, Error> {
    let vertices: Vec<String> = g.vertex_ids().map(str::to_string).collect();
    let mut bonds = Vec::new();
    for (a, i) in vertices.iter().enumerate() {
        for j in vertices.iter().skip(a + 1) {
            let mut m_i = 0i64;
            let mut m_j = 0i64;
            let mut joined = false;
            for edge in g.proper_edges() {
                let gi = g.gamma_entry(&edge.id, i);
                let gj = g.gamma_entry(&edge.id, j);
                if gi != 0 && gj != 0 {
                    joined = true;
                    m_i += gi.abs();
                    m_j += gj.abs();
                }
            }
            if joined {
                bonds.push(DynkinBond {
                    i: i.clone(),
                    j: j.clone(),
                    a_ij: -m_j,
                    a_ji: -m_i,
                });
            }
        }
    }
    let name = classify(&vertices, &bonds);
    let diagram = DynkinDiagram {
        vertices,
        bonds,
        name,
    };
    let induced = diagram.induced_gcm()?;
    let formula = gcm(g)?;
    if induced != formula {
        return Err(Error::CrossCheck(format!(
            "diagram matrix\n{}\ndisagrees with the incidence formula\n{}",
            induced.render(),
            formula.render()
        )));
    }
    Ok(diagram)
}

fn index_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for head in 0..n {
        for tail in index_permutations(n - 1) {
            let mut p = Vec::with_capacity(n);
            p.push(head);
            for t in tail {
                p.push(if t >= head { t + 1 } else { t });
            }
            out.push(p);
        }
    }
    out
}

fn simple_chain(r: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; r]; r];
    for i in 0..r {
        m[i][i] = 2;
    }
    for i in 0..r.saturating_sub(1) {
        m[i][i + 1] = -1;
        m[i + 1][i] = -1;
    }
    m
}

/// Candidate matrices for the named diagram types at the given rank, in
/// the order they are tried.
fn named_candidates(r: usize) -> Vec<(String, Vec<Vec<i64>>)> {
    let mut out = Vec::new();
    if r >= 1 {
        out.push((format!("A_{r}"), simple_chain(r)));
    }
    if r >= 2 {
        let mut m = simple_chain(r);
        m[r - 1][r - 2] = -2;
        out.push((format!("B_{r}"), m));
    }
    if r >= 3 {
        let mut m = simple_chain(r);
        m[r - 2][r - 1] = -2;
        out.push((format!("C_{r}"), m));
    }
    if r >= 4 {
        let mut m = vec![vec![0i64; r]; r];
        for i in 0..r {
            m[i][i] = 2;
        }
        for i in 0..r - 3 {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
        for leg in [r - 2, r - 1] {
            m[r - 3][leg] = -1;
            m[leg][r - 3] = -1;
        }
        out.push((format!("D_{r}"), m));
    }
    if r == 2 {
        out.push(("G_2".to_string(), vec![vec![2, -1], vec![-3, 2]]));
    }
    out
}

fn classify(vertices: &[String], bonds: &[DynkinBond]) -> String {
    let r = vertices.len();
    if r == 0 || r > 8 {
        return "unnamed".to_string();
    }
    let pos: BTreeMap<&str, usize> = vertices
        .iter()
        .enumerate()
        .map(|(k, v)| (v.as_str(), k))
        .collect();
    let mut entries = vec![vec![0i64; r]; r];
    let mut adjacency = vec![vec![false; r]; r];
    for i in 0..r {
        entries[i][i] = 2;
    }
    for bond in bonds {
        let a = pos[bond.i.as_str()];
        let b = pos[bond.j.as_str()];
        entries[a][b] = bond.a_ij;
        entries[b][a] = bond.a_ji;
        adjacency[a][b] = true;
        adjacency[b][a] = true;
    }
    // Connectivity of the diagram itself (leaves are already gone).
    let mut seen = vec![false; r];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..r {
            if adjacency[v][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return "unnamed".to_string();
    }
    for (name, candidate) in named_candidates(r) {
        for p in index_permutations(r) {
            let matches = (0..r).all(|i| (0..r).all(|j| entries[p[i]][p[j]] == candidate[i][j]));
            if matches {
                return name;
            }
        }
    }
    "unnamed".to_string()
}

/// Power of the supported relation exponents; larger entries would need
/// ad powers past this and are refused.
const AD_POWER_CAP: u32 = 12;

fn ad_power(a: &WeylElement, b: &WeylElement, k: u32) -> Result<WeylElement, Error> {
    let mut acc = b.clone();
    for _ in 0..k {
        acc = a.commutator(&acc)?;
    }
    Ok(acc)
}

/// Verifies the pair relation for (i, j) in the Weyl engine: the
/// `1 - a_ij` power of `ad` of the image of `X_i` kills the image of
/// `X_j`, and the same on the `Y` side.  For a faithful graph this
/// decides the relation in the algebra itself; otherwise it only speaks
/// about the image.
pub fn serre_check(g: &Multiquiver, i: &str, j: &str) -> Result<bool, Error> {
    if i == j {
        return Err(Error::Parse(
            "the pair relation needs two distinct vertices".to_string(),
        ));
    }
    let matrix = gcm(g)?;
    let exponent = matrix.serre_exponent(i, j)?;
    if exponent > AD_POWER_CAP {
        return Err(Error::Unsupported(format!(
            "relation exponent {exponent} exceeds the ad power cap {AD_POWER_CAP}"
        )));
    }
    let xi = phi_letter(g, &TgwLetter::X(i.to_string()))?;
    let xj = phi_letter(g, &TgwLetter::X(j.to_string()))?;
    let yi = phi_letter(g, &TgwLetter::Y(i.to_string()))?;
    let yj = phi_letter(g, &TgwLetter::Y(j.to_string()))?;
    let x_side = ad_power(&xi, &xj, exponent)?.is_zero();
    let y_side = ad_power(&yi, &yj, exponent)?.is_zero();
    Ok(x_side && y_side)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerrePair {
    pub i: String,
    pub j: String,
    pub exponent: u32,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreReport {
    pub faithful: bool,
    /// "algebra" when faithfulness makes the check conclusive there,
    /// "weyl-image-only" otherwise.
    pub scope: String,
    pub pairs: Vec<SerrePair>,
    pub all_hold: bool,
}

impl SerreReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&format!(
                "({}, {}) exponent {}: {}\n",
                p.i,
                p.j,
                p.exponent,
                if p.holds { "holds" } else { "FAILS" }
            ));
        }
        if self.faithful {
            out.push_str(
                "scope: the representation is faithful, so the relations hold in the algebra\n",
            );
        } else {
            out.push_str("scope: Weyl image only, the representation is not faithful\n");
        }
        out
    }
}

/// Runs the pair relation check over every ordered pair of distinct
/// vertices and labels the scope of the conclusion.
pub fn serre_report(g: &Multiquiver) -> Result<SerreReport, Error> {
    let matrix = gcm(g)?;
    let faithful = faithfulness_report(g)?.faithful;
    let mut pairs = Vec::new();
    let mut all_hold = true;
    for i in g.vertex_ids() {
        for j in g.vertex_ids() {
            if i == j {
                continue;
            }
            let holds = serre_check(g, i, j)?;
            all_hold &= holds;
            pairs.push(SerrePair {
                i: i.to_string(),
                j: j.to_string(),
                exponent: matrix.serre_exponent(i, j)?,
                holds,
            });
        }
    }
    Ok(SerreReport {
        faithful,
        scope: if faithful {
            "algebra"
        } else {
            "weyl-image-only"
        }
        .to_string(),
        pairs,
        all_hold,
    })
}

/// The two distinguished families: "A~" is a path of n vertices with a
/// leading and a trailing leaf (n + 1 edges, all multiplicities 1);
/// "C~" is the same path with the trailing leaf removed and the last
/// edge ending with multiplicity 2 (n edges).
pub fn lie_preset(name: &str, n: usize) -> Result<Multiquiver, Error> {
    if n == 0 {
        return Err(Error::Parse(
            "the family size must be at least 1".to_string(),
        ));
    }
    let vertices = synthesized_ids("", n);
    match name {
        "A~" => {
            let edge_ids = synthesized_ids("", n + 1);
            let mut edges = Vec::new();
            for (k, id) in edge_ids.iter().enumerate() {
                let source = if k == 0 {
                    None
                } else {
                    Some(Endpoint {
                        vertex: vertices[k - 1].clone(),
                        mult: 1,
                    })
                };
                let target = if k == n {
                    None
                } else {
                    Some(Endpoint {
                        vertex: vertices[k].clone(),
                        mult: 1,
                    })
                };
                edges.push(Edge {
                    id: id.clone(),
                    source,
                    target,
                });
            }
            Multiquiver::new(vertices, edges)
        }
        "C~" => {
            if n < 2 {
                return Err(Error::Parse(
                    "the C~ family needs size at least 2".to_string(),
                ));
            }
            let edge_ids = synthesized_ids("", n);
            let mut edges = Vec::new();
            for (k, id) in edge_ids.iter().enumerate() {
                let source = if k == 0 {
                    None
                } else {
                    Some(Endpoint {
                        vertex: vertices[k - 1].clone(),
                        mult: 1,
                    })
                };
                let target = Some(Endpoint {
                    vertex: vertices[k].clone(),
                    mult: if k == n - 1 { 2 } else { 1 },
                });
                edges.push(Edge {
                    id: id.clone(),
                    source,
                    target,
                });
            }
            Multiquiver::new(vertices, edges)
        }
        other => Err(Error::Parse(format!(
            "unknown family `{other}`, expected A~ or C~"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieCheckRow {
    pub name: String,
    pub instances: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieReport {
    pub family: String,
    pub n: usize,
    pub rows: Vec<LieCheckRow>,
    pub all_hold: bool,
}

impl LieReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "{} ({} instances): {}\n",
                row.name,
                row.instances,
                if row.pass { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

struct LieImages {
    e: Vec<WeylElement>,
    f: Vec<WeylElement>,
    h: Vec<WeylElement>,
    /// Polynomial coefficient generators beyond the h family.
    coeff: Vec<WeylElement>,
}

fn lie_images(name: &str, n: usize, g: &Multiquiver) -> Result<LieImages, Error> {
    let vertices = synthesized_ids("", n);
    let mut e = Vec::new();
    let mut f = Vec::new();
    for v in &vertices {
        e.push(phi_letter(g, &TgwLetter::X(v.clone()))?);
        f.push(phi_letter(g, &TgwLetter::Y(v.clone()))?);
    }
    match name {
        "A~" => {
            let edge_ids = synthesized_ids("", n + 1);
            let h = (0..n)
                .map(|k| WeylElement::u(&edge_ids[k]).minus(&WeylElement::u(&edge_ids[k + 1])))
                .collect();
            let coeff = edge_ids.iter().map(|id| WeylElement::u(id)).collect();
            Ok(LieImages { e, f, h, coeff })
        }
        "C~" => {
            let edge_ids = synthesized_ids("", n);
            // The last generator pair carries the normalizing factor
            // i/2, turning the square images into a standard triple.
            let half_i = Scalar::i() * Scalar::from_fraction(1, 2);
            e[n - 1] = e[n - 1].scale(&half_i);
            f[n - 1] = f[n - 1].scale(&half_i);
            let mut h: Vec<WeylElement> = (0..n - 1)
                .map(|k| WeylElement::u(&edge_ids[k]).minus(&WeylElement::u(&edge_ids[k + 1])))
                .collect();
            h.push(
                WeylElement::u(&edge_ids[n - 1]).minus(&WeylElement::from_poly(Poly::constant(
                    Scalar::from_fraction(1, 2),
                ))),
            );
            Ok(LieImages {
                e,
                f,
                h,
                coeff: Vec::new(),
            })
        }
        other => Err(Error::Parse(format!(
            "unknown family `{other}`, expected A~ or C~"
        ))),
    }
}

/// Builds the generator images of the family in the Weyl engine and
/// verifies the defining relations: triple brackets, Cartan brackets
/// against the matrix of the preset graph, the pair relations in ad
/// form, and the family's grading constraint.
pub fn lie_relation_check(name: &str, n: usize) -> Result<LieReport, Error> {
    let g = lie_preset(name, n)?;
    let matrix = gcm(&g)?;
    let vertices = synthesized_ids("", n);
    let images = lie_images(name, n, &g)?;
    let mut rows = Vec::new();

    let mut pass = true;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            let bracket = images.e[i].commutator(&images.f[j])?;
            let want = if i == j {
                images.h[i].clone()
            } else {
                WeylElement::zero()
            };
            pass &= bracket == want;
            count += 1;
        }
    }
    rows.push(LieCheckRow {
        name: "[e_i, f_j] = delta_ij h_i".to_string(),
        instances: count,
        pass,
    });

    let mut pass = true;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            pass &= images.h[i].commutator(&images.h[j])?.is_zero();
            count += 1;
        }
    }
    rows.push(LieCheckRow {
        name: "[h_i, h_j] = 0".to_string(),
        instances: count,
        pass,
    });

    let mut pass = true;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            let a = matrix.entry(&vertices[i], &vertices[j])?;
            let e_ok =
                images.h[i].commutator(&images.e[j])? == images.e[j].scale(&Scalar::from_int(a));
            let f_ok =
                images.h[i].commutator(&images.f[j])? == images.f[j].scale(&Scalar::from_int(-a));
            pass &= e_ok && f_ok;
            count += 2;
        }
    }
    rows.push(LieCheckRow {
        name: "[h_i, e_j] = a_ij e_j and [h_i, f_j] = -a_ij f_j".to_string(),
        instances: count,
        pass,
    });

    let mut pass = true;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = matrix.serre_exponent(&vertices[i], &vertices[j])?;
            pass &= ad_power(&images.e[i], &images.e[j], k)?.is_zero();
            pass &= ad_power(&images.f[i], &images.f[j], k)?.is_zero();
            count += 2;
        }
    }
    rows.push(LieCheckRow {
        name: "ad-power pair relations".to_string(),
        instances: count,
        pass,
    });

    if !images.coeff.is_empty() {
        let mut pass = true;
        let mut count = 0;
        for a in &images.coeff {
            for b in &images.coeff {
                pass &= a.commutator(b)?.is_zero();
                count += 1;
            }
        }
        rows.push(LieCheckRow {
            name: "coefficient generators commute".to_string(),
            instances: count,
            pass,
        });
    }

    let all: Vec<&WeylElement> = images
        .e
        .iter()
        .chain(&images.f)
        .chain(&images.h)
        .chain(&images.coeff)
        .collect();
    match name {
        "A~" => {
            // The sum of all u variables commutes with the whole image,
            // and every image degree has coordinate sum zero.
            let edge_ids = synthesized_ids("", n + 1);
            let mut euler = WeylElement::zero();
            for id in &edge_ids {
                euler = euler.plus(&WeylElement::u(id));
            }
            let mut pass = true;
            let mut count = 0;
            for elt in &all {
                pass &= euler.commutator(elt)?.is_zero();
                count += 1;
            }
            rows.push(LieCheckRow {
                name: "the Euler element is central for the image".to_string(),
                instances: count,
                pass,
            });
            let mut pass = true;
            let mut count = 0;
            for elt in &all {
                for g in elt.support() {
                    pass &= g.coordinate_sum() == 0;
                    count += 1;
                }
            }
            rows.push(LieCheckRow {
                name: "image degrees have coordinate sum zero".to_string(),
                instances: count,
                pass,
            });
        }
        "C~" => {
            // Invariance under the sign flip of every generator: all
            // image degrees have even total degree.
            let mut pass = true;
            let mut count = 0;
            for elt in &all {
                for g in elt.support() {
                    let total: i64 = g.iter().map(|(_, v)| v.abs()).sum();
                    pass &= total % 2 == 0;
                    count += 1;
                }
            }
            rows.push(LieCheckRow {
                name: "image degrees have even total degree".to_string(),
                instances: count,
                pass,
            });
        }
        _ => unreachable!("validated by lie_preset"),
    }

    let all_hold = rows.iter().all(|r| r.pass);
    Ok(LieReport {
        family: name.to_string(),
        n,
        rows,
        all_hold,
    })
}

/// One generator of the comparison ring: the symbol with indices
/// `i < j` (1-based) and superscript `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TcVar {
    pub i: usize,
    pub j: usize,
    pub k: i64,
}

impl TcVar {
    /// Internal polynomial variable id; never shown directly.
    fn id(&self) -> String {
        format!("H_{}_{}_{}", self.i, self.j, self.k)
    }

    /// Display form of the symbol.
    pub fn pretty(&self) -> String {
        format!("H_{{{},{}}}^({})", self.i, self.j, self.k)
    }
}

/// The comparison datum of a symmetric generalized Cartan matrix: a
/// polynomial ring on one generator family per bonded pair, with an
/// automorphism per index acting on each family, and one product
/// element per index.
pub struct TcDatum {
    matrix: Gcm,
    vars: Vec<TcVar>,
}

/// Size cap for the comparison datum; the generator count grows fast.
const TC_SIZE_CAP: usize = 4;

impl TcDatum {
    pub fn new(matrix: &Gcm) -> Result<Self, Error> {
        if !matrix.is_symmetric() {
            return Err(Error::Unsupported(
                "the comparison datum needs a symmetric matrix".to_string(),
            ));
        }
        if matrix.size() > TC_SIZE_CAP {
            return Err(Error::Unsupported(format!(
                "matrix size {} exceeds the comparison cap {TC_SIZE_CAP}",
                matrix.size()
            )));
        }
        let n = matrix.size();
        let mut vars = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let a = matrix.entry_at(i - 1, j - 1);
                if a == 0 {
                    continue;
                }
                let mut k = a;
                while k <= -a {
                    vars.push(TcVar { i, j, k });
                    k += 2;
                }
            }
        }
        Ok(TcDatum {
            matrix: matrix.clone(),
            vars,
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn vars(&self) -> &[TcVar] {
        &self.vars
    }

    pub fn var_poly(&self, var: &TcVar) -> Poly {
        Poly::var(&var.id())
    }

    /// Image of one generator under the index-r automorphism (or its
    /// inverse): the two indices of the family act by the transvection
    /// pair, all other indices fix the family.
    fn var_image(&self, r: usize, var: &TcVar, inverse: bool) -> Poly {
        let a = self.matrix.entry_at(var.i - 1, var.j - 1);
        // The two actions are mutually inverse on the family, so the
        // inverse of one index is the action of the other.
        let role_additive = (r == var.j) != inverse;
        let role_alternating = (r == var.i) != inverse;
        if r == var.i || r == var.j {
            if role_additive && !role_alternating {
                if var.k > a {
                    return Poly::var(&var.id())
                        + Poly::var(
                            &TcVar {
                                k: var.k - 2,
                                ..var.clone()
                            }
                            .id(),
                        );
                }
                return Poly::var(&var.id());
            }
            let mut out = Poly::zero();
            let mut k = var.k;
            let mut sign = 1i64;
            while k >= a {
                let term = Poly::var(&TcVar { k, ..var.clone() }.id());
                out = out + term.scale(&Scalar::from_int(sign));
                sign = -sign;
                k -= 2;
            }
            return out;
        }
        Poly::var(&var.id())
    }

    fn apply(&self, r: usize, p: &Poly, inverse: bool) -> Result<Poly, Error> {
        if r == 0 || r > self.size() {
            return Err(Error::UnknownVertex(format!("index {r}")));
        }
        let images: BTreeMap<String, Poly> = self
            .vars
            .iter()
            .map(|v| (v.id(), self.var_image(r, v, inverse)))
            .collect();
        apply_generator_map(p, &images)
    }

    pub fn sigma(&self, r: usize, p: &Poly) -> Result<Poly, Error> {
        self.apply(r, p, false)
    }

    pub fn sigma_inv(&self, r: usize, p: &Poly) -> Result<Poly, Error> {
        self.apply(r, p, true)
    }

    /// The product element of index i: over bonded pairs, the top
    /// generator for i < j and the inverse-translated top generator of
    /// the mirrored family for i > j.
    pub fn t(&self, i: usize) -> Result<Poly, Error> {
        if i == 0 || i > self.size() {
            return Err(Error::UnknownVertex(format!("index {i}")));
        }
        let mut out = Poly::one();
        for j in 1..=self.size() {
            let a = self.matrix.entry_at(i - 1, j - 1);
            if j == i || a == 0 {
                continue;
            }
            let factor = if i < j {
                Poly::var(&TcVar { i, j, k: -a }.id())
            } else {
                self.sigma_inv(i, &Poly::var(&TcVar { i: j, j: i, k: -a }.id()))?
            };
            out = out.checked_mul(&factor)?;
        }
        Ok(out)
    }

    /// The symmetric simple quiver of the matrix: one edge per bonded
    /// pair i < j, directed i to j, both multiplicities |a_ij|.
    pub fn quiver(&self) -> Result<Multiquiver, Error> {
        let n = self.size();
        let vertices = synthesized_ids("", n);
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let a = self.matrix.entry_at(i - 1, j - 1);
                if a == 0 {
                    continue;
                }
                edges.push(Edge {
                    id: format!("e{i}{j}"),
                    source: Some(Endpoint {
                        vertex: vertices[i - 1].clone(),
                        mult: a.unsigned_abs() as u32,
                    }),
                    target: Some(Endpoint {
                        vertex: vertices[j - 1].clone(),
                        mult: a.unsigned_abs() as u32,
                    }),
                });
            }
        }
        Multiquiver::new(vertices, edges)
    }
}

/// Applies an algebra endomorphism given on generators: every variable
/// of every monomial is replaced by its image simultaneously.
fn apply_generator_map(p: &Poly, images: &BTreeMap<String, Poly>) -> Result<Poly, Error> {
    let mut out = Poly::zero();
    for (mono, coeff) in p.terms() {
        let mut term = Poly::constant(coeff.clone());
        for (var, exp) in mono.factors() {
            let base = images.get(var).cloned().unwrap_or_else(|| Poly::var(var));
            term = term.checked_mul(&base.checked_pow(*exp)?)?;
        }
        out = out + term;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcImageRow {
    pub generator: String,
    pub image: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcWitnessRow {
    pub edge: String,
    pub generator: String,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcReport {
    pub n: usize,
    pub edges: Vec<String>,
    pub images: Vec<TcImageRow>,
    /// Generator-automorphism pairs whose equivariance residual was
    /// verified to vanish.
    pub equivariance_pairs: usize,
    /// Indices whose product element was verified to map to the
    /// quiver-side product element.
    pub t_checks: usize,
    /// Per edge, the degree-1 generator image witnessing surjectivity.
    pub witnesses: Vec<TcWitnessRow>,
    /// The quiver's matrix reproduces the input matrix.
    pub gcm_reproduced: bool,
}

impl TcReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "size {}, edges [{}]\n",
            self.n,
            self.edges.join(", ")
        ));
        for row in &self.images {
            out.push_str(&format!("F({}) = {}\n", row.generator, row.image));
        }
        out.push_str(&format!(
            "equivariance residuals zero on {} generator-automorphism pairs\n",
            self.equivariance_pairs
        ));
        out.push_str(&format!(
            "product elements match on {} indices\n",
            self.t_checks
        ));
        for w in &self.witnesses {
            out.push_str(&format!(
                "surjectivity witness on {}: F({}) has degree {}\n",
                w.edge, w.generator, w.degree
            ));
        }
        out.push_str("matrix reproduced from the quiver: yes\n");
        out
    }
}

/// Builds the comparison datum of a symmetric matrix, the quiver-side
/// datum, and the generator map between them, then verifies the map is
/// a morphism: it intertwines every automorphism on every generator,
/// sends product elements to product elements, and hits a degree-1
/// polynomial on every edge.  Any residual fails loudly.
pub fn tc_morphism_check(matrix: &Gcm) -> Result<TcReport, Error> {
    let datum = TcDatum::new(matrix)?;
    let quiver = datum.quiver()?;
    let n = datum.size();
    let vertices = synthesized_ids("", n);

    // The quiver must reproduce the matrix entry for entry.
    let quiver_matrix = gcm_oracle(&quiver)?;
    if quiver_matrix.rows() != matrix.rows() {
        return Err(Error::CrossCheck(format!(
            "the quiver matrix\n{}\ndoes not reproduce the input\n{}",
            quiver_matrix.render(),
            matrix.render()
        )));
    }

    // Generator images: the top generator of each family maps to the
    // source-side edge polynomial, and each step down the family maps
    // through one more application of (sigma_j - id).
    let mut images: BTreeMap<String, Poly> = BTreeMap::new();
    let mut image_rows = Vec::new();
    for var in datum.vars() {
        let edge_id = format!("e{}{}", var.i, var.j);
        let gamma_i = quiver.gamma_entry(&edge_id, &vertices[var.i - 1]);
        let mut image = crate::ring::edge_factor(&edge_id, gamma_i);
        let a = matrix.entry_at(var.i - 1, var.j - 1);
        let steps = (-a - var.k) / 2;
        for _ in 0..steps {
            let shifted = shift_apply(&quiver, &DegreeV::unit(&vertices[var.j - 1]), &image)?;
            image = shifted - image;
        }
        images.insert(var.id(), image.clone());
        image_rows.push(TcImageRow {
            generator: var.pretty(),
            image,
        });
    }

    // Equivariance on every generator under every automorphism.
    let mut equivariance_pairs = 0;
    for var in datum.vars() {
        for r in 1..=n {
            let lhs = apply_generator_map(&datum.sigma(r, &datum.var_poly(var))?, &images)?;
            let rhs = shift_apply(
                &quiver,
                &DegreeV::unit(&vertices[r - 1]),
                images.get(&var.id()).expect("image built above"),
            )?;
            if !(lhs.clone() - rhs.clone()).is_zero() {
                return Err(Error::CrossCheck(format!(
                    "equivariance fails for {} under index {r}: {} vs {}",
                    var.pretty(),
                    lhs,
                    rhs
                )));
            }
            equivariance_pairs += 1;
        }
    }

    // Product elements map to product elements.
    let mut t_checks = 0;
    for i in 1..=n {
        let mapped = apply_generator_map(&datum.t(i)?, &images)?;
        let target = build_t(&quiver, &vertices[i - 1])?;
        if !(mapped.clone() - target.clone()).is_zero() {
            return Err(Error::CrossCheck(format!(
                "product element {i} maps to {mapped}, want {target}"
            )));
        }
        t_checks += 1;
    }

    // Surjectivity witness: one degree-1 image per edge.
    let mut witnesses = Vec::new();
    for var in datum.vars() {
        let a = matrix.entry_at(var.i - 1, var.j - 1);
        if var.k != 2 + a {
            continue;
        }
        let edge_id = format!("e{}{}", var.i, var.j);
        let image = images.get(&var.id()).expect("image built above");
        let degree = image.degree_in(&edge_id);
        if degree != 1 {
            return Err(Error::CrossCheck(format!(
                "witness generator {} has degree {degree} on {edge_id}, want 1",
                var.pretty()
            )));
        }
        witnesses.push(TcWitnessRow {
            edge: edge_id,
            generator: var.pretty(),
            degree,
        });
    }

    Ok(TcReport {
        n,
        edges: quiver.edge_ids().map(str::to_string).collect(),
        images: image_rows,
        equivariance_pairs,
        t_checks,
        witnesses,
        gcm_reproduced: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::weyl::parse_weyl;

    fn a2() -> Multiquiver {
        Multiquiver::new(
            vec!["1".to_string(), "2".to_string()],
            vec![Edge {
                id: "e".to_string(),
                source: Some(Endpoint {
                    vertex: "1".to_string(),
                    mult: 1,
                }),
                target: Some(Endpoint {
                    vertex: "2".to_string(),
                    mult: 1,
                }),
            }],
        )
        .unwrap()
    }

    #[test]
    fn gcm_formula_on_presets() {
        let a3 = gcm(&lie_preset("A~", 3).unwrap()).unwrap();
        assert_eq!(
            a3.rows(),
            &[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]
        );
        let c3 = gcm(&lie_preset("C~", 3).unwrap()).unwrap();
        assert_eq!(
            c3.rows(),
            &[vec![2, -1, 0], vec![-1, 2, -2], vec![0, -1, 2]]
        );
        assert_eq!(a3.render(), "2 -1 0\n-1 2 -1\n0 -1 2\n");

        // Two vertices with no shared edge: zero off-diagonal.
        let disconnected =
            Multiquiver::new(vec!["1".to_string(), "2".to_string()], vec![]).unwrap();
        let m = gcm(&disconnected).unwrap();
        assert_eq!(m.rows(), &[vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn gcm_matches_difference_oracle() {
        for (name, lo) in [("A~", 1), ("C~", 2)] {
            for n in lo..=3 {
                gcm_oracle(&lie_preset(name, n).unwrap()).unwrap();
            }
        }
        gcm_oracle(&a2()).unwrap();

        // The doubled entry of the C~ family at size 2: the third
        // difference power is the first to vanish, so the entry is -2.
        let c2 = lie_preset("C~", 2).unwrap();
        let datum = TgwDatum::new(&c2).unwrap();
        let t2 = datum.t("2").unwrap();
        assert_eq!(*t2, parse_poly("u_2 (u_2 + 1)").unwrap());
        assert!(!datum.difference_power("1", 1, t2).unwrap().is_zero());
        assert_eq!(
            datum.difference_power("1", 2, t2).unwrap(),
            parse_poly("2").unwrap()
        );
        assert!(datum.difference_power("1", 3, t2).unwrap().is_zero());
        let m = gcm_oracle(&c2).unwrap();
        assert_eq!(m.rows(), &[vec![2, -2], vec![-1, 2]]);
    }

    #[test]
    fn dynkin_merges_and_classifies() {
        let a3 = dynkin_diagram(&lie_preset("A~", 3).unwrap()).unwrap();
        assert_eq!(a3.name(), "A_3");
        assert_eq!(a3.render(), "1 -- 2 (-1, -1)\n2 -- 3 (-1, -1)");

        let c3 = dynkin_diagram(&lie_preset("C~", 3).unwrap()).unwrap();
        assert_eq!(c3.name(), "C_3");
        assert_eq!(c3.render(), "1 -- 2 (-1, -1)\n2 -- 3 (-2, -1)");

        // Size 2 of the C~ family matches the rank-2 double-bond
        // pattern, which the name table reaches as B_2 first.
        let c2 = dynkin_diagram(&lie_preset("C~", 2).unwrap()).unwrap();
        assert_eq!(c2.name(), "B_2");

        // Parallel edges merge by adding multiplicities on each side.
        let parallel = Multiquiver::new(
            vec!["1".to_string(), "2".to_string()],
            vec![
                Edge {
                    id: "a".to_string(),
                    source: Some(Endpoint {
                        vertex: "1".to_string(),
                        mult: 1,
                    }),
                    target: Some(Endpoint {
                        vertex: "2".to_string(),
                        mult: 2,
                    }),
                },
                Edge {
                    id: "b".to_string(),
                    source: Some(Endpoint {
                        vertex: "1".to_string(),
                        mult: 3,
                    }),
                    target: Some(Endpoint {
                        vertex: "2".to_string(),
                        mult: 1,
                    }),
                },
            ],
        )
        .unwrap();
        let d = dynkin_diagram(&parallel).unwrap();
        assert_eq!(d.render(), "1 -- 2 (-3, -4)");

        // Flipping an edge direction changes nothing.
        let flipped = Multiquiver::new(
            vec!["1".to_string(), "2".to_string()],
            vec![
                Edge {
                    id: "a".to_string(),
                    source: Some(Endpoint {
                        vertex: "1".to_string(),
                        mult: 1,
                    }),
                    target: Some(Endpoint {
                        vertex: "2".to_string(),
                        mult: 2,
                    }),
                },
                Edge {
                    id: "b".to_string(),
                    source: Some(Endpoint {
                        vertex: "2".to_string(),
                        mult: 1,
                    }),
                    target: Some(Endpoint {
                        vertex: "1".to_string(),
                        mult: 3,
                    }),
                },
            ],
        )
        .unwrap();
        assert_eq!(gcm(&parallel).unwrap(), gcm(&flipped).unwrap());
        assert_eq!(d, dynkin_diagram(&flipped).unwrap());

        // A single vertex is the rank-1 chain; two bonded vertices with
        // multiplicities 3 and 1 give the exceptional rank-2 name.
        let single = Multiquiver::new(vec!["1".to_string()], vec![]).unwrap();
        assert_eq!(dynkin_diagram(&single).unwrap().name(), "A_1");
        let g2 = Multiquiver::new(
            vec!["1".to_string(), "2".to_string()],
            vec![Edge {
                id: "e".to_string(),
                source: Some(Endpoint {
                    vertex: "1".to_string(),
                    mult: 3,
                }),
                target: Some(Endpoint {
                    vertex: "2".to_string(),
                    mult: 1,
                }),
            }],
        )
        .unwrap();
        assert_eq!(dynkin_diagram(&g2).unwrap().name(), "G_2");
        let two_isolated =
            Multiquiver::new(vec!["1".to_string(), "2".to_string()], vec![]).unwrap();
        assert_eq!(dynkin_diagram(&two_isolated).unwrap().name(), "unnamed");
    }

    #[test]
    fn gcm_axioms_are_enforced() {
        let ids = |n: usize| synthesized_ids("v", n);
        assert!(Gcm::new(ids(2), vec![vec![1, 0], vec![0, 2]]).is_err());
        assert!(Gcm::new(ids(2), vec![vec![2, 1], vec![-1, 2]]).is_err());
        assert!(Gcm::new(ids(2), vec![vec![2, 0], vec![-1, 2]]).is_err());
        assert!(Gcm::new(ids(2), vec![vec![2, -1]]).is_err());
        assert!(Gcm::new(ids(2), vec![vec![2, -1], vec![-2, 2]]).is_ok());
    }

    #[test]
    fn serre_vanishing_on_the_single_edge_graph() {
        // The two images on the one edge: X_1 to y, X_2 to x.  The
        // squared-ad combination expands to (u+1)y - 2uy + (u-1)y = 0.
        let yyx = parse_weyl("y y x").unwrap();
        assert_eq!(yyx, parse_weyl("(u + 1) y").unwrap());
        assert_eq!(parse_weyl("y x y").unwrap(), parse_weyl("u y").unwrap());
        assert_eq!(
            parse_weyl("x y y").unwrap(),
            parse_weyl("(u - 1) y").unwrap()
        );
        assert!(parse_weyl("y y x - 2 y x y + x y y").unwrap().is_zero());

        let g = a2();
        assert!(serre_check(&g, "1", "2").unwrap());
        assert!(serre_check(&g, "2", "1").unwrap());
        assert!(serre_check(&g, "1", "1").is_err());

        // The balanced single-edge component is in equilibrium, so the
        // conclusion only speaks about the Weyl image.
        let report = serre_report(&g).unwrap();
        assert!(!report.faithful);
        assert_eq!(report.scope, "weyl-image-only");
        assert!(report.all_hold);
        assert_eq!(report.pairs.len(), 2);
        assert_eq!(report.pairs[0].exponent, 2);
    }

    #[test]
    fn serre_passes_on_both_families() {
        for (name, lo) in [("A~", 1), ("C~", 2)] {
            for n in lo..=3 {
                let g = lie_preset(name, n).unwrap();
                let report = serre_report(&g).unwrap();
                assert!(report.all_hold, "{name} size {n}");
                if name == "A~" {
                    assert!(report.faithful);
                    assert_eq!(report.scope, "algebra");
                }
            }
        }
    }

    #[test]
    fn preset_matrices_are_the_printed_ones() {
        let a2m = lie_preset("A~", 2).unwrap();
        assert_eq!(
            a2m.incidence_matrix().rows(),
            &[vec![1, 0], vec![-1, 1], vec![0, -1]]
        );
        let a1 = lie_preset("A~", 1).unwrap();
        assert_eq!(a1.incidence_matrix().rows(), &[vec![1], vec![-1]]);
        let c2 = lie_preset("C~", 2).unwrap();
        assert_eq!(c2.incidence_matrix().rows(), &[vec![1, 0], vec![-1, 2]]);

        assert!(lie_preset("C~", 1).is_err());
        assert!(lie_preset("A~", 0).is_err());
        assert!(lie_preset("B~", 2).is_err());
    }

    #[test]
    fn lie_relations_hold_in_both_families() {
        let gl = lie_relation_check("A~", 2).unwrap();
        assert!(gl.all_hold, "{}", gl.render());
        let sp = lie_relation_check("C~", 2).unwrap();
        assert!(sp.all_hold, "{}", sp.render());

        // Frozen brackets: [e_1, f_1] = u_1 - u_2 in the first family;
        // [e_n, f_n] = u_n - 1/2 behind the i/2 normalization in the
        // second.
        let g = lie_preset("A~", 2).unwrap();
        let images = lie_images("A~", 2, &g).unwrap();
        assert_eq!(
            images.e[0].commutator(&images.f[0]).unwrap(),
            WeylElement::u("1").minus(&WeylElement::u("2"))
        );
        let g = lie_preset("C~", 2).unwrap();
        let images = lie_images("C~", 2, &g).unwrap();
        let u2 = WeylElement::u("2");
        let half = WeylElement::from_poly(Poly::constant(Scalar::from_fraction(1, 2)));
        assert_eq!(
            images.e[1].commutator(&images.f[1]).unwrap(),
            u2.minus(&half)
        );
    }

    fn rank2(a: i64) -> Gcm {
        Gcm::new(synthesized_ids("", 2), vec![vec![2, a], vec![a, 2]]).unwrap()
    }

    #[test]
    fn tc_rank2_worked_values() {
        let c = rank2(-1);
        let datum = TcDatum::new(&c).unwrap();
        let names: Vec<String> = datum.vars().iter().map(TcVar::pretty).collect();
        assert_eq!(names, vec!["H_{1,2}^(-1)", "H_{1,2}^(1)"]);

        // The automorphism table on the family, and mutual inversion.
        let top = datum.var_poly(&TcVar { i: 1, j: 2, k: 1 });
        let bottom = datum.var_poly(&TcVar { i: 1, j: 2, k: -1 });
        assert_eq!(datum.sigma(2, &top).unwrap(), top.clone() + bottom.clone());
        assert_eq!(datum.sigma(1, &top).unwrap(), top.clone() - bottom.clone());
        assert_eq!(datum.sigma(1, &bottom).unwrap(), bottom.clone());
        let scrambled = top.clone() * top.clone() + bottom.clone().scale(&Scalar::from_int(3));
        assert_eq!(
            datum
                .sigma(1, &datum.sigma_inv(1, &scrambled).unwrap())
                .unwrap(),
            scrambled
        );

        // Product elements: index 2 gets the alternating combination.
        assert_eq!(datum.t(1).unwrap(), top.clone());
        assert_eq!(datum.t(2).unwrap(), top.clone() - bottom.clone());

        let report = tc_morphism_check(&c).unwrap();
        assert_eq!(report.edges, vec!["e12"]);
        let by_name: BTreeMap<&str, &Poly> = report
            .images
            .iter()
            .map(|r| (r.generator.as_str(), &r.image))
            .collect();
        assert_eq!(by_name["H_{1,2}^(1)"], &parse_poly("u_e12 - 1").unwrap());
        assert_eq!(by_name["H_{1,2}^(-1)"], &parse_poly("-1").unwrap());
        assert_eq!(report.t_checks, 2);
        assert_eq!(report.witnesses.len(), 1);
    }

    #[test]
    fn tc_families_pass() {
        for a in [0, -1, -2, -3] {
            let report = tc_morphism_check(&rank2(a)).unwrap();
            if a == 0 {
                assert!(report.images.is_empty());
                assert!(report.edges.is_empty());
            } else {
                assert_eq!(report.images.len(), (-a + 1) as usize);
                assert_eq!(report.witnesses.len(), 1);
            }
        }

        let a3 = Gcm::new(
            synthesized_ids("", 3),
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
        )
        .unwrap();
        let report = tc_morphism_check(&a3).unwrap();
        assert_eq!(report.edges, vec!["e12", "e23"]);
        assert_eq!(report.t_checks, 3);

        let asym = Gcm::new(synthesized_ids("", 2), vec![vec![2, -2], vec![-1, 2]]).unwrap();
        assert!(matches!(
            tc_morphism_check(&asym),
            Err(Error::Unsupported(_))
        ));

        let big = Gcm::new(synthesized_ids("", 5), {
            let mut m = vec![vec![0i64; 5]; 5];
            for i in 0..5 {
                m[i][i] = 2;
            }
            m
        })
        .unwrap();
        assert!(matches!(
            tc_morphism_check(&big),
            Err(Error::Unsupported(_))
        ));
    }
}
