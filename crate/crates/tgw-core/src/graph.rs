//! Multiquivers and their incidence matrices.
//!
//! A multiquiver has finitely many vertices and edges; each edge carries an
//! optional source endpoint and an optional target endpoint, each a vertex
//! with a positive multiplicity.  An edge with one endpoint is a connected
//! leaf, an edge with no endpoints is a disconnected leaf, and loops are
//! rejected.  The incidence matrix has one row per edge and one column per
//! vertex: `+n` at the target, `-m` at the source.  Every row therefore has
//! at most one positive and at most one negative entry, and any integer
//! matrix with that property arises from a unique multiquiver.
//!
//! Ids are opaque strings ordered lexicographically everywhere.

use crate::error::Error;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

macro_rules! int_vector {
    ($name:ident, $doc:expr) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
        pub struct $name(pub BTreeMap<String, i64>);

        impl $name {
            pub fn new() -> Self {
                Self(BTreeMap::new())
            }

            /// The standard basis vector at `id`.
            pub fn unit(id: &str) -> Self {
                let mut v = Self::new();
                v.add_to(id, 1);
                v
            }

            pub fn get(&self, id: &str) -> i64 {
                self.0.get(id).copied().unwrap_or(0)
            }

            /// Adds `delta` to the `id` coordinate, dropping zeros.
            pub fn add_to(&mut self, id: &str, delta: i64) {
                let entry = self.0.entry(id.to_string()).or_insert(0);
                *entry += delta;
                if *entry == 0 {
                    self.0.remove(id);
                }
            }

            pub fn is_zero(&self) -> bool {
                self.0.is_empty()
            }

            pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
                self.0.iter().map(|(k, v)| (k.as_str(), *v))
            }

            pub fn support(&self) -> impl Iterator<Item = &str> {
                self.0.keys().map(String::as_str)
            }

            /// Sum of all coordinates.
            pub fn coordinate_sum(&self) -> i64 {
                self.0.values().sum()
            }

            pub fn plus(&self, other: &Self) -> Self {
                let mut out = self.clone();
                for (id, v) in other.iter() {
                    out.add_to(id, v);
                }
                out
            }

            pub fn negated(&self) -> Self {
                Self(self.0.iter().map(|(k, v)| (k.clone(), -v)).collect())
            }

            pub fn scaled(&self, c: i64) -> Self {
                if c == 0 {
                    return Self::new();
                }
                Self(self.0.iter().map(|(k, v)| (k.clone(), c * v)).collect())
            }
        }

        impl fmt::Display for $name {
            /// Linear-combination form, e.g. `a + 2*b - c`; zero prints `0`.
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_empty() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (id, coeff) in &self.0 {
                    let mag = coeff.abs();
                    let body = if mag == 1 {
                        id.clone()
                    } else {
                        format!("{mag}*{id}")
                    };
                    if first {
                        if *coeff < 0 {
                            write!(f, "-{body}")?;
                        } else {
                            write!(f, "{body}")?;
                        }
                        first = false;
                    } else if *coeff < 0 {
                        write!(f, " - {body}")?;
                    } else {
                        write!(f, " + {body}")?;
                    }
                }
                Ok(())
            }
        }
    };
}

int_vector!(DegreeV, "An integer vector indexed by vertex ids (an element of the free abelian group on the vertices).");
int_vector!(
    DegreeE,
    "An integer vector indexed by edge ids (an element of the free abelian group on the edges)."
);

/// One end of an edge: a vertex id with a positive multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub vertex: String,
    pub mult: u32,
}

/// An edge with optional endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: Option<Endpoint>,
    pub target: Option<Endpoint>,
}

impl Edge {
    /// Both endpoints present.
    pub fn is_proper(&self) -> bool {
        self.source.is_some() && self.target.is_some()
    }

    /// Exactly one endpoint present.
    pub fn is_connected_leaf(&self) -> bool {
        self.source.is_some() != self.target.is_some()
    }

    /// The incidence entry of this edge at `vertex`.
    pub fn entry_at(&self, vertex: &str) -> i64 {
        let mut value = 0i64;
        if let Some(t) = &self.target {
            if t.vertex == vertex {
                value += t.mult as i64;
            }
        }
        if let Some(s) = &self.source {
            if s.vertex == vertex {
                value -= s.mult as i64;
            }
        }
        value
    }
}

/// A finite multiquiver.  Vertices and edges are addressed by string ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiquiver {
    vertices: BTreeSet<String>,
    edges: BTreeMap<String, Edge>,
}

impl Multiquiver {
    /// Validates ids, endpoints, multiplicities and the no-loop rule.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self, Error> {
        let mut vset = BTreeSet::new();
        for v in vertices {
            if !vset.insert(v.clone()) {
                return Err(Error::DuplicateId(v));
            }
        }
        let mut emap = BTreeMap::new();
        for e in edges {
            for end in [&e.source, &e.target].into_iter().flatten() {
                if end.mult == 0 {
                    return Err(Error::ZeroMultiplicity(e.id.clone()));
                }
                if !vset.contains(&end.vertex) {
                    return Err(Error::UnknownEndpoint {
                        edge: e.id.clone(),
                        vertex: end.vertex.clone(),
                    });
                }
            }
            if let (Some(s), Some(t)) = (&e.source, &e.target) {
                if s.vertex == t.vertex {
                    return Err(Error::LoopEdge(e.id.clone()));
                }
            }
            if emap.insert(e.id.clone(), e.clone()).is_some() {
                return Err(Error::DuplicateId(e.id));
            }
        }
        Ok(Multiquiver {
            vertices: vset,
            edges: emap,
        })
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(String::as_str)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertices.contains(id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &str> {
        self.edges.keys().map(String::as_str)
    }

    pub fn proper_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values().filter(|e| e.is_proper())
    }

    /// The incidence entry of edge `e` at vertex `v` (0 if either is absent).
    pub fn gamma_entry(&self, edge: &str, vertex: &str) -> i64 {
        self.edges
            .get(edge)
            .map(|e| e.entry_at(vertex))
            .unwrap_or(0)
    }

    /// The column of the incidence matrix at `v` as an edge vector.
    pub fn gamma_column(&self, v: &str) -> Result<DegreeE, Error> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let mut col = DegreeE::new();
        for e in self.edges.values() {
            let x = e.entry_at(v);
            if x != 0 {
                col.add_to(&e.id, x);
            }
        }
        Ok(col)
    }

    /// The incidence matrix applied to a vertex vector.
    pub fn gamma_apply(&self, d: &DegreeV) -> Result<DegreeE, Error> {
        let mut out = DegreeE::new();
        for (v, c) in d.iter() {
            let col = self.gamma_column(v)?;
            for (e, x) in col.iter() {
                out.add_to(e, c * x);
            }
        }
        Ok(out)
    }

    /// Edges incident to `v`, with their incidence entries, sorted by id.
    pub fn incident_edges(&self, v: &str) -> Vec<(&Edge, i64)> {
        self.edges
            .values()
            .filter_map(|e| {
                let x = e.entry_at(v);
                (x != 0).then_some((e, x))
            })
            .collect()
    }

    /// The incidence matrix with rows sorted by edge id and columns by
    /// vertex id.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let vertex_ids: Vec<String> = self.vertices.iter().cloned().collect();
        let edge_ids: Vec<String> = self.edges.keys().cloned().collect();
        let rows = edge_ids
            .iter()
            .map(|e| {
                let edge = &self.edges[e];
                vertex_ids.iter().map(|v| edge.entry_at(v)).collect()
            })
            .collect();
        IncidenceMatrix {
            vertex_ids,
            edge_ids,
            rows,
        }
    }

    /// Connected components of the underlying undirected graph on the
    /// proper edges, each sorted, listed by smallest member.  Every vertex
    /// appears in exactly one component.
    pub fn components(&self) -> Vec<Vec<String>> {
        let ids: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        for e in self.proper_edges() {
            let s = index[e.source.as_ref().unwrap().vertex.as_str()];
            let t = index[e.target.as_ref().unwrap().vertex.as_str()];
            uf.union(s, t);
        }
        let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, v) in ids.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(v.to_string());
        }
        let mut out: Vec<Vec<String>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// True when the underlying undirected graph has no cycle; parallel
    /// proper edges count as a cycle.
    pub fn is_acyclic(&self) -> bool {
        let ids: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        for e in self.proper_edges() {
            let s = index[e.source.as_ref().unwrap().vertex.as_str()];
            let t = index[e.target.as_ref().unwrap().vertex.as_str()];
            if !uf.union(s, t) {
                return false;
            }
        }
        true
    }

    /// Edge ids of a breadth-first spanning forest over the proper edges.
    pub fn spanning_forest(&self) -> Vec<String> {
        let ids: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        let mut forest = Vec::new();
        for e in self.proper_edges() {
            let s = index[e.source.as_ref().unwrap().vertex.as_str()];
            let t = index[e.target.as_ref().unwrap().vertex.as_str()];
            if uf.union(s, t) {
                forest.push(e.id.clone());
            }
        }
        forest
    }

    /// A simple cycle in the underlying undirected graph, as matched vertex
    /// and edge sequences (`edges[i]` joins `vertices[i]` and
    /// `vertices[i+1]`, the last edge closing back to `vertices[0]`).
    pub fn find_cycle(&self) -> Option<(Vec<String>, Vec<String>)> {
        // Adjacency over proper edges, neighbors sorted by edge id.
        let mut adjacency: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
        for v in &self.vertices {
            adjacency.insert(v.as_str(), Vec::new());
        }
        for e in self.proper_edges() {
            let s = e.source.as_ref().unwrap().vertex.as_str();
            let t = e.target.as_ref().unwrap().vertex.as_str();
            adjacency.get_mut(s).unwrap().push((e.id.as_str(), t));
            adjacency.get_mut(t).unwrap().push((e.id.as_str(), s));
        }
        for nbrs in adjacency.values_mut() {
            nbrs.sort();
        }

        let mut visited: BTreeSet<&str> = BTreeSet::new();
        // Stack frames: (vertex, incoming edge id or "").
        for start in self.vertices.iter().map(String::as_str) {
            if visited.contains(start) {
                continue;
            }
            // Path of (vertex, edge used to reach it) for the DFS stack.
            let mut path: Vec<(&str, &str)> = vec![(start, "")];
            let mut on_path: BTreeMap<&str, usize> = BTreeMap::new();
            on_path.insert(start, 0);
            let mut iters: Vec<usize> = vec![0];
            visited.insert(start);
            while let Some(&(v, _)) = path.last() {
                let i = *iters.last().unwrap();
                let nbrs = &adjacency[v];
                if i >= nbrs.len() {
                    path.pop();
                    iters.pop();
                    on_path.remove(v);
                    continue;
                }
                *iters.last_mut().unwrap() += 1;
                let (eid, w) = nbrs[i];
                if eid == path.last().unwrap().1 {
                    continue;
                }
                if let Some(&pos) = on_path.get(w) {
                    // Back edge: the cycle is path[pos..] closed by eid.
                    let vertices: Vec<String> =
                        path[pos..].iter().map(|(x, _)| x.to_string()).collect();
                    let mut edges: Vec<String> =
                        path[pos + 1..].iter().map(|(_, e)| e.to_string()).collect();
                    edges.push(eid.to_string());
                    return Some((vertices, edges));
                }
                if !visited.contains(w) {
                    visited.insert(w);
                    on_path.insert(w, path.len());
                    path.push((w, eid));
                    iters.push(0);
                }
            }
        }
        None
    }

    /// Equilibrium analysis of every component; see [`EquilibriumReport`].
    ///
    /// A component is in equilibrium when it carries no connected leaf and
    /// the multiplicity weights propagated from its smallest vertex balance
    /// around every cycle.  The weight vector is then the primitive
    /// positive integer kernel vector supported on the component.
    pub fn equilibrium_analysis(&self) -> EquilibriumReport {
        let mut leafy: BTreeSet<&str> = BTreeSet::new();
        let mut leaf_edge: BTreeMap<&str, &str> = BTreeMap::new();
        for e in self.edges.values() {
            if e.is_connected_leaf() {
                let end = e.source.as_ref().or(e.target.as_ref()).unwrap();
                leafy.insert(end.vertex.as_str());
                leaf_edge.entry(end.vertex.as_str()).or_insert(&e.id);
            }
        }

        // Adjacency over proper edges with the two incidence magnitudes.
        let mut adjacency: BTreeMap<&str, Vec<(&str, &str, i64, i64)>> = BTreeMap::new();
        for v in &self.vertices {
            adjacency.insert(v.as_str(), Vec::new());
        }
        for e in self.proper_edges() {
            let s = e.source.as_ref().unwrap();
            let t = e.target.as_ref().unwrap();
            let (sv, tv) = (s.vertex.as_str(), t.vertex.as_str());
            let (sm, tm) = (s.mult as i64, t.mult as i64);
            adjacency
                .get_mut(sv)
                .unwrap()
                .push((e.id.as_str(), tv, sm, tm));
            adjacency
                .get_mut(tv)
                .unwrap()
                .push((e.id.as_str(), sv, tm, sm));
        }
        for nbrs in adjacency.values_mut() {
            nbrs.sort();
        }

        let mut components = Vec::new();
        let mut kernel_rank = 0usize;
        for comp in self.components() {
            let mut reason: Option<String> = None;
            for v in &comp {
                if leafy.contains(v.as_str()) {
                    reason = Some(format!(
                        "leaf edge `{}` attached at vertex `{}`",
                        leaf_edge[v.as_str()],
                        v
                    ));
                    break;
                }
            }
            // Propagate weights along a breadth-first tree; re-examined
            // edges must agree, otherwise some cycle is unbalanced.
            let mut weights: BTreeMap<&str, BigRational> = BTreeMap::new();
            let base = comp[0].as_str();
            weights.insert(base, BigRational::one());
            let mut queue = std::collections::VecDeque::from([base]);
            'bfs: while let Some(v) = queue.pop_front() {
                let lv = weights[v].clone();
                for (eid, w, mv, mw) in &adjacency[v] {
                    let lw = &lv * BigRational::new(BigInt::from(*mv), BigInt::from(*mw));
                    match weights.get(w) {
                        None => {
                            weights.insert(w, lw);
                            queue.push_back(w);
                        }
                        Some(existing) => {
                            if *existing != lw {
                                if reason.is_none() {
                                    reason =
                                        Some(format!("unbalanced cycle detected at edge `{eid}`"));
                                }
                                break 'bfs;
                            }
                        }
                    }
                }
            }

            let in_equilibrium = reason.is_none();
            let weight = in_equilibrium.then(|| {
                // Clear denominators and divide by the content; weights are
                // positive, so the smallest vertex is automatically positive.
                let denom_lcm = weights
                    .values()
                    .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
                let scaled: Vec<(&str, BigInt)> = comp
                    .iter()
                    .map(|v| {
                        let w = &weights[v.as_str()];
                        (v.as_str(), (w * &denom_lcm).to_integer())
                    })
                    .collect();
                let content = scaled.iter().fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
                let mut vec = DegreeV::new();
                for (v, x) in scaled {
                    let entry = (x / &content).to_i64().expect("weight entries fit in i64");
                    vec.add_to(v, entry);
                }
                vec
            });
            if in_equilibrium {
                kernel_rank += 1;
            }
            components.push(ComponentReport {
                vertices: comp,
                in_equilibrium,
                weight,
                reason,
            });
        }
        EquilibriumReport {
            components,
            kernel_rank,
        }
    }
}

/// Per-component equilibrium verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub vertices: Vec<String>,
    pub in_equilibrium: bool,
    /// Primitive positive integer kernel vector, present exactly when the
    /// component is in equilibrium.
    pub weight: Option<DegreeV>,
    /// Why the component fails equilibrium, when it does.
    pub reason: Option<String>,
}

/// Result of [`Multiquiver::equilibrium_analysis`]: all components plus the
/// resulting kernel rank of the incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub components: Vec<ComponentReport>,
    pub kernel_rank: usize,
}

/// Integer matrix with labeled rows (edges) and columns (vertices), each
/// row holding at most one positive and at most one negative entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceMatrix {
    vertex_ids: Vec<String>,
    edge_ids: Vec<String>,
    rows: Vec<Vec<i64>>,
}

impl IncidenceMatrix {
    /// Builds a labeled matrix, checking shapes, sortedness and the
    /// one-positive-one-negative row condition.
    pub fn new(
        vertex_ids: Vec<String>,
        edge_ids: Vec<String>,
        rows: Vec<Vec<i64>>,
    ) -> Result<Self, Error> {
        if rows.len() != edge_ids.len() {
            return Err(Error::BadMatrixShape(format!(
                "{} rows for {} edge ids",
                rows.len(),
                edge_ids.len()
            )));
        }
        for (e, row) in edge_ids.iter().zip(&rows) {
            if row.len() != vertex_ids.len() {
                return Err(Error::BadMatrixShape(format!(
                    "row `{e}` has {} entries for {} vertex ids",
                    row.len(),
                    vertex_ids.len()
                )));
            }
            let positives = row.iter().filter(|x| **x > 0).count();
            let negatives = row.iter().filter(|x| **x < 0).count();
            if positives > 1 || negatives > 1 {
                return Err(Error::BadMatrixRow(e.clone()));
            }
        }
        for w in vertex_ids.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadMatrixShape(format!(
                    "vertex ids not strictly sorted at `{}`",
                    w[1]
                )));
            }
        }
        for w in edge_ids.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadMatrixShape(format!(
                    "edge ids not strictly sorted at `{}`",
                    w[1]
                )));
            }
        }
        Ok(IncidenceMatrix {
            vertex_ids,
            edge_ids,
            rows,
        })
    }

    /// Builds from bare rows, synthesizing ids `v1..` and `e1..`
    /// (zero-padded so lexicographic order matches numeric order).
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, Error> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        Ok(IncidenceMatrix::new(
            synthesized_ids("v", cols),
            synthesized_ids("e", rows.len()),
            rows,
        )?)
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.edge_ids
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn entry(&self, edge: &str, vertex: &str) -> i64 {
        let r = self.edge_ids.iter().position(|e| e == edge);
        let c = self.vertex_ids.iter().position(|v| v == vertex);
        match (r, c) {
            (Some(r), Some(c)) => self.rows[r][c],
            _ => 0,
        }
    }

    /// Reconstructs the unique multiquiver with this incidence matrix.
    pub fn to_multiquiver(&self) -> Result<Multiquiver, Error> {
        let mut edges = Vec::new();
        for (eid, row) in self.edge_ids.iter().zip(&self.rows) {
            let mut source = None;
            let mut target = None;
            for (v, x) in self.vertex_ids.iter().zip(row) {
                if *x > 0 {
                    target = Some(Endpoint {
                        vertex: v.clone(),
                        mult: *x as u32,
                    });
                } else if *x < 0 {
                    source = Some(Endpoint {
                        vertex: v.clone(),
                        mult: (-*x) as u32,
                    });
                }
            }
            edges.push(Edge {
                id: eid.clone(),
                source,
                target,
            });
        }
        Multiquiver::new(self.vertex_ids.clone(), edges)
    }

    /// Rank over the rationals by fraction-free (Bareiss) elimination.
    pub fn rational_rank(&self) -> usize {
        bareiss_rank(&self.rows)
    }

    /// Kernel dimension over the rationals.
    pub fn nullity(&self) -> usize {
        self.vertex_ids.len() - self.rational_rank()
    }

    /// Basis of the integer kernel: one primitive weight vector per
    /// equilibrium component, cross-checked against the rational nullity.
    pub fn kernel_basis(&self) -> Result<Vec<DegreeV>, Error> {
        let g = self.to_multiquiver()?;
        let report = g.equilibrium_analysis();
        let basis: Vec<DegreeV> = report
            .components
            .iter()
            .filter_map(|c| c.weight.clone())
            .collect();
        let nullity = self.nullity();
        if nullity != basis.len() {
            return Err(Error::CrossCheck(format!(
                "rational nullity {nullity} != {} equilibrium components",
                basis.len()
            )));
        }
        for w in &basis {
            if !g.gamma_apply(w)?.is_zero() {
                return Err(Error::CrossCheck(format!(
                    "claimed kernel vector {w} is not annihilated"
                )));
            }
        }
        Ok(basis)
    }

    /// Rows of space-separated entries, edge order, one row per line.
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

/// `n` ids with the given prefix, zero-padded to a fixed width so that the
/// lexicographic order agrees with the numeric order.
pub fn synthesized_ids(prefix: &str, n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let nr = rows.len();
    let nc = rows.first().map(Vec::len).unwrap_or(0);
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
        .collect();
    let mut denom = BigInt::one();
    let mut rank = 0usize;
    for col in 0..nc {
        if rank == nr {
            break;
        }
        let Some(pivot) = (rank..nr).find(|i| !a[*i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..nr {
            for j in col + 1..nc {
                let num = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = num / &denom;
            }
            a[i][col] = BigInt::zero();
        }
        denom = a[rank][col].clone();
        rank += 1;
    }
    rank
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when both sides were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

// ---------------------------------------------------------------------------
// Text and JSON formats.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MqJson {
    vertices: Vec<String>,
    edges: Vec<MqEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct MqEdgeJson {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<MqEndJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<MqEndJson>,
}

#[derive(Serialize, Deserialize)]
struct MqEndJson {
    v: String,
    mult: u32,
}

impl Multiquiver {
    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// vertex <id>
    /// edge <id> [source <vertex> <mult>] [target <vertex> <mult>]
    /// ```
    ///
    /// Blank lines and `#` comments are skipped.
    pub fn parse_text(input: &str) -> Result<Self, Error> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tok = line.split_whitespace();
            let fail = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            match tok.next() {
                Some("vertex") => {
                    let id = tok.next().ok_or_else(|| fail("missing vertex id"))?;
                    if tok.next().is_some() {
                        return Err(fail("unexpected tokens after vertex id"));
                    }
                    vertices.push(id.to_string());
                }
                Some("edge") => {
                    let id = tok
                        .next()
                        .ok_or_else(|| fail("missing edge id"))?
                        .to_string();
                    let mut source = None;
                    let mut target = None;
                    while let Some(role) = tok.next() {
                        let slot = match role {
                            "source" => &mut source,
                            "target" => &mut target,
                            other => {
                                return Err(fail(&format!(
                                    "expected `source` or `target`, found `{other}`"
                                )))
                            }
                        };
                        if slot.is_some() {
                            return Err(fail(&format!("duplicate `{role}` clause")));
                        }
                        let vertex = tok
                            .next()
                            .ok_or_else(|| fail(&format!("missing vertex after `{role}`")))?
                            .to_string();
                        let mult: u32 = tok
                            .next()
                            .ok_or_else(|| fail(&format!("missing multiplicity after `{role}`")))?
                            .parse()
                            .map_err(|_| fail("multiplicity must be a positive integer"))?;
                        *slot = Some(Endpoint { vertex, mult });
                    }
                    edges.push(Edge { id, source, target });
                }
                Some(other) => {
                    return Err(fail(&format!(
                        "expected `vertex` or `edge`, found `{other}`"
                    )))
                }
                None => unreachable!(),
            }
        }
        Multiquiver::new(vertices, edges)
    }

    /// Renders the text format; `parse_text` round-trips it.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("vertex {v}\n"));
        }
        for e in self.edges.values() {
            out.push_str(&format!("edge {}", e.id));
            if let Some(s) = &e.source {
                out.push_str(&format!(" source {} {}", s.vertex, s.mult));
            }
            if let Some(t) = &e.target {
                out.push_str(&format!(" target {} {}", t.vertex, t.mult));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the JSON form
    /// `{"vertices": [...], "edges": [{"id", "source": {"v", "mult"}?, "target": ...?}]}`.
    pub fn parse_json(input: &str) -> Result<Self, Error> {
        let raw: MqJson = serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        let edges = raw
            .edges
            .into_iter()
            .map(|e| Edge {
                id: e.id,
                source: e.source.map(|s| Endpoint {
                    vertex: s.v,
                    mult: s.mult,
                }),
                target: e.target.map(|t| Endpoint {
                    vertex: t.v,
                    mult: t.mult,
                }),
            })
            .collect();
        Multiquiver::new(raw.vertices, edges)
    }

    /// Renders the JSON form accepted by [`Multiquiver::parse_json`].
    pub fn render_json(&self) -> String {
        let raw = MqJson {
            vertices: self.vertices.iter().cloned().collect(),
            edges: self
                .edges
                .values()
                .map(|e| MqEdgeJson {
                    id: e.id.clone(),
                    source: e.source.as_ref().map(|s| MqEndJson {
                        v: s.vertex.clone(),
                        mult: s.mult,
                    }),
                    target: e.target.as_ref().map(|t| MqEndJson {
                        v: t.vertex.clone(),
                        mult: t.mult,
                    }),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    /// Parses either format, deciding by the first non-space character.
    pub fn parse(input: &str) -> Result<Self, Error> {
        if input.trim_start().starts_with('{') {
            Multiquiver::parse_json(input)
        } else {
            Multiquiver::parse_text(input)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Four vertices, five edges: a disconnected leaf, a 2,3 edge, a 1,2
    /// edge, a 1,1 edge and a connected leaf.
    pub fn sample_graph_one() -> Multiquiver {
        Multiquiver::parse_text(
            "vertex v1\nvertex v2\nvertex v3\nvertex v4\n\
             edge e1\n\
             edge e2 source v2 2 target v3 3\n\
             edge e3 source v3 1 target v4 2\n\
             edge e4 source v4 1 target v2 1\n\
             edge e5 target v4 1\n",
        )
        .unwrap()
    }

    /// Balanced triangle with multiplicities 2,1 / 4,1 / 2,1.
    fn sample_graph_two() -> Multiquiver {
        Multiquiver::parse_text(
            "vertex v1\nvertex v2\nvertex v3\n\
             edge e1 source v1 2 target v2 1\n\
             edge e2 source v3 4 target v2 1\n\
             edge e3 source v3 2 target v1 1\n",
        )
        .unwrap()
    }

    /// Two vertices joined by two parallel edges with multiplicities 2,1
    /// and 3,4.
    fn sample_graph_three() -> Multiquiver {
        Multiquiver::parse_text(
            "vertex v1\nvertex v2\n\
             edge e1 source v1 2 target v2 1\n\
             edge e2 source v2 3 target v1 4\n",
        )
        .unwrap()
    }

    #[test]
    fn incidence_matrix_of_sample_one() {
        let m = sample_graph_one().incidence_matrix();
        assert_eq!(m.vertex_ids(), ["v1", "v2", "v3", "v4"]);
        assert_eq!(m.edge_ids(), ["e1", "e2", "e3", "e4", "e5"]);
        assert_eq!(
            m.rows(),
            [
                vec![0, 0, 0, 0],
                vec![0, -2, 3, 0],
                vec![0, 0, -1, 2],
                vec![0, 1, 0, -1],
                vec![0, 0, 0, 1],
            ]
        );
    }

    #[test]
    fn incidence_matrix_of_single_edge() {
        let g = Multiquiver::parse_text("vertex v1\nvertex v2\nedge e1 source v1 1 target v2 1\n")
            .unwrap();
        assert_eq!(g.incidence_matrix().rows(), [vec![-1, 1]]);
    }

    #[test]
    fn empty_graph_has_empty_matrix() {
        let g = Multiquiver::new(vec![], vec![]).unwrap();
        let m = g.incidence_matrix();
        assert!(m.rows().is_empty());
        assert_eq!(m.nullity(), 0);
    }

    #[test]
    fn matrix_round_trips_through_the_graph() {
        for g in [sample_graph_one(), sample_graph_two(), sample_graph_three()] {
            let m = g.incidence_matrix();
            assert_eq!(m.to_multiquiver().unwrap(), g);
        }
    }

    #[test]
    fn from_rows_synthesizes_the_parallel_edge_pair() {
        let m = IncidenceMatrix::from_rows(vec![vec![-2, 1], vec![4, -3]]).unwrap();
        let g = m.to_multiquiver().unwrap();
        let e1 = g.edge("e1").unwrap();
        assert_eq!(e1.source.as_ref().unwrap().vertex, "v1");
        assert_eq!(e1.source.as_ref().unwrap().mult, 2);
        assert_eq!(e1.target.as_ref().unwrap().vertex, "v2");
        assert_eq!(e1.target.as_ref().unwrap().mult, 1);
        let e2 = g.edge("e2").unwrap();
        assert_eq!(e2.source.as_ref().unwrap().vertex, "v2");
        assert_eq!(e2.source.as_ref().unwrap().mult, 3);
        assert_eq!(e2.target.as_ref().unwrap().mult, 4);
    }

    #[test]
    fn same_sign_rows_are_rejected() {
        let err = IncidenceMatrix::from_rows(vec![vec![1, 2]]).unwrap_err();
        assert!(matches!(err, Error::BadMatrixRow(_)));
        let err = IncidenceMatrix::from_rows(vec![vec![-1, -1, 2]]).unwrap_err();
        assert!(matches!(err, Error::BadMatrixRow(_)));
    }

    #[test]
    fn loops_and_bad_endpoints_are_rejected() {
        let err = Multiquiver::parse_text("vertex a\nedge e source a 1 target a 1\n").unwrap_err();
        assert!(matches!(err, Error::LoopEdge(_)));
        let err = Multiquiver::parse_text("vertex a\nedge e source b 1\n").unwrap_err();
        assert!(matches!(err, Error::UnknownEndpoint { .. }));
        let err = Multiquiver::parse_text("vertex a\nvertex b\nedge e source a 0 target b 1\n")
            .unwrap_err();
        assert!(matches!(err, Error::ZeroMultiplicity(_)));
    }

    #[test]
    fn equilibrium_of_sample_one_is_the_isolated_vertex() {
        let report = sample_graph_one().equilibrium_analysis();
        assert_eq!(report.kernel_rank, 1);
        assert_eq!(report.components.len(), 2);
        let iso = &report.components[0];
        assert_eq!(iso.vertices, ["v1"]);
        assert!(iso.in_equilibrium);
        assert_eq!(iso.weight.as_ref().unwrap(), &DegreeV::unit("v1"));
        let big = &report.components[1];
        assert_eq!(big.vertices, ["v2", "v3", "v4"]);
        assert!(!big.in_equilibrium);
        assert!(big.reason.as_ref().unwrap().contains("e5"));
    }

    #[test]
    fn equilibrium_weights_of_sample_two() {
        let report = sample_graph_two().equilibrium_analysis();
        assert_eq!(report.kernel_rank, 1);
        let c = &report.components[0];
        assert!(c.in_equilibrium);
        let w = c.weight.as_ref().unwrap();
        assert_eq!(w.get("v1"), 2);
        assert_eq!(w.get("v2"), 4);
        assert_eq!(w.get("v3"), 1);
    }

    #[test]
    fn unbalanced_parallel_edges_have_trivial_kernel() {
        let report = sample_graph_three().equilibrium_analysis();
        assert_eq!(report.kernel_rank, 0);
        assert!(!report.components[0].in_equilibrium);
        let m = sample_graph_three().incidence_matrix();
        assert_eq!(m.kernel_basis().unwrap(), vec![]);
    }

    #[test]
    fn kernel_basis_matches_rational_nullity() {
        for g in [sample_graph_one(), sample_graph_two(), sample_graph_three()] {
            let m = g.incidence_matrix();
            let basis = m.kernel_basis().unwrap();
            assert_eq!(basis.len(), m.nullity());
            for w in &basis {
                assert!(g.gamma_apply(w).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn acyclicity_and_cycles() {
        assert!(!sample_graph_two().is_acyclic());
        assert!(!sample_graph_three().is_acyclic());
        let path = Multiquiver::parse_text(
            "vertex a\nvertex b\nvertex c\n\
             edge e1 source a 1 target b 2\n\
             edge e2 source b 1 target c 1\n\
             edge e3 target a 5\n",
        )
        .unwrap();
        assert!(path.is_acyclic());
        assert!(path.find_cycle().is_none());
        let (cv, ce) = sample_graph_three().find_cycle().unwrap();
        assert_eq!(cv.len(), 2);
        assert_eq!(ce.len(), 2);
    }

    #[test]
    fn gamma_column_and_apply() {
        let g = sample_graph_one();
        let col = g.gamma_column("v3").unwrap();
        assert_eq!(col.get("e2"), 3);
        assert_eq!(col.get("e3"), -1);
        assert_eq!(col.get("e4"), 0);
        let d = DegreeV::unit("v2").plus(&DegreeV::unit("v3"));
        let image = g.gamma_apply(&d).unwrap();
        assert_eq!(image.get("e2"), 1);
        assert_eq!(image.get("e3"), -1);
        assert_eq!(image.get("e4"), 1);
    }

    #[test]
    fn text_and_json_round_trip() {
        let g = sample_graph_one();
        assert_eq!(Multiquiver::parse_text(&g.render_text()).unwrap(), g);
        assert_eq!(Multiquiver::parse_json(&g.render_json()).unwrap(), g);
        assert_eq!(Multiquiver::parse(&g.render_json()).unwrap(), g);
    }

    #[test]
    fn synthesized_ids_stay_lexicographically_numeric() {
        let ids = synthesized_ids("v", 12);
        assert_eq!(ids[0], "v01");
        assert_eq!(ids[9], "v10");
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(sorted, ids);
    }

    #[test]
    fn matrix_render_is_row_per_line() {
        let m = sample_graph_three().incidence_matrix();
        assert_eq!(m.render(), "-2 1\n4 -3\n");
    }
}
