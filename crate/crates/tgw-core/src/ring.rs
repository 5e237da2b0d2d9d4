//! The TGW datum attached to a multiquiver.
//!
//! The base ring is the polynomial ring over the Gaussian rationals with
//! one variable `u_e` per edge.  Each vertex `v` acts by the shift
//! automorphism `sigma_v(u_e) = u_e - gamma_{ev}`, and carries the
//! distinguished polynomial `t_v`: the product over incident edges of
//!
//! * `u_e (u_e + 1) ... (u_e + n - 1)` when `v` is the target with
//!   multiplicity `n`,
//! * `(u_e - 1)(u_e - 2) ... (u_e - m)` when `v` is the source with
//!   multiplicity `m`.
//!
//! All gradation parameters `mu_{ij}` equal 1.  The consistency equations
//! checked here are, for all distinct `i, j` and all distinct `i, j, k`:
//!
//! ```text
//! sigma_i sigma_j (t_i t_j) = sigma_i(t_i) sigma_j(t_j)
//! sigma_i sigma_k (t_j) t_j = sigma_i(t_j) sigma_k(t_j)
//! ```

use crate::error::Error;
use crate::graph::{synthesized_ids, DegreeV, Multiquiver};
use crate::poly::Poly;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Rising or falling product for one edge at one vertex: the factor of
/// `t_v` contributed by edge `e` with incidence entry `gamma`.
pub fn edge_factor(edge_id: &str, gamma: i64) -> Poly {
    let mut out = Poly::one();
    if gamma > 0 {
        for k in 0..gamma {
            out = out * Poly::var_plus(edge_id, k);
        }
    } else {
        for k in 1..=(-gamma) {
            out = out * Poly::var_plus(edge_id, -k);
        }
    }
    out
}

/// The distinguished polynomial `t_v` of one vertex.
pub fn build_t(g: &Multiquiver, v: &str) -> Result<Poly, Error> {
    if !g.has_vertex(v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let mut t = Poly::one();
    for (edge, gamma) in g.incident_edges(v) {
        t = t.checked_mul(&edge_factor(&edge.id, gamma))?;
    }
    Ok(t)
}

/// Applies the shift action of a vertex vector `d`:
/// `u_e -> u_e - (gamma d)_e`.
pub fn shift_apply(g: &Multiquiver, d: &DegreeV, p: &Poly) -> Result<Poly, Error> {
    for var in p.vars() {
        if g.edge(&var).is_none() {
            return Err(Error::UnknownVariable(var));
        }
    }
    let image = g.gamma_apply(d)?;
    Ok(p.translate(|e| -image.get(e)))
}

/// The TGW datum of a multiquiver: shift automorphisms plus the `t_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TgwDatum {
    graph: Multiquiver,
    t: BTreeMap<String, Poly>,
}

impl TgwDatum {
    pub fn new(graph: &Multiquiver) -> Result<Self, Error> {
        let mut t = BTreeMap::new();
        for v in graph.vertex_ids() {
            t.insert(v.to_string(), build_t(graph, v)?);
        }
        Ok(TgwDatum {
            graph: graph.clone(),
            t,
        })
    }

    pub fn graph(&self) -> &Multiquiver {
        &self.graph
    }

    pub fn t(&self, v: &str) -> Result<&Poly, Error> {
        self.t
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    /// `sigma_v` applied to a polynomial.
    pub fn sigma(&self, v: &str, p: &Poly) -> Result<Poly, Error> {
        self.sigma_power(v, 1, p)
    }

    /// `sigma_v^{-1}` applied to a polynomial.
    pub fn sigma_inv(&self, v: &str, p: &Poly) -> Result<Poly, Error> {
        self.sigma_power(v, -1, p)
    }

    /// `sigma_v^k` for any integer `k`; the shifts commute, so this is the
    /// translation by `-k * gamma(v)`.
    pub fn sigma_power(&self, v: &str, k: i64, p: &Poly) -> Result<Poly, Error> {
        let col = self.graph.gamma_column(v)?;
        Ok(p.translate(|e| -k * col.get(e)))
    }

    /// `(sigma_v - id)^k` applied to a polynomial.
    pub fn difference_power(&self, v: &str, k: u32, p: &Poly) -> Result<Poly, Error> {
        let mut out = p.clone();
        for _ in 0..k {
            out = self.sigma(v, &out)? - out;
        }
        Ok(out)
    }

    /// Verifies both consistency equations with every `mu` equal to 1.
    /// Residuals are `lhs - rhs`; the datum is consistent when all vanish.
    pub fn consistency_check(&self) -> Result<ConsistencyReport, Error> {
        let ids: Vec<&str> = self.graph.vertex_ids().collect();
        let mut pairs = Vec::new();
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                let ti = self.t(i)?.clone();
                let tj = self.t(j)?.clone();
                let lhs = self.sigma(i, &self.sigma(j, &ti.checked_mul(&tj)?)?)?;
                let rhs = self.sigma(i, &ti)?.checked_mul(&self.sigma(j, &tj)?)?;
                pairs.push(ConsistencyResidual {
                    vertices: vec![i.to_string(), j.to_string()],
                    residual: lhs - rhs,
                });
            }
        }
        let mut triples = Vec::new();
        for &j in &ids {
            for (a, &i) in ids.iter().enumerate() {
                if i == j {
                    continue;
                }
                for &k in &ids[a + 1..] {
                    if k == j || k == i {
                        continue;
                    }
                    let tj = self.t(j)?.clone();
                    let lhs = self.sigma(i, &self.sigma(k, &tj)?)?.checked_mul(&tj)?;
                    let rhs = self.sigma(i, &tj)?.checked_mul(&self.sigma(k, &tj)?)?;
                    triples.push(ConsistencyResidual {
                        vertices: vec![i.to_string(), j.to_string(), k.to_string()],
                        residual: lhs - rhs,
                    });
                }
            }
        }
        let pass = pairs.iter().chain(&triples).all(|r| r.residual.is_zero());
        Ok(ConsistencyReport {
            pairs,
            triples,
            pass,
        })
    }
}

/// One consistency equation instance: the vertices it was instantiated on
/// and the difference of its two sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyResidual {
    /// `[i, j]` for the pair equation, `[i, j, k]` for the triple equation
    /// (`j` the vertex whose `t` appears).
    pub vertices: Vec<String>,
    pub residual: Poly,
}

/// All consistency residuals of a datum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub pairs: Vec<ConsistencyResidual>,
    pub triples: Vec<ConsistencyResidual>,
    pub pass: bool,
}

/// Substitutes away the last variable using the Euler relation: with
/// variables `u_1 .. u_{n+1}` named like the chain preset of rank `n`,
/// rewrites `u_{n+1} := lambda + (n+1) - (u_1 + ... + u_n)`.
pub fn euler_reduce(p: &Poly, n: usize, lambda: &Scalar) -> Result<Poly, Error> {
    let ids = synthesized_ids("", n + 1);
    for var in p.vars() {
        if !ids.contains(&var) {
            return Err(Error::UnknownVariable(var));
        }
    }
    let mut replacement = Poly::constant(lambda.clone()) + Poly::from_int((n + 1) as i64);
    for id in &ids[..n] {
        replacement = replacement - Poly::var(id);
    }
    p.substitute(&ids[n], &replacement)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> Multiquiver {
        Multiquiver::parse_text("vertex v1\nvertex v2\nedge e source v1 1 target v2 1\n").unwrap()
    }

    fn sample_graph_one() -> Multiquiver {
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

    #[test]
    fn t_polynomials_of_the_single_edge() {
        let g = single_edge();
        assert_eq!(build_t(&g, "v1").unwrap().to_string(), "u_e - 1");
        assert_eq!(build_t(&g, "v2").unwrap().to_string(), "u_e");
    }

    #[test]
    fn t_polynomial_mixes_rising_and_falling_factors() {
        let g = sample_graph_one();
        let t3 = build_t(&g, "v3").unwrap();
        let expected = crate::parse::parse_poly("u_e2 (u_e2+1) (u_e2+2) (u_e3 - 1)").unwrap();
        assert_eq!(t3, expected);
        // The isolated vertex has the empty product.
        assert!(build_t(&g, "v1").unwrap().is_one());
    }

    #[test]
    fn sigma_shifts_by_the_incidence_column() {
        let d = TgwDatum::new(&single_edge()).unwrap();
        let u = Poly::var("e");
        assert_eq!(d.sigma("v1", &u).unwrap(), Poly::var_plus("e", 1));
        assert_eq!(d.sigma("v2", &u).unwrap(), Poly::var_plus("e", -1));
        assert_eq!(d.sigma_inv("v1", &u).unwrap(), Poly::var_plus("e", -1));
        assert_eq!(d.sigma_power("v1", 3, &u).unwrap(), Poly::var_plus("e", 3));
    }

    #[test]
    fn shift_apply_uses_the_matrix_column_sum() {
        let g = sample_graph_one();
        let d = DegreeV::unit("v2").plus(&DegreeV::unit("v3"));
        // gamma(v2+v3) = e2 - e3 + e4, so u_e2 -> u_e2 - 1.
        let p = Poly::var("e2") + Poly::var("e3");
        let shifted = shift_apply(&g, &d, &p).unwrap();
        assert_eq!(shifted, Poly::var_plus("e2", -1) + Poly::var_plus("e3", 1));
        let err = shift_apply(&g, &d, &Poly::var("nope")).unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(_)));
    }

    #[test]
    fn consistency_holds_on_the_samples() {
        for g in [single_edge(), sample_graph_one()] {
            let datum = TgwDatum::new(&g).unwrap();
            let report = datum.consistency_check().unwrap();
            assert!(report.pass);
            for r in report.pairs.iter().chain(&report.triples) {
                assert!(r.residual.is_zero(), "residual at {:?}", r.vertices);
            }
        }
    }

    #[test]
    fn difference_powers_on_the_single_edge() {
        let d = TgwDatum::new(&single_edge()).unwrap();
        let t2 = d.t("v2").unwrap().clone();
        // sigma_1(u) - u = 1.
        assert_eq!(d.difference_power("v1", 1, &t2).unwrap(), Poly::one());
        assert!(d.difference_power("v1", 2, &t2).unwrap().is_zero());
    }

    #[test]
    fn euler_reduce_substitutes_the_last_variable() {
        // n = 1, lambda = 0: u_2 -> 2 - u_1.
        let p = Poly::var("2");
        let got = euler_reduce(&p, 1, &Scalar::zero()).unwrap();
        assert_eq!(got, Poly::from_int(2) - Poly::var("1"));
        // The reduction respects products.
        let q = Poly::var("1").checked_mul(&Poly::var("2")).unwrap();
        let got = euler_reduce(&q, 1, &Scalar::zero()).unwrap();
        let u1 = Poly::var("1");
        assert_eq!(
            got,
            u1.checked_mul(&(Poly::from_int(2) - u1.clone())).unwrap()
        );
        assert!(euler_reduce(&Poly::var("9"), 1, &Scalar::zero()).is_err());
    }
}
