//! Seeded pseudo-random multiquivers for exercising the structural
//! checks on inputs nobody hand-picked.  Generation is deterministic in
//! the seed, so any failure reproduces from its seed alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{synthesized_ids, DegreeE, Edge, Endpoint, Multiquiver};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::weyl::WeylElement;

/// Desk-scale graph: at most 6 vertices, 8 edges, multiplicity 4.
pub fn random_multiquiver(seed: u64) -> Multiquiver {
    generate(seed, 6, 8, 4)
}

/// Smaller graphs for the expensive ad-power checks: at most 3
/// vertices, 4 edges, multiplicity 3.
pub fn random_multiquiver_small(seed: u64) -> Multiquiver {
    generate(seed, 3, 4, 3)
}

fn generate(seed: u64, max_vertices: usize, max_edges: usize, max_mult: u32) -> Multiquiver {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vertices);
    let vertices = synthesized_ids("v", n);
    let m = rng.gen_range(0..=max_edges);
    let edge_ids = synthesized_ids("e", m);
    let mut edges = Vec::with_capacity(m);
    for id in edge_ids {
        let kind = rng.gen_range(0..10u32);
        let (source, target) = if kind < 7 && n >= 2 {
            // A proper edge needs two distinct vertices; loops are not
            // a thing.
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (
                Some(endpoint(&vertices[a], &mut rng, max_mult)),
                Some(endpoint(&vertices[b], &mut rng, max_mult)),
            )
        } else if kind == 7 || (kind < 7 && n == 1) {
            let a = rng.gen_range(0..n);
            (Some(endpoint(&vertices[a], &mut rng, max_mult)), None)
        } else if kind == 8 {
            let a = rng.gen_range(0..n);
            (None, Some(endpoint(&vertices[a], &mut rng, max_mult)))
        } else {
            (None, None)
        };
        edges.push(Edge { id, source, target });
    }
    Multiquiver::new(vertices, edges).expect("generated graphs satisfy the constructor checks")
}

fn endpoint(vertex: &str, rng: &mut ChaCha8Rng, max_mult: u32) -> Endpoint {
    Endpoint {
        vertex: vertex.to_string(),
        mult: rng.gen_range(1..=max_mult),
    }
}

/// Small random Weyl element over edges `a` and `b`: one or two terms,
/// `z`-degrees within 2 per edge, affine coefficients with entries
/// within 3.
pub fn random_weyl_element(seed: u64) -> WeylElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = WeylElement::zero();
    for _ in 0..rng.gen_range(1..=2usize) {
        let mut degree = DegreeE::new();
        degree.add_to("a", rng.gen_range(-2..=2));
        degree.add_to("b", rng.gen_range(-2..=2));
        let mut coeff = Poly::from_int(rng.gen_range(-3..=3));
        coeff += Poly::var("a").scale(&Scalar::from_int(rng.gen_range(-3..=3)));
        coeff += Poly::var("b").scale(&Scalar::from_int(rng.gen_range(-3..=3)));
        out.add_term(degree, coeff);
    }
    out
}
