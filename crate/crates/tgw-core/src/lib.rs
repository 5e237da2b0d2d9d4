//! Exact computer algebra for twisted generalized Weyl (TGW) algebras
//! attached to multiquivers.
//!
//! A multiquiver is a finite directed graph with parallel edges, optional
//! endpoints and positive integer multiplicities.  Its incidence matrix
//! determines a TGW datum (a polynomial ring, commuting shift automorphisms
//! and distinguished polynomials `t_v`) together with a canonical
//! representation by differential operators inside a Weyl algebra kept in
//! exact normal-ordered form.
//!
//! Modules:
//! * [`scalar`]: exact Gaussian rational arithmetic.
//! * [`poly`]: sparse multivariate polynomials over [`scalar::Scalar`].
//! * [`graph`]: multiquivers, incidence matrices, equilibrium and kernel
//!   analysis, acyclicity.
//! * [`ring`]: the TGW datum (shift action, `t_v` construction, consistency
//!   equations, difference powers, Euler reduction).
//! * [`weyl`]: the normal-ordered Weyl algebra engine (`z`-monomials,
//!   structure polynomials `P_{m,n}`, multiplication, star involution and an
//!   independent word-rewriting normal orderer).
//! * [`rep`]: evaluation of TGW words in the Weyl engine, reduction to
//!   normal form, faithfulness and local surjectivity reports, realizing
//!   parity functions by total orders.
//! * [`cartan`]: generalized Cartan matrices, Dynkin diagrams, Serre
//!   relation checks, Lie-algebra presets and the Cartan-datum morphism
//!   check.
//! * [`parse`]: text parsers for polynomials, Weyl expressions and TGW
//!   words.
//! * [`random`]: seeded random multiquiver generation for self-tests.

pub mod cartan;
pub mod error;
pub mod graph;
pub mod parse;
pub mod poly;
pub mod random;
pub mod rep;
pub mod ring;
pub mod scalar;
pub mod weyl;

pub use error::Error;
pub use graph::{DegreeE, DegreeV, EquilibriumReport, IncidenceMatrix, Multiquiver};
pub use poly::Poly;
pub use ring::TgwDatum;
pub use scalar::Scalar;
pub use weyl::WeylElement;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
