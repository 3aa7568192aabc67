//! Graph groupoids of finite directed graphs, their graph automata, a
//! decision procedure for the fractaloid property, and several independent
//! ways of computing the free moments of the labeling operator.
//!
//! ```
//! use fractaloid::graph::{DirectedGraph, Weighting};
//! use fractaloid::automaton::is_fractaloid;
//!
//! let g = DirectedGraph::new(["v1", "v2", "v3"], [("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")]).unwrap();
//! let report = is_fractaloid(&g, &Weighting::canonical(&g), 3).unwrap();
//! assert!(report.fractaloid);
//!
//! let b = DirectedGraph::new(["v"], [("e1", "v", "v"), ("e2", "v", "v")]).unwrap();
//! let m4 = fractaloid::operator::moment_operator(&b, 4).unwrap();
//! assert_eq!(m4.uniform().map(|x| x.to_string()), Some("28".into()));
//! ```

pub mod automaton;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod freeprob;
pub mod graph;
pub mod groupoid;
pub mod operator;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, SignedEdge, Weighting};
pub use groupoid::GroupoidElement;

/// Exact signed integer used for moments.
pub type Integer = num_bigint::BigInt;
/// Exact natural number used for counts.
pub type Natural = num_bigint::BigUint;
/// Exact rational used for cumulants.
pub type Rational = num_rational::BigRational;
