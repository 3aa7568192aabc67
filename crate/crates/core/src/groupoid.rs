//! Words over signed edges, reduction to graph-groupoid normal form, the
//! groupoid product and the diagram map.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{theta, DirectedGraph, SignedEdge, VertexId, Weighting};

/// A finite (not necessarily admissible) sequence of signed edges.
pub type Word = Vec<SignedEdge>;

/// Element of the graph groupoid in normal form.
///
/// A `ReducedPath` is nonempty, admissible, and has no adjacent `e e⁻¹`.
/// Build one with [`reduce`] rather than by hand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupoidElement {
    Empty,
    Vertex(VertexId),
    ReducedPath(Vec<SignedEdge>),
}

impl GroupoidElement {
    pub fn is_empty(&self) -> bool {
        matches!(self, GroupoidElement::Empty)
    }

    /// Number of edges; zero for vertices and the empty element.
    pub fn len(&self) -> usize {
        match self {
            GroupoidElement::ReducedPath(p) => p.len(),
            _ => 0,
        }
    }

    pub fn edges(&self) -> &[SignedEdge] {
        match self {
            GroupoidElement::ReducedPath(p) => p,
            _ => &[],
        }
    }
}

fn admissible(g: &DirectedGraph, word: &[SignedEdge]) -> bool {
    word.windows(2).all(|p| g.target(p[0]) == g.source(p[1]))
}

/// Appends `e` to a reduced stack, cancelling against the top.
fn push_reduced(stack: &mut Vec<SignedEdge>, e: SignedEdge) {
    if stack.last().is_some_and(|&top| top.is_inverse_of(e)) {
        stack.pop();
    } else {
        stack.push(e);
    }
}

/// Normal form of a word: non-admissible words go to `Empty`, then adjacent
/// inverse pairs cancel until none remain.
pub fn reduce(g: &DirectedGraph, word: &[SignedEdge]) -> GroupoidElement {
    let Some(&first) = word.first() else {
        return GroupoidElement::Empty;
    };
    if !admissible(g, word) {
        return GroupoidElement::Empty;
    }
    let mut stack = Vec::with_capacity(word.len());
    for &e in word {
        push_reduced(&mut stack, e);
    }
    if stack.is_empty() {
        GroupoidElement::Vertex(g.source(first))
    } else {
        GroupoidElement::ReducedPath(stack)
    }
}

pub fn source(g: &DirectedGraph, a: &GroupoidElement) -> Result<VertexId> {
    match a {
        GroupoidElement::Empty => Err(Error::EmptyElement),
        GroupoidElement::Vertex(v) => Ok(*v),
        GroupoidElement::ReducedPath(p) => Ok(g.source(p[0])),
    }
}

pub fn range(g: &DirectedGraph, a: &GroupoidElement) -> Result<VertexId> {
    match a {
        GroupoidElement::Empty => Err(Error::EmptyElement),
        GroupoidElement::Vertex(v) => Ok(*v),
        GroupoidElement::ReducedPath(p) => Ok(g.target(p[p.len() - 1])),
    }
}

pub fn inverse(a: &GroupoidElement) -> Result<GroupoidElement> {
    match a {
        GroupoidElement::Empty => Err(Error::EmptyElement),
        GroupoidElement::Vertex(v) => Ok(GroupoidElement::Vertex(*v)),
        GroupoidElement::ReducedPath(p) => {
            Ok(GroupoidElement::ReducedPath(p.iter().rev().map(|e| e.inverse()).collect()))
        }
    }
}

/// Groupoid product `a b`: defined when `range(a) = source(b)`, `Empty`
/// otherwise.
pub fn compose(g: &DirectedGraph, a: &GroupoidElement, b: &GroupoidElement) -> GroupoidElement {
    use GroupoidElement::*;
    let (Ok(ra), Ok(sb)) = (range(g, a), source(g, b)) else {
        return Empty;
    };
    if ra != sb {
        return Empty;
    }
    match (a, b) {
        (Vertex(_), x) | (x, Vertex(_)) => x.clone(),
        (ReducedPath(p), ReducedPath(q)) => {
            let mut stack = p.clone();
            for &e in q {
                push_reduced(&mut stack, e);
            }
            if stack.is_empty() {
                Vertex(g.source(p[0]))
            } else {
                ReducedPath(stack)
            }
        }
        (Empty, _) | (_, Empty) => unreachable!("endpoints of Empty are undefined"),
    }
}

/// Parses `"e1,e2,~e2"`; `~` marks a shadow edge. The empty string is the
/// empty word.
pub fn parse_word(g: &DirectedGraph, text: &str) -> Result<Word> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| g.parse_signed(t)).collect()
}

pub fn format_word(g: &DirectedGraph, word: &[SignedEdge]) -> String {
    word.iter().map(|&e| g.signed_name(e)).collect::<Vec<_>>().join(",")
}

/// Human-readable element: `∅`, a vertex name, or a word.
pub fn format_element(g: &DirectedGraph, a: &GroupoidElement) -> String {
    match a {
        GroupoidElement::Empty => "∅".to_string(),
        GroupoidElement::Vertex(v) => g.vertex_name(*v).to_string(),
        GroupoidElement::ReducedPath(p) => format_word(g, p),
    }
}

/// Random reduced element: a non-backtracking walk of length `0..=max_len`
/// from `start` (or a random vertex).
pub fn random_element<R: Rng>(
    g: &DirectedGraph,
    rng: &mut R,
    max_len: usize,
    start: Option<VertexId>,
) -> GroupoidElement {
    let start = start.unwrap_or_else(|| VertexId(rng.gen_range(0..g.vertex_count())));
    let len = rng.gen_range(0..=max_len);
    let mut path: Vec<SignedEdge> = Vec::with_capacity(len);
    let mut at = start;
    for _ in 0..len {
        let options: Vec<SignedEdge> = g
            .shadow_out(at)
            .iter()
            .copied()
            .filter(|&e| path.last().is_none_or(|&last| !last.is_inverse_of(e)))
            .collect();
        if options.is_empty() {
            break;
        }
        let e = options[rng.gen_range(0..options.len())];
        path.push(e);
        at = g.target(e);
    }
    if path.is_empty() {
        GroupoidElement::Vertex(start)
    } else {
        GroupoidElement::ReducedPath(path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub law: String,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub passed: bool,
    pub failure: Option<AxiomFailure>,
}

/// Samples random triples of reduced elements and checks associativity,
/// the unit laws and the inverse laws.
pub fn check_groupoid_axioms(g: &DirectedGraph, samples: usize, seed: u64) -> AxiomReport {
    check_groupoid_axioms_with(g, samples, seed, compose)
}

/// As [`check_groupoid_axioms`] with a caller-supplied product, so a faulty
/// product can be shown to fail.
pub fn check_groupoid_axioms_with<F>(g: &DirectedGraph, samples: usize, seed: u64, product: F) -> AxiomReport
where
    F: Fn(&DirectedGraph, &GroupoidElement, &GroupoidElement) -> GroupoidElement,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fail = |law: &str, xs: &[&GroupoidElement]| AxiomReport {
        samples,
        passed: false,
        failure: Some(AxiomFailure {
            law: law.to_string(),
            witness: xs.iter().map(|x| format_element(g, x)).collect(),
        }),
    };
    if g.vertex_count() == 0 {
        return AxiomReport { samples: 0, passed: true, failure: None };
    }

    for _ in 0..samples {
        let a = random_element(g, &mut rng, 6, None);
        // Mostly chain the samples so that products are defined.
        let chain = |rng: &mut ChaCha8Rng, prev: &GroupoidElement| {
            let start = if rng.gen_bool(0.75) { range(g, prev).ok() } else { None };
            random_element(g, rng, 6, start)
        };
        let b = chain(&mut rng, &a);
        let c = chain(&mut rng, &b);

        let left = product(g, &product(g, &a, &b), &c);
        let right = product(g, &a, &product(g, &b, &c));
        if left != right {
            return fail("associativity", &[&a, &b, &c]);
        }

        let (s, r) = (GroupoidElement::Vertex(source(g, &a).unwrap()), GroupoidElement::Vertex(range(g, &a).unwrap()));
        if product(g, &s, &a) != a || product(g, &a, &r) != a {
            return fail("unit", &[&a]);
        }

        let inv = inverse(&a).unwrap();
        if product(g, &a, &inv) != s || product(g, &inv, &a) != r {
            return fail("inverse", &[&a]);
        }
    }
    AxiomReport { samples, passed: true, failure: None }
}

/// Concrete diagram of an element: visited vertices and traversed signed
/// edges, with repetitions collapsed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<SignedEdge>,
}

pub fn diagram(g: &DirectedGraph, a: &GroupoidElement) -> Result<Diagram> {
    match a {
        GroupoidElement::Empty => Err(Error::EmptyElement),
        GroupoidElement::Vertex(v) => Ok(Diagram { vertices: BTreeSet::from([*v]), edges: BTreeSet::new() }),
        GroupoidElement::ReducedPath(p) => {
            let mut vertices = BTreeSet::new();
            for &e in p {
                vertices.insert(g.source(e));
                vertices.insert(g.target(e));
            }
            Ok(Diagram { vertices, edges: p.iter().copied().collect() })
        }
    }
}

/// `a` and `b` are diagram-distinct when `a ≠ b⁻¹` and their diagrams differ.
pub fn diagram_distinct(g: &DirectedGraph, a: &GroupoidElement, b: &GroupoidElement) -> Result<bool> {
    let b_inv = inverse(b)?;
    Ok(*a != b_inv && diagram(g, a)? != diagram(g, b)?)
}

/// For `w1: v → v'` and `w2: v' → v`, returns whether the summed labels of
/// `w1 w2` vanish and whether `w1 w2` reduces to a vertex.
///
/// The second implies the first; the converse fails in general (for example
/// the commutator `e1 e2 e1⁻¹ e2⁻¹` on a two-loop bouquet).
pub fn theta_vertex_test(
    g: &DirectedGraph,
    weighting: &Weighting,
    w1: &GroupoidElement,
    w2: &GroupoidElement,
) -> Result<(bool, bool)> {
    let (s1, r1) = (source(g, w1)?, range(g, w1)?);
    let (s2, r2) = (source(g, w2)?, range(g, w2)?);
    if r1 != s2 || r2 != s1 {
        return Err(Error::EndpointMismatch(format!(
            "{} and {} do not form a loop",
            format_element(g, w1),
            format_element(g, w2)
        )));
    }
    let labels: Vec<i32> = w1.edges().iter().chain(w2.edges()).map(|&e| weighting.label(e)).collect();
    let theta_zero = theta(&labels, weighting.max_label())?.is_zero();
    let is_vertex = matches!(compose(g, w1, w2), GroupoidElement::Vertex(_));
    Ok((theta_zero, is_vertex))
}
