#![allow(dead_code)]

use fractaloid::cli::load_graph;
use fractaloid::graph::{DirectedGraph, SignedEdge};
use fractaloid::groupoid::GroupoidElement;
use rand::Rng;

pub const CORPUS: [&str; 4] = ["c3", "bouquet1", "bouquet2", "single-edge"];

pub fn corpus() -> Vec<(&'static str, DirectedGraph)> {
    CORPUS.iter().map(|&name| (name, load_graph(name).unwrap())).collect()
}

/// Walk in the shadowed graph that may backtrack, so words carry
/// cancellable pairs.
pub fn random_walk<R: Rng>(g: &DirectedGraph, rng: &mut R, len: usize) -> Vec<SignedEdge> {
    let mut at = fractaloid::graph::VertexId(rng.gen_range(0..g.vertex_count()));
    let mut word = Vec::with_capacity(len);
    for _ in 0..len {
        let out = g.shadow_out(at);
        if out.is_empty() {
            break;
        }
        let e = out[rng.gen_range(0..out.len())];
        word.push(e);
        at = g.target(e);
    }
    word
}

/// Any sequence of signed edges, admissible or not.
pub fn random_letters<R: Rng>(g: &DirectedGraph, rng: &mut R, len: usize) -> Vec<SignedEdge> {
    let all: Vec<SignedEdge> = g.signed_edges().collect();
    (0..len).map(|_| all[rng.gen_range(0..all.len())]).collect()
}

/// Reduction by cancelling adjacent inverse pairs in random order.
pub fn reduce_randomly<R: Rng>(g: &DirectedGraph, word: &[SignedEdge], rng: &mut R) -> GroupoidElement {
    let Some(first) = word.first() else {
        return GroupoidElement::Empty;
    };
    if word.windows(2).any(|w| g.target(w[0]) != g.source(w[1])) {
        return GroupoidElement::Empty;
    }
    let start = g.source(*first);
    let mut w = word.to_vec();
    loop {
        let pairs: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i].is_inverse_of(w[i + 1])).collect();
        if pairs.is_empty() {
            break;
        }
        let i = pairs[rng.gen_range(0..pairs.len())];
        w.drain(i..i + 2);
    }
    if w.is_empty() {
        GroupoidElement::Vertex(start)
    } else {
        GroupoidElement::ReducedPath(w)
    }
}

/// `m! / Π c_i!` from factorials in arbitrary precision.
pub fn multinomial(counts: &[usize]) -> num_bigint::BigUint {
    let fact = |n: usize| (1..=n as u64).fold(num_bigint::BigUint::from(1u8), |acc, i| acc * i);
    let total: usize = counts.iter().sum();
    counts.iter().fold(fact(total), |acc, &c| acc / fact(c))
}
