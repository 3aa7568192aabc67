//! The graph automaton: its labeling map `φ`, shift `ψ`, the actions they
//! induce, the tree of finite paths those actions live on, and the
//! fractaloid decision.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, SignedEdge, VertexId, Weight, Weighting};
use crate::groupoid::format_word;

/// Labeling map: `ω(e)` when `e` leaves the terminal vertex of `state`,
/// otherwise the empty state.
pub fn phi(g: &DirectedGraph, weighting: &Weighting, state: &Weight, e: SignedEdge) -> Weight {
    match state.target() {
        Some(t) if t == g.source(e) => weighting.omega_word(g, &[e]),
        _ => Weight::Empty,
    }
}

/// Labeling map extended to words: `ω` of the last edge when `state · word`
/// is admissible. The empty word acts as the identity.
pub fn phi_word(g: &DirectedGraph, weighting: &Weighting, state: &Weight, word: &[SignedEdge]) -> Weight {
    let Some(&last) = word.last() else {
        return state.clone();
    };
    match psi_word(g, state, word) {
        Some(_) => weighting.omega_word(g, &[last]),
        None => Weight::Empty,
    }
}

/// Shift: `e` itself when admissible after `state`.
pub fn psi(g: &DirectedGraph, state: &Weight, e: SignedEdge) -> Option<SignedEdge> {
    match state.target() {
        Some(t) if t == g.source(e) => Some(e),
        _ => None,
    }
}

pub fn psi_word<'w>(g: &DirectedGraph, state: &Weight, word: &'w [SignedEdge]) -> Option<&'w [SignedEdge]> {
    let first = *word.first()?;
    psi(g, state, first)?;
    word.windows(2).all(|p| g.target(p[0]) == g.source(p[1])).then_some(word)
}

/// How the single-word side of the composition law is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordOrder {
    /// `A_{e1} A_{e2}` against `A_{e2 e1}`: the actual law.
    Reversed,
    /// `A_{e1} A_{e2}` against `A_{e1 e2}`; fails on most graphs.
    AsWritten,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionReport {
    pub checked: usize,
    pub passed: bool,
    /// `(state, e1, e2)` on which the two sides differ.
    pub witness: Option<(String, String, String)>,
}

/// All weights of paths of length `0..=depth` in the shadowed graph, plus
/// the empty state.
pub fn states_up_to(g: &DirectedGraph, weighting: &Weighting, depth: usize) -> Vec<Weight> {
    let mut out = vec![Weight::Empty];
    let mut frontier: Vec<Weight> = g.vertices().map(Weight::vertex).collect();
    for level in 0..=depth {
        if level == depth {
            out.append(&mut frontier);
            break;
        }
        let mut next = Vec::new();
        for w in &frontier {
            let t = w.target().expect("frontier holds paths");
            for &e in g.shadow_out(t) {
                next.push(w.concat(&weighting.omega_word(g, &[e])));
            }
        }
        out.append(&mut frontier);
        frontier = next;
    }
    out
}

/// Checks `A_{e1}(A_{e2}(x)) = A_{e2 e1}(x)` for every state of depth at most
/// `depth` and every pair of signed edges.
pub fn action_compose_check(g: &DirectedGraph, weighting: &Weighting, depth: usize) -> CompositionReport {
    action_compose_check_with(g, weighting, depth, WordOrder::Reversed)
}

pub fn action_compose_check_with(
    g: &DirectedGraph,
    weighting: &Weighting,
    depth: usize,
    order: WordOrder,
) -> CompositionReport {
    let edges: Vec<SignedEdge> = g.signed_edges().collect();
    let mut checked = 0;
    for x in states_up_to(g, weighting, depth) {
        for &e1 in &edges {
            for &e2 in &edges {
                checked += 1;
                let lhs = phi(g, weighting, &phi(g, weighting, &x, e2), e1);
                let word = match order {
                    WordOrder::Reversed => [e2, e1],
                    WordOrder::AsWritten => [e1, e2],
                };
                if lhs != phi_word(g, weighting, &x, &word) {
                    return CompositionReport {
                        checked,
                        passed: false,
                        witness: Some((format_state(g, &x), g.signed_name(e1), g.signed_name(e2))),
                    };
                }
            }
        }
    }
    CompositionReport { checked, passed: true, witness: None }
}

fn format_state(g: &DirectedGraph, w: &Weight) -> String {
    match w {
        Weight::Empty => "∅".into(),
        Weight::Path { source, target, labels } => format!(
            "(({}, {}), {:?})",
            g.vertex_name(*source),
            g.vertex_name(*target),
            labels
        ),
    }
}

#[derive(Clone, Debug)]
pub struct AgNode {
    pub parent: Option<usize>,
    /// Edge from the parent; `None` at the root.
    pub edge: Option<SignedEdge>,
    pub depth: usize,
    pub terminal: VertexId,
    pub weight: Weight,
    pub children: Vec<usize>,
}

/// Tree of all (non-reduced) paths of the shadowed graph starting at a root
/// vertex, truncated at a fixed depth. Node 0 is the root.
#[derive(Clone, Debug)]
pub struct AgTree {
    root: VertexId,
    depth: usize,
    nodes: Vec<AgNode>,
}

impl AgTree {
    pub fn root_vertex(&self) -> VertexId {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[AgNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &AgNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Path from the root to node `i`.
    pub fn path(&self, mut i: usize) -> Vec<SignedEdge> {
        let mut out = Vec::with_capacity(self.nodes[i].depth);
        while let Some(e) = self.nodes[i].edge {
            out.push(e);
            i = self.nodes[i].parent.expect("non-root has a parent");
        }
        out.reverse();
        out
    }

    pub fn level(&self, depth: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(move |(_, n)| n.depth == depth).map(|(i, _)| i)
    }
}

/// Breadth-first tree of all paths of length `1..=depth` from `root`, each
/// node annotated with its weight.
pub fn build_ag_tree(g: &DirectedGraph, weighting: &Weighting, root: VertexId, depth: usize) -> Result<AgTree> {
    g.require_connected()?;
    if depth < 1 {
        return Err(Error::InvalidArgument("tree depth must be at least 1".into()));
    }
    if root.0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", root.0)));
    }
    let mut nodes = vec![AgNode {
        parent: None,
        edge: None,
        depth: 0,
        terminal: root,
        weight: Weight::vertex(root),
        children: Vec::new(),
    }];
    let mut i = 0;
    while i < nodes.len() {
        if nodes[i].depth < depth {
            let terminal = nodes[i].terminal;
            for &e in g.shadow_out(terminal) {
                let child = AgNode {
                    parent: Some(i),
                    edge: Some(e),
                    depth: nodes[i].depth + 1,
                    terminal: g.target(e),
                    weight: nodes[i].weight.concat(&weighting.omega_word(g, &[e])),
                    children: Vec::new(),
                };
                let id = nodes.len();
                nodes.push(child);
                nodes[i].children.push(id);
            }
        }
        i += 1;
    }
    Ok(AgTree { root, depth, nodes })
}

/// Canonical form of a rooted, edge-labelled tree. Two forms are equal iff
/// the trees are isomorphic by a label-preserving isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn canonical(tree: &AgTree, weighting: Option<&Weighting>, node: usize, residual: usize) -> String {
    if residual == 0 {
        return "()".to_string();
    }
    let mut parts: Vec<String> = tree.nodes[node]
        .children
        .iter()
        .map(|&c| {
            let sub = canonical(tree, weighting, c, residual - 1);
            match (weighting, tree.nodes[c].edge) {
                (Some(w), Some(e)) => format!("{}{}", w.label(e), sub),
                _ => sub,
            }
        })
        .collect();
    parts.sort_unstable();
    format!("({})", parts.concat())
}

fn check_residual(tree: &AgTree, node: usize, residual: usize) -> Result<()> {
    let n = tree.nodes.get(node).ok_or_else(|| Error::InvalidArgument(format!("no node {node}")))?;
    if n.depth + residual > tree.depth {
        return Err(Error::InvalidArgument(format!(
            "node at depth {} has only {} levels below it",
            n.depth,
            tree.depth - n.depth
        )));
    }
    Ok(())
}

/// Label-preserving canonical hash of the w-part rooted at `node`, truncated
/// to `residual` levels. Children are ordered by `(label, subtree)`, so the
/// hash ignores child order.
pub fn subtree_hash(tree: &AgTree, weighting: &Weighting, node: usize, residual: usize) -> Result<CanonicalForm> {
    check_residual(tree, node, residual)?;
    Ok(CanonicalForm(canonical(tree, Some(weighting), node, residual)))
}

/// Shape-only (unlabelled) AHU hash of the same truncated w-part.
pub fn subtree_shape_hash(tree: &AgTree, node: usize, residual: usize) -> Result<CanonicalForm> {
    check_residual(tree, node, residual)?;
    Ok(CanonicalForm(canonical(tree, None, node, residual)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A vertex whose shadowed degree is not `2N`.
    Degree { vertex: String, degree: usize, expected: usize },
    /// A w-part that is not isomorphic to the tree at the same truncation.
    Wpart { root: String, path: String, residual: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractaloidReport {
    pub fractaloid: bool,
    pub degree_ok: bool,
    pub wpart_ok: bool,
    pub uniform_labels: bool,
    pub criteria_agree: bool,
    pub max_out_degree: usize,
    pub depth: usize,
    pub method: &'static str,
    pub witness: Option<Witness>,
}

/// Default tree depth for the w-part criterion.
pub const DEFAULT_DEPTH: usize = 3;

/// Decides the fractaloid property with two independent criteria:
///
/// * degree: every vertex has `deg_out + deg_in = 2N`;
/// * w-part: in the path tree of every root vertex, each w-part rooted at
///   depth `1..=d` is label-isomorphic to the tree itself, both truncated to
///   depth `d`.
///
/// The verdict requires both. A disagreement between them is reported in
/// `criteria_agree`.
pub fn is_fractaloid(g: &DirectedGraph, weighting: &Weighting, depth: usize) -> Result<FractaloidReport> {
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("tree depth must be at least 1".into()));
    }
    let n = weighting.max_label();
    let mut witness = None;

    let degree_witness = g.vertices().find_map(|v| {
        let total = g.shadow_out(v).len();
        (total != 2 * n).then(|| Witness::Degree {
            vertex: g.vertex_name(v).to_string(),
            degree: total,
            expected: 2 * n,
        })
    });
    let degree_ok = degree_witness.is_none();
    if let Some(w) = degree_witness {
        witness = Some(w);
    }

    let mut wpart_witness = None;
    'roots: for v in g.vertices() {
        let tree = build_ag_tree(g, weighting, v, 2 * depth)?;
        let root_form = subtree_hash(&tree, weighting, 0, depth)?;
        for (i, node) in tree.nodes().iter().enumerate().skip(1) {
            if node.depth > depth {
                break;
            }
            if subtree_hash(&tree, weighting, i, depth)? != root_form {
                wpart_witness = Some(Witness::Wpart {
                    root: g.vertex_name(v).to_string(),
                    path: format_word(g, &tree.path(i)),
                    residual: depth,
                });
                break 'roots;
            }
        }
    }
    let wpart_ok = wpart_witness.is_none();
    if witness.is_none() {
        witness = wpart_witness;
    }

    let uniform_labels = g.vertices().all(|v| {
        let labels: BTreeSet<i32> = g.shadow_out(v).iter().map(|&e| weighting.label(e)).collect();
        g.shadow_out(v).len() == 2 * n && labels.len() == 2 * n
    });

    Ok(FractaloidReport {
        fractaloid: degree_ok && wpart_ok,
        degree_ok,
        wpart_ok,
        uniform_labels,
        criteria_agree: degree_ok == wpart_ok,
        max_out_degree: n,
        depth,
        method: "degree+wpart",
        witness,
    })
}
