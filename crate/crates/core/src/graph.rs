//! Finite directed graphs, their shadowed graphs and the canonical
//! weighting that labels every signed edge with an index in `±1..±N`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// Orientation of a signed edge. `Minus` is the shadow `e⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// An edge of the shadowed graph: either a declared edge or its shadow.
///
/// The derived order puts every declared edge before every shadow, each
/// group in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedEdge {
    pub sign: Sign,
    pub edge: EdgeId,
}

impl SignedEdge {
    pub fn forward(edge: EdgeId) -> Self {
        SignedEdge { sign: Sign::Plus, edge }
    }

    pub fn shadow(edge: EdgeId) -> Self {
        SignedEdge { sign: Sign::Minus, edge }
    }

    pub fn inverse(self) -> Self {
        SignedEdge { sign: self.sign.flip(), edge: self.edge }
    }

    pub fn is_inverse_of(self, other: SignedEdge) -> bool {
        self.edge == other.edge && self.sign != other.sign
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub src: VertexId,
    pub dst: VertexId,
}

/// JSON layout of a graph file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// A finite directed graph. Loops and parallel edges are allowed; vertex and
/// edge order is the declaration order.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    vertex_lookup: HashMap<String, VertexId>,
    edge_lookup: HashMap<String, EdgeId>,
    // Shadowed out-edges per vertex, in signed-edge order.
    shadow_out: Vec<Vec<SignedEdge>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub out_degree: usize,
    pub in_degree: usize,
    pub total: usize,
}

impl DirectedGraph {
    /// Builds a graph from vertex names and `(name, src, dst)` edge triples.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let mut vertex_names = Vec::new();
        let mut vertex_lookup = HashMap::new();
        for name in vertices {
            let name = name.into();
            if vertex_lookup.contains_key(&name) {
                return Err(Error::DuplicateVertex(name));
            }
            vertex_lookup.insert(name.clone(), VertexId(vertex_names.len()));
            vertex_names.push(name);
        }

        let mut edge_list = Vec::new();
        let mut edge_lookup = HashMap::new();
        for (name, src, dst) in edges {
            let (name, src, dst) = (name.into(), src.into(), dst.into());
            if name.starts_with('~') || name.contains(',') || name.is_empty() {
                return Err(Error::Parse(name));
            }
            if edge_lookup.contains_key(&name) {
                return Err(Error::DuplicateEdge(name));
            }
            let src = *vertex_lookup.get(&src).ok_or(Error::UnknownVertex(src))?;
            let dst = *vertex_lookup.get(&dst).ok_or(Error::UnknownVertex(dst))?;
            edge_lookup.insert(name.clone(), EdgeId(edge_list.len()));
            edge_list.push(Edge { name, src, dst });
        }

        let mut shadow_out = vec![Vec::new(); vertex_names.len()];
        for (i, e) in edge_list.iter().enumerate() {
            shadow_out[e.src.0].push(SignedEdge::forward(EdgeId(i)));
        }
        for (i, e) in edge_list.iter().enumerate() {
            shadow_out[e.dst.0].push(SignedEdge::shadow(EdgeId(i)));
        }

        Ok(DirectedGraph { vertex_names, edges: edge_list, vertex_lookup, edge_lookup, shadow_out })
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        DirectedGraph::new(
            spec.vertices.iter().cloned(),
            spec.edges.iter().map(|e| (e.name.clone(), e.src.clone(), e.dst.clone())),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_str(text)?;
        DirectedGraph::from_spec(&spec)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertex_names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    name: e.name.clone(),
                    src: self.vertex_names[e.src.0].clone(),
                    dst: self.vertex_names[e.dst.0].clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// All signed edges: declared edges first, then their shadows.
    pub fn signed_edges(&self) -> impl Iterator<Item = SignedEdge> + '_ {
        let m = self.edges.len();
        (0..m).map(|i| SignedEdge::forward(EdgeId(i))).chain((0..m).map(|i| SignedEdge::shadow(EdgeId(i))))
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex_lookup.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Result<EdgeId> {
        self.edge_lookup.get(name).copied().ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    /// `e1` for a declared edge, `~e1` for its shadow.
    pub fn signed_name(&self, e: SignedEdge) -> String {
        match e.sign {
            Sign::Plus => self.edges[e.edge.0].name.clone(),
            Sign::Minus => format!("~{}", self.edges[e.edge.0].name),
        }
    }

    pub fn parse_signed(&self, token: &str) -> Result<SignedEdge> {
        let token = token.trim();
        match token.strip_prefix('~') {
            Some(name) => Ok(SignedEdge::shadow(self.edge(name)?)),
            None => Ok(SignedEdge::forward(self.edge(token)?)),
        }
    }

    pub fn source(&self, e: SignedEdge) -> VertexId {
        let edge = &self.edges[e.edge.0];
        match e.sign {
            Sign::Plus => edge.src,
            Sign::Minus => edge.dst,
        }
    }

    pub fn target(&self, e: SignedEdge) -> VertexId {
        let edge = &self.edges[e.edge.0];
        match e.sign {
            Sign::Plus => edge.dst,
            Sign::Minus => edge.src,
        }
    }

    /// Declared out-edges of `v` in declaration order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.shadow_out[v.0].iter().filter(|e| e.sign == Sign::Plus).map(|e| e.edge)
    }

    /// Out-edges of `v` in the shadowed graph.
    pub fn shadow_out(&self, v: VertexId) -> &[SignedEdge] {
        &self.shadow_out[v.0]
    }

    pub fn degrees(&self, v: VertexId) -> Result<Degrees> {
        if v.0 >= self.vertex_count() {
            return Err(Error::UnknownVertex(format!("#{}", v.0)));
        }
        let out_degree = self.out_edges(v).count();
        let total = self.shadow_out[v.0].len();
        Ok(Degrees { out_degree, in_degree: total - out_degree, total })
    }

    /// Maximal out-degree `N`.
    pub fn max_out_degree(&self) -> usize {
        self.vertices().map(|v| self.out_edges(v).count()).max().unwrap_or(0)
    }

    /// Connectivity of the underlying undirected graph.
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in self.shadow_out(v) {
                let t = self.target(e);
                if !seen[t.0] {
                    seen[t.0] = true;
                    queue.push_back(t);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.vertex_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// The shadowed graph `G^ = G ∪ G⁻¹`.
    pub fn shadow(&self) -> Result<ShadowedGraph<'_>> {
        if self.vertex_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(ShadowedGraph { graph: self, edges: self.signed_edges().collect() })
    }
}

/// View of a graph together with the full signed-edge set.
#[derive(Clone, Debug)]
pub struct ShadowedGraph<'a> {
    graph: &'a DirectedGraph,
    edges: Vec<SignedEdge>,
}

impl<'a> ShadowedGraph<'a> {
    pub fn graph(&self) -> &'a DirectedGraph {
        self.graph
    }

    pub fn edges(&self) -> &[SignedEdge] {
        &self.edges
    }

    pub fn source(&self, e: SignedEdge) -> VertexId {
        self.graph.source(e)
    }

    pub fn target(&self, e: SignedEdge) -> VertexId {
        self.graph.target(e)
    }
}

/// Assignment of a positive label index to every declared edge; shadows
/// carry the negated index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weighting {
    max_label: usize,
    labels: Vec<i32>,
}

impl Weighting {
    /// Validates that the out-edges of each vertex carry the distinct
    /// indices `1..=deg_out(v)`.
    pub fn new(g: &DirectedGraph, labels: Vec<i32>) -> Result<Self> {
        if labels.len() != g.edge_count() {
            return Err(Error::InvalidWeighting(format!(
                "{} labels for {} edges",
                labels.len(),
                g.edge_count()
            )));
        }
        for v in g.vertices() {
            let mut seen: Vec<i32> = g.out_edges(v).map(|e| labels[e.0]).collect();
            seen.sort_unstable();
            let expected: Vec<i32> = (1..=seen.len() as i32).collect();
            if seen != expected {
                return Err(Error::InvalidWeighting(format!(
                    "out-edges of `{}` carry {:?}",
                    g.vertex_name(v),
                    seen
                )));
            }
        }
        Ok(Weighting { max_label: g.max_out_degree(), labels })
    }

    /// Canonical weighting: out-edges of each vertex numbered `1, 2, ...` in
    /// declaration order.
    pub fn canonical(g: &DirectedGraph) -> Self {
        let mut labels = vec![0; g.edge_count()];
        for v in g.vertices() {
            for (i, e) in g.out_edges(v).enumerate() {
                labels[e.0] = i as i32 + 1;
            }
        }
        Weighting { max_label: g.max_out_degree(), labels }
    }

    /// `N`, the number of label coordinates.
    pub fn max_label(&self) -> usize {
        self.max_label
    }

    pub fn label(&self, e: SignedEdge) -> i32 {
        self.labels[e.edge.0] * e.sign.value()
    }

    /// Omega of a word: endpoints plus per-edge labels, or `Empty` when the
    /// word is empty or not a path of the shadowed graph.
    pub fn omega_word(&self, g: &DirectedGraph, word: &[SignedEdge]) -> Weight {
        let (Some(&first), Some(&last)) = (word.first(), word.last()) else {
            return Weight::Empty;
        };
        if word.windows(2).any(|p| g.target(p[0]) != g.source(p[1])) {
            return Weight::Empty;
        }
        Weight::Path {
            source: g.source(first),
            target: g.target(last),
            labels: word.iter().map(|&e| self.label(e)).collect(),
        }
    }
}

/// Free function form of [`Weighting::canonical`].
pub fn canonical_weighting(g: &DirectedGraph) -> Weighting {
    Weighting::canonical(g)
}

/// Integer label vector in `ℤ^N`; coordinate `k` counts `+x_k` minus `-x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelVector(pub Vec<i64>);

impl LabelVector {
    pub fn zero(n: usize) -> Self {
        LabelVector(vec![0; n])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Sums signed label indices into a vector of `ℤ^N`.
pub fn theta(labels: &[i32], n: usize) -> Result<LabelVector> {
    let mut out = LabelVector::zero(n);
    for &t in labels {
        let k = t.unsigned_abs() as usize;
        if k == 0 || k > n {
            return Err(Error::LabelOutOfRange { label: t, max: n });
        }
        out.0[k - 1] += i64::from(t.signum());
    }
    Ok(out)
}

/// Weight of a path (or of a vertex, with no labels), or the empty weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    Empty,
    Path { source: VertexId, target: VertexId, labels: Vec<i32> },
}

impl Weight {
    /// `((v, v), x₀)`.
    pub fn vertex(v: VertexId) -> Self {
        Weight::Path { source: v, target: v, labels: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Weight::Empty)
    }

    pub fn target(&self) -> Option<VertexId> {
        match self {
            Weight::Empty => None,
            Weight::Path { target, .. } => Some(*target),
        }
    }

    /// Concatenation of admissible weights; `Empty` on endpoint mismatch.
    pub fn concat(&self, other: &Weight) -> Weight {
        match (self, other) {
            (
                Weight::Path { source, target, labels },
                Weight::Path { source: s2, target: t2, labels: l2 },
            ) if target == s2 => Weight::Path {
                source: *source,
                target: *t2,
                labels: labels.iter().chain(l2).copied().collect(),
            },
            _ => Weight::Empty,
        }
    }
}

/// A weight whose label sequence has been summed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SummedWeight {
    Empty,
    Summed { source: VertexId, target: VertexId, sum: LabelVector },
}

/// Replaces the label sequence of a weight by its sum.
pub fn omega_plus(weight: &Weight, n: usize) -> Result<SummedWeight> {
    match weight {
        Weight::Empty => Ok(SummedWeight::Empty),
        Weight::Path { source, target, labels } => {
            Ok(SummedWeight::Summed { source: *source, target: *target, sum: theta(labels, n)? })
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn word(g: &DirectedGraph, s: &str) -> Vec<SignedEdge> {
        s.split(',').map(|t| g.parse_signed(t).unwrap()).collect()
    }

    #[test]
    fn shadow_orders_declared_edges_first() {
        let g = c3();
        let sh = g.shadow().unwrap();
        assert_eq!(sh.edges().len(), 6);
        let names: Vec<String> = sh.edges().iter().map(|&e| g.signed_name(e)).collect();
        assert_eq!(names, ["e1", "e2", "e3", "~e1", "~e2", "~e3"]);
        for &e in sh.edges() {
            assert_eq!(sh.source(e.inverse()), sh.target(e));
            assert_eq!(sh.target(e.inverse()), sh.source(e));
        }
    }

    #[test]
    fn shadow_of_loop_and_single_edge() {
        let g = bouquet(1);
        let sh = g.shadow().unwrap();
        let v = g.vertex("v").unwrap();
        assert_eq!(sh.edges().len(), 2);
        assert!(sh.edges().iter().all(|&e| sh.source(e) == v && sh.target(e) == v));

        let g = single_edge();
        let sh = g.shadow().unwrap();
        let (v1, v2) = (g.vertex("v1").unwrap(), g.vertex("v2").unwrap());
        let inv = sh.edges()[1];
        assert_eq!((sh.source(sh.edges()[0]), sh.target(sh.edges()[0])), (v1, v2));
        assert_eq!((sh.source(inv), sh.target(inv)), (v2, v1));
    }

    #[test]
    fn shadow_rejects_empty_graph() {
        let g = DirectedGraph::new(Vec::<String>::new(), Vec::<(String, String, String)>::new()).unwrap();
        assert!(matches!(g.shadow(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            DirectedGraph::new(["a", "a"], Vec::<(&str, &str, &str)>::new()),
            Err(Error::DuplicateVertex(_))
        ));
        assert!(matches!(DirectedGraph::new(["a"], [("e", "a", "b")]), Err(Error::UnknownVertex(_))));
        assert!(matches!(
            DirectedGraph::new(["a"], [("e", "a", "a"), ("e", "a", "a")]),
            Err(Error::DuplicateEdge(_))
        ));
    }

    #[test]
    fn degree_examples() {
        let g = c3();
        let d = g.degrees(g.vertex("v1").unwrap()).unwrap();
        assert_eq!((d.out_degree, d.in_degree, d.total), (1, 1, 2));
        let g = bouquet(2);
        let d = g.degrees(VertexId(0)).unwrap();
        assert_eq!((d.out_degree, d.in_degree, d.total), (2, 2, 4));
        let g = single_edge();
        let d = g.degrees(g.vertex("v2").unwrap()).unwrap();
        assert_eq!((d.out_degree, d.in_degree, d.total), (0, 1, 1));
        assert!(g.degrees(VertexId(7)).is_err());
    }

    #[test]
    fn max_out_degree_examples() {
        assert_eq!(c3().max_out_degree(), 1);
        assert_eq!(bouquet(2).max_out_degree(), 2);
        assert_eq!(single_edge().max_out_degree(), 1);
    }

    #[test]
    fn connectivity() {
        assert!(c3().is_connected());
        assert!(single_edge().is_connected());
        let g = DirectedGraph::new(["a", "b"], Vec::<(&str, &str, &str)>::new()).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn canonical_weighting_examples() {
        let g = c3();
        let w = Weighting::canonical(&g);
        for e in g.signed_edges() {
            assert_eq!(w.label(e), e.sign.value());
        }

        let g = bouquet(2);
        let w = Weighting::canonical(&g);
        let labels: Vec<i32> = g.signed_edges().map(|e| w.label(e)).collect();
        assert_eq!(labels, [1, 2, -1, -2]);

        let g = DirectedGraph::new(["a", "b", "sink"], [("x", "a", "sink"), ("y", "a", "b"), ("z", "b", "sink")])
            .unwrap();
        let w = Weighting::canonical(&g);
        assert_eq!(w.max_label(), 2);
        let sink = g.vertex("sink").unwrap();
        assert_eq!(g.out_edges(sink).count(), 0);
        assert_eq!(w.label(SignedEdge::forward(g.edge("y").unwrap())), 2);
        assert_eq!(w.label(SignedEdge::forward(g.edge("z").unwrap())), 1);
    }

    #[test]
    fn weighting_validation() {
        let g = bouquet(2);
        assert!(Weighting::new(&g, vec![2, 1]).is_ok());
        assert!(Weighting::new(&g, vec![1, 1]).is_err());
        assert!(Weighting::new(&g, vec![1]).is_err());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&[1, -1], 1).unwrap(), LabelVector(vec![0]));
        assert_eq!(theta(&[1; 6], 1).unwrap(), LabelVector(vec![6]));
        assert_eq!(theta(&[1, 2, -1], 2).unwrap(), LabelVector(vec![0, 1]));
        assert!(theta(&[], 3).unwrap().is_zero());
        assert!(matches!(theta(&[2], 1), Err(Error::LabelOutOfRange { label: 2, max: 1 })));
        assert!(theta(&[0], 1).is_err());
    }

    #[test]
    fn omega_word_examples() {
        let g = c3();
        let w = Weighting::canonical(&g);
        let (v2, v3) = (g.vertex("v2").unwrap(), g.vertex("v3").unwrap());
        assert_eq!(
            w.omega_word(&g, &word(&g, "e2,e3,e1")),
            Weight::Path { source: v2, target: v2, labels: vec![1, 1, 1] }
        );
        assert_eq!(
            w.omega_word(&g, &word(&g, "~e1,~e3")),
            Weight::Path { source: v2, target: v3, labels: vec![-1, -1] }
        );
        assert_eq!(w.omega_word(&g, &word(&g, "e2,e1")), Weight::Empty);
        assert_eq!(w.omega_word(&g, &[]), Weight::Empty);
    }

    #[test]
    fn omega_plus_examples() {
        let (v1, v2) = (VertexId(0), VertexId(1));
        let w = Weight::Path { source: v2, target: v2, labels: vec![1, 1, 1] };
        assert_eq!(
            omega_plus(&w, 1).unwrap(),
            SummedWeight::Summed { source: v2, target: v2, sum: LabelVector(vec![3]) }
        );
        let w = Weight::Path { source: v1, target: v1, labels: vec![1, -1] };
        assert_eq!(
            omega_plus(&w, 1).unwrap(),
            SummedWeight::Summed { source: v1, target: v1, sum: LabelVector(vec![0]) }
        );
        assert_eq!(
            omega_plus(&Weight::vertex(v1), 2).unwrap(),
            SummedWeight::Summed { source: v1, target: v1, sum: LabelVector::zero(2) }
        );
        assert_eq!(omega_plus(&Weight::Empty, 1).unwrap(), SummedWeight::Empty);
    }

    #[test]
    fn weights_concatenate() {
        let g = c3();
        let w = Weighting::canonical(&g);
        let a = w.omega_word(&g, &word(&g, "e1"));
        let b = w.omega_word(&g, &word(&g, "e2,e3"));
        assert_eq!(a.concat(&b), w.omega_word(&g, &word(&g, "e1,e2,e3")));
        assert_eq!(a.concat(&a), Weight::Empty);
        assert_eq!(b.concat(&a), w.omega_word(&g, &word(&g, "e2,e3,e1")));
    }

    #[test]
    fn json_round_trip() {
        let g = DirectedGraph::from_json(include_str!("../data/c3.json")).unwrap();
        let again = DirectedGraph::from_spec(&g.to_spec()).unwrap();
        assert_eq!(g.edges(), again.edges());
        assert!(DirectedGraph::from_json("{\"vertices\":[\"a\"]}").is_err());
    }
}
