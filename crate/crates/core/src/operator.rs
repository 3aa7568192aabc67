//! Operators on the graph Hilbert space, truncated to reduced words of
//! bounded length: right multiplications `R_w`, the labeling operators
//! `T_k` and `T_G = Σ_k T_k`, and the vertex-diagonal conditional
//! expectation.
//!
//! A truncated space is not invariant under `R_w`; words pushed past the
//! length bound are dropped. Identities between operators therefore only
//! hold on *interior* columns, and the checks here say which ones.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, SignedEdge, VertexId, Weighting};
use crate::groupoid::{compose, GroupoidElement};
use crate::scalar::{self, Scalar};
use crate::Integer;

/// Vertices followed by all reduced words of length `1..=max_len`, ordered
/// by length and then by the signed-edge order.
#[derive(Clone, Debug)]
pub struct Basis {
    elements: Vec<GroupoidElement>,
    index: HashMap<GroupoidElement, usize>,
    max_len: usize,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn elements(&self) -> &[GroupoidElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupoidElement {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &GroupoidElement) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn vertex_index(&self, v: VertexId) -> usize {
        self.index[&GroupoidElement::Vertex(v)]
    }
}

/// Enumerates every reduced word of length at most `max_len` by
/// non-backtracking extension.
pub fn basis_up_to(g: &DirectedGraph, max_len: usize) -> Basis {
    let mut elements: Vec<GroupoidElement> = g.vertices().map(GroupoidElement::Vertex).collect();
    let mut level: Vec<Vec<SignedEdge>> = Vec::new();
    for len in 1..=max_len {
        let mut next: Vec<Vec<SignedEdge>> = if len == 1 {
            g.signed_edges().map(|e| vec![e]).collect()
        } else {
            let mut out = Vec::new();
            for p in &level {
                let last = *p.last().expect("nonempty");
                for &e in g.shadow_out(g.target(last)) {
                    if !e.is_inverse_of(last) {
                        let mut q = p.clone();
                        q.push(e);
                        out.push(q);
                    }
                }
            }
            out
        };
        next.sort_unstable();
        elements.extend(next.iter().cloned().map(GroupoidElement::ReducedPath));
        level = next;
    }
    let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    Basis { elements, index, max_len }
}

/// Square sparse matrix stored by columns; each column holds `(row, value)`
/// pairs sorted by row with no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T> {
    dim: usize,
    columns: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SparseOperator<T> {
    pub fn zero(dim: usize) -> Self {
        SparseOperator { dim, columns: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        SparseOperator { dim, columns: (0..dim).map(|i| vec![(i, T::one())]).collect() }
    }

    fn from_maps(dim: usize, maps: Vec<BTreeMap<usize, T>>) -> Self {
        let columns = maps
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseOperator { dim, columns }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, col: usize) -> &[(usize, T)] {
        &self.columns[col]
    }

    pub fn entry(&self, row: usize, col: usize) -> T {
        let column = &self.columns[col];
        match column.binary_search_by_key(&row, |(r, _)| *r) {
            Ok(i) => column[i].1.clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `self + other`, or `None` on overflow.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut maps = Vec::with_capacity(self.dim);
        for (a, b) in self.columns.iter().zip(&other.columns) {
            let mut m: BTreeMap<usize, T> = a.iter().cloned().collect();
            for (r, v) in b {
                let slot = m.entry(*r).or_insert_with(T::zero);
                *slot = scalar::add(slot, v)?;
            }
            maps.push(m);
        }
        Some(Self::from_maps(self.dim, maps))
    }

    /// Matrix product `self · other` (apply `other` first), or `None` on
    /// overflow.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut maps = Vec::with_capacity(self.dim);
        for col in &other.columns {
            let mut m: BTreeMap<usize, T> = BTreeMap::new();
            for (k, b) in col {
                for (r, a) in &self.columns[*k] {
                    let slot = m.entry(*r).or_insert_with(T::zero);
                    *slot = scalar::add(slot, &scalar::mul(a, b)?)?;
                }
            }
            maps.push(m);
        }
        Some(Self::from_maps(self.dim, maps))
    }

    /// Matrix-vector product, or `None` on overflow.
    pub fn checked_apply(&self, x: &[T]) -> Option<Vec<T>> {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        let mut y = vec![T::zero(); self.dim];
        for (c, xc) in x.iter().enumerate() {
            if xc.is_zero() {
                continue;
            }
            for (r, a) in &self.columns[c] {
                y[*r] = scalar::add(&y[*r], &scalar::mul(a, xc)?)?;
            }
        }
        Some(y)
    }

    pub fn transpose(&self) -> Self {
        let mut columns = vec![Vec::new(); self.dim];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                columns[*r].push((c, v.clone()));
            }
        }
        SparseOperator { dim: self.dim, columns }
    }

    /// Whether the two operators have equal columns at every index for
    /// which `interior` holds.
    pub fn agrees_on<F: Fn(usize) -> bool>(&self, other: &Self, interior: F) -> bool {
        self.dim == other.dim && (0..self.dim).filter(|&c| interior(c)).all(|c| self.columns[c] == other.columns[c])
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> SparseOperator<U> {
        SparseOperator {
            dim: self.dim,
            columns: self.columns.iter().map(|col| col.iter().map(|(r, v)| (*r, f(v))).collect()).collect(),
        }
    }
}

/// Operator with the given 0/1 columns: column `u` has a one at `target(u)`.
fn from_targets<T: Scalar, F>(basis: &Basis, edges: &[GroupoidElement], g: &DirectedGraph, filter: F) -> SparseOperator<T>
where
    F: Fn(usize) -> bool,
{
    let mut maps = vec![BTreeMap::new(); basis.len()];
    for (c, u) in basis.elements().iter().enumerate() {
        if !filter(c) {
            continue;
        }
        for w in edges {
            let prod = compose(g, u, w);
            if prod.is_empty() {
                continue;
            }
            if let Some(r) = basis.index_of(&prod) {
                let slot = maps[c].entry(r).or_insert_with(T::zero);
                *slot = slot.clone() + T::one();
            }
        }
    }
    SparseOperator::from_maps(basis.len(), maps)
}

/// `R_w ξ_u = ξ_{uw}` when `uw` is nonempty and still inside the basis;
/// zero column otherwise.
pub fn right_mult<T: Scalar>(g: &DirectedGraph, basis: &Basis, w: &GroupoidElement) -> Result<SparseOperator<T>> {
    if w.is_empty() {
        return Err(Error::EmptyElement);
    }
    Ok(from_targets(basis, std::slice::from_ref(w), g, |_| true))
}

/// `T_k = Σ R_e` over signed edges carrying label `k`.
pub fn labeling_operator_k<T: Scalar>(
    g: &DirectedGraph,
    weighting: &Weighting,
    basis: &Basis,
    k: i32,
) -> Result<SparseOperator<T>> {
    let n = weighting.max_label();
    if k == 0 || k.unsigned_abs() as usize > n {
        return Err(Error::LabelOutOfRange { label: k, max: n });
    }
    let edges: Vec<GroupoidElement> = g
        .signed_edges()
        .filter(|&e| weighting.label(e) == k)
        .map(|e| GroupoidElement::ReducedPath(vec![e]))
        .collect();
    Ok(from_targets(basis, &edges, g, |_| true))
}

/// `T_G = Σ_{e ∈ E(G^)} R_e`.
pub fn labeling_operator<T: Scalar>(g: &DirectedGraph, basis: &Basis) -> SparseOperator<T> {
    let edges: Vec<GroupoidElement> = g.signed_edges().map(|e| GroupoidElement::ReducedPath(vec![e])).collect();
    from_targets(basis, &edges, g, |_| true)
}

/// `⟨a ξ_u, ξ_w⟩ = ⟨ξ_u, b ξ_w⟩` for all basis words `u`, `w` of length at
/// most `interior`.
pub fn interior_adjoint<T: Scalar>(
    a: &SparseOperator<T>,
    b: &SparseOperator<T>,
    basis: &Basis,
    interior: usize,
) -> bool {
    let inside = |i: usize| basis.element(i).len() <= interior;
    let one_way = |x: &SparseOperator<T>, y: &SparseOperator<T>| {
        (0..x.dim()).filter(|&c| inside(c)).all(|c| {
            x.column(c).iter().filter(|(r, _)| inside(*r)).all(|(r, v)| y.entry(c, *r) == *v)
        })
    };
    one_way(a, b) && one_way(b, a)
}

/// Checks `T_k* = T_{-k}` and `T_G* = T_G` on words of length at most
/// `basis.max_len() - 1`.
pub fn adjoint_check(g: &DirectedGraph, weighting: &Weighting, basis: &Basis, k: i32) -> Result<bool> {
    if basis.max_len() < 2 {
        return Err(Error::InvalidArgument("adjoint check needs a basis of length at least 2".into()));
    }
    let interior = basis.max_len() - 1;
    let tk: SparseOperator<i64> = labeling_operator_k(g, weighting, basis, k)?;
    let tmk: SparseOperator<i64> = labeling_operator_k(g, weighting, basis, -k)?;
    let tg: SparseOperator<i64> = labeling_operator(g, basis);
    Ok(interior_adjoint(&tk, &tmk, basis, interior) && interior_adjoint(&tg, &tg, basis, interior))
}

/// Element of the diagonal subalgebra: one coefficient per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalElement<T> {
    pub values: Vec<T>,
}

impl<T: PartialEq> DiagonalElement<T> {
    pub fn get(&self, v: VertexId) -> &T {
        &self.values[v.0]
    }

    /// The common value when the element is a scalar multiple of the unit.
    pub fn uniform(&self) -> Option<&T> {
        let first = self.values.first()?;
        self.values.iter().all(|x| x == first).then_some(first)
    }
}

/// `E(op)`: vertex `v` maps to `⟨op ξ_v, ξ_v⟩`.
pub fn conditional_expectation<T: Scalar>(g: &DirectedGraph, basis: &Basis, op: &SparseOperator<T>) -> DiagonalElement<T> {
    DiagonalElement {
        values: g.vertices().map(|v| {
            let i = basis.vertex_index(v);
            op.entry(i, i)
        }).collect(),
    }
}

fn moment_in<T: Scalar>(g: &DirectedGraph, basis: &Basis, tg: &SparseOperator<T>, n: usize) -> Option<Vec<T>> {
    let mut out = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let i = basis.vertex_index(v);
        let mut x = vec![T::zero(); basis.len()];
        x[i] = T::one();
        for _ in 0..n {
            x = tg.checked_apply(&x)?;
        }
        out.push(x[i].clone());
    }
    Some(out)
}

/// `E(T_G^n)` computed as `⟨T_G^n ξ_v, ξ_v⟩` per vertex.
///
/// The basis is sized to `n`, so `n` applications starting from a vertex
/// never leave it and the result is exact. Arithmetic runs in `i64` and is
/// redone in arbitrary precision if any intermediate overflows.
pub fn moment_operator(g: &DirectedGraph, n: usize) -> Result<DiagonalElement<Integer>> {
    g.require_connected()?;
    if n < 1 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    let basis = basis_up_to(g, n);
    let tg: SparseOperator<i64> = labeling_operator(g, &basis);
    let values = match moment_in(g, &basis, &tg, n) {
        Some(v) => v.into_iter().map(BigInt::from).collect(),
        None => {
            let big = tg.map(|&x| BigInt::from(x));
            moment_in(g, &basis, &big, n).expect("arbitrary precision cannot overflow")
        }
    };
    Ok(DiagonalElement { values })
}

/// As [`moment_operator`] but entirely in the scalar type `T`; `None` if
/// `T` overflows.
pub fn moment_operator_in<T: Scalar>(g: &DirectedGraph, n: usize) -> Result<Option<DiagonalElement<T>>> {
    g.require_connected()?;
    if n < 1 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    let basis = basis_up_to(g, n);
    let tg: SparseOperator<T> = labeling_operator(g, &basis);
    Ok(moment_in(g, &basis, &tg, n).map(|values| DiagonalElement { values }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::groupoid::{inverse, parse_word, reduce};

    fn el(g: &DirectedGraph, s: &str) -> GroupoidElement {
        reduce(g, &parse_word(g, s).unwrap())
    }

    #[test]
    fn basis_counts() {
        assert_eq!(basis_up_to(&c3(), 1).len(), 9);
        assert_eq!(basis_up_to(&c3(), 2).len(), 15);
        assert_eq!(basis_up_to(&bouquet(1), 3).len(), 7);
        assert_eq!(basis_up_to(&bouquet(2), 2).len(), 1 + 4 + 12);
        assert_eq!(basis_up_to(&c3(), 0).len(), 3);
    }

    #[test]
    fn basis_is_ordered_and_closed_under_inverse() {
        let g = c3();
        let b = basis_up_to(&g, 3);
        for w in b.elements().windows(2) {
            assert!((w[0].len(), w[0].edges()) < (w[1].len(), w[1].edges()) || matches!(w[0], GroupoidElement::Vertex(_)));
        }
        for e in b.elements() {
            assert!(b.index_of(&inverse(e).unwrap()).is_some());
        }
    }

    #[test]
    fn right_mult_examples() {
        let g = c3();
        let b = basis_up_to(&g, 3);
        let v1 = GroupoidElement::Vertex(VertexId(0));
        let r: SparseOperator<i64> = right_mult(&g, &b, &el(&g, "e1")).unwrap();
        assert_eq!(r.entry(b.index_of(&el(&g, "e1")).unwrap(), b.index_of(&v1).unwrap()), 1);

        let rv: SparseOperator<i64> = right_mult(&g, &b, &v1).unwrap();
        assert_eq!(rv.checked_mul(&rv).unwrap(), rv);
        assert_eq!(rv.transpose(), rv);
        for (c, u) in b.elements().iter().enumerate() {
            let ends_at_v1 = crate::groupoid::range(&g, u).unwrap() == VertexId(0);
            assert_eq!(rv.column(c).len(), usize::from(ends_at_v1));
        }
        assert!(right_mult::<i64>(&g, &b, &GroupoidElement::Empty).is_err());
    }

    #[test]
    fn partial_isometry_on_interior() {
        let g = bouquet(2);
        let b = basis_up_to(&g, 5);
        let w = el(&g, "e1,~e2");
        let rw: SparseOperator<i64> = right_mult(&g, &b, &w).unwrap();
        let rwi: SparseOperator<i64> = right_mult(&g, &b, &inverse(&w).unwrap()).unwrap();
        let prod = rw.checked_mul(&rwi).unwrap().checked_mul(&rw).unwrap();
        assert!(prod.agrees_on(&rw, |c| b.element(c).len() + 3 * w.len() <= b.max_len()));
    }

    #[test]
    fn right_mult_reverses_products() {
        let g = c3();
        let b = basis_up_to(&g, 6);
        let (w1, w2) = (el(&g, "e1,e2"), el(&g, "e3"));
        let r1: SparseOperator<i64> = right_mult(&g, &b, &w1).unwrap();
        let r2: SparseOperator<i64> = right_mult(&g, &b, &w2).unwrap();
        let r21: SparseOperator<i64> = right_mult(&g, &b, &compose(&g, &w2, &w1)).unwrap();
        let lhs = r1.checked_mul(&r2).unwrap();
        assert!(lhs.agrees_on(&r21, |c| b.element(c).len() + 3 <= b.max_len()));
    }

    #[test]
    fn labeling_operator_examples() {
        let g = c3();
        let wt = Weighting::canonical(&g);
        let b = basis_up_to(&g, 3);
        let plus: SparseOperator<i64> = labeling_operator_k(&g, &wt, &b, 1).unwrap();
        let mut sum = SparseOperator::zero(b.len());
        for name in ["e1", "e2", "e3"] {
            sum = sum.checked_add(&right_mult(&g, &b, &el(&g, name)).unwrap()).unwrap();
        }
        assert_eq!(plus, sum);
        assert!(labeling_operator_k::<i64>(&g, &wt, &b, 2).is_err());
        assert!(labeling_operator_k::<i64>(&g, &wt, &b, 0).is_err());

        let tg: SparseOperator<i64> = labeling_operator(&g, &b);
        let v1 = b.vertex_index(VertexId(0));
        let col: Vec<usize> = tg.column(v1).iter().map(|(r, _)| *r).collect();
        let mut expected = vec![b.index_of(&el(&g, "e1")).unwrap(), b.index_of(&el(&g, "~e3")).unwrap()];
        expected.sort_unstable();
        assert_eq!(col, expected);

        let minus: SparseOperator<i64> = labeling_operator_k(&g, &wt, &b, -1).unwrap();
        assert_eq!(plus.checked_add(&minus).unwrap(), tg);
    }

    #[test]
    fn labeling_operator_bouquet_k2() {
        let g = bouquet(2);
        let wt = Weighting::canonical(&g);
        let b = basis_up_to(&g, 3);
        let t2: SparseOperator<i64> = labeling_operator_k(&g, &wt, &b, 2).unwrap();
        assert_eq!(t2, right_mult(&g, &b, &el(&g, "e2")).unwrap());
    }

    #[test]
    fn single_edge_labeling_operator() {
        let g = single_edge();
        let b = basis_up_to(&g, 2);
        let tg: SparseOperator<i64> = labeling_operator(&g, &b);
        let v1 = b.vertex_index(VertexId(0));
        assert_eq!(tg.column(v1), &[(b.index_of(&el(&g, "e")).unwrap(), 1)]);
    }

    #[test]
    fn adjoint_examples() {
        for g in [c3(), bouquet(2)] {
            let wt = Weighting::canonical(&g);
            let b = basis_up_to(&g, 4);
            for k in 1..=wt.max_label() as i32 {
                assert!(adjoint_check(&g, &wt, &b, k).unwrap());
                assert!(adjoint_check(&g, &wt, &b, -k).unwrap());
            }
        }
        let g = c3();
        let wt = Weighting::canonical(&g);
        assert!(adjoint_check(&g, &wt, &basis_up_to(&g, 1), 1).is_err());
    }

    #[test]
    fn adjoint_negative_control() {
        let g = c3();
        let wt = Weighting::canonical(&g);
        let b = basis_up_to(&g, 4);
        let tk: SparseOperator<i64> = labeling_operator_k(&g, &wt, &b, 1).unwrap();
        let mut broken = SparseOperator::zero(b.len());
        for name in ["~e1", "~e2"] {
            broken = broken.checked_add(&right_mult(&g, &b, &el(&g, name)).unwrap()).unwrap();
        }
        assert!(!interior_adjoint(&tk, &broken, &b, 3));
    }

    #[test]
    fn conditional_expectation_examples() {
        let g = c3();
        let b = basis_up_to(&g, 2);
        let rv: SparseOperator<i64> = right_mult(&g, &b, &GroupoidElement::Vertex(VertexId(1))).unwrap();
        assert_eq!(conditional_expectation(&g, &b, &rv).values, [0, 1, 0]);
        let rw: SparseOperator<i64> = right_mult(&g, &b, &el(&g, "e1,e2")).unwrap();
        assert_eq!(conditional_expectation(&g, &b, &rw).values, [0, 0, 0]);
        let id = SparseOperator::<i64>::identity(b.len());
        assert_eq!(conditional_expectation(&g, &b, &id).values, [1, 1, 1]);
    }

    #[test]
    fn moment_examples() {
        let g = c3();
        assert_eq!(moment_operator(&g, 2).unwrap().uniform(), Some(&BigInt::from(2)));
        assert_eq!(moment_operator(&g, 3).unwrap().uniform(), Some(&BigInt::from(0)));
        assert_eq!(moment_operator(&bouquet(2), 4).unwrap().uniform(), Some(&BigInt::from(28)));
        assert!(moment_operator(&g, 0).is_err());
        let g = DirectedGraph::new(["a", "b"], [("x", "a", "a")]).unwrap();
        assert!(matches!(moment_operator(&g, 2), Err(Error::Disconnected)));
    }

    #[test]
    fn narrow_scalars_report_overflow() {
        // C(16, 8) = 12870 does not fit in i8.
        assert!(moment_operator_in::<i8>(&bouquet(1), 16).unwrap().is_none());
        let wide = moment_operator_in::<i64>(&bouquet(1), 16).unwrap().unwrap();
        assert_eq!(wide.values, [12870]);
    }
}
