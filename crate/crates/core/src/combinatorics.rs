//! Counting side of the moment computation: closed reduced walks, zero-sum
//! label tuples, lattice paths on the axis, and multinomial coefficients
//! built up from Pascal's triangle.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{theta, DirectedGraph, SignedEdge, VertexId};
use crate::scalar::Count;

/// Largest label count accepted by the dynamic program.
pub const MAX_DP_LABELS: usize = 6;

/// Default cap on exhaustive enumerations.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

fn check_budget(base: usize, len: usize, budget: u128) -> Result<()> {
    let mut required: u128 = 1;
    for _ in 0..len {
        required = required.saturating_mul(base as u128);
    }
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

fn count_from<T: Count>(x: u64) -> T {
    T::from_u64(x).expect("count type holds u64")
}

fn closed_walks(g: &DirectedGraph, at: VertexId, stack: &mut Vec<SignedEdge>, remaining: usize, count: &mut u64) {
    if remaining == 0 {
        if stack.is_empty() {
            *count += 1;
        }
        return;
    }
    // Each remaining step cancels at most one edge.
    if stack.len() > remaining {
        return;
    }
    for &e in g.shadow_out(at) {
        let next = g.target(e);
        if stack.last().is_some_and(|&top| top.is_inverse_of(e)) {
            let top = stack.pop().expect("checked");
            closed_walks(g, next, stack, remaining - 1, count);
            stack.push(top);
        } else {
            stack.push(e);
            closed_walks(g, next, stack, remaining - 1, count);
            stack.pop();
        }
    }
}

/// `|F_{v,n}|`: length-`n` paths of the shadowed graph from `v` whose
/// reduction is the vertex `v`, counted by depth-first search with the
/// reduction carried along.
pub fn enumerate_f<T: Count>(g: &DirectedGraph, v: VertexId, n: usize, budget: u128) -> Result<T> {
    if v.0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", v.0)));
    }
    let branching = g.vertices().map(|u| g.shadow_out(u).len()).max().unwrap_or(0);
    check_budget(branching, n, budget)?;
    let mut count = 0;
    closed_walks(g, v, &mut Vec::with_capacity(n), n, &mut count);
    Ok(count_from(count))
}

fn check_labels(labels: usize) -> Result<()> {
    if labels == 0 {
        return Err(Error::InvalidArgument("need at least one label".into()));
    }
    Ok(())
}

/// `|Σ_n^(N)|`: length-`n` sequences over `±1..±N` whose label vector is
/// zero, by dynamic programming over partial sums.
pub fn count_zero_sum<T: Count>(labels: usize, n: usize) -> Result<T> {
    check_labels(labels)?;
    if labels > MAX_DP_LABELS {
        return Err(Error::InvalidArgument(format!(
            "zero-sum dynamic program supports at most {MAX_DP_LABELS} labels"
        )));
    }
    let mut states: HashMap<Vec<i32>, T> = HashMap::from([(vec![0; labels], T::one())]);
    for step in 0..n {
        let remaining = (n - step - 1) as i32;
        let mut next: HashMap<Vec<i32>, T> = HashMap::with_capacity(states.len() * 2);
        for (sum, count) in &states {
            for k in 0..labels {
                for delta in [1, -1] {
                    let mut s = sum.clone();
                    s[k] += delta;
                    // Only partial sums that can still return to zero.
                    if s.iter().map(|c| c.abs()).sum::<i32>() > remaining {
                        continue;
                    }
                    let slot = next.entry(s).or_insert_with(T::zero);
                    *slot = slot.clone() + count.clone();
                }
            }
        }
        states = next;
    }
    Ok(states.remove(&vec![0; labels]).unwrap_or_else(T::zero))
}

/// Calls `f` on every sequence in `{±1..±N}^n`, in lexicographic order of
/// `(+1, .., +N, -1, .., -N)`.
fn for_each_tuple<F: FnMut(&[i32])>(labels: usize, n: usize, mut f: F) {
    let alphabet: Vec<i32> = (1..=labels as i32).chain((1..=labels as i32).map(|k| -k)).collect();
    let mut digits = vec![0usize; n];
    let mut tuple: Vec<i32> = vec![alphabet[0]; n];
    loop {
        f(&tuple);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < alphabet.len() {
                tuple[i] = alphabet[digits[i]];
                break;
            }
            digits[i] = 0;
            tuple[i] = alphabet[0];
        }
    }
}

/// Exhaustive count of zero-sum tuples; the independent check on
/// [`count_zero_sum`].
pub fn brute_zero_sum<T: Count>(labels: usize, n: usize, budget: u128) -> Result<T> {
    check_labels(labels)?;
    check_budget(2 * labels, n, budget)?;
    let mut count = 0u64;
    for_each_tuple(labels, n, |t| {
        if theta(t, labels).expect("labels in range").is_zero() {
            count += 1;
        }
    });
    Ok(count_from(count))
}

/// Lattice path built from the steps `l_{±k}`, kept as its index sequence.
///
/// Step `l_{±k}` moves one unit right and `±c^k` up for a transcendental
/// `c`, so the path ends on the horizontal axis exactly when every index is
/// balanced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePath {
    pub steps: Vec<i32>,
}

impl LatticePath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn labels(&self) -> usize {
        self.steps.iter().map(|s| s.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Per-index vertical displacement after each step.
    pub fn running_sums(&self, labels: usize) -> Vec<Vec<i64>> {
        let mut acc = vec![0i64; labels];
        self.steps
            .iter()
            .map(|&s| {
                acc[s.unsigned_abs() as usize - 1] += i64::from(s.signum());
                acc.clone()
            })
            .collect()
    }

    pub fn satisfies_axis_property(&self) -> bool {
        theta(&self.steps, self.labels()).map(|v| v.is_zero()).unwrap_or(false)
    }
}

/// The map from label tuples to lattice paths: `+x_k ↦ l_k`, `-x_k ↦ l_{-k}`.
pub fn theta_map(tuple: &[i32]) -> LatticePath {
    LatticePath { steps: tuple.to_vec() }
}

/// All length-`n` lattice paths over `l_{±1}..l_{±N}`, optionally only
/// those with the axis property.
pub fn lattice_paths(labels: usize, n: usize, axis_only: bool, budget: u128) -> Result<Vec<LatticePath>> {
    check_labels(labels)?;
    check_budget(2 * labels, n, budget)?;
    let mut out = Vec::new();
    for_each_tuple(labels, n, |t| {
        let path = LatticePath { steps: t.to_vec() };
        if !axis_only || path.satisfies_axis_property() {
            out.push(path);
        }
    });
    Ok(out)
}

/// Applies the tuple-to-path map to every zero-sum tuple and checks that it
/// is injective, lands on axis paths, and hits all of them.
pub fn theta_bijection_check(labels: usize, n: usize, budget: u128) -> Result<bool> {
    check_labels(labels)?;
    check_budget(2 * labels, n, budget)?;
    let mut zero_sum: Vec<Vec<i32>> = Vec::new();
    for_each_tuple(labels, n, |t| {
        if theta(t, labels).expect("labels in range").is_zero() {
            zero_sum.push(t.to_vec());
        }
    });
    let mut images = HashSet::with_capacity(zero_sum.len());
    for t in &zero_sum {
        let path = theta_map(t);
        if !path.satisfies_axis_property() || !images.insert(path) {
            return Ok(false);
        }
    }
    let axis = lattice_paths(labels, n, true, budget)?;
    Ok(axis.len() == images.len() && axis.iter().all(|p| images.contains(p)))
}

/// Entry `k` of row `m` of Pascal's triangle, built additively.
pub fn pascal_entry<T: Count>(m: usize, k: usize) -> T {
    if k > m {
        return T::zero();
    }
    let mut row: Vec<T> = vec![T::one()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(T::one());
        for w in row.windows(2) {
            next.push(w[0].clone() + w[1].clone());
        }
        next.push(T::one());
        row = next;
    }
    row.swap_remove(k)
}

/// Coefficient of `a_{i_1} ⋯ a_{i_m}` in `(a_1 + ⋯ + a_n)^m`.
///
/// Strips the run of the largest index (length `k`), multiplies by the
/// Pascal entry `C(m, k)`, and recurses on what is left with one variable
/// fewer.
pub fn pascal_coeff<T: Count>(n_vars: usize, multiset: &[usize]) -> Result<T> {
    if let Some(&bad) = multiset.iter().find(|&&i| i == 0 || i > n_vars) {
        return Err(Error::InvalidMultiset(format!("index {bad} outside 1..={n_vars}")));
    }
    let mut sorted = multiset.to_vec();
    sorted.sort_unstable();
    Ok(pascal_sorted(&sorted))
}

fn pascal_sorted<T: Count>(sorted: &[usize]) -> T {
    let Some(&top) = sorted.last() else {
        return T::one();
    };
    let m = sorted.len();
    let k = sorted.iter().rev().take_while(|&&i| i == top).count();
    pascal_entry::<T>(m, k) * pascal_sorted(&sorted[..m - k])
}

/// Calls `f` with every multiplicity vector of length `vars` summing to `n`.
fn for_each_multiset<F: FnMut(&[usize])>(vars: usize, n: usize, f: &mut F) {
    fn go<F: FnMut(&[usize])>(mult: &mut Vec<usize>, vars: usize, left: usize, f: &mut F) {
        if mult.len() + 1 == vars {
            mult.push(left);
            f(mult);
            mult.pop();
            return;
        }
        for take in 0..=left {
            mult.push(take);
            go(mult, vars, left - take, f);
            mult.pop();
        }
    }
    go(&mut Vec::with_capacity(vars), vars, n, f);
}

/// Sum of the coefficients of `(Σ_{k=±1..±N} a_k)^n` over index multisets
/// with zero label vector. Variables `1..=N` stand for `+1..+N` and
/// `N+1..=2N` for `-1..-N`.
pub fn coeff_sum_zero<T: Count>(labels: usize, n: usize) -> Result<T> {
    check_labels(labels)?;
    if n % 2 == 1 {
        return Ok(T::zero());
    }
    let vars = 2 * labels;
    let mut total = T::zero();
    for_each_multiset(vars, n, &mut |mult: &[usize]| {
        let signed: Vec<i32> = mult
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| {
                let label = if j < labels { j as i32 + 1 } else { -((j - labels) as i32 + 1) };
                std::iter::repeat_n(label, c)
            })
            .collect();
        if theta(&signed, labels).expect("labels in range").is_zero() {
            let indices: Vec<usize> =
                mult.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j + 1, c)).collect();
            total = total.clone() + pascal_coeff::<T>(vars, &indices).expect("indices in range");
        }
    });
    Ok(total)
}

/// `C(2n, n)` in arbitrary precision, by the multiplicative formula.
pub fn central_binomial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 1..=n {
        acc = acc * BigUint::from(n + i) / BigUint::from(i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn factorial(n: usize) -> u128 {
        (1..=n as u128).product()
    }

    fn multinomial(multiset: &[usize]) -> u128 {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for &i in multiset {
            *counts.entry(i).or_default() += 1;
        }
        counts.values().fold(factorial(multiset.len()), |acc, &c| acc / factorial(c))
    }

    #[test]
    fn enumerate_f_examples() {
        let g = c3();
        assert_eq!(enumerate_f::<u64>(&g, VertexId(0), 2, DEFAULT_BUDGET).unwrap(), 2);
        assert_eq!(enumerate_f::<u64>(&single_edge(), VertexId(0), 2, DEFAULT_BUDGET).unwrap(), 1);
        assert_eq!(enumerate_f::<u64>(&bouquet(2), VertexId(0), 4, DEFAULT_BUDGET).unwrap(), 28);
        assert!(enumerate_f::<u64>(&g, VertexId(9), 2, DEFAULT_BUDGET).is_err());
        assert!(matches!(
            enumerate_f::<u64>(&g, VertexId(0), 30, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bouquet2_length4_by_reduce() {
        // Independent route: reduce every one of the 4^4 words.
        let g = bouquet(2);
        let edges: Vec<SignedEdge> = g.signed_edges().collect();
        let mut count = 0;
        for a in &edges {
            for b in &edges {
                for c in &edges {
                    for d in &edges {
                        let w = [*a, *b, *c, *d];
                        if crate::groupoid::reduce(&g, &w) == crate::groupoid::GroupoidElement::Vertex(VertexId(0)) {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, 28);
    }

    #[test]
    fn zero_sum_examples() {
        assert_eq!(count_zero_sum::<u64>(1, 4).unwrap(), 6);
        assert_eq!(count_zero_sum::<u64>(1, 5).unwrap(), 0);
        assert_eq!(count_zero_sum::<u64>(2, 4).unwrap(), 36);
        assert!(count_zero_sum::<u64>(0, 4).is_err());
        assert!(count_zero_sum::<u64>(7, 4).is_err());
    }

    #[test]
    fn brute_zero_sum_examples() {
        assert_eq!(brute_zero_sum::<u64>(1, 2, DEFAULT_BUDGET).unwrap(), 2);
        assert_eq!(brute_zero_sum::<u64>(1, 6, DEFAULT_BUDGET).unwrap(), 20);
        assert_eq!(brute_zero_sum::<u64>(2, 2, DEFAULT_BUDGET).unwrap(), 4);
        assert_eq!(brute_zero_sum::<u64>(2, 4, DEFAULT_BUDGET).unwrap(), 36);
        assert!(brute_zero_sum::<u64>(3, 20, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn dp_matches_brute_force() {
        for labels in 1..=3 {
            for n in 1..=6 {
                assert_eq!(
                    count_zero_sum::<u64>(labels, n).unwrap(),
                    brute_zero_sum::<u64>(labels, n, DEFAULT_BUDGET).unwrap(),
                    "N={labels} n={n}"
                );
            }
        }
    }

    #[test]
    fn lattice_path_examples() {
        assert_eq!(lattice_paths(1, 2, true, DEFAULT_BUDGET).unwrap().len(), 2);
        assert_eq!(lattice_paths(1, 3, true, DEFAULT_BUDGET).unwrap().len(), 0);
        assert_eq!(lattice_paths(1, 6, true, DEFAULT_BUDGET).unwrap().len(), 20);
        assert_eq!(lattice_paths(2, 3, false, DEFAULT_BUDGET).unwrap().len(), 64);
        let p = LatticePath { steps: vec![1, 2, -1, -2] };
        assert!(p.satisfies_axis_property());
        assert_eq!(p.running_sums(2).last().unwrap(), &vec![0, 0]);
        // Integer sum is zero but the path leaves the axis.
        assert!(!LatticePath { steps: vec![1, 1, -2] }.satisfies_axis_property());
    }

    #[test]
    fn bijection_examples() {
        assert!(theta_bijection_check(1, 4, DEFAULT_BUDGET).unwrap());
        assert!(theta_bijection_check(2, 4, DEFAULT_BUDGET).unwrap());
        assert!(theta_bijection_check(1, 3, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn pascal_examples() {
        assert_eq!(pascal_coeff::<u64>(4, &[1, 1, 1, 1, 3, 3, 4]).unwrap(), 105);
        assert_eq!(pascal_coeff::<u64>(5, &[2, 2, 3, 4]).unwrap(), 12);
        assert_eq!(pascal_coeff::<u64>(4, &[1, 2, 3, 4]).unwrap(), 24);
        assert_eq!(pascal_coeff::<u64>(3, &[]).unwrap(), 1);
        assert_eq!(pascal_coeff::<u64>(4, &[4, 1, 3, 1]).unwrap(), 12);
        assert!(pascal_coeff::<u64>(3, &[4]).is_err());
        assert!(pascal_coeff::<u64>(3, &[0]).is_err());
    }

    #[test]
    fn pascal_entries() {
        let row: Vec<u64> = (0..=5).map(|k| pascal_entry(5, k)).collect();
        assert_eq!(row, [1, 5, 10, 10, 5, 1]);
        assert_eq!(pascal_entry::<u64>(3, 4), 0);
    }

    #[test]
    fn pascal_matches_multinomial_small() {
        for_each_multiset(3, 5, &mut |mult: &[usize]| {
            let idx: Vec<usize> = mult.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j + 1, c)).collect();
            assert_eq!(u128::from(pascal_coeff::<u64>(3, &idx).unwrap()), multinomial(&idx));
        });
    }

    #[test]
    fn coefficient_sum_examples() {
        assert_eq!(coeff_sum_zero::<u64>(1, 4).unwrap(), 6);
        assert_eq!(coeff_sum_zero::<u64>(1, 2).unwrap(), 2);
        assert_eq!(coeff_sum_zero::<u64>(2, 2).unwrap(), 4);
        assert_eq!(coeff_sum_zero::<u64>(2, 3).unwrap(), 0);
        assert_eq!(coeff_sum_zero::<u64>(2, 4).unwrap(), 36);
    }

    #[test]
    fn central_binomial_examples() {
        assert_eq!(central_binomial(4), BigUint::from(70u32));
        assert_eq!(central_binomial(10), BigUint::from(184756u32));
        assert_eq!(central_binomial(0), BigUint::from(1u32));
    }

    #[test]
    fn generic_over_count_type() {
        assert_eq!(count_zero_sum::<BigUint>(1, 20).unwrap(), central_binomial(10));
        assert_eq!(count_zero_sum::<f64>(1, 8).unwrap(), 70.0);
        assert_eq!(coeff_sum_zero::<u128>(1, 8).unwrap(), 70);
    }
}
