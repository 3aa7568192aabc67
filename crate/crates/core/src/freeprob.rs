//! Noncrossing partitions, their Möbius function, and the scalar
//! moment-cumulant transforms.

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Largest `n` for which `NC(n)` is enumerated (Catalan(12) = 208012).
pub const MAX_NC: usize = 12;

/// Partition of `{1, …, n}` with no two crossing blocks.
///
/// Blocks are sorted internally and ordered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

fn crosses(a: &[usize], b: &[usize]) -> bool {
    // a1 < b1 < a2 < b2 for some a1, a2 in a and b1, b2 in b.
    let interleaves = |x: &[usize], y: &[usize]| {
        y.iter().any(|&y1| {
            x.iter().any(|&x1| x1 < y1) && x.iter().any(|&x2| x2 > y1) && {
                y.iter().any(|&y2| x.iter().any(|&x2| y1 < x2 && x2 < y2))
            }
        })
    };
    interleaves(a, b) || interleaves(b, a)
}

impl NoncrossingPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        for b in &mut blocks {
            b.sort_unstable();
            for &i in b.iter() {
                if i == 0 || i > n {
                    return Err(Error::InvalidPartition(format!("element {i} outside 1..={n}")));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("element {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = (1..=n).find(|&i| !seen[i]) {
            return Err(Error::InvalidPartition(format!("element {i} not covered")));
        }
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                if crosses(a, b) {
                    return Err(Error::InvalidPartition(format!("blocks {a:?} and {b:?} cross")));
                }
            }
        }
        blocks.sort_unstable();
        Ok(NoncrossingPartition { n, blocks })
    }

    /// All singletons.
    pub fn zero(n: usize) -> Self {
        NoncrossingPartition { n, blocks: (1..=n).map(|i| vec![i]).collect() }
    }

    /// A single block.
    pub fn one(n: usize) -> Self {
        NoncrossingPartition { n, blocks: if n == 0 { vec![] } else { vec![(1..=n).collect()] } }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &NoncrossingPartition) -> bool {
        self.n == other.n
            && self.blocks.iter().all(|b| other.blocks.iter().any(|c| b.iter().all(|i| c.contains(i))))
    }

    /// Kreweras complement, read off the permutation `π⁻¹ γ` with
    /// `γ = (1 2 … n)` and each block of `π` as an increasing cycle.
    pub fn kreweras(&self) -> NoncrossingPartition {
        let n = self.n;
        let mut inv = vec![0usize; n + 1];
        for b in &self.blocks {
            for (j, &x) in b.iter().enumerate() {
                inv[b[(j + 1) % b.len()]] = x;
            }
        }
        let mut seen = vec![false; n + 1];
        let mut blocks = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = inv[i % n + 1];
            }
            cycle.sort_unstable();
            blocks.push(cycle);
        }
        blocks.sort_unstable();
        NoncrossingPartition { n, blocks }
    }
}

/// `C_n = binom(2n, n) / (n + 1)`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..n as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Every noncrossing partition of `{1, …, n}`, built by placing `1, 2, …`
/// in turn into a new block or into any block it can join without a
/// crossing.
pub fn nc_partitions(n: usize) -> Result<Vec<NoncrossingPartition>> {
    if n == 0 || n > MAX_NC {
        return Err(Error::InvalidArgument(format!("NC(n) is enumerated for 1 <= n <= {MAX_NC}")));
    }
    fn grow(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<NoncrossingPartition>) {
        if i > n {
            let mut b = blocks.clone();
            b.sort_unstable();
            out.push(NoncrossingPartition { n, blocks: b });
            return;
        }
        for j in 0..blocks.len() {
            // `i` joins block j; it would cross any block with an element
            // on either side of some element of block j.
            let blocked = blocks.iter().enumerate().any(|(k, c)| {
                k != j && blocks[j].iter().any(|&b| c[0] < b && b < *c.last().expect("nonempty"))
            });
            if !blocked {
                blocks[j].push(i);
                grow(i + 1, n, blocks, out);
                blocks[j].pop();
            }
        }
        blocks.push(vec![i]);
        grow(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    grow(1, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// `μ(π, 1_n)`: product over blocks `V` of the Kreweras complement of
/// `(-1)^{|V|-1} C_{|V|-1}`.
pub fn moebius_to_top(pi: &NoncrossingPartition) -> i64 {
    pi.kreweras()
        .blocks()
        .iter()
        .map(|b| {
            let sign = if b.len() % 2 == 1 { 1 } else { -1 };
            sign * catalan(b.len() - 1) as i64
        })
        .product()
}

/// Scalar partition moment: the product of `m_{|V|}` over blocks `V`.
/// `moments[k - 1]` holds `m_k`.
pub fn partition_moment<F: Field>(moments: &[F], pi: &NoncrossingPartition) -> Result<F> {
    pi.blocks().iter().try_fold(F::one(), |acc, b| {
        moments.get(b.len() - 1).map(|m| acc * m.clone()).ok_or(Error::MissingMoment(b.len()))
    })
}

fn from_i64<F: Field>(x: i64) -> F {
    F::from_i64(x).expect("field holds small integers")
}

/// Free cumulants `k_j = Σ_{π ∈ NC(j)} m_π μ(π, 1_j)` for `j = 1..=len`.
pub fn cumulants_from_moments<F: Field>(moments: &[F]) -> Result<Vec<F>> {
    if moments.len() > MAX_NC {
        return Err(Error::InvalidArgument(format!("at most {MAX_NC} moments")));
    }
    (1..=moments.len())
        .map(|j| {
            nc_partitions(j)?.iter().try_fold(F::zero(), |acc, pi| {
                Ok(acc + partition_moment(&moments[..j], pi)? * from_i64::<F>(moebius_to_top(pi)))
            })
        })
        .collect()
}

/// Inverse transform `m_j = Σ_{π ∈ NC(j)} Π_V k_{|V|}`.
pub fn moments_from_cumulants<F: Field>(cumulants: &[F]) -> Result<Vec<F>> {
    if cumulants.len() > MAX_NC {
        return Err(Error::InvalidArgument(format!("at most {MAX_NC} cumulants")));
    }
    (1..=cumulants.len())
        .map(|j| {
            nc_partitions(j)?
                .iter()
                .try_fold(F::zero(), |acc, pi| Ok(acc + partition_moment(&cumulants[..j], pi)?))
        })
        .collect()
}
