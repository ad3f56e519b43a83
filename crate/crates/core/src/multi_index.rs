//! Multi-index algebra: J = (J_1, …, J_n), |J| = ΣJ_μ, componentwise order,
//! multinomial coefficients binom(J, I) = Π binom(J_μ, I_μ).

use crate::error::{Error, Result};

/// A derivative multi-index.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index 1_μ.
    pub fn unit(n: usize, mu: usize) -> Self {
        let mut e = vec![0; n];
        e[mu] = 1;
        MultiIndex(e)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total order |J|.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// Componentwise domination I ≤ J (self = J).
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(j, i)| i <= j)
    }

    pub fn plus_unit(&self, mu: usize) -> Self {
        let mut e = self.0.clone();
        e[mu] += 1;
        MultiIndex(e)
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// J − I, requiring I ≤ J.
    pub fn sub(&self, other: &MultiIndex) -> Result<Self> {
        if !self.dominates(other) {
            return Err(Error::IndexNotDominated {
                upper: self.0.clone(),
                lower: other.0.clone(),
            });
        }
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// All I with I ≤ J, in graded-lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = multi_indices(self.0.len(), self.order())
            .into_iter()
            .filter(|i| self.dominates(i))
            .collect();
        out.sort_by(|a, b| grlex_cmp(a, b));
        out
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Graded-lexicographic comparison: by |J| first, then lexicographically with
/// the first component most significant and larger entries first, so that
/// (1,0) precedes (0,1).
pub fn grlex_cmp(a: &MultiIndex, b: &MultiIndex) -> std::cmp::Ordering {
    a.order()
        .cmp(&b.order())
        .then_with(|| b.entries().cmp(a.entries()))
}

/// All multi-indices with |J| ≤ k on n axes, graded-lexicographically ordered.
/// The count is binom(n + k, k).
pub fn multi_indices(n: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for grade in 0..=k {
        let mut current = vec![0usize; n];
        compositions(grade, 0, &mut current, &mut out);
    }
    out
}

fn compositions(rest: usize, axis: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if axis == current.len() - 1 {
        current[axis] = rest;
        out.push(MultiIndex(current.clone()));
        current[axis] = 0;
        return;
    }
    for v in (0..=rest).rev() {
        current[axis] = v;
        compositions(rest - v, axis + 1, current, out);
        current[axis] = 0;
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// binom(J, I) = Π_μ binom(J_μ, I_μ); errors if I is not dominated by J.
pub fn multinomial(upper: &MultiIndex, lower: &MultiIndex) -> Result<u64> {
    if !upper.dominates(lower) {
        return Err(Error::IndexNotDominated {
            upper: upper.entries().to_vec(),
            lower: lower.entries().to_vec(),
        });
    }
    Ok(upper
        .entries()
        .iter()
        .zip(lower.entries())
        .map(|(&j, &i)| binomial(j, i))
        .product())
}
