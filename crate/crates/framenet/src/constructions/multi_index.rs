use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constructions::legendre_eval;
use crate::error::{Error, Result};

/// Finitely supported multi-index stored as sorted `(coordinate, order)` pairs
/// with nonzero orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<(usize, u32)>);

impl MultiIndex {
    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn unit(k: usize) -> Self {
        Self(vec![(k, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(usize, u32)>) -> Result<Self> {
        pairs.retain(|p| p.1 != 0);
        pairs.sort();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::input("repeated coordinate in multi-index"));
        }
        Ok(Self(pairs))
    }

    pub fn from_dense(v: &[u32]) -> Self {
        Self(v.iter().enumerate().filter(|(_, &o)| o != 0).map(|(k, &o)| (k, o)).collect())
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0.iter().find(|p| p.0 == k).map(|p| p.1).unwrap_or(0)
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    /// `|nu|_1`.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    /// Largest coordinate in the support plus one.
    pub fn extent(&self) -> usize {
        self.0.last().map(|p| p.0 + 1).unwrap_or(0)
    }

    /// `prod_j (1 + 2 nu_j)`.
    pub fn weight(&self) -> f64 {
        self.0.iter().map(|p| 1.0 + 2.0 * p.1 as f64).product()
    }

    /// Anisotropic cost `sum_k (1+k)^g nu_k`.
    pub fn cost(&self, g: f64) -> f64 {
        self.0.iter().map(|&(k, o)| (1.0 + k as f64).powf(g) * o as f64).sum()
    }

    /// Tensorized normalized Legendre polynomial at `y`.
    pub fn legendre(&self, y: &[f64]) -> f64 {
        self.0.iter().map(|&(k, o)| legendre_eval(o as usize, y[k])).product()
    }

    fn decrement(&self, k: usize) -> Self {
        let pairs = self
            .0
            .iter()
            .filter_map(|&(c, o)| if c == k { (o > 1).then_some((c, o - 1)) } else { Some((c, o)) })
            .collect();
        Self(pairs)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, o)| format!("{o}e{k}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Finite set of multi-indices in a fixed enumeration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiIndexSet {
    indices: Vec<MultiIndex>,
}

impl MultiIndexSet {
    pub fn new(indices: Vec<MultiIndex>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for nu in &indices {
            if !seen.insert(nu.clone()) {
                return Err(Error::input(format!("duplicate multi-index {nu}")));
            }
        }
        Ok(Self { indices })
    }

    /// All `nu` over the first `dims` coordinates with
    /// `sum_k (1+k)^g nu_k <= budget`, ordered by cost then lexicographically.
    pub fn anisotropic(dims: usize, g: f64, budget: f64) -> Self {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dims];
        fn rec(k: usize, left: f64, g: f64, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if k == cur.len() {
                out.push(MultiIndex::from_dense(cur));
                return;
            }
            let c = (1.0 + k as f64).powf(g);
            let mut o = 0u32;
            while o as f64 * c <= left + 1e-12 {
                cur[k] = o;
                rec(k + 1, left - o as f64 * c, g, cur, out);
                o += 1;
            }
            cur[k] = 0;
        }
        rec(0, budget, g, &mut cur, &mut out);
        out.sort_by(|a, b| a.cost(g).total_cmp(&b.cost(g)).then_with(|| a.cmp(b)));
        Self { indices: out }
    }

    /// The first `n` indices of the enumeration.
    pub fn truncate(&self, n: usize) -> Self {
        Self { indices: self.indices[..n.min(self.indices.len())].to_vec() }
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest support size.
    pub fn effective_dim(&self) -> usize {
        self.indices.iter().map(MultiIndex::support_len).max().unwrap_or(0)
    }

    /// Largest `|nu|_1`.
    pub fn max_order(&self) -> u32 {
        self.indices.iter().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Number of coordinates touched by any index.
    pub fn extent(&self) -> usize {
        self.indices.iter().map(MultiIndex::extent).max().unwrap_or(0)
    }

    pub fn is_downward_closed(&self) -> bool {
        let set: std::collections::HashSet<&MultiIndex> = self.indices.iter().collect();
        self.indices.iter().all(|nu| nu.pairs().iter().all(|&(k, _)| set.contains(&nu.decrement(k))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_dimension_and_order() {
        let set = MultiIndexSet::new(vec![
            MultiIndex::zero(),
            MultiIndex::unit(0),
            MultiIndex::from_pairs(vec![(0, 2)]).unwrap(),
            MultiIndex::from_pairs(vec![(0, 1), (1, 1)]).unwrap(),
        ])
        .unwrap();
        assert_eq!(set.effective_dim(), 2);
        assert_eq!(set.max_order(), 2);
        assert!(!set.is_downward_closed());
    }

    #[test]
    fn anisotropic_sets_are_downward_closed() {
        for g in [0.0, 1.0, 2.0] {
            let set = MultiIndexSet::anisotropic(4, g, 3.0);
            assert!(set.is_downward_closed());
            assert_eq!(set.indices()[0], MultiIndex::zero());
            for n in 1..set.len() {
                assert!(set.truncate(n).is_downward_closed(), "g={g} n={n}");
            }
        }
        let set = MultiIndexSet::anisotropic(3, 1.0, 1.0);
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn weights_and_display() {
        let nu = MultiIndex::from_pairs(vec![(2, 1), (0, 2)]).unwrap();
        assert_eq!(nu.weight(), 15.0);
        assert_eq!(nu.to_string(), "2e0+1e2");
        assert!((nu.legendre(&[0.5, 0.0, 0.5]) - legendre_eval(2, 0.5) * legendre_eval(1, 0.5)).abs() < 1e-15);
    }
}
