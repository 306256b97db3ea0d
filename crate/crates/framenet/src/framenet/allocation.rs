use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};

/// Number of retained output modes per coefficient row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub m: Vec<usize>,
    pub objective: f64,
}

impl Allocation {
    pub fn total(&self) -> usize {
        self.m.iter().sum()
    }
}

/// `sum_i w_i^{1/2} (sum_{j >= m_i} c_{i,j}^2)^{1/2}` with zero-based `j`.
pub fn weighted_tail(c: &[Vec<f64>], weights: &[f64], m: &[usize]) -> f64 {
    c.iter()
        .zip(weights)
        .zip(m)
        .map(|((row, w), &mi)| w.sqrt() * row.iter().skip(mi).map(|v| v * v).sum::<f64>().sqrt())
        .sum()
}

/// Allocation of exactly `min(budget, total columns)` retained modes that
/// minimizes [`weighted_tail`], by dynamic programming over the rows.
pub fn allocate_truncations(c: &[Vec<f64>], weights: &[f64], budget: usize) -> Result<Allocation> {
    check_dim(c.len(), weights.len())?;
    let rows = c.len();
    let total: usize = c.iter().map(Vec::len).sum();
    let budget = budget.min(total);
    // tails[i][k]: weighted tail of row i when k modes are kept.
    let tails: Vec<Vec<f64>> = c
        .iter()
        .zip(weights)
        .map(|(row, w)| {
            let mut t = vec![0.0; row.len() + 1];
            let mut acc = 0.0;
            for k in (0..row.len()).rev() {
                acc += row[k] * row[k];
                t[k] = acc;
            }
            t.iter().map(|v| w.sqrt() * v.sqrt()).collect()
        })
        .collect();

    let inf = f64::INFINITY;
    let mut best = vec![vec![inf; budget + 1]; rows + 1];
    let mut choice = vec![vec![0usize; budget + 1]; rows + 1];
    best[0][0] = 0.0;
    for i in 0..rows {
        for used in 0..=budget {
            if best[i][used] == inf {
                continue;
            }
            for k in 0..=c[i].len().min(budget - used) {
                let v = best[i][used] + tails[i][k];
                if v < best[i + 1][used + k] {
                    best[i + 1][used + k] = v;
                    choice[i + 1][used + k] = k;
                }
            }
        }
    }
    let mut m = vec![0; rows];
    let mut left = budget;
    for i in (0..rows).rev() {
        m[i] = choice[i + 1][left];
        left -= m[i];
    }
    let objective = if rows == 0 { 0.0 } else { best[rows][budget] };
    Ok(Allocation { m, objective })
}
