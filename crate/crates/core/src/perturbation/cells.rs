//! Splitting an unbounded spectrum into unit cells `]n,n+1] x ]k,k+1]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::point_index::PointIndex;
use crate::spectrum::ComplexPoint;
use crate::vector::WeightedVector;

pub type Cell = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEntry {
    pub n: i64,
    pub k: i64,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reassignment {
    pub index: usize,
    pub from: Cell,
    pub to: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellAssignment {
    /// Non-empty cells in `(n, k)` order, indices ascending.
    pub cells: Vec<CellEntry>,
    pub reassigned: Vec<Reassignment>,
}

impl CellAssignment {
    pub fn cell_of(&self, index: usize) -> Option<Cell> {
        self.cells
            .iter()
            .find(|c| c.indices.binary_search(&index).is_ok())
            .map(|c| (c.n, c.k))
    }
}

/// The half-open cell containing `z`.
pub fn home_cell(z: ComplexPoint) -> Cell {
    (z.re.ceil() as i64 - 1, z.im.ceil() as i64 - 1)
}

/// Assign each eigenvalue to its cell, then move isolated points sitting
/// on their cell's right or top edge into the adjacent cell whose points
/// accumulate at them.
///
/// A point is isolated when no other point of its cell lies within `r0`.
/// Among the adjacent cells whose closure contains it, the target is the
/// one with the most points within `r0`, ties going to the one holding the
/// nearest such point.
pub fn cell_partition(lambdas: &[ComplexPoint], r0: f64) -> CellAssignment {
    let home: Vec<Cell> = lambdas.iter().map(|&z| home_cell(z)).collect();
    let index = PointIndex::new(lambdas);
    let mut assigned = home.clone();
    let mut reassigned = Vec::new();
    for (k, &z) in lambdas.iter().enumerate() {
        let (n, m) = home[k];
        let on_right = z.re == (n + 1) as f64;
        let on_top = z.im == (m + 1) as f64;
        if !on_right && !on_top {
            continue;
        }
        let near: Vec<(usize, f64)> = index
            .in_ball(z, r0)
            .filter(|&(i, _)| i != k + 1)
            .map(|(i, p)| (i, (p - z).norm()))
            .collect();
        if near.iter().any(|&(i, _)| home[i - 1] == (n, m)) {
            continue;
        }
        let mut candidates = Vec::new();
        if on_right {
            candidates.push((n + 1, m));
        }
        if on_top {
            candidates.push((n, m + 1));
        }
        if on_right && on_top {
            candidates.push((n + 1, m + 1));
        }
        let best = candidates
            .into_iter()
            .filter_map(|cell| {
                let pts: Vec<f64> = near.iter().filter(|&&(i, _)| home[i - 1] == cell).map(|&(_, d)| d).collect();
                let nearest = pts.iter().copied().fold(f64::INFINITY, f64::min);
                (!pts.is_empty()).then_some((cell, pts.len(), nearest))
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.total_cmp(&a.2)));
        if let Some((to, _, _)) = best {
            assigned[k] = to;
            reassigned.push(Reassignment {
                index: k + 1,
                from: (n, m),
                to,
            });
        }
    }
    let mut map: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
    for (k, cell) in assigned.into_iter().enumerate() {
        map.entry(cell).or_default().push(k + 1);
    }
    CellAssignment {
        cells: map.into_iter().map(|((n, k), indices)| CellEntry { n, k, indices }).collect(),
        reassigned,
    }
}

/// `‖u_{n,k}‖`: norm of `u` restricted to each cell's indices.
pub fn cell_u_norms(assignment: &CellAssignment, u: &WeightedVector) -> Vec<(Cell, f64)> {
    assignment
        .cells
        .iter()
        .map(|c| ((c.n, c.k), c.indices.iter().map(|&i| u.get(i).norm_sqr()).sum::<f64>().sqrt()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellWeight {
    pub n: i64,
    pub k: i64,
    pub alpha: f64,
}

/// `α_{n,k} = 2^-(|n|+|k|+1) / (1 + ‖u_{n,k}‖)` for every non-empty cell.
pub fn cell_weights(assignment: &CellAssignment, norms: &[(Cell, f64)]) -> Vec<CellWeight> {
    assignment
        .cells
        .iter()
        .filter(|c| !c.indices.is_empty())
        .filter_map(|c| {
            let norm = norms.iter().find(|(cell, _)| *cell == (c.n, c.k))?.1;
            let scale = 0.5f64.powi((c.n.unsigned_abs() + c.k.unsigned_abs() + 1) as i32);
            Some(CellWeight {
                n: c.n,
                k: c.k,
                alpha: scale / (1.0 + norm),
            })
        })
        .collect()
}
