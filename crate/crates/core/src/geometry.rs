//! Point cloud container, Euclidean metric, range queries, and the Euclidean
//! minimum spanning tree used by persistence and threshold selection.

use crate::error::{Error, Result};

/// A set of `n` points in `R^D`, indexed by position.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("point cloud must contain at least one point"));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::input("points must have dimension >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::input(format!(
                    "point {} has dimension {}, expected {}",
                    i,
                    p.len(),
                    dim
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::input(format!("point {} has non-finite coordinate", i)));
            }
        }
        Ok(PointCloud { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                d = d.max(euclidean_dist(self.point(i), self.point(j)));
            }
        }
        d
    }

    /// Indices of all points within the closed `r`-ball around `center`.
    pub fn range_query(&self, center: &[f64], r: f64) -> Result<Vec<usize>> {
        if center.len() != self.dim {
            return Err(Error::input("query center dimension mismatch"));
        }
        if r < 0.0 {
            return Err(Error::input("query radius must be nonnegative"));
        }
        Ok((0..self.len())
            .filter(|&i| euclidean_dist(self.point(i), center) <= r)
            .collect())
    }

    /// Sub-cloud on the given indices; index `k` of the result is `indices[k]`.
    pub fn subset(&self, indices: &[usize]) -> Result<PointCloud> {
        PointCloud::new(indices.iter().map(|&i| self.points[i].clone()).collect())
    }
}

pub fn euclidean_dist(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter()
        .zip(q.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Checked variant surfacing dimension mismatch as an input error.
pub fn try_euclidean_dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::input("dimension mismatch"));
    }
    Ok(euclidean_dist(p, q))
}

/// An edge of the Euclidean minimum spanning tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

/// MST of the complete Euclidean graph, O(n^2) Prim with deterministic
/// (length, i, j) tie-breaking. Edges are returned sorted the same way,
/// with i < j in each edge.
pub fn minimum_spanning_tree(cloud: &PointCloud) -> Vec<MstEdge> {
    let n = cloud.len();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best_dist = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    in_tree[0] = true;
    for j in 1..n {
        best_dist[j] = euclidean_dist(cloud.point(0), cloud.point(j));
    }
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        // pick the closest outside vertex; ties resolved by (source, target) order
        let mut pick = usize::MAX;
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            if pick == usize::MAX {
                pick = j;
                continue;
            }
            let a = (best_dist[j], best_from[j].min(j), best_from[j].max(j));
            let b = (
                best_dist[pick],
                best_from[pick].min(pick),
                best_from[pick].max(pick),
            );
            if a.0 < b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2)) {
                pick = j;
            }
        }
        in_tree[pick] = true;
        edges.push(MstEdge {
            i: best_from[pick].min(pick),
            j: best_from[pick].max(pick),
            length: best_dist[pick],
        });
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            let d = euclidean_dist(cloud.point(pick), cloud.point(j));
            let cand = (d, pick.min(j), pick.max(j));
            let cur = (best_dist[j], best_from[j].min(j), best_from[j].max(j));
            if cand.0 < cur.0 || (cand.0 == cur.0 && (cand.1, cand.2) < (cur.1, cur.2)) {
                best_dist[j] = d;
                best_from[j] = pick;
            }
        }
    }
    edges.sort_by(|a, b| {
        a.length
            .partial_cmp(&b.length)
            .unwrap()
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    edges
}
