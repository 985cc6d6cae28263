//! Local dimension estimation: eigengap on singular values of node
//! neighborhoods, a multi-scale radius sweep with a voting rule, and the
//! refinement pass that classifies non-maximal nodes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::{euclidean_dist, PointCloud};
use crate::mlpca::covariance_eigenvalues;
use crate::scaffolding::Scaffolding;

pub const DEFAULT_SWEEP_STEPS: usize = 4;
pub const DEFAULT_MAX_PASSES: usize = 10;

#[derive(Debug, Clone)]
pub struct DimensionConfig {
    /// Center-distance radii bounding the neighborhood aggregation sweep.
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub steps: usize,
}

impl DimensionConfig {
    pub fn new(rho_lo: f64, rho_hi: f64, steps: usize) -> Result<Self> {
        if !(rho_lo > 0.0) || rho_hi < rho_lo {
            return Err(Error::input("need 0 < rho_lo <= rho_hi"));
        }
        if steps < 1 {
            return Err(Error::input("sweep needs at least one step"));
        }
        Ok(DimensionConfig { rho_lo, rho_hi, steps })
    }

    /// Defaults derived from the scaffolding threshold: sweep delta..2*delta.
    pub fn default_for_delta(delta: f64) -> Self {
        DimensionConfig {
            rho_lo: delta,
            rho_hi: 2.0 * delta,
            steps: DEFAULT_SWEEP_STEPS,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.rho_lo];
        }
        (0..self.steps)
            .map(|k| {
                self.rho_lo
                    + (self.rho_hi - self.rho_lo) * k as f64 / (self.steps - 1) as f64
            })
            .collect()
    }
}

/// Position of the largest gap in a normalized non-increasing sequence,
/// counting the trailing gap to zero; ties go to the smallest index.
pub fn eigengap_dimension(sigma: &[f64]) -> Result<usize> {
    if sigma.is_empty() {
        return Err(Error::input("empty singular value vector"));
    }
    let top = sigma[0];
    if !(top > 0.0) {
        return Err(Error::input("all-zero singular value vector"));
    }
    let norm: Vec<f64> = sigma.iter().map(|&x| x / top).collect();
    let mut best_k = 1usize;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 0..norm.len() {
        let next = if k + 1 < norm.len() { norm[k + 1] } else { 0.0 };
        let gap = norm[k] - next;
        if gap > best_gap {
            best_gap = gap;
            best_k = k + 1;
        }
    }
    Ok(best_k)
}

/// Initial dimension estimates. For each node and each sweep radius, PCA runs
/// on the union of clusters of nodes whose centers lie within the radius of
/// the node's center (the node itself always included); the eigengap of the
/// square-rooted eigenvalues is the per-radius estimate, and the per-node
/// estimate is the mode over radii with ties toward the smaller dimension.
/// Nodes with fewer than 2 points at every radius estimate 0.
pub fn initial_dimensions(
    scaffolding: &Scaffolding,
    cloud: &PointCloud,
    config: &DimensionConfig,
) -> BTreeMap<usize, usize> {
    let radii = config.radii();
    let mut out = BTreeMap::new();
    for v in &scaffolding.nodes {
        let mut votes: Vec<usize> = Vec::new();
        for &rho in &radii {
            let mut union: Vec<usize> = Vec::new();
            for w in &scaffolding.nodes {
                let d = euclidean_dist(cloud.point(v.center), cloud.point(w.center));
                if w.id == v.id || d <= rho {
                    union.extend(&w.cluster);
                }
            }
            if union.len() < 2 {
                continue;
            }
            let eig = covariance_eigenvalues(cloud, &union);
            let sigma: Vec<f64> = eig.iter().map(|&x| x.sqrt()).collect();
            if let Ok(k) = eigengap_dimension(&sigma) {
                votes.push(k);
            }
        }
        let est = if votes.is_empty() { 0 } else { mode_smallest(&votes) };
        out.insert(v.id, est);
    }
    out
}

fn mode_smallest(votes: &[usize]) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in votes {
        *counts.entry(v).or_insert(0) += 1;
    }
    // BTreeMap iterates ascending, so the first maximal count wins
    let mut best = (0usize, 0usize);
    for (&value, &count) in &counts {
        if count > best.1 {
            best = (value, count);
        }
    }
    best.0
}

#[derive(Debug, Clone)]
pub struct RefinementResult {
    pub dims: BTreeMap<usize, usize>,
    pub nonmaximal: BTreeSet<usize>,
    pub converged: bool,
    pub passes: usize,
}

/// Refinement: a node with a lower-labeled neighbor is a non-maximal
/// candidate. It is confirmed non-maximal when its link is disconnected in
/// the scaffolding and its label is at most the sum of its neighbors'
/// labels; otherwise its whole link is relabeled with the candidate's label.
/// Confirmed non-maximal labels survive: they are excluded from later
/// relabeling, so cleanup of stray low labels cannot erase a junction.
/// Passes repeat until a fixpoint or `max_passes`.
pub fn refine_dimensions(
    scaffolding: &Scaffolding,
    dims: &BTreeMap<usize, usize>,
    max_passes: usize,
) -> RefinementResult {
    let mut dims = dims.clone();
    let mut nonmaximal: BTreeSet<usize> = BTreeSet::new();
    let mut converged = false;
    let mut passes = 0;
    for _ in 0..max_passes {
        passes += 1;
        let mut changed = false;
        // candidates processed in descending (F, id) order
        let mut candidates: Vec<usize> = scaffolding
            .nodes
            .iter()
            .map(|n| n.id)
            .filter(|&w| {
                !nonmaximal.contains(&w)
                    && scaffolding
                        .neighbors(w)
                        .iter()
                        .any(|&x| dims[&x] < dims[&w])
            })
            .collect();
        candidates.sort_by(|&a, &b| dims[&b].cmp(&dims[&a]).then(b.cmp(&a)));
        for w in candidates {
            let link = scaffolding.neighbors(w);
            // candidacy can lapse after earlier relabeling in this pass
            if !link.iter().any(|&x| dims[&x] < dims[&w]) {
                continue;
            }
            let disconnected = link_disconnected(scaffolding, &link);
            let sum: usize = link.iter().map(|&x| dims[&x]).sum();
            if disconnected && dims[&w] <= sum {
                nonmaximal.insert(w);
            } else {
                let fw = dims[&w];
                for &x in &link {
                    if dims[&x] != fw && !nonmaximal.contains(&x) {
                        dims.insert(x, fw);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    RefinementResult {
        dims,
        nonmaximal,
        converged,
        passes,
    }
}

// connectivity of the induced subgraph on the link
fn link_disconnected(scaffolding: &Scaffolding, link: &[usize]) -> bool {
    if link.len() <= 1 {
        return false;
    }
    let set: BTreeSet<usize> = link.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut stack = vec![link[0]];
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        for n in scaffolding.neighbors(v) {
            if set.contains(&n) && !seen.contains(&n) {
                stack.push(n);
            }
        }
    }
    seen.len() < link.len()
}
