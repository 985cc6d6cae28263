//! Scaffolding construction: adaptive cover-tree leaves become nodes, and
//! two nodes are joined when their centers (or clusters) are within a
//! distance threshold delta. The threshold can be chosen automatically from
//! zero-dimensional persistence of the full cloud.

use crate::covertree::CoverNode;
use crate::error::{Error, Result};
use crate::geometry::{euclidean_dist, PointCloud};
use crate::homology::connectivity_threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRule {
    /// Distance between node centers (default).
    Centers,
    /// Minimum distance between the two clusters.
    Clusters,
}

#[derive(Debug, Clone)]
pub struct ScaffoldNode {
    pub id: usize,
    pub center: usize,
    /// Sorted point indices of the node's cluster.
    pub cluster: Vec<usize>,
    /// Local dimension label, filled by the dimension module.
    pub f: Option<usize>,
    /// Set by refinement when the node represents a non-maximal stratum.
    pub nonmaximal: bool,
}

#[derive(Debug, Clone)]
pub struct Scaffolding {
    pub nodes: Vec<ScaffoldNode>,
    /// Unordered id pairs, a < b, sorted.
    pub edges: Vec<(usize, usize)>,
    pub delta: f64,
}

impl Scaffolding {
    pub fn neighbors(&self, id: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == id {
                    Some(b)
                } else if b == id {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

/// Automatic delta: the longest MST edge of the cloud, i.e. twice the
/// smallest thickening radius that makes the union of balls connected.
/// Thresholding center distances at this value keeps the cloud connected.
pub fn auto_delta(cloud: &PointCloud) -> Result<f64> {
    if cloud.len() < 2 {
        return Err(Error::input("auto delta requires at least two points"));
    }
    Ok(2.0 * connectivity_threshold(cloud))
}

pub fn leaves_to_nodes(leaves: &[&CoverNode]) -> Vec<ScaffoldNode> {
    leaves
        .iter()
        .enumerate()
        .map(|(id, leaf)| ScaffoldNode {
            id,
            center: leaf.center,
            cluster: leaf.cluster.clone(),
            f: None,
            nonmaximal: false,
        })
        .collect()
}

pub fn build_scaffolding(
    nodes: Vec<ScaffoldNode>,
    cloud: &PointCloud,
    delta: Option<f64>,
    edge_rule: EdgeRule,
) -> Result<Scaffolding> {
    let delta = match delta {
        Some(d) if d > 0.0 => d,
        Some(_) => return Err(Error::input("delta must be positive")),
        None => auto_delta(cloud)?,
    };
    // leaves must partition the cloud
    let mut seen = vec![false; cloud.len()];
    for n in &nodes {
        for &i in &n.cluster {
            if seen[i] {
                return Err(Error::input("leaf clusters overlap"));
            }
            seen[i] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::input("leaf clusters do not cover the cloud"));
    }

    let mut edges = Vec::new();
    for a in 0..nodes.len() {
        for b in (a + 1)..nodes.len() {
            let d = match edge_rule {
                EdgeRule::Centers => euclidean_dist(
                    cloud.point(nodes[a].center),
                    cloud.point(nodes[b].center),
                ),
                EdgeRule::Clusters => {
                    let mut min = f64::INFINITY;
                    for &i in &nodes[a].cluster {
                        for &j in &nodes[b].cluster {
                            min = min.min(euclidean_dist(cloud.point(i), cloud.point(j)));
                        }
                    }
                    min
                }
            };
            if d <= delta {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    Ok(Scaffolding { nodes, edges, delta })
}
