//! Adaptive cover tree construction. The tree is built top-down: children of
//! a node form a greedy farthest-point net of its cluster at the next (half)
//! radius, and a node stops subdividing once its speculative children are
//! eigenmetrically uniform and, optionally, its cluster is a single
//! persistent component. Leaves become the scaffolding nodes.

use crate::error::{Error, Result};
use crate::geometry::{euclidean_dist, PointCloud};
use crate::homology::{connectivity_threshold, rips_persistence, DEFAULT_SIMPLEX_CAP};
use crate::mlpca::{eigenmetric, EigenProfile, RadiusSchedule};

pub const DEFAULT_MAX_LEVEL: u32 = 24;

#[derive(Debug, Clone)]
pub struct CoverNode {
    pub center: usize,
    pub level: u32,
    pub radius: f64,
    pub children: Vec<CoverNode>,
    /// Sorted point indices assigned to this subtree.
    pub cluster: Vec<usize>,
    pub is_leaf: bool,
}

impl CoverNode {
    pub fn leaves(&self) -> Vec<&CoverNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if node.is_leaf {
                out.push(node);
            } else {
                stack.extend(node.children.iter());
            }
        }
        out.sort_by_key(|n| n.cluster[0]);
        out
    }
}

#[derive(Debug, Clone)]
pub struct SubdivisionPolicy {
    /// Eigenthreshold: subdivide when some pair of child centers differs by
    /// more than this in the eigenmetric.
    pub tau: f64,
    /// Optional persistent-H0 criterion (ball-radius units): subdivide when
    /// more thickening than this is needed to make the cluster one component.
    pub h0_thresh: Option<f64>,
    /// Optional cutoff for dots of dimension 1-2 Rips persistence.
    pub higher_pers_thresh: Option<f64>,
    pub schedule: RadiusSchedule,
    pub max_level: u32,
}

impl SubdivisionPolicy {
    pub fn new(tau: f64, schedule: RadiusSchedule) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::input("tau must be positive"));
        }
        Ok(SubdivisionPolicy {
            tau,
            h0_thresh: None,
            higher_pers_thresh: None,
            schedule,
            max_level: DEFAULT_MAX_LEVEL,
        })
    }
}

/// Greedy farthest-point net of `cluster` at scale `r`, seeded with `seed`
/// (the parent center, guaranteeing nesting). Ties go to the smallest index.
fn greedy_net(cloud: &PointCloud, cluster: &[usize], seed: usize, r: f64) -> Vec<usize> {
    let mut centers = vec![seed];
    let mut dist: Vec<f64> = cluster
        .iter()
        .map(|&i| euclidean_dist(cloud.point(i), cloud.point(seed)))
        .collect();
    loop {
        let mut best = 0usize;
        for k in 1..cluster.len() {
            if dist[k] > dist[best] {
                best = k;
            }
        }
        if dist[best] <= r {
            break;
        }
        let c = cluster[best];
        centers.push(c);
        for (k, &i) in cluster.iter().enumerate() {
            let d = euclidean_dist(cloud.point(i), cloud.point(c));
            if d < dist[k] {
                dist[k] = d;
            }
        }
    }
    centers
}

/// Assign each cluster point to its nearest center; ties go to the earlier
/// center in `centers` (the parent's self-child first).
fn assign_clusters(cloud: &PointCloud, cluster: &[usize], centers: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); centers.len()];
    for &i in cluster {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (k, &c) in centers.iter().enumerate() {
            let d = euclidean_dist(cloud.point(i), cloud.point(c));
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        out[best].push(i);
    }
    out
}

fn cluster_is_degenerate(cloud: &PointCloud, cluster: &[usize]) -> bool {
    let first = cloud.point(cluster[0]);
    cluster.iter().all(|&i| cloud.point(i) == first)
}

/// True when the node should be subdivided: some pair of child centers
/// exceeds the eigenthreshold, or an optional persistence criterion fires.
pub fn subdivision_test(
    cloud: &PointCloud,
    cluster: &[usize],
    child_centers: &[usize],
    profiles: &[EigenProfile],
    policy: &SubdivisionPolicy,
) -> Result<bool> {
    // The eigenthreshold compares "a pair of children"; besides the child
    // centers we include a deterministic stride sample of the cluster so a
    // coarse net (few centers at a large radius) cannot miss a small
    // heterogeneous region entirely.
    const SUBDIVISION_SAMPLE: usize = 24;
    let mut probes: Vec<usize> = child_centers.to_vec();
    if cluster.len() > child_centers.len() {
        let step = (cluster.len() / SUBDIVISION_SAMPLE).max(1);
        probes.extend(cluster.iter().copied().step_by(step));
        probes.sort_unstable();
        probes.dedup();
    }
    for (a, &ca) in probes.iter().enumerate() {
        for &cb in &probes[a + 1..] {
            if eigenmetric(&profiles[ca], &profiles[cb])? > policy.tau {
                return Ok(true);
            }
        }
    }
    if let Some(h0) = policy.h0_thresh {
        let sub = cloud.subset(cluster)?;
        if connectivity_threshold(&sub) > h0 {
            return Ok(true);
        }
    }
    if let Some(cutoff) = policy.higher_pers_thresh {
        let sub = cloud.subset(cluster)?;
        if sub.len() >= 4 {
            let scale = sub.diameter() / 2.0;
            if scale > 0.0 {
                let diags = rips_persistence(&sub, 2, scale, DEFAULT_SIMPLEX_CAP.max(sub.len()))?;
                for d in &diags {
                    if d.dim == 0 {
                        continue;
                    }
                    if d.dots.iter().any(|(b, dth)| dth - b > cutoff) {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

pub fn build_adaptive_cover_tree(
    cloud: &PointCloud,
    profiles: &[EigenProfile],
    policy: &SubdivisionPolicy,
) -> Result<CoverNode> {
    if cloud.is_empty() {
        return Err(Error::input("cannot build a cover tree on an empty cloud"));
    }
    if profiles.len() != cloud.len() {
        return Err(Error::input("profile cache does not match cloud"));
    }
    let root_center = 0usize;
    let max_dist = (0..cloud.len())
        .map(|i| euclidean_dist(cloud.point(i), cloud.point(root_center)))
        .fold(0.0, f64::max);
    // smallest power of two >= the root's covering radius
    let mut base = 1.0f64;
    if max_dist > 0.0 {
        base = 2.0f64.powi(max_dist.log2().ceil() as i32);
        if base < max_dist {
            base *= 2.0;
        }
    }
    let cluster: Vec<usize> = (0..cloud.len()).collect();
    build_node(cloud, profiles, policy, root_center, 0, base, cluster)
}

fn build_node(
    cloud: &PointCloud,
    profiles: &[EigenProfile],
    policy: &SubdivisionPolicy,
    center: usize,
    level: u32,
    radius: f64,
    cluster: Vec<usize>,
) -> Result<CoverNode> {
    let mut node = CoverNode {
        center,
        level,
        radius,
        children: Vec::new(),
        cluster,
        is_leaf: true,
    };
    if node.cluster.len() == 1
        || node.level >= policy.max_level
        || cluster_is_degenerate(cloud, &node.cluster)
    {
        return Ok(node);
    }

    let child_radius = radius / 2.0;
    let centers = greedy_net(cloud, &node.cluster, center, child_radius);
    if centers.len() >= 2
        && !subdivision_test(cloud, &node.cluster, &centers, profiles, policy)?
    {
        // uniform: compress the whole subtree into this node
        return Ok(node);
    }
    // a single child means the net did not refine yet; descend anyway so the
    // radius keeps halving until it does
    let assignments = assign_clusters(cloud, &node.cluster, &centers);
    node.is_leaf = false;
    for (k, sub) in assignments.into_iter().enumerate() {
        if sub.is_empty() {
            continue;
        }
        node.children.push(build_node(
            cloud,
            profiles,
            policy,
            centers[k],
            level + 1,
            child_radius,
            sub,
        )?);
    }
    Ok(node)
}

/// Structural check of the built tree: nesting (self-child), covering,
/// sibling separation, and leaf-cluster partition. Returns human-readable
/// violations, empty on success.
pub fn check_cover_tree(root: &CoverNode, cloud: &PointCloud) -> Vec<String> {
    let mut violations = Vec::new();
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if node.is_leaf {
            continue;
        }
        if !node.children.iter().any(|c| c.center == node.center) {
            violations.push(format!(
                "node at level {} center {} has no self-child",
                node.level, node.center
            ));
        }
        let child_radius = node.radius / 2.0;
        for c in &node.children {
            let d = euclidean_dist(cloud.point(c.center), cloud.point(node.center));
            if d > node.radius + 1e-9 {
                violations.push(format!(
                    "child center {} lies {} from parent {} at level {} (covering, R={})",
                    c.center, d, node.center, node.level, node.radius
                ));
            }
        }
        for (i, a) in node.children.iter().enumerate() {
            for b in &node.children[i + 1..] {
                let d = euclidean_dist(cloud.point(a.center), cloud.point(b.center));
                if d <= child_radius {
                    violations.push(format!(
                        "siblings {} and {} at level {} are {} apart (separation, R={})",
                        a.center,
                        b.center,
                        a.level,
                        d,
                        child_radius
                    ));
                }
            }
        }
        stack.extend(node.children.iter());
    }
    // leaf clusters partition the point set
    let mut seen = vec![0usize; cloud.len()];
    for leaf in root.leaves() {
        for &i in &leaf.cluster {
            seen[i] += 1;
        }
    }
    for (i, &count) in seen.iter().enumerate() {
        if count != 1 {
            violations.push(format!("point {} appears in {} leaf clusters", i, count));
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlpca::all_profiles;

    fn build(cloud: &PointCloud, tau: f64) -> CoverNode {
        let schedule = RadiusSchedule::default_for(cloud).unwrap();
        let profiles = all_profiles(cloud, &schedule).unwrap();
        let policy = SubdivisionPolicy::new(tau, schedule).unwrap();
        build_adaptive_cover_tree(cloud, &profiles, &policy).unwrap()
    }

    #[test]
    fn one_point_is_leaf_root() {
        let c = PointCloud::new(vec![vec![1.0, 2.0]]).unwrap();
        let root = build(&c, 0.5);
        assert!(root.is_leaf);
        assert_eq!(root.cluster, vec![0]);
    }

    #[test]
    fn huge_tau_keeps_single_leaf() {
        let c = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![2.0, 2.0],
        ])
        .unwrap();
        let root = build(&c, 1e12);
        assert!(root.is_leaf);
        assert_eq!(root.leaves().len(), 1);
    }

    #[test]
    fn leaves_partition_and_invariants_hold() {
        let mut pts = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                pts.push(vec![i as f64, j as f64]);
            }
        }
        let c = PointCloud::new(pts).unwrap();
        let root = build(&c, 0.001);
        let violations = check_cover_tree(&root, &c);
        assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn duplicate_points_become_leaf() {
        let c = PointCloud::new(vec![vec![1.0]; 10]).unwrap();
        let root = build(&c, 0.001);
        assert!(root.is_leaf);
    }

    #[test]
    fn decreasing_tau_never_decreases_leaves() {
        let mut pts = Vec::new();
        // a line next to a small blob: mixed local geometry
        for i in 0..20 {
            pts.push(vec![i as f64 * 0.1, 0.0]);
        }
        for i in 0..10 {
            for j in 0..3 {
                pts.push(vec![3.0 + i as f64 * 0.1, 1.0 + j as f64 * 0.1]);
            }
        }
        let c = PointCloud::new(pts).unwrap();
        let mut last = 0;
        for tau in [10.0, 1.0, 0.1, 0.001] {
            let count = build(&c, tau).leaves().len();
            assert!(count >= last, "tau {} gave {} < {}", tau, count, last);
            last = count;
        }
    }

    #[test]
    fn determinism() {
        let c = PointCloud::new(
            (0..30)
                .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.61).cos()])
                .collect(),
        )
        .unwrap();
        let a = build(&c, 0.05);
        let b = build(&c, 0.05);
        let la: Vec<Vec<usize>> = a.leaves().iter().map(|l| l.cluster.clone()).collect();
        let lb: Vec<Vec<usize>> = b.leaves().iter().map(|l| l.cluster.clone()).collect();
        assert_eq!(la, lb);
    }

    #[test]
    fn h0_criterion_splits_far_blobs() {
        // two blobs with identical local geometry but far apart
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push(vec![i as f64 * 0.1, 0.0]);
            pts.push(vec![100.0 + i as f64 * 0.1, 0.0]);
        }
        let c = PointCloud::new(pts).unwrap();
        let schedule = RadiusSchedule::default_for(&c).unwrap();
        let profiles = all_profiles(&c, &schedule).unwrap();
        let mut policy = SubdivisionPolicy::new(1e12, schedule).unwrap();
        policy.h0_thresh = Some(0.5);
        let root = build_adaptive_cover_tree(&c, &profiles, &policy).unwrap();
        assert!(root.leaves().len() >= 2);
        // every leaf cluster is now a single tight component
        for leaf in root.leaves() {
            let sub = c.subset(&leaf.cluster).unwrap();
            assert!(connectivity_threshold(&sub) <= 0.5);
        }
    }

    #[test]
    fn hand_built_separation_violation_detected() {
        let c = PointCloud::new(vec![vec![0.0], vec![0.1], vec![4.0]]).unwrap();
        let bad = CoverNode {
            center: 0,
            level: 0,
            radius: 8.0,
            cluster: vec![0, 1, 2],
            is_leaf: false,
            children: vec![
                CoverNode {
                    center: 0,
                    level: 1,
                    radius: 4.0,
                    cluster: vec![0, 2],
                    is_leaf: true,
                    children: vec![],
                },
                CoverNode {
                    center: 1,
                    level: 1,
                    radius: 4.0,
                    cluster: vec![1],
                    is_leaf: true,
                    children: vec![],
                },
            ],
        };
        let violations = check_cover_tree(&bad, &c);
        assert!(violations.iter().any(|v| v.contains("separation")));
    }
}
