//! Spine construction: collapse non-maximal components of the labeled
//! scaffolding, delete maximal-interior vertices, then collapse boundary
//! edges whose endpoints see the same set of higher-labeled vertices.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::geometry::PointCloud;
use crate::graphs::{LabeledGraph, Payload, VertexId};
use crate::homology::{betti_vector, rips_persistence, BettiVector, DEFAULT_SIMPLEX_CAP};
use crate::scaffolding::Scaffolding;

#[derive(Debug, Clone)]
pub struct Spine {
    pub graph: LabeledGraph,
    /// Spine vertex -> scaffold node ids merged into it.
    pub membership: BTreeMap<VertexId, BTreeSet<usize>>,
    /// Spine vertices that stand for non-maximal strata.
    pub nonmaximal: BTreeSet<VertexId>,
    pub betti: BTreeMap<VertexId, BettiVector>,
}

impl Spine {
    /// Point indices belonging to a spine vertex, via its scaffold members.
    pub fn points_of(&self, v: VertexId, scaffolding: &Scaffolding) -> Vec<usize> {
        let mut pts: Vec<usize> = self.membership[&v]
            .iter()
            .flat_map(|&sid| scaffolding.nodes[sid].cluster.iter().copied())
            .collect();
        pts.sort_unstable();
        pts
    }
}

pub fn build_spine(
    scaffolding: &Scaffolding,
    dims: &BTreeMap<usize, usize>,
    nonmaximal: &BTreeSet<usize>,
) -> Result<Spine> {
    // mirror the scaffolding as a labeled graph; vertex id == scaffold id
    let mut g = LabeledGraph::new();
    for n in &scaffolding.nodes {
        g.add_vertex(
            dims[&n.id],
            Payload {
                members: BTreeSet::from([n.id]),
            },
        );
    }
    for &(a, b) in &scaffolding.edges {
        g.add_edge(a, b)?;
    }

    let mut nonmax_vertices: BTreeSet<VertexId> = nonmaximal.clone();

    // step 1: collapse connected components of non-maximal nodes, per F-class
    let classes: BTreeSet<usize> = nonmax_vertices.iter().map(|&v| g.label(v)).collect();
    for f in classes {
        let members: BTreeSet<VertexId> = nonmax_vertices
            .iter()
            .copied()
            .filter(|&v| g.label(v) == f)
            .collect();
        // components are disjoint, so collapsing one leaves the others' ids intact
        for comp in g.connected_components(Some(&members))? {
            if comp.len() < 2 {
                continue;
            }
            let (g2, dummy) = g.collapse_set(&comp, f)?;
            g = g2;
            for v in &comp {
                nonmax_vertices.remove(v);
            }
            nonmax_vertices.insert(dummy);
        }
    }

    // step 2: per F-class component of maximal vertices, delete the interior
    // (or collapse the whole component when it has no boundary at all)
    let maximal_classes: BTreeSet<usize> = g
        .vertices()
        .filter(|v| !nonmax_vertices.contains(v))
        .map(|v| g.label(v))
        .collect();
    for f in maximal_classes {
        loop {
            let members: BTreeSet<VertexId> = g
                .vertices()
                .filter(|&v| !nonmax_vertices.contains(&v) && g.label(v) == f)
                .collect();
            let comps = g.connected_components(Some(&members))?;
            // find an unprocessed component: one still holding an interior
            // vertex or more than one interior-free vertex without boundary
            let mut acted = false;
            for comp in comps {
                let boundary: BTreeSet<VertexId> = comp
                    .iter()
                    .copied()
                    .filter(|&v| {
                        g.link(v)
                            .map(|l| l.iter().any(|&x| g.label(x) != f))
                            .unwrap_or(false)
                    })
                    .collect();
                let interior: BTreeSet<VertexId> =
                    comp.difference(&boundary).copied().collect();
                if boundary.is_empty() {
                    if comp.len() > 1 {
                        let (g2, _) = g.collapse_set(&comp, f)?;
                        g = g2;
                        acted = true;
                        break;
                    }
                } else if !interior.is_empty() {
                    // interior vertices vanish from the graph, but their
                    // scaffold membership must stay a partition: fold it
                    // into the component's smallest boundary vertex
                    let keeper = *boundary.iter().next().unwrap();
                    for &v in &interior {
                        g.transfer_payload(v, keeper)?;
                    }
                    g = g.delete_vertices(&interior)?;
                    acted = true;
                    break;
                }
            }
            if !acted {
                break;
            }
        }
    }

    // step 3: collapse same-F boundary edges with equal upper links, in
    // ascending edge order, until a fixpoint. Upper links are compared by
    // their F-labels: the spine models the stratification poset, so two
    // same-F pieces whose higher-dimensional neighborhoods agree as strata
    // are identified even when they border distinct collapsed vertices.
    let upper_labels = |g: &crate::graphs::LabeledGraph, v: VertexId| -> Result<BTreeSet<usize>> {
        Ok(g.upper_link(v)?.iter().map(|&u| g.label(u)).collect())
    };
    loop {
        let edges: Vec<(VertexId, VertexId)> = g.edges().collect();
        let mut collapsed = false;
        for (x, y) in edges {
            if nonmax_vertices.contains(&x) || nonmax_vertices.contains(&y) {
                continue;
            }
            if g.label(x) != g.label(y) {
                continue;
            }
            if upper_labels(&g, x)? == upper_labels(&g, y)? {
                let f = g.label(x);
                let (g2, _) = g.collapse_set(&BTreeSet::from([x, y]), f)?;
                g = g2;
                collapsed = true;
                break;
            }
        }
        if !collapsed {
            break;
        }
    }

    let membership: BTreeMap<VertexId, BTreeSet<usize>> = g
        .vertices()
        .map(|v| (v, g.payload(v).members.clone()))
        .collect();
    Ok(Spine {
        graph: g,
        membership,
        nonmaximal: nonmax_vertices,
        betti: BTreeMap::new(),
    })
}

/// Attach persistent Betti vectors computed on the centers of each spine
/// vertex's member scaffold nodes. Vertices with fewer than 4 members get
/// the trivial vector.
pub fn decorate_betti(
    spine: &mut Spine,
    scaffolding: &Scaffolding,
    cloud: &PointCloud,
    cutoff: Option<f64>,
) -> Result<()> {
    let verts: Vec<VertexId> = spine.graph.vertices().collect();
    for v in verts {
        let centers: Vec<usize> = spine.membership[&v]
            .iter()
            .map(|&sid| scaffolding.nodes[sid].center)
            .collect();
        if centers.len() < 4 {
            spine.betti.insert(
                v,
                BettiVector {
                    beta0: 1,
                    beta1: 0,
                    beta2: 0,
                },
            );
            continue;
        }
        let sub = cloud.subset(&centers)?;
        let diam = sub.diameter();
        if diam <= 0.0 {
            spine.betti.insert(
                v,
                BettiVector {
                    beta0: 1,
                    beta1: 0,
                    beta2: 0,
                },
            );
            continue;
        }
        let cut = cutoff.unwrap_or(0.2 * diam);
        let diags = rips_persistence(&sub, 2, diam / 2.0, DEFAULT_SIMPLEX_CAP.max(sub.len()))?;
        spine.betti.insert(v, betti_vector(&diags, cut)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaffolding::ScaffoldNode;

    fn scaffold(n: usize, edges: &[(usize, usize)]) -> Scaffolding {
        Scaffolding {
            nodes: (0..n)
                .map(|id| ScaffoldNode {
                    id,
                    center: id,
                    cluster: vec![id],
                    f: None,
                    nonmaximal: false,
                })
                .collect(),
            edges: {
                let mut e: Vec<_> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                e.sort_unstable();
                e
            },
            delta: 1.0,
        }
    }

    #[test]
    fn single_class_collapses_to_one_vertex() {
        let s = scaffold(4, &[(0, 1), (1, 2), (2, 3)]);
        let dims: BTreeMap<usize, usize> = (0..4).map(|i| (i, 2)).collect();
        let spine = build_spine(&s, &dims, &BTreeSet::new()).unwrap();
        assert_eq!(spine.graph.num_vertices(), 1);
        assert_eq!(spine.graph.num_edges(), 0);
        let v = spine.graph.vertices().next().unwrap();
        assert_eq!(spine.membership[&v], BTreeSet::from([0, 1, 2, 3]));
    }

    #[test]
    fn plane_pierced_by_line_shape() {
        // path of 1-nodes - junction 3-node - more 1-nodes, junction also
        // adjacent to a clique of 2-nodes: classic plane-pierced-by-line
        // scaffolding in miniature.
        // nodes: 0,1 line side A (F=1); 2 junction (F=3, nonmaximal);
        // 3,4 line side B (F=1); 5,6,7 plane (F=2)
        let s = scaffold(
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (2, 5),
                (2, 6),
                (2, 7),
                (5, 6),
                (6, 7),
                (5, 7),
            ],
        );
        let mut dims = BTreeMap::new();
        for (i, f) in [(0, 1), (1, 1), (2, 3), (3, 1), (4, 1), (5, 2), (6, 2), (7, 2)] {
            dims.insert(i, f);
        }
        let spine = build_spine(&s, &dims, &BTreeSet::from([2])).unwrap();
        // expect: one 3-vertex, two 1-vertices, one 2-vertex
        let mut by_label: BTreeMap<usize, usize> = BTreeMap::new();
        for v in spine.graph.vertices() {
            *by_label.entry(spine.graph.label(v)).or_insert(0) += 1;
        }
        assert_eq!(by_label[&3], 1);
        assert_eq!(by_label[&1], 2);
        assert_eq!(by_label[&2], 1);
        // the 3-vertex is adjacent to everything
        let three = spine
            .graph
            .vertices()
            .find(|&v| spine.graph.label(v) == 3)
            .unwrap();
        assert_eq!(spine.graph.link(three).unwrap().len(), 3);
    }

    #[test]
    fn membership_partitions_scaffold_nodes() {
        let s = scaffold(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let mut dims = BTreeMap::new();
        for (i, f) in [(0, 1), (1, 1), (2, 2), (3, 1), (4, 1)] {
            dims.insert(i, f);
        }
        let spine = build_spine(&s, &dims, &BTreeSet::from([2])).unwrap();
        let mut all: Vec<usize> = Vec::new();
        for members in spine.membership.values() {
            all.extend(members.iter());
        }
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn spine_vertices_share_one_label() {
        // merged vertices always carried one F-value: check via membership
        let s = scaffold(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let mut dims = BTreeMap::new();
        for (i, f) in [(0, 2), (1, 2), (2, 3), (3, 1), (4, 1), (5, 1)] {
            dims.insert(i, f);
        }
        let spine = build_spine(&s, &dims, &BTreeSet::from([2])).unwrap();
        for (v, members) in &spine.membership {
            let labels: BTreeSet<usize> = members.iter().map(|&m| dims[&m]).collect();
            assert_eq!(labels.len(), 1);
            assert_eq!(spine.graph.label(*v), *labels.iter().next().unwrap());
        }
    }

    #[test]
    fn idempotent_on_spine_shaped_graph() {
        // a graph already in spine form: 1 - 3 - 2 path with distinct labels
        let s = scaffold(3, &[(0, 1), (1, 2)]);
        let mut dims = BTreeMap::new();
        for (i, f) in [(0, 1), (1, 3), (2, 2)] {
            dims.insert(i, f);
        }
        let spine = build_spine(&s, &dims, &BTreeSet::from([1])).unwrap();
        assert_eq!(spine.graph.num_vertices(), 3);
        assert_eq!(spine.graph.num_edges(), 2);
    }

    #[test]
    fn betti_small_vertex_is_trivial() {
        let s = scaffold(2, &[(0, 1)]);
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let mut dims = BTreeMap::new();
        dims.insert(0, 1);
        dims.insert(1, 2);
        let mut spine = build_spine(&s, &dims, &BTreeSet::new()).unwrap();
        decorate_betti(&mut spine, &s, &cloud, None).unwrap();
        for b in spine.betti.values() {
            assert_eq!(
                *b,
                BettiVector {
                    beta0: 1,
                    beta1: 0,
                    beta2: 0
                }
            );
        }
    }
}
