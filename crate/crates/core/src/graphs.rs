//! Simple undirected labeled graphs and the operations the spine algorithm
//! is built from: links, upper links, vertex deletion, and set collapse.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Per-vertex attachment carried through collapses: which scaffold nodes and
/// points a vertex stands for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Payload {
    pub members: BTreeSet<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
    labels: BTreeMap<VertexId, usize>,
    payloads: BTreeMap<VertexId, Payload>,
    next_id: VertexId,
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: usize, payload: Payload) -> VertexId {
        let id = self.next_id;
        self.next_id += 1;
        self.vertices.insert(id);
        self.labels.insert(id, label);
        self.payloads.insert(id, payload);
        id
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<()> {
        if a == b {
            return Err(Error::input("self-loops are not allowed"));
        }
        if !self.vertices.contains(&a) || !self.vertices.contains(&b) {
            return Err(Error::input("edge endpoint does not exist"));
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn label(&self, v: VertexId) -> usize {
        self.labels[&v]
    }

    pub fn set_label(&mut self, v: VertexId, label: usize) {
        self.labels.insert(v, label);
    }

    pub fn payload(&self, v: VertexId) -> &Payload {
        &self.payloads[&v]
    }

    /// Move the members of `from`'s payload into `to`'s (used before a
    /// deletion so membership stays a partition).
    pub fn transfer_payload(&mut self, from: VertexId, to: VertexId) -> Result<()> {
        if !self.vertices.contains(&from) || !self.vertices.contains(&to) {
            return Err(Error::input("payload transfer endpoint does not exist"));
        }
        let members = std::mem::take(&mut self.payloads.get_mut(&from).unwrap().members);
        self.payloads.get_mut(&to).unwrap().members.extend(members);
        Ok(())
    }

    /// All vertices adjacent to `v`.
    pub fn link(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        if !self.vertices.contains(&v) {
            return Err(Error::input(format!("no vertex {}", v)));
        }
        Ok(self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect())
    }

    /// Adjacent vertices with strictly larger label.
    pub fn upper_link(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        let lv = self.labels[&v];
        Ok(self
            .link(v)?
            .into_iter()
            .filter(|&w| self.labels[&w] > lv)
            .collect())
    }

    /// Intersection of the endpoints' upper links.
    pub fn upper_link_edge(&self, a: VertexId, b: VertexId) -> Result<BTreeSet<VertexId>> {
        if !self.has_edge(a, b) {
            return Err(Error::input(format!("no edge {{{}, {}}}", a, b)));
        }
        let ua = self.upper_link(a)?;
        let ub = self.upper_link(b)?;
        Ok(ua.intersection(&ub).copied().collect())
    }

    /// Delete the vertices of `w_set` one at a time in ascending id order;
    /// each removal adds a clique on the removed vertex's current neighbors,
    /// so connectivity through the deleted set is preserved.
    pub fn delete_vertices(&self, w_set: &BTreeSet<VertexId>) -> Result<LabeledGraph> {
        if !w_set.iter().all(|v| self.vertices.contains(v)) {
            return Err(Error::input("deletion set contains unknown vertex"));
        }
        let mut g = self.clone();
        for &w in w_set {
            let nbrs: Vec<VertexId> = g.link(w)?.into_iter().collect();
            g.vertices.remove(&w);
            g.labels.remove(&w);
            g.payloads.remove(&w);
            g.edges.retain(|&(a, b)| a != w && b != w);
            for (i, &x) in nbrs.iter().enumerate() {
                for &y in &nbrs[i + 1..] {
                    g.edges.insert((x.min(y), x.max(y)));
                }
            }
        }
        Ok(g)
    }

    /// Replace `w_set` by a single new vertex carrying `new_label` and the
    /// merged payloads, adjacent to every outside neighbor of the set.
    pub fn collapse_set(&self, w_set: &BTreeSet<VertexId>, new_label: usize) -> Result<(LabeledGraph, VertexId)> {
        if w_set.is_empty() {
            return Err(Error::input("cannot collapse an empty set"));
        }
        if !w_set.iter().all(|v| self.vertices.contains(v)) {
            return Err(Error::input("collapse set contains unknown vertex"));
        }
        let mut g = self.clone();
        let mut outside_nbrs = BTreeSet::new();
        let mut payload = Payload::default();
        for &w in w_set {
            for x in g.link(w)? {
                if !w_set.contains(&x) {
                    outside_nbrs.insert(x);
                }
            }
            payload.members.extend(&g.payloads[&w].members);
        }
        for &w in w_set {
            g.vertices.remove(&w);
            g.labels.remove(&w);
            g.payloads.remove(&w);
        }
        g.edges
            .retain(|(a, b)| !w_set.contains(a) && !w_set.contains(b));
        let dummy = g.add_vertex(new_label, payload);
        for x in outside_nbrs {
            g.edges.insert((x.min(dummy), x.max(dummy)));
        }
        Ok((g, dummy))
    }

    /// Connected components of the induced subgraph on `restrict` (or the
    /// whole graph), ordered by minimum member id.
    pub fn connected_components(&self, restrict: Option<&BTreeSet<VertexId>>) -> Result<Vec<BTreeSet<VertexId>>> {
        let verts: BTreeSet<VertexId> = match restrict {
            Some(r) => {
                if !r.iter().all(|v| self.vertices.contains(v)) {
                    return Err(Error::input("restriction contains unknown vertex"));
                }
                r.clone()
            }
            None => self.vertices.clone(),
        };
        let mut seen = BTreeSet::new();
        let mut components = Vec::new();
        for &start in &verts {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                seen.insert(v);
                for w in self.link(v)? {
                    if verts.contains(&w) && !comp.contains(&w) {
                        stack.push(w);
                    }
                }
            }
            components.push(comp);
        }
        Ok(components)
    }
}
