//! File formats: point-cloud CSV, label CSV, persistence-diagram CSV, the
//! versioned GraphDocument JSON schema, DOT export and a cover-tree JSON
//! dump. All writes go through an atomic temp-file + rename helper.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::covertree::CoverNode;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::homology::PersistenceDiagram;

pub const FORMAT_VERSION: &str = "1";

/// Write `bytes` to `path` atomically: write a sibling temp file, then
/// rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::input("output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Hex SHA-256 of the raw input bytes, recorded in document provenance.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

pub fn digest_file(path: &Path) -> Result<String> {
    Ok(digest_bytes(&fs::read(path)?))
}

fn format_float(x: f64) -> String {
    // shortest representation that round-trips
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

pub fn cloud_to_csv(cloud: &PointCloud, header: bool) -> String {
    let mut out = String::new();
    if header {
        let cols: Vec<String> = (0..cloud.dim()).map(|d| format!("x{d}")).collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    for i in 0..cloud.len() {
        let row: Vec<String> = cloud.point(i).iter().map(|&x| format_float(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn cloud_from_csv(text: &str, has_header: bool) -> Result<PointCloud> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && has_header {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("line {}: bad number {cell:?}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    PointCloud::new(rows)
}

pub fn write_cloud_csv(path: &Path, cloud: &PointCloud, header: bool) -> Result<()> {
    write_atomic(path, cloud_to_csv(cloud, header).as_bytes())
}

pub fn read_cloud_csv(path: &Path, has_header: bool) -> Result<PointCloud> {
    cloud_from_csv(&fs::read_to_string(path)?, has_header)
}

/// Sidecar ground-truth labels: one integer per row.
pub fn write_labels_csv(path: &Path, labels: &[usize]) -> Result<()> {
    let body: String = labels.iter().map(|l| format!("{l}\n")).collect();
    write_atomic(path, body.as_bytes())
}

pub fn read_labels_csv(path: &Path) -> Result<Vec<usize>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| Error::input(format!("bad label {l:?}")))
        })
        .collect()
}

/// Persistence diagrams as CSV rows `dim,birth,death`, with `inf` for
/// essential classes.
pub fn diagrams_to_csv(diagrams: &[PersistenceDiagram]) -> String {
    let mut out = String::from("dim,birth,death\n");
    for d in diagrams {
        for &(birth, death) in &d.dots {
            let death = if death.is_infinite() {
                "inf".to_string()
            } else {
                format_float(death)
            };
            out.push_str(&format!("{},{},{}\n", d.dim, format_float(birth), death));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocumentNode {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<usize>,
    pub center: Vec<f64>,
    pub cluster_size: usize,
    pub point_indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    /// Echo of the pipeline configuration as flat key/value strings.
    #[serde(default)]
    pub config: BTreeMap<String, String>,
    /// SHA-256 of the input bytes.
    #[serde(default)]
    pub input_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format_version: String,
    pub nodes: Vec<GraphDocumentNode>,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl GraphDocument {
    pub fn new(nodes: Vec<GraphDocumentNode>, edges: Vec<(usize, usize)>, provenance: Provenance) -> Result<Self> {
        let doc = GraphDocument {
            format_version: FORMAT_VERSION.to_string(),
            nodes,
            edges,
            provenance,
        };
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version.is_empty() {
            return Err(Error::input("graph document missing format_version"));
        }
        let mut ids = std::collections::BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(Error::input(format!("duplicate node id {}", n.id)));
            }
        }
        for &(a, b) in &self.edges {
            if !ids.contains(&a) || !ids.contains(&b) {
                return Err(Error::input(format!("edge ({a}, {b}) references unknown node")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Render a document as a DOT graph with deterministic node and edge order.
/// Labels carry the dimension, Betti vector and cluster size when present.
pub fn export_dot(doc: &GraphDocument) -> String {
    let mut out = String::from("graph strata {\n  node [shape=circle];\n");
    for n in &doc.nodes {
        let mut label = match n.f {
            Some(f) => format!("dim={f}"),
            None => format!("node {}", n.id),
        };
        if let Some([b0, b1, b2]) = n.betti {
            label.push_str(&format!(", β=({b0},{b1},{b2})"));
        }
        label.push_str(&format!(", |pts|={}", n.cluster_size));
        out.push_str(&format!("  n{} [label=\"{}\"];\n", n.id, label));
    }
    for &(a, b) in &doc.edges {
        out.push_str(&format!("  n{a} -- n{b};\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverNodeDump {
    pub center: usize,
    pub level: u32,
    pub radius: f64,
    pub cluster_size: usize,
    pub is_leaf: bool,
    pub children: Vec<CoverNodeDump>,
}

impl CoverNodeDump {
    pub fn from_tree(node: &CoverNode) -> Self {
        CoverNodeDump {
            center: node.center,
            level: node.level,
            radius: node.radius,
            cluster_size: node.cluster.len(),
            is_leaf: node.is_leaf,
            children: node.children.iter().map(Self::from_tree).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
