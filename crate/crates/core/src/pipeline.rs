//! End-to-end driver: eigenprofiles -> adaptive cover tree -> scaffolding ->
//! initial + refined dimensions -> spine -> optional Betti decoration, plus
//! a (tau, delta) sweep that reuses the cached profiles.

use std::collections::BTreeMap;

use crate::covertree::{build_adaptive_cover_tree, CoverNode, SubdivisionPolicy, DEFAULT_MAX_LEVEL};
use crate::dimension::{
    initial_dimensions, refine_dimensions, DimensionConfig, DEFAULT_MAX_PASSES,
    DEFAULT_SWEEP_STEPS,
};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::io::{GraphDocument, GraphDocumentNode, Provenance};
use crate::mlpca::{all_profiles, EigenProfile, RadiusSchedule};
use crate::scaffolding::{build_scaffolding, leaves_to_nodes, EdgeRule, Scaffolding};
use crate::spine::{build_spine, decorate_betti, Spine};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Eigenthreshold for cover-tree subdivision.
    pub tau: f64,
    /// Scaffolding distance threshold; `None` selects it automatically from
    /// zero-dimensional persistence.
    pub delta: Option<f64>,
    /// Optional persistent-H0 subdivision threshold.
    pub h0_thresh: Option<f64>,
    /// Optional higher-persistence subdivision threshold.
    pub higher_pers_thresh: Option<f64>,
    /// MLPCA radius schedule; `None` derives it from the cloud diameter.
    pub radii: Option<Vec<f64>>,
    /// Dimension-sweep radius range; `None` derives it from delta.
    pub rho_lo: Option<f64>,
    pub rho_hi: Option<f64>,
    pub dim_steps: usize,
    pub max_passes: usize,
    pub edge_rule: EdgeRule,
    /// Decorate spine vertices with persistent Betti vectors.
    pub betti: bool,
    /// Persistence cutoff for the Betti decoration; `None` uses a fraction
    /// of each vertex's diameter.
    pub betti_cutoff: Option<f64>,
    /// Seed recorded in provenance and used by callers generating input.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tau: 0.1,
            delta: None,
            h0_thresh: None,
            higher_pers_thresh: None,
            radii: None,
            rho_lo: None,
            rho_hi: None,
            dim_steps: DEFAULT_SWEEP_STEPS,
            max_passes: DEFAULT_MAX_PASSES,
            edge_rule: EdgeRule::Centers,
            betti: false,
            betti_cutoff: None,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    /// Flat key/value echo recorded in document provenance.
    pub fn to_provenance(&self) -> BTreeMap<String, String> {
        let opt = |o: Option<f64>| o.map_or("auto".to_string(), |v| v.to_string());
        let mut m = BTreeMap::new();
        m.insert("tau".into(), self.tau.to_string());
        m.insert("delta".into(), opt(self.delta));
        m.insert(
            "h0_thresh".into(),
            self.h0_thresh.map_or("off".into(), |v| v.to_string()),
        );
        m.insert(
            "higher_pers_thresh".into(),
            self.higher_pers_thresh.map_or("off".into(), |v| v.to_string()),
        );
        m.insert(
            "radii".into(),
            self.radii.as_ref().map_or("auto".into(), |r| {
                r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            }),
        );
        m.insert("rho_lo".into(), opt(self.rho_lo));
        m.insert("rho_hi".into(), opt(self.rho_hi));
        m.insert("dim_steps".into(), self.dim_steps.to_string());
        m.insert("max_passes".into(), self.max_passes.to_string());
        m.insert(
            "edge_rule".into(),
            match self.edge_rule {
                EdgeRule::Centers => "centers".into(),
                EdgeRule::Clusters => "clusters".into(),
            },
        );
        m.insert("betti".into(), self.betti.to_string());
        m.insert("betti_cutoff".into(), opt(self.betti_cutoff));
        m.insert("seed".into(), self.seed.to_string());
        m
    }

    fn schedule(&self, cloud: &PointCloud) -> Result<RadiusSchedule> {
        match &self.radii {
            Some(r) => RadiusSchedule::new(r.clone()),
            None => RadiusSchedule::default_for(cloud),
        }
    }

    fn dimension_config(&self, delta: f64) -> Result<DimensionConfig> {
        let default = DimensionConfig::default_for_delta(delta);
        DimensionConfig::new(
            self.rho_lo.unwrap_or(default.rho_lo),
            self.rho_hi.unwrap_or(default.rho_hi),
            self.dim_steps,
        )
    }
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub delta: f64,
    pub num_points: usize,
    pub num_leaves: usize,
    pub num_spine_vertices: usize,
    pub num_spine_edges: usize,
    /// Spine vertex count per dimension label.
    pub dims_histogram: BTreeMap<usize, usize>,
    /// Scaffold node ids flagged non-maximal by refinement.
    pub nonmaximal: Vec<usize>,
    pub refinement_converged: bool,
    pub warnings: Vec<String>,
}

impl PipelineSummary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("points: {}\n", self.num_points));
        out.push_str(&format!("delta: {}\n", self.delta));
        out.push_str(&format!("cover-tree leaves: {}\n", self.num_leaves));
        out.push_str(&format!(
            "spine: {} vertices, {} edges\n",
            self.num_spine_vertices, self.num_spine_edges
        ));
        for (dim, count) in &self.dims_histogram {
            out.push_str(&format!("  dim {dim}: {count} vertices\n"));
        }
        let nm: Vec<String> = self.nonmaximal.iter().map(|n| n.to_string()).collect();
        out.push_str(&format!(
            "non-maximal scaffold nodes: [{}]\n",
            nm.join(", ")
        ));
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub tree: CoverNode,
    pub scaffolding: Scaffolding,
    pub spine: Spine,
    pub scaffolding_doc: GraphDocument,
    pub spine_doc: GraphDocument,
    pub summary: PipelineSummary,
}

fn centroid(cloud: &PointCloud, indices: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; cloud.dim()];
    for &i in indices {
        for (d, x) in cloud.point(i).iter().enumerate() {
            c[d] += x;
        }
    }
    for x in &mut c {
        *x /= indices.len() as f64;
    }
    c
}

pub fn run_pipeline(
    cloud: &PointCloud,
    config: &PipelineConfig,
    input_digest: &str,
) -> Result<PipelineOutput> {
    let schedule = config.schedule(cloud).map_err(|e| e.in_stage("profiles"))?;
    let profiles = all_profiles(cloud, &schedule).map_err(|e| e.in_stage("profiles"))?;
    run_pipeline_with_profiles(cloud, config, input_digest, &schedule, &profiles)
}

/// Pipeline body with externally cached eigenprofiles (used by `sweep`).
pub fn run_pipeline_with_profiles(
    cloud: &PointCloud,
    config: &PipelineConfig,
    input_digest: &str,
    schedule: &RadiusSchedule,
    profiles: &[EigenProfile],
) -> Result<PipelineOutput> {
    let mut warnings = Vec::new();

    let mut policy = SubdivisionPolicy::new(config.tau, schedule.clone())
        .map_err(|e| e.in_stage("cover-tree"))?;
    policy.h0_thresh = config.h0_thresh;
    policy.higher_pers_thresh = config.higher_pers_thresh;
    policy.max_level = DEFAULT_MAX_LEVEL;
    let tree = build_adaptive_cover_tree(cloud, profiles, &policy)
        .map_err(|e| e.in_stage("cover-tree"))?;

    let nodes = leaves_to_nodes(&tree.leaves());
    let num_leaves = nodes.len();
    let scaffolding = build_scaffolding(nodes, cloud, config.delta, config.edge_rule)
        .map_err(|e| e.in_stage("scaffolding"))?;

    let dim_config = config
        .dimension_config(scaffolding.delta)
        .map_err(|e| e.in_stage("dimension"))?;
    let initial = initial_dimensions(&scaffolding, cloud, &dim_config);
    let refined = refine_dimensions(&scaffolding, &initial, config.max_passes);
    if !refined.converged {
        warnings.push(format!(
            "dimension refinement did not converge after {} passes",
            refined.passes
        ));
    }

    let mut scaffolding = scaffolding;
    for node in &mut scaffolding.nodes {
        node.f = Some(refined.dims[&node.id]);
        node.nonmaximal = refined.nonmaximal.contains(&node.id);
    }

    let mut spine = build_spine(&scaffolding, &refined.dims, &refined.nonmaximal)
        .map_err(|e| e.in_stage("spine"))?;
    if config.betti {
        decorate_betti(&mut spine, &scaffolding, cloud, config.betti_cutoff)
            .map_err(|e| e.in_stage("betti"))?;
    }

    let provenance = Provenance {
        config: config.to_provenance(),
        input_digest: input_digest.to_string(),
    };

    let scaffold_nodes: Vec<GraphDocumentNode> = scaffolding
        .nodes
        .iter()
        .map(|n| GraphDocumentNode {
            id: n.id,
            f: n.f,
            center: cloud.point(n.center).to_vec(),
            cluster_size: n.cluster.len(),
            point_indices: n.cluster.clone(),
            betti: None,
        })
        .collect();
    let scaffolding_doc = GraphDocument::new(
        scaffold_nodes,
        scaffolding.edges.clone(),
        provenance.clone(),
    )
    .map_err(|e| e.in_stage("export"))?;

    let spine_nodes: Vec<GraphDocumentNode> = spine
        .graph
        .vertices()
        .map(|v| {
            let points = spine.points_of(v, &scaffolding);
            GraphDocumentNode {
                id: v,
                f: Some(spine.graph.label(v)),
                center: centroid(cloud, &points),
                cluster_size: points.len(),
                point_indices: points,
                betti: spine.betti.get(&v).map(|b| [b.beta0, b.beta1, b.beta2]),
            }
        })
        .collect();
    let spine_doc = GraphDocument::new(spine_nodes, spine.graph.edges().collect(), provenance)
        .map_err(|e| e.in_stage("export"))?;

    let mut dims_histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for v in spine.graph.vertices() {
        *dims_histogram.entry(spine.graph.label(v)).or_insert(0) += 1;
    }
    let summary = PipelineSummary {
        delta: scaffolding.delta,
        num_points: cloud.len(),
        num_leaves,
        num_spine_vertices: spine.graph.num_vertices(),
        num_spine_edges: spine.graph.num_edges(),
        dims_histogram,
        nonmaximal: refined.nonmaximal.iter().copied().collect(),
        refinement_converged: refined.converged,
        warnings,
    };

    Ok(PipelineOutput {
        tree,
        scaffolding,
        spine,
        scaffolding_doc,
        spine_doc,
        summary,
    })
}

#[derive(Debug)]
pub struct SweepCell {
    pub tau: f64,
    pub delta: Option<f64>,
    pub outcome: Result<PipelineOutput>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// CSV of `(tau, delta, leaves, spine vertices, dims histogram)`; failed
    /// cells carry the error text in the histogram column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,delta,leaves,spine_vertices,dims_histogram\n");
        for cell in &self.cells {
            match &cell.outcome {
                Ok(res) => {
                    let hist: Vec<String> = res
                        .summary
                        .dims_histogram
                        .iter()
                        .map(|(d, c)| format!("{d}:{c}"))
                        .collect();
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        cell.tau,
                        res.summary.delta,
                        res.summary.num_leaves,
                        res.summary.num_spine_vertices,
                        hist.join(" ")
                    ));
                }
                Err(e) => {
                    let msg = e.to_string().replace([',', '\n'], ";");
                    out.push_str(&format!(
                        "{},{},error,error,{}\n",
                        cell.tau,
                        cell.delta.map_or("auto".to_string(), |d| d.to_string()),
                        msg
                    ));
                }
            }
        }
        out
    }
}

/// Run the pipeline for every (tau, delta) pair, computing eigenprofiles
/// once. Per-cell failures are recorded and the sweep continues.
pub fn sweep(
    cloud: &PointCloud,
    base: &PipelineConfig,
    tau_list: &[f64],
    delta_list: &[Option<f64>],
    input_digest: &str,
) -> Result<SweepResult> {
    if tau_list.is_empty() || delta_list.is_empty() {
        return Err(Error::input("sweep lists must be non-empty"));
    }
    let schedule = base.schedule(cloud).map_err(|e| e.in_stage("profiles"))?;
    let profiles = all_profiles(cloud, &schedule).map_err(|e| e.in_stage("profiles"))?;
    let mut cells = Vec::new();
    for &tau in tau_list {
        for &delta in delta_list {
            let mut config = base.clone();
            config.tau = tau;
            config.delta = delta;
            let outcome =
                run_pipeline_with_profiles(cloud, &config, input_digest, &schedule, &profiles);
            cells.push(SweepCell { tau, delta, outcome });
        }
    }
    Ok(SweepResult { cells })
}
