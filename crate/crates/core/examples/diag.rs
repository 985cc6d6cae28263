//! Scratch diagnostics for parameter tuning; not part of the public surface.

use std::collections::BTreeMap;

use strata_core::geometry::euclidean_dist;
use strata_core::mlpca::{all_profiles, eigenmetric, RadiusSchedule};
use strata_core::pipeline::{run_pipeline, PipelineConfig};
use strata_core::scaffolding::EdgeRule;
use strata_core::synth::{generate, Shape, SynthSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let shape: Shape = args.get(1).map(|s| s.as_str()).unwrap_or("plane_two_lines").parse().unwrap();
    let tau: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let delta: Option<f64> = args.get(3).and_then(|s| s.parse().ok());
    let h0: Option<f64> = args.get(4).and_then(|s| s.parse().ok());
    let seed: u64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0);
    let noise: Option<f64> = args.get(6).and_then(|s| s.parse().ok());

    let mut spec = SynthSpec::new(shape, seed);
    if let Some(ns) = noise {
        spec.noise_sigma = ns;
    }
    let out = generate(&spec).unwrap();
    let cloud = &out.cloud;
    println!("shape {shape} n={} D={} diam={:.3}", cloud.len(), cloud.dim(), cloud.diameter());

    let schedule = RadiusSchedule::default_for(cloud).unwrap();
    println!("radii: {:?}", schedule.radii());
    let profiles = all_profiles(cloud, &schedule).unwrap();

    // eigenmetric stats between strata: sample a few points per stratum
    let strata: Vec<usize> = {
        let mut s: Vec<usize> = out.labels.clone();
        s.sort_unstable();
        s.dedup();
        s
    };
    for &a in &strata {
        for &b in &strata {
            if a > b {
                continue;
            }
            let pa: Vec<usize> = (0..cloud.len()).filter(|&i| out.labels[i] == a).step_by(37).take(8).collect();
            let pb: Vec<usize> = (0..cloud.len()).filter(|&i| out.labels[i] == b).step_by(41).take(8).collect();
            let mut vals = Vec::new();
            for &i in &pa {
                for &j in &pb {
                    if i != j {
                        vals.push(eigenmetric(&profiles[i], &profiles[j]).unwrap());
                    }
                }
            }
            vals.sort_by(f64::total_cmp);
            if !vals.is_empty() {
                println!(
                    "E[{a}-{b}]: min {:.4} med {:.4} max {:.4}",
                    vals[0],
                    vals[vals.len() / 2],
                    vals[vals.len() - 1]
                );
            }
        }
    }

    let config = PipelineConfig {
        tau,
        delta,
        h0_thresh: h0,
        edge_rule: EdgeRule::Clusters,
        betti: false,
        ..PipelineConfig::default()
    };
    match run_pipeline(cloud, &config, "diag") {
        Ok(res) => {
            println!(
                "tau={tau} delta={:?} h0={h0:?}: leaves={} spine: {}v {}e hist={:?} nonmax={:?} converged={}",
                delta,
                res.summary.num_leaves,
                res.summary.num_spine_vertices,
                res.summary.num_spine_edges,
                res.summary.dims_histogram,
                res.summary.nonmaximal,
                res.summary.refinement_converged,
            );
            // scaffolding label histogram and leaf size stats
            let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
            for n in &res.scaffolding.nodes {
                *hist.entry(n.f.unwrap()).or_insert(0) += 1;
            }
            println!(
                "scaffold: {} nodes {} edges, dims hist: {hist:?}",
                res.scaffolding.nodes.len(),
                res.scaffolding.edges.len()
            );
            let mut sizes: Vec<usize> = res.scaffolding.nodes.iter().map(|n| n.cluster.len()).collect();
            sizes.sort_unstable();
            println!(
                "leaf sizes: min {} med {} max {}",
                sizes[0],
                sizes[sizes.len() / 2],
                sizes[sizes.len() - 1]
            );
            // mixed-composition scaffold nodes and their labels
            use strata_core::dimension::{initial_dimensions, DimensionConfig};
            let dcfg = DimensionConfig::default_for_delta(res.scaffolding.delta);
            let init = initial_dimensions(&res.scaffolding, cloud, &dcfg);
            let mut init_hist: BTreeMap<usize, usize> = BTreeMap::new();
            for n in &res.scaffolding.nodes {
                *init_hist.entry(init[&n.id]).or_insert(0) += 1;
            }
            println!("init dims hist: {init_hist:?}");
            for n in &res.scaffolding.nodes {
                let mut h: BTreeMap<usize, usize> = BTreeMap::new();
                for &p in &n.cluster {
                    *h.entry(out.labels[p]).or_insert(0) += 1;
                }
                if init[&n.id] == 3 {
                    println!(
                        "init3 node {} center {:?} |c|={} comp {:?} refined {}{}",
                        n.id,
                        cloud.point(n.center).iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
                        n.cluster.len(),
                        h,
                        n.f.unwrap(),
                        if n.nonmaximal { " NM" } else { "" }
                    );
                }
                if h.len() > 1 || n.cluster.len() > 500 {
                    println!(
                        "mixed node {} center {:?} |c|={} comp {:?} init {} refined {}{}",
                        n.id,
                        cloud.point(n.center).iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
                        n.cluster.len(),
                        h,
                        init[&n.id],
                        n.f.unwrap(),
                        if n.nonmaximal { " NM" } else { "" }
                    );
                }
            }
            // trace refinement passes, reporting events that touch 3-labeled
            // nodes or stray 1s
            {
                let mut f: BTreeMap<usize, usize> =
                    res.scaffolding.nodes.iter().map(|n| (n.id, init[&n.id])).collect();
                for pass in 0..10 {
                    let mut changed = false;
                    let mut cands: Vec<usize> = f
                        .keys()
                        .copied()
                        .filter(|&w| {
                            res.scaffolding.neighbors(w).iter().any(|&x| f[&x] < f[&w])
                        })
                        .collect();
                    cands.sort_by_key(|&w| (std::cmp::Reverse(f[&w]), w));
                    for w in cands {
                        let link = res.scaffolding.neighbors(w);
                        if link.is_empty() {
                            continue;
                        }
                        // candidacy can lapse after earlier relabeling
                        if !link.iter().any(|&x| f[&x] < f[&w]) {
                            continue;
                        }
                        // link connectivity in induced subgraph
                        let mut seen = vec![link[0]];
                        let mut stack = vec![link[0]];
                        while let Some(v) = stack.pop() {
                            for &u in &link {
                                if !seen.contains(&u) && res.scaffolding.has_edge(v, u) {
                                    seen.push(u);
                                    stack.push(u);
                                }
                            }
                        }
                        let disconnected = seen.len() < link.len();
                        let sum: usize = link.iter().map(|x| f[x]).sum();
                        let fw = f[&w];
                        if disconnected && fw <= sum {
                            // nonmaximal; no relabel
                        } else {
                            let touches3 = fw != 3 && link.iter().any(|x| f[x] == 3);
                            let detail: Vec<String> = link
                                .iter()
                                .map(|&x| {
                                    let c = cloud.point(res.scaffolding.nodes[x].center);
                                    format!("{}:F{}@({:.2},{:.2},{:.2})", x, f[&x], c[0], c[1], c[2])
                                })
                                .collect();
                            for &x in &link {
                                if f[&x] != fw {
                                    changed = true;
                                    f.insert(x, fw);
                                }
                            }
                            if touches3 || fw == 3 {
                                let wc = cloud.point(res.scaffolding.nodes[w].center);
                                println!(
                                    "trace pass {pass}: w={w}@({:.2},{:.2},{:.2}) F={fw} relabels (disc={disconnected}, sum={sum}) link {detail:?}",
                                    wc[0], wc[1], wc[2]
                                );
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
            // geometry of junction-adjacent and 1-labeled nodes
            let mut ones = 0usize;
            for n in &res.scaffolding.nodes {
                let c = cloud.point(n.center);
                let near_junction = cloud.dim() == 3
                    && ((c[0] - 0.55).abs() < 0.4 || (c[0] + 0.55).abs() < 0.4)
                    && c[1].abs() < 0.4;
                let is_one = n.f == Some(1) && ones < 12;
                if !(near_junction || is_one) {
                    continue;
                }
                if is_one && !near_junction {
                    ones += 1;
                }
                // bounding box extents and singular values of the cluster
                let d = cloud.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                let mut mean = vec![0.0; d];
                for &p in &n.cluster {
                    for (k, &x) in cloud.point(p).iter().enumerate() {
                        lo[k] = lo[k].min(x);
                        hi[k] = hi[k].max(x);
                        mean[k] += x;
                    }
                }
                for m in &mut mean {
                    *m /= n.cluster.len() as f64;
                }
                let mut cov = vec![vec![0.0; d]; d];
                for &p in &n.cluster {
                    let pt = cloud.point(p);
                    for a in 0..d {
                        for b in 0..d {
                            cov[a][b] += (pt[a] - mean[a]) * (pt[b] - mean[b]);
                        }
                    }
                }
                let m = nalgebra::DMatrix::from_fn(d, d, |a, b| cov[a][b] / n.cluster.len() as f64);
                let mut sv: Vec<f64> = m
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .map(|&l| l.max(0.0).sqrt())
                    .collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                let ext: Vec<f64> = (0..d).map(|k| ((hi[k] - lo[k]) * 100.0).round() / 100.0).collect();
                println!(
                    "{} node {} f={:?} |c|={} center {:?} ext {:?} sv {:?}",
                    if near_junction { "JCT" } else { "ONE" },
                    n.id,
                    n.f,
                    n.cluster.len(),
                    c.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
                    ext,
                    sv.iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>()
                );
            }
            // spine adjacency with labels
            for v in res.spine.graph.vertices() {
                let nbrs: Vec<usize> = res
                    .spine
                    .graph
                    .link(v)
                    .unwrap()
                    .iter()
                    .map(|&x| res.spine.graph.label(x))
                    .collect();
                println!(
                    "spine v{} f={} |members|={} nbr-labels={:?}",
                    v,
                    res.spine.graph.label(v),
                    res.spine.membership[&v].len(),
                    nbrs
                );
            }
            // purity vs ground truth per spine vertex
            for v in res.spine.graph.vertices() {
                let pts = res.spine.points_of(v, &res.scaffolding);
                let mut h: BTreeMap<usize, usize> = BTreeMap::new();
                for &p in &pts {
                    *h.entry(out.labels[p]).or_insert(0) += 1;
                }
                println!("v{v} truth-hist {h:?}");
            }
            let _ = euclidean_dist(cloud.point(0), cloud.point(1));
        }
        Err(e) => println!("pipeline failed: {e}"),
    }
}
