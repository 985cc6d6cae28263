//! Scratch: spiral-plane scale scan for the tau=0.1 / delta=2.5 target.

use std::collections::{BTreeMap, BTreeSet};

use strata_core::geometry::PointCloud;
use strata_core::pipeline::{run_pipeline, PipelineConfig};
use strata_core::synth::{generate, Shape, SynthSpec, SPIRAL_SCALE};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let scale: f64 = args[1].parse().unwrap();
    let rho_lo: Option<f64> = args.get(2).and_then(|s| s.parse().ok());
    let rho_hi: Option<f64> = args.get(3).and_then(|s| s.parse().ok());
    // profile radius r3 (r1 = r3/4, r2 = r3/2); 0 or missing = default
    let r3: Option<f64> = args.get(4).and_then(|s| s.parse().ok()).filter(|&x| x > 0.0);
    let seeds: Vec<u64> = if args.len() > 5 {
        args[5..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        (0..10).collect()
    };

    let mut passes = 0;
    for &seed in &seeds {
        let out = generate(&SynthSpec::new(Shape::SpiralPlane, seed)).unwrap();
        let pts: Vec<Vec<f64>> = out
            .cloud
            .points()
            .iter()
            .map(|p| p.iter().map(|x| x * scale / SPIRAL_SCALE).collect())
            .collect();
        let cloud = PointCloud::new(pts).unwrap();
        let config = PipelineConfig {
            tau: 0.1,
            delta: Some(2.5),
            rho_lo,
            rho_hi,
            radii: r3.map(|r| vec![r / 4.0, r / 2.0, r]),
            edge_rule: if std::env::var("SPIR_CLUSTERS").is_ok() {
                strata_core::scaffolding::EdgeRule::Clusters
            } else {
                strata_core::scaffolding::EdgeRule::Centers
            },
            seed,
            ..PipelineConfig::default()
        };
        let res = match run_pipeline(&cloud, &config, "spir") {
            Ok(r) => r,
            Err(e) => {
                println!("seed {seed}: error {e}");
                continue;
            }
        };
        // initial labels and how many 3s have connected links
        use strata_core::dimension::{initial_dimensions, DimensionConfig};
        let dcfg = DimensionConfig::new(
            rho_lo.unwrap_or(2.5),
            rho_hi.unwrap_or(5.0),
            4,
        )
        .unwrap();
        let init = initial_dimensions(&res.scaffolding, &cloud, &dcfg);
        let mut init_hist: BTreeMap<usize, usize> = BTreeMap::new();
        for v in init.values() {
            *init_hist.entry(*v).or_insert(0) += 1;
        }
        // how many init-3 nodes would flood (connected link) vs go non-maximal
        let mut floody = 0;
        let mut nm_ok = 0;
        for n in &res.scaffolding.nodes {
            if init[&n.id] != 3 {
                continue;
            }
            let link = res.scaffolding.neighbors(n.id);
            if link.is_empty() {
                continue;
            }
            // BFS over the induced subgraph on the link
            let mut seen = BTreeSet::from([link[0]]);
            let mut queue = vec![link[0]];
            while let Some(x) = queue.pop() {
                for &y in &link {
                    if !seen.contains(&y) && res.scaffolding.has_edge(x, y) {
                        seen.insert(y);
                        queue.push(y);
                    }
                }
            }
            if seen.len() == link.len() {
                floody += 1;
            } else {
                nm_ok += 1;
            }
        }
        if std::env::var("SPIR_DUMP").is_ok() {
            for n in &res.scaffolding.nodes {
                if init[&n.id] != 3 && n.f != Some(3) {
                    continue;
                }
                let c = cloud.point(n.center);
                let nl: Vec<(usize, usize)> = res
                    .scaffolding
                    .neighbors(n.id)
                    .iter()
                    .map(|&x| (x, res.scaffolding.nodes[x].f.unwrap()))
                    .collect();
                println!(
                    "  3node {} init={} f={:?} |c|={} center=[{:.1},{:.1},{:.1}] link={nl:?}",
                    n.id,
                    init[&n.id],
                    n.f,
                    n.cluster.len(),
                    c[0],
                    c[1],
                    c[2]
                );
            }
        }
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for n in &res.scaffolding.nodes {
            *hist.entry(n.f.unwrap()).or_insert(0) += 1;
        }
        let labels: BTreeSet<usize> = hist.keys().copied().collect();
        let threes_ok = res
            .scaffolding
            .nodes
            .iter()
            .filter(|n| n.f == Some(3))
            .all(|n| {
                let nl: BTreeSet<usize> = res
                    .scaffolding
                    .neighbors(n.id)
                    .iter()
                    .filter_map(|&x| res.scaffolding.nodes[x].f)
                    .collect();
                nl.contains(&1) && nl.contains(&2)
            });
        // spine-level reading of the same predicate
        let spine_labels: BTreeSet<usize> = res
            .spine
            .graph
            .vertices()
            .map(|v| res.spine.graph.label(v))
            .collect();
        let spine_threes_ok = res
            .spine
            .graph
            .vertices()
            .filter(|&v| res.spine.graph.label(v) == 3)
            .all(|v| {
                let nl: BTreeSet<usize> = res
                    .spine
                    .graph
                    .link(v)
                    .unwrap()
                    .iter()
                    .map(|&x| res.spine.graph.label(x))
                    .collect();
                nl.contains(&1) && nl.contains(&2)
            });
        let spine_pass =
            spine_labels.is_superset(&BTreeSet::from([1, 2, 3])) && spine_threes_ok;
        let pass = labels.is_superset(&BTreeSet::from([1, 2, 3])) && threes_ok;
        if pass {
            passes += 1;
        }
        println!(
            "seed {seed}: {} leaves={} init={init_hist:?} floody={floody} nm_ok={nm_ok} hist={hist:?} threes_ok={threes_ok} spine={} nm={:?}",
            if pass { "PASS" } else { "fail" },
            res.summary.num_leaves,
            if spine_pass { "PASS" } else { "fail" },
            res.summary.nonmaximal.len(),
        );
    }
    println!("scale {scale} rho ({rho_lo:?},{rho_hi:?}): {passes}/{}", seeds.len());
}
