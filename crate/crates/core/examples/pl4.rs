//! Scratch: planes-in-R4 scale scan for the tau=0.5 / delta=0.18 target.

use std::collections::BTreeMap;

use strata_core::geometry::PointCloud;
use strata_core::pipeline::{run_pipeline, PipelineConfig};
use strata_core::scaffolding::EdgeRule;
use strata_core::synth::{generate, Shape, SynthSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let scale: f64 = args[1].parse().unwrap();
    // radius multiplier over the default diam/32,16,8 schedule; 0 = default
    let k: f64 = args[2].parse().unwrap();
    let n2: usize = args[3].parse().unwrap();
    let n3: usize = args[4].parse().unwrap();
    let seeds: Vec<u64> = if args.len() > 5 {
        args[5..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        (0..10).collect()
    };

    let mut passes = 0;
    for &seed in &seeds {
        let out = generate(&SynthSpec {
            counts: Some(vec![n2, n3]),
            ..SynthSpec::new(Shape::PlanesR4, seed)
        })
        .unwrap();
        let pts: Vec<Vec<f64>> = out
            .cloud
            .points()
            .iter()
            .map(|p| p.iter().map(|x| x * scale).collect())
            .collect();
        let cloud = PointCloud::new(pts).unwrap();
        let diam = {
            let far = |from: usize| {
                (0..cloud.len())
                    .max_by(|&a, &b| {
                        strata_core::geometry::euclidean_dist(cloud.point(from), cloud.point(a))
                            .partial_cmp(&strata_core::geometry::euclidean_dist(
                                cloud.point(from),
                                cloud.point(b),
                            ))
                            .unwrap()
                    })
                    .unwrap()
            };
            let a = far(0);
            let b = far(a);
            strata_core::geometry::euclidean_dist(cloud.point(a), cloud.point(b))
        };
        let config = PipelineConfig {
            tau: 0.5,
            delta: Some(0.18),
            radii: if k > 0.0 {
                Some(vec![k * diam / 32.0, k * diam / 16.0, k * diam / 8.0])
            } else {
                None
            },
            edge_rule: if std::env::var("PL4_CENTERS").is_ok() {
                EdgeRule::Centers
            } else {
                EdgeRule::Clusters
            },
            seed,
            ..PipelineConfig::default()
        };
        let res = match run_pipeline(&cloud, &config, "pl4") {
            Ok(r) => r,
            Err(e) => {
                println!("seed {seed}: error {e}");
                continue;
            }
        };
        use strata_core::dimension::{initial_dimensions, DimensionConfig};
        let dcfg = DimensionConfig::new(
            std::env::var("PL4_RLO").ok().and_then(|v| v.parse().ok()).unwrap_or(0.18),
            std::env::var("PL4_RHI").ok().and_then(|v| v.parse().ok()).unwrap_or(0.36),
            4,
        )
        .unwrap();
        let init = initial_dimensions(&res.scaffolding, &cloud, &dcfg);
        let mut init_hist: BTreeMap<usize, usize> = BTreeMap::new();
        for v in init.values() {
            *init_hist.entry(*v).or_insert(0) += 1;
        }
        let mut fhist: BTreeMap<usize, usize> = BTreeMap::new();
        for n in &res.scaffolding.nodes {
            *fhist.entry(n.f.unwrap()).or_insert(0) += 1;
        }
        if std::env::var("PL4_DUMP").is_ok() {
            for n in &res.scaffolding.nodes {
                let c = cloud.point(n.center);
                println!(
                    "    node {} init={} f={:?} |c|={} center=[{:.2},{:.2},{:.2},{:.2}] nbrs={:?}",
                    n.id,
                    init[&n.id],
                    n.f,
                    n.cluster.len(),
                    c[0],
                    c[1],
                    c[2],
                    c[3],
                    res.scaffolding.neighbors(n.id)
                );
            }
        }
        let g = &res.spine.graph;
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for v in g.vertices() {
            *hist.entry(g.label(v)).or_insert(0) += 1;
        }
        let fours: Vec<_> = g.vertices().filter(|&v| g.label(v) == 4).collect();
        let star = hist == BTreeMap::from([(2, 2), (3, 1), (4, 1)])
            && fours.len() == 1
            && g.link(fours[0]).unwrap().len() == 3
            && g.vertices().all(|v| {
                g.label(v) == 4
                    || g
                        .link(v)
                        .unwrap()
                        .iter()
                        .all(|&w| g.label(w) == 4)
            });
        if star {
            passes += 1;
        }
        println!(
            "seed {seed}: {} leaves={} init={init_hist:?} fhist={fhist:?} spine={hist:?} sedges={} edges={} nm={} conv={}",
            if star { "PASS" } else { "fail" },
            res.summary.num_leaves,
            res.scaffolding.edges.len(),
            g.num_edges(),
            res.summary.nonmaximal.len(),
            res.summary.refinement_converged,
        );
    }
    println!("scale {scale}: {passes}/{}", seeds.len());
}
