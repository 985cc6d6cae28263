//! Scratch parameter sweep for the plane-two-lines structural target;
//! not part of the public surface.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use strata_core::geometry::PointCloud;
use strata_core::pipeline::{run_pipeline, PipelineConfig};
use strata_core::scaffolding::EdgeRule;

/// plane_half <= 0 selects the real generator (synth::generate) with the
/// shape's built-in geometry; only counts and noise are taken from the args.
fn build(
    plane_half: f64,
    line_half: f64,
    line_x: f64,
    n_plane: usize,
    n_line: usize,
    noise: f64,
    seed: u64,
) -> PointCloud {
    if plane_half <= 0.0 {
        let spec = strata_core::synth::SynthSpec {
            counts: Some(vec![n_plane, n_line, n_line]),
            noise_sigma: noise,
            ..strata_core::synth::SynthSpec::new(strata_core::synth::Shape::PlaneTwoLines, seed)
        };
        return strata_core::synth::generate(&spec).unwrap().cloud;
    }
    let mut data = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let normal = Normal::new(0.0, noise).unwrap();
    // disk of the same area as the (2*plane_half)^2 square
    let disk_r = 2.0 * plane_half / std::f64::consts::PI.sqrt();
    for _ in 0..n_plane {
        let r = disk_r * rng.gen_range(0.0f64..1.0).sqrt();
        let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        data.push(vec![r * phi.cos(), r * phi.sin(), 0.0]);
    }
    for sx in [-1.0f64, 1.0] {
        for _ in 0..n_line {
            let z = rng.gen_range(-line_half..line_half);
            data.push(vec![sx * line_x, 0.0, z]);
        }
    }
    if noise > 0.0 {
        for p in &mut data {
            for v in p.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
    }
    PointCloud::new(data).unwrap()
}

/// true iff the spine is the Fig-6 Hasse diagram: one 2, four 1s, two 3s,
/// each 3 adjacent to the 2 and exactly two 1s.
fn fig6_predicate(res: &strata_core::pipeline::PipelineOutput) -> (bool, String) {
    let g = &res.spine.graph;
    let mut hist: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in g.vertices() {
        hist.entry(g.label(v)).or_default().push(v);
    }
    let shape: BTreeMap<usize, usize> = hist.iter().map(|(k, v)| (*k, v.len())).collect();
    let desc = format!("{shape:?} {}e", g.edges().count());
    let ok_counts = shape == BTreeMap::from([(1, 4), (2, 1), (3, 2)]);
    if !ok_counts {
        return (false, desc);
    }
    let two = hist[&2][0];
    let mut ok = true;
    for &t in &hist[&3] {
        let link = g.link(t).unwrap();
        let n1 = link.iter().filter(|&&x| g.label(x) == 1).count();
        if !(n1 == 2 && link.contains(&two)) {
            ok = false;
        }
    }
    (ok, desc)
}

fn main() {
    let a: Vec<String> = std::env::args().collect();
    let plane_half: f64 = a[1].parse().unwrap();
    let line_half: f64 = a[2].parse().unwrap();
    let line_x: f64 = a[3].parse().unwrap();
    let n_plane: usize = a[4].parse().unwrap();
    let n_line: usize = a[5].parse().unwrap();
    let noise: f64 = a[6].parse().unwrap();
    let seeds: Vec<u64> = a[7..].iter().map(|s| s.parse().unwrap()).collect();

    let config = PipelineConfig {
        tau: 0.1,
        delta: Some(0.05),
        h0_thresh: Some(0.05),
        edge_rule: EdgeRule::Clusters,
        betti: false,
        ..PipelineConfig::default()
    };
    let mut passes = 0;
    for &seed in &seeds {
        let cloud = build(plane_half, line_half, line_x, n_plane, n_line, noise, seed);
        let t0 = std::time::Instant::now();
        match run_pipeline(&cloud, &config, "sweep") {
            Ok(res) => {
                let (ok, desc) = fig6_predicate(&res);
                if ok {
                    passes += 1;
                }
                println!(
                    "seed {seed}: {} spine {desc} leaves={} ({:.0}s)",
                    if ok { "PASS" } else { "fail" },
                    res.summary.num_leaves,
                    t0.elapsed().as_secs_f64()
                );
                if !ok {
                    // scaffold-level: init labels, refinement trace
                    use strata_core::dimension::{initial_dimensions, DimensionConfig};
                    let dcfg = DimensionConfig::default_for_delta(res.scaffolding.delta);
                    let init = initial_dimensions(&res.scaffolding, &cloud, &dcfg);
                    let mut ih: BTreeMap<usize, usize> = BTreeMap::new();
                    let mut fh: BTreeMap<usize, usize> = BTreeMap::new();
                    for n in &res.scaffolding.nodes {
                        *ih.entry(init[&n.id]).or_insert(0) += 1;
                        *fh.entry(n.f.unwrap()).or_insert(0) += 1;
                    }
                    println!("  scaffold init={ih:?} refined={fh:?} NM={:?}", res.summary.nonmaximal);
                    for n in &res.scaffolding.nodes {
                        if init[&n.id] == 3 || n.f == Some(3) {
                            let c = cloud.point(n.center);
                            println!(
                                "  node {} init={} final={}{} |c|={} c=({:.2},{:.2},{:.2})",
                                n.id,
                                init[&n.id],
                                n.f.unwrap(),
                                if n.nonmaximal { " NM" } else { "" },
                                n.cluster.len(),
                                c[0], c[1], c[2]
                            );
                        }
                    }
                    // decomposition around the junctions
                    for n in &res.scaffolding.nodes {
                        let c = cloud.point(n.center);
                        if !((c[0].abs() - line_x).abs() < 0.45 && c[1].abs() < 0.45 && c[2].abs() < 0.6) {
                            continue;
                        }
                        let truth = |i: usize| if i < n_plane { 0 } else { 1 + (i - n_plane) / n_line };
                        let mut h: BTreeMap<usize, usize> = BTreeMap::new();
                        let mut lo = [f64::INFINITY; 3];
                        let mut hi = [f64::NEG_INFINITY; 3];
                        for &p in &n.cluster {
                            *h.entry(truth(p)).or_insert(0) += 1;
                            for k in 0..3 {
                                lo[k] = lo[k].min(cloud.point(p)[k]);
                                hi[k] = hi[k].max(cloud.point(p)[k]);
                            }
                        }
                        let ext: Vec<f64> = (0..3)
                            .map(|k| ((hi[k] - lo[k]) * 100.0).round() / 100.0)
                            .collect();
                        use strata_core::dimension::eigengap_dimension;
                        use strata_core::mlpca::covariance_eigenvalues;
                        let own = {
                            let eig = covariance_eigenvalues(&cloud, &n.cluster);
                            let sigma: Vec<f64> = eig.iter().map(|x| x.sqrt()).collect();
                            eigengap_dimension(&sigma).unwrap_or(0)
                        };
                        // per-radius pooled votes, mirroring initial_dimensions
                        let mut votes: Vec<(usize, Vec<usize>)> = Vec::new();
                        for &rho in &dcfg.radii() {
                            let mut union: Vec<usize> = Vec::new();
                            let mut mates: Vec<usize> = Vec::new();
                            for w in &res.scaffolding.nodes {
                                let d = strata_core::geometry::euclidean_dist(
                                    cloud.point(n.center),
                                    cloud.point(w.center),
                                );
                                if w.id == n.id || d <= rho {
                                    union.extend(&w.cluster);
                                    if w.id != n.id {
                                        mates.push(w.id);
                                    }
                                }
                            }
                            let eig = covariance_eigenvalues(&cloud, &union);
                            let sigma: Vec<f64> = eig.iter().map(|x| x.sqrt()).collect();
                            votes.push((eigengap_dimension(&sigma).unwrap_or(0), mates));
                        }
                        println!(
                            "  jct node {} init={} own={own} votes={votes:?} final={}{} |c|={} c=({:.2},{:.2},{:.2}) ext={ext:?} truth={h:?} nbrs={:?}",
                            n.id,
                            init[&n.id],
                            n.f.unwrap(),
                            if n.nonmaximal { " NM" } else { "" },
                            n.cluster.len(),
                            c[0], c[1], c[2],
                            res.scaffolding.neighbors(n.id).iter().map(|&x| res.scaffolding.nodes[x].f.unwrap()).collect::<Vec<_>>()
                        );
                    }
                    // replay refinement, printing relabel events
                    let mut f: BTreeMap<usize, usize> =
                        res.scaffolding.nodes.iter().map(|n| (n.id, init[&n.id])).collect();
                    let mut nm: std::collections::BTreeSet<usize> = Default::default();
                    for pass in 0..10 {
                        let mut changed = false;
                        let mut cands: Vec<usize> = f
                            .keys()
                            .copied()
                            .filter(|&w| {
                                !nm.contains(&w)
                                    && res.scaffolding.neighbors(w).iter().any(|&x| f[&x] < f[&w])
                            })
                            .collect();
                        cands.sort_by_key(|&w| (std::cmp::Reverse(f[&w]), std::cmp::Reverse(w)));
                        for w in cands {
                            let link = res.scaffolding.neighbors(w);
                            if link.is_empty() || !link.iter().any(|&x| f[&x] < f[&w]) {
                                continue;
                            }
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
                                nm.insert(w);
                            } else {
                                let before: Vec<(usize, usize)> = link
                                    .iter()
                                    .filter(|&&x| f[&x] != fw && !nm.contains(&x))
                                    .map(|&x| (x, f[&x]))
                                    .collect();
                                for &x in &link {
                                    if f[&x] != fw && !nm.contains(&x) {
                                        changed = true;
                                        f.insert(x, fw);
                                    }
                                }
                                if !before.is_empty() && (fw == 3 || before.iter().any(|&(_, o)| o == 3) || before.len() > 2) {
                                    println!(
                                        "  trace p{pass}: w={w} F={fw} link={} changed={before:?}",
                                        link.len()
                                    );
                                }
                            }
                        }
                        if !changed {
                            break;
                        }
                    }
                    let g = &res.spine.graph;
                    for v in g.vertices() {
                        let pts = res.spine.points_of(v, &res.scaffolding);
                        let truth = |i: usize| if i < n_plane { 0 } else { 1 + (i - n_plane) / n_line };
                        let mut h: BTreeMap<usize, usize> = BTreeMap::new();
                        let mut cx = [0.0; 3];
                        for &p in &pts {
                            *h.entry(truth(p)).or_insert(0) += 1;
                            for k in 0..3 {
                                cx[k] += cloud.point(p)[k];
                            }
                        }
                        for c in &mut cx {
                            *c /= pts.len().max(1) as f64;
                        }
                        let nbrs: Vec<usize> =
                            g.link(v).unwrap().iter().map(|&x| g.label(x)).collect();
                        let mem: Vec<usize> =
                            res.spine.membership[&v].iter().copied().take(12).collect();
                        println!(
                            "  v{v} f={} |m|={} |pts|={} c=({:.2},{:.2},{:.2}) truth={h:?} nbrs={nbrs:?}{} mem~{mem:?}",
                            g.label(v),
                            res.spine.membership[&v].len(),
                            pts.len(),
                            cx[0],
                            cx[1],
                            cx[2],
                            if res.spine.nonmaximal.contains(&v) { " NM" } else { "" }
                        );
                    }
                }
            }
            Err(e) => println!("seed {seed}: ERROR {e}"),
        }
    }
    println!("== {passes}/{} pass", seeds.len());
}
