//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS/FAIL` line (visible with `--nocapture`) before
//! asserting.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata_core::audiofeat::{
    block_features, song_to_cloud, AudioParams, WavAudio, BLOCK_FEATURES, DEFAULT_BLOCK_LEN,
    DEFAULT_WINDOW, WINDOW_FEATURES,
};
use strata_core::covertree::{build_adaptive_cover_tree, check_cover_tree, SubdivisionPolicy};
use strata_core::dimension::eigengap_dimension;
use strata_core::geometry::{euclidean_dist, PointCloud};
use strata_core::homology::{betti_vector, h0_diagram, rips_persistence};
use strata_core::mlpca::{all_profiles, eigenmetric, EigenProfile, RadiusSchedule};
use strata_core::pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
use strata_core::scaffolding::EdgeRule;
use strata_core::synth::{generate, Shape, SynthSpec};

fn report(criterion: usize, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointCloud {
    let points = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    PointCloud::new(points).unwrap()
}

fn synth_cloud(shape: Shape, seed: u64) -> PointCloud {
    generate(&SynthSpec::new(shape, seed)).unwrap().cloud
}

fn run_synth(shape: Shape, seed: u64, config: &PipelineConfig) -> PipelineOutput {
    let cloud = synth_cloud(shape, seed);
    let mut config = config.clone();
    config.seed = seed;
    run_pipeline(&cloud, &config, &format!("{shape}-{seed}")).unwrap()
}

/// Spine vertices grouped by dimension label.
fn by_label(out: &PipelineOutput) -> BTreeMap<usize, Vec<usize>> {
    let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in out.spine.graph.vertices() {
        m.entry(out.spine.graph.label(v)).or_default().push(v);
    }
    m
}

fn label_counts(out: &PipelineOutput) -> BTreeMap<usize, usize> {
    by_label(out)
        .into_iter()
        .map(|(l, vs)| (l, vs.len()))
        .collect()
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_01_cover_tree_invariants() {
    let start = Instant::now();
    let taus = [1.0, 0.3, 0.1];
    let mut violations = 0usize;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(20..=500);
        let d = rng.gen_range(1..=6);
        let cloud = random_cloud(&mut rng, n, d);
        let schedule = RadiusSchedule::default_for(&cloud).unwrap();
        let profiles = all_profiles(&cloud, &schedule).unwrap();
        let mut policy =
            SubdivisionPolicy::new(taus[seed as usize % taus.len()], schedule).unwrap();
        if seed % 3 == 0 {
            policy.h0_thresh = Some(0.1);
        }
        let tree = build_adaptive_cover_tree(&cloud, &profiles, &policy).unwrap();
        violations += check_cover_tree(&tree, &cloud).len();
    }
    let pass = violations == 0;
    report(
        1,
        pass,
        &format!(
            "{violations} invariant violations over 50 clouds in {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_02_eigenmetric_pseudometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let profile = |rng: &mut ChaCha8Rng| {
        let lambdas = (0..3)
            .map(|_| {
                let mut row: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..2.0)).collect();
                row.sort_by(|a, b| b.partial_cmp(a).unwrap());
                row
            })
            .collect();
        EigenProfile { owner: 0, lambdas }
    };
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let (a, b, c) = (profile(&mut rng), profile(&mut rng), profile(&mut rng));
        let (ab, ba) = (eigenmetric(&a, &b).unwrap(), eigenmetric(&b, &a).unwrap());
        let (bc, ac) = (eigenmetric(&b, &c).unwrap(), eigenmetric(&a, &c).unwrap());
        if ab != ba || eigenmetric(&a, &a).unwrap() != 0.0 || ac > ab + bc + 1e-9 {
            failures += 1;
        }
    }
    let pass = failures == 0;
    report(2, pass, &format!("{failures} failures over 10000 triples"));
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 3

fn single_linkage_merges(cloud: &PointCloud) -> Vec<f64> {
    let mut clusters: Vec<Vec<usize>> = (0..cloud.len()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let (mut bi, mut bj, mut bd) = (0usize, 1usize, f64::INFINITY);
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let mut d = f64::INFINITY;
                for &a in &clusters[i] {
                    for &b in &clusters[j] {
                        d = d.min(euclidean_dist(cloud.point(a), cloud.point(b)));
                    }
                }
                if d < bd {
                    (bi, bj, bd) = (i, j, d);
                }
            }
        }
        merges.push(bd);
        let moved = clusters.remove(bj);
        clusters[bi].extend(moved);
    }
    merges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    merges
}

#[test]
fn criterion_03_h0_oracle_equivalence() {
    let mut mismatches = 0usize;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.gen_range(2..=64);
        let d = rng.gen_range(1..=4);
        let cloud = random_cloud(&mut rng, n, d);
        let mut deaths: Vec<f64> = h0_diagram(&cloud)
            .dots
            .iter()
            .filter(|(_, dth)| dth.is_finite())
            .map(|&(_, dth)| dth)
            .collect();
        deaths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let merges = single_linkage_merges(&cloud);
        if deaths.len() != merges.len()
            || deaths
                .iter()
                .zip(&merges)
                .any(|(&d, &m)| (d - m / 2.0).abs() > 1e-12)
        {
            mismatches += 1;
        }
    }
    let pass = mismatches == 0;
    report(3, pass, &format!("{mismatches} mismatches over 100 clouds"));
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_04_rips_sanity() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let circle: Vec<Vec<f64>> = (0..100)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 100.0
                + rng.gen_range(-0.01..0.01);
            let r = 1.0 + rng.gen_range(-0.02..0.02);
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    let circle = PointCloud::new(circle).unwrap();
    let diags = rips_persistence(&circle, 2, 0.6, 2_000_000).unwrap();
    let big_h1 = diags[1]
        .dots
        .iter()
        .filter(|(b, d)| d - b > 0.3)
        .count();
    let bv = betti_vector(&diags, 0.2).unwrap();
    let circle_ok = big_h1 == 1 && (bv.beta0, bv.beta1, bv.beta2) == (1, 1, 0);

    let sphere: Vec<Vec<f64>> = (0..200)
        .map(|_| {
            loop {
                let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-3 {
                    return v.iter().map(|x| x / norm).collect();
                }
            }
        })
        .collect();
    let sphere = PointCloud::new(sphere).unwrap();
    let diags = rips_persistence(&sphere, 2, 0.5, 2_000_000).unwrap();
    let bv_s = betti_vector(&diags, 0.2).unwrap();
    let sphere_ok = (bv_s.beta0, bv_s.beta1, bv_s.beta2) == (1, 0, 1);

    let pass = circle_ok && sphere_ok;
    report(
        4,
        pass,
        &format!(
            "circle: {big_h1} persistent H1 dot(s), betti ({},{},{}); sphere betti ({},{},{})",
            bv.beta0, bv.beta1, bv.beta2, bv_s.beta0, bv_s.beta1, bv_s.beta2
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_05_eigengap_units() {
    let mut ok = eigengap_dimension(&[1.0, 0.9, 0.05]).unwrap() == 2;
    let eps = 1e-9;
    ok &= eigengap_dimension(&[1.0, eps, eps]).unwrap() == 1;
    let vectors: [&[f64]; 4] = [
        &[1.0, 0.9, 0.05],
        &[1.0, 0.5, 0.4, 0.39],
        &[2.0, 2.0, 0.1],
        &[5.0],
    ];
    for sigma in vectors {
        let base = eigengap_dimension(sigma).unwrap();
        for c in [1e-6, 0.5, 3.0, 1e9] {
            let scaled: Vec<f64> = sigma.iter().map(|x| x * c).collect();
            ok &= eigengap_dimension(&scaled).unwrap() == base;
        }
    }
    report(5, ok, "gap positions and scale invariance");
    assert!(ok);
}

// ---------------------------------------------------------------- criterion 6

/// One 2-vertex, four 1-vertices, two 3-vertices; each 3-vertex adjacent to
/// the 2-vertex and exactly two 1-vertices.
fn fig6_predicate(out: &PipelineOutput) -> bool {
    let groups = by_label(out);
    let counts: BTreeMap<usize, usize> =
        groups.iter().map(|(&l, vs)| (l, vs.len())).collect();
    if counts != BTreeMap::from([(1, 4), (2, 1), (3, 2)]) {
        return false;
    }
    let two = groups[&2][0];
    groups[&3].iter().all(|&v| {
        let link = out.spine.graph.link(v).unwrap();
        let n1 = link
            .iter()
            .filter(|&&x| out.spine.graph.label(x) == 1)
            .count();
        link.contains(&two) && n1 == 2
    })
}

#[test]
fn criterion_06_fig6_plane_two_lines() {
    let config = PipelineConfig {
        tau: 0.1,
        delta: Some(0.05),
        h0_thresh: Some(0.05),
        edge_rule: EdgeRule::Clusters,
        ..PipelineConfig::default()
    };
    let mut passes = 0usize;
    let mut slow = 0usize;
    for seed in 0..10u64 {
        let start = Instant::now();
        let out = run_synth(Shape::PlaneTwoLines, seed, &config);
        if start.elapsed().as_secs_f64() >= 60.0 {
            slow += 1;
        }
        if fig6_predicate(&out) {
            passes += 1;
        } else {
            println!("  seed {seed}: labels {:?}", label_counts(&out));
        }
    }
    let pass = passes >= 8 && slow == 0;
    report(
        6,
        pass,
        &format!("{passes}/10 seeds matched the Hasse diagram, {slow} over 60s"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn criterion_07_spiral_plane() {
    let config = PipelineConfig {
        tau: 0.1,
        delta: Some(2.5),
        ..PipelineConfig::default()
    };
    let mut passes = 0usize;
    for seed in 0..10u64 {
        let out = run_synth(Shape::SpiralPlane, seed, &config);
        let labels: BTreeSet<usize> = out
            .scaffolding
            .nodes
            .iter()
            .filter_map(|n| n.f)
            .collect();
        let threes_ok = out
            .scaffolding
            .nodes
            .iter()
            .filter(|n| n.f == Some(3))
            .all(|n| {
                let nbr_labels: BTreeSet<usize> = out
                    .scaffolding
                    .neighbors(n.id)
                    .iter()
                    .filter_map(|&x| out.scaffolding.nodes[x].f)
                    .collect();
                nbr_labels.contains(&1) && nbr_labels.contains(&2)
            });
        if labels.is_superset(&BTreeSet::from([1, 2, 3])) && threes_ok {
            passes += 1;
        } else {
            println!("  seed {seed}: labels {labels:?}, threes_ok {threes_ok}");
        }
    }
    let pass = passes >= 8;
    report(7, pass, &format!("{passes}/10 seeds"));
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_08_planes_in_r4() {
    let config = PipelineConfig {
        tau: 0.5,
        delta: Some(0.18),
        ..PipelineConfig::default()
    };
    let mut passes = 0usize;
    for seed in 0..10u64 {
        let out = run_synth(Shape::PlanesR4, seed, &config);
        let groups = by_label(&out);
        let counts = label_counts(&out);
        let star = counts == BTreeMap::from([(2, 2), (3, 1), (4, 1)]) && {
            let four = groups[&4][0];
            let hub_ok = out.spine.graph.link(four).unwrap().len() == 3
                && out.spine.graph.num_edges() == 3;
            let no_23 = groups[&2].iter().all(|&a| {
                !out.spine.graph.has_edge(a, groups[&3][0])
            });
            hub_ok && no_23
        };
        if star {
            passes += 1;
        } else {
            println!("  seed {seed}: labels {counts:?}");
        }
    }
    let pass = passes >= 8;
    report(8, pass, &format!("{passes}/10 seeds"));
    assert!(pass);
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn criterion_09_lollipops() {
    let config = PipelineConfig {
        tau: 0.001,
        delta: Some(0.1),
        betti: true,
        ..PipelineConfig::default()
    };
    let mut passes = 0usize;
    for seed in 0..10u64 {
        let out = run_synth(Shape::LollipopsR6, seed, &config);
        let nm3 = out
            .spine
            .graph
            .vertices()
            .filter(|&v| out.spine.graph.label(v) == 3 && out.spine.nonmaximal.contains(&v))
            .count();
        let loops = out
            .spine
            .betti
            .values()
            .filter(|b| b.beta1 == 1)
            .count();
        if nm3 == 1 && loops >= 3 {
            passes += 1;
        } else {
            println!(
                "  seed {seed}: {nm3} non-maximal 3-vertices, {loops} beta1=1 vertices, labels {:?}",
                label_counts(&out)
            );
        }
    }
    let pass = passes >= 7;
    report(9, pass, &format!("{passes}/10 seeds"));
    assert!(pass);
}

// --------------------------------------------------------------- criterion 10

#[test]
fn criterion_10_sphere_curve_betti() {
    let config = PipelineConfig {
        tau: 0.001,
        delta: Some(0.1),
        betti: true,
        ..PipelineConfig::default()
    };
    let mut passes = 0usize;
    for seed in 0..10u64 {
        let out = run_synth(Shape::SphereCurve, seed, &config);
        let has = |label: usize, betti: (usize, usize, usize)| {
            out.spine.graph.vertices().any(|v| {
                out.spine.graph.label(v) == label
                    && out
                        .spine
                        .betti
                        .get(&v)
                        .is_some_and(|b| (b.beta0, b.beta1, b.beta2) == betti)
            })
        };
        if has(2, (1, 0, 1)) && has(1, (1, 0, 0)) {
            passes += 1;
        } else {
            let desc: Vec<String> = out
                .spine
                .graph
                .vertices()
                .map(|v| {
                    let b = &out.spine.betti[&v];
                    format!(
                        "f={} b=({},{},{})",
                        out.spine.graph.label(v),
                        b.beta0,
                        b.beta1,
                        b.beta2
                    )
                })
                .collect();
            println!("  seed {seed}: {desc:?}");
        }
    }
    let pass = passes >= 8;
    report(10, pass, &format!("{passes}/10 seeds"));
    assert!(pass);
}

// --------------------------------------------------------------- criterion 11

/// 10 s harmonic texture A | 10 s white noise | 10 s texture A, 44.1 kHz.
fn synth_wav(rate: u32) -> WavAudio {
    let seg = 10 * rate as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut samples = Vec::with_capacity(3 * seg);
    let texture = |i: usize| {
        let t = i as f64 / rate as f64;
        (1..=6)
            .map(|k| {
                (0.4 / k as f64) * (2.0 * std::f64::consts::PI * 220.0 * k as f64 * t).sin()
            })
            .sum::<f64>()
    };
    for i in 0..seg {
        samples.push(texture(i));
    }
    for _ in 0..seg {
        samples.push(rng.gen_range(-0.5..0.5));
    }
    for i in 0..seg {
        samples.push(texture(seg * 2 + i));
    }
    WavAudio::new(samples, rate).unwrap()
}

#[test]
fn criterion_11_audio_pipeline() {
    // block-count formula spot check: W = 160, block 150, hop 1 -> 11
    let windows = vec![vec![0.0; WINDOW_FEATURES]; 160];
    let rms = vec![1.0; 160];
    let formula_ok = block_features(&windows, &rms, 150, 1).unwrap().len() == 11;

    let rate = 44_100u32;
    let audio = synth_wav(rate);
    let params = AudioParams::default();
    let out = song_to_cloud(&audio, &params).unwrap();
    let num_windows = audio.samples.len() / DEFAULT_WINDOW;
    let expected_blocks = (num_windows - DEFAULT_BLOCK_LEN) + 1;
    let dims_ok = out.cloud.dim() == BLOCK_FEATURES;
    let count_ok = out.cloud.len() == expected_blocks;

    // per-window segment: A windows fully inside a texture segment
    let seg = 10 * rate as usize;
    let window_segment = |w: usize| -> Option<usize> {
        let (lo, hi) = (w * DEFAULT_WINDOW, (w + 1) * DEFAULT_WINDOW);
        for (s, range) in [(0, 0..seg), (1, seg..2 * seg), (2, 2 * seg..3 * seg)] {
            if range.contains(&lo) && range.contains(&(hi - 1)) {
                return Some(s);
            }
        }
        None
    };
    let block_segment = |start: usize| -> Option<usize> {
        let first = window_segment(start)?;
        (start..start + DEFAULT_BLOCK_LEN)
            .all(|w| window_segment(w) == Some(first))
            .then_some(first)
    };
    let pure: Vec<Option<usize>> = (0..expected_blocks).map(block_segment).collect();
    // texture-A blocks not within 1 block of a boundary-straddling block
    let eligible_a: Vec<usize> = (0..expected_blocks)
        .filter(|&b| {
            matches!(pure[b], Some(0) | Some(2))
                && (b == 0 || pure[b - 1].is_some())
                && (b + 1 == expected_blocks || pure[b + 1].is_some())
        })
        .collect();
    let noise_blocks: BTreeSet<usize> = (0..expected_blocks)
        .filter(|&b| pure[b] == Some(1))
        .collect();

    let config = PipelineConfig {
        tau: 0.1,
        delta: None,
        edge_rule: EdgeRule::Clusters,
        ..PipelineConfig::default()
    };
    let run = run_pipeline(&out.cloud, &config, "audio").unwrap();
    let mut vertex_of = vec![usize::MAX; out.cloud.len()];
    for node in &run.spine_doc.nodes {
        for &i in &node.point_indices {
            vertex_of[i] = node.id;
        }
    }
    let noisy_vertices: BTreeSet<usize> =
        noise_blocks.iter().map(|&b| vertex_of[b]).collect();
    let clean = eligible_a
        .iter()
        .filter(|&&b| !noisy_vertices.contains(&vertex_of[b]))
        .count();
    let sep_ok = clean * 10 >= eligible_a.len() * 9;

    let pass = formula_ok && dims_ok && count_ok && sep_ok;
    report(
        11,
        pass,
        &format!(
            "dim {} blocks {} (expected {expected_blocks}), {clean}/{} texture-A blocks separated",
            out.cloud.dim(),
            out.cloud.len(),
            eligible_a.len()
        ),
    );
    assert!(pass);
}

// --------------------------------------------------------------- criterion 12

#[test]
fn criterion_12_determinism() {
    let config = PipelineConfig {
        tau: 0.1,
        delta: Some(2.5),
        betti: true,
        ..PipelineConfig::default()
    };
    let a = run_synth(Shape::SpiralPlane, 3, &config);
    let b = run_synth(Shape::SpiralPlane, 3, &config);
    let pass = a.scaffolding_doc.to_json().unwrap() == b.scaffolding_doc.to_json().unwrap()
        && a.spine_doc.to_json().unwrap() == b.spine_doc.to_json().unwrap();
    report(12, pass, "byte-identical scaffolding and spine documents");
    assert!(pass);
}
