//! Scratch: eigenmetric landscape probes for the plane-two-lines shape.

use strata_core::geometry::{euclidean_dist, PointCloud};
use strata_core::mlpca::{eigen_profile, eigenmetric, RadiusSchedule};
use strata_core::synth::{generate, Shape, SynthSpec};

fn nearest(cloud: &PointCloud, target: &[f64]) -> usize {
    (0..cloud.len())
        .min_by(|&a, &b| {
            euclidean_dist(cloud.point(a), target)
                .partial_cmp(&euclidean_dist(cloud.point(b), target))
                .unwrap()
        })
        .unwrap()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_plane: usize = args[1].parse().unwrap();
    let n_line: usize = args[2].parse().unwrap();
    let seed: u64 = args[3].parse().unwrap();
    let spec = SynthSpec {
        counts: Some(vec![n_plane, n_line, n_line]),
        noise_sigma: 0.01,
        ..SynthSpec::new(Shape::PlaneTwoLines, seed)
    };
    let cloud = generate(&spec).unwrap().cloud;
    let mut diam: f64 = 0.0;
    for i in 0..cloud.len() {
        diam = diam.max(euclidean_dist(cloud.point(0), cloud.point(i)));
    }
    // crude diameter doubling like the pipeline would see
    let far = (0..cloud.len())
        .max_by(|&a, &b| {
            euclidean_dist(cloud.point(0), cloud.point(a))
                .partial_cmp(&euclidean_dist(cloud.point(0), cloud.point(b)))
                .unwrap()
        })
        .unwrap();
    let mut diam2: f64 = 0.0;
    for i in 0..cloud.len() {
        diam2 = diam2.max(euclidean_dist(cloud.point(far), cloud.point(i)));
    }
    let d = diam.max(diam2);
    let schedule = RadiusSchedule::new(vec![d / 32.0, d / 16.0, d / 8.0]).unwrap();
    println!("diam={d:.3} radii={:?}", schedule.radii());

    let ph = 2.0; // synth PLANE_HALF
    let probes = [
        ("center", vec![0.0, -1.0, 0.0]),
        ("corner", vec![-ph + 0.02, -ph + 0.02, 0.0]),
        ("corner_in", vec![-ph + 0.3, -ph + 0.3, 0.0]),
        ("edge", vec![0.0, -ph + 0.02, 0.0]),
        ("edge_in", vec![0.0, -ph + 0.3, 0.0]),
        ("jplane_.15", vec![0.4 + 0.15, 0.0, 0.0]),
        ("jplane_.35", vec![0.4 + 0.35, 0.0, 0.0]),
        ("jplane_.7", vec![0.4 + 0.7, 0.0, 0.0]),
        ("stub_.1", vec![0.4, 0.0, 0.1]),
        ("stub_.3", vec![0.4, 0.0, 0.3]),
        ("line_.6", vec![0.4, 0.0, 0.6]),
        ("line_1.0", vec![0.4, 0.0, 1.0]),
        ("tip", vec![0.4, 0.0, 1.18]),
    ];
    let profs: Vec<_> = probes
        .iter()
        .map(|(name, t)| {
            let p = nearest(&cloud, t);
            (*name, eigen_profile(&cloud, p, &schedule).unwrap())
        })
        .collect();
    for i in 0..profs.len() {
        for j in i + 1..profs.len() {
            let e = eigenmetric(&profs[i].1, &profs[j].1).unwrap();
            if e > 0.05 {
                println!("E({:>10}, {:>10}) = {:.3}", profs[i].0, profs[j].0, e);
            }
        }
    }
}
