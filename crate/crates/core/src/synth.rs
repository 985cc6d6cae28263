//! Deterministic generators for the synthetic stratified models used in the
//! experiments: spheres with attached curves, spirals through planes, planes
//! pierced by lines, orthogonal lollipops in R^6 and intersecting planes in
//! R^4. Every generator is seed-deterministic and emits a ground-truth
//! stratum label per point for evaluation only.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    SphereCurve,
    SpiralPlane,
    PlaneTwoLines,
    PlaneOneLine,
    LollipopsR6,
    PlanesR4,
}

impl Shape {
    pub const ALL: [Shape; 6] = [
        Shape::SphereCurve,
        Shape::SpiralPlane,
        Shape::PlaneTwoLines,
        Shape::PlaneOneLine,
        Shape::LollipopsR6,
        Shape::PlanesR4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::SphereCurve => "sphere_curve",
            Shape::SpiralPlane => "spiral_plane",
            Shape::PlaneTwoLines => "plane_two_lines",
            Shape::PlaneOneLine => "plane_one_line",
            Shape::LollipopsR6 => "lollipops_r6",
            Shape::PlanesR4 => "planes_r4",
        }
    }

    pub fn ambient_dim(self) -> usize {
        match self {
            Shape::SphereCurve | Shape::SpiralPlane => 3,
            Shape::PlaneTwoLines | Shape::PlaneOneLine => 3,
            Shape::LollipopsR6 => 6,
            Shape::PlanesR4 => 4,
        }
    }

    /// Default per-stratum point counts; see each generator for the
    /// stratum order.
    pub fn default_counts(self) -> Vec<usize> {
        match self {
            Shape::SphereCurve => vec![800, 200],
            Shape::SpiralPlane => vec![300, 800],
            Shape::PlaneTwoLines => vec![22400, 1500, 1500],
            Shape::PlaneOneLine => vec![22400, 1500],
            Shape::LollipopsR6 => vec![2000, 2000, 2000],
            Shape::PlanesR4 => vec![1000, 3000],
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name() == s)
            .ok_or_else(|| Error::input(format!("unknown shape: {s}")))
    }
}

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub shape: Shape,
    /// Per-stratum point counts; `None` uses the shape's defaults.
    pub counts: Option<Vec<usize>>,
    /// Isotropic Gaussian noise scale added in the ambient space.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(shape: Shape, seed: u64) -> Self {
        SynthSpec {
            shape,
            counts: None,
            noise_sigma: 0.01,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub cloud: PointCloud,
    /// Ground-truth stratum index per point, for evaluation only.
    pub labels: Vec<usize>,
}

/// One RNG per stratum so strata could be generated in parallel without
/// changing the output.
fn stratum_rng(seed: u64, stratum: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ stratum as u64)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    if spec.noise_sigma < 0.0 {
        return Err(Error::input("noise_sigma must be non-negative"));
    }
    let counts = match &spec.counts {
        Some(c) => c.clone(),
        None => spec.shape.default_counts(),
    };
    let expected = spec.shape.default_counts().len();
    if counts.len() != expected {
        return Err(Error::input(format!(
            "shape {} takes {} stratum counts, got {}",
            spec.shape,
            expected,
            counts.len()
        )));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::input("stratum counts must be positive"));
    }

    let dim = spec.shape.ambient_dim();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(counts.iter().sum());
    let mut labels: Vec<usize> = Vec::with_capacity(points.capacity());
    for (stratum, &count) in counts.iter().enumerate() {
        let mut rng = stratum_rng(spec.seed, stratum);
        for _ in 0..count {
            let mut p = sample_stratum(spec.shape, stratum, &mut rng);
            debug_assert_eq!(p.len(), dim);
            if spec.noise_sigma > 0.0 {
                for x in &mut p {
                    *x += spec.noise_sigma * gaussian(&mut rng);
                }
            }
            points.push(p);
            labels.push(stratum);
        }
    }
    Ok(SynthOutput {
        cloud: PointCloud::new(points)?,
        labels,
    })
}

/// Half-extent of the square plane (and line half-length) in the plane+line
/// shapes. Sized so the eigenprofile contrast at the plane/line junctions
/// exceeds the published eigenthreshold.
pub const PLANE_HALF: f64 = 2.0;
/// Half-length of the piercing lines (they extend this far above and below
/// the plane).
pub const LINE_HALF: f64 = 1.2;
/// Line offsets for the two-line shape. The lines pierce the plane near its
/// center, close enough together that the surrounding coarse cells neighbor
/// both junction regions, yet far enough apart to occupy distinct cells.
pub const LINE_X: f64 = 0.4;
/// Uniform scale applied to the spiral-plane figure (spiral radii and plane
/// side). At scale 1 the published delta = 2.5 would pool the entire cloud;
/// at scale 8 consecutive spiral turns are > 2 * delta apart, so pooled PCA
/// neighborhoods stay local.
pub const SPIRAL_SCALE: f64 = 8.0;

fn sample_stratum(shape: Shape, stratum: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match shape {
        // stratum 0: unit sphere at the origin; stratum 1: straight
        // curve-fragment from the north pole to (0, 0, 2.5)
        Shape::SphereCurve => {
            if stratum == 0 {
                loop {
                    let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
                    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    if n > 1e-12 {
                        return vec![v[0] / n, v[1] / n, v[2] / n];
                    }
                }
            } else {
                let t = uniform(rng, 0.0, 1.5);
                vec![0.0, 0.0, 1.0 + t]
            }
        }
        // stratum 0: spiral of two turns in the xz-plane, radius growing
        // 0.2 -> 1.5 times SPIRAL_SCALE, sampled uniformly by arc length;
        // stratum 1: square plane of side 4 * SPIRAL_SCALE at z = 0. The
        // spiral pierces the plane near every half-turn. The scale factor
        // keeps the published thresholds (tau = 0.1, delta = 2.5) local:
        // consecutive spiral turns are separated by more than 2 * delta.
        Shape::SpiralPlane => {
            if stratum == 0 {
                let theta_max = 4.0 * std::f64::consts::PI;
                let r0 = 0.2 * SPIRAL_SCALE;
                let slope = (1.5 * SPIRAL_SCALE - r0) / theta_max;
                let speed = |theta: f64| {
                    let r = r0 + slope * theta;
                    (r * r + slope * slope).sqrt()
                };
                let max_speed = speed(theta_max);
                loop {
                    let theta = uniform(rng, 0.0, theta_max);
                    if uniform(rng, 0.0, 1.0) < speed(theta) / max_speed {
                        let r = r0 + slope * theta;
                        return vec![r * theta.cos(), 0.0, r * theta.sin()];
                    }
                }
            } else {
                let h = 2.0 * SPIRAL_SCALE;
                vec![uniform(rng, -h, h), uniform(rng, -h, h), 0.0]
            }
        }
        // stratum 0: square plane of side 2*PLANE_HALF at z = 0; strata 1, 2:
        // vertical lines through (-LINE_X, 0) and (LINE_X, 0). The scale is
        // chosen so eigenprofile differences near the junctions are visible
        // at the published eigenthreshold.
        Shape::PlaneTwoLines => match stratum {
            0 => vec![
                uniform(rng, -PLANE_HALF, PLANE_HALF),
                uniform(rng, -PLANE_HALF, PLANE_HALF),
                0.0,
            ],
            1 => vec![-LINE_X, 0.0, uniform(rng, -LINE_HALF, LINE_HALF)],
            _ => vec![LINE_X, 0.0, uniform(rng, -LINE_HALF, LINE_HALF)],
        },
        // stratum 0: square plane at z = 0; stratum 1: vertical line
        // through the origin
        Shape::PlaneOneLine => {
            if stratum == 0 {
                vec![
                    uniform(rng, -PLANE_HALF, PLANE_HALF),
                    uniform(rng, -PLANE_HALF, PLANE_HALF),
                    0.0,
                ]
            } else {
                vec![0.0, 0.0, uniform(rng, -LINE_HALF, LINE_HALF)]
            }
        }
        // three planar lollipops in mutually orthogonal coordinate planes
        // (e0,e1), (e2,e3), (e4,e5), sticks of length 1 meeting at the
        // origin, unit circles attached at the stick ends; one stratum per
        // lollipop, sampled uniformly by arc length
        Shape::LollipopsR6 => {
            let stick_len = 1.0;
            let circ = 2.0 * std::f64::consts::PI;
            let t = uniform(rng, 0.0, stick_len + circ);
            let (u_axis, v_axis) = (2 * stratum, 2 * stratum + 1);
            let mut p = vec![0.0; 6];
            if t < stick_len {
                p[u_axis] = t;
            } else {
                let phi = t - stick_len;
                // circle centered at (stick_len + 1) * u, passing through
                // the stick end at phi = 0
                p[u_axis] = (stick_len + 1.0) - phi.cos();
                p[v_axis] = phi.sin();
            }
            p
        }
        // stratum 0: 2-plane span{e0, e1}; stratum 1: 3-plane span{e1, e2,
        // e3}; both of side 4, intersecting along the e1-axis
        Shape::PlanesR4 => {
            if stratum == 0 {
                vec![uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), 0.0, 0.0]
            } else {
                vec![
                    0.0,
                    uniform(rng, -2.0, 2.0),
                    uniform(rng, -2.0, 2.0),
                    uniform(rng, -2.0, 2.0),
                ]
            }
        }
    }
}
