//! Local PCA at multiple radii, per-point eigenvalue profiles, and the
//! eigenmetric comparing profiles across scales.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Strictly increasing positive radii at which local PCA is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSchedule {
    radii: Vec<f64>,
}

impl RadiusSchedule {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::input("radius schedule must be nonempty"));
        }
        for w in radii.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::input("radius schedule must be strictly increasing"));
            }
        }
        if radii[0] <= 0.0 || radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::input("radii must be positive finite reals"));
        }
        Ok(RadiusSchedule { radii })
    }

    /// Default when the user gives none: diam(X) * {1/32, 1/16, 1/8}.
    pub fn default_for(cloud: &PointCloud) -> Result<Self> {
        let diam = cloud.diameter();
        if diam <= 0.0 {
            // all points coincide; any positive radii work
            return RadiusSchedule::new(vec![0.25, 0.5, 1.0]);
        }
        RadiusSchedule::new(vec![diam / 32.0, diam / 16.0, diam / 8.0])
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Eigenvalues of the local covariance matrices around one point, one row per
/// schedule radius, rows non-increasing and zero-padded to ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenProfile {
    pub owner: usize,
    pub lambdas: Vec<Vec<f64>>,
}

impl EigenProfile {
    pub fn num_radii(&self) -> usize {
        self.lambdas.len()
    }

    pub fn dim(&self) -> usize {
        self.lambdas.first().map_or(0, |r| r.len())
    }
}

/// Eigenvalues of the covariance (population convention, divide by ball
/// count) of the points in the closed `r`-ball around `points[p]`, sorted
/// non-increasing and padded with zeros to length D. Fewer than 2 points in
/// the ball yields the zero vector.
pub fn local_eigenvalues(cloud: &PointCloud, p: usize, r: f64) -> Result<Vec<f64>> {
    if r <= 0.0 {
        return Err(Error::input("radius must be positive"));
    }
    let idx = cloud.range_query(cloud.point(p), r)?;
    Ok(covariance_eigenvalues(cloud, &idx))
}

/// Covariance eigenvalues of an index subset, shared with the dimension
/// estimator. Fixed accumulation order keeps results bit-stable.
pub fn covariance_eigenvalues(cloud: &PointCloud, indices: &[usize]) -> Vec<f64> {
    let d = cloud.dim();
    let m = indices.len();
    if m < 2 {
        return vec![0.0; d];
    }
    let mut mean = vec![0.0f64; d];
    for &i in indices {
        for (k, x) in cloud.point(i).iter().enumerate() {
            mean[k] += x;
        }
    }
    for v in mean.iter_mut() {
        *v /= m as f64;
    }
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for &i in indices {
        let p = cloud.point(i);
        for a in 0..d {
            let da = p[a] - mean[a];
            for b in a..d {
                cov[(a, b)] += da * (p[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / m as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let mut eig: Vec<f64> = cov
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0))
        .collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

pub fn eigen_profile(cloud: &PointCloud, p: usize, schedule: &RadiusSchedule) -> Result<EigenProfile> {
    let lambdas = schedule
        .radii()
        .iter()
        .map(|&r| local_eigenvalues(cloud, p, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenProfile { owner: p, lambdas })
}

/// Profiles for every point of the cloud, cached by the pipeline driver.
pub fn all_profiles(cloud: &PointCloud, schedule: &RadiusSchedule) -> Result<Vec<EigenProfile>> {
    (0..cloud.len())
        .map(|p| eigen_profile(cloud, p, schedule))
        .collect()
}

/// The eigenmetric: Euclidean norm of the vector of per-radius Euclidean
/// norms of profile differences. A pseudometric on points.
pub fn eigenmetric(a: &EigenProfile, b: &EigenProfile) -> Result<f64> {
    if a.num_radii() != b.num_radii() || a.dim() != b.dim() {
        return Err(Error::input("eigenprofiles computed against different schedules"));
    }
    let mut total = 0.0;
    for (ra, rb) in a.lambdas.iter().zip(b.lambdas.iter()) {
        let per_radius: f64 = ra
            .iter()
            .zip(rb.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        total += per_radius;
    }
    Ok(total.sqrt())
}
