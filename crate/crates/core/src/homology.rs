//! Persistence computations: exact H0 from the Euclidean MST, Vietoris-Rips
//! persistence in dimensions up to 2 via boundary-matrix reduction over the
//! two-element field, and persistent Betti vectors.
//!
//! All filtration values are in ball-radius units: a simplex enters the
//! filtration at half its diameter, so balls of radius alpha intersect
//! exactly when the connecting edge is present. This keeps H0 output, the
//! auto distance threshold, and the subdivision criteria on one scale.

use crate::error::{Error, Result};
use crate::geometry::{euclidean_dist, minimum_spanning_tree, PointCloud};

pub const DEFAULT_SIMPLEX_CAP: usize = 2_000_000;
pub const DEFAULT_SUBSAMPLE_TARGET: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    /// (birth, death) pairs; death is `f64::INFINITY` for essential classes.
    pub dots: Vec<(f64, f64)>,
    /// Set when the input was subsampled to respect the simplex cap.
    pub approximate: bool,
}

impl PersistenceDiagram {
    pub fn new(dim: usize) -> Self {
        PersistenceDiagram {
            dim,
            dots: Vec::new(),
            approximate: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BettiVector {
    pub beta0: usize,
    pub beta1: usize,
    pub beta2: usize,
}

/// Zero-dimensional persistence of the thickening filtration: one finite dot
/// (0, length/2) per MST edge plus one essential dot.
pub fn h0_diagram(cloud: &PointCloud) -> PersistenceDiagram {
    let mut diagram = PersistenceDiagram::new(0);
    for e in minimum_spanning_tree(cloud) {
        diagram.dots.push((0.0, e.length / 2.0));
    }
    diagram.dots.push((0.0, f64::INFINITY));
    diagram
}

/// Smallest thickening radius at which the union of balls becomes connected:
/// half the longest MST edge, 0 for a single point.
pub fn connectivity_threshold(cloud: &PointCloud) -> f64 {
    minimum_spanning_tree(cloud)
        .iter()
        .map(|e| e.length / 2.0)
        .fold(0.0, f64::max)
}

/// Betti vector at a persistence cutoff: features in each dimension whose
/// lifetime strictly exceeds the cutoff, essential classes always counting.
pub fn betti_vector(diagrams: &[PersistenceDiagram], cutoff: f64) -> Result<BettiVector> {
    if cutoff < 0.0 {
        return Err(Error::input("persistence cutoff must be nonnegative"));
    }
    let mut betti = [0usize; 3];
    for d in diagrams {
        if d.dim > 2 {
            continue;
        }
        betti[d.dim] += d
            .dots
            .iter()
            .filter(|(b, dth)| dth - b > cutoff)
            .count();
    }
    Ok(BettiVector {
        beta0: betti[0],
        beta1: betti[1],
        beta2: betti[2],
    })
}

// A simplex of dimension <= 3, stored as sorted vertex indices.
#[derive(Debug, Clone)]
struct FiltSimplex {
    verts: Vec<u32>,
    filt: f64,
}

/// Vietoris-Rips persistence up to `max_dim` (at most 2), truncated at
/// `max_scale` (in ball-radius units). Simplices of dimension up to
/// `max_dim + 1` are enumerated; if the count exceeds `simplex_cap` the
/// cloud is first subsampled by deterministic farthest-point selection, and
/// if the subsample still exceeds the cap the filtration scale is shrunk
/// geometrically until the complex fits; either fallback flags the output
/// approximate. Simplex counts are checked before materialization so an
/// over-cap call never allocates the full complex.
pub fn rips_persistence(
    cloud: &PointCloud,
    max_dim: usize,
    max_scale: f64,
    simplex_cap: usize,
) -> Result<Vec<PersistenceDiagram>> {
    if max_dim > 2 {
        return Err(Error::Unsupported(
            "Rips persistence supports dimensions 0..=2".into(),
        ));
    }
    if simplex_cap < cloud.len() {
        return Err(Error::input("simplex cap below point count"));
    }
    if !(max_scale > 0.0) {
        return Err(Error::input("max_scale must be positive"));
    }

    if count_simplices(cloud, max_dim + 1, max_scale, simplex_cap).is_some() {
        let simplices = enumerate_simplices(cloud, max_dim + 1, max_scale);
        let mut diagrams = reduce(simplices, max_dim);
        truncate_essential(&mut diagrams);
        return Ok(diagrams);
    }

    // over the cap: retry on a farthest-point subsample, shrinking the scale
    // until the complex fits (at worst only vertices remain, which fit by
    // the cap >= n precondition)
    let keep = farthest_point_subsample(cloud, DEFAULT_SUBSAMPLE_TARGET.min(cloud.len()));
    let sub = cloud.subset(&keep)?;
    let mut scale = max_scale;
    while count_simplices(&sub, max_dim + 1, scale, simplex_cap).is_none() {
        scale *= 0.75;
    }
    let simplices = enumerate_simplices(&sub, max_dim + 1, scale);
    let mut diagrams = reduce(simplices, max_dim);
    truncate_essential(&mut diagrams);
    for d in diagrams.iter_mut() {
        d.approximate = true;
    }
    Ok(diagrams)
}

// Number of simplices of dimension <= top_dim at `max_scale`, or None as
// soon as the running count exceeds `cap` (never materializes simplices).
fn count_simplices(cloud: &PointCloud, top_dim: usize, max_scale: f64, cap: usize) -> Option<usize> {
    let n = cloud.len();
    let mut count = n;
    if count > cap {
        return None;
    }
    let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if euclidean_dist(cloud.point(i), cloud.point(j)) / 2.0 <= max_scale {
                nbrs[i].push(j as u32);
                count += 1;
                if count > cap {
                    return None;
                }
            }
        }
    }
    if top_dim < 2 {
        return Some(count);
    }
    // nbrs[i] is sorted ascending by construction
    let is_nbr = |a: u32, b: u32| -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        nbrs[a as usize].binary_search(&b).is_ok()
    };
    for i in 0..n {
        for (ki, &j) in nbrs[i].iter().enumerate() {
            for &k in nbrs[i][ki + 1..].iter() {
                if !is_nbr(j, k) {
                    continue;
                }
                count += 1;
                if count > cap {
                    return None;
                }
                if top_dim >= 3 {
                    for &l in nbrs[i].iter() {
                        if l <= k {
                            continue;
                        }
                        if is_nbr(j, l) && is_nbr(k, l) {
                            count += 1;
                            if count > cap {
                                return None;
                            }
                        }
                    }
                }
            }
        }
    }
    Some(count)
}

fn truncate_essential(diagrams: &mut [PersistenceDiagram]) {
    for d in diagrams.iter_mut() {
        d.dots.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
        });
    }
}

/// Deterministic farthest-point subsample seeded at index 0, ties broken by
/// smallest index.
pub fn farthest_point_subsample(cloud: &PointCloud, target: usize) -> Vec<usize> {
    let n = cloud.len();
    let target = target.min(n);
    let mut chosen = vec![0usize];
    let mut dist: Vec<f64> = (0..n)
        .map(|i| euclidean_dist(cloud.point(i), cloud.point(0)))
        .collect();
    while chosen.len() < target {
        let mut best = 0usize;
        for i in 1..n {
            if dist[i] > dist[best] {
                best = i;
            }
        }
        if dist[best] <= 0.0 {
            break;
        }
        chosen.push(best);
        for i in 0..n {
            let d = euclidean_dist(cloud.point(i), cloud.point(best));
            if d < dist[i] {
                dist[i] = d;
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

// All simplices of dimension <= top_dim whose half-diameter is <= max_scale,
// sorted by (filtration, dimension, vertex tuple).
fn enumerate_simplices(cloud: &PointCloud, top_dim: usize, max_scale: f64) -> Vec<FiltSimplex> {
    let n = cloud.len();
    let mut out: Vec<FiltSimplex> = (0..n as u32)
        .map(|v| FiltSimplex {
            verts: vec![v],
            filt: 0.0,
        })
        .collect();

    // neighbor lists restricted to larger indices
    let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut half = vec![Vec::<f64>::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let h = euclidean_dist(cloud.point(i), cloud.point(j)) / 2.0;
            if h <= max_scale {
                nbrs[i].push(j as u32);
                half[i].push(h);
                out.push(FiltSimplex {
                    verts: vec![i as u32, j as u32],
                    filt: h,
                });
            }
        }
    }
    let half_dist = |a: u32, b: u32| -> Option<f64> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        nbrs[a as usize]
            .iter()
            .position(|&x| x == b)
            .map(|k| half[a as usize][k])
    };

    if top_dim >= 2 {
        for i in 0..n {
            for (ki, &j) in nbrs[i].iter().enumerate() {
                for (kk, &k) in nbrs[i].iter().enumerate().skip(ki + 1) {
                    if let Some(hjk) = half_dist(j, k) {
                        let filt = half[i][ki].max(half[i][kk]).max(hjk);
                        out.push(FiltSimplex {
                            verts: vec![i as u32, j, k],
                            filt,
                        });
                        if top_dim >= 3 {
                            // extend to tetrahedra through common neighbors of i beyond k
                            for &l in nbrs[i].iter() {
                                if l <= k {
                                    continue;
                                }
                                if let (Some(hjl), Some(hkl)) = (half_dist(j, l), half_dist(k, l)) {
                                    let hil = half_dist(i as u32, l).unwrap();
                                    let f4 = filt.max(hjl).max(hkl).max(hil);
                                    out.push(FiltSimplex {
                                        verts: vec![i as u32, j, k, l],
                                        filt: f4,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    out.sort_by(|a, b| {
        a.filt
            .partial_cmp(&b.filt)
            .unwrap()
            .then(a.verts.len().cmp(&b.verts.len()))
            .then(a.verts.cmp(&b.verts))
    });
    out
}

// Standard persistence by column reduction over GF(2).
fn reduce(simplices: Vec<FiltSimplex>, max_dim: usize) -> Vec<PersistenceDiagram> {
    use std::collections::HashMap;

    let m = simplices.len();
    let mut index_of: HashMap<&[u32], usize> = HashMap::with_capacity(m);
    for (i, s) in simplices.iter().enumerate() {
        index_of.insert(s.verts.as_slice(), i);
    }

    // columns: sorted facet indices
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(m);
    for s in &simplices {
        if s.verts.len() == 1 {
            columns.push(Vec::new());
            continue;
        }
        let mut col: Vec<usize> = (0..s.verts.len())
            .map(|drop| {
                let facet: Vec<u32> = s
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != drop)
                    .map(|(_, &v)| v)
                    .collect();
                index_of[facet.as_slice()]
            })
            .collect();
        col.sort_unstable();
        columns.push(col);
    }

    let mut pivot_owner: Vec<usize> = vec![usize::MAX; m];
    let mut paired = vec![false; m];
    let mut diagrams: Vec<PersistenceDiagram> =
        (0..=max_dim).map(PersistenceDiagram::new).collect();

    for j in 0..m {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&piv) = col.last() {
            let owner = pivot_owner[piv];
            if owner == usize::MAX {
                break;
            }
            col = add_gf2(&col, &columns[owner]);
        }
        if let Some(&piv) = col.last() {
            pivot_owner[piv] = j;
            paired[piv] = true;
            paired[j] = true;
            let dim = simplices[piv].verts.len() - 1;
            if dim <= max_dim {
                let birth = simplices[piv].filt;
                let death = simplices[j].filt;
                if death > birth {
                    diagrams[dim].dots.push((birth, death));
                }
            }
        }
        columns[j] = col;
    }
    for j in 0..m {
        let dim = simplices[j].verts.len() - 1;
        if !paired[j] && dim <= max_dim {
            diagrams[dim].dots.push((simplices[j].filt, f64::INFINITY));
        }
    }
    diagrams
}

fn add_gf2(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
