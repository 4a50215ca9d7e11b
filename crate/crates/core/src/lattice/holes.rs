//! Distance to a lattice and deep holes (maximisers of that distance).

use nalgebra::{DMatrix, DVector};

use super::LatticeBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DeepHoleOptions {
    /// Grid points per axis over the unit cell.
    pub grid_n: usize,
    pub refine_tol: f64,
}

impl Default for DeepHoleOptions {
    fn default() -> Self {
        Self { grid_n: 64, refine_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeepHole {
    /// Representative in the unit cell `Q_L`.
    pub point: Vec<f64>,
    pub distance: f64,
}

/// Nearest lattice point to `z` and the distance to it.
pub fn distance_to_lattice(l: &LatticeBasis, z: &[f64]) -> (Vec<f64>, f64) {
    let radius = l.covering_bound() * (1.0 + 1e-9) + 1e-12;
    let mut best = (vec![0.0; l.dim()], f64::INFINITY);
    l.for_each_point_within(z, radius, usize::MAX, |p, d2| {
        if d2 < best.1 {
            best = (p.to_vec(), d2);
        }
    })
    .expect("covering-radius enumeration is small");
    (best.0, best.1.sqrt())
}

/// Grid scan of the distance-to-lattice function over `Q_L`, then polish.
///
/// Local maxima of the distance function are vertices of the Voronoi cell, so
/// the polish first tries to snap each candidate to the circumcentre of `d+1`
/// nearby lattice points whose circumsphere is empty; if no such vertex is
/// found near the candidate it falls back to coordinatewise golden-section
/// ascent.
pub fn deep_hole(l: &LatticeBasis, opts: &DeepHoleOptions) -> Result<DeepHole> {
    let d = l.dim();
    if opts.grid_n < 8 {
        return Err(Error::InvalidParameter(format!("deep_hole needs grid_n >= 8, got {}", opts.grid_n)));
    }
    if !(opts.refine_tol > 0.0) {
        return Err(Error::InvalidParameter("refine_tol must be > 0".into()));
    }
    let total = (opts.grid_n as f64).powi(d as i32);
    if total > 2e7 {
        return Err(Error::Resource(format!("deep-hole grid of {total:e} points is too large")));
    }
    let reach: f64 = (0..d).map(|i| l.matrix().column(i).norm()).sum::<f64>() + l.covering_bound();
    let mut cloud = Vec::new();
    l.for_each_point_within(&vec![0.0; d], reach * (1.0 + 1e-9), super::DEFAULT_ENUMERATION_CAP, |p, _| {
        cloud.push(p.to_vec())
    })?;
    let min_dist = |z: &[f64]| -> f64 {
        cloud
            .iter()
            .map(|p| p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    };

    let n = opts.grid_n;
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; d];
    loop {
        let frac: Vec<f64> = idx.iter().map(|&i| i as f64 / n as f64).collect();
        let z = l.to_cartesian(&frac);
        scored.push((min_dist(&z), z));
        let mut i = 0;
        while i < d {
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let cell_diam: f64 = (0..d).map(|i| l.matrix().column(i).norm() / n as f64).sum();
    let top = scored[0].0;
    let candidates: Vec<Vec<f64>> = scored
        .into_iter()
        .take_while(|(v, _)| *v >= top - 2.0 * cell_diam)
        .take(64)
        .map(|(_, z)| z)
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in &candidates {
        let polished = snap_to_vertex(&cloud, c, 2.0 * cell_diam, &min_dist)
            .unwrap_or_else(|| golden_ascent(c, cell_diam, opts.refine_tol, &min_dist));
        if best.as_ref().is_none_or(|(v, _)| polished.0 > *v) {
            best = Some(polished);
        }
    }
    let (distance, point) = best.expect("grid is non-empty");
    Ok(DeepHole { point: l.reduce(&point), distance })
}

fn snap_to_vertex<F: Fn(&[f64]) -> f64>(
    cloud: &[Vec<f64>],
    z: &[f64],
    reach: f64,
    min_dist: &F,
) -> Option<(f64, Vec<f64>)> {
    let d = z.len();
    let mut near: Vec<(f64, &Vec<f64>)> = cloud
        .iter()
        .map(|p| (p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), p))
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    near.truncate(d + 9);
    let pts: Vec<&Vec<f64>> = near.iter().map(|(_, p)| *p).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset: Vec<usize> = (0..=d).collect();
    loop {
        if let Some(c) = circumcentre(&subset.iter().map(|&i| pts[i]).collect::<Vec<_>>()) {
            let shift: f64 = c.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if shift <= reach {
                let r = c.iter().zip(pts[subset[0]]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                // Empty circumsphere: no lattice point strictly closer than r.
                if min_dist(&c) >= r * (1.0 - 1e-12) && best.as_ref().is_none_or(|(v, _)| r > *v) {
                    best = Some((r, c));
                }
            }
        }
        if !next_subset(&mut subset, pts.len()) {
            break;
        }
    }
    best
}

fn circumcentre(points: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let d = points[0].len();
    let p0 = points[0];
    let n0: f64 = p0.iter().map(|v| v * v).sum();
    let a = DMatrix::from_fn(d, d, |i, j| 2.0 * (points[i + 1][j] - p0[j]));
    let b = DVector::from_fn(d, |i, _| points[i + 1].iter().map(|v| v * v).sum::<f64>() - n0);
    let lu = a.lu();
    if lu.determinant().abs() < 1e-10 {
        return None;
    }
    lu.solve(&b).map(|c| c.iter().copied().collect())
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn golden_ascent<F: Fn(&[f64]) -> f64>(start: &[f64], width: f64, tol: f64, f: &F) -> (f64, Vec<f64>) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut z = start.to_vec();
    let mut value = f(&z);
    for _ in 0..200 {
        let before = z.clone();
        for i in 0..z.len() {
            let (mut a, mut b) = (z[i] - width, z[i] + width);
            let at = |z: &[f64], t: f64| {
                let mut w = z.to_vec();
                w[i] = t;
                f(&w)
            };
            let mut c = b - inv_phi * (b - a);
            let mut e = a + inv_phi * (b - a);
            let (mut fc, mut fe) = (at(&z, c), at(&z, e));
            while b - a > tol {
                if fc > fe {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - inv_phi * (b - a);
                    fc = at(&z, c);
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + inv_phi * (b - a);
                    fe = at(&z, e);
                }
            }
            let t = 0.5 * (a + b);
            let ft = at(&z, t);
            if ft > value {
                z[i] = t;
                value = ft;
            }
        }
        let moved: f64 = z.iter().zip(&before).map(|(a, b)| (a - b).abs()).sum();
        if moved < tol {
            break;
        }
    }
    (value, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{named_lattice, NamedLattice};

    #[test]
    fn square_centre() {
        let z2 = named_lattice(&NamedLattice::Cubic(2)).unwrap();
        let h = deep_hole(&z2, &DeepHoleOptions::default()).unwrap();
        assert!((h.distance - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(z2.periodic_distance(&h.point, &[0.5, 0.5]) < 1e-10);
    }

    #[test]
    fn triangular_hole_is_a_barycentre() {
        let tri = named_lattice(&NamedLattice::Triangular).unwrap();
        let h = deep_hole(&tri, &DeepHoleOptions { grid_n: 32, refine_tol: 1e-12 }).unwrap();
        let s = crate::lattice::named::triangular_scale();
        // Circumradius of the equilateral triangle with side s.
        assert!((h.distance - s / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_oracle() {
        let z3 = named_lattice(&NamedLattice::Cubic(3)).unwrap();
        let (p, d) = distance_to_lattice(&z3, &[2.2, -0.9, 0.4]);
        assert_eq!(p, vec![2.0, -1.0, 0.0]);
        assert!((d - (0.04f64 + 0.01 + 0.16).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn small_grid_rejected() {
        let z2 = named_lattice(&NamedLattice::Cubic(2)).unwrap();
        assert!(deep_hole(&z2, &DeepHoleOptions { grid_n: 4, refine_tol: 1e-8 }).is_err());
    }

    #[test]
    fn golden_ascent_finds_smooth_max() {
        let f = |z: &[f64]| -(z[0] - 0.3).powi(2) - (z[1] + 0.2).powi(2);
        let (_, z) = golden_ascent(&[0.0, 0.0], 1.0, 1e-10, &f);
        assert!((z[0] - 0.3).abs() < 1e-8 && (z[1] + 0.2).abs() < 1e-8);
    }
}
