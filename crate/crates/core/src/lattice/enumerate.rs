use nalgebra::DVector;

use super::LatticeBasis;
use crate::error::{Error, Result};
use crate::special_fn::unit_ball_volume;

/// Default cap on the number of points a single enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

impl LatticeBasis {
    /// Calls `visit(point, |point - center|^2)` for every lattice point within
    /// `radius` of `center`.
    ///
    /// Fincke–Pohst enumeration on the QR factor of the basis. Fails with a
    /// resource error when the predicted number of points exceeds `cap`.
    pub fn for_each_point_within<F>(&self, center: &[f64], radius: f64, cap: usize, mut visit: F) -> Result<()>
    where
        F: FnMut(&[f64], f64),
    {
        let d = self.dim();
        if center.len() != d {
            return Err(Error::InvalidParameter(format!("center has length {}, expected {d}", center.len())));
        }
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidParameter(format!("radius must be finite and >= 0, got {radius}")));
        }
        let predicted = unit_ball_volume(d) * (radius + self.covering_bound()).powi(d as i32);
        if predicted > cap as f64 {
            return Err(Error::Resource(format!(
                "enumeration of radius {radius} would visit about {predicted:.3e} points (cap {cap})"
            )));
        }
        let r = self.qr_r();
        // Target in the rotated frame: basis * k - c = Q (R k - Q^T c).
        let t: Vec<f64> = (self.qr_q().transpose() * DVector::from_column_slice(center)).iter().copied().collect();
        let r2 = radius * radius * (1.0 + 1e-12) + 1e-300;
        let mut k = vec![0i64; d];
        let mut partial = vec![0.0f64; d + 1]; // partial[i]: squared length from rows i..d
        let mut point = vec![0.0; d];
        let b = self.matrix();

        // Explicit depth-first search over rows d-1 .. 0.
        let mut upper = vec![0i64; d];
        let mut level = d;
        let mut descending = true;
        loop {
            if descending {
                if level == 0 {
                    let dist2 = partial[0];
                    for (i, v) in point.iter_mut().enumerate() {
                        *v = (0..d).map(|j| b[(i, j)] * k[j] as f64).sum();
                    }
                    visit(&point, dist2);
                    descending = false;
                    continue;
                }
                let i = level - 1;
                let rii = r[(i, i)];
                let mut off = -t[i];
                for j in (i + 1)..d {
                    off += r[(i, j)] * k[j] as f64;
                }
                let rem = r2 - partial[level];
                if rem < 0.0 {
                    descending = false;
                    continue;
                }
                let span = rem.sqrt() / rii;
                let centre = -off / rii;
                let lo = (centre - span).ceil() as i64;
                let hi = (centre + span).floor() as i64;
                if lo > hi {
                    descending = false;
                    continue;
                }
                k[i] = lo;
                upper[i] = hi;
                let v = rii * lo as f64 + off;
                partial[i] = partial[level] + v * v;
                level = i;
            } else {
                if level >= d {
                    break;
                }
                let i = level;
                if k[i] < upper[i] {
                    k[i] += 1;
                    let mut off = -t[i];
                    for j in (i + 1)..d {
                        off += r[(i, j)] * k[j] as f64;
                    }
                    let v = r[(i, i)] * k[i] as f64 + off;
                    partial[i] = partial[i + 1] + v * v;
                    descending = true;
                } else {
                    level += 1;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn brute_force(l: &LatticeBasis, center: &[f64], radius: f64, box_n: i64) -> Vec<f64> {
        let d = l.dim();
        let mut out = Vec::new();
        let mut k = vec![-box_n; d];
        loop {
            let coeffs: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            let p = l.to_cartesian(&coeffs);
            let d2: f64 = p.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
            if d2 <= radius * radius {
                out.push(d2);
            }
            let mut i = 0;
            while i < d {
                k[i] += 1;
                if k[i] <= box_n {
                    break;
                }
                k[i] = -box_n;
                i += 1;
            }
            if i == d {
                break;
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    fn enumerated(l: &LatticeBasis, center: &[f64], radius: f64) -> Vec<f64> {
        let mut out = Vec::new();
        l.for_each_point_within(center, radius, DEFAULT_ENUMERATION_CAP, |_, d2| out.push(d2)).unwrap();
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn square_lattice_counts() {
        let z2 = LatticeBasis::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(z2.enumerate_vectors(1.0).unwrap().len(), 5);
        assert_eq!(z2.enumerate_vectors(1.5).unwrap().len(), 9);
    }

    #[test]
    fn skewed_bases_match_box() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.7, -0.4, 0.0, 1.1, 0.9, 0.2, -0.3, 1.0]);
        let l = LatticeBasis::normalized(m).unwrap();
        for (radius, center) in [(3.0, vec![0.0; 3]), (2.5, vec![0.3, -0.2, 0.45])] {
            let a = enumerated(&l, &center, radius);
            let b = brute_force(&l, &center, radius, 8);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let z2 = LatticeBasis::new(DMatrix::identity(2, 2)).unwrap();
        let err = z2.for_each_point_within(&[0.0, 0.0], 100.0, 1000, |_, _| {}).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }
}
