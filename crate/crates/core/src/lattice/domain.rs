//! The upper-triangular chart of unit-covolume lattices.
//!
//! Coordinates are the strictly upper off-diagonal entries `x_ij` (row-major)
//! of a unit upper-triangular `U`, followed by `y_1, .., y_{d-1} > 0`. The basis
//! is `B = D U` with `D = diag(y_1^{-1/2}, .., y_{d-1}^{-1/2}, prod_i y_i^{1/2})`.
//! In `d = 2` this is `(x, y) -> [(1/sqrt y, 0), (x/sqrt y, sqrt y)]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LatticeBasis;
use crate::error::{Error, Result};

/// Number of chart coordinates, `d(d+1)/2 - 1`.
pub fn chart_dimension(dim: usize) -> usize {
    dim * (dim + 1) / 2 - 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPoint {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl DomainPoint {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if coords.len() != chart_dimension(dim) {
            return Err(Error::InvalidParameter(format!(
                "a {dim}-dimensional chart point needs {} coordinates, got {}",
                chart_dimension(dim),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("chart coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    /// Diagonal parameters `y_1, .., y_{d-1}`.
    pub fn diagonal(&self) -> &[f64] {
        &self.coords[self.coords.len() - (self.dim - 1)..]
    }

    /// Off-diagonal parameters `x_ij`, row-major.
    pub fn off_diagonal(&self) -> &[f64] {
        &self.coords[..self.coords.len() - (self.dim - 1)]
    }

    /// The `d = 2` reduction constraints `0 <= x <= 1/2`, `y > 0`, `x^2 + y^2 >= 1`.
    pub fn is_reduced(&self, tol: f64) -> bool {
        if self.dim != 2 {
            return false;
        }
        let (x, y) = (self.coords[0], self.coords[1]);
        x >= -tol && x <= 0.5 + tol && y > 0.0 && x * x + y * y >= 1.0 - tol
    }
}

/// Basis of the lattice at chart point `p`.
pub fn from_domain_point(p: &DomainPoint) -> Result<LatticeBasis> {
    let d = p.dim;
    if p.coords.len() != chart_dimension(d) {
        return Err(Error::InvalidParameter("chart point has the wrong number of coordinates".into()));
    }
    let ys = p.diagonal();
    if ys.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
        return Err(Error::InvalidParameter(format!("diagonal chart parameters must be > 0, got {ys:?}")));
    }
    let mut diag = vec![0.0; d];
    let mut prod = 1.0;
    for i in 0..d - 1 {
        diag[i] = 1.0 / ys[i].sqrt();
        prod *= diag[i];
    }
    diag[d - 1] = 1.0 / prod;
    let mut off = p.off_diagonal().iter();
    let mut b = DMatrix::zeros(d, d);
    for i in 0..d {
        b[(i, i)] = diag[i];
        for j in (i + 1)..d {
            b[(i, j)] = diag[i] * off.next().expect("length checked above");
        }
    }
    LatticeBasis::new(b).map_err(|e| match e {
        Error::InvalidParameter(m) => Error::InvalidParameter(format!("chart point gives an invalid basis: {m}")),
        other => other,
    })
}

/// Chart coordinates of an isometric copy of `l` (same Gram matrix up to the
/// choice of generator signs).
pub(super) fn to_domain_point(l: &LatticeBasis) -> DomainPoint {
    let d = l.dim();
    let mut b = l.matrix().clone();
    if b.determinant() < 0.0 {
        b.column_mut(0).neg_mut();
    }
    let qr = b.qr();
    let mut r = qr.r();
    for i in 0..d {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
        }
    }
    let mut coords = Vec::with_capacity(chart_dimension(d));
    for i in 0..d {
        for j in (i + 1)..d {
            coords.push(r[(i, j)] / r[(i, i)]);
        }
    }
    for i in 0..d - 1 {
        coords.push(1.0 / (r[(i, i)] * r[(i, i)]));
    }
    DomainPoint { dim: d, coords }
}

/// Lagrange–Gauss reduction of a planar lattice into the reduced chart region.
pub fn reduce_2d(l: &LatticeBasis) -> Result<DomainPoint> {
    if l.dim() != 2 {
        return Err(Error::InvalidParameter("reduction is only implemented in dimension 2".into()));
    }
    let mut u = [l.matrix()[(0, 0)], l.matrix()[(1, 0)]];
    let mut v = [l.matrix()[(0, 1)], l.matrix()[(1, 1)]];
    let dot = |a: &[f64; 2], b: &[f64; 2]| a[0] * b[0] + a[1] * b[1];
    for _ in 0..1000 {
        if dot(&u, &u) > dot(&v, &v) {
            std::mem::swap(&mut u, &mut v);
        }
        let m = (dot(&u, &v) / dot(&u, &u)).round();
        if m == 0.0 {
            break;
        }
        v = [v[0] - m * u[0], v[1] - m * u[1]];
    }
    if dot(&u, &u) > dot(&v, &v) {
        std::mem::swap(&mut u, &mut v);
    }
    let n2 = dot(&u, &u);
    // x = <u,v>/|u|^2 taken nonnegative by a reflection, y = 1/|u|^2.
    let x = (dot(&u, &v) / n2).abs();
    DomainPoint::new(2, vec![x, 1.0 / n2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{named_lattice, NamedLattice};

    #[test]
    fn two_dimensional_examples() {
        let z2 = from_domain_point(&DomainPoint::new(2, vec![0.0, 1.0]).unwrap()).unwrap();
        assert!((z2.matrix() - DMatrix::identity(2, 2)).abs().max() < 1e-15);
        let tri = from_domain_point(&DomainPoint::new(2, vec![0.5, 3f64.sqrt() / 2.0]).unwrap()).unwrap();
        let reference = named_lattice(&NamedLattice::Triangular).unwrap();
        assert!((tri.gram() - reference.gram()).abs().max() < 1e-12);
    }

    #[test]
    fn identity_in_three_dimensions() {
        let p = DomainPoint::new(3, vec![0.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((from_domain_point(&p).unwrap().matrix() - DMatrix::identity(3, 3)).abs().max() < 1e-15);
    }

    #[test]
    fn chart_round_trip_preserves_gram() {
        for name in [NamedLattice::Fcc, NamedLattice::Bcc, NamedLattice::Triangular, NamedLattice::D4] {
            let l = named_lattice(&name).unwrap();
            let p = l.to_domain_point();
            let back = from_domain_point(&p).unwrap();
            let a = l.length_spectrum(6.0).unwrap();
            let b = back.length_spectrum(6.0).unwrap();
            assert_eq!(a.len(), b.len(), "{name}");
            assert!((back.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduction_finds_triangular() {
        let tri = named_lattice(&NamedLattice::Triangular).unwrap();
        let p = reduce_2d(&tri).unwrap();
        assert!((p.coords[0] - 0.5).abs() < 1e-12);
        assert!((p.coords[1] - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(p.is_reduced(1e-12));
    }

    #[test]
    fn rejects_bad_points() {
        assert!(DomainPoint::new(2, vec![0.1]).is_err());
        assert!(from_domain_point(&DomainPoint::new(2, vec![0.1, -1.0]).unwrap()).is_err());
    }
}
