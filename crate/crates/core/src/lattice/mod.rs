//! Unit-covolume Bravais lattices, periodic configurations built on them,
//! the upper-triangular shape chart, point enumeration and deep holes.

mod config;
mod domain;
mod enumerate;
mod holes;
pub(crate) mod named;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{honeycomb, honeycomb_shift, ConfigurationDescriptor, PeriodicConfiguration};
pub use domain::{chart_dimension, from_domain_point, reduce_2d, DomainPoint};
pub use enumerate::DEFAULT_ENUMERATION_CAP;
pub use holes::{deep_hole, distance_to_lattice, DeepHole, DeepHoleOptions};
pub use named::{named_lattice, triangular_scale, NamedLattice};

/// Tolerance on `|det B| - 1` accepted by [`LatticeBasis::new`].
pub const COVOLUME_TOL: f64 = 1e-12;

/// Basis of a covolume-one Bravais lattice; the columns of `basis` are the generators.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    // QR factors of `basis` with a positive diagonal in `r`.
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl PartialEq for LatticeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl LatticeBasis {
    /// Builds a lattice from a square matrix whose columns are the generators.
    ///
    /// The covolume `|det|` must equal one within [`COVOLUME_TOL`]. Bases of
    /// either orientation are accepted.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let dim = basis.nrows();
        if dim == 0 || basis.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "basis must be a non-empty square matrix, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("basis has non-finite entries".into()));
        }
        let det = basis.determinant();
        if (det.abs() - 1.0).abs() > COVOLUME_TOL {
            if det.abs() < 1e-300 {
                return Err(Error::SingularBasis("determinant is zero".into()));
            }
            return Err(Error::InvalidParameter(format!("covolume must be 1, got |det| = {}", det.abs())));
        }
        Self::build(basis)
    }

    /// Rescales the generators so that the covolume is one.
    pub fn normalized(basis: DMatrix<f64>) -> Result<Self> {
        let dim = basis.nrows();
        if dim == 0 || basis.ncols() != dim {
            return Err(Error::InvalidParameter("basis must be a non-empty square matrix".into()));
        }
        let det = basis.determinant().abs();
        if !(det.is_finite() && det > 1e-300) {
            return Err(Error::SingularBasis(format!("|det| = {det}")));
        }
        let scale = det.powf(-1.0 / dim as f64);
        Self::new(basis * scale)
    }

    /// Builds a lattice from a list of generator vectors.
    pub fn from_generators(generators: &[Vec<f64>]) -> Result<Self> {
        let dim = generators.len();
        if dim == 0 || generators.iter().any(|g| g.len() != dim) {
            return Err(Error::InvalidParameter("need d generators of length d".into()));
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| generators[j][i]))
    }

    fn build(basis: DMatrix<f64>) -> Result<Self> {
        let dim = basis.nrows();
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularBasis("basis matrix is not invertible".into()))?;
        let qr = basis.clone().qr();
        let mut q = qr.q();
        let mut r = qr.r();
        for i in 0..dim {
            if r[(i, i)] < 0.0 {
                for j in 0..dim {
                    r[(i, j)] = -r[(i, j)];
                    q[(j, i)] = -q[(j, i)];
                }
            }
        }
        let cond = condition_estimate(&basis, &inverse);
        if !cond.is_finite() || cond > 1e12 {
            return Err(Error::SingularBasis(format!("condition number {cond:e}")));
        }
        Ok(Self { basis, inverse, q, r })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Generator matrix (generators as columns).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn generator(&self, i: usize) -> Vec<f64> {
        self.basis.column(i).iter().copied().collect()
    }

    pub fn generators(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.generator(i)).collect()
    }

    pub fn determinant(&self) -> f64 {
        self.basis.determinant()
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }

    /// Spectral condition number of the generator matrix.
    pub fn condition_number(&self) -> f64 {
        let sv = self.basis.clone().singular_values();
        sv.max() / sv.min()
    }

    /// Dual lattice `{x : x . p in Z for all p in L}`, with the inverse-transpose basis.
    pub fn dual(&self) -> Result<LatticeBasis> {
        LatticeBasis::new(self.inverse.transpose())
    }

    /// Cartesian point with the given integer (or real) coefficients.
    pub fn to_cartesian(&self, coeffs: &[f64]) -> Vec<f64> {
        (&self.basis * DVector::from_column_slice(coeffs)).iter().copied().collect()
    }

    /// Coefficients of `z` in the generator basis.
    pub fn to_fractional(&self, z: &[f64]) -> Vec<f64> {
        (&self.inverse * DVector::from_column_slice(z)).iter().copied().collect()
    }

    /// Representative of `z` in the unit cell `Q_L` (coefficients in `[0, 1)`).
    pub fn reduce(&self, z: &[f64]) -> Vec<f64> {
        let mut frac = self.to_fractional(z);
        for c in frac.iter_mut() {
            *c -= c.floor();
            if *c >= 1.0 {
                *c = 0.0;
            }
        }
        self.to_cartesian(&frac)
    }

    /// `true` when `z` is a lattice vector up to `tol` in fractional coordinates.
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.to_fractional(z).iter().all(|c| (c - c.round()).abs() <= tol)
    }

    /// Distance between `a` and `b` modulo the lattice.
    pub fn periodic_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let (_, d) = distance_to_lattice(self, &diff);
        d
    }

    /// Upper bound on the covering radius: half the norm of the Gram–Schmidt diagonal.
    pub fn covering_bound(&self) -> f64 {
        0.5 * (0..self.dim()).map(|i| self.r[(i, i)].powi(2)).sum::<f64>().sqrt()
    }

    /// Length of the shortest nonzero vector.
    pub fn min_norm(&self) -> f64 {
        let mut radius = (0..self.dim()).map(|i| self.basis.column(i).norm()).fold(f64::INFINITY, f64::min);
        radius *= 1.0 + 1e-9;
        let mut best = f64::INFINITY;
        self.for_each_point_within(&vec![0.0; self.dim()], radius, usize::MAX, |_, d2| {
            if d2 > 0.0 && d2 < best {
                best = d2;
            }
        })
        .expect("enumeration bounded by a basis vector length");
        best.sqrt()
    }

    /// Every lattice vector with norm at most `radius`, the origin included.
    pub fn enumerate_vectors(&self, radius: f64) -> Result<Vec<Vec<f64>>> {
        self.enumerate_vectors_capped(radius, DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_vectors_capped(&self, radius: f64, cap: usize) -> Result<Vec<Vec<f64>>> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("enumeration radius must be > 0, got {radius}")));
        }
        let mut out = Vec::new();
        self.for_each_point_within(&vec![0.0; self.dim()], radius, cap, |p, _| out.push(p.to_vec()))?;
        Ok(out)
    }

    /// Sorted squared norms of the lattice vectors with `|p|^2 <= r2_max`.
    pub fn length_spectrum(&self, r2_max: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        self.for_each_point_within(&vec![0.0; self.dim()], r2_max.sqrt(), DEFAULT_ENUMERATION_CAP, |_, d2| {
            out.push(d2)
        })?;
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Chart coordinates of (a rotated copy of) this lattice.
    pub fn to_domain_point(&self) -> DomainPoint {
        domain::to_domain_point(self)
    }

    pub(crate) fn qr_r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub(crate) fn qr_q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn to_descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor { dim: self.dim(), basis: self.generators() }
    }

    pub fn from_descriptor(desc: &LatticeDescriptor) -> Result<Self> {
        if desc.basis.len() != desc.dim {
            return Err(Error::Parse(format!("descriptor has dim {} but {} generators", desc.dim, desc.basis.len())));
        }
        Self::from_generators(&desc.basis)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_descriptor()).expect("descriptor serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: LatticeDescriptor = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_descriptor(&desc)
    }
}

/// JSON form `{"dim": d, "basis": [[...], ...]}`; each inner array is one generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
}

fn condition_estimate(basis: &DMatrix<f64>, inverse: &DMatrix<f64>) -> f64 {
    basis.norm() * inverse.norm()
}
