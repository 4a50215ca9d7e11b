use serde::{Deserialize, Serialize};

use super::named::triangular_scale;
use super::{named_lattice, LatticeBasis, LatticeDescriptor, NamedLattice};
use crate::error::{Error, Result};

/// A finite union of translates of one lattice, each carrying a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicConfiguration {
    base: LatticeBasis,
    shifts: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl PeriodicConfiguration {
    /// Weights must be positive and sum to one; shifts must be distinct modulo the lattice.
    pub fn new(base: LatticeBasis, shifts: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let d = base.dim();
        if shifts.is_empty() || shifts.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "need one weight per shift, got {} shifts and {} weights",
                shifts.len(),
                weights.len()
            )));
        }
        if shifts.iter().any(|s| s.len() != d || s.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidParameter(format!("shifts must be finite vectors of length {d}")));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights must sum to 1, got {total}")));
        }
        for i in 0..shifts.len() {
            for j in 0..i {
                let diff: Vec<f64> = shifts[i].iter().zip(&shifts[j]).map(|(a, b)| a - b).collect();
                if base.contains(&diff, 1e-10) {
                    return Err(Error::InvalidParameter(format!("shifts {j} and {i} coincide modulo the lattice")));
                }
            }
        }
        Ok(Self { base, shifts, weights })
    }

    /// The configuration consisting of the lattice alone.
    pub fn single(base: LatticeBasis) -> Self {
        let d = base.dim();
        Self { base, shifts: vec![vec![0.0; d]], weights: vec![1.0] }
    }

    pub fn base(&self) -> &LatticeBasis {
        &self.base
    }

    pub fn shifts(&self) -> &[Vec<f64>] {
        &self.shifts
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn to_descriptor(&self) -> ConfigurationDescriptor {
        ConfigurationDescriptor {
            base: self.base.to_descriptor(),
            shifts: self.shifts.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn from_descriptor(desc: &ConfigurationDescriptor) -> Result<Self> {
        Self::new(LatticeBasis::from_descriptor(&desc.base)?, desc.shifts.clone(), desc.weights.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationDescriptor {
    pub base: LatticeDescriptor,
    pub shifts: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// The second honeycomb site `u = sqrt(2/sqrt 3) (0, 2/sqrt 3)`.
pub fn honeycomb_shift() -> Vec<f64> {
    vec![0.0, triangular_scale() * 2.0 / 3f64.sqrt()]
}

/// Triangular lattice plus its translate by [`honeycomb_shift`], equal weights.
pub fn honeycomb() -> PeriodicConfiguration {
    let base = named_lattice(&NamedLattice::Triangular).expect("triangular lattice is valid");
    PeriodicConfiguration::new(base, vec![vec![0.0, 0.0], honeycomb_shift()], vec![0.5, 0.5])
        .expect("honeycomb shifts are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honeycomb_shape() {
        let h = honeycomb();
        assert_eq!(h.shifts().len(), 2);
        let u = &h.shifts()[1];
        let u2 = u[0] * u[0] + u[1] * u[1];
        assert!((u2 - 8.0 / (3.0 * 3f64.sqrt())).abs() < 1e-14);
        assert_eq!(h.base(), &named_lattice(&NamedLattice::Triangular).unwrap());
        assert_eq!(h.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn validation() {
        let z2 = named_lattice(&NamedLattice::Cubic(2)).unwrap();
        assert!(PeriodicConfiguration::new(z2.clone(), vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.5, 0.5]).is_err());
        assert!(PeriodicConfiguration::new(z2.clone(), vec![vec![0.0, 0.0]], vec![0.9]).is_err());
        assert!(PeriodicConfiguration::new(z2, vec![vec![0.0, 0.0], vec![0.5, 0.5]], vec![0.25, 0.75]).is_ok());
    }
}
