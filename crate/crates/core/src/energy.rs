//! Lattice energies `E_f[L + z] = sum_p f(|p + z|^2)` of completely monotone
//! potentials, computed from the Laplace representation
//! `f(r) = int exp(-r t) dmu_f(t)` as `int theta_{L+z}(t / pi) dmu_f(t)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{distance_to_lattice, LatticeBasis};
use crate::quad::integrate;
use crate::special_fn::{ln_gamma_pos, unit_sphere_area};
use crate::theta::{theta_direct_parts, theta_dual, SummationControl};

/// Reconstruction window `[r_min, r_max]` (in squared distance) checked at construction.
pub const DEFAULT_RANGE: (f64, f64) = (0.25, 25.0);

/// A potential `f(r) = sum_j w_j exp(-r t_j)` of the squared distance `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMPotential {
    pub name: String,
    pub dim: usize,
    /// Laplace nodes `t_j > 0`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `|f(r)| = O(r^{-d/2 - sigma})` for this dimension, so lattice sums converge.
    pub decay_ok: bool,
    /// `f(0)` is infinite; the `p + z = 0` term is then dropped (Epstein convention).
    pub singular_at_origin: bool,
    /// Window on which the node representation was validated.
    pub range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialDescriptor {
    InversePower { s: f64 },
}

impl CMPotential {
    /// Potential with explicit Laplace nodes; bounded at the origin.
    pub fn from_nodes(name: &str, dim: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidParameter("need one weight per Laplace node".into()));
        }
        if nodes.iter().any(|t| !(t.is_finite() && *t > 0.0)) || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("Laplace nodes must be positive and weights finite".into()));
        }
        Ok(Self {
            name: name.to_string(),
            dim,
            nodes,
            weights,
            decay_ok: true,
            singular_at_origin: false,
            range: (0.0, f64::INFINITY),
        })
    }

    pub fn from_descriptor(dim: usize, desc: &PotentialDescriptor) -> Result<Self> {
        match desc {
            PotentialDescriptor::InversePower { s } => potential_inverse_power(*s, dim),
        }
    }

    /// `true` when every Laplace weight is nonnegative (the completely monotone class).
    pub fn is_completely_monotone(&self) -> bool {
        self.weights.iter().all(|w| *w >= 0.0)
    }

    /// `f(r)` from the node representation.
    pub fn eval(&self, r: f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * (-r * t).exp()).sum()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Step of the trapezoid rule in `v = ln t`.
const LOG_STEP: f64 = 0.3;

/// `f(r) = r^{-s/2}` through `t^{s/2 - 1} / Gamma(s/2) dt`.
///
/// The measure is discretised with the trapezoid rule in `v = ln t`, which
/// converges geometrically for this integrand. The lower end is chosen so the
/// discarded small-`t` mass changes lattice sums in dimension `dim` by less
/// than about 1e-12; the upper end covers `r >= r_min`. The reconstruction is
/// checked on a log grid of `[0.25, 25]` and must be within 1e-8 relative.
pub fn potential_inverse_power(s: f64, dim: usize) -> Result<CMPotential> {
    potential_inverse_power_with(s, dim, LOG_STEP, DEFAULT_RANGE)
}

pub fn potential_inverse_power_with(s: f64, dim: usize, step: f64, range: (f64, f64)) -> Result<CMPotential> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !s.is_finite() || s <= dim as f64 {
        return Err(Error::Divergence(format!("inverse power s = {s} needs s > d = {dim} for summability")));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!("log step must lie in (0, 1], got {step}")));
    }
    if !(range.0 > 0.0 && range.1 > range.0) {
        return Err(Error::InvalidParameter("reconstruction range must satisfy 0 < r_min < r_max".into()));
    }
    let half = s / 2.0;
    let d = dim as f64;
    let ln_gamma = ln_gamma_pos(half);
    // Small-t mass seen by a lattice sum: int_{-inf}^{v_lo} e^{v(s-d)/2} pi^{d/2} dv / Gamma(s/2).
    let budget = 1e-13;
    let v_lo_lattice = ((budget * (half - d / 2.0)).ln() + ln_gamma - 0.5 * d * PI.ln()) / (half - d / 2.0);
    // Same for f itself at r_max, relative.
    let v_lo_point = ((budget * half).ln() + ln_gamma - half * range.1.ln()) / half;
    let v_lo = v_lo_lattice.min(v_lo_point);
    // exp(-r_min e^v) e^{v s/2} below 1e-18 of f(r_min).
    let mut v_hi = (1.0 / range.0).ln();
    while half * v_hi - range.0 * v_hi.exp() - ln_gamma > (1e-18f64).ln() - half * range.0.ln() {
        v_hi += step;
    }
    let count = ((v_hi - v_lo) / step).ceil() as usize + 1;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for j in 0..count {
        let v = v_lo + step * j as f64;
        nodes.push(v.exp());
        weights.push(step * (half * v - ln_gamma).exp());
    }
    let pot = CMPotential {
        name: format!("inverse_power(s={s})"),
        dim,
        nodes,
        weights,
        decay_ok: true,
        singular_at_origin: true,
        range,
    };
    let worst = reconstruction_residual(&pot, s, 200);
    if worst > 1e-8 {
        return Err(Error::NoConvergence(format!(
            "Laplace nodes reproduce r^(-s/2) only to {worst:e} relative on [{}, {}]",
            range.0, range.1
        )));
    }
    Ok(pot)
}

/// Largest relative deviation of `pot` from `r^{-s/2}` over a log grid of its range.
pub fn reconstruction_residual(pot: &CMPotential, s: f64, points: usize) -> f64 {
    let (lo, hi) = pot.range;
    (0..points)
        .map(|i| {
            let r = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
            let exact = r.powf(-s / 2.0);
            ((pot.eval(r) - exact) / exact).abs()
        })
        .fold(0.0, f64::max)
}

/// `sum_p f(|p + z|^2)`, with the term `p + z = 0` dropped when `f` is singular there.
pub fn energy(f: &CMPotential, l: &LatticeBasis, z: &[f64], ctl: &SummationControl) -> Result<f64> {
    if f.dim != l.dim() {
        return Err(Error::InvalidParameter(format!("potential built for d = {}, lattice has d = {}", f.dim, l.dim())));
    }
    if !f.decay_ok {
        return Err(Error::Divergence(format!("{} does not decay fast enough to be summable", f.name)));
    }
    if z.len() != l.dim() {
        return Err(Error::InvalidParameter(format!("z has length {}, expected {}", z.len(), l.dim())));
    }
    let (_, dist) = distance_to_lattice(l, z);
    let on_lattice = dist < 1e-12;
    let exclude_origin = on_lattice && f.singular_at_origin;
    let zero = vec![0.0; l.dim()];
    let z_eval: &[f64] = if on_lattice { &zero } else { z };
    let mut total = 0.0;
    for (t, w) in f.nodes.iter().zip(&f.weights) {
        let alpha = t / PI;
        let th = if exclude_origin {
            // theta - 1 without cancellation: the direct split isolates the origin term.
            if alpha >= 1.0 {
                theta_direct_parts(l, z_eval, alpha, ctl)?.varying
            } else {
                theta_dual(l, z_eval, alpha, ctl)? - 1.0
            }
        } else {
            crate::theta::theta(l, z_eval, alpha, ctl)?
        };
        total += w * th;
    }
    Ok(total)
}

/// Like [`energy`] but refuses to drop a singular term: returns a domain error
/// when `z` lies on the lattice and `f` is unbounded at the origin.
pub fn energy_strict(f: &CMPotential, l: &LatticeBasis, z: &[f64], ctl: &SummationControl) -> Result<f64> {
    let (_, dist) = distance_to_lattice(l, z);
    if dist < 1e-12 && f.singular_at_origin {
        return Err(Error::Domain(format!("{} is singular at a lattice point of L + z", f.name)));
    }
    energy(f, l, z, ctl)
}

/// Independent direct-space evaluation of `sum_p |p + z|^{-s}` (Epstein zeta).
///
/// The sum is split with a smooth radial cutoff
/// `w(r) = (erf((R0 - r)/D) + erf((R0 + r)/D)) / 2`: the inner part
/// `sum_p f w` is summed over lattice points, and the outer part
/// `sum_p f (1 - w)` is replaced by its integral, which is exact up to
/// `exp(-(pi D)^2)`-small Fourier terms since `f (1 - w)` varies on scale `D`.
/// Inside `r < 0.25`, where `1 - w < 1e-15`, the outer part is dropped.
pub fn epstein_direct(s: f64, l: &LatticeBasis, z: &[f64]) -> Result<f64> {
    let d = l.dim();
    if s <= d as f64 {
        return Err(Error::Divergence(format!("s = {s} needs s > d = {d}")));
    }
    let (r0, width) = (12.0, 2.0);
    let top = r0 + 12.0 * width;
    let w = |r: f64| 0.5 * (libm::erf((r0 - r) / width) + libm::erf((r0 + r) / width));
    let one_minus_w = |r: f64| 0.5 * (libm::erfc((r0 - r) / width) + libm::erfc((r0 + r) / width));
    let (_, dist) = distance_to_lattice(l, z);
    let zero = vec![0.0; d];
    let zz: &[f64] = if dist < 1e-12 { &zero } else { z };
    let centre: Vec<f64> = zz.iter().map(|v| -v).collect();
    let mut inner = 0.0;
    let mut terms: Vec<f64> = Vec::new();
    l.for_each_point_within(&centre, top, crate::lattice::DEFAULT_ENUMERATION_CAP, |_, d2| {
        if d2 > 0.0 {
            let r = d2.sqrt();
            terms.push(d2.powf(-s / 2.0) * w(r));
        }
    })?;
    terms.sort_by(|a, b| a.total_cmp(b));
    for t in terms {
        inner += t;
    }
    let omega = unit_sphere_area(d);
    let dd = d as f64;
    let outer_mid = integrate(|r: f64| omega * r.powf(dd - 1.0 - s) * one_minus_w(r), 0.25, top, 1e-16, 1e-13)?;
    let outer_tail = omega * top.powf(dd - s) / (s - dd);
    Ok(inner + outer_mid + outer_tail)
}
