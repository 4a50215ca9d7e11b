//! Point and soft lattice theta functions.
//!
//! * `theta_direct`: `sum_{p in L} exp(-pi alpha |p + z|^2)`.
//! * `theta_dual`: `alpha^{-d/2} sum_{q in L*} exp(-pi |q|^2 / alpha) cos(2 pi q . z)`.
//! * `soft_theta`: the dual sum weighted by `F_mu(q) F_nu(q)`, the Fourier
//!   transforms of the smearing measures; Gaussian pairs also have an exact
//!   direct-space form with an effective `alpha`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{LatticeBasis, PeriodicConfiguration};
use crate::measure::{MeasureKind, RadialMeasure};
use crate::special_fn::{gamma_pos, unit_sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Direct,
    Dual,
    /// Dual for `alpha < 1`, direct otherwise (direct only when an exact
    /// direct-space form exists for the measures).
    Auto,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Strategy::Direct),
            "dual" => Ok(Strategy::Dual),
            "auto" => Ok(Strategy::Auto),
            _ => Err(Error::Parse(format!("unknown strategy '{s}'"))),
        }
    }
}

/// Truncation controls shared by every lattice sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationControl {
    /// Absolute bound on the discarded tail.
    pub tol: f64,
    /// Largest enumeration radius allowed.
    pub max_radius: f64,
    pub strategy: Strategy,
}

impl Default for SummationControl {
    fn default() -> Self {
        Self { tol: 1e-12, max_radius: 1e4, strategy: Strategy::Auto }
    }
}

impl SummationControl {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn with_strategy(self, strategy: Strategy) -> Self {
        Self { strategy, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.max_radius > 0.0) {
            return Err(Error::InvalidParameter(format!("max_radius must be > 0, got {}", self.max_radius)));
        }
        Ok(())
    }
}

/// A lattice sum split into the term at distance zero and everything else.
///
/// Derivatives in lattice shape or translation act on `varying` only, so
/// keeping it apart preserves its relative precision when it is tiny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParts {
    pub constant: f64,
    pub varying: f64,
}

impl ThetaParts {
    pub fn value(&self) -> f64 {
        self.constant + self.varying
    }

    fn scaled(self, c: f64) -> Self {
        Self { constant: self.constant * c, varying: self.varying * c }
    }

    fn add(self, other: Self) -> Self {
        Self { constant: self.constant + other.constant, varying: self.varying + other.varying }
    }
}

/// Neumaier compensated sum.
#[derive(Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Smallest radius `R` for which `sum_{|p + z| > R} exp(-pi a |p + z|^2) <= target`.
///
/// Each lattice point owns a Voronoi cell of volume one inside a ball of radius
/// `rho` (the covering bound), which gives the comparison integral
/// `|S^{d-1}| int_{R - rho}^inf r^{d-1} exp(-pi a (r - rho)^2) dr`.
pub fn cutoff_radius(dim: usize, a: f64, rho: f64, target: f64) -> f64 {
    let bound = |r: f64| tail_bound(dim, a, rho, r - 2.0 * rho);
    let mut lo = 2.0 * rho;
    if bound(lo) <= target {
        return lo;
    }
    let mut hi = lo + (1.0 + (1.0 / target).ln() / (PI * a)).sqrt();
    while bound(hi) > target {
        hi += hi - lo;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 * hi {
            break;
        }
    }
    hi
}

// |S^{d-1}| int_{u0}^inf (u + rho)^{d-1} exp(-pi a u^2) du for u0 >= 0.
fn tail_bound(dim: usize, a: f64, rho: f64, u0: f64) -> f64 {
    let u0 = u0.max(0.0);
    let k_max = dim - 1;
    let e = (-PI * a * u0 * u0).exp();
    let mut moments = vec![0.0; k_max + 1];
    moments[0] = libm::erfc((PI * a).sqrt() * u0) / (2.0 * a.sqrt());
    if k_max >= 1 {
        moments[1] = e / (2.0 * PI * a);
    }
    for k in 2..=k_max {
        moments[k] = u0.powi(k as i32 - 1) * e / (2.0 * PI * a) + (k as f64 - 1.0) / (2.0 * PI * a) * moments[k - 2];
    }
    let mut total = 0.0;
    let mut binom = 1.0;
    for (k, m) in moments.iter().enumerate() {
        total += binom * rho.powi((k_max - k) as i32) * m;
        binom = binom * (k_max - k) as f64 / (k + 1) as f64;
    }
    unit_sphere_area(dim) * total
}

fn check_inputs(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<()> {
    ctl.validate()?;
    if z.len() != l.dim() {
        return Err(Error::InvalidParameter(format!("z has length {}, expected {}", z.len(), l.dim())));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("z must be finite".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    Ok(())
}

fn check_measure(l: &LatticeBasis, m: &RadialMeasure) -> Result<()> {
    if m.dim() != l.dim() {
        return Err(Error::InvalidParameter(format!(
            "measure lives in dimension {}, lattice in {}",
            m.dim(),
            l.dim()
        )));
    }
    Ok(())
}

// sum_{p in L} exp(-pi a |p + z|^2), absolute error <= tol.
fn gaussian_sum(l: &LatticeBasis, z: &[f64], a: f64, tol: f64, max_radius: f64) -> Result<ThetaParts> {
    let radius = cutoff_radius(l.dim(), a, l.covering_bound(), tol / 2.0);
    if radius > max_radius {
        return Err(Error::Resource(format!("cutoff radius {radius:.3} exceeds max_radius {max_radius}")));
    }
    let centre: Vec<f64> = l.reduce(z).iter().map(|v| -v).collect();
    let mut acc = Acc::default();
    let mut constant = 0.0;
    l.for_each_point_within(&centre, radius, crate::lattice::DEFAULT_ENUMERATION_CAP, |_, d2| {
        if d2 == 0.0 {
            constant += 1.0;
        } else {
            acc.add((-PI * a * d2).exp());
        }
    })?;
    Ok(ThetaParts { constant, varying: acc.value() })
}

/// `sum_{p in L} exp(-pi alpha |p + z|^2)` by direct summation.
pub fn theta_direct(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<f64> {
    theta_direct_parts(l, z, alpha, ctl).map(|p| p.value())
}

pub fn theta_direct_parts(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<ThetaParts> {
    check_inputs(l, z, alpha, ctl)?;
    gaussian_sum(l, z, alpha, ctl.tol, ctl.max_radius)
}

/// The same theta function through the dual lattice.
pub fn theta_dual(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<f64> {
    theta_dual_parts(l, z, alpha, ctl).map(|p| p.value())
}

pub fn theta_dual_parts(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<ThetaParts> {
    check_inputs(l, z, alpha, ctl)?;
    dual_sum(l, z, alpha, ctl, |_| Ok(1.0))
}

/// `theta_direct` or `theta_dual` according to `ctl.strategy`.
pub fn theta(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<f64> {
    theta_parts(l, z, alpha, ctl).map(|p| p.value())
}

pub fn theta_parts(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl) -> Result<ThetaParts> {
    let dual = match ctl.strategy {
        Strategy::Direct => false,
        Strategy::Dual => true,
        Strategy::Auto => alpha < 1.0,
    };
    if dual {
        theta_dual_parts(l, z, alpha, ctl)
    } else {
        theta_direct_parts(l, z, alpha, ctl)
    }
}

// alpha^{-d/2} sum_{q in L*} exp(-pi |q|^2/alpha) weight(|q|) cos(2 pi q . z), with |weight| <= 1.
fn dual_sum<W>(l: &LatticeBasis, z: &[f64], alpha: f64, ctl: &SummationControl, weight: W) -> Result<ThetaParts>
where
    W: Fn(f64) -> Result<f64>,
{
    let d = l.dim();
    let dual = l.dual()?;
    let pref = alpha.powf(-(d as f64) / 2.0);
    let a = 1.0 / alpha;
    let radius = cutoff_radius(d, a, dual.covering_bound(), ctl.tol / (2.0 * pref));
    if radius > ctl.max_radius {
        return Err(Error::Resource(format!("dual cutoff radius {radius:.3} exceeds max_radius {}", ctl.max_radius)));
    }
    let mut acc = Acc::default();
    let mut sine = 0.0;
    let mut failure = None;
    dual.for_each_point_within(&vec![0.0; d], radius, crate::lattice::DEFAULT_ENUMERATION_CAP, |q, q2| {
        if q2 == 0.0 || failure.is_some() {
            return;
        }
        let w = match weight(q2.sqrt()) {
            Ok(w) => w,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let phase = 2.0 * PI * q.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        let g = (-PI * a * q2).exp() * w;
        acc.add(g * phase.cos());
        if cfg!(debug_assertions) {
            sine += g * phase.sin();
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    debug_assert!(sine.abs() <= 1e-12 * (1.0 + acc.value().abs()), "sine remainder {sine}");
    Ok(ThetaParts { constant: 1.0, varying: acc.value() }.scaled(pref))
}

fn gaussian_width(m: &RadialMeasure) -> Option<f64> {
    match m.kind() {
        MeasureKind::Dirac => Some(0.0),
        MeasureKind::Gaussian { sigma } => Some(*sigma),
        _ => None,
    }
}

fn effective_alpha(alpha: f64, sigma1: f64, sigma2: f64) -> f64 {
    alpha / (1.0 + 2.0 * PI * alpha * (sigma1 * sigma1 + sigma2 * sigma2))
}

/// Exact direct-space form for Gaussian (or Dirac) pairs:
/// `c sum_p exp(-pi alpha_eff |p + z|^2)` with `alpha_eff = alpha / (1 + 2 pi alpha tau^2)`,
/// `c = (1 + 2 pi alpha tau^2)^{-d/2}`, `tau^2 = sigma_1^2 + sigma_2^2`.
pub fn gaussian_closed_form(
    l: &LatticeBasis,
    z: &[f64],
    alpha: f64,
    sigma1: f64,
    sigma2: f64,
    ctl: &SummationControl,
) -> Result<f64> {
    gaussian_closed_form_parts(l, z, alpha, sigma1, sigma2, ctl).map(|p| p.value())
}

pub fn gaussian_closed_form_parts(
    l: &LatticeBasis,
    z: &[f64],
    alpha: f64,
    sigma1: f64,
    sigma2: f64,
    ctl: &SummationControl,
) -> Result<ThetaParts> {
    check_inputs(l, z, alpha, ctl)?;
    if !(sigma1 >= 0.0 && sigma2 >= 0.0) {
        return Err(Error::InvalidParameter("Gaussian widths must be >= 0".into()));
    }
    let s = 1.0 + 2.0 * PI * alpha * (sigma1 * sigma1 + sigma2 * sigma2);
    let c = s.powf(-(l.dim() as f64) / 2.0);
    Ok(gaussian_sum(l, z, alpha / s, ctl.tol / c, ctl.max_radius)?.scaled(c))
}

/// Soft theta function of `mu` smeared on `L` probed by `nu` at `z`.
pub fn soft_theta(
    l: &LatticeBasis,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
) -> Result<f64> {
    soft_theta_parts(l, z, alpha, mu, nu, ctl).map(|p| p.value())
}

pub fn soft_theta_parts(
    l: &LatticeBasis,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
) -> Result<ThetaParts> {
    check_inputs(l, z, alpha, ctl)?;
    check_measure(l, mu)?;
    check_measure(l, nu)?;
    let widths = gaussian_width(mu).zip(gaussian_width(nu));
    let direct = match ctl.strategy {
        Strategy::Dual => false,
        Strategy::Direct => {
            if widths.is_none() {
                return Err(Error::InvalidParameter(
                    "direct summation of the soft theta function needs Gaussian or Dirac measures".into(),
                ));
            }
            true
        }
        // The closed form is a theta function at alpha_eff; below 1 the
        // shape-dependent part would drown in the zero-distance term.
        Strategy::Auto => widths.is_some_and(|(s1, s2)| effective_alpha(alpha, s1, s2) >= 1.0),
    };
    if direct {
        let (s1, s2) = widths.expect("checked above");
        return gaussian_closed_form_parts(l, z, alpha, s1, s2, ctl);
    }
    if mu.is_dirac() && nu.is_dirac() {
        return dual_sum(l, z, alpha, ctl, |_| Ok(1.0));
    }
    dual_sum(l, z, alpha, ctl, |k| Ok(mu.fourier_radial(k)? * nu.fourier_radial(k)?))
}

/// Weighted average of soft theta functions over the translates of a configuration.
pub fn config_theta(
    cfg: &PeriodicConfiguration,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
) -> Result<f64> {
    config_theta_parts(cfg, z, alpha, mu, nu, ctl).map(|p| p.value())
}

pub fn config_theta_parts(
    cfg: &PeriodicConfiguration,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
) -> Result<ThetaParts> {
    if z.len() != cfg.dim() {
        return Err(Error::InvalidParameter(format!("z has length {}, expected {}", z.len(), cfg.dim())));
    }
    let mut total = ThetaParts { constant: 0.0, varying: 0.0 };
    for (shift, w) in cfg.shifts().iter().zip(cfg.weights()) {
        let zz: Vec<f64> = z.iter().zip(shift).map(|(a, b)| a + b).collect();
        total = total.add(soft_theta_parts(cfg.base(), &zz, alpha, mu, nu, ctl)?.scaled(*w));
    }
    Ok(total)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
}

/// Averages `theta_direct(L, z - x + y, alpha)` over draws `x ~ mu`, `y ~ nu`.
#[allow(clippy::too_many_arguments)]
pub fn soft_theta_mc(
    l: &LatticeBasis,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    n: usize,
    seed: u64,
    ctl: &SummationControl,
) -> Result<McEstimate> {
    check_inputs(l, z, alpha, ctl)?;
    check_measure(l, mu)?;
    check_measure(l, nu)?;
    if n < 1000 {
        return Err(Error::InvalidParameter(format!("Monte Carlo needs n >= 1000 samples, got {n}")));
    }
    if mu.is_dirac() && nu.is_dirac() {
        return Ok(McEstimate { mean: theta_direct(l, z, alpha, ctl)?, std_err: 0.0 });
    }
    const CHUNK: usize = 4096;
    let chunks = n.div_ceil(CHUNK);
    let values: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Vec<f64>> {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let xs = mu.sample_with(len, &mut rng)?;
            let ys = nu.sample_with(len, &mut rng)?;
            xs.iter()
                .zip(&ys)
                .map(|(x, y)| {
                    let w: Vec<f64> = z.iter().zip(x).zip(y).map(|((zi, xi), yi)| zi - xi + yi).collect();
                    theta_direct(l, &w, alpha, ctl)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut acc = Acc::default();
    for v in values.iter().flatten() {
        acc.add(*v);
    }
    let mean = acc.value() / n as f64;
    let var = values.iter().flatten().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    Ok(McEstimate { mean, std_err: (var / n as f64).sqrt() })
}

/// Dual-sum summand in the prefactored kernel form,
/// `Gamma(d/2)^2 g_mu(|q|) g_nu(|q|) / |q|^{d-2}`, without the Gaussian factor.
///
/// At `q = 0` the limit `(2 pi)^{d-2}` is returned.
pub fn prefactored_summand(mu: &RadialMeasure, nu: &RadialMeasure, q_norm: f64) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::InvalidParameter("measures live in different dimensions".into()));
    }
    let d = mu.dim() as f64;
    if q_norm == 0.0 {
        return Ok((2.0 * PI).powf(d - 2.0));
    }
    let g = gamma_pos(d / 2.0);
    Ok(g * g * mu.g_kernel(q_norm)? * nu.g_kernel(q_norm)? / q_norm.powf(d - 2.0))
}

/// Which constant multiplies the prefactored dual sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorVariant {
    /// `alpha^{-d/2}`.
    Plain,
    /// `alpha^{-d/2} / 4`.
    Quarter,
}

/// Soft theta assembled from [`prefactored_summand`]; kept for calibration only.
#[allow(clippy::too_many_arguments)]
pub fn soft_theta_prefactored(
    l: &LatticeBasis,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    variant: PrefactorVariant,
    ctl: &SummationControl,
) -> Result<f64> {
    check_inputs(l, z, alpha, ctl)?;
    check_measure(l, mu)?;
    check_measure(l, nu)?;
    let d = l.dim() as f64;
    let dual = l.dual()?;
    let pref = alpha.powf(-d / 2.0) * if variant == PrefactorVariant::Quarter { 0.25 } else { 1.0 };
    // The summand may exceed 1 by (2 pi)^{d-2}; widen the tail budget accordingly.
    let growth = (2.0 * PI).powf((d - 2.0).max(0.0));
    let radius = cutoff_radius(l.dim(), 1.0 / alpha, dual.covering_bound(), ctl.tol / (2.0 * pref * growth));
    let mut acc = Acc::default();
    let mut failure = None;
    dual.for_each_point_within(&vec![0.0; l.dim()], radius, crate::lattice::DEFAULT_ENUMERATION_CAP, |q, q2| {
        if failure.is_some() {
            return;
        }
        match prefactored_summand(mu, nu, q2.sqrt()) {
            Ok(s) => {
                let phase = 2.0 * PI * q.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
                acc.add((-PI * q2 / alpha).exp() * s * phase.cos());
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(pref * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{honeycomb, named_lattice, NamedLattice};

    fn ctl() -> SummationControl {
        SummationControl::default()
    }

    fn lat(name: NamedLattice) -> LatticeBasis {
        named_lattice(&name).unwrap()
    }

    #[test]
    fn one_dimensional_tail() {
        let z1 = lat(NamedLattice::Cubic(1));
        // theta - 1, read off the split to avoid cancellation against the origin term.
        let v = theta_direct_parts(&z1, &[0.0], 10.0, &SummationControl::with_tol(1e-20)).unwrap().varying;
        let lead = 2.0 * (-10.0 * PI).exp();
        assert!(v >= lead && v <= 2.000_000_1 * (-10.0 * PI).exp());
    }

    #[test]
    fn square_is_a_product() {
        let z1 = lat(NamedLattice::Cubic(1));
        let z2 = lat(NamedLattice::Cubic(2));
        let t1 = theta_direct(&z1, &[0.0], 1.0, &ctl()).unwrap();
        let t2 = theta_direct(&z2, &[0.0, 0.0], 1.0, &ctl()).unwrap();
        assert!((t2 - t1 * t1).abs() < 1e-12);
    }

    #[test]
    fn triangular_below_square() {
        let t = theta_direct(&lat(NamedLattice::Triangular), &[0.0, 0.0], 1.0, &ctl()).unwrap();
        let s = theta_direct(&lat(NamedLattice::Cubic(2)), &[0.0, 0.0], 1.0, &ctl()).unwrap();
        assert!(t < s);
    }

    #[test]
    fn jacobi_examples() {
        let z2 = lat(NamedLattice::Cubic(2));
        for z in [[0.0, 0.0], [0.5, 0.5]] {
            let a = theta_direct(&z2, &z, 1.0, &ctl()).unwrap();
            let b = theta_dual(&z2, &z, 1.0, &ctl()).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let tri = lat(NamedLattice::Triangular);
        let a = theta_dual(&tri, &[0.0, 0.0], 2.0, &ctl()).unwrap();
        let b = 0.5 * theta_direct(&tri.dual().unwrap(), &[0.0, 0.0], 0.5, &ctl()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn dirac_reduction() {
        let tri = lat(NamedLattice::Triangular);
        let d = RadialMeasure::dirac(2);
        let ctl = ctl().with_strategy(Strategy::Dual);
        let a = soft_theta(&tri, &[0.1, 0.3], 0.7, &d, &d, &ctl).unwrap();
        let b = theta_dual(&tri, &[0.1, 0.3], 0.7, &ctl).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gaussian_pair_dual_matches_closed_form() {
        let z2 = lat(NamedLattice::Cubic(2));
        let (s1, s2) = (0.1, 0.23);
        let mu = RadialMeasure::gaussian(2, s1).unwrap();
        let nu = RadialMeasure::gaussian(2, s2).unwrap();
        for z in [[0.0, 0.0], [0.31, -0.2]] {
            let a = soft_theta(&z2, &z, 1.0, &mu, &nu, &ctl().with_strategy(Strategy::Dual)).unwrap();
            let b = gaussian_closed_form(&z2, &z, 1.0, s1, s2, &ctl()).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn honeycomb_average() {
        let h = honeycomb();
        let d = RadialMeasure::dirac(2);
        let v = config_theta(&h, &[0.0, 0.0], 1.0, &d, &d, &ctl()).unwrap();
        let tri = lat(NamedLattice::Triangular);
        let u = &h.shifts()[1];
        let expected = 0.5 * (theta(&tri, &[0.0, 0.0], 1.0, &ctl()).unwrap() + theta(&tri, u, 1.0, &ctl()).unwrap());
        assert!((v - expected).abs() < 1e-12);
        // The honeycomb is invariant under x -> u - x, hence f(z) = f(-z - u).
        let z = [0.17, 0.41];
        let reflected = [-z[0] - u[0], -z[1] - u[1]];
        let a = config_theta(&h, &z, 1.0, &d, &d, &ctl()).unwrap();
        let b = config_theta(&h, &reflected, 1.0, &d, &d, &ctl()).unwrap();
        assert!((a - b).abs() < 1e-10);
        let shifted = [z[0] + u[0], z[1] + u[1]];
        let c = config_theta(&h, &shifted, 1.0, &d, &d, &ctl()).unwrap();
        assert!((a - c).abs() > 1e-3);
    }

    #[test]
    fn mc_dirac_is_exact() {
        let z2 = lat(NamedLattice::Cubic(2));
        let d = RadialMeasure::dirac(2);
        let e = soft_theta_mc(&z2, &[0.0, 0.0], 1.0, &d, &d, 1000, 5, &ctl()).unwrap();
        assert_eq!(e.std_err, 0.0);
        assert_eq!(e.mean, theta_direct(&z2, &[0.0, 0.0], 1.0, &ctl()).unwrap());
    }

    #[test]
    fn mc_gaussian_within_three_errors() {
        let z2 = lat(NamedLattice::Cubic(2));
        let g = RadialMeasure::gaussian(2, 0.1).unwrap();
        let e = soft_theta_mc(&z2, &[0.0, 0.0], 1.0, &g, &g, 100_000, 3, &ctl()).unwrap();
        let exact = gaussian_closed_form(&z2, &[0.0, 0.0], 1.0, 0.1, 0.1, &ctl()).unwrap();
        assert!((e.mean - exact).abs() <= 3.0 * e.std_err, "{} vs {exact} ({})", e.mean, e.std_err);
        let again = soft_theta_mc(&z2, &[0.0, 0.0], 1.0, &g, &g, 100_000, 3, &ctl()).unwrap();
        assert_eq!(e, again);
    }

    #[test]
    fn cutoff_bound_is_conservative() {
        // The discarded tail really is below the target for Z^3.
        let z3 = lat(NamedLattice::Cubic(3));
        for &a in &[0.3, 1.0, 4.0] {
            let target = 1e-9;
            let r = cutoff_radius(3, a, z3.covering_bound(), target);
            let mut tail = 0.0;
            z3.for_each_point_within(&[0.0; 3], r + 6.0, usize::MAX, |_, d2| {
                if d2.sqrt() > r {
                    tail += (-PI * a * d2).exp();
                }
            })
            .unwrap();
            assert!(tail <= target, "a={a}: tail {tail}");
        }
    }

    #[test]
    fn parts_split_origin() {
        let z2 = lat(NamedLattice::Cubic(2));
        let p = theta_direct_parts(&z2, &[0.0, 0.0], 3.0, &ctl()).unwrap();
        assert_eq!(p.constant, 1.0);
        let q = theta_dual_parts(&z2, &[0.0, 0.0], 0.5, &ctl()).unwrap();
        assert_eq!(q.constant, 2.0);
    }

    #[test]
    fn prefactored_form_in_two_dimensions() {
        let tri = lat(NamedLattice::Triangular);
        let d = RadialMeasure::dirac(2);
        let a = soft_theta_prefactored(&tri, &[0.2, 0.1], 0.8, &d, &d, PrefactorVariant::Plain, &ctl()).unwrap();
        let b = theta_dual(&tri, &[0.2, 0.1], 0.8, &ctl()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let z2 = lat(NamedLattice::Cubic(2));
        assert!(theta_direct(&z2, &[0.0, 0.0], 0.0, &ctl()).is_err());
        assert!(theta_direct(&z2, &[0.0], 1.0, &ctl()).is_err());
        assert!(theta_direct(&z2, &[0.0, 0.0], 1.0, &SummationControl::with_tol(0.0)).is_err());
        let b = RadialMeasure::uniform_ball(2, 0.1).unwrap();
        let direct = ctl().with_strategy(Strategy::Direct);
        assert!(soft_theta(&z2, &[0.0, 0.0], 1.0, &b, &b, &direct).is_err());
        let b3 = RadialMeasure::uniform_ball(3, 0.1).unwrap();
        assert!(soft_theta(&z2, &[0.0, 0.0], 1.0, &b3, &b3, &ctl()).is_err());
    }
}
