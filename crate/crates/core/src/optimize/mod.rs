//! Criticality and minimality checks: finite-difference gradients and
//! Hessians of soft theta functions in the lattice chart or in the
//! translation variable, grid-plus-polish minimisation, alpha scans and
//! scale threshold searches.

mod fd;
mod nelder_mead;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{from_domain_point, reduce_2d, DomainPoint, LatticeBasis, PeriodicConfiguration};
use crate::measure::RadialMeasure;
use crate::theta::{config_theta_parts, soft_theta_parts, Strategy, SummationControl};

pub use fd::{default_gradient_step, default_hessian_step, gradient, hessian, sorted_eigenvalues};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};

/// Truncation used for values that get differentiated. Finite differences
/// divide by `h^2 ~ 1e-8`, so truncation noise must sit far below the
/// curvature being measured.
pub const DERIVATIVE_TOL: f64 = 1e-60;

/// Grid values closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest gradient norm of a critical point.
    pub tol_g: f64,
    /// Smallest Hessian eigenvalue of a strict minimum.
    pub tol_h: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tol_g: 1e-6, tol_h: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    CriticalStrictMin,
    CriticalSaddle,
    CriticalDegenerate,
    NotCritical,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CriticalStrictMin => "critical_strict_min",
            Self::CriticalSaddle => "critical_saddle",
            Self::CriticalDegenerate => "critical_degenerate",
            Self::NotCritical => "not_critical",
        }
    }

    pub fn is_critical(&self) -> bool {
        *self != Self::NotCritical
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "critical_strict_min" => Ok(Self::CriticalStrictMin),
            "critical_saddle" => Ok(Self::CriticalSaddle),
            "critical_degenerate" => Ok(Self::CriticalDegenerate),
            "not_critical" => Ok(Self::NotCritical),
            _ => Err(Error::Parse(format!("unknown classification `{s}`"))),
        }
    }
}

/// Classify from the gradient norm and the ascending Hessian spectrum.
pub fn classify(grad_norm: f64, eigs: &[f64], tol: &Tolerances) -> Classification {
    if !(grad_norm <= tol.tol_g) {
        return Classification::NotCritical;
    }
    let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= tol.tol_h {
        Classification::CriticalStrictMin
    } else if min <= -tol.tol_h {
        Classification::CriticalSaddle
    } else {
        Classification::CriticalDegenerate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportPoint {
    Chart(DomainPoint),
    Translation(Vec<f64>),
}

impl ReportPoint {
    pub fn params(&self) -> &[f64] {
        match self {
            Self::Chart(p) => &p.coords,
            Self::Translation(z) => z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    pub point: ReportPoint,
    /// Objective value at the point (full sum, including the zero-distance term).
    pub value: f64,
    pub grad_norm: f64,
    /// Ascending.
    pub hessian_eigs: Vec<f64>,
    pub classification: Classification,
    pub tolerances: Tolerances,
}

impl CriticalityReport {
    pub fn min_hessian_eig(&self) -> f64 {
        self.hessian_eigs.first().copied().unwrap_or(f64::NAN)
    }
}

fn tight(ctl: &SummationControl) -> SummationControl {
    SummationControl { tol: ctl.tol.min(DERIVATIVE_TOL), ..*ctl }
}

/// Translations are always summed in dual space, where the zero-distance
/// term does not depend on `z`.
fn translation_ctl(ctl: &SummationControl) -> SummationControl {
    match ctl.strategy {
        Strategy::Auto => ctl.with_strategy(Strategy::Dual),
        _ => *ctl,
    }
}

fn check_pair(dim: usize, mu: &RadialMeasure, nu: &RadialMeasure) -> Result<()> {
    if mu.dim() != dim || nu.dim() != dim {
        return Err(Error::InvalidParameter(format!(
            "measures live in d = {} and d = {}, expected d = {dim}",
            mu.dim(),
            nu.dim()
        )));
    }
    Ok(())
}

/// Soft theta at `z = 0` for the lattice with chart coordinates `coords`,
/// without the zero-distance term (which does not depend on the shape).
pub fn chart_objective(
    dim: usize,
    coords: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
) -> Result<f64> {
    let l = from_domain_point(&DomainPoint::new(dim, coords.to_vec())?)?;
    Ok(soft_theta_parts(&l, &vec![0.0; dim], alpha, mu, nu, ctl)?.varying)
}

/// Configuration soft theta at `z`, without the `z`-independent dual constant.
pub fn translation_objective(
    cfg: &PeriodicConfiguration,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
) -> Result<f64> {
    Ok(config_theta_parts(cfg, z, alpha, mu, nu, &translation_ctl(ctl))?.varying)
}

fn report_from<F>(f: F, point: ReportPoint, value: f64, tol: &Tolerances) -> Result<CriticalityReport>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let p = point.params().to_vec();
    let g = gradient(&f, &p, default_gradient_step(&p))?;
    let grad_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let hessian_eigs = sorted_eigenvalues(&hessian(&f, &p, default_hessian_step(&p))?);
    let classification = classify(grad_norm, &hessian_eigs, tol);
    Ok(CriticalityReport { point, value, grad_norm, hessian_eigs, classification, tolerances: *tol })
}

/// Gradient and Hessian in the lattice chart at `point`.
pub fn chart_report(
    point: &DomainPoint,
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
    tol: &Tolerances,
) -> Result<CriticalityReport> {
    ctl.validate()?;
    let d = point.dim;
    check_pair(d, mu, nu)?;
    let l = from_domain_point(point)?;
    let value = soft_theta_parts(&l, &vec![0.0; d], alpha, mu, nu, ctl)?.value();
    let fine = tight(ctl);
    report_from(|c| chart_objective(d, c, alpha, mu, nu, &fine), ReportPoint::Chart(point.clone()), value, tol)
}

/// [`chart_report`] at the chart point of `l` (an isometric copy of `l`).
pub fn lattice_report(
    l: &LatticeBasis,
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
    tol: &Tolerances,
) -> Result<CriticalityReport> {
    chart_report(&l.to_domain_point(), alpha, mu, nu, ctl, tol)
}

/// Gradient and Hessian in the translation variable at `z`.
pub fn translation_report(
    cfg: &PeriodicConfiguration,
    z: &[f64],
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
    tol: &Tolerances,
) -> Result<CriticalityReport> {
    ctl.validate()?;
    check_pair(cfg.dim(), mu, nu)?;
    let value = config_theta_parts(cfg, z, alpha, mu, nu, &translation_ctl(ctl))?.value();
    let fine = tight(ctl);
    report_from(
        |w| translation_objective(cfg, w, alpha, mu, nu, &fine),
        ReportPoint::Translation(z.to_vec()),
        value,
        tol,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Grid step of the planar lattice scan.
    pub grid_step: f64,
    pub y_max: f64,
    /// Points per axis of the translation scan.
    pub translation_grid: usize,
    pub polish: NelderMeadOptions,
    pub tolerances: Tolerances,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_step: 0.01,
            y_max: 4.0,
            translation_grid: 64,
            polish: NelderMeadOptions { step: 1e-2, x_tol: 1e-10, f_tol: 0.0, max_iter: 5000 },
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMinimum {
    pub point: DomainPoint,
    pub report: CriticalityReport,
    /// Every polished grid minimiser tied with the best (includes `point`).
    pub tied: Vec<DomainPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationMinimum {
    /// Representative in the unit cell.
    pub point: Vec<f64>,
    pub report: CriticalityReport,
    pub tied: Vec<Vec<f64>>,
}

/// Indices of the grid minimum and of every value within [`TIE_TOL`] of it.
fn argmins(values: &[f64]) -> Result<Vec<usize>> {
    let best = values.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::NoConvergence("no finite value on the scan grid".into()));
    }
    Ok((0..values.len()).filter(|&i| values[i] <= best + TIE_TOL).collect())
}

fn polish<F>(f: F, start: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let r = nelder_mead(f, start, opts)?;
    if !r.converged {
        return Err(Error::NoConvergence(format!(
            "Nelder-Mead polish did not converge in {} iterations",
            r.iterations
        )));
    }
    Ok(r)
}

/// Points of the reduced planar domain `0 <= x <= 1/2`, `x^2 + y^2 >= 1`, `y <= y_max` on a grid.
pub fn reduced_domain_grid(step: f64, y_max: f64) -> Result<Vec<[f64; 2]>> {
    if !(step > 0.0 && step <= 0.5) || !(y_max >= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < step <= 1/2 and y_max >= 1, got {step}, {y_max}")));
    }
    let nx = (0.5 / step + 1e-9).floor() as usize;
    let ny = (y_max / step + 1e-9).floor() as usize;
    if (nx + 1) * ny > 50_000_000 {
        return Err(Error::Resource(format!("planar grid with step {step} is too large")));
    }
    let mut pts = Vec::new();
    for i in 0..=nx {
        let x = i as f64 * step;
        for j in 1..=ny {
            let y = j as f64 * step;
            if x * x + y * y >= 1.0 - 1e-12 {
                pts.push([x, y]);
            }
        }
    }
    Ok(pts)
}

/// Minimise the lattice-shape objective.
///
/// In `d = 2` this scans the reduced domain and polishes every tied grid
/// minimiser; `start` is ignored. In `d = 3` only a local polish from `start`
/// is performed.
pub fn minimize_lattice(
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    start: Option<&DomainPoint>,
    opts: &ScanOptions,
    ctl: &SummationControl,
) -> Result<LatticeMinimum> {
    ctl.validate()?;
    let d = mu.dim();
    check_pair(d, mu, nu)?;
    let fine = tight(ctl);
    let objective = |c: &[f64]| chart_objective(d, c, alpha, mu, nu, &fine);
    match d {
        2 => {
            let grid = reduced_domain_grid(opts.grid_step, opts.y_max)?;
            let values: Vec<f64> = grid
                .par_iter()
                .map(|p| chart_objective(2, p, alpha, mu, nu, ctl))
                .collect::<Result<_>>()?;
            let mut polished = Vec::new();
            for i in argmins(&values)? {
                let r = polish(objective, &grid[i], &opts.polish)?;
                let l = from_domain_point(&DomainPoint::new(2, r.x)?)?;
                polished.push((r.value, reduce_2d(&l)?));
            }
            polished.sort_by(|a, b| a.0.total_cmp(&b.0));
            let best_value = polished[0].0;
            let mut tied: Vec<DomainPoint> = Vec::new();
            for (v, p) in &polished {
                let fresh = tied.iter().all(|t| {
                    t.coords.iter().zip(&p.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) > 1e-6
                });
                if *v <= best_value + TIE_TOL && fresh {
                    tied.push(p.clone());
                }
            }
            let point = tied[0].clone();
            let report = chart_report(&point, alpha, mu, nu, ctl, &opts.tolerances)?;
            Ok(LatticeMinimum { point, report, tied })
        }
        3 => {
            let start = start.ok_or_else(|| {
                Error::InvalidParameter("three-dimensional minimisation needs a start point near a known lattice".into())
            })?;
            if start.dim != 3 {
                return Err(Error::InvalidParameter("start point dimension does not match the measures".into()));
            }
            let r = polish(objective, &start.coords, &opts.polish)?;
            let point = DomainPoint::new(3, r.x)?;
            let report = chart_report(&point, alpha, mu, nu, ctl, &opts.tolerances)?;
            Ok(LatticeMinimum { tied: vec![point.clone()], point, report })
        }
        _ => Err(Error::InvalidParameter(format!("lattice minimisation supports d = 2 and d = 3, got d = {d}"))),
    }
}

/// Fractional grid `i / n` over the unit cell, in Cartesian coordinates.
fn cell_grid(l: &LatticeBasis, n: usize) -> Result<Vec<Vec<f64>>> {
    let d = l.dim();
    if d > 3 {
        return Err(Error::InvalidParameter(format!("translation scans support d <= 3, got d = {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("translation grid needs at least 2 points per axis".into()));
    }
    let total = n.pow(d as u32);
    Ok((0..total)
        .map(|mut k| {
            let frac: Vec<f64> = (0..d)
                .map(|_| {
                    let i = k % n;
                    k /= n;
                    i as f64 / n as f64
                })
                .collect();
            l.to_cartesian(&frac)
        })
        .collect())
}

/// Global minimiser of the configuration soft theta over the unit cell.
pub fn minimize_translation(
    cfg: &PeriodicConfiguration,
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    opts: &ScanOptions,
    ctl: &SummationControl,
) -> Result<TranslationMinimum> {
    ctl.validate()?;
    let l = cfg.base();
    check_pair(l.dim(), mu, nu)?;
    let grid = cell_grid(l, opts.translation_grid)?;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|z| translation_objective(cfg, z, alpha, mu, nu, ctl))
        .collect::<Result<_>>()?;
    let fine = tight(ctl);
    let step = l.min_norm() / opts.translation_grid as f64;
    let nm = NelderMeadOptions { step, ..opts.polish.clone() };
    let mut polished = Vec::new();
    for i in argmins(&values)? {
        let r = polish(|z| translation_objective(cfg, z, alpha, mu, nu, &fine), &grid[i], &nm)?;
        polished.push((r.value, l.reduce(&r.x)));
    }
    polished.sort_by(|a, b| a.0.total_cmp(&b.0));
    let best_value = polished[0].0;
    let mut tied: Vec<Vec<f64>> = Vec::new();
    for (v, z) in &polished {
        if *v <= best_value + TIE_TOL && tied.iter().all(|t| l.periodic_distance(t, z) > 1e-6) {
            tied.push(z.clone());
        }
    }
    let point = tied[0].clone();
    let report = translation_report(cfg, &point, alpha, mu, nu, ctl, &opts.tolerances)?;
    Ok(TranslationMinimum { point, report, tied })
}

/// Classification of `l` in its chart at each `alpha`, in input order.
pub fn alpha_scan_local_min(
    l: &LatticeBasis,
    alphas: &[f64],
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    ctl: &SummationControl,
    tol: &Tolerances,
) -> Result<Vec<CriticalityReport>> {
    if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {a}")));
    }
    alphas.par_iter().map(|&a| lattice_report(l, a, mu, nu, ctl, tol)).collect()
}

/// `{step * k : 1 <= k <= n}`.
pub fn alpha_preset(step: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| step * k as f64).collect()
}

/// `{base^{-k} : 0 <= k <= n}`.
pub fn geometric_grid(base: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| base.powi(-(k as i32))).collect()
}

/// The point whose minimality is tested in a scale search.
#[derive(Debug, Clone)]
pub enum ScaleProblem {
    /// The chart point of a lattice.
    Lattice(LatticeBasis),
    /// A translation `z` of a configuration.
    Translation { cfg: PeriodicConfiguration, z: Vec<f64> },
}

impl ScaleProblem {
    fn report(
        &self,
        alpha: f64,
        mu: &RadialMeasure,
        nu: &RadialMeasure,
        ctl: &SummationControl,
        tol: &Tolerances,
    ) -> Result<CriticalityReport> {
        match self {
            Self::Lattice(l) => lattice_report(l, alpha, mu, nu, ctl, tol),
            Self::Translation { cfg, z } => translation_report(cfg, z, alpha, mu, nu, ctl, tol),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Lattice(l) => l.dim(),
            Self::Translation { cfg, .. } => cfg.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleThresholdReport {
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// `pass_matrix[i][j]` is the strict-minimum verdict at `(eps_grid[i], delta_grid[j])`.
    pub pass_matrix: Vec<Vec<bool>>,
    pub reports: Vec<Vec<CriticalityReport>>,
    /// Corner of the largest all-pass block of smallest scales, if any.
    pub eps0: Option<f64>,
    pub delta0: Option<f64>,
    /// Entries that pass although some entry with smaller or equal scales fails.
    pub violations: Vec<(usize, usize)>,
}

impl ScaleThresholdReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.pass_matrix.iter().flatten().all(|p| *p)
    }
}

/// Corner `(eps0, delta0)` of the largest block of smallest scales on which
/// every verdict passes, and the entries breaking monotonicity.
pub fn infer_thresholds(
    pass: &[Vec<bool>],
    eps_grid: &[f64],
    delta_grid: &[f64],
) -> (Option<f64>, Option<f64>, Vec<(usize, usize)>) {
    let (ne, nd) = (eps_grid.len(), delta_grid.len());
    let below = |i2: usize, j2: usize, i: usize, j: usize| eps_grid[i2] <= eps_grid[i] && delta_grid[j2] <= delta_grid[j];
    let mut violations = Vec::new();
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..ne {
        for j in 0..nd {
            let block_ok = (0..ne).all(|i2| (0..nd).all(|j2| !below(i2, j2, i, j) || pass[i2][j2]));
            if pass[i][j] && !block_ok {
                violations.push((i, j));
            }
            if block_ok {
                let size = (0..ne).filter(|&i2| eps_grid[i2] <= eps_grid[i]).count()
                    * (0..nd).filter(|&j2| delta_grid[j2] <= delta_grid[j]).count();
                let better = match best {
                    None => true,
                    Some((s, bi, _)) => size > s || (size == s && eps_grid[i] > eps_grid[bi]),
                };
                if better {
                    best = Some((size, i, j));
                }
            }
        }
    }
    (best.map(|(_, i, _)| eps_grid[i]), best.map(|(_, _, j)| delta_grid[j]), violations)
}

/// Classify the target point for every pair of rescaled measures `(mu_eps, nu_delta)`.
#[allow(clippy::too_many_arguments)]
pub fn scale_threshold_search(
    problem: &ScaleProblem,
    alpha: f64,
    mu: &RadialMeasure,
    nu: &RadialMeasure,
    eps_grid: &[f64],
    delta_grid: &[f64],
    ctl: &SummationControl,
    tol: &Tolerances,
) -> Result<ScaleThresholdReport> {
    if eps_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::InvalidParameter("scale grids must be non-empty".into()));
    }
    if eps_grid.iter().chain(delta_grid).any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidParameter("scales must be finite and >= 0".into()));
    }
    check_pair(problem.dim(), mu, nu)?;
    let (ne, nd) = (eps_grid.len(), delta_grid.len());
    let flat: Vec<CriticalityReport> = (0..ne * nd)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nd, k % nd);
            let m = mu.rescale_or_dirac(eps_grid[i])?;
            let n = nu.rescale_or_dirac(delta_grid[j])?;
            problem.report(alpha, &m, &n, ctl, tol)
        })
        .collect::<Result<_>>()?;
    let mut reports: Vec<Vec<CriticalityReport>> = Vec::with_capacity(ne);
    let mut it = flat.into_iter();
    for _ in 0..ne {
        reports.push(it.by_ref().take(nd).collect());
    }
    let pass_matrix: Vec<Vec<bool>> = reports
        .iter()
        .map(|row| row.iter().map(|r| r.classification == Classification::CriticalStrictMin).collect())
        .collect();

    let (eps0, delta0, violations) = infer_thresholds(&pass_matrix, eps_grid, delta_grid);
    Ok(ScaleThresholdReport {
        eps_grid: eps_grid.to_vec(),
        delta_grid: delta_grid.to_vec(),
        pass_matrix,
        reports,
        eps0,
        delta0,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{honeycomb, named_lattice, triangular_scale, NamedLattice};

    fn dirac2() -> RadialMeasure {
        RadialMeasure::dirac(2)
    }

    #[test]
    fn classification_bands() {
        let t = Tolerances::default();
        assert_eq!(classify(1e-3, &[1.0], &t), Classification::NotCritical);
        assert_eq!(classify(0.0, &[1e-8, 2.0], &t), Classification::CriticalStrictMin);
        assert_eq!(classify(0.0, &[-1e-8, 2.0], &t), Classification::CriticalSaddle);
        assert_eq!(classify(0.0, &[5e-9, 2.0], &t), Classification::CriticalDegenerate);
        assert_eq!(classify(f64::NAN, &[1.0], &t), Classification::NotCritical);
        for c in [
            Classification::CriticalStrictMin,
            Classification::CriticalSaddle,
            Classification::CriticalDegenerate,
            Classification::NotCritical,
        ] {
            assert_eq!(c.as_str().parse::<Classification>().unwrap(), c);
        }
    }

    #[test]
    fn triangular_is_a_strict_chart_minimum() {
        let tri = named_lattice(&NamedLattice::Triangular).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let r = lattice_report(&tri, alpha, &dirac2(), &dirac2(), &SummationControl::default(), &Tolerances::default())
                .unwrap();
            assert!(r.grad_norm <= 1e-6, "alpha {alpha}: {}", r.grad_norm);
            assert_eq!(r.classification, Classification::CriticalStrictMin, "{:?}", r.hessian_eigs);
        }
    }

    #[test]
    fn square_centre_has_zero_gradient() {
        let z2 = PeriodicConfiguration::single(named_lattice(&NamedLattice::Cubic(2)).unwrap());
        let ctl = SummationControl::default();
        let fine = tight(&ctl);
        let z = [0.5, 0.5];
        let g = gradient(|w| translation_objective(&z2, w, 1.0, &dirac2(), &dirac2(), &fine), &z, default_gradient_step(&z))
            .unwrap();
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-8);
    }

    #[test]
    fn barycentre_hessian_is_positive() {
        let tri = PeriodicConfiguration::single(named_lattice(&NamedLattice::Triangular).unwrap());
        let s = triangular_scale();
        let z1 = [s / 2.0, s / (2.0 * 3f64.sqrt())];
        let r = translation_report(&tri, &z1, 1.0, &dirac2(), &dirac2(), &SummationControl::default(), &Tolerances::default())
            .unwrap();
        assert_eq!(r.classification, Classification::CriticalStrictMin);
    }

    #[test]
    fn planar_scan_finds_triangular() {
        let opts = ScanOptions { grid_step: 0.05, ..Default::default() };
        let m = minimize_lattice(1.0, &dirac2(), &dirac2(), None, &opts, &SummationControl::default()).unwrap();
        assert!((m.point.coords[0] - 0.5).abs() < 1e-6);
        assert!((m.point.coords[1] - 3f64.sqrt() / 2.0).abs() < 1e-6);
    }

    #[test]
    fn translation_scan_on_square() {
        let z2 = PeriodicConfiguration::single(named_lattice(&NamedLattice::Cubic(2)).unwrap());
        let opts = ScanOptions { translation_grid: 16, ..Default::default() };
        let m = minimize_translation(&z2, 1.0, &dirac2(), &dirac2(), &opts, &SummationControl::default()).unwrap();
        assert!(z2.base().periodic_distance(&m.point, &[0.5, 0.5]) < 1e-6);
    }

    #[test]
    fn translation_ties_are_both_reported() {
        let tri = PeriodicConfiguration::single(named_lattice(&NamedLattice::Triangular).unwrap());
        let opts = ScanOptions { translation_grid: 24, ..Default::default() };
        let m = minimize_translation(&tri, 1.0, &dirac2(), &dirac2(), &opts, &SummationControl::default()).unwrap();
        assert_eq!(m.tied.len(), 2, "{:?}", m.tied);
    }

    #[test]
    fn honeycomb_minimum_is_a_hexagon_centre() {
        let opts = ScanOptions { translation_grid: 24, ..Default::default() };
        let h = honeycomb();
        let m = minimize_translation(&h, 1.0, &dirac2(), &dirac2(), &opts, &SummationControl::default()).unwrap();
        // The honeycomb vertices sit at the lattice points and their shifts; the centre is far from both.
        let l = h.base();
        let shift = &h.shifts()[1];
        let d0 = crate::lattice::distance_to_lattice(l, &m.point).1;
        let d1 = crate::lattice::distance_to_lattice(l, &[m.point[0] + shift[0], m.point[1] + shift[1]]).1;
        assert!((d0 - d1).abs() < 1e-6, "{d0} {d1}");
    }

    #[test]
    fn dirac_scale_entry_matches_point_case() {
        let tri = named_lattice(&NamedLattice::Triangular).unwrap();
        let ball = RadialMeasure::uniform_ball(2, 1.0).unwrap();
        let ctl = SummationControl::default();
        let tol = Tolerances::default();
        let rep = scale_threshold_search(&ScaleProblem::Lattice(tri.clone()), 1.0, &ball, &ball, &[0.0, 0.25], &[0.0, 0.25], &ctl, &tol)
            .unwrap();
        let point = lattice_report(&tri, 1.0, &dirac2(), &dirac2(), &ctl, &tol).unwrap();
        assert_eq!(rep.reports[0][0].classification, point.classification);
        assert!((rep.reports[0][0].value - point.value).abs() < 1e-14);
        assert!(rep.pass_matrix[0][0]);
    }

    #[test]
    fn threshold_inference() {
        let grid = geometric_grid(2.0, 3);
        assert_eq!(grid, vec![1.0, 0.5, 0.25, 0.125]);
        let t = true;
        let f = false;
        // Rows are eps = 1, 1/2, 1/4, 1/8; columns likewise for delta.
        let pass = vec![vec![f, f, f, f], vec![f, t, t, t], vec![t, t, t, t], vec![t, t, t, t]];
        let (e0, d0, v) = infer_thresholds(&pass, &grid, &grid);
        assert_eq!((e0, d0), (Some(0.5), Some(0.5)));
        assert!(v.is_empty());
        let noisy = vec![vec![t, f, f, f], vec![f, t, t, t], vec![t, t, t, t], vec![t, t, t, t]];
        let (_, _, v) = infer_thresholds(&noisy, &grid, &grid);
        assert_eq!(v, vec![(0, 0)]);
        let none = vec![vec![t; 4], vec![t; 4], vec![t; 4], vec![t, t, t, f]];
        assert_eq!(infer_thresholds(&none, &grid, &grid).0, None);
        assert_eq!(alpha_preset(0.05, 20).len(), 20);
    }

    #[test]
    fn bad_inputs() {
        let d3 = RadialMeasure::dirac(3);
        let ctl = SummationControl::default();
        let opts = ScanOptions::default();
        assert!(minimize_lattice(1.0, &d3, &d3, None, &opts, &ctl).is_err());
        assert!(minimize_lattice(1.0, &dirac2(), &d3, None, &opts, &ctl).is_err());
        let z2 = named_lattice(&NamedLattice::Cubic(2)).unwrap();
        assert!(alpha_scan_local_min(&z2, &[0.5, -1.0], &dirac2(), &dirac2(), &ctl, &Tolerances::default()).is_err());
        assert!(reduced_domain_grid(0.0, 4.0).is_err());
    }
}
