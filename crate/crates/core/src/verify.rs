//! Acceptance checks with one PASS/FAIL verdict each, and the kernel
//! calibration report.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::energy::{energy, epstein_direct, potential_inverse_power};
use crate::error::{Error, Result};
use crate::lattice::{
    deep_hole, distance_to_lattice, honeycomb, named_lattice, triangular_scale, DeepHoleOptions, LatticeBasis,
    NamedLattice, PeriodicConfiguration,
};
use crate::measure::RadialMeasure;
use crate::optimize::{
    alpha_preset, alpha_scan_local_min, geometric_grid, lattice_report, minimize_lattice, minimize_translation,
    scale_threshold_search, Classification, ScaleProblem, ScanOptions, Tolerances,
};
use crate::theta::{
    gaussian_closed_form, prefactored_summand, soft_theta, soft_theta_mc, soft_theta_prefactored, theta_direct,
    theta_dual, PrefactorVariant, Strategy, SummationControl,
};

pub const CRITERIA: [(u32, &str); 14] = [
    (1, "Jacobi duality"),
    (2, "Dirac reduction"),
    (3, "Gaussian oracle"),
    (4, "Planar lattice minimum"),
    (5, "Triangular barycentres"),
    (6, "Honeycomb centre"),
    (7, "Orthorhombic centre"),
    (8, "Cubic criticality"),
    (9, "BCC/FCC alpha scan"),
    (10, "Deep holes"),
    (11, "Duality transfer"),
    (12, "Laplace bridge"),
    (13, "Scale limit"),
    (14, "Kernel calibration"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Criteria 1-13.
    Core,
    /// Criterion 14.
    Calibration,
    All,
}

impl Suite {
    pub fn ids(&self) -> Vec<u32> {
        match self {
            Self::Core => (1..=13).collect(),
            Self::Calibration => vec![14],
            Self::All => (1..=14).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Self::Core),
            "calibration" => Ok(Self::Calibration),
            "all" => Ok(Self::All),
            _ => Err(Error::Parse(format!("unknown suite `{s}` (core, calibration, all)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {:<24} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Run one criterion. Errors inside the check count as a failure.
pub fn run_criterion(id: u32) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id} (valid: 1-14)")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => jacobi_duality(),
        2 => dirac_reduction(),
        3 => gaussian_oracle(),
        4 => planar_minimum(),
        5 => triangular_barycentres(),
        6 => honeycomb_centre(),
        7 => orthorhombic_centre(),
        8 => cubic_criticality(),
        9 => bcc_fcc_scan(),
        10 => deep_holes(),
        11 => duality_transfer(),
        12 => laplace_bridge(),
        13 => scale_limit(),
        _ => kernel_calibration(),
    };
    let (passed, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(CriterionResult { id, name, passed, detail, elapsed: start.elapsed() })
}

pub fn run_suite(suite: Suite) -> Vec<CriterionResult> {
    suite.ids().into_iter().map(|id| run_criterion(id).expect("suite ids are valid")).collect()
}

type Outcome = Result<(bool, String)>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-covolume lattice with a Gaussian random basis of moderate condition number.
pub fn random_lattice<R: Rng>(dim: usize, rng: &mut R) -> Result<LatticeBasis> {
    loop {
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        if m.determinant().abs() < 1e-3 {
            continue;
        }
        let l = LatticeBasis::normalized(m)?;
        if l.condition_number() <= 20.0 {
            return Ok(l);
        }
    }
}

/// Uniform point of the unit cell.
pub fn random_cell_point<R: Rng>(l: &LatticeBasis, rng: &mut R) -> Vec<f64> {
    let frac: Vec<f64> = (0..l.dim()).map(|_| rng.random::<f64>()).collect();
    l.to_cartesian(&frac)
}

fn lat(n: NamedLattice) -> Result<LatticeBasis> {
    named_lattice(&n)
}

fn measures_small(dim: usize) -> Result<Vec<(String, RadialMeasure)>> {
    Ok(vec![
        ("dirac".into(), RadialMeasure::dirac(dim)),
        ("gaussian(0.05)".into(), RadialMeasure::gaussian(dim, 0.05)?),
        ("uniform_ball(0.02)".into(), RadialMeasure::uniform_ball(dim, 0.02)?),
    ])
}

fn jacobi_duality() -> Outcome {
    let mut r = rng(1);
    let ctl = SummationControl::with_tol(1e-13);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let d = 2 + i % 2;
        let l = random_lattice(d, &mut r)?;
        let z = random_cell_point(&l, &mut r);
        let alpha = r.random_range(0.2..5.0);
        worst = worst.max((theta_direct(&l, &z, alpha, &ctl)? - theta_dual(&l, &z, alpha, &ctl)?).abs());
    }
    Ok((worst <= 1e-10, format!("200 lattices, max |direct - dual| = {worst:.3e} (tol 1e-10)")))
}

fn dirac_reduction() -> Outcome {
    let mut r = rng(2);
    let ctl = SummationControl::with_tol(1e-14);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = 2 + i % 2;
        let l = random_lattice(d, &mut r)?;
        let z = random_cell_point(&l, &mut r);
        let alpha = r.random_range(0.2..5.0);
        let m = RadialMeasure::dirac(d);
        worst = worst.max((soft_theta(&l, &z, alpha, &m, &m, &ctl)? - theta_dual(&l, &z, alpha, &ctl)?).abs());
    }
    Ok((worst <= 1e-12, format!("50 inputs, max |soft - dual| = {worst:.3e} (tol 1e-12)")))
}

fn gaussian_oracle() -> Outcome {
    let mut r = rng(3);
    let dual = SummationControl::with_tol(1e-13).with_strategy(Strategy::Dual);
    let ctl = SummationControl::with_tol(1e-13);
    let (mut worst, mut worst_sigma): (f64, f64) = (0.0, 0.0);
    for i in 0..20 {
        let d = 2 + i % 2;
        let l = random_lattice(d, &mut r)?;
        let z = random_cell_point(&l, &mut r);
        let alpha = r.random_range(0.3..3.0);
        let (s1, s2) = (r.random_range(0.02..0.4), r.random_range(0.02..0.4));
        let (mu, nu) = (RadialMeasure::gaussian(d, s1)?, RadialMeasure::gaussian(d, s2)?);
        let exact = gaussian_closed_form(&l, &z, alpha, s1, s2, &ctl)?;
        worst = worst.max((soft_theta(&l, &z, alpha, &mu, &nu, &dual)? - exact).abs());
        let mc = soft_theta_mc(&l, &z, alpha, &mu, &nu, 100_000, 1000 + i as u64, &ctl)?;
        worst_sigma = worst_sigma.max((mc.mean - exact).abs() / mc.std_err);
    }
    Ok((
        worst <= 1e-10 && worst_sigma <= 3.0,
        format!("20 inputs, max |dual - closed form| = {worst:.3e} (tol 1e-10), worst MC deviation {worst_sigma:.2} SE (tol 3)"),
    ))
}

fn planar_minimum() -> Outcome {
    let ctl = SummationControl::default();
    let target = [0.5, 3f64.sqrt() / 2.0];
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for (_, m) in measures_small(2)? {
            let res = minimize_lattice(alpha, &m, &m, None, &ScanOptions::default(), &ctl)?;
            let e = res.point.coords.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(e);
        }
    }
    Ok((worst <= 1e-4, format!("9 scans, max distance to (1/2, sqrt3/2) = {worst:.3e} (tol 1e-4)")))
}

fn barycentres() -> [Vec<f64>; 2] {
    let s = triangular_scale();
    [vec![s / 2.0, s / (2.0 * 3f64.sqrt())], vec![s, s / 3f64.sqrt()]]
}

fn triangular_barycentres() -> Outcome {
    let ctl = SummationControl::default();
    let cfg = PeriodicConfiguration::single(lat(NamedLattice::Triangular)?);
    let [z1, z2] = barycentres();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for (_, m) in measures_small(2)? {
            let res = minimize_translation(&cfg, alpha, &m, &m, &ScanOptions::default(), &ctl)?;
            let l = cfg.base();
            worst = worst.max(l.periodic_distance(&res.point, &z1).min(l.periodic_distance(&res.point, &z2)));
        }
    }
    Ok((worst <= 1e-5, format!("9 scans, max distance to nearest barycentre = {worst:.3e} (tol 1e-5)")))
}

fn honeycomb_centre() -> Outcome {
    let ctl = SummationControl::default();
    let cfg = honeycomb();
    let [z1, _] = barycentres();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for m in [RadialMeasure::dirac(2), RadialMeasure::gaussian(2, 0.05)?] {
            let res = minimize_translation(&cfg, alpha, &m, &m, &ScanOptions::default(), &ctl)?;
            worst = worst.max(cfg.base().periodic_distance(&res.point, &z1));
        }
    }
    Ok((worst <= 1e-5, format!("6 scans, max distance to the hexagon centre = {worst:.3e} (tol 1e-5)")))
}

fn orthorhombic_centre() -> Outcome {
    let ctl = SummationControl::default();
    let mut worst: f64 = 0.0;
    for a in [vec![2.0, 0.5], vec![1.5, 1.0, 1.0 / 1.5]] {
        let d = a.len();
        let cfg = PeriodicConfiguration::single(lat(NamedLattice::Orthorhombic(a.clone()))?);
        let centre: Vec<f64> = a.iter().map(|v| v / 2.0).collect();
        for m in [RadialMeasure::dirac(d), RadialMeasure::gaussian(d, 0.05)?] {
            let res = minimize_translation(&cfg, 1.0, &m, &m, &ScanOptions::default(), &ctl)?;
            worst = worst.max(cfg.base().periodic_distance(&res.point, &centre));
        }
    }
    Ok((worst <= 1e-5, format!("4 scans, max distance to a/2 = {worst:.3e} (tol 1e-5)")))
}

fn cubic_criticality() -> Outcome {
    let ctl = SummationControl::default();
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        let l = lat(NamedLattice::Cubic(d))?;
        for m in [RadialMeasure::dirac(d), RadialMeasure::gaussian(d, 0.1)?, RadialMeasure::uniform_ball(d, 0.1)?] {
            for alpha in [0.5, 1.0, 2.0] {
                worst = worst.max(lattice_report(&l, alpha, &m, &m, &ctl, &tol)?.grad_norm);
            }
        }
    }
    Ok((worst <= 1e-6, format!("18 cases, max chart gradient norm = {worst:.3e} (tol 1e-6)")))
}

fn bcc_fcc_scan() -> Outcome {
    let ctl = SummationControl::default();
    let tol = Tolerances::default();
    let alphas = alpha_preset(0.05, 20);
    let recip: Vec<f64> = alphas.iter().map(|a| 1.0 / a).collect();
    let mut failures = Vec::new();
    let mut min_eig = f64::INFINITY;
    for (name, l, grid) in [("bcc", NamedLattice::Bcc, &alphas), ("fcc", NamedLattice::Fcc, &recip)] {
        let l = lat(l)?;
        for (mname, m) in [("dirac", RadialMeasure::dirac(3)), ("gaussian(0.05)", RadialMeasure::gaussian(3, 0.05)?)] {
            for (a, rep) in grid.iter().zip(alpha_scan_local_min(&l, grid, &m, &m, &ctl, &tol)?) {
                min_eig = min_eig.min(rep.min_hessian_eig());
                if rep.classification != Classification::CriticalStrictMin || !(rep.min_hessian_eig() > 1e-8) {
                    failures.push(format!("{name}/{mname}@{a:.4}: {} ({:.2e})", rep.classification, rep.min_hessian_eig()));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("80 cases strict minima, smallest eigenvalue {min_eig:.3e}")
    } else {
        format!("{} of 80 cases fail: {}", failures.len(), failures.join("; "))
    };
    Ok((failures.is_empty(), detail))
}

fn deep_holes() -> Outcome {
    let c = 2f64.powf(-1.0 / 3.0);
    let c2 = 2f64.powf(-2.0 / 3.0);
    let cases = [
        ("Z2", NamedLattice::Cubic(2), vec![0.5, 0.5]),
        ("fcc", NamedLattice::Fcc, vec![c, c, c]),
        ("bcc", NamedLattice::Bcc, vec![c2, c2, 0.0]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, n, target) in cases {
        let l = lat(n)?;
        let hole = deep_hole(&l, &DeepHoleOptions::default())?;
        let want = distance_to_lattice(&l, &target).1;
        let err = (hole.distance - want).abs();
        ok &= err <= 1e-6;
        parts.push(format!("{name}: found {:.9}, expected {want:.9}", hole.distance));
    }
    Ok((ok, format!("{} (tol 1e-6)", parts.join("; "))))
}

fn duality_transfer() -> Outcome {
    let ctl = SummationControl::default();
    let tol = Tolerances::default();
    let mut mismatches = Vec::new();
    let names = [
        ("triangular", NamedLattice::Triangular),
        ("Z2", NamedLattice::Cubic(2)),
        ("fcc", NamedLattice::Fcc),
        ("bcc", NamedLattice::Bcc),
    ];
    for (name, n) in names {
        let l = lat(n)?;
        let m = RadialMeasure::dirac(l.dim());
        let dual = l.dual()?;
        for alpha in [0.5, 1.0, 2.0] {
            let a = lattice_report(&l, alpha, &m, &m, &ctl, &tol)?.classification;
            let b = lattice_report(&dual, 1.0 / alpha, &m, &m, &ctl, &tol)?.classification;
            if a != b {
                mismatches.push(format!("{name}@{alpha}: {a} vs dual {b}"));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "12 pairs agree".to_string()
    } else {
        format!("mismatches: {}", mismatches.join("; "))
    };
    Ok((mismatches.is_empty(), detail))
}

fn laplace_bridge() -> Outcome {
    let ctl = SummationControl::default();
    let mut worst: f64 = 0.0;
    for n in [NamedLattice::Cubic(2), NamedLattice::Triangular, NamedLattice::Fcc, NamedLattice::Bcc] {
        let l = lat(n)?;
        let z = deep_hole(&l, &DeepHoleOptions::default())?.point;
        for s in [5.0, 6.0] {
            let f = potential_inverse_power(s, l.dim())?;
            let via_theta = energy(&f, &l, &z, &ctl)?;
            let direct = epstein_direct(s, &l, &z)?;
            worst = worst.max(((via_theta - direct) / direct).abs());
        }
    }
    Ok((worst <= 1e-7, format!("8 cases, max relative difference = {worst:.3e} (tol 1e-7)")))
}

fn scale_limit() -> Outcome {
    let ctl = SummationControl::default();
    let tol = Tolerances::default();
    let grid = geometric_grid(2.0, 6);
    let problems = [
        ("triangular chart", ScaleProblem::Lattice(lat(NamedLattice::Triangular)?)),
        (
            "Z2 translation",
            ScaleProblem::Translation {
                cfg: PeriodicConfiguration::single(lat(NamedLattice::Cubic(2))?),
                z: vec![0.5, 0.5],
            },
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (pname, prob) in &problems {
        let ball = RadialMeasure::uniform_ball(2, 1.0)?;
        let rep = scale_threshold_search(prob, 1.0, &ball, &ball, &grid, &grid, &ctl, &tol)?;
        // Entries with eps, delta <= 2^-3.
        let small_fail = (3..grid.len()).flat_map(|i| (3..grid.len()).map(move |j| (i, j))).filter(|&(i, j)| !rep.pass_matrix[i][j]).count();
        ok &= small_fail == 0;
        parts.push(format!(
            "{pname}/ball: {small_fail} failures for k >= 3, thresholds ({:?}, {:?})",
            rep.eps0, rep.delta0
        ));
        let g = RadialMeasure::gaussian(2, 1.0)?;
        let rep = scale_threshold_search(prob, 1.0, &g, &g, &grid, &grid, &ctl, &tol)?;
        let fails: Vec<String> = rep
            .reports
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, r)| (i, j, r)))
            .filter(|(i, j, _)| !rep.pass_matrix[*i][*j])
            .map(|(i, j, r)| format!("(2^-{i},2^-{j}) {} {:.1e}", r.classification, r.min_hessian_eig()))
            .collect();
        ok &= fails.is_empty();
        if fails.is_empty() {
            parts.push(format!("{pname}/gaussian: all 49 pass"));
        } else {
            parts.push(format!("{pname}/gaussian: {} of 49 fail [{}]", fails.len(), fails.join(", ")));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn kernel_calibration() -> Outcome {
    let rep = calibration_report(20, 14)?;
    let d2 = rep.rows.iter().find(|r| r.dim == 2).expect("d = 2 is always reported");
    let ok = d2.doubled.rel_spread <= 1e-10;
    Ok((
        ok,
        format!(
            "d=2: prefactored(q) = {:.12} * F_mu(2q) F_nu(2q) (spread {:.1e}); same-argument ratio spread {:.1e}",
            d2.doubled.mean, d2.doubled.rel_spread, d2.same.rel_spread
        ),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioStats {
    pub mean: f64,
    /// Standard deviation over mean.
    pub rel_spread: f64,
    pub min: f64,
    pub max: f64,
}

impl RatioStats {
    fn from(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            mean,
            rel_spread: var.sqrt() / mean.abs(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub dim: usize,
    /// `prefactored(q) / (F_mu(q) F_nu(q))`.
    pub same: RatioStats,
    /// `prefactored(q) / (F_mu(2q) F_nu(2q))`.
    pub doubled: RatioStats,
    /// Full sums on the cubic lattice at `alpha = 1`, `z = 0`: reference, plain and quarter prefactor.
    pub sums: (f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub samples: usize,
    pub rows: Vec<CalibrationRow>,
}

fn random_measure<R: Rng>(dim: usize, rng: &mut R) -> Result<RadialMeasure> {
    // Keep 4 pi r q below the first zero of the ball transform for q <= 2.
    if rng.random::<bool>() {
        RadialMeasure::gaussian(dim, rng.random_range(0.02..0.3))
    } else {
        RadialMeasure::uniform_ball(dim, rng.random_range(0.02..0.12))
    }
}

/// Compare the prefactored kernel summand with the transform product in `d = 1, 2, 3`.
pub fn calibration_report(samples: usize, seed: u64) -> Result<CalibrationReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("calibration needs at least 2 samples".into()));
    }
    let mut r = rng(seed);
    let mut rows = Vec::new();
    for dim in 1..=3 {
        let (mut same, mut doubled) = (Vec::new(), Vec::new());
        for _ in 0..samples {
            let mu = random_measure(dim, &mut r)?;
            let nu = random_measure(dim, &mut r)?;
            let q = r.random_range(0.1..2.0);
            let p = prefactored_summand(&mu, &nu, q)?;
            same.push(p / (mu.fourier_radial(q)? * nu.fourier_radial(q)?));
            doubled.push(p / (mu.fourier_radial(2.0 * q)? * nu.fourier_radial(2.0 * q)?));
        }
        let l = lat(NamedLattice::Cubic(dim))?;
        let z = vec![0.0; dim];
        let m = RadialMeasure::gaussian(dim, 0.1)?;
        let ctl = SummationControl::default();
        let sums = (
            soft_theta(&l, &z, 1.0, &m, &m, &ctl)?,
            soft_theta_prefactored(&l, &z, 1.0, &m, &m, PrefactorVariant::Plain, &ctl)?,
            soft_theta_prefactored(&l, &z, 1.0, &m, &m, PrefactorVariant::Quarter, &ctl)?,
        );
        rows.push(CalibrationRow { dim, same: RatioStats::from(&same), doubled: RatioStats::from(&doubled), sums });
    }
    Ok(CalibrationReport { samples, rows })
}

impl fmt::Display for CalibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kernel calibration over {} random (q, mu, nu) per dimension", self.samples)?;
        for row in &self.rows {
            writeln!(f, "d = {}", row.dim)?;
            writeln!(
                f,
                "  prefactored / F(q)F(q):   mean {:.14e}  spread {:.3e}  range [{:.6e}, {:.6e}]",
                row.same.mean, row.same.rel_spread, row.same.min, row.same.max
            )?;
            writeln!(
                f,
                "  prefactored / F(2q)F(2q): mean {:.14e}  spread {:.3e}  (2 pi)^(d-2) = {:.14e}",
                row.doubled.mean,
                row.doubled.rel_spread,
                (2.0 * std::f64::consts::PI).powi(row.dim as i32 - 2)
            )?;
            let (reference, plain, quarter) = row.sums;
            writeln!(
                f,
                "  cubic lattice, alpha 1, gaussian(0.1): transform sum {reference:.14e}, plain {plain:.14e} (x{:.6}), quarter {quarter:.14e} (x{:.6})",
                plain / reference,
                quarter / reference
            )?;
        }
        Ok(())
    }
}
