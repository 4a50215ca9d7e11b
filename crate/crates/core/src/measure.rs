//! Rotationally symmetric probability measures on `R^d`: Dirac mass, isotropic
//! Gaussians, uniform balls and generic radial densities.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_panels};
use crate::special_fn::{bessel_j_over_power, bessel_j_unchecked, gamma_pos, unit_sphere_area};

/// Radial profile `s -> rho(s)`: the density at any point `x` with `|x| = s`.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum MeasureKind {
    Dirac,
    /// Density `(2 pi sigma^2)^{-d/2} exp(-|x|^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    UniformBall { r: f64 },
    /// Density `scale^{-d} rho(|x| / scale)` supported in `|x| <= scale * support_radius`.
    RadialDensity { rho: Profile, support_radius: f64, scale: f64 },
}

impl fmt::Debug for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::Dirac => write!(f, "Dirac"),
            MeasureKind::Gaussian { sigma } => write!(f, "Gaussian {{ sigma: {sigma} }}"),
            MeasureKind::UniformBall { r } => write!(f, "UniformBall {{ r: {r} }}"),
            MeasureKind::RadialDensity { support_radius, scale, .. } => {
                write!(f, "RadialDensity {{ support_radius: {support_radius}, scale: {scale} }}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialMeasure {
    dim: usize,
    kind: MeasureKind,
    cm_flag: bool,
}

/// JSON form, e.g. `{"kind":"gaussian","sigma":0.1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureDescriptor {
    Dirac,
    Gaussian { sigma: f64 },
    UniformBall { r: f64 },
}

impl RadialMeasure {
    pub fn dirac(dim: usize) -> Self {
        Self { dim: dim.max(1), kind: MeasureKind::Dirac, cm_flag: false }
    }

    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("gaussian sigma must be > 0, got {sigma}")));
        }
        Ok(Self { dim, kind: MeasureKind::Gaussian { sigma }, cm_flag: true })
    }

    pub fn uniform_ball(dim: usize, r: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be > 0, got {r}")));
        }
        Ok(Self { dim, kind: MeasureKind::UniformBall { r }, cm_flag: false })
    }

    /// Measure with density `rho(|x|)` on `|x| <= support_radius`.
    ///
    /// The total mass `int rho(s) |S^{d-1}| s^{d-1} ds` must be one within 1e-8.
    /// `cm` declares the profile completely monotone; it is not checked.
    pub fn radial_density(dim: usize, rho: Profile, support_radius: f64, cm: bool) -> Result<Self> {
        check_dim(dim)?;
        if !(support_radius.is_finite() && support_radius > 0.0) {
            return Err(Error::InvalidParameter(format!("support radius must be > 0, got {support_radius}")));
        }
        let m = Self { dim, kind: MeasureKind::RadialDensity { rho, support_radius, scale: 1.0 }, cm_flag: cm };
        let mass = m.radial_cdf(support_radius)?;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!("radial density has total mass {mass}, expected 1")));
        }
        Ok(m)
    }

    pub fn from_descriptor(dim: usize, desc: &MeasureDescriptor) -> Result<Self> {
        match desc {
            MeasureDescriptor::Dirac => {
                check_dim(dim)?;
                Ok(Self::dirac(dim))
            }
            MeasureDescriptor::Gaussian { sigma } => Self::gaussian(dim, *sigma),
            MeasureDescriptor::UniformBall { r } => Self::uniform_ball(dim, *r),
        }
    }

    /// `None` for radial densities, which have no JSON form.
    pub fn to_descriptor(&self) -> Option<MeasureDescriptor> {
        match self.kind {
            MeasureKind::Dirac => Some(MeasureDescriptor::Dirac),
            MeasureKind::Gaussian { sigma } => Some(MeasureDescriptor::Gaussian { sigma }),
            MeasureKind::UniformBall { r } => Some(MeasureDescriptor::UniformBall { r }),
            MeasureKind::RadialDensity { .. } => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// `true` when the density profile is declared completely monotone.
    pub fn cm_flag(&self) -> bool {
        self.cm_flag
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self.kind, MeasureKind::Dirac)
    }

    /// Same measure viewed in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if let MeasureKind::RadialDensity { .. } = self.kind {
            if dim != self.dim {
                return Err(Error::InvalidParameter("radial densities are tied to their dimension".into()));
            }
        }
        Ok(Self { dim, kind: self.kind.clone(), cm_flag: self.cm_flag })
    }

    /// Pushforward under `x -> eps x`; concentrates on the origin as `eps -> 0`.
    pub fn rescale(&self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(format!("rescaling factor must be > 0, got {eps}")));
        }
        let kind = match &self.kind {
            MeasureKind::Dirac => MeasureKind::Dirac,
            MeasureKind::Gaussian { sigma } => MeasureKind::Gaussian { sigma: sigma * eps },
            MeasureKind::UniformBall { r } => MeasureKind::UniformBall { r: r * eps },
            MeasureKind::RadialDensity { rho, support_radius, scale } => {
                MeasureKind::RadialDensity { rho: rho.clone(), support_radius: *support_radius, scale: scale * eps }
            }
        };
        Ok(Self { dim: self.dim, kind, cm_flag: self.cm_flag })
    }

    /// Rescaling that accepts `eps = 0` as the Dirac limit.
    pub fn rescale_or_dirac(&self, eps: f64) -> Result<Self> {
        if eps == 0.0 {
            Ok(Self::dirac(self.dim))
        } else {
            self.rescale(eps)
        }
    }

    /// Radius beyond which the measure has no mass (infinite for Gaussians).
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            MeasureKind::Dirac => 0.0,
            MeasureKind::Gaussian { .. } => f64::INFINITY,
            MeasureKind::UniformBall { r } => *r,
            MeasureKind::RadialDensity { support_radius, scale, .. } => support_radius * scale,
        }
    }

    /// `F(xi) = int exp(2 pi i xi . x) dm(x)`.
    pub fn fourier(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim {
            return Err(Error::InvalidParameter(format!("xi has length {}, expected {}", xi.len(), self.dim)));
        }
        self.fourier_radial(xi.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Fourier transform as a function of `k = |xi|`.
    pub fn fourier_radial(&self, k: f64) -> Result<f64> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::Domain(format!("frequency must be finite and >= 0, got {k}")));
        }
        let d = self.dim as f64;
        match &self.kind {
            MeasureKind::Dirac => Ok(1.0),
            MeasureKind::Gaussian { sigma } => Ok((-2.0 * PI * PI * sigma * sigma * k * k).exp()),
            MeasureKind::UniformBall { r } => {
                if k == 0.0 {
                    return Ok(1.0);
                }
                let x = 2.0 * PI * r * k;
                let h = d / 2.0;
                Ok(gamma_pos(h + 1.0) * 2f64.powf(h) * bessel_j_over_power(h, x))
            }
            MeasureKind::RadialDensity { rho, support_radius, scale } => {
                if k == 0.0 {
                    return Ok(1.0);
                }
                let kk = k * scale;
                let nu = d / 2.0 - 1.0;
                let omega = unit_sphere_area(self.dim);
                let pref = gamma_pos(d / 2.0) * 2f64.powf(nu) * omega;
                let dim = self.dim as i32;
                let integrand = |s: f64| rho(s) * s.powi(dim - 1) * bessel_j_over_power(nu, 2.0 * PI * kk * s);
                let panels = (4.0 * kk * support_radius).ceil() as usize + 4;
                Ok(pref * integrate_panels(integrand, 0.0, *support_radius, panels, 1e-14, 1e-11)?)
            }
        }
    }

    /// Radial kernel `g_m(|q|) = int J_{d/2-1}(4 pi s |q|) s^{1-d/2} dpsi_m(s)`,
    /// `psi_m` being the law of `|x|` under `m`.
    ///
    /// Raw, without any normalisation; the theta module assembles it into a dual-sum summand.
    pub fn g_kernel(&self, q_norm: f64) -> Result<f64> {
        if !(q_norm.is_finite() && q_norm >= 0.0) {
            return Err(Error::Domain(format!("|q| must be finite and >= 0, got {q_norm}")));
        }
        let d = self.dim as f64;
        let nu = d / 2.0 - 1.0;
        let b = 4.0 * PI * q_norm;
        match &self.kind {
            MeasureKind::Dirac => Ok((0.5 * b).powf(nu) / gamma_pos(nu + 1.0)),
            MeasureKind::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                let omega = unit_sphere_area(self.dim);
                Ok(omega * (2.0 * PI * s2).powf(-d / 2.0) * s2.powf(nu + 1.0) * b.powf(nu) * (-b * b * s2 / 2.0).exp())
            }
            MeasureKind::UniformBall { r } => {
                if b == 0.0 {
                    return self.g_kernel_numeric(0.0);
                }
                Ok(d * r.powf(-d / 2.0) * bessel_j_unchecked(d / 2.0, b * r) / b)
            }
            MeasureKind::RadialDensity { .. } => self.g_kernel_numeric(q_norm),
        }
    }

    /// `g_kernel` by direct quadrature against the radial law; Gaussians are
    /// truncated at twelve standard deviations.
    pub fn g_kernel_numeric(&self, q_norm: f64) -> Result<f64> {
        let d = self.dim as f64;
        let nu = d / 2.0 - 1.0;
        let b = 4.0 * PI * q_norm;
        let (upper, density): (f64, Box<dyn Fn(f64) -> f64>) = match &self.kind {
            MeasureKind::Dirac => return self.g_kernel(q_norm),
            MeasureKind::Gaussian { sigma } => {
                let s = *sigma;
                (12.0 * s, Box::new(move |x: f64| (2.0 * PI * s * s).powf(-d / 2.0) * (-x * x / (2.0 * s * s)).exp()))
            }
            MeasureKind::UniformBall { r } => {
                let v = crate::special_fn::unit_ball_volume(self.dim) * r.powf(d);
                (*r, Box::new(move |_| 1.0 / v))
            }
            MeasureKind::RadialDensity { rho, support_radius, scale } => {
                let (rho, sc) = (rho.clone(), *scale);
                (support_radius * sc, Box::new(move |x: f64| sc.powf(-d) * rho(x / sc)))
            }
        };
        let omega = unit_sphere_area(self.dim);
        // J_nu(b s) s^{-nu} s^{d-1} = b^nu (J_nu(b s)/(b s)^nu) s^{d-1}.
        let integrand =
            |s: f64| omega * density(s) * s.powf(d - 1.0) * b.powf(nu) * bessel_j_over_power(nu, b * s);
        let panels = (2.0 * q_norm * upper * 4.0).ceil() as usize + 8;
        integrate_panels(integrand, 0.0, upper, panels, 1e-15, 1e-12)
    }

    /// Probability that `|x| <= s`.
    pub fn radial_cdf(&self, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Ok(0.0);
        }
        let d = self.dim as f64;
        let omega = unit_sphere_area(self.dim);
        match &self.kind {
            MeasureKind::Dirac => Ok(1.0),
            MeasureKind::UniformBall { r } => Ok((s / r).min(1.0).powf(d)),
            MeasureKind::Gaussian { sigma } => {
                let c = omega * (2.0 * PI * sigma * sigma).powf(-d / 2.0);
                let sig = *sigma;
                let top = s.min(40.0 * sig);
                let v = integrate(|t: f64| c * t.powf(d - 1.0) * (-t * t / (2.0 * sig * sig)).exp(), 0.0, top, 1e-15, 1e-13)?;
                Ok(v.min(1.0))
            }
            MeasureKind::RadialDensity { rho, support_radius, scale } => {
                let top = (s / scale).min(*support_radius);
                let v = integrate(|t: f64| omega * rho(t) * t.powf(d - 1.0), 0.0, top, 1e-15, 1e-12)?;
                Ok(v)
            }
        }
    }

    /// `n` independent draws, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        let d = self.dim;
        match &self.kind {
            MeasureKind::Dirac => Ok(vec![vec![0.0; d]; n]),
            MeasureKind::Gaussian { sigma } => Ok((0..n)
                .map(|_| (0..d).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect())
                .collect()),
            MeasureKind::UniformBall { r } => Ok((0..n)
                .map(|_| {
                    let radius = r * rng.random::<f64>().powf(1.0 / d as f64);
                    scaled_direction(d, radius, rng)
                })
                .collect()),
            MeasureKind::RadialDensity { support_radius, scale, .. } => {
                let table = self.cdf_table(*support_radius * scale)?;
                Ok((0..n)
                    .map(|_| {
                        let radius = invert_table(&table, rng.random::<f64>());
                        scaled_direction(d, radius, rng)
                    })
                    .collect())
            }
        }
    }

    fn cdf_table(&self, upper: f64) -> Result<Vec<(f64, f64)>> {
        const N: usize = 2048;
        let MeasureKind::RadialDensity { rho, scale, .. } = &self.kind else {
            unreachable!("tables are only built for radial densities")
        };
        let omega = unit_sphere_area(self.dim);
        let d = self.dim as f64;
        let sc = *scale;
        let f = |t: f64| omega * sc.powf(-d) * rho(t / sc) * t.powf(d - 1.0);
        let mut table = Vec::with_capacity(N + 1);
        let mut acc = 0.0;
        table.push((0.0, 0.0));
        for i in 0..N {
            let a = upper * i as f64 / N as f64;
            let b = upper * (i + 1) as f64 / N as f64;
            acc += integrate(f, a, b, 1e-16, 1e-12)?;
            table.push((b, acc));
        }
        let total = acc;
        for e in table.iter_mut() {
            e.1 /= total;
        }
        Ok(table)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidParameter("dimension must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn scaled_direction<R: Rng>(d: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x * radius / n).collect();
        }
    }
}

fn invert_table(table: &[(f64, f64)], u: f64) -> f64 {
    let i = table.partition_point(|e| e.1 < u).clamp(1, table.len() - 1);
    let (s0, c0) = table[i - 1];
    let (s1, c1) = table[i];
    if c1 > c0 {
        s0 + (s1 - s0) * (u - c0) / (c1 - c0)
    } else {
        s0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks_statistic(m: &RadialMeasure, samples: &[Vec<f64>]) -> f64 {
        let mut radii: Vec<f64> = samples.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        radii.sort_by(f64::total_cmp);
        let n = radii.len() as f64;
        let mut worst: f64 = 0.0;
        for (i, r) in radii.iter().enumerate() {
            let c = m.radial_cdf(*r).unwrap();
            worst = worst.max((c - i as f64 / n).abs()).max((c - (i + 1) as f64 / n).abs());
        }
        worst
    }

    fn bump(dim: usize) -> RadialMeasure {
        // rho(s) = c (1 - s^2)^2 on the unit ball, normalised numerically.
        let omega = unit_sphere_area(dim);
        let raw = integrate(|s: f64| omega * (1.0 - s * s).powi(2) * s.powi(dim as i32 - 1), 0.0, 1.0, 1e-16, 1e-14)
            .unwrap();
        let c = 1.0 / raw;
        RadialMeasure::radial_density(dim, Arc::new(move |s: f64| c * (1.0 - s * s).powi(2)), 1.0, false).unwrap()
    }

    #[test]
    fn rescale_examples() {
        let g = RadialMeasure::gaussian(2, 1.0).unwrap().rescale(0.5).unwrap();
        assert!(matches!(g.kind(), MeasureKind::Gaussian { sigma } if *sigma == 0.5));
        let b = RadialMeasure::uniform_ball(2, 2.0).unwrap().rescale(0.25).unwrap();
        assert!(matches!(b.kind(), MeasureKind::UniformBall { r } if *r == 0.5));
        assert!(RadialMeasure::dirac(3).rescale(0.1).unwrap().is_dirac());
        assert!(RadialMeasure::dirac(3).rescale(0.0).is_err());
    }

    #[test]
    fn cm_flags() {
        assert!(RadialMeasure::gaussian(2, 1.0).unwrap().cm_flag());
        assert!(!RadialMeasure::uniform_ball(2, 1.0).unwrap().cm_flag());
        assert!(!RadialMeasure::dirac(2).cm_flag());
    }

    #[test]
    fn fourier_at_zero_is_one() {
        for m in [
            RadialMeasure::dirac(3),
            RadialMeasure::gaussian(3, 0.7).unwrap(),
            RadialMeasure::uniform_ball(3, 0.7).unwrap(),
            bump(3),
        ] {
            assert_eq!(m.fourier(&[0.0, 0.0, 0.0]).unwrap(), 1.0);
        }
    }

    #[test]
    fn ball_transform_against_polar_quadrature() {
        // Direct 2D quadrature of int exp(2 pi i xi.x) over the unit disc / pi.
        let k = 0.3;
        let oracle = integrate(
            |r: f64| {
                r * integrate(|t: f64| (2.0 * PI * k * r * t.cos()).cos(), 0.0, 2.0 * PI, 1e-15, 1e-14).unwrap()
            },
            0.0,
            1.0,
            1e-15,
            1e-14,
        )
        .unwrap()
            / PI;
        let m = RadialMeasure::uniform_ball(2, 1.0).unwrap();
        assert!((m.fourier(&[k, 0.0]).unwrap() - oracle).abs() < 1e-8);
        let d1 = RadialMeasure::uniform_ball(1, 1.0).unwrap();
        let x = 2.0 * PI * 0.45;
        assert!((d1.fourier(&[0.45]).unwrap() - x.sin() / x).abs() < 1e-13);
    }

    #[test]
    fn density_transform_matches_closed_forms() {
        // A ball written as a radial density must reproduce the ball transform.
        for dim in 1..=3 {
            let v = crate::special_fn::unit_ball_volume(dim);
            let as_density = RadialMeasure::radial_density(dim, Arc::new(move |_| 1.0 / v), 1.0, false).unwrap();
            let ball = RadialMeasure::uniform_ball(dim, 1.0).unwrap();
            for &k in &[0.1, 0.9, 2.7, 7.3] {
                let a = as_density.fourier_radial(k).unwrap();
                let b = ball.fourier_radial(k).unwrap();
                assert!((a - b).abs() < 1e-9, "d={dim} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaling_law() {
        for m in [RadialMeasure::gaussian(2, 0.4).unwrap(), RadialMeasure::uniform_ball(3, 0.8).unwrap(), bump(2)] {
            for &(eps, k) in &[(0.3, 1.7), (2.0, 0.45), (0.05, 11.0)] {
                let a = m.rescale(eps).unwrap().fourier_radial(k).unwrap();
                let b = m.fourier_radial(eps * k).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gaussian_monotone_ball_changes_sign() {
        let g = RadialMeasure::gaussian(2, 0.5).unwrap();
        let mut last = 1.0;
        for i in 1..200 {
            let v = g.fourier_radial(i as f64 * 0.02).unwrap();
            assert!(v > 0.0 && v < last);
            last = v;
        }
        // First zero of J_1 is 3.8317..., so the d=2 ball transform changes sign near k = 3.8317/(2 pi).
        let b = RadialMeasure::uniform_ball(2, 1.0).unwrap();
        let k0 = 3.831_705_970_207_512 / (2.0 * PI);
        assert!(b.fourier_radial(k0 - 0.01).unwrap() > 0.0);
        assert!(b.fourier_radial(k0 + 0.01).unwrap() < 0.0);
    }

    #[test]
    fn g_kernel_closed_forms_match_quadrature() {
        for dim in 1..=3 {
            for m in [RadialMeasure::gaussian(dim, 0.3).unwrap(), RadialMeasure::uniform_ball(dim, 0.6).unwrap()] {
                for &q in &[0.05, 0.4, 1.3] {
                    let a = m.g_kernel(q).unwrap();
                    let b = m.g_kernel_numeric(q).unwrap();
                    assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-3), "d={dim} {m:?} q={q}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn sampling_examples() {
        let zeros = RadialMeasure::dirac(2).sample(5, 1).unwrap();
        assert!(zeros.iter().all(|x| x == &vec![0.0, 0.0]));

        let n = 100_000;
        let g = RadialMeasure::gaussian(2, 1.0).unwrap();
        let s = g.sample(n, 7).unwrap();
        let norms: Vec<f64> = s.iter().map(|x| (x[0] * x[0] + x[1] * x[1]).sqrt()).collect();
        let mean = norms.iter().sum::<f64>() / n as f64;
        let var = norms.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - (PI / 2.0).sqrt()).abs() < 3.0 * (var / n as f64).sqrt());

        let b = RadialMeasure::uniform_ball(2, 1.0).unwrap();
        let s = b.sample(n, 7).unwrap();
        let inside = s.iter().filter(|x| x[0] * x[0] + x[1] * x[1] <= 0.25).count() as f64 / n as f64;
        assert!((inside - 0.25).abs() < 3.0 * (0.25f64 * 0.75 / n as f64).sqrt());
        assert_eq!(b.sample(10, 99).unwrap(), b.sample(10, 99).unwrap());
    }

    #[test]
    fn kolmogorov_smirnov() {
        let n = 20_000;
        let bound = 1.63 / (n as f64).sqrt();
        for m in [RadialMeasure::gaussian(3, 0.4).unwrap(), RadialMeasure::uniform_ball(2, 1.5).unwrap(), bump(2)] {
            let s = m.sample(n, 11).unwrap();
            let ks = ks_statistic(&m, &s);
            assert!(ks <= bound, "{m:?}: {ks} > {bound}");
        }
    }

    #[test]
    fn density_mass_is_checked() {
        assert!(RadialMeasure::radial_density(2, Arc::new(|_| 1.0), 1.0, false).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let text = r#"{"kind":"gaussian","sigma":0.1}"#;
        let d: MeasureDescriptor = serde_json::from_str(text).unwrap();
        let m = RadialMeasure::from_descriptor(2, &d).unwrap();
        assert_eq!(serde_json::to_string(&m.to_descriptor().unwrap()).unwrap(), text);
        assert!(serde_json::from_str::<MeasureDescriptor>(r#"{"kind":"ball"}"#).is_err());
    }
}
