//! Gamma function and Bessel functions of the first kind of real order.
//!
//! `bessel_j` picks one of four evaluation routes:
//!
//! * ascending power series for `x <= SERIES_MAX`,
//! * elementary closed forms with upward recurrence for half-integer orders,
//! * Miller's backward recurrence (normalised by the Neumann-type sum
//!   `sum_k (nu0 + 2k) Gamma(nu0 + k) / k! J_{nu0+2k}(x) = (x/2)^nu0`) up to `x = 50`,
//! * the Hankel asymptotic expansion beyond that.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

const SERIES_MAX: f64 = 6.0;
const ASYMPTOTIC_MIN: f64 = 50.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Order `nu` of a Bessel function `J_nu`, restricted to `nu >= -1/2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < -0.5 {
            return Err(Error::Domain(format!("Bessel order must be finite and >= -1/2, got {nu}")));
        }
        Ok(Self(nu))
    }

    /// `J_{d/2 - 1}`, the kernel of the radial Fourier transform in dimension `d`.
    pub fn radial_kernel(dim: usize) -> Result<Self> {
        Self::new(dim as f64 / 2.0 - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn half_integer(self) -> Option<i32> {
        let twice = 2.0 * self.0;
        if twice.fract() == 0.0 && (twice as i64) % 2 != 0 {
            Some((self.0 - 0.5).round() as i32)
        } else {
            None
        }
    }
}

/// Gamma function for `x > 0` (Lanczos, g = 7).
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_pos(x))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return gamma_pos(x + 1.0) / x;
    }
    if x == x.floor() && x <= 23.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let y = x - 1.0;
    let mut a = LANCZOS[0];
    let t = y + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (y + i as f64);
    }
    // t^(y+1/2) split in two halves to postpone overflow.
    let half = t.powf(0.5 * (y + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * a
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 100.0 {
        return gamma_pos(x).ln();
    }
    let y = x - 1.0;
    let mut a = LANCZOS[0];
    let t = y + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (y + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (y + 0.5) * t.ln() - t + a.ln()
}

/// Bessel function of the first kind `J_nu(x)` for `x >= 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("bessel_j requires finite x >= 0, got {x}")));
    }
    Ok(bessel_j_unchecked(order.0, x))
}

/// `J_nu(x)` without argument validation; `nu >= -1/2`, `x >= 0`.
pub(crate) fn bessel_j_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_MAX {
        return series(nu, x);
    }
    if let Some(n) = BesselOrder(nu).half_integer() {
        if nu <= x {
            return half_integer(n, x);
        }
    }
    if x > ASYMPTOTIC_MIN && x > nu * nu {
        return hankel_asymptotic(nu, x);
    }
    miller(nu, x)
}

/// `J_nu(x) / x^nu`, finite at `x = 0` where it equals `1 / (2^nu Gamma(nu + 1))`.
pub(crate) fn bessel_j_over_power(nu: f64, x: f64) -> f64 {
    if x <= 1e-3 {
        let h = 0.25 * x * x;
        let g = gamma_pos(nu + 1.0);
        let base = 1.0 / (2f64.powf(nu) * g);
        return base * (1.0 - h / (nu + 1.0) + h * h / (2.0 * (nu + 1.0) * (nu + 2.0)));
    }
    bessel_j_unchecked(nu, x) / x.powf(nu)
}

fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powf(nu) / gamma_pos(nu + 1.0);
    let q = -half * half;
    let mut sum = term;
    for k in 1..300 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn half_integer(n: i32, x: f64) -> f64 {
    let pref = (2.0 / (PI * x)).sqrt();
    let mut prev = pref * x.cos(); // J_{-1/2}
    if n == -1 {
        return prev;
    }
    let mut cur = pref * x.sin(); // J_{1/2}
    let mut mu = 0.5;
    for _ in 0..n {
        let next = (2.0 * mu / x) * cur - prev;
        prev = cur;
        cur = next;
        mu += 1.0;
    }
    cur
}

fn miller(nu: f64, x: f64) -> f64 {
    let n = nu.floor();
    let nu0 = nu - n;
    let target = n as usize;
    let mut top = (1.5 * x + 40.0 + nu).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    // Backward recurrence J_{m-1} = (2 m / x) J_m - J_{m+1} on orders nu0 + k.
    let mut next = 0.0f64;
    let mut cur = 1e-30f64;
    let mut value_at_target = if top == target { cur } else { 0.0 };
    let mut norm = 0.0;
    let coeff = |k: usize, gk: f64| if k == 0 { gamma_pos(nu0 + 1.0) } else { (nu0 + 2.0 * k as f64) * gk };
    // g_k = Gamma(nu0 + k) / k!, computed downward from the top.
    let gk_top = if top == 0 {
        1.0
    } else {
        (ln_gamma_pos(nu0 + (top / 2) as f64) - ln_gamma_pos((top / 2) as f64 + 1.0)).exp()
    };
    let mut gk = gk_top;
    if top.is_multiple_of(2) {
        norm += coeff(top / 2, gk) * cur;
    }
    let mut k = top;
    while k > 0 {
        let m = nu0 + k as f64;
        let prev = (2.0 * m / x) * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if k == target {
            value_at_target = cur;
        }
        if k.is_multiple_of(2) {
            let kk = k / 2;
            if kk > 0 {
                // g_{kk} = g_{kk+1} * (kk + 1) / (nu0 + kk)
                gk = gk * (kk as f64 + 1.0) / (nu0 + kk as f64);
            }
            norm += coeff(kk, gk) * cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            value_at_target *= s;
        }
    }
    value_at_target * (0.5 * x).powf(nu0) / norm
}

fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    // cos(x - phi) and sin(x - phi) with phi = (nu/2 + 1/4) pi, without losing
    // the range reduction of x itself.
    let phi = (0.5 * nu) * PI + FRAC_PI_4;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Surface area of the unit sphere in `R^d`, `2 pi^{d/2} / Gamma(d/2)`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / gamma_pos(h)
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    unit_sphere_area(dim) / dim as f64
}
