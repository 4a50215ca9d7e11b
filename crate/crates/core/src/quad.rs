//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;
const MAX_PANELS: usize = 200_000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` to within `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    let (whole, _) = gk15(&f, a, b);
    let mut stack = vec![(a, b, 0u32)];
    let mut total = 0.0;
    let mut panels = 0usize;
    let scale = whole.abs();
    while let Some((lo, hi, depth)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::NoConvergence(format!(
                "quadrature on [{a}, {b}] exceeded {MAX_PANELS} panels"
            )));
        }
        let (val, err) = gk15(&f, lo, hi);
        if !val.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        // Local tolerance proportional to the panel width.
        let width_frac = (hi - lo) / (b - a);
        let tol = abs_tol.max(rel_tol * scale) * width_frac;
        // Panels whose error estimate is at roundoff level cannot improve by splitting.
        let roundoff = 50.0 * f64::EPSILON * (val.abs() + (hi - lo) * scale / (b - a));
        if err <= tol || err <= roundoff || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && err > tol * 1e3 {
                return Err(Error::NoConvergence(format!(
                    "quadrature on [{a}, {b}] did not resolve panel [{lo}, {hi}]"
                )));
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(total)
}

/// Integrates over `[a, b]` after splitting it into `panels` equal pieces first.
///
/// Used for oscillatory integrands where a single initial panel may alias.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let n = panels.max(1);
    let w = (b - a) / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let lo = a + w * i as f64;
        let hi = if i + 1 == n { b } else { lo + w };
        sum += integrate(&f, lo, hi, abs_tol / n as f64, rel_tol)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1e-14).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_panels() {
        let v = integrate_panels(|x: f64| (40.0 * x).cos(), 0.0, 3.0, 30, 1e-14, 1e-14).unwrap();
        assert!((v - (120.0f64).sin() / 40.0).abs() < 1e-13);
    }
}
