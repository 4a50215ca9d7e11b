//! Nelder–Mead simplex minimisation with adaptive coefficients.

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Initial simplex edge.
    pub step: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { step: 1e-2, x_tol: 1e-10, f_tol: 1e-15, max_iter: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimise `f` from `start`. Evaluations returning an error or a non-finite
/// value are treated as `+inf`, which keeps the simplex inside the domain.
pub fn nelder_mead<F>(f: F, start: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = start.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let eval = |x: &[f64]| -> f64 {
        match f(x) {
            Ok(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    };
    let f0 = f(start)?;
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.to_vec(), f0)];
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += opts.step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diam = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if diam < opts.x_tol || (spread.is_finite() && spread <= opts.f_tol && diam < opts.x_tol.sqrt()) {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf).collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = toward(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = toward(alpha * gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = toward(alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = toward(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *v = eval(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(NelderMeadResult { x, value, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |p: &[f64]| Ok((1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2));
        let r = nelder_mead(f, &[-1.2, 1.0], &NelderMeadOptions { step: 0.1, ..Default::default() }).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn respects_infeasible_region() {
        let f = |p: &[f64]| if p[0] <= 0.0 { Ok(f64::NAN) } else { Ok(p[0] - p[0].ln() + p[1] * p[1]) };
        let r = nelder_mead(f, &[3.0, 0.5], &NelderMeadOptions { step: 0.5, ..Default::default() }).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && r.x[1].abs() < 1e-6);
    }

    #[test]
    fn quadratic_in_five_dims() {
        let f = |p: &[f64]| Ok(p.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.1 * i as f64).powi(2)).sum());
        let r = nelder_mead(f, &[0.0; 5], &NelderMeadOptions::default()).unwrap();
        for (i, v) in r.x.iter().enumerate() {
            assert!((v - 0.1 * i as f64).abs() < 1e-6);
        }
    }
}
