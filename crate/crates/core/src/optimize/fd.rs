//! Central finite differences.

use nalgebra::DMatrix;

use crate::error::Result;

pub fn default_gradient_step(p: &[f64]) -> f64 {
    1e-5 * norm(p).max(1.0)
}

pub fn default_hessian_step(p: &[f64]) -> f64 {
    1e-4 * norm(p).max(1.0)
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn shifted(p: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, dv) in moves {
        q[i] += dv;
    }
    q
}

/// Central-difference gradient, `O(h^2)`.
pub fn gradient<F>(f: F, p: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    (0..p.len())
        .map(|i| Ok((f(&shifted(p, &[(i, h)]))? - f(&shifted(p, &[(i, -h)]))?) / (2.0 * h)))
        .collect()
}

/// Central second differences, symmetrised.
pub fn hessian<F>(f: F, p: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let k = p.len();
    let f0 = f(p)?;
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        let fp = f(&shifted(p, &[(i, h)]))?;
        let fm = f(&shifted(p, &[(i, -h)]))?;
        m[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let fpp = f(&shifted(p, &[(i, h), (j, h)]))?;
            let fpm = f(&shifted(p, &[(i, h), (j, -h)]))?;
            let fmp = f(&shifted(p, &[(i, -h), (j, h)]))?;
            let fmm = f(&shifted(p, &[(i, -h), (j, -h)]))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut e: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}
