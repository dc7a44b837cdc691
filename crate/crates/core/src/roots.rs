//! Root bracketing and refinement helpers shared by the oracle and the
//! scan pipeline.

use crate::Error;

/// Bisection on [a, b]; requires a sign change. Runs until the bracket
/// width falls below `tol` (or 200 iterations, whichever first).
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64, Error> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "no sign change on [{a}, {b}] (f(a)={fa:.3e}, f(b)={fb:.3e})"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a < tol {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Indices i such that vals[i] and vals[i+1] straddle zero.
pub fn sign_changes(vals: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..vals.len().saturating_sub(1) {
        if vals[i] == 0.0 || vals[i].signum() != vals[i + 1].signum() {
            out.push(i);
        }
    }
    out
}

/// Zero of the secant through (a, fa) and (b, fb).
pub fn interp_zero(a: f64, b: f64, fa: f64, fb: f64) -> f64 {
    a - fa * (b - a) / (fb - fa)
}
