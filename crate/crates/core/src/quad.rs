//! Quadrature primitives: adaptive Simpson for the oracle integrals and
//! fixed uniform trapezoid rules for periodic integrands.

use crate::Error;
use num_complex::Complex64;

/// Adaptive Simpson on [a, b] to absolute tolerance `abs_tol`.
/// Returns (value, error_estimate). Fails if the recursion cannot reach the
/// tolerance within `max_depth` halvings; the best estimate is carried in
/// the error message.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<(f64, f64), Error> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> (f64, f64, bool) {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return (left + right + delta / 15.0, delta.abs() / 15.0, true);
        }
        if depth == 0 {
            return (left + right, delta.abs(), false);
        }
        let (lv, le, lok) = recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1);
        let (rv, re, rok) = recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
        (lv + rv, le + re, lok && rok)
    }

    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput("non-finite quadrature bounds".into()));
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    let (value, est, converged) = recurse(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
    if converged {
        Ok((value, est))
    } else {
        Err(Error::Numerical(format!(
            "quadrature did not reach tolerance {abs_tol:.3e} (best estimate {value:.12e}, residual {est:.3e})"
        )))
    }
}

/// Uniform trapezoid rule with n panels (n+1 nodes) on [a, b].
pub fn trapezoid_uniform<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..n {
        acc += f(a + h * i as f64);
    }
    acc * h
}

/// Complex-valued uniform trapezoid rule with n panels on [a, b].
pub fn trapezoid_uniform_c<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..n {
        acc += f(a + h * i as f64);
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_closed_forms() {
        let (v, e) = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 40).unwrap();
        assert!((v - 2.0).abs() < 1e-11, "got {v}, est {e}");
        let (v, _) = adaptive_simpson(&|x: f64| x * x, 0.0, 3.0, 1e-12, 40).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let (v, _) = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 30.0, 1e-13, 48).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_reports_nonconvergence() {
        // sqrt has a derivative singularity at 0; a tiny depth cap cannot
        // reach 1e-14.
        let r = adaptive_simpson(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-14, 3);
        assert!(matches!(r, Err(Error::Numerical(_))));
    }

    #[test]
    fn trapezoid_converges_quadratically() {
        let exact = 2.0;
        let c = |n| (trapezoid_uniform(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, n) - exact).abs();
        let (e1, e2) = (c(200), c(400));
        assert!(e2 < e1 / 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn complex_trapezoid_matches_real_parts() {
        let f = |x: f64| Complex64::new(x.cos(), x.sin());
        let v = trapezoid_uniform_c(&f, 0.0, 1.0, 5000);
        assert!((v.re - 1.0f64.sin()).abs() < 1e-8);
        assert!((v.im - (1.0 - 1.0f64.cos())).abs() < 1e-8);
    }
}
