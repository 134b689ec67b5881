//! Bracketing scalar root finder (Brent's method).

use crate::{Error, Result};

const MAX_ITER: u32 = 100;

/// An interval expected to bracket a sign change, plus an absolute tolerance
/// on the root abscissa.
#[derive(Debug, Clone, Copy)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("bad bracket [{lo}, {hi}]")));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("bracket tolerance must be positive, got {tol}")));
        }
        Ok(RootBracket { lo, hi, tol })
    }
}

/// Brent's method: inverse quadratic interpolation and secant steps guarded
/// by bisection, so every iterate stays inside the original bracket. Errors
/// if the interval carries no sign change or the iteration budget runs out.
pub fn solve_root<F: Fn(f64) -> f64>(f: F, bracket: &RootBracket) -> Result<f64> {
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * bracket.tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // attempt interpolation
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1 * xm.signum() };
        fb = f(b);
    }
    Err(Error::Accuracy { best: b, residual: fb.abs(), target: bracket.tol })
}
