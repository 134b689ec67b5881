//! Gauss-Legendre quadrature: fixed rules plus a panel-doubling adaptive
//! driver for smooth integrands.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::{Error, Result};

/// Refinement ceiling for the adaptive driver: number of panel doublings
/// tried before giving up.
const MAX_REFINEMENTS: u32 = 8;

/// Nodes and weights of a quadrature rule on a fixed interval.
///
/// Invariants kept by construction: all weights positive, all nodes strictly
/// inside the interval, and exactness on polynomials up to degree 2n - 1 for
/// an n-point Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl QuadratureRule {
    /// n-point Gauss-Legendre rule mapped onto [lo, hi].
    pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("quadrature rule needs at least one node".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("bad quadrature interval [{lo}, {hi}]")));
        }
        let base = gl_base(n);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        Ok(QuadratureRule {
            nodes: base.x.iter().map(|&x| mid + half * x).collect(),
            weights: base.w.iter().map(|&w| half * w).collect(),
            lo,
            hi,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Sum of w_i f(x_i) over the rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> f64 {
    rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w * f(x)).sum()
}

/// Adaptive integral of a smooth real integrand on [lo, hi].
///
/// Starts from a single 128-point panel and doubles the panel count until two
/// successive levels agree to rel_tol relative or abs_tol absolute, whichever
/// is looser; errors with the best estimate if the refinement ceiling is hit
/// first. Pass abs_tol = 0 to demand pure relative agreement, which only
/// terminates when the integral itself is bounded away from zero.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    adaptive_impl(lo, hi, rel_tol, abs_tol, |panels| composite(&f, lo, hi, panels), |v| v.abs())
}

/// Complex-valued counterpart of [`integrate_adaptive`].
pub fn integrate_adaptive_c<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Complex64> {
    adaptive_impl(lo, hi, rel_tol, abs_tol, |panels| composite_c(&f, lo, hi, panels), |v| v.norm())
}

fn adaptive_impl<T, E, M>(lo: f64, hi: f64, rel_tol: f64, abs_tol: f64, eval: E, mag: M) -> Result<T>
where
    T: Copy + std::ops::Sub<Output = T>,
    E: Fn(usize) -> T,
    M: Fn(T) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("bad integration interval [{lo}, {hi}]")));
    }
    let mut panels = 1usize;
    let mut prev = eval(panels);
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        let next = eval(panels);
        let diff = mag(next - prev);
        if diff <= rel_tol * mag(next) + abs_tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Accuracy {
        best: mag(prev),
        residual: mag(prev - eval(panels / 2)),
        target: rel_tol,
    })
}

fn composite<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, panels: usize) -> f64 {
    let base = gl_base(128);
    let width = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * width;
        let mid = a + 0.5 * width;
        let half = 0.5 * width;
        for (&x, &w) in base.x.iter().zip(&base.w) {
            acc += half * w * f(mid + half * x);
        }
    }
    acc
}

fn composite_c<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64, panels: usize) -> Complex64 {
    let base = gl_base(128);
    let width = (hi - lo) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = lo + p as f64 * width;
        let mid = a + 0.5 * width;
        let half = 0.5 * width;
        for (&x, &w) in base.x.iter().zip(&base.w) {
            acc += half * w * f(mid + half * x);
        }
    }
    acc
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) struct GlBase {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

/// Shared cache of base rules; rules are immutable once built.
pub(crate) fn gl_base(n: usize) -> Arc<GlBase> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GlBase>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry(n).or_insert_with(|| Arc::new(build_gl(n))).clone()
}

/// Newton iteration on the Legendre polynomial P_n; initial guesses from the
/// Chebyshev asymptotic put every root within one iteration's reach.
fn build_gl(n: usize) -> GlBase {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        // polish once more for a clean weight
        let (p, d) = legendre_and_derivative(n, z);
        z -= p / d;
        let dp = legendre_and_derivative(n, z).1;
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        w[n / 2] = 2.0 / (d * d);
    }
    GlBase { x, w }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0f64;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}
