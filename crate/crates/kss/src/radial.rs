//! Radial squeezed states: a gamma-distributed radial density carrying a
//! linear momentum phase.
//!
//! A state is `psi(r) = N' r^alpha exp(-gamma0 r) exp(-i gamma1 r)`. The
//! radial density `|psi|^2 r^2` is a Gamma(2 alpha + 3, 2 gamma0) profile
//! peaking at `r = (alpha + 1)/gamma0`, and `gamma1` boosts the state to mean
//! radial momentum `-gamma1`. All first and second moments of `r`, `1/r`, and
//! the radial momentum `p_r = -i (d/dr + 1/r)` close in elementary form;
//! projections onto hydrogenic eigenstates are done by quadrature.

use num_complex::Complex64;

use crate::specfun::{hydro_radial, integrate_adaptive_c, ln_gamma};
use crate::{Error, Result};

/// Largest principal quantum number accepted by [`rss_coeff`], matching the
/// validated range of the eigenstate evaluator.
const MAX_N: u32 = 120;

/// Overlap quadrature tolerances: relative target for resolved coefficients
/// plus an absolute floor so that overlaps which vanish (mismatched states,
/// far-off-resonant `n`) terminate instead of chasing pure relative error
/// on a zero.
const COEFF_REL_TOL: f64 = 1e-8;
const COEFF_ABS_TOL: f64 = 1e-13;

/// Radial squeezed state `psi(r) = N' r^alpha exp(-gamma0 r - i gamma1 r)`.
///
/// Immutable after construction; `log_norm` holds `ln N'` fixed by the
/// normalization `Int |psi|^2 r^2 dr = 1`, in log form because `N'` itself
/// under- or overflows for large `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct RssState {
    alpha: f64,
    gamma0: f64,
    gamma1: f64,
    log_norm: f64,
}

impl RssState {
    /// Builds the normalized state. `alpha > 0` sets the radial width,
    /// `gamma0 > 0` the inverse length scale, `gamma1` the momentum boost.
    pub fn new(alpha: f64, gamma0: f64, gamma1: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
        }
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::Domain(format!("gamma0 must be finite and > 0, got {gamma0}")));
        }
        if !gamma1.is_finite() {
            return Err(Error::Domain(format!("gamma1 must be finite, got {gamma1}")));
        }
        let shape = 2.0 * alpha + 3.0;
        let log_norm = 0.5 * (shape * (2.0 * gamma0).ln() - ln_gamma(shape)?);
        Ok(RssState { alpha, gamma0, gamma1, log_norm })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// `ln N'`.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }
}

/// Moments of a radial squeezed state.
///
/// `p_r` statistics follow the convention `p_r = -i (d/dr + 1/r)`, the
/// Hermitian radial momentum for the `r^2 dr` measure, under which
/// `p_r = -gamma1` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialExpectations {
    pub r_mean: f64,
    pub r_inv: f64,
    pub r_sq: f64,
    pub r_inv_sq: f64,
    pub p_r: f64,
    pub p_r_sq: f64,
    /// Uncertainty product `Delta r * Delta p_r`, always above the 1/2 bound.
    pub dr_dpr: f64,
}

/// Evaluates `psi(r)` in log-magnitude form; `r = 0` maps to exactly zero
/// since `alpha > 0`. The radial density `|psi|^2 r^2` peaks near
/// `r = (alpha + 1)/gamma0`.
pub fn rss_eval(state: &RssState, r: f64) -> Result<Complex64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("r must be finite and >= 0, got {r}")));
    }
    Ok(eval_raw(state, r))
}

fn eval_raw(state: &RssState, r: f64) -> Complex64 {
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let ln_mag = state.log_norm + state.alpha * r.ln() - state.gamma0 * r;
    Complex64::from_polar(ln_mag.exp(), -state.gamma1 * r)
}

/// Closed-form moments of the state.
///
/// Position moments are Gamma-distribution moments of `|psi|^2 r^2`; the
/// momentum moments follow from `(d/dr + 1/r) psi = ((alpha + 1)/r - gamma0
/// - i gamma1) psi`:
///
/// ```text
/// <r>     = (2 alpha + 3) / (2 gamma0)
/// <1/r>   = gamma0 / (alpha + 1)
/// <r^2>   = (alpha + 2)(2 alpha + 3) / (2 gamma0^2)
/// <1/r^2> = 2 gamma0^2 / ((alpha + 1)(2 alpha + 1))
/// <p_r>   = -gamma1
/// <p_r^2> = gamma0^2 / (2 alpha + 1) + gamma1^2
/// ```
///
/// The uncertainty product is `(1/2) sqrt((2 alpha + 3)/(2 alpha + 1))`,
/// strictly above the minimum-uncertainty bound 1/2 and approaching it only
/// as `alpha -> infinity`.
pub fn rss_expectations(state: &RssState) -> RadialExpectations {
    let a = state.alpha;
    let g0 = state.gamma0;
    let g1 = state.gamma1;
    RadialExpectations {
        r_mean: (2.0 * a + 3.0) / (2.0 * g0),
        r_inv: g0 / (a + 1.0),
        r_sq: (a + 2.0) * (2.0 * a + 3.0) / (2.0 * g0 * g0),
        r_inv_sq: 2.0 * g0 * g0 / ((a + 1.0) * (2.0 * a + 1.0)),
        p_r: -g1,
        p_r_sq: g0 * g0 / (2.0 * a + 1.0) + g1 * g1,
        dr_dpr: 0.5 * ((2.0 * a + 3.0) / (2.0 * a + 1.0)).sqrt(),
    }
}

/// Overlap `c_nl = Int R_nl(r) psi(r) r^2 dr` with the hydrogenic radial
/// eigenstate, `R_nl` real so no conjugation enters. Requires
/// `0 <= l < n <= 120`. Adaptive quadrature on `[0, 4 n^2]`, which covers
/// the eigenstate support; failure to converge reports an accuracy error.
pub fn rss_coeff(state: &RssState, n: u32, l: u32) -> Result<Complex64> {
    if n == 0 || n > MAX_N || l >= n {
        return Err(Error::Domain(format!("need 0 <= l < n <= {MAX_N}, got n = {n}, l = {l}")));
    }
    eigen_overlap(|r| eval_raw(state, r), n, l)
}

/// Projects an arbitrary radial profile onto `R_nl`. Factored out of
/// [`rss_coeff`] so tests can feed exact eigenstates through the identical
/// quadrature path.
fn eigen_overlap<F: Fn(f64) -> Complex64>(psi: F, n: u32, l: u32) -> Result<Complex64> {
    let r_hi = 4.0 * f64::from(n) * f64::from(n);
    integrate_adaptive_c(
        // Gauss-Legendre nodes are interior, so r > 0 here
        |r| hydro_radial(n, l, r).expect("n, l validated by caller") * psi(r) * (r * r),
        0.0,
        r_hi,
        COEFF_REL_TOL,
        COEFF_ABS_TOL,
    )
}

/// Hydrogenic level energy `-1/(2 n^2)` hartree, `n >= 1`.
pub fn energy_n(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be >= 1".into()));
    }
    let nf = f64::from(n);
    Ok(-0.5 / (nf * nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::integrate_adaptive;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Worked-example parameters, to full precision of the fit they solve.
    const ALPHA_EX: f64 = 62.8461194380640435;
    const GAMMA0_EX: f64 = 1.8339804060882581e-2;

    fn quad_norm(state: &RssState) -> f64 {
        let r_cap = 6.0 * rss_expectations(state).r_mean;
        integrate_adaptive(
            |r| {
                let v = rss_eval(state, r).unwrap().norm();
                v * v * r * r
            },
            0.0,
            r_cap,
            1e-12,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(matches!(RssState::new(0.0, 0.4, 0.0), Err(Error::Domain(_))));
        assert!(matches!(RssState::new(-1.0, 0.4, 0.0), Err(Error::Domain(_))));
        assert!(matches!(RssState::new(f64::NAN, 0.4, 0.0), Err(Error::Domain(_))));
        assert!(matches!(RssState::new(5.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(RssState::new(5.0, -0.4, 0.0), Err(Error::Domain(_))));
        assert!(matches!(RssState::new(5.0, 0.4, f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn quadrature_norm_is_unity() {
        for (a, g0, g1) in [(5.0, 0.4, 0.1), (30.0, 0.1, 0.05), (ALPHA_EX, GAMMA0_EX, 0.0)] {
            let state = RssState::new(a, g0, g1).unwrap();
            assert_abs_diff_eq!(quad_norm(&state), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn eval_matches_stated_form() {
        let state = RssState::new(5.0, 0.4, 0.1).unwrap();
        assert_eq!(rss_eval(&state, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(rss_eval(&state, -1.0), Err(Error::Domain(_))));
        assert!(matches!(rss_eval(&state, f64::NAN), Err(Error::Domain(_))));

        // phase winds as -gamma1 r
        let r = 7.3;
        let arg = rss_eval(&state, r).unwrap().arg();
        let expect = (-state.gamma1() * r).rem_euclid(2.0 * std::f64::consts::PI);
        assert_relative_eq!(arg.rem_euclid(2.0 * std::f64::consts::PI), expect, epsilon = 1e-12);

        // magnitude ratio between two radii isolates r^alpha e^(-gamma0 r)
        let (r1, r2) = (4.0, 11.0);
        let ratio = rss_eval(&state, r2).unwrap().norm() / rss_eval(&state, r1).unwrap().norm();
        let expect = (state.alpha() * (r2 / r1).ln() - state.gamma0() * (r2 - r1)).exp();
        assert_relative_eq!(ratio, expect, max_relative = 1e-13);
    }

    #[test]
    fn density_peaks_at_alpha_plus_one_over_gamma0() {
        let state = RssState::new(ALPHA_EX, GAMMA0_EX, 0.0).unwrap();
        let dens = |r: f64| {
            let v = rss_eval(&state, r).unwrap().norm();
            v * v * r * r
        };
        let r_pk = (state.alpha() + 1.0) / state.gamma0();
        assert!(dens(r_pk) > dens(r_pk * 0.999));
        assert!(dens(r_pk) > dens(r_pk * 1.001));
    }

    #[test]
    fn worked_example_moments() {
        let state = RssState::new(62.846, 0.01834, 0.0).unwrap();
        let m = rss_expectations(&state);
        assert_abs_diff_eq!(m.r_mean, 3508.6, epsilon = 0.2);
        assert_eq!(m.p_r, 0.0);
        assert_relative_eq!(
            m.dr_dpr,
            0.5 * (128.692f64 / 126.692).sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn uncertainty_product_exceeds_bound_and_tightens() {
        let mut prev = f64::INFINITY;
        for a in [1.0, 5.0, 20.0, 100.0, 1000.0] {
            let m = rss_expectations(&RssState::new(a, 0.3, 0.0).unwrap());
            assert!(m.dr_dpr > 0.5);
            assert!(m.dr_dpr < prev);
            prev = m.dr_dpr;
        }
        assert_abs_diff_eq!(prev, 0.5, epsilon = 3e-4);
    }

    /// All seven closed-form moments against direct quadrature. The momentum
    /// moments use a five-point numerical derivative of `psi` so the check
    /// does not reuse the analytic differentiation being verified.
    #[test]
    fn moments_match_quadrature() {
        let state = RssState::new(5.0, 0.4, 0.1).unwrap();
        let m = rss_expectations(&state);
        let r_cap = 6.0 * m.r_mean;
        let quad = |g: &dyn Fn(f64) -> f64| {
            integrate_adaptive(g, 0.0, r_cap, 1e-11, 0.0).unwrap()
        };
        let dens = |r: f64| {
            let v = rss_eval(&state, r).unwrap().norm();
            v * v * r * r
        };
        assert_relative_eq!(m.r_mean, quad(&|r| dens(r) * r), max_relative = 1e-8);
        assert_relative_eq!(m.r_inv, quad(&|r| dens(r) / r), max_relative = 1e-8);
        assert_relative_eq!(m.r_sq, quad(&|r| dens(r) * r * r), max_relative = 1e-8);
        assert_relative_eq!(m.r_inv_sq, quad(&|r| dens(r) / (r * r)), max_relative = 1e-8);

        let h = 1e-3 / state.gamma0();
        let dpsi = |r: f64| {
            // stencil may step past the origin; psi extends smoothly by zero
            let p = |x: f64| {
                if x > 0.0 { rss_eval(&state, x).unwrap() } else { Complex64::new(0.0, 0.0) }
            };
            (-p(r + 2.0 * h) + 8.0 * p(r + h) - 8.0 * p(r - h) + p(r - 2.0 * h)) / (12.0 * h)
        };
        // p_r psi = -i (psi' + psi / r)
        let p_psi = |r: f64| {
            Complex64::new(0.0, -1.0) * (dpsi(r) + rss_eval(&state, r).unwrap() / r)
        };
        let p_mean = quad(&|r| {
            (rss_eval(&state, r).unwrap().conj() * p_psi(r)).re * r * r
        });
        let p_sq = quad(&|r| p_psi(r).norm_sqr() * r * r);
        assert_relative_eq!(m.p_r, p_mean, max_relative = 1e-8);
        assert_relative_eq!(m.p_r_sq, p_sq, max_relative = 1e-8);
        assert_relative_eq!(
            m.dr_dpr,
            ((m.r_sq - m.r_mean * m.r_mean) * (m.p_r_sq - m.p_r * m.p_r)).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn coeff_rejects_out_of_range() {
        let state = RssState::new(5.0, 0.4, 0.0).unwrap();
        assert!(matches!(rss_coeff(&state, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(rss_coeff(&state, 10, 10), Err(Error::Domain(_))));
        assert!(matches!(rss_coeff(&state, 121, 5), Err(Error::Domain(_))));
    }

    /// Feeding an exact eigenstate through the projection must return the
    /// Kronecker delta.
    #[test]
    fn eigenstate_injection_recovers_orthonormality() {
        let inject = |r: f64| Complex64::new(hydro_radial(45, 30, r).unwrap(), 0.0);
        for n in 35..=55u32 {
            let c = eigen_overlap(inject, n, 30).unwrap();
            let expect = if n == 45 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(c.re, expect, epsilon = 1e-8);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coefficient_scan_peaks_at_mean_n() {
        let state = RssState::new(ALPHA_EX, GAMMA0_EX, 0.0).unwrap();
        let mut best = (0u32, 0.0f64);
        let mut total = 0.0;
        for n in 35..=55u32 {
            let w = rss_coeff(&state, n, 30).unwrap().norm_sqr();
            total += w;
            if w > best.1 {
                best = (n, w);
            }
        }
        assert!(best.0 >= 44 && best.0 <= 46, "peak at n = {}", best.0);
        assert!(total <= 1.0 + 1e-9, "Bessel bound violated: {total}");
        assert!(total > 0.999, "window should capture the state: {total}");
    }

    /// Frozen overlaps at the worked-example state, independently computed
    /// with a separate quadrature stack.
    #[test]
    fn frozen_overlap_references() {
        let state = RssState::new(ALPHA_EX, GAMMA0_EX, 0.0).unwrap();
        for (n, l, want) in [
            (45u32, 30u32, 4.8559723284960976e-1),
            (40, 25, 1.2754921556772619e-1),
            (50, 35, 1.3163004115971655e-1),
            (45, 25, -4.4727433855817422e-1),
            (43, 31, -3.0279338541778039e-1),
            (36, 30, -4.4490956798154066e-4),
            (55, 30, 3.7062392241118958e-6),
        ] {
            let c = rss_coeff(&state, n, l).unwrap();
            assert_relative_eq!(c.re, want, max_relative = 1e-7, epsilon = 1e-10);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-12);
        }

        let small = RssState::new(5.0, 0.4, 0.1).unwrap();
        let c = rss_coeff(&small, 8, 3).unwrap();
        assert_relative_eq!(c.re, 9.8175364902602952e-2, max_relative = 1e-7);
        assert_relative_eq!(c.im, -1.4091089114166552e-2, max_relative = 1e-7);
    }

    #[test]
    fn momentum_flip_conjugates_coefficients() {
        let fwd = RssState::new(ALPHA_EX, GAMMA0_EX, 2e-3).unwrap();
        let bwd = RssState::new(ALPHA_EX, GAMMA0_EX, -2e-3).unwrap();
        let c_f = rss_coeff(&fwd, 45, 30).unwrap();
        let c_b = rss_coeff(&bwd, 45, 30).unwrap();
        assert_relative_eq!(c_f.re, 3.8214332689669472e-1, max_relative = 1e-7);
        assert_relative_eq!(c_f.im, -2.8471262128317293e-1, max_relative = 1e-7);
        assert_relative_eq!(c_b.re, c_f.re, max_relative = 1e-10);
        assert_relative_eq!(c_b.im, -c_f.im, max_relative = 1e-10);
    }

    #[test]
    fn energy_levels() {
        assert_eq!(energy_n(1).unwrap(), -0.5);
        assert_eq!(energy_n(2).unwrap(), -0.125);
        assert_abs_diff_eq!(energy_n(45).unwrap(), -2.469136e-4, epsilon = 1e-10);
        assert!(matches!(energy_n(0), Err(Error::Domain(_))));
    }
}
