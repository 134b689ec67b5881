//! Spherical squeezed states: minimum-uncertainty wave packets on the unit
//! sphere concentrated around a great circle.
//!
//! A state is `chi(theta, phi) = N sin^beta(theta) exp(delta sin(theta)
//! cos(phi)) exp(i beta phi)` with integer `beta` (the sharp `L3` expectation)
//! and squeezing strength `delta >= 0`. Everything observable reduces to the
//! one-parameter integral family `A_j^beta(delta)`, evaluated here by
//! quadrature of its defining integral; see [`a_fn`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::specfun::{
    bessel_i, double_factorial_ln, integrate_adaptive, ln_gamma_pos, solve_root, sph_bessel_i_dd,
    sph_bessel_i_int_ln, sph_harm_theta, Dd, RootBracket,
};
use crate::{Error, Result};

/// Validated envelope for [`a_fn`]: the quadrature and the downstream moment
/// formulas are accuracy-tested only inside this box. The beta bound sits one
/// above [`MAX_STATE_BETA`] because the expectation formulas reach up to
/// `A^(beta+1)`.
const MAX_J: u32 = 6;
const MAX_BETA: u32 = 61;
const MAX_DELTA: f64 = 40.0;

/// Largest `beta` accepted for a state.
const MAX_STATE_BETA: u32 = 60;

/// Number of uniform azimuthal nodes for the periodic phi quadrature inside
/// [`sss_coeff`]. Trapezoid sums converge spectrally for periodic analytic
/// integrands; 512 nodes leave the truncation far below 1e-14 across the
/// whole validated envelope.
const PHI_NODES: usize = 512;

/// Spherical squeezed state with sharp `⟨L3⟩ = beta`.
///
/// Immutable after construction; `norm` is fixed by normalization,
/// `norm = 1/sqrt(A_0^beta(delta))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SssState {
    beta: u32,
    delta: f64,
    norm: f64,
}

impl SssState {
    /// Builds the normalized state. `beta` is the integer azimuthal
    /// expectation; `delta >= 0` sets the squeezing strength.
    pub fn new(beta: u32, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::Domain(format!("delta must be finite and >= 0, got {delta}")));
        }
        if beta > MAX_STATE_BETA {
            return Err(Error::Range(format!(
                "beta = {beta} outside the validated state envelope beta <= {MAX_STATE_BETA}"
            )));
        }
        let a0 = a_fn(0, beta, delta)?;
        Ok(SssState { beta, delta, norm: 1.0 / a0.sqrt() })
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Normalization constant `N`.
    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// Angular expectation values of a spherical squeezed state.
///
/// `a1`, `a2`, `a3` are the direction-cosine operators `sin(theta)cos(phi)`,
/// `sin(theta)sin(phi)`, `cos(theta)`; their squares always satisfy
/// `a1_sq + a2_sq + a3_sq = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularExpectations {
    pub a1: f64,
    pub a1_sq: f64,
    pub a2_sq: f64,
    pub a3_sq: f64,
    pub l3: f64,
    pub l3_sq: f64,
    pub l_sq: f64,
}

/// `A_j^beta(delta) = 2 pi Int_0^pi sin^(2 beta + j + 1)(theta)
/// I_j(2 delta sin(theta)) d theta`.
///
/// Evaluated by adaptive quadrature of the defining integral, whose integrand
/// is positive and smooth. `delta = 0` short-circuits to the analytic limit:
/// zero for `j > 0`, and `4 pi (2 beta)!! / (2 beta + 1)!!` for `j = 0`.
pub fn a_fn(j: u32, beta: u32, delta: f64) -> Result<f64> {
    check_envelope(j, beta, delta)?;
    if delta == 0.0 {
        if j > 0 {
            return Ok(0.0);
        }
        let ln = double_factorial_ln(2 * beta as i64)? - double_factorial_ln(2 * beta as i64 + 1)?;
        return Ok(4.0 * PI * ln.exp());
    }
    let power = (2 * beta + j + 1) as i32;
    let jj = j as i32;
    // downstream identities combine several A values at 1e-12 relative, so
    // each one is driven to near machine accuracy
    let integral = integrate_adaptive(
        |theta: f64| {
            let s = theta.sin();
            // sin^power underflows harmlessly near the poles
            s.powi(power) * bessel_i(jj, 2.0 * delta * s).expect("argument inside range")
        },
        0.0,
        PI,
        1e-14,
        0.0,
    )?;
    Ok(2.0 * PI * integral)
}

/// Closed-form alternating sum for `A_j^beta(delta)`:
/// `4 sqrt(pi) Sum_k (-1)^k delta^(-k) C(beta, k) Gamma(k + 1/2)
/// i_(j+k)(2 delta)`.
///
/// The terms alternate and cancel catastrophically as `beta` grows, so this
/// route is a cross-check for modest `beta` rather than a primary evaluator;
/// [`a_fn`] integrates the positive-definite form instead. Requires
/// `delta > 0` (the sum is written with inverse powers of `delta`).
pub fn a_fn_closed(j: u32, beta: u32, delta: f64) -> Result<f64> {
    check_envelope(j, beta, delta)?;
    if delta <= 0.0 {
        return Err(Error::Domain(format!(
            "closed-form sum needs delta > 0, got {delta}; use a_fn for the delta = 0 limit"
        )));
    }
    let ln_beta_fact = ln_gamma_pos(beta as f64 + 1.0);
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(beta as usize + 1);
    for k in 0..=beta {
        let kf = k as f64;
        let ln_binom = ln_beta_fact - ln_gamma_pos(kf + 1.0) - ln_gamma_pos((beta - k) as f64 + 1.0);
        let ln_i = sph_bessel_i_int_ln((j + k) as i64, 2.0 * delta);
        let ln = -kf * delta.ln() + ln_binom + ln_gamma_pos(kf + 0.5) + ln_i;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((ln, sign));
    }
    Ok(4.0 * PI.sqrt() * signed_ln_sum(&terms, 0.0))
}

/// Evaluates `chi(theta, phi) = N sin^beta(theta) exp(delta sin(theta)
/// cos(phi)) exp(i beta phi)`.
pub fn sss_eval(state: &SssState, theta: f64, phi: f64) -> Result<Complex64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, pi], got {theta}")));
    }
    let s = theta.sin();
    let radial = state.norm * s.powi(state.beta as i32) * (state.delta * s * phi.cos()).exp();
    Ok(Complex64::from_polar(radial, state.beta as f64 * phi))
}

/// All angular expectation values, expressed through `A_j^beta(delta)`:
///
/// `⟨a1⟩ = A_1/A_0`, `⟨a1²⟩ = (A_0^(beta+1) + A_2)/(2 A_0)`,
/// `⟨a2²⟩ = ⟨a1⟩/(2 delta)`, `⟨a3²⟩ = 1 - A_0^(beta+1)/A_0`, `⟨L3⟩ = beta`,
/// `⟨L3²⟩ = (delta/2)⟨a1⟩ + beta²`, and
/// `⟨L²⟩ = beta(beta+1) - delta²(1-⟨a1²⟩)
///        + (2 delta/A_0)[(beta+1) A_1^beta - beta A_1^(beta-1)]`.
///
/// The `delta = 0` limits are taken analytically; no 1/delta is ever formed
/// there.
pub fn sss_expectations(state: &SssState) -> Result<AngularExpectations> {
    let beta = state.beta;
    let bf = beta as f64;
    let delta = state.delta;

    let a0 = a_fn(0, beta, delta)?;
    let a0_up = a_fn(0, beta + 1, delta)?;
    let a1_sq = (a0_up + a_fn(2, beta, delta)?) / (2.0 * a0);
    let a3_sq = (a0 - a0_up) / a0;

    if delta == 0.0 {
        return Ok(AngularExpectations {
            a1: 0.0,
            a1_sq,
            a2_sq: a1_sq,
            a3_sq,
            l3: bf,
            l3_sq: bf * bf,
            l_sq: bf * (bf + 1.0),
        });
    }

    let a1 = a_fn(1, beta, delta)? / a0;
    let stretch = if beta == 0 {
        (bf + 1.0) * a_fn(1, beta, delta)?
    } else {
        (bf + 1.0) * a_fn(1, beta, delta)? - bf * a_fn(1, beta - 1, delta)?
    };
    let l_sq = bf * (bf + 1.0) - delta * delta * (1.0 - a1_sq) + 2.0 * delta / a0 * stretch;
    Ok(AngularExpectations {
        a1,
        a1_sq,
        a2_sq: a1 / (2.0 * delta),
        a3_sq,
        l3: bf,
        l3_sq: 0.5 * delta * a1 + bf * bf,
        l_sq,
    })
}

/// Solves `(delta/2) A_1^beta(delta)/A_0^beta(delta) = delta_l3^2` for the
/// squeezing strength that realizes a requested azimuthal spread `delta_l3`.
///
/// The left side grows monotonically from zero, so a sign change inside the
/// validated `delta` envelope brackets the unique root; a target too large to
/// bracket is reported as infeasible.
pub fn solve_delta(beta: u32, delta_l3: f64) -> Result<f64> {
    if beta == 0 {
        return Err(Error::Domain("beta must be >= 1 to carry an azimuthal spread".into()));
    }
    if !(delta_l3.is_finite() && delta_l3 > 0.0) {
        return Err(Error::Domain(format!("delta_l3 must be finite and > 0, got {delta_l3}")));
    }
    let target = delta_l3 * delta_l3;
    let f = |delta: f64| -> f64 {
        if delta == 0.0 {
            return -target;
        }
        0.5 * delta * a_fn(1, beta, delta).expect("inside envelope") / a_fn(0, beta, delta).expect("inside envelope")
            - target
    };
    let mut hi = 1.0f64;
    while hi < MAX_DELTA && f(hi) < 0.0 {
        hi = (2.0 * hi).min(MAX_DELTA);
    }
    if f(hi) < 0.0 {
        return Err(Error::Infeasible(format!(
            "spread {delta_l3} not reachable for beta = {beta} within delta <= {MAX_DELTA}"
        )));
    }
    solve_root(f, &RootBracket::new(0.0, hi, 1e-12 * (1.0 + hi))?)
}

/// Evaluation route for [`sss_coeff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMethod {
    /// Double-sum formula in terms of modified spherical Bessel functions;
    /// covers `m >= 0` only.
    ClosedForm,
    /// Tensor-product quadrature of the defining overlap integral; covers
    /// any `m`.
    Quadrature,
}

/// Expansion coefficient `c_lm = Int conj(Y_lm) chi dOmega` of the state over
/// spherical harmonics.
///
/// The azimuthal integral reduces to `2 pi I_(beta-m)(delta sin theta)`,
/// which is real, so the coefficient is real. `c_lm = 0` exactly whenever
/// `l - m` is odd. At `delta = 0` the state is the single circular harmonic:
/// `c_lm = (-1)^beta` for `l = m = beta` (the sign carries the phase
/// convention of `Y_ll`) and zero otherwise.
pub fn sss_coeff(state: &SssState, l: u32, m: i32, method: CoeffMethod) -> Result<f64> {
    if m.unsigned_abs() > l {
        return Err(Error::Domain(format!("|m| must not exceed l, got l = {l}, m = {m}")));
    }
    if (l as i64 - m as i64).rem_euclid(2) == 1 {
        return Ok(0.0);
    }
    let beta = state.beta;
    if state.delta == 0.0 {
        if l == beta && m == beta as i32 {
            return Ok(if beta % 2 == 0 { 1.0 } else { -1.0 });
        }
        return Ok(0.0);
    }
    match method {
        CoeffMethod::ClosedForm => {
            if m < 0 {
                return Err(Error::UnsupportedMethod(format!(
                    "closed form covers m >= 0 only, got m = {m}; use the quadrature route"
                )));
            }
            coeff_closed(state, l, m as u32)
        }
        CoeffMethod::Quadrature => coeff_quadrature(state, l, m),
    }
}

fn check_envelope(j: u32, beta: u32, delta: f64) -> Result<()> {
    if j > MAX_J || beta > MAX_BETA || !(0.0..=MAX_DELTA).contains(&delta) {
        return Err(Error::Range(format!(
            "(j, beta, delta) = ({j}, {beta}, {delta}) outside the validated envelope \
             j <= {MAX_J}, beta <= {MAX_BETA}, 0 <= delta <= {MAX_DELTA}"
        )));
    }
    Ok(())
}

/// Signed sum of terms given as (ln magnitude, sign), anchored at the largest
/// magnitude so no intermediate overflows. `ln_shift` is added to every term
/// before exponentiating the result.
fn signed_ln_sum(terms: &[(f64, f64)], ln_shift: f64) -> f64 {
    let max_ln = terms
        .iter()
        .filter(|(_, s)| *s != 0.0)
        .map(|(ln, _)| *ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_ln == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = terms.iter().map(|&(ln, sign)| sign * (ln - max_ln).exp()).sum();
    sum * (max_ln + ln_shift).exp()
}

/// Double-sum closed form for the coefficient, `m >= 0`, `l - m` even:
///
/// `c_lm = 4 sqrt(pi) N (-1)^m sqrt[(2l+1)/(4 pi) (l-m)!/(l+m)!]
///   Sum_k Sum_p (-1)^(k+p) / (2^k k!) (2l-2k-1)!!/(l-m-2k)! C(min(m,beta), p)
///   2^(s/2) Gamma((s+1)/2) delta^(-s/2) i_(|beta-m|+s/2)(delta)`
///
/// with `s = l - m + 2p - 2k`. Since `l - m` is even, `s` is even and
/// `2^(s/2) Gamma((s+1)/2) = sqrt(pi) (s-1)!!`, so every term is a product
/// of integers, powers of delta, and one spherical Bessel value. The absolute
/// value in the Bessel order comes from the reduction itself: the azimuthal
/// integral leaves I_(m-beta)(delta sin theta), whose integer order can be
/// reflected positive, and the remaining sine power then splits as
/// sin^(|m-beta|+1) sin^(2 min(m,beta)), which is also where the binomial
/// over min(m,beta) originates.
///
/// The alternating sum cancels by up to fourteen orders of magnitude at the
/// high-l edge of the validated window, far past f64, so terms and their sum
/// are carried in double-double precision. The positive prefactor needs no
/// such care.
fn coeff_closed(state: &SssState, l: u32, m: u32) -> Result<f64> {
    let beta = state.beta as i64;
    let delta = state.delta;
    let li = l as i64;
    let mi = m as i64;
    let h = (li - mi) / 2;
    let mb = mi.min(beta);
    let base = (beta - mi).abs();
    let t_max = h + mb; // t = s/2 = h + p - k

    // per-t pieces: (2t-1)!!, delta^-t, i_(beta-m+t)(delta); grouping the
    // double factorial with the Bessel value first keeps intermediates small
    let inv_delta = Dd::ONE.div(Dd::from_f64(delta));
    let mut weight = Vec::with_capacity(t_max as usize + 1);
    let mut dfact = Dd::ONE;
    let mut inv_pow = Dd::ONE;
    for t in 0..=t_max {
        if t > 0 {
            dfact = dfact.mul_f64((2 * t - 1) as f64);
            inv_pow = inv_pow.mul(inv_delta);
        }
        weight.push(dfact.mul(sph_bessel_i_dd(base + t, delta)).mul(inv_pow));
    }

    let mut binom = Vec::with_capacity(mb as usize + 1);
    let mut b = Dd::ONE;
    for p in 0..=mb {
        if p > 0 {
            b = b.mul_f64((mb - p + 1) as f64).div_f64(p as f64);
        }
        binom.push(b);
    }

    let mut sum = Dd::ZERO;
    for k in 0..=h {
        // (2l-2k-1)!! / ((l-m-2k)! 2^k k!)
        let mut kpart = Dd::ONE;
        let mut odd = 2 * (li - k) - 1;
        while odd >= 3 {
            kpart = kpart.mul_f64(odd as f64);
            odd -= 2;
        }
        for j in 1..=(li - mi - 2 * k) {
            kpart = kpart.div_f64(j as f64);
        }
        for j in 1..=k {
            kpart = kpart.div_f64((2 * j) as f64);
        }
        for p in 0..=mb {
            let t = h + p - k;
            let term = kpart.mul(binom[p as usize]).mul(weight[t as usize]);
            sum = if (k + p) % 2 == 0 { sum.add(term) } else { sum.sub(term) };
        }
    }

    // positive prefactor, incurring no cancellation: the sqrt pi from the
    // Gamma reduction joins 4 sqrt(pi) and the harmonic normalization
    let mut fact_ratio = 1.0f64; // (l-m)!/(l+m)!
    for i in (li - mi + 1)..=(li + mi) {
        fact_ratio /= i as f64;
    }
    let pre = state.norm * 4.0 * PI * ((2 * li + 1) as f64 / (4.0 * PI) * fact_ratio).sqrt();
    let sign_pre = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign_pre * pre * sum.to_f64())
}

/// Tensor-product quadrature of the defining overlap: a uniform periodic sum
/// over phi (the integrand's imaginary part cancels by reflection, so only
/// the cosine survives) nested inside adaptive quadrature over theta.
fn coeff_quadrature(state: &SssState, l: u32, m: i32) -> Result<f64> {
    let beta = state.beta;
    let delta = state.delta;
    let nu = beta as f64 - m as f64;
    let phase = if m < 0 && m.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let power = beta as i32 + 1;
    let integral = integrate_adaptive(
        |theta: f64| {
            let s = theta.sin();
            let mut inner = 0.0;
            for node in 0..PHI_NODES {
                let phi = 2.0 * PI * node as f64 / PHI_NODES as f64;
                inner += (nu * phi).cos() * (delta * s * phi.cos()).exp();
            }
            inner *= 2.0 * PI / PHI_NODES as f64;
            let th = sph_harm_theta(l, m.unsigned_abs(), theta).expect("m <= l checked");
            th * s.powi(power) * inner
        },
        0.0,
        PI,
        1e-11,
        1e-13,
    )?;
    Ok(phase * state.norm * integral)
}
