//! Hydrogenic bound-state radial wavefunctions and generalized Laguerre
//! polynomials.
//!
//! R_nl(r) = N_nl e^(-r/n) (2r/n)^l L_(n-l-1)^(2l+1)(2r/n) in atomic units
//! with N_nl^2 = (2/n)^3 (n-l-1)! / (2n (n+l)!). The same kernel accepts real
//! effective quantum numbers, which is what the quantum-defect module feeds
//! it; only the polynomial degree must stay a nonnegative integer.

use crate::{Error, Result};

/// Generalized Laguerre polynomial L_k^a(x) by the three-term recurrence in
/// the degree, stable for k up to a few hundred.
pub fn laguerre_gen(k: u32, a: f64, x: f64) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::Domain(format!("laguerre_gen requires a > -1, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("laguerre_gen requires x >= 0, got {x}")));
    }
    let (mant, exp2) = laguerre_scaled(k, a, x);
    Ok(mant * (exp2 as f64 * std::f64::consts::LN_2).exp())
}

/// L_k^a(x) as mantissa * 2^exp2. The recurrence intermediates are renormalized
/// by powers of two (lossless) so arbitrarily large polynomial values never
/// overflow; callers assemble logs from the pair.
pub(crate) fn laguerre_scaled(k: u32, a: f64, x: f64) -> (f64, i64) {
    if k == 0 {
        return (1.0, 0);
    }
    let mut prev = 1.0f64; // L_0
    let mut cur = 1.0 + a - x; // L_1
    let mut exp2 = 0i64;
    // rescaling by an exact power of two keeps the mantissas lossless
    const THRESHOLD: f64 = 8.452712498170644e270; // 2^900
    const SHIFT: i32 = 896;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs().max(prev.abs()) > THRESHOLD {
            let factor = 2.0f64.powi(-SHIFT);
            cur *= factor;
            prev *= factor;
            exp2 += SHIFT as i64;
        }
    }
    (cur, exp2)
}

/// Bound-state radial wavefunction R_nl(r), quantum numbers 0 <= l < n <= 120.
pub fn hydro_radial(n: u32, l: u32, r: f64) -> Result<f64> {
    let (ln_mag, sign) = hydro_radial_ln(n, l, r)?;
    Ok(sign * ln_mag.exp())
}

/// R_nl(r) as (ln |R|, sign); the form of choice at large n and r where the
/// magnitude spans hundreds of orders between normalization, power, and
/// exponential factors.
pub fn hydro_radial_ln(n: u32, l: u32, r: f64) -> Result<(f64, f64)> {
    if n == 0 || l >= n || n > 120 {
        return Err(Error::Domain(format!(
            "hydro_radial requires 0 <= l < n <= 120, got n = {n}, l = {l}"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("hydro_radial requires r >= 0, got {r}")));
    }
    Ok(radial_kernel_ln(n as f64, l as f64, n - l - 1, r))
}

/// Shared radial kernel over real effective quantum numbers:
/// R(r) = C e^(-r/ns) (2r/ns)^ls L_k^(2 ls + 1)(2r/ns) with
/// C^2 = (2/ns)^3 Gamma(k+1) / (2 ns Gamma(ns + ls + 1)).
/// Returns (ln |R|, sign). Requires ns > ls > -1 and k + 2 ls + 2 = ns + ls + 1,
/// which both the integer and quantum-defect paths satisfy by construction.
pub(crate) fn radial_kernel_ln(ns: f64, ls: f64, degree: u32, r: f64) -> (f64, f64) {
    debug_assert!(ns > 0.0 && ls > -1.0 && r >= 0.0);
    if r == 0.0 {
        if ls > 0.0 {
            return (f64::NEG_INFINITY, 1.0);
        }
        // only reachable for true l = 0 states: R_n0(0) = 2 n^(-3/2)
        let ln_c = ln_norm(ns, ls, degree);
        let lag0 = binom_ln(degree as f64 + 2.0 * ls + 1.0, degree as f64);
        return (ln_c + lag0, 1.0);
    }
    let x = 2.0 * r / ns;
    let (mant, exp2) = laguerre_scaled(degree, 2.0 * ls + 1.0, x);
    if mant == 0.0 {
        return (f64::NEG_INFINITY, 1.0);
    }
    let ln_mag = ln_norm(ns, ls, degree) + ls * x.ln() - r / ns
        + mant.abs().ln()
        + exp2 as f64 * std::f64::consts::LN_2;
    (ln_mag, mant.signum())
}

fn ln_norm(ns: f64, ls: f64, degree: u32) -> f64 {
    0.5 * (3.0 * (2.0 / ns).ln() + super::ln_gamma_pos(degree as f64 + 1.0)
        - (2.0 * ns).ln()
        - super::ln_gamma_pos(ns + ls + 1.0))
}

/// ln of the binomial coefficient C(top, k) for real top, used for L_k^a(0).
fn binom_ln(top: f64, k: f64) -> f64 {
    super::ln_gamma_pos(top + 1.0) - super::ln_gamma_pos(k + 1.0) - super::ln_gamma_pos(top - k + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn laguerre_closed_forms() {
        // L_0 = 1, L_1 = 1 + a - x, L_2 = (a+1)(a+2)/2 - (a+2)x + x^2/2
        for &(a, x) in &[(0.0, 0.3), (1.0, 0.5), (2.5, 4.0), (61.0, 150.0)] {
            assert_eq!(laguerre_gen(0, a, x).unwrap(), 1.0);
            assert_relative_eq!(laguerre_gen(1, a, x).unwrap(), 1.0 + a - x, max_relative = 1e-14);
            let want = (a + 1.0) * (a + 2.0) / 2.0 - (a + 2.0) * x + 0.5 * x * x;
            assert_relative_eq!(laguerre_gen(2, a, x).unwrap(), want, max_relative = 1e-13);
        }
        assert_relative_eq!(laguerre_gen(2, 1.0, 0.5).unwrap(), 1.625, max_relative = 1e-14);
    }

    #[test]
    fn laguerre_rejects_bad_domain() {
        assert!(laguerre_gen(3, -1.0, 1.0).is_err());
        assert!(laguerre_gen(3, 0.0, -0.1).is_err());
    }

    // recurrence vs the explicit sum
    // L_k^a(x) = sum_j (-1)^j C(k+a, k-j) x^j / j!
    // The sum alternates, so keep x small enough that it does not cancel
    // to fewer digits than the tolerance asks for.
    #[test]
    fn laguerre_matches_series() {
        for &(k, a, x) in &[(5u32, 0.5f64, 2.0f64), (12, 3.0, 7.5), (20, 61.0, 5.0)] {
            let mut want = 0.0f64;
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let ln = binom_ln(k as f64 + a, (k - j) as f64) + j as f64 * x.ln()
                    - super::super::ln_gamma_pos(j as f64 + 1.0);
                want += sign * ln.exp();
            }
            let got = laguerre_gen(k, a, x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn ground_states_match_textbook_forms() {
        // R_10 = 2 e^(-r), R_21 = r e^(-r/2) / (2 sqrt(6)), R_20 = (1 - r/2) e^(-r/2) / sqrt(2)
        for &r in &[0.0, 0.3, 1.0, 4.7, 20.0] {
            assert_relative_eq!(hydro_radial(1, 0, r).unwrap(), 2.0 * (-r).exp(), max_relative = 1e-13);
            if r > 0.0 {
                let want = r * (-r / 2.0).exp() / (2.0 * 6.0f64.sqrt());
                assert_relative_eq!(hydro_radial(2, 1, r).unwrap(), want, max_relative = 1e-13);
            }
            let want = (1.0 - 0.5 * r) * (-r / 2.0).exp() / 2.0f64.sqrt();
            let got = hydro_radial(2, 0, r).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn origin_limits() {
        assert_relative_eq!(hydro_radial(5, 0, 0.0).unwrap(), 2.0 * 5.0f64.powf(-1.5), max_relative = 1e-13);
        assert_eq!(hydro_radial(5, 2, 0.0).unwrap(), 0.0);
    }

    // node count of R_nl is exactly n - l - 1
    #[test]
    fn radial_node_count() {
        for &(n, l) in &[(4u32, 0u32), (10, 3), (45, 30), (55, 20)] {
            let r_max = 2.5 * (n * n) as f64;
            let steps = 4000;
            let mut nodes = 0;
            let mut prev = hydro_radial(n, l, r_max * 1e-4).unwrap();
            for i in 1..=steps {
                let r = r_max * i as f64 / steps as f64;
                let v = hydro_radial(n, l, r).unwrap();
                if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
                    nodes += 1;
                }
                prev = v;
            }
            assert_eq!(nodes, n - l - 1, "n = {n}, l = {l}");
        }
    }

    // normalization and orthogonality by quadrature, including the large-n
    // log-magnitude regime
    #[test]
    fn orthonormal_radial_states() {
        use super::super::integrate_adaptive;
        let cases = [(1u32, 0u32, 2u32), (5, 2, 7), (45, 30, 46), (55, 30, 57)];
        for &(n1, l, n2) in &cases {
            let r_hi = 4.0 * (n2 * n2) as f64;
            let norm = integrate_adaptive(
                |r| {
                    let v = hydro_radial(n1, l, r).unwrap();
                    v * v * r * r
                },
                0.0,
                r_hi,
                1e-10,
                0.0,
            )
            .unwrap();
            assert_relative_eq!(norm, 1.0, max_relative = 1e-8);
            // cross overlaps sit near zero, so converge on the absolute floor
            let cross = integrate_adaptive(
                |r| hydro_radial(n1, l, r).unwrap() * hydro_radial(n2, l, r).unwrap() * r * r,
                0.0,
                r_hi,
                1e-10,
                1e-10,
            )
            .unwrap();
            assert_abs_diff_eq!(cross, 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn log_form_consistent_at_desk_scale() {
        let (ln_mag, sign) = hydro_radial_ln(55, 30, 6000.0).unwrap();
        assert!(ln_mag.is_finite());
        let direct = hydro_radial(55, 30, 6000.0).unwrap();
        assert_relative_eq!(sign * ln_mag.exp(), direct, max_relative = 1e-14);
        // the classically forbidden tail is small but resolved
        assert!(direct.abs() < 1e-6 && direct.abs() > 0.0);
    }

    #[test]
    fn rejects_bad_quantum_numbers() {
        assert!(hydro_radial(0, 0, 1.0).is_err());
        assert!(hydro_radial(3, 3, 1.0).is_err());
        assert!(hydro_radial(121, 0, 1.0).is_err());
        assert!(hydro_radial(4, 1, -0.5).is_err());
    }
}
