//! Modified Bessel functions of the first kind: integer order, real-order
//! modified spherical variants, and exponentially scaled forms.
//!
//! Everything is built on one kernel, the ascending series
//! I_mu(x) = (x/2)^mu sum_k (x^2/4)^k / (k! Gamma(mu+k+1))
//! ("Handbook of Mathematical Functions", eq. 9.6.10). All series terms are
//! positive, so there is no cancellation; the sum is anchored at its largest
//! term and accumulated in ratio form, which keeps intermediates near unity
//! and yields ln I_mu directly.

use crate::{Error, Result};

/// Largest argument for which exp(ln I) is representable; callers above this
/// are pointed at the scaled form.
const MAX_UNSCALED_ARG: f64 = 700.0;

/// Crossover above which the scaled form switches to the large-argument
/// asymptotic series.
const ASYMPTOTIC_ARG: f64 = 5000.0;

/// ln I_mu(x) for real order mu >= 0 and x > 0 via the anchored series.
fn ln_bessel_series(mu: f64, x: f64) -> f64 {
    debug_assert!(mu >= 0.0 && x > 0.0);
    let q = 0.25 * x * x;
    // index of the largest term: greatest k with k (mu + k) <= q
    let k_peak = (0.5 * (-mu + (mu * mu + 4.0 * q).sqrt())).floor().max(0.0);
    let ln_peak = (mu + 2.0 * k_peak) * (0.5 * x).ln()
        - super::ln_gamma_pos(k_peak + 1.0)
        - super::ln_gamma_pos(mu + k_peak + 1.0);

    let mut sum = 1.0f64;
    // forward sweep, terms decay once past the peak
    let mut term = 1.0;
    let mut k = k_peak;
    loop {
        let ratio = q / ((k + 1.0) * (mu + k + 1.0));
        term *= ratio;
        sum += term;
        k += 1.0;
        if term < 1e-18 * sum || k > k_peak + 1e6 {
            break;
        }
    }
    // backward sweep down to k = 0
    term = 1.0;
    k = k_peak;
    while k >= 1.0 {
        term *= k * (mu + k) / q;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k -= 1.0;
    }
    ln_peak + sum.ln()
}

/// ln I_j(x) for integer order j >= 0, x > 0.
pub fn bessel_i_ln(j: i32, x: f64) -> Result<f64> {
    check_order_arg(j, x)?;
    if x == 0.0 {
        return Ok(if j == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    Ok(ln_bessel_series(j as f64, x))
}

/// Modified Bessel function I_j(x), integer order j >= 0.
///
/// Arguments above 700 would overflow the result and are rejected with a
/// pointer to [`bessel_i_scaled`].
pub fn bessel_i(j: i32, x: f64) -> Result<f64> {
    check_order_arg(j, x)?;
    if x > MAX_UNSCALED_ARG {
        return Err(Error::Range(format!(
            "I_{j}({x}) overflows f64; use bessel_i_scaled for x > {MAX_UNSCALED_ARG}"
        )));
    }
    if x == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    Ok(ln_bessel_series(j as f64, x).exp())
}

/// Exponentially scaled modified Bessel function e^(-x) I_j(x).
///
/// Valid on the full argument range; beyond the series crossover it uses the
/// large-argument asymptotic expansion ("Handbook", eq. 9.7.1) and reports an
/// accuracy error if that expansion cannot reach 1e-13.
pub fn bessel_i_scaled(j: i32, x: f64) -> Result<f64> {
    check_order_arg(j, x)?;
    if x == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    if x <= ASYMPTOTIC_ARG {
        return Ok((ln_bessel_series(j as f64, x) - x).exp());
    }
    let mu = 4.0 * (j as f64) * (j as f64);
    let pre = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..60u32 {
        let kk = 2.0 * k as f64 + 1.0;
        term *= -(mu - kk * kk) / ((k as f64 + 1.0) * 8.0 * x);
        if term.abs() >= prev {
            // divergent tail reached before convergence
            return Err(Error::Accuracy {
                best: pre * sum,
                residual: term.abs() / sum.abs(),
                target: 1e-13,
            });
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    Ok(pre * sum)
}

/// Modified spherical Bessel function of the first kind, real order nu >= 0:
/// i_nu(z) = sqrt(pi / 2z) I_(nu+1/2)(z).
pub fn sph_bessel_i(nu: f64, z: f64) -> Result<f64> {
    let ln = sph_bessel_i_ln(nu, z)?;
    if ln > f64::MAX.ln() {
        return Err(Error::Range(format!(
            "i_{nu}({z}) overflows f64; use sph_bessel_i_ln"
        )));
    }
    Ok(ln.exp())
}

/// ln i_nu(z) for real order nu >= 0, z >= 0.
pub fn sph_bessel_i_ln(nu: f64, z: f64) -> Result<f64> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::Domain(format!("sph_bessel_i requires nu >= 0, got {nu}")));
    }
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!("sph_bessel_i requires z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let pre = 0.5 * (std::f64::consts::FRAC_PI_2 / z).ln();
    Ok(pre + ln_bessel_series(nu + 0.5, z))
}

/// ln i_n(z) for integer order n >= 0, z > 0.
pub(crate) fn sph_bessel_i_int_ln(n: i64, z: f64) -> f64 {
    debug_assert!(n >= 0 && z > 0.0);
    let pre = 0.5 * (std::f64::consts::FRAC_PI_2 / z).ln();
    pre + ln_bessel_series(n as f64 + 0.5, z)
}

/// i_n(z) in double-double precision, integer order n >= 0, z > 0.
///
/// Serves the closed-form angular coefficients, whose alternating sums need
/// every term far beyond f64 accuracy. Uses the ascending series
/// i_n(z) = z^n / (2n+1)!! sum_q (z^2/2)^q / (q! (2n+3)(2n+5)...) whose
/// terms are all positive.
pub(crate) fn sph_bessel_i_dd(n: i64, z: f64) -> super::Dd {
    use super::Dd;
    debug_assert!(n >= 0 && z > 0.0);
    let zz_half = Dd::from_f64(z).mul(Dd::from_f64(z)).mul_f64(0.5);
    let mut term = Dd::ONE;
    for j in 1..=n {
        term = term.mul_f64(z).div_f64((2 * j + 1) as f64);
    }
    let mut sum = term;
    let mut q = 1i64;
    loop {
        term = term.mul(zz_half).div_f64((q * (2 * n + 2 * q + 1)) as f64);
        sum = sum.add(term);
        if term.to_f64() < 1e-33 * sum.to_f64() || q > 10_000 {
            return sum;
        }
        q += 1;
    }
}

fn check_order_arg(j: i32, x: f64) -> Result<()> {
    if j < 0 {
        return Err(Error::Domain(format!("bessel_i requires order j >= 0, got {j}")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("bessel_i requires x >= 0, got {x}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: Miller downward recurrence for e^(-x) I_j(x),
    /// normalized by e^x = I_0 + 2 sum_k I_k.
    fn miller_scaled(j: usize, x: f64) -> f64 {
        let start = j + 40 + (2.0 * x.sqrt() * 4.0) as usize;
        let mut f_up = 0.0f64;
        let mut f = 1e-280f64;
        let mut norm = 0.0f64;
        let mut target = 0.0f64;
        for n in (0..=start).rev() {
            let f_down = f_up + (2.0 * (n as f64 + 1.0) / x) * f;
            f_up = f;
            f = f_down;
            if n == j {
                target = f;
            }
            norm += if n == 0 { f } else { 2.0 * f };
            if f > 1e250 {
                f_up *= 1e-250;
                f *= 1e-250;
                norm *= 1e-250;
                target *= 1e-250;
            }
        }
        target / norm
    }

    #[test]
    fn zero_argument_limits() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i_scaled(0, 0.0).unwrap(), 1.0);
        assert_eq!(sph_bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(sph_bessel_i(2.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_miller_recurrence() {
        for &(j, x) in &[(0, 0.5), (2, 25.6), (5, 3.0), (15, 25.652), (40, 80.0), (3, 650.0)] {
            let got = bessel_i_scaled(j as i32, x).unwrap();
            let want = miller_scaled(j, x);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn unscaled_consistent_with_scaled() {
        for &(j, x) in &[(0, 1.0), (2, 25.6), (7, 160.0), (1, 699.0)] {
            let a = bessel_i(j, x).unwrap();
            let b = bessel_i_scaled(j, x).unwrap() * x.exp();
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn order_monotonicity() {
        for j in 0..12 {
            let a = bessel_i(j, 7.3).unwrap();
            let b = bessel_i(j + 1, 7.3).unwrap();
            assert!(a > b && b > 0.0);
        }
    }

    #[test]
    fn overflow_guard() {
        assert!(matches!(bessel_i(0, 701.0), Err(Error::Range(_))));
        assert!(bessel_i_scaled(0, 701.0).is_ok());
        assert!(bessel_i_scaled(2, 2.0e4).is_ok());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_i(-1, 1.0).is_err());
        assert!(bessel_i(0, -1.0).is_err());
        assert!(sph_bessel_i(-0.5, 1.0).is_err());
        assert!(sph_bessel_i(1.0, -2.0).is_err());
    }

    #[test]
    fn spherical_closed_forms() {
        // i_0 = sinh z / z, i_1 = (z cosh z - sinh z) / z^2
        for &z in &[0.3, 1.0, 12.826, 60.0] {
            let i0 = sph_bessel_i(0.0, z).unwrap();
            assert_relative_eq!(i0, z.sinh() / z, max_relative = 1e-12);
            let i1 = sph_bessel_i(1.0, z).unwrap();
            assert_relative_eq!(i1, (z * z.cosh() - z.sinh()) / (z * z), max_relative = 1e-12);
        }
    }

    // i_nu by the series route vs the stable downward recurrence, integer
    // orders up to 60 and arguments up to 60.
    #[test]
    fn spherical_matches_recurrence() {
        for &z in &[0.7f64, 5.0, 25.65, 60.0] {
            let top = 60usize;
            let start = top + 40 + (4.0 * z.sqrt()) as usize;
            let mut f_up = 0.0f64;
            let mut f = 1e-280f64;
            let mut vals = vec![0.0; top + 1];
            for n in (0..=start).rev() {
                let f_down = f_up + ((2.0 * (n as f64 + 1.0) + 1.0) / z) * f;
                f_up = f;
                f = f_down;
                if n <= top {
                    vals[n] = f;
                }
                if f > 1e250 {
                    f_up *= 1e-250;
                    f *= 1e-250;
                    for v in vals.iter_mut() {
                        *v *= 1e-250;
                    }
                }
            }
            let norm = (z.sinh() / z) / vals[0];
            for nu in (0..=top).step_by(5) {
                let got = sph_bessel_i(nu as f64, z).unwrap();
                assert_relative_eq!(got, vals[nu] * norm, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn integer_order_log_route() {
        for &z in &[0.4, 3.0, 12.826, 50.0] {
            for n in [0i64, 1, 4, 12] {
                let ln = sph_bessel_i_int_ln(n, z);
                assert_relative_eq!(
                    ln.exp(),
                    sph_bessel_i(n as f64, z).unwrap(),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn half_integer_orders_supported() {
        // i_(1/2)(z) = sqrt(pi/2z) I_1(z)
        for &z in &[0.9, 8.0, 44.0] {
            let a = sph_bessel_i(0.5, z).unwrap();
            let b = (std::f64::consts::FRAC_PI_2 / z).sqrt() * bessel_i(1, z).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn double_double_matches_f64_routes() {
        for &z in &[0.4f64, 2.0, 12.826, 39.0] {
            for n in [0i64, 1, 7, 30, 55] {
                let got = sph_bessel_i_dd(n, z).to_f64();
                let want = sph_bessel_i(n as f64, z).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-12);
            }
        }
    }

    // the order recurrence closes to double-double accuracy when every entry
    // comes from the positive series, confirming the series reaches well
    // beyond f64
    #[test]
    fn double_double_recurrence_residual() {
        use super::super::Dd;
        for &z in &[1.3f64, 12.826, 33.0] {
            for nu in 1i64..20 {
                let lhs = sph_bessel_i_dd(nu - 1, z);
                let scale = Dd::from_f64((2 * nu + 1) as f64).div(Dd::from_f64(z));
                let rhs = sph_bessel_i_dd(nu + 1, z).add(sph_bessel_i_dd(nu, z).mul(scale));
                let rel = lhs.sub(rhs).to_f64().abs() / lhs.to_f64();
                assert!(rel < 1e-27, "z = {z}, nu = {nu}, rel = {rel}");
            }
        }
    }
}
