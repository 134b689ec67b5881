//! Desk-scale validation runner behind the `check` subcommand: each library
//! invariant is re-measured on a small deterministic lattice and reported as
//! one line with the observed deviation. The canonical scenario (n_bar = 45,
//! L3 = 30, dL3 = 2.5) anchors the packet and defect checks.

use std::f64::consts::PI;

use kss::angular::{a_fn, solve_delta, sss_coeff, sss_expectations, CoeffMethod, SssState};
use kss::packet::{expand, fit_params, kss_energy, orbit_geometry, InitConditions, Window};
use kss::qdt::{fit_params_qdt, labels, sqdt_energy, sqdt_radial, DefectTable};
use kss::radial::{energy_n, rss_eval, rss_expectations, RssState};
use kss::specfun::{hydro_radial, integrate_adaptive};
use num_complex::Complex64;

use crate::{numerical, Failure};

pub const MODULES: [&str; 4] = ["angular", "radial", "packet", "qdt"];

/// Deliberate faults for exercising the failure path from the outside.
pub const FAULTS: [&str; 1] = ["norm"];

#[derive(Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub measured: String,
}

impl CheckOutcome {
    fn new(name: &'static str, pass: bool, measured: String) -> Self {
        CheckOutcome { name, pass, measured }
    }
}

pub fn run_checks(only: Option<&str>, inject: Option<&str>) -> Result<Vec<CheckOutcome>, Failure> {
    if let Some(module) = only {
        if !MODULES.contains(&module) {
            return Err(Failure::Usage(format!(
                "unknown module '{module}'; expected one of {MODULES:?}"
            )));
        }
    }
    if let Some(fault) = inject {
        if !FAULTS.contains(&fault) {
            return Err(Failure::Usage(format!(
                "unknown fault '{fault}'; expected one of {FAULTS:?}"
            )));
        }
    }
    let wanted = |module: &str| only.is_none() || only == Some(module);
    let mut out = Vec::new();
    if wanted("angular") {
        angular_checks(&mut out)?;
    }
    if wanted("radial") {
        radial_checks(&mut out, inject == Some("norm"))?;
    }
    if wanted("packet") {
        packet_checks(&mut out)?;
    }
    if wanted("qdt") {
        qdt_checks(&mut out)?;
    }
    Ok(out)
}

const BETAS: [u32; 3] = [1, 12, 40];
const DELTAS: [f64; 3] = [0.5, 12.826, 30.0];

fn angular_checks(out: &mut Vec<CheckOutcome>) -> Result<(), Failure> {
    let mut sum_dev = 0.0f64;
    let mut sat_dev = 0.0f64;
    for beta in BETAS {
        for delta in DELTAS {
            let e = sss_expectations(&SssState::new(beta, delta).map_err(numerical)?)
                .map_err(numerical)?;
            sum_dev = sum_dev.max((e.a1_sq + e.a2_sq + e.a3_sq - 1.0).abs());
            let product = e.a2_sq.sqrt() * (0.5 * delta * e.a1).sqrt();
            sat_dev = sat_dev.max((product - 0.5 * e.a1).abs() / (0.5 * e.a1));
        }
    }
    out.push(CheckOutcome::new(
        "angular.cosine_sum",
        sum_dev <= 1e-10,
        format!("max_dev={sum_dev:.1e} tol=1e-10"),
    ));
    out.push(CheckOutcome::new(
        "angular.saturation",
        sat_dev <= 1e-12,
        format!("max_rel_dev={sat_dev:.1e} tol=1e-12"),
    ));

    let mut id_dev = 0.0f64;
    for j in 0..=3u32 {
        for beta in BETAS {
            for delta in DELTAS {
                let lhs = a_fn(j, beta + 1, delta).map_err(numerical)?;
                let rhs = a_fn(j + 2, beta, delta).map_err(numerical)?
                    + (f64::from(j + 1) / delta) * a_fn(j + 1, beta, delta).map_err(numerical)?;
                id_dev = id_dev.max((lhs - rhs).abs() / lhs.abs());
            }
        }
    }
    out.push(CheckOutcome::new(
        "angular.order_identity",
        id_dev <= 1e-9,
        format!("max_rel_dev={id_dev:.1e} tol=1e-9"),
    ));

    let mut limits_exact = true;
    for beta in [1u32, 30, 60] {
        let e = sss_expectations(&SssState::new(beta, 0.0).map_err(numerical)?)
            .map_err(numerical)?;
        let bf = f64::from(beta);
        limits_exact &= e.l3_sq == bf * bf && e.l_sq == bf * (bf + 1.0);
    }
    out.push(CheckOutcome::new(
        "angular.eigenstate_limit",
        limits_exact,
        format!("exact={limits_exact}"),
    ));

    let delta_star = solve_delta(30, 2.5).map_err(numerical)?;
    let state = SssState::new(30, delta_star).map_err(numerical)?;
    let mut parity_exact = true;
    for (l, m) in [(30u32, 29i32), (32, 31), (34, 29)] {
        parity_exact &= sss_coeff(&state, l, m, CoeffMethod::ClosedForm).map_err(numerical)? == 0.0;
    }
    out.push(CheckOutcome::new(
        "angular.coeff_parity",
        parity_exact,
        format!("odd_parity_zero={parity_exact}"),
    ));

    let mut route_dev = 0.0f64;
    for (l, m) in [(30u32, 30i32), (32, 28), (35, 33)] {
        let closed = sss_coeff(&state, l, m, CoeffMethod::ClosedForm).map_err(numerical)?;
        let quad = sss_coeff(&state, l, m, CoeffMethod::Quadrature).map_err(numerical)?;
        route_dev = route_dev.max((closed - quad).abs());
    }
    out.push(CheckOutcome::new(
        "angular.coeff_routes",
        route_dev <= 1e-10,
        format!("max_abs_dev={route_dev:.1e} tol=1e-10"),
    ));
    Ok(())
}

fn radial_checks(out: &mut Vec<CheckOutcome>, inject_norm: bool) -> Result<(), Failure> {
    let lattice = [(5.0, 0.5, 0.2), (30.0, 0.1, 0.05), (62.846, 0.01834, 0.0)];
    let mut norm_dev = 0.0f64;
    let mut radius_dev = 0.0f64;
    let mut floor_margin = f64::INFINITY;
    for (alpha, gamma0, gamma1) in lattice {
        let state = RssState::new(alpha, gamma0, gamma1).map_err(numerical)?;
        let hi = 6.0 * (2.0 * alpha + 3.0) / (2.0 * gamma0);
        let density = |r: f64| {
            if r <= 0.0 {
                0.0
            } else {
                rss_eval(&state, r).expect("inside domain").norm_sqr() * r * r
            }
        };
        let mut norm = integrate_adaptive(density, 0.0, hi, 1e-11, 1e-14).map_err(numerical)?;
        if inject_norm {
            norm *= 1.0 + 1e-6;
        }
        norm_dev = norm_dev.max((norm - 1.0).abs());

        let closed = rss_expectations(&state);
        let want = (2.0 * alpha + 3.0) / (2.0 * gamma0);
        radius_dev = radius_dev.max((closed.r_mean - want).abs() / want);
        floor_margin = floor_margin.min(closed.dr_dpr - 0.5);
    }
    out.push(CheckOutcome::new(
        "radial.norm",
        norm_dev <= 1e-9,
        format!("max_dev={norm_dev:.1e} tol=1e-9"),
    ));
    out.push(CheckOutcome::new(
        "radial.mean_radius",
        radius_dev <= 1e-12,
        format!("max_rel_dev={radius_dev:.1e} tol=1e-12"),
    ));
    out.push(CheckOutcome::new(
        "radial.uncertainty_floor",
        floor_margin >= -5e-13,
        format!("min_margin={floor_margin:.1e} bound=0.5"),
    ));
    Ok(())
}

fn packet_checks(out: &mut Vec<CheckOutcome>) -> Result<(), Failure> {
    let cond = InitConditions::new(45.0, 30, 2.5).map_err(numerical)?;
    let fit = fit_params(&cond).map_err(numerical)?;
    let fit_ok = (fit.rss.alpha() - 62.846).abs() <= 0.3
        && (fit.rss.gamma0() - 0.01834).abs() <= 1e-4
        && fit.rss.gamma1() == 0.0
        && (fit.sss.delta() - 12.826).abs() <= 0.06
        && fit.sss.beta() == 30;
    out.push(CheckOutcome::new(
        "packet.fit",
        fit_ok,
        format!(
            "alpha={:.4} gamma0={:.5e} delta={:.4}",
            fit.rss.alpha(),
            fit.rss.gamma0(),
            fit.sss.delta()
        ),
    ));

    let rad = rss_expectations(&fit.rss);
    let l_sq = sss_expectations(&fit.sss).map_err(numerical)?.l_sq;
    let energy = kss_energy(&fit).map_err(numerical)?;
    let obs_ok = (rad.r_mean - 3508.6).abs() <= 2.0
        && (l_sq - 938.1).abs() <= 1.0
        && (energy - (-2.4691e-4)).abs() <= 1e-7;
    out.push(CheckOutcome::new(
        "packet.observables",
        obs_ok,
        format!("r_mean={:.3} l_sq={:.3} energy={energy:.5e}", rad.r_mean, l_sq),
    ));

    let window = Window::centered(45, 30).map_err(numerical)?;
    let table = expand(&fit, &window).map_err(numerical)?;
    let total = table.entries().len();
    let parity_zeros = table
        .entries()
        .iter()
        .filter(|e| (i64::from(e.l) - i64::from(e.m)).rem_euclid(2) == 1 && e.amp.norm_sqr() == 0.0)
        .count();
    let captured = table.captured_norm();
    let census_ok = total == 484 && parity_zeros == 242 && captured > 0.0 && captured <= 1.0;
    out.push(CheckOutcome::new(
        "packet.census",
        census_ok,
        format!("combos={total} parity_zeros={parity_zeros} captured={captured:.6}"),
    ));

    let geo = orbit_geometry(45.0, l_sq).map_err(numerical)?;
    let norm0: f64 = table.entries().iter().map(|e| e.amp.norm_sqr()).sum();
    let energy0 = table.mean_energy();
    let t = 0.37 * geo.t_cl;
    let mut norm_t = 0.0;
    let mut weighted = 0.0;
    for e in table.entries() {
        if e.amp.norm_sqr() == 0.0 {
            continue;
        }
        let level = table.energy(e.n, e.l).expect("stored entries carry a level");
        let amp_t = e.amp * Complex64::from_polar(1.0, -level * t);
        norm_t += amp_t.norm_sqr();
        weighted += amp_t.norm_sqr() * level;
    }
    let norm_drift = (norm_t - norm0).abs() / norm0;
    let energy_drift = (weighted / norm_t - energy0).abs() / energy0.abs();
    out.push(CheckOutcome::new(
        "packet.conservation",
        norm_drift <= 1e-12 && energy_drift <= 1e-5,
        format!("norm_drift={norm_drift:.1e} energy_drift={energy_drift:.1e}"),
    ));

    let period_exact = geo.t_cl == 2.0 * PI * 91125.0;
    out.push(CheckOutcome::new(
        "packet.period",
        period_exact,
        format!("t_cl={:.10e} exact_2pi_nbar_cubed={period_exact}", geo.t_cl),
    ));
    Ok(())
}

fn qdt_checks(out: &mut Vec<CheckOutcome>) -> Result<(), Failure> {
    let empty = DefectTable::new();
    let mut dev = 0.0f64;
    for (n, l) in [(45u32, 30u32), (5, 0)] {
        let hydro_e = energy_n(n).map_err(numerical)?;
        let shifted = sqdt_energy(n, l, &empty).map_err(numerical)?;
        dev = dev.max((shifted - hydro_e).abs() / hydro_e.abs());
        let lab = labels(n, l, &empty).map_err(numerical)?;
        let samples = [1.0, 150.0, 3500.0];
        let scale = samples
            .iter()
            .map(|&r| hydro_radial(n, l, r).map(f64::abs))
            .collect::<kss::Result<Vec<f64>>>()
            .map_err(numerical)?
            .into_iter()
            .fold(0.0f64, f64::max);
        for r in samples {
            let diff = (sqdt_radial(&lab, r).map_err(numerical)?
                - hydro_radial(n, l, r).map_err(numerical)?)
            .abs();
            dev = dev.max(diff / scale);
        }
    }
    out.push(CheckOutcome::new(
        "qdt.reduction",
        dev <= 1e-12,
        format!("max_dev={dev:.1e} tol=1e-12"),
    ));

    let table = DefectTable::new().with_defect(30, 0.5).map_err(numerical)?;
    let cond = InitConditions::new(45.0, 30, 2.5).map_err(numerical)?;
    let fit = fit_params_qdt(&cond, &table).map_err(numerical)?;
    let energy = kss_energy(&fit).map_err(numerical)?;
    let target = -0.5 / (44.5 * 44.5);
    let err = (energy - target).abs();
    out.push(CheckOutcome::new(
        "qdt.defect_fit",
        err <= 1e-9,
        format!("energy={energy:.10e} err={err:.1e} tol=1e-9"),
    ));
    Ok(())
}
