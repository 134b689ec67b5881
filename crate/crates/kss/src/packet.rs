//! Product wave packets on Kepler orbits: fitting the five parameters from
//! orbital conditions, eigenbasis expansion, time evolution, and density
//! diagnostics.
//!
//! A packet is the product of a radial squeezed state and a spherical
//! squeezed state. Its five parameters (`alpha`, `gamma0`, `gamma1` radial;
//! `beta`, `delta` angular) are pinned by five physical conditions: mean
//! radius, mean radial momentum, mean energy, sharp `L3`, and the `L3`
//! spread. Expanded over energy eigenstates the packet evolves exactly by
//! phases and traces the classical elliptical orbit over one Kepler period.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{solve_delta, sss_coeff, sss_eval, sss_expectations, CoeffMethod, SssState};
use crate::radial::{rss_eval, rss_expectations, RssState};
use crate::specfun::{
    integrate_adaptive, integrate_adaptive_c, radial_kernel_ln, solve_root, sph_harm, RootBracket,
};
use crate::{Error, Result};

/// Quadrature tolerances for eigenstate overlaps; the absolute floor lets
/// far-off-resonant coefficients terminate at numerical zero.
const OVERLAP_REL_TOL: f64 = 1e-8;
const OVERLAP_ABS_TOL: f64 = 1e-13;

/// Tolerances for the radial matrix elements behind [`expectation_r_t`];
/// these are O(n^2) numbers, so the absolute floor is loose.
const R_ELEM_REL_TOL: f64 = 1e-9;
const R_ELEM_ABS_TOL: f64 = 1e-9;

/// Product state of one radial and one angular squeezed factor. Both factors
/// are normalized at construction, so the product is too.
#[derive(Debug, Clone, PartialEq)]
pub struct KssState {
    pub rss: RssState,
    pub sss: SssState,
}

impl KssState {
    pub fn new(rss: RssState, sss: SssState) -> Self {
        KssState { rss, sss }
    }
}

/// Pointwise product value `psi(r) chi(theta, phi)`.
pub fn kss_eval(state: &KssState, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
    Ok(rss_eval(&state.rss, r)? * sss_eval(&state.sss, theta, phi)?)
}

/// Mean Coulomb energy from the closed-form factor moments:
/// `<H> = 1/2 <p_r^2> + 1/2 <1/r^2> <L^2> - <1/r>`.
pub fn kss_energy(state: &KssState) -> Result<f64> {
    let rad = rss_expectations(&state.rss);
    let ang = sss_expectations(&state.sss)?;
    Ok(0.5 * rad.p_r_sq + 0.5 * rad.r_inv_sq * ang.l_sq - rad.r_inv)
}

/// Physical conditions that pin the five packet parameters.
///
/// `n_bar` sets the mean energy `-1/(2 n_bar^2)`, `l3_target` the sharp
/// `L3`, `delta_l3` its spread, `p_r_target` the mean radial momentum, and
/// `r_target` the mean radius, defaulting to the outer apsidal distance of
/// the classical orbit when absent.
#[derive(Debug, Clone, PartialEq)]
pub struct InitConditions {
    n_bar: f64,
    l3_target: u32,
    delta_l3: f64,
    p_r_target: f64,
    r_target: Option<f64>,
}

impl InitConditions {
    pub fn new(n_bar: f64, l3_target: u32, delta_l3: f64) -> Result<Self> {
        if !(n_bar.is_finite() && n_bar > 0.0) {
            return Err(Error::Domain(format!("n_bar must be finite and > 0, got {n_bar}")));
        }
        if l3_target == 0 {
            return Err(Error::Domain("l3_target must be a positive integer".into()));
        }
        if f64::from(l3_target) >= n_bar {
            return Err(Error::Domain(format!(
                "l3_target must lie below n_bar, got l3 = {l3_target}, n_bar = {n_bar}"
            )));
        }
        if !(delta_l3.is_finite() && delta_l3 > 0.0) {
            return Err(Error::Domain(format!("delta_l3 must be finite and > 0, got {delta_l3}")));
        }
        Ok(InitConditions { n_bar, l3_target, delta_l3, p_r_target: 0.0, r_target: None })
    }

    pub fn with_p_r_target(mut self, p_r: f64) -> Result<Self> {
        if !p_r.is_finite() {
            return Err(Error::Domain(format!("p_r_target must be finite, got {p_r}")));
        }
        self.p_r_target = p_r;
        Ok(self)
    }

    pub fn with_r_target(mut self, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!("r_target must be finite and > 0, got {r}")));
        }
        self.r_target = Some(r);
        Ok(self)
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn l3_target(&self) -> u32 {
        self.l3_target
    }

    pub fn delta_l3(&self) -> f64 {
        self.delta_l3
    }

    pub fn p_r_target(&self) -> f64 {
        self.p_r_target
    }

    pub fn r_target(&self) -> Option<f64> {
        self.r_target
    }
}

/// Apsidal distances, period, and eccentricity of the classical Kepler orbit
/// with mean quantum number `n_bar` and squared angular momentum `l_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitGeometry {
    pub r_out: f64,
    pub r_in: f64,
    pub t_cl: f64,
    pub eccentricity: f64,
}

/// `r_out/in = n_bar^2 (1 +/- e)` with `e = sqrt(1 - l_sq/n_bar^2)`, and the
/// Kepler period `t_cl = 2 pi n_bar^3`. Requires `l_sq < n_bar^2`.
pub fn orbit_geometry(n_bar: f64, l_sq: f64) -> Result<OrbitGeometry> {
    if !(n_bar.is_finite() && n_bar > 0.0) || !(l_sq.is_finite() && l_sq >= 0.0) {
        return Err(Error::Domain(format!(
            "orbit geometry needs n_bar > 0 and l_sq >= 0, got n_bar = {n_bar}, l_sq = {l_sq}"
        )));
    }
    let n_sq = n_bar * n_bar;
    if l_sq >= n_sq {
        return Err(Error::Domain(format!(
            "bound orbit requires l_sq < n_bar^2, got l_sq = {l_sq}, n_bar^2 = {n_sq}"
        )));
    }
    let ecc = (1.0 - l_sq / n_sq).sqrt();
    Ok(OrbitGeometry {
        r_out: n_sq * (1.0 + ecc),
        r_in: n_sq * (1.0 - ecc),
        t_cl: 2.0 * PI * n_bar * n_sq,
        eccentricity: ecc,
    })
}

/// Solves the five conditions for the five packet parameters.
///
/// Sequence: `beta` is the sharp `L3`; `delta` comes from the `L3` spread;
/// the angular factor then fixes `<L^2>` and with it the apsidal radius
/// (unless `r_target` overrides it); `gamma1 = -p_r_target`; finally `alpha`
/// solves the energy condition in one dimension, with `gamma0` eliminated
/// through the mean-radius constraint `gamma0 = (2 alpha + 3)/(2 <r>)`.
pub fn fit_params(cond: &InitConditions) -> Result<KssState> {
    fit_with_effective_n(cond, cond.n_bar)
}

/// Fit pipeline against an effective quantum number: the energy target is
/// `-1/(2 n_eff^2)` and the default mean radius is the outer apsidal
/// distance of the `n_eff` orbit. The plain fit passes `n_eff = n_bar`;
/// the quantum-defect fit passes the defect-shifted value.
pub(crate) fn fit_with_effective_n(cond: &InitConditions, n_eff: f64) -> Result<KssState> {
    if !(n_eff.is_finite() && n_eff > 0.0) {
        return Err(Error::Domain(format!("effective n must be finite and > 0, got {n_eff}")));
    }
    let beta = cond.l3_target;
    let delta = solve_delta(beta, cond.delta_l3)?;
    let sss = SssState::new(beta, delta)?;
    let l_sq = sss_expectations(&sss)?.l_sq;
    let r_mean = match cond.r_target {
        Some(r) => r,
        None => orbit_geometry(n_eff, l_sq)?.r_out,
    };
    // 0.0 - x rather than -x so a zero momentum target yields +0.0, not -0.0
    let gamma1 = 0.0 - cond.p_r_target;
    let e_target = -0.5 / (n_eff * n_eff);
    // energy residual as a function of alpha alone
    let resid = |alpha: f64| {
        let g0 = (2.0 * alpha + 3.0) / (2.0 * r_mean);
        0.5 * g0 * g0 / (2.0 * alpha + 1.0) + l_sq * g0 * g0 / ((alpha + 1.0) * (2.0 * alpha + 1.0))
            - g0 / (alpha + 1.0)
            + 0.5 * gamma1 * gamma1
            - e_target
    };
    let (lo, hi) = (f64::from(beta), 10.0 * cond.n_bar);
    let (f_lo, f_hi) = (resid(lo), resid(hi));
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::Infeasible(format!(
            "no alpha solves the energy condition in ({lo}, {hi}]: \
             residual {f_lo:.6e} at {lo}, {f_hi:.6e} at {hi}"
        )));
    }
    let alpha = solve_root(resid, &RootBracket::new(lo, hi, 1e-10 * (1.0 + hi))?)?;
    let gamma0 = (2.0 * alpha + 3.0) / (2.0 * r_mean);
    Ok(KssState::new(RssState::new(alpha, gamma0, gamma1)?, sss))
}

/// Inclusive `(n, l, m)` box over which a packet is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    n_lo: u32,
    n_hi: u32,
    l_lo: u32,
    l_hi: u32,
    m_lo: i32,
    m_hi: i32,
}

impl Window {
    pub fn new(n: (u32, u32), l: (u32, u32), m: (i32, i32)) -> Result<Self> {
        if n.0 == 0 || n.0 > n.1 || n.1 > 120 {
            return Err(Error::Domain(format!("need 1 <= n_lo <= n_hi <= 120, got {n:?}")));
        }
        if l.0 > l.1 {
            return Err(Error::Domain(format!("need l_lo <= l_hi, got {l:?}")));
        }
        if m.0 > m.1 {
            return Err(Error::Domain(format!("need m_lo <= m_hi, got {m:?}")));
        }
        Ok(Window { n_lo: n.0, n_hi: n.1, l_lo: l.0, l_hi: l.1, m_lo: m.0, m_hi: m.1 })
    }

    /// Default spread around the means: 11 values of `n` and `l` centered on
    /// `n_bar` and `l3`, and the four uppermost azimuthal components
    /// `m in [l3 - 3, l3]`.
    pub fn centered(n_bar: u32, l3: u32) -> Result<Self> {
        let n_lo = n_bar.checked_sub(5).filter(|&v| v >= 1).ok_or_else(|| {
            Error::Domain(format!("centered window needs n_bar >= 6, got {n_bar}"))
        })?;
        let l_lo = l3
            .checked_sub(5)
            .ok_or_else(|| Error::Domain(format!("centered window needs l3 >= 5, got {l3}")))?;
        Window::new((n_lo, n_bar + 5), (l_lo, l3 + 5), (l3 as i32 - 3, l3 as i32))
    }

    pub fn n_range(&self) -> (u32, u32) {
        (self.n_lo, self.n_hi)
    }

    pub fn l_range(&self) -> (u32, u32) {
        (self.l_lo, self.l_hi)
    }

    pub fn m_range(&self) -> (i32, i32) {
        (self.m_lo, self.m_hi)
    }

    /// Total number of `(n, l, m)` combinations in the box.
    pub fn combos(&self) -> usize {
        let n = (self.n_hi - self.n_lo + 1) as usize;
        let l = (self.l_hi - self.l_lo + 1) as usize;
        let m = (self.m_hi - self.m_lo + 1) as usize;
        n * l * m
    }
}

/// Radial basis member labels: effective quantum numbers, Laguerre degree,
/// and level energy. Hydrogenic members have `ns = n`, `ls = l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RadialSpec {
    pub ns: f64,
    pub ls: f64,
    pub degree: u32,
    pub energy: f64,
}

fn basis_value(spec: &RadialSpec, r: f64) -> f64 {
    let (ln_mag, sign) = radial_kernel_ln(spec.ns, spec.ls, spec.degree, r);
    sign * ln_mag.exp()
}

/// One expansion amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffEntry {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub amp: Complex64,
}

/// Eigenbasis expansion of a packet over a window.
///
/// Entries are stored for every `(n, l, m)` combination with `l < n`, in
/// lexicographic order; amplitudes that vanish identically (odd `l - m`
/// parity, or `|m| > l`) are stored as exact zeros. Combinations with
/// `l >= n` do not exist in the basis and are only counted. The radial
/// matrix-element cache behind [`expectation_r_t`] fills on demand.
#[derive(Debug)]
pub struct CoeffTable {
    entries: Vec<CoeffEntry>,
    radial_idx: Vec<usize>,
    radial: Vec<((u32, u32), RadialSpec)>,
    index: HashMap<(u32, u32), usize>,
    window: Window,
    captured: f64,
    excluded: usize,
    r_cache: Mutex<HashMap<(u32, u32, u32), f64>>,
}

impl Clone for CoeffTable {
    fn clone(&self) -> Self {
        CoeffTable {
            entries: self.entries.clone(),
            radial_idx: self.radial_idx.clone(),
            radial: self.radial.clone(),
            index: self.index.clone(),
            window: self.window,
            captured: self.captured,
            excluded: self.excluded,
            r_cache: Mutex::new(self.r_cache.lock().expect("cache lock").clone()),
        }
    }
}

impl CoeffTable {
    pub fn entries(&self) -> &[CoeffEntry] {
        &self.entries
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// `Sum |c|^2` over the stored entries.
    pub fn captured_norm(&self) -> f64 {
        self.captured
    }

    /// Number of window combinations without a basis state (`l >= n`).
    pub fn excluded(&self) -> usize {
        self.excluded
    }

    /// Level energy of the `(n, l)` basis member, if in the window.
    pub fn energy(&self, n: u32, l: u32) -> Option<f64> {
        self.index.get(&(n, l)).map(|&i| self.radial[i].1.energy)
    }

    /// Energy expectation of the truncated state,
    /// `Sum |c|^2 E / Sum |c|^2`.
    pub fn mean_energy(&self) -> f64 {
        let weighted: f64 = self
            .entries
            .iter()
            .zip(&self.radial_idx)
            .map(|(e, &ri)| e.amp.norm_sqr() * self.radial[ri].1.energy)
            .sum();
        weighted / self.captured
    }

    fn spec_of(&self, entry_pos: usize) -> &RadialSpec {
        &self.radial[self.radial_idx[entry_pos]].1
    }
}

/// Expands the packet over hydrogenic eigenstates: each amplitude factorizes
/// into a radial overlap times an angular overlap,
/// `c_nlm = <R_nl | psi> <Y_lm | chi>`.
pub fn expand(state: &KssState, window: &Window) -> Result<CoeffTable> {
    expand_with(state, window, |n, l| {
        Ok(RadialSpec {
            ns: f64::from(n),
            ls: f64::from(l),
            degree: n - l - 1,
            energy: crate::radial::energy_n(n)?,
        })
    })
}

/// Shared expansion pipeline over an arbitrary radial basis; `spec_for`
/// supplies the labels and energy of the `(n, l)` member.
pub(crate) fn expand_with<F>(state: &KssState, window: &Window, spec_for: F) -> Result<CoeffTable>
where
    F: Fn(u32, u32) -> Result<RadialSpec> + Sync,
{
    let w = *window;
    // radial overlaps for every (n, l) pair that exists in the basis
    let mut pairs = Vec::new();
    let mut excluded = 0usize;
    for n in w.n_lo..=w.n_hi {
        for l in w.l_lo..=w.l_hi {
            if l < n {
                pairs.push((n, l));
            } else {
                excluded += (w.m_hi - w.m_lo + 1) as usize;
            }
        }
    }
    let radial: Vec<((u32, u32), RadialSpec, Complex64)> = pairs
        .par_iter()
        .map(|&(n, l)| {
            let spec = spec_for(n, l)?;
            let amp = radial_overlap(&state.rss, &spec, n)?;
            Ok(((n, l), spec, amp))
        })
        .collect::<Result<_>>()?;

    // angular overlaps for the (l, m) pairs that can be nonzero
    let mut lm_pairs = Vec::new();
    for l in w.l_lo..=w.l_hi {
        for m in w.m_lo..=w.m_hi {
            if m.unsigned_abs() <= l && (i64::from(l) - i64::from(m)).rem_euclid(2) == 0 {
                lm_pairs.push((l, m));
            }
        }
    }
    let angular: HashMap<(u32, i32), f64> = lm_pairs
        .par_iter()
        .map(|&(l, m)| {
            let method = if m >= 0 { CoeffMethod::ClosedForm } else { CoeffMethod::Quadrature };
            Ok(((l, m), sss_coeff(&state.sss, l, m, method)?))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();

    // deterministic assembly in lexicographic entry order
    let mut index = HashMap::new();
    let mut radial_list = Vec::with_capacity(radial.len());
    let mut radial_amp = HashMap::new();
    for (i, ((n, l), spec, amp)) in radial.into_iter().enumerate() {
        index.insert((n, l), i);
        radial_list.push(((n, l), spec));
        radial_amp.insert((n, l), amp);
    }
    let mut entries = Vec::new();
    let mut radial_idx = Vec::new();
    for n in w.n_lo..=w.n_hi {
        for l in w.l_lo..=w.l_hi {
            if l >= n {
                continue;
            }
            for m in w.m_lo..=w.m_hi {
                let amp = match angular.get(&(l, m)) {
                    Some(&ang) => radial_amp[&(n, l)] * ang,
                    None => Complex64::new(0.0, 0.0),
                };
                entries.push(CoeffEntry { n, l, m, amp });
                radial_idx.push(index[&(n, l)]);
            }
        }
    }
    let captured = entries.iter().map(|e| e.amp.norm_sqr()).sum();
    Ok(CoeffTable {
        entries,
        radial_idx,
        radial: radial_list,
        index,
        window: w,
        captured,
        excluded,
        r_cache: Mutex::new(HashMap::new()),
    })
}

fn radial_overlap(rss: &RssState, spec: &RadialSpec, n: u32) -> Result<Complex64> {
    let r_hi = 4.0 * f64::from(n) * f64::from(n);
    integrate_adaptive_c(
        |r| basis_value(spec, r) * rss_eval(rss, r).expect("quadrature keeps r >= 0") * (r * r),
        0.0,
        r_hi,
        OVERLAP_REL_TOL,
        OVERLAP_ABS_TOL,
    )
}

/// Truncated eigenbasis sum `Psi(r, theta, phi, t) =
/// Sum c_nlm R_nl(r) Y_lm(theta, phi) e^(-i E t)`.
///
/// `r = 0` evaluates through the radial kernel limit and contributes zero
/// for every positive effective angular momentum.
pub fn evolve_eval(table: &CoeffTable, r: f64, theta: f64, phi: f64, t: f64) -> Result<Complex64> {
    if table.entries.is_empty() {
        return Err(Error::Domain("empty coefficient table".into()));
    }
    if !(r.is_finite() && r >= 0.0) || !theta.is_finite() || !phi.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!(
            "need finite r >= 0, theta, phi, t; got r = {r}, theta = {theta}, phi = {phi}, t = {t}"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (pos, entry) in table.entries.iter().enumerate() {
        if entry.amp.norm_sqr() == 0.0 {
            continue;
        }
        let spec = table.spec_of(pos);
        let phase = Complex64::from_polar(1.0, -spec.energy * t);
        sum += entry.amp * basis_value(spec, r) * sph_harm(entry.l, entry.m, theta, phi)? * phase;
    }
    Ok(sum)
}

/// Cut plane for density maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlicePlane {
    /// Orbital plane: `(x, y) -> (r, theta = pi/2, phi = atan2(y, x))`.
    XY,
    /// Transverse plane: `(x, z) -> (r, theta = atan2(|x|, z), phi = 0 or pi)`.
    XZ,
}

/// Uniformly spaced axis with `count >= 2` points from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) || count < 2 {
            return Err(Error::Domain(format!(
                "axis needs finite min < max and count >= 2, got [{min}, {max}] x {count}"
            )));
        }
        Ok(GridAxis { min, max, count })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * (i as f64) / ((self.count - 1) as f64)
    }
}

/// Density map `r^2 |Psi|^2` sampled on a plane through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceGrid {
    pub plane: SlicePlane,
    /// First coordinate (x in both planes).
    pub x_axis: GridAxis,
    /// Second coordinate: y in the XY plane, z in the XZ plane.
    pub y_axis: GridAxis,
    pub time: f64,
    values: Vec<f64>,
}

impl SliceGrid {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.x_axis.count + ix]
    }

    /// Row-major values, the second coordinate varying slowest.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coord(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.x_axis.point(ix), self.y_axis.point(iy))
    }

    /// Grid indices of the largest cell value.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for iy in 0..self.y_axis.count {
            for ix in 0..self.x_axis.count {
                let v = self.value(ix, iy);
                if v > best.2 {
                    best = (ix, iy, v);
                }
            }
        }
        (best.0, best.1)
    }
}

/// Samples `r^2 |Psi(t)|^2` over a plane grid. The grid must stay inside
/// the basis support `r <= 4 n_hi^2`. Cells are independent; rows are
/// evaluated in parallel and the result does not depend on the worker count.
pub fn density_slice(
    table: &CoeffTable,
    plane: SlicePlane,
    x_axis: GridAxis,
    y_axis: GridAxis,
    t: f64,
) -> Result<SliceGrid> {
    if table.entries.is_empty() {
        return Err(Error::Domain("empty coefficient table".into()));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite, got {t}")));
    }
    let corner = x_axis.min.abs().max(x_axis.max.abs()).hypot(y_axis.min.abs().max(y_axis.max.abs()));
    let (_, n_hi) = table.window.n_range();
    let r_support = 4.0 * f64::from(n_hi) * f64::from(n_hi);
    if corner > r_support {
        return Err(Error::Domain(format!(
            "grid corner radius {corner:.3e} exceeds basis support {r_support:.3e}"
        )));
    }

    // per-slice precomputation: evolved amplitudes and dedup index maps
    let mut active = Vec::new(); // (amp e^(-iEt), radial slot, l, m)
    for (pos, entry) in table.entries.iter().enumerate() {
        if entry.amp.norm_sqr() == 0.0 {
            continue;
        }
        let spec = table.spec_of(pos);
        let amp_t = entry.amp * Complex64::from_polar(1.0, -spec.energy * t);
        active.push((amp_t, table.radial_idx[pos], entry.l, entry.m));
    }
    let mut rad_slots: Vec<usize> = active.iter().map(|a| a.1).collect();
    rad_slots.sort_unstable();
    rad_slots.dedup();
    let rad_pos: HashMap<usize, usize> =
        rad_slots.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut lm_list: Vec<(u32, i32)> = active.iter().map(|a| (a.2, a.3)).collect();
    lm_list.sort_unstable();
    lm_list.dedup();
    let lm_pos: HashMap<(u32, i32), usize> =
        lm_list.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut m_list: Vec<i32> = active.iter().map(|a| a.3).collect();
    m_list.sort_unstable();
    m_list.dedup();
    let m_pos: HashMap<i32, usize> = m_list.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let terms: Vec<(Complex64, usize, usize, usize)> = active
        .iter()
        .map(|&(amp, slot, l, m)| (amp, rad_pos[&slot], lm_pos[&(l, m)], m_pos[&m]))
        .collect();

    let rows: Vec<Vec<f64>> = (0..y_axis.count)
        .into_par_iter()
        .map(|iy| {
            let b = y_axis.point(iy);
            let mut row = Vec::with_capacity(x_axis.count);
            for ix in 0..x_axis.count {
                let a = x_axis.point(ix);
                let r = a.hypot(b);
                let (theta, phi) = match plane {
                    SlicePlane::XY => (0.5 * PI, b.atan2(a)),
                    SlicePlane::XZ => (a.abs().atan2(b), if a >= 0.0 { 0.0 } else { PI }),
                };
                let rad_vals: Vec<f64> =
                    rad_slots.iter().map(|&s| basis_value(&table.radial[s].1, r)).collect();
                let y_vals: Result<Vec<f64>> = lm_list
                    .iter()
                    .map(|&(l, m)| Ok(sph_harm(l, m, theta, 0.0)?.re))
                    .collect();
                let y_vals = y_vals?;
                let m_phases: Vec<Complex64> =
                    m_list.iter().map(|&m| Complex64::from_polar(1.0, f64::from(m) * phi)).collect();
                let mut psi = Complex64::new(0.0, 0.0);
                for &(amp, ri, yi, mi) in &terms {
                    psi += amp * (rad_vals[ri] * y_vals[yi]) * m_phases[mi];
                }
                row.push(r * r * psi.norm_sqr());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(SliceGrid { plane, x_axis, y_axis, time: t, values: rows.concat() })
}

/// Mean radius of the truncated state at time `t`, normalized by the
/// captured norm:
/// `<r>(t) = Sum conj(c') c <R'|r|R> e^(i (E' - E) t) / Sum |c|^2`.
///
/// Radial matrix elements are computed by quadrature on first use and cached
/// by `(n, n', l)`.
pub fn expectation_r_t(table: &CoeffTable, t: f64) -> Result<f64> {
    if table.entries.is_empty() {
        return Err(Error::Domain("empty coefficient table".into()));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite, got {t}")));
    }
    // group nonzero entries by (l, m); only same-(l, m) pairs couple
    let mut groups: HashMap<(u32, i32), Vec<usize>> = HashMap::new();
    for (pos, entry) in table.entries.iter().enumerate() {
        if entry.amp.norm_sqr() > 0.0 {
            groups.entry((entry.l, entry.m)).or_default().push(pos);
        }
    }
    let mut keys: Vec<(u32, i32)> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut sum = Complex64::new(0.0, 0.0);
    for key in keys {
        let members = &groups[&key];
        for &i in members {
            let (ei, si) = (&table.entries[i], table.spec_of(i));
            for &j in members {
                let (ej, sj) = (&table.entries[j], table.spec_of(j));
                let elem = radial_element(table, (ei.n, si), (ej.n, sj), key.0)?;
                let phase = Complex64::from_polar(1.0, (si.energy - sj.energy) * t);
                sum += ei.amp.conj() * ej.amp * elem * phase;
            }
        }
    }
    assert!(
        sum.im.abs() <= 1e-10 * sum.norm().max(1.0),
        "radius expectation must be real, got imaginary part {}",
        sum.im
    );
    Ok(sum.re / table.captured)
}

/// `<R_(n_a, l) | r | R_(n_b, l)>`, symmetric in the pair, cached.
fn radial_element(
    table: &CoeffTable,
    a: (u32, &RadialSpec),
    b: (u32, &RadialSpec),
    l: u32,
) -> Result<f64> {
    let key = (a.0.min(b.0), a.0.max(b.0), l);
    if let Some(&v) = table.r_cache.lock().expect("cache lock").get(&key) {
        return Ok(v);
    }
    let n_big = f64::from(a.0.max(b.0));
    let v = integrate_adaptive(
        |r| basis_value(a.1, r) * basis_value(b.1, r) * r * r * r,
        0.0,
        4.0 * n_big * n_big,
        R_ELEM_REL_TOL,
        R_ELEM_ABS_TOL,
    )?;
    table.r_cache.lock().expect("cache lock").insert(key, v);
    Ok(v)
}
