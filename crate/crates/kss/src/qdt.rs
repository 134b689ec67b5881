//! Quantum-defect extension of the hydrogenic machinery for alkali-metal
//! atoms.
//!
//! Alkali Rydberg series shift the hydrogenic levels by asymptotic quantum
//! defects delta(l). The eigenbasis keeps the hydrogenic functional form but
//! with shifted labels n* = n - delta(l) and l* = l - delta(l) + I(l), where
//! I(l) is an integer offset (zero unless configured). Everything downstream
//! of the labels reuses the hydrogenic code paths: the radial functions share
//! the same kernel, the expansion shares the coefficient table, and the
//! parameter fit shares the root solve with n replaced by the effective
//! principal quantum number.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::packet::{expand_with, fit_with_effective_n, CoeffTable, InitConditions, KssState, RadialSpec, Window};
use crate::specfun::radial_kernel_ln;
use crate::{Error, Result};

/// Largest principal quantum number the radial kernel is validated for;
/// matches the hydrogenic bound.
const MAX_N: u32 = 120;

/// Asymptotic quantum defects delta(l) and integer shifts I(l), keyed by l.
/// Unlisted l values read as zero, so an empty table is exactly hydrogen.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(try_from = "RawDefectTable")]
pub struct DefectTable {
    defects: BTreeMap<u32, f64>,
    integer_shift: BTreeMap<u32, i32>,
}

/// Wire format: JSON object keys are strings, so l arrives as text and the
/// numbers are validated on conversion.
#[derive(Deserialize)]
struct RawDefectTable {
    defects: BTreeMap<String, f64>,
    #[serde(default)]
    integer_shift: BTreeMap<String, i32>,
}

fn parse_l(key: &str) -> Result<u32> {
    key.parse::<u32>()
        .map_err(|_| Error::Domain(format!("defect table key {key:?} is not an l value")))
}

impl TryFrom<RawDefectTable> for DefectTable {
    type Error = Error;

    fn try_from(raw: RawDefectTable) -> Result<Self> {
        let mut table = DefectTable::new();
        for (key, delta) in raw.defects {
            table = table.with_defect(parse_l(&key)?, delta)?;
        }
        for (key, shift) in raw.integer_shift {
            table = table.with_shift(parse_l(&key)?, shift);
        }
        Ok(table)
    }
}

impl DefectTable {
    /// Empty table: every defect and shift is zero (plain hydrogen).
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the JSON wire form
    /// `{"defects": {"0": 1.35, ...}, "integer_shift": {"0": 1, ...}}`;
    /// the `integer_shift` member may be omitted.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Domain(format!("defect table JSON rejected: {e}")))
    }

    /// Sets delta(l). Defects are asymptotic lowering shifts, so negative or
    /// non-finite values are rejected.
    pub fn with_defect(mut self, l: u32, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::Domain(format!(
                "quantum defect must be finite and >= 0, got delta({l}) = {delta}"
            )));
        }
        self.defects.insert(l, delta);
        Ok(self)
    }

    /// Sets the integer shift I(l).
    pub fn with_shift(mut self, l: u32, shift: i32) -> Self {
        self.integer_shift.insert(l, shift);
        self
    }

    /// delta(l), zero when unlisted.
    pub fn defect(&self, l: u32) -> f64 {
        self.defects.get(&l).copied().unwrap_or(0.0)
    }

    /// I(l), zero when unlisted.
    pub fn shift(&self, l: u32) -> i32 {
        self.integer_shift.get(&l).copied().unwrap_or(0)
    }

    /// Whether `l` has an explicitly listed defect (an explicit zero counts).
    pub fn covers(&self, l: u32) -> bool {
        self.defects.contains_key(&l)
    }

    /// The l values of a window that have no listed defect. Callers that
    /// treat silence as an oversight (rather than deliberate hydrogen) can
    /// warn on a non-empty return.
    pub fn missing_in(&self, window: &Window) -> Vec<u32> {
        let (l_lo, l_hi) = window.l_range();
        (l_lo..=l_hi).filter(|l| !self.defects.contains_key(l)).collect()
    }
}

/// Defect-shifted labels of one radial basis member: real effective quantum
/// numbers and the (still integer) Laguerre degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqdtLabels {
    n_star: f64,
    l_star: f64,
    degree: u32,
}

impl SqdtLabels {
    /// Validates a label triple. The normalization of the radial form relies
    /// on the degree being exactly n* - l* - 1, so that relation is enforced
    /// here rather than trusted.
    pub fn new(n_star: f64, l_star: f64, degree: u32) -> Result<Self> {
        if !n_star.is_finite() || !l_star.is_finite() {
            return Err(Error::Domain(format!(
                "labels must be finite, got n* = {n_star}, l* = {l_star}"
            )));
        }
        if l_star <= -1.0 {
            return Err(Error::Domain(format!("l* must exceed -1, got {l_star}")));
        }
        if n_star <= l_star {
            return Err(Error::Domain(format!(
                "n* must exceed l*, got n* = {n_star}, l* = {l_star}"
            )));
        }
        let residual = (n_star - l_star - 1.0) - degree as f64;
        if residual.abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "degree {degree} is not n* - l* - 1 = {}",
                n_star - l_star - 1.0
            )));
        }
        Ok(Self { n_star, l_star, degree })
    }

    pub fn n_star(&self) -> f64 {
        self.n_star
    }

    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// Labels for the (n, l) level under a defect table: n* = n - delta(l),
/// l* = l - delta(l) + I(l), degree n - l - I(l) - 1. The defect cancels in
/// the degree, which therefore stays an exact integer.
pub fn labels(n: u32, l: u32, table: &DefectTable) -> Result<SqdtLabels> {
    if n == 0 || n > MAX_N {
        return Err(Error::Domain(format!("n must lie in [1, {MAX_N}], got {n}")));
    }
    let delta = table.defect(l);
    let shift = table.shift(l);
    let degree = n as i64 - l as i64 - shift as i64 - 1;
    if degree < 0 {
        return Err(Error::Domain(format!(
            "no level at n = {n}, l = {l}: degree n - l - I(l) - 1 = {degree}"
        )));
    }
    let n_star = n as f64 - delta;
    let l_star = l as f64 - delta + shift as f64;
    SqdtLabels::new(n_star, l_star, degree as u32)
}

/// Defect-shifted Rydberg energy -1/(2 n*^2) with n* = n - delta(l).
pub fn sqdt_energy(n: u32, l: u32, table: &DefectTable) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let n_star = n as f64 - table.defect(l);
    if n_star <= 0.0 {
        return Err(Error::Domain(format!(
            "defect {} leaves no bound level at n = {n}",
            table.defect(l)
        )));
    }
    Ok(-0.5 / (n_star * n_star))
}

/// Radial eigenfunction with defect-shifted labels: the hydrogenic form with
/// scale 1/n*, power r^(l*), and a generalized Laguerre factor of integer
/// degree but real order 2l* + 1. Reduces to `hydro_radial` when the labels
/// are integers.
pub fn sqdt_radial(labels: &SqdtLabels, r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("r must be finite and >= 0, got {r}")));
    }
    let (ln_mag, sign) = radial_kernel_ln(labels.n_star, labels.l_star, labels.degree, r);
    Ok(sign * ln_mag.exp())
}

/// Expansion of a packet over the defect-shifted eigenbasis. Identical to the
/// hydrogenic expansion except that the radial members and level energies of
/// each (n, l) carry the starred labels, so the amplitudes become
/// ⟨R(n*, l*)|psi⟩ c_lm and the stored energies follow the shifted Rydberg
/// series.
///
/// Any window combination whose degree would go negative under a positive
/// I(l) is rejected rather than skipped; shrink the window or the shift.
pub fn sqdt_expand(state: &KssState, window: &Window, table: &DefectTable) -> Result<CoeffTable> {
    expand_with(state, window, |n, l| {
        let lab = labels(n, l, table)?;
        Ok(RadialSpec {
            ns: lab.n_star,
            ls: lab.l_star,
            degree: lab.degree,
            energy: sqdt_energy(n, l, table)?,
        })
    })
}

/// Parameter fit against the defect-shifted targets: the energy condition
/// becomes ⟨H⟩ = -1/(2 n̄*^2) and the radius condition ⟨r⟩ = r_out(n̄*),
/// with n̄* = n̄ - delta(beta). The wavefunction keeps the hydrogenic
/// functional form; only the imposed conditions shift. With an empty table
/// this is exactly `fit_params`.
pub fn fit_params_qdt(cond: &InitConditions, table: &DefectTable) -> Result<KssState> {
    let n_eff = cond.n_bar() - table.defect(cond.l3_target());
    if n_eff <= 0.0 {
        return Err(Error::Domain(format!(
            "defect {} leaves no bound level at n_bar = {}",
            table.defect(cond.l3_target()),
            cond.n_bar()
        )));
    }
    fit_with_effective_n(cond, n_eff)
}
