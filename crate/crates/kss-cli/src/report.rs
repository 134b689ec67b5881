//! Fit report schema: the fitted packet parameters plus the orbit numbers
//! derived from them, emitted as JSON and echoed as an aligned table. The
//! two starred fields appear only when a defect table shifted the fit.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReport {
    pub alpha: f64,
    pub beta: u32,
    pub gamma0: f64,
    pub gamma1: f64,
    pub delta: f64,
    pub r_out: f64,
    pub r_in: f64,
    pub t_cl_au: f64,
    pub l_sq: f64,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_n_star: Option<f64>,
}

impl FitReport {
    /// JSON document form; `parse(emit(x)) == x` bit-exactly.
    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable echo, 17 significant digits per real entry.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let mut row = |name: &str, value: String| {
            out.push_str(&format!("  {name:<8} {value}\n"));
        };
        row("alpha", format!("{:.16e}", self.alpha));
        row("beta", format!("{}", self.beta));
        row("gamma0", format!("{:.16e}", self.gamma0));
        row("gamma1", format!("{:.16e}", self.gamma1));
        row("delta", format!("{:.16e}", self.delta));
        row("r_out", format!("{:.16e}", self.r_out));
        row("r_in", format!("{:.16e}", self.r_in));
        row("t_cl_au", format!("{:.16e}", self.t_cl_au));
        row("l_sq", format!("{:.16e}", self.l_sq));
        row("energy", format!("{:.16e}", self.energy));
        if let Some(n_star) = self.n_star {
            row("n_star", format!("{n_star:.16e}"));
        }
        if let Some(e) = self.e_n_star {
            row("e_n_star", format!("{e:.16e}"));
        }
        out
    }
}
