//! Run configuration: a single JSON document naming the physical scenario,
//! the expansion window, the sampling times, and the output layout. Times
//! may be given in atomic units or as fractions of the classical period,
//! written like `"1/3 Tcl"`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use kss::packet::{InitConditions, SlicePlane, Window};
use kss::qdt::DefectTable;
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Inclusive `[lo, hi]` bounds, written as two-element JSON arrays.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub n: (u32, u32),
    pub l: (u32, u32),
    pub m: (i32, i32),
}

/// One entry of the `times` list: a plain number is atomic units, a string
/// is a multiple of the classical period.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Au(f64),
    Text(String),
}

/// A sampling time with the period factor still symbolic, so the config can
/// be validated before the fit supplies `t_cl`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedTime {
    Au(f64),
    PeriodFraction(f64),
}

impl ResolvedTime {
    pub fn at(self, t_cl: f64) -> f64 {
        match self {
            ResolvedTime::Au(t) => t,
            ResolvedTime::PeriodFraction(f) => f * t_cl,
        }
    }
}

/// Parses the string form of a time entry: `"<x> Tcl"` or `"<p>/<q> Tcl"`,
/// returning the period multiple.
pub fn parse_time_text(s: &str) -> Result<f64, String> {
    let Some(prefix) = s.trim().strip_suffix("Tcl") else {
        return Err(format!("time string must end in 'Tcl', got '{s}'"));
    };
    let num = prefix.trim();
    let value = if let Some((p, q)) = num.split_once('/') {
        let p: f64 =
            p.trim().parse().map_err(|_| format!("bad fraction numerator in '{s}'"))?;
        let q: f64 =
            q.trim().parse().map_err(|_| format!("bad fraction denominator in '{s}'"))?;
        if q == 0.0 {
            return Err(format!("zero denominator in '{s}'"));
        }
        p / q
    } else {
        num.parse().map_err(|_| format!("bad time value in '{s}'"))?
    };
    if !value.is_finite() {
        return Err(format!("non-finite time in '{s}'"));
    }
    Ok(value)
}

/// Density-map sampling: half-width of the square grid in atomic units
/// (defaulting to 1.2 times the fitted outer apsidal radius) and the number
/// of points per axis.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub extent: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    201
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { extent: None, resolution: default_resolution() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_bar: f64,
    pub l3: u32,
    pub delta_l3: f64,
    #[serde(default)]
    pub window: Option<WindowSpec>,
    #[serde(default)]
    pub times: Vec<TimeSpec>,
    #[serde(default)]
    pub planes: Option<Vec<SlicePlane>>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub defects: Option<PathBuf>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// Fully validated inputs for one command run; everything except the
/// time resolution (which waits for the fitted period) is checked here.
#[derive(Debug)]
pub struct Pipeline {
    pub cond: InitConditions,
    pub window: Window,
    pub defects: Option<DefectTable>,
    pub times: Vec<ResolvedTime>,
    pub planes: Vec<SlicePlane>,
    pub grid: GridSpec,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

/// Command-line overrides applied on top of the config document.
#[derive(Debug, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub defects: Option<PathBuf>,
}

impl Pipeline {
    pub fn load(config_path: &Path, over: &Overrides) -> Result<Self, Failure> {
        let text = fs::read_to_string(config_path).map_err(|e| {
            Failure::Usage(format!("cannot read config {}: {e}", config_path.display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
            Failure::Usage(format!("cannot parse config {}: {e}", config_path.display()))
        })?;
        Pipeline::from_config(cfg, over)
    }

    pub fn from_config(cfg: RunConfig, over: &Overrides) -> Result<Self, Failure> {
        let usage = |m: String| Failure::Usage(m);

        let cond = InitConditions::new(cfg.n_bar, cfg.l3, cfg.delta_l3)
            .map_err(|e| usage(e.to_string()))?;

        let window = match cfg.window {
            Some(w) => Window::new(w.n, w.l, w.m).map_err(|e| usage(e.to_string()))?,
            // the rounded mean quantum number anchors the default box
            None => Window::centered(cfg.n_bar.round() as u32, cfg.l3)
                .map_err(|e| usage(e.to_string()))?,
        };

        let mut times = Vec::with_capacity(cfg.times.len());
        for spec in &cfg.times {
            times.push(match spec {
                TimeSpec::Au(t) if t.is_finite() => ResolvedTime::Au(*t),
                TimeSpec::Au(t) => return Err(usage(format!("non-finite time {t}"))),
                TimeSpec::Text(s) => ResolvedTime::PeriodFraction(parse_time_text(s).map_err(usage)?),
            });
        }

        if cfg.grid.resolution < 2 {
            return Err(usage(format!("grid resolution must be >= 2, got {}", cfg.grid.resolution)));
        }
        if let Some(ext) = cfg.grid.extent {
            if !(ext.is_finite() && ext > 0.0) {
                return Err(usage(format!("grid extent must be finite and > 0, got {ext}")));
            }
        }

        let defects_path = over.defects.clone().or(cfg.defects);
        let defects = match &defects_path {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    usage(format!("cannot read defect table {}: {e}", path.display()))
                })?;
                Some(DefectTable::from_json(&text).map_err(|e| {
                    usage(format!("bad defect table {}: {e}", path.display()))
                })?)
            }
            None => None,
        };

        Ok(Pipeline {
            cond,
            window,
            defects,
            times,
            planes: cfg.planes.unwrap_or_else(|| vec![SlicePlane::XY]),
            grid: cfg.grid,
            output_dir: over.output.clone().or(cfg.output_dir).unwrap_or_else(|| PathBuf::from(".")),
            format: over.format.or(cfg.format).unwrap_or(OutputFormat::Csv),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_strings_parse() {
        assert_eq!(parse_time_text("1/3 Tcl").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_time_text("0.5 Tcl").unwrap(), 0.5);
        assert_eq!(parse_time_text("  2 / 3 Tcl").unwrap(), 2.0 / 3.0);
        assert_eq!(parse_time_text("1Tcl").unwrap(), 1.0);
        assert!(parse_time_text("1/3").is_err());
        assert!(parse_time_text("x Tcl").is_err());
        assert!(parse_time_text("1/0 Tcl").is_err());
    }

    #[test]
    fn missing_field_is_named() {
        let err = serde_json::from_str::<RunConfig>(r#"{"n_bar": 45.0, "l3": 30}"#).unwrap_err();
        assert!(err.to_string().contains("delta_l3"), "{err}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = r#"{"n_bar": 45.0, "l3": 30, "delta_l3": 2.5, "wat": 1}"#;
        let err = serde_json::from_str::<RunConfig>(text).unwrap_err();
        assert!(err.to_string().contains("wat"), "{err}");
    }

    #[test]
    fn defaults_fill_in() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"n_bar": 45.0, "l3": 30, "delta_l3": 2.5}"#).unwrap();
        let pipe = Pipeline::from_config(cfg, &Overrides::default()).unwrap();
        assert_eq!(pipe.window.n_range(), (40, 50));
        assert_eq!(pipe.window.l_range(), (25, 35));
        assert_eq!(pipe.window.m_range(), (27, 30));
        assert_eq!(pipe.format, OutputFormat::Csv);
        assert_eq!(pipe.grid.resolution, 201);
        assert!(pipe.times.is_empty());
    }

    #[test]
    fn physical_bounds_are_config_errors() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"n_bar": 45.0, "l3": 50, "delta_l3": 2.5}"#).unwrap();
        match Pipeline::from_config(cfg, &Overrides::default()) {
            Err(Failure::Usage(m)) => assert!(m.contains("l3"), "{m}"),
            other => panic!("expected usage failure, got {other:?}"),
        }
    }
}
