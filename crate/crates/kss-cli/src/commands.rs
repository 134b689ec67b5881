//! Subcommand dispatch: each pipeline command loads the shared run
//! configuration, fits the packet, and emits its artifact under the output
//! directory. The control flow here is single-threaded; parallelism lives
//! inside the library calls.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kss::packet::{
    density_slice, expand, expectation_r_t, fit_params, kss_energy, orbit_geometry, CoeffTable,
    GridAxis, KssState, OrbitGeometry,
};
use kss::qdt::{fit_params_qdt, sqdt_expand};
use kss::angular::sss_expectations;
use num_complex::Complex64;

use crate::config::{OutputFormat, Overrides, Pipeline};
use crate::emit::{
    plane_tag, write_evolve_csv, write_evolve_json, write_expand_csv, write_expand_json,
    write_slice_csv, write_slice_json, EvolveRow,
};
use crate::report::FitReport;
use crate::{checks, numerical, Failure};

#[derive(Debug, Parser)]
#[command(name = "kss", version, about = "Squeezed-state wave packets on Kepler orbits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the five packet parameters and write a JSON report
    Fit(RunArgs),
    /// Expand the fitted packet over the eigenstate window
    Expand(RunArgs),
    /// Track the mean radius over the configured times
    Evolve(RunArgs),
    /// Write density maps for each configured plane and time
    Slice(RunArgs),
    /// Re-measure the library invariants at desk scale
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory, overriding the config
    #[arg(long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// File format, overriding the config
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Quantum defect table, overriding the config
    #[arg(long, value_name = "PATH")]
    pub defects: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Restrict to one module: angular, radial, packet, or qdt
    #[arg(long, value_name = "MODULE")]
    pub only: Option<String>,
    /// Force a named fault to exercise the failure path
    #[arg(long, hide = true, value_name = "NAME")]
    pub inject: Option<String>,
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fit(args) => cmd_fit(&load(&args)?),
        Command::Expand(args) => cmd_expand(&load(&args)?),
        Command::Evolve(args) => cmd_evolve(&load(&args)?),
        Command::Slice(args) => cmd_slice(&load(&args)?),
        Command::Check(args) => cmd_check(&args),
    }
}

fn load(args: &RunArgs) -> Result<Pipeline, Failure> {
    let over = Overrides {
        output: args.output.clone(),
        format: args.format,
        defects: args.defects.clone(),
    };
    Pipeline::load(&args.config, &over)
}

/// Fitted state plus the orbit of the effective quantum number (defect
/// shifted when a table is present).
struct Fitted {
    state: KssState,
    geo: OrbitGeometry,
    n_eff: f64,
}

fn fit_stage(pipe: &Pipeline) -> Result<Fitted, Failure> {
    let state = match &pipe.defects {
        Some(table) => {
            if !table.covers(pipe.cond.l3_target()) {
                eprintln!(
                    "warning: defect table has no entry for l = {}; the fit treats it as 0",
                    pipe.cond.l3_target()
                );
            }
            fit_params_qdt(&pipe.cond, table).map_err(numerical)?
        }
        None => fit_params(&pipe.cond).map_err(numerical)?,
    };
    let defect = pipe.defects.as_ref().map_or(0.0, |t| t.defect(pipe.cond.l3_target()));
    let n_eff = pipe.cond.n_bar() - defect;
    let l_sq = sss_expectations(&state.sss).map_err(numerical)?.l_sq;
    let geo = orbit_geometry(n_eff, l_sq).map_err(numerical)?;
    Ok(Fitted { state, geo, n_eff })
}

fn expand_stage(pipe: &Pipeline, fitted: &Fitted) -> Result<CoeffTable, Failure> {
    match &pipe.defects {
        Some(table) => {
            let missing = table.missing_in(&pipe.window);
            if !missing.is_empty() {
                let list: Vec<String> = missing.iter().map(u32::to_string).collect();
                eprintln!(
                    "warning: no defect listed for l = {}; those channels stay hydrogenic",
                    list.join(", ")
                );
            }
            sqdt_expand(&fitted.state, &pipe.window, table).map_err(numerical)
        }
        None => expand(&fitted.state, &pipe.window).map_err(numerical),
    }
}

fn ensure_output_dir(pipe: &Pipeline) -> Result<(), Failure> {
    fs::create_dir_all(&pipe.output_dir).map_err(|e| {
        Failure::Usage(format!("cannot create output dir {}: {e}", pipe.output_dir.display()))
    })
}

fn write_failed(path: &Path, err: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {err}", path.display()))
}

fn cmd_fit(pipe: &Pipeline) -> Result<(), Failure> {
    let fitted = fit_stage(pipe)?;
    let energy = kss_energy(&fitted.state).map_err(numerical)?;
    let l_sq = sss_expectations(&fitted.state.sss).map_err(numerical)?.l_sq;
    let report = FitReport {
        alpha: fitted.state.rss.alpha(),
        beta: fitted.state.sss.beta(),
        gamma0: fitted.state.rss.gamma0(),
        gamma1: fitted.state.rss.gamma1(),
        delta: fitted.state.sss.delta(),
        r_out: fitted.geo.r_out,
        r_in: fitted.geo.r_in,
        t_cl_au: fitted.geo.t_cl,
        l_sq,
        energy,
        n_star: pipe.defects.is_some().then_some(fitted.n_eff),
        e_n_star: pipe
            .defects
            .is_some()
            .then(|| -0.5 / (fitted.n_eff * fitted.n_eff)),
    };
    ensure_output_dir(pipe)?;
    let path = pipe.output_dir.join("fit_report.json");
    fs::write(&path, report.emit()).map_err(|e| write_failed(&path, e))?;
    print!("{}", report.table());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_expand(pipe: &Pipeline) -> Result<(), Failure> {
    let fitted = fit_stage(pipe)?;
    let table = expand_stage(pipe, &fitted)?;
    ensure_output_dir(pipe)?;
    let (path, write): (PathBuf, fn(&Path, &CoeffTable) -> std::io::Result<()>) = match pipe.format
    {
        OutputFormat::Csv => (pipe.output_dir.join("coefficients.csv"), write_expand_csv),
        OutputFormat::Json => (pipe.output_dir.join("coefficients.json"), write_expand_json),
    };
    write(&path, &table).map_err(|e| write_failed(&path, e))?;
    println!(
        "expanded {} combinations, captured norm {:.6}",
        table.entries().len() + table.excluded(),
        table.captured_norm()
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_evolve(pipe: &Pipeline) -> Result<(), Failure> {
    if pipe.times.is_empty() {
        return Err(Failure::Usage("times must be nonempty for evolve runs".into()));
    }
    let fitted = fit_stage(pipe)?;
    let table = expand_stage(pipe, &fitted)?;
    let norm0: f64 = table.entries().iter().map(|e| e.amp.norm_sqr()).sum();
    let mut rows = Vec::with_capacity(pipe.times.len());
    for spec in &pipe.times {
        let t = spec.at(fitted.geo.t_cl);
        let r_mean = expectation_r_t(&table, t).map_err(numerical)?;
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
        rows.push(EvolveRow { t, r_mean, norm: norm_t / norm0, energy: weighted / norm_t });
    }
    ensure_output_dir(pipe)?;
    let path = match pipe.format {
        OutputFormat::Csv => pipe.output_dir.join("evolution.csv"),
        OutputFormat::Json => pipe.output_dir.join("evolution.json"),
    };
    match pipe.format {
        OutputFormat::Csv => write_evolve_csv(&path, &rows),
        OutputFormat::Json => write_evolve_json(&path, &rows),
    }
    .map_err(|e| write_failed(&path, e))?;
    println!("wrote {} ({} samples)", path.display(), rows.len());
    Ok(())
}

fn cmd_slice(pipe: &Pipeline) -> Result<(), Failure> {
    if pipe.times.is_empty() {
        return Err(Failure::Usage("times must be nonempty for slice runs".into()));
    }
    if pipe.planes.is_empty() {
        return Err(Failure::Usage("planes must be nonempty for slice runs".into()));
    }
    let fitted = fit_stage(pipe)?;
    let table = expand_stage(pipe, &fitted)?;
    let extent = pipe.grid.extent.unwrap_or(1.2 * fitted.geo.r_out);
    let axis =
        GridAxis::new(-extent, extent, pipe.grid.resolution).map_err(|e| Failure::Usage(e.to_string()))?;
    ensure_output_dir(pipe)?;
    for &plane in &pipe.planes {
        for (idx, spec) in pipe.times.iter().enumerate() {
            let t = spec.at(fitted.geo.t_cl);
            let grid = density_slice(&table, plane, axis, axis, t).map_err(numerical)?;
            let ext = match pipe.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            let path = pipe.output_dir.join(format!("slice_{}_t{idx}.{ext}", plane_tag(plane)));
            match pipe.format {
                OutputFormat::Csv => write_slice_csv(&path, &grid),
                OutputFormat::Json => write_slice_json(&path, &grid),
            }
            .map_err(|e| write_failed(&path, e))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<(), Failure> {
    let outcomes = checks::run_checks(args.only.as_deref(), args.inject.as_deref())?;
    let mut failed = 0usize;
    for c in &outcomes {
        println!("{} {} {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.measured);
        failed += usize::from(!c.pass);
    }
    println!("check: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        return Err(Failure::Validation(format!("{failed} check(s) failed")));
    }
    Ok(())
}
