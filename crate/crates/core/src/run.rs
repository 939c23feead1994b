//! Subcommand execution and result files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};
use toml::Value;

use crate::calibration::{calibrate_with, CalibrationOptions};
use crate::config::{LoadedConfig, SpectrumModel};
use crate::drive::DriveConfig;
use crate::error::{Error, Result};
use crate::io::{csv, round_sig, write_file, FORMAT_VERSION};
use crate::scenarios::{group_delay_estimate, run_slow_light, run_slp, run_storage, ScenarioResult};
use crate::solver::{snapshot_csv, SimulationGrid};
use crate::spectra::{find_peak, spectrum_csv, transmission_homogeneous, transmission_inhomogeneous, DetuningGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Calibrate,
    Slowlight,
    Storage,
    Slp,
    Sweep,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "spectrum" => Command::Spectrum,
            "calibrate" => Command::Calibrate,
            "slowlight" => Command::Slowlight,
            "storage" => Command::Storage,
            "slp" => Command::Slp,
            "sweep" => Command::Sweep,
            other => return Err(Error::invalid("sweep.command", format!("unknown command `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Calibrate => "calibrate",
            Command::Slowlight => "slowlight",
            Command::Storage => "storage",
            Command::Slp => "slp",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output.snapshot_stride`.
    pub snapshot_stride: Option<usize>,
    /// Worker threads for sweeps and the solver; `None` lets rayon decide.
    pub threads: Option<usize>,
}

/// What a command produced, for the terminal summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Json,
    pub warnings: Vec<String>,
}

/// Runs `command` on the configuration and writes its files into `out`.
pub fn execute(command: Command, loaded: &LoadedConfig, out: &Path, opts: &RunOptions) -> Result<Outcome> {
    match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?
            .install(|| dispatch(command, loaded, out, opts)),
        None => dispatch(command, loaded, out, opts),
    }
}

fn dispatch(command: Command, loaded: &LoadedConfig, out: &Path, opts: &RunOptions) -> Result<Outcome> {
    match command {
        Command::Spectrum => spectrum(loaded, out),
        Command::Calibrate => calibrate(loaded, out),
        Command::Slowlight | Command::Storage | Command::Slp => scenario(command, loaded, out, opts),
        Command::Sweep => sweep(loaded, out, opts),
    }
}

fn missing(section: &str) -> Error {
    Error::Config(format!("missing [{section}] section"))
}

fn rounded(value: Json) -> Json {
    match value {
        Json::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => json!(round_sig(x)),
            _ => Json::Number(n),
        },
        Json::Array(v) => Json::Array(v.into_iter().map(rounded).collect()),
        Json::Object(m) => Json::Object(m.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn write_json(path: &Path, value: Json) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&rounded(value))?;
    text.push('\n');
    write_file(path, &text)
}

/// Writes `resolved_config.toml` and returns the resolved document as JSON.
fn write_resolved(loaded: &LoadedConfig, out: &Path, extra: &[(&str, Value)]) -> Result<(PathBuf, Json)> {
    let text = loaded.resolved_toml(extra)?;
    let path = out.join("resolved_config.toml");
    write_file(&path, &text)?;
    let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
    let mut json = serde_json::to_value(&table)?;
    if let Json::Object(m) = &mut json {
        m.remove("provenance");
    }
    Ok((path, json))
}

fn spectrum(loaded: &LoadedConfig, out: &Path) -> Result<Outcome> {
    let cfg = &loaded.config;
    let spec = cfg.spectrum.as_ref().ok_or_else(|| missing("spectrum"))?;
    let scheme = cfg.scheme()?;
    let medium = cfg.medium()?;
    let drive = DriveConfig::cw(spec.omega_c, spec.delta_c, 0.0);
    let grid = DetuningGrid {
        center: spec.center,
        half_span: spec.half_span,
        points: spec.points,
    };
    let rows = match spec.model {
        SpectrumModel::Homogeneous => {
            let drive = cfg.effective.scale(&drive)?;
            grid.values()
                .into_iter()
                .map(|dp| Ok((dp, transmission_homogeneous(dp, &medium, &drive, &scheme)?)))
                .collect::<Result<Vec<_>>>()?
        }
        SpectrumModel::Inhomogeneous => grid
            .values()
            .par_iter()
            .map(|&dp| {
                Ok((
                    dp,
                    transmission_inhomogeneous(dp, &medium, &drive, &scheme, &spec.quadrature)?.transmission,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let path = out.join("spectrum.csv");
    write_file(&path, &spectrum_csv(&rows))?;
    let (resolved, _) = write_resolved(loaded, out, &[])?;
    let (peak_at, peak) = rows
        .iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |b, r| if r.1 > b.1 { *r } else { b });
    Ok(Outcome {
        files: vec![path, resolved],
        summary: json!({ "points": rows.len(), "max_transmission": peak, "max_at": peak_at }),
        warnings: Vec::new(),
    })
}

fn calibrate(loaded: &LoadedConfig, out: &Path) -> Result<Outcome> {
    let cfg = &loaded.config;
    let section = cfg.calibration.as_ref().ok_or_else(|| missing("calibration"))?;
    let scheme = cfg.scheme()?;
    let medium = cfg.medium()?;
    let drive = DriveConfig::cw(section.omega_c, section.delta_c, 0.0);
    let opts = CalibrationOptions::default();
    let stark = scheme.stark_shift_single(section.omega_c, section.delta_c)?;
    let guess = section.delta_c + stark;
    let (center, _) = find_peak(
        |dp| Ok(transmission_inhomogeneous(dp, &medium, &drive, &scheme, &opts.quadrature)?.transmission),
        guess - 4.0,
        guess + 4.0,
    )?;
    let grid = DetuningGrid {
        center,
        half_span: section.half_span,
        points: section.points,
    };
    let outcome = calibrate_with(&medium, &drive, &scheme, &grid, &opts)?;
    let p = outcome.params;
    let (hom_medium, hom_drive) = p.apply(&medium, &drive);
    let rows = outcome
        .target
        .iter()
        .map(|&(dp, t)| Ok([dp, t, transmission_homogeneous(dp, &hom_medium, &hom_drive, &scheme)?]))
        .collect::<Result<Vec<_>>>()?;
    let csv_path = out.join("calibration.csv");
    write_file(
        &csv_path,
        &csv(
            &[
                "delta_p_over_gamma",
                "transmission_inhomogeneous",
                "transmission_effective",
            ],
            rows.iter().map(|r| r.as_slice()),
        ),
    )?;
    let (resolved_path, resolved) = write_resolved(loaded, out, &[])?;
    let summary = json!({
        "beta": p.beta,
        "gamma_inh": p.gamma_inh,
        "residual": p.residual,
        "grid": grid,
    });
    let json_path = out.join("calibration.json");
    write_json(
        &json_path,
        json!({
            "format_version": FORMAT_VERSION,
            "command": "calibrate",
            "result": summary,
            "history": outcome.history,
            "config": resolved,
        }),
    )?;
    Ok(Outcome {
        files: vec![json_path, csv_path, resolved_path],
        summary,
        warnings: Vec::new(),
    })
}

/// Run length long enough for the retrieved or delayed pulse to leave.
pub fn auto_t_end(command: Command, loaded: &LoadedConfig) -> Option<f64> {
    let cfg = &loaded.config;
    let scheme = cfg.scheme().ok()?;
    let beta = cfg.effective.beta;
    let od = cfg.medium.od;
    let tail = |omega: f64, fwhm: f64| 3.0 * group_delay_estimate(od, beta * omega, &scheme).max(fwhm);
    match command {
        Command::Slowlight => cfg
            .slowlight
            .map(|s| s.pulse.center + group_delay_estimate(od, beta * s.omega_c, &scheme) + 4.0 * s.pulse.fwhm),
        Command::Storage => cfg
            .storage
            .map(|s| s.retrieval_start() + s.ramp + tail(s.omega_c, s.pulse.fwhm)),
        Command::Slp => cfg.slp.map(|s| s.backward_off + tail(s.omega_c_plus, s.pulse.fwhm)),
        _ => None,
    }
}

/// Grid used for a time-domain command, with `t_end` filled in when the
/// configuration leaves it out.
pub fn scenario_grid(command: Command, loaded: &LoadedConfig) -> (SimulationGrid, Option<f64>) {
    let mut grid: SimulationGrid = loaded.config.grid.clone();
    let mut auto = None;
    if !loaded.is_set("grid.t_end") {
        if let Some(t) = auto_t_end(command, loaded) {
            grid.t_end = round_sig(t);
            auto = Some(grid.t_end);
        }
    }
    grid.snapshot_stride = loaded.config.output.snapshot_stride;
    (grid, auto)
}

/// Runs a time-domain scenario with the effective control scale applied.
pub fn run_scenario(command: Command, loaded: &LoadedConfig, grid: &SimulationGrid) -> Result<ScenarioResult> {
    let cfg = &loaded.config;
    let scheme = cfg.scheme()?;
    let medium = cfg.medium()?;
    let beta = cfg.effective.beta;
    match command {
        Command::Slowlight => {
            let mut s = cfg.slowlight.ok_or_else(|| missing("slowlight"))?;
            s.omega_c *= beta;
            run_slow_light(&s, &medium, &scheme, grid)
        }
        Command::Storage => {
            let mut s = cfg.storage.ok_or_else(|| missing("storage"))?;
            s.omega_c *= beta;
            run_storage(&s, &medium, &scheme, grid)
        }
        Command::Slp => {
            let mut s = cfg.slp.ok_or_else(|| missing("slp"))?;
            s.omega_c_plus *= beta;
            s.omega_c_minus *= beta;
            run_slp(&s, &medium, &scheme, grid)
        }
        other => Err(Error::Config(format!(
            "`{}` is not a time-domain command",
            other.name()
        ))),
    }
}

fn scenario(command: Command, loaded: &LoadedConfig, out: &Path, opts: &RunOptions) -> Result<Outcome> {
    let (mut grid, auto) = scenario_grid(command, loaded);
    let extra: Vec<(&str, Value)> = auto.map(|t| ("grid.t_end", Value::Float(t))).into_iter().collect();
    if let Some(s) = opts.snapshot_stride {
        grid.snapshot_stride = s;
    }
    let result = run_scenario(command, loaded, &grid)?;
    let mut files = Vec::new();
    let record = result.record.as_ref().expect("scenario keeps its record");
    let trace = out.join("trace.csv");
    write_file(&trace, &record.to_csv())?;
    files.push(trace);
    if !record.snapshots.is_empty() {
        let dir = out.join("snapshots");
        for (i, snap) in record.snapshots.iter().enumerate() {
            let path = dir.join(format!("snapshot_{i:05}.csv"));
            write_file(&path, &snapshot_csv(snap))?;
        }
        files.push(dir);
    }
    let (resolved_path, resolved) = write_resolved(loaded, out, &extra)?;
    let summary = serde_json::to_value(&result)?;
    let path = out.join("result.json");
    write_json(
        &path,
        json!({
            "format_version": FORMAT_VERSION,
            "command": command.name(),
            "result": summary,
            "config": resolved,
        }),
    )?;
    files.insert(0, path);
    files.push(resolved_path);
    Ok(Outcome {
        files,
        summary: rounded(summary),
        warnings: result.warnings.clone(),
    })
}

/// Cartesian product of the axis values, first axis slowest.
fn tuples(axes: &[crate::config::SweepAxis]) -> Vec<Vec<(String, Value)>> {
    let mut acc: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    for axis in axes {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push((axis.param.clone(), v.clone()));
                    t
                })
            })
            .collect();
    }
    acc
}

fn sweep(loaded: &LoadedConfig, out: &Path, opts: &RunOptions) -> Result<Outcome> {
    let section = loaded.config.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
    let command = Command::parse(&section.command)?;
    if command == Command::Sweep {
        return Err(Error::invalid("sweep.command", "sweeps cannot nest"));
    }
    let runs = tuples(&section.axes)
        .into_iter()
        .map(|params| {
            let mut cfg = loaded.clone();
            for (path, v) in &params {
                cfg = cfg.with_override(path, v.clone())?;
            }
            Ok((params, cfg))
        })
        .collect::<Result<Vec<_>>>()?;
    let inner = RunOptions {
        threads: None,
        ..opts.clone()
    };
    let outcomes: Vec<Result<Outcome>> = runs
        .par_iter()
        .enumerate()
        .map(|(i, (_, cfg))| execute_inner(command, cfg, &out.join(format!("run_{i:04}")), &inner))
        .collect();

    let mut entries = Vec::with_capacity(runs.len());
    let mut warnings = Vec::new();
    let mut failed = None;
    for (i, ((params, _), outcome)) in runs.iter().zip(outcomes).enumerate() {
        let params: serde_json::Map<String, Json> = params
            .iter()
            .map(|(k, v)| Ok((k.clone(), serde_json::to_value(v)?)))
            .collect::<Result<_>>()?;
        let mut entry = json!({ "run": format!("run_{i:04}"), "params": params });
        match outcome {
            Ok(o) => {
                entry["result"] = o.summary;
                warnings.extend(o.warnings.into_iter().map(|w| format!("run_{i:04}: {w}")));
            }
            Err(e) => {
                entry["error"] = json!(e.to_string());
                failed.get_or_insert(e);
            }
        }
        entries.push(entry);
    }
    let index = out.join("index.json");
    write_json(
        &index,
        json!({
            "format_version": FORMAT_VERSION,
            "command": command.name(),
            "runs": entries,
        }),
    )?;
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(Outcome {
        files: vec![index],
        summary: json!({ "runs": entries.len() }),
        warnings,
    })
}

fn execute_inner(command: Command, loaded: &LoadedConfig, out: &Path, opts: &RunOptions) -> Result<Outcome> {
    std::fs::create_dir_all(out)?;
    dispatch(command, loaded, out, opts)
}
