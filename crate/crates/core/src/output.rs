//! Deterministic CSV / JSON emission.
//!
//! CSV files start with `#` comment lines echoing the resolved configuration
//! and the command parameters, then one header row. Floats are written as
//! `{:.16e}` (17 significant digits, round-trip exact); undefined values as
//! `nan`. Rows are ordered by `x`, then `y`, regardless of how they were
//! computed.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{deviation_density_map, deviation_profile, find_spikes_and_peaks, DeviationProfile};
use crate::bohmian::{integrate_trajectories, velocity_profile, StepControl};
use crate::error::Result;
use crate::model::{Config, DeviationReport, GridSpec, Termination};
use crate::propagators::Mode;

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), fmt_f64)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Classical => "classical",
        Mode::Full => "full",
    }
}

fn write_header<W: Write>(out: &mut W, command: &str, config: &Config, params: &[(&str, String)]) -> Result<()> {
    writeln!(out, "# slitpath {command}")?;
    for line in config.echo_lines() {
        writeln!(out, "# {line}")?;
    }
    for (k, v) in params {
        writeln!(out, "# {k} = {v}")?;
    }
    Ok(())
}

/// `y_m, v_y_mps, defined_flag` along the line at distance `x`.
pub fn write_velocity_csv<W: Write>(out: &mut W, config: &Config, x: f64, ys: &[f64], mode: Mode) -> Result<()> {
    let v = velocity_profile(config, x, ys, mode)?;
    write_header(
        out,
        "velocity",
        config,
        &[
            ("x_m", fmt_f64(x)),
            ("n", ys.len().to_string()),
            ("mode", mode_name(mode).to_string()),
        ],
    )?;
    writeln!(out, "y_m,v_y_mps,defined_flag")?;
    for (y, v) in ys.iter().zip(v) {
        writeln!(out, "{},{},{}", fmt_f64(*y), fmt_opt(v), u8::from(v.is_some()))?;
    }
    Ok(())
}

/// JSON body written next to a deviation CSV.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationSummary {
    pub x_m: f64,
    pub n: usize,
    #[serde(flatten)]
    pub report: DeviationReport,
    /// Largest relative deviation over all floor-defined samples (peaks and spike flanks).
    pub max_defined_relative_deviation: Option<f64>,
}

/// `y_m, v_yc, v_ync, abs_diff, rel_diff, defined_flag`, plus the JSON report.
pub fn write_deviation<W: Write, J: Write>(
    csv: &mut W,
    json: &mut J,
    config: &Config,
    x: f64,
    ys: &[f64],
) -> Result<DeviationSummary> {
    let profile = deviation_profile(config, x, ys)?;
    let report = find_spikes_and_peaks(&profile, profile.velocity_floor)?;
    write_header(csv, "deviation", config, &[("x_m", fmt_f64(x)), ("n", ys.len().to_string())])?;
    write_profile_rows(csv, &profile)?;
    let summary = DeviationSummary {
        x_m: x,
        n: ys.len(),
        report,
        max_defined_relative_deviation: profile.max_defined_relative(),
    };
    serde_json::to_writer_pretty(&mut *json, &summary).map_err(std::io::Error::from)?;
    writeln!(json)?;
    Ok(summary)
}

fn write_profile_rows<W: Write>(csv: &mut W, profile: &DeviationProfile) -> Result<()> {
    writeln!(csv, "y_m,v_yc,v_ync,abs_diff,rel_diff,defined_flag")?;
    for s in &profile.samples {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_f64(s.y),
            fmt_opt(s.v_classical),
            fmt_opt(s.v_full),
            fmt_opt(s.abs_diff),
            fmt_opt(s.rel_diff),
            u8::from(s.defined)
        )?;
    }
    Ok(())
}

/// Long-format map: `x_m, y_m, rel_diff, flag`.
pub fn write_map_csv<W: Write>(out: &mut W, config: &Config, grid: &GridSpec) -> Result<()> {
    let map = deviation_density_map(config, grid)?;
    write_header(
        out,
        "map",
        config,
        &[
            ("x_min_m", fmt_f64(grid.x_min)),
            ("x_max_m", fmt_f64(grid.x_max)),
            ("nx", grid.nx.to_string()),
            ("y_min_m", fmt_f64(grid.y_min)),
            ("y_max_m", fmt_f64(grid.y_max)),
            ("ny", grid.ny.to_string()),
        ],
    )?;
    writeln!(out, "x_m,y_m,rel_diff,flag")?;
    let ys = grid.ys();
    for (ix, x) in grid.xs().into_iter().enumerate() {
        for (iy, y) in ys.iter().enumerate() {
            let k = grid.index(ix, iy);
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(x),
                fmt_f64(*y),
                fmt_f64(map.rel_diff[k]),
                u8::from(map.defined[k])
            )?;
        }
    }
    Ok(())
}

/// One `x_m, y_m` block per start, separated by `# trajectory` comment lines.
pub fn write_trajectories_csv<W: Write>(
    out: &mut W,
    config: &Config,
    starts: &[f64],
    x_range: (f64, f64),
    control: &StepControl,
    mode: Mode,
) -> Result<()> {
    let trajectories = integrate_trajectories(config, starts, x_range, control, mode)?;
    let list = starts.iter().map(|s| fmt_f64(*s)).collect::<Vec<_>>().join(", ");
    write_header(
        out,
        "trajectories",
        config,
        &[
            ("starts_m", list),
            ("x_start_m", fmt_f64(x_range.0)),
            ("x_end_m", fmt_f64(x_range.1)),
            ("samples", control.output_points.to_string()),
            ("mode", mode_name(mode).to_string()),
        ],
    )?;
    for (i, (start, traj)) in starts.iter().zip(&trajectories).enumerate() {
        let status = match traj.termination {
            Termination::Completed => "completed".to_string(),
            Termination::UndefinedDensity { x } => format!("stopped at undefined density, x = {}", fmt_f64(x)),
        };
        writeln!(out, "# trajectory {i} y_start = {} ({status})", fmt_f64(*start))?;
        writeln!(out, "x_m,y_m")?;
        for (x, y) in &traj.samples {
            writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*y))?;
        }
    }
    Ok(())
}
