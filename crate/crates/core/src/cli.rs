//! `slitpath` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bohmian::StepControl;
use crate::config::{default_config, load_config};
use crate::error::{Error, Result};
use crate::model::{linspace, Config, GridSpec};
use crate::output::{write_deviation, write_map_csv, write_trajectories_csv, write_velocity_csv};
use crate::propagators::Mode;
use crate::selftest::run_selftest;

#[derive(Debug, Parser)]
#[command(name = "slitpath", version, about = "Nonclassical-path corrections to Bohmian velocities behind Gaussian slits")]
pub struct Cli {
    /// Configuration file (`key = value`). Without it the built-in
    /// three-slit defaults are used.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Classical,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LineArgs {
    /// Grating-to-detector distance, m. Defaults to `x_detector_m`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, default_value_t = -1.2e-6, allow_hyphen_values = true)]
    pub ymin: f64,
    #[arg(long, default_value_t = 1.2e-6, allow_hyphen_values = true)]
    pub ymax: f64,
    #[arg(long, default_value_t = 2001)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bohmian y-velocity along a detector line.
    Velocity {
        #[command(flatten)]
        line: LineArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Classical)]
        mode: ModeArg,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical vs full velocity deviation profile and spike/peak report.
    Deviation {
        #[command(flatten)]
        line: LineArgs,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report; defaults to the CSV path with a `.json` extension,
        /// or stderr when writing the CSV to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Relative deviation over an (x, y) grid, long format.
    Map {
        #[arg(long, default_value_t = 1e-3)]
        xmin: f64,
        #[arg(long, default_value_t = 1e-2)]
        xmax: f64,
        #[arg(long, default_value_t = 100)]
        nx: usize,
        #[arg(long, default_value_t = -1.2e-6, allow_hyphen_values = true)]
        ymin: f64,
        #[arg(long, default_value_t = 1.2e-6, allow_hyphen_values = true)]
        ymax: f64,
        /// Nodes along y.
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bohmian trajectories from a list of starting heights.
    Trajectories {
        /// Comma-separated starting y values, m.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        starts: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        xmin: f64,
        /// Defaults to `x_detector_m`.
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Output samples per trajectory.
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reduced oracle suite and report pass/fail per check.
    Selftest,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn line_samples(config: &Config, line: &LineArgs) -> Result<(f64, Vec<f64>)> {
    let x = line.x.unwrap_or(config.geometry().detector_distance);
    if !(line.ymax > line.ymin) || line.n < 2 {
        let mut err = crate::error::ValidationError::default();
        err.push("ymin/ymax/n", format!("{:e}..{:e} x {}", line.ymin, line.ymax, line.n), "need ymax > ymin and n >= 2");
        return Err(err.into());
    }
    Ok((x, linspace(line.ymin, line.ymax, line.n)))
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => default_config(),
    };
    match cli.command {
        Command::Velocity { line, mode, out } => {
            let (x, ys) = line_samples(&config, &line)?;
            let mut w = open_out(out.as_deref())?;
            write_velocity_csv(&mut w, &config, x, &ys, mode.into())?;
            w.flush()?;
        }
        Command::Deviation { line, out, report } => {
            let (x, ys) = line_samples(&config, &line)?;
            let report_path = report.or_else(|| out.as_ref().map(|p| p.with_extension("json")));
            let mut csv = open_out(out.as_deref())?;
            let mut json: Box<dyn Write> = match &report_path {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(io::stderr().lock()),
            };
            write_deviation(&mut csv, &mut json, &config, x, &ys)?;
            csv.flush()?;
            json.flush()?;
        }
        Command::Map { xmin, xmax, nx, ymin, ymax, n, out } => {
            let grid = GridSpec::new((xmin, xmax), (ymin, ymax), nx, n)?;
            let mut w = open_out(out.as_deref())?;
            write_map_csv(&mut w, &config, &grid)?;
            w.flush()?;
        }
        Command::Trajectories { starts, xmin, xmax, mode, samples, out } => {
            let xmax = xmax.unwrap_or(config.geometry().detector_distance);
            let control = StepControl {
                output_points: samples,
                ..StepControl::default()
            };
            let mut w = open_out(out.as_deref())?;
            write_trajectories_csv(&mut w, &config, &starts, (xmin, xmax), &control, mode.into())?;
            w.flush()?;
        }
        Command::Selftest => {
            let checks = run_selftest(&config)?;
            let mut failed = 0;
            for c in &checks {
                println!("{c}");
                if !c.passed() {
                    failed += 1;
                }
            }
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Err(Error::Domain(format!("{failed} self-test check(s) failed")));
            }
        }
    }
    Ok(())
}
