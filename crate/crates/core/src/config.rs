//! Flat `key = value` configuration files.
//!
//! ```text
//! # comment
//! L_m = 0.01
//! slit_centers_m = -1e-6, 0, 1e-6
//! include_nonclassical = true
//! ```
//!
//! `L_m`, `x_detector_m`, `V_x_mps`, `slit_centers_m` and `slit_half_width_b_m`
//! are mandatory; every other key falls back to [`Settings::default`] or the
//! CODATA constants.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    validate_config_with, Config, ExperimentGeometry, HopPrefactor, PhysicalConstants, Settings, SlitArray,
};

const MANDATORY: [&str; 5] = [
    "L_m",
    "x_detector_m",
    "V_x_mps",
    "slit_centers_m",
    "slit_half_width_b_m",
];

const OPTIONAL: [&str; 9] = [
    "hbar",
    "electron_mass",
    "fd_step_m",
    "density_floor_rel",
    "velocity_floor_rel",
    "include_nonclassical",
    "quadrature_tol",
    "quadrature_depth",
    "eq9_literal_prefactor",
];

pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config(&text)
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_error(line_no, None, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        if !MANDATORY.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(parse_error(line_no, Some(key), "unknown key"));
        }
        if entries.insert(key, (line_no, value)).is_some() {
            return Err(parse_error(line_no, Some(key), "duplicate key"));
        }
    }
    if let Some(missing) = MANDATORY.iter().find(|k| !entries.contains_key(*k)) {
        return Err(Error::Parse {
            line: None,
            key: Some(missing.to_string()),
            message: "missing mandatory key".to_string(),
        });
    }

    let number = |key: &str| -> Result<Option<f64>> {
        entries
            .get(key)
            .map(|&(line, v)| parse_f64(v).ok_or_else(|| parse_error(line, Some(key), &format!("malformed number `{v}`"))))
            .transpose()
    };
    let flag = |key: &str| -> Result<Option<bool>> {
        entries
            .get(key)
            .map(|&(line, v)| match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(parse_error(line, Some(key), &format!("expected `true` or `false`, got `{v}`"))),
            })
            .transpose()
    };
    let mandatory = |key: &str| -> Result<f64> { number(key).map(|v| v.expect("checked above")) };

    let defaults = PhysicalConstants::default();
    let constants = PhysicalConstants {
        hbar: number("hbar")?.unwrap_or(defaults.hbar),
        electron_mass: number("electron_mass")?.unwrap_or(defaults.electron_mass),
    };
    let geometry = ExperimentGeometry {
        source_distance: mandatory("L_m")?,
        detector_distance: mandatory("x_detector_m")?,
        longitudinal_velocity: mandatory("V_x_mps")?,
    };
    let (centers_line, centers_text) = entries["slit_centers_m"];
    let centers = centers_text
        .split(',')
        .map(|s| {
            parse_f64(s.trim()).ok_or_else(|| {
                parse_error(centers_line, Some("slit_centers_m"), &format!("malformed number `{}`", s.trim()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slits = SlitArray::new(centers, mandatory("slit_half_width_b_m")?);

    let mut settings = Settings::default();
    if let Some(v) = number("fd_step_m")? {
        settings.fd_step = v;
    }
    if let Some(v) = number("density_floor_rel")? {
        settings.density_floor_rel = v;
    }
    if let Some(v) = number("velocity_floor_rel")? {
        settings.velocity_floor_rel = v;
    }
    if let Some(v) = flag("include_nonclassical")? {
        settings.include_nonclassical = v;
    }
    if let Some(v) = number("quadrature_tol")? {
        settings.quadrature.tolerance = v;
    }
    if let Some(&(line, v)) = entries.get("quadrature_depth") {
        settings.quadrature.max_depth = v
            .parse()
            .map_err(|_| parse_error(line, Some("quadrature_depth"), &format!("expected an integer, got `{v}`")))?;
    }
    if let Some(true) = flag("eq9_literal_prefactor")? {
        settings.hop_prefactor = HopPrefactor::Literal;
    }

    Ok(validate_config_with(constants, geometry, slits, settings)?)
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_error(line: usize, key: Option<&str>, message: &str) -> Error {
    Error::Parse {
        line: Some(line),
        key: key.map(str::to_string),
        message: message.to_string(),
    }
}

/// Three-slit defaults used by the CLI when no config file is given.
pub const DEFAULT_CONFIG: &str = "\
L_m = 0.01
x_detector_m = 0.01
V_x_mps = 1.3e8
slit_centers_m = -1e-6, 0, 1e-6
slit_half_width_b_m = 0.5e-7
";

pub fn default_config() -> Config {
    parse_config(DEFAULT_CONFIG).expect("built-in defaults are valid")
}
