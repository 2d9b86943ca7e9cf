//! Physical inputs, validated configuration, grids and result containers.
//!
//! All quantities are SI. Once a [`Config`] has been produced by
//! [`validate_config`] it is immutable and can be shared freely between
//! worker threads.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result, ValidationError};
use crate::quadrature::QuadratureSettings;

/// A point in the propagation plane: `x` is the distance past the grating,
/// `y` the transverse coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Electron mass, kg.
    pub electron_mass: f64,
}

impl PhysicalConstants {
    pub const CODATA_HBAR: f64 = 1.054_571_817e-34;
    pub const CODATA_ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

    /// `m / hbar` in s/m^2, the coefficient that turns `length^2 / time` into a phase.
    pub fn mass_over_hbar(&self) -> f64 {
        self.electron_mass / self.hbar
    }

    pub fn hbar_over_mass(&self) -> f64 {
        self.hbar / self.electron_mass
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: Self::CODATA_HBAR,
            electron_mass: Self::CODATA_ELECTRON_MASS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentGeometry {
    /// Source to grating distance `L`, m.
    pub source_distance: f64,
    /// Grating to detector distance used for 1-D profiles, m.
    pub detector_distance: f64,
    /// Longitudinal speed `V_x`, m/s.
    pub longitudinal_velocity: f64,
}

impl ExperimentGeometry {
    /// Flight time from source to grating, `T = L / V_x`.
    pub fn source_time(&self) -> f64 {
        self.source_distance / self.longitudinal_velocity
    }

    /// Flight time from the grating to a plane at distance `x`.
    pub fn time_of(&self, x: f64) -> f64 {
        x / self.longitudinal_velocity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlitArray {
    /// Slit centres, strictly increasing, m.
    pub centers: Vec<f64>,
    /// Gaussian half-width `b` of the transmission `exp(-dy^2 / (2 b^2))`, m.
    pub half_width: f64,
}

impl SlitArray {
    pub fn new(centers: Vec<f64>, half_width: f64) -> Self {
        SlitArray {
            centers,
            half_width,
        }
    }

    /// Centres are mirror-symmetric about `y = 0` (to 1e-15 of the largest offset).
    pub fn is_symmetric(&self) -> bool {
        let n = self.centers.len();
        let scale = self
            .centers
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        (0..n).all(|i| (self.centers[i] + self.centers[n - 1 - i]).abs() <= 1e-15 * scale)
    }

    /// Ordered pairs `(i, j)`, `i != j`, of slit centres.
    pub fn ordered_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.centers.iter().enumerate().flat_map(move |(a, &ci)| {
            self.centers
                .iter()
                .enumerate()
                .filter(move |(c, _)| *c != a)
                .map(move |(_, &cj)| (ci, cj))
        })
    }
}

/// Prefactor used for the slit-to-slit hop kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HopPrefactor {
    /// `(2 pi i hbar tau / m)^(-1/2)`: a free propagator over the hop time.
    FreePropagator,
    /// `(2 pi hbar T / m)^(-1/2)`: the source flight time, no factor of `i`.
    Literal,
}

/// Numerical knobs and model switches. Defaults are the values used by the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Central-difference step for `d/dy`, m.
    pub fd_step: f64,
    /// Velocity is undefined where `|Psi|^2` is below this fraction of the reference density.
    pub density_floor_rel: f64,
    /// Relative deviation is undefined where `|v_c|` is below this fraction of the line maximum.
    pub velocity_floor_rel: f64,
    pub include_nonclassical: bool,
    pub hop_prefactor: HopPrefactor,
    pub quadrature: QuadratureSettings,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            fd_step: 1e-11,
            density_floor_rel: 1e-12,
            velocity_floor_rel: 1e-3,
            include_nonclassical: true,
            hop_prefactor: HopPrefactor::FreePropagator,
            quadrature: QuadratureSettings::default(),
        }
    }
}

/// A configuration whose invariants have been checked. Only obtainable
/// through [`validate_config`] / [`validate_config_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    constants: PhysicalConstants,
    geometry: ExperimentGeometry,
    slits: SlitArray,
    settings: Settings,
}

impl Config {
    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn geometry(&self) -> &ExperimentGeometry {
        &self.geometry
    }

    pub fn slits(&self) -> &SlitArray {
        &self.slits
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    /// Copy with different settings, re-validated.
    pub fn with_settings(&self, settings: Settings) -> Result<Config, ValidationError> {
        validate_config_with(
            self.constants,
            self.geometry,
            self.slits.clone(),
            settings,
        )
    }

    /// Copy with nonclassical terms switched on or off.
    pub fn with_nonclassical(&self, include: bool) -> Config {
        let mut out = self.clone();
        out.settings.include_nonclassical = include;
        out
    }

    /// Copy with a different grating-to-detector distance.
    pub fn with_detector_distance(&self, x: f64) -> Result<Config, ValidationError> {
        let mut geometry = self.geometry;
        geometry.detector_distance = x;
        validate_config_with(self.constants, geometry, self.slits.clone(), self.settings)
    }

    /// Resolved configuration as `key = value` lines, using the config-file key names.
    pub fn echo_lines(&self) -> Vec<String> {
        let c = &self.constants;
        let g = &self.geometry;
        let s = &self.settings;
        let centers = self
            .slits
            .centers
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(", ");
        vec![
            format!("hbar = {:.16e}", c.hbar),
            format!("electron_mass = {:.16e}", c.electron_mass),
            format!("L_m = {:.16e}", g.source_distance),
            format!("x_detector_m = {:.16e}", g.detector_distance),
            format!("V_x_mps = {:.16e}", g.longitudinal_velocity),
            format!("slit_centers_m = {centers}"),
            format!("slit_half_width_b_m = {:.16e}", self.slits.half_width),
            format!("fd_step_m = {:.16e}", s.fd_step),
            format!("density_floor_rel = {:.16e}", s.density_floor_rel),
            format!("velocity_floor_rel = {:.16e}", s.velocity_floor_rel),
            format!("include_nonclassical = {}", s.include_nonclassical),
            format!("quadrature_tol = {:.16e}", s.quadrature.tolerance),
            format!("quadrature_depth = {}", s.quadrature.max_depth),
            format!(
                "eq9_literal_prefactor = {}",
                s.hop_prefactor == HopPrefactor::Literal
            ),
        ]
    }
}

/// Validate with default [`Settings`].
pub fn validate_config(
    constants: PhysicalConstants,
    geometry: ExperimentGeometry,
    slits: SlitArray,
) -> Result<Config, ValidationError> {
    validate_config_with(constants, geometry, slits, Settings::default())
}

/// Check every invariant and report all violations at once.
pub fn validate_config_with(
    constants: PhysicalConstants,
    geometry: ExperimentGeometry,
    slits: SlitArray,
    settings: Settings,
) -> Result<Config, ValidationError> {
    let mut err = ValidationError::default();
    let positive = |err: &mut ValidationError, field: &str, v: f64| {
        if !(v.is_finite() && v > 0.0) {
            err.push(field, v, "must be finite and > 0");
        }
    };

    positive(&mut err, "hbar", constants.hbar);
    positive(&mut err, "electron_mass", constants.electron_mass);
    positive(&mut err, "L", geometry.source_distance);
    positive(&mut err, "x_detector", geometry.detector_distance);
    positive(&mut err, "V_x", geometry.longitudinal_velocity);
    positive(&mut err, "half_width_b", slits.half_width);

    if slits.centers.is_empty() {
        err.push("centers", "[]", "at least one slit is required");
    }
    if let Some(bad) = slits.centers.iter().find(|c| !c.is_finite()) {
        err.push("centers", bad, "slit centres must be finite");
    }
    for pair in slits.centers.windows(2) {
        let spacing = pair[1] - pair[0];
        if spacing <= 0.0 {
            err.push(
                "centers",
                format!("{:e}, {:e}", pair[0], pair[1]),
                "centres must be strictly increasing",
            );
        } else if slits.half_width > 0.0 && spacing <= 4.0 * slits.half_width {
            err.push(
                "centers",
                format!("{:e}, {:e}", pair[0], pair[1]),
                "neighbouring spacing must exceed 4 * half_width_b",
            );
        }
    }

    positive(&mut err, "fd_step", settings.fd_step);
    if !(settings.density_floor_rel.is_finite() && (0.0..1.0).contains(&settings.density_floor_rel))
    {
        err.push(
            "density_floor_rel",
            settings.density_floor_rel,
            "must lie in [0, 1)",
        );
    }
    if !(settings.velocity_floor_rel.is_finite()
        && (0.0..1.0).contains(&settings.velocity_floor_rel))
    {
        err.push(
            "velocity_floor_rel",
            settings.velocity_floor_rel,
            "must lie in [0, 1)",
        );
    }
    if let Err(msg) = settings.quadrature.check() {
        err.push("quadrature", format!("{:?}", settings.quadrature), msg);
    }

    err.into_result(Config {
        constants,
        geometry,
        slits,
        settings,
    })
}

/// Per-pair quantities for one nonclassical hop, evaluated at detector time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKinematics {
    /// Hop time between the two slits, s.
    pub tau: f64,
    /// Quadratic coefficient of the first-slit offset after folding in the hop.
    pub eta: Complex64,
    /// Quadratic coefficient of the second-slit offset after the first integration.
    pub beta: Complex64,
    /// `1/T + 1/t + i / (k b^2)`, the classical single-slit coefficient.
    pub mu: Complex64,
}

impl PairKinematics {
    pub fn new(config: &Config, slit_i: f64, slit_j: f64, t: f64) -> Result<Self> {
        let tau = hop_time(slit_i, slit_j, config.constants())?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!("detector time must be > 0, got {t:e}")));
        }
        let k = config.constants().mass_over_hbar();
        let b = config.slits().half_width;
        let big_t = config.geometry().source_time();
        let i = Complex64::i();
        let damping = 1.0 / (2.0 * b * b);

        let eta = damping - i * k / (2.0 * big_t) - i * k / (2.0 * tau);
        let beta = damping - i * k / (2.0 * t) - i * k / (2.0 * tau) + k * k / (4.0 * tau * tau) / eta;
        let mu = Complex64::new(1.0 / big_t + 1.0 / t, 1.0 / (k * b * b));
        Ok(PairKinematics {
            tau,
            eta,
            beta,
            mu,
        })
    }
}

/// Inter-slit transit time `tau = (xi_i - xi_j)^2 sqrt(2) m / hbar`.
pub fn hop_time(slit_i: f64, slit_j: f64, constants: &PhysicalConstants) -> Result<f64> {
    let d = slit_i - slit_j;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Domain(format!(
            "hop time needs two distinct slits, got {slit_i:e} and {slit_j:e}"
        )));
    }
    Ok(d * d * std::f64::consts::SQRT_2 * constants.mass_over_hbar())
}

/// Rectangular sampling grid. Nodes include both endpoints on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(
        (x_min, x_max): (f64, f64),
        (y_min, y_max): (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Self, ValidationError> {
        let mut err = ValidationError::default();
        if !(x_min.is_finite() && x_min > 0.0) {
            err.push("x_min", x_min, "grid must stay clear of the grating plane (x_min > 0)");
        }
        if !(x_max.is_finite() && x_max > x_min) {
            err.push("x_max", x_max, "must be finite and > x_min");
        }
        if !(y_min.is_finite() && y_max.is_finite() && y_max > y_min) {
            err.push("y_max", y_max, "must be finite and > y_min");
        }
        if nx < 2 {
            err.push("nx", nx, "need at least 2 nodes");
        }
        if ny < 2 {
            err.push("ny", ny, "need at least 2 nodes");
        }
        err.into_result(GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.y_min, self.y_max, self.ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index: all `y` for the first `x`, then the next `x`.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    pub fn points(&self) -> Vec<Point> {
        let ys = self.ys();
        self.xs()
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| Point::new(x, y)))
            .collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }
}

/// `n` evenly spaced values with exact endpoints. `n == 1` yields `[start]`.
///
/// The second half is measured back from `end`, so a range with
/// `start == -end` produces nodes that are exact negatives of each other.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = (n - 1) as f64;
            let span = end - start;
            (0..n)
                .map(|i| {
                    if 2 * i < n - 1 {
                        start + span * (i as f64) / last
                    } else if 2 * i == n - 1 {
                        0.5 * (start + end)
                    } else {
                        end - span * ((n - 1 - i) as f64) / last
                    }
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl AmplitudeField {
    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.spec.index(ix, iy)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub spec: GridSpec,
    /// `v_y` in m/s; `NaN` where undefined.
    pub v_y: Vec<f64>,
    /// `true` where the density is above the floor and `v_y` is meaningful.
    pub defined: Vec<bool>,
}

impl VelocityField {
    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        let k = self.spec.index(ix, iy);
        self.defined[k].then_some(self.v_y[k])
    }
}

/// Why trajectory integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// Entered a region where the density is below the floor at this `x`.
    UndefinedDensity { x: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(x, y)` samples with strictly increasing `x`.
    pub samples: Vec<(f64, f64)>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        self.termination == Termination::Completed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    /// Largest relative deviation over the finite peaks (spike cores excluded).
    pub max_relative_deviation: f64,
    #[serde(rename = "peaks")]
    pub peak_positions: Vec<f64>,
    #[serde(rename = "spikes")]
    pub spike_positions: Vec<f64>,
    /// Absolute velocity floor that separated spikes from peaks, m/s.
    #[serde(rename = "velocity_floor_mps")]
    pub velocity_floor_used: f64,
}
