//! Guiding-equation velocities and Bohmian trajectories.
//!
//! `v_y = (hbar / m) Im(Psi* dPsi/dy) / |Psi|^2`. The derivative is a central
//! difference for arbitrary wavefunctions; for the classical wavefunction
//! an exact derivative of the closed form is also available and serves as
//! the reference for the finite-difference path.
//!
//! Velocities are undefined (returned as `None`) where `|Psi|^2` falls below
//! the density floor. They are never clamped or zeroed.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Config, GridSpec, PhysicalConstants, Point, Termination, Trajectory, VelocityField};
use crate::propagators::{classical_slit_log_derivative, classical_slit_transverse, longitudinal_phase, ColumnEvaluator, Mode};

/// Velocity from `Psi` and its neighbours at `y - h` and `y + h`.
pub fn velocity_from_stencil(
    minus: Complex64,
    center: Complex64,
    plus: Complex64,
    fd_step: f64,
    hbar_over_mass: f64,
    density_floor: f64,
) -> Option<f64> {
    let density = center.norm_sqr();
    if !(density >= density_floor) || density == 0.0 {
        return None;
    }
    let derivative = (plus - minus) / (2.0 * fd_step);
    let v = hbar_over_mass * (center.conj() * derivative).im / density;
    v.is_finite().then_some(v)
}

/// Guiding-equation `v_y` at `point` for any wavefunction evaluator.
///
/// `density_floor` is absolute (same units as `|Psi|^2`).
pub fn velocity_y<F>(
    evaluator: F,
    point: Point,
    fd_step: f64,
    constants: &PhysicalConstants,
    density_floor: f64,
) -> Result<Option<f64>>
where
    F: Fn(Point) -> Result<Complex64>,
{
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::Domain(format!("fd_step must be > 0, got {fd_step:e}")));
    }
    let center = evaluator(point)?;
    let plus = evaluator(Point::new(point.x, point.y + fd_step))?;
    let minus = evaluator(Point::new(point.x, point.y - fd_step))?;
    Ok(velocity_from_stencil(
        minus,
        center,
        plus,
        fd_step,
        constants.hbar_over_mass(),
        density_floor,
    ))
}

/// Classical `v_y` from the exact `y`-derivative of each single-slit closed form.
pub fn analytic_velocity_classical(config: &Config, point: Point, density_floor: f64) -> Result<Option<f64>> {
    if !(point.x > 0.0 && point.x.is_finite() && point.y.is_finite()) {
        return Err(Error::Domain(format!("need x > 0, got x = {:e}", point.x)));
    }
    let t = config.geometry().time_of(point.x);
    let mut psi = Complex64::new(0.0, 0.0);
    let mut dpsi = Complex64::new(0.0, 0.0);
    for &c in &config.slits().centers {
        let term = classical_slit_transverse(config, c, t, point.y);
        psi += term;
        dpsi += term * classical_slit_log_derivative(config, c, t, point.y);
    }
    // The longitudinal phase has unit modulus and cancels in Psi* dPsi; it only
    // matters for the density floor through rounding, so apply it for consistency.
    let phase = longitudinal_phase(config, point.x);
    psi *= phase;
    dpsi *= phase;
    let density = psi.norm_sqr();
    if !(density >= density_floor) || density == 0.0 {
        return Ok(None);
    }
    let v = config.constants().hbar_over_mass() * (psi.conj() * dpsi).im / density;
    Ok(v.is_finite().then_some(v))
}

/// `Psi` at `y - h`, `y`, `y + h` for every `y`, on one column.
fn column_stencils(col: &ColumnEvaluator<'_>, ys: &[f64], h: f64, mode: Mode) -> Vec<[Complex64; 3]> {
    ys.iter()
        .map(|&y| [col.evaluate(y - h, mode), col.evaluate(y, mode), col.evaluate(y + h, mode)])
        .collect()
}

/// Velocities along one detector line. The density floor is
/// `density_floor_rel * max |Psi|^2` over the line.
pub fn velocity_profile(config: &Config, x: f64, ys: &[f64], mode: Mode) -> Result<Vec<Option<f64>>> {
    let col = ColumnEvaluator::new(config, x)?;
    let s = config.settings();
    let stencils = column_stencils(&col, ys, s.fd_step, mode);
    let peak = stencils.iter().map(|st| st[1].norm_sqr()).fold(0.0, f64::max);
    let floor = s.density_floor_rel * peak;
    let hm = config.constants().hbar_over_mass();
    Ok(stencils
        .iter()
        .map(|st| velocity_from_stencil(st[0], st[1], st[2], s.fd_step, hm, floor))
        .collect())
}

/// Dense `v_y` over a grid. The density floor is relative to the grid maximum of `|Psi|^2`.
pub fn velocity_field(config: &Config, grid: &GridSpec, mode: Mode) -> Result<VelocityField> {
    let s = config.settings();
    let ys = grid.ys();
    let columns = grid
        .xs()
        .into_par_iter()
        .map(|x| ColumnEvaluator::new(config, x).map(|col| column_stencils(&col, &ys, s.fd_step, mode)))
        .collect::<Result<Vec<_>>>()?;
    let peak = columns
        .iter()
        .flatten()
        .map(|st| st[1].norm_sqr())
        .fold(0.0, f64::max);
    let floor = s.density_floor_rel * peak;
    let hm = config.constants().hbar_over_mass();

    let mut v_y = Vec::with_capacity(grid.len());
    let mut defined = Vec::with_capacity(grid.len());
    for st in columns.iter().flatten() {
        match velocity_from_stencil(st[0], st[1], st[2], s.fd_step, hm, floor) {
            Some(v) => {
                v_y.push(v);
                defined.push(true);
            }
            None => {
                v_y.push(f64::NAN);
                defined.push(false);
            }
        }
    }
    Ok(VelocityField {
        spec: *grid,
        v_y,
        defined,
    })
}

/// Adaptive step control for [`integrate_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    /// Absolute tolerance on `y`, m.
    pub atol: f64,
    /// First trial step in `x`, m. `None` picks 1e-3 of the output spacing.
    pub initial_step: Option<f64>,
    /// Smallest step before giving up, m.
    pub min_step: f64,
    pub max_steps: usize,
    /// Number of equally spaced output samples, endpoints included.
    pub output_points: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-8,
            atol: 1e-15,
            initial_step: None,
            min_step: 1e-14,
            max_steps: 200_000,
            output_points: 201,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Slope `dy/dx = v_y / V_x`, or `None` where the density is below the floor.
struct Slope<'a> {
    config: &'a Config,
    mode: Mode,
}

impl Slope<'_> {
    fn eval(&self, x: f64, y: f64) -> Result<Option<f64>> {
        let col = ColumnEvaluator::new(self.config, x)?;
        let s = self.config.settings();
        let h = s.fd_step;
        // Reference density: the brightest of the classical beam centres
        // `xi (1 + x/L)` and the slit axes `xi`, where hop paths land.
        let stretch = 1.0 + x / self.config.geometry().source_distance;
        let reference = self
            .config
            .slits()
            .centers
            .iter()
            .flat_map(|&c| [c, c * stretch])
            .map(|yc| col.evaluate(yc, self.mode).norm_sqr())
            .fold(0.0, f64::max);
        let v = velocity_from_stencil(
            col.evaluate(y - h, self.mode),
            col.evaluate(y, self.mode),
            col.evaluate(y + h, self.mode),
            h,
            self.config.constants().hbar_over_mass(),
            s.density_floor_rel * reference,
        );
        Ok(v.map(|v| v / self.config.geometry().longitudinal_velocity))
    }
}

/// Integrate `dy/dx = v_y(x, y) / V_x` from `(x_range.0, y_start)` to `x_range.1`.
///
/// Output samples are equally spaced in `x`. Entering a region where the
/// velocity is undefined stops the integration and returns the samples so far.
pub fn integrate_trajectory(
    config: &Config,
    y_start: f64,
    x_range: (f64, f64),
    control: &StepControl,
    mode: Mode,
) -> Result<Trajectory> {
    let (x0, x1) = x_range;
    if !(x0 > 0.0 && x1 > x0 && x1.is_finite() && y_start.is_finite()) {
        return Err(Error::Domain(format!(
            "trajectory needs 0 < x_start < x_end and finite y, got [{x0:e}, {x1:e}], y = {y_start:e}"
        )));
    }
    if control.output_points < 2 {
        return Err(Error::Domain("need at least two output points".to_string()));
    }
    let slope = Slope { config, mode };
    let outputs = crate::model::linspace(x0, x1, control.output_points);
    let mut samples = vec![(x0, y_start)];
    let mut x = x0;
    let mut y = y_start;
    let mut h = control
        .initial_step
        .unwrap_or((outputs[1] - outputs[0]) * 1e-3);
    let mut steps = 0usize;

    let Some(mut k1) = slope.eval(x, y)? else {
        return Ok(Trajectory {
            samples,
            termination: Termination::UndefinedDensity { x },
        });
    };

    for &target in &outputs[1..] {
        while x < target {
            steps += 1;
            if steps > control.max_steps {
                return Err(Error::StepFailure { x, y, step: h });
            }
            let last = target - x <= h;
            let step = if last { target - x } else { h };

            let mut k = [0.0; 7];
            k[0] = k1;
            let mut undefined = false;
            for s in 1..7 {
                let yi = y + step * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
                match slope.eval(x + C[s] * step, yi)? {
                    Some(v) => k[s] = v,
                    None => {
                        undefined = true;
                        break;
                    }
                }
            }
            if undefined {
                // Retry smaller before concluding the region is genuinely undefined.
                if step * 0.5 < control.min_step {
                    return Ok(Trajectory {
                        samples,
                        termination: Termination::UndefinedDensity { x },
                    });
                }
                h = step * 0.5;
                continue;
            }

            let y5 = y + step * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
            let y4 = y + step * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
            let scale = control.atol + control.rtol * y.abs().max(y5.abs());
            let err = (y5 - y4).abs() / scale;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let proposal = step * factor;
            if err <= 1.0 {
                x = if last { target } else { x + step };
                y = y5;
                // FSAL: the last stage is the slope at the new point.
                k1 = k[6];
                // A step truncated to hit an output sample says little about the next one.
                h = if last { h.max(proposal) } else { proposal };
            } else {
                if proposal < control.min_step {
                    return Err(Error::StepFailure { x, y, step: proposal });
                }
                h = proposal;
            }
        }
        samples.push((x, y));
    }
    Ok(Trajectory {
        samples,
        termination: Termination::Completed,
    })
}

/// Several trajectories sharing the same `x` samples, integrated in parallel.
pub fn integrate_trajectories(
    config: &Config,
    starts: &[f64],
    x_range: (f64, f64),
    control: &StepControl,
    mode: Mode,
) -> Result<Vec<Trajectory>> {
    starts
        .par_iter()
        .map(|&y0| integrate_trajectory(config, y0, x_range, control, mode))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_velocity() {
        let constants = PhysicalConstants::default();
        let k = 3.0e7;
        let wave = |p: Point| Ok(Complex64::from_polar(1.0, k * p.y));
        let exact = constants.hbar_over_mass() * k;
        // Central differences on a pure phase return sin(kh)/h: relative error (kh)^2 / 6.
        for h in [1e-13, 1e-12, 5e-12] {
            let v = velocity_y(wave, Point::new(0.01, 2.3e-7), h, &constants, 0.0)
                .unwrap()
                .unwrap();
            assert!((v - exact).abs() / exact < 1e-8, "h = {h}: {v} vs {exact}");
        }
        let h = 1e-10;
        let v = velocity_y(wave, Point::new(0.01, 2.3e-7), h, &constants, 0.0)
            .unwrap()
            .unwrap();
        let predicted = (k * h).powi(2) / 6.0;
        assert!(((exact - v) / exact - predicted).abs() < 1e-3 * predicted);
    }

    #[test]
    fn density_floor_marks_undefined() {
        let constants = PhysicalConstants::default();
        let wave = |_: Point| Ok(Complex64::new(1e-10, 0.0));
        let v = velocity_y(wave, Point::new(0.01, 0.0), 1e-11, &constants, 1e-12).unwrap();
        assert_eq!(v, None);
    }

    #[test]
    fn rejects_nonpositive_step() {
        let constants = PhysicalConstants::default();
        let wave = |_: Point| Ok(Complex64::new(1.0, 0.0));
        assert!(velocity_y(wave, Point::new(0.01, 0.0), 0.0, &constants, 0.0).is_err());
    }
}
