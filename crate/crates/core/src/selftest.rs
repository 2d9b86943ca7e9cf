//! Reduced oracle suite behind `slitpath selftest`.

use std::fmt;

use num_complex::Complex64;

use crate::analysis::{deviation_profile, find_spikes_and_peaks};
use crate::bohmian::{analytic_velocity_classical, velocity_profile};
use crate::error::Result;
use crate::model::{linspace, Config, Point};
use crate::propagators::{
    classical_slit_amplitude, classical_slit_amplitude_quadrature, classical_slit_transverse,
    nonclassical_pair_amplitude, nonclassical_pair_amplitude_quadrature, wavefunction, Mode,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.threshold
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<38} measured {:.3e} <= threshold {:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold
        )
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

/// Free Schrodinger equation residual of the transverse single-slit amplitude.
///
/// Returns `(lhs, rhs)` with `lhs = i hbar d(psi)/dt` and
/// `rhs = -(hbar^2 / 2m) d^2(psi)/dy^2`, both by central differences with
/// steps `dt` and `dy`.
pub fn schrodinger_terms(config: &Config, slit: f64, t: f64, y: f64, dt: f64, dy: f64) -> (Complex64, Complex64) {
    let psi = |t: f64, y: f64| classical_slit_transverse(config, slit, t, y);
    let hbar = config.constants().hbar;
    let m = config.constants().electron_mass;
    let d_t = (psi(t + dt, y) - psi(t - dt, y)) / (2.0 * dt);
    let d_yy = (psi(t, y + dy) - 2.0 * psi(t, y) + psi(t, y - dy)) / (dy * dy);
    (Complex64::i() * hbar * d_t, -(hbar * hbar / (2.0 * m)) * d_yy)
}

/// `|lhs - rhs| / max(|lhs|, |rhs|)` with steps suited to the default scales.
pub fn schrodinger_residual(config: &Config, slit: f64, point: Point) -> f64 {
    let t = config.geometry().time_of(point.x);
    let (lhs, rhs) = schrodinger_terms(config, slit, t, point.y, t * 1e-6, 1e-10);
    rel(lhs, rhs)
}

/// Sample points spread over `x` in `[0.4, 1.6] * x_detector` and `y` near each beam.
fn sample_points(config: &Config, n: usize) -> Vec<(f64, Point)> {
    let centers = &config.slits().centers;
    let x0 = config.geometry().detector_distance;
    let big_l = config.geometry().source_distance;
    (0..n)
        .map(|i| {
            let slit = centers[i % centers.len()];
            let frac = (i as f64 + 0.5) / n as f64;
            let x = x0 * (0.4 + 1.2 * frac);
            // Within 0.3 um of the geometric beam centre.
            let y = slit * (1.0 + x / big_l) + 0.3e-6 * (2.0 * ((i * 7) % n) as f64 / n as f64 - 1.0);
            (slit, Point::new(x, y))
        })
        .collect()
}

pub fn run_selftest(config: &Config) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let mut worst = 0.0_f64;
    for (slit, p) in sample_points(config, 12) {
        let a = classical_slit_amplitude(config, slit, p)?;
        let b = classical_slit_amplitude_quadrature(config, slit, p)?;
        worst = worst.max(rel(a, b));
    }
    checks.push(Check {
        name: "classical closed form vs quadrature",
        measured: worst,
        threshold: 1e-6,
    });

    if config.slits().centers.len() >= 2 {
        let centers = &config.slits().centers;
        let mut worst = 0.0_f64;
        for (i, (_, p)) in sample_points(config, 4).into_iter().enumerate() {
            let si = centers[i % centers.len()];
            let sj = centers[(i + 1) % centers.len()];
            let p = Point::new(p.x, sj + 0.2e-6 * (i as f64 - 1.5));
            let a = nonclassical_pair_amplitude(config, si, sj, p)?;
            let b = nonclassical_pair_amplitude_quadrature(config, si, sj, p)?;
            worst = worst.max(rel(a, b));
        }
        checks.push(Check {
            name: "nonclassical closed form vs quadrature",
            measured: worst,
            threshold: 1e-6,
        });
    }

    let worst = sample_points(config, 10)
        .into_iter()
        .map(|(slit, p)| schrodinger_residual(config, slit, p))
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "Schrodinger residual",
        measured: worst,
        threshold: 1e-4,
    });

    let x = config.geometry().detector_distance;
    let ys = linspace(-1.2e-6, 1.2e-6, 201);
    let vc = velocity_profile(config, x, &ys, Mode::Classical)?;
    let vmax = vc.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut worst_fd = 0.0_f64;
    for (&y, v) in ys.iter().zip(&vc) {
        if let (Some(fd), Some(exact)) = (v, analytic_velocity_classical(config, Point::new(x, y), 0.0)?) {
            if exact.abs() > 1e-3 * vmax {
                worst_fd = worst_fd.max((fd - exact).abs() / exact.abs());
            }
        }
    }
    checks.push(Check {
        name: "finite-difference vs analytic velocity",
        measured: worst_fd,
        threshold: 1e-6,
    });

    if config.slits().is_symmetric() {
        let mut worst_amp = 0.0_f64;
        for &y in ys.iter().step_by(10) {
            for mode in [Mode::Classical, Mode::Full] {
                let a = wavefunction(config, Point::new(x, y), mode)?.norm();
                let b = wavefunction(config, Point::new(x, -y), mode)?.norm();
                worst_amp = worst_amp.max((a - b).abs() / a.max(b));
            }
        }
        checks.push(Check {
            name: "amplitude mirror symmetry",
            measured: worst_amp,
            threshold: 1e-12,
        });

        let mut worst_v = 0.0_f64;
        for mode in [Mode::Classical, Mode::Full] {
            let v = velocity_profile(config, x, &ys, mode)?;
            let vmax = v.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
            for i in 0..ys.len() {
                if let (Some(a), Some(b)) = (v[i], v[ys.len() - 1 - i]) {
                    worst_v = worst_v.max((a + b).abs() / vmax);
                }
            }
        }
        checks.push(Check {
            name: "velocity antisymmetry",
            measured: worst_v,
            threshold: 1e-6,
        });
    }

    let null = config.with_nonclassical(false);
    let profile = deviation_profile(&null, x, &ys)?;
    let report = find_spikes_and_peaks(&profile, profile.velocity_floor)?;
    let worst_null = profile
        .samples
        .iter()
        .filter_map(|s| s.abs_diff)
        .fold(0.0_f64, |a, d| a.max(d.abs()))
        + report.max_relative_deviation
        + report.spike_positions.len() as f64;
    checks.push(Check {
        name: "null test (nonclassical disabled)",
        measured: worst_null,
        threshold: 0.0,
    });

    Ok(checks)
}
