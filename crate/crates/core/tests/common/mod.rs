#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slitpath::config::default_config;
use slitpath::propagators::{classical_slit_log_derivative, nonclassical_pair_transverse};
use slitpath::{Config, PhysicalConstants, Point};

pub fn three_slit() -> Config {
    default_config()
}

pub fn rel(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

/// Geometric image of a slit on the plane at distance `x` (straight line from the source).
pub fn beam_center(config: &Config, slit: f64, x: f64) -> f64 {
    slit * (1.0 + x / config.geometry().source_distance)
}

/// 1/e^(1/2) half-width of the classical single-slit beam at distance `x`.
pub fn beam_width(config: &Config, slit: f64, x: f64) -> f64 {
    let t = config.geometry().time_of(x);
    let y0 = beam_center(config, slit, x);
    let h = 1e-8;
    // The log-derivative is linear in y; the real part of its slope is d^2 ln|psi| / dy^2.
    let curvature = (classical_slit_log_derivative(config, slit, t, y0 + h)
        - classical_slit_log_derivative(config, slit, t, y0))
    .re
        / h;
    (-1.0 / curvature).sqrt()
}

/// Random point within two beam widths of a random slit's beam, x in [2 mm, 20 mm].
pub fn classical_sample(config: &Config, rng: &mut ChaCha8Rng) -> (f64, Point) {
    let centers = &config.slits().centers;
    let slit = centers[rng.gen_range(0..centers.len())];
    let x = rng.gen_range(2e-3..2e-2);
    let y = beam_center(config, slit, x) + rng.gen_range(-2.0..2.0) * beam_width(config, slit, x);
    (slit, Point::new(x, y))
}

/// Location and half-width of the nonclassical beam for a pair, found on a scan of the closed form.
pub fn pair_beam(config: &Config, si: f64, sj: f64, x: f64) -> (f64, f64) {
    let t = config.geometry().time_of(x);
    let amp = |y: f64| nonclassical_pair_transverse(config, si, sj, t, y).unwrap().norm();
    let n = 1201;
    let (lo, hi) = (-4e-6, 4e-6);
    let ys: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let (peak_y, peak) = ys
        .iter()
        .map(|&y| (y, amp(y)))
        .fold((0.0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
    let step = (hi - lo) / (n - 1) as f64;
    let mut w = step;
    while amp(peak_y + w) > peak * (-0.5f64).exp() && amp(peak_y - w) > peak * (-0.5f64).exp() {
        w += step * 0.25;
    }
    (peak_y, w)
}

/// Random ordered pair and a point within two widths of that pair's nonclassical beam.
pub fn nonclassical_sample(config: &Config, rng: &mut ChaCha8Rng) -> (f64, f64, Point) {
    let centers = &config.slits().centers;
    let i = rng.gen_range(0..centers.len());
    let mut j = rng.gen_range(0..centers.len() - 1);
    if j >= i {
        j += 1;
    }
    let x = rng.gen_range(2e-3..2e-2);
    let (y0, w) = pair_beam(config, centers[i], centers[j], x);
    (centers[i], centers[j], Point::new(x, y0 + rng.gen_range(-2.0..2.0) * w))
}

pub fn constants() -> PhysicalConstants {
    PhysicalConstants::default()
}
