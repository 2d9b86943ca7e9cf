//! Path amplitudes through Gaussian slits.
//!
//! Every amplitude is the product of free-particle kernels
//! `K(s) = (2 pi i hbar s / m)^(-1/2) exp(i m d^2 / (2 hbar s))`
//! joined at the slits and weighted by the transmission
//! `G(dy) = exp(-dy^2 / (2 b^2))`. Along `x` the electron moves at the
//! constant speed `V_x`, so the longitudinal factor
//! `exp(i m (L^2/T + x^2/t) / (2 hbar)) = exp(i m V_x (L + x) / (2 hbar))`
//! is common to every path reaching a given `x`. It is computed once and
//! multiplied in after the transverse part; folding a phase of order 1e9 rad
//! into the transverse exponent would destroy its precision.
//!
//! * classical path `S -> slit -> D`: one Gaussian integral, closed form in
//!   terms of `mu = 1/T + 1/t + i/(k b^2)` with `k = m / hbar`;
//! * nonclassical path `S -> slit i -> slit j -> D`: two nested Gaussian
//!   integrals, closed form in terms of the [`PairKinematics`] `eta`, `beta`.
//!
//! Each closed form has a quadrature counterpart that integrates the kernel
//! product directly, used as an oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Config, HopPrefactor, PairKinematics, Point};
use crate::quadrature::{integrate, integrate_2d, QuadResult};

/// Which paths contribute to the wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Classical paths only, `Psi_c`.
    Classical,
    /// `Psi_c + Psi_nc` (nonclassical part omitted when the config disables it).
    Full,
}

/// Default quadrature half-window, in units of the slit half-width `b`.
pub const DEFAULT_WINDOW_B: f64 = 8.0;

fn i_unit() -> Complex64 {
    Complex64::i()
}

/// `(2 pi i hbar s / m)^(-1/2)`, principal branch.
fn kernel_prefactor(k: f64, s: f64) -> Complex64 {
    (Complex64::new(0.0, -k / (2.0 * PI * s))).sqrt()
}

fn hop_prefactor(config: &Config, tau: f64) -> Complex64 {
    let k = config.constants().mass_over_hbar();
    match config.settings().hop_prefactor {
        HopPrefactor::FreePropagator => kernel_prefactor(k, tau),
        HopPrefactor::Literal => {
            Complex64::new((k / (2.0 * PI * config.geometry().source_time())).sqrt(), 0.0)
        }
    }
}

/// `exp(i m V_x (L + x) / (2 hbar))`, shared by all paths reaching distance `x`.
pub fn longitudinal_phase(config: &Config, x: f64) -> Complex64 {
    let g = config.geometry();
    let angle =
        0.5 * config.constants().mass_over_hbar() * g.longitudinal_velocity * (g.source_distance + x);
    Complex64::from_polar(1.0, angle)
}

fn check_point(point: Point) -> Result<()> {
    if point.x.is_finite() && point.x > 0.0 && point.y.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "amplitudes need x > 0 (t = x / V_x vanishes at the grating), got ({:e}, {:e})",
            point.x, point.y
        )))
    }
}

fn check_slit(config: &Config, slit: f64) -> Result<()> {
    if config.slits().centers.contains(&slit) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{slit:e} is not a slit centre")))
    }
}

fn check_pair(config: &Config, slit_i: f64, slit_j: f64) -> Result<()> {
    check_slit(config, slit_i)?;
    check_slit(config, slit_j)?;
    if slit_i == slit_j {
        return Err(Error::Domain(
            "a nonclassical hop needs two distinct slits".to_string(),
        ));
    }
    Ok(())
}

/// Transverse part of the classical amplitude at detector time `t`.
pub fn classical_slit_transverse(config: &Config, slit: f64, t: f64, y: f64) -> Complex64 {
    let k = config.constants().mass_over_hbar();
    let big_t = config.geometry().source_time();
    let b = config.slits().half_width;
    let mu = Complex64::new(1.0 / big_t + 1.0 / t, 1.0 / (k * b * b));
    let slope = slit / big_t + (slit - y) / t;
    let exponent = 0.5
        * i_unit()
        * k
        * (slit * slit / big_t + (y - slit) * (y - slit) / t - slope * slope / mu);
    let prefactor = kernel_prefactor(k, big_t)
        * kernel_prefactor(k, t)
        * (2.0 * PI * i_unit() / (k * mu)).sqrt();
    prefactor * exponent.exp()
}

/// `d/dy` of the classical exponent; `d psi_c / dy = psi_c * classical_slit_log_derivative`.
pub fn classical_slit_log_derivative(config: &Config, slit: f64, t: f64, y: f64) -> Complex64 {
    let k = config.constants().mass_over_hbar();
    let big_t = config.geometry().source_time();
    let b = config.slits().half_width;
    let mu = Complex64::new(1.0 / big_t + 1.0 / t, 1.0 / (k * b * b));
    let slope = slit / big_t + (slit - y) / t;
    i_unit() * k * ((y - slit) / t + slope / (mu * t))
}

/// Classical amplitude through one slit, closed form.
pub fn classical_slit_amplitude(config: &Config, slit_center: f64, point: Point) -> Result<Complex64> {
    check_point(point)?;
    check_slit(config, slit_center)?;
    let t = config.geometry().time_of(point.x);
    Ok(classical_slit_transverse(config, slit_center, t, point.y) * longitudinal_phase(config, point.x))
}

/// Classical amplitude by adaptive quadrature over the slit offset, window `+-8 b`.
pub fn classical_slit_amplitude_quadrature(
    config: &Config,
    slit_center: f64,
    point: Point,
) -> Result<Complex64> {
    classical_slit_quadrature_with(config, slit_center, point, DEFAULT_WINDOW_B)
        .map(|r| r.value * longitudinal_phase(config, point.x))
}

/// Transverse classical amplitude by quadrature over `[-w b, w b]`, with diagnostics.
pub fn classical_slit_quadrature_with(
    config: &Config,
    slit_center: f64,
    point: Point,
    half_window_b: f64,
) -> Result<QuadResult> {
    check_point(point)?;
    check_slit(config, slit_center)?;
    let k = config.constants().mass_over_hbar();
    let big_t = config.geometry().source_time();
    let t = config.geometry().time_of(point.x);
    let b = config.slits().half_width;
    let y = point.y;
    let damping = 1.0 / (2.0 * b * b);

    let integrand = |d: f64| {
        let to_slit = slit_center + d;
        let to_detector = y - slit_center - d;
        Complex64::new(
            -damping * d * d,
            0.5 * k * (to_slit * to_slit / big_t + to_detector * to_detector / t),
        )
        .exp()
    };
    let w = half_window_b * b;
    let mut r = integrate(integrand, -w, w, &config.settings().quadrature)?;
    let pre = kernel_prefactor(k, big_t) * kernel_prefactor(k, t);
    r.value *= pre;
    r.error *= pre.norm();
    r.abs_integral *= pre.norm();
    Ok(r)
}

/// Classical wavefunction: sum of single-slit amplitudes.
pub fn classical_wavefunction(config: &Config, point: Point) -> Result<Complex64> {
    check_point(point)?;
    let t = config.geometry().time_of(point.x);
    let sum: Complex64 = config
        .slits()
        .centers
        .iter()
        .map(|&c| classical_slit_transverse(config, c, t, point.y))
        .sum();
    Ok(sum * longitudinal_phase(config, point.x))
}

/// Transverse part of the `S -> slit i -> slit j -> D` amplitude at detector time `t`.
pub fn nonclassical_pair_transverse(
    config: &Config,
    slit_i: f64,
    slit_j: f64,
    t: f64,
    y: f64,
) -> Result<Complex64> {
    let kin = PairKinematics::new(config, slit_i, slit_j, t)?;
    Ok(pair_transverse(config, &kin, slit_i, slit_j, t, y))
}

fn pair_transverse(
    config: &Config,
    kin: &PairKinematics,
    slit_i: f64,
    slit_j: f64,
    t: f64,
    y: f64,
) -> Complex64 {
    let k = config.constants().mass_over_hbar();
    let big_t = config.geometry().source_time();
    let i = i_unit();
    let PairKinematics { tau, eta, beta, .. } = *kin;
    let gap = slit_i - slit_j;

    // Linear coefficient of the first-slit offset; the same bracket reappears in
    // the second-slit coefficient once the first integral is done.
    let source_slope = slit_i / big_t + gap / tau;
    let first = i * k * source_slope;
    let second = i * k * (slit_j - y) / t - i * k * gap / tau + k * k * source_slope / (2.0 * eta * tau);
    let phase = 0.5 * i * k * (slit_i * slit_i / big_t + gap * gap / tau + (y - slit_j) * (y - slit_j) / t);
    let exponent = phase + first * first / (4.0 * eta) + second * second / (4.0 * beta);

    let prefactor = kernel_prefactor(k, big_t)
        * hop_prefactor(config, tau)
        * kernel_prefactor(k, t)
        * PI
        / (eta.sqrt() * beta.sqrt());
    prefactor * exponent.exp()
}

/// Nonclassical amplitude for the ordered slit pair `(i, j)`, closed form.
pub fn nonclassical_pair_amplitude(
    config: &Config,
    slit_i: f64,
    slit_j: f64,
    point: Point,
) -> Result<Complex64> {
    check_point(point)?;
    check_pair(config, slit_i, slit_j)?;
    let t = config.geometry().time_of(point.x);
    Ok(nonclassical_pair_transverse(config, slit_i, slit_j, t, point.y)? * longitudinal_phase(config, point.x))
}

/// Kernel used between the two slits in the nonclassical quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HopKernel {
    #[default]
    Propagator,
    /// Replace the hop kernel by 1, making the integrand separable. Diagnostic only.
    Unity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairQuadrature {
    /// Half-width of the integration window on each slit, in units of `b`.
    pub half_window_b: f64,
    pub hop: HopKernel,
}

impl Default for PairQuadrature {
    fn default() -> Self {
        PairQuadrature {
            half_window_b: DEFAULT_WINDOW_B,
            hop: HopKernel::Propagator,
        }
    }
}

/// Nonclassical amplitude by 2-D adaptive quadrature, window `+-8 b` on both slits.
pub fn nonclassical_pair_amplitude_quadrature(
    config: &Config,
    slit_i: f64,
    slit_j: f64,
    point: Point,
) -> Result<Complex64> {
    nonclassical_pair_quadrature_with(config, slit_i, slit_j, point, PairQuadrature::default())
        .map(|r| r.value * longitudinal_phase(config, point.x))
}

/// Transverse nonclassical amplitude by quadrature, with diagnostics.
pub fn nonclassical_pair_quadrature_with(
    config: &Config,
    slit_i: f64,
    slit_j: f64,
    point: Point,
    opts: PairQuadrature,
) -> Result<QuadResult> {
    check_point(point)?;
    check_pair(config, slit_i, slit_j)?;
    let k = config.constants().mass_over_hbar();
    let big_t = config.geometry().source_time();
    let t = config.geometry().time_of(point.x);
    let tau = crate::model::hop_time(slit_i, slit_j, config.constants())?;
    let b = config.slits().half_width;
    let y = point.y;
    let damping = 1.0 / (2.0 * b * b);
    let hop_on = match opts.hop {
        HopKernel::Propagator => 1.0,
        HopKernel::Unity => 0.0,
    };

    let integrand = |dc: f64, db: f64| {
        let to_first = slit_i + dc;
        let hop = slit_i + dc - slit_j - db;
        let to_detector = y - slit_j - db;
        Complex64::new(
            -damping * (dc * dc + db * db),
            0.5 * k
                * (to_first * to_first / big_t + hop_on * hop * hop / tau + to_detector * to_detector / t),
        )
        .exp()
    };
    let w = opts.half_window_b * b;
    let mut r = integrate_2d(integrand, (-w, w), (-w, w), &config.settings().quadrature)?;
    let hop_pre = match opts.hop {
        HopKernel::Propagator => hop_prefactor(config, tau),
        HopKernel::Unity => Complex64::new(1.0, 0.0),
    };
    let pre = kernel_prefactor(k, big_t) * hop_pre * kernel_prefactor(k, t);
    r.value *= pre;
    r.error *= pre.norm();
    r.abs_integral *= pre.norm();
    Ok(r)
}

/// Nonclassical wavefunction: sum over all ordered pairs of distinct slits.
pub fn nonclassical_wavefunction(config: &Config, point: Point) -> Result<Complex64> {
    check_point(point)?;
    if config.slits().centers.len() < 2 {
        let mut err = crate::error::ValidationError::default();
        err.push("centers", config.slits().centers.len(), "nonclassical paths need at least two slits");
        return Err(err.into());
    }
    let t = config.geometry().time_of(point.x);
    let mut sum = Complex64::new(0.0, 0.0);
    for (si, sj) in config.slits().ordered_pairs() {
        let kin = PairKinematics::new(config, si, sj, t)?;
        sum += pair_transverse(config, &kin, si, sj, t, point.y);
    }
    Ok(sum * longitudinal_phase(config, point.x))
}

/// `Psi_c + Psi_nc`, or `Psi_c` alone when the config disables nonclassical paths.
pub fn total_wavefunction(config: &Config, point: Point) -> Result<Complex64> {
    let classical = classical_wavefunction(config, point)?;
    if !config.settings().include_nonclassical || config.slits().centers.len() < 2 {
        return Ok(classical);
    }
    Ok(classical + nonclassical_wavefunction(config, point)?)
}

pub fn wavefunction(config: &Config, point: Point, mode: Mode) -> Result<Complex64> {
    match mode {
        Mode::Classical => classical_wavefunction(config, point),
        Mode::Full => total_wavefunction(config, point),
    }
}

/// Precomputed pair kinematics for one detector distance; cheap repeated evaluation along `y`.
#[derive(Debug, Clone)]
pub struct ColumnEvaluator<'a> {
    config: &'a Config,
    x: f64,
    t: f64,
    phase: Complex64,
    pairs: Vec<(f64, f64, PairKinematics)>,
}

impl<'a> ColumnEvaluator<'a> {
    pub fn new(config: &'a Config, x: f64) -> Result<Self> {
        check_point(Point::new(x, 0.0))?;
        let t = config.geometry().time_of(x);
        let pairs = config
            .slits()
            .ordered_pairs()
            .map(|(si, sj)| PairKinematics::new(config, si, sj, t).map(|k| (si, sj, k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ColumnEvaluator {
            config,
            x,
            t,
            phase: longitudinal_phase(config, x),
            pairs,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn classical(&self, y: f64) -> Complex64 {
        let sum: Complex64 = self
            .config
            .slits()
            .centers
            .iter()
            .map(|&c| classical_slit_transverse(self.config, c, self.t, y))
            .sum();
        sum * self.phase
    }

    pub fn nonclassical(&self, y: f64) -> Complex64 {
        let sum: Complex64 = self
            .pairs
            .iter()
            .map(|(si, sj, kin)| pair_transverse(self.config, kin, *si, *sj, self.t, y))
            .sum();
        sum * self.phase
    }

    /// Same value as [`wavefunction`] at `(x, y)`.
    pub fn evaluate(&self, y: f64, mode: Mode) -> Complex64 {
        let classical = self.classical(y);
        match mode {
            Mode::Classical => classical,
            Mode::Full if self.config.settings().include_nonclassical && !self.pairs.is_empty() => {
                classical + self.nonclassical(y)
            }
            Mode::Full => classical,
        }
    }
}
