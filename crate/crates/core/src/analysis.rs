//! Velocity deviation caused by nonclassical paths.
//!
//! The relative deviation `|v_full - v_c| / |v_c|` diverges wherever the
//! classical velocity crosses zero. Samples with `|v_c|` below the velocity
//! floor are kept but marked undefined; local maxima there are reported as
//! spikes, local maxima above the floor as peaks. The headline number is
//! the largest peak.

use rayon::prelude::*;
use serde::Serialize;

use crate::bohmian::velocity_profile;
use crate::error::{Error, Result};
use crate::model::{Config, DeviationReport, GridSpec};
use crate::propagators::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub y: f64,
    pub v_classical: Option<f64>,
    pub v_full: Option<f64>,
    /// `v_full - v_classical`.
    pub abs_diff: Option<f64>,
    /// `|v_full - v_classical| / |v_classical|`, computed even below the velocity
    /// floor; `None` only when a velocity is undefined or the ratio is `0/0`.
    pub rel_diff: Option<f64>,
    /// Both velocities defined and `|v_classical|` at or above the floor.
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationProfile {
    pub x: f64,
    pub samples: Vec<ProfileSample>,
    /// Absolute velocity floor, m/s.
    pub velocity_floor: f64,
}

impl DeviationProfile {
    /// Largest relative deviation over floor-defined samples.
    pub fn max_defined_relative(&self) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| s.defined)
            .filter_map(|s| s.rel_diff)
            .reduce(f64::max)
    }

    pub fn max_abs_classical(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.v_classical)
            .fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Classical and full velocities along the line at distance `x`, and their difference.
///
/// The velocity floor is `velocity_floor_rel * max |v_c|` over the line.
pub fn deviation_profile(config: &Config, x: f64, y_samples: &[f64]) -> Result<DeviationProfile> {
    if let Some(bad) = y_samples.iter().find(|y| !y.is_finite()) {
        return Err(Error::Domain(format!("non-finite y sample {bad}")));
    }
    let classical = velocity_profile(config, x, y_samples, Mode::Classical)?;
    let full = velocity_profile(config, x, y_samples, Mode::Full)?;
    let v_max = classical.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    let floor = config.settings().velocity_floor_rel * v_max;

    let samples = y_samples
        .iter()
        .zip(classical.iter().zip(&full))
        .map(|(&y, (&vc, &vf))| {
            let abs_diff = vc.zip(vf).map(|(c, f)| f - c);
            let rel_diff = vc.zip(abs_diff).and_then(|(c, d)| {
                let r = d.abs() / c.abs();
                (!r.is_nan()).then_some(r)
            });
            let defined = matches!((vc, rel_diff), (Some(c), Some(r)) if c.abs() >= floor && r.is_finite());
            ProfileSample {
                y,
                v_classical: vc,
                v_full: vf,
                abs_diff,
                rel_diff,
                defined,
            }
        })
        .collect();
    Ok(DeviationProfile {
        x,
        samples,
        velocity_floor: floor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpikeOptions {
    /// Apply a 3-sample running median to the relative deviation first.
    pub median_filter: bool,
}

/// Spikes and peaks of the relative deviation with the default options.
pub fn find_spikes_and_peaks(profile: &DeviationProfile, velocity_floor: f64) -> Result<DeviationReport> {
    find_spikes_and_peaks_with(profile, velocity_floor, SpikeOptions::default())
}

/// Local maxima are interior samples strictly above the left neighbour and
/// not below the right one.
pub fn find_spikes_and_peaks_with(
    profile: &DeviationProfile,
    velocity_floor: f64,
    options: SpikeOptions,
) -> Result<DeviationReport> {
    let samples = &profile.samples;
    if samples.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let raw: Vec<Option<f64>> = samples.iter().map(|s| s.rel_diff).collect();
    let rel = if options.median_filter { median3(&raw) } else { raw };

    let mut spikes = Vec::new();
    let mut peaks = Vec::new();
    let mut max_peak = 0.0_f64;
    for i in 1..samples.len().saturating_sub(1) {
        let (Some(l), Some(c), Some(r)) = (rel[i - 1], rel[i], rel[i + 1]) else {
            continue;
        };
        if !(c > l && c >= r) {
            continue;
        }
        let Some(vc) = samples[i].v_classical else {
            continue;
        };
        if vc.abs() < velocity_floor {
            spikes.push(samples[i].y);
        } else {
            peaks.push(samples[i].y);
            max_peak = max_peak.max(c);
        }
    }
    spikes.sort_by(f64::total_cmp);
    peaks.sort_by(f64::total_cmp);
    Ok(DeviationReport {
        max_relative_deviation: max_peak,
        peak_positions: peaks,
        spike_positions: spikes,
        velocity_floor_used: velocity_floor,
    })
}

fn median3(values: &[Option<f64>]) -> Vec<Option<f64>> {
    (0..values.len())
        .map(|i| {
            if i == 0 || i + 1 == values.len() {
                return values[i];
            }
            match (values[i - 1], values[i], values[i + 1]) {
                (Some(a), Some(b), Some(c)) => {
                    let mut w = [a, b, c];
                    w.sort_by(f64::total_cmp);
                    Some(w[1])
                }
                _ => values[i],
            }
        })
        .collect()
}

/// Relative deviation over a 2-D grid, one [`deviation_profile`] per `x` column.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMap {
    pub spec: GridSpec,
    /// Relative deviation per node (row-major, `x` outer); `NaN` where not computable.
    pub rel_diff: Vec<f64>,
    pub defined: Vec<bool>,
    /// Largest defined relative deviation in each column.
    pub column_max: Vec<Option<f64>>,
}

impl DeviationMap {
    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        let k = self.spec.index(ix, iy);
        self.defined[k].then_some(self.rel_diff[k])
    }
}

pub fn deviation_density_map(config: &Config, grid: &GridSpec) -> Result<DeviationMap> {
    let ys = grid.ys();
    let profiles = grid
        .xs()
        .into_par_iter()
        .map(|x| deviation_profile(config, x, &ys))
        .collect::<Result<Vec<_>>>()?;

    let mut rel_diff = Vec::with_capacity(grid.len());
    let mut defined = Vec::with_capacity(grid.len());
    let mut column_max = Vec::with_capacity(grid.nx);
    for p in &profiles {
        column_max.push(p.max_defined_relative());
        for s in &p.samples {
            rel_diff.push(s.rel_diff.unwrap_or(f64::NAN));
            defined.push(s.defined);
        }
    }
    Ok(DeviationMap {
        spec: *grid,
        rel_diff,
        defined,
        column_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(y: f64, vc: f64, d: f64, floor: f64) -> ProfileSample {
        let r = d.abs() / vc.abs();
        ProfileSample {
            y,
            v_classical: Some(vc),
            v_full: Some(vc + d),
            abs_diff: Some(d),
            rel_diff: (!r.is_nan()).then_some(r),
            defined: vc.abs() >= floor && r.is_finite(),
        }
    }

    #[test]
    fn single_zero_crossing_gives_one_spike() {
        // v_c = y crosses zero at y = 0.013; the difference is smooth and nonzero there.
        let floor = 0.01;
        let samples: Vec<_> = (0..101)
            .map(|i| {
                let y = -0.487 + 0.01 * i as f64;
                sample(y, y - 0.013, 1e-3 * (1.0 + y * y), floor)
            })
            .collect();
        let profile = DeviationProfile {
            x: 0.01,
            samples,
            velocity_floor: floor,
        };
        let report = find_spikes_and_peaks(&profile, floor).unwrap();
        assert_eq!(report.spike_positions.len(), 1, "{report:?}");
        assert!((report.spike_positions[0] - 0.013).abs() < 0.006);
        assert!(report.peak_positions.is_empty());
        assert_eq!(report.max_relative_deviation, 0.0);
    }

    #[test]
    fn finite_bump_is_a_peak() {
        let floor = 0.01;
        let samples: Vec<_> = (0..51)
            .map(|i| {
                let y = -1.0 + 0.04 * i as f64;
                sample(y, 2.0, 1e-3 * (-(y - 0.2) * (y - 0.2) * 10.0).exp(), floor)
            })
            .collect();
        let profile = DeviationProfile {
            x: 0.01,
            samples,
            velocity_floor: floor,
        };
        let report = find_spikes_and_peaks(&profile, floor).unwrap();
        assert!(report.spike_positions.is_empty());
        assert_eq!(report.peak_positions.len(), 1);
        assert!((report.peak_positions[0] - 0.2).abs() < 1e-12);
        assert!((report.max_relative_deviation - 5e-4).abs() < 1e-15);
    }

    #[test]
    fn empty_profile_is_an_error() {
        let profile = DeviationProfile {
            x: 0.01,
            samples: vec![],
            velocity_floor: 0.0,
        };
        assert!(matches!(find_spikes_and_peaks(&profile, 0.0), Err(Error::EmptyProfile)));
    }

    #[test]
    fn median_filter_removes_isolated_outlier() {
        let floor = 0.01;
        let mut samples: Vec<_> = (0..9).map(|i| sample(i as f64, 1.0, 1e-3, floor)).collect();
        samples[4] = sample(4.0, 1.0, 5e-3, floor);
        let profile = DeviationProfile {
            x: 0.01,
            samples,
            velocity_floor: floor,
        };
        let plain = find_spikes_and_peaks(&profile, floor).unwrap();
        assert_eq!(plain.peak_positions, vec![4.0]);
        let filtered = find_spikes_and_peaks_with(&profile, floor, SpikeOptions { median_filter: true }).unwrap();
        assert!(filtered.peak_positions.is_empty());
    }
}
