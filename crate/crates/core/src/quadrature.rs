//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.
//!
//! Panels are bisected worst-first until the summed `|K15 - G7|` estimate
//! drops below `tolerance * |I|`, or below the round-off floor
//! `ROUNDOFF * integral(|f|)` when the integral is dominated by
//! cancellation. A panel that would have to be split beyond `max_depth`
//! bisections is a convergence failure.

use std::cell::RefCell;

use num_complex::Complex64;

use crate::error::{Error, Result, ValidationError};

/// Achievable accuracy relative to `integral(|f|)` in double precision.
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Target error relative to the magnitude of the integral.
    pub tolerance: f64,
    /// Maximum number of bisections applied to any one panel.
    pub max_depth: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            tolerance: 1e-10,
            max_depth: 24,
        }
    }
}

impl QuadratureSettings {
    pub(crate) fn check(&self) -> std::result::Result<(), &'static str> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err("quadrature tolerance must lie in (0, 1)");
        }
        if self.max_depth == 0 || self.max_depth > 60 {
            return Err("quadrature depth must lie in 1..=60");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Summed `|K15 - G7|` over the final panels.
    pub error: f64,
    /// `integral(|f|)`, the scale against which round-off is judged.
    pub abs_integral: f64,
    /// Deepest bisection level used.
    pub depth: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: usize,
    value: Complex64,
    error: f64,
    abs_value: f64,
}

fn kronrod_panel<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, depth: usize) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod += pair * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    Panel {
        a,
        b,
        depth,
        value,
        error: ((kronrod - gauss) * half).norm(),
        abs_value: abs_sum * half.abs(),
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<QuadResult> {
    check_interval(a, b)?;
    let mut panels = vec![kronrod_panel(&mut f, a, b, 0)];
    let mut evaluations = 15;
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let abs_integral: f64 = panels.iter().map(|p| p.abs_value).sum();
        let target = (settings.tolerance * value.norm()).max(ROUNDOFF * abs_integral);
        let depth = panels.iter().map(|p| p.depth).max().unwrap_or(0);
        if error <= target || !error.is_finite() && !value.is_nan() && error.is_nan() {
            return Ok(QuadResult {
                value,
                error,
                abs_integral,
                depth,
                evaluations,
            });
        }
        if !error.is_finite() {
            return Err(Error::NonConvergence {
                achieved: error,
                requested: target,
                depth,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let panel = panels.swap_remove(worst);
        if panel.depth >= settings.max_depth {
            return Err(Error::NonConvergence {
                achieved: error,
                requested: target,
                depth: panel.depth,
            });
        }
        let mid = 0.5 * (panel.a + panel.b);
        panels.push(kronrod_panel(&mut f, panel.a, mid, panel.depth + 1));
        panels.push(kronrod_panel(&mut f, mid, panel.b, panel.depth + 1));
        evaluations += 30;
    }
}

/// Iterated integral `int_{u0}^{u1} du int_{v0}^{v1} dv f(u, v)`.
///
/// The inner integrals run at a tenth of the outer tolerance. The reported
/// error adds the outer estimate to the inner estimates integrated over `u`.
pub fn integrate_2d<F: Fn(f64, f64) -> Complex64>(
    f: F,
    (u0, u1): (f64, f64),
    (v0, v1): (f64, f64),
    settings: &QuadratureSettings,
) -> Result<QuadResult> {
    check_interval(u0, u1)?;
    check_interval(v0, v1)?;
    let inner_settings = QuadratureSettings {
        tolerance: settings.tolerance * 0.1,
        max_depth: settings.max_depth,
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_stats = RefCell::new((0.0_f64, 0_usize, 0_usize));

    let outer = integrate(
        |u| {
            if failure.borrow().is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match integrate(|v| f(u, v), v0, v1, &inner_settings) {
                Ok(r) => {
                    let mut s = inner_stats.borrow_mut();
                    s.0 = s.0.max(r.error);
                    s.1 = s.1.max(r.depth);
                    s.2 += r.evaluations;
                    r.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        u0,
        u1,
        settings,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let (inner_err, inner_depth, inner_evals) = inner_stats.into_inner();
    Ok(QuadResult {
        value: outer.value,
        error: outer.error + inner_err * (u1 - u0),
        abs_integral: outer.abs_integral,
        depth: outer.depth.max(inner_depth),
        evaluations: inner_evals,
    })
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && b > a {
        Ok(())
    } else {
        let mut err = ValidationError::default();
        err.push(
            "window",
            format!("[{a:e}, {b:e}]"),
            "integration window must be finite with positive width",
        );
        Err(err.into())
    }
}
