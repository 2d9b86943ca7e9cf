//! Frozen reference amplitudes from `tests/oracles/reference_values.py`
//! (40-digit quadrature of the kernel products).

mod common;

use num_complex::Complex64;
use slitpath::propagators::{
    classical_slit_amplitude, classical_slit_amplitude_quadrature, classical_slit_transverse,
    longitudinal_phase, nonclassical_pair_transverse,
};
use slitpath::{hop_time, Point};

use common::{constants, rel, three_slit};

#[test]
fn hop_time_for_one_micron() {
    let tau = hop_time(-0.5e-6, 0.5e-6, &constants()).unwrap();
    assert!((tau - 1.2215966487867678e-8).abs() / tau < 1e-12);
    // By hand: 1e-12 m^2 * 1.41421356 * 9.1093837e-31 kg / 1.05457182e-34 J s.
    assert!((tau - 1.2216e-8).abs() < 1e-12);
}

#[test]
fn classical_on_axis_far_tail() {
    let cfg = three_slit();
    let t = cfg.geometry().time_of(0.01);
    let got = classical_slit_transverse(&cfg, 1e-6, t, 0.0);
    let want = Complex64::new(-2.301299250430109e-15, 2.1850560743126077e-15);
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

#[test]
fn classical_inside_the_beam() {
    let cfg = three_slit();
    let t = cfg.geometry().time_of(0.005);
    let got = classical_slit_transverse(&cfg, 0.0, t, 0.3e-6);
    let want = Complex64::new(98315.446883176088, -19260.699058619699);
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

#[test]
fn classical_quadrature_matches_reference_inside_the_beam() {
    let cfg = three_slit();
    let p = Point::new(0.005, 0.3e-6);
    let want = Complex64::new(98315.446883176088, -19260.699058619699) * longitudinal_phase(&cfg, p.x);
    let quad = classical_slit_amplitude_quadrature(&cfg, 0.0, p).unwrap();
    let closed = classical_slit_amplitude(&cfg, 0.0, p).unwrap();
    assert!(rel(quad, want) < 1e-8);
    assert!(rel(closed, want) < 1e-8);
}

#[test]
fn nonclassical_centre_to_neighbour() {
    let cfg = three_slit();
    let t = cfg.geometry().time_of(0.01);
    let got = nonclassical_pair_transverse(&cfg, 0.0, 1e-6, t, 1e-6).unwrap();
    let want = Complex64::new(-14140.523126558439, -89414.652351101107);
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

#[test]
fn nonclassical_outer_to_centre_off_beam() {
    let cfg = three_slit();
    let t = cfg.geometry().time_of(0.01);
    let got = nonclassical_pair_transverse(&cfg, -1e-6, 0.0, t, 0.5e-6).unwrap();
    let want = Complex64::new(0.00086644848498731302, 0.00043508224642506845);
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}
