use proptest::prelude::*;
use slitpath::config::parse_config;
use slitpath::model::{linspace, validate_config, ExperimentGeometry, SlitArray};
use slitpath::propagators::{classical_slit_amplitude, nonclassical_pair_amplitude};
use slitpath::{hop_time, Config, PairKinematics, PhysicalConstants, Point};

prop_compose! {
    fn valid_config()(
        l in 1e-3..1.0f64,
        x in 1e-3..1.0f64,
        vx in 1e6..2.5e8f64,
        b in 1e-8..1e-6f64,
        gaps in prop::collection::vec(4.01..40.0f64, 1..5),
        offset in -5.0..5.0f64,
    ) -> Config {
        let mut centers = vec![offset * b];
        for g in &gaps {
            centers.push(centers.last().unwrap() + g * b);
        }
        validate_config(
            PhysicalConstants::default(),
            ExperimentGeometry { source_distance: l, detector_distance: x, longitudinal_velocity: vx },
            SlitArray::new(centers, b),
        )
        .unwrap()
    }
}

proptest! {
    #[test]
    fn pair_kinematics_have_positive_real_parts(cfg in valid_config(), x_frac in 0.01..10.0f64) {
        let t = cfg.geometry().time_of(cfg.geometry().detector_distance * x_frac);
        for (si, sj) in cfg.slits().ordered_pairs() {
            let k = PairKinematics::new(&cfg, si, sj, t).unwrap();
            prop_assert!(k.tau > 0.0);
            prop_assert!(k.eta.re > 0.0);
            prop_assert!(k.beta.re > 0.0);
            prop_assert!(k.mu.re > 0.0);
        }
    }

    #[test]
    fn overlapping_slits_are_rejected(b in 1e-8..1e-6f64, frac in 0.01..1.0f64) {
        let err = validate_config(
            PhysicalConstants::default(),
            ExperimentGeometry { source_distance: 0.01, detector_distance: 0.01, longitudinal_velocity: 1.3e8 },
            SlitArray::new(vec![0.0, 4.0 * b * frac], b),
        )
        .unwrap_err();
        prop_assert!(err.has_field("centers"));
    }

    #[test]
    fn hop_time_is_symmetric_and_quadratic(a in -1e-5..1e-5f64, d in 1e-8..1e-5f64) {
        let c = PhysicalConstants::default();
        let t = hop_time(a, a + d, &c).unwrap();
        prop_assert_eq!(t, hop_time(a + d, a, &c).unwrap());
        let t2 = hop_time(2.0 * a, 2.0 * (a + d), &c).unwrap();
        prop_assert!((t2 / t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_linspace_mirrors_exactly(half in 1e-9..1e-3f64, n in 2usize..5000) {
        let v = linspace(-half, half, n);
        prop_assert_eq!(v.len(), n);
        prop_assert_eq!(v[0], -half);
        prop_assert_eq!(v[n - 1], half);
        for i in 0..n {
            prop_assert_eq!(v[i], -v[n - 1 - i]);
        }
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn amplitudes_are_mirror_symmetric(cfg in valid_config(), x_frac in 0.1..2.0f64, u in -3.0..3.0f64) {
        let x = cfg.geometry().detector_distance * x_frac;
        let centers = &cfg.slits().centers;
        let y = u * (centers[centers.len() - 1] - centers[0]);
        let mirrored = mirrored(&cfg);
        for &c in centers {
            let a = classical_slit_amplitude(&cfg, c, Point::new(x, y)).unwrap().norm();
            let b = classical_slit_amplitude(&mirrored, -c, Point::new(x, -y)).unwrap().norm();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(b));
        }
        let (si, sj) = (centers[0], centers[1]);
        let a = nonclassical_pair_amplitude(&cfg, si, sj, Point::new(x, y)).unwrap().norm();
        let b = nonclassical_pair_amplitude(&mirrored, -si, -sj, Point::new(x, -y)).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(b));
    }

    #[test]
    fn config_echo_round_trips(cfg in valid_config()) {
        let text = cfg.echo_lines().join("\n");
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}

fn mirrored(cfg: &Config) -> Config {
    let mut centers: Vec<f64> = cfg.slits().centers.iter().map(|c| -c).collect();
    centers.reverse();
    validate_config(*cfg.constants(), *cfg.geometry(), SlitArray::new(centers, cfg.slits().half_width)).unwrap()
}
