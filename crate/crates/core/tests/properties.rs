use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use riscorr_core::channel::LinkKind;
use riscorr_core::correlation::{
    build_groups, circular_distance_deg, correlate, pairwise_max_differences, GroupingMode,
    PairMode,
};
use riscorr_core::link::achievable_rate;
use riscorr_core::*;

fn carrier() -> CarrierConfig<f64> {
    CarrierConfig::new(5.0, 1e6).unwrap()
}

fn geometry(phi_bs: f64, theta_bs: f64, theta_ue: f64, phi_ue: f64) -> LinkGeometry<f64> {
    LinkGeometry::from_alpha(100.0, 20.0, 20.0)
        .unwrap()
        .with_angles(phi_bs, theta_bs, theta_ue)
        .with_ue_azimuth(phi_ue)
}

fn random_plan(rows: usize, cols: usize, q: usize) -> impl Strategy<Value = SteeringPlan<f64>> {
    prop::collection::vec(prop::collection::vec(0.0..2.0 * PI, rows * cols), q).prop_map(
        move |cws| {
            let arr = PlanarArray::new(rows, cols).unwrap();
            SteeringPlan {
                crossing_angles_deg: (0..cws.len()).map(|i| i as f64).collect(),
                codewords: cws
                    .into_iter()
                    .map(|p| PhaseShiftMatrix::new(arr, p, 0.0).unwrap())
                    .collect(),
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn los_vectors_are_unit_modulus(
        phi_bs in -90.0..90.0, theta_bs in -90.0..90.0, theta_ue in -90.0..90.0,
        phi_ue in -80.0..80.0, n in 1usize..64,
    ) {
        let g = geometry(phi_bs, theta_bs, theta_ue, phi_ue);
        for v in [los_vector_bs_ris(&g, &carrier(), n).unwrap(), los_vector_ris_ue(&g, &carrier(), n).unwrap()] {
            prop_assert_eq!(v.len(), n);
            prop_assert_eq!(v.coefficients[0], Complex64::new(1.0, 0.0));
            for h in &v.coefficients {
                prop_assert!((h.norm() - 1.0).abs() < 1e-12);
            }
        }
        let arr = PlanarArray::new(1 + n % 5, 1 + n / 5).unwrap();
        let v = planar_los_ris_ue(&g, &carrier(), arr);
        prop_assert_eq!(v.coefficients[0], Complex64::new(1.0, 0.0));
        prop_assert!(v.coefficients.iter().all(|h| (h.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rician_draws_are_a_function_of_the_seed(seed in any::<u64>(), kappa in -10.0..30.0, pl in 0.0..120.0) {
        let los = ChannelVector { coefficients: vec![Complex64::new(1.0, 0.0); 8], kind: LinkKind::Los };
        prop_assert_eq!(sample_rician(&los, kappa, pl, seed).unwrap(), sample_rician(&los, kappa, pl, seed).unwrap());
    }

    #[test]
    fn law_of_cosines_symmetric_and_monotone(d1 in 1.0..500.0, d2 in 1.0..500.0, a in 0.0..179.0, da in 0.01..1.0) {
        let x: f64 = ris_ue_distance(d1, d2, a).unwrap();
        let y = ris_ue_distance(d2, d1, a).unwrap();
        prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        prop_assert!(ris_ue_distance(d1, d2, a + da).unwrap() >= x);
    }

    #[test]
    fn element_count_monotone(g in -20.0..120.0, dg in 0.0..5.0) {
        prop_assert!(required_elements(g).unwrap() <= required_elements(g + dg).unwrap());
    }

    #[test]
    fn square_side_bounds(n in 1usize..5_000_000) {
        let s = square_side(n).unwrap() as f64;
        let nf = n as f64;
        prop_assert!(s * s >= nf - 2.0 * nf.sqrt());
        prop_assert!(s * s <= nf + 2.0 * nf.sqrt() + 1.0);
        prop_assert!(s == nf.sqrt().floor() || s == nf.sqrt().ceil());
    }

    #[test]
    fn beamwidth_shrinks_with_side(n in 8usize..500) {
        let c = carrier();
        let a = beamwidth_deg(n, c.element_spacing_m(), c.wavelength_m).unwrap();
        let b = beamwidth_deg(n + 1, c.element_spacing_m(), c.wavelength_m).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn larger_margin_never_shrinks_the_surface(a in 0.0..10.0, extra in 0.0..10.0, case in 0usize..3) {
        let mut s = ScenarioConfig::<f64>::named(DeploymentCase::named()[case], 0.0).unwrap();
        s.deployment_case = DeploymentCase::Custom;
        let (_, da) = size_for_deployment(&s, a).unwrap();
        let (_, db) = size_for_deployment(&s, a + extra).unwrap();
        prop_assert!(da.n_z <= db.n_z);
    }

    #[test]
    fn pattern_ignores_global_phase(offset in -10.0..10.0, steer in -80.0..80.0) {
        let s = ScenarioConfig::<f64>::named(DeploymentCase::One, 6.0).unwrap();
        let arr = PlanarArray::new(5, 6).unwrap();
        let psi = matched_codeword(&s.geometry, &s.carrier, arr, steer).unwrap();
        let a = gain_pattern(&psi, &s.geometry, &s.carrier);
        let b = gain_pattern(&psi.rotated(offset), &s.geometry, &s.carrier);
        for (x, y) in a.gain_db.iter().zip(&b.gain_db) {
            if *x > -200.0 {
                prop_assert!((x - y).abs() < 1e-6);
            }
        }
        prop_assert_eq!(a.peak().0, b.peak().0);
    }

    #[test]
    fn matched_peak_is_n_squared(rows in 1usize..12, cols in 1usize..12, steer in -80i32..=80) {
        let s = ScenarioConfig::<f64>::named(DeploymentCase::Two, 6.0).unwrap();
        let arr = PlanarArray::new(rows, cols).unwrap();
        let psi = matched_codeword(&s.geometry, &s.carrier, arr, steer as f64).unwrap();
        let p = gain_pattern(&psi, &s.geometry, &s.carrier);
        let at = p.gain_db[(steer + 80) as usize];
        let n = (rows * cols) as f64;
        prop_assert!((db_to_linear(at) / (n * n) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn circular_distance_axioms(a in -1000.0..1000.0, b in -1000.0..1000.0, k in -5i32..5) {
        let d: f64 = circular_distance_deg(a, b);
        prop_assert!((0.0..=180.0).contains(&d));
        prop_assert!((d - circular_distance_deg(b, a)).abs() < 1e-9);
        prop_assert_eq!(circular_distance_deg(a, a), 0.0);
        prop_assert!((d - circular_distance_deg(a + 360.0 * k as f64, b)).abs() < 1e-9);
    }

    #[test]
    fn correlation_grows_with_threshold(plan in random_plan(3, 3, 3), t1 in 0.0..180.0_f64, dt in 0.0..180.0_f64) {
        let t2 = (t1 + dt).min(180.0_f64);
        let table = pairwise_max_differences(&plan, PairMode::AllPairs).unwrap();
        let a = correlate(table.clone(), t1).unwrap();
        let b = correlate(table, t2).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            prop_assert!(!x.correlated || y.correlated);
        }
        let ga = build_groups(&a, GroupingMode::Transitive).unwrap();
        let gb = build_groups(&b, GroupingMode::Transitive).unwrap();
        prop_assert!(gb.n_groups <= ga.n_groups);
    }

    #[test]
    fn shared_phase_stays_within_threshold(plan in random_plan(3, 4, 4), th in 0.0..180.0) {
        for mode in [PairMode::AllPairs, PairMode::WithinColumns] {
            let table = correlate(pairwise_max_differences(&plan, mode).unwrap(), th).unwrap();
            let groups = build_groups(&table, GroupingMode::Exact).unwrap();
            let mut covered = [false; 12];
            for psi in &plan.codewords {
                let shared = groups.apply(psi).unwrap();
                for k in 0..12 {
                    let d = circular_distance_deg(psi.phases[k].to_degrees(), shared.phases[k].to_degrees());
                    prop_assert!(d <= th + 1e-9);
                    covered[groups.group_of[k]] = true;
                }
            }
            prop_assert!(covered[..groups.n_groups].iter().all(|&c| c));
        }
    }

    #[test]
    fn panel_power_grows_with_units(side in 1usize..200) {
        let c = carrier();
        let p = PowerModelParams::default();
        let a = panel_power(DesignKind::FullMargin, &RisDimensions::square(side, &c).unwrap(), &p).unwrap();
        let b = panel_power(DesignKind::FullMargin, &RisDimensions::square(side + 1, &c).unwrap(), &p).unwrap();
        prop_assert!(b.p_total_w > a.p_total_w);
        let conn = panel_power(DesignKind::Connected, &RisDimensions::square(side + 1, &c).unwrap(), &p).unwrap();
        prop_assert!(conn.p_total_w < b.p_total_w);
        for x in [a, b, conn] {
            prop_assert!((x.p_total_w - (x.p_control_w + x.p_circuit_w + x.p_units_w)).abs() < 1e-12);
            prop_assert!((x.p_units_w - x.n_units as f64 * p.p_unit_w).abs() < 1e-12);
        }
    }

    #[test]
    fn dynamic_update_adds_a_fixed_term(panel in 0.0..500.0, n in 1usize..500) {
        let p = PowerModelParams::<f64>::default();
        let d: f64 = multi_config_power(panel, n, true, &p).unwrap() - multi_config_power(panel, n, false, &p).unwrap();
        prop_assert!((d - p.p_update_w).abs() < 1e-9);
    }

    #[test]
    fn rate_monotone_in_power(snr in 0.0..1e9, factor in 1.0..100.0) {
        prop_assert!(achievable_rate(snr * factor, 1e6).unwrap() >= achievable_rate(snr, 1e6).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn codeword_count_monotone_in_threshold(th in 20.0..34.0, dt in 0.0..2.0) {
        let s = ScenarioConfig::<f64>::named(DeploymentCase::One, 6.0).unwrap();
        let arr = PlanarArray::square(8).unwrap();
        let a = codeword_count(arr, &s.geometry, &s.carrier, th, &FullControl).unwrap();
        let b = codeword_count(arr, &s.geometry, &s.carrier, th + dt, &FullControl).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn sweep_leaves_no_coverage_gap(floor in 30.0..35.0) {
        let s = ScenarioConfig::<f64>::named(DeploymentCase::One, 6.0).unwrap();
        let arr = PlanarArray::square(8).unwrap();
        let plan = steering_sweep(arr, &s.geometry, &s.carrier, floor).unwrap();
        prop_assert!(plan.crossing_angles_deg.windows(2).all(|w| w[0] < w[1]));
        let patterns: Vec<_> = plan.codewords.iter().map(|c| gain_pattern(c, &s.geometry, &s.carrier)).collect();
        let last = *plan.crossing_angles_deg.last().unwrap();
        let mut gap = 0;
        for (i, a) in (-80..=80).enumerate() {
            if a as f64 > last {
                break;
            }
            if patterns.iter().any(|p| p.gain_db[i] >= floor) {
                gap = 0;
            } else {
                gap += 1;
                prop_assert!(gap <= 1, "uncovered run ending at {a} deg");
            }
        }
    }
}

#[test]
fn greedy_exact_grouping_can_split_more_at_higher_threshold() {
    // phases 0, -20, 10, -30 degrees: at 10 deg {0,2},{1,3}; at 20 deg greedy takes {0,1} first
    let arr = PlanarArray::new(1, 4).unwrap();
    let p: Vec<f64> = [0.0_f64, -20.0, 10.0, -30.0]
        .iter()
        .map(|d| d.to_radians())
        .collect();
    let plan = SteeringPlan {
        crossing_angles_deg: vec![0.0],
        codewords: vec![PhaseShiftMatrix::new(arr, p, 0.0).unwrap()],
    };
    let table = pairwise_max_differences(&plan, PairMode::AllPairs).unwrap();
    let at = |t: f64| {
        build_groups(&correlate(table.clone(), t).unwrap(), GroupingMode::Exact)
            .unwrap()
            .n_groups
    };
    assert_eq!(at(10.0 + 1e-9), 2);
    assert_eq!(at(20.0 + 1e-9), 3);
}
