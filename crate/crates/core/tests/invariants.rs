use proptest::prelude::*;
use qcpower_core::cluster::{phase_error_rate, ClusterPattern};
use qcpower_core::distill::{distill_channel, p_delete, povm_lossy, povm_standard};
use qcpower_core::grid::linspace_step;
use qcpower_core::models::{build_unit_hamiltonian, deformation_parameter, parameter_for_deformation};
use qcpower_core::pauli::{twirl, PauliClass, PauliErrorDistribution};
use qcpower_core::percolation::{
    spans, KCurve, KPoint, KSource, LatticeKind, LatticeSpec, LOSS_TOLERANCE_2D,
};
use qcpower_core::phase::{cluster_rates, evaluate_point, sweep, Dim, DEFAULT_TOL};
use qcpower_core::spin::{hermiticity_defect, max_abs};
use qcpower_core::thermal::thermal_state;
use qcpower_core::{Model, ModelParams};

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Xxz), Just(Model::Aniso)]
}

/// Parameters with an entangled ground state.
fn entangled() -> impl Strategy<Value = ModelParams> {
    (model(), -1.95f64..4.0).prop_map(|(m, p)| ModelParams::new(m, p))
}

fn distribution() -> impl Strategy<Value = [f64; 16]> {
    prop::array::uniform16(0.0f64..1.0)
}

fn flat_kcurve() -> KCurve {
    let points = [0.0, 0.2, 0.45]
        .iter()
        .map(|&p_l| KPoint {
            p_l,
            k: 0.5,
            stderr: 0.0,
        })
        .collect();
    KCurve::from_points(points, KSource::Table { path: "flat".into() }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_hermitian(m in model(), p in -4.0f64..4.0) {
        let h = build_unit_hamiltonian(&ModelParams::new(m, p)).unwrap().matrix;
        prop_assert!(hermiticity_defect(&h) < 1e-12);
    }

    #[test]
    fn thermal_state_is_a_density_matrix(m in model(), p in -4.0f64..4.0, t in 0.0f64..5.0) {
        let rho = thermal_state(&ModelParams::new(m, p), t).unwrap().rho;
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermiticity_defect(&rho) < 1e-12);
        let min = rho.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(min > -1e-12);
    }

    #[test]
    fn povm_complete(a in 0.01f64..6.0) {
        let set = if 3.0 * a * a >= 1.0 { povm_standard(a) } else { povm_lossy(a) }.unwrap();
        prop_assert!(set.completeness_defect() < 1e-12);
    }

    #[test]
    fn twirl_is_idempotent(params in entangled(), t in 0.0f64..1.0) {
        let state = thermal_state(&params, t).unwrap();
        let a = deformation_parameter(&params).unwrap();
        let ghz = distill_channel(&state, a).unwrap();
        let once = twirl(&ghz.rho16);
        prop_assert!(max_abs(&(twirl(&once) - &once)) < 1e-12);
    }

    #[test]
    fn class_probabilities_form_a_distribution(params in entangled(), t in 0.0f64..2.0) {
        let (dist, rates) = cluster_rates(&params, t).unwrap();
        prop_assert!((dist.total() - 1.0).abs() < 1e-9);
        prop_assert!(dist.probs.iter().all(|&p| p > -1e-12));
        prop_assert!((0.0..=1.0).contains(&dist.p_s));
        prop_assert!(rates.p_z >= -1e-12 && rates.p_l >= 0.0);
    }

    #[test]
    fn phase_rate_is_linear(a in distribution(), b in distribution(), x in 0.0f64..2.0, y in 0.0f64..2.0) {
        let mk = |probs| PauliErrorDistribution { probs, p_s: 1.0 };
        let mut mixed = [0.0; 16];
        for i in 0..16 {
            mixed[i] = x * a[i] + y * b[i];
        }
        let lhs = phase_error_rate(&mk(mixed));
        let rhs = x * phase_error_rate(&mk(a)) + y * phase_error_rate(&mk(b));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn phase_rate_ignores_unlisted_classes(a in distribution(), noise in distribution()) {
        use PauliClass::*;
        let base = PauliErrorDistribution { probs: a, p_s: 1.0 };
        let mut perturbed = base.clone();
        for class in [I, X0, Z0X0, X1X2, Z0X1X2, X2X3, Z0X2X3, X1X3, Z0X1X3] {
            perturbed.set(class, noise[class as usize]);
        }
        prop_assert_eq!(phase_error_rate(&base), phase_error_rate(&perturbed));
    }

    #[test]
    fn phase_rate_grows_with_temperature(t1 in 0.01f64..1.0, dt in 0.01f64..1.0) {
        let params = ModelParams::xxz(0.0);
        let (_, lo) = cluster_rates(&params, t1).unwrap();
        let (_, hi) = cluster_rates(&params, t1 + dt).unwrap();
        prop_assert!(hi.p_z >= lo.p_z - 1e-15);
    }

    #[test]
    fn zero_temperature_success_matches_p_delete(a in 0.34f64..0.577) {
        let params = ModelParams::xxz(parameter_for_deformation(a).unwrap());
        let (dist, _) = cluster_rates(&params, 0.0).unwrap();
        prop_assert!((dist.p_s - (1.0 - p_delete(a))).abs() < 1e-10);
    }

    #[test]
    fn deformation_round_trips(p in -1.99f64..6.0) {
        let a = deformation_parameter(&ModelParams::aniso(p)).unwrap();
        prop_assert!((parameter_for_deformation(a).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn canonical_pattern_is_idempotent(x in 0u8..32, z in 0u8..32) {
        let p = ClusterPattern { x, z };
        prop_assert_eq!(p.canonical().canonical(), p.canonical());
        prop_assert!(p.equivalent(p.canonical()));
        prop_assert_eq!(p.compose(p), ClusterPattern::IDENTITY);
    }

    #[test]
    fn spanning_is_monotone(kind_idx in 0usize..3, bits in prop::collection::vec(any::<bool>(), 512), extra in prop::collection::vec(any::<bool>(), 512)) {
        let lattice = LatticeSpec::new(LatticeKind::ALL[kind_idx], 8).unwrap().build();
        let n = lattice.num_sites();
        let occ: Vec<bool> = bits.iter().cycle().take(n).cloned().collect();
        let more: Vec<bool> = occ.iter().zip(extra.iter().cycle()).map(|(&a, &b)| a || b).collect();
        if spans(&lattice, &occ) {
            prop_assert!(spans(&lattice, &more));
        }
    }

    #[test]
    fn universal_2d_implies_percolating_lattice(d in -1.99f64..0.0) {
        let params = ModelParams::xxz(d);
        let point = evaluate_point(&params, 0.0, Some(&flat_kcurve())).unwrap();
        if point.universal_2d {
            let a = deformation_parameter(&params).unwrap();
            prop_assert!(p_delete(a) <= 1.0 - LatticeKind::Honeycomb.known_threshold());
            prop_assert!(point.p_l <= LOSS_TOLERANCE_2D);
        }
    }
}

#[test]
fn universality_is_monotone_in_temperature() {
    let params = linspace_step(-2.5, 2.0, 0.5).unwrap();
    let temps = linspace_step(0.0, 0.5, 0.025).unwrap();
    let kc = flat_kcurve();
    for (dim, k) in [(Dim::Two, Some(&kc)), (Dim::Three, None)] {
        for model in [Model::Xxz, Model::Aniso] {
            let diagram = sweep(model, &params, &temps, dim, k, DEFAULT_TOL).unwrap();
            for row in diagram.grid.chunks(temps.len()) {
                let flags: Vec<bool> = row.iter().map(|p| p.universal(dim)).collect();
                assert!(flags.windows(2).all(|w| w[0] || !w[1]), "{model} {}", row[0].params.param);
            }
        }
    }
}

#[test]
fn neglected_classes_stay_small_at_the_boundary() {
    let params = linspace_step(-1.9, 2.0, 0.1).unwrap();
    for model in [Model::Xxz, Model::Aniso] {
        for dim in [Dim::Two, Dim::Three] {
            let diagram = sweep(model, &params, &[], dim, Some(&flat_kcurve()), DEFAULT_TOL).unwrap();
            for b in &diagram.boundary {
                if let Some(dist) = b.point.as_ref().and_then(|p| p.distribution.as_ref()) {
                    assert!(dist.neglected_share() < 0.03, "{model} {dim} {}: {}", b.param, dist.neglected_share());
                }
            }
        }
    }
}

#[test]
fn ferromagnetic_side_never_universal() {
    for d in linspace_step(-4.0, -2.0, 0.25).unwrap() {
        for t in [0.0, 0.05, 0.2] {
            let p = evaluate_point(&ModelParams::xxz(d), t, Some(&flat_kcurve())).unwrap();
            assert!(!p.universal_2d && !p.universal_3d);
        }
    }
}
