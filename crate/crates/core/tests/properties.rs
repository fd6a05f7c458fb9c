use amu_spectra::amu::{ground_state, joint_diagonalize, superpose, Localizer};
use amu_spectra::calculus::{theta_product, ThetaEngine};
use amu_spectra::linalg::{eig_hermitian, operator_norm, ComplexMatrix, HermitianMatrix};
use amu_spectra::models::{read_tuple, write_tuple, Format};
use amu_spectra::observables::{amu_check, measure, OperatorTuple, VectorState};
use amu_spectra::random::{random_hermitian, SplitMix64};
use amu_spectra::spectrum::{directed_hausdorff, hausdorff, scan, GridSpec};
use amu_spectra::{Certificate, Spectrum, C};
use proptest::prelude::*;

fn point_set(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), 1..10)
}

fn random_tuple(seed: u64, n: usize, dim: usize) -> OperatorTuple<f64> {
    let mut rng = SplitMix64::new(seed);
    OperatorTuple::new((0..n).map(|_| random_hermitian(&mut rng, dim)).collect()).unwrap()
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric(x in point_set(2), y in point_set(2), z in point_set(2)) {
        let dxy = hausdorff(&x, &y).unwrap();
        prop_assert_eq!(dxy, hausdorff(&y, &x).unwrap());
        prop_assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);
        prop_assert!(dxy >= 0.0);
        prop_assert!(hausdorff(&x, &z).unwrap() <= dxy + hausdorff(&y, &z).unwrap() + 1e-12);
        prop_assert!(directed_hausdorff(&x, &y).unwrap() <= dxy);
    }

    #[test]
    fn hausdorff_ignores_duplicates_and_order(x in point_set(3)) {
        let mut y = x.clone();
        y.reverse();
        y.push(x[0].clone());
        prop_assert_eq!(hausdorff(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn variance_is_dominated_by_energy(seed in any::<u64>(), n in 1usize..4, dim in 2usize..10,
                                      l in prop::collection::vec(-2.0f64..2.0, 3)) {
        let t = random_tuple(seed, n, dim);
        let (v, energy) = ground_state(&t, &l[..n]).unwrap();
        prop_assert!(measure(&t, &v).unwrap().total_variance() <= energy + 1e-10);
    }

    #[test]
    fn theta_norm_is_a_contraction(seed in any::<u64>(), x in -1.5f64..1.5, y in -1.5f64..1.5, eta in 0.05f64..0.95) {
        let t = random_tuple(seed, 2, 6);
        let p = theta_product(&t, &[x, y], eta).unwrap();
        let nrm = p.norm();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&nrm));
        let engine = ThetaEngine::new(&t).unwrap();
        prop_assert!((engine.theta_norm(&[x, y], eta).unwrap() - nrm).abs() < 1e-9);
    }

    #[test]
    fn tuple_round_trip(seed in any::<u64>(), n in 1usize..4, dim in 1usize..7) {
        let t = random_tuple(seed, n, dim);
        for format in [Format::Json, Format::Binary] {
            let mut buf = Vec::new();
            write_tuple(&mut buf, &t, None, format).unwrap();
            let back = read_tuple(&buf).unwrap().tuple;
            prop_assert_eq!(back.ops(), t.ops());
        }
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..24) {
        let a = random_tuple(seed, 1, dim).into_ops().remove(0);
        let e = eig_hermitian(&a).unwrap();
        prop_assert!(e.reconstruct().sub(a.as_matrix()).max_abs() < 1e-10);
    }
}

#[test]
fn spectrum_json_round_trip_is_bit_exact() {
    let t = random_tuple(42, 2, 5);
    let r = scan(&t, 0.45).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: Spectrum = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    for (a, b) in back.accepted.iter().zip(&r.accepted) {
        assert_eq!(a.norm.to_bits(), b.norm.to_bits());
    }
}

#[test]
fn certificate_json_uses_interleaved_state() {
    let t = random_tuple(5, 2, 3);
    let cert = amu_check(&t, &VectorState::basis(3, 1), &[0.0, 0.0], 1.0, 1.0).unwrap();
    let v = serde_json::to_value(&cert).unwrap();
    assert_eq!(v["state"], serde_json::json!([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]));
    let back: Certificate = serde_json::from_value(v).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn f32_pipeline_runs() {
    let t: OperatorTuple<f32> = random_tuple(8, 2, 6).cast();
    let r = scan(&t, 0.5f32).unwrap();
    assert!(!r.is_empty());
    let (v, energy) = ground_state(&t, &[0.0f32, 0.0]).unwrap();
    assert!(measure(&t, &v).unwrap().total_variance() <= energy + 1e-4);
}

#[test]
fn grid_lattice_points_lie_in_box() {
    let g = GridSpec::<f64>::for_eta(2, 1.3, 0.6).unwrap();
    for p in g.points() {
        assert!(p.iter().all(|x| x.abs() <= 1.3 + 1e-12));
    }
}

/// End to end: scan, certify each accepted point, then superpose certificates at
/// different joint eigenvalues onto their midpoint.
#[test]
fn commuting_pipeline() {
    let mut rng = SplitMix64::new(77);
    let u = amu_spectra::random::random_unitary::<f64>(&mut rng, 5);
    let conj = |d: &[f64]| {
        let mut m = u.clone();
        m.scale_cols(d);
        HermitianMatrix::symmetrize(&m.matmul(&u.adjoint()))
    };
    let t = OperatorTuple::new(vec![conj(&[0.6, -0.6, 0.0, 0.6, -0.6]), conj(&[0.6, 0.6, 0.0, -0.6, -0.6])]).unwrap();
    let spec = scan(&t, 0.3).unwrap();
    for z in [[0.6, 0.6], [-0.6, 0.6], [0.0, 0.0]] {
        assert!(spec.covers(&z));
    }
    let loc = Localizer::new(&t);
    let certs: Vec<_> = [[0.6, 0.6], [-0.6, -0.6]]
        .iter()
        .map(|l| loc.amu_at(l, 1e-6, 1e-6).unwrap())
        .collect();
    assert!(certs.iter().all(|c| c.certified()));
    let plan = superpose(&t, &certs, &[0.0, 0.0]).unwrap();
    assert!(plan.gap < 1e-9);
    let dec = joint_diagonalize(&t, 50, 1e-14, 0.1).unwrap();
    assert!(dec.residual < 1e-8);
    assert_eq!(dec.clusters.len(), 5);
}

#[test]
fn operator_norm_of_shifted_identity() {
    let a = ComplexMatrix::<f64>::identity(4).scale(C::new(0.0, -3.0));
    assert!((operator_norm(&a) - 3.0).abs() < 1e-12);
}
