use bergman_core::kernels_closed::{constant_weight_scale, disc_dpower_kernel, transport, unweighted_diagonal};
use bergman_core::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn disc_pt(r: f64) -> impl Strategy<Value = ComplexPoint> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| ComplexPoint::from_polar(r, t))
}

fn h_pt() -> impl Strategy<Value = ComplexPoint> {
    (-3.0..0.4f64, -3.0..3.0f64).prop_map(|(x, y)| cpt(x, y))
}

fn kernels() -> Vec<ClosedKernel> {
    vec![
        ClosedKernel::DiscUnweighted,
        disc_dpower_kernel(1),
        disc_dpower_kernel(2),
        constant_weight_scale(ClosedKernel::DiscUnweighted, 2.5).unwrap(),
        ClosedKernel::for_domain(&Domain::disc(cpt(0.1, -0.05), 1.3).unwrap()).unwrap(),
    ]
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_symmetry(z in disc_pt(0.95), w in disc_pt(0.95)) {
        for k in kernels() {
            let a = k.eval(z, w).unwrap();
            let b = k.eval(w, z).unwrap().conj();
            prop_assert!(rel(a, b) < 1e-13);
        }
    }

    #[test]
    fn half_plane_hermitian(z in h_pt(), w in h_pt()) {
        let k = ClosedKernel::HalfPlaneUnweighted;
        prop_assert!(rel(k.eval(z, w).unwrap(), k.eval(w, z).unwrap().conj()) < 1e-13);
    }

    #[test]
    fn positive_semidefinite(pts in proptest::collection::vec(disc_pt(0.9), 8)) {
        for k in kernels() {
            let m = DMatrix::from_fn(8, 8, |i, j| k.eval(pts[i], pts[j]).unwrap());
            let e = SymmetricEigen::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).eigenvalues;
            prop_assert!(e.min() >= -1e-10 * e.max().abs());
        }
    }

    #[test]
    fn derivatives_match_differences(z in disc_pt(0.7), w in disc_pt(0.7)) {
        let h = 1e-4;
        for k in kernels() {
            let f = |a: usize, b: usize, z: ComplexPoint, w: ComplexPoint| k.eval_derivative(a, b, z, w).unwrap();
            let dz = (f(0, 0, z + h, w) - f(0, 0, z - h, w)) / (2.0 * h);
            prop_assert!(rel(dz, f(1, 0, z, w)) < 1e-5);
            let dw = (f(0, 0, z, w + h) - f(0, 0, z, w - h)) / (2.0 * h);
            prop_assert!(rel(dw, f(0, 1, z, w)) < 1e-5);
            let dzz = (f(1, 0, z + h, w) - f(1, 0, z - h, w)) / (2.0 * h);
            prop_assert!(rel(dzz, f(2, 0, z, w)) < 1e-5);
            let dzw = (f(1, 0, z, w + h) - f(1, 0, z, w - h)) / (2.0 * h);
            prop_assert!(rel(dzw, f(1, 1, z, w)) < 1e-5);
            let dww = (f(0, 1, z, w + h) - f(0, 1, z, w - h)) / (2.0 * h);
            prop_assert!(rel(dww, f(0, 2, z, w)) < 1e-5);
        }
    }

    #[test]
    fn half_plane_derivatives_match_differences(z in h_pt(), w in h_pt()) {
        let k = ClosedKernel::HalfPlaneUnweighted;
        let h = 1e-4;
        let f = |a: usize, b: usize, z: ComplexPoint, w: ComplexPoint| k.eval_derivative(a, b, z, w).unwrap();
        let dzw = (f(1, 0, z, w + h) - f(1, 0, z, w - h)) / (2.0 * h);
        prop_assert!(rel(dzw, f(1, 1, z, w)) < 1e-5);
    }

    #[test]
    fn transport_is_associative(a in disc_pt(0.9), z in h_pt(), w in h_pt()) {
        let f = Biholomorphism::Mobius(MobiusMap::half_plane_to_disc());
        let s = Biholomorphism::Mobius(MobiusMap::disc_automorphism(a).unwrap());
        let inner = transport(ClosedKernel::DiscUnweighted, s, 0, &Domain::UnitDisc).unwrap();
        let twice = transport(inner, f, 0, &Domain::HalfPlaneH).unwrap();
        let once = transport(ClosedKernel::DiscUnweighted, s.compose(&f), 0, &Domain::HalfPlaneH).unwrap();
        for (p, q) in [(z, w), (z, z)] {
            prop_assert!(rel(twice.eval(p, q).unwrap(), once.eval(p, q).unwrap()) < 1e-11);
            prop_assert!(rel(once.eval(p, q).unwrap(), ClosedKernel::HalfPlaneUnweighted.eval(p, q).unwrap()) < 1e-11);
        }
    }

    #[test]
    fn transport_derivatives_agree_with_half_plane(z in h_pt(), w in h_pt()) {
        let f = Biholomorphism::Mobius(MobiusMap::half_plane_to_disc());
        let k = transport(ClosedKernel::DiscUnweighted, f, 0, &Domain::HalfPlaneH).unwrap();
        for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            let x = k.eval_derivative(a, b, z, w).unwrap();
            let y = ClosedKernel::HalfPlaneUnweighted.eval_derivative(a, b, z, w).unwrap();
            prop_assert!(rel(x, y) < 1e-9);
        }
    }

    #[test]
    fn smaller_disc_has_larger_kernel(z in disc_pt(0.5)) {
        let small = ClosedKernel::for_domain(&Domain::disc(cpt(0.0, 0.0), 0.6).unwrap()).unwrap();
        prop_assert!(small.diagonal(z).unwrap() >= ClosedKernel::DiscUnweighted.diagonal(z).unwrap());
    }
}

#[test]
fn point_values() {
    let o = cpt(0.0, 0.0);
    assert!((ClosedKernel::DiscUnweighted.diagonal(o).unwrap() - 1.0 / PI).abs() < 1e-15);
    assert!((ClosedKernel::HalfPlaneUnweighted.diagonal(o).unwrap() - 1.0 / PI).abs() < 1e-15);
    assert!((disc_dpower_kernel(1).diagonal(o).unwrap() - 3.0 / (PI * PI)).abs() < 1e-15);
    let h11 = ClosedKernel::HalfPlaneUnweighted.eval_derivative(1, 1, o, o).unwrap();
    assert!((h11.re - 6.0 / PI).abs() < 1e-14);
    let z = cpt(0.5, 0.0);
    assert!((ClosedKernel::DiscUnweighted.diagonal(z).unwrap() - 16.0 / (9.0 * PI)).abs() < 1e-14);
}

#[test]
fn unweighted_diagonal_across_domains() {
    let z = cpt(-0.3, 0.2);
    let v = unweighted_diagonal(&Domain::HalfPlaneH, z).unwrap();
    assert!((v - 1.0 / (4.0 * PI * 0.8 * 0.8)).abs() < 1e-13);
    let img = Domain::affine_image(Domain::UnitDisc, AffineMap::new(cpt(2.0, 0.0), cpt(0.0, 0.0)).unwrap());
    let v = unweighted_diagonal(&img, cpt(0.0, 0.0)).unwrap();
    assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-14);
}

#[test]
fn transport_rejects_bad_maps() {
    let shift = Biholomorphism::Affine(AffineMap::new(cpt(1.0, 0.0), cpt(0.5, 0.0)).unwrap());
    assert!(transport(ClosedKernel::DiscUnweighted, shift, 0, &Domain::UnitDisc).is_err());
    let id = Biholomorphism::identity();
    assert!(transport(ClosedKernel::DiscUnweighted, id, 1, &Domain::UnitDisc).is_err());
    assert!(constant_weight_scale(ClosedKernel::DiscUnweighted, 0.0).is_err());
}
