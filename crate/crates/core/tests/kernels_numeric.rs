use bergman_core::kernels_numeric::*;
use bergman_core::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn disc_pt(r: f64) -> impl Strategy<Value = ComplexPoint> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| ComplexPoint::from_polar(r, t))
}

fn polar(n_r: usize, n_theta: usize) -> Quadrature {
    Quadrature::PolarGauss {
        n_r,
        n_theta,
        center: cpt(0.0, 0.0),
        radius: 1.0,
    }
}

fn affine() -> Weight {
    Weight::RealAffine {
        u: 0.5,
        v: 0.0,
        w0: 1.5,
    }
}

fn kernel(mu: Weight, degree: usize) -> NumericKernel {
    build_kernel(
        &Domain::UnitDisc,
        &mu,
        &BasisSpec::new(cpt(0.0, 0.0), degree),
        &polar(64, 128),
        1e-12,
    )
    .unwrap()
}

fn affine_kernels() -> &'static Vec<NumericKernel> {
    static K: OnceLock<Vec<NumericKernel>> = OnceLock::new();
    K.get_or_init(|| [4, 10, 20, 40].iter().map(|&n| kernel(affine(), n)).collect())
}

fn random_coeffs(seed: &[f64], dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|m| Complex64::from_polar(seed[m % seed.len()] * (-0.2 * m as f64).exp(), 1.7 * m as f64 + seed[0]))
        .collect()
}

#[test]
fn unit_disc_gram_is_diagonal() {
    let k = kernel(Weight::Constant { c: 1.0 }, 10);
    let g = k.gram();
    for i in 0..=10 {
        for j in 0..=10 {
            let want = if i == j { PI / (i + 1) as f64 } else { 0.0 };
            assert!((g[(i, j)] - want).norm() < 1e-13, "G[{i}][{j}] = {}", g[(i, j)]);
        }
    }
}

#[test]
fn degree_zero_kernel_is_constant() {
    let k = kernel(Weight::Constant { c: 1.0 }, 0);
    for z in [cpt(0.0, 0.0), cpt(0.5, -0.3)] {
        assert!((k.eval(z, cpt(0.1, 0.2)).unwrap() - 1.0 / PI).norm() < 1e-14);
    }
}

#[test]
fn numeric_matches_closed_form_on_the_disc() {
    let k = kernel(Weight::Constant { c: 1.0 }, 40);
    for (z, w) in [(cpt(0.3, 0.1), cpt(-0.2, 0.4)), (cpt(0.6, 0.0), cpt(0.6, 0.0))] {
        let a = k.eval(z, w).unwrap();
        let b = ClosedKernel::DiscUnweighted.eval(z, w).unwrap();
        assert!((a - b).norm() / b.norm() < 1e-10);
        let a = k.eval_derivative(1, 1, z, w).unwrap();
        let b = ClosedKernel::DiscUnweighted.eval_derivative(1, 1, z, w).unwrap();
        assert!((a - b).norm() / b.norm() < 1e-8);
    }
    assert!(k.eval_derivative(41, 0, cpt(0.0, 0.0), cpt(0.0, 0.0)).is_err());
    assert!(k.eval(cpt(1.2, 0.0), cpt(0.0, 0.0)).is_err());
}

#[test]
fn standalone_extremal_solve_matches_kernel() {
    let k = kernel(affine(), 20);
    let z = cpt(0.4, -0.2);
    let s = extremal_value(&Domain::UnitDisc, &affine(), &BasisSpec::new(cpt(0.0, 0.0), 20), &polar(64, 128), z).unwrap();
    let kz = k.eval(z, z).unwrap().re;
    assert!((s.value - kz).abs() / kz < 1e-10);
    assert!((s.min_norm_sq * s.value - 1.0).abs() < 1e-14);
    assert!((k.combination_value(&s.coefficients, z) - 1.0).norm() < 1e-10);
}

#[test]
fn build_rejects_bad_input() {
    let basis = BasisSpec::new(cpt(2.0, 0.0), 4);
    assert!(build_kernel(&Domain::UnitDisc, &affine(), &basis, &polar(8, 16), 1e-12).is_err());
    let basis = BasisSpec::new(cpt(0.0, 0.0), 4);
    assert!(build_kernel(&Domain::UnitDisc, &affine(), &basis, &polar(8, 16), 0.0).is_err());
    let vanishing = Weight::RealAffine {
        u: 1.0,
        v: 0.0,
        w0: 0.5,
    };
    let r = build_kernel(&Domain::UnitDisc, &vanishing, &basis, &polar(8, 16), 1e-12);
    assert!(matches!(r, Err(Error::NonpositiveWeightAtNode { .. })));
}

#[test]
fn config_round_trip_and_validation() {
    let cfg = NumericConfig::default();
    assert!(cfg.validate().is_ok());
    let bad = NumericConfig {
        basis_degree: 0,
        n_r: 0,
        ..cfg.clone()
    };
    assert!(bad.validate().is_err());
}

#[test]
fn recentred_kernel_agrees_with_direct_solve() {
    let cfg = NumericConfig::default();
    let direct = NumericConfig {
        recenter: false,
        ..cfg.clone()
    };
    let z = cpt(0.5, 0.2);
    let a = fit_kernel(&Domain::UnitDisc, &affine(), z, &cfg).unwrap();
    let b = fit_kernel(&Domain::UnitDisc, &affine(), z, &direct).unwrap();
    let (x, y) = (a.eval(z, z).unwrap().re, b.eval(z, z).unwrap().re);
    assert!((x - y).abs() / y < 1e-9, "{x} vs {y}");
    let w = cpt(0.45, 0.1);
    let (x, y) = (a.eval(z, w).unwrap(), b.eval(z, w).unwrap());
    assert!((x - y).norm() / y.norm() < 1e-8);
}

#[test]
fn pixel_solve_of_the_disc_is_close_to_closed_form() {
    let px = PixelRegion::rasterize(&Domain::UnitDisc, Rect::square(cpt(0.0, 0.0), 1.0), 256).unwrap();
    let cfg = NumericConfig {
        recenter: false,
        ..NumericConfig::default()
    };
    let k = fit_kernel(&Domain::PixelRegion(px), &Weight::Constant { c: 1.0 }, cpt(0.0, 0.0), &cfg).unwrap();
    let o = cpt(0.0, 0.0);
    assert!((k.eval(o, o).unwrap().re * PI - 1.0).abs() < 1e-3);
    assert_eq!(k.discarded_modes(), 0);
    assert!(k.eval(cpt(0.995, 0.0), o).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diagonal_grows_with_basis_degree(z in disc_pt(0.95)) {
        let ks = affine_kernels();
        let vals: Vec<f64> = ks.iter().map(|k| k.eval(z, z).unwrap().re).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn reproducing_defect_is_small(w in disc_pt(0.9)) {
        for k in affine_kernels() {
            prop_assert!(reproducing_check(k, w).unwrap() < 1e-8);
        }
    }

    #[test]
    fn extremal_matches_gram_inverse(z in disc_pt(0.9)) {
        for k in affine_kernels() {
            let kz = k.eval(z, z).unwrap().re;
            prop_assert!((k.extremal(z).unwrap().value - kz).abs() / kz < 1e-10);
        }
    }

    #[test]
    fn slice_norm_and_maximality(w in disc_pt(0.9), seed in proptest::collection::vec(-1.0..1.0f64, 5)) {
        let k = &affine_kernels()[3];
        let kww = k.eval(w, w).unwrap().re;
        let a = k.slice_coefficients(w);
        prop_assert!(k.gram_norm_sq(a.as_slice()).sqrt() <= kww.sqrt() * (1.0 + 1e-10));
        let c = random_coeffs(&seed, k.basis().dim());
        let n = k.gram_norm_sq(&c);
        prop_assume!(n > 1e-12);
        prop_assert!(k.combination_value(&c, w).norm_sqr() / n <= kww * (1.0 + 1e-10));
    }

    #[test]
    fn hermitian_symmetry(z in disc_pt(0.9), w in disc_pt(0.9)) {
        let k = &affine_kernels()[3];
        let (a, b) = (k.eval(z, w).unwrap(), k.eval(w, z).unwrap().conj());
        prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn heavier_weight_gives_smaller_kernel(z in disc_pt(0.9)) {
        static ONE: OnceLock<NumericKernel> = OnceLock::new();
        let one = ONE.get_or_init(|| kernel(Weight::Constant { c: 1.0 }, 40));
        let heavy = &affine_kernels()[3];
        prop_assert!(heavy.eval(z, z).unwrap().re <= one.eval(z, z).unwrap().re + 1e-8);
    }
}

#[test]
fn nested_domain_monotonicity() {
    let cfg = NumericConfig {
        recenter: false,
        ..NumericConfig::default()
    };
    let one = Weight::Constant { c: 1.0 };
    let o = cpt(0.0, 0.0);
    let big = fit_kernel(&Domain::UnitDisc, &one, o, &cfg).unwrap();
    let small = fit_kernel(&Domain::disc(cpt(0.1, 0.0), 0.6).unwrap(), &one, o, &cfg).unwrap();
    for k in 0..20 {
        let z = cpt(0.1, 0.0) + Complex64::from_polar(0.5 * k as f64 / 20.0, 0.9 * k as f64);
        assert!(big.eval(z, z).unwrap().re <= small.eval(z, z).unwrap().re + 1e-8);
    }
}
