#![allow(clippy::excessive_precision)]

//! Bessel and gamma values against 40-digit reference values, plus identity checks.

use abpauli::specfun::{bessel_i, bessel_k, BesselOrder, HalfPlaneArg};
use abpauli::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn k(nu: f64, w: Complex64) -> Complex64 {
    bessel_k(BesselOrder::new(nu).unwrap(), HalfPlaneArg::new(w).unwrap()).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

type Row = (f64, (f64, f64), (f64, f64));

// (order, argument, value), computed with 40-digit arithmetic
const K_TABLE: &[Row] = &[
    (0.0, (0.5, 0.0), (0.924419071227665862, 0.0)),
    (0.0, (5.0, 3.0), (-0.00341212488876290615, 0.00040776998107085527)),
    (0.3, (1e-06, 0.0), (116.164630606269119, 0.0)),
    (0.3, (1.5, -1.0), (0.0584757058910185467, 0.19298615827608471)),
    (0.7, (0.05, 0.02), (7.71550247620338903, -2.18064848922446824)),
    (0.7, (12.0, 0.0), (2.24445290551906784e-6, 0.0)),
    (0.25, (40.0, 25.0), (7.65782355712710478e-19, -1.12232741552559389e-19)),
    (0.999, (3.0, 0.0), (0.0401448586371482793, 0.0)),
    (0.001, (0.7, 0.1), (0.64982278130679551, -0.103993640259658325)),
    (2.3, (0.4, 0.1), (17.9484935499610884, -11.7097981603934626)),
    (5.75, (7.0, -2.0), (-0.00272279813986031959, 0.00148831945618611868)),
    (0.5, (1.0, 8.0), (-0.124033326393719896, -0.104802454769978887)),
    (80.3, (3.0, 0.0), (1.17088981688513758e+103, 0.0)),
];

const I_TABLE: &[Row] = &[
    (0.3, (0.5, 0.0), (0.770951734579219471, 0.0)),
    (-0.3, (0.5, 0.2), (1.22931940153501684, -0.0562852104073518043)),
    (-0.7, (2.0, 1.0), (1.28194671240451629, 1.31824455337378424)),
    (1.7, (9.0, 6.0), (775.954009338066549, -427.938839749865927)),
    (0.25, (3.0, 9.0), (-1.27401641998249011, 2.26887345347843056)),
    (-0.75, (0.5, 12.0), (0.085448442683926157, -0.242440303937326684)),
    (0.0, (30.0, 0.0), (781672297823.97749, 0.0)),
    (80.3, (0.9, 0.0), (5.33748633423010143e-148, 0.0)),
    (0.7, (-3.0, 1.0), (0.993216080381363746, 4.20602117792704672)),
    (-0.3, (1.0, 25.0), (0.163880397680964111, -0.170052320660700881)),
];

#[test]
fn k_matches_reference_table() {
    for &(nu, (a, b), (vr, vi)) in K_TABLE {
        let got = k(nu, c(a, b));
        let tol = if nu < 0.01 || nu > 0.99 && nu < 1.0 { 1e-12 } else { 1e-13 };
        assert!(rel(got, c(vr, vi)) < tol, "K_{nu}({a}+{b}i) = {got}, rel {}", rel(got, c(vr, vi)));
    }
}

#[test]
fn i_matches_reference_table() {
    for &(nu, (a, b), (vr, vi)) in I_TABLE {
        let got = bessel_i(nu, c(a, b)).unwrap();
        assert!(rel(got, c(vr, vi)) < 1e-12, "I_{nu}({a}+{b}i) = {got}, rel {}", rel(got, c(vr, vi)));
    }
}

#[test]
fn k_half_order_closed_form() {
    // K_{1/2}(w) = sqrt(pi / (2w)) e^{-w}
    for w in [c(0.01, 0.0), c(1.0, 1.0), c(2.0, -0.5), c(7.0, 3.0), c(50.0, 0.0)] {
        let want = (PI / (2.0 * w)).sqrt() * (-w).exp();
        assert!(rel(k(0.5, w), want) < 1e-14, "{w}");
    }
}

fn arg_strategy() -> impl Strategy<Value = Complex64> {
    (0.05f64..20.0, -1.4f64..1.4).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #[test]
    fn connection_formula(nu in 0.01f64..0.99, w in arg_strategy()) {
        // K_nu = pi/(2 sin(nu pi)) (I_{-nu} - I_nu); the I values are computed independently
        let lhs = k(nu, w);
        let ip = bessel_i(nu, w).unwrap();
        let im = bessel_i(-nu, w).unwrap();
        let rhs = (im - ip) * (PI / (2.0 * (PI * nu).sin()));
        let scale = (ip.norm() + im.norm()) / (PI * nu).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * scale.max(lhs.norm()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn wronskian(nu in 0.0f64..5.0, w in arg_strategy()) {
        prop_assume!((PI * nu).sin().abs() > 1e-3 || nu == 0.0);
        // I_nu K_{nu+1} + I_{nu+1} K_nu = 1/w
        let ka = k(nu, w);
        let kb = k(nu + 1.0, w);
        let ia = bessel_i(nu, w).unwrap();
        let ib = bessel_i(nu + 1.0, w).unwrap();
        let lhs = ia * kb + ib * ka;
        let scale = (ia * kb).norm() + (ib * ka).norm();
        prop_assert!((lhs - 1.0 / w).norm() <= 1e-12 * scale, "{} vs {}", lhs, 1.0 / w);
    }

    #[test]
    fn k_recurrence(nu in 0.01f64..6.0, w in arg_strategy()) {
        prop_assume!((PI * nu).sin().abs() > 1e-3);
        prop_assume!(nu > 1.0);
        let lhs = k(nu + 1.0, w);
        let rhs = k(nu - 1.0, w) + k(nu, w) * (2.0 * nu / w);
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn conjugate_symmetry(nu in 0.0f64..3.0, w in arg_strategy()) {
        prop_assume!((PI * nu).sin().abs() > 1e-3 || nu == 0.0);
        let a = k(nu, w.conj());
        let b = k(nu, w).conj();
        prop_assert!(rel(a, b) < 1e-14);
    }
}
