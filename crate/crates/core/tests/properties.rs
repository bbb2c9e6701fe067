mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use quotient_invariants::equivalence::{compare_quotient, GridOptions, Outcome, QuotientModuleSpec};
use quotient_invariants::kernels::{build_kernel, gauge_transform, KernelSpec};
use quotient_invariants::normalize::normalize_kernel;
use quotient_invariants::series::{Basis, HoloSeries, SesquiSeries, Side};

const CAP: usize = 4;
const DIM: usize = 2;

fn sesqui(values: Vec<(f64, f64)>) -> SesquiSeries {
    let basis = Basis::get(DIM, CAP);
    let n = basis.len();
    let terms = (0..n * n).map(|i| {
        let (re, im) = values[i];
        (
            basis.monomial(i / n).clone(),
            basis.monomial(i % n).clone(),
            Complex64::new(re, im),
        )
    });
    SesquiSeries::from_terms(DIM, CAP, terms).unwrap()
}

fn any_sesqui(scale: f64) -> impl Strategy<Value = SesquiSeries> {
    let n = Basis::get(DIM, CAP).len();
    prop::collection::vec((-scale..scale, -scale..scale), n * n).prop_map(sesqui)
}

fn any_gauge() -> impl Strategy<Value = HoloSeries> {
    (0.5f64..2.0, -0.5f64..0.5, -0.5f64..0.5, -0.3f64..0.3, -0.3f64..0.3).prop_map(|(c0, a, b, ai, bi)| {
        HoloSeries::from_terms(
            DIM,
            D,
            [
                (vec![0, 0], Complex64::new(c0, 0.0)),
                (vec![1, 0], Complex64::new(a, ai)),
                (vec![0, 1], Complex64::new(b, bi)),
                (vec![1, 1], Complex64::new(a * b, 0.0)),
            ]
            .into_iter()
            .map(|(m, c)| (quotient_invariants::series::MultiIndex::new(m), c)),
        )
        .unwrap()
    })
}

fn any_kernel() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        (0.5f64..4.0, 0.5f64..4.0).prop_map(|(l, m)| KernelSpec::product_power(l, m, D)),
        (0.5f64..4.0).prop_map(|l| KernelSpec::ball_power(l, DIM, D)),
        (-0.3f64..0.3).prop_map(|e| KernelSpec::exp_quadratic_eps(e, D)),
    ]
}

fn rank(o: Outcome) -> u8 {
    match o {
        Outcome::Isomorphic => 0,
        Outcome::Inconclusive => 1,
        Outcome::NotIsomorphic => 2,
    }
}

const OPTS: GridOptions = GridOptions { radius: R, grid: 8 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiply_is_associative(a in any_sesqui(1.0), b in any_sesqui(1.0), c in any_sesqui(1.0)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-11);
    }

    #[test]
    fn one_is_identity(a in any_sesqui(1.0)) {
        let one = SesquiSeries::one(DIM, CAP);
        let (x, y) = (a.multiply(&one).unwrap(), one.multiply(&a).unwrap());
        prop_assert_eq!(x.coeffs(), a.coeffs());
        prop_assert_eq!(y.coeffs(), a.coeffs());
    }

    #[test]
    fn multiply_commutes(a in any_sesqui(1.0), b in any_sesqui(1.0)) {
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        prop_assert!(ab.max_abs_diff(&ba).unwrap() <= 1e-13);
    }

    #[test]
    fn exp_inverts_log(a in any_sesqui(0.2), c0 in 0.5f64..2.0) {
        let mut terms: Vec<_> = a.terms().map(|(x, y, v)| (x.clone(), y.clone(), v)).collect();
        terms[0].2 = Complex64::new(c0, 0.0);
        let f = SesquiSeries::from_terms(DIM, CAP, terms).unwrap();
        let back = f.log_series().unwrap().exp_series();
        prop_assert!(back.max_abs_diff(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn log_inverts_exp(a in any_sesqui(0.3)) {
        let back = a.exp_series().log_series().unwrap();
        prop_assert!(back.max_abs_diff(&a).unwrap() <= 1e-12);
    }

    #[test]
    fn log_turns_products_into_sums(a in any_sesqui(0.2), b in any_sesqui(0.2)) {
        let (ea, eb) = (a.exp_series(), b.exp_series());
        let lhs = ea.multiply(&eb).unwrap().log_series().unwrap();
        let rhs = a.add(&b).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn derivatives_commute(a in any_sesqui(1.0), i in 0usize..DIM, j in 0usize..DIM) {
        let x = a.differentiate(Side::Z, i).unwrap().differentiate(Side::WBar, j).unwrap();
        let y = a.differentiate(Side::WBar, j).unwrap().differentiate(Side::Z, i).unwrap();
        prop_assert_eq!(x.coeffs(), y.coeffs());
        prop_assert_eq!(x.trusted_degrees(), [CAP - 1, CAP - 1]);
    }

    #[test]
    fn hermitian_operations_stay_hermitian(a in any_sesqui(0.2), f in any_gauge()) {
        let h = a.hermitize();
        prop_assert!(h.is_hermitian());
        prop_assert!(h.multiply(&h).unwrap().is_hermitian());
        prop_assert!(h.exp_series().hermitian_defect() <= 1e-14);
        let k = build_kernel(&KernelSpec::ball_power(1.5, DIM, D)).unwrap();
        prop_assert!(gauge_transform(&k, &f).unwrap().hermitian_defect() <= 1e-13);
    }

    #[test]
    fn normalization_quotients_gauges(spec in any_kernel(), f in any_gauge()) {
        let k = build_kernel(&spec).unwrap();
        let k0 = normalize_kernel(&k).unwrap();
        let g0 = normalize_kernel(&gauge_transform(&k, &f).unwrap()).unwrap();
        let diff = g0.max_abs_diff(&k0).unwrap();
        prop_assert!(diff <= 1e-13 * k0.max_abs_coeff().max(1.0), "{diff:e} vs {:e}", k0.max_abs_coeff());
        let again = normalize_kernel(&k0).unwrap();
        prop_assert_eq!(again.coeffs(), k0.coeffs());
    }

    #[test]
    fn compare_is_reflexive_and_symmetric(a in any_kernel(), b in any_kernel(), f in any_gauge()) {
        let ma = QuotientModuleSpec::new(a.clone());
        let mb = QuotientModuleSpec::new(b);
        let v = compare_quotient(&ma, &ma, 1e-8, OPTS).unwrap();
        prop_assert_eq!(v.outcome, Outcome::Isomorphic);
        let gauged = QuotientModuleSpec::new(a.with_gauge(&f));
        prop_assert_eq!(compare_quotient(&ma, &gauged, 1e-8, OPTS).unwrap().outcome, Outcome::Isomorphic);
        let ab = compare_quotient(&ma, &mb, 1e-8, OPTS).unwrap();
        let ba = compare_quotient(&mb, &ma, 1e-8, OPTS).unwrap();
        prop_assert_eq!(ab.outcome, ba.outcome);
        prop_assert_eq!(ab.failed_condition, ba.failed_condition);
    }

    #[test]
    fn larger_tolerance_never_separates_more(
        i in 0usize..12, j in 0usize..12, t in -12.0f64..-2.0, step in 0.0f64..4.0,
    ) {
        let corpus = corpus();
        let (a, b) = (corpus[i].module(), corpus[j].module());
        let tight = compare_quotient(&a, &b, 10f64.powf(t), OPTS).unwrap();
        let loose = compare_quotient(&a, &b, 10f64.powf(t + step), OPTS).unwrap();
        prop_assert!(rank(loose.outcome) <= rank(tight.outcome));
    }
}
