//! Acceptance suite: one PASS/FAIL line per criterion, run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use quotient_invariants::equivalence::{
    compare_geometries, compare_jets, compare_quotient, Condition, GridOptions, Outcome,
    QuotientModuleSpec,
};
use quotient_invariants::geometry::{curvature_rational, omega_grid, z_grid, QuotientGeometry};
use quotient_invariants::jets::nilpotent_at;
use quotient_invariants::kernels::{build_kernel, gauge_transform, KernelSpec};
use quotient_invariants::normalize::{lemma_frame_check, normalize_kernel};
use quotient_invariants::oracle::{
    check_eigenvector, check_jet_unitarity, hypersurface_points, sample_points, truncated_model,
};
use quotient_invariants::series::{HypersurfaceSpec, SesquiSeries};

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Check {
    Check { pass, detail }
}

const OPTS: GridOptions = GridOptions { radius: R, grid: GRID };

fn oracle_concordance() -> Check {
    let start = Instant::now();
    let corpus = corpus();
    let geoms: Vec<QuotientGeometry> = corpus.iter().map(|e| e.module().geometry().unwrap()).collect();
    let mut disagreements = Vec::new();
    let mut wrong = Vec::new();
    for (i, a) in corpus.iter().enumerate() {
        for (j, b) in corpus.iter().enumerate() {
            let v = compare_geometries(&geoms[i], &geoms[j], 1e-8, OPTS).unwrap();
            let o = compare_jets(&geoms[i], &geoms[j], 1e-10).unwrap();
            if v.outcome != o.outcome {
                disagreements.push(format!("{} vs {}: {:?}/{:?}", a.name, b.name, v.outcome, o.outcome));
            }
            let expected = if a.class == b.class {
                Outcome::Isomorphic
            } else {
                Outcome::NotIsomorphic
            };
            if v.outcome != expected {
                wrong.push(format!("{} vs {}: {:?}", a.name, b.name, v.outcome));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pairs = corpus.len() * corpus.len();
    check(
        disagreements.is_empty() && wrong.is_empty() && secs < 30.0,
        format!(
            "{pairs} ordered pairs, {} disagreements {:?}, {} unexpected verdicts {:?}, {secs:.2} s",
            disagreements.len(),
            disagreements,
            wrong.len(),
            wrong
        ),
    )
}

fn invariant_values() -> Check {
    let mut worst = [0.0f64; 4];
    for (lambda, mu) in [(1.0, 1.0), (2.0, 3.0), (4.0, 1.0)] {
        let q = QuotientGeometry::new(
            &build_kernel(&KernelSpec::product_power(lambda, mu, D)).unwrap(),
            &HypersurfaceSpec::flat(1),
        )
        .unwrap();
        for t in z_grid(1, R, GRID) {
            let p = q.at(&t, R).unwrap();
            let s = 1.0 - t[0].norm_sqr();
            worst[0] = worst[0].max((p.k_trans + lambda).abs());
            worst[1] = worst[1].max((p.k_tan[0][0] - c(-mu / (s * s))).norm());
            worst[2] = worst[2].max(p.angle.norm());
        }
    }
    for lambda in [1.0, 2.0] {
        let q = QuotientGeometry::new(
            &build_kernel(&KernelSpec::ball_power(lambda, 2, D)).unwrap(),
            &HypersurfaceSpec::flat(1),
        )
        .unwrap();
        for t in z_grid(1, R, GRID) {
            let p = q.at(&t, R).unwrap();
            worst[3] = worst[3].max((p.k_trans + lambda / (1.0 - t[0].norm_sqr())).abs());
        }
    }
    check(
        worst[0] <= 1e-8 && worst[1] <= 1e-7 && worst[2] <= 1e-9 && worst[3] <= 1e-7,
        format!(
            "product K_trans {:.1e} (1e-8), K_tan {:.1e} (1e-7), angle {:.1e} (1e-9); ball K_trans {:.1e} (1e-7)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn angle_discrimination() -> Check {
    let a = QuotientModuleSpec::new(KernelSpec::exp_quadratic_eps(0.1, D));
    let b = QuotientModuleSpec::new(KernelSpec::exp_quadratic_eps(-0.1, D));
    let opts = GridOptions { radius: 0.5, grid: GRID };
    let v = compare_quotient(&a, &b, 1e-8, opts).unwrap();
    let expected = 2.0 * 0.1 * 0.5 * 0.25f64.exp();
    let w = v.witness.clone().unwrap();
    let at_half = w.point.as_deref() == Some(&[c(0.0), c(0.5)][..]);
    let diff_err = (w.difference - expected).abs();
    let max = |cond: Condition| {
        v.differences
            .iter()
            .find(|d| d.condition == cond)
            .map(|d| d.max_difference)
            .unwrap()
    };
    let (tan, trans) = (max(Condition::Tan), max(Condition::Trans));
    check(
        v.outcome == Outcome::NotIsomorphic
            && v.failed_condition == Condition::Angle
            && at_half
            && diff_err <= 1e-6
            && tan <= 1e-10
            && trans <= 1e-10,
        format!(
            "{:?} via {:?} at w2 = {}, |difference| {:.9} vs {expected:.9} (err {diff_err:.1e}); tan {tan:.1e}, trans {trans:.1e}",
            v.outcome,
            v.failed_condition,
            w.point.as_ref().map(|p| p[1]).unwrap_or_default(),
            w.difference
        ),
    )
}

fn normalization_suite() -> Check {
    let mut not_idempotent = Vec::new();
    let mut gauge_worst: f64 = 0.0;
    let mut frame_fail = Vec::new();
    for e in corpus() {
        let k = build_kernel(&e.spec).unwrap();
        let k0 = normalize_kernel(&k).unwrap();
        if normalize_kernel(&k0).unwrap().coeffs() != k0.coeffs() {
            not_idempotent.push(e.name);
        }
        let fc = lemma_frame_check(&k0, &HypersurfaceSpec::flat(1), 2).unwrap();
        if !fc.holds {
            frame_fail.push(e.name);
        }
    }
    let kernels = [
        KernelSpec::product_power(1.0, 1.0, D),
        KernelSpec::product_power(2.0, 3.0, D),
        KernelSpec::ball_power(2.0, 2, D),
        KernelSpec::exp_quadratic_eps(0.1, D),
    ];
    for spec in kernels {
        let k = build_kernel(&spec).unwrap();
        let k0 = normalize_kernel(&k).unwrap();
        for (_, f) in gauges(D) {
            let g0 = normalize_kernel(&gauge_transform(&k, &f).unwrap()).unwrap();
            gauge_worst = gauge_worst.max(g0.max_abs_diff(&k0).unwrap());
        }
    }
    check(
        not_idempotent.is_empty() && gauge_worst <= 1e-10 && frame_fail.is_empty(),
        format!(
            "idempotence exact for {} of 12, gauge quotient max {gauge_worst:.1e} (1e-10, 3 gauges x 4 kernels), frame normal form fails {:?}",
            12 - not_idempotent.len(),
            frame_fail
        ),
    )
}

/// `∂_s ∂_t log K(w + s e₁, w + t e₁)` by centered differences with real steps.
fn finite_difference(k0: &SesquiSeries, w: &[Complex64], h: f64) -> f64 {
    let f = |s: f64, t: f64| {
        let mut z = w.to_vec();
        let mut x = w.to_vec();
        z[0] += s;
        x[0] += t;
        k0.evaluate(&z, &x, R).unwrap().ln()
    };
    ((f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)).re
}

fn curvature_cross_validation() -> Check {
    let mut rational: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for e in corpus() {
        let q = QuotientGeometry::new(&build_kernel(&e.spec).unwrap(), &HypersurfaceSpec::flat(1)).unwrap();
        for p in omega_grid(2, R, GRID) {
            let a = q.curvature.evaluate(&p, &p, R).unwrap();
            let b = curvature_rational(&q.k0, &p, &p, R).unwrap();
            rational = rational.max((a - b).camax());
        }
        for t in z_grid(1, R, GRID) {
            let w = [c(0.0), t[0]];
            let kt = q.split.trans_at(&t, R).unwrap();
            fd = fd.max((kt + finite_difference(&q.k0, &w, 1e-3)).abs());
        }
    }
    check(
        rational <= 1e-9 && fd <= 1e-5,
        format!("series log vs rational {rational:.1e} (1e-9), vs finite differences {fd:.1e} (1e-5)"),
    )
}

fn oracle_structure() -> Check {
    let mut gram: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut dims = Vec::new();
    let mut jet: f64 = 0.0;
    for e in corpus() {
        let k = build_kernel(&e.spec).unwrap();
        let model = truncated_model(&k, D_MODEL).unwrap();
        gram = gram.max(model.gram_defect());
        for w in sample_points(2, R) {
            let ev = check_eigenvector(&model, &w, 1e-5).unwrap();
            residual = residual.max(ev.residual);
            if ev.eigenspace_dim != 1 {
                dims.push((e.name, ev.eigenspace_dim));
            }
        }
        let j = check_jet_unitarity(&model, 2, 0, &hypersurface_points(2, R, GRID), 1e-6).unwrap();
        jet = jet.max(j.max_defect);
    }
    check(
        gram <= 1e-10 && residual <= 1e-5 && dims.is_empty() && jet <= 1e-6,
        format!(
            "G conj(C) - I {gram:.1e} (1e-10), eigen residual {residual:.1e} (1e-5), eigenspace dim != 1 at {:?}, jet defect {jet:.1e} (1e-6)",
            dims
        ),
    )
}

fn nilpotent_values() -> Check {
    let z = HypersurfaceSpec::flat(1);
    let one = c(1.0);
    let zero = c(0.0);
    let expected = DMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]);
    let mut n_exact = true;
    let mut square_zero = true;
    let mut consistency: f64 = 0.0;
    for e in corpus() {
        let q = QuotientGeometry::new(&build_kernel(&e.spec).unwrap(), &z).unwrap();
        for t in z_grid(1, R, GRID) {
            let w = z.point_on(&t).unwrap();
            let n = nilpotent_at(&q.jet, &q.phi, &w).unwrap();
            n_exact &= n.matrix == expected;
            square_zero &= n.power(2) == DMatrix::zeros(2, 2);
            let p = q.at(&t, R).unwrap();
            consistency = consistency.max((p.n_orth_12 - c(1.0 / (-p.k_trans).sqrt())).norm());
            let orth = DMatrix::from_row_slice(2, 2, &[zero, p.n_orth_12, zero, zero]);
            square_zero &= &orth * &orth == DMatrix::zeros(2, 2);
        }
    }
    let q = QuotientGeometry::new(&build_kernel(&KernelSpec::product_power(4.0, 1.0, D)).unwrap(), &z).unwrap();
    let mut half: f64 = 0.0;
    for t in z_grid(1, R, GRID) {
        half = half.max((q.at(&t, R).unwrap().n_orth_12 - c(0.5)).norm());
    }
    check(
        n_exact && square_zero && consistency <= 1e-15 && half <= 1e-9,
        format!(
            "N = [[0,1],[0,0]] exactly: {n_exact}; N_orth(1,2) vs (-K_trans)^(-1/2) {consistency:.1e}; product(4,1) N_orth(1,2) - 0.5 {half:.1e} (1e-9); squares zero: {square_zero}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Check);

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("1 invariants agree with oracle", oracle_concordance),
        ("2 invariant values", invariant_values),
        ("3 angle discrimination", angle_discrimination),
        ("4 normalization suite", normalization_suite),
        ("5 curvature cross-validation", curvature_cross_validation),
        ("6 oracle structure", oracle_structure),
        ("7 nilpotent values", nilpotent_values),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let o = f();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
