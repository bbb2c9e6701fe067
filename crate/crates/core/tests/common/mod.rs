//! Shared test corpus.
#![allow(dead_code)]

use num_complex::Complex64;
use quotient_invariants::equivalence::QuotientModuleSpec;
use quotient_invariants::kernels::KernelSpec;
use quotient_invariants::series::{HoloSeries, MultiIndex};

pub const D: usize = 12;
pub const D_MODEL: usize = 6;
pub const R: f64 = 0.3;
pub const GRID: usize = 16;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn holo(dim: usize, cap: usize, terms: &[(&[usize], f64)]) -> HoloSeries {
    HoloSeries::from_terms(
        dim,
        cap,
        terms.iter().map(|(a, v)| (MultiIndex::new(a.to_vec()), c(*v))),
    )
    .unwrap()
}

/// The three test gauges: `1 + 0.3 z₁`, `1 + 0.1 z₂²`, `2`.
pub fn gauges(cap: usize) -> Vec<(&'static str, HoloSeries)> {
    vec![
        ("1+0.3z1", holo(2, cap, &[(&[0, 0], 1.0), (&[1, 0], 0.3)])),
        ("1+0.1z2^2", holo(2, cap, &[(&[0, 0], 1.0), (&[0, 2], 0.1)])),
        ("2", holo(2, cap, &[(&[0, 0], 2.0)])),
    ]
}

/// A named kernel with the index of its isomorphism class.
pub struct Entry {
    pub name: &'static str,
    pub class: usize,
    pub spec: KernelSpec,
}

impl Entry {
    pub fn module(&self) -> QuotientModuleSpec {
        QuotientModuleSpec::new(self.spec.clone())
    }
}

/// Products, balls, exponentials and three gauged copies; kernels in the
/// same class are gauge equivalent.
pub fn corpus() -> Vec<Entry> {
    let g = gauges(D);
    vec![
        Entry { name: "product(1,1)", class: 0, spec: KernelSpec::product_power(1.0, 1.0, D) },
        Entry { name: "product(2,1)", class: 1, spec: KernelSpec::product_power(2.0, 1.0, D) },
        Entry { name: "product(1,2)", class: 2, spec: KernelSpec::product_power(1.0, 2.0, D) },
        Entry { name: "product(2,3)", class: 3, spec: KernelSpec::product_power(2.0, 3.0, D) },
        Entry { name: "ball(1)", class: 4, spec: KernelSpec::ball_power(1.0, 2, D) },
        Entry { name: "ball(2)", class: 5, spec: KernelSpec::ball_power(2.0, 2, D) },
        Entry { name: "exp(0.1)", class: 6, spec: KernelSpec::exp_quadratic_eps(0.1, D) },
        Entry { name: "exp(-0.1)", class: 7, spec: KernelSpec::exp_quadratic_eps(-0.1, D) },
        Entry { name: "exp(0.2)", class: 8, spec: KernelSpec::exp_quadratic_eps(0.2, D) },
        Entry {
            name: "product(2,3)*(1+0.3z1)",
            class: 3,
            spec: KernelSpec::product_power(2.0, 3.0, D).with_gauge(&g[0].1),
        },
        Entry {
            name: "ball(1)*(1+0.1z2^2)",
            class: 4,
            spec: KernelSpec::ball_power(1.0, 2, D).with_gauge(&g[1].1),
        },
        Entry {
            name: "exp(0.1)*2",
            class: 6,
            spec: KernelSpec::exp_quadratic_eps(0.1, D).with_gauge(&g[2].1),
        },
    ]
}
