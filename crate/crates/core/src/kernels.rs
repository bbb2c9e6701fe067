//! Built-in kernel families and the gauge transformation.
//!
//! JSON form of a spec:
//! `{"kind":"product_power","lambda":2.0,"mu":3.0,"dim":2,"cap":12}`,
//! `{"kind":"exp_quadratic","A":[[1.0,0.1],[0.1,1.0]],"dim":2,"cap":12}`,
//! optionally with `"gauge":[{"alpha":[1,0],"re":0.3}]` to apply
//! `K ↦ f(z) K conj(f(w))` with `f = 1 + …` spelled out term by term.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::json::{HoloTerm, SesquiTerm};
use crate::series::{HoloSeries, MultiIndex, SesquiSeries};

/// A matrix entry written either as a plain number or as `{"re":…,"im":…}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelFamily {
    /// `(1 − z₁w̄₁)^{−λ} Π_{i≥2} (1 − z_i w̄_i)^{−μ}`
    ProductPower { lambda: f64, mu: f64 },
    /// `(1 − ⟨z, w⟩)^{−λ}`
    BallPower { lambda: f64 },
    /// `exp(zᵀ A w̄)`
    ExpQuadratic {
        #[serde(rename = "A")]
        a: Vec<Vec<Entry>>,
    },
    SeriesLiteral { coeffs: Vec<SesquiTerm> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub dim: usize,
    pub cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Vec<HoloTerm>>,
}

impl KernelSpec {
    pub fn product_power(lambda: f64, mu: f64, cap: usize) -> Self {
        KernelSpec {
            family: KernelFamily::ProductPower { lambda, mu },
            dim: 2,
            cap,
            gauge: None,
        }
    }

    pub fn ball_power(lambda: f64, dim: usize, cap: usize) -> Self {
        KernelSpec {
            family: KernelFamily::BallPower { lambda },
            dim,
            cap,
            gauge: None,
        }
    }

    pub fn exp_quadratic(a: Vec<Vec<Complex64>>, cap: usize) -> Self {
        let dim = a.len();
        let a = a
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| {
                        if c.im == 0.0 {
                            Entry::Real(c.re)
                        } else {
                            Entry::Complex { re: c.re, im: c.im }
                        }
                    })
                    .collect()
            })
            .collect();
        KernelSpec {
            family: KernelFamily::ExpQuadratic { a },
            dim,
            cap,
            gauge: None,
        }
    }

    /// `exp(zᵀ A w̄)` with `A = [[1, ε], [ε, 1]]`.
    pub fn exp_quadratic_eps(eps: f64, cap: usize) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::exp_quadratic(vec![vec![c(1.0), c(eps)], vec![c(eps), c(1.0)]], cap)
    }

    pub fn with_gauge(mut self, f: &HoloSeries) -> Self {
        self.gauge = Some(
            f.terms()
                .map(|(a, c)| HoloTerm {
                    alpha: a.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        );
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn gauge_series(&self) -> Result<Option<HoloSeries>> {
        self.gauge
            .as_ref()
            .map(|terms| {
                HoloSeries::from_terms(
                    self.dim,
                    self.cap,
                    terms
                        .iter()
                        .map(|t| (MultiIndex::new(t.alpha.clone()), Complex64::new(t.re, t.im))),
                )
            })
            .transpose()
    }
}

/// `(λ)_n / n!` for `n = 0..=cap`.
fn rising_over_factorial(lambda: f64, cap: usize) -> Vec<f64> {
    let mut r = vec![1.0];
    for n in 1..=cap {
        r.push(r[n - 1] * (lambda + n as f64 - 1.0) / n as f64);
    }
    r
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("{name} must be positive, got {x}")))
    }
}

fn diagonal(dim: usize, cap: usize, coef: impl Fn(&MultiIndex) -> f64) -> SesquiSeries {
    let basis = crate::series::Basis::get(dim, cap);
    let terms: Vec<_> = basis
        .monomials()
        .iter()
        .map(|m| (m.clone(), m.clone(), Complex64::new(coef(m), 0.0)))
        .collect();
    SesquiSeries::from_terms(dim, cap, terms).expect("indices come from the basis")
}

fn exp_quadratic(a: &[Vec<Entry>], dim: usize, cap: usize) -> Result<SesquiSeries> {
    if a.len() != dim || a.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidParameters(format!("A must be {dim}×{dim}")));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| a[i][j].value());
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidParameters("A has non-finite entries".into()));
    }
    let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if (&m - m.adjoint()).iter().any(|c| c.norm() > 1e-12 * scale) {
        return Err(Error::InvalidParameters("A must be Hermitian".into()));
    }
    let min_eig = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-12 * scale {
        return Err(Error::InvalidParameters(format!(
            "A must be positive semidefinite (eigenvalue {min_eig})"
        )));
    }
    let terms = (0..dim).flat_map(|i| {
        let m = &m;
        (0..dim).map(move |j| (MultiIndex::unit(dim, i), MultiIndex::unit(dim, j), m[(i, j)]))
    });
    let quadratic = SesquiSeries::from_terms(dim, cap, terms)?;
    Ok(quadratic.exp_series().hermitize())
}

/// Truncated series of the kernel described by `spec`, gauge applied last.
pub fn build_kernel(spec: &KernelSpec) -> Result<SesquiSeries> {
    let (dim, cap) = (spec.dim, spec.cap);
    if dim == 0 {
        return Err(Error::InvalidParameters("dim must be at least 1".into()));
    }
    let k = match &spec.family {
        KernelFamily::ProductPower { lambda, mu } => {
            positive("lambda", *lambda)?;
            positive("mu", *mu)?;
            let rl = rising_over_factorial(*lambda, cap);
            let rm = rising_over_factorial(*mu, cap);
            diagonal(dim, cap, |m| {
                m.entries()
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| if i == 0 { rl[e] } else { rm[e] })
                    .product()
            })
        }
        KernelFamily::BallPower { lambda } => {
            positive("lambda", *lambda)?;
            // (λ)_{|α|} / α!
            let mut poch = vec![1.0];
            let mut fact = vec![1.0];
            for n in 1..=cap {
                poch.push(poch[n - 1] * (lambda + n as f64 - 1.0));
                fact.push(fact[n - 1] * n as f64);
            }
            diagonal(dim, cap, |m| {
                poch[m.degree()] / m.entries().iter().map(|&e| fact[e]).product::<f64>()
            })
        }
        KernelFamily::ExpQuadratic { a } => exp_quadratic(a, dim, cap)?,
        KernelFamily::SeriesLiteral { coeffs } => {
            let s = SesquiSeries::from_terms(
                dim,
                cap,
                coeffs.iter().map(|t| {
                    (
                        MultiIndex::new(t.alpha.clone()),
                        MultiIndex::new(t.beta.clone()),
                        Complex64::new(t.re, t.im),
                    )
                }),
            )?;
            if !s.is_hermitian() {
                // a nonnegative definite kernel satisfies K(z, w) = conj(K(w, z))
                return Err(Error::InvalidKernel(format!(
                    "not nnd: coefficient matrix is not Hermitian (defect {:e})",
                    s.hermitian_defect()
                )));
            }
            let check = s.is_nnd(1e-10)?;
            if !check.nnd {
                return Err(Error::InvalidKernel(format!(
                    "not nnd: most negative eigenvalue {:e}",
                    check.min_eigenvalue
                )));
            }
            s
        }
    };
    match spec.gauge_series()? {
        Some(f) => gauge_transform(&k, &f),
        None => Ok(k),
    }
}

/// `f(z) K(z, w) conj(f(w))`, the kernel of a module isomorphic to the one
/// of `K`.
pub fn gauge_transform(k: &SesquiSeries, f: &HoloSeries) -> Result<SesquiSeries> {
    if f.constant_term() == Complex64::new(0.0, 0.0) {
        return Err(Error::GaugeSingular);
    }
    let out = k.sandwich(f, f)?;
    Ok(if k.is_hermitian() { out.hermitize() } else { out })
}
