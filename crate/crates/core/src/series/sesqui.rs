use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, MultiIndex};
use super::holo::{monomial_values, HoloSeries};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which group of variables a derivative acts on: the holomorphic `z` or the
/// anti-holomorphic `w̄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Z,
    WBar,
}

/// Truncated sesqui-holomorphic series `Σ c_{α,β} z^α w̄^β`.
///
/// Both index groups are capped at the same total degree. Coefficients are
/// stored densely, row `α`, column `β`, both in lexicographic order. The
/// monomials with `|α| > cap` or `|β| > cap` span an ideal, so products, `log`
/// and `exp` are exact on every stored coefficient; only derivatives lose a
/// degree, which is tracked per side in `trusted`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "super::json::SesquiJson", into = "super::json::SesquiJson")]
pub struct SesquiSeries {
    basis: Arc<Basis>,
    coeffs: Vec<Complex64>,
    trusted: [usize; 2],
}

/// Outcome of [`SesquiSeries::is_nnd`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NndCheck {
    pub nnd: bool,
    /// Most negative (smallest) eigenvalue of the coefficient matrix.
    pub min_eigenvalue: f64,
}

impl SesquiSeries {
    pub fn zero(dim: usize, cap: usize) -> Self {
        let basis = Basis::get(dim, cap);
        let n = basis.len();
        SesquiSeries {
            basis,
            coeffs: vec![ZERO; n * n],
            trusted: [cap, cap],
        }
    }

    pub fn constant(dim: usize, cap: usize, c: Complex64) -> Self {
        let mut s = Self::zero(dim, cap);
        s.coeffs[0] = c;
        s
    }

    pub fn one(dim: usize, cap: usize) -> Self {
        Self::constant(dim, cap, Complex64::new(1.0, 0.0))
    }

    /// Builds a series from `(α, β, c_{α,β})` triples; repeated pairs accumulate.
    pub fn from_terms<I>(dim: usize, cap: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, MultiIndex, Complex64)>,
    {
        let mut s = Self::zero(dim, cap);
        let n = s.basis.len();
        for (alpha, beta, c) in terms {
            let a = s.locate(&alpha)?;
            let b = s.locate(&beta)?;
            s.coeffs[a * n + b] += c;
        }
        Ok(s)
    }

    fn locate(&self, m: &MultiIndex) -> Result<usize> {
        if m.dim() != self.dim() {
            return Err(Error::InvalidOperand(format!(
                "index {m} has length {} but dimension is {}",
                m.dim(),
                self.dim()
            )));
        }
        self.basis.index_of(m).ok_or_else(|| {
            Error::InvalidOperand(format!("index {m} exceeds degree cap {}", self.cap()))
        })
    }

    pub(crate) fn from_raw(basis: Arc<Basis>, coeffs: Vec<Complex64>, trusted: [usize; 2]) -> Self {
        debug_assert_eq!(basis.len() * basis.len(), coeffs.len());
        SesquiSeries {
            basis,
            coeffs,
            trusted,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn cap(&self) -> usize {
        self.basis.cap()
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Certified total degree on the `z` side and the `w̄` side.
    pub fn trusted_degrees(&self) -> [usize; 2] {
        self.trusted
    }

    pub fn trusted_degree(&self, side: Side) -> usize {
        match side {
            Side::Z => self.trusted[0],
            Side::WBar => self.trusted[1],
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
        match (self.basis.index_of(alpha), self.basis.index_of(beta)) {
            (Some(a), Some(b)) => self.coeffs[a * self.basis.len() + b],
            _ => ZERO,
        }
    }

    pub(crate) fn at(&self, a: usize, b: usize) -> Complex64 {
        self.coeffs[a * self.basis.len() + b]
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Nonzero terms in lexicographic `(α, β)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, Complex64)> + '_ {
        let n = self.basis.len();
        let mons = self.basis.monomials();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(k, c)| (&mons[k / n], &mons[k % n], *c))
    }

    fn check_compatible(&self, other: &SesquiSeries) -> Result<()> {
        if !self.basis.same_as(&other.basis) {
            return Err(Error::InvalidOperand(format!(
                "operands differ: (dim {}, cap {}) vs (dim {}, cap {})",
                self.dim(),
                self.cap(),
                other.dim(),
                other.cap()
            )));
        }
        Ok(())
    }

    fn min_trust(&self, other: &SesquiSeries) -> [usize; 2] {
        [
            self.trusted[0].min(other.trusted[0]),
            self.trusted[1].min(other.trusted[1]),
        ]
    }

    pub fn add(&self, other: &SesquiSeries) -> Result<SesquiSeries> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_raw(self.basis.clone(), coeffs, self.min_trust(other)))
    }

    pub fn sub(&self, other: &SesquiSeries) -> Result<SesquiSeries> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self::from_raw(self.basis.clone(), coeffs, self.min_trust(other)))
    }

    pub fn scale(&self, c: Complex64) -> SesquiSeries {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Self::from_raw(self.basis.clone(), coeffs, self.trusted)
    }

    pub fn multiply(&self, other: &SesquiSeries) -> Result<SesquiSeries> {
        self.check_compatible(other)?;
        let b = &self.basis;
        let n = b.len();
        let mut out = vec![ZERO; n * n];
        for ta in 0..n {
            let sa = b.splits(ta);
            for tb in 0..n {
                let sb = b.splits(tb);
                let mut acc = ZERO;
                for &(a1, a2) in sa {
                    let (a1, a2) = (a1 as usize * n, a2 as usize * n);
                    for &(b1, b2) in sb {
                        acc += self.coeffs[a1 + b1 as usize] * other.coeffs[a2 + b2 as usize];
                    }
                }
                out[ta * n + tb] = acc;
            }
        }
        Ok(Self::from_raw(b.clone(), out, self.min_trust(other)))
    }

    /// `log` of the series, written as `c₀₀(1 + u)`; principal branch at `c₀₀`.
    ///
    /// Computed from `E f = f · E(log f)` with `E` the total-degree operator,
    /// which costs one convolution sweep instead of a power series in `u`.
    pub fn log_series(&self) -> Result<SesquiSeries> {
        let f00 = self.coeffs[0];
        if f00 == ZERO {
            return Err(Error::SingularKernel);
        }
        let b = &self.basis;
        let n = b.len();
        let mut g = vec![ZERO; n * n];
        for ta in 0..n {
            let da = b.monomial(ta).degree();
            for tb in 0..n {
                if ta == 0 && tb == 0 {
                    continue;
                }
                let deg = (da + b.monomial(tb).degree()) as f64;
                let mut acc = self.coeffs[ta * n + tb] * deg;
                for &(a1, a2) in b.splits(ta) {
                    for &(b1, b2) in b.splits(tb) {
                        if a1 == 0 && b1 == 0 {
                            continue;
                        }
                        acc -= self.coeffs[a1 as usize * n + b1 as usize]
                            * g[a2 as usize * n + b2 as usize];
                    }
                }
                g[ta * n + tb] = acc / f00;
            }
        }
        let mut out = g;
        for ta in 0..n {
            let da = b.monomial(ta).degree();
            for tb in 0..n {
                let deg = da + b.monomial(tb).degree();
                if deg > 0 {
                    out[ta * n + tb] /= deg as f64;
                }
            }
        }
        out[0] = f00.ln();
        Ok(Self::from_raw(b.clone(), out, self.trusted))
    }

    /// `exp` of the series, by the same degree recurrence as [`Self::log_series`].
    pub fn exp_series(&self) -> SesquiSeries {
        let b = &self.basis;
        let n = b.len();
        let mut g = self.coeffs.clone();
        for ta in 0..n {
            let da = b.monomial(ta).degree();
            for tb in 0..n {
                g[ta * n + tb] *= (da + b.monomial(tb).degree()) as f64;
            }
        }
        let mut f = vec![ZERO; n * n];
        f[0] = self.coeffs[0].exp();
        for ta in 0..n {
            let da = b.monomial(ta).degree();
            for tb in 0..n {
                if ta == 0 && tb == 0 {
                    continue;
                }
                let deg = (da + b.monomial(tb).degree()) as f64;
                let mut acc = ZERO;
                for &(a1, a2) in b.splits(ta) {
                    for &(b1, b2) in b.splits(tb) {
                        if a2 == 0 && b2 == 0 {
                            continue;
                        }
                        acc += f[a1 as usize * n + b1 as usize] * g[a2 as usize * n + b2 as usize];
                    }
                }
                f[ta * n + tb] = acc / deg;
            }
        }
        Self::from_raw(b.clone(), f, self.trusted)
    }

    /// Formal partial derivative in variable `var` (0-based) on one side.
    ///
    /// The top-degree coefficients on the differentiated side are not
    /// certified afterwards; the trusted degree of that side drops by one.
    pub fn differentiate(&self, side: Side, var: usize) -> Result<SesquiSeries> {
        let b = &self.basis;
        if var >= b.dim() {
            return Err(Error::IndexOutOfRange {
                index: var + 1,
                dim: b.dim(),
            });
        }
        let k = match side {
            Side::Z => 0,
            Side::WBar => 1,
        };
        if self.trusted[k] == 0 {
            return Err(Error::InsufficientDegree {
                needed: 1,
                available: 0,
            });
        }
        let n = b.len();
        let mut out = vec![ZERO; n * n];
        for ta in 0..n {
            for tb in 0..n {
                let (t, src) = match side {
                    Side::Z => (ta, b.up(var, ta).map(|u| u * n + tb)),
                    Side::WBar => (tb, b.up(var, tb).map(|u| ta * n + u)),
                };
                if let Some(src) = src {
                    out[ta * n + tb] = self.coeffs[src] * (b.monomial(t).get(var) + 1) as f64;
                }
            }
        }
        let mut trusted = self.trusted;
        trusted[k] -= 1;
        Ok(Self::from_raw(b.clone(), out, trusted))
    }

    /// `Σ c_{α,β} z^α conj(w)^β`, refusing points outside the polydisc of
    /// the given radius.
    pub fn evaluate(&self, z: &[Complex64], w: &[Complex64], radius: f64) -> Result<Complex64> {
        let d = self.dim();
        if z.len() != d || w.len() != d {
            return Err(Error::InvalidOperand(format!(
                "points have {} and {} coordinates, series has dimension {d}",
                z.len(),
                w.len()
            )));
        }
        let norm = z.iter().chain(w).map(|c| c.norm()).fold(0.0, f64::max);
        if norm > radius * (1.0 + 1e-12) {
            return Err(Error::OutsideRadius { radius, norm });
        }
        Ok(self.evaluate_unchecked(z, w))
    }

    pub(crate) fn evaluate_unchecked(&self, z: &[Complex64], w: &[Complex64]) -> Complex64 {
        let n = self.basis.len();
        let zp = monomial_values(&self.basis, z);
        let wp: Vec<Complex64> = monomial_values(&self.basis, w)
            .into_iter()
            .map(|c| c.conj())
            .collect();
        let mut total = ZERO;
        for (row, za) in self.coeffs.chunks(n).zip(&zp) {
            let inner: Complex64 = row.iter().zip(&wp).map(|(c, p)| c * p).sum();
            total += za * inner;
        }
        total
    }

    /// The series `S*(z, w) = conj(S(w, z))`, i.e. `c*_{α,β} = conj(c_{β,α})`.
    pub fn adjoint(&self) -> SesquiSeries {
        let n = self.basis.len();
        let mut out = vec![ZERO; n * n];
        for a in 0..n {
            for b in 0..n {
                out[a * n + b] = self.coeffs[b * n + a].conj();
            }
        }
        Self::from_raw(self.basis.clone(), out, [self.trusted[1], self.trusted[0]])
    }

    /// `max |c_{α,β} − conj(c_{β,α})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.basis.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                worst = worst.max((self.coeffs[a * n + b] - self.coeffs[b * n + a].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Hermitian up to rounding, relative to the largest coefficient.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= 1e-12 * self.max_abs_coeff().max(1.0)
    }

    /// Replaces the series by its Hermitian part `(S + S*) / 2`.
    pub fn hermitize(&self) -> SesquiSeries {
        let n = self.basis.len();
        let mut out = self.coeffs.clone();
        for a in 0..n {
            for b in a..n {
                let avg = (self.coeffs[a * n + b] + self.coeffs[b * n + a].conj()) * 0.5;
                out[a * n + b] = avg;
                out[b * n + a] = avg.conj();
            }
        }
        let t = self.trusted[0].min(self.trusted[1]);
        Self::from_raw(self.basis.clone(), out, [t, t])
    }

    /// The coefficient matrix `C = (c_{α,β})`, rows `α`, columns `β`.
    pub fn coefficient_matrix(&self) -> DMatrix<Complex64> {
        let n = self.basis.len();
        DMatrix::from_fn(n, n, |a, b| self.coeffs[a * n + b])
    }

    /// Nonnegative definiteness of the truncated coefficient matrix: every
    /// eigenvalue must be at least `-tol`.
    pub fn is_nnd(&self, tol: f64) -> Result<NndCheck> {
        if !self.is_hermitian() {
            return Err(Error::InvalidKernel(format!(
                "coefficient matrix is not Hermitian (defect {:e})",
                self.hermitian_defect()
            )));
        }
        let c = self.coefficient_matrix();
        let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eigenvalue = c.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        Ok(NndCheck {
            nnd: min_eigenvalue >= -tol,
            min_eigenvalue,
        })
    }

    /// `f(z) · S(z, w) · conj(g(w))`.
    pub fn sandwich(&self, f: &HoloSeries, g: &HoloSeries) -> Result<SesquiSeries> {
        for h in [f, g] {
            if !self.basis.same_as(h.basis()) {
                return Err(Error::InvalidOperand(format!(
                    "holomorphic factor (dim {}, cap {}) does not match series (dim {}, cap {})",
                    h.dim(),
                    h.cap(),
                    self.dim(),
                    self.cap()
                )));
            }
        }
        let b = &self.basis;
        let n = b.len();
        let fc = f.coeffs();
        let gc: Vec<Complex64> = g.coeffs().iter().map(|c| c.conj()).collect();
        let mut left = vec![ZERO; n * n];
        for ta in 0..n {
            for &(a1, a2) in b.splits(ta) {
                let fa = fc[a1 as usize];
                if fa == ZERO {
                    continue;
                }
                let src = a2 as usize * n;
                for tb in 0..n {
                    left[ta * n + tb] += fa * self.coeffs[src + tb];
                }
            }
        }
        let mut out = vec![ZERO; n * n];
        for tb in 0..n {
            for &(b1, b2) in b.splits(tb) {
                let gb = gc[b1 as usize];
                if gb == ZERO {
                    continue;
                }
                for ta in 0..n {
                    out[ta * n + tb] += left[ta * n + b2 as usize] * gb;
                }
            }
        }
        let trusted = [
            self.trusted[0].min(f.trusted_degree()),
            self.trusted[1].min(g.trusted_degree()),
        ];
        Ok(Self::from_raw(b.clone(), out, trusted))
    }

    /// `S(z, 0)` as a holomorphic series.
    pub fn z_slice(&self) -> HoloSeries {
        let n = self.basis.len();
        let coeffs = (0..n).map(|a| self.coeffs[a * n]).collect();
        HoloSeries::from_raw(self.basis.clone(), coeffs, self.trusted[0])
    }

    /// Largest coefficient difference over the common trusted degrees.
    pub fn max_abs_diff(&self, other: &SesquiSeries) -> Result<f64> {
        Ok(self.first_difference(other, f64::INFINITY)?.max)
    }

    /// Largest coefficient difference, and the first `(α, β)` in
    /// lexicographic order whose difference exceeds `threshold`.
    pub fn first_difference(&self, other: &SesquiSeries, threshold: f64) -> Result<CoeffDifference> {
        self.check_compatible(other)?;
        let trust = self.min_trust(other);
        let b = &self.basis;
        let n = b.len();
        let mut max: f64 = 0.0;
        let mut first = None;
        for ta in 0..n {
            if b.monomial(ta).degree() > trust[0] {
                continue;
            }
            for tb in 0..n {
                if b.monomial(tb).degree() > trust[1] {
                    continue;
                }
                let d = (self.coeffs[ta * n + tb] - other.coeffs[ta * n + tb]).norm();
                max = max.max(d);
                if first.is_none() && d > threshold {
                    first = Some((ta, tb));
                }
            }
        }
        Ok(CoeffDifference {
            max,
            first_exceeding: first.map(|(ta, tb)| FirstExceeding {
                alpha: b.monomial(ta).clone(),
                beta: b.monomial(tb).clone(),
                a: self.coeffs[ta * n + tb],
                b: other.coeffs[ta * n + tb],
            }),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CoeffDifference {
    pub max: f64,
    pub first_exceeding: Option<FirstExceeding>,
}

#[derive(Clone, Debug)]
pub struct FirstExceeding {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub a: Complex64,
    pub b: Complex64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    /// `Σ_{n ≤ cap} coef(n) (z₁ w̄₁)^n` in two variables.
    fn diagonal_z1(cap: usize, coef: impl Fn(usize) -> f64) -> SesquiSeries {
        SesquiSeries::from_terms(2, cap, (0..=cap).map(|k| (mi(&[k, 0]), mi(&[k, 0]), c(coef(k))))).unwrap()
    }

    #[test]
    fn multiply_two_term_factors() {
        let a = SesquiSeries::from_terms(2, 4, [(mi(&[0, 0]), mi(&[0, 0]), c(1.0)), (mi(&[1, 0]), mi(&[1, 0]), c(1.0))])
            .unwrap();
        let b = SesquiSeries::from_terms(2, 4, [(mi(&[0, 0]), mi(&[0, 0]), c(1.0)), (mi(&[0, 1]), mi(&[0, 1]), c(1.0))])
            .unwrap();
        let p = a.multiply(&b).unwrap();
        let expected = SesquiSeries::from_terms(
            2,
            4,
            [
                (mi(&[0, 0]), mi(&[0, 0]), c(1.0)),
                (mi(&[1, 0]), mi(&[1, 0]), c(1.0)),
                (mi(&[0, 1]), mi(&[0, 1]), c(1.0)),
                (mi(&[1, 1]), mi(&[1, 1]), c(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn multiply_by_one_is_identity() {
        let k = diagonal_z1(6, |n| 1.0 / (n as f64 + 1.0));
        let p = k.multiply(&SesquiSeries::one(2, 6)).unwrap();
        assert_eq!(p.max_abs_diff(&k).unwrap(), 0.0);
    }

    #[test]
    fn geometric_series_cancels() {
        let cap = 10;
        let geo = diagonal_z1(cap, |_| 1.0);
        let one_minus = SesquiSeries::from_terms(2, cap, [(mi(&[0, 0]), mi(&[0, 0]), c(1.0)), (mi(&[1, 0]), mi(&[1, 0]), c(-1.0))])
            .unwrap();
        let p = geo.multiply(&one_minus).unwrap();
        // every stored coefficient is below the cap, so the tail vanishes entirely
        assert_eq!(p.max_abs_diff(&SesquiSeries::one(2, cap)).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_caps_are_rejected() {
        let a = SesquiSeries::one(2, 4);
        let b = SesquiSeries::one(2, 5);
        assert!(matches!(a.multiply(&b), Err(Error::InvalidOperand(_))));
        let c3 = SesquiSeries::one(3, 4);
        assert!(matches!(a.add(&c3), Err(Error::InvalidOperand(_))));
    }

    #[test]
    fn differentiate_monomial() {
        let s = SesquiSeries::from_terms(2, 4, [(mi(&[2, 0]), mi(&[1, 0]), c(1.0))]).unwrap();
        let d = s.differentiate(Side::Z, 0).unwrap();
        assert_eq!(d.coeff(&mi(&[1, 0]), &mi(&[1, 0])), c(2.0));
        assert_eq!(d.terms().count(), 1);
        assert_eq!(d.trusted_degrees(), [3, 4]);
    }

    #[test]
    fn differentiate_constant_vanishes() {
        let d = SesquiSeries::one(2, 4).differentiate(Side::WBar, 0).unwrap();
        assert_eq!(d.terms().count(), 0);
    }

    #[test]
    fn differentiate_index_out_of_range() {
        let err = SesquiSeries::one(2, 4).differentiate(Side::Z, 2).unwrap_err();
        assert_eq!(err, Error::IndexOutOfRange { index: 3, dim: 2 });
    }

    #[test]
    fn mixed_derivative_shifts_coefficients() {
        // Σ c_n (z₁w̄₁)^n with c_n = 1/(n+1)
        let cap = 8;
        let s = diagonal_z1(cap, |n| 1.0 / (n as f64 + 1.0));
        let d = s.differentiate(Side::Z, 0).unwrap().differentiate(Side::WBar, 0).unwrap();
        for n in 1..=cap {
            let got = d.coeff(&mi(&[n - 1, 0]), &mi(&[n - 1, 0]));
            let expected = (n * n) as f64 / (n as f64 + 1.0);
            assert!((got.re - expected).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn evaluate_two_term_polynomial() {
        let s = SesquiSeries::from_terms(2, 4, [(mi(&[0, 0]), mi(&[0, 0]), c(1.0)), (mi(&[1, 0]), mi(&[1, 0]), c(1.0))])
            .unwrap();
        let v = s.evaluate(&[c(0.2), c(0.0)], &[c(0.1), c(0.0)], 0.3).unwrap();
        assert!((v - c(1.02)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_refuses_outside_radius() {
        let s = SesquiSeries::one(2, 4);
        let err = s.evaluate(&[c(0.5), c(0.0)], &[c(0.0), c(0.0)], 0.3).unwrap_err();
        assert!(matches!(err, Error::OutsideRadius { .. }));
    }

    #[test]
    fn evaluate_truncated_inverse_square() {
        // (1 − t)^{-2} = Σ (n+1) t^n
        let s = diagonal_z1(12, |n| n as f64 + 1.0);
        let v = s.evaluate(&[c(0.3), c(0.0)], &[c(0.3), c(0.0)], 0.3).unwrap();
        let exact = (1.0f64 - 0.09).powi(-2);
        // tail Σ_{n>12} (n+1) 0.09^n ≈ 3.9e-13
        assert!((v.re - exact).abs() < 1e-9);
    }

    #[test]
    fn log_of_one_is_zero() {
        let l = SesquiSeries::one(2, 6).log_series().unwrap();
        assert_eq!(l.max_abs_coeff(), 0.0);
    }

    #[test]
    fn log_of_power_kernel() {
        // (1 − z₁w̄₁)^{-λ} = Σ (λ)_n / n! t^n ; log = λ Σ t^n / n
        let lambda = 2.5;
        let cap = 12;
        let mut coef = vec![1.0];
        for n in 1..=cap {
            let prev = coef[n - 1];
            coef.push(prev * (lambda + n as f64 - 1.0) / n as f64);
        }
        let k = diagonal_z1(cap, |n| coef[n]);
        let l = k.log_series().unwrap();
        for n in 1..=cap {
            let got = l.coeff(&mi(&[n, 0]), &mi(&[n, 0]));
            assert!((got.re - lambda / n as f64).abs() < 1e-12, "n = {n}");
        }
        assert_eq!(l.constant_term(), c(0.0));
    }

    #[test]
    fn exp_log_round_trip() {
        let cap = 10;
        let s = SesquiSeries::from_terms(
            2,
            cap,
            [
                (mi(&[0, 0]), mi(&[0, 0]), c(1.0)),
                (mi(&[1, 0]), mi(&[0, 1]), c(0.5)),
                (mi(&[0, 1]), mi(&[1, 0]), c(0.5)),
            ],
        )
        .unwrap();
        let back = s.log_series().unwrap().exp_series();
        assert!(back.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn log_of_zero_constant_is_singular() {
        let s = SesquiSeries::from_terms(2, 4, [(mi(&[1, 0]), mi(&[1, 0]), c(1.0))]).unwrap();
        assert_eq!(s.log_series().unwrap_err(), Error::SingularKernel);
    }

    #[test]
    fn nnd_of_simple_kernel() {
        let s = diagonal_z1(1, |_| 1.0);
        let check = s.is_nnd(1e-10).unwrap();
        assert!(check.nnd);
        assert!((check.min_eigenvalue - 0.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let s = SesquiSeries::from_terms(2, 2, [(mi(&[0, 0]), mi(&[0, 0]), c(1.0)), (mi(&[0, 1]), mi(&[1, 0]), c(1.0))])
            .unwrap();
        assert!(matches!(s.is_nnd(1e-10), Err(Error::InvalidKernel(_))));
    }

    #[test]
    fn hermitian_completion_is_indefinite() {
        // 1 + z₂w̄₁ + z₁w̄₂ : the {z₁, z₂} block is [[0,1],[1,0]]
        let s = SesquiSeries::from_terms(
            2,
            2,
            [
                (mi(&[0, 0]), mi(&[0, 0]), c(1.0)),
                (mi(&[0, 1]), mi(&[1, 0]), c(1.0)),
                (mi(&[1, 0]), mi(&[0, 1]), c(1.0)),
            ],
        )
        .unwrap();
        let check = s.is_nnd(1e-10).unwrap();
        assert!(!check.nnd);
        assert!((check.min_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_rank_one() {
        let f = HoloSeries::from_terms(2, 4, [(mi(&[0, 0]), c(1.0)), (mi(&[1, 0]), c(1.0))]).unwrap();
        let s = SesquiSeries::one(2, 4).sandwich(&f, &f).unwrap();
        let expected = SesquiSeries::from_terms(
            2,
            4,
            [
                (mi(&[0, 0]), mi(&[0, 0]), c(1.0)),
                (mi(&[1, 0]), mi(&[0, 0]), c(1.0)),
                (mi(&[0, 0]), mi(&[1, 0]), c(1.0)),
                (mi(&[1, 0]), mi(&[1, 0]), c(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.max_abs_diff(&expected).unwrap(), 0.0);
    }
}
