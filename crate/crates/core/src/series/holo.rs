use std::sync::Arc;

use num_complex::Complex64;

use super::basis::{Basis, MultiIndex};
use crate::error::{Error, Result};

/// Truncated power series `Σ c_α z^α` in `dim` complex variables.
#[derive(Clone, Debug)]
pub struct HoloSeries {
    basis: Arc<Basis>,
    coeffs: Vec<Complex64>,
    trusted: usize,
}

impl HoloSeries {
    pub fn zero(dim: usize, cap: usize) -> Self {
        let basis = Basis::get(dim, cap);
        let n = basis.len();
        HoloSeries {
            basis,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            trusted: cap,
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

    /// The coordinate function `z_i` (0-based `i`).
    pub fn variable(dim: usize, cap: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i + 1, dim });
        }
        Self::from_terms(dim, cap, [(MultiIndex::unit(dim, i), Complex64::new(1.0, 0.0))])
    }

    /// Builds a series from `(α, c_α)` pairs; repeated indices accumulate.
    pub fn from_terms<I>(dim: usize, cap: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut s = Self::zero(dim, cap);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::InvalidOperand(format!(
                    "index {alpha} has length {} but dimension is {dim}",
                    alpha.dim()
                )));
            }
            let t = s.basis.index_of(&alpha).ok_or_else(|| {
                Error::InvalidOperand(format!("index {alpha} exceeds degree cap {cap}"))
            })?;
            s.coeffs[t] += c;
        }
        Ok(s)
    }

    pub(crate) fn from_raw(basis: Arc<Basis>, coeffs: Vec<Complex64>, trusted: usize) -> Self {
        debug_assert_eq!(basis.len(), coeffs.len());
        HoloSeries {
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

    pub fn trusted_degree(&self) -> usize {
        self.trusted
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.basis
            .index_of(alpha)
            .map(|t| self.coeffs[t])
            .unwrap_or_default()
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Nonzero terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, Complex64)> + '_ {
        self.basis
            .monomials()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(m, c)| (m, *c))
    }

    fn check_compatible(&self, other: &HoloSeries) -> Result<()> {
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

    pub fn add(&self, other: &HoloSeries) -> Result<HoloSeries> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_raw(self.basis.clone(), coeffs, self.trusted.min(other.trusted)))
    }

    pub fn sub(&self, other: &HoloSeries) -> Result<HoloSeries> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self::from_raw(self.basis.clone(), coeffs, self.trusted.min(other.trusted)))
    }

    pub fn scale(&self, c: Complex64) -> HoloSeries {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Self::from_raw(self.basis.clone(), coeffs, self.trusted)
    }

    pub fn mul(&self, other: &HoloSeries) -> Result<HoloSeries> {
        self.check_compatible(other)?;
        let b = &self.basis;
        let coeffs = (0..b.len())
            .map(|t| {
                b.splits(t)
                    .iter()
                    .map(|&(i, j)| self.coeffs[i as usize] * other.coeffs[j as usize])
                    .sum()
            })
            .collect();
        Ok(Self::from_raw(b.clone(), coeffs, self.trusted.min(other.trusted)))
    }

    /// Multiplicative inverse in the truncated ring.
    pub fn reciprocal(&self) -> Result<HoloSeries> {
        let h0 = self.coeffs[0];
        if h0 == Complex64::new(0.0, 0.0) {
            return Err(Error::NotInvertible);
        }
        let b = &self.basis;
        let mut r = vec![Complex64::new(0.0, 0.0); b.len()];
        r[0] = h0.inv();
        for t in 1..b.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(i, j) in b.splits(t) {
                if i != 0 {
                    acc += self.coeffs[i as usize] * r[j as usize];
                }
            }
            r[t] = -acc / h0;
        }
        Ok(Self::from_raw(b.clone(), r, self.trusted))
    }

    /// Formal partial derivative `∂/∂z_var` (0-based `var`).
    pub fn differentiate(&self, var: usize) -> Result<HoloSeries> {
        let b = &self.basis;
        if var >= b.dim() {
            return Err(Error::IndexOutOfRange {
                index: var + 1,
                dim: b.dim(),
            });
        }
        if self.trusted == 0 {
            return Err(Error::InsufficientDegree {
                needed: 1,
                available: 0,
            });
        }
        let coeffs = (0..b.len())
            .map(|t| match b.up(var, t) {
                Some(u) => self.coeffs[u] * (b.monomial(t).get(var) + 1) as f64,
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        Ok(Self::from_raw(b.clone(), coeffs, self.trusted - 1))
    }

    /// `Σ c_α z^α`, summed in lexicographic order.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim() {
            return Err(Error::InvalidOperand(format!(
                "point has {} coordinates, series has dimension {}",
                z.len(),
                self.dim()
            )));
        }
        let powers = monomial_values(&self.basis, z);
        Ok(self
            .coeffs
            .iter()
            .zip(&powers)
            .map(|(c, p)| c * p)
            .sum())
    }

    /// Largest coefficient difference over monomials of degree at most the
    /// common trusted degree.
    pub fn max_abs_diff(&self, other: &HoloSeries) -> Result<f64> {
        self.check_compatible(other)?;
        let trusted = self.trusted.min(other.trusted);
        Ok(self
            .basis
            .monomials()
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .filter(|(m, _)| m.degree() <= trusted)
            .map(|(_, (a, b))| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Re-expresses a series in `dim - 1` variables as a series in `dim`
    /// variables that does not depend on variable 0.
    pub(crate) fn prepend_variable(&self) -> HoloSeries {
        let target = Basis::get(self.dim() + 1, self.cap());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); target.len()];
        for (m, c) in self.basis.monomials().iter().zip(&self.coeffs) {
            let mut e = Vec::with_capacity(m.dim() + 1);
            e.push(0);
            e.extend_from_slice(m.entries());
            let t = target.index_of(&MultiIndex::new(e)).expect("degree preserved");
            coeffs[t] = *c;
        }
        Self::from_raw(target, coeffs, self.trusted)
    }
}

/// Values of every basis monomial at `z`, in basis order.
pub(crate) fn monomial_values(basis: &Basis, z: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    out[0] = Complex64::new(1.0, 0.0);
    // Every nonzero index t has a predecessor t - e_i that comes earlier in lex order.
    for t in 1..basis.len() {
        let m = basis.monomial(t);
        let var = (0..m.dim()).rev().find(|&i| m.get(i) > 0).expect("nonzero index");
        let prev = basis.down(var, t).expect("positive entry");
        out[t] = out[prev] * z[var];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn reciprocal_of_one_plus_z1_is_geometric() {
        let h = HoloSeries::from_terms(2, 8, [(MultiIndex::zero(2), c(1.0)), (MultiIndex::new(vec![1, 0]), c(1.0))])
            .unwrap();
        let r = h.reciprocal().unwrap();
        for n in 0..=8 {
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(r.coeff(&MultiIndex::new(vec![n, 0])), c(expected));
        }
        assert_eq!(r.coeff(&MultiIndex::new(vec![0, 1])), c(0.0));
    }

    #[test]
    fn reciprocal_of_one() {
        let one = HoloSeries::one(2, 6);
        let r = one.reciprocal().unwrap();
        assert_eq!(r.max_abs_diff(&one).unwrap(), 0.0);
    }

    #[test]
    fn reciprocal_defining_identity() {
        let h = HoloSeries::from_terms(
            2,
            12,
            [
                (MultiIndex::zero(2), c(1.0)),
                (MultiIndex::new(vec![1, 0]), c(0.3)),
                (MultiIndex::new(vec![0, 2]), c(0.1)),
            ],
        )
        .unwrap();
        let prod = h.mul(&h.reciprocal().unwrap()).unwrap();
        let one = HoloSeries::one(2, 12);
        assert!(prod.max_abs_diff(&one).unwrap() < 1e-12);
    }

    #[test]
    fn zero_constant_term_is_not_invertible() {
        let z1 = HoloSeries::variable(2, 4, 0).unwrap();
        assert_eq!(z1.reciprocal().unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn derivative_of_square() {
        let z1 = HoloSeries::variable(1, 5, 0).unwrap();
        let sq = z1.mul(&z1).unwrap();
        let d = sq.differentiate(0).unwrap();
        assert_eq!(d.max_abs_diff(&z1.scale(c(2.0))).unwrap(), 0.0);
        assert_eq!(d.trusted_degree(), 4);
    }

    #[test]
    fn evaluate_matches_direct_sum() {
        let h = HoloSeries::from_terms(
            2,
            4,
            [
                (MultiIndex::zero(2), c(1.0)),
                (MultiIndex::new(vec![2, 1]), Complex64::new(0.5, -1.0)),
            ],
        )
        .unwrap();
        let z = [Complex64::new(0.2, 0.1), Complex64::new(-0.3, 0.0)];
        let direct = c(1.0) + Complex64::new(0.5, -1.0) * z[0] * z[0] * z[1];
        assert!((h.evaluate(&z).unwrap() - direct).norm() < 1e-15);
    }
}
