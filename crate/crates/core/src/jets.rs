//! Jet kernels, the jet module action and the nilpotent fiber action of the
//! defining function.
//!
//! All derivatives are taken along the normal coordinate of straightened
//! coordinates (see [`HypersurfaceSpec`]).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{restrict_flat, HoloSeries, HypersurfaceSpec, SesquiSeries, Side};

/// `(JK)_{ℓ,j} = ∂^ℓ ∂̄^j K`, `0 ≤ ℓ, j < k`, in straightened coordinates.
///
/// Column `j` is the frame vector `e_j(w)` of the jet bundle.
#[derive(Clone, Debug, Serialize)]
pub struct JetKernel {
    order: usize,
    hypersurface: HypersurfaceSpec,
    /// Row-major `k × k`.
    entries: Vec<SesquiSeries>,
}

impl JetKernel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn hypersurface(&self) -> &HypersurfaceSpec {
        &self.hypersurface
    }

    pub fn entry(&self, l: usize, j: usize) -> &SesquiSeries {
        &self.entries[l * self.order + j]
    }

    /// Entry `(ℓ, j)` restricted to `Z`, a series in the tangential variables.
    pub fn restricted_entry(&self, l: usize, j: usize) -> Result<SesquiSeries> {
        restrict_flat(self.entry(l, j))
    }

    /// `JK|_Z` as a row-major `k × k` list.
    pub fn restricted(&self) -> Result<Vec<SesquiSeries>> {
        self.entries.iter().map(restrict_flat).collect()
    }

    /// `JK(z, w)` for tangential coordinates `z′, w′` of two points on `Z`.
    pub fn evaluate_on(&self, z: &[Complex64], w: &[Complex64], radius: f64) -> Result<DMatrix<Complex64>> {
        let k = self.order;
        let mut m = DMatrix::zeros(k, k);
        for l in 0..k {
            for j in 0..k {
                m[(l, j)] = self.restricted_entry(l, j)?.evaluate(z, w, radius)?;
            }
        }
        Ok(m)
    }
}

/// Jet kernel of order `k` along the normal of `Z`.
pub fn jet_kernel(k: &SesquiSeries, order: usize, z: &HypersurfaceSpec) -> Result<JetKernel> {
    if order == 0 {
        return Err(Error::InvalidOperand("jet order must be at least 1".into()));
    }
    let straight = z.straighten(k)?;
    let available = straight.trusted_degrees()[0].min(straight.trusted_degrees()[1]);
    if order - 1 > available {
        return Err(Error::InsufficientDegree {
            needed: order - 1,
            available,
        });
    }
    let mut rows = vec![straight];
    for l in 1..order {
        rows.push(rows[l - 1].differentiate(Side::Z, 0)?);
    }
    let mut entries = Vec::with_capacity(order * order);
    for row in rows {
        let mut cur = row;
        for j in 0..order {
            if j > 0 {
                cur = cur.differentiate(Side::WBar, 0)?;
            }
            entries.push(cur.clone());
        }
    }
    Ok(JetKernel {
        order,
        hypersurface: z.clone(),
        entries,
    })
}

/// Lower-triangular `(Jf)_{ℓ,j} = C(ℓ, j) ∂^{ℓ−j} f` for `j ≤ ℓ`.
#[derive(Clone, Debug)]
pub struct JetActionMatrix {
    order: usize,
    entries: Vec<HoloSeries>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Jf` for `f` in straightened coordinates (normal variable first).
pub fn jet_action_matrix(f: &HoloSeries, order: usize) -> Result<JetActionMatrix> {
    if order == 0 {
        return Err(Error::InvalidOperand("jet order must be at least 1".into()));
    }
    let mut derivs = vec![f.clone()];
    for d in 1..order {
        derivs.push(derivs[d - 1].differentiate(0)?);
    }
    let zero = HoloSeries::zero(f.dim(), f.cap());
    let mut entries = Vec::with_capacity(order * order);
    for l in 0..order {
        for j in 0..order {
            entries.push(if j <= l {
                derivs[l - j].scale(Complex64::new(binomial(l, j), 0.0))
            } else {
                zero.clone()
            });
        }
    }
    Ok(JetActionMatrix { order, entries })
}

impl JetActionMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, l: usize, j: usize) -> &HoloSeries {
        &self.entries[l * self.order + j]
    }

    /// Matrix product with series entries.
    pub fn matmul(&self, other: &JetActionMatrix) -> Result<JetActionMatrix> {
        if self.order != other.order {
            return Err(Error::InvalidOperand("jet orders differ".into()));
        }
        let k = self.order;
        let first = self.entry(0, 0);
        let mut entries = Vec::with_capacity(k * k);
        for l in 0..k {
            for j in 0..k {
                let mut acc = HoloSeries::zero(first.dim(), first.cap());
                for i in 0..k {
                    acc = acc.add(&self.entry(l, i).mul(other.entry(i, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(JetActionMatrix { order: k, entries })
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let k = self.order;
        let mut m = DMatrix::zeros(k, k);
        for l in 0..k {
            for j in 0..k {
                m[(l, j)] = self.entry(l, j).evaluate(z)?;
            }
        }
        Ok(m)
    }
}

/// Matrix of `J_φ^*` on the fiber at `w ∈ Z` in the frame `{e_ℓ(w)}`: the
/// conjugate transpose of `(Jφ)(w)`, strictly upper triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentFiber {
    pub matrix: DMatrix<Complex64>,
}

impl NilpotentFiber {
    pub fn is_strictly_upper(&self) -> bool {
        let k = self.matrix.nrows();
        (0..k).all(|l| (0..=l).all(|j| self.matrix[(l, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn power(&self, p: usize) -> DMatrix<Complex64> {
        let k = self.matrix.nrows();
        (0..p).fold(DMatrix::identity(k, k), |acc, _| acc * &self.matrix)
    }
}

/// The nilpotent action of the defining function `φ` (original coordinates)
/// on the jet fiber at the point `w` (original coordinates) of `Z`.
pub fn nilpotent_at(jk: &JetKernel, phi: &HoloSeries, w: &[Complex64]) -> Result<NilpotentFiber> {
    let z = jk.hypersurface();
    z.check_on(w)?;
    let straight = z.straighten_holo(phi)?;
    let mut zeta = z.tangential_part(w);
    zeta.insert(0, Complex64::new(0.0, 0.0));
    let jphi = jet_action_matrix(&straight, jk.order())?.evaluate(&zeta)?;
    let value = jphi[(0, 0)].norm();
    if value > 1e-10 {
        return Err(Error::InvalidOperand(format!(
            "defining function does not vanish at w (|φ(w)| = {value:e})"
        )));
    }
    let mut n = jphi.adjoint();
    for l in 0..n.nrows() {
        for j in 0..=l {
            n[(l, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(NilpotentFiber { matrix: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{build_kernel, KernelSpec};
    use crate::series::{restrict_hypersurface, MultiIndex};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn jet_kernel_of_constant() {
        let jk = jet_kernel(&SesquiSeries::one(2, 6), 2, &HypersurfaceSpec::flat(1)).unwrap();
        let m = jk.evaluate_on(&[c(0.1)], &[c(0.2)], 0.3).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]));
    }

    #[test]
    fn jet_kernel_of_product_at_origin() {
        let lambda = 2.5;
        let k = build_kernel(&KernelSpec::product_power(lambda, 1.5, 12)).unwrap();
        let jk = jet_kernel(&k, 2, &HypersurfaceSpec::flat(1)).unwrap();
        let m = jk.evaluate_on(&[c(0.0)], &[c(0.0)], 0.3).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(lambda)]));
    }

    #[test]
    fn jet_kernel_hermitian_transpose() {
        let k = build_kernel(&KernelSpec::exp_quadratic_eps(0.1, 10)).unwrap();
        let jk = jet_kernel(&k, 2, &HypersurfaceSpec::flat(1)).unwrap();
        let d = jk.entry(0, 1).max_abs_diff(&jk.entry(1, 0).adjoint()).unwrap();
        assert!(d < 1e-15);
    }

    #[test]
    fn insufficient_degree() {
        let k = SesquiSeries::one(2, 1);
        let err = jet_kernel(&k, 3, &HypersurfaceSpec::flat(1)).unwrap_err();
        assert_eq!(err, Error::InsufficientDegree { needed: 2, available: 1 });
    }

    #[test]
    fn restricted_entry_zero_matches_restriction() {
        let k = build_kernel(&KernelSpec::ball_power(2.0, 2, 8)).unwrap();
        let g = HoloSeries::from_terms(1, 8, [(mi(&[2]), c(0.5))]).unwrap();
        let z = HypersurfaceSpec::with_graph(1, g);
        let jk = jet_kernel(&k, 2, &z).unwrap();
        let a = jk.restricted_entry(0, 0).unwrap();
        let b = restrict_hypersurface(&k, &z).unwrap();
        assert_eq!(a.max_abs_diff(&b).unwrap(), 0.0);
    }

    #[test]
    fn jet_action_of_coordinate() {
        let z1 = HoloSeries::variable(2, 6, 0).unwrap();
        let j = jet_action_matrix(&z1, 2).unwrap();
        assert_eq!(j.entry(0, 0).max_abs_diff(&z1).unwrap(), 0.0);
        assert_eq!(j.entry(1, 1).max_abs_diff(&z1).unwrap(), 0.0);
        assert_eq!(j.entry(1, 0).max_abs_diff(&HoloSeries::one(2, 6)).unwrap(), 0.0);
        assert_eq!(j.entry(0, 1).terms().count(), 0);
    }

    #[test]
    fn jet_action_of_one_is_identity() {
        let j = jet_action_matrix(&HoloSeries::one(2, 6), 3).unwrap();
        let m = j.evaluate(&[c(0.1), c(0.2)]).unwrap();
        assert_eq!(m, DMatrix::identity(3, 3));
    }

    #[test]
    fn jet_action_of_square() {
        let z1 = HoloSeries::variable(2, 6, 0).unwrap();
        let sq = z1.mul(&z1).unwrap();
        let j = jet_action_matrix(&sq, 2).unwrap();
        assert_eq!(j.entry(1, 0).max_abs_diff(&z1.scale(c(2.0))).unwrap(), 0.0);
        assert_eq!(j.entry(1, 1).max_abs_diff(&sq).unwrap(), 0.0);
    }

    #[test]
    fn jet_action_is_multiplicative() {
        let f = HoloSeries::variable(2, 8, 0).unwrap();
        let g = f.add(&HoloSeries::variable(2, 8, 1).unwrap()).unwrap();
        for k in [2, 3] {
            let lhs = jet_action_matrix(&f.mul(&g).unwrap(), k).unwrap();
            let rhs = jet_action_matrix(&f, k).unwrap().matmul(&jet_action_matrix(&g, k).unwrap()).unwrap();
            for l in 0..k {
                for j in 0..k {
                    assert!(lhs.entry(l, j).max_abs_diff(rhs.entry(l, j)).unwrap() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn nilpotent_for_flat_coordinate() {
        let z = HypersurfaceSpec::flat(1);
        let jk = jet_kernel(&SesquiSeries::one(2, 6), 2, &z).unwrap();
        let phi = HoloSeries::variable(2, 6, 0).unwrap();
        let n = nilpotent_at(&jk, &phi, &[c(0.0), Complex64::new(0.1, 0.2)]).unwrap();
        assert_eq!(n.matrix, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        assert!(n.is_strictly_upper());
        assert_eq!(n.power(2), DMatrix::zeros(2, 2));
    }

    #[test]
    fn nilpotent_on_graph() {
        let g = HoloSeries::from_terms(1, 6, [(mi(&[2]), c(1.0))]).unwrap();
        let z = HypersurfaceSpec::with_graph(1, g);
        let jk = jet_kernel(&SesquiSeries::one(2, 6), 2, &z).unwrap();
        let phi = z.defining_function(2, 6).unwrap();
        let w = z.point_on(&[c(0.2)]).unwrap();
        let n = nilpotent_at(&jk, &phi, &w).unwrap();
        assert_eq!(n.matrix, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        assert!(matches!(
            nilpotent_at(&jk, &phi, &[c(0.0), c(0.2)]),
            Err(Error::NotOnHypersurface { .. })
        ));
    }
}
