//! Finite model of the Hilbert module on the polynomials of degree at most
//! `D_model`: Gram matrix, multiplication operators and their adjoints,
//! eigenvectors of the adjoint tuple, and the jet reproducing identity.
//!
//! Coefficient vectors are indexed by the monomials of the model basis. With
//! `C` the kernel's coefficient block, the inner product is
//! `⟨x, y⟩ = yᴴ H x` with `H = C⁻¹`, which makes `K(·, w)` (coefficient vector
//! `C conj(v_w)`, `v_w = (w^α)`) reproduce every polynomial of the model. The
//! monomial Gram matrix `G_{αβ} = ⟨z^α, z^β⟩ = Hᵀ` satisfies `G conj(C) = I`.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt;
use crate::geometry::{omega_grid, z_grid};
use crate::jets::jet_kernel;
use crate::series::{monomial_values, Basis, HypersurfaceSpec, SesquiSeries};

/// Threshold of `G conj(C) = I`.
pub const GRAM_TOL: f64 = 1e-10;
/// Relative eigenvector residual threshold.
pub const EIGEN_TOL: f64 = 1e-5;
/// Jet reproducing identity threshold.
pub const JET_TOL: f64 = 1e-6;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-7;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct TruncatedModel {
    basis: Arc<Basis>,
    c: DMatrix<Complex64>,
    h: DMatrix<Complex64>,
    /// `C = L Lᴴ`; the columns of `L` are an orthonormal basis.
    l: DMatrix<Complex64>,
    m: Vec<DMatrix<Complex64>>,
    m_adj: Vec<DMatrix<Complex64>>,
}

/// Builds the model on the monomials of degree at most `d_model`.
pub fn truncated_model(k: &SesquiSeries, d_model: usize) -> Result<TruncatedModel> {
    if k.cap() < d_model {
        return Err(Error::InsufficientDegree {
            needed: d_model,
            available: k.cap(),
        });
    }
    let basis = Basis::get(k.dim(), d_model);
    let map: Vec<usize> = basis
        .monomials()
        .iter()
        .map(|m| k.basis().index_of(m).expect("smaller cap"))
        .collect();
    let n = basis.len();
    if !k.is_hermitian() {
        return Err(Error::InvalidKernel("coefficient matrix is not Hermitian".into()));
    }
    let c = DMatrix::from_fn(n, n, |a, b| k.at(map[a], map[b]));
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = Cholesky::new(c.clone()).ok_or_else(|| {
        Error::RankDeficient(format!("coefficient block of degree {d_model} is not positive definite"))
    })?;
    let l = chol.l();
    let h = chol.inverse();
    let m: Vec<DMatrix<Complex64>> = (0..k.dim())
        .map(|i| {
            let mut s = DMatrix::zeros(n, n);
            for t in 0..n {
                if let Some(u) = basis.up(i, t) {
                    s[(u, t)] = Complex64::new(1.0, 0.0);
                }
            }
            s
        })
        .collect();
    let m_adj = m.iter().map(|mi| &c * mi.adjoint() * &h).collect();
    Ok(TruncatedModel {
        basis,
        c,
        h,
        l,
        m,
        m_adj,
    })
}

impl TruncatedModel {
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn d_model(&self) -> usize {
        self.basis.cap()
    }

    pub fn coefficient_matrix(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    /// `G_{αβ} = ⟨z^α, z^β⟩`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.h.transpose()
    }

    /// Multiplication by `z_i`, truncated at degree `D_model`.
    pub fn multiplication(&self, i: usize) -> &DMatrix<Complex64> {
        &self.m[i]
    }

    /// Adjoint of multiplication by `z_i` in the model inner product.
    pub fn adjoint(&self, i: usize) -> &DMatrix<Complex64> {
        &self.m_adj[i]
    }

    pub fn inner(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
        (y.adjoint() * &self.h * x)[(0, 0)]
    }

    pub fn norm(&self, x: &DVector<Complex64>) -> f64 {
        self.inner(x, x).re.max(0.0).sqrt()
    }

    /// Coefficient vector of `K(·, w)`.
    pub fn kernel_vector(&self, w: &[Complex64]) -> DVector<Complex64> {
        let v = DVector::from_iterator(
            self.basis.len(),
            monomial_values(&self.basis, w).into_iter().map(|c| c.conj()),
        );
        &self.c * v
    }

    /// `max |(G conj(C) − I)_{αβ}|`.
    pub fn gram_defect(&self) -> f64 {
        let n = self.basis.len();
        (self.gram() * self.c.conjugate() - DMatrix::identity(n, n)).camax()
    }

    /// `max |⟨M_i x, y⟩ − ⟨x, M_i* y⟩|` over monomials `x, y`, relative to
    /// the largest Gram entry.
    pub fn adjoint_defect(&self) -> f64 {
        let scale = self.h.camax();
        self.m
            .iter()
            .zip(&self.m_adj)
            .map(|(m, a)| (&self.h * m - a.adjoint() * &self.h).camax() / scale)
            .fold(0.0, f64::max)
    }

    /// `max |M_i M_j − M_j M_i|`.
    pub fn commutation_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.m.len() {
            for j in 0..i {
                d = d.max((&self.m[i] * &self.m[j] - &self.m[j] * &self.m[i]).camax());
            }
        }
        d
    }

    /// Indices of the monomials of degree below `D_model`.
    fn lower(&self) -> Vec<usize> {
        let top = self.d_model();
        (0..self.basis.len())
            .filter(|&t| self.basis.monomial(t).degree() < top)
            .collect()
    }

    /// `∂^j` along variable `var` of every monomial, evaluated at `w`.
    fn derivative_values(&self, w: &[Complex64], var: usize, j: usize) -> DVector<Complex64> {
        let vals = monomial_values(&self.basis, w);
        DVector::from_fn(self.basis.len(), |t, _| {
            let e = self.basis.monomial(t).get(var);
            if e < j {
                return ZERO;
            }
            let mut s = t;
            for _ in 0..j {
                s = self.basis.down(var, s).expect("positive entry");
            }
            let falling: f64 = (0..j).map(|q| (e - q) as f64).product();
            vals[s] * falling
        })
    }
}

/// Eigenvector test at one point.
#[derive(Clone, Debug, Serialize)]
pub struct EigenCheck {
    #[serde(serialize_with = "fmt::complex_vec")]
    pub w: Vec<Complex64>,
    pub holds: bool,
    /// `max_i ‖P(M_i* x − w̄_i x)‖ / ‖x‖`, `P` the orthogonal projection on
    /// the polynomials of degree below `D_model`.
    #[serde(serialize_with = "fmt::f64")]
    pub residual: f64,
    /// The same without the projection; it carries the truncation of the
    /// top degree and is reported for information.
    #[serde(serialize_with = "fmt::f64")]
    pub full_residual: f64,
    /// Dimension of the joint numerical kernel of `M_i* − w̄_i`.
    pub eigenspace_dim: usize,
    /// `|cos|` of the angle between the numerical kernel and `K(·, w)`.
    #[serde(serialize_with = "fmt::f64")]
    pub alignment: f64,
}

/// Checks that `K(·, w)` is a joint eigenvector of the adjoint tuple with
/// eigenvalues `w̄_i`, and that the joint eigenspace is one-dimensional.
///
/// Both are tested against the polynomials of degree below `D_model`, the
/// largest space the truncated multiplication operators map into the model.
pub fn check_eigenvector(model: &TruncatedModel, w: &[Complex64], tol: f64) -> Result<EigenCheck> {
    if w.len() != model.dim() {
        return Err(Error::InvalidOperand(format!(
            "point has {} coordinates, model has {}",
            w.len(),
            model.dim()
        )));
    }
    let x = model.kernel_vector(w);
    let xn = model.norm(&x);
    let s = model.lower();
    let hs = DMatrix::from_fn(s.len(), s.len(), |a, b| model.h[(s[a], s[b])]);
    let hs = Cholesky::new(hs).ok_or_else(|| Error::RankDeficient("Gram block is not positive definite".into()))?;
    let mut residual: f64 = 0.0;
    let mut full_residual: f64 = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let r = model.adjoint(i) * &x - &x * wi.conj();
        full_residual = full_residual.max(model.norm(&r) / xn);
        let hr = &model.h * &r;
        let b = DVector::from_fn(s.len(), |a, _| hr[s[a]]);
        let proj = (b.adjoint() * hs.solve(&b))[(0, 0)].re.max(0.0).sqrt();
        residual = residual.max(proj / xn);
    }

    let n = model.basis.len();
    // zero rows keep the matrix tall so every right singular vector is returned
    let rows = s.len() * w.len();
    let mut a = DMatrix::zeros(rows.max(n), n);
    for (i, wi) in w.iter().enumerate() {
        let block = model.multiplication(i).adjoint() * &model.h - &model.h * wi.conj();
        for (k, &t) in s.iter().enumerate() {
            a.row_mut(i * s.len() + k).copy_from(&block.row(t));
        }
    }
    let svd = a.svd(false, true);
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let rank = sigma.iter().filter(|&&x| x > RANK_TOL * smax).count();
    let eigenspace_dim = n - rank;
    let vt = svd.v_t.expect("requested");
    let v = vt.row(sigma.argmin().0).adjoint();
    let alignment = (v.adjoint() * &x)[(0, 0)].norm() / (v.norm() * x.norm());
    Ok(EigenCheck {
        w: w.to_vec(),
        holds: residual <= tol && eigenspace_dim == 1,
        residual,
        full_residual,
        eigenspace_dim,
        alignment,
    })
}

/// Jet reproducing identity over all monomials.
#[derive(Clone, Debug, Serialize)]
pub struct JetUnitarityCheck {
    pub holds: bool,
    /// `max |⟨Jh, JK(·, w)ζ⟩ − ⟨(Jh)(w), ζ⟩|` over monomials `h`, `ζ` the
    /// standard basis and the points.
    #[serde(serialize_with = "fmt::f64")]
    pub max_defect: f64,
}

/// Declares `{J e_n}` orthonormal for the orthonormal basis `e_n` (columns of
/// the Cholesky factor of `C`) and checks
/// `⟨Jh, JK(·, w)ζ⟩ = ⟨(Jh)(w), ζ⟩` for every monomial `h`, every standard
/// basis vector `ζ` of `ℂ^order`, and every point, with derivatives along `z_{var+1}`.
pub fn check_jet_unitarity(
    model: &TruncatedModel,
    order: usize,
    var: usize,
    points: &[Vec<Complex64>],
    tol: f64,
) -> Result<JetUnitarityCheck> {
    if var >= model.dim() {
        return Err(Error::IndexOutOfRange {
            index: var + 1,
            dim: model.dim(),
        });
    }
    let n = model.basis.len();
    // coordinates of each monomial in the orthonormal basis: L a = e_α
    let coords = model
        .l
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::RankDeficient("Cholesky factor is singular".into()))?;
    let rebuilt = &model.l * &coords;
    let mut max_defect: f64 = 0.0;
    for w in points {
        for j in 0..order {
            let u = model.derivative_values(w, var, j);
            // ⟨Jh, JK(·, w)ε_j⟩ = Σ_n a_n ∂^j e_n(w) = uᵀ L a
            let lhs = u.transpose() * &rebuilt;
            for t in 0..n {
                max_defect = max_defect.max((lhs[(0, t)] - u[t]).norm());
            }
        }
    }
    Ok(JetUnitarityCheck {
        holds: max_defect <= tol,
        max_defect,
    })
}

/// `max |Σ_n ∂^ℓ e_n(w) conj(∂^j e_n(w)) − (JK)_{ℓ,j}(w, w)|` between the
/// model and the series jet kernel at points of the flat hypersurface
/// `z_{var+1} = 0`. Dominated by the degree truncation of the model.
pub fn jet_kernel_gap(
    model: &TruncatedModel,
    k: &SesquiSeries,
    order: usize,
    var: usize,
    points: &[Vec<Complex64>],
    radius: f64,
) -> Result<f64> {
    let z = HypersurfaceSpec::flat(var + 1);
    let jk = jet_kernel(k, order, &z)?;
    let mut gap: f64 = 0.0;
    for w in points {
        let t = z.tangential_part(w);
        let series = jk.evaluate_on(&t, &t, radius)?;
        let u: Vec<DVector<Complex64>> = (0..order).map(|j| model.derivative_values(w, var, j)).collect();
        for l in 0..order {
            for j in 0..order {
                let v = (u[l].transpose() * &model.c * u[j].conjugate())[(0, 0)];
                gap = gap.max((v - series[(l, j)]).norm());
            }
        }
    }
    Ok(gap)
}

/// Five points of the domain within `radius`, starting at the origin.
pub fn sample_points(dim: usize, radius: f64) -> Vec<Vec<Complex64>> {
    omega_grid(dim, radius, 16).into_iter().take(5).collect()
}

/// Points of the flat hypersurface `z₁ = 0` on the tangential grid.
pub fn hypersurface_points(dim: usize, radius: f64, grid: usize) -> Vec<Vec<Complex64>> {
    z_grid(dim - 1, radius, grid)
        .into_iter()
        .map(|mut t| {
            t.insert(0, ZERO);
            t
        })
        .collect()
}

/// Everything the oracle checks for one kernel.
#[derive(Clone, Debug, Serialize)]
pub struct ModelReport {
    pub d_model: usize,
    pub size: usize,
    pub holds: bool,
    #[serde(serialize_with = "fmt::f64")]
    pub gram_defect: f64,
    #[serde(serialize_with = "fmt::f64")]
    pub adjoint_defect: f64,
    #[serde(serialize_with = "fmt::f64")]
    pub commutation_defect: f64,
    pub eigenvectors: Vec<EigenCheck>,
    pub jet_unitarity: JetUnitarityCheck,
    #[serde(serialize_with = "fmt::f64")]
    pub jet_kernel_gap: f64,
}

impl ModelReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Builds the model and runs every check at the default thresholds; jet
/// checks use order 2 along `z₁` on the hypersurface grid.
pub fn model_report(k: &SesquiSeries, d_model: usize, radius: f64, grid: usize) -> Result<ModelReport> {
    let model = truncated_model(k, d_model)?;
    let eigenvectors = sample_points(k.dim(), radius)
        .iter()
        .map(|w| check_eigenvector(&model, w, EIGEN_TOL))
        .collect::<Result<Vec<_>>>()?;
    let points = hypersurface_points(k.dim(), radius, grid);
    let jet_unitarity = check_jet_unitarity(&model, 2, 0, &points, JET_TOL)?;
    let gap = jet_kernel_gap(&model, k, 2, 0, &points, radius)?;
    let gram_defect = model.gram_defect();
    let adjoint_defect = model.adjoint_defect();
    let commutation_defect = model.commutation_defect();
    let holds = gram_defect <= GRAM_TOL
        && adjoint_defect <= 1e-12
        && commutation_defect == 0.0
        && eigenvectors.iter().all(|e| e.holds)
        && jet_unitarity.holds;
    Ok(ModelReport {
        d_model,
        size: model.basis.len(),
        holds,
        gram_defect,
        adjoint_defect,
        commutation_defect,
        eigenvectors,
        jet_unitarity,
        jet_kernel_gap: gap,
    })
}
