//! Curvature of the line bundle of a kernel, its split along `Z` into
//! transversal and tangential parts, the angle invariant of the jet frame and
//! the orthonormal-frame coefficients.
//!
//! Sign convention: the curvature is `𝒦 = −∂∂̄ log K`, which is negative
//! definite for the built-in families.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt;
use crate::jets::{jet_action_matrix, jet_kernel, JetKernel};
use crate::normalize::normalize_kernel;
use crate::series::{restrict_flat, HoloSeries, HypersurfaceSpec, SesquiSeries, Side};

/// `m × m` matrix of series, entry `(i, j) = −∂_i ∂̄_j log K`.
#[derive(Clone, Debug)]
pub struct CurvatureForm {
    dim: usize,
    entries: Vec<SesquiSeries>,
}

impl CurvatureForm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based entry.
    pub fn entry(&self, i: usize, j: usize) -> &SesquiSeries {
        &self.entries[i * self.dim + j]
    }

    pub fn evaluate(&self, z: &[Complex64], w: &[Complex64], radius: f64) -> Result<DMatrix<Complex64>> {
        let m = self.dim;
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.entry(i, j).evaluate(z, w, radius)?;
            }
        }
        Ok(out)
    }

    /// `+∂∂̄ log K`, the opposite sign convention.
    pub fn raw_value(&self, z: &[Complex64], w: &[Complex64], radius: f64) -> Result<DMatrix<Complex64>> {
        Ok(-self.evaluate(z, w, radius)?)
    }
}

pub fn curvature_form(k0: &SesquiSeries) -> Result<CurvatureForm> {
    let log = k0.log_series()?;
    let m = k0.dim();
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        let di = log.differentiate(Side::Z, i)?;
        for j in 0..m {
            entries.push(di.differentiate(Side::WBar, j)?.scale(Complex64::new(-1.0, 0.0)));
        }
    }
    Ok(CurvatureForm { dim: m, entries })
}

/// `−(K ∂_i∂̄_j K − ∂_i K ∂̄_j K) / K²` evaluated at `(z, w)`, without taking
/// a series logarithm.
pub fn curvature_rational(k: &SesquiSeries, z: &[Complex64], w: &[Complex64], radius: f64) -> Result<DMatrix<Complex64>> {
    let m = k.dim();
    let v = k.evaluate(z, w, radius)?;
    if v == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularKernel);
    }
    let mut dz = Vec::with_capacity(m);
    let mut dw = Vec::with_capacity(m);
    let mut dzs = Vec::with_capacity(m);
    for i in 0..m {
        let d = k.differentiate(Side::Z, i)?;
        dz.push(d.evaluate(z, w, radius)?);
        dw.push(k.differentiate(Side::WBar, i)?.evaluate(z, w, radius)?);
        dzs.push(d);
    }
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let dd = dzs[i].differentiate(Side::WBar, j)?.evaluate(z, w, radius)?;
            out[(i, j)] = -(v * dd - dz[i] * dw[j]) / (v * v);
        }
    }
    Ok(out)
}

/// Curvature in straightened coordinates, restricted to `Z`.
#[derive(Clone, Debug)]
pub struct SplitCurvature {
    /// `𝒦̂₁₁|_Z`.
    pub trans: SesquiSeries,
    /// `𝒦̂_{ab}|_Z`, `a, b ≥ 2`, row-major `(m−1) × (m−1)`.
    pub tan: Vec<SesquiSeries>,
}

impl SplitCurvature {
    pub fn tangential_dim(&self) -> usize {
        self.trans.dim()
    }

    /// `K_trans` at the point of `Z` over `t`.
    pub fn trans_at(&self, t: &[Complex64], radius: f64) -> Result<f64> {
        Ok(self.trans.evaluate(t, t, radius)?.re)
    }

    pub fn tan_at(&self, t: &[Complex64], radius: f64) -> Result<DMatrix<Complex64>> {
        let n = self.tangential_dim();
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                out[(a, b)] = self.tan[a * n + b].evaluate(t, t, radius)?;
            }
        }
        Ok(out)
    }
}

/// Pulls the curvature back to straightened coordinates
/// `z_n = ζ₁ + g(ζ′)`, `z′ = ζ′` through the Jacobian,
/// `𝒦̂_{ab} = Σ ∂z_i/∂ζ_a · 𝒦_{ij} · conj(∂z_j/∂ζ_b)`, and restricts to `ζ₁ = 0`.
pub fn split_curvature(form: &CurvatureForm, z: &HypersurfaceSpec) -> Result<SplitCurvature> {
    let m = form.dim();
    let cap = form.entry(0, 0).cap();
    z.validate(m, cap)?;
    let normal = z.normal_index - 1;
    let tangential: Vec<usize> = (0..m).filter(|&i| i != normal).collect();
    let mut dg = Vec::with_capacity(m - 1);
    if let Some(g) = &z.graph {
        for c in 0..m - 1 {
            dg.push(g.differentiate(c)?.prepend_variable());
        }
    }
    // column a of the Jacobian as (original index, factor); None for 1
    let column = |a: usize| -> Vec<(usize, Option<&HoloSeries>)> {
        if a == 0 {
            vec![(normal, None)]
        } else {
            let mut v = vec![(tangential[a - 1], None)];
            if let Some(d) = dg.get(a - 1) {
                v.push((normal, Some(d)));
            }
            v
        }
    };
    let one = HoloSeries::one(m, cap);
    let entry = |a: usize, b: usize| -> Result<SesquiSeries> {
        let mut acc = SesquiSeries::zero(m, cap);
        for (i, fi) in column(a) {
            for (j, fj) in column(b) {
                let s = z.straighten(form.entry(i, j))?;
                let s = if fi.is_none() && fj.is_none() {
                    s
                } else {
                    s.sandwich(fi.unwrap_or(&one), fj.unwrap_or(&one))?
                };
                acc = acc.add(&s)?;
            }
        }
        restrict_flat(&acc)
    };
    let trans = entry(0, 0)?;
    let mut tan = Vec::with_capacity((m - 1) * (m - 1));
    for a in 1..m {
        for b in 1..m {
            tan.push(entry(a, b)?);
        }
    }
    Ok(SplitCurvature { trans, tan })
}

/// `⟨(∂̄e)(w), e(w)⟩ = (JK₀)_{0,1}(w, w)` for `w ∈ Z`.
pub fn angle_invariant(jk: &JetKernel, w: &[Complex64], radius: f64) -> Result<Complex64> {
    let z = jk.hypersurface();
    z.check_on(w)?;
    let t = z.tangential_part(w);
    jk.restricted_entry(0, 1)?.evaluate(&t, &t, radius)
}

/// Coefficients of the orthonormal frame `{e/‖e‖, a e + b ∂̄e}` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameCoefficients {
    #[serde(serialize_with = "fmt::complex")]
    pub a: Complex64,
    #[serde(serialize_with = "fmt::f64")]
    pub b: f64,
    /// `‖e(w)‖`.
    #[serde(serialize_with = "fmt::f64")]
    pub e_norm: f64,
    /// `b‖e‖ = (−K_trans)^{−1/2}`.
    #[serde(serialize_with = "fmt::f64")]
    pub b_norm: f64,
}

fn frame_from(angle: Complex64, e_norm_sq: f64, k_trans: f64) -> Result<FrameCoefficients> {
    if k_trans.is_nan() || k_trans >= 0.0 {
        return Err(Error::Signature(k_trans));
    }
    if e_norm_sq.is_nan() || e_norm_sq <= 0.0 {
        return Err(Error::SingularKernel);
    }
    let e_norm = e_norm_sq.sqrt();
    let b_norm = 1.0 / (-k_trans).sqrt();
    Ok(FrameCoefficients {
        a: -angle * b_norm / (e_norm * e_norm_sq),
        b: b_norm / e_norm,
        e_norm,
        b_norm,
    })
}

/// `−a‖e‖³ = ⟨(∂̄e)(w), e(w)⟩ (−K_trans)^{−1/2}` and `b‖e‖ = (−K_trans)^{−1/2}`
/// with `‖e(w)‖² = K₀(w, w)`.
pub fn frame_coefficients(jk: &JetKernel, split: &SplitCurvature, w: &[Complex64], radius: f64) -> Result<FrameCoefficients> {
    let angle = angle_invariant(jk, w, radius)?;
    let t = jk.hypersurface().tangential_part(w);
    let e_norm_sq = jk.restricted_entry(0, 0)?.evaluate(&t, &t, radius)?.re;
    frame_from(angle, e_norm_sq, split.trans_at(&t, radius)?)
}

/// `(∂φ)(w)` along the normal, in straightened coordinates.
fn normal_derivative(z: &HypersurfaceSpec, phi: &HoloSeries, w: &[Complex64]) -> Result<Complex64> {
    let straight = z.straighten_holo(phi)?;
    let mut zeta = z.tangential_part(w);
    zeta.insert(0, Complex64::new(0.0, 0.0));
    jet_action_matrix(&straight, 2)?.entry(1, 0).evaluate(&zeta)
}

/// `N_orth(w) = [[0, b‖e‖ (∂φ)(w)], [0, 0]]`.
pub fn nilpotent_orth(
    jk: &JetKernel,
    split: &SplitCurvature,
    phi: &HoloSeries,
    w: &[Complex64],
    radius: f64,
) -> Result<DMatrix<Complex64>> {
    let fc = frame_coefficients(jk, split, w, radius)?;
    let d = normal_derivative(jk.hypersurface(), phi, w)?;
    let zero = Complex64::new(0.0, 0.0);
    Ok(DMatrix::from_row_slice(2, 2, &[zero, d * fc.b_norm, zero, zero]))
}

const ANGLES: [f64; 8] = [0.0, 4.0, 2.0, -2.0, 1.0, 3.0, -1.0, -3.0];

/// Scalar grid values: `0`, then rings of radius `r, r/2, r/4, …` with eight
/// angles each, in the order `0, π, π/2, −π/2, π/4, 3π/4, −π/4, −3π/4`.
pub fn scalar_grid(radius: f64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        out.push(Complex64::new(0.0, 0.0));
    }
    let mut ring = radius;
    while out.len() < n {
        for k in ANGLES {
            if out.len() == n {
                break;
            }
            let theta = k * std::f64::consts::FRAC_PI_4;
            let v = Complex64::from_polar(ring, theta);
            // keep axis points exact
            let v = Complex64::new(round_axis(v.re, ring), round_axis(v.im, ring));
            out.push(v);
        }
        ring /= 2.0;
    }
    out
}

fn round_axis(x: f64, r: f64) -> f64 {
    if x.abs() < 1e-15 * r {
        0.0
    } else if (x.abs() - r).abs() < 1e-15 * r {
        r.copysign(x)
    } else {
        x
    }
}

/// Tangential coordinates of the grid on `Z`: the first tangential coordinate
/// runs over [`scalar_grid`], the others are 0.
pub fn z_grid(tangential_dim: usize, radius: f64, n: usize) -> Vec<Vec<Complex64>> {
    scalar_grid(radius, n)
        .into_iter()
        .map(|v| {
            let mut t = vec![Complex64::new(0.0, 0.0); tangential_dim];
            if let Some(first) = t.first_mut() {
                *first = v;
            }
            t
        })
        .collect()
}

/// Points of the domain: the origin, then
/// `w_k[c] = t_{1 + (k − 1 + 5c) mod (n − 1)} / √m` over the nonzero values of
/// [`scalar_grid`], which keeps every point in the Euclidean ball of radius `r`.
pub fn omega_grid(dim: usize, radius: f64, n: usize) -> Vec<Vec<Complex64>> {
    let t = scalar_grid(radius, n);
    let s = (dim as f64).sqrt();
    (0..n)
        .map(|k| {
            (0..dim)
                .map(|c| if k == 0 { t[0] } else { t[1 + (k - 1 + 5 * c) % (n - 1)] / s })
                .collect()
        })
        .collect()
}

/// Invariants at one point of `Z`.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantPoint {
    #[serde(serialize_with = "fmt::complex_vec")]
    pub w: Vec<Complex64>,
    #[serde(serialize_with = "fmt::f64")]
    pub k_trans: f64,
    #[serde(serialize_with = "fmt::complex_matrix")]
    pub k_tan: Vec<Vec<Complex64>>,
    #[serde(serialize_with = "fmt::complex")]
    pub angle: Complex64,
    #[serde(serialize_with = "fmt::f64")]
    pub b_norm: f64,
    #[serde(serialize_with = "fmt::complex")]
    pub n_orth_12: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    #[serde(serialize_with = "fmt::f64")]
    pub radius: f64,
    pub hypersurface: HypersurfaceSpec,
    pub points: Vec<InvariantPoint>,
}

impl InvariantReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per grid point; for more than one tangential variable the
    /// remaining `K_tan` entries follow in column-major order.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(1, |p| p.k_tan.len());
        let mut header = vec![
            "w2_re", "w2_im", "k_trans", "k_tan_re", "k_tan_im", "angle_re", "angle_im", "b_norm",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        let extra: Vec<(usize, usize)> = (0..n)
            .flat_map(|c| (0..n).map(move |r| (r, c)))
            .skip(1)
            .collect();
        for (r, c) in &extra {
            header.push(format!("k_tan_{}{}_re", r + 2, c + 2));
            header.push(format!("k_tan_{}{}_im", r + 2, c + 2));
        }
        let mut out = header.join(",");
        out.push('\n');
        for p in &self.points {
            let t = self.hypersurface.tangential_part(&p.w);
            let w2 = t.first().copied().unwrap_or_default();
            let tan00 = p.k_tan.first().and_then(|r| r.first()).copied().unwrap_or_default();
            let mut row = vec![
                w2.re,
                w2.im,
                p.k_trans,
                tan00.re,
                tan00.im,
                p.angle.re,
                p.angle.im,
                p.b_norm,
            ];
            for &(r, c) in &extra {
                row.push(p.k_tan[r][c].re);
                row.push(p.k_tan[r][c].im);
            }
            let cells: Vec<String> = row.into_iter().map(fmt::sig17).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything needed to evaluate the invariants of the quotient module of a
/// kernel along `Z`, built once from the normalized kernel.
#[derive(Clone, Debug)]
pub struct QuotientGeometry {
    pub k0: SesquiSeries,
    pub jet: JetKernel,
    pub curvature: CurvatureForm,
    pub split: SplitCurvature,
    pub phi: HoloSeries,
    restricted: Vec<SesquiSeries>,
}

impl QuotientGeometry {
    /// Normalizes `k` and builds the order-2 jet kernel and curvature.
    pub fn new(k: &SesquiSeries, z: &HypersurfaceSpec) -> Result<Self> {
        let k0 = normalize_kernel(k)?;
        let jet = jet_kernel(&k0, 2, z)?;
        let curvature = curvature_form(&k0)?;
        let split = split_curvature(&curvature, z)?;
        let phi = z.defining_function(k0.dim(), k0.cap())?;
        let restricted = jet.restricted()?;
        Ok(QuotientGeometry {
            k0,
            jet,
            curvature,
            split,
            phi,
            restricted,
        })
    }

    pub fn hypersurface(&self) -> &HypersurfaceSpec {
        self.jet.hypersurface()
    }

    /// Restricted normalized jet kernel entries, row-major `2 × 2`.
    pub fn restricted_jet(&self) -> &[SesquiSeries] {
        &self.restricted
    }

    /// Invariants at the point of `Z` over the tangential coordinates `t`.
    pub fn at(&self, t: &[Complex64], radius: f64) -> Result<InvariantPoint> {
        let z = self.hypersurface();
        let w = z.point_on(t)?;
        let k_trans = self.split.trans_at(t, radius)?;
        let tan = self.split.tan_at(t, radius)?;
        let angle = self.restricted[1].evaluate(t, t, radius)?;
        let e_norm_sq = self.restricted[0].evaluate(t, t, radius)?.re;
        let fc = frame_from(angle, e_norm_sq, k_trans)?;
        let d = normal_derivative(z, &self.phi, &w)?;
        Ok(InvariantPoint {
            w,
            k_trans,
            k_tan: (0..tan.nrows()).map(|r| tan.row(r).iter().copied().collect()).collect(),
            angle,
            b_norm: fc.b_norm,
            n_orth_12: d * fc.b_norm,
        })
    }

    pub fn report(&self, radius: f64, grid: usize) -> Result<InvariantReport> {
        let points = z_grid(self.split.tangential_dim(), radius, grid)
            .iter()
            .map(|t| self.at(t, radius))
            .collect::<Result<Vec<_>>>()?;
        Ok(InvariantReport {
            radius,
            hypersurface: self.hypersurface().clone(),
            points,
        })
    }
}

/// Invariant report of the quotient module of `k` along `Z` on the grid of
/// `grid` points within `radius`.
pub fn invariant_report(k: &SesquiSeries, z: &HypersurfaceSpec, radius: f64, grid: usize) -> Result<InvariantReport> {
    QuotientGeometry::new(k, z)?.report(radius, grid)
}
