use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, MultiIndex};
use super::holo::HoloSeries;
use super::sesqui::SesquiSeries;
use crate::error::{Error, Result};

/// A hypersurface `Z` through the origin, given as a graph over the
/// coordinates other than the normal one:
/// `z_n = g(z_1, …, ẑ_n, …, z_m)` with `g(0) = 0`, or `z_n = 0` when no graph
/// is given.
///
/// Straightened coordinates put the normal coordinate first and subtract the
/// graph, `ζ₁ = z_n − g(z′)`, `ζ′ = z′`, so that `Z` becomes `ζ₁ = 0` and the
/// normal derivative is `∂/∂ζ₁`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypersurfaceSpec {
    /// 1-based index of the transversal coordinate.
    pub normal_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<HoloSeries>,
}

impl Default for HypersurfaceSpec {
    fn default() -> Self {
        HypersurfaceSpec::flat(1)
    }
}

impl PartialEq for HypersurfaceSpec {
    fn eq(&self, other: &Self) -> bool {
        if self.normal_index != other.normal_index {
            return false;
        }
        match (&self.graph, &other.graph) {
            (None, None) => true,
            (Some(a), Some(b)) => a.dim() == b.dim() && a.cap() == b.cap() && a.coeffs() == b.coeffs(),
            (Some(g), None) | (None, Some(g)) => g.terms().next().is_none(),
        }
    }
}

impl HypersurfaceSpec {
    pub fn flat(normal_index: usize) -> Self {
        HypersurfaceSpec {
            normal_index,
            graph: None,
        }
    }

    pub fn with_graph(normal_index: usize, graph: HoloSeries) -> Self {
        HypersurfaceSpec {
            normal_index,
            graph: Some(graph),
        }
    }

    /// Checks the hypersurface against the ambient `(dim, cap)`.
    pub fn validate(&self, dim: usize, cap: usize) -> Result<()> {
        if dim == 0 || self.normal_index == 0 || self.normal_index > dim {
            return Err(Error::InvalidOperand(format!(
                "normal index {} outside [1, {dim}]",
                self.normal_index
            )));
        }
        if let Some(g) = &self.graph {
            if g.dim() + 1 != dim || g.cap() != cap {
                return Err(Error::InvalidOperand(format!(
                    "graph has (dim {}, cap {}), expected (dim {}, cap {cap})",
                    g.dim(),
                    g.cap(),
                    dim - 1
                )));
            }
            if g.constant_term() != Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidOperand(
                    "graph must vanish at the origin".to_string(),
                ));
            }
        }
        Ok(())
    }

    fn normal(&self) -> usize {
        self.normal_index - 1
    }

    /// Tangential coordinates `z′` of a point, in order.
    pub fn tangential_part(&self, w: &[Complex64]) -> Vec<Complex64> {
        w.iter()
            .enumerate()
            .filter(|(i, _)| *i != self.normal())
            .map(|(_, c)| *c)
            .collect()
    }

    fn graph_value(&self, tangential: &[Complex64]) -> Result<Complex64> {
        match &self.graph {
            Some(g) => g.evaluate(tangential),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// The point of `Z` over the tangential coordinates `w′`.
    pub fn point_on(&self, tangential: &[Complex64]) -> Result<Vec<Complex64>> {
        let normal = self.graph_value(tangential)?;
        let mut w = tangential.to_vec();
        w.insert(self.normal().min(w.len()), normal);
        Ok(w)
    }

    /// `|w_n − g(w′)|`.
    pub fn defect(&self, w: &[Complex64]) -> Result<f64> {
        if self.normal() >= w.len() {
            return Err(Error::InvalidOperand(format!(
                "point has {} coordinates, normal index is {}",
                w.len(),
                self.normal_index
            )));
        }
        let t = self.tangential_part(w);
        Ok((w[self.normal()] - self.graph_value(&t)?).norm())
    }

    pub fn check_on(&self, w: &[Complex64]) -> Result<()> {
        let defect = self.defect(w)?;
        if defect > 1e-10 * (1.0 + w.iter().map(|c| c.norm()).fold(0.0, f64::max)) {
            return Err(Error::NotOnHypersurface { defect });
        }
        Ok(())
    }

    /// The defining function `φ(z) = z_n − g(z′)`.
    pub fn defining_function(&self, dim: usize, cap: usize) -> Result<HoloSeries> {
        self.validate(dim, cap)?;
        let zn = HoloSeries::variable(dim, cap, self.normal())?;
        match &self.graph {
            None => Ok(zn),
            Some(g) => {
                let embedded = move_front_holo(&g.prepend_variable(), 0, self.normal());
                zn.sub(&embedded)
            }
        }
    }

    /// Rewrites a holomorphic series in straightened coordinates.
    pub fn straighten_holo(&self, h: &HoloSeries) -> Result<HoloSeries> {
        self.validate(h.dim(), h.cap())?;
        let moved = move_front_holo(h, self.normal(), 0);
        match &self.graph {
            None => Ok(moved),
            Some(g) => {
                let p = substitution_matrix(g)?;
                let src = DMatrix::from_row_slice(1, moved.coeffs().len(), moved.coeffs());
                let out = src * p;
                Ok(HoloSeries::from_raw(
                    moved.basis().clone(),
                    out.iter().copied().collect(),
                    moved.trusted_degree(),
                ))
            }
        }
    }

    /// Rewrites a sesqui series in straightened coordinates on both sides.
    pub fn straighten(&self, s: &SesquiSeries) -> Result<SesquiSeries> {
        self.validate(s.dim(), s.cap())?;
        let moved = move_front_sesqui(s, self.normal());
        match &self.graph {
            None => Ok(moved),
            Some(g) => {
                let p = substitution_matrix(g)?;
                let c = moved.coefficient_matrix();
                let out = p.transpose() * c * p.conjugate();
                let n = out.nrows();
                let mut coeffs = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        coeffs.push(out[(a, b)]);
                    }
                }
                Ok(SesquiSeries::from_raw(
                    moved.basis().clone(),
                    coeffs,
                    moved.trusted_degrees(),
                ))
            }
        }
    }
}

/// Row `α` holds the coefficients of `(ζ₁ + g(ζ′))^{α₁} ζ′^{α′}`.
fn substitution_matrix(g: &HoloSeries) -> Result<DMatrix<Complex64>> {
    let dim = g.dim() + 1;
    let cap = g.cap();
    let basis = Basis::get(dim, cap);
    let u = HoloSeries::variable(dim, cap, 0)?.add(&g.prepend_variable())?;
    let mut powers = vec![HoloSeries::one(dim, cap)];
    for k in 1..=cap {
        powers.push(powers[k - 1].mul(&u)?);
    }
    let n = basis.len();
    let mut p = DMatrix::zeros(n, n);
    for (a, alpha) in basis.monomials().iter().enumerate() {
        let mut tail = alpha.entries().to_vec();
        let k = tail[0];
        tail[0] = 0;
        let shift = MultiIndex::new(tail);
        let pk = &powers[k];
        for (t, m) in basis.monomials().iter().enumerate() {
            let c = pk.coeffs()[t];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if let Some(target) = basis.index_of(&m.add(&shift)) {
                p[(a, target)] += c;
            }
        }
    }
    Ok(p)
}

fn moved_index(m: &MultiIndex, from: usize, to: usize) -> MultiIndex {
    let mut e = m.entries().to_vec();
    let x = e.remove(from);
    e.insert(to, x);
    MultiIndex::new(e)
}

fn move_front_holo(h: &HoloSeries, from: usize, to: usize) -> HoloSeries {
    if from == to {
        return h.clone();
    }
    let b = h.basis();
    let mut out = vec![Complex64::new(0.0, 0.0); b.len()];
    for (t, m) in b.monomials().iter().enumerate() {
        out[b.index_of(&moved_index(m, from, to)).expect("permutation")] = h.coeffs()[t];
    }
    HoloSeries::from_raw(b.clone(), out, h.trusted_degree())
}

fn move_front_sesqui(s: &SesquiSeries, from: usize) -> SesquiSeries {
    if from == 0 {
        return s.clone();
    }
    let b = s.basis();
    let n = b.len();
    let perm: Vec<usize> = b
        .monomials()
        .iter()
        .map(|m| b.index_of(&moved_index(m, from, 0)).expect("permutation"))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for c in 0..n {
            out[perm[a] * n + perm[c]] = s.at(a, c);
        }
    }
    SesquiSeries::from_raw(b.clone(), out, s.trusted_degrees())
}

/// The slice `α₁ = β₁ = 0` of a series already in straightened coordinates,
/// as a series in the remaining `dim − 1` variables.
pub fn restrict_flat(s: &SesquiSeries) -> Result<SesquiSeries> {
    if s.dim() == 0 {
        return Err(Error::InvalidOperand("cannot restrict a 0-variable series".into()));
    }
    let target = Basis::get(s.dim() - 1, s.cap());
    let src = s.basis();
    let map: Vec<usize> = target
        .monomials()
        .iter()
        .map(|m| {
            let mut e = vec![0];
            e.extend_from_slice(m.entries());
            src.index_of(&MultiIndex::new(e)).expect("degree preserved")
        })
        .collect();
    let n = target.len();
    let mut coeffs = Vec::with_capacity(n * n);
    for &a in &map {
        for &b in &map {
            coeffs.push(s.at(a, b));
        }
    }
    Ok(SesquiSeries::from_raw(target, coeffs, s.trusted_degrees()))
}

/// `S|_Z`: straighten, then slice at `ζ₁ = ω̄₁ = 0`.
pub fn restrict_hypersurface(s: &SesquiSeries, z: &HypersurfaceSpec) -> Result<SesquiSeries> {
    restrict_flat(&z.straighten(s)?)
}
