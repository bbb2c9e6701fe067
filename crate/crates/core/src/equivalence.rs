//! Decision procedures for unitary equivalence: line-bundle modules through
//! their normalized kernels, and quotient modules along a hypersurface through
//! the tangential curvature, transversal curvature and angle invariant.
//!
//! Differences above `10·tol` decide `not_isomorphic`, differences in
//! `(tol, 10·tol]` give `inconclusive`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt;
use crate::geometry::{curvature_form, omega_grid, z_grid, InvariantPoint, QuotientGeometry};
use crate::kernels::{build_kernel, KernelSpec};
use crate::normalize::normalize_kernel;
use crate::series::{HypersurfaceSpec, MultiIndex, SesquiSeries};

fn default_order() -> usize {
    2
}

/// A quotient module given by the kernel of the ambient module and the
/// hypersurface along which the submodule vanishes to order `order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientModuleSpec {
    pub kernel: KernelSpec,
    #[serde(default)]
    pub hypersurface: HypersurfaceSpec,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Overrides the kernel's degree cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl QuotientModuleSpec {
    /// Flat hypersurface `z₁ = 0`, order 2.
    pub fn new(kernel: KernelSpec) -> Self {
        QuotientModuleSpec {
            kernel,
            hypersurface: HypersurfaceSpec::flat(1),
            order: 2,
            cap: None,
            radius: None,
            grid: None,
        }
    }

    pub fn with_hypersurface(mut self, z: HypersurfaceSpec) -> Self {
        self.hypersurface = z;
        self
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        match self.cap {
            Some(cap) => self.kernel.clone().with_cap(cap),
            None => self.kernel.clone(),
        }
    }

    pub fn build_kernel(&self) -> Result<SesquiSeries> {
        build_kernel(&self.kernel_spec())
    }

    /// Kernel, normalization, jet kernel and curvature split.
    pub fn geometry(&self) -> Result<QuotientGeometry> {
        if self.order != 2 {
            return Err(Error::InvalidParameters(format!(
                "equivalence is decided for jet order 2, got {}",
                self.order
            )));
        }
        QuotientGeometry::new(&self.build_kernel()?, &self.hypersurface)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Isomorphic,
    NotIsomorphic,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Isomorphic => 0,
            Outcome::NotIsomorphic => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Tan,
    Trans,
    Angle,
    None,
    /// Curvature forms on the domain grid.
    Curvature,
    /// Coefficients of the normalized kernels.
    NormalizedKernel,
    /// Coefficients of the restricted normalized jet kernels.
    JetKernel,
}

/// Where the two modules were seen to differ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Grid point, for pointwise conditions.
    #[serde(serialize_with = "fmt::opt_complex_vec", skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<Complex64>>,
    /// Matrix entry `(row, column)`, 0-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<(usize, usize)>,
    /// Coefficient `z^α w̄^β`, for coefficientwise conditions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<MultiIndex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<MultiIndex>,
    #[serde(serialize_with = "fmt::complex")]
    pub value_a: Complex64,
    #[serde(serialize_with = "fmt::complex")]
    pub value_b: Complex64,
    #[serde(serialize_with = "fmt::f64")]
    pub difference: f64,
}

/// Largest difference seen for one condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionDifference {
    pub condition: Condition,
    #[serde(serialize_with = "fmt::f64")]
    pub max_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub failed_condition: Condition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(serialize_with = "fmt::f64")]
    pub tolerance: f64,
    pub differences: Vec<ConditionDifference>,
    /// For line-bundle comparisons: whether the curvature forms agree on the
    /// domain grid within the tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_witness: Option<Witness>,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("verdict serializes");
        s.push('\n');
        s
    }
}

/// Scan of one condition: its largest difference and the first witnesses
/// above `10·tol` and above `tol`, in scan order.
struct Scan {
    condition: Condition,
    max: f64,
    strong: Option<Witness>,
    weak: Option<Witness>,
}

impl Scan {
    fn from_samples(condition: Condition, samples: Vec<Witness>, tol: f64) -> Scan {
        let first = |t: f64| samples.iter().find(|w| w.difference.is_nan() || w.difference > t).cloned();
        Scan {
            condition,
            max: samples.iter().map(|w| w.difference).fold(0.0, f64::max),
            strong: first(10.0 * tol),
            weak: first(tol),
        }
    }
}

/// Picks the first condition with a difference above `10·tol`, else the first
/// above `tol`.
fn decide(scans: Vec<Scan>, tol: f64) -> Verdict {
    let differences = scans
        .iter()
        .map(|s| ConditionDifference {
            condition: s.condition,
            max_difference: s.max,
        })
        .collect();
    let strong = scans.iter().find_map(|s| s.strong.clone().map(|w| (s.condition, w)));
    let weak = scans.iter().find_map(|s| s.weak.clone().map(|w| (s.condition, w)));
    let (outcome, found) = match (strong, weak) {
        (Some(f), _) => (Outcome::NotIsomorphic, Some(f)),
        (None, Some(f)) => (Outcome::Inconclusive, Some(f)),
        (None, None) => (Outcome::Isomorphic, None),
    };
    let (failed_condition, witness) = match found {
        Some((c, w)) => (c, Some(w)),
        None => (Condition::None, None),
    };
    Verdict {
        outcome,
        failed_condition,
        witness,
        tolerance: tol,
        differences,
        curvature_agrees: None,
        curvature_witness: None,
    }
}

fn pointwise(point: &[Complex64], entry: Option<(usize, usize)>, a: Complex64, b: Complex64) -> Witness {
    Witness {
        point: Some(point.to_vec()),
        entry,
        alpha: None,
        beta: None,
        value_a: a,
        value_b: b,
        difference: (a - b).norm(),
    }
}

/// The entry of largest difference between two matrices, first in row-major
/// order on ties.
fn worst_entry(point: &[Complex64], a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Witness {
    let mut best: Option<Witness> = None;
    for (r, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (c, (&x, &y)) in ra.iter().zip(rb).enumerate() {
            let s = pointwise(point, Some((r, c)), x, y);
            if best.as_ref().is_none_or(|b| s.difference > b.difference) {
                best = Some(s);
            }
        }
    }
    best.expect("nonempty matrix")
}

/// Two series to compare and the jet entry they come from.
type SeriesPair<'a> = (&'a SesquiSeries, &'a SesquiSeries, Option<(usize, usize)>);

/// Coefficientwise scan over the trusted degrees, monomials in lexicographic
/// order of `(α, β)`.
fn coefficient_scan(
    pairs: &[SeriesPair<'_>],
    condition: Condition,
    tol: f64,
    embed: &dyn Fn(&MultiIndex) -> MultiIndex,
) -> Result<Scan> {
    let mut scan = Scan {
        condition,
        max: 0.0,
        strong: None,
        weak: None,
    };
    for &(a, b, entry) in pairs {
        let witness = |threshold: f64| -> Result<Option<Witness>> {
            Ok(a.first_difference(b, threshold)?.first_exceeding.map(|f| Witness {
                point: None,
                entry,
                alpha: Some(embed(&f.alpha)),
                beta: Some(embed(&f.beta)),
                value_a: f.a,
                value_b: f.b,
                difference: (f.a - f.b).norm(),
            }))
        };
        scan.max = scan.max.max(a.max_abs_diff(b)?);
        if scan.strong.is_none() {
            scan.strong = witness(10.0 * tol)?;
        }
        if scan.weak.is_none() {
            scan.weak = witness(tol)?;
        }
    }
    Ok(scan)
}

fn rows(m: &nalgebra::DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

/// Line-bundle comparison: isomorphic iff the normalized kernels agree
/// coefficientwise. Also reports whether the curvature forms agree on the
/// domain grid of `grid` points within `radius`.
pub fn compare_b1(k: &SesquiSeries, kt: &SesquiSeries, tol: f64, radius: f64, grid: usize) -> Result<Verdict> {
    if k.dim() != kt.dim() || k.cap() != kt.cap() {
        return Err(Error::Incomparable(format!(
            "kernels differ in shape: (dim {}, cap {}) vs (dim {}, cap {})",
            k.dim(),
            k.cap(),
            kt.dim(),
            kt.cap()
        )));
    }
    let a = normalize_kernel(k)?;
    let b = normalize_kernel(kt)?;
    let scan = coefficient_scan(&[(&a, &b, None)], Condition::NormalizedKernel, tol, &|m| m.clone())?;
    let mut verdict = decide(vec![scan], tol);

    let ca = curvature_form(&a)?;
    let cb = curvature_form(&b)?;
    let mut curvature = Vec::new();
    for p in omega_grid(k.dim(), radius, grid) {
        let va = ca.evaluate(&p, &p, radius)?;
        let vb = cb.evaluate(&p, &p, radius)?;
        curvature.push(worst_entry(&p, &rows(&va), &rows(&vb)));
    }
    let cv = decide(vec![Scan::from_samples(Condition::Curvature, curvature, tol)], tol);
    verdict.differences.extend(cv.differences);
    verdict.curvature_agrees = Some(cv.outcome == Outcome::Isomorphic);
    verdict.curvature_witness = cv.witness;
    Ok(verdict)
}

fn check_comparable(a: &QuotientModuleSpec, b: &QuotientModuleSpec) -> Result<()> {
    if a.kernel.dim != b.kernel.dim {
        return Err(Error::Incomparable(format!(
            "ambient dimensions differ: {} vs {}",
            a.kernel.dim, b.kernel.dim
        )));
    }
    if a.hypersurface != b.hypersurface {
        return Err(Error::Incomparable("hypersurfaces differ".into()));
    }
    Ok(())
}

/// Grid settings shared by both modules of a comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOptions {
    pub radius: f64,
    pub grid: usize,
}

/// Resolves the common grid: values in the specs take precedence over the
/// defaults and must agree when both specs set them.
pub fn common_grid(a: &QuotientModuleSpec, b: &QuotientModuleSpec, defaults: GridOptions) -> Result<GridOptions> {
    let radius = match (a.radius, b.radius) {
        (Some(x), Some(y)) if x != y => {
            return Err(Error::Incomparable(format!("radii differ: {x} vs {y}")));
        }
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => defaults.radius,
    };
    let grid = match (a.grid, b.grid) {
        (Some(x), Some(y)) if x != y => {
            return Err(Error::Incomparable(format!("grid sizes differ: {x} vs {y}")));
        }
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => defaults.grid,
    };
    Ok(GridOptions { radius, grid })
}

/// Compares prepared geometries on the common grid, conditions in the
/// order tan, trans, angle.
pub fn compare_geometries(a: &QuotientGeometry, b: &QuotientGeometry, tol: f64, opts: GridOptions) -> Result<Verdict> {
    if a.hypersurface() != b.hypersurface() || a.k0.dim() != b.k0.dim() {
        return Err(Error::Incomparable("modules live on different hypersurfaces".into()));
    }
    let mut tan = Vec::new();
    let mut trans = Vec::new();
    let mut angle = Vec::new();
    for t in z_grid(a.split.tangential_dim(), opts.radius, opts.grid) {
        let pa: InvariantPoint = a.at(&t, opts.radius)?;
        let pb: InvariantPoint = b.at(&t, opts.radius)?;
        tan.push(worst_entry(&pa.w, &pa.k_tan, &pb.k_tan));
        trans.push(pointwise(&pa.w, None, Complex64::new(pa.k_trans, 0.0), Complex64::new(pb.k_trans, 0.0)));
        angle.push(pointwise(&pa.w, None, pa.angle, pb.angle));
    }
    Ok(decide(
        vec![
            Scan::from_samples(Condition::Tan, tan, tol),
            Scan::from_samples(Condition::Trans, trans, tol),
            Scan::from_samples(Condition::Angle, angle, tol),
        ],
        tol,
    ))
}

/// Quotient-module comparison by the three invariants on the common grid.
pub fn compare_quotient(a: &QuotientModuleSpec, b: &QuotientModuleSpec, tol: f64, defaults: GridOptions) -> Result<Verdict> {
    check_comparable(a, b)?;
    let opts = common_grid(a, b, defaults)?;
    compare_geometries(&a.geometry()?, &b.geometry()?, tol, opts)
}

/// Compares the restricted normalized jet kernels coefficientwise, entries
/// in the order `(0,0)`, `(0,1)`, `(1,0)`, `(1,1)`. Monomials are reported in
/// ambient indices with a zero normal exponent.
pub fn compare_jets(a: &QuotientGeometry, b: &QuotientGeometry, tol: f64) -> Result<Verdict> {
    if a.hypersurface() != b.hypersurface() || a.k0.dim() != b.k0.dim() {
        return Err(Error::Incomparable("modules live on different hypersurfaces".into()));
    }
    if a.k0.cap() != b.k0.cap() {
        return Err(Error::Incomparable(format!(
            "degree caps differ: {} vs {}",
            a.k0.cap(),
            b.k0.cap()
        )));
    }
    let normal = a.hypersurface().normal_index - 1;
    let embed = move |m: &MultiIndex| {
        let mut e = m.entries().to_vec();
        e.insert(normal, 0);
        MultiIndex::new(e)
    };
    let pairs: Vec<_> = a
        .restricted_jet()
        .iter()
        .zip(b.restricted_jet())
        .enumerate()
        .map(|(idx, (x, y))| (x, y, Some((idx / 2, idx % 2))))
        .collect();
    Ok(decide(vec![coefficient_scan(&pairs, Condition::JetKernel, tol, &embed)?], tol))
}

/// Independent criterion: isomorphic iff the restricted normalized jet
/// kernels agree coefficientwise within `tol`.
pub fn oracle_compare(a: &QuotientModuleSpec, b: &QuotientModuleSpec, tol: f64) -> Result<Verdict> {
    check_comparable(a, b)?;
    compare_jets(&a.geometry()?, &b.geometry()?, tol)
}
