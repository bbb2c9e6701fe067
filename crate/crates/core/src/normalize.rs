//! Normalization of a kernel at the origin and the normal form of the jet
//! frame that normalization produces.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::jet_kernel;
use crate::series::{HoloSeries, HypersurfaceSpec, SesquiSeries};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficientwise tolerance for comparing normalized kernels.
pub const NORMALIZED_TOL: f64 = 1e-10;

/// Tolerance of [`lemma_frame_check`].
pub const FRAME_TOL: f64 = 1e-12;

fn is_exact_one(h: &HoloSeries) -> bool {
    h.coeffs().iter().enumerate().all(|(t, &c)| c == if t == 0 { ONE } else { ZERO })
}

/// `K₀(z, w) = ψ(z) K(z, w) conj(ψ(w))` with `ψ(z) = K(z, 0)^{-1} K(0, 0)^{1/2}`,
/// so that `K₀(z, 0) ≡ 1`.
///
/// The output is Hermitian and its slices `α = 0` and `β = 0` are set to
/// exactly `1`, which makes normalization idempotent bit for bit.
pub fn normalize_kernel(k: &SesquiSeries) -> Result<SesquiSeries> {
    let c00 = k.constant_term();
    if c00.re.is_nan() || c00.re <= 0.0 || c00.im.abs() > 1e-12 * c00.re {
        return Err(Error::DegenerateKernel(format!(
            "K(0,0) = {} is not real positive",
            c00
        )));
    }
    let slice = k.z_slice();
    if is_exact_one(&slice) {
        return Ok(k.hermitize());
    }
    let psi = slice.reciprocal()?.scale(Complex64::new(c00.re.sqrt(), 0.0));
    let k0 = k.sandwich(&psi, &psi)?.hermitize();
    let n = k0.basis().len();
    let mut coeffs = k0.coeffs().to_vec();
    for t in 0..n {
        let v = if t == 0 { ONE } else { ZERO };
        coeffs[t * n] = v;
        coeffs[t] = v;
    }
    Ok(SesquiSeries::from_raw(k0.basis().clone(), coeffs, k0.trusted_degrees()))
}

/// Outcome of [`lemma_frame_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FrameCheck {
    pub holds: bool,
    /// First entry `(ℓ, j)` that breaks the normal form.
    pub offending: Option<(usize, usize)>,
    pub max_defect: f64,
    /// `S(z) = (JK₀)_{1,1}(z, 0)` on `Z`.
    pub s_series: HoloSeries,
}

/// Checks that the jet kernel of a normalized kernel, paired against the
/// frame at the origin of `Z`, is `diag(1, S)`: the first column at `w = 0`
/// is `(1, 0, …, 0)` and the first row at `z = 0` is `(1, 0, …, 0)`.
///
/// Entries are checked in the order `(0,0)`, `(1,0)`, `(0,1)`, `(2,0)`, `(0,2)`, ….
pub fn lemma_frame_check(k0: &SesquiSeries, z: &HypersurfaceSpec, order: usize) -> Result<FrameCheck> {
    if order < 2 {
        return Err(Error::InvalidOperand("frame check needs jet order at least 2".into()));
    }
    let jk = jet_kernel(k0, order, z)?;
    let mut checks = vec![(0, 0)];
    for l in 1..order {
        checks.push((l, 0));
        checks.push((0, l));
    }
    let mut max_defect: f64 = 0.0;
    let mut offending = None;
    for (l, j) in checks {
        let e = jk.restricted_entry(l, j)?;
        // (0, j) is checked at z = 0 through the adjoint, whose β = 0 slice
        // holds the conjugated α = 0 slice
        let slice = if j == 0 { e.z_slice() } else { e.adjoint().z_slice() };
        let target = if l == 0 && j == 0 {
            HoloSeries::one(slice.dim(), slice.cap())
        } else {
            HoloSeries::zero(slice.dim(), slice.cap())
        };
        let d = slice.max_abs_diff(&target)?;
        max_defect = max_defect.max(d);
        if d > FRAME_TOL && offending.is_none() {
            offending = Some((l, j));
        }
    }
    Ok(FrameCheck {
        holds: offending.is_none(),
        offending,
        max_defect,
        s_series: jk.restricted_entry(1, 1)?.z_slice(),
    })
}
