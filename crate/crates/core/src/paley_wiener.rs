//! Lattice Shannon reconstruction, band-limit projection, and the
//! zero-flipping non-uniqueness demo.
//!
//! The reconstruction kernel for a sampling lattice `Γ` and a box
//! fundamental cell `D` of `Γ*` is the product-of-sinc function
//! `r(t) = vol(Γ) ∫_D e^{2πi x·t} dx`, normalized so that `r(0) = 1` and
//! `r(γ) = 0` on `Γ \ {0}` — the properties the interpolation formula
//! `f(t) = Σ_γ f(γ) r(t - γ)` requires. Only box cells are supported;
//! general cells would need numeric quadrature of the cell integral.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{CompactBox, Lattice};
use crate::grid::{GridField, GridGeometry};
use crate::transforms::{cft, FtSign};
use crate::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Normalized sinc `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
    }
}

/// Shannon reconstruction kernel for a lattice `Γ` and a box fundamental
/// cell `D` of `Γ*`.
#[derive(Debug, Clone)]
pub struct ShannonKernel {
    lattice: Lattice,
    domain: CompactBox,
    center: Vec<f64>,
    widths: Vec<f64>,
}

impl ShannonKernel {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn domain(&self) -> &CompactBox {
        &self.domain
    }

    /// Kernel value `r(t) = ∏_j e^{2πi m_j t_j} sinc(c_j t_j)` with `m` the
    /// cell center and `c` the cell widths; `r(0) = 1` exactly.
    pub fn eval(&self, t: &[f64]) -> Complex64 {
        let mut phase = 0.0;
        let mut amp = 1.0;
        for j in 0..t.len() {
            phase += self.center[j] * t[j];
            amp *= sinc(self.widths[j] * t[j]);
        }
        Complex64::from_polar(amp, TWO_PI * phase)
    }
}

/// Build the closed-form kernel, validating that `D` is a box fundamental
/// cell of `Γ*`: the volumes must pair (`vol(D) vol(Γ) = 1` within 1e-9)
/// and the cardinal property `r(γ) = 0` must hold at the `3^d - 1` nearest
/// nonzero lattice points (within 1e-10).
pub fn shannon_kernel(gamma: &Lattice, domain: &CompactBox) -> Result<ShannonKernel> {
    if gamma.dim() != domain.dim() {
        return Err(Error::Dim("kernel lattice/domain dimension mismatch".into()));
    }
    if (domain.volume() * gamma.volume() - 1.0).abs() > 1e-9 {
        return Err(Error::BadDomain(format!(
            "vol(D) vol(Γ) = {} != 1",
            domain.volume() * gamma.volume()
        )));
    }
    let kernel = ShannonKernel {
        lattice: gamma.clone(),
        domain: domain.clone(),
        center: domain.center(),
        widths: domain.widths(),
    };
    let d = gamma.dim();
    for idx in gamma.enumerate_indices(3usize.pow(d as u32)) {
        if idx.iter().all(|&i| i == 0) {
            continue;
        }
        let v = kernel.eval(&gamma.point(&idx)).norm();
        if v > 1e-10 {
            return Err(Error::BadDomain(format!(
                "kernel does not vanish at lattice point {idx:?}: |r| = {v:.3e}"
            )));
        }
    }
    Ok(kernel)
}

/// Samples on a lattice, keyed by integer index vector.
pub type LatticeSamples = BTreeMap<Vec<i64>, Complex64>;

/// Truncated Shannon sum `Σ_{‖γ - t‖ <= R} f(γ) r(t - γ)` at each target.
///
/// Every lattice point within `truncation_radius` of a target must be
/// present in `samples`; otherwise the interpolation would silently drop
/// in-range terms and a `Coverage` error is returned instead.
pub fn shannon_interpolate(
    samples: &LatticeSamples,
    kernel: &ShannonKernel,
    targets: &[Vec<f64>],
    truncation_radius: f64,
) -> Result<Vec<Complex64>> {
    if !(truncation_radius > 0.0) {
        return Err(Error::Domain("truncation radius must be positive".into()));
    }
    let lat = &kernel.lattice;
    let d = lat.dim();
    let reach = (truncation_radius / lat.sigma_min()).ceil() as i64;
    let side = (2 * reach + 1) as usize;
    let cells = side.pow(d as u32);
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        if t.len() != d {
            return Err(Error::Dim("target dimension mismatch".into()));
        }
        // integer box around A^{-1} t
        let base: Vec<i64> = lat
            .cell_coordinates(t)
            .iter()
            .map(|&c| c.round() as i64)
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0i64; d];
        for cell in 0..cells {
            let mut rest = cell;
            for axis in (0..d).rev() {
                idx[axis] = base[axis] - reach + (rest % side) as i64;
                rest /= side;
            }
            let gamma = lat.point(&idx);
            let dist2: f64 = gamma
                .iter()
                .zip(t)
                .map(|(&g, &x)| (g - x) * (g - x))
                .sum();
            if dist2.sqrt() <= truncation_radius {
                let v = samples.get(&idx).ok_or_else(|| {
                    Error::Coverage(format!(
                        "missing sample at lattice index {idx:?} within radius of {t:?}"
                    ))
                })?;
                let diff: Vec<f64> = t.iter().zip(&gamma).map(|(&x, &g)| x - g).collect();
                acc += v * kernel.eval(&diff);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Band-limit projection: forward transform, zero outside `band`, inverse
/// transform. Idempotent at rounding level and an energy contraction.
pub fn bandlimit_project(field: &GridField, band: &CompactBox) -> Result<GridField> {
    if field.dim() != band.dim() {
        return Err(Error::Dim("projection band dimension mismatch".into()));
    }
    let mut spec = cft(field, FtSign::Forward);
    let geom = spec.geometry().clone();
    for off in 0..geom.len() {
        if !band.contains_point(&geom.node(&geom.unflat(off))) {
            spec.values_mut()[off] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(cft(&spec, FtSign::Inverse))
}

/// Zero-flipping pair on a 1-D grid: `f(t) = (t - z0) sinc²(t)` and
/// `h(t) = (t - conj z0) sinc²(t)`. The two have identical modulus on the
/// real line but are not globally phase-equivalent when `Im z0 != 0`.
pub fn zero_flip_pair(z0: Complex64, geom: &GridGeometry) -> Result<(GridField, GridField)> {
    if geom.dim() != 1 {
        return Err(Error::Dim("zero flip needs a 1-D grid".into()));
    }
    if z0.im == 0.0 {
        return Err(Error::DegenerateFlip(
            "Im z0 = 0 makes f and h identical".into(),
        ));
    }
    let f = GridField::from_fn(geom.clone(), |t| {
        (Complex64::new(t[0], 0.0) - z0) * sinc(t[0]).powi(2)
    });
    let h = GridField::from_fn(geom.clone(), |t| {
        (Complex64::new(t[0], 0.0) - z0.conj()) * sinc(t[0]).powi(2)
    });
    Ok((f, h))
}
