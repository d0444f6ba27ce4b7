//! Regular complex-valued grids: the universal numerical carrier.
//!
//! A [`GridField`] stores samples of a function on a regular grid with
//! origin/spacing metadata, row-major (last axis fastest). Grids intended
//! for Fourier round trips should be origin-centered, i.e.
//! `origin = -floor(shape/2) * spacing` per axis; [`GridGeometry::centered`]
//! builds such grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CompactBox;
use crate::Complex64;

/// Geometry of a regular grid: origin, spacing and shape per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridGeometry {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        if origin.len() != spacing.len() || origin.len() != shape.len() || origin.is_empty() {
            return Err(Error::Dim(format!(
                "inconsistent grid metadata: origin {}d, spacing {}d, shape {}d",
                origin.len(),
                spacing.len(),
                shape.len()
            )));
        }
        if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Domain("grid spacing must be positive".into()));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::Domain("grid shape must be positive".into()));
        }
        Ok(Self {
            origin,
            spacing,
            shape,
        })
    }

    /// Grid centered at the origin: `origin = -floor(n/2) * spacing`.
    pub fn centered(spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let origin = spacing
            .iter()
            .zip(&shape)
            .map(|(&s, &n)| -((n / 2) as f64) * s)
            .collect();
        Self::new(origin, spacing, shape)
    }

    /// 1-D grid covering `[lo, hi]` with the given spacing. `hi - lo` must be
    /// an integer multiple of the spacing (within 1e-9 of a node).
    pub fn span_1d(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain("span requires lo < hi".into()));
        }
        let steps = (hi - lo) / spacing;
        let n = steps.round();
        if (steps - n).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "span [{lo}, {hi}] is not commensurate with spacing {spacing}"
            )));
        }
        Self::new(vec![lo], vec![spacing], vec![n as usize + 1])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume of one grid cell, `∏ spacing[j]`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Position of the node with the given multi-index.
    pub fn node(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .zip(self.origin.iter().zip(&self.spacing))
            .map(|(&i, (&o, &s))| o + i as f64 * s)
            .collect()
    }

    /// Row-major flat offset of a multi-index.
    pub fn flat(&self, index: &[usize]) -> usize {
        let mut off = 0usize;
        for (i, (&ix, &n)) in index.iter().zip(&self.shape).enumerate() {
            debug_assert!(ix < n, "index {ix} out of bounds on axis {i}");
            off = off * n + ix;
        }
        off
    }

    /// Multi-index of a row-major flat offset.
    pub fn unflat(&self, mut off: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = off % self.shape[axis];
            off /= self.shape[axis];
        }
        idx
    }

    /// Multi-index of the node nearest to `point`, if it is within `tol`
    /// (in units of spacing) of an actual node and inside the grid.
    pub fn snap(&self, point: &[f64], tol: f64) -> Option<Vec<usize>> {
        let mut idx = Vec::with_capacity(self.dim());
        for axis in 0..self.dim() {
            let steps = (point[axis] - self.origin[axis]) / self.spacing[axis];
            let k = steps.round();
            if (steps - k).abs() > tol || k < 0.0 || k as usize >= self.shape[axis] {
                return None;
            }
            idx.push(k as usize);
        }
        Some(idx)
    }

    /// Axis-aligned box spanned by the grid nodes.
    pub fn support_box(&self) -> Result<CompactBox> {
        let lo = self.origin.clone();
        let hi: Vec<f64> = self
            .origin
            .iter()
            .zip(self.spacing.iter().zip(&self.shape))
            .map(|(&o, (&s, &n))| o + s * (n - 1) as f64)
            .collect();
        // A single-node axis would give lo == hi; widen by half a cell so the
        // box stays a valid CompactBox.
        let hi = hi
            .iter()
            .zip(&lo)
            .zip(&self.spacing)
            .map(|((&h, &l), &s)| if h > l { h } else { l + 0.5 * s })
            .collect();
        CompactBox::new(lo, hi)
    }

    /// Iterator over all multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|off| self.unflat(off))
    }
}

/// Complex samples on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    geom: GridGeometry,
    values: Vec<Complex64>,
}

/// Serialized form: geometry plus `[re, im]` pairs in row-major order.
#[derive(Serialize, Deserialize)]
struct GridFieldRepr {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<[f64; 2]>,
}

impl Serialize for GridField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridFieldRepr {
            origin: self.geom.origin.clone(),
            spacing: self.geom.spacing.clone(),
            shape: self.geom.shape.clone(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GridFieldRepr::deserialize(d)?;
        let geom = GridGeometry::new(repr.origin, repr.spacing, repr.shape)
            .map_err(serde::de::Error::custom)?;
        let values = repr
            .values
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        GridField::new(geom, values).map_err(serde::de::Error::custom)
    }
}

impl GridField {
    pub fn new(geom: GridGeometry, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::Domain(format!(
                "value count {} does not match grid shape {:?}",
                values.len(),
                geom.shape
            )));
        }
        Ok(Self { geom, values })
    }

    pub fn zeros(geom: GridGeometry) -> Self {
        let n = geom.len();
        Self {
            geom,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Tabulate a function on the grid.
    pub fn from_fn(geom: GridGeometry, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(geom.len());
        for off in 0..geom.len() {
            let idx = geom.unflat(off);
            values.push(f(&geom.node(&idx)));
        }
        Self { geom, values }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn dim(&self) -> usize {
        self.geom.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn at(&self, index: &[usize]) -> Complex64 {
        self.values[self.geom.flat(index)]
    }

    pub fn set(&mut self, index: &[usize], value: Complex64) {
        let off = self.geom.flat(index);
        self.values[off] = value;
    }

    /// Riemann `L²` norm squared: `Σ |v|² ∏ spacing`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.geom.cell_volume()
    }

    /// Riemann inner product `⟨self, other⟩ = Σ u conj(v) ∏ spacing`.
    /// Both fields must share a geometry.
    pub fn inner(&self, other: &GridField) -> Result<Complex64> {
        if self.geom != other.geom {
            return Err(Error::Dim("inner product requires matching grids".into()));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u * v.conj())
            .sum();
        Ok(s * self.geom.cell_volume())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridField {
        GridField {
            geom: self.geom.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> GridField {
        self.map(|v| v * c)
    }

    /// Relative `L²` distance to `other` minimized over a unimodular factor
    /// `τ`; the optimum is `τ = ⟨self, other⟩ / |⟨self, other⟩|`.
    pub fn aligned_distance(&self, truth: &GridField) -> Result<f64> {
        let denom = truth.energy().sqrt();
        if denom == 0.0 {
            return Err(Error::Domain("aligned distance against zero field".into()));
        }
        let ip = self.inner(truth)?;
        let tau = if ip.norm() > 0.0 {
            ip / ip.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut acc = 0.0;
        for (u, v) in self.values.iter().zip(&truth.values) {
            acc += (u - tau * v).norm_sqr();
        }
        Ok((acc * self.geom.cell_volume()).sqrt() / denom)
    }
}
