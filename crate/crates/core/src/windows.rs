//! Window functions and their growth metadata.
//!
//! Every window family carries the pair `(alpha, beta)` describing it as an
//! element of the class of entire functions `p(z) e^{-z^T A z - b^T z}` with
//! `p` of exponential type `alpha` and `‖A + A^T‖₁ <= beta`. The pair feeds
//! the exponential-type budget `sigma = 2 alpha + beta ⫴K⫴` of the
//! time-shift gates.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CompactBox;
use crate::grid::{GridField, GridGeometry};
use crate::Complex64;

pub mod bessel;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Window family tag with family-specific data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowFamily {
    /// `g(x) = exp(-(x-nu)^T A (x-nu))` with Hermitian `A`, `Re A` positive
    /// definite. Complex offsets `b` and scalar prefactors fold into `nu`
    /// and a global constant that is irrelevant to gates and phase retrieval.
    Gaussian {
        #[serde(with = "serde_cmatrix")]
        matrix: DMatrix<Complex64>,
        nu: Vec<Complex64>,
    },
    /// Tensor product of univariate Hermite functions `h_{k_j}`.
    Hermite { index: Vec<u32> },
    /// Airy disk `A_a(t) = (a J1(2π a ‖t‖) / ‖t‖)^2` on the plane.
    Airy { radius: f64 },
    /// Inverse Fourier transform of a tabulated spectrum supported in a box.
    Bandlimited { spectrum: GridField },
    /// Raw samples; evaluation snaps to nodes or interpolates linearly.
    Tabulated {
        samples: GridField,
        alpha: Option<f64>,
        beta: Option<f64>,
    },
}

/// A window function `g` together with its class metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowSpec {
    dim: usize,
    family: WindowFamily,
}

impl WindowSpec {
    /// Gaussian window; `matrix` must be Hermitian with positive definite
    /// real part (checked by a Cholesky attempt).
    pub fn gaussian(matrix: DMatrix<Complex64>, nu: Vec<Complex64>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d == 0 || nu.len() != d {
            return Err(Error::Dim(format!(
                "gaussian parameters disagree: matrix {}x{}, nu {}d",
                matrix.nrows(),
                matrix.ncols(),
                nu.len()
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..d {
            for j in 0..d {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > 1e-12 * scale.max(1.0) {
                    return Err(Error::Domain("gaussian matrix must be Hermitian".into()));
                }
            }
        }
        let re = DMatrix::from_fn(d, d, |i, j| matrix[(i, j)].re);
        if nalgebra::Cholesky::new(re).is_none() {
            return Err(Error::Domain(
                "Re(A) must be positive definite for an L^2 Gaussian window".into(),
            ));
        }
        Ok(Self {
            dim: d,
            family: WindowFamily::Gaussian { matrix, nu },
        })
    }

    /// The standard Gaussian `e^{-π ‖t‖²}` in dimension `d`.
    pub fn standard_gaussian(d: usize) -> Result<Self> {
        let a = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(std::f64::consts::PI, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::gaussian(a, vec![Complex64::new(0.0, 0.0); d])
    }

    /// Gaussian given as `exp(-z^T A z + b^T z + c)`: the linear term folds
    /// into the offset (`nu` solves `2 (Re A) nu = b`; bilinear forms over a
    /// Hermitian `A` see only `Re A`) and the scalar prefactor is dropped —
    /// it is irrelevant to all gates and to phase retrieval.
    pub fn gaussian_with_linear(
        matrix: DMatrix<Complex64>,
        b: Vec<Complex64>,
        _c: Complex64,
    ) -> Result<Self> {
        let d = matrix.nrows();
        if b.len() != d {
            return Err(Error::Dim("linear term dimension mismatch".into()));
        }
        let re = DMatrix::from_fn(d, d, |i, j| matrix[(i, j)].re);
        let inv = re
            .try_inverse()
            .ok_or_else(|| Error::Domain("Re(A) not invertible".into()))?;
        let mut nu = vec![Complex64::new(0.0, 0.0); d];
        for (i, nu_i) in nu.iter_mut().enumerate() {
            for j in 0..d {
                *nu_i += 0.5 * inv[(i, j)] * b[j];
            }
        }
        Self::gaussian(matrix, nu)
    }

    /// Hermite window `∏_j h_{k_j}(t_j)`, orthonormal in `L²`.
    pub fn hermite(index: Vec<u32>) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::Dim("hermite multi-index must be non-empty".into()));
        }
        Ok(Self {
            dim: index.len(),
            family: WindowFamily::Hermite { index },
        })
    }

    /// Airy disk of radius `a`; only defined on the plane.
    pub fn airy(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain("airy radius must be positive".into()));
        }
        Ok(Self {
            dim: 2,
            family: WindowFamily::Airy { radius: a },
        })
    }

    /// Tabulated window with optional class metadata.
    pub fn tabulated(samples: GridField, alpha: Option<f64>, beta: Option<f64>) -> Self {
        Self {
            dim: samples.dim(),
            family: WindowFamily::Tabulated {
                samples,
                alpha,
                beta,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &WindowFamily {
        &self.family
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.family, WindowFamily::Gaussian { .. })
    }

    /// Exponential type of the entire factor `p`.
    pub fn alpha(&self) -> Option<f64> {
        match &self.family {
            WindowFamily::Gaussian { .. } | WindowFamily::Hermite { .. } => Some(0.0),
            // A_a is band-limited to the disk of radius 2a; over-approximate
            // by the bounding box [-2a, 2a]^2, giving type 2π · 2a.
            WindowFamily::Airy { radius } => Some(2.0 * TWO_PI * radius),
            WindowFamily::Bandlimited { spectrum } => {
                let bx = spectrum.geometry().support_box().ok()?;
                let c = bx
                    .lo
                    .iter()
                    .zip(&bx.hi)
                    .map(|(&l, &h)| l.abs().max(h.abs()))
                    .fold(0.0, f64::max);
                Some(TWO_PI * c)
            }
            WindowFamily::Tabulated { alpha, .. } => *alpha,
        }
    }

    /// Bound on `‖A + A^T‖₁` (induced 1-norm) of the Gaussian factor.
    pub fn beta(&self) -> Option<f64> {
        match &self.family {
            WindowFamily::Gaussian { matrix, .. } => {
                let d = matrix.nrows();
                let mut best: f64 = 0.0;
                for j in 0..d {
                    let col: f64 = (0..d)
                        .map(|i| (matrix[(i, j)] + matrix[(j, i)]).norm())
                        .sum();
                    best = best.max(col);
                }
                Some(best)
            }
            WindowFamily::Hermite { .. } => Some(2.0 * std::f64::consts::PI),
            WindowFamily::Airy { .. } | WindowFamily::Bandlimited { .. } => Some(0.0),
            WindowFamily::Tabulated { beta, .. } => *beta,
        }
    }

    /// Minimal exponential-type budget `2 alpha + beta ⫴K⫴` for the
    /// time-shift gate over signals supported in `k`.
    pub fn class_sigma(&self, k: &CompactBox) -> Result<f64> {
        let (alpha, beta) = match (self.alpha(), self.beta()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::MissingClassData(
                    "tabulated window lacks (alpha, beta) metadata".into(),
                ))
            }
        };
        Ok(2.0 * alpha + beta * k.diam_inf())
    }

    /// Pointwise evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<Complex64> {
        if point.len() != self.dim {
            return Err(Error::Dim(format!(
                "window is {}d, point is {}d",
                self.dim,
                point.len()
            )));
        }
        Ok(match &self.family {
            WindowFamily::Gaussian { matrix, nu } => {
                let d = self.dim;
                let w: Vec<Complex64> =
                    (0..d).map(|j| Complex64::new(point[j], 0.0) - nu[j]).collect();
                let mut q = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        q += w[i] * matrix[(i, j)] * w[j];
                    }
                }
                (-q).exp()
            }
            WindowFamily::Hermite { index } => {
                let mut v = 1.0;
                for (j, &n) in index.iter().enumerate() {
                    v *= hermite_value(n, point[j]);
                }
                Complex64::new(v, 0.0)
            }
            WindowFamily::Airy { radius } => Complex64::new(airy_value(*radius, point), 0.0),
            WindowFamily::Bandlimited { spectrum } => bandlimited_value(spectrum, point),
            WindowFamily::Tabulated { samples, .. } => tabulated_value(samples, point),
        })
    }

    /// Batch evaluation.
    pub fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        points.iter().map(|p| self.eval(p)).collect()
    }

    /// Tabulate the window on a grid.
    pub fn tabulate(&self, geom: &GridGeometry) -> Result<GridField> {
        if geom.dim() != self.dim {
            return Err(Error::Dim("tabulation grid dimension mismatch".into()));
        }
        let mut values = Vec::with_capacity(geom.len());
        for off in 0..geom.len() {
            let idx = geom.unflat(off);
            values.push(self.eval(&geom.node(&idx))?);
        }
        GridField::new(geom.clone(), values)
    }
}

/// Orthonormal univariate Hermite function `h_n(t)`, evaluated by the
/// three-term recurrence
/// `h_{n+1} = 2 sqrt(π/(n+1)) t h_n - sqrt(n/(n+1)) h_{n-1}`,
/// `h_0(t) = 2^{1/4} e^{-π t²}`. The Rodrigues form is numerically hostile;
/// the recurrence is validated against it at small `n` in the tests.
pub fn hermite_value(n: u32, t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let h0 = 2f64.powf(0.25) * (-pi * t * t).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = 2.0 * pi.sqrt() * t * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = 2.0 * (pi / (kf + 1.0)).sqrt() * t * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Airy disk value at a planar point; the removable singularity at the
/// origin is filled by the quartic Taylor surrogate
/// `π² a⁴ (1 - x²/8)²`, `x = 2π a ‖t‖`, below `‖t‖ < 1e-6 / a`.
pub fn airy_value(a: f64, point: &[f64]) -> f64 {
    let r = point.iter().map(|&x| x * x).sum::<f64>().sqrt();
    if r < 1e-6 / a {
        let x = TWO_PI * a * r;
        let base = std::f64::consts::PI * std::f64::consts::PI * a.powi(4);
        let corr = 1.0 - x * x / 8.0;
        base * corr * corr
    } else {
        let v = a * bessel::j1(TWO_PI * r * a) / r;
        v * v
    }
}

fn bandlimited_value(spectrum: &GridField, point: &[f64]) -> Complex64 {
    // g(t) = ∫ ĝ(ξ) e^{2πi ξ·t} dξ as a Riemann sum over the spectral grid
    let geom = spectrum.geometry();
    let cell = geom.cell_volume();
    let mut acc = Complex64::new(0.0, 0.0);
    for off in 0..geom.len() {
        let idx = geom.unflat(off);
        let xi = geom.node(&idx);
        let phase: f64 = xi.iter().zip(point).map(|(&a, &b)| a * b).sum();
        acc += spectrum.values()[off] * Complex64::from_polar(1.0, TWO_PI * phase);
    }
    acc * cell
}

fn tabulated_value(samples: &GridField, point: &[f64]) -> Complex64 {
    let geom = samples.geometry();
    if let Some(idx) = geom.snap(point, 1e-9) {
        return samples.at(&idx);
    }
    // multilinear interpolation; zero outside the grid
    let d = geom.dim();
    let mut base = Vec::with_capacity(d);
    let mut frac = Vec::with_capacity(d);
    for axis in 0..d {
        let steps = (point[axis] - geom.origin[axis]) / geom.spacing[axis];
        if steps < 0.0 || steps > (geom.shape[axis] - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let k = steps.floor().min((geom.shape[axis].saturating_sub(2)) as f64);
        base.push(k as usize);
        frac.push(steps - k);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0..(1usize << d) {
        let mut weight = 1.0;
        let mut idx = Vec::with_capacity(d);
        for axis in 0..d {
            if mask >> axis & 1 == 1 {
                weight *= frac[axis];
                idx.push((base[axis] + 1).min(geom.shape[axis] - 1));
            } else {
                weight *= 1.0 - frac[axis];
                idx.push(base[axis]);
            }
        }
        if weight != 0.0 {
            acc += samples.at(&idx) * weight;
        }
    }
    acc
}

/// Samples of the product window `g_ω(t) = g(t-ω) conj(g(t))` on a grid.
pub fn window_product(w: &WindowSpec, omega: &[f64], geom: &GridGeometry) -> Result<GridField> {
    if omega.len() != w.dim() || geom.dim() != w.dim() {
        return Err(Error::Dim("window product dimension mismatch".into()));
    }
    let mut values = Vec::with_capacity(geom.len());
    for off in 0..geom.len() {
        let idx = geom.unflat(off);
        let t = geom.node(&idx);
        values.push(window_product_at(w, omega, &t)?);
    }
    GridField::new(geom.clone(), values)
}

/// Pointwise product window evaluation (used off-grid by the recovery solve).
pub fn window_product_at(w: &WindowSpec, omega: &[f64], t: &[f64]) -> Result<Complex64> {
    let shifted: Vec<f64> = t.iter().zip(omega).map(|(&a, &b)| a - b).collect();
    Ok(w.eval(&shifted)? * w.eval(t)?.conj())
}

/// Build a band-limited window from a tabulated spectrum: the window values
/// are the inverse transform of the spectrum (seed-free and deterministic),
/// tabulated on the requested time grid. The stored type metadata is
/// `alpha = 2π · max_j max(|lo_j|, |hi_j|)` over the spectral support box.
pub fn synth_bandlimited(
    spectrum: GridField,
    time_grid: &GridGeometry,
) -> Result<(WindowSpec, GridField)> {
    if spectrum.energy() <= 0.0 {
        return Err(Error::ZeroWindow("spectrum carries no energy".into()));
    }
    if time_grid.dim() != spectrum.dim() {
        return Err(Error::Dim("time grid dimension mismatch".into()));
    }
    let dim = spectrum.dim();
    let spec = WindowSpec {
        dim,
        family: WindowFamily::Bandlimited { spectrum },
    };
    let samples = spec.tabulate(time_grid)?;
    Ok((spec, samples))
}

/// Forward check of the Gaussian functional equation
/// `φ(z+λ) φ(0) = φ(z) φ(λ) e^{-2 z^T A λ}` for
/// `φ(z) = exp(-(z-ν)^T A (z-ν))` over `trials` uniformly random real pairs
/// `z, λ ∈ [-2, 2]^d` (fixed internal seed, deterministic). Returns the
/// maximum relative residual; it stays at rounding level iff `A` is
/// symmetric.
pub fn gaussian_factorization_check(
    matrix: &DMatrix<Complex64>,
    nu: &[Complex64],
    trials: usize,
) -> Result<f64> {
    let d = matrix.nrows();
    if matrix.ncols() != d || nu.len() != d || d == 0 {
        return Err(Error::Dim("factorization check dimension mismatch".into()));
    }
    let phi = |z: &[f64]| -> Complex64 {
        let w: Vec<Complex64> = (0..d).map(|j| Complex64::new(z[j], 0.0) - nu[j]).collect();
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                q += w[i] * matrix[(i, j)] * w[j];
            }
        }
        (-q).exp()
    };
    let phi0 = phi(&vec![0.0; d]);
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_7a11);
    let mut worst: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let z: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lam: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let sum: Vec<f64> = z.iter().zip(&lam).map(|(&a, &b)| a + b).collect();
        let mut cross = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                cross += z[i] * matrix[(i, j)] * lam[j];
            }
        }
        let lhs = phi(&sum);
        let rhs = phi(&z) * phi(&lam) * (-2.0 * cross).exp() / phi0;
        let denom = lhs.norm().max(f64::MIN_POSITIVE);
        worst = worst.max((lhs - rhs).norm() / denom);
    }
    Ok(worst)
}

/// Default padded tabulation grid: the signal grid extended by 4 standard
/// deviations (Gaussian/Hermite) or 8 main lobes (band-limited), keeping the
/// signal spacing. `pad_override`, when given, replaces the computed padding
/// (in time units, per side).
pub fn default_time_grid(
    w: &WindowSpec,
    signal: &GridGeometry,
    pad_override: Option<f64>,
) -> Result<GridGeometry> {
    let pad = if let Some(p) = pad_override {
        p
    } else {
        match &w.family {
            WindowFamily::Gaussian { matrix, .. } => {
                // per-axis std of e^{-x^T (Re A) x} is 1/sqrt(2 Re a_jj)
                let d = matrix.nrows();
                let sigma = (0..d)
                    .map(|j| (2.0 * matrix[(j, j)].re).sqrt().recip())
                    .fold(0.0, f64::max);
                4.0 * sigma
            }
            WindowFamily::Hermite { index } => {
                let kmax = *index.iter().max().unwrap_or(&0) as f64;
                // envelope radius of h_k grows like sqrt((2k+1)/(2π))
                4.0 * ((2.0 * kmax + 1.0) / TWO_PI).sqrt()
            }
            WindowFamily::Airy { radius } => 8.0 / (2.0 * radius),
            WindowFamily::Bandlimited { spectrum } => {
                let widths = spectrum.geometry().support_box()?.widths();
                let wmin = widths.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                8.0 / wmin
            }
            WindowFamily::Tabulated { .. } => 0.0,
        }
    };
    let d = signal.dim();
    let mut origin = Vec::with_capacity(d);
    let mut shape = Vec::with_capacity(d);
    for j in 0..d {
        let extra = (pad / signal.spacing[j]).ceil() as usize;
        origin.push(signal.origin[j] - extra as f64 * signal.spacing[j]);
        shape.push(signal.shape[j] + 2 * extra);
    }
    GridGeometry::new(origin, signal.spacing.clone(), shape)
}

mod serde_cmatrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &DMatrix<Complex64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<DMatrix<Complex64>, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i][j][0], rows[i][j][1])
        }))
    }
}
