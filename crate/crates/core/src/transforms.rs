//! Discretized continuous Fourier transform, STFT, and spectrogram sampling.
//!
//! Fourier convention fixed throughout: `F f(ω) = ∫ f(t) e^{-2πi ω·t} dt`
//! (2π in the exponent, no prefactor). The grid transform is the Riemann-sum
//! approximation `Σ f(t_n) e^{∓2πi ω·t_n} ∏Δ`; the full-grid path runs over
//! the canonical reciprocal grid spanning `[-1/(2Δ), 1/(2Δ))` per axis and
//! is exactly invertible by the opposite-sign transform on origin-centered
//! grids. Off-grid frequencies are evaluated by direct summation, so the
//! sampling lattice `Γ` need not be commensurate with the grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CompactBox, CountableSet, Lattice};
use crate::grid::{GridField, GridGeometry};
use crate::windows::WindowSpec;
use crate::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Sign of the exponent: `Forward` is `e^{-2πi ω·t}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtSign {
    Forward,
    Inverse,
}

impl FtSign {
    fn signum(self) -> f64 {
        match self {
            FtSign::Forward => -1.0,
            FtSign::Inverse => 1.0,
        }
    }

    pub fn opposite(self) -> FtSign {
        match self {
            FtSign::Forward => FtSign::Inverse,
            FtSign::Inverse => FtSign::Forward,
        }
    }
}

/// Canonical reciprocal grid: per axis `N` nodes at spacing `1/(NΔ)` with
/// origin `-floor(N/2)/(NΔ)`.
pub fn reciprocal_geometry(geom: &GridGeometry) -> GridGeometry {
    let spacing: Vec<f64> = geom
        .spacing
        .iter()
        .zip(&geom.shape)
        .map(|(&s, &n)| 1.0 / (n as f64 * s))
        .collect();
    let origin: Vec<f64> = spacing
        .iter()
        .zip(&geom.shape)
        .map(|(&ds, &n)| -((n / 2) as f64) * ds)
        .collect();
    GridGeometry::new(origin, spacing, geom.shape.clone()).expect("valid reciprocal grid")
}

/// Full-grid Riemann approximation of the continuous Fourier transform,
/// computed axis-by-axis with an FFT plus origin phase ramps.
pub fn cft(field: &GridField, sign: FtSign) -> GridField {
    let mut values = field.values().to_vec();
    let mut geom = field.geometry().clone();
    let mut planner = FftPlanner::<f64>::new();
    for axis in 0..geom.dim() {
        axis_transform(&mut values, &mut geom, axis, sign, &mut planner);
    }
    GridField::new(geom, values).expect("shape preserved")
}

/// One-axis pass: `out[k] = Δ e^{s 2πi ω_k o} Σ_n f_n e^{s 2πi k n / N}`
/// after pre-modulating `f_n` by `e^{-s 2πi K₀ n / N}` (`K₀ = floor(N/2)`,
/// `s = ±1`). Integer phase indices are reduced mod `N` so the ramps stay
/// exact; centered origins (`o = -K₀Δ`) reduce the output ramp to an exact
/// rational phase as well.
fn axis_transform(
    values: &mut [Complex64],
    geom: &mut GridGeometry,
    axis: usize,
    sign: FtSign,
    planner: &mut FftPlanner<f64>,
) {
    let n = geom.shape[axis];
    let s = sign.signum();
    let k0 = n / 2;
    let delta = geom.spacing[axis];
    let dual_spacing = 1.0 / (n as f64 * delta);
    let origin = geom.origin[axis];
    let centered = origin == -((k0) as f64) * delta;

    // phase tables
    let premod: Vec<Complex64> = (0..n)
        .map(|i| {
            let p = (k0 as u64 * i as u64) % n as u64;
            Complex64::from_polar(1.0, -s * TWO_PI * p as f64 / n as f64)
        })
        .collect();
    let postmod: Vec<Complex64> = (0..n)
        .map(|k| {
            let arg = if centered {
                // (k - K0) δ o = -(k - K0) K0 / N exactly
                let m = (k as i64 - k0 as i64) * k0 as i64;
                -TWO_PI * (m.rem_euclid(n as i64)) as f64 / n as f64
            } else {
                TWO_PI * (k as f64 - k0 as f64) * dual_spacing * origin
            };
            Complex64::from_polar(1.0, s * arg) * delta
        })
        .collect();

    let fft = match sign {
        FtSign::Forward => planner.plan_fft_forward(n),
        FtSign::Inverse => planner.plan_fft_inverse(n),
    };

    let inner: usize = geom.shape[axis + 1..].iter().product();
    let outer: usize = geom.shape[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o_idx in 0..outer {
        for i_idx in 0..inner {
            let base = o_idx * n * inner + i_idx;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = values[base + j * inner] * premod[j];
            }
            fft.process(&mut line);
            for (k, &v) in line.iter().enumerate() {
                values[base + k * inner] = v * postmod[k];
            }
        }
    }

    geom.spacing[axis] = dual_spacing;
    geom.origin[axis] = -((k0) as f64) * dual_spacing;
}

/// Direct Riemann evaluation of the transform at one (possibly off-grid)
/// frequency.
pub fn cft_at(field: &GridField, sign: FtSign, freq: &[f64]) -> Complex64 {
    let geom = field.geometry();
    let s = sign.signum();
    let mut acc = Complex64::new(0.0, 0.0);
    for off in 0..geom.len() {
        let t = geom.node(&geom.unflat(off));
        let phase: f64 = t.iter().zip(freq).map(|(&a, &b)| a * b).sum();
        acc += field.values()[off] * Complex64::from_polar(1.0, s * TWO_PI * phase);
    }
    acc * geom.cell_volume()
}

/// STFT values `V_g f(x, ω) = Σ f(t_n) conj(g(t_n - x)) e^{-2πi ω·t_n} ∏Δ`
/// at one time shift and a batch of frequencies. The window is evaluated
/// analytically at the shifted nodes, so `x` need not lie on the grid.
pub fn stft_eval(
    f: &GridField,
    w: &WindowSpec,
    x: &[f64],
    omegas: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let geom = f.geometry();
    if x.len() != geom.dim() || w.dim() != geom.dim() {
        return Err(Error::Dim("stft_eval dimension mismatch".into()));
    }
    // localized signal f(t) conj(g(t - x)) tabulated once per shift
    let mut nodes = Vec::with_capacity(geom.len());
    let mut local = Vec::with_capacity(geom.len());
    for off in 0..geom.len() {
        let t = geom.node(&geom.unflat(off));
        let shifted: Vec<f64> = t.iter().zip(x).map(|(&a, &b)| a - b).collect();
        local.push(f.values()[off] * w.eval(&shifted)?.conj());
        nodes.push(t);
    }
    let cell = geom.cell_volume();
    let mut out = Vec::with_capacity(omegas.len());
    for omega in omegas {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &v) in nodes.iter().zip(&local) {
            let phase: f64 = t.iter().zip(omega).map(|(&a, &b)| a * b).sum();
            acc += v * Complex64::from_polar(1.0, -TWO_PI * phase);
        }
        out.push(acc * cell);
    }
    Ok(out)
}

/// Inclusive integer index box for the enumerated `Γ` window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaWindow {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl GammaWindow {
    pub fn count(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (h - l + 1) as usize)
            .product()
    }

    pub fn indices(&self) -> Vec<Vec<i64>> {
        let d = self.lo.len();
        let mut out = Vec::with_capacity(self.count());
        let mut idx = self.lo.clone();
        loop {
            out.push(idx.clone());
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] <= self.hi[axis] {
                    break;
                }
                idx[axis] = self.lo[axis];
            }
        }
    }

    pub fn flat(&self, index: &[i64]) -> Option<usize> {
        let mut off = 0usize;
        for ((&i, &l), &h) in index.iter().zip(&self.lo).zip(&self.hi) {
            if i < l || i > h {
                return None;
            }
            off = off * (h - l + 1) as usize + (i - l) as usize;
        }
        Some(off)
    }
}

/// The measurement object: spectrogram values `|V_g f(λ, γ)|²` over the
/// enumerated `Λ` horizon and a `Γ` index window, with full geometry
/// metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrogramSamples {
    pub time_set: CountableSet,
    pub lambda_horizon: usize,
    pub freq_lattice: Lattice,
    pub gamma_window: GammaWindow,
    pub signal_support: CompactBox,
    pub window: WindowSpec,
    values: Vec<f64>,
}

impl SpectrogramSamples {
    pub fn new(
        time_set: CountableSet,
        lambda_horizon: usize,
        freq_lattice: Lattice,
        gamma_window: GammaWindow,
        signal_support: CompactBox,
        window: WindowSpec,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != lambda_horizon * gamma_window.count() {
            return Err(Error::Domain(format!(
                "value count {} does not match {} lambdas x {} gammas",
                values.len(),
                lambda_horizon,
                gamma_window.count()
            )));
        }
        if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::Domain("spectrogram values must be >= 0".into()));
        }
        Ok(Self {
            time_set,
            lambda_horizon,
            freq_lattice,
            gamma_window,
            signal_support,
            window,
            values,
        })
    }

    pub fn lambda_points(&self) -> Vec<Vec<f64>> {
        self.time_set.enumerate(self.lambda_horizon)
    }

    pub fn value(&self, lambda_idx: usize, gamma_idx: &[i64]) -> Option<f64> {
        let g = self.gamma_window.flat(gamma_idx)?;
        self.values
            .get(lambda_idx * self.gamma_window.count() + g)
            .copied()
    }

    /// The `Γ`-sampled frequency slice at one `λ`, as (index, point, value).
    pub fn slice(&self, lambda_idx: usize) -> Vec<(Vec<i64>, Vec<f64>, f64)> {
        let gcount = self.gamma_window.count();
        let base = lambda_idx * gcount;
        self.gamma_window
            .indices()
            .into_iter()
            .enumerate()
            .map(|(j, idx)| {
                let p = self.freq_lattice.point(&idx);
                (idx, p, self.values[base + j])
            })
            .collect()
    }

    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }
}

/// Relative energy of `f` outside the box `k` (node-wise indicator).
pub fn support_violation(f: &GridField, k: &CompactBox) -> f64 {
    let geom = f.geometry();
    let mut outside = 0.0;
    let mut total = 0.0;
    for off in 0..geom.len() {
        let e = f.values()[off].norm_sqr();
        total += e;
        if !k.contains_point(&geom.node(&geom.unflat(off))) {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Sample the spectrogram on `Λ × Γ`: `values[λ, γ] = |V_g f(λ, γ)|²`.
///
/// `f` must be supported in `k` up to a relative energy of 1e-10. The `Γ`
/// window spans the full reciprocal span of the signal grid.
pub fn sample_spectrogram(
    f: &GridField,
    w: &WindowSpec,
    lambda: &CountableSet,
    gamma: &Lattice,
    lambda_horizon: usize,
    k: &CompactBox,
) -> Result<SpectrogramSamples> {
    let d = f.dim();
    if lambda.dim() != d || gamma.dim() != d || k.dim() != d || w.dim() != d {
        return Err(Error::Dim("sample_spectrogram dimension mismatch".into()));
    }
    let violation = support_violation(f, k);
    if violation > 1e-10 {
        return Err(Error::Support(format!(
            "relative energy outside K is {violation:.3e} (> 1e-10)"
        )));
    }
    let gamma_window = gamma_window_for(f.geometry(), gamma);
    let gamma_points: Vec<Vec<f64>> = gamma_window
        .indices()
        .iter()
        .map(|idx| gamma.point(idx))
        .collect();
    let lambdas = lambda.enumerate(lambda_horizon);
    if lambdas.len() < lambda_horizon {
        return Err(Error::TooFewPoints(format!(
            "Λ enumerates only {} of {} requested points",
            lambdas.len(),
            lambda_horizon
        )));
    }
    let mut values = Vec::with_capacity(lambda_horizon * gamma_points.len());
    for lam in &lambdas {
        let row = stft_eval(f, w, lam, &gamma_points)?;
        values.extend(row.iter().map(|v| v.norm_sqr()));
    }
    SpectrogramSamples::new(
        lambda.clone(),
        lambda_horizon,
        gamma.clone(),
        gamma_window,
        k.clone(),
        w.clone(),
        values,
    )
}

/// Index window of `Γ` covering the reciprocal span of the signal grid.
pub fn gamma_window_for(geom: &GridGeometry, gamma: &Lattice) -> GammaWindow {
    let half_span: Vec<f64> = geom.spacing.iter().map(|&s| 0.5 / s).collect();
    let radius = half_span.iter().map(|&h| h * h).sum::<f64>().sqrt();
    let bound = (radius / gamma.sigma_min()).ceil() as i64;
    GammaWindow {
        lo: vec![-bound; geom.dim()],
        hi: vec![bound; geom.dim()],
    }
}

/// Residual of the fundamental identity of time-frequency analysis,
/// `V_g f(x, ω) = e^{-2πi x·ω} V_{ĝ} f̂(ω, -x)`, maximized over `trials`
/// random on-grid pairs `(x, ω)` (fixed internal seed). Both sides are
/// Riemann sums; the identity holds to quadrature accuracy for smooth,
/// fast-decaying pairs. Pairs where `|V_g f|` sits at the quadrature noise
/// floor (below `1e-8 ‖f‖‖g‖`) carry no information about the identity and
/// are redrawn.
pub fn fiot_residual(f: &GridField, w: &WindowSpec, trials: usize) -> Result<f64> {
    let geom = f.geometry();
    let hat_f = cft(f, FtSign::Forward);
    let g_samples = w.tabulate(geom)?;
    let floor = 1e-8 * (f.energy() * g_samples.energy()).sqrt();
    let hat_g = cft(&g_samples, FtSign::Forward);
    let hat_w = WindowSpec::tabulated(hat_g, None, None);

    let rec = reciprocal_geometry(geom);
    let mut rng = ChaCha20Rng::seed_from_u64(0xF107);
    let mut worst: f64 = 0.0;
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < trials.max(1) && attempts < 200 * trials.max(1) {
        attempts += 1;
        let x_idx: Vec<usize> = geom.shape.iter().map(|&n| rng.gen_range(0..n)).collect();
        let w_idx: Vec<usize> = rec.shape.iter().map(|&n| rng.gen_range(0..n)).collect();
        let x = geom.node(&x_idx);
        let omega = rec.node(&w_idx);
        let lhs = stft_eval(f, w, &x, &[omega.clone()])?[0];
        if lhs.norm() < floor {
            continue;
        }
        done += 1;
        let neg_x: Vec<f64> = x.iter().map(|&v| -v).collect();
        let dot: f64 = x.iter().zip(&omega).map(|(&a, &b)| a * b).sum();
        let rhs = Complex64::from_polar(1.0, -TWO_PI * dot)
            * stft_eval(&hat_f, &hat_w, &omega, &[neg_x])?[0];
        worst = worst.max((lhs - rhs).norm() / (lhs.norm() + 1e-14));
    }
    Ok(worst)
}

/// Fraction of spectral energy at nodes outside `band`.
pub fn out_of_band_fraction(spectrum: &GridField, band: &CompactBox) -> f64 {
    support_violation(spectrum, band)
}

/// Fraction of spectral energy at nodes outside the `ℓ²` ball of `radius`.
pub fn out_of_ball_fraction(spectrum: &GridField, radius: f64) -> f64 {
    let geom = spectrum.geometry();
    let mut outside = 0.0;
    let mut total = 0.0;
    for off in 0..geom.len() {
        let e = spectrum.values()[off].norm_sqr();
        total += e;
        let r2: f64 = geom
            .node(&geom.unflat(off))
            .iter()
            .map(|&x| x * x)
            .sum();
        if r2.sqrt() > radius {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn gaussian_field(half: f64, spacing: f64) -> GridField {
        let geom = GridGeometry::span_1d(-half, half, spacing).unwrap();
        GridField::from_fn(geom, |t| Complex64::new((-PI * t[0] * t[0]).exp(), 0.0))
    }

    #[test]
    fn delta_gives_flat_spectrum() {
        let geom = GridGeometry::centered(vec![0.25], vec![9]).unwrap();
        let mut f = GridField::zeros(geom);
        f.set(&[4], Complex64::new(1.0, 0.0)); // node at t = 0
        let spec = cft(&f, FtSign::Forward);
        for v in spec.values() {
            assert_relative_eq!(v.re, 0.25, max_relative = 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        // e^{-π t²} on [-8, 8] at spacing 2^-6 transforms to e^{-π ω²}
        // within 1e-10 sup-norm on |ω| <= 4
        let f = gaussian_field(8.0, 2f64.powi(-6));
        let spec = cft(&f, FtSign::Forward);
        let geom = spec.geometry().clone();
        for off in 0..geom.len() {
            let w = geom.node(&geom.unflat(off))[0];
            if w.abs() <= 4.0 {
                let expected = (-PI * w * w).exp();
                assert!(
                    (spec.values()[off].re - expected).abs() < 1e-10
                        && spec.values()[off].im.abs() < 1e-10,
                    "ω = {w}"
                );
            }
        }
    }

    #[test]
    fn forward_then_inverse_restores_field() {
        let f = gaussian_field(4.0, 0.125);
        let back = cft(&cft(&f, FtSign::Forward), FtSign::Inverse);
        assert_eq!(back.geometry(), f.geometry());
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn fft_path_matches_direct_evaluation() {
        let f = gaussian_field(4.0, 0.25);
        let spec = cft(&f, FtSign::Forward);
        let geom = spec.geometry().clone();
        for off in (0..geom.len()).step_by(5) {
            let w = geom.node(&geom.unflat(off));
            let direct = cft_at(&f, FtSign::Forward, &w);
            assert!((direct - spec.values()[off]).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_at_grid_scale() {
        let f = gaussian_field(6.0, 0.125);
        let spec = cft(&f, FtSign::Forward);
        assert_relative_eq!(f.energy(), spec.energy(), max_relative = 1e-12);
    }

    #[test]
    fn stft_at_origin_is_inner_product() {
        let f = gaussian_field(8.0, 2f64.powi(-6));
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let v = stft_eval(&f, &w, &[0.0], &[vec![0.0]]).unwrap()[0];
        // ⟨g, g⟩ = ∫ e^{-2π t²} dt = 2^{-1/2}
        assert_relative_eq!(v.re, 0.5f64.sqrt(), max_relative = 1e-8);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn stft_modulus_invariant_under_global_phase() {
        let f = gaussian_field(4.0, 0.125);
        let theta = 1.3;
        let g = f.scale(Complex64::from_polar(1.0, theta));
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = vec![rng.gen_range(-2.0..2.0)];
            let om = vec![rng.gen_range(-3.0..3.0)];
            let a = stft_eval(&f, &w, &x, &[om.clone()]).unwrap()[0].norm();
            let b = stft_eval(&g, &w, &x, &[om]).unwrap()[0].norm();
            assert!((a - b).abs() <= 1e-15 * a.max(1.0));
        }
    }

    #[test]
    fn stft_translation_covariance() {
        // |V(T_a f)(x, ω)| = |V f(x - a, ω)| for an on-grid shift a
        let f = gaussian_field(4.0, 0.125);
        let shifted = translate_on_grid(&f, 8); // a = 1.0
        let w = WindowSpec::standard_gaussian(1).unwrap();
        for (x, om) in [(0.5, 0.3), (-0.25, 1.1), (1.0, -0.7)] {
            let a = stft_eval(&shifted, &w, &[x], &[vec![om]]).unwrap()[0].norm();
            let b = stft_eval(&f, &w, &[x - 1.0], &[vec![om]]).unwrap()[0].norm();
            assert!((a - b).abs() <= 1e-10 * a.max(1.0), "x={x}, ω={om}");
        }
    }

    fn translate_on_grid(f: &GridField, steps: i64) -> GridField {
        let geom = f.geometry().clone();
        let n = geom.shape[0] as i64;
        let mut out = GridField::zeros(geom);
        for i in 0..n {
            let j = i - steps;
            if j >= 0 && j < n {
                let v = f.values()[j as usize];
                out.values_mut()[i as usize] = v;
            }
        }
        out
    }

    fn bump_in_k(spacing: f64) -> GridField {
        // complex Gaussian bump well inside K = [-1, 1]
        let geom = GridGeometry::span_1d(-1.0, 1.0, spacing).unwrap();
        GridField::from_fn(geom, |t| {
            Complex64::new(1.0, 0.3) * (-PI * (t[0] / 0.45) * (t[0] / 0.45)).exp()
        })
    }

    #[test]
    fn spectrogram_zero_signal_is_zero() {
        let geom = GridGeometry::span_1d(-1.0, 1.0, 0.125).unwrap();
        let f = GridField::zeros(geom);
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let lam = CountableSet::lattice(Lattice::scaled_integers(0.25).unwrap());
        let gam = Lattice::scaled_integers(0.5).unwrap();
        let k = CompactBox::centered_cube(1.0, 1).unwrap();
        let s = sample_spectrogram(&f, &w, &lam, &gam, 9, &k).unwrap();
        assert!(s.raw_values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn spectrogram_scales_quadratically() {
        let f = bump_in_k(0.0625);
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let lam = CountableSet::lattice(Lattice::scaled_integers(0.5).unwrap());
        let gam = Lattice::scaled_integers(0.5).unwrap();
        let k = CompactBox::centered_cube(1.0, 1).unwrap();
        let s1 = sample_spectrogram(&f, &w, &lam, &gam, 5, &k).unwrap();
        let c = Complex64::new(0.0, 2.0); // |c|² = 4, exactly representable
        let s2 = sample_spectrogram(&f.scale(c), &w, &lam, &gam, 5, &k).unwrap();
        for (a, b) in s1.raw_values().iter().zip(s2.raw_values()) {
            assert!((b - 4.0 * a).abs() <= 1e-12 * b.max(1e-30));
        }
    }

    #[test]
    fn spectrogram_matches_dense_grid_values() {
        // same quadrature, two code paths: direct (λ, γ) sums vs the FFT
        // spectrogram of f·conj(T_λ g) at matching nodes
        let f = bump_in_k(2f64.powi(-6));
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let lam = CountableSet::lattice(Lattice::scaled_integers(0.25).unwrap());
        // Γ spacing equal to the reciprocal spacing so nodes coincide:
        // N = 129 nodes at Δ = 2^-6 -> δ = 64/129
        let geom = f.geometry().clone();
        let rec = reciprocal_geometry(&geom);
        let gam = Lattice::scaled_integers(rec.spacing[0]).unwrap();
        let k = CompactBox::centered_cube(1.0, 1).unwrap();
        let s = sample_spectrogram(&f, &w, &lam, &gam, 3, &k).unwrap();
        for (lam_idx, lam_pt) in s.lambda_points().iter().enumerate() {
            // dense spectrogram of the localized signal
            let local = GridField::from_fn(geom.clone(), |t| {
                let shifted = [t[0] - lam_pt[0]];
                Complex64::new(
                    f.values()[geom.snap(t, 1e-9).map(|i| geom.flat(&i)).unwrap()].re,
                    f.values()[geom.snap(t, 1e-9).map(|i| geom.flat(&i)).unwrap()].im,
                ) * w.eval(&shifted).unwrap().conj()
            });
            let dense = cft(&local, FtSign::Forward);
            let dg = dense.geometry().clone();
            for off in 0..dg.len() {
                let node = dg.node(&dg.unflat(off));
                let idx = (node[0] / gam.generator()[(0, 0)]).round() as i64;
                if let Some(v) = s.value(lam_idx, &[idx]) {
                    if (node[0] - idx as f64 * gam.generator()[(0, 0)]).abs() < 1e-9 {
                        let expected = dense.values()[off].norm_sqr();
                        assert!(
                            (v - expected).abs() <= 1e-10 * expected.max(1.0),
                            "λ={lam_pt:?}, γ node {node:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn spectrogram_rejects_support_violation() {
        let geom = GridGeometry::span_1d(-2.0, 2.0, 0.125).unwrap();
        let f = GridField::from_fn(geom, |t| {
            Complex64::new((-(t[0] * t[0])).exp(), 0.0) // heavy tails beyond [-1,1]
        });
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let lam = CountableSet::lattice(Lattice::scaled_integers(0.5).unwrap());
        let gam = Lattice::scaled_integers(0.5).unwrap();
        let k = CompactBox::centered_cube(1.0, 1).unwrap();
        assert!(matches!(
            sample_spectrogram(&f, &w, &lam, &gam, 5, &k),
            Err(Error::Support(_))
        ));
    }

    #[test]
    fn fiot_residual_small_for_gaussian_pair() {
        let f = gaussian_field(8.0, 2f64.powi(-6));
        let w = WindowSpec::standard_gaussian(1).unwrap();
        // (x, ω) = (0, 0): both sides real positive equal
        let lhs = stft_eval(&f, &w, &[0.0], &[vec![0.0]]).unwrap()[0];
        let hat_f = cft(&f, FtSign::Forward);
        let hat_g = cft(&w.tabulate(f.geometry()).unwrap(), FtSign::Forward);
        let rhs = stft_eval(
            &hat_f,
            &WindowSpec::tabulated(hat_g, None, None),
            &[0.0],
            &[vec![0.0]],
        )
        .unwrap()[0];
        assert!((lhs - rhs).norm() / lhs.norm() <= 1e-12);

        let r = fiot_residual(&f, &w, 25).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn fiot_residual_with_hermite_signal() {
        let geom = GridGeometry::span_1d(-8.0, 8.0, 2f64.powi(-6)).unwrap();
        let h1 = WindowSpec::hermite(vec![1]).unwrap();
        let f = h1.tabulate(&geom).unwrap();
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let r = fiot_residual(&f, &w, 50).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn fiot_residual_detects_boundary_violation() {
        // bump truncated by the grid edge: wrap-around aliasing breaks the identity
        let geom = GridGeometry::span_1d(-8.0, 8.0, 0.125).unwrap();
        let f = GridField::from_fn(geom, |t| {
            Complex64::new((-PI * ((t[0] - 7.5) / 0.45).powi(2)).exp(), 0.0)
        });
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let r = fiot_residual(&f, &w, 50).unwrap();
        assert!(r > 1e-2, "negative control residual {r}");
    }

    #[test]
    fn slice_spectrum_confined_to_difference_set() {
        // for f supported in K, the ω-slice of |V_g f(λ, ·)|² has spectrum
        // in K - K
        let f = bump_in_k(2f64.powi(-6));
        let w = WindowSpec::standard_gaussian(1).unwrap();
        let k = CompactBox::centered_cube(1.0, 1).unwrap();
        for lam in [0.0, 0.5, -0.75] {
            // dense slice over the reciprocal grid of a padded copy
            let rec = reciprocal_geometry(f.geometry());
            let omegas: Vec<Vec<f64>> = (0..rec.len()).map(|i| rec.node(&rec.unflat(i))).collect();
            let vals = stft_eval(&f, &w, &[lam], &omegas).unwrap();
            let slice = GridField::new(
                rec.clone(),
                vals.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
            )
            .unwrap();
            let spec = cft(&slice, FtSign::Forward);
            let frac = out_of_band_fraction(&spec, &k.difference());
            assert!(frac <= 1e-6, "λ = {lam}: out-of-band fraction {frac:.3e}");
        }
    }
}
