//! Constructive phase retrieval from spectrogram samples.
//!
//! The pipeline runs the uniqueness argument forward, one stage per proof
//! step, each with an explicit numerical tolerance:
//!
//! 1. **Slices** — for every time shift `λ`, the sampled frequency slice
//!    `|V_g f(λ, ·)|²` is band-limited to `K-K`; Shannon-interpolate it from
//!    its `Γ`-samples onto a dense grid and Fourier-transform it. By the
//!    convolution identity this yields the translate measurements
//!    `m_ω(λ) = ∫_K f_ω(t) conj(g_ω(t-λ)) dt` with `f_ω = (T_ω f) conj(f)`.
//! 2. **Per-ω solves** — discretize `∫_K · g_ω(·-λ)` on the signal grid and
//!    solve the resulting least-squares system for `f_ω` by truncated SVD
//!    (minimum-norm solution; ill-conditioning is surfaced, not hidden).
//! 3. **Assembly** — `f_0 = |f|²` fixes the modulus; the anchor row
//!    `f_{t*-s}(t*) = f(s) conj(f(t*))` fixes everything else up to the
//!    global phase, which is normalized by making `f(t*)` real nonnegative.
//!
//! Per-ω solves and per-λ interpolations are data-parallel (rayon).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CompactBox, CountableSet, Lattice};
use crate::grid::{GridField, GridGeometry};
use crate::paley_wiener::shannon_kernel;
use crate::transforms::{
    cft, cft_at, out_of_band_fraction, sample_spectrogram, FtSign, SpectrogramSamples,
};
use crate::uniqueness::{gamma_gate, lambda_gate, GateKind, GateReport};
use crate::windows::{window_product_at, WindowSpec};
use crate::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// What to do when a uniqueness gate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatePolicy {
    Enforce,
    Warn,
}

/// Pipeline configuration. The frequency-offset grid is derived from the
/// signal grid as its difference set `{t - t' : t, t' ∈ nodes}`, so the
/// assembly stage needs no interpolation in `ω`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub signal_grid: GridGeometry,
    /// Relative singular-value truncation threshold (0 < tol < 1).
    pub svd_tol: f64,
    /// Shannon series truncation radius, in `Γ` cells.
    pub shannon_radius: f64,
    pub gate_policy: GatePolicy,
}

impl RecoveryConfig {
    pub fn new(signal_grid: GridGeometry, svd_tol: f64, shannon_radius: f64) -> Result<Self> {
        let cfg = RecoveryConfig {
            signal_grid,
            svd_tol,
            shannon_radius,
            gate_policy: GatePolicy::Enforce,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.svd_tol > 0.0 && self.svd_tol < 1.0) {
            return Err(Error::Domain("svd_tol must lie in (0, 1)".into()));
        }
        if !(self.shannon_radius >= 1.0) {
            return Err(Error::Domain("shannon_radius must be >= 1 cell".into()));
        }
        Ok(())
    }

    /// Difference grid of the signal grid: spacing `Δ`, span
    /// `[lo - hi, hi - lo]`, `2N - 1` nodes per axis.
    pub fn omega_geometry(&self) -> GridGeometry {
        let g = &self.signal_grid;
        let d = g.dim();
        let mut origin = Vec::with_capacity(d);
        let mut shape = Vec::with_capacity(d);
        for j in 0..d {
            let extent = (g.shape[j] - 1) as f64 * g.spacing[j];
            origin.push(-extent);
            shape.push(2 * g.shape[j] - 1);
        }
        GridGeometry::new(origin, g.spacing.clone(), shape).expect("valid difference grid")
    }
}

/// Fourier data of one frequency offset: `values[λ] = F(|V_g f(λ,·)|²)(ω)`,
/// the measurement of `f_ω` against the translates `T_λ g_ω`.
#[derive(Debug, Clone)]
pub struct TranslateMeasurements {
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Per-stage residuals of a recovery run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Residuals {
    /// Max over `λ` of the interpolated slice's relative spectral energy
    /// outside `K-K`.
    pub interpolation: f64,
    /// Max relative least-squares residual over frequency offsets with
    /// non-negligible measurement norm.
    pub solve_max: f64,
    /// Max inconsistency of `f_ω(s) = f(s-ω) conj(f(s))` over random pairs,
    /// relative to `max |f|²`.
    pub assembly: f64,
    /// Fraction of `|f|²` mass clipped away as negative noise.
    pub clipped_mass: f64,
}

/// Outcome of a recovery run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub estimate: GridField,
    pub phase_anchor: Vec<usize>,
    pub residuals: Residuals,
    pub gates: Vec<GateReport>,
    /// `min_τ ‖f̂ - τ f_true‖ / ‖f_true‖` when ground truth was supplied.
    pub aligned_error: Option<f64>,
}

/// Stage 1: interpolate every sampled slice over `Γ` and Fourier-transform
/// it at every node of the frequency-offset grid.
///
/// Returns one measurement vector per `ω` (row-major over the offset grid)
/// plus the interpolation residual. Requires the `Γ*`-cell gate to pass
/// unless the policy is `Warn`.
pub fn slice_measurements(
    samples: &SpectrogramSamples,
    cfg: &RecoveryConfig,
) -> Result<(Vec<TranslateMeasurements>, f64)> {
    cfg.validate()?;
    let k = &samples.signal_support;
    let gate = gamma_gate(k, &samples.freq_lattice)?;
    if !gate.pass && cfg.gate_policy == GatePolicy::Enforce {
        return Err(Error::Gate(gate.details));
    }

    let gamma = &samples.freq_lattice;
    let diag = gamma.as_diagonal(1e-12).ok_or_else(|| {
        Error::Domain("slice interpolation needs a diagonal Γ (box cell kernel)".into())
    })?;
    let d = gamma.dim();
    let cell: Vec<f64> = diag.iter().map(|a| 1.0 / a.abs()).collect();
    let cell_box = CompactBox::new(
        cell.iter().map(|c| -0.5 * c).collect(),
        cell.iter().map(|c| 0.5 * c).collect(),
    )?;
    let kernel = shannon_kernel(gamma, &cell_box)?;

    // dense ω'-grid: oversample the Γ spacing so that the Riemann transform
    // of the cell-band-limited interpolant is alias-free over K-K. The
    // window is sized by the decay of the sampled slices themselves: the
    // integrand is negligible beyond the decay radius, and keeping targets
    // there means the truncated Shannon sum only ever omits negligible
    // samples (the sinc tails of the central mass stay inside the radius).
    let diff = k.difference();
    let diff_max = diff
        .lo
        .iter()
        .zip(&diff.hi)
        .map(|(&l, &h)| l.abs().max(h.abs()))
        .fold(0.0, f64::max);
    let radius_units = self_radius(&diag, cfg.shannon_radius);
    let peak = samples.raw_values().iter().cloned().fold(0.0, f64::max);
    let mut decay_radius = vec![0.0f64; d];
    if peak > 0.0 {
        for lam in 0..samples.lambda_horizon {
            for (_, point, v) in samples.slice(lam) {
                if v > 1e-14 * peak {
                    for j in 0..d {
                        decay_radius[j] = decay_radius[j].max(point[j].abs());
                    }
                }
            }
        }
    }
    let mut dense_spacing = Vec::with_capacity(d);
    let mut dense_shape = Vec::with_capacity(d);
    let mut dense_origin = Vec::with_capacity(d);
    for j in 0..d {
        let a = diag[j].abs();
        let over = (a * diff_max + 1.5).ceil().max(2.0);
        let delta = a / over;
        let avail = samples.gamma_window.hi[j].min(-samples.gamma_window.lo[j]) as f64 * a;
        let half_span = (decay_radius[j] + 2.0 * a).min(avail - radius_units);
        if half_span <= 0.0 {
            return Err(Error::Coverage(format!(
                "Γ window spans {avail} units on axis {j}: not enough beyond the \
                 Shannon truncation radius {radius_units}"
            )));
        }
        let half_nodes = (half_span / delta).floor().max(1.0) as usize;
        dense_spacing.push(delta);
        dense_shape.push(2 * half_nodes + 1);
        dense_origin.push(-(half_nodes as f64) * delta);
    }
    let dense_geom = GridGeometry::new(dense_origin, dense_spacing, dense_shape)?;

    // interpolate each λ-slice onto the dense grid (parallel over λ)
    let dense_targets: Vec<Vec<f64>> = (0..dense_geom.len())
        .map(|off| dense_geom.node(&dense_geom.unflat(off)))
        .collect();
    let lambda_slices: Vec<(GridField, f64)> = (0..samples.lambda_horizon)
        .into_par_iter()
        .map(|lam| -> Result<(GridField, f64)> {
            let slice = samples.slice(lam);
            let vals = interpolate_full_window(&slice, &kernel, &dense_targets);
            let field = GridField::new(dense_geom.clone(), vals)?;
            let spectrum = cft(&field, FtSign::Forward);
            let leak = out_of_band_fraction(&spectrum, &diff);
            Ok((field, leak))
        })
        .collect::<Result<Vec<_>>>()?;
    let interp_residual = lambda_slices
        .iter()
        .map(|(_, leak)| *leak)
        .fold(0.0, f64::max);

    // Fourier-transform each slice at every frequency offset
    let omega_geom = cfg.omega_geometry();
    let omegas: Vec<Vec<f64>> = (0..omega_geom.len())
        .map(|off| omega_geom.node(&omega_geom.unflat(off)))
        .collect();
    let measurements: Vec<TranslateMeasurements> = omegas
        .into_par_iter()
        .map(|omega| {
            let values = lambda_slices
                .iter()
                .map(|(slice, _)| cft_at(slice, FtSign::Forward, &omega))
                .collect();
            TranslateMeasurements { omega, values }
        })
        .collect();
    Ok((measurements, interp_residual))
}

/// Shannon sum over every sample in the Γ window (the window itself is the
/// series truncation; the decay class of the slice bounds what the window
/// leaves out). Radius-truncating around each target instead would drop the
/// sinc tails of the central mass for targets near the window edge.
fn interpolate_full_window(
    slice: &[(Vec<i64>, Vec<f64>, f64)],
    kernel: &crate::paley_wiener::ShannonKernel,
    targets: &[Vec<f64>],
) -> Vec<Complex64> {
    targets
        .iter()
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (_, point, v) in slice {
                if *v == 0.0 {
                    continue;
                }
                let diff: Vec<f64> = t.iter().zip(point).map(|(&a, &b)| a - b).collect();
                acc += kernel.eval(&diff) * *v;
            }
            acc
        })
        .collect()
}

fn self_radius(diag: &[f64], cells: f64) -> f64 {
    diag.iter().map(|a| a.abs()).fold(0.0, f64::max) * cells
}

/// Discretized synthesis matrix `M[λ, t] = conj(g_ω(t - λ)) ∏Δ` over the
/// signal-grid nodes.
fn translate_matrix(
    w: &WindowSpec,
    omega: &[f64],
    lambdas: &[Vec<f64>],
    grid: &GridGeometry,
) -> Result<DMatrix<Complex64>> {
    let cell = grid.cell_volume();
    let nodes: Vec<Vec<f64>> = (0..grid.len())
        .map(|off| grid.node(&grid.unflat(off)))
        .collect();
    let mut m = DMatrix::from_element(lambdas.len(), nodes.len(), Complex64::new(0.0, 0.0));
    for (r, lam) in lambdas.iter().enumerate() {
        for (c, t) in nodes.iter().enumerate() {
            let shifted: Vec<f64> = t.iter().zip(lam).map(|(&a, &b)| a - b).collect();
            m[(r, c)] = window_product_at(w, omega, &shifted)?.conj() * cell;
        }
    }
    Ok(m)
}

/// Minimum-norm truncated-SVD solve of `M x = b`; returns the solution and
/// the relative residual `‖Mx - b‖ / ‖b‖` (zero for `b = 0`). Singular
/// values below `rel_tol · σ_max` or below the absolute `floor` are dropped;
/// the floor lets the pipeline anchor every per-ω system to one global
/// scale so that offsets with weak data cannot amplify quadrature noise.
fn truncated_solve_with_floor(
    m: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rel_tol: f64,
    floor: f64,
) -> Result<(DVector<Complex64>, f64)> {
    // rows whose translate has no mass on the grid contribute singular
    // values far below any truncation cut; removing them up front keeps the
    // Jacobi sweeps on the live part of the system
    let row_norms: Vec<f64> = (0..m.nrows()).map(|r| m.row(r).norm()).collect();
    let row_max = row_norms.iter().cloned().fold(0.0, f64::max);
    let live: Vec<usize> = (0..m.nrows())
        .filter(|&r| row_norms[r] > 1e-16 * row_max)
        .collect();
    if live.len() < m.nrows() {
        let reduced = DMatrix::from_fn(live.len(), m.ncols(), |i, j| m[(live[i], j)]);
        let reduced_b = DVector::from_fn(live.len(), |i, _| b[live[i]]);
        let (x, _) = truncated_solve_with_floor(&reduced, &reduced_b, rel_tol, floor)?;
        let bnorm = b.norm();
        let residual = if bnorm > 0.0 {
            (m * &x - b).norm() / bnorm
        } else {
            0.0
        };
        return Ok((x, residual));
    }
    let svd = crate::linalg::svd_jacobi(m);
    let smax = svd.sigma[0];
    if !(smax > 0.0) {
        return Err(Error::DegenerateSystem(
            "translate matrix has no nonzero singular values".into(),
        ));
    }
    let cut = (rel_tol * smax).max(floor);
    let mut y = svd.u.adjoint() * b;
    for i in 0..y.len() {
        let s = svd.sigma[i];
        y[i] = if s > cut {
            y[i] / Complex64::new(s, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let x = &svd.v * y;
    let bnorm = b.norm();
    let residual = if bnorm > 0.0 {
        (m * &x - b).norm() / bnorm
    } else {
        0.0
    };
    Ok((x, residual))
}

fn truncated_solve(
    m: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rel_tol: f64,
) -> Result<(DVector<Complex64>, f64)> {
    truncated_solve_with_floor(m, b, rel_tol, 0.0)
}

/// Stage 2: invert the translate system at one frequency offset. The matrix
/// is `M[λ, t] = conj(g_ω(t - λ)) ∏Δ`; the minimum-norm solution among the
/// least-squares minimizers is returned together with its relative residual.
pub fn solve_translate_system(
    m: &TranslateMeasurements,
    w: &WindowSpec,
    lambda: &CountableSet,
    lambda_horizon: usize,
    cfg: &RecoveryConfig,
) -> Result<(GridField, f64)> {
    if m.values.len() < lambda_horizon {
        return Err(Error::TooFewPoints(format!(
            "measurements cover {} of {} λ points",
            m.values.len(),
            lambda_horizon
        )));
    }
    let lambdas = lambda.enumerate(lambda_horizon);
    let mat = translate_matrix(w, &m.omega, &lambdas, &cfg.signal_grid)?;
    let b = DVector::from_iterator(lambda_horizon, m.values.iter().take(lambda_horizon).cloned());
    let (x, residual) = truncated_solve(&mat, &b, cfg.svd_tol)?;
    let field = GridField::new(cfg.signal_grid.clone(), x.iter().cloned().collect())?;
    Ok((field, residual))
}

/// Singular spectrum of the translate synthesis matrix: the numerical
/// surrogate for completeness of `{T_λ g_ω}` over the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramDiagnostic {
    /// Smallest singular value of the analysis operator into grid space;
    /// zero whenever fewer translates than grid nodes are supplied.
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `sigma_max / sigma_min`; infinite at rank deficiency.
    pub cond: f64,
}

pub fn gram_diagnostic(
    w: &WindowSpec,
    omega: &[f64],
    lambda: &CountableSet,
    lambda_horizon: usize,
    k: &CompactBox,
    grid: &GridGeometry,
) -> Result<GramDiagnostic> {
    if grid.dim() != k.dim() {
        return Err(Error::Dim("gram grid dimension mismatch".into()));
    }
    let lambdas = lambda.enumerate(lambda_horizon);
    let mat = translate_matrix(w, omega, &lambdas, grid)?;
    let svd = crate::linalg::svd_jacobi(&mat);
    let sigma_max = svd.sigma[0];
    let sigma_min = if mat.nrows() < mat.ncols() {
        0.0
    } else {
        svd.sigma[svd.sigma.len() - 1]
    };
    let cond = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    Ok(GramDiagnostic {
        sigma_min,
        sigma_max,
        cond,
    })
}

/// Recovered per-ω slices on the frequency-offset grid.
pub struct SliceSet {
    pub omega_geom: GridGeometry,
    pub fields: Vec<GridField>,
}

impl SliceSet {
    fn field_at(&self, omega: &[f64]) -> Option<&GridField> {
        let idx = self.omega_geom.snap(omega, 1e-6)?;
        self.fields.get(self.omega_geom.flat(&idx))
    }
}

/// Outcome of the assembly stage.
pub struct Assembly {
    pub estimate: GridField,
    pub anchor: Vec<usize>,
    pub residual: f64,
    pub clipped_mass: f64,
}

/// Stage 3: assemble the signal from the recovered products
/// `f_ω = (T_ω f) conj(f)`.
///
/// `|f(t)|²` is `Re f_0(t)` clipped at zero; the anchor `t*` is the argmax
/// (lexicographically smallest index on ties); `f(t*) = sqrt(f_0(t*))`
/// fixes the global phase; and `f(s) = f_{t*-s}(t*) / conj(f(t*))` fills
/// the rest. The residual is the maximal violation of the product identity
/// over 50 random `(s, ω)` pairs, relative to `max |f|²`.
pub fn assemble_signal(slices: &SliceSet, cfg: &RecoveryConfig) -> Result<Assembly> {
    let grid = &cfg.signal_grid;
    let zero = vec![0.0; grid.dim()];
    let f0 = slices
        .field_at(&zero)
        .ok_or_else(|| Error::Domain("slice set lacks the ω = 0 node".into()))?;

    // modulus squared with negative noise clipped
    let mut clipped = 0.0;
    let mut total = 0.0;
    let mut mod2 = Vec::with_capacity(f0.len());
    for v in f0.values() {
        total += v.re.abs();
        if v.re < 0.0 {
            clipped += -v.re;
            mod2.push(0.0);
        } else {
            mod2.push(v.re);
        }
    }
    let clipped_mass = if total > 0.0 { clipped / total } else { 0.0 };

    // anchor: argmax, first index on ties (row-major scan keeps the
    // lexicographically smallest)
    let mut best = 0usize;
    for (i, &v) in mod2.iter().enumerate() {
        if v > mod2[best] {
            best = i;
        }
    }
    if mod2[best] <= 0.0 {
        return Err(Error::ZeroSignal(
            "recovered |f|² is nonpositive everywhere".into(),
        ));
    }
    let anchor_idx = grid.unflat(best);
    let anchor_pos = grid.node(&anchor_idx);
    let anchor_val = mod2[best].sqrt();

    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for off in 0..grid.len() {
        let s = grid.node(&grid.unflat(off));
        let omega: Vec<f64> = anchor_pos.iter().zip(&s).map(|(&a, &b)| a - b).collect();
        let field = slices.field_at(&omega).ok_or_else(|| {
            Error::Domain(format!("offset grid misses ω = {omega:?} (alignment broken)"))
        })?;
        values[off] = field.at(&anchor_idx) / anchor_val;
    }
    let estimate = GridField::new(grid.clone(), values)?;

    // consistency residual over random (s, ω) pairs
    let peak2 = estimate
        .values()
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    let mut rng = ChaCha20Rng::seed_from_u64(0xA55E);
    let mut residual = 0.0f64;
    let mut checked = 0usize;
    while checked < 50 {
        let s_idx: Vec<usize> = grid.shape.iter().map(|&n| rng.gen_range(0..n)).collect();
        let w_idx: Vec<usize> = slices
            .omega_geom
            .shape
            .iter()
            .map(|&n| rng.gen_range(0..n))
            .collect();
        let s = grid.node(&s_idx);
        let omega = slices.omega_geom.node(&w_idx);
        let shifted: Vec<f64> = s.iter().zip(&omega).map(|(&a, &b)| a - b).collect();
        let Some(sh_idx) = grid.snap(&shifted, 1e-6) else {
            continue;
        };
        checked += 1;
        let lhs = slices.fields[slices.omega_geom.flat(&w_idx)].at(&s_idx);
        let rhs = estimate.at(&sh_idx) * estimate.at(&s_idx).conj();
        residual = residual.max((lhs - rhs).norm() / peak2);
    }

    Ok(Assembly {
        estimate,
        anchor: anchor_idx,
        residual,
        clipped_mass,
    })
}

fn gate_or_policy(result: Result<GateReport>, policy: GatePolicy, kind: GateKind) -> Result<GateReport> {
    match result {
        Ok(report) => {
            if !report.pass && policy == GatePolicy::Enforce {
                Err(Error::Gate(report.details))
            } else {
                Ok(report)
            }
        }
        Err(e) => match policy {
            GatePolicy::Enforce => Err(Error::Gate(e.to_string())),
            GatePolicy::Warn => Ok(GateReport {
                gate: kind,
                pass: false,
                margin: -1.0,
                details: format!("gate not evaluable: {e}"),
            }),
        },
    }
}

/// Full pipeline: gates, slice measurements, per-ω solves, assembly.
///
/// The window and the sampling sets are taken from the measurement object;
/// `truth`, when given, must live on the signal grid and yields the
/// phase-aligned relative error.
pub fn recover(
    samples: &SpectrogramSamples,
    cfg: &RecoveryConfig,
    truth: Option<&GridField>,
) -> Result<RecoveryReport> {
    cfg.validate()?;
    let k = &samples.signal_support;
    let w = &samples.window;
    let gates = vec![
        gate_or_policy(
            lambda_gate(w, k, &samples.time_set),
            cfg.gate_policy,
            GateKind::Carlson,
        )?,
        gate_or_policy(
            gamma_gate(k, &samples.freq_lattice),
            cfg.gate_policy,
            GateKind::GammaCell,
        )?,
    ];

    let (measurements, interp_residual) = slice_measurements(samples, cfg)?;
    let omega_geom = cfg.omega_geometry();

    // offsets whose measurement norm sits at the noise floor carry no
    // signal (f_ω vanishes there up to quadrature noise); solving them
    // would amplify that noise through the small singular values, so the
    // recovered product is pinned to zero instead
    let norms: Vec<f64> = measurements
        .iter()
        .map(|m| m.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    let floor = 1e-6 * max_norm;

    // global singular-value floor: every per-ω truncation is anchored to
    // the σ-scale of the ω = 0 system, so weak-data offsets stay regularized
    let lambdas = samples.time_set.enumerate(samples.lambda_horizon);
    let zero = vec![0.0; cfg.signal_grid.dim()];
    let ref_matrix = translate_matrix(w, &zero, &lambdas, &cfg.signal_grid)?;
    let sigma_ref = crate::linalg::svd_jacobi(&ref_matrix).sigma[0];
    let sigma_floor = cfg.svd_tol * sigma_ref;

    let solved: Vec<(GridField, f64)> = measurements
        .par_iter()
        .zip(norms.par_iter())
        .map(|(m, &norm)| -> Result<(GridField, f64)> {
            if norm <= floor {
                return Ok((GridField::zeros(cfg.signal_grid.clone()), 0.0));
            }
            let mat = translate_matrix(w, &m.omega, &lambdas, &cfg.signal_grid)?;
            let b = DVector::from_iterator(
                samples.lambda_horizon,
                m.values.iter().take(samples.lambda_horizon).cloned(),
            );
            let (x, residual) = truncated_solve_with_floor(&mat, &b, cfg.svd_tol, sigma_floor)?;
            let field = GridField::new(cfg.signal_grid.clone(), x.iter().cloned().collect())?;
            Ok((field, residual))
        })
        .collect::<Result<Vec<_>>>()?;

    let solve_max = solved.iter().map(|(_, r)| *r).fold(0.0, f64::max);

    let slices = SliceSet {
        omega_geom,
        fields: solved.into_iter().map(|(f, _)| f).collect(),
    };
    let assembly = assemble_signal(&slices, cfg)?;

    let aligned_error = match truth {
        Some(t) => Some(assembly.estimate.aligned_distance(t)?),
        None => None,
    };

    Ok(RecoveryReport {
        estimate: assembly.estimate,
        phase_anchor: assembly.anchor,
        residuals: Residuals {
            interpolation: interp_residual,
            solve_max,
            assembly: assembly.residual,
            clipped_mass: assembly.clipped_mass,
        },
        gates,
        aligned_error,
    })
}

/// Non-uniqueness demo for a too-sparse `Γ`.
#[derive(Debug)]
pub struct AliasingDemo {
    pub f: GridField,
    pub h: GridField,
    /// The modulation frequency: a common nonzero point of `Γ` and `Γ*`.
    pub xi: Vec<f64>,
    /// Index shift of `ξ` in `Γ`.
    pub index_shift: Vec<i64>,
    /// Max deviation between the `h` samples and the shift-re-indexed `f`
    /// samples, relative to the largest sample.
    pub max_sample_deviation: f64,
    /// Phase-aligned relative distance between `f` and `h`.
    pub signal_distance: f64,
}

/// Construct `h = f · e^{2πi ξ·t}` with `ξ ∈ Γ* ∩ Γ`, `ξ ≠ 0`: the
/// modulation shifts the spectrogram slices by a full lattice step, so the
/// sampled data of `h` coincide with those of `f` up to the index relabeling
/// `γ ↦ γ + ξ` — which maps the sampling set `Γ` onto itself. The demo
/// reports the residual deviation after that relabeling together with the
/// phase-aligned distance between the two signals.
///
/// Requires the `Γ*`-cell gate to FAIL (a passing `Γ` admits no such pair).
pub fn aliasing_counterexample(
    k: &CompactBox,
    gamma_sparse: &Lattice,
    w: &WindowSpec,
    signal: Option<&GridField>,
) -> Result<AliasingDemo> {
    let gate = gamma_gate(k, gamma_sparse)?;
    if gate.pass {
        return Err(Error::NoCounterexample(
            "Γ*-cell gate passes; sampling at Γ is injective on L²(K)".into(),
        ));
    }
    let d = k.dim();
    let diag = gamma_sparse.as_diagonal(1e-12).ok_or_else(|| {
        Error::Domain("aliasing construction assumes a diagonal Γ".into())
    })?;
    // ξ = n c e₁ with n c² ∈ ℤ, so ξ lies in Γ and in Γ* = (1/c)ℤ × ...
    let c = diag[0].abs();
    let mut shift_steps: Option<i64> = None;
    for n in 1..=64i64 {
        let m = n as f64 * c * c;
        if (m - m.round()).abs() < 1e-9 && m.round() != 0.0 {
            shift_steps = Some(n);
            break;
        }
    }
    let n = shift_steps.ok_or_else(|| {
        Error::NoCounterexample(
            "no small common point of Γ and Γ*; pick a generator with rational square".into(),
        )
    })?;
    let mut xi = vec![0.0; d];
    xi[0] = n as f64 * c;
    let mut index_shift = vec![0i64; d];
    index_shift[0] = n;

    // default test signal: a real Gaussian bump well inside K
    let f = match signal {
        Some(f) => {
            if f.energy() <= 0.0 {
                return Err(Error::ZeroSignal(
                    "aliasing construction requires a nonzero signal".into(),
                ));
            }
            f.clone()
        }
        None => default_bump(k)?,
    };
    let h = GridField::from_fn(f.geometry().clone(), |t| {
        let idx = f.geometry().snap(t, 1e-9).expect("node");
        let phase: f64 = xi.iter().zip(t).map(|(&a, &b)| a * b).sum();
        f.at(&idx) * Complex64::from_polar(1.0, TWO_PI * phase)
    });

    let widths = k.widths();
    let lam_gen: Vec<f64> = widths.iter().map(|&w| w / 8.0).collect();
    let lambda = CountableSet::lattice(Lattice::diagonal(&lam_gen)?);
    let horizon = 9usize;
    let sf = sample_spectrogram(&f, w, &lambda, gamma_sparse, horizon, k)?;
    let sh = sample_spectrogram(&h, w, &lambda, gamma_sparse, horizon, k)?;

    let peak = sf.raw_values().iter().cloned().fold(0.0, f64::max);
    let mut deviation = 0.0f64;
    for lam in 0..horizon {
        for gidx in sh.gamma_window.indices() {
            let shifted: Vec<i64> = gidx
                .iter()
                .zip(&index_shift)
                .map(|(&g, &s)| g - s)
                .collect();
            if let (Some(vh), Some(vf)) = (sh.value(lam, &gidx), sf.value(lam, &shifted)) {
                deviation = deviation.max((vh - vf).abs());
            }
        }
    }
    let signal_distance = h.aligned_distance(&f)?;
    Ok(AliasingDemo {
        f,
        h,
        xi,
        index_shift,
        max_sample_deviation: deviation / peak.max(f64::MIN_POSITIVE),
        signal_distance,
    })
}

fn default_bump(k: &CompactBox) -> Result<GridField> {
    let d = k.dim();
    let center = k.center();
    let widths = k.widths();
    let mut origin = Vec::with_capacity(d);
    let mut spacing = Vec::with_capacity(d);
    let mut shape = Vec::with_capacity(d);
    for j in 0..d {
        spacing.push(widths[j] / 128.0);
        origin.push(k.lo[j]);
        shape.push(129);
    }
    let geom = GridGeometry::new(origin, spacing, shape)?;
    Ok(GridField::from_fn(geom, |t| {
        let q: f64 = t
            .iter()
            .zip(&center)
            .zip(&widths)
            .map(|((&x, &c), &w)| {
                let s = w / 6.0;
                (x - c) * (x - c) / (s * s)
            })
            .sum();
        Complex64::new((-0.5 * q).exp(), 0.0)
    }))
}
