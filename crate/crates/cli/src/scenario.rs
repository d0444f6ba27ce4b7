//! Scenario files: a window, a support box, sampling sets, a synthetic
//! signal and pipeline configuration, all in one JSON document. Every
//! scenario is fully deterministic given its seed; all randomness flows
//! from one seeded generator.

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use phaseless::geometry::{CompactBox, CountableSet, Lattice};
use phaseless::grid::{GridField, GridGeometry};
use phaseless::paley_wiener::bandlimit_project;
use phaseless::recovery::{GatePolicy, RecoveryConfig};
use phaseless::windows::{hermite_value, WindowSpec};
use phaseless::Complex64;

/// Synthetic signal description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    /// `amp · e^{-π Σ ((t_j - c_j)/w_j)²} · e^{2πi m·t}`.
    GaussianBump {
        center: Vec<f64>,
        width: Vec<f64>,
        amplitude: [f64; 2],
        #[serde(default)]
        modulation: Option<Vec<f64>>,
    },
    /// Linear combination of Hermite functions, `Σ c_k ∏_j h_{k_j}`.
    HermiteCombo { terms: Vec<(Vec<u32>, [f64; 2])> },
    /// Seeded white noise, band-limited to `[-band, band]^d` and tapered by
    /// a raised cosine so the support constraint holds.
    RandomBandpass { band: f64 },
    /// Samples from a GFLD1 file (grid must match the scenario grid).
    FromFile { path: String },
}

fn default_svd_tol() -> f64 {
    1e-8
}

fn default_shannon_radius() -> f64 {
    40.0
}

fn default_gate_policy() -> GatePolicy {
    GatePolicy::Enforce
}

fn default_interp_threshold() -> f64 {
    1e-5
}

fn default_solve_threshold() -> f64 {
    1e-3
}

fn default_assembly_threshold() -> f64 {
    1e-2
}

/// Pipeline knobs carried by the scenario; CLI flags take precedence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSpec {
    /// Signal grid spacing over the support box.
    pub grid_spacing: f64,
    /// Optional grid extent; defaults to the support box. A grid wider than
    /// the support exposes signals to the support-violation check.
    #[serde(default)]
    pub grid_box: Option<CompactBox>,
    #[serde(default = "default_svd_tol")]
    pub svd_tol: f64,
    #[serde(default = "default_shannon_radius")]
    pub shannon_radius: f64,
    #[serde(default = "default_gate_policy")]
    pub gate_policy: GatePolicy,
    /// Residual thresholds deciding the `recover` exit code.
    #[serde(default = "default_interp_threshold")]
    pub max_interpolation_residual: f64,
    #[serde(default = "default_solve_threshold")]
    pub max_solve_residual: f64,
    #[serde(default = "default_assembly_threshold")]
    pub max_assembly_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub window: WindowSpec,
    pub support: CompactBox,
    pub lambda_set: CountableSet,
    pub lambda_horizon: usize,
    pub gamma: Lattice,
    pub signal: SignalSpec,
    pub config: ConfigSpec,
    pub seed: u64,
}

impl Scenario {
    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        let s: Scenario =
            serde_json::from_str(&text).with_context(|| "parsing scenario JSON")?;
        Ok(s)
    }

    /// Signal grid covering the grid box (default: the support box) at the
    /// configured spacing.
    pub fn signal_geometry(&self) -> anyhow::Result<GridGeometry> {
        let bx = self.config.grid_box.as_ref().unwrap_or(&self.support);
        let d = bx.dim();
        let mut shape = Vec::with_capacity(d);
        for j in 0..d {
            let steps = (bx.hi[j] - bx.lo[j]) / self.config.grid_spacing;
            if (steps - steps.round()).abs() > 1e-9 {
                bail!(
                    "grid box [{}, {}] is not commensurate with spacing {}",
                    bx.lo[j],
                    bx.hi[j],
                    self.config.grid_spacing
                );
            }
            shape.push(steps.round() as usize + 1);
        }
        Ok(GridGeometry::new(
            bx.lo.clone(),
            vec![self.config.grid_spacing; d],
            shape,
        )?)
    }

    pub fn recovery_config(&self) -> anyhow::Result<RecoveryConfig> {
        let mut cfg = RecoveryConfig::new(
            self.signal_geometry()?,
            self.config.svd_tol,
            self.config.shannon_radius,
        )?;
        cfg.gate_policy = self.config.gate_policy;
        Ok(cfg)
    }

    /// Synthesize the scenario signal on the signal grid.
    pub fn synthesize(&self) -> anyhow::Result<GridField> {
        let geom = self.signal_geometry()?;
        let d = geom.dim();
        Ok(match &self.signal {
            SignalSpec::GaussianBump {
                center,
                width,
                amplitude,
                modulation,
            } => {
                if center.len() != d || width.len() != d {
                    bail!("gaussian bump parameters disagree with dimension {d}");
                }
                let amp = Complex64::new(amplitude[0], amplitude[1]);
                let modu = modulation.clone().unwrap_or_else(|| vec![0.0; d]);
                GridField::from_fn(geom, |t| {
                    let q: f64 = t
                        .iter()
                        .zip(center.iter().zip(width))
                        .map(|(&x, (&c, &w))| ((x - c) / w) * ((x - c) / w))
                        .sum();
                    let phase: f64 = t.iter().zip(&modu).map(|(&a, &b)| a * b).sum();
                    amp * (-std::f64::consts::PI * q).exp()
                        * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
                })
            }
            SignalSpec::HermiteCombo { terms } => {
                if terms.iter().any(|(k, _)| k.len() != d) {
                    bail!("hermite multi-index dimension mismatch");
                }
                GridField::from_fn(geom, |t| {
                    terms
                        .iter()
                        .map(|(k, c)| {
                            let v: f64 = k
                                .iter()
                                .zip(t)
                                .map(|(&n, &x)| hermite_value(n, x))
                                .product();
                            Complex64::new(c[0], c[1]) * v
                        })
                        .sum()
                })
            }
            SignalSpec::RandomBandpass { band } => {
                let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
                let noise = GridField::from_fn(geom.clone(), |_| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let band_box = CompactBox::new(vec![-band; d], vec![*band; d])?;
                let smooth = bandlimit_project(&noise, &band_box)?;
                let center = self.support.center();
                let half: Vec<f64> = self
                    .support
                    .widths()
                    .iter()
                    .map(|&w| 0.5 * w)
                    .collect();
                GridField::from_fn(geom, |t| {
                    let idx = smooth.geometry().snap(t, 1e-9).expect("node");
                    let taper: f64 = t
                        .iter()
                        .zip(center.iter().zip(&half))
                        .map(|(&x, (&c, &h))| {
                            0.5 * (1.0 + (std::f64::consts::PI * (x - c) / h).cos())
                        })
                        .product();
                    smooth.at(&idx) * taper
                })
            }
            SignalSpec::FromFile { path } => {
                let field = phaseless::io::read_gfld_file(std::path::Path::new(path))?;
                if field.geometry() != &geom {
                    bail!("signal file grid does not match the scenario grid");
                }
                field
            }
        })
    }
}
