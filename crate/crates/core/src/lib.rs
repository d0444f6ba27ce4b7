//! Numerics for phaseless sampling of the short-time Fourier transform.
//!
//! The library turns uniqueness theory for spectrogram sampling into an
//! executable pipeline:
//!
//! * [`geometry`] — lattices, reciprocal lattices, compact boxes and the
//!   set-geometric predicates the sampling theorems quantify over;
//! * [`windows`] — Gaussian, Hermite, Airy-disk and band-limited window
//!   functions together with their growth metadata;
//! * [`transforms`] — a discretized continuous Fourier transform with fixed
//!   conventions (`e^{-2πiω·t}`, no prefactor), the STFT, and spectrogram
//!   sampling on `Λ × Γ`;
//! * [`paley_wiener`] — lattice Shannon interpolation, band-limit projection
//!   and the zero-flipping non-uniqueness demo;
//! * [`uniqueness`] — decidable gates (Carlson, Ronkin, Zalik, the Gaussian
//!   semigroup exemption, and the `Γ*`-cell condition);
//! * [`recovery`] — the constructive phase-retrieval pipeline: interpolate
//!   spectrogram slices over `Γ`, Fourier-transform each slice to translate
//!   measurements, invert the translate system per frequency offset, and
//!   assemble the signal up to a global phase.
//!
//! All numerics are `f64` / `Complex64`; serialized fields are IEEE-754
//! doubles (`c128` for complex grids).

pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod paley_wiener;
pub mod recovery;
pub mod transforms;
pub mod uniqueness;
pub mod windows;

pub use error::{Error, Result};
pub use geometry::{CompactBox, CountableSet, Lattice};
pub use grid::{GridField, GridGeometry};
pub use recovery::{RecoveryConfig, RecoveryReport};
pub use transforms::SpectrogramSamples;
pub use uniqueness::GateReport;
pub use windows::WindowSpec;

/// Complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;
