//! File formats: GFLD1 grid fields and SPEC1 spectrogram samples.
//!
//! GFLD1: one JSON header line
//! `{"magic":"GFLD1","dim":d,"origin":[...],"spacing":[...],"shape":[...],"dtype":"c128"}`
//! terminated by `\n`, followed by raw little-endian interleaved `(re, im)`
//! float64 pairs in row-major order.
//!
//! SPEC1: one JSON header line carrying the window spec, `Λ` descriptor and
//! horizon, `Γ` generator and index window, and the declared support box,
//! followed by CSV rows `λ_index, γ_index..., value`.

use std::io::{BufRead, Write};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CompactBox, CountableSet, Lattice};
use crate::grid::{GridField, GridGeometry};
use crate::transforms::{GammaWindow, SpectrogramSamples};
use crate::windows::WindowSpec;
use crate::Complex64;

#[derive(Serialize, Deserialize)]
struct GfldHeader {
    magic: String,
    dim: usize,
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    dtype: String,
}

/// Write a grid field in GFLD1 format.
pub fn write_gfld<W: Write>(mut out: W, field: &GridField) -> Result<()> {
    let geom = field.geometry();
    let header = GfldHeader {
        magic: "GFLD1".into(),
        dim: geom.dim(),
        origin: geom.origin.clone(),
        spacing: geom.spacing.clone(),
        shape: geom.shape.clone(),
        dtype: "c128".into(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(field.len() * 16);
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Read a GFLD1 grid field.
pub fn read_gfld<R: BufRead>(mut input: R) -> Result<GridField> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: GfldHeader = serde_json::from_str(line.trim_end())?;
    if header.magic != "GFLD1" {
        return Err(Error::Format(format!("bad magic {:?}", header.magic)));
    }
    if header.dtype != "c128" {
        return Err(Error::Format(format!("unsupported dtype {:?}", header.dtype)));
    }
    let geom = GridGeometry::new(header.origin, header.spacing, header.shape)?;
    let n = geom.len();
    let mut bytes = vec![0u8; n * 16];
    input.read_exact(&mut bytes)?;
    let mut values = Vec::with_capacity(n);
    for chunk in bytes.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    GridField::new(geom, values)
}

pub fn write_gfld_file(path: &std::path::Path, field: &GridField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_gfld(std::io::BufWriter::new(file), field)
}

pub fn read_gfld_file(path: &std::path::Path) -> Result<GridField> {
    let file = std::fs::File::open(path)?;
    read_gfld(std::io::BufReader::new(file))
}

#[derive(Serialize, Deserialize)]
struct SpecHeader {
    magic: String,
    window: WindowSpec,
    lambda_set: CountableSet,
    lambda_horizon: usize,
    gamma: Lattice,
    gamma_window: GammaWindow,
    support: CompactBox,
}

/// Write spectrogram samples in SPEC1 format. Rows are emitted λ-major and
/// γ-lexicographic, so identical samples serialize to identical bytes.
pub fn write_spec<W: Write>(mut out: W, samples: &SpectrogramSamples) -> Result<()> {
    let header = SpecHeader {
        magic: "SPEC1".into(),
        window: samples.window.clone(),
        lambda_set: samples.time_set.clone(),
        lambda_horizon: samples.lambda_horizon,
        gamma: samples.freq_lattice.clone(),
        gamma_window: samples.gamma_window.clone(),
        support: samples.signal_support.clone(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let gamma_indices = samples.gamma_window.indices();
    for lam in 0..samples.lambda_horizon {
        for gidx in &gamma_indices {
            let v = samples.value(lam, gidx).expect("index window is total");
            write!(out, "{lam}")?;
            for g in gidx {
                write!(out, ",{g}")?;
            }
            writeln!(out, ",{v:e}")?;
        }
    }
    Ok(())
}

/// Read a SPEC1 file.
pub fn read_spec<R: BufRead>(mut input: R) -> Result<SpectrogramSamples> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: SpecHeader = serde_json::from_str(line.trim_end())?;
    if header.magic != "SPEC1" {
        return Err(Error::Format(format!("bad magic {:?}", header.magic)));
    }
    let d = header.gamma.dim();
    let gcount = header.gamma_window.count();
    let mut values = vec![f64::NAN; header.lambda_horizon * gcount];
    let mut rows = 0usize;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 2 {
            return Err(Error::Format(format!(
                "expected {} CSV fields, got {}",
                d + 2,
                fields.len()
            )));
        }
        let lam: usize = fields[0]
            .parse()
            .map_err(|e| Error::Format(format!("bad λ index: {e}")))?;
        let mut gidx = Vec::with_capacity(d);
        for f in &fields[1..=d] {
            gidx.push(
                f.parse::<i64>()
                    .map_err(|e| Error::Format(format!("bad γ index: {e}")))?,
            );
        }
        let v: f64 = fields[d + 1]
            .parse()
            .map_err(|e| Error::Format(format!("bad value: {e}")))?;
        let g = header
            .gamma_window
            .flat(&gidx)
            .ok_or_else(|| Error::Format(format!("γ index {gidx:?} outside window")))?;
        if lam >= header.lambda_horizon {
            return Err(Error::Format(format!("λ index {lam} outside horizon")));
        }
        values[lam * gcount + g] = v;
        rows += 1;
    }
    if rows != header.lambda_horizon * gcount || values.iter().any(|v| v.is_nan()) {
        return Err(Error::Format(format!(
            "incomplete sample table: {rows} rows for {} expected",
            header.lambda_horizon * gcount
        )));
    }
    SpectrogramSamples::new(
        header.lambda_set,
        header.lambda_horizon,
        header.gamma,
        header.gamma_window,
        header.support,
        header.window,
        values,
    )
}

pub fn write_spec_file(path: &std::path::Path, samples: &SpectrogramSamples) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_spec(std::io::BufWriter::new(file), samples)
}

pub fn read_spec_file(path: &std::path::Path) -> Result<SpectrogramSamples> {
    let file = std::fs::File::open(path)?;
    read_spec(std::io::BufReader::new(file))
}
