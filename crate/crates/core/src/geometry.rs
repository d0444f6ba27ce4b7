//! Lattices, compact boxes and countable sampling sets.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * lattices are `A·ℤᵈ` with the generator in column convention;
//! * the fundamental domain of a lattice is the centered half-open cell
//!   `A·[-1/2, 1/2)ᵈ`;
//! * compact sets are modeled as axis-aligned boxes only, which makes the
//!   difference set `K-K` and cell containment exact;
//! * countable sets enumerate deterministically: lattices by increasing
//!   `ℓ∞` index shells (lexicographic within a shell), primes by magnitude,
//!   so `horizon` arguments are reproducible.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative determinant floor: a generator is rejected when its smallest
/// singular value is below `EPS_DET * largest`.
pub const EPS_DET: f64 = 1e-10;

/// Containment slack for the half-open cell test: a corner is inside when
/// every cell coordinate satisfies `|c| < 1/2 - CELL_TOL` (strict interior;
/// boundary cases are measure-zero and numerically unstable).
pub const CELL_TOL: f64 = 1e-12;

/// Full-rank lattice `A·ℤᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    generator: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

/// Serialized form: `{"dim": d, "generator": [[...]]}`, row-major rows.
#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    dim: usize,
    generator: Vec<Vec<f64>>,
}

impl Serialize for Lattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let rows = (0..d)
            .map(|i| (0..d).map(|j| self.generator[(i, j)]).collect())
            .collect();
        LatticeRepr {
            dim: d,
            generator: rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LatticeRepr::deserialize(d)?;
        let rows = repr.generator;
        if rows.len() != repr.dim || rows.iter().any(|r| r.len() != repr.dim) {
            return Err(serde::de::Error::custom("generator must be dim x dim"));
        }
        let m = DMatrix::from_fn(repr.dim, repr.dim, |i, j| rows[i][j]);
        Lattice::new(m).map_err(serde::de::Error::custom)
    }
}

impl Lattice {
    /// Build a lattice from its generating matrix, rejecting near-singular
    /// generators (`σ_min <= EPS_DET · σ_max`).
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        if generator.nrows() != generator.ncols() || generator.nrows() == 0 {
            return Err(Error::Dim(format!(
                "generator must be square and non-empty, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        let svd = generator.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smax > 0.0) || smin <= EPS_DET * smax {
            return Err(Error::SingularLattice(format!(
                "singular values range [{smin:.3e}, {smax:.3e}]"
            )));
        }
        let inverse = generator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularLattice("generator not invertible".into()))?;
        Ok(Self { generator, inverse })
    }

    /// Diagonal lattice `diag(a) ℤᵈ`.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                diag[i]
            } else {
                0.0
            }
        }))
    }

    /// 1-D lattice `aℤ`.
    pub fn scaled_integers(a: f64) -> Result<Self> {
        Self::diagonal(&[a])
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// `vol(Λ) = |det A|`, the measure of a fundamental domain.
    pub fn volume(&self) -> f64 {
        self.generator.determinant().abs()
    }

    /// `D(Λ) = 1 / vol(Λ)`.
    pub fn density(&self) -> f64 {
        1.0 / self.volume()
    }

    /// Reciprocal lattice `Λ* = A⁻ᵀ ℤᵈ`, so that `γ·λ ∈ ℤ` for all pairs.
    pub fn reciprocal(&self) -> Result<Lattice> {
        Lattice::new(self.inverse.transpose())
    }

    /// Lattice point for an integer index vector.
    pub fn point(&self, index: &[i64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..d {
                *o += self.generator[(i, j)] * index[j] as f64;
            }
        }
        out
    }

    /// Coordinates of `x` in the lattice basis, `A⁻¹ x`.
    pub fn cell_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..d {
                *o += self.inverse[(i, j)] * x[j];
            }
        }
        out
    }

    /// Diagonal entries when the generator is diagonal (within `tol` relative
    /// to the largest entry); `None` otherwise.
    pub fn as_diagonal(&self, tol: f64) -> Option<Vec<f64>> {
        let d = self.dim();
        let scale = self.generator.amax();
        for i in 0..d {
            for j in 0..d {
                if i != j && self.generator[(i, j)].abs() > tol * scale {
                    return None;
                }
            }
        }
        Some((0..d).map(|i| self.generator[(i, i)]).collect())
    }

    /// Integer index vectors of the first `count` lattice points, ordered by
    /// increasing `ℓ∞` shell and lexicographically within each shell.
    pub fn enumerate_indices(&self, count: usize) -> Vec<Vec<i64>> {
        let d = self.dim();
        let mut out = Vec::with_capacity(count);
        let mut shell: i64 = 0;
        while out.len() < count {
            for idx in shell_indices(d, shell) {
                out.push(idx);
                if out.len() == count {
                    break;
                }
            }
            shell += 1;
        }
        out
    }

    /// Smallest singular value of the generator; lower-bounds the distance
    /// between distinct lattice points per unit index difference.
    pub fn sigma_min(&self) -> f64 {
        self.generator.clone().svd(false, false).singular_values.min()
    }
}

/// All integer vectors with `‖n‖_∞ == shell`, lexicographically ordered.
/// Boundary points are generated directly (no interior scan), so huge 1-D
/// horizons stay linear.
fn shell_indices(dim: usize, shell: i64) -> Vec<Vec<i64>> {
    if shell == 0 {
        return vec![vec![0; dim]];
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(dim);
    fn rec(dim: usize, shell: i64, pinned: bool, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == dim {
            if pinned {
                out.push(cur.clone());
            }
            return;
        }
        let last_axis = cur.len() + 1 == dim;
        if last_axis && !pinned {
            for c in [-shell, shell] {
                cur.push(c);
                rec(dim, shell, true, cur, out);
                cur.pop();
            }
        } else {
            for c in -shell..=shell {
                cur.push(c);
                rec(dim, shell, pinned || c.abs() == shell, cur, out);
                cur.pop();
            }
        }
    }
    rec(dim, shell, false, &mut cur, &mut out);
    out
}

/// Axis-aligned box model of a compact set `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl CompactBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Dim(format!(
                "box bounds disagree: {}d vs {}d",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().zip(&hi).any(|(&l, &h)| !(l < h)) {
            return Err(Error::Domain("box requires lo[j] < hi[j]".into()));
        }
        Ok(Self { lo, hi })
    }

    /// Centered cube `[-kappa, kappa]^d`.
    pub fn centered_cube(kappa: f64, dim: usize) -> Result<Self> {
        Self::new(vec![-kappa; dim], vec![kappa; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// `ℓ∞` diameter, `max_j (hi[j] - lo[j])`.
    pub fn diam_inf(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| h - l)
            .fold(0.0, f64::max)
    }

    /// Difference set `K - K` (contains the origin).
    pub fn difference(&self) -> CompactBox {
        let lo = self.lo.iter().zip(&self.hi).map(|(&l, &h)| l - h).collect();
        let hi = self.hi.iter().zip(&self.lo).map(|(&h, &l)| h - l).collect();
        CompactBox { lo, hi }
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| v >= l && v <= h)
    }

    pub fn contains_box(&self, other: &CompactBox) -> bool {
        other
            .lo
            .iter()
            .zip(&self.lo)
            .all(|(&ol, &sl)| ol >= sl)
            && other.hi.iter().zip(&self.hi).all(|(&oh, &sh)| oh <= sh)
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| h - l).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| 0.5 * (l + h))
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.widths().iter().product()
    }

    /// The `2^d` corner points.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..(1usize << d))
            .map(|mask| {
                (0..d)
                    .map(|j| {
                        if mask >> j & 1 == 1 {
                            self.hi[j]
                        } else {
                            self.lo[j]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Tests `box ⊆ A·[-1/2, 1/2)ᵈ`, the centered fundamental cell of `lat`.
///
/// Decided exactly for boxes by mapping corners through `A⁻¹`; a corner
/// coordinate must satisfy `|c| < 1/2 - CELL_TOL` (strict interior).
pub fn fundamental_domain_contains(lat: &Lattice, bx: &CompactBox) -> Result<bool> {
    Ok(fundamental_domain_margin(lat, bx)? > 0.0)
}

/// Signed slack of the containment test: the minimum over corners and axes of
/// `(1/2 - CELL_TOL) - |c|` in cell coordinates. Positive iff contained.
pub fn fundamental_domain_margin(lat: &Lattice, bx: &CompactBox) -> Result<f64> {
    if lat.dim() != bx.dim() {
        return Err(Error::Dim(format!(
            "lattice is {}d, box is {}d",
            lat.dim(),
            bx.dim()
        )));
    }
    let mut margin = f64::INFINITY;
    for corner in bx.corners() {
        for c in lat.cell_coordinates(&corner) {
            margin = margin.min(0.5 - CELL_TOL - c.abs());
        }
    }
    Ok(margin)
}

/// Countable sampling set: lattice, arithmetic/geometric progression, the
/// primes, or an explicit point list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountableSet {
    Lattice { lattice: Lattice },
    /// `{a + b·n : n ∈ ℕ₀}` on the line, `b > 0`.
    Arithmetic { a: f64, b: f64 },
    /// `{scale · qⁿ : n ∈ ℕ₀}` on the line, `q > 1`.
    Geometric { q: f64, scale: f64 },
    /// `{scale · p : p prime}` by magnitude.
    Primes { scale: f64 },
    Explicit { points: Vec<Vec<f64>> },
}

impl CountableSet {
    pub fn lattice(lattice: Lattice) -> Self {
        CountableSet::Lattice { lattice }
    }

    pub fn arithmetic(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain("arithmetic step must be positive".into()));
        }
        Ok(CountableSet::Arithmetic { a, b })
    }

    pub fn geometric(q: f64, scale: f64) -> Result<Self> {
        if !(q > 1.0) || !(scale > 0.0) {
            return Err(Error::Domain("geometric set requires q > 1, scale > 0".into()));
        }
        Ok(CountableSet::Geometric { q, scale })
    }

    pub fn primes(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Domain("prime scale must be positive".into()));
        }
        Ok(CountableSet::Primes { scale })
    }

    pub fn explicit(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::TooFewPoints("explicit set is empty".into()));
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::Dim("explicit points disagree in dimension".into()));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::Domain(format!(
                        "duplicate explicit point at positions {i} and {j}"
                    )));
                }
            }
        }
        Ok(CountableSet::Explicit { points })
    }

    pub fn dim(&self) -> usize {
        match self {
            CountableSet::Lattice { lattice } => lattice.dim(),
            CountableSet::Arithmetic { .. }
            | CountableSet::Geometric { .. }
            | CountableSet::Primes { .. } => 1,
            CountableSet::Explicit { points } => points[0].len(),
        }
    }

    /// First `count` points in the documented enumeration order. Explicit
    /// sets may return fewer points than requested.
    pub fn enumerate(&self, count: usize) -> Vec<Vec<f64>> {
        match self {
            CountableSet::Lattice { lattice } => lattice
                .enumerate_indices(count)
                .iter()
                .map(|idx| lattice.point(idx))
                .collect(),
            CountableSet::Arithmetic { a, b } => {
                (0..count).map(|n| vec![a + b * n as f64]).collect()
            }
            CountableSet::Geometric { q, scale } => {
                (0..count).map(|n| vec![scale * q.powi(n as i32)]).collect()
            }
            CountableSet::Primes { scale } => first_primes(count)
                .into_iter()
                .map(|p| vec![scale * p as f64])
                .collect(),
            CountableSet::Explicit { points } => {
                points.iter().take(count).cloned().collect()
            }
        }
    }

    /// Minimum pairwise `ℓ²` distance among the first `horizon` points.
    pub fn separation(&self, horizon: usize) -> Result<f64> {
        let pts = self.enumerate(horizon);
        if pts.len() < 2 {
            return Err(Error::TooFewPoints(format!(
                "separation needs at least 2 points, have {}",
                pts.len()
            )));
        }
        let mut min = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d2: f64 = pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(&u, &v)| (u - v) * (u - v))
                    .sum();
                min = min.min(d2.sqrt());
            }
        }
        Ok(min)
    }

    /// `#(S ∩ B_r(0)) / vol(B_r(0))` with the open `ℓ²` ball.
    pub fn density_estimate(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::Domain("density radius must be positive".into()));
        }
        let count = self.count_within(radius, Norm::L2)? as f64;
        Ok(count / ball_volume(self.dim(), radius))
    }

    /// `#(S ∩ (-r, r)^d) / (2r)^d`, the cube-window estimator used by the
    /// upper density `D⁺`.
    pub fn density_estimate_cube(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::Domain("density radius must be positive".into()));
        }
        let count = self.count_within(radius, Norm::LInf)? as f64;
        Ok(count / (2.0 * radius).powi(self.dim() as i32))
    }

    fn count_within(&self, radius: f64, norm: Norm) -> Result<usize> {
        let inside = |p: &[f64]| -> bool {
            match norm {
                Norm::L2 => p.iter().map(|&x| x * x).sum::<f64>().sqrt() < radius,
                Norm::LInf => p.iter().all(|&x| x.abs() < radius),
            }
        };
        match self {
            CountableSet::Lattice { lattice } => {
                // ‖A n‖ >= sigma_min ‖n‖, so indices beyond radius/sigma_min
                // cannot reach the ball.
                let bound = (radius / lattice.sigma_min()).ceil() as i64;
                let d = lattice.dim();
                let mut count = 0usize;
                let mut idx = vec![-bound; d];
                loop {
                    if inside(&lattice.point(&idx)) {
                        count += 1;
                    }
                    let mut axis = d;
                    loop {
                        if axis == 0 {
                            return Ok(count);
                        }
                        axis -= 1;
                        idx[axis] += 1;
                        if idx[axis] <= bound {
                            break;
                        }
                        idx[axis] = -bound;
                    }
                }
            }
            CountableSet::Arithmetic { a, b } => {
                // a + b n in (-r, r)  <=>  (-r - a)/b < n < (r - a)/b
                let lo = ((-radius - a) / b).floor() as i64 + 1;
                let hi = ((radius - a) / b).ceil() as i64 - 1;
                let lo = lo.max(0);
                Ok(if hi >= lo { (hi - lo + 1) as usize } else { 0 })
            }
            CountableSet::Geometric { q, scale } => {
                let mut n = 0usize;
                let mut v = *scale;
                while v < radius {
                    n += 1;
                    v *= q;
                    if n > 4096 {
                        break;
                    }
                }
                Ok(n)
            }
            CountableSet::Primes { scale } => {
                let limit = radius / scale;
                if limit <= 2.0 {
                    return Ok(0);
                }
                Ok(sieve_count_below(limit))
            }
            CountableSet::Explicit { points } => {
                Ok(points.iter().filter(|p| inside(p)).count())
            }
        }
    }
}

enum Norm {
    L2,
    LInf,
}

/// Volume of the `ℓ²` ball of radius `r` in dimension `d` (d <= 3 suffices
/// for the shipped sets; general d uses the Gamma recursion).
fn ball_volume(d: usize, r: f64) -> f64 {
    // V_d = pi^{d/2} / Gamma(d/2 + 1) * r^d via V_d = V_{d-2} * 2 pi / d
    let mut v = match d % 2 {
        0 => 1.0,
        _ => 2.0 * r,
    };
    let mut k = if d % 2 == 0 { 0 } else { 1 };
    while k + 2 <= d {
        k += 2;
        v *= 2.0 * std::f64::consts::PI * r * r / k as f64;
    }
    v
}

/// First `count` primes by magnitude.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n <= n (ln n + ln ln n) for n >= 6; grow the sieve if the bound is shy.
    let mut limit = if count < 6 {
        16
    } else {
        let n = count as f64;
        (n * (n.ln() + n.ln().ln())).ceil() as usize + 16
    };
    loop {
        let primes = sieve_below(limit);
        if primes.len() >= count {
            return primes[..count].to_vec();
        }
        limit *= 2;
    }
}

/// Number of primes strictly below `limit`.
pub fn sieve_count_below(limit: f64) -> usize {
    if limit <= 2.0 {
        return 0;
    }
    sieve_below(limit.ceil() as usize).len()
}

fn sieve_below(limit: usize) -> Vec<u64> {
    let mut is_comp = vec![false; limit];
    let mut primes = Vec::new();
    for n in 2..limit {
        if !is_comp[n] {
            primes.push(n as u64);
            let mut m = n * n;
            while m < limit {
                is_comp[m] = true;
                m += n;
            }
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    #[test]
    fn reciprocal_of_scaled_integers() {
        // (a Z)* = (1/a) Z
        let lat = Lattice::scaled_integers(0.5).unwrap();
        let rec = lat.reciprocal().unwrap();
        assert_relative_eq!(rec.generator()[(0, 0)], 2.0, max_relative = 1e-15);
        // Z^d self-dual
        let id = Lattice::diagonal(&[1.0, 1.0]).unwrap();
        let rec = id.reciprocal().unwrap();
        assert_relative_eq!(rec.generator()[(0, 0)], 1.0);
        assert_relative_eq!(rec.generator()[(1, 1)], 1.0);
    }

    #[test]
    fn reciprocal_shear_by_hand() {
        // A = [[1,1],[0,1]] => A^{-T} = [[1,0],[-1,1]]
        let lat = Lattice::new(dmatrix![1.0, 1.0; 0.0, 1.0]).unwrap();
        let rec = lat.reciprocal().unwrap();
        let expected = dmatrix![1.0, 0.0; -1.0, 1.0];
        assert!((rec.generator() - &expected).amax() < 1e-14);
        // gamma . lambda integral on a 5x5 index window
        for idx_a in lat.enumerate_indices(121) {
            let p = lat.point(&idx_a);
            for idx_b in rec.enumerate_indices(121) {
                let q = rec.point(&idx_b);
                let dot: f64 = p.iter().zip(&q).map(|(&u, &v)| u * v).sum();
                assert!((dot - dot.round()).abs() < 1e-12, "non-integral pairing {dot}");
            }
        }
    }

    #[test]
    fn reciprocal_is_involutive_on_diagonals() {
        let lat = Lattice::diagonal(&[0.4, 2.5]).unwrap();
        let back = lat.reciprocal().unwrap().reciprocal().unwrap();
        assert!((back.generator() - lat.generator()).amax() < 1e-12);
    }

    #[test]
    fn volume_duality() {
        let gens = [
            dmatrix![0.5, 0.1; 0.0, 3.0],
            dmatrix![2.0, 0.0; 0.7, 0.9],
            dmatrix![1.0, 0.3; -0.2, 1.4],
        ];
        for g in gens {
            let lat = Lattice::new(g).unwrap();
            let rec = lat.reciprocal().unwrap();
            assert_relative_eq!(lat.volume() * rec.volume(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn near_singular_generator_rejected() {
        let m = dmatrix![1.0, 1.0; 1.0, 1.0 + 1e-14];
        assert!(matches!(Lattice::new(m), Err(Error::SingularLattice(_))));
    }

    #[test]
    fn cell_containment_examples() {
        // cell [-2, 2) contains [-1, 1]
        let lat = Lattice::scaled_integers(4.0).unwrap();
        let bx = CompactBox::new(vec![-1.0], vec![1.0]).unwrap();
        assert!(fundamental_domain_contains(&lat, &bx).unwrap());
        // cell [-0.5, 0.5) does not contain [-1, 1]
        let lat = Lattice::scaled_integers(1.0).unwrap();
        assert!(!fundamental_domain_contains(&lat, &bx).unwrap());
    }

    #[test]
    fn cell_containment_difference_threshold() {
        // K = [-1,1], K-K = [-2,2]; cell of (1/c)Z has width 1/c, so the
        // test passes iff 4 < 1/c, i.e. c < 1/4.
        let k = CompactBox::new(vec![-1.0], vec![1.0]).unwrap();
        let diff = k.difference();
        assert_eq!(diff.lo, vec![-2.0]);
        assert_eq!(diff.hi, vec![2.0]);
        let pass = Lattice::scaled_integers(1.0 / 0.2).unwrap();
        assert!(fundamental_domain_contains(&pass, &diff).unwrap());
        let fail = Lattice::scaled_integers(1.0 / 0.26).unwrap();
        assert!(!fundamental_domain_contains(&fail, &diff).unwrap());
    }

    #[test]
    fn containment_monotone_under_shrinking() {
        let lat = Lattice::diagonal(&[4.0, 5.0]).unwrap();
        let outer = CompactBox::new(vec![-1.5, -2.0], vec![1.5, 2.0]).unwrap();
        let inner = CompactBox::new(vec![-1.0, -0.5], vec![0.5, 1.0]).unwrap();
        assert!(outer.contains_box(&inner));
        assert!(fundamental_domain_contains(&lat, &outer).unwrap());
        assert!(fundamental_domain_contains(&lat, &inner).unwrap());
    }

    #[test]
    fn diam_inf_matches_box_widths() {
        let bx = CompactBox::new(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap();
        assert_relative_eq!(bx.diam_inf(), 2.0);
        assert!(bx.difference().contains_point(&[0.0, 0.0]));
    }

    #[test]
    fn integer_density_is_one() {
        let set = CountableSet::lattice(Lattice::scaled_integers(1.0).unwrap());
        assert_relative_eq!(set.density_estimate(100.5).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn prime_density_at_ten_thousand() {
        // independent sieve oracle: pi(10^4) = 1229
        let mut count = 0;
        let mut is_comp = vec![false; 10_000];
        for n in 2..10_000usize {
            if !is_comp[n] {
                count += 1;
                let mut m = n * n;
                while m < 10_000 {
                    is_comp[m] = true;
                    m += n;
                }
            }
        }
        assert_eq!(count, 1229);

        let set = CountableSet::primes(1.0).unwrap();
        let d = set.density_estimate(1e4).unwrap();
        assert_relative_eq!(d, 1229.0 / 2e4, max_relative = 1e-12);
        // decreasing in radius
        assert!(set.density_estimate(2e4).unwrap() < d);
    }

    #[test]
    fn geometric_density_counts_powers() {
        let set = CountableSet::geometric(2.0, 1.0).unwrap();
        let d = set.density_estimate(1024.0).unwrap();
        assert!(d <= 11.0 / 2048.0);
    }

    #[test]
    fn lattice_density_converges() {
        // |estimate(r) - 1/|det A|| <= C / r with C fitted at r = 10
        let set = CountableSet::lattice(Lattice::scaled_integers(0.5).unwrap());
        let target = 2.0;
        let c = (set.density_estimate(10.0).unwrap() - target).abs() * 10.0 + 0.5;
        for r in [10.0, 100.0, 1000.0] {
            let err = (set.density_estimate(r).unwrap() - target).abs();
            assert!(err <= c / r, "density error {err} exceeds {}/{r}", c);
        }
    }

    #[test]
    fn separation_examples() {
        let lat2 = CountableSet::lattice(Lattice::diagonal(&[0.5, 0.5]).unwrap());
        assert_relative_eq!(lat2.separation(9).unwrap(), 0.5);

        // min gap among the first 100 primes is 1 (between 2 and 3)
        let primes = CountableSet::primes(1.0).unwrap();
        let brute = {
            let pts = primes.enumerate(100);
            let mut min = f64::INFINITY;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    min = min.min((pts[i][0] - pts[j][0]).abs());
                }
            }
            min
        };
        assert_relative_eq!(brute, 1.0);
        assert_relative_eq!(primes.separation(100).unwrap(), 1.0);

        let explicit =
            CountableSet::explicit(vec![vec![0.0], vec![3.0], vec![3.5]]).unwrap();
        assert_relative_eq!(explicit.separation(3).unwrap(), 0.5);
        assert!(matches!(
            CountableSet::explicit(vec![vec![1.0]]).unwrap().separation(5),
            Err(Error::TooFewPoints(_))
        ));
    }

    #[test]
    fn lattice_enumeration_is_shell_ordered() {
        let lat = Lattice::scaled_integers(0.25).unwrap();
        let pts: Vec<f64> = CountableSet::lattice(lat)
            .enumerate(5)
            .iter()
            .map(|p| p[0])
            .collect();
        assert_eq!(pts, vec![0.0, -0.25, 0.25, -0.5, 0.5]);
    }

    #[test]
    fn explicit_duplicates_rejected() {
        assert!(CountableSet::explicit(vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn lattice_serde_roundtrip() {
        let lat = Lattice::new(dmatrix![1.0, 1.0; 0.0, 1.0]).unwrap();
        let json = serde_json::to_string(&lat).unwrap();
        assert!(json.contains("\"generator\""));
        let back: Lattice = serde_json::from_str(&json).unwrap();
        assert_eq!(back, lat);
    }
}
