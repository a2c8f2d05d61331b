//! Oblivious subspace embeddings.
//!
//! A [`SketchOperator`] is a random linear map `Ω: R^n -> R^d` with `d < n` that
//! approximately preserves the geometry of any low-dimensional subspace. Three
//! families are provided (dense Gaussian, subsampled randomized Hadamard, sparse
//! sign) plus an identity map used to check that the randomized algorithms
//! degenerate to their deterministic counterparts.
//!
//! All randomness is drawn from ChaCha8 streams keyed by `(seed, kind)` with the
//! stream number selecting a row (Gaussian) or a column (sparse sign), so any
//! part of the operator can be regenerated independently and the map is
//! bit-reproducible across platforms. Application always sums in a fixed order.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of nonzeros per column of a sparse sign sketch.
pub const DEFAULT_ZETA: usize = 8;

/// Dense Gaussian sketches larger than this are regenerated row by row on every application.
pub const DEFAULT_GAUSSIAN_BUDGET_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchKind {
    Gaussian,
    Srht,
    SparseSign,
    /// `Ω = I` with `d = n`. Only meaningful for testing.
    Identity,
}

impl SketchKind {
    fn stream_tag(self) -> u64 {
        match self {
            SketchKind::Gaussian => 0x6761_7573_7369_616e,
            SketchKind::Srht => 0x0000_0000_7372_6874,
            SketchKind::SparseSign => 0x7370_6172_7365_7367,
            SketchKind::Identity => 0,
        }
    }
}

impl std::str::FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(SketchKind::Gaussian),
            "srht" => Ok(SketchKind::Srht),
            "sparse-sign" | "sparsesign" | "sparse_sign" => Ok(SketchKind::SparseSign),
            "identity" => Ok(SketchKind::Identity),
            other => Err(Error::InvalidParameter(format!("unknown sketch kind '{other}'"))),
        }
    }
}

/// Independent ChaCha8 stream for `(seed, kind, stream)`.
pub(crate) fn stream_rng(seed: u64, tag: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(b"rira-osE");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
enum Repr {
    /// Row-major `d x n`, already scaled by `1/sqrt(d)`.
    GaussianDense(Vec<f64>),
    GaussianStream,
    Srht {
        padded: usize,
        signs: Vec<f64>,
        rows: Vec<usize>,
    },
    SparseSign {
        rows: Vec<u32>,
        vals: Vec<f64>,
    },
    Identity,
}

/// An immutable sketching operator `Ω ∈ R^{d×n}`.
#[derive(Debug, Clone)]
pub struct SketchOperator {
    kind: SketchKind,
    n: usize,
    d: usize,
    seed: u64,
    zeta: Option<usize>,
    repr: Repr,
}

/// Builds a sketch with the default Gaussian memory budget.
///
/// `zeta` is only read for [`SketchKind::SparseSign`] and defaults to [`DEFAULT_ZETA`].
pub fn make_sketch(kind: SketchKind, n: usize, d: usize, seed: u64, zeta: Option<usize>) -> Result<SketchOperator> {
    make_sketch_with_budget(kind, n, d, seed, zeta, DEFAULT_GAUSSIAN_BUDGET_BYTES)
}

pub fn make_sketch_with_budget(
    kind: SketchKind,
    n: usize,
    d: usize,
    seed: u64,
    zeta: Option<usize>,
    gaussian_budget_bytes: usize,
) -> Result<SketchOperator> {
    if kind == SketchKind::Identity {
        if d != n {
            return Err(Error::InvalidDimension(format!(
                "identity sketch needs d == n, got d={d}, n={n}"
            )));
        }
        return Ok(SketchOperator::identity(n));
    }
    if d == 0 || d >= n {
        return Err(Error::InvalidDimension(format!(
            "sketch dimension must satisfy 0 < d < n, got d={d}, n={n}"
        )));
    }
    let tag = kind.stream_tag();
    let (repr, zeta) = match kind {
        SketchKind::Gaussian => {
            let scale = 1.0 / (d as f64).sqrt();
            let bytes = d.saturating_mul(n).saturating_mul(std::mem::size_of::<f64>());
            if bytes <= gaussian_budget_bytes {
                let mut g = Vec::with_capacity(d * n);
                for i in 0..d {
                    let mut rng = stream_rng(seed, tag, i as u64);
                    g.extend((0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)));
                }
                (Repr::GaussianDense(g), None)
            } else {
                (Repr::GaussianStream, None)
            }
        }
        SketchKind::Srht => {
            let padded = n.next_power_of_two();
            let mut rng = stream_rng(seed, tag, 0);
            let signs = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            let mut rng = stream_rng(seed, tag, 1);
            let mut rows = index::sample(&mut rng, padded, d).into_vec();
            rows.sort_unstable();
            (Repr::Srht { padded, signs, rows }, None)
        }
        SketchKind::SparseSign => {
            let zeta = zeta.unwrap_or(DEFAULT_ZETA);
            if zeta == 0 || zeta > d {
                return Err(Error::InvalidParameter(format!(
                    "sparse sign needs 1 <= zeta <= d, got zeta={zeta}, d={d}"
                )));
            }
            let mag = 1.0 / (zeta as f64).sqrt();
            let mut rows = Vec::with_capacity(n * zeta);
            let mut vals = Vec::with_capacity(n * zeta);
            for j in 0..n {
                let mut rng = stream_rng(seed, tag, j as u64);
                let mut picked = index::sample(&mut rng, d, zeta).into_vec();
                picked.sort_unstable();
                for r in picked {
                    rows.push(r as u32);
                    vals.push(if rng.random::<bool>() { mag } else { -mag });
                }
            }
            (Repr::SparseSign { rows, vals }, Some(zeta))
        }
        SketchKind::Identity => unreachable!(),
    };
    Ok(SketchOperator {
        kind,
        n,
        d,
        seed,
        zeta,
        repr,
    })
}

impl SketchOperator {
    /// The exact embedding `Ω = I_n`.
    pub fn identity(n: usize) -> Self {
        SketchOperator {
            kind: SketchKind::Identity,
            n,
            d: n,
            seed: 0,
            zeta: None,
            repr: Repr::Identity,
        }
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sketch dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn zeta(&self) -> Option<usize> {
        self.zeta
    }

    /// Padded transform length for SRHT.
    pub fn padded_len(&self) -> Option<usize> {
        match &self.repr {
            Repr::Srht { padded, .. } => Some(*padded),
            _ => None,
        }
    }

    pub fn is_streaming(&self) -> bool {
        matches!(self.repr, Repr::GaussianStream)
    }

    /// Returns `Ωx`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.d];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    /// Writes `Ωx` into `out`, which must have length `d`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if out.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: out.len(),
            });
        }
        match &self.repr {
            Repr::Identity => out.copy_from_slice(x),
            Repr::GaussianDense(g) => {
                for (o, row) in out.iter_mut().zip(g.chunks_exact(self.n)) {
                    *o = dot(row, x);
                }
            }
            Repr::GaussianStream => {
                let tag = self.kind.stream_tag();
                let scale = 1.0 / (self.d as f64).sqrt();
                for (i, o) in out.iter_mut().enumerate() {
                    let mut rng = stream_rng(self.seed, tag, i as u64);
                    let mut acc = 0.0;
                    for &xj in x {
                        acc += scale * rng.sample::<f64, _>(StandardNormal) * xj;
                    }
                    *o = acc;
                }
            }
            Repr::Srht { padded, signs, rows } => {
                let mut buf = vec![0.0; *padded];
                for ((b, &s), &xi) in buf.iter_mut().zip(signs).zip(x) {
                    *b = s * xi;
                }
                fwht(&mut buf);
                // sqrt(padded/d) * (1/sqrt(padded)) from the orthonormal Hadamard
                let scale = 1.0 / (self.d as f64).sqrt();
                for (o, &r) in out.iter_mut().zip(rows) {
                    *o = scale * buf[r];
                }
            }
            Repr::SparseSign { rows, vals } => {
                let zeta = self.zeta.unwrap_or(DEFAULT_ZETA);
                out.iter_mut().for_each(|o| *o = 0.0);
                for (j, &xj) in x.iter().enumerate() {
                    let span = j * zeta..(j + 1) * zeta;
                    for (&r, &v) in rows[span.clone()].iter().zip(&vals[span]) {
                        out[r as usize] += v * xj;
                    }
                }
            }
        }
        Ok(())
    }

    /// Sketches every column of `v` (`n x k`), returning `d x k`.
    pub fn apply_columns(&self, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if v.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.nrows(),
            });
        }
        let mut out = DMatrix::zeros(self.d, v.ncols());
        for j in 0..v.ncols() {
            let col = v.column(j);
            let mut o = out.column_mut(j);
            self.apply_into(col.as_slice(), o.as_mut_slice())?;
        }
        Ok(out)
    }

    /// Dense `d x n` matrix of the operator. Intended for small sizes.
    pub fn materialize(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.n);
        let mut e = vec![0.0; self.n];
        for j in 0..self.n {
            e[j] = 1.0;
            let mut col = m.column_mut(j);
            self.apply_into(&e, col.as_mut_slice())
                .expect("dimensions are consistent by construction");
            e[j] = 0.0;
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place unnormalized fast Walsh–Hadamard transform. `buf.len()` must be a power of two.
pub(crate) fn fwht(buf: &mut [f64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Smallest `ε` with `(1-ε)‖x‖² ≤ ‖Ωx‖² ≤ (1+ε)‖x‖²` on `span(V)`.
///
/// `V` is first orthonormalized with a Householder QR, so the result only depends
/// on the column space. The value is returned even when it exceeds 1, in which
/// case `Ω` is not an embedding for that subspace in the usual sense.
pub fn measure_embedding(op: &SketchOperator, v: &DMatrix<f64>) -> Result<f64> {
    if v.nrows() != op.n() {
        return Err(Error::DimensionMismatch {
            expected: op.n(),
            got: v.nrows(),
        });
    }
    let k = v.ncols();
    if k == 0 {
        return Err(Error::RankDeficient("empty basis".into()));
    }
    let qr = v.clone().qr();
    let r = qr.r();
    let rmax = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let rmin = (0..k).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if rmax == 0.0 || rmin <= (v.nrows() as f64) * f64::EPSILON * rmax {
        return Err(Error::RankDeficient(format!(
            "basis of {k} columns is numerically rank deficient"
        )));
    }
    let q = qr.q();
    let sq = op.apply_columns(&q)?;
    let sv = sq.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    Ok((smax * smax - 1.0).max(1.0 - smin * smin).max(0.0))
}
