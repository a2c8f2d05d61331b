//! Sparse matrices: CSR storage, Matrix Market I/O, the matvec kernel and the
//! synthetic test problems.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;

use crate::error::{Error, Result};

/// Seed of the strictly upper part of [`gen_toy_spectrum`].
pub const TOY_SEED: u64 = 0x5EED;

/// Square real matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Validates raw CSR arrays: `row_ptr` non-decreasing with `n + 1` entries,
    /// column indices in range and strictly increasing within each row.
    pub fn from_raw(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, vals: Vec<f64>) -> Result<Self> {
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 {
            return Err(Error::InvalidParameter(
                "row_ptr must have n+1 entries starting at 0".into(),
            ));
        }
        if col_idx.len() != vals.len() || *row_ptr.last().unwrap() != col_idx.len() {
            return Err(Error::InvalidParameter(
                "row_ptr, col_idx and vals disagree on nnz".into(),
            ));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidParameter(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.iter().any(|&c| c >= n) {
                return Err(Error::InvalidParameter(format!("column index out of range in row {i}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "columns not strictly increasing in row {i}"
                )));
            }
        }
        Ok(CsrMatrix {
            n,
            row_ptr,
            col_idx,
            vals,
        })
    }

    /// Assembles from zero-based `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= n || *j >= n) {
            return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside {n} x {n}")));
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            vals.push(v);
            last = Some((i, j));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(CsrMatrix {
            n,
            row_ptr,
            col_idx,
            vals,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            vals: diag.to_vec(),
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut trip = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    trip.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(n, trip)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n)
            .flat_map(move |i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.vals[p])))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `y = A x`
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = 0.0;
            for (&c, &v) in self.col_idx[lo..hi].iter().zip(&self.vals[lo..hi]) {
                acc += v * x[c];
            }
            *yi = acc;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Reads a real Matrix Market coordinate file. Symmetric storage is expanded,
/// duplicates are summed.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_matrix_market_from(BufReader::new(file), path)
}

pub fn read_matrix_market_from<R: BufRead>(reader: R, path: &Path) -> Result<CsrMatrix> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate();

    let banner = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(parse_err(1, "empty file".into())),
    };
    let tokens: Vec<String> = banner.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(1, format!("malformed banner '{banner}'")));
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!(
            "format '{}' (only coordinate is read)",
            tokens[2]
        )));
    }
    match tokens[3].as_str() {
        "real" | "double" => {}
        "complex" => return Err(Error::UnsupportedFormat("complex matrices are not supported".into())),
        other => return Err(Error::UnsupportedFormat(format!("field '{other}'"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::UnsupportedFormat(format!("symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "size line needs 'rows cols nnz'".into()));
                }
                let nums: std::result::Result<Vec<usize>, _> = fields.iter().map(|f| f.parse()).collect();
                let nums = nums.map_err(|e| parse_err(lineno, format!("bad size line: {e}")))?;
                if nums[0] != nums[1] {
                    return Err(Error::NotSquare {
                        rows: nums[0],
                        cols: nums[1],
                    });
                }
                trip.reserve(nums[2] * if symmetry == Symmetry::General { 1 } else { 2 });
                size = Some((nums[0], nums[1], nums[2]));
            }
            Some((n, _, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "entry needs 'row col value'".into()));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad row: {e}")))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad column: {e}")))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad value: {e}")))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(lineno, format!("index ({i}, {j}) outside {n} x {n}")));
                }
                let (i, j) = (i - 1, j - 1);
                trip.push((i, j, v));
                if i != j {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => trip.push((j, i, v)),
                        Symmetry::SkewSymmetric => trip.push((j, i, -v)),
                    }
                }
            }
        }
    }
    let (n, _, nnz) = size.ok_or_else(|| parse_err(1, "missing size line".into()))?;
    let stored = match symmetry {
        Symmetry::General => trip.len(),
        _ => trip.iter().filter(|(i, j, _)| i >= j).count(),
    };
    if stored != nnz && symmetry == Symmetry::General {
        return Err(parse_err(0, format!("expected {nnz} entries, found {stored}")));
    }
    CsrMatrix::from_triplets(n, trip)
}

/// Writes `a` as a general real coordinate Matrix Market file. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_matrix_market<W: Write>(a: &CsrMatrix, mut out: W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.n(), a.n(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

pub fn write_matrix_market_file(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = std::io::BufWriter::new(File::create(path)?);
    write_matrix_market(a, file)
}

/// Non-normal upper triangular matrix with diagonal `1, 2, …, n`, so its spectrum
/// is exactly `{1, …, n}`. Each strictly upper entry is present with probability
/// `5/n` and uniform in `[-1, 1]`, drawn from a fixed seed.
pub fn gen_toy_spectrum(n: usize) -> Result<CsrMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("toy matrix needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(TOY_SEED);
    let p = (5.0 / n as f64).min(1.0);
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        col_idx.push(i);
        vals.push((i + 1) as f64);
        let upper = n - 1 - i;
        if upper > 0 {
            let count = rng.sample(Binomial::new(upper as u64, p).expect("valid binomial")) as usize;
            let mut cols = index::sample(&mut rng, upper, count).into_vec();
            cols.sort_unstable();
            for c in cols {
                col_idx.push(i + 1 + c);
                vals.push(rng.random_range(-1.0..=1.0));
            }
        }
        row_ptr.push(col_idx.len());
    }
    CsrMatrix::from_raw(n, row_ptr, col_idx, vals)
}

/// `w_ij = sin(10(μ_j + x_i)) / (cos(100(μ_j − x_i)) + 1.1)` on equispaced grids
/// `x_i`, `μ_j` covering `[0, 1]`.
pub fn gen_singular_grid(n: usize, k: usize) -> Result<DMatrix<f64>> {
    if n < 2 || k < 2 {
        return Err(Error::InvalidDimension(format!(
            "grid needs n, k >= 2, got n={n}, k={k}"
        )));
    }
    let x = |i: usize| i as f64 / (n - 1) as f64;
    let mu = |j: usize| j as f64 / (k - 1) as f64;
    Ok(DMatrix::from_fn(n, k, |i, j| {
        (10.0 * (mu(j) + x(i))).sin() / ((100.0 * (mu(j) - x(i))).cos() + 1.1)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<CsrMatrix> {
        read_matrix_market_from(Cursor::new(text), Path::new("test.mtx"))
    }

    #[test]
    fn reads_diagonal() {
        let a = parse("%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 1 2.0\n2 2 3.0\n").unwrap();
        assert_eq!(a.to_dense(), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]));
    }

    #[test]
    fn expands_symmetric_storage() {
        let a = parse("%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 1\n2 1 5\n3 2 -1\n").unwrap();
        let d = a.to_dense();
        assert_eq!(d, d.transpose());
        assert_eq!(d[(0, 1)], 5.0);
        assert_eq!(d[(2, 1)], -1.0);
        assert_eq!(a.nnz(), 5);
    }

    #[test]
    fn sums_duplicates_and_sorts() {
        let a = parse("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 2 1\n1 1 4\n1 2 0.5\n").unwrap();
        assert_eq!(a.col_idx(), &[0, 1]);
        assert_eq!(a.vals(), &[4.0, 1.5]);
    }

    #[test]
    fn rejects_unsupported_inputs() {
        assert!(matches!(
            parse("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n"),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        assert!(matches!(parse("hello\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_matrix_market("/nonexistent/missing.mtx"),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn spmv_basics() {
        let i5 = CsrMatrix::identity(5);
        let x = [1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(i5.spmv(&x).unwrap(), x.to_vec());
        let a = CsrMatrix::from_triplets(3, vec![(0, 1, 2.0), (2, 2, 1.0)]).unwrap();
        let y = a.spmv(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(y, vec![2.0, 0.0, 1.0]);
        assert!(matches!(a.spmv(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn from_raw_validates() {
        assert!(CsrMatrix::from_raw(2, vec![0, 1, 2], vec![1, 0], vec![1.0, 1.0]).is_ok());
        assert!(CsrMatrix::from_raw(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::from_raw(2, vec![0, 1, 2], vec![1, 2], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::from_raw(2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn toy_matrix_structure() {
        let a = gen_toy_spectrum(800).unwrap();
        assert_eq!(a.n(), 800);
        for (i, j, v) in a.triplets() {
            assert!(j >= i, "entry below the diagonal");
            if i == j {
                assert_eq!(v, (i + 1) as f64);
            } else {
                assert!((-1.0..=1.0).contains(&v));
            }
        }
        // roughly 5 * (n-1)/2 strictly upper entries
        let upper = a.nnz() - 800;
        assert!((1500..2500).contains(&upper), "{upper}");
        assert_eq!(a, gen_toy_spectrum(800).unwrap());
        let small = gen_toy_spectrum(2).unwrap().to_dense();
        assert_eq!((small[(0, 0)], small[(1, 1)], small[(1, 0)]), (1.0, 2.0, 0.0));
        assert!(gen_toy_spectrum(1).is_err());
    }

    #[test]
    fn grid_first_entry_and_cosine_symmetry() {
        let w = gen_singular_grid(50, 50).unwrap();
        assert_eq!(w[(0, 0)], 0.0);
        // with identical grids, swapping i and j leaves the denominator unchanged
        for (i, j) in [(3, 17), (10, 40), (0, 49)] {
            let x = |t: usize| t as f64 / 49.0;
            let den_ij = (100.0 * (x(j) - x(i))).cos() + 1.1;
            let den_ji = (100.0 * (x(i) - x(j))).cos() + 1.1;
            assert_eq!(den_ij, den_ji);
            let num = (10.0 * (x(i) + x(j))).sin();
            assert!((w[(i, j)] - num / den_ij).abs() < 1e-15);
            assert!((w[(i, j)] - w[(j, i)]).abs() < 1e-15);
        }
        assert!(gen_singular_grid(1, 3).is_err());
    }
}
