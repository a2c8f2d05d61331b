//! Sketch-orthonormal QR, one column at a time.
//!
//! Given a sketch `Ω`, the goal is `W = QR` with `(ΩQ)ᵀ(ΩQ) = I`. Each new column
//! `w` is projected against the current basis with coefficients obtained in
//! sketch space, then normalized by the norm of its sketch. The four variants
//! differ in how the coefficients and the new sketch are obtained:
//!
//! * `Rgs`: least-squares `min ‖S c − Ωw‖` through a Householder QR of `S` that is
//!   updated one column per push; the projected vector is re-sketched.
//! * `Rcgs`: `c = Sᵀ Ωw`, treating `S` as exactly orthonormal; re-sketched.
//! * `Rcgs2`: `Rcgs` followed by a second projection of the residual, updating both
//!   the `n`-vector and its sketch.
//! * `Rcgs2w`: the first projection is done in sketch space only, so the `n`-vector
//!   is formed once, then sketched.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{norm2, Basis};
use crate::error::{Error, Result};
use crate::sketch::SketchOperator;

/// Relative threshold on `‖s_j‖` below which a push is treated as a breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OrthoMethod {
    #[default]
    Rgs,
    Rcgs,
    Rcgs2,
    Rcgs2w,
}

impl OrthoMethod {
    pub const ALL: [OrthoMethod; 4] = [
        OrthoMethod::Rgs,
        OrthoMethod::Rcgs,
        OrthoMethod::Rcgs2,
        OrthoMethod::Rcgs2w,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrthoMethod::Rgs => "rgs",
            OrthoMethod::Rcgs => "rcgs",
            OrthoMethod::Rcgs2 => "rcgs2",
            OrthoMethod::Rcgs2w => "rcgs2w",
        }
    }
}

impl std::fmt::Display for OrthoMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for OrthoMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrthoMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown orthogonalization method '{s}'")))
    }
}

/// Householder QR of a tall matrix, extended one column at a time.
#[derive(Debug, Clone)]
pub(crate) struct IncrementalQr {
    rows: usize,
    /// Reflector `i` acts on entries `i..rows`; stored from offset `i`.
    vs: Vec<Vec<f64>>,
    betas: Vec<f64>,
    r_cols: Vec<Vec<f64>>,
}

impl IncrementalQr {
    pub(crate) fn new(rows: usize) -> Self {
        IncrementalQr {
            rows,
            vs: Vec::new(),
            betas: Vec::new(),
            r_cols: Vec::new(),
        }
    }

    pub(crate) fn ncols(&self) -> usize {
        self.r_cols.len()
    }

    fn apply_reflectors(&self, y: &mut [f64]) {
        for (i, (v, &beta)) in self.vs.iter().zip(&self.betas).enumerate() {
            if beta == 0.0 {
                continue;
            }
            let tail = &mut y[i..];
            let t = beta * v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum::<f64>();
            for (yi, vi) in tail.iter_mut().zip(v) {
                *yi -= t * vi;
            }
        }
    }

    pub(crate) fn push(&mut self, col: &[f64]) {
        let j = self.ncols();
        assert!(j < self.rows, "incremental QR is full");
        let mut y = col.to_vec();
        self.apply_reflectors(&mut y);
        let x = &y[j..];
        let nx = norm2(x);
        let (v, beta, alpha) = if nx == 0.0 {
            (vec![0.0; x.len()], 0.0, 0.0)
        } else {
            let alpha = if x[0] >= 0.0 { -nx } else { nx };
            let mut v = x.to_vec();
            v[0] -= alpha;
            let vv: f64 = v.iter().map(|t| t * t).sum();
            (v, if vv == 0.0 { 0.0 } else { 2.0 / vv }, alpha)
        };
        let mut rc = y[..j].to_vec();
        rc.push(alpha);
        self.vs.push(v);
        self.betas.push(beta);
        self.r_cols.push(rc);
    }

    /// Least-squares solution of `min ‖M c − z‖` for the stored `M`.
    pub(crate) fn solve_ls(&self, z: &[f64]) -> Vec<f64> {
        let j = self.ncols();
        let mut y = z.to_vec();
        self.apply_reflectors(&mut y);
        let mut c = y[..j].to_vec();
        for i in (0..j).rev() {
            let mut acc = c[i];
            for l in i + 1..j {
                acc -= self.r_cols[l][i] * c[l];
            }
            let d = self.r_cols[i][i];
            c[i] = if d == 0.0 { 0.0 } else { acc / d };
        }
        c
    }

    pub(crate) fn r_matrix(&self) -> DMatrix<f64> {
        let j = self.ncols();
        DMatrix::from_fn(j, j, |r, c| if r <= c { self.r_cols[c][r] } else { 0.0 })
    }
}

/// Result of one [`OrthoState::push`].
#[derive(Debug, Clone, PartialEq)]
pub struct PushOutcome {
    /// Column of `R`: projection coefficients followed by `‖s‖`.
    pub coeffs: Vec<f64>,
    pub breakdown: bool,
}

/// An Ω-orthonormal basis `Q` together with its sketch `S = ΩQ`.
#[derive(Debug, Clone)]
pub struct OrthoState {
    op: Arc<SketchOperator>,
    method: OrthoMethod,
    q: Basis,
    s: Basis,
    s_qr: Option<IncrementalQr>,
    max_input: f64,
}

impl OrthoState {
    pub fn new(op: Arc<SketchOperator>, method: OrthoMethod) -> Self {
        let (n, d) = (op.n(), op.d());
        OrthoState {
            op,
            method,
            q: Basis::new(n),
            s: Basis::new(d),
            s_qr: (method == OrthoMethod::Rgs).then(|| IncrementalQr::new(d)),
            max_input: 0.0,
        }
    }

    /// Reassembles a state from an existing basis and its sketch.
    pub fn from_parts(
        op: Arc<SketchOperator>,
        method: OrthoMethod,
        q: Basis,
        s: Basis,
        max_input: f64,
    ) -> Result<Self> {
        if q.nrows() != op.n() || s.nrows() != op.d() || q.ncols() != s.ncols() {
            return Err(Error::DimensionMismatch {
                expected: op.n(),
                got: q.nrows(),
            });
        }
        let s_qr = (method == OrthoMethod::Rgs).then(|| {
            let mut qr = IncrementalQr::new(op.d());
            for j in 0..s.ncols() {
                qr.push(s.col(j));
            }
            qr
        });
        Ok(OrthoState {
            op,
            method,
            q,
            s,
            s_qr,
            max_input,
        })
    }

    pub fn op(&self) -> &Arc<SketchOperator> {
        &self.op
    }

    pub fn method(&self) -> OrthoMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.q.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn q(&self) -> &Basis {
        &self.q
    }

    pub fn s(&self) -> &Basis {
        &self.s
    }

    pub fn max_input(&self) -> f64 {
        self.max_input
    }

    pub fn into_parts(self) -> (Basis, Basis) {
        (self.q, self.s)
    }

    /// Orthogonalizes `w` against the current basis and appends the normalized result.
    ///
    /// On breakdown the state is left unchanged and `coeffs` still holds the
    /// projection coefficients with the (negligible) residual norm last.
    pub fn push(&mut self, w: &[f64]) -> Result<PushOutcome> {
        let n = self.op.n();
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: w.len(),
            });
        }
        let j = self.len();
        if j + 1 > self.op.d() {
            return Err(Error::SketchCapacity {
                requested: j + 1,
                capacity: self.op.d(),
            });
        }
        let z = self.op.apply(w)?;
        self.max_input = self.max_input.max(norm2(&z));

        let mut q = w.to_vec();
        let (c, s) = match self.method {
            OrthoMethod::Rgs => {
                let c = match &self.s_qr {
                    Some(qr) if j > 0 => qr.solve_ls(&z),
                    _ => Vec::new(),
                };
                self.q.sub_mul(&c, &mut q);
                let s = self.op.apply(&q)?;
                (c, s)
            }
            OrthoMethod::Rcgs => {
                let c = self.s.tr_mul(&z);
                self.q.sub_mul(&c, &mut q);
                let s = self.op.apply(&q)?;
                (c, s)
            }
            OrthoMethod::Rcgs2 => {
                let c1 = self.s.tr_mul(&z);
                self.q.sub_mul(&c1, &mut q);
                let mut s = self.op.apply(&q)?;
                let c2 = self.s.tr_mul(&s);
                self.q.sub_mul(&c2, &mut q);
                self.s.sub_mul(&c2, &mut s);
                (c1.iter().zip(&c2).map(|(a, b)| a + b).collect(), s)
            }
            OrthoMethod::Rcgs2w => {
                let c1 = self.s.tr_mul(&z);
                let mut s = z.clone();
                self.s.sub_mul(&c1, &mut s);
                let c2 = self.s.tr_mul(&s);
                let c: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
                self.q.sub_mul(&c, &mut q);
                let s = self.op.apply(&q)?;
                (c, s)
            }
        };

        let nrm = norm2(&s);
        let breakdown = !(nrm > BREAKDOWN_TOL * self.max_input);
        let mut coeffs = c;
        coeffs.push(nrm);
        if !breakdown {
            let inv = 1.0 / nrm;
            q.iter_mut().for_each(|t| *t *= inv);
            let s: Vec<f64> = s.into_iter().map(|t| t * inv).collect();
            self.q.push(&q);
            if let Some(qr) = &mut self.s_qr {
                qr.push(&s);
            }
            self.s.push(&s);
        }
        Ok(PushOutcome { coeffs, breakdown })
    }
}

/// Output of [`sketch_orthonormalize`].
#[derive(Debug, Clone)]
pub struct SketchQr {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub s: DMatrix<f64>,
    /// Index of the first column that broke down; the factors cover the columns before it.
    pub breakdown: Option<usize>,
}

/// Sketch-orthonormal QR of all columns of `w`.
pub fn sketch_orthonormalize(w: &DMatrix<f64>, op: Arc<SketchOperator>, method: OrthoMethod) -> Result<SketchQr> {
    if w.ncols() > op.d() {
        return Err(Error::SketchCapacity {
            requested: w.ncols(),
            capacity: op.d(),
        });
    }
    let mut state = OrthoState::new(op, method);
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(w.ncols());
    let mut breakdown = None;
    for j in 0..w.ncols() {
        let out = state.push(w.column(j).as_slice())?;
        if out.breakdown {
            breakdown = Some(j);
            break;
        }
        r_cols.push(out.coeffs);
    }
    let k = r_cols.len();
    let r = DMatrix::from_fn(k, k, |i, j| if i <= j { r_cols[j][i] } else { 0.0 });
    Ok(SketchQr {
        q: state.q().to_matrix(),
        r,
        s: state.s().to_matrix(),
        breakdown,
    })
}

/// One row of [`condition_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    /// One-based number of columns processed.
    pub column_index: usize,
    #[serde(rename = "kappa_Q")]
    pub kappa_q: f64,
    #[serde(rename = "dev_StS")]
    pub dev_sts: f64,
}

/// Runs [`sketch_orthonormalize`] and records, after every column, the condition
/// number of the basis so far and `‖I − SᵀS‖₂`.
///
/// `κ(Q_{1:j})` is read from the triangular factor of a Householder QR of `Q`
/// that is extended alongside the factorization.
pub fn condition_trace(w: &DMatrix<f64>, op: Arc<SketchOperator>, method: OrthoMethod) -> Result<Vec<ConditionRow>> {
    if w.ncols() > op.d() {
        return Err(Error::SketchCapacity {
            requested: w.ncols(),
            capacity: op.d(),
        });
    }
    let mut state = OrthoState::new(op, method);
    let mut q_qr = IncrementalQr::new(w.nrows());
    let mut gram = DMatrix::<f64>::zeros(0, 0);
    let mut rows = Vec::with_capacity(w.ncols());
    for j in 0..w.ncols() {
        if state.push(w.column(j).as_slice())?.breakdown {
            break;
        }
        q_qr.push(state.q().col(j));
        let sv = q_qr.r_matrix().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let kappa_q = if smin > 0.0 { smax / smin } else { f64::INFINITY };

        let sj = state.s().col(j);
        let new_col: Vec<f64> = (0..=j).map(|i| crate::basis::dot(state.s().col(i), sj)).collect();
        gram = gram.resize(j + 1, j + 1, 0.0);
        for (i, &g) in new_col.iter().enumerate() {
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
        let dev = &gram - DMatrix::<f64>::identity(j + 1, j + 1);
        let dev_sts = dev
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        rows.push(ConditionRow {
            column_index: j + 1,
            kappa_q,
            dev_sts,
        });
    }
    Ok(rows)
}

/// Writes condition-trace rows as CSV with header `column_index,kappa_Q,dev_StS`.
pub fn write_condition_csv<W: std::io::Write>(rows: &[ConditionRow], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}
