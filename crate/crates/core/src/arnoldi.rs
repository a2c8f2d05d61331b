//! Randomized Arnoldi factorizations `A V = V H + β v₊ e_kᵀ` with an Ω-orthonormal
//! basis `V`.

use std::sync::Arc;

use nalgebra::{DMatrix, DMatrixView};

use crate::basis::{norm2, Basis};
use crate::error::{Error, Result};
use crate::matio::CsrMatrix;
use crate::ortho::{OrthoMethod, OrthoState};
use crate::sketch::SketchOperator;

/// A square real operator `x ↦ A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()>;

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.spmv_into(x, y)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols() || y.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                got: x.len(),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
        Ok(())
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        (**self).apply_into(x, y)
    }
}

/// Size-`k` randomized Arnoldi factorization.
///
/// The orthogonalization state holds `[V, v₊]` (only `V` after a breakdown) and
/// `h` is the `(k+1) × k` Hessenberg matrix whose last row carries `β`.
#[derive(Debug, Clone)]
pub struct ArnoldiFactorization {
    state: OrthoState,
    h: DMatrix<f64>,
    k: usize,
    breakdown: bool,
    matvecs: usize,
    embedding_warnings: usize,
}

/// `‖v‖₂ / ‖Ωv‖₂` outside this band suggests the sketch is not embedding the Krylov space.
const DISTORTION_BAND: (f64, f64) = (0.5, 2.0);

impl ArnoldiFactorization {
    pub(crate) fn from_parts(state: OrthoState, h_square: DMatrix<f64>, beta: f64, matvecs: usize) -> Self {
        let k = h_square.nrows();
        let breakdown = beta == 0.0;
        let mut h = h_square.resize(k + 1, k, 0.0);
        if k > 0 {
            h[(k, k - 1)] = beta;
        }
        debug_assert_eq!(state.len(), if breakdown { k } else { k + 1 });
        ArnoldiFactorization {
            state,
            h,
            k,
            breakdown,
            matvecs,
            embedding_warnings: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.state.op().n()
    }

    pub fn op(&self) -> &Arc<SketchOperator> {
        self.state.op()
    }

    pub fn method(&self) -> OrthoMethod {
        self.state.method()
    }

    pub fn is_breakdown(&self) -> bool {
        self.breakdown
    }

    /// Number of products with `A` performed so far, restarts included.
    pub fn matvecs(&self) -> usize {
        self.matvecs
    }

    /// How many new basis vectors had a sketch distortion outside `[1/2, 2]`.
    pub fn embedding_warnings(&self) -> usize {
        self.embedding_warnings
    }

    /// `V`, `n × k`.
    pub fn v(&self) -> DMatrixView<'_, f64> {
        self.state.q().leading(self.k)
    }

    /// `S = ΩV`, `d × k`.
    pub fn s(&self) -> DMatrixView<'_, f64> {
        self.state.s().leading(self.k)
    }

    pub fn basis(&self) -> &Basis {
        self.state.q()
    }

    pub fn sketch_basis(&self) -> &Basis {
        self.state.s()
    }

    /// Square `k × k` Hessenberg block.
    pub fn h(&self) -> DMatrix<f64> {
        self.h.rows(0, self.k).into_owned()
    }

    /// `(k+1) × k` Hessenberg matrix including `β` in the last row.
    pub fn h_extended(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// `β = h_{k+1,k}`; zero after a breakdown.
    pub fn beta(&self) -> f64 {
        if self.breakdown || self.k == 0 {
            0.0
        } else {
            self.h[(self.k, self.k - 1)]
        }
    }

    pub fn v_next(&self) -> Option<&[f64]> {
        (!self.breakdown).then(|| self.state.q().col(self.k))
    }

    pub fn s_next(&self) -> Option<&[f64]> {
        (!self.breakdown).then(|| self.state.s().col(self.k))
    }

    pub(crate) fn state(&self) -> &OrthoState {
        &self.state
    }

    fn resize_h(&mut self, rows: usize, cols: usize) {
        let h = std::mem::replace(&mut self.h, DMatrix::zeros(0, 0));
        self.h = h.resize(rows, cols, 0.0);
    }

    /// Adds `p` Arnoldi steps. Stops early, without error, on breakdown.
    pub fn extend<A: LinearOperator + ?Sized>(&mut self, a: &A, p: usize) -> Result<()> {
        if p == 0 {
            return Ok(());
        }
        if self.breakdown {
            return Err(Error::InvalidParameter(
                "cannot extend a factorization that broke down".into(),
            ));
        }
        let d = self.op().d();
        if self.k + p + 1 > d {
            return Err(Error::SketchCapacity {
                requested: self.k + p + 1,
                capacity: d,
            });
        }
        if a.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: a.dim(),
            });
        }
        let target = self.k + p;
        self.resize_h(target + 1, target);
        let mut w = vec![0.0; self.n()];
        while self.k < target {
            let j = self.k;
            a.apply_into(self.state.q().col(j), &mut w)?;
            self.matvecs += 1;
            let out = self.state.push(&w)?;
            for (i, c) in out.coeffs[..=j].iter().enumerate() {
                self.h[(i, j)] = *c;
            }
            self.k += 1;
            if out.breakdown {
                self.breakdown = true;
                self.resize_h(self.k + 1, self.k);
                return Ok(());
            }
            self.h[(j + 1, j)] = out.coeffs[j + 1];
            let distortion = norm2(self.state.q().col(j + 1));
            if distortion < DISTORTION_BAND.0 || distortion > DISTORTION_BAND.1 {
                self.embedding_warnings += 1;
                log::warn!(
                    "basis vector {} has ‖v‖/‖Ωv‖ = {distortion:.3e}; the sketch may not embed the Krylov space",
                    j + 1
                );
            }
        }
        Ok(())
    }
}

/// Builds a size-`k` factorization from `v1`, normalized internally so `‖Ωv₁‖ = 1`.
pub fn arnoldi_build<A: LinearOperator + ?Sized>(
    a: &A,
    v1: &[f64],
    k: usize,
    op: Arc<SketchOperator>,
    method: OrthoMethod,
) -> Result<ArnoldiFactorization> {
    let n = op.n();
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.dim(),
        });
    }
    if v1.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v1.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("factorization size must be positive".into()));
    }
    if k + 1 > op.d() {
        return Err(Error::SketchCapacity {
            requested: k + 1,
            capacity: op.d(),
        });
    }
    let mut state = OrthoState::new(op, method);
    let first = state.push(v1)?;
    if first.breakdown || !first.coeffs[0].is_finite() {
        return Err(Error::ZeroStartVector);
    }
    let mut fact = ArnoldiFactorization {
        state,
        h: DMatrix::zeros(1, 0),
        k: 0,
        breakdown: false,
        matvecs: 0,
        embedding_warnings: 0,
    };
    fact.extend(a, k)?;
    Ok(fact)
}

/// Consuming form of [`ArnoldiFactorization::extend`].
pub fn arnoldi_extend<A: LinearOperator + ?Sized>(
    a: &A,
    mut fact: ArnoldiFactorization,
    p: usize,
) -> Result<ArnoldiFactorization> {
    fact.extend(a, p)?;
    Ok(fact)
}

/// `‖A V − V H − β v₊ e_kᵀ‖_F / ‖A V‖_F`. Uses `k` extra products with `A` that are
/// not counted in [`ArnoldiFactorization::matvecs`].
pub fn residual_check<A: LinearOperator + ?Sized>(fact: &ArnoldiFactorization, a: &A) -> Result<f64> {
    let (n, k) = (fact.n(), fact.k());
    let v = fact.v();
    let h = fact.h();
    let mut av = DMatrix::zeros(n, k);
    let mut col = vec![0.0; n];
    for j in 0..k {
        a.apply_into(v.column(j).as_slice(), &mut col)?;
        av.column_mut(j).copy_from_slice(&col);
    }
    let mut r = &av - v * h;
    if let Some(vn) = fact.v_next() {
        let beta = fact.beta();
        for (ri, vi) in r.column_mut(k - 1).iter_mut().zip(vn) {
            *ri -= beta * vi;
        }
    }
    let denom = av.norm();
    Ok(if denom == 0.0 { r.norm() } else { r.norm() / denom })
}
