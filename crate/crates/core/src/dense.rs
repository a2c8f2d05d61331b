//! Small dense upper Hessenberg kernels: real Schur eigenvalues, inverse
//! iteration eigenvectors, exact-shift selection and the implicit shifted QR
//! sweeps used by the restart.
//!
//! The eigenvalue iteration and the restart sweeps share the same bulge-chasing
//! steps; the only difference is whether the orthogonal factor is accumulated.

use std::cmp::Ordering;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Dense `m × m` upper Hessenberg matrix.
pub type HessMatrix = DMatrix<f64>;

const EPS: f64 = f64::EPSILON;

/// Region of the spectrum to target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Which {
    /// Largest modulus.
    #[default]
    LM,
    /// Smallest modulus.
    SM,
    /// Largest real part.
    LR,
    /// Smallest real part.
    SR,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::LM => "LM",
            Which::SM => "SM",
            Which::LR => "LR",
            Which::SR => "SR",
        }
    }

    /// `Less` when `a` is more wanted than `b`.
    fn compare(self, a: C64, b: C64) -> Ordering {
        let primary = match self {
            Which::LM => b.norm().total_cmp(&a.norm()),
            Which::SM => a.norm().total_cmp(&b.norm()),
            Which::LR => b.re.total_cmp(&a.re),
            Which::SR => a.re.total_cmp(&b.re),
        };
        primary.then(a.im.total_cmp(&b.im)).then(a.re.total_cmp(&b.re))
    }

    /// Sorts in place, most wanted first.
    pub fn sort(self, values: &mut [C64]) {
        values.sort_by(|a, b| self.compare(*a, *b));
    }
}

impl std::fmt::Display for Which {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LM" => Ok(Which::LM),
            "SM" => Ok(Which::SM),
            "LR" => Ok(Which::LR),
            "SR" => Ok(Which::SR),
            _ => Err(Error::InvalidParameter(format!(
                "unknown spectrum target '{s}' (LM, SM, LR, SR)"
            ))),
        }
    }
}

pub fn is_upper_hessenberg(h: &DMatrix<f64>) -> bool {
    h.is_square() && (0..h.ncols()).all(|j| ((j + 2)..h.nrows()).all(|i| h[(i, j)] == 0.0))
}

/// Householder vector `v` (with `v[0] = 1`) and `tau` such that
/// `(I - tau v vᵀ) x = beta e₁`. Returns `tau = 0` when `x` is already a multiple of `e₁`.
fn reflector(x: &[f64]) -> ([f64; 3], f64) {
    let mut v = [1.0, 0.0, 0.0];
    let alpha = x[0];
    let xnorm = x[1..].iter().map(|t| t * t).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return (v, 0.0);
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for (vi, xi) in v[1..].iter_mut().zip(&x[1..]) {
        *vi = xi * scale;
    }
    (v, tau)
}

/// Rows `r0..r0+len` of `a`, columns `cols`, multiplied from the left by the reflector.
fn apply_left(a: &mut DMatrix<f64>, v: &[f64; 3], tau: f64, r0: usize, len: usize, cols: std::ops::Range<usize>) {
    if tau == 0.0 {
        return;
    }
    for j in cols {
        let mut s = 0.0;
        for i in 0..len {
            s += v[i] * a[(r0 + i, j)];
        }
        s *= tau;
        for i in 0..len {
            a[(r0 + i, j)] -= s * v[i];
        }
    }
}

/// Columns `c0..c0+len` of `a`, rows `rows`, multiplied from the right by the reflector.
fn apply_right(a: &mut DMatrix<f64>, v: &[f64; 3], tau: f64, c0: usize, len: usize, rows: std::ops::Range<usize>) {
    if tau == 0.0 {
        return;
    }
    for i in rows {
        let mut s = 0.0;
        for j in 0..len {
            s += a[(i, c0 + j)] * v[j];
        }
        s *= tau;
        for j in 0..len {
            a[(i, c0 + j)] -= s * v[j];
        }
    }
}

/// Which parts of the matrix a bulge chase updates.
#[derive(Clone, Copy)]
enum Span {
    /// Only the active block (eigenvalues only).
    Block,
    /// The whole matrix, so the result is an exact similarity of all of `H`.
    Full,
}

impl Span {
    fn cols(self, from: usize, hi: usize, n: usize) -> std::ops::Range<usize> {
        match self {
            Span::Block => from..hi + 1,
            Span::Full => from..n,
        }
    }

    fn rows(self, lo: usize, to: usize) -> std::ops::Range<usize> {
        match self {
            Span::Block => lo..to + 1,
            Span::Full => 0..to + 1,
        }
    }
}

/// One implicit single-shift QR step with real shift `mu` on the unreduced block `lo..=hi`.
fn single_step(h: &mut DMatrix<f64>, mut q: Option<&mut DMatrix<f64>>, lo: usize, hi: usize, mu: f64, span: Span) {
    let n = h.nrows();
    let mut x = h[(lo, lo)] - mu;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        if k > lo {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
        }
        let (v, tau) = reflector(&[x, y]);
        let first = if k > lo { k - 1 } else { lo };
        apply_left(h, &v, tau, k, 2, span.cols(first, hi, n));
        if k > lo {
            h[(k + 1, k - 1)] = 0.0;
        }
        apply_right(h, &v, tau, k, 2, span.rows(lo, (k + 2).min(hi)));
        if let Some(q) = q.as_deref_mut() {
            let rows = q.nrows();
            apply_right(q, &v, tau, k, 2, 0..rows);
        }
    }
}

/// One implicit double-shift (Francis) step on the unreduced block `lo..=hi`, with the
/// shift pair given by its sum and product so the arithmetic stays real.
fn double_step(
    h: &mut DMatrix<f64>,
    mut q: Option<&mut DMatrix<f64>>,
    lo: usize,
    hi: usize,
    sum: f64,
    prod: f64,
    span: Span,
) {
    let n = h.nrows();
    let h00 = h[(lo, lo)];
    let h10 = h[(lo + 1, lo)];
    let mut x = h00 * h00 + h[(lo, lo + 1)] * h10 - sum * h00 + prod;
    let mut y = h10 * (h00 + h[(lo + 1, lo + 1)] - sum);

    if hi == lo + 1 {
        let (v, tau) = reflector(&[x, y]);
        apply_left(h, &v, tau, lo, 2, span.cols(lo, hi, n));
        apply_right(h, &v, tau, lo, 2, span.rows(lo, hi));
        if let Some(q) = q.as_deref_mut() {
            let rows = q.nrows();
            apply_right(q, &v, tau, lo, 2, 0..rows);
        }
        return;
    }

    let mut z = h10 * h[(lo + 2, lo + 1)];
    for k in lo..hi - 1 {
        if k > lo {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
            z = h[(k + 2, k - 1)];
        }
        let (v, tau) = reflector(&[x, y, z]);
        let first = if k > lo { k - 1 } else { lo };
        apply_left(h, &v, tau, k, 3, span.cols(first, hi, n));
        if k > lo {
            h[(k + 1, k - 1)] = 0.0;
            h[(k + 2, k - 1)] = 0.0;
        }
        apply_right(h, &v, tau, k, 3, span.rows(lo, (k + 3).min(hi)));
        if let Some(q) = q.as_deref_mut() {
            let rows = q.nrows();
            apply_right(q, &v, tau, k, 3, 0..rows);
        }
    }
    let k = hi - 1;
    let (v, tau) = reflector(&[h[(k, k - 1)], h[(k + 1, k - 1)]]);
    apply_left(h, &v, tau, k, 2, span.cols(k - 1, hi, n));
    h[(k + 1, k - 1)] = 0.0;
    apply_right(h, &v, tau, k, 2, span.rows(lo, hi));
    if let Some(q) = q.as_deref_mut() {
        let rows = q.nrows();
        apply_right(q, &v, tau, k, 2, 0..rows);
    }
}

fn negligible_subdiag(h: &DMatrix<f64>, i: usize, fallback: f64) -> bool {
    let mut s = h[(i - 1, i - 1)].abs() + h[(i, i)].abs();
    if s == 0.0 {
        s = fallback;
    }
    h[(i, i - 1)].abs() <= EPS * s
}

/// Eigenvalues of the 2×2 block `[[a, b], [c, d]]`.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> (C64, C64) {
    let mid = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = half * half + b * c;
    if disc >= 0.0 {
        let r = disc.sqrt();
        // larger magnitude root first; the smaller from the product avoids cancellation
        let l1 = if mid >= 0.0 { mid + r } else { mid - r };
        let l2 = if l1 != 0.0 { (a * d - b * c) / l1 } else { 0.0 };
        (C64::new(l1, 0.0), C64::new(l2, 0.0))
    } else {
        let r = (-disc).sqrt();
        (C64::new(mid, r), C64::new(mid, -r))
    }
}

/// All eigenvalues of an upper Hessenberg matrix, by double-shift QR iteration
/// to real Schur form. Complex eigenvalues come in exact conjugate pairs.
pub fn hessenberg_eigs(h: &HessMatrix) -> Result<Vec<C64>> {
    let m = h.nrows();
    if m == 0 || !h.is_square() {
        return Err(Error::InvalidDimension(format!(
            "need a nonempty square matrix, got {} x {}",
            h.nrows(),
            h.ncols()
        )));
    }
    let mut a = h.clone();
    let norm = a.norm().max(f64::MIN_POSITIVE);
    let mut eigs = Vec::with_capacity(m);
    let max_sweeps = 30 * m;
    let mut sweeps = 0usize;
    let mut its = 0usize;
    let mut hi = m as isize - 1;
    while hi >= 0 {
        let hiu = hi as usize;
        let mut lo = hiu;
        while lo > 0 && !negligible_subdiag(&a, lo, norm) {
            lo -= 1;
        }
        if lo > 0 {
            a[(lo, lo - 1)] = 0.0;
        }
        if lo == hiu {
            eigs.push(C64::new(a[(hiu, hiu)], 0.0));
            hi -= 1;
            its = 0;
            continue;
        }
        if lo + 1 == hiu {
            let (l1, l2) = eig2(a[(lo, lo)], a[(lo, hiu)], a[(hiu, lo)], a[(hiu, hiu)]);
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            its = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::IterationLimit { sweeps: max_sweeps });
        }
        its += 1;
        let (sum, prod) = if its % 10 == 0 {
            let s = a[(hiu, hiu - 1)].abs() + a[(hiu - 1, hiu - 2)].abs();
            let d = 0.75 * s + a[(hiu, hiu)];
            (2.0 * d, d * d + 0.4375 * s * s)
        } else {
            let (p, q, r, t) = (
                a[(hiu - 1, hiu - 1)],
                a[(hiu - 1, hiu)],
                a[(hiu, hiu - 1)],
                a[(hiu, hiu)],
            );
            (p + t, p * t - q * r)
        };
        double_step(&mut a, None, lo, hiu, sum, prod, Span::Block);
    }
    Ok(eigs)
}

/// Unit eigenvector of `h` for the eigenvalue estimate `theta`, by two steps of
/// inverse iteration on `H - θI` from the all-ones vector. The phase is fixed so
/// the largest component is real and positive.
pub fn hessenberg_eigvec(h: &HessMatrix, theta: C64) -> Result<DVector<C64>> {
    let m = h.nrows();
    if m == 0 || !h.is_square() {
        return Err(Error::InvalidDimension(
            "eigenvector of an empty or non-square matrix".into(),
        ));
    }
    let norm = h.norm().max(f64::MIN_POSITIVE);
    let lu = HessLu::factor(h, theta).or_else(|| HessLu::factor(h, theta + C64::new(1e-12 * norm, 0.0)));
    let lu = match lu {
        Some(lu) => lu,
        None => HessLu::factor_guarded(h, theta + C64::new(1e-12 * norm, 0.0), EPS * norm),
    };
    let mut x = DVector::from_element(m, C64::new(1.0, 0.0));
    for _ in 0..2 {
        lu.solve(&mut x);
        normalize_complex(&mut x);
    }
    let (imax, _) = x.iter().enumerate().fold(
        (0, -1.0),
        |(bi, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bi, bv) },
    );
    let phase = x[imax].conj() / x[imax].norm();
    x.iter_mut().for_each(|z| *z *= phase);
    Ok(x)
}

fn normalize_complex(x: &mut DVector<C64>) {
    let big = x.iter().fold(0.0f64, |a, z| a.max(z.re.abs()).max(z.im.abs()));
    if big == 0.0 || !big.is_finite() {
        return;
    }
    x.iter_mut().for_each(|z| *z /= big);
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    x.iter_mut().for_each(|z| *z /= n);
}

/// LU of a shifted Hessenberg matrix with adjacent-row pivoting.
struct HessLu {
    u: DMatrix<C64>,
    mult: Vec<C64>,
    swapped: Vec<bool>,
}

impl HessLu {
    fn factor(h: &HessMatrix, theta: C64) -> Option<Self> {
        let lu = Self::factor_guarded(h, theta, 0.0);
        (0..h.nrows()).all(|k| lu.u[(k, k)] != C64::new(0.0, 0.0)).then_some(lu)
    }

    /// Pivots smaller than `floor` are replaced by `floor`.
    fn factor_guarded(h: &HessMatrix, theta: C64, floor: f64) -> Self {
        let m = h.nrows();
        let mut u = h.map(|v| C64::new(v, 0.0));
        for i in 0..m {
            u[(i, i)] -= theta;
        }
        let mut mult = vec![C64::new(0.0, 0.0); m.saturating_sub(1)];
        let mut swapped = vec![false; m.saturating_sub(1)];
        for k in 0..m.saturating_sub(1) {
            if u[(k + 1, k)].norm() > u[(k, k)].norm() {
                u.swap_rows(k, k + 1);
                swapped[k] = true;
            }
            if u[(k, k)].norm() < floor || u[(k, k)] == C64::new(0.0, 0.0) && floor > 0.0 {
                u[(k, k)] = C64::new(floor, 0.0);
            }
            if u[(k, k)] != C64::new(0.0, 0.0) {
                let l = u[(k + 1, k)] / u[(k, k)];
                mult[k] = l;
                u[(k + 1, k)] = C64::new(0.0, 0.0);
                for j in k + 1..m {
                    let t = u[(k, j)];
                    u[(k + 1, j)] -= l * t;
                }
            }
        }
        if m > 0 && floor > 0.0 && u[(m - 1, m - 1)].norm() < floor {
            u[(m - 1, m - 1)] = C64::new(floor, 0.0);
        }
        HessLu { u, mult, swapped }
    }

    fn solve(&self, x: &mut DVector<C64>) {
        let m = x.len();
        for k in 0..m.saturating_sub(1) {
            if self.swapped[k] {
                x.swap_rows(k, k + 1);
            }
            let t = x[k];
            x[k + 1] -= self.mult[k] * t;
        }
        for i in (0..m).rev() {
            let mut s = x[i];
            for j in i + 1..m {
                s -= self.u[(i, j)] * x[j];
            }
            x[i] = s / self.u[(i, i)];
        }
    }
}

/// Split of the Ritz values into wanted values and exact shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPlan {
    pub wanted: Vec<C64>,
    pub shifts: Vec<C64>,
    pub k_effective: usize,
}

/// Sorts `eigs` by `which` and keeps the best `k` as wanted; the rest become shifts.
/// A conjugate pair cut in half by the split is kept whole on the wanted side.
pub fn select_shifts(eigs: &[C64], k: usize, which: Which) -> Result<ShiftPlan> {
    let m = eigs.len();
    if k == 0 || k >= m {
        return Err(Error::InvalidParameter(format!("need 0 < k < m, got k={k}, m={m}")));
    }
    let mut sorted = eigs.to_vec();
    which.sort(&mut sorted);
    let mut shifts = sorted.split_off(k);
    let mut wanted = sorted;

    let mut i = 0;
    while i < wanted.len() {
        let w = wanted[i];
        i += 1;
        if w.im == 0.0 {
            continue;
        }
        let have = wanted.iter().filter(|z| **z == w.conj()).count();
        let need = wanted.iter().filter(|z| **z == w).count();
        if have >= need {
            continue;
        }
        let partner = shifts
            .iter()
            .enumerate()
            .filter(|(_, s)| s.im != 0.0 && s.im.signum() != w.im.signum())
            .min_by(|a, b| (a.1 - w.conj()).norm().total_cmp(&(b.1 - w.conj()).norm()))
            .map(|(j, _)| j);
        if let Some(j) = partner {
            let s = shifts.remove(j);
            wanted.push(s);
        }
    }
    let k_effective = wanted.len();
    Ok(ShiftPlan {
        wanted,
        shifts,
        k_effective,
    })
}

/// Groups shifts into real shifts and conjugate pairs, in the order given.
enum ShiftGroup {
    Real(f64),
    Pair { sum: f64, prod: f64 },
}

fn group_shifts(shifts: &[C64]) -> Result<Vec<ShiftGroup>> {
    let mut used = vec![false; shifts.len()];
    let mut groups = Vec::new();
    for i in 0..shifts.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mu = shifts[i];
        if mu.im == 0.0 {
            groups.push(ShiftGroup::Real(mu.re));
            continue;
        }
        let partner = (0..shifts.len())
            .filter(|&j| !used[j] && shifts[j].im.signum() == -mu.im.signum())
            .min_by(|&a, &b| {
                (shifts[a] - mu.conj())
                    .norm()
                    .total_cmp(&(shifts[b] - mu.conj()).norm())
            });
        match partner {
            Some(j) if (shifts[j] - mu.conj()).norm() <= 1e-10 * mu.norm().max(1.0) => {
                used[j] = true;
                groups.push(ShiftGroup::Pair {
                    sum: 2.0 * mu.re,
                    prod: mu.norm_sqr(),
                });
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "shift {mu} has no conjugate partner; shifts must be conjugate-closed"
                )))
            }
        }
    }
    Ok(groups)
}

/// Applies the shifts as implicit QR steps on every unreduced diagonal block of `h`.
/// Returns `(H⁺, Q)` with `H⁺ = Qᵀ H Q` upper Hessenberg with nonnegative subdiagonal.
/// `Q` has lower bandwidth equal to the number of shifts.
pub fn shifted_qr_sweeps(h: &HessMatrix, shifts: &[C64]) -> Result<(HessMatrix, DMatrix<f64>)> {
    let m = h.nrows();
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let groups = group_shifts(shifts)?;
    let mut a = h.clone();
    let mut q = DMatrix::identity(m, m);
    let norm = a.norm().max(f64::MIN_POSITIVE);
    for g in &groups {
        let mut start = 0;
        while start + 1 < m {
            let mut end = start;
            while end + 1 < m {
                if negligible_subdiag(&a, end + 1, norm) {
                    a[(end + 1, end)] = 0.0;
                    break;
                }
                end += 1;
            }
            if end > start {
                match *g {
                    ShiftGroup::Real(mu) => single_step(&mut a, Some(&mut q), start, end, mu, Span::Full),
                    ShiftGroup::Pair { sum, prod } => {
                        double_step(&mut a, Some(&mut q), start, end, sum, prod, Span::Full)
                    }
                }
            }
            start = end + 1;
        }
    }
    for j in 0..m {
        for i in j + 2..m {
            a[(i, j)] = 0.0;
        }
    }
    for i in 0..m.saturating_sub(1) {
        if a[(i + 1, i)] < 0.0 {
            for j in 0..m {
                a[(i + 1, j)] = -a[(i + 1, j)];
            }
            for r in 0..m {
                a[(r, i + 1)] = -a[(r, i + 1)];
                q[(r, i + 1)] = -q[(r, i + 1)];
            }
        }
    }
    Ok((a, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|z| z.re).collect()
    }

    fn test_hessenberg(m: usize, seed: u64) -> DMatrix<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, m, |i, j| if i <= j + 1 { rng.random_range(-1.0..1.0) } else { 0.0 })
    }

    #[test]
    fn triangular_eigs() {
        let h = DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 4.0, 0.0, 1.0, 5.0, 0.0, 0.0, 2.0]);
        assert_eq!(sorted_re(hessenberg_eigs(&h).unwrap()), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rotation_eigs_and_vector() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut e = hessenberg_eigs(&h).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((e[1] - c(0.0, 1.0)).norm() < 1e-15);

        let y = hessenberg_eigvec(&h, c(0.0, 1.0)).unwrap();
        let expect = [c(1.0, 0.0) / 2f64.sqrt(), c(0.0, -1.0) / 2f64.sqrt()];
        let overlap = (y[0].conj() * expect[0] + y[1].conj() * expect[1]).norm();
        assert!((overlap - 1.0).abs() < 1e-10, "{y}");
    }

    #[test]
    fn triangular_eigvec_is_unit_vector() {
        let h = DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 4.0, 0.0, 1.0, 5.0, 0.0, 0.0, 2.0]);
        let y = hessenberg_eigvec(&h, c(3.0, 0.0)).unwrap();
        assert!((y[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!(y[1].norm() < 1e-10 && y[2].norm() < 1e-10);
    }

    #[test]
    fn eigvec_defining_property() {
        let h = test_hessenberg(15, 4);
        let hn = h.norm();
        let hc = h.map(|v| c(v, 0.0));
        for theta in hessenberg_eigs(&h).unwrap() {
            let y = hessenberg_eigvec(&h, theta).unwrap();
            let r = &hc * &y - &y * theta;
            assert!(r.norm() <= 1e-8 * hn, "theta {theta}: {}", r.norm());
            assert!((y.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigs_reject_empty() {
        assert!(hessenberg_eigs(&DMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn select_shifts_real() {
        let eigs: Vec<C64> = (1..=10).map(|v| c(v as f64, 0.0)).collect();
        let plan = select_shifts(&eigs, 3, Which::LM).unwrap();
        assert_eq!(plan.k_effective, 3);
        assert_eq!(sorted_re(plan.wanted.clone()), vec![8.0, 9.0, 10.0]);
        assert_eq!(
            sorted_re(plan.shifts.clone()),
            (1..=7).map(|v| v as f64).collect::<Vec<_>>()
        );
        let plan = select_shifts(&eigs, 3, Which::SR).unwrap();
        assert_eq!(sorted_re(plan.wanted), vec![1.0, 2.0, 3.0]);
        assert!(select_shifts(&eigs, 10, Which::LM).is_err());
        assert!(select_shifts(&eigs, 0, Which::LM).is_err());
    }

    #[test]
    fn select_shifts_keeps_pairs_together() {
        let eigs = vec![
            c(10.0, 0.0),
            c(9.0, 0.0),
            c(8.0, 0.0),
            c(5.0, 2.0),
            c(5.0, -2.0),
            c(1.0, 0.0),
            c(0.5, 0.0),
        ];
        let plan = select_shifts(&eigs, 4, Which::LM).unwrap();
        assert_eq!(plan.k_effective, 5);
        assert!(plan.wanted.contains(&c(5.0, 2.0)) && plan.wanted.contains(&c(5.0, -2.0)));
        assert_eq!(plan.wanted.len() + plan.shifts.len(), eigs.len());
    }

    #[test]
    fn sort_tie_breaks_by_imaginary_then_real() {
        let mut v = vec![c(0.0, 2.0), c(2.0, 0.0), c(0.0, -2.0), c(-2.0, 0.0)];
        Which::LM.sort(&mut v);
        assert_eq!(v, vec![c(0.0, -2.0), c(-2.0, 0.0), c(2.0, 0.0), c(0.0, 2.0)]);
    }

    #[test]
    fn which_parses() {
        assert_eq!("sm".parse::<Which>().unwrap(), Which::SM);
        assert!("XX".parse::<Which>().is_err());
    }

    #[test]
    fn no_shifts_on_triangular_is_identity() {
        let h = DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 4.0, 0.0, 1.0, 5.0, 0.0, 0.0, 2.0]);
        let (hp, q) = shifted_qr_sweeps(&h, &[]).unwrap();
        assert_eq!(hp, h);
        assert_eq!(q, DMatrix::identity(3, 3));
    }

    #[test]
    fn exact_real_shift_deflates() {
        // spectrum {1, 2, 3} by similarity of a triangular matrix
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 0.7, -0.3, 0.0, 2.0, 0.4, 0.0, 0.0, 3.0]);
        let x = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.3, 1.0, -0.2, 0.1, 0.5, 1.0]);
        let a = &x * t * x.clone().try_inverse().unwrap();
        let (h, _) = to_hessenberg(&a);
        let (hp, q) = shifted_qr_sweeps(&h, &[c(2.0, 0.0)]).unwrap();
        assert!(hp[(2, 1)].abs() <= 1e-12 * h.norm(), "{hp}");
        assert!((&q.transpose() * &q - DMatrix::identity(3, 3)).norm() < 1e-14);
        assert!((q.transpose() * &h * &q - &hp).norm() < 1e-13 * h.norm());
    }

    #[test]
    fn sweeps_rejects_unpaired_complex_shift() {
        let h = test_hessenberg(5, 1);
        assert!(shifted_qr_sweeps(&h, &[c(1.0, 1.0)]).is_err());
    }

    #[test]
    fn sweeps_structure() {
        let m = 12;
        let h = test_hessenberg(m, 9);
        let shifts = vec![c(0.3, 0.0), c(-0.2, 0.5), c(-0.2, -0.5), c(1.1, 0.0)];
        let p = shifts.len();
        let (hp, q) = shifted_qr_sweeps(&h, &shifts).unwrap();
        assert!(is_upper_hessenberg(&hp));
        assert!((&q.transpose() * &q - DMatrix::identity(m, m)).norm() <= 1e-12 * m as f64);
        assert!((q.transpose() * &h * &q - &hp).norm() <= 1e-12 * h.norm());
        for j in 0..m - p - 1 {
            assert_eq!(q[(m - 1, j)], 0.0);
        }
        for i in 0..m - 1 {
            assert!(hp[(i + 1, i)] >= 0.0);
        }
    }

    /// Householder reduction used only to build test inputs.
    fn to_hessenberg(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let h = a.clone().hessenberg();
        let (q, hm) = h.unpack();
        (hm, q)
    }
}
