//! Slow, dense reference computations for cross-checking the solver in tests.
//!
//! Everything here orthonormalizes with plain Euclidean classical Gram-Schmidt
//! (two passes) and never touches the sketched orthogonalization code.

use nalgebra::{DMatrix, DVector};
use rira::dense::{hessenberg_eigs, hessenberg_eigvec, select_shifts, shifted_qr_sweeps};
use rira::{Error, LinearOperator, Result, RiraConfig, RiraStatus, C64};

/// Euclidean Arnoldi factorization `A V = V H + r e_kᵀ`.
#[derive(Debug, Clone)]
pub struct DenseArnoldi {
    pub v: DMatrix<f64>,
    /// `k × k` Hessenberg matrix.
    pub h: DMatrix<f64>,
    /// Residual vector `r = h_{k+1,k} v_{k+1}`.
    pub r: DVector<f64>,
    /// Size at which the Krylov space became invariant.
    pub breakdown: Option<usize>,
}

impl DenseArnoldi {
    pub fn beta(&self) -> f64 {
        self.r.norm()
    }

    /// `‖A V − V H − r e_kᵀ‖_F / ‖A V‖_F`
    pub fn relation_residual<A: LinearOperator + ?Sized>(&self, a: &A) -> f64 {
        let av = apply_columns(a, &self.v);
        let mut res = &av - &self.v * &self.h;
        let k = self.v.ncols();
        let mut last = res.column_mut(k - 1);
        last -= &self.r;
        res.norm() / av.norm()
    }
}

pub fn apply_columns<A: LinearOperator + ?Sized>(a: &A, v: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.dim(), v.ncols());
    for j in 0..v.ncols() {
        let y = a.apply(v.column(j).as_slice()).expect("dimension checked by caller");
        out.column_mut(j).copy_from_slice(&y);
    }
    out
}

/// Two-pass classical Gram-Schmidt of `w` against the first `j` columns of `v`.
/// Returns the coefficients and the orthogonalized vector.
fn cgs2(v: &DMatrix<f64>, j: usize, w: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let basis = v.columns(0, j);
    let c1 = basis.tr_mul(w);
    let w1 = w - &basis * &c1;
    let c2 = basis.tr_mul(&w1);
    let w2 = &w1 - &basis * &c2;
    (c1 + c2, w2)
}

/// Euclidean Arnoldi with two-pass classical Gram-Schmidt, starting from `v1 / ‖v1‖`.
pub fn dense_arnoldi<A: LinearOperator + ?Sized>(a: &A, v1: &[f64], k: usize) -> Result<DenseArnoldi> {
    let n = a.dim();
    if v1.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v1.len(),
        });
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("need 0 < k < n, got k={k}, n={n}")));
    }
    let start = DVector::from_column_slice(v1);
    let nrm = start.norm();
    if nrm == 0.0 {
        return Err(Error::ZeroStartVector);
    }
    let mut v = DMatrix::zeros(n, k);
    v.set_column(0, &(start / nrm));
    let h = DMatrix::zeros(k, k);
    let mut fact = DenseArnoldi {
        v,
        h,
        r: DVector::zeros(n),
        breakdown: None,
    };
    extend_from(a, &mut fact, 0, k);
    Ok(fact)
}

/// Continues the factorization from column `from` (whose basis vector is in place)
/// up to size `k`.
fn extend_from<A: LinearOperator + ?Sized>(a: &A, fact: &mut DenseArnoldi, from: usize, k: usize) {
    let n = a.dim();
    for j in from..k {
        let w = DVector::from_vec(a.apply(fact.v.column(j).as_slice()).expect("dimension"));
        let win = w.norm();
        let (c, q) = cgs2(&fact.v, j + 1, &w);
        for i in 0..=j {
            fact.h[(i, j)] = c[i];
        }
        let beta = q.norm();
        if beta <= 1e-14 * win {
            fact.breakdown = Some(j + 1);
            fact.v = fact.v.columns(0, j + 1).into_owned();
            fact.h = fact.h.view((0, 0), (j + 1, j + 1)).into_owned();
            fact.r = DVector::zeros(n);
            return;
        }
        if j + 1 < k {
            fact.h[(j + 1, j)] = beta;
            fact.v.set_column(j + 1, &(q / beta));
        } else {
            fact.r = q;
        }
    }
}

/// `Π (A − μᵢ I) v` for a conjugate-closed root list, using the real quadratic
/// `A² − 2 Re(μ) A + |μ|² I` for each conjugate pair.
pub fn poly_apply<A: LinearOperator + ?Sized>(a: &A, roots: &[C64], v: &[f64]) -> Result<Vec<f64>> {
    let mut x = v.to_vec();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mu = roots[i];
        if mu.im == 0.0 {
            let ax = a.apply(&x)?;
            x = ax.iter().zip(&x).map(|(p, q)| p - mu.re * q).collect();
            continue;
        }
        let j = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&p, &q| (roots[p] - mu.conj()).norm().total_cmp(&(roots[q] - mu.conj()).norm()))
            .filter(|&j| (roots[j] - mu.conj()).norm() <= 1e-10 * mu.norm().max(1.0))
            .ok_or_else(|| Error::InvalidParameter(format!("root {mu} has no conjugate partner")))?;
        used[j] = true;
        let ax = a.apply(&x)?;
        let aax = a.apply(&ax)?;
        let (t, d) = (2.0 * mu.re, mu.norm_sqr());
        x = (0..x.len()).map(|r| aax[r] - t * ax[r] + d * x[r]).collect();
    }
    Ok(x)
}

/// Complex-arithmetic evaluation of `Π (A − μᵢ I) v`, one linear factor at a time.
pub fn poly_apply_complex<A: LinearOperator + ?Sized>(a: &A, roots: &[C64], v: &[f64]) -> Result<Vec<C64>> {
    let mut x: Vec<C64> = v.iter().map(|&t| C64::new(t, 0.0)).collect();
    for &mu in roots {
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let im: Vec<f64> = x.iter().map(|z| z.im).collect();
        let are = a.apply(&re)?;
        let aim = a.apply(&im)?;
        x = (0..x.len()).map(|r| C64::new(are[r], aim[r]) - mu * x[r]).collect();
    }
    Ok(x)
}

/// Orthonormal basis of the column span by Householder QR; errors if rank deficient.
fn orthonormal_basis(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = u.clone().qr();
    let r = qr.r();
    let scale = (0..u.ncols()).map(|j| u.column(j).norm()).fold(0.0, f64::max);
    for j in 0..u.ncols() {
        if r[(j, j)].abs() <= 1e-13 * scale {
            return Err(Error::RankDeficient(format!(
                "column {j} is dependent on the previous ones"
            )));
        }
    }
    Ok(qr.q())
}

/// Principal angles between the column spans of `u` and `w`, ascending.
///
/// Small angles come from sines and large ones from cosines, so both ends are accurate.
pub fn principal_angles(u: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<Vec<f64>> {
    if u.nrows() != w.nrows() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            got: w.nrows(),
        });
    }
    let qu = orthonormal_basis(u)?;
    let qw = orthonormal_basis(w)?;
    let cross = qu.transpose() * &qw;
    let mut cos: Vec<f64> = cross.singular_values().iter().map(|s| s.min(1.0)).collect();
    cos.sort_by(|a, b| b.total_cmp(a));
    let perp = &qw - &qu * &cross;
    let mut sin: Vec<f64> = perp.singular_values().iter().map(|s| s.min(1.0)).collect();
    sin.sort_by(f64::total_cmp);
    let count = cos.len().min(sin.len());
    Ok((0..count)
        .map(|i| {
            if cos[i] * cos[i] < 0.5 {
                cos[i].acos()
            } else {
                sin[i].asin()
            }
        })
        .collect())
}

/// Angle between two vectors, accurate near zero.
pub fn vector_angle(a: &[f64], b: &[f64]) -> f64 {
    let u = DMatrix::from_column_slice(a.len(), 1, a);
    let w = DMatrix::from_column_slice(b.len(), 1, b);
    principal_angles(&u, &w).map(|v| v[0]).unwrap_or(f64::NAN)
}

/// Eigenvalues of a general dense matrix by the library Schur decomposition.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<C64> {
    m.clone().complex_eigenvalues().iter().cloned().collect()
}

/// Largest distance in a greedy nearest matching of two eigenvalue lists of equal length.
pub fn match_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "eigenvalue lists differ in length");
    let mut free: Vec<C64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for &x in a {
        let (i, d) = free
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("nonempty");
        worst = worst.max(d);
        free.swap_remove(i);
    }
    worst
}

/// Result of [`deterministic_ira`].
#[derive(Debug, Clone)]
pub struct IraReport {
    pub status: RiraStatus,
    /// Wanted Ritz values, most wanted first.
    pub eigenvalues: Vec<C64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub matvecs: usize,
}

/// Euclidean implicitly restarted Arnoldi with exact shifts, driven by the same
/// configuration fields as the randomized solver (sketch settings are ignored).
pub fn deterministic_ira<A: LinearOperator + ?Sized>(a: &A, config: &RiraConfig) -> Result<IraReport> {
    let n = a.dim();
    let (k, m) = (config.nev, config.ncv);
    if k == 0 || k + 2 > m || m >= n {
        return Err(Error::InvalidParameter(format!(
            "need 0 < nev <= ncv - 2 < n, got {k}, {m}, {n}"
        )));
    }
    let kept = config.kept();
    let checked = if config.converge_on_extra { kept } else { k };
    let v1 = config.start_vector(n);
    let mut fact = dense_arnoldi(a, &v1, kept)?;
    let mut matvecs = fact.v.ncols();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if fact.breakdown.is_none() && fact.v.ncols() < m {
            let from = fact.v.ncols();
            let beta = fact.r.norm();
            let mut v = DMatrix::zeros(n, m);
            v.view_mut((0, 0), (n, from)).copy_from(&fact.v);
            v.set_column(from, &(&fact.r / beta));
            let mut h = DMatrix::zeros(m, m);
            h.view_mut((0, 0), (from, from)).copy_from(&fact.h);
            h[(from, from - 1)] = beta;
            fact.v = v;
            fact.h = h;
            extend_from(a, &mut fact, from, m);
            matvecs += fact.v.ncols() - from;
        }
        let size = fact.v.ncols();
        let eigs = hessenberg_eigs(&fact.h)?;
        let beta = fact.r.norm();
        let full = fact.breakdown.is_none() && size == m;
        let (wanted, plan) = if full {
            let plan = select_shifts(&eigs, kept, config.which)?;
            (plan.wanted.clone(), Some(plan))
        } else {
            let mut e = eigs.clone();
            config.which.sort(&mut e);
            e.truncate(kept.min(size));
            (e, None)
        };
        let residuals = wanted
            .iter()
            .map(|&t| hessenberg_eigvec(&fact.h, t).map(|y| beta * y[y.len() - 1].norm()))
            .collect::<Result<Vec<f64>>>()?;
        let ncheck = checked.min(residuals.len());
        let worst = residuals[..ncheck].iter().cloned().fold(0.0, f64::max);
        let done = fact.breakdown.is_some() || (residuals.len() >= checked && worst <= config.tol);
        if done || iterations >= config.max_outer {
            let status = if done {
                RiraStatus::Converged
            } else {
                RiraStatus::MaxIter
            };
            let mut eigenvalues = wanted;
            let mut residuals = residuals;
            eigenvalues.truncate(k);
            residuals.truncate(k);
            return Ok(IraReport {
                status,
                eigenvalues,
                residuals,
                iterations,
                matvecs,
            });
        }
        let plan = plan.expect("full factorization");
        let kk = plan.k_effective;
        let (hp, q) = shifted_qr_sweeps(&fact.h, &plan.shifts)?;
        let vq = &fact.v * q.columns(0, kk + 1);
        let r = vq.column(kk) * hp[(kk, kk - 1)] + &fact.r * q[(m - 1, kk - 1)];
        fact = DenseArnoldi {
            v: vq.columns(0, kk).into_owned(),
            h: hp.view((0, 0), (kk, kk)).into_owned(),
            r,
            breakdown: None,
        };
        if fact.r.norm() == 0.0 {
            fact.breakdown = Some(kk);
        }
    }
}
