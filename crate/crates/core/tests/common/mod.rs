#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rira::{ArnoldiFactorization, CsrMatrix, LinearOperator, SketchOperator, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// Shuffled diagonal `1..=n` plus about `per_row` normal off-diagonal entries per row of
/// size `coupling`. Mostly real, well separated spectrum.
pub fn spread_sparse(n: usize, per_row: usize, coupling: f64, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let mut diag: Vec<f64> = (1..=n).map(|v| v as f64).collect();
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        diag.swap(i, j);
    }
    let mut trip: Vec<(usize, usize, f64)> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
    for i in 0..n {
        for _ in 0..per_row {
            let j = r.random_range(0..n);
            let v: f64 = r.sample(StandardNormal);
            trip.push((i, j, coupling * v));
        }
    }
    CsrMatrix::from_triplets(n, trip).unwrap()
}

/// Sparse matrix whose spectrum has many complex conjugate pairs: a real diagonal in
/// `[0, 4]` and a non-symmetric normal perturbation.
pub fn complex_sparse(n: usize, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let mut trip = Vec::new();
    for i in 0..n {
        trip.push((i, i, 4.0 * i as f64 / n as f64));
        for _ in 0..4 {
            let j = r.random_range(0..n);
            let v: f64 = r.sample(StandardNormal);
            trip.push((i, j, 0.5 * v));
        }
    }
    CsrMatrix::from_triplets(n, trip).unwrap()
}

pub fn random_hessenberg(m: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    DMatrix::from_fn(m, m, |i, j| if i <= j + 1 { r.sample(StandardNormal) } else { 0.0 })
}

/// `Ω z` for complex `z`.
pub fn sketch_complex(op: &SketchOperator, z: &[C64]) -> Vec<C64> {
    let re: Vec<f64> = z.iter().map(|c| c.re).collect();
    let im: Vec<f64> = z.iter().map(|c| c.im).collect();
    let sr = op.apply(&re).unwrap();
    let si = op.apply(&im).unwrap();
    sr.iter().zip(&si).map(|(a, b)| C64::new(*a, *b)).collect()
}

pub fn complex_norm(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `A x − θ x`
pub fn complex_residual<A: LinearOperator + ?Sized>(a: &A, theta: C64, x: &[C64]) -> Vec<C64> {
    let re: Vec<f64> = x.iter().map(|c| c.re).collect();
    let im: Vec<f64> = x.iter().map(|c| c.im).collect();
    let ar = a.apply(&re).unwrap();
    let ai = a.apply(&im).unwrap();
    (0..x.len()).map(|i| C64::new(ar[i], ai[i]) - theta * x[i]).collect()
}

/// `[V, v₊]` as a dense matrix.
pub fn basis_with_next(f: &ArnoldiFactorization) -> DMatrix<f64> {
    let mut m = f.v().into_owned();
    if let Some(vn) = f.v_next() {
        let k = m.ncols();
        m = m.insert_column(k, 0.0);
        m.set_column(k, &DVector::from_column_slice(vn));
    }
    m
}

/// Largest column-wise difference `max_j ‖a_j − b_j‖ / max(1, ‖b_j‖)`.
pub fn columnwise_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (0..a.ncols())
        .map(|j| (a.column(j) - b.column(j)).norm() / b.column(j).norm().max(1.0))
        .fold(0.0, f64::max)
}
