//! Randomized implicitly restarted Arnoldi for sparse non-symmetric eigenproblems.
//!
//! The Krylov basis is orthonormal with respect to a random sketch `Ω` rather than
//! the Euclidean inner product, so orthogonalization works on short sketched
//! vectors. Restarts use exact shifts and update the sketched basis in place.
//!
//! ```no_run
//! use rira::{gen_toy_spectrum, rira_solve, RiraConfig, SketchKind, Which};
//!
//! let a = gen_toy_spectrum(800)?;
//! let config = RiraConfig {
//!     nev: 10,
//!     ncv: 50,
//!     which: Which::LM,
//!     tol: 1e-8,
//!     sketch: SketchKind::Gaussian,
//!     sketch_dim: Some(200),
//!     ..Default::default()
//! };
//! let report = rira_solve(&a, &config)?;
//! for pair in &report.pairs {
//!     println!("{} {:.2e}", pair.theta, pair.sres);
//! }
//! # Ok::<(), rira::Error>(())
//! ```

pub mod arnoldi;
pub mod basis;
pub mod dense;
pub mod error;
pub mod matio;
pub mod ortho;
pub mod sketch;
pub mod solver;

pub use arnoldi::{arnoldi_build, arnoldi_extend, residual_check, ArnoldiFactorization, LinearOperator};
pub use basis::Basis;
pub use dense::{
    hessenberg_eigs, hessenberg_eigvec, select_shifts, shifted_qr_sweeps, HessMatrix, ShiftPlan, Which, C64,
};
pub use error::{Error, Result};
pub use matio::{
    gen_singular_grid, gen_toy_spectrum, read_matrix_market, read_matrix_market_from, write_matrix_market,
    write_matrix_market_file, CsrMatrix,
};
pub use ortho::{
    condition_trace, sketch_orthonormalize, write_condition_csv, ConditionRow, OrthoMethod, OrthoState, PushOutcome,
    SketchQr,
};
pub use sketch::{make_sketch, make_sketch_with_budget, measure_embedding, SketchKind, SketchOperator};
pub use solver::{
    check_factorization, restart, rira_solve, rira_solve_with, ritz_pairs, ritz_vector, sketched_residuals,
    true_residual, RestartCheck, RiraConfig, RiraReport, RiraStatus, RitzPair, TraceEntry,
};
