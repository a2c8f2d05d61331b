//! The restarted driver: extend, pick exact shifts, sweep, truncate, and watch the
//! sketched residuals.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::arnoldi::{arnoldi_build, residual_check, ArnoldiFactorization, LinearOperator};
use crate::basis::{norm2, Basis};
use crate::dense::{hessenberg_eigs, hessenberg_eigvec, select_shifts, shifted_qr_sweeps, ShiftPlan, Which, C64};
use crate::error::{Error, Result};
use crate::ortho::{OrthoMethod, OrthoState, BREAKDOWN_TOL};
use crate::sketch::{make_sketch, measure_embedding, stream_rng, SketchKind, SketchOperator};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

const START_VECTOR_TAG: u64 = 0x7374_6172_7476_6563;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiraConfig {
    /// Number of wanted eigenpairs.
    pub nev: usize,
    /// Krylov dimension reached before each restart.
    pub ncv: usize,
    pub which: Which,
    /// Threshold on the sketched residual.
    pub tol: f64,
    pub max_outer: usize,
    pub sketch: SketchKind,
    /// Defaults to `4 * ncv`.
    pub sketch_dim: Option<usize>,
    pub seed: u64,
    /// Nonzeros per column for the sparse sign sketch.
    pub zeta: Option<usize>,
    pub ortho: OrthoMethod,
    /// Supplementary Ritz pairs carried along with the wanted ones.
    pub extra: usize,
    /// Require the supplementary pairs to converge as well.
    pub converge_on_extra: bool,
    /// Compare `sres / |θ|` with `tol` instead of `sres`.
    pub relative_tol: bool,
    /// Recompute the restart invariants after every restart and record them in the trace.
    pub check_restarts: bool,
    /// Estimate the embedding quality of the final basis (one dense QR of `V`).
    pub estimate_embedding: bool,
    /// Start vector; a seeded Gaussian vector when absent.
    #[serde(skip)]
    pub v1: Option<Vec<f64>>,
}

impl Default for RiraConfig {
    fn default() -> Self {
        RiraConfig {
            nev: 6,
            ncv: 30,
            which: Which::LM,
            tol: 1e-10,
            max_outer: 300,
            sketch: SketchKind::SparseSign,
            sketch_dim: None,
            seed: 0,
            zeta: None,
            ortho: OrthoMethod::Rgs,
            extra: 4,
            converge_on_extra: false,
            relative_tol: false,
            check_restarts: false,
            estimate_embedding: false,
            v1: None,
        }
    }
}

impl RiraConfig {
    pub fn effective_sketch_dim(&self, n: usize) -> usize {
        match self.sketch {
            SketchKind::Identity => n,
            _ => self.sketch_dim.unwrap_or(4 * self.ncv),
        }
    }

    /// Number of Ritz pairs kept through each restart.
    pub fn kept(&self) -> usize {
        (self.nev + self.extra).min(self.ncv.saturating_sub(2))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.nev == 0 {
            return bad("nev must be positive".into());
        }
        if self.ncv < 3 || self.nev > self.ncv - 2 {
            return bad(format!("need nev <= ncv - 2, got nev={}, ncv={}", self.nev, self.ncv));
        }
        if self.ncv >= n {
            return bad(format!("ncv={} must be smaller than n={n}", self.ncv));
        }
        let d = self.effective_sketch_dim(n);
        if self.ncv + 1 > d {
            return Err(Error::SketchCapacity {
                requested: self.ncv + 1,
                capacity: d,
            });
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_outer == 0 {
            return bad("max_outer must be positive".into());
        }
        if let Some(v1) = &self.v1 {
            if v1.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v1.len(),
                });
            }
        }
        Ok(())
    }

    pub fn build_sketch(&self, n: usize) -> Result<SketchOperator> {
        match self.sketch {
            SketchKind::Identity => Ok(SketchOperator::identity(n)),
            kind => make_sketch(kind, n, self.effective_sketch_dim(n), self.seed, self.zeta),
        }
    }

    /// The configured start vector, or the seeded Gaussian default.
    pub fn start_vector(&self, n: usize) -> Vec<f64> {
        match &self.v1 {
            Some(v) => v.clone(),
            None => {
                let mut rng = stream_rng(self.seed, START_VECTOR_TAG, 0);
                (0..n).map(|_| rng.sample(StandardNormal)).collect()
            }
        }
    }
}

/// Ritz pair `(θ, y)` of `H` with its sketched residual `β |e_kᵀy|`.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub theta: C64,
    /// Unit eigenvector of `H`.
    pub y: DVector<C64>,
    pub sres: f64,
    /// Ritz vector `V y`, when materialized.
    pub x: Option<Vec<C64>>,
}

impl RitzPair {
    /// `‖A x − θ x‖ / ‖x‖`, materializing `x` if needed.
    pub fn true_residual<A: LinearOperator + ?Sized>(&self, a: &A, fact: Option<&ArnoldiFactorization>) -> Result<f64> {
        let x = match (&self.x, fact) {
            (Some(x), _) => x.clone(),
            (None, Some(f)) => ritz_vector(f, &self.y),
            (None, None) => return Err(Error::InvalidParameter("Ritz vector not materialized".into())),
        };
        true_residual(a, self.theta, &x)
    }
}

/// `‖A x − θ x‖₂ / ‖x‖₂` for complex `x`.
pub fn true_residual<A: LinearOperator + ?Sized>(a: &A, theta: C64, x: &[C64]) -> Result<f64> {
    let re: Vec<f64> = x.iter().map(|z| z.re).collect();
    let im: Vec<f64> = x.iter().map(|z| z.im).collect();
    let are = a.apply(&re)?;
    let aim = a.apply(&im)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let r = C64::new(are[i], aim[i]) - theta * x[i];
        num += r.norm_sqr();
        den += x[i].norm_sqr();
    }
    Ok((num / den).sqrt())
}

/// `V y`.
pub fn ritz_vector(fact: &ArnoldiFactorization, y: &DVector<C64>) -> Vec<C64> {
    let v = fact.v();
    let yr = y.map(|z| z.re);
    let yi = y.map(|z| z.im);
    let xr = &v * yr;
    let xi = &v * yi;
    xr.iter().zip(xi.iter()).map(|(a, b)| C64::new(*a, *b)).collect()
}

/// `β |e_kᵀ y|` for each pair.
pub fn sketched_residuals(fact: &ArnoldiFactorization, pairs: &[(C64, DVector<C64>)]) -> Vec<f64> {
    let beta = fact.beta();
    pairs.iter().map(|(_, y)| beta * y[y.len() - 1].norm()).collect()
}

/// Ritz pairs of `fact` for the given eigenvalues of its `H`.
pub fn ritz_pairs(fact: &ArnoldiFactorization, thetas: &[C64], materialize: bool) -> Result<Vec<RitzPair>> {
    let h = fact.h();
    let beta = fact.beta();
    thetas
        .iter()
        .map(|&theta| {
            let y = hessenberg_eigvec(&h, theta)?;
            let sres = beta * y[y.len() - 1].norm();
            let x = materialize.then(|| ritz_vector(fact, &y));
            Ok(RitzPair { theta, y, sres, x })
        })
        .collect()
}

/// Implicit restart: applies the shifts of `plan` to `fact` and truncates to
/// `plan.k_effective` columns. The sketch of the new basis and of the new residual are
/// assembled from the old sketches, without applying Ω again.
pub fn restart(fact: &ArnoldiFactorization, plan: &ShiftPlan) -> Result<ArnoldiFactorization> {
    let m = fact.k();
    let kk = plan.k_effective;
    if plan.shifts.is_empty() {
        return Ok(fact.clone());
    }
    if kk == 0 || kk >= m || kk + plan.shifts.len() != m {
        return Err(Error::InvalidParameter(format!(
            "shift plan of size {}+{} does not match factorization of size {m}",
            kk,
            plan.shifts.len()
        )));
    }
    let (hp, qacc) = shifted_qr_sweeps(&fact.h(), &plan.shifts)?;
    let q_lead = qacc.columns(0, kk + 1);
    let vq = fact.v() * q_lead;
    let sq = fact.s() * q_lead;

    let sigma = hp[(kk, kk - 1)];
    let tail = qacc[(m - 1, kk - 1)] * fact.beta();
    let mut r = vq.column(kk) * sigma;
    let mut sr = sq.column(kk) * sigma;
    if let (Some(vn), Some(sn)) = (fact.v_next(), fact.s_next()) {
        r.axpy(tail, &DVector::from_column_slice(vn), 1.0);
        sr.axpy(tail, &DVector::from_column_slice(sn), 1.0);
    }
    let op = fact.op().clone();
    if cfg!(debug_assertions) {
        let direct = op.apply(r.as_slice())?;
        let dn = norm2(&direct);
        if dn > 0.0 && (sr.norm() - dn).abs() > 1e-6 * dn {
            log::warn!(
                "assembled sketch of the restart residual drifted: {:.3e} vs {:.3e}; re-sketching",
                sr.norm(),
                dn
            );
            sr = DVector::from_vec(direct);
        }
    }
    let beta = sr.norm();
    let state_old = fact.state();
    let mut v = Basis::from_matrix(&vq.columns(0, kk).into_owned());
    let mut s = Basis::from_matrix(&sq.columns(0, kk).into_owned());
    let h_new = hp.view((0, 0), (kk, kk)).into_owned();
    let broke = !(beta > BREAKDOWN_TOL * state_old.max_input());
    let beta = if broke {
        0.0
    } else {
        v.push((r / beta).as_slice());
        s.push((sr / beta).as_slice());
        beta
    };
    let state = OrthoState::from_parts(op, fact.method(), v, s, state_old.max_input())?;
    Ok(ArnoldiFactorization::from_parts(state, h_new, beta, fact.matvecs()))
}

/// Post-restart invariants: sketch orthonormality, Ω-orthogonality of the residual
/// and the relation residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartCheck {
    /// `‖S̃ᵀS̃ − I‖_F`
    pub sts_dev: f64,
    /// `‖S̃ᵀ Ω v₊‖₂`, the residual direction's sketch against the basis sketch.
    pub residual_orth: f64,
    /// `‖A V − V H − β v₊ e_kᵀ‖_F / ‖A V‖_F`
    pub relation: f64,
}

impl RestartCheck {
    pub fn max(&self) -> f64 {
        self.sts_dev.max(self.residual_orth).max(self.relation)
    }
}

pub fn check_factorization<A: LinearOperator + ?Sized>(fact: &ArnoldiFactorization, a: &A) -> Result<RestartCheck> {
    let s = fact.s();
    let k = fact.k();
    let sts_dev = (s.transpose() * s - DMatrix::<f64>::identity(k, k)).norm();
    let residual_orth = match fact.s_next() {
        Some(sn) => (s.transpose() * DVector::from_column_slice(sn)).norm(),
        None => 0.0,
    };
    let relation = residual_check(fact, a)?;
    Ok(RestartCheck {
        sts_dev,
        residual_orth,
        relation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiraStatus {
    Converged,
    MaxIter,
    /// The Krylov space became invariant before `nev` pairs were available.
    Breakdown,
}

/// Plain complex number for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub wanted: Vec<ComplexValue>,
    pub sres: Vec<f64>,
    pub max_sres: f64,
    pub min_sres: f64,
    pub shifts: Vec<ComplexValue>,
    pub k_effective: usize,
    pub matvecs: usize,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restart_check: Option<RestartCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub theta: ComplexValue,
    pub sres: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RiraReport {
    pub status: RiraStatus,
    /// Wanted pairs, most wanted first.
    pub pairs: Vec<RitzPair>,
    pub trace: Vec<TraceEntry>,
    pub notes: Vec<String>,
    pub matvecs: usize,
    pub seconds: f64,
    pub n: usize,
    pub sketch_dim: usize,
    /// Measured embedding distortion of the final basis, if requested.
    pub embedding_estimate: Option<f64>,
    /// Final factorization, before any restart that would have followed.
    pub factorization: ArnoldiFactorization,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema_version: u32,
    status: RiraStatus,
    n: usize,
    sketch_dim: usize,
    iterations: usize,
    matvecs: usize,
    seconds: f64,
    embedding_estimate: Option<f64>,
    notes: &'a [String],
    config: Option<&'a RiraConfig>,
    pairs: Vec<PairSummary>,
    trace: &'a [TraceEntry],
}

impl RiraReport {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.theta).collect()
    }

    /// True residual of every reported pair.
    pub fn true_residuals<A: LinearOperator + ?Sized>(&self, a: &A) -> Result<Vec<f64>> {
        self.pairs
            .iter()
            .map(|p| p.true_residual(a, Some(&self.factorization)))
            .collect()
    }

    pub fn to_json(&self, config: Option<&RiraConfig>, true_residuals: Option<&[f64]>) -> Result<String> {
        let pairs = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| PairSummary {
                theta: p.theta.into(),
                sres: p.sres,
                true_residual: true_residuals.map(|t| t[i]),
            })
            .collect();
        let json = ReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            status: self.status,
            n: self.n,
            sketch_dim: self.sketch_dim,
            iterations: self.iterations(),
            matvecs: self.matvecs,
            seconds: self.seconds,
            embedding_estimate: self.embedding_estimate,
            notes: &self.notes,
            config,
            pairs,
            trace: &self.trace,
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    /// Trace rows `iter, max_sres, min_sres, matvecs, seconds`.
    pub fn write_trace_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            iter: usize,
            max_sres: f64,
            min_sres: f64,
            matvecs: usize,
            seconds: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for t in &self.trace {
            w.serialize(Row {
                iter: t.iter,
                max_sres: t.max_sres,
                min_sres: t.min_sres,
                matvecs: t.matvecs,
                seconds: t.seconds,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Orders eigenvalues by `which` and returns the first `count`, keeping the order.
fn most_wanted(eigs: &[C64], count: usize, which: Which) -> Vec<C64> {
    let mut v = eigs.to_vec();
    which.sort(&mut v);
    v.truncate(count);
    v
}

/// Computes `nev` eigenpairs of `a` by randomized implicitly restarted Arnoldi.
pub fn rira_solve<A: LinearOperator + ?Sized>(a: &A, config: &RiraConfig) -> Result<RiraReport> {
    let n = a.dim();
    config.validate(n)?;
    let op = Arc::new(config.build_sketch(n)?);
    let v1 = config.start_vector(n);
    rira_solve_with(a, config, op, &v1)
}

/// [`rira_solve`] with an explicit sketch and start vector.
pub fn rira_solve_with<A: LinearOperator + ?Sized>(
    a: &A,
    config: &RiraConfig,
    op: Arc<SketchOperator>,
    v1: &[f64],
) -> Result<RiraReport> {
    let n = a.dim();
    config.validate(n)?;
    if op.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: op.n(),
        });
    }
    let start = Instant::now();
    let m = config.ncv;
    let k = config.nev;
    let kept = config.kept();
    let mut notes = Vec::new();
    if kept < k + config.extra {
        notes.push(format!(
            "supplementary pairs reduced from {} to {} so that nev + extra <= ncv - 2",
            config.extra,
            kept - k
        ));
    }
    let checked = if config.converge_on_extra { kept } else { k };

    let mut fact = arnoldi_build(a, v1, kept, op.clone(), config.ortho)?;
    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut pending_check: Option<RestartCheck> = None;
    let mut iter = 0usize;
    let (status, pairs) = loop {
        iter += 1;
        if !fact.is_breakdown() && fact.k() < m {
            fact.extend(a, m - fact.k())?;
        }
        let size = fact.k();
        let h = fact.h();
        let eigs = hessenberg_eigs(&h)?;

        let plan = if !fact.is_breakdown() && size == m {
            Some(select_shifts(&eigs, kept, config.which)?)
        } else {
            None
        };
        let wanted: Vec<C64> = match &plan {
            Some(p) => p.wanted.clone(),
            None => most_wanted(&eigs, kept.min(size), config.which),
        };
        let pairs = ritz_pairs(&fact, &wanted, false)?;
        let ncheck = checked.min(pairs.len());
        let crit: Vec<f64> = pairs[..ncheck]
            .iter()
            .map(|p| {
                if config.relative_tol {
                    p.sres / p.theta.norm().max(f64::MIN_POSITIVE)
                } else {
                    p.sres
                }
            })
            .collect();
        let max_sres = crit.iter().cloned().fold(0.0, f64::max);
        let min_sres = crit.iter().cloned().fold(f64::INFINITY, f64::min);
        trace.push(TraceEntry {
            iter,
            wanted: wanted.iter().map(|&z| z.into()).collect(),
            sres: pairs.iter().map(|p| p.sres).collect(),
            max_sres,
            min_sres,
            shifts: plan
                .as_ref()
                .map(|p| p.shifts.iter().map(|&z| z.into()).collect())
                .unwrap_or_default(),
            k_effective: plan.as_ref().map(|p| p.k_effective).unwrap_or(size),
            matvecs: fact.matvecs(),
            seconds: start.elapsed().as_secs_f64(),
            restart_check: pending_check.take(),
        });
        log::debug!(
            "outer iteration {iter}: max sres {max_sres:.3e}, matvecs {}",
            fact.matvecs()
        );

        if fact.is_breakdown() {
            notes.push(format!(
                "Krylov space became invariant at dimension {size}; reported Ritz pairs are exact up to rounding"
            ));
            let status = if pairs.len() >= k {
                RiraStatus::Converged
            } else {
                RiraStatus::Breakdown
            };
            break (status, pairs);
        }
        if pairs.len() >= checked && max_sres <= config.tol {
            break (RiraStatus::Converged, pairs);
        }
        if iter >= config.max_outer {
            break (RiraStatus::MaxIter, pairs);
        }
        let plan = plan.expect("full-size factorization has a shift plan");
        fact = restart(&fact, &plan)?;
        if config.check_restarts {
            pending_check = Some(check_factorization(&fact, a)?);
        }
    };

    let mut pairs = pairs;
    pairs.truncate(k);
    for p in &mut pairs {
        p.x = Some(ritz_vector(&fact, &p.y));
    }
    if status == RiraStatus::Converged {
        notes.push(
            "sketched residuals below tol imply true residuals below sqrt((1+eps)/(1-eps)) * tol, \
             with eps the embedding distortion of the Krylov space"
                .into(),
        );
    }
    if fact.embedding_warnings() > 0 {
        notes.push(format!(
            "{} basis vectors had a sketch distortion outside [1/2, 2]",
            fact.embedding_warnings()
        ));
    }
    let embedding_estimate = if config.estimate_embedding && fact.k() > 0 {
        match measure_embedding(&op, &fact.v().into_owned()) {
            Ok(e) => Some(e),
            Err(e) => {
                notes.push(format!("embedding estimate unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    Ok(RiraReport {
        status,
        pairs,
        trace,
        notes,
        matvecs: fact.matvecs(),
        seconds: start.elapsed().as_secs_f64(),
        n,
        sketch_dim: op.d(),
        embedding_estimate,
        factorization: fact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matio::CsrMatrix;

    fn diag(n: usize) -> CsrMatrix {
        CsrMatrix::from_diagonal(&(1..=n).map(|v| v as f64).collect::<Vec<_>>())
    }

    #[test]
    fn config_validation() {
        let mut c = RiraConfig {
            nev: 5,
            ncv: 20,
            ..Default::default()
        };
        assert!(c.validate(500).is_ok());
        c.nev = 19;
        assert!(c.validate(500).is_err());
        c.nev = 5;
        c.sketch_dim = Some(20);
        assert!(matches!(c.validate(500), Err(Error::SketchCapacity { .. })));
        c.sketch_dim = None;
        c.tol = 0.0;
        assert!(c.validate(500).is_err());
        c.tol = 1e-8;
        assert!(c.validate(20).is_err());
    }

    #[test]
    fn extra_is_capped() {
        let c = RiraConfig {
            nev: 8,
            ncv: 12,
            extra: 4,
            ..Default::default()
        };
        assert_eq!(c.kept(), 10);
    }

    #[test]
    fn restart_without_shifts_is_identity() {
        let a = diag(100);
        let op = Arc::new(make_sketch(SketchKind::Gaussian, 100, 40, 2, None).unwrap());
        let v1 = vec![1.0; 100];
        let f = arnoldi_build(&a, &v1, 8, op, OrthoMethod::Rgs).unwrap();
        let plan = ShiftPlan {
            wanted: vec![],
            shifts: vec![],
            k_effective: 8,
        };
        let g = restart(&f, &plan).unwrap();
        assert_eq!(g.h_extended(), f.h_extended());
        assert_eq!(g.basis(), f.basis());
    }

    #[test]
    fn breakdown_residuals_are_zero() {
        let a = CsrMatrix::identity(30);
        let op = Arc::new(SketchOperator::identity(30));
        let f = arnoldi_build(&a, &vec![1.0; 30], 4, op, OrthoMethod::Rcgs2).unwrap();
        let pairs = ritz_pairs(&f, &[C64::new(1.0, 0.0)], true).unwrap();
        assert_eq!(
            sketched_residuals(&f, &[(pairs[0].theta, pairs[0].y.clone())]),
            vec![0.0]
        );
    }

    #[test]
    fn small_diagonal_solve() {
        let a = diag(200);
        let c = RiraConfig {
            nev: 4,
            ncv: 20,
            tol: 1e-9,
            sketch: SketchKind::Gaussian,
            seed: 3,
            ..Default::default()
        };
        let rep = rira_solve(&a, &c).unwrap();
        assert_eq!(rep.status, RiraStatus::Converged);
        let mut got: Vec<f64> = rep.eigenvalues().iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip([197.0, 198.0, 199.0, 200.0]) {
            assert!((g - e).abs() < 1e-6, "{got:?}");
        }
        let json = rep.to_json(Some(&c), None).unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        let mut csv = Vec::new();
        rep.write_trace_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("iter,max_sres,min_sres,matvecs,seconds"));
        assert_eq!(text.lines().count(), rep.iterations() + 1);
    }
}
