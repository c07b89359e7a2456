//! Maximization of the dual objective `g(p) = <p, y> - f(p)`.
//!
//! When the supremum is attained, `grad f(p*) = y`, which certifies that `y`
//! lies in the interior of the moment cone and gives the barrier value
//! `f*(y) = g(p*)`. On the boundary and outside the cone the supremum is
//! `+inf`; the solver reports that as [`SolveStatus::Unbounded`] once the
//! iterates run past the divergence thresholds while still ascending. That is
//! numerical evidence, not a proof.
//!
//! Newton steps are taken in coordinates whitened by the Cholesky factor of
//! `grad^2 f(0)` (the moment matrix of the reference measure), which removes
//! most of the ill-conditioning of the monomial basis.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::{dot, Basis, BasisMode, MomentSequence, MultiIndex, PolyCoeffs};
use crate::error::{MomentError, Result};
use crate::objective::ObjectiveContext;

/// Backtracking halvings before the line search gives up.
const MAX_BACKTRACKS: usize = 60;
/// Full Newton steps tried after the tolerance is met, kept only while they
/// reduce the residual.
const POLISH_STEPS: usize = 3;
const MAX_REGULARIZATION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Tolerance on `|y - grad f(p)|_inf / max(1, |y|_inf)`.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Divergence trigger on `|p|_inf`.
    pub divergence_norm: f64,
    /// Divergence trigger on `g(p)`.
    pub divergence_objective: f64,
    pub newton_regularization_floor: f64,
    pub armijo_slope: f64,
    pub backtrack_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grad_tol: 1e-8,
            max_iters: 200,
            divergence_norm: 1e4,
            divergence_objective: 1e6,
            newton_regularization_floor: 1e-12,
            armijo_slope: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_tol", self.grad_tol),
            ("divergence_norm", self.divergence_norm),
            ("divergence_objective", self.divergence_objective),
            ("newton_regularization_floor", self.newton_regularization_floor),
            ("armijo_slope", self.armijo_slope),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(MomentError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.max_iters == 0 {
            return Err(MomentError::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(MomentError::InvalidConfig(
                "backtrack_factor must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Supremum attained: `y` is in the interior of the cone.
    Interior,
    /// Objective kept increasing past the divergence thresholds.
    Unbounded,
    /// Neither certificate within the iteration budget.
    Inconclusive,
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step_size: f64,
    pub p_norm: f64,
    pub regularization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Maximizer (interior only).
    pub p_star: Option<PolyCoeffs>,
    /// `f*(y) = <p*, y> - f(p*)` (interior only).
    pub fstar: Option<f64>,
    /// Relative gradient residual at the last iterate.
    pub residual: f64,
    /// Objective at the last iterate.
    pub objective: f64,
    /// Last iterate, whatever the verdict.
    pub last_iterate: PolyCoeffs,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub message: String,
}

/// Lower-triangular factor `L` of `grad^2 f(0) = L L^T`.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    factor: DMatrix<f64>,
}

impl Preconditioner {
    pub fn new(ctx: &ObjectiveContext) -> Result<Self> {
        let h0 = ctx.eval_hessian(&PolyCoeffs::zeros(*ctx.spec())?)?;
        let chol = Cholesky::new(h0).ok_or(MomentError::Preconditioner)?;
        Ok(Preconditioner { factor: chol.l() })
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// `L^{-1} v`.
    fn whiten(&self, v: &DVector<f64>) -> DVector<f64> {
        self.factor
            .solve_lower_triangular(v)
            .expect("nonsingular factor")
    }

    /// `L^{-T} v`.
    fn unwhiten(&self, v: &DVector<f64>) -> DVector<f64> {
        self.factor
            .tr_solve_lower_triangular(v)
            .expect("nonsingular factor")
    }

    /// `L^{-1} H L^{-T}`, symmetrized.
    fn congruence(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        let a = self
            .factor
            .solve_lower_triangular(h)
            .expect("nonsingular factor");
        let b = self
            .factor
            .solve_lower_triangular(&a.transpose())
            .expect("nonsingular factor");
        (&b + b.transpose()) * 0.5
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Iterate {
    p: PolyCoeffs,
    objective: f64,
    gradient: Vec<f64>,
    hessian: DMatrix<f64>,
}

impl Iterate {
    fn at(ctx: &ObjectiveContext, p: PolyCoeffs, y: &MomentSequence) -> Result<Self> {
        let so = ctx.second_order(&p)?;
        let f = so.log_f.exp();
        let gradient = y.values().iter().zip(&so.grad).map(|(a, b)| a - b).collect();
        Ok(Iterate {
            objective: dot(p.coeffs(), y.values()) - f,
            p,
            gradient,
            hessian: so.hessian,
        })
    }
}

struct NewtonStep {
    direction: Vec<f64>,
    slope: f64,
    regularization: f64,
}

fn newton_step(pre: &Preconditioner, it: &Iterate, cfg: &SolverConfig) -> Result<NewtonStep> {
    let m = it.gradient.len();
    let gq = pre.whiten(&DVector::from_column_slice(&it.gradient));
    let hq = pre.congruence(&it.hessian);
    let mut lambda = cfg.newton_regularization_floor;
    let chol: Cholesky<f64, Dyn> = loop {
        let shifted = &hq + DMatrix::identity(m, m) * lambda;
        if let Some(c) = Cholesky::new(shifted) {
            break c;
        }
        lambda *= 10.0;
        if lambda > MAX_REGULARIZATION {
            return Err(MomentError::InvalidArgument(
                "Newton system could not be regularized".into(),
            ));
        }
    };
    let dq = chol.solve(&gq);
    let slope = gq.dot(&dq);
    let dp = pre.unwhiten(&dq);
    Ok(NewtonStep {
        direction: dp.iter().copied().collect(),
        slope,
        regularization: lambda,
    })
}

fn residual_of(gradient: &[f64], y_scale: f64) -> f64 {
    norm_inf(gradient) / y_scale
}

/// Moves `p` by `t * direction`; `None` when the trial overflows.
fn trial(
    ctx: &ObjectiveContext,
    p: &PolyCoeffs,
    direction: &[f64],
    t: f64,
    y: &MomentSequence,
) -> Result<Option<(PolyCoeffs, f64)>> {
    let coeffs: Vec<f64> = p
        .coeffs()
        .iter()
        .zip(direction)
        .map(|(a, d)| a + t * d)
        .collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Ok(None);
    }
    let q = PolyCoeffs::new(*p.spec(), coeffs)?;
    match ctx.dual_value(&q, y) {
        Ok(v) => Ok(Some((q, v))),
        Err(MomentError::Overflow(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Maximizes `<p, y> - f(p)` from `p = 0` by damped Newton.
pub fn fenchel_solve(
    ctx: &ObjectiveContext,
    y: &MomentSequence,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if y.spec() != ctx.spec() {
        return Err(MomentError::BasisMismatch(format!(
            "moments over {:?}, context over {:?}",
            y.spec(),
            ctx.spec()
        )));
    }
    let pre = Preconditioner::new(ctx)?;
    let y_scale = norm_inf(y.values()).max(1.0);
    let mut it = Iterate::at(ctx, PolyCoeffs::zeros(*ctx.spec())?, y)?;
    let mut trace = Vec::new();
    let mut iterations = 0;

    let finish = |status, it: &Iterate, trace: Vec<TraceRecord>, iterations, message: String| {
        let residual = residual_of(&it.gradient, y_scale);
        let interior = status == SolveStatus::Interior;
        SolveReport {
            status,
            p_star: interior.then(|| it.p.clone()),
            fstar: interior.then_some(it.objective),
            residual,
            objective: it.objective,
            last_iterate: it.p.clone(),
            iterations,
            trace,
            message,
        }
    };

    // set once |p| passes the norm trigger while ascending; the ascent then
    // continues until the objective trigger fires or the budget runs out
    let mut diverging = false;
    let unbounded_message = |it: &Iterate, sustained: bool| {
        format!(
            "objective still increasing at |p| = {:.3e}, g = {:.3e}{}: f*(y) = +inf numerically",
            it.p.norm_inf(),
            it.objective,
            if sustained { " (sustained ascent past the norm trigger)" } else { "" }
        )
    };

    while iterations < cfg.max_iters {
        let residual = residual_of(&it.gradient, y_scale);
        if residual <= cfg.grad_tol {
            let mut polished = 0;
            while polished < POLISH_STEPS && iterations < cfg.max_iters {
                let step = newton_step(&pre, &it, cfg)?;
                let Some((q, _)) = trial(ctx, &it.p, &step.direction, 1.0, y)? else {
                    break;
                };
                let next = Iterate::at(ctx, q, y)?;
                let r = residual_of(&next.gradient, y_scale);
                if r >= residual_of(&it.gradient, y_scale) || next.objective < it.objective {
                    break;
                }
                iterations += 1;
                polished += 1;
                trace.push(TraceRecord {
                    iteration: iterations,
                    objective: next.objective,
                    grad_norm: r,
                    step_size: 1.0,
                    p_norm: next.p.norm_inf(),
                    regularization: step.regularization,
                });
                it = next;
            }
            return Ok(finish(
                SolveStatus::Interior,
                &it,
                trace,
                iterations,
                "gradient matches the moments: supremum attained".into(),
            ));
        }

        let step = newton_step(&pre, &it, cfg)?;
        let mut accepted = None;
        let mut t = 1.0;
        if step.slope > 0.0 {
            for _ in 0..MAX_BACKTRACKS {
                if let Some((q, value)) = trial(ctx, &it.p, &step.direction, t, y)? {
                    if value >= it.objective + cfg.armijo_slope * t * step.slope {
                        accepted = Some(q);
                        break;
                    }
                }
                t *= cfg.backtrack_factor;
            }
        }
        let Some(q) = accepted else {
            if diverging {
                let message = unbounded_message(&it, true);
                return Ok(finish(SolveStatus::Unbounded, &it, trace, iterations, message));
            }
            let why = if step.slope > 0.0 {
                "line search stalled"
            } else {
                "no ascent direction"
            };
            return Ok(finish(
                SolveStatus::Inconclusive,
                &it,
                trace,
                iterations,
                format!("{why} (residual {residual:.3e})"),
            ));
        };
        let next = Iterate::at(ctx, q, y)?;
        iterations += 1;
        let p_norm = next.p.norm_inf();
        trace.push(TraceRecord {
            iteration: iterations,
            objective: next.objective,
            grad_norm: residual_of(&next.gradient, y_scale),
            step_size: t,
            p_norm,
            regularization: step.regularization,
        });
        let ascending =
            next.objective > it.objective && dot(&next.gradient, &step.direction) > 0.0;
        it = next;
        if !ascending {
            diverging = false;
            continue;
        }
        if it.objective > cfg.divergence_objective {
            let message = unbounded_message(&it, false);
            return Ok(finish(SolveStatus::Unbounded, &it, trace, iterations, message));
        }
        if p_norm > cfg.divergence_norm {
            diverging = true;
        }
    }
    if diverging {
        let message = unbounded_message(&it, true);
        return Ok(finish(SolveStatus::Unbounded, &it, trace, iterations, message));
    }
    Ok(finish(
        SolveStatus::Inconclusive,
        &it,
        trace,
        iterations,
        format!(
            "iteration budget exhausted (residual {:.3e}, objective {:.6e})",
            residual_of(&it.gradient, y_scale),
            it.objective
        ),
    ))
}

/// `f*(y)` and `grad f*(y) = p*`, defined on the interior of the cone only.
pub fn barrier_eval(
    ctx: &ObjectiveContext,
    y: &MomentSequence,
    cfg: &SolverConfig,
) -> Result<(f64, PolyCoeffs)> {
    let report = fenchel_solve(ctx, y, cfg)?;
    match (report.status, report.fstar, report.p_star) {
        (SolveStatus::Interior, Some(f), Some(p)) => Ok((f, p)),
        (status, ..) => Err(MomentError::NotInBarrierDomain(format!(
            "outside barrier domain ({status:?}): {}",
            report.message
        ))),
    }
}

/// Witness of a negative direction of the moment matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdWitness {
    /// Degree-`d` monomials indexing the rows of the moment matrix.
    pub indices: Vec<MultiIndex>,
    /// Unit eigenvector for the smallest eigenvalue.
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum NecessaryCheck {
    Pass { min_eigenvalue: f64 },
    Fail { witness: PsdWitness },
}

impl NecessaryCheck {
    pub fn passed(&self) -> bool {
        matches!(self, NecessaryCheck::Pass { .. })
    }
}

/// Moment matrix `M_d(y)` with entries `y_(a+b)`, `|a|, |b| <= d`.
pub fn moment_matrix(y: &MomentSequence) -> Result<(Vec<MultiIndex>, DMatrix<f64>)> {
    let spec = *y.spec();
    if spec.mode != BasisMode::AllDegrees {
        return Err(MomentError::BasisMismatch(
            "moment matrix needs an all-degrees sequence".into(),
        ));
    }
    let full = Basis::new(spec)?;
    let rows: Vec<MultiIndex> = full
        .indices()
        .iter()
        .filter(|a| a.degree() <= spec.half_degree())
        .cloned()
        .collect();
    let k = rows.len();
    let m = DMatrix::from_fn(k, k, |i, j| {
        let idx = full.index_of(&rows[i].add(&rows[j])).expect("degree <= 2d");
        y.values()[idx]
    });
    Ok((rows, m))
}

/// PSD test of the moment matrix, a necessary condition for `y` to lie in
/// the closed moment cone.
pub fn necessary_condition_check(y: &MomentSequence) -> Result<NecessaryCheck> {
    let (rows, m) = moment_matrix(y)?;
    let trace = m.trace();
    let eig = SymmetricEigen::new(m);
    let (imin, &min) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    if min >= -1e-10 * trace {
        return Ok(NecessaryCheck::Pass { min_eigenvalue: min });
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(NecessaryCheck::Fail {
        witness: PsdWitness {
            indices: rows,
            vector: v,
            eigenvalue: min,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use crate::domain::{DomainSpec, MeasureSpec};
    use crate::quadrature::build_box_rule;

    fn box_ctx(n: usize, degree: u32) -> ObjectiveContext {
        let rule = build_box_rule(&DomainSpec::unit_box(n), &MeasureSpec::uniform(), degree as usize + 10).unwrap();
        ObjectiveContext::new(BasisSpec::all_degrees(n, degree), rule).unwrap()
    }

    #[test]
    fn reference_moments_are_a_fixed_point() {
        let ctx = box_ctx(1, 4);
        let y = ctx.reference_moments().unwrap();
        let r = fenchel_solve(&ctx, &y, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Interior);
        assert!(r.p_star.unwrap().norm_inf() < 1e-7);
        assert!((r.fstar.unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn doubled_moments_shift_by_log_two() {
        let ctx = box_ctx(1, 4);
        let y = ctx.reference_moments().unwrap().scaled(2.0);
        let r = fenchel_solve(&ctx, &y, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Interior);
        let p = r.p_star.unwrap();
        assert!((p.coeffs()[0] - 2f64.ln()).abs() < 1e-9);
        assert!(p.coeffs()[1..].iter().all(|c| c.abs() < 1e-9));
        let expected = 2.0 * 2f64.ln() - 2.0;
        assert!((r.fstar.unwrap() - expected).abs() < 1e-9);
        assert!((expected + 0.613706).abs() < 1e-6);
    }

    #[test]
    fn dirac_sequence_diverges() {
        let ctx = box_ctx(1, 4);
        let v: f64 = 0.3;
        let y = MomentSequence::new(*ctx.spec(), (0..5).map(|k| v.powi(k)).collect()).unwrap();
        let r = fenchel_solve(&ctx, &y, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded, "{}", r.message);
        assert!(r.p_star.is_none() && r.fstar.is_none());
    }

    #[test]
    fn non_psd_sequence_diverges() {
        let ctx = box_ctx(1, 2);
        let y = MomentSequence::new(*ctx.spec(), vec![1.0, 0.0, -1.0]).unwrap();
        let r = fenchel_solve(&ctx, &y, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded, "{}", r.message);
        assert!(barrier_eval(&ctx, &y, &SolverConfig::default()).is_err());
    }

    #[test]
    fn tight_budget_is_inconclusive() {
        let ctx = box_ctx(1, 4);
        let y = MomentSequence::new(*ctx.spec(), vec![1.0, 0.5, 0.4, 0.3, 0.25]).unwrap();
        let cfg = SolverConfig {
            max_iters: 1,
            ..SolverConfig::default()
        };
        let r = fenchel_solve(&ctx, &y, &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::Inconclusive);
        assert!(r.residual > cfg.grad_tol);
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            backtrack_factor: 1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            grad_tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn psd_check_on_lebesgue_moments() {
        let y = MomentSequence::new(
            BasisSpec::all_degrees(1, 4),
            vec![1.0, 0.0, 1.0 / 3.0, 0.0, 0.2],
        )
        .unwrap();
        let (_, m) = moment_matrix(&y).unwrap();
        assert_eq!(m[(0, 2)], 1.0 / 3.0);
        assert_eq!(m[(2, 2)], 0.2);
        assert!(necessary_condition_check(&y).unwrap().passed());
    }

    #[test]
    fn psd_check_rejects_negative_second_moment() {
        let y = MomentSequence::new(BasisSpec::all_degrees(1, 2), vec![1.0, 0.0, -1.0]).unwrap();
        match necessary_condition_check(&y).unwrap() {
            NecessaryCheck::Fail { witness } => {
                assert_eq!(witness.indices, vec![MultiIndex::new(vec![0]), MultiIndex::new(vec![1])]);
                assert!(witness.vector[0].abs() < 1e-12);
                assert!((witness.vector[1] - 1.0).abs() < 1e-12);
                assert!((witness.eigenvalue + 1.0).abs() < 1e-12);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn psd_check_accepts_dirac() {
        let v: f64 = -0.7;
        let y = MomentSequence::new(BasisSpec::all_degrees(1, 4), (0..5).map(|k| v.powi(k)).collect()).unwrap();
        assert!(necessary_condition_check(&y).unwrap().passed());
    }
}
