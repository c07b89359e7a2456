//! The three commands, as library calls returning a report and an exit code.

use std::time::{SystemTime, UNIX_EPOCH};

use momentcone::basis::homogenize_sequence;
use momentcone::domain::{build_sector_from_k, DomainSpec};
use momentcone::quadrature::{
    build_box_rule, build_sector_rule, build_sector_rule_monte_carlo, default_box_points,
    default_sector_order,
};
use momentcone::reconstruct::{verify_moments, DensityModel};
use momentcone::solver::{fenchel_solve, necessary_condition_check, SolveReport};
use momentcone::{
    Basis, BasisSpec, ExecPolicy, MomentSequence, ObjectiveContext, PolyCoeffs, QuadratureRule,
    SolveStatus, SolverConfig,
};

use crate::instance::{Instance, MomentEntry};
use crate::report::{
    Command, Homogenization, IndexResidual, InstanceSummary, ModelFile, QuadratureKind,
    QuadratureSummary, ReportFile, ResolvedConfig, Verification, SCHEMA_VERSION, TOOL, VERSION,
};
use crate::CliError;

pub const EXIT_INTERIOR: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNBOUNDED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

/// Sphere rules with more coordinates fall back to Monte Carlo.
const MAX_GAUSS_COORDS: usize = 4;
/// Extra points per axis or angle for the independent verification rule.
const VERIFY_EXTRA: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub quad_order: Option<usize>,
    pub solver: SolverConfig,
    pub policy: ExecPolicy,
    pub trace: bool,
    pub verify_tol: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            quad_order: None,
            solver: SolverConfig::default(),
            policy: ExecPolicy::Sequential,
            trace: false,
            verify_tol: 1e-6,
            seed: 0,
            samples: 200_000,
        }
    }
}

pub fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Interior => EXIT_INTERIOR,
        SolveStatus::Unbounded => EXIT_UNBOUNDED,
        SolveStatus::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// What gets solved: `y` on a box, or the homogenized `y~` on a sphere sector.
pub struct Problem {
    pub ctx: ObjectiveContext,
    pub target: MomentSequence,
    pub homogenization: Option<Homogenization>,
    pub quadrature: QuadratureSummary,
    verify_rule: QuadratureRule,
    pub verify_quadrature: QuadratureSummary,
}

fn summarize(kind: QuadratureKind, order: usize, rule: &QuadratureRule, seed: Option<u64>) -> QuadratureSummary {
    QuadratureSummary {
        kind,
        order,
        nodes: rule.len(),
        exactness_degree: rule.exactness_degree(),
        seed,
    }
}

fn entries(spec: &BasisSpec, values: &[f64]) -> Result<Vec<MomentEntry>, CliError> {
    let basis = Basis::new(*spec)?;
    Ok(basis
        .indices()
        .iter()
        .zip(values)
        .map(|(a, &value)| MomentEntry {
            alpha: a.clone(),
            value,
        })
        .collect())
}

pub fn prepare(inst: &Instance, opts: &RunOptions) -> Result<Problem, CliError> {
    let degree = inst.file.degree;
    let measure = &inst.file.measure;
    if let DomainSpec::Box { .. } = inst.domain {
        let order = opts.quad_order.unwrap_or(default_box_points(degree));
        let rule = build_box_rule(&inst.domain, measure, order)?;
        let verify_rule = build_box_rule(&inst.domain, measure, order + VERIFY_EXTRA)?;
        let quadrature = summarize(QuadratureKind::BoxGauss, order, &rule, None);
        let verify_quadrature = summarize(QuadratureKind::BoxGauss, order + VERIFY_EXTRA, &verify_rule, None);
        let ctx = ObjectiveContext::with_policy(*inst.moments.spec(), rule, opts.policy)?;
        return Ok(Problem {
            ctx,
            target: inst.moments.clone(),
            homogenization: None,
            quadrature,
            verify_rule,
            verify_quadrature,
        });
    }
    let sector = build_sector_from_k(&inst.domain)?;
    let target = homogenize_sequence(&inst.moments)?;
    let coords = sector.dim();
    let (rule, quadrature, verify_rule, verify_quadrature) = if coords <= MAX_GAUSS_COORDS {
        let order = opts.quad_order.unwrap_or(default_sector_order(degree));
        let rule = build_sector_rule(&sector, measure, order)?;
        let verify_rule = build_sector_rule(&sector, measure, order + VERIFY_EXTRA)?;
        let q = summarize(QuadratureKind::SectorGauss, order, &rule, None);
        let vq = summarize(QuadratureKind::SectorGauss, order + VERIFY_EXTRA, &verify_rule, None);
        (rule, q, verify_rule, vq)
    } else {
        let samples = opts.quad_order.unwrap_or(opts.samples);
        let rule = build_sector_rule_monte_carlo(&sector, measure, samples, opts.seed)?;
        let vseed = opts.seed.wrapping_add(1);
        let verify_rule = build_sector_rule_monte_carlo(&sector, measure, 2 * samples, vseed)?;
        let q = summarize(QuadratureKind::SectorMonteCarlo, samples, &rule, Some(opts.seed));
        let vq = summarize(QuadratureKind::SectorMonteCarlo, 2 * samples, &verify_rule, Some(vseed));
        (rule, q, verify_rule, vq)
    };
    let ctx = ObjectiveContext::with_policy(*target.spec(), rule, opts.policy)?;
    let homogenization = Some(Homogenization {
        sector,
        moments: entries(target.spec(), target.values())?,
    });
    Ok(Problem {
        ctx,
        target,
        homogenization,
        quadrature,
        verify_rule,
        verify_quadrature,
    })
}

fn verification(problem: &Problem, p: &PolyCoeffs, opts: &RunOptions) -> Result<(DensityModel, Verification), CliError> {
    let y = &problem.target;
    let scale = y.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 10.0 * opts.solver.grad_tol * scale;
    let model = DensityModel::new(p.clone(), problem.ctx.rule())?;
    let own = verify_moments(&model, problem.ctx.rule(), y, tol)?;
    let other = verify_moments(&model, &problem.verify_rule, y, opts.verify_tol)?;
    let basis = problem.ctx.basis();
    Ok((
        model,
        Verification {
            tol,
            residuals: basis
                .indices()
                .iter()
                .zip(&own.residuals)
                .map(|(a, &residual)| IndexResidual {
                    alpha: a.clone(),
                    residual,
                })
                .collect(),
            max_residual: own.max_residual,
            passed: own.passed,
            independent_max_residual: other.max_residual,
            independent_passed: other.passed,
        },
    ))
}

pub struct Outcome {
    pub report: ReportFile,
    pub model: Option<ModelFile>,
    pub exit_code: i32,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn run(command: Command, inst: &Instance, opts: &RunOptions) -> Result<Outcome, CliError> {
    let problem = prepare(inst, opts)?;
    let solve: SolveReport = fenchel_solve(&problem.ctx, &problem.target, &opts.solver)?;
    let necessary_check = necessary_condition_check(&inst.moments)?;
    let mut exit = exit_code(solve.status);
    let mut message = solve.message.clone();
    if let Some(h) = &problem.homogenization {
        message = format!(
            "solved the homogenized sequence on the sphere sector ({} coordinates); {message}",
            h.sector.dim()
        );
    }

    let mut verify = None;
    let mut model = None;
    if let Some(p) = &solve.p_star {
        let (m, v) = verification(&problem, p, opts)?;
        if command == Command::Reconstruct {
            if !(v.passed && v.independent_passed) {
                exit = EXIT_VERIFY_FAILED;
                message = format!("{message}; moment verification failed");
            }
            model = Some(ModelFile {
                schema_version: SCHEMA_VERSION,
                tool: TOOL.into(),
                version: VERSION.into(),
                model: m,
                coefficients: entries(p.spec(), p.coeffs())?,
                homogenized: problem.homogenization.is_some(),
                verification: v.clone(),
            });
        }
        verify = Some(v);
    } else if command == Command::Barrier {
        message = format!("outside barrier domain ({:?}): {message}", solve.status);
    }

    let report = ReportFile {
        schema_version: SCHEMA_VERSION,
        tool: TOOL.into(),
        version: VERSION.into(),
        command,
        config: ResolvedConfig {
            solver: opts.solver,
            policy: opts.policy,
            quadrature: problem.quadrature.clone(),
            verify_quadrature: problem.verify_quadrature.clone(),
            verify_tol: opts.verify_tol,
            trace: opts.trace,
        },
        instance: InstanceSummary {
            n: inst.file.n,
            degree: inst.file.degree,
            domain: inst.domain.clone(),
        },
        homogenization: problem.homogenization.clone(),
        status: solve.status,
        exit_code: exit,
        fstar: solve.fstar,
        residual: solve.residual,
        objective: solve.objective,
        iterations: solve.iterations,
        p_star: match &solve.p_star {
            Some(p) => Some(entries(p.spec(), p.coeffs())?),
            None => None,
        },
        necessary_check,
        verification: verify,
        trace: opts.trace.then(|| solve.trace.clone()),
        message,
        generated_at_unix: unix_now(),
    };
    Ok(Outcome {
        report,
        model,
        exit_code: exit,
    })
}
