//! Report and model files written by the commands.

use momentcone::domain::DomainSpec;
use momentcone::solver::{NecessaryCheck, TraceRecord};
use momentcone::{DensityModel, ExecPolicy, MultiIndex, SolveStatus, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::instance::MomentEntry;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "momentcone";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Reconstruct,
    Barrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    BoxGauss,
    SectorGauss,
    SectorMonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSummary {
    pub kind: QuadratureKind,
    /// Points per axis (box), points per angle (sector) or samples.
    pub order: usize,
    pub nodes: usize,
    pub exactness_degree: u32,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub solver: SolverConfig,
    pub policy: ExecPolicy,
    pub quadrature: QuadratureSummary,
    /// Independent rule used for verification.
    pub verify_quadrature: QuadratureSummary,
    pub verify_tol: f64,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub degree: u32,
    pub domain: DomainSpec,
}

/// The sphere problem actually solved for unbounded domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Homogenization {
    /// Homogenizing coordinate first.
    pub sector: DomainSpec,
    pub moments: Vec<MomentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResidual {
    pub alpha: MultiIndex,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    /// Tolerance on the solver's own rule: `10 * tol * max(1, |y|_inf)`.
    pub tol: f64,
    pub residuals: Vec<IndexResidual>,
    pub max_residual: f64,
    pub passed: bool,
    /// Same check on the finer, independent rule, against `verify_tol`.
    pub independent_max_residual: f64,
    pub independent_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: ResolvedConfig,
    pub instance: InstanceSummary,
    pub homogenization: Option<Homogenization>,
    pub status: SolveStatus,
    pub exit_code: i32,
    pub fstar: Option<f64>,
    pub residual: f64,
    pub objective: f64,
    pub iterations: usize,
    /// Coefficients of `p*` (over the homogenized basis when homogenized).
    pub p_star: Option<Vec<MomentEntry>>,
    pub necessary_check: NecessaryCheck,
    pub verification: Option<Verification>,
    pub trace: Option<Vec<TraceRecord>>,
    pub message: String,
    pub generated_at_unix: u64,
}

impl ReportFile {
    /// Copy with the timestamp zeroed, for comparisons.
    pub fn without_timestamp(&self) -> ReportFile {
        ReportFile {
            generated_at_unix: 0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub model: DensityModel,
    pub coefficients: Vec<MomentEntry>,
    pub homogenized: bool,
    pub verification: Verification,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
