//! The maximum-entropy representing measure `e^{p*} dmu` and its checks.

use serde::{Deserialize, Serialize};

use crate::basis::{eval_monomial_vector, Basis, BasisSpec, MomentSequence, PolyCoeffs};
use crate::domain::{contains, DomainSpec, MeasureSpec};
use crate::error::{MomentError, Result};
use crate::objective::ObjectiveContext;
use crate::quadrature::QuadratureRule;

/// Density `e^{p*}` relative to the reference measure, plus what is needed to
/// turn it into a density relative to Lebesgue (box) or surface (sphere)
/// measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub p_star: PolyCoeffs,
    pub measure: MeasureSpec,
    pub domain: DomainSpec,
    /// Reference density per unit base measure, before the weight function:
    /// `density_scale / base_volume`.
    pub reference_scale: f64,
}

impl DensityModel {
    /// Model for `p` on the rule's domain and measure.
    pub fn new(p_star: PolyCoeffs, rule: &QuadratureRule) -> Result<Self> {
        p_star.spec().validate()?;
        if p_star.spec().num_vars != rule.dim() {
            return Err(MomentError::DimensionMismatch {
                expected: rule.dim(),
                got: p_star.spec().num_vars,
            });
        }
        let volume = rule.domain().base_volume().ok_or(MomentError::InvalidDomain(
            "density models need a compact domain".into(),
        ))?;
        Ok(DensityModel {
            p_star,
            measure: rule.measure().clone(),
            domain: rule.domain().clone(),
            reference_scale: rule.density_scale() / volume,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        self.p_star.spec()
    }
}

/// `e^{p*(x)}` times the reference density at `x`.
pub fn density_at(model: &DensityModel, x: &[f64]) -> Result<f64> {
    if !contains(&model.domain, x)? {
        return Err(MomentError::OutsideDomain(format!("{x:?}")));
    }
    let m = eval_monomial_vector(model.spec(), x)?;
    let p: f64 = m.iter().zip(model.p_star.coeffs()).map(|(a, b)| a * b).sum();
    Ok(p.exp() * model.measure.density.weight(x) * model.reference_scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// `|int x^a e^{p*} dmu - y_a|` in basis order.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Integrates the model's moments with `rule` and compares them to `y`.
pub fn verify_moments(
    model: &DensityModel,
    rule: &QuadratureRule,
    y: &MomentSequence,
    tol: f64,
) -> Result<VerifyReport> {
    if y.spec() != model.spec() {
        return Err(MomentError::BasisMismatch(
            "moment sequence and model use different bases".into(),
        ));
    }
    if rule.domain() != &model.domain || rule.measure() != &model.measure {
        return Err(MomentError::InvalidArgument(
            "verification rule discretizes a different measure".into(),
        ));
    }
    let ctx = ObjectiveContext::new(*model.spec(), rule.clone())?;
    let moments = ctx.eval_grad(&model.p_star)?;
    let residuals: Vec<f64> = moments
        .values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(VerifyReport {
        residuals,
        max_residual,
        tol,
        passed: max_residual <= tol,
    })
}

/// Normalized moments `s_beta = grad f(beta p) / f(beta p)` for each beta.
pub fn concentration_curve(
    ctx: &ObjectiveContext,
    p: &PolyCoeffs,
    betas: &[f64],
) -> Result<Vec<MomentSequence>> {
    if betas.is_empty() {
        return Err(MomentError::InvalidArgument("no betas given".into()));
    }
    let mut prev = 0.0;
    for &b in betas {
        if !(b.is_finite() && b > prev) {
            return Err(MomentError::InvalidArgument(
                "betas must be positive and strictly increasing".into(),
            ));
        }
        prev = b;
    }
    betas
        .iter()
        .map(|&b| ctx.eval_normalized_moments(&p.scaled(b)))
        .collect()
}

/// `max_a |s_a - v^a|`, the distance of a normalized moment vector to the
/// Dirac sequence at `v`.
pub fn distance_to_point(s: &MomentSequence, v: &[f64]) -> Result<f64> {
    let target = Basis::new(*s.spec())?.eval_monomials(v)?;
    Ok(s.values()
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
