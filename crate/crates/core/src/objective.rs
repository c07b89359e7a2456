//! The exponential moment functional `f(p) = int e^{p} dmu`, its derivatives,
//! and the concave dual objective `g(p) = <p, y> - f(p)`.
//!
//! Everything is evaluated in log space around `shift = max_i p(v_i)`, so the
//! tilted weights `w_i e^{p(v_i) - shift}` never overflow; `f` itself is only
//! formed once `log f` is known to be below [`LOG_EXP_LIMIT`].

use nalgebra::DMatrix;

use crate::basis::{dot, Basis, BasisSpec, MomentSequence, PolyCoeffs};
use crate::error::{MomentError, Result};
use crate::quadrature::QuadratureRule;
use crate::reduce::{block_reduce, map_nodes, ExecPolicy};

/// Largest `log f` that is exponentiated.
pub const LOG_EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFValue {
    pub log_f: f64,
    /// `max_i p(v_i)` over the quadrature nodes.
    pub shift: f64,
}

impl LogFValue {
    /// `f = exp(log_f)`; overflow is an error.
    pub fn value(&self) -> Result<f64> {
        if self.log_f > LOG_EXP_LIMIT {
            return Err(MomentError::Overflow(self.log_f));
        }
        Ok(self.log_f.exp())
    }
}

/// Dual objective value and its gradient `y - grad f(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Tilted weights `w_i e^{p(v_i) - shift}` and their sum.
struct Tilt {
    shift: f64,
    terms: Vec<f64>,
    sum: f64,
}

impl Tilt {
    fn log_f(&self) -> f64 {
        self.shift + self.sum.ln()
    }
}

pub(crate) struct SecondOrder {
    pub log_f: f64,
    pub grad: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

/// A basis paired with a quadrature rule, with the monomial vectors `L(v_i)`
/// cached at every node.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    basis: Basis,
    rule: QuadratureRule,
    /// Row-major `nodes x basis` matrix of monomial values.
    monomials: Vec<f64>,
    unit_direction: PolyCoeffs,
    policy: ExecPolicy,
}

impl ObjectiveContext {
    pub fn new(spec: BasisSpec, rule: QuadratureRule) -> Result<Self> {
        Self::with_policy(spec, rule, ExecPolicy::Sequential)
    }

    pub fn with_policy(spec: BasisSpec, rule: QuadratureRule, policy: ExecPolicy) -> Result<Self> {
        let basis = Basis::new(spec)?;
        if rule.dim() != spec.num_vars {
            return Err(MomentError::DimensionMismatch {
                expected: spec.num_vars,
                got: rule.dim(),
            });
        }
        let mut monomials = Vec::with_capacity(rule.len() * basis.len());
        for node in rule.nodes() {
            monomials.extend(basis.eval_monomials(node)?);
        }
        let unit_direction = basis.unit_direction();
        Ok(ObjectiveContext {
            basis,
            rule,
            monomials,
            unit_direction,
            policy,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn spec(&self) -> &BasisSpec {
        self.basis.spec()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    pub fn unit_direction(&self) -> &PolyCoeffs {
        &self.unit_direction
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Cached `L(v_i)`.
    pub fn monomial_row(&self, i: usize) -> &[f64] {
        let m = self.dim();
        &self.monomials[i * m..(i + 1) * m]
    }

    fn check_poly(&self, p: &PolyCoeffs) -> Result<()> {
        if p.spec() != self.spec() {
            return Err(MomentError::BasisMismatch(format!(
                "polynomial over {:?}, context over {:?}",
                p.spec(),
                self.spec()
            )));
        }
        Ok(())
    }

    fn check_moments(&self, y: &MomentSequence) -> Result<()> {
        if y.spec() != self.spec() {
            return Err(MomentError::BasisMismatch(format!(
                "moments over {:?}, context over {:?}",
                y.spec(),
                self.spec()
            )));
        }
        Ok(())
    }

    /// `p(v_i)` at every node.
    pub fn poly_values(&self, p: &PolyCoeffs) -> Result<Vec<f64>> {
        self.check_poly(p)?;
        let coeffs = p.coeffs();
        let values = map_nodes(self.rule.len(), self.policy, |i| {
            dot(self.monomial_row(i), coeffs)
        });
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MomentError::NonFinite(i));
        }
        Ok(values)
    }

    fn tilt(&self, p: &PolyCoeffs, offset: f64) -> Result<Tilt> {
        let values = self.poly_values(p)?;
        let shift = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) + offset;
        let weights = self.rule.weights();
        let terms = map_nodes(values.len(), self.policy, |i| {
            weights[i] * (values[i] - shift).exp()
        });
        let sum = block_reduce(
            terms.len(),
            self.policy,
            |r| terms[r].iter().sum::<f64>(),
            |a, b| a + b,
        )
        .unwrap_or(0.0);
        Ok(Tilt { shift, terms, sum })
    }

    /// `sum_i t_i L(v_i) / sum_i t_i`.
    fn tilted_mean(&self, tilt: &Tilt) -> Vec<f64> {
        let m = self.dim();
        let total = block_reduce(
            tilt.terms.len(),
            self.policy,
            |r| {
                let mut acc = vec![0.0; m];
                for i in r {
                    let t = tilt.terms[i];
                    for (a, l) in acc.iter_mut().zip(self.monomial_row(i)) {
                        *a += t * l;
                    }
                }
                acc
            },
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        )
        .unwrap_or_else(|| vec![0.0; m]);
        total.into_iter().map(|g| g / tilt.sum).collect()
    }

    /// Upper triangle of `sum_i t_i L(v_i) L(v_i)^T / sum_i t_i`, symmetrized.
    fn tilted_second_moment(&self, tilt: &Tilt) -> DMatrix<f64> {
        let m = self.dim();
        let packed = block_reduce(
            tilt.terms.len(),
            self.policy,
            |r| {
                let mut acc = vec![0.0; m * (m + 1) / 2];
                for i in r {
                    let t = tilt.terms[i];
                    let row = self.monomial_row(i);
                    let mut k = 0;
                    for a in 0..m {
                        let ta = t * row[a];
                        for b in a..m {
                            acc[k] += ta * row[b];
                            k += 1;
                        }
                    }
                }
                acc
            },
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        )
        .unwrap_or_else(|| vec![0.0; m * (m + 1) / 2]);
        let mut h = DMatrix::zeros(m, m);
        let mut k = 0;
        for a in 0..m {
            for b in a..m {
                let v = packed[k] / tilt.sum;
                h[(a, b)] = v;
                h[(b, a)] = v;
                k += 1;
            }
        }
        h
    }

    pub fn eval_logf(&self, p: &PolyCoeffs) -> Result<LogFValue> {
        self.eval_logf_offset(p, 0.0)
    }

    /// As [`eval_logf`](Self::eval_logf) with the stabilizing shift moved by
    /// `offset`; the result is the same up to rounding.
    pub fn eval_logf_offset(&self, p: &PolyCoeffs, offset: f64) -> Result<LogFValue> {
        let tilt = self.tilt(p, offset)?;
        Ok(LogFValue {
            log_f: tilt.log_f(),
            shift: tilt.shift,
        })
    }

    fn scale(&self, tilt: &Tilt) -> Result<f64> {
        LogFValue {
            log_f: tilt.log_f(),
            shift: tilt.shift,
        }
        .value()
    }

    /// `grad f(p)`: the moment sequence of `e^p dmu`.
    pub fn eval_grad(&self, p: &PolyCoeffs) -> Result<MomentSequence> {
        let tilt = self.tilt(p, 0.0)?;
        let f = self.scale(&tilt)?;
        let grad = self.tilted_mean(&tilt).into_iter().map(|g| f * g).collect();
        MomentSequence::new(*self.spec(), grad)
    }

    /// `grad^2 f(p)`, entry `(a, b) = int v^(a+b) e^p dmu`.
    pub fn eval_hessian(&self, p: &PolyCoeffs) -> Result<DMatrix<f64>> {
        let tilt = self.tilt(p, 0.0)?;
        let f = self.scale(&tilt)?;
        Ok(self.tilted_second_moment(&tilt) * f)
    }

    /// `grad f(p) / f(p)`, the moments of the probability measure
    /// proportional to `e^p dmu`. Never overflows.
    pub fn eval_normalized_moments(&self, p: &PolyCoeffs) -> Result<MomentSequence> {
        let tilt = self.tilt(p, 0.0)?;
        MomentSequence::new(*self.spec(), self.tilted_mean(&tilt))
    }

    /// `g(p) = <p, y> - f(p)` and `y - grad f(p)`.
    pub fn dual_objective(&self, p: &PolyCoeffs, y: &MomentSequence) -> Result<DualValue> {
        self.check_moments(y)?;
        let tilt = self.tilt(p, 0.0)?;
        let f = self.scale(&tilt)?;
        let mean = self.tilted_mean(&tilt);
        let gradient = y
            .values()
            .iter()
            .zip(&mean)
            .map(|(yv, g)| yv - f * g)
            .collect();
        Ok(DualValue {
            value: dot(p.coeffs(), y.values()) - f,
            gradient,
        })
    }

    /// `g(p)` alone.
    pub fn dual_value(&self, p: &PolyCoeffs, y: &MomentSequence) -> Result<f64> {
        self.check_moments(y)?;
        let f = self.eval_logf(p)?.value()?;
        Ok(dot(p.coeffs(), y.values()) - f)
    }

    /// `log f`, `grad f` and `grad^2 f` from a single tilt.
    pub(crate) fn second_order(&self, p: &PolyCoeffs) -> Result<SecondOrder> {
        let tilt = self.tilt(p, 0.0)?;
        let f = self.scale(&tilt)?;
        let grad = self.tilted_mean(&tilt).into_iter().map(|g| f * g).collect();
        let hessian = self.tilted_second_moment(&tilt) * f;
        Ok(SecondOrder {
            log_f: tilt.log_f(),
            grad,
            hessian,
        })
    }

    /// Moments of the reference measure, `grad f(0)`.
    pub fn reference_moments(&self) -> Result<MomentSequence> {
        self.eval_grad(&PolyCoeffs::zeros(*self.spec())?)
    }
}
