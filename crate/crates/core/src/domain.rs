//! Supports `K` and reference measures, plus the spherical sector used for
//! unbounded `K`.

use serde::{Deserialize, Serialize};

use crate::basis::MultiIndex;
use crate::error::{MomentError, Result};

/// Tolerance on `| |z| - 1 |` when testing sphere membership.
pub const SPHERE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    NonNegative,
    NonPositive,
}

impl Sign {
    pub fn admits(self, x: f64) -> bool {
        match self {
            Sign::NonNegative => x >= 0.0,
            Sign::NonPositive => x <= 0.0,
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::NonNegative => 1.0,
            Sign::NonPositive => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Compact box `[lower, upper]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    FullSpace { n: usize },
    /// `{x : sign_i * x_i >= 0}`.
    Orthant { signs: Vec<Sign> },
    /// Closed subset of the unit sphere in `signs.len()` coordinates; `None`
    /// leaves a coordinate unconstrained. Coordinate 0 is the homogenizing one.
    SphereSector { signs: Vec<Option<Sign>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMeasure {
    /// Lebesgue measure scaled to a probability measure on the box.
    LebesgueOnBox,
    /// Rotation-invariant probability measure of the sphere, restricted to the sector.
    RotationInvariantOnSector,
}

impl DomainSpec {
    pub fn unit_box(n: usize) -> Self {
        DomainSpec::Box {
            lower: vec![-1.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn full_sphere(coords: usize) -> Self {
        DomainSpec::SphereSector {
            signs: vec![None; coords],
        }
    }

    /// Dimension of the ambient space of points.
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box { lower, .. } => lower.len(),
            DomainSpec::FullSpace { n } => *n,
            DomainSpec::Orthant { signs } => signs.len(),
            DomainSpec::SphereSector { signs } => signs.len(),
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, DomainSpec::Box { .. } | DomainSpec::SphereSector { .. })
    }

    pub fn base_measure(&self) -> Option<BaseMeasure> {
        match self {
            DomainSpec::Box { .. } => Some(BaseMeasure::LebesgueOnBox),
            DomainSpec::SphereSector { .. } => Some(BaseMeasure::RotationInvariantOnSector),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Box { lower, upper } => {
                if lower.is_empty() {
                    return Err(MomentError::InvalidDomain("box has no coordinates".into()));
                }
                if lower.len() != upper.len() {
                    return Err(MomentError::InvalidDomain(
                        "box bounds have different lengths".into(),
                    ));
                }
                for (i, (l, u)) in lower.iter().zip(upper).enumerate() {
                    if !(l.is_finite() && u.is_finite() && l < u) {
                        return Err(MomentError::InvalidDomain(format!(
                            "box coordinate {i} needs finite lower < upper"
                        )));
                    }
                }
            }
            DomainSpec::FullSpace { n } if *n == 0 => {
                return Err(MomentError::InvalidDomain("full space needs n >= 1".into()));
            }
            DomainSpec::Orthant { signs } if signs.is_empty() => {
                return Err(MomentError::InvalidDomain("orthant needs n >= 1".into()));
            }
            DomainSpec::SphereSector { signs } if signs.len() < 2 => {
                return Err(MomentError::InvalidDomain(
                    "sphere sector needs at least two coordinates".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Fraction of the sphere covered by a sector: `2^-(number of sign constraints)`.
    pub fn sector_mass(&self) -> Option<f64> {
        match self {
            DomainSpec::SphereSector { signs } => {
                let k = signs.iter().filter(|s| s.is_some()).count();
                Some(0.5f64.powi(k as i32))
            }
            _ => None,
        }
    }

    /// Lebesgue volume of a box, or surface area of a whole sphere.
    pub(crate) fn base_volume(&self) -> Option<f64> {
        match self {
            DomainSpec::Box { lower, upper } => {
                Some(lower.iter().zip(upper).map(|(l, u)| u - l).product())
            }
            DomainSpec::SphereSector { signs } => Some(sphere_area(signs.len())),
            _ => None,
        }
    }
}

/// Surface area of the unit sphere in `coords`-dimensional space.
pub fn sphere_area(coords: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2 pi, |S^{k+1}| = 2 pi |S^{k-1}| / k
    let mut a = if coords.is_multiple_of(2) { 2.0 * std::f64::consts::PI } else { 2.0 };
    let mut k = if coords.is_multiple_of(2) { 2 } else { 1 };
    while k < coords {
        a *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    a
}

/// Closed-boundary membership. Sphere points may deviate from unit norm by
/// [`SPHERE_TOL`].
pub fn contains(domain: &DomainSpec, point: &[f64]) -> Result<bool> {
    if point.len() != domain.dim() {
        return Err(MomentError::DimensionMismatch {
            expected: domain.dim(),
            got: point.len(),
        });
    }
    Ok(match domain {
        DomainSpec::Box { lower, upper } => point
            .iter()
            .zip(lower.iter().zip(upper))
            .all(|(x, (l, u))| *l <= *x && *x <= *u),
        DomainSpec::FullSpace { .. } => point.iter().all(|x| x.is_finite()),
        DomainSpec::Orthant { signs } => signs.iter().zip(point).all(|(s, &x)| s.admits(x)),
        DomainSpec::SphereSector { signs } => {
            let norm = point.iter().map(|x| x * x).sum::<f64>().sqrt();
            (norm - 1.0).abs() <= SPHERE_TOL
                && signs
                    .iter()
                    .zip(point)
                    .all(|(s, &x)| s.is_none_or(|s| s.admits(x)))
        }
    })
}

/// Radial projection of `K x {1}` onto the sphere, closed. The homogenizing
/// coordinate comes first and is kept nonnegative; forms of even degree take
/// the same values on the antipodal half.
pub fn build_sector_from_k(k: &DomainSpec) -> Result<DomainSpec> {
    k.validate()?;
    match k {
        DomainSpec::FullSpace { n } => Ok(DomainSpec::full_sphere(n + 1)),
        DomainSpec::Orthant { signs } => {
            let mut out = Vec::with_capacity(signs.len() + 1);
            out.push(Some(Sign::NonNegative));
            out.extend(signs.iter().map(|s| Some(*s)));
            Ok(DomainSpec::SphereSector { signs: out })
        }
        DomainSpec::Box { .. } => Err(MomentError::InvalidDomain(
            "compact boxes are handled directly, not through a sphere sector".into(),
        )),
        DomainSpec::SphereSector { .. } => Err(MomentError::InvalidDomain(
            "already a sphere sector".into(),
        )),
    }
}

/// Map `x -> (1, x) / |(1, x)|` into the sector of `build_sector_from_k`.
pub fn lift_to_sphere(x: &[f64]) -> Vec<f64> {
    let norm = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
    std::iter::once(1.0 / norm)
        .chain(x.iter().map(|v| v / norm))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub alpha: MultiIndex,
    pub coeff: f64,
}

/// Weight of the reference measure relative to its base measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    Constant { value: f64 },
    /// `exp(q(x))` with `q` given by its terms in the point coordinates.
    ExpPoly { terms: Vec<PolyTerm> },
}

impl DensitySpec {
    pub fn weight(&self, point: &[f64]) -> f64 {
        match self {
            DensitySpec::Constant { value } => *value,
            DensitySpec::ExpPoly { terms } => terms
                .iter()
                .map(|t| t.coeff * t.alpha.eval(point))
                .sum::<f64>()
                .exp(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DensitySpec::Constant { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub density: DensitySpec,
    /// Rescale to total mass 1.
    pub normalized: bool,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec::uniform()
    }
}

impl MeasureSpec {
    /// Base probability measure (uniform on a box or on the whole sphere).
    pub fn uniform() -> Self {
        MeasureSpec {
            density: DensitySpec::Constant { value: 1.0 },
            normalized: true,
        }
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        match &self.density {
            DensitySpec::Constant { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return Err(MomentError::InvalidMeasure(
                        "constant density must be positive and finite".into(),
                    ));
                }
            }
            DensitySpec::ExpPoly { terms } => {
                for t in terms {
                    if t.alpha.num_vars() != domain.dim() {
                        return Err(MomentError::InvalidMeasure(format!(
                            "density term {} has {} exponents, domain has dimension {}",
                            t.alpha,
                            t.alpha.num_vars(),
                            domain.dim()
                        )));
                    }
                    if !t.coeff.is_finite() {
                        return Err(MomentError::InvalidMeasure(
                            "density coefficient is not finite".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
