//! Node/weight discretizations of the reference measure on boxes and sphere
//! sectors.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{contains, DomainSpec, MeasureSpec, Sign};
use crate::error::{MomentError, Result};
use crate::reduce::{block_reduce, map_nodes, tree_sum, ExecPolicy};

pub const MAX_NODES: u128 = 10_000_000;

/// Default number of Gauss points per box axis for degree bound `2d`.
pub fn default_box_points(max_degree: u32) -> usize {
    max_degree as usize + 10
}

/// Default number of Gauss points per angle on each orthant patch of a sector.
/// Leaves headroom beyond exactness for peaked densities `e^p`.
pub fn default_sector_order(max_degree: u32) -> usize {
    2 * max_degree as usize + 16
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampling {
    GaussProduct,
    MonteCarlo { seed: u64, samples: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// Box rules: polynomial exactness per axis (`2m - 1`). Sector rules: the
    /// nominal monomial degree resolved to 1e-10 (angular Gauss rules are not
    /// polynomially exact in Cartesian coordinates).
    exactness_degree: u32,
    domain: DomainSpec,
    measure: MeasureSpec,
    sampling: Sampling,
    /// Multiplier turning the weight function into a density relative to the
    /// base probability measure (1 / total mass when normalized).
    density_scale: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn exactness_degree(&self) -> u32 {
        self.exactness_degree
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Factor applied to the density weight function (1 / raw mass when
    /// normalized, else 1).
    pub fn density_scale(&self) -> f64 {
        self.density_scale
    }

    pub fn total_mass(&self) -> f64 {
        tree_sum(&self.weights)
    }

    /// Density of the reference measure with respect to Lebesgue measure on
    /// the box (surface measure on the sphere) at `x`.
    pub fn reference_density(&self, x: &[f64]) -> f64 {
        let volume = self.domain.base_volume().expect("compact rule domain");
        self.measure.density.weight(x) * self.density_scale / volume
    }

    /// Applies the density weight function and normalization to base weights.
    fn finish(
        nodes: Vec<Vec<f64>>,
        mut weights: Vec<f64>,
        exactness_degree: u32,
        domain: DomainSpec,
        measure: MeasureSpec,
        sampling: Sampling,
    ) -> Result<Self> {
        for (w, x) in weights.iter_mut().zip(&nodes) {
            *w *= measure.density.weight(x);
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(MomentError::InvalidMeasure(format!(
                "density weight at node {i} is not positive and finite"
            )));
        }
        let mut density_scale = 1.0;
        if measure.normalized {
            let mass = tree_sum(&weights);
            density_scale = 1.0 / mass;
            for w in weights.iter_mut() {
                *w /= mass;
            }
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            exactness_degree,
            domain,
            measure,
            sampling,
            density_scale,
        })
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and P_m'
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn checked_count(per_axis: usize, axes: usize, copies: usize) -> Result<usize> {
    let mut count: u128 = copies as u128;
    for _ in 0..axes {
        count = count.saturating_mul(per_axis as u128);
        if count > MAX_NODES {
            return Err(MomentError::TooManyNodes(count));
        }
    }
    Ok(count as usize)
}

/// Iterates a tensor grid with the first axis slowest.
fn for_each_tensor(m: usize, axes: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; axes];
    loop {
        f(&idx);
        let mut a = axes;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < m {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Tensor-product Gauss rule on a box; weights form the (possibly
/// reweighted) probability measure.
pub fn build_box_rule(
    domain: &DomainSpec,
    measure: &MeasureSpec,
    points_per_axis: usize,
) -> Result<QuadratureRule> {
    domain.validate()?;
    measure.validate(domain)?;
    let DomainSpec::Box { lower, upper } = domain else {
        return Err(MomentError::InvalidQuadrature(
            "box rule needs a box domain".into(),
        ));
    };
    if points_per_axis < 2 {
        return Err(MomentError::InvalidQuadrature(
            "need at least 2 points per axis".into(),
        ));
    }
    let n = lower.len();
    let count = checked_count(points_per_axis, n, 1)?;
    let (t, w) = gauss_legendre(points_per_axis);
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for_each_tensor(points_per_axis, n, |idx| {
        let mut x = Vec::with_capacity(n);
        let mut weight = 1.0;
        for (axis, &i) in idx.iter().enumerate() {
            let (l, u) = (lower[axis], upper[axis]);
            // clamp keeps mapped nodes inside the closed box under rounding
            x.push((0.5 * (l + u) + 0.5 * (u - l) * t[i]).clamp(l, u));
            weight *= 0.5 * w[i];
        }
        nodes.push(x);
        weights.push(weight);
    });
    QuadratureRule::finish(
        nodes,
        weights,
        (2 * points_per_axis - 1) as u32,
        domain.clone(),
        measure.clone(),
        Sampling::GaussProduct,
    )
}

/// Product rule in spherical angles on the positive orthant of the sphere in
/// `coords` dimensions; weights sum to `2^-coords`.
fn positive_orthant_patch(coords: usize, order: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let angles = coords - 1;
    let (t, w) = gauss_legendre(order);
    let theta: Vec<f64> = t.iter().map(|x| 0.25 * PI * (x + 1.0)).collect();
    let wt: Vec<f64> = w.iter().map(|x| 0.25 * PI * x).collect();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for_each_tensor(order, angles, |idx| {
        let mut z = Vec::with_capacity(coords);
        let mut sin_prod = 1.0;
        let mut weight = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            let (s, c) = theta[i].sin_cos();
            z.push(sin_prod * c);
            // surface element: prod_j sin^(coords - 2 - j)(theta_j)
            weight *= wt[i] * s.powi((coords - 2 - j) as i32);
            sin_prod *= s;
        }
        z.push(sin_prod);
        nodes.push(z);
        weights.push(weight);
    });
    let target = 0.5f64.powi(coords as i32);
    let scale = target / tree_sum(&weights);
    for w in weights.iter_mut() {
        *w *= scale;
    }
    debug_assert!(theta.iter().all(|a| *a > 0.0 && *a < FRAC_PI_2));
    (nodes, weights)
}

/// Sign patterns admitted by a sector, first coordinate slowest, `+` before `-`.
fn sign_patterns(signs: &[Option<Sign>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(signs.len())];
    for s in signs {
        let choices: &[f64] = match s {
            None => &[1.0, -1.0],
            Some(s) => {
                if s.factor() > 0.0 {
                    &[1.0]
                } else {
                    &[-1.0]
                }
            }
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(*c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Monomial degree an angular rule of `order` points resolves to 1e-10 or
/// better on spheres with up to 4 coordinates (measured, conservative).
pub fn sector_nominal_degree(order: usize) -> u32 {
    (2 * order).saturating_sub(16) as u32
}

/// Deterministic rule on a sector of the sphere with at most 4 coordinates.
///
/// Each admitted orthant patch carries the same angular Gauss product rule
/// (`order` points per angle), reflected by sign; the base weights sum to the
/// exact sector mass `2^-(number of sign constraints)`.
pub fn build_sector_rule(
    sector: &DomainSpec,
    measure: &MeasureSpec,
    order: usize,
) -> Result<QuadratureRule> {
    sector.validate()?;
    measure.validate(sector)?;
    let DomainSpec::SphereSector { signs } = sector else {
        return Err(MomentError::InvalidQuadrature(
            "sector rule needs a sphere sector".into(),
        ));
    };
    let coords = signs.len();
    if coords > 4 {
        return Err(MomentError::UnsupportedDimension(coords));
    }
    if order < 2 {
        return Err(MomentError::InvalidQuadrature(
            "need at least 2 points per angle".into(),
        ));
    }
    let patterns = sign_patterns(signs);
    checked_count(order, coords - 1, patterns.len())?;
    let (patch_nodes, patch_weights) = positive_orthant_patch(coords, order);
    let mut nodes = Vec::with_capacity(patch_nodes.len() * patterns.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pattern in &patterns {
        for (z, w) in patch_nodes.iter().zip(&patch_weights) {
            nodes.push(z.iter().zip(pattern).map(|(a, s)| a * s).collect());
            weights.push(*w);
        }
    }
    QuadratureRule::finish(
        nodes,
        weights,
        sector_nominal_degree(order),
        sector.clone(),
        measure.clone(),
        Sampling::GaussProduct,
    )
}

/// Seeded Monte Carlo rule on a sector of any dimension: uniform directions
/// folded into the sector by the sign constraints.
pub fn build_sector_rule_monte_carlo(
    sector: &DomainSpec,
    measure: &MeasureSpec,
    samples: usize,
    seed: u64,
) -> Result<QuadratureRule> {
    sector.validate()?;
    measure.validate(sector)?;
    let DomainSpec::SphereSector { signs } = sector else {
        return Err(MomentError::InvalidQuadrature(
            "sector rule needs a sphere sector".into(),
        ));
    };
    if samples < 2 {
        return Err(MomentError::InvalidQuadrature(
            "need at least 2 samples".into(),
        ));
    }
    checked_count(samples, 1, 1)?;
    let mass = sector.sector_mass().expect("sector");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(samples);
    while nodes.len() < samples {
        let g: Vec<f64> = (0..signs.len()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let z: Vec<f64> = g
            .iter()
            .zip(signs)
            .map(|(x, s)| match s {
                None => x / norm,
                Some(s) => s.factor() * x.abs() / norm,
            })
            .collect();
        nodes.push(z);
    }
    let weights = vec![mass / samples as f64; samples];
    QuadratureRule::finish(
        nodes,
        weights,
        0,
        sector.clone(),
        measure.clone(),
        Sampling::MonteCarlo { seed, samples },
    )
}

/// `sum_i w_i f(node_i)` with the fixed blocked pairwise order.
pub fn integrate<F>(rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    integrate_with(rule, ExecPolicy::Sequential, f)
}

pub fn integrate_with<F>(rule: &QuadratureRule, policy: ExecPolicy, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let values = map_nodes(rule.len(), policy, |i| f(&rule.nodes[i]));
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(MomentError::NonFiniteIntegrand(i));
    }
    Ok(block_reduce(
        rule.len(),
        policy,
        |r| r.map(|i| rule.weights[i] * values[i]).sum::<f64>(),
        |a, b| a + b,
    )
    .unwrap_or(0.0))
}

/// Integral plus a standard-error estimate for Monte Carlo rules (`None` for
/// deterministic rules).
pub fn integrate_with_error<F>(rule: &QuadratureRule, f: F) -> Result<(f64, Option<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let value = integrate(rule, &f)?;
    let Sampling::MonteCarlo { samples, .. } = rule.sampling else {
        return Ok((value, None));
    };
    let n = samples as f64;
    let terms: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| n * w * f(x) - value)
        .map(|d| d * d)
        .collect();
    let var = tree_sum(&terms) / (n - 1.0);
    Ok((value, Some((var / n).sqrt())))
}

/// Checks the structural invariants of a rule.
pub fn check_rule(rule: &QuadratureRule) -> Result<()> {
    if rule.nodes.len() != rule.weights.len() {
        return Err(MomentError::InvalidQuadrature("node/weight count differ".into()));
    }
    if let Some(i) = rule.weights.iter().position(|w| !(*w > 0.0)) {
        return Err(MomentError::InvalidQuadrature(format!(
            "weight {i} is not positive"
        )));
    }
    for (i, x) in rule.nodes.iter().enumerate() {
        if !contains(&rule.domain, x)? {
            return Err(MomentError::InvalidQuadrature(format!(
                "node {i} lies outside the domain"
            )));
        }
    }
    Ok(())
}
