#![allow(dead_code)]

use momentcone::domain::{build_sector_from_k, DomainSpec, MeasureSpec, Sign};
use momentcone::quadrature::{build_box_rule, build_sector_rule, default_box_points, default_sector_order};
use momentcone::{BasisSpec, ObjectiveContext, PolyCoeffs};
use statrs::function::gamma::ln_gamma;

pub fn box_ctx(n: usize, degree: u32) -> ObjectiveContext {
    let rule = build_box_rule(&DomainSpec::unit_box(n), &MeasureSpec::uniform(), default_box_points(degree)).unwrap();
    ObjectiveContext::new(BasisSpec::all_degrees(n, degree), rule).unwrap()
}

pub fn sphere_ctx(coords: usize, degree: u32) -> ObjectiveContext {
    let sphere = DomainSpec::full_sphere(coords);
    let rule = build_sector_rule(&sphere, &MeasureSpec::uniform(), default_sector_order(degree)).unwrap();
    ObjectiveContext::new(BasisSpec::homogeneous(coords, degree), rule).unwrap()
}

pub fn quarter_ctx(degree: u32) -> ObjectiveContext {
    let sector = build_sector_from_k(&DomainSpec::Orthant { signs: vec![Sign::NonNegative] }).unwrap();
    let rule = build_sector_rule(&sector, &MeasureSpec::uniform(), default_sector_order(degree)).unwrap();
    ObjectiveContext::new(BasisSpec::homogeneous(2, degree), rule).unwrap()
}

pub fn poly(spec: &BasisSpec, c: Vec<f64>) -> PolyCoeffs {
    PolyCoeffs::new(*spec, c).unwrap()
}

/// `E |z_1|^a_1 ... |z_N|^a_N` under the uniform probability on the sphere in
/// `N = alpha.len()` coordinates.
pub fn sphere_abs_moment(alpha: &[u32]) -> f64 {
    let n = alpha.len() as f64;
    let total: u32 = alpha.iter().sum();
    let mut l = ln_gamma(n / 2.0) - ln_gamma((total as f64 + n) / 2.0);
    for &a in alpha {
        l += ln_gamma((a as f64 + 1.0) / 2.0) - ln_gamma(0.5);
    }
    l.exp()
}

/// Unnormalized sector integral of `z^alpha` against the sphere probability.
pub fn sector_moment(signs: &[Option<Sign>], alpha: &[u32]) -> f64 {
    let mut value = sphere_abs_moment(alpha);
    for (s, &a) in signs.iter().zip(alpha) {
        match s {
            None if a % 2 == 1 => return 0.0,
            None => {}
            Some(s) => value *= 0.5 * s.factor().powi(a as i32),
        }
    }
    value
}

/// Normalized Lebesgue moment on `[-1, 1]^n`.
pub fn cube_moment(alpha: &[u32]) -> f64 {
    alpha
        .iter()
        .map(|&a| if a % 2 == 1 { 0.0 } else { 1.0 / (a as f64 + 1.0) })
        .product()
}

pub fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
