//! Monomial bases of `R[x]_{2d}` and of forms of degree `2d`, the pairing between
//! polynomials and moment functionals, and the homogenization maps between them.
//!
//! Every basis is listed in graded lexicographic order: by total degree, then by
//! exponent tuples in descending lexicographic order. For forms in `n + 1`
//! variables the homogenizing variable `x0` is coordinate 0.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MomentError, Result};

/// Exponent tuple of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(num_vars: usize) -> Self {
        MultiIndex(vec![0; num_vars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Componentwise sum; panics if the lengths differ.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.0.len(), other.0.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Monomial value `point^alpha`.
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .fold(1.0, |acc, (&e, &x)| acc * x.powi(e as i32))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisMode {
    /// All monomials of total degree at most `max_degree`.
    AllDegrees,
    /// Monomials of total degree exactly `max_degree`.
    Homogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSpec {
    pub num_vars: usize,
    pub max_degree: u32,
    pub mode: BasisMode,
}

impl BasisSpec {
    pub fn all_degrees(num_vars: usize, max_degree: u32) -> Self {
        BasisSpec {
            num_vars,
            max_degree,
            mode: BasisMode::AllDegrees,
        }
    }

    pub fn homogeneous(num_vars: usize, max_degree: u32) -> Self {
        BasisSpec {
            num_vars,
            max_degree,
            mode: BasisMode::Homogeneous,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_vars == 0 {
            return Err(MomentError::NoVariables);
        }
        if self.max_degree < 2 || !self.max_degree.is_multiple_of(2) {
            return Err(MomentError::OddDegree(self.max_degree));
        }
        Ok(())
    }

    /// Number of basis elements, `binom(n + 2d, n)` in all-degrees mode and
    /// `binom(n - 1 + 2d, n - 1)` for forms in `n` variables.
    pub fn size(&self) -> usize {
        let d = self.max_degree as usize;
        match self.mode {
            BasisMode::AllDegrees => binomial(self.num_vars + d, self.num_vars),
            BasisMode::Homogeneous => binomial(self.num_vars - 1 + d, self.num_vars - 1),
        }
    }

    /// Half degree `d`.
    pub fn half_degree(&self) -> u32 {
        self.max_degree / 2
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Exponent tuples of `num_vars` entries summing to `degree`, descending lex.
fn compositions(num_vars: usize, degree: u32, out: &mut Vec<MultiIndex>) {
    fn rec(prefix: &mut Vec<u32>, remaining_vars: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if remaining_vars == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(prefix, remaining_vars - 1, remaining - e, out);
            prefix.pop();
        }
    }
    let mut prefix = Vec::with_capacity(num_vars);
    rec(&mut prefix, num_vars, degree, out);
}

/// Lists the basis in canonical graded lexicographic order.
pub fn enumerate_basis(spec: &BasisSpec) -> Result<Vec<MultiIndex>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.size());
    match spec.mode {
        BasisMode::AllDegrees => {
            for k in 0..=spec.max_degree {
                compositions(spec.num_vars, k, &mut out);
            }
        }
        BasisMode::Homogeneous => compositions(spec.num_vars, spec.max_degree, &mut out),
    }
    Ok(out)
}

/// An enumerated basis with index lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    spec: BasisSpec,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Basis {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        let indices = enumerate_basis(&spec)?;
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Ok(Basis {
            spec,
            indices,
            lookup,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Monomial vector `L(v)`: entry `alpha` is `point^alpha`.
    pub fn eval_monomials(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.spec.num_vars {
            return Err(MomentError::DimensionMismatch {
                expected: self.spec.num_vars,
                got: point.len(),
            });
        }
        let max = self.spec.max_degree as usize;
        // powers[j][e] = point[j]^e
        let powers: Vec<Vec<f64>> = point
            .iter()
            .map(|&x| {
                let mut row = Vec::with_capacity(max + 1);
                let mut acc = 1.0;
                for _ in 0..=max {
                    row.push(acc);
                    acc *= x;
                }
                row
            })
            .collect();
        Ok(self
            .indices
            .iter()
            .map(|alpha| {
                alpha
                    .0
                    .iter()
                    .enumerate()
                    .fold(1.0, |acc, (j, &e)| acc * powers[j][e as usize])
            })
            .collect())
    }

    /// Coefficients of the element `h` pairing to one with every `L(v)` on the
    /// domain: the constant polynomial in all-degrees mode, and
    /// `(x0^2 + ... + xn^2)^d` for forms.
    pub fn unit_direction(&self) -> PolyCoeffs {
        let mut coeffs = vec![0.0; self.len()];
        match self.spec.mode {
            BasisMode::AllDegrees => {
                let zero = MultiIndex::zeros(self.spec.num_vars);
                coeffs[self.index_of(&zero).expect("constant monomial")] = 1.0;
            }
            BasisMode::Homogeneous => {
                let d = self.spec.half_degree();
                let mut halves = Vec::new();
                compositions(self.spec.num_vars, d, &mut halves);
                for beta in halves {
                    let alpha = MultiIndex(beta.0.iter().map(|b| 2 * b).collect());
                    let idx = self.index_of(&alpha).expect("even monomial in basis");
                    coeffs[idx] = multinomial(d, &beta.0);
                }
            }
        }
        PolyCoeffs {
            spec: self.spec,
            coeffs,
        }
    }

    /// Position of the unit-direction element when it is a single basis
    /// monomial (all-degrees mode only).
    pub fn constant_index(&self) -> Option<usize> {
        match self.spec.mode {
            BasisMode::AllDegrees => self.index_of(&MultiIndex::zeros(self.spec.num_vars)),
            BasisMode::Homogeneous => None,
        }
    }
}

fn multinomial(n: u32, parts: &[u32]) -> f64 {
    let fact = |k: u32| (1..=k).fold(1.0f64, |acc, i| acc * i as f64);
    parts.iter().fold(fact(n), |acc, &k| acc / fact(k))
}

/// Entry `alpha` of the monomial vector at `point`.
pub fn eval_monomial_vector(spec: &BasisSpec, point: &[f64]) -> Result<Vec<f64>> {
    Basis::new(*spec)?.eval_monomials(point)
}

fn check_values(values: &[f64], spec: &BasisSpec) -> Result<()> {
    spec.validate()?;
    if values.len() != spec.size() {
        return Err(MomentError::DimensionMismatch {
            expected: spec.size(),
            got: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(MomentError::NonFinite(i));
    }
    Ok(())
}

/// Truncated moment sequence `y`, aligned with its basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    spec: BasisSpec,
    values: Vec<f64>,
}

impl MomentSequence {
    pub fn new(spec: BasisSpec, values: Vec<f64>) -> Result<Self> {
        check_values(&values, &spec)?;
        Ok(MomentSequence { spec, values })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        MomentSequence {
            spec: self.spec,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Polynomial (or form) coefficients aligned with a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    spec: BasisSpec,
    coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(spec: BasisSpec, coeffs: Vec<f64>) -> Result<Self> {
        check_values(&coeffs, &spec)?;
        Ok(PolyCoeffs { spec, coeffs })
    }

    pub fn zeros(spec: BasisSpec) -> Result<Self> {
        spec.validate()?;
        Ok(PolyCoeffs {
            spec,
            coeffs: vec![0.0; spec.size()],
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &PolyCoeffs) -> Result<PolyCoeffs> {
        if self.spec != other.spec {
            return Err(MomentError::BasisMismatch(
                "cannot add polynomials over different bases".into(),
            ));
        }
        Ok(PolyCoeffs {
            spec: self.spec,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + a * y)
                .collect(),
        })
    }

    pub fn scaled(&self, a: f64) -> PolyCoeffs {
        PolyCoeffs {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    /// Value at `point`.
    pub fn eval(&self, basis: &Basis, point: &[f64]) -> Result<f64> {
        if basis.spec() != &self.spec {
            return Err(MomentError::BasisMismatch(
                "polynomial and basis disagree".into(),
            ));
        }
        let monomials = basis.eval_monomials(point)?;
        Ok(dot(&self.coeffs, &monomials))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The pairing `<p, y>`.
pub fn pairing(p: &PolyCoeffs, y: &MomentSequence) -> Result<f64> {
    if p.spec != y.spec {
        return Err(MomentError::BasisMismatch(format!(
            "pairing {:?} with {:?}",
            p.spec, y.spec
        )));
    }
    Ok(dot(&p.coeffs, &y.values))
}

/// Relabels values indexed by `alpha` (all degrees, `n` vars) onto forms in
/// `n + 1` vars: index `(2d - |alpha|, alpha)` takes the value at `alpha`.
fn homogenize_values(spec: &BasisSpec, values: &[f64]) -> Result<(BasisSpec, Vec<f64>)> {
    if spec.mode != BasisMode::AllDegrees {
        return Err(MomentError::BasisMismatch(
            "homogenization expects an all-degrees basis".into(),
        ));
    }
    let source = Basis::new(*spec)?;
    let target_spec = BasisSpec::homogeneous(spec.num_vars + 1, spec.max_degree);
    let target = Basis::new(target_spec)?;
    let mut out = vec![0.0; target.len()];
    for (alpha, &v) in source.indices().iter().zip(values) {
        let mut e = Vec::with_capacity(spec.num_vars + 1);
        e.push(spec.max_degree - alpha.degree());
        e.extend_from_slice(&alpha.0);
        let idx = target.index_of(&MultiIndex(e)).expect("bijective relabeling");
        out[idx] = v;
    }
    Ok((target_spec, out))
}

fn dehomogenize_values(spec: &BasisSpec, values: &[f64]) -> Result<(BasisSpec, Vec<f64>)> {
    if spec.mode != BasisMode::Homogeneous || spec.num_vars < 2 {
        return Err(MomentError::BasisMismatch(
            "dehomogenization expects forms in at least two variables".into(),
        ));
    }
    let source = Basis::new(*spec)?;
    let target_spec = BasisSpec::all_degrees(spec.num_vars - 1, spec.max_degree);
    let target = Basis::new(target_spec)?;
    let mut out = vec![0.0; target.len()];
    for (alpha, &v) in source.indices().iter().zip(values) {
        let idx = target
            .index_of(&MultiIndex(alpha.0[1..].to_vec()))
            .expect("bijective relabeling");
        out[idx] = v;
    }
    Ok((target_spec, out))
}

/// `y -> y~` with `y~_(k, alpha) = y_alpha`, `k = 2d - |alpha|`.
pub fn homogenize_sequence(y: &MomentSequence) -> Result<MomentSequence> {
    let (spec, values) = homogenize_values(&y.spec, &y.values)?;
    Ok(MomentSequence { spec, values })
}

pub fn dehomogenize_sequence(y: &MomentSequence) -> Result<MomentSequence> {
    let (spec, values) = dehomogenize_values(&y.spec, &y.values)?;
    Ok(MomentSequence { spec, values })
}

/// Pads every monomial of `p` with a power of `x0` up to degree `2d`.
pub fn homogenize_poly(p: &PolyCoeffs) -> Result<PolyCoeffs> {
    let (spec, coeffs) = homogenize_values(&p.spec, &p.coeffs)?;
    Ok(PolyCoeffs { spec, coeffs })
}

/// Sets `x0 = 1`.
pub fn dehomogenize_poly(p: &PolyCoeffs) -> Result<PolyCoeffs> {
    let (spec, coeffs) = dehomogenize_values(&p.spec, &p.coeffs)?;
    Ok(PolyCoeffs { spec, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn univariate_quadratic_basis() {
        let b = enumerate_basis(&BasisSpec::all_degrees(1, 2)).unwrap();
        assert_eq!(b, vec![idx(&[0]), idx(&[1]), idx(&[2])]);
    }

    #[test]
    fn bivariate_quadratic_basis_is_graded_lex() {
        let b = enumerate_basis(&BasisSpec::all_degrees(2, 2)).unwrap();
        assert_eq!(
            b,
            vec![
                idx(&[0, 0]),
                idx(&[1, 0]),
                idx(&[0, 1]),
                idx(&[2, 0]),
                idx(&[1, 1]),
                idx(&[0, 2])
            ]
        );
    }

    #[test]
    fn binary_quartic_forms() {
        let b = enumerate_basis(&BasisSpec::homogeneous(2, 4)).unwrap();
        assert_eq!(
            b,
            vec![
                idx(&[4, 0]),
                idx(&[3, 1]),
                idx(&[2, 2]),
                idx(&[1, 3]),
                idx(&[0, 4])
            ]
        );
    }

    #[test]
    fn odd_degree_rejected() {
        assert_eq!(
            enumerate_basis(&BasisSpec::all_degrees(2, 3)),
            Err(MomentError::OddDegree(3))
        );
        assert_eq!(
            enumerate_basis(&BasisSpec::all_degrees(1, 0)),
            Err(MomentError::OddDegree(0))
        );
        assert_eq!(
            enumerate_basis(&BasisSpec::all_degrees(0, 2)),
            Err(MomentError::NoVariables)
        );
    }

    #[test]
    fn sizes_match_binomial_counts() {
        for n in 1..=4usize {
            for d2 in [2u32, 4, 6] {
                let all = BasisSpec::all_degrees(n, d2);
                let hom = BasisSpec::homogeneous(n + 1, d2);
                let expected = binomial(n + d2 as usize, n);
                assert_eq!(enumerate_basis(&all).unwrap().len(), expected);
                assert_eq!(enumerate_basis(&hom).unwrap().len(), expected);
                assert_eq!(all.size(), expected);
                assert_eq!(hom.size(), expected);
            }
        }
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 1), 3);
    }

    #[test]
    fn monomial_vectors() {
        let v = eval_monomial_vector(&BasisSpec::all_degrees(1, 2), &[2.0]).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 4.0]);
        let v = eval_monomial_vector(&BasisSpec::all_degrees(2, 2), &[0.0, 0.0]).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let v = eval_monomial_vector(&BasisSpec::homogeneous(2, 4), &[1.0, 1.0]).unwrap();
        assert_eq!(v, vec![1.0; 5]);
        assert!(matches!(
            eval_monomial_vector(&BasisSpec::all_degrees(2, 2), &[1.0]),
            Err(MomentError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn homogenize_univariate_quartic_sequence_keeps_order() {
        let spec = BasisSpec::all_degrees(1, 4);
        let y = MomentSequence::new(spec, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let yt = homogenize_sequence(&y).unwrap();
        assert_eq!(yt.spec(), &BasisSpec::homogeneous(2, 4));
        assert_eq!(yt.values(), &[1.0, 2.0, 3.0, 4.0, 5.0]);

        let y = MomentSequence::new(BasisSpec::all_degrees(1, 2), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(homogenize_sequence(&y).unwrap().values(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn homogenize_bivariate_relabels() {
        let spec = BasisSpec::all_degrees(2, 2);
        let y = MomentSequence::new(spec, (0..6).map(|i| i as f64).collect()).unwrap();
        let yt = homogenize_sequence(&y).unwrap();
        let b = Basis::new(*yt.spec()).unwrap();
        // y_(1,1) sits at x0^0 x1 x2
        assert_eq!(yt.values()[b.index_of(&idx(&[0, 1, 1])).unwrap()], 4.0);
        // y_(0,0) sits at x0^2
        assert_eq!(yt.values()[b.index_of(&idx(&[2, 0, 0])).unwrap()], 0.0);
        assert_eq!(yt.values()[b.index_of(&idx(&[1, 0, 1])).unwrap()], 2.0);
    }

    #[test]
    fn homogenize_poly_pads_degree() {
        // x^2 + 3 -> x1^2 + 3 x0^2
        let p = PolyCoeffs::new(BasisSpec::all_degrees(1, 2), vec![3.0, 0.0, 1.0]).unwrap();
        let pb = homogenize_poly(&p).unwrap();
        assert_eq!(pb.coeffs(), &[3.0, 0.0, 1.0]);
        let b = Basis::new(*pb.spec()).unwrap();
        assert_eq!(pb.eval(&b, &[2.0, 5.0]).unwrap(), 25.0 + 12.0);

        let one = PolyCoeffs::new(BasisSpec::all_degrees(2, 4), {
            let mut c = vec![0.0; 15];
            c[0] = 1.0;
            c
        })
        .unwrap();
        let ob = homogenize_poly(&one).unwrap();
        let b = Basis::new(*ob.spec()).unwrap();
        let i = b.index_of(&idx(&[4, 0, 0])).unwrap();
        assert_eq!(ob.coeffs()[i], 1.0);
        assert_eq!(ob.coeffs().iter().filter(|c| **c != 0.0).count(), 1);
    }

    #[test]
    fn unit_direction_is_one_on_sphere() {
        let b = Basis::new(BasisSpec::homogeneous(3, 4)).unwrap();
        let h = b.unit_direction();
        let z = [0.48, 0.6, 0.64];
        assert!((h.eval(&b, &z).unwrap() - 1.0).abs() < 1e-14);
        let b = Basis::new(BasisSpec::all_degrees(2, 4)).unwrap();
        assert_eq!(b.unit_direction().eval(&b, &[0.3, -7.0]).unwrap(), 1.0);
    }

    #[test]
    fn sequences_validate() {
        let spec = BasisSpec::all_degrees(1, 2);
        assert!(matches!(
            MomentSequence::new(spec, vec![1.0, 2.0]),
            Err(MomentError::DimensionMismatch { .. })
        ));
        assert_eq!(
            MomentSequence::new(spec, vec![1.0, f64::NAN, 0.0]),
            Err(MomentError::NonFinite(1))
        );
    }

    fn spec_strategy() -> impl Strategy<Value = BasisSpec> {
        (1usize..=3, prop::sample::select(vec![2u32, 4, 6]))
            .prop_map(|(n, d)| BasisSpec::all_degrees(n, d))
    }

    proptest! {
        #[test]
        fn homogenization_round_trips_and_preserves_pairing(
            spec in spec_strategy(),
            seed in prop::collection::vec(-3.0f64..3.0, 84 * 2),
            x in prop::collection::vec(-2.0f64..2.0, 3),
        ) {
            let m = spec.size();
            let y = MomentSequence::new(spec, seed[..m].to_vec()).unwrap();
            let p = PolyCoeffs::new(spec, seed[m..2 * m].to_vec()).unwrap();
            let yt = homogenize_sequence(&y).unwrap();
            let pt = homogenize_poly(&p).unwrap();
            prop_assert_eq!(&dehomogenize_sequence(&yt).unwrap(), &y);
            prop_assert_eq!(&dehomogenize_poly(&pt).unwrap(), &p);

            let direct = pairing(&p, &y).unwrap();
            let lifted = pairing(&pt, &yt).unwrap();
            prop_assert!((direct - lifted).abs() <= 1e-12 * (1.0 + direct.abs()));

            // form(1, x) = p(x)
            let base = Basis::new(spec).unwrap();
            let hom = Basis::new(*pt.spec()).unwrap();
            let point = &x[..spec.num_vars];
            let mut lifted_point = vec![1.0];
            lifted_point.extend_from_slice(point);
            let a = p.eval(&base, point).unwrap();
            let b = pt.eval(&hom, &lifted_point).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn monomial_vector_is_multiplicative(
            spec in spec_strategy(),
            x in prop::collection::vec(-1.5f64..1.5, 3),
        ) {
            let basis = Basis::new(spec).unwrap();
            let point = &x[..spec.num_vars];
            let v = basis.eval_monomials(point).unwrap();
            prop_assert_eq!(v[0], 1.0);
            for (i, a) in basis.indices().iter().enumerate() {
                for (j, b) in basis.indices().iter().enumerate() {
                    if let Some(k) = basis.index_of(&a.add(b)) {
                        let prod = v[i] * v[j];
                        prop_assert!((v[k] - prod).abs() <= 1e-12 * (1.0 + prod.abs()));
                    }
                }
            }
        }
    }
}
