//! Instance files: a moment sequence over polynomials in `n` variables, listed
//! by multi-index, plus the domain and reference measure.

use std::collections::HashMap;

use momentcone::domain::{DomainSpec, MeasureSpec, Sign};
use momentcone::{Basis, BasisSpec, MomentSequence, MultiIndex};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub degree: u32,
    pub domain: InstanceDomain,
    /// Reference measure on the box, or on the sphere sector for unbounded
    /// domains. Uniform probability when absent.
    #[serde(default)]
    pub measure: MeasureSpec,
    pub moments: Vec<MomentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceDomain {
    /// `[-1, 1]^n` when the bounds are omitted.
    Box {
        #[serde(default)]
        lower: Option<Vec<f64>>,
        #[serde(default)]
        upper: Option<Vec<f64>>,
    },
    Fullspace,
    /// `signs[i]` is `1` for `x_i >= 0`, `-1` for `x_i <= 0`.
    Orthant { signs: Vec<i8> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentEntry {
    pub alpha: MultiIndex,
    pub value: f64,
}

/// Validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub file: InstanceFile,
    pub domain: DomainSpec,
    pub moments: MomentSequence,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    validate(file)
}

pub fn validate(file: InstanceFile) -> Result<Instance, CliError> {
    if file.n == 0 {
        return Err(schema("n", "need at least one variable"));
    }
    if file.degree < 2 || file.degree % 2 == 1 {
        return Err(schema("degree", format!("degree must be even and >= 2, got {}", file.degree)));
    }
    let n = file.n;
    let domain = match &file.domain {
        InstanceDomain::Box { lower, upper } => {
            let lower = lower.clone().unwrap_or_else(|| vec![-1.0; n]);
            let upper = upper.clone().unwrap_or_else(|| vec![1.0; n]);
            for (name, v) in [("lower", &lower), ("upper", &upper)] {
                if v.len() != n {
                    return Err(schema(
                        format!("domain.{name}"),
                        format!("expected {n} bounds, got {}", v.len()),
                    ));
                }
            }
            DomainSpec::Box { lower, upper }
        }
        InstanceDomain::Fullspace => DomainSpec::FullSpace { n },
        InstanceDomain::Orthant { signs } => {
            if signs.len() != n {
                return Err(schema(
                    "domain.signs",
                    format!("expected {n} signs, got {}", signs.len()),
                ));
            }
            let signs = signs
                .iter()
                .enumerate()
                .map(|(i, s)| match s {
                    1 => Ok(Sign::NonNegative),
                    -1 => Ok(Sign::NonPositive),
                    _ => Err(schema(format!("domain.signs[{i}]"), "sign must be 1 or -1")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            DomainSpec::Orthant { signs }
        }
    };
    domain
        .validate()
        .map_err(|e| schema("domain", e.to_string()))?;

    let spec = BasisSpec::all_degrees(n, file.degree);
    let basis = Basis::new(spec)?;
    let mut values = vec![None; basis.len()];
    let mut seen: HashMap<&MultiIndex, usize> = HashMap::new();
    for (k, m) in file.moments.iter().enumerate() {
        let path = format!("moments[{k}]");
        if m.alpha.num_vars() != n {
            return Err(schema(
                format!("{path}.alpha"),
                format!("expected {n} exponents, got {}", m.alpha.num_vars()),
            ));
        }
        let Some(i) = basis.index_of(&m.alpha) else {
            return Err(schema(
                format!("{path}.alpha"),
                format!("degree {} exceeds {}", m.alpha.degree(), file.degree),
            ));
        };
        if let Some(first) = seen.insert(&m.alpha, k) {
            return Err(schema(
                format!("{path}.alpha"),
                format!("index {} already given at moments[{first}]", m.alpha),
            ));
        }
        if !m.value.is_finite() {
            return Err(schema(format!("{path}.value"), "value must be finite"));
        }
        values[i] = Some(m.value);
    }
    if let Some(i) = values.iter().position(Option::is_none) {
        return Err(schema(
            "moments",
            format!("missing index {}", basis.indices()[i]),
        ));
    }
    let moments = MomentSequence::new(spec, values.into_iter().map(Option::unwrap).collect())?;
    Ok(Instance {
        file,
        domain,
        moments,
    })
}

/// Instance file listing `values` in the canonical basis order.
pub fn instance_from_values(
    n: usize,
    degree: u32,
    domain: InstanceDomain,
    values: &[f64],
) -> Result<InstanceFile, CliError> {
    let basis = Basis::new(BasisSpec::all_degrees(n, degree))?;
    if values.len() != basis.len() {
        return Err(CliError::Moment(momentcone::MomentError::DimensionMismatch {
            expected: basis.len(),
            got: values.len(),
        }));
    }
    Ok(InstanceFile {
        n,
        degree,
        domain,
        measure: MeasureSpec::uniform(),
        moments: basis
            .indices()
            .iter()
            .zip(values)
            .map(|(a, &value)| MomentEntry {
                alpha: a.clone(),
                value,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEBESGUE: &str = r#"{"n":1,"degree":4,"domain":{"kind":"box","lower":[-1],"upper":[1]},
        "moments":[{"alpha":[0],"value":1},{"alpha":[1],"value":0},{"alpha":[2],"value":0.3333333333333333},
                   {"alpha":[3],"value":0},{"alpha":[4],"value":0.2}]}"#;

    fn path_of(e: CliError) -> String {
        match e {
            CliError::Schema { path, .. } => path,
            other => panic!("not a schema error: {other}"),
        }
    }

    #[test]
    fn parses_in_any_order() {
        let inst = parse_instance(LEBESGUE).unwrap();
        assert_eq!(inst.moments.values(), &[1.0, 0.0, 1.0 / 3.0, 0.0, 0.2]);
        let shuffled = LEBESGUE.replace(r#"{"alpha":[0],"value":1},"#, "").replace(
            r#"{"alpha":[4],"value":0.2}"#,
            r#"{"alpha":[4],"value":0.2},{"alpha":[0],"value":1}"#,
        );
        assert_eq!(parse_instance(&shuffled).unwrap().moments, inst.moments);
    }

    #[test]
    fn reports_offending_path() {
        let bad = LEBESGUE.replace(r#""alpha":[3],"value":0"#, r#""alpha":[3],"value":"zero""#);
        assert_eq!(path_of(parse_instance(&bad).unwrap_err()), "moments[3].value");
        let dup = LEBESGUE.replace(r#""alpha":[3]"#, r#""alpha":[1]"#);
        assert_eq!(path_of(parse_instance(&dup).unwrap_err()), "moments[3].alpha");
        let missing = LEBESGUE.replace(r#"{"alpha":[3],"value":0},"#, "");
        assert_eq!(path_of(parse_instance(&missing).unwrap_err()), "moments");
        let high = LEBESGUE.replace(r#""alpha":[3]"#, r#""alpha":[5]"#);
        assert_eq!(path_of(parse_instance(&high).unwrap_err()), "moments[3].alpha");
        let signs = r#"{"n":1,"degree":2,"domain":{"kind":"orthant","signs":[2]},"moments":[]}"#;
        assert_eq!(path_of(parse_instance(signs).unwrap_err()), "domain.signs[0]");
    }

    #[test]
    fn rejects_odd_degree() {
        let odd = LEBESGUE.replace(r#""degree":4"#, r#""degree":3"#);
        assert_eq!(path_of(parse_instance(&odd).unwrap_err()), "degree");
    }

    #[test]
    fn default_box_and_fullspace() {
        let text = r#"{"n":2,"degree":2,"domain":{"kind":"fullspace"},"moments":[
            {"alpha":[0,0],"value":1},{"alpha":[1,0],"value":0},{"alpha":[0,1],"value":0},
            {"alpha":[2,0],"value":1},{"alpha":[1,1],"value":0},{"alpha":[0,2],"value":1}]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.domain, DomainSpec::FullSpace { n: 2 });
        let boxed = text.replace(r#"{"kind":"fullspace"}"#, r#"{"kind":"box"}"#);
        assert_eq!(parse_instance(&boxed).unwrap().domain, DomainSpec::unit_box(2));
    }
}
