//! JSON system descriptions and the built-in aliases.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "variables": ["x", "y"],
//!   "unknowns": ["u"],
//!   "equations": [{ "terms": [{ "unknown": "u", "variable": "x", "coeff": "1/2" }] }]
//! }
//! ```
//!
//! A file may instead carry only `"builtin": "cauchy-fueter"` or
//! `"builtin": "wfamily:n,m,[(j0,j),...]"`.

use std::collections::HashMap;
use std::path::Path;

use jetcomplex::cauchyfueter;
use jetcomplex::exactalg::ExactScalar;
use jetcomplex::jets::PDESystem;
use jetcomplex::wfamily::{make_wsystem, WSystem};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub unknown: String,
    pub variable: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub unknowns: Vec<String>,
    #[serde(default)]
    pub equations: Vec<EquationSpec>,
}

#[derive(Clone, Debug)]
pub enum Builtin {
    CauchyFueter,
    WFamily(WSystem),
}

/// A parsed system together with the names used to print it.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub system: PDESystem,
    pub variables: Vec<String>,
    pub unknowns: Vec<String>,
    pub builtin: Option<Builtin>,
}

impl LoadedSystem {
    pub fn wfamily(&self) -> Option<&WSystem> {
        match &self.builtin {
            Some(Builtin::WFamily(w)) => Some(w),
            _ => None,
        }
    }

    pub fn is_cauchy_fueter(&self) -> bool {
        matches!(self.builtin, Some(Builtin::CauchyFueter))
    }

    pub fn to_file(&self) -> SystemFile {
        let sys = &self.system;
        let equations = (0..sys.equations())
            .map(|m| EquationSpec {
                terms: sys
                    .equation_terms(m)
                    .into_iter()
                    .map(|(i, j, c)| TermSpec {
                        unknown: self.unknowns[i].clone(),
                        variable: self.variables[j].clone(),
                        coeff: c.to_string(),
                    })
                    .collect(),
            })
            .collect();
        SystemFile {
            schema_version: SCHEMA_VERSION.into(),
            label: Some(sys.label.clone()),
            builtin: None,
            variables: self.variables.clone(),
            unknowns: self.unknowns.clone(),
            equations,
        }
    }
}

/// Explicit JSON form; parsing it back reproduces the coefficient tensor.
pub fn print_system(sys: &LoadedSystem) -> String {
    serde_json::to_string_pretty(&sys.to_file()).expect("plain data serializes")
}

/// Accepts a builtin alias, inline JSON, or a path to a JSON file.
pub fn parse_system(arg: &str) -> Result<LoadedSystem, CliError> {
    let trimmed = arg.trim();
    if is_builtin(trimmed) {
        return builtin(trimmed);
    }
    if trimmed.starts_with('{') {
        return parse_system_text(trimmed, "<inline>");
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?;
    parse_system_text(&text, arg)
}

fn is_builtin(s: &str) -> bool {
    s == "cauchy-fueter" || s.starts_with("wfamily:")
}

pub fn builtin(alias: &str) -> Result<LoadedSystem, CliError> {
    if alias == "cauchy-fueter" {
        return Ok(LoadedSystem {
            system: cauchyfueter::cf_system(),
            variables: cauchyfueter::variable_names(),
            unknowns: vec!["phi0".into(), "phi1".into()],
            builtin: Some(Builtin::CauchyFueter),
        });
    }
    let spec = alias
        .strip_prefix("wfamily:")
        .ok_or_else(|| CliError::Input(format!("unknown builtin {alias:?}; expected cauchy-fueter or wfamily:n,m,[(j0,j),...]")))?;
    let mut it = spec.splitn(3, ',');
    let mut num = |what: &str| -> Result<usize, CliError> {
        let s = it.next().unwrap_or("").trim();
        s.parse().map_err(|_| CliError::Input(format!("builtin {alias:?}: {what} must be a positive integer, got {s:?}")))
    };
    let n = num("n")?;
    let m = num("m")?;
    let pairs = parse_pairs(it.next().unwrap_or(""))?;
    wfamily_system(n, m, &pairs)
}

pub fn wfamily_system(n: usize, m: usize, pairs: &[(usize, usize)]) -> Result<LoadedSystem, CliError> {
    let w = make_wsystem(n, m, pairs).map_err(|e| CliError::Input(e.to_string()))?;
    let unknowns = vec!["phi0".into(), "phi1".into()];
    Ok(LoadedSystem {
        system: w.base.clone(),
        variables: w.index_set.variable_names(),
        unknowns,
        builtin: Some(Builtin::WFamily(w)),
    })
}

/// `"(j0,j);(j0,j)"` or `"[(j0,j),(j0,j)]"`.
pub fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>, CliError> {
    let bad = |msg: String| CliError::Input(format!("pair list {s:?}: {msg}"));
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    let mut out = Vec::new();
    let mut rest = body;
    loop {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',' || c == ';');
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(bad(format!("expected '(' at {:?}", rest)));
        }
        let close = rest.find(')').ok_or_else(|| bad("unclosed '('".into()))?;
        let inner = &rest[1..close];
        let (a, b) = inner.split_once(',').ok_or_else(|| bad(format!("pair ({inner}) needs two entries")))?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| bad(format!("{:?} is not a positive integer", x.trim())));
        out.push((parse(a)?, parse(b)?));
        rest = &rest[close + 1..];
    }
    if out.is_empty() {
        return Err(bad("no pairs given".into()));
    }
    Ok(out)
}

/// Line and column (1-based) of the `n`-th occurrence of the key `"key"`.
fn key_position(text: &str, key: &str, n: usize) -> Option<(usize, usize)> {
    let pat = format!("\"{key}\"");
    let (off, _) = text.match_indices(&pat).nth(n)?;
    let before = &text[..off];
    let line = before.matches('\n').count() + 1;
    let col = off - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    Some((line, col))
}

fn at(text: &str, key: &str, n: usize) -> String {
    key_position(text, key, n).map_or(String::new(), |(l, c)| format!(" (line {l}, column {c})"))
}

fn unique(names: &[String], what: &str) -> Result<HashMap<String, usize>, CliError> {
    let mut map = HashMap::new();
    for (k, name) in names.iter().enumerate() {
        if name.trim().is_empty() {
            return Err(CliError::Input(format!("{what} {} has an empty name", k + 1)));
        }
        if map.insert(name.clone(), k).is_some() {
            return Err(CliError::Input(format!("{what} name {name:?} appears more than once")));
        }
    }
    Ok(map)
}

pub fn parse_system_text(text: &str, origin: &str) -> Result<LoadedSystem, CliError> {
    let file: SystemFile = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!("{origin}: line {}, column {}: {e}", e.line(), e.column()))
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Input(format!(
            "{origin}: unsupported schema_version {:?}{} (expected {SCHEMA_VERSION:?})",
            file.schema_version,
            at(text, "schema_version", 0)
        )));
    }
    if let Some(alias) = &file.builtin {
        if !file.equations.is_empty() || !file.variables.is_empty() || !file.unknowns.is_empty() {
            return Err(CliError::Input(format!("{origin}: a builtin alias cannot be combined with explicit equations")));
        }
        return builtin(alias);
    }
    let vars = unique(&file.variables, "variable")?;
    let unks = unique(&file.unknowns, "unknown")?;
    if vars.is_empty() || unks.is_empty() || file.equations.is_empty() {
        return Err(CliError::Input(format!("{origin}: variables, unknowns and equations must all be nonempty")));
    }
    let mut terms = Vec::new();
    let mut global = 0;
    for (e, eq) in file.equations.iter().enumerate() {
        if eq.terms.is_empty() {
            return Err(CliError::Input(format!("{origin}: equation {} has no terms{}", e + 1, at(text, "terms", e))));
        }
        for (t, term) in eq.terms.iter().enumerate() {
            let pos = |key: &str| format!("{origin}: equation {}, term {}{}", e + 1, t + 1, at(text, key, global));
            let i = *unks
                .get(&term.unknown)
                .ok_or_else(|| CliError::Input(format!("{}: unknown name {:?}", pos("unknown"), term.unknown)))?;
            let j = *vars
                .get(&term.variable)
                .ok_or_else(|| CliError::Input(format!("{}: unknown variable {:?}", pos("variable"), term.variable)))?;
            let c: ExactScalar = term
                .coeff
                .parse()
                .map_err(|err| CliError::Input(format!("{}: coefficient {:?}: {err}", pos("coeff"), term.coeff)))?;
            terms.push((e, i, j, c));
            global += 1;
        }
    }
    let label = file.label.clone().unwrap_or_else(|| origin.to_string());
    let system = PDESystem::from_terms(file.equations.len(), unks.len(), vars.len(), terms, &label)
        .and_then(|s| PDESystem::new(s.coeffs_nested(), s.unknowns(), s.variables(), &label))
        .map_err(|e| CliError::Input(format!("{origin}: {e}")))?;
    Ok(LoadedSystem { system, variables: file.variables, unknowns: file.unknowns, builtin: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_EQ: &str = r#"{"schema_version": "1", "variables": ["x"], "unknowns": ["u"],
        "equations": [{"terms": [{"unknown": "u", "variable": "x", "coeff": "1"}]}]}"#;

    #[test]
    fn minimal_file() {
        let s = parse_system(ONE_EQ).unwrap();
        assert_eq!((s.system.equations(), s.system.unknowns(), s.system.variables()), (1, 1, 1));
        assert!(s.system.coeff(0, 0, 0).is_one());
    }

    #[test]
    fn bad_coefficient_has_position() {
        let text = ONE_EQ.replace(r#""coeff": "1""#, r#""coeff": "1/0""#);
        let err = parse_system(&text).unwrap_err().to_string();
        assert!(err.contains("equation 1, term 1"), "{err}");
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("zero denominator"), "{err}");
    }

    #[test]
    fn structural_errors() {
        let empty = ONE_EQ.replace(r#"{"unknown": "u", "variable": "x", "coeff": "1"}"#, "");
        assert!(parse_system(&empty).unwrap_err().to_string().contains("no terms"));
        let unknown = ONE_EQ.replace(r#""variable": "x""#, r#""variable": "y""#);
        assert!(parse_system(&unknown).unwrap_err().to_string().contains("unknown variable \"y\""));
        let dup = ONE_EQ.replace(r#"["x"]"#, r#"["x", "x"]"#);
        assert!(parse_system(&dup).unwrap_err().to_string().contains("more than once"));
        let zero = ONE_EQ.replace(r#""coeff": "1""#, r#""coeff": "0""#);
        assert!(parse_system(&zero).is_err());
        assert!(parse_system("{not json").unwrap_err().to_string().contains("line 1"));
    }

    #[test]
    fn builtins() {
        let cf = parse_system("cauchy-fueter").unwrap();
        assert!(cf.is_cauchy_fueter());
        assert_eq!((cf.system.equations(), cf.system.unknowns(), cf.system.variables()), (4, 2, 8));
        let w = parse_system("wfamily:3,3,[(3,3),(2,2)]").unwrap();
        assert_eq!(w.wfamily().unwrap().index_set.t(), 2);
        assert!(parse_system("wfamily:2,2,[(1,1),(2,1)]").is_err());
        assert!(parse_system("wfamily:2,x,[(1,1)]").is_err());
    }

    #[test]
    fn pair_syntaxes() {
        assert_eq!(parse_pairs("(1,2);(3,4)").unwrap(), vec![(1, 2), (3, 4)]);
        assert_eq!(parse_pairs("[(1, 2), (3,4)]").unwrap(), vec![(1, 2), (3, 4)]);
        assert!(parse_pairs("(1;2)").is_err());
        assert!(parse_pairs("").is_err());
    }

    #[test]
    fn print_round_trip() {
        for s in [parse_system("cauchy-fueter").unwrap(), parse_system("wfamily:3,2,[(1,2),(3,1)]").unwrap()] {
            let back = parse_system(&print_system(&s)).unwrap();
            assert_eq!(back.system.coeffs_nested(), s.system.coeffs_nested());
            assert_eq!(back.variables, s.variables);
        }
    }
}
