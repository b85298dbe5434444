//! JSON state files and reports.
//!
//! A state file is `{"n": 3, "d": 2, "amplitudes": [[re, im], ...]}` with
//! `d^n` amplitudes in big-endian site order; `d` defaults to 2.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::algebra::AlgebraElement;
use crate::battery::{Check, Criterion};
use crate::error::{Error, Result};
use crate::invariant::InvariantEntry;

pub const TOOL_NAME: &str = "lucum";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn integer_field(obj: &Map<String, Value>, name: &str) -> Result<Option<usize>> {
    match obj.get(name) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .and_then(|x| usize::try_from(x).ok())
            .map(Some)
            .ok_or_else(|| {
                schema(format!(
                    "field '{name}' must be a non-negative integer, found {v}"
                ))
            }),
    }
}

/// Parses the text of a state file.
pub fn parse_state_str(text: &str) -> Result<AlgebraElement> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema("state file must be a JSON object"))?;
    if let Some(key) = obj
        .keys()
        .find(|k| !matches!(k.as_str(), "n" | "d" | "amplitudes"))
    {
        return Err(schema(format!("unknown field '{key}'")));
    }
    let n = integer_field(obj, "n")?.ok_or_else(|| schema("missing field 'n'"))?;
    let d = integer_field(obj, "d")?.unwrap_or(2);
    if d < 2 {
        return Err(schema(format!("field 'd' must be at least 2, found {d}")));
    }
    let list = obj
        .get("amplitudes")
        .ok_or_else(|| schema("missing field 'amplitudes'"))?
        .as_array()
        .ok_or_else(|| schema("field 'amplitudes' must be an array of [re, im] pairs"))?;
    let expected = u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .ok_or_else(|| Error::Size(format!("d^n overflows for n={n}, d={d}")))?;
    if list.len() != expected {
        return Err(Error::Size(format!(
            "field 'amplitudes' has {} entries, expected {d}^{n} = {expected}",
            list.len()
        )));
    }
    let mut amps = Vec::with_capacity(expected);
    for (i, entry) in list.iter().enumerate() {
        let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
            schema(format!(
                "amplitudes[{i}] must be a [re, im] pair, found {entry}"
            ))
        })?;
        let part = |j: usize| {
            pair[j].as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                schema(format!(
                    "amplitudes[{i}][{j}] must be a finite number, found {}",
                    pair[j]
                ))
            })
        };
        amps.push(Complex64::new(part(0)?, part(1)?));
    }
    AlgebraElement::new(n, d, amps)
}

pub fn parse_state(path: &Path) -> Result<AlgebraElement> {
    parse_state_str(&std::fs::read_to_string(path)?)
}

/// State file text; floats are written in shortest round-trip form.
pub fn state_to_json(state: &AlgebraElement) -> String {
    let amps: Vec<[f64; 2]> = state.coeffs().iter().map(|c| [c.re, c.im]).collect();
    let doc = json!({ "n": state.n(), "d": state.d(), "amplitudes": amps });
    let mut text = serde_json::to_string_pretty(&doc).expect("plain JSON value");
    text.push('\n');
    text
}

pub fn write_state(path: &Path, state: &AlgebraElement) -> Result<()> {
    std::fs::write(path, state_to_json(state))?;
    Ok(())
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Everything a command prints. Field order is fixed by the struct, so equal
/// inputs give equal bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub entries: Vec<InvariantEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<Criterion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.into(),
            input_digest: None,
            seed: None,
            entries: Vec::new(),
            checks: Vec::new(),
            criteria: Vec::new(),
            verdict: None,
        }
    }

    /// Whether every check and criterion passed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.criteria.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serialisable report");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::Method;
    use crate::states::{ghz, random_state};

    #[test]
    fn parse_examples() {
        let zero = parse_state_str(r#"{"n":1,"d":2,"amplitudes":[[1,0],[0,0]]}"#).unwrap();
        assert_eq!(zero, AlgebraElement::identity(1, 2));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            r#"{{"n":3,"amplitudes":[[{s},0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[{s},0]]}}"#
        );
        assert_eq!(parse_state_str(&text).unwrap(), ghz(3));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let msg = |t: &str| parse_state_str(t).unwrap_err().to_string();
        assert!(msg(r#"{"n":2,"amplitudes":[[1,0],[0,0],[0,0]]}"#).contains("expected 2^2 = 4"));
        assert!(msg(r#"{"amplitudes":[]}"#).contains("'n'"));
        assert!(msg(r#"{"n":1}"#).contains("'amplitudes'"));
        assert!(msg(r#"{"n":-1,"amplitudes":[]}"#).contains("'n'"));
        assert!(msg(r#"{"n":1,"d":1,"amplitudes":[[1,0]]}"#).contains("'d'"));
        assert!(msg(r#"{"n":1,"amplitudes":[[1,0],[0]]}"#).contains("amplitudes[1]"));
        assert!(msg(r#"{"n":1,"amplitudes":[[1,0],[0,"x"]]}"#).contains("amplitudes[1][1]"));
        assert!(msg(r#"{"n":1,"amps":[]}"#).contains("'amps'"));
        assert!(msg("[1,2]").contains("object"));
        assert!(parse_state_str("{").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        for seed in 0..5 {
            let psi = random_state(3, seed);
            assert_eq!(parse_state_str(&state_to_json(&psi)).unwrap(), psi);
        }
        let qutrit = AlgebraElement::new(1, 3, vec![Complex64::new(0.1, -1e-300); 3]).unwrap();
        assert_eq!(parse_state_str(&state_to_json(&qutrit)).unwrap(), qutrit);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.json");
        let psi = random_state(2, 11);
        write_state(&path, &psi).unwrap();
        assert_eq!(parse_state(&path).unwrap(), psi);
        assert!(parse_state(&dir.path().join("missing.json")).is_err());
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn report_layout_is_stable() {
        let mut doc = ReportDocument::new("invariants");
        doc.seed = Some(7);
        doc.entries
            .push(InvariantEntry::new("11", 0.25, 4, Method::ClosedForm));
        let text = doc.to_json();
        let order: Vec<usize> = [
            "\"tool\"",
            "\"version\"",
            "\"command\"",
            "\"seed\"",
            "\"entries\"",
        ]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(!text.contains("checks"));
        assert_eq!(text, doc.clone().to_json());
        assert!(doc.all_passed());
    }
}
