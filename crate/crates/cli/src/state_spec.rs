//! State specifications: preset expressions, inline JSON or JSON files.
//!
//! Preset grammar, with products written `a*b` or `a,b`:
//!
//! ```text
//! zero | zero(N) | ghz | ghz(N) | bell | w | w(N) | dicke(N,m) | random(N) | ket(0110)
//! ```
//!
//! `--d` sets the local dimension of presets; `w` and `dicke` are qubit-only.

use std::path::Path;

use entpoly_core::linalg::C64;
use entpoly_core::{states, Kron, PureState};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Explicit state file: `{"d": 2, "N": 3, "amplitudes": [{"index": "100", "re": 1.0}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub amplitudes: Vec<Amplitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub index: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl StateFile {
    pub fn to_state(&self) -> Result<PureState> {
        if self.d < 2 {
            return Err(CliError::validation(format!(
                "local dimension must be at least 2, got {}",
                self.d
            )));
        }
        let dim = self
            .d
            .checked_pow(self.n as u32)
            .filter(|&dim| dim <= 1 << 16)
            .ok_or_else(|| CliError::validation("state too large"))?;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let mut seen = vec![false; dim];
        for a in &self.amplitudes {
            let index = parse_digits(&a.index, self.d, self.n)?;
            if std::mem::replace(&mut seen[index], true) {
                return Err(CliError::validation(format!(
                    "index {} listed twice",
                    a.index
                )));
            }
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(CliError::validation(format!(
                    "non-finite amplitude at index {}",
                    a.index
                )));
            }
            amps[index] = C64::new(a.re, a.im);
        }
        Ok(PureState::new(self.d, self.n, amps)?.normalized()?)
    }
}

/// Base-`d` digit string of length `n`, site 0 first, to a flat index.
fn parse_digits(text: &str, d: usize, n: usize) -> Result<usize> {
    let digits: Vec<usize> = text
        .chars()
        .map(|c| c.to_digit(36).map(|v| v as usize).filter(|&v| v < d))
        .collect::<Option<_>>()
        .ok_or_else(|| {
            CliError::validation(format!("index {text:?} is not a base-{d} digit string"))
        })?;
    if digits.len() != n {
        return Err(CliError::validation(format!(
            "index {text:?} has {} digits, expected {n}",
            digits.len()
        )));
    }
    Ok(digits.iter().fold(0, |acc, &v| acc * d + v))
}

/// Options that presets depend on.
#[derive(Debug, Clone, Copy)]
pub struct PresetOptions {
    pub d: usize,
    pub seed: u64,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self { d: 2, seed: 0 }
    }
}

/// Parse a state specification and return it normalized.
pub fn parse_state(spec: &str, opts: PresetOptions) -> Result<PureState> {
    let text = spec.trim();
    if text.starts_with('{') {
        let file: StateFile = serde_json::from_str(text)
            .map_err(|e| CliError::validation(format!("bad state JSON: {e}")))?;
        return file.to_state();
    }
    if text.ends_with(".json") || Path::new(text).is_file() {
        let raw =
            std::fs::read_to_string(text).map_err(|e| CliError::Io(format!("{text}: {e}")))?;
        let file: StateFile = serde_json::from_str(&raw)
            .map_err(|e| CliError::validation(format!("{text}: bad state JSON: {e}")))?;
        return file.to_state();
    }
    let factors = split_top_level(text)?;
    let mut state: Option<PureState> = None;
    for factor in factors {
        let next = preset(factor, opts)?;
        state = Some(match state {
            None => next,
            Some(acc) => acc.kron(&next)?,
        });
    }
    state.ok_or_else(|| CliError::validation("empty state specification"))
}

fn split_top_level(text: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(CliError::validation(format!(
                        "unbalanced parentheses in {text:?}"
                    )));
                }
            }
            '*' | ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(CliError::validation(format!(
            "unbalanced parentheses in {text:?}"
        )));
    }
    parts.push(text[start..].trim());
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::validation(format!("empty factor in {text:?}")));
    }
    Ok(parts)
}

fn preset(factor: &str, opts: PresetOptions) -> Result<PureState> {
    let (name, args) = match factor.find('(') {
        Some(open) => {
            if !factor.ends_with(')') {
                return Err(CliError::validation(format!("malformed preset {factor:?}")));
            }
            let inner = &factor[open + 1..factor.len() - 1];
            let args: Vec<&str> = inner.split(',').map(str::trim).collect();
            (factor[..open].trim(), args)
        }
        None => (factor, Vec::new()),
    };
    let name = name.to_ascii_lowercase();
    let ints = || -> Result<Vec<usize>> {
        args.iter()
            .map(|a| {
                a.parse::<usize>()
                    .map_err(|_| CliError::validation(format!("bad argument {a:?} in {factor:?}")))
            })
            .collect()
    };
    let arity = |expected: &[usize]| -> Result<Vec<usize>> {
        let values = ints()?;
        if expected.contains(&values.len()) {
            Ok(values)
        } else {
            Err(CliError::validation(format!(
                "wrong number of arguments in {factor:?}"
            )))
        }
    };
    let qubit_only = || -> Result<()> {
        if opts.d == 2 {
            Ok(())
        } else {
            Err(CliError::validation(format!(
                "{name} is defined for qubits only"
            )))
        }
    };
    let d = opts.d;
    let state = match name.as_str() {
        "zero" => states::zero(d, arity(&[0, 1])?.first().copied().unwrap_or(1))?,
        "ghz" => states::ghz(d, arity(&[0, 1])?.first().copied().unwrap_or(3))?,
        "bell" => {
            arity(&[0])?;
            states::bell(d)?
        }
        "w" => {
            qubit_only()?;
            states::w(arity(&[0, 1])?.first().copied().unwrap_or(3))?
        }
        "dicke" => {
            qubit_only()?;
            let v = arity(&[2])?;
            states::dicke(v[0], v[1])?
        }
        "random" => states::random_state(d, arity(&[1])?[0], opts.seed)?,
        "ket" => {
            let [digits] = args.as_slice() else {
                return Err(CliError::validation(format!(
                    "ket takes one digit string in {factor:?}"
                )));
            };
            let index = parse_digits(digits, d, digits.len())?;
            let mut amps = vec![C64::new(0.0, 0.0); d.pow(digits.len() as u32)];
            amps[index] = C64::new(1.0, 0.0);
            PureState::new(d, digits.len(), amps)?
        }
        _ => return Err(CliError::validation(format!("unknown preset {name:?}"))),
    };
    if state.num_sites() == 0 {
        return Err(CliError::validation(format!("{factor:?} has no sites")));
    }
    if state.dim() > 1 << 12 {
        return Err(CliError::validation(format!(
            "{factor:?} is too large for dense analysis"
        )));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> PureState {
        parse_state(s, PresetOptions::default()).unwrap()
    }

    #[test]
    fn presets_match_named_states() {
        assert_eq!(parse("bell"), states::bell(2).unwrap());
        assert_eq!(parse("ghz"), states::ghz(2, 3).unwrap());
        assert_eq!(parse("w"), states::w(3).unwrap());
        assert_eq!(parse("zero(3)"), states::zero(2, 3).unwrap());
        assert_eq!(parse("dicke(4, 2)"), states::dicke(4, 2).unwrap());
    }

    #[test]
    fn products_use_star_or_comma() {
        let expected = states::zero(2, 1)
            .unwrap()
            .kron(&states::bell(2).unwrap())
            .unwrap();
        assert_eq!(parse("zero*bell"), expected);
        assert_eq!(parse("zero, bell"), expected);
        assert_eq!(parse("dicke(2,1)*zero").num_sites(), 3);
    }

    #[test]
    fn explicit_json_is_normalized() {
        let psi = parse(
            r#"{"d":2,"N":3,"amplitudes":[{"index":"100","re":1},{"index":"010","re":1},{"index":"001","re":1}]}"#,
        );
        assert!((psi.amplitudes() - states::w(3).unwrap().amplitudes()).norm() < 1e-15);
        let single = parse(r#"{"d":3,"N":2,"amplitudes":[{"index":"21","re":0,"im":2.5}]}"#);
        assert!((single.amplitudes()[7].im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn malformed_specs_are_validation_errors() {
        for bad in [
            "",
            "bogus",
            "zero(",
            "dicke(3)",
            "bell(2)",
            "zero**bell",
            r#"{"d":2,"N":2,"amplitudes":[]}"#,
            r#"{"d":2,"N":2,"amplitudes":[{"index":"12","re":1}]}"#,
            r#"{"d":2,"N":2,"amplitudes":[{"index":"1","re":1}]}"#,
        ] {
            let err = parse_state(bad, PresetOptions::default()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad:?}: {err}");
        }
        let err = parse_state("w", PresetOptions { d: 3, seed: 0 }).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = parse_state("/nonexistent/state.json", PresetOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
