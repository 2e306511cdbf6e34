//! Operator specifications such as `X:0`, `Z:2*X:1` or `E01:0`.
//!
//! `X` and `Z` are the generalized shift and clock, `Y` is the qubit Pauli,
//! `Eab` is the matrix unit `|a⟩⟨b|` and `I` the identity.

use std::f64::consts::PI;

use entpoly_core::linalg::{CMatrix, C64};
use entpoly_core::{DenseOperator, Kron};

use crate::error::{CliError, Result};

/// One-site matrix for a named operator.
pub fn single_site(name: &str, d: usize) -> Result<CMatrix> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let m = match name {
        "I" => CMatrix::identity(d, d),
        "X" => CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { one } else { zero }),
        "Z" => CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::from_polar(1.0, 2.0 * PI * i as f64 / d as f64)
            } else {
                zero
            }
        }),
        "Y" if d == 2 => {
            CMatrix::from_row_slice(2, 2, &[zero, C64::new(0.0, -1.0), C64::new(0.0, 1.0), zero])
        }
        "Y" => return Err(CliError::validation("Y is defined for qubits only")),
        _ if name.len() == 3 && name.starts_with('E') => {
            let digit = |c: char| c.to_digit(36).map(|v| v as usize).filter(|&v| v < d);
            let mut chars = name[1..].chars();
            match (chars.next().and_then(digit), chars.next().and_then(digit)) {
                (Some(a), Some(b)) => {
                    CMatrix::from_fn(d, d, |i, j| if i == a && j == b { one } else { zero })
                }
                _ => {
                    return Err(CliError::validation(format!(
                        "bad matrix unit {name:?} for d = {d}"
                    )))
                }
            }
        }
        _ => return Err(CliError::validation(format!("unknown operator {name:?}"))),
    };
    Ok(m)
}

/// Parse `NAME:site` factors joined by `*` into one operator.
pub fn parse_operator(spec: &str, d: usize, num_sites: usize) -> Result<DenseOperator> {
    let mut out: Option<DenseOperator> = None;
    for factor in spec.split('*').map(str::trim) {
        let (name, site) = factor.split_once(':').ok_or_else(|| {
            CliError::validation(format!("operator factor {factor:?} must look like X:0"))
        })?;
        let site: usize = site
            .trim()
            .parse()
            .map_err(|_| CliError::validation(format!("bad site in {factor:?}")))?;
        if site >= num_sites {
            return Err(CliError::validation(format!(
                "site {site} out of range for {num_sites} sites"
            )));
        }
        let op = DenseOperator::new(d, vec![site], single_site(name.trim(), d)?)?;
        out = Some(match out {
            None => op,
            Some(acc) => acc.kron(&op)?,
        });
    }
    out.ok_or_else(|| CliError::validation("empty operator specification"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_and_shift_commute_up_to_phase() {
        for d in 2..5 {
            let x = single_site("X", d).unwrap();
            let z = single_site("Z", d).unwrap();
            let omega = C64::from_polar(1.0, 2.0 * PI / d as f64);
            assert!((&z * &x - &x * &z * omega).norm() < 1e-12);
        }
    }

    #[test]
    fn products_sort_sites() {
        let op = parse_operator("Z:2*X:0", 2, 3).unwrap();
        assert_eq!(op.support(), &[0, 2]);
        assert!(parse_operator("X:0*Z:0", 2, 3).is_err());
        assert!(parse_operator("X:3", 2, 3).is_err());
        assert!(parse_operator("Q:0", 2, 3).is_err());
        assert!(parse_operator("E02:0", 2, 1).is_err());
        assert!(parse_operator("E12:1", 3, 2).is_ok());
    }
}
