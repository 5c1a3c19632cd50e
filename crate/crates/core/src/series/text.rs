//! Line-oriented text form of a rational series.
//!
//! ```text
//! # family G
//! order 3
//! prefactor_sq 3
//! offset none
//! 0 1/1
//! 1 -1/5
//! 2 -1/70
//! 3 1/1050
//! ```
//!
//! Lines starting with `#` are comments; the `family` comment is informative
//! only. Coefficients are always written as `numerator/denominator` in lowest
//! terms, so the output is byte-for-byte reproducible.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{Offset, Series};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header field `{0}`")]
    MissingHeader(&'static str),
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },
}

fn rational_str(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Writes the series, with an optional family comment.
pub fn write_series(series: &Series<BigRational>, family: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(name) = family {
        let _ = writeln!(out, "# family {name}");
    }
    let _ = writeln!(out, "order {}", series.order());
    let _ = writeln!(out, "prefactor_sq {}", rational_str(series.prefactor_sq()));
    let _ = writeln!(out, "offset {}", series.offset().tag());
    for (n, c) in series.coeffs().iter().enumerate() {
        let _ = writeln!(out, "{n} {}", rational_str(c));
    }
    out
}

fn parse_rational(s: &str, line: usize) -> Result<BigRational, ParseError> {
    let err = |msg: &str| ParseError::Syntax { line, msg: format!("{msg}: `{s}`") };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| err("bad numerator"))?;
    let d = BigInt::from_str(d.trim()).map_err(|_| err("bad denominator"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Parses the text form back into a series.
pub fn parse_series(text: &str) -> Result<Series<BigRational>, ParseError> {
    let mut order = None;
    let mut prefactor = None;
    let mut offset = None;
    let mut coeffs: Vec<BigRational> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .map(|(k, v)| (k, v.trim()))
            .ok_or_else(|| ParseError::Syntax { line: line_no, msg: format!("expected two fields: `{line}`") })?;
        match key {
            "order" => {
                let n = value.parse::<usize>().map_err(|_| ParseError::Syntax {
                    line: line_no,
                    msg: format!("bad order `{value}`"),
                })?;
                order = Some(n);
            }
            "prefactor_sq" => {
                let q = parse_rational(value, line_no)?;
                if !q.is_positive() {
                    return Err(ParseError::Syntax { line: line_no, msg: "prefactor_sq must be positive".into() });
                }
                prefactor = Some(q);
            }
            "offset" => {
                offset = Some(Offset::from_tag(value).ok_or_else(|| ParseError::Syntax {
                    line: line_no,
                    msg: format!("unknown offset `{value}`"),
                })?);
            }
            _ => {
                let n = key.parse::<usize>().map_err(|_| ParseError::Syntax {
                    line: line_no,
                    msg: format!("unknown key `{key}`"),
                })?;
                if n != coeffs.len() {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        msg: format!("coefficient index {n} out of sequence (expected {})", coeffs.len()),
                    });
                }
                coeffs.push(parse_rational(value, line_no)?);
            }
        }
    }

    let order = order.ok_or(ParseError::MissingHeader("order"))?;
    if coeffs.len() != order + 1 {
        return Err(ParseError::CoefficientCount { expected: order + 1, found: coeffs.len() });
    }
    Ok(Series::new(coeffs)
        .with_prefactor(prefactor.unwrap_or_else(BigRational::one))
        .with_offset(offset.unwrap_or_default()))
}
