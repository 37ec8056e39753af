//! Text syntax for command-line values.
//!
//! * rationals: `p/q`, integers, finite decimals (`0.25`), all exact;
//! * reals: decimals, `p/q`, and multiples of `pi` (`pi/3`, `-2pi/3`, `3*pi`);
//! * complex numbers: `a`, `bi`, `a+bi`, `a-bi`, `i`, `cis(θ)`;
//! * vectors separate coordinates with `,`, point lists and matrix rows with `;`,
//!   and the two points of a configuration with `:`.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::compact_groups::{UnitaryMatrix, C64};
use crate::error::{Error, Result};
use crate::lattice::{Rational, RationalMatrix, RationalVector};

fn fail(location: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.to_string(),
        message: message.into(),
    }
}

fn parse_bigint(s: &str, location: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    if digits.is_empty() || !digits.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
        return Err(fail(location, format!("`{s}` is not an integer")));
    }
    BigInt::from_str(digits).map_err(|e| fail(location, format!("`{s}`: {e}")))
}

fn parse_decimal(s: &str, location: &str) -> Result<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(fail(location, format!("`{s}` is not a rational number")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|e| fail(location, e.to_string()))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

pub fn parse_rational(s: &str, location: &str) -> Result<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_bigint(p.trim(), location)?;
            let q = parse_bigint(q.trim(), location)?;
            if q.is_zero() {
                return Err(fail(location, "zero denominator"));
            }
            Ok(Rational::new(p, q))
        }
        None => parse_decimal(s, location),
    }
}

pub fn parse_rational_vector(s: &str, location: &str) -> Result<RationalVector> {
    let coords = s
        .split(',')
        .enumerate()
        .map(|(i, c)| parse_rational(c, &format!("{location}, coordinate {}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RationalVector::new(coords))
}

/// `x:y`
pub fn parse_config(s: &str, location: &str) -> Result<(RationalVector, RationalVector)> {
    let Some((a, b)) = s.split_once(':') else {
        return Err(fail(location, "expected two points separated by `:`"));
    };
    let x = parse_rational_vector(a, &format!("{location}, point 1"))?;
    let y = parse_rational_vector(b, &format!("{location}, point 2"))?;
    if x.dim() != y.dim() {
        return Err(fail(location, "the two points have different dimensions"));
    }
    Ok((x, y))
}

/// `p1;p2;…`; an empty string is the empty list.
pub fn parse_rational_points(s: &str, location: &str) -> Result<Vec<RationalVector>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .enumerate()
        .map(|(i, p)| parse_rational_vector(p, &format!("{location}, point {}", i + 1)))
        .collect()
}

fn rows<'a>(s: &'a str, location: &str) -> Result<Vec<Vec<&'a str>>> {
    let rows: Vec<Vec<&str>> = s.split(';').map(|r| r.split(',').collect()).collect();
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(fail(location, format!("expected a square matrix with {n} rows")));
    }
    Ok(rows)
}

pub fn parse_rational_matrix(s: &str, location: &str) -> Result<RationalMatrix> {
    let entries = rows(s, location)?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, e)| parse_rational(e, &format!("{location}, entry ({}, {})", i + 1, j + 1)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RationalMatrix::from_rows(entries)
}

pub fn parse_integer_matrix(s: &str, location: &str) -> Result<Vec<Vec<i64>>> {
    rows(s, location)?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, e)| {
                    e.trim().parse::<i64>().map_err(|_| {
                        fail(
                            &format!("{location}, entry ({}, {})", i + 1, j + 1),
                            format!("`{}` is not an integer", e.trim()),
                        )
                    })
                })
                .collect()
        })
        .collect()
}

fn parse_plain_real(s: &str, location: &str) -> Result<f64> {
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_plain_real(p, location)?;
        let q = parse_plain_real(q, location)?;
        if q == 0.0 {
            return Err(fail(location, "division by zero"));
        }
        return Ok(p / q);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| fail(location, format!("`{s}` is not a real number")))?;
    if !v.is_finite() {
        return Err(fail(location, format!("`{s}` is not finite")));
    }
    Ok(v)
}

pub fn parse_real(s: &str, location: &str) -> Result<f64> {
    let s = s.trim();
    match s.find("pi") {
        Some(at) => {
            let coeff = s[..at].trim_end_matches('*').trim();
            let c = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => parse_plain_real(c, location)?,
            };
            let rest = s[at + 2..].trim();
            let d = match rest.strip_prefix('/') {
                Some(d) => parse_plain_real(d.trim(), location)?,
                None if rest.is_empty() => 1.0,
                None => return Err(fail(location, format!("unexpected `{rest}` after pi"))),
            };
            if d == 0.0 {
                return Err(fail(location, "division by zero"));
            }
            Ok(c * std::f64::consts::PI / d)
        }
        None => parse_plain_real(s, location),
    }
}

pub fn parse_real_vector(s: &str, location: &str) -> Result<Vec<f64>> {
    s.split(',')
        .enumerate()
        .map(|(i, c)| parse_real(c, &format!("{location}, coordinate {}", i + 1)))
        .collect()
}

pub fn parse_real_points(s: &str, location: &str) -> Result<Vec<Vec<f64>>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .enumerate()
        .map(|(i, p)| parse_real_vector(p, &format!("{location}, point {}", i + 1)))
        .collect()
}

/// Index of the sign that separates real and imaginary parts, if any.
fn split_index(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E' | b'/' | b'*'))
}

fn parse_imaginary(s: &str, location: &str) -> Result<f64> {
    let coeff = s.strip_suffix('i').expect("caller checked").trim_end_matches('*');
    match coeff {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        c => parse_real(c, location),
    }
}

pub fn parse_complex(s: &str, location: &str) -> Result<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(inner) = s.strip_prefix("cis(").and_then(|r| r.strip_suffix(')')) {
        return Ok(C64::from_polar(1.0, parse_real(inner, location)?));
    }
    if !s.ends_with('i') {
        return Ok(C64::new(parse_real(&s, location)?, 0.0));
    }
    match split_index(&s) {
        Some(k) => Ok(C64::new(
            parse_real(&s[..k], location)?,
            parse_imaginary(&s[k..], location)?,
        )),
        None => Ok(C64::new(0.0, parse_imaginary(&s, location)?)),
    }
}

/// `I`, `-I`, `scalar(θ)` for `e^{iθ}·I`, `diag(θ_1,…,θ_n)`, or a full
/// matrix with complex entries.
pub fn parse_unitary(s: &str, n: usize, location: &str) -> Result<UnitaryMatrix> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let m = if t == "I" {
        DMatrix::identity(n, n)
    } else if t == "-I" {
        -DMatrix::<C64>::identity(n, n)
    } else if let Some(inner) = t.strip_prefix("scalar(").and_then(|r| r.strip_suffix(')')) {
        UnitaryMatrix::scalar(n, C64::from_polar(1.0, parse_real(inner, location)?)).matrix().clone()
    } else if let Some(inner) = t.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
        let angles = parse_real_vector(inner, location)?;
        if angles.len() != n {
            return Err(fail(location, format!("diag needs {n} angles, got {}", angles.len())));
        }
        UnitaryMatrix::diagonal(&angles).matrix().clone()
    } else {
        let r = rows(&t, location)?;
        if r.len() != n {
            return Err(fail(location, format!("expected a {n}x{n} matrix")));
        }
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (i, row) in r.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = parse_complex(e, &format!("{location}, entry ({}, {})", i + 1, j + 1))?;
            }
        }
        m
    };
    UnitaryMatrix::special(m).map_err(|e| fail(location, e.to_string()))
}

/// `L1,L2,…`, each a positive exact rational.
pub fn parse_lengths(s: &str, location: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .enumerate()
        .map(|(i, l)| {
            let loc = format!("{location}, entry {}", i + 1);
            let v = parse_rational(l, &loc)?;
            if v <= Rational::zero() {
                return Err(fail(&loc, "length bound must be positive"));
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;
    use std::f64::consts::PI;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/3", "x").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-2/4", "x").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("0.25", "x").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-.5", "x").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7", "x").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0", "x").is_err());
        assert!(parse_rational("1..2", "x").is_err());
        assert!(parse_rational("abc", "x").is_err());
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_config("0,0:1/3,x", "--config").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert_eq!(location, "--config, point 2, coordinate 2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reals() {
        assert!((parse_real("pi/3", "x").unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((parse_real("-2pi/3", "x").unwrap() + 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_real("2*pi", "x").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(parse_real("1/4", "x").unwrap(), 0.25);
        assert_eq!(parse_real("-1e-3", "x").unwrap(), -1e-3);
        assert!(parse_real("pix", "x").is_err());
    }

    #[test]
    fn complex_numbers() {
        assert_eq!(parse_complex("1+2i", "x").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-i", "x").unwrap(), C64::new(0.5, -1.0));
        assert_eq!(parse_complex("-i", "x").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("3", "x").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("1e-3+1e-3i", "x").unwrap(), C64::new(1e-3, 1e-3));
        let z = parse_complex("cis(pi/2)", "x").unwrap();
        assert!((z - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn unitaries() {
        let u = parse_unitary("diag(pi/3,-pi/3)", 2, "--k2").unwrap();
        assert!((u.matrix()[(0, 0)] - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-15);
        let m = parse_unitary("0,-1;1,0", 2, "--k1").unwrap();
        assert_eq!(m.matrix()[(1, 0)], C64::new(1.0, 0.0));
        assert!(parse_unitary("-I", 3, "--k").is_err());
        assert!(parse_unitary("scalar(2pi/3)", 3, "--k").is_ok());
        assert!(parse_unitary("diag(1,1)", 2, "--k").is_err());
    }
}
