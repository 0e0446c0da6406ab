//! Text formats: the scalar literal `k:v1,...,vk` and the CAM matrix file.
//!
//! CAM layout:
//!
//! ```text
//! cam 1 <m> <n> <k> <real|complex>
//! <row> <col> v1 ... vk        (m·n lines, 1-based indices)
//! ```
//!
//! Values are time-domain parameters written with 17 significant digits,
//! complex ones as `re+imi`, so every finite double reads back bit-equal.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{CircError, Result};
use crate::linalg::CircMatrix;
use crate::scalar::CircScalar;

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| CircError::Parse(format!("{s:?}: {e}")))
}

/// Parses `re`, `re+imi`, `re-imi` or `imi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Complex64::new(parse_real(&body[..i])?, parse_real(&body[i..])?)),
        None => Ok(Complex64::new(0.0, parse_real(body)?)),
    }
}

pub fn format_scalar(a: &CircScalar) -> String {
    let values: Vec<String> = match a.real_params() {
        Some(p) => p.into_iter().map(format_f64).collect(),
        None => a.params().iter().map(|&z| format_complex(z)).collect(),
    };
    format!("{}:{}", a.k(), values.join(","))
}

/// Parses `k:v1,...,vk`. Entries with an `i` suffix make the scalar complex.
pub fn parse_scalar(s: &str) -> Result<CircScalar> {
    let (k, rest) = s.trim().split_once(':').ok_or_else(|| CircError::Parse(format!("missing ':' in {s:?}")))?;
    let k: usize = k.trim().parse().map_err(|e| CircError::Parse(format!("bad k {k:?}: {e}")))?;
    let fields: Vec<&str> = rest.split(',').map(str::trim).filter(|f| !f.is_empty()).collect();
    if k == 0 || fields.len() != k {
        return Err(CircError::Parse(format!("expected {k} values, found {}", fields.len())));
    }
    if fields.iter().any(|f| f.ends_with('i')) {
        let p = fields.iter().map(|f| parse_complex(f)).collect::<Result<Vec<_>>>()?;
        CircScalar::from_complex(&p)
    } else {
        let p = fields.iter().map(|f| parse_real(f)).collect::<Result<Vec<_>>>()?;
        CircScalar::from_real(&p)
    }
}

pub fn write_cam<W: Write>(a: &CircMatrix, mut out: W) -> std::io::Result<()> {
    let (m, n, k) = (a.rows(), a.cols(), a.k());
    let kind = if a.is_real() { "real" } else { "complex" };
    writeln!(out, "cam 1 {m} {n} {k} {kind}")?;
    let p = a.params();
    for r in 0..m {
        for c in 0..n {
            write!(out, "{} {}", r + 1, c + 1)?;
            for z in &p[(r * n + c) * k..(r * n + c + 1) * k] {
                if a.is_real() {
                    write!(out, " {}", format_f64(z.re))?;
                } else {
                    write!(out, " {}", format_complex(*z))?;
                }
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn read_cam<R: BufRead>(input: R) -> Result<CircMatrix> {
    let mut lines = input
        .lines()
        .map(|l| l.map_err(|e| CircError::Parse(e.to_string())))
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.trim_start().starts_with('#')));
    let header = lines.next().ok_or_else(|| CircError::Parse("empty CAM input".into()))??;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[0] != "cam" || h[1] != "1" {
        return Err(CircError::Parse(format!("bad CAM header {header:?}")));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|e| CircError::Parse(format!("bad dimension {s:?}: {e}")));
    let (m, n, k) = (dim(h[2])?, dim(h[3])?, dim(h[4])?);
    let real = match h[5] {
        "real" => true,
        "complex" => false,
        other => return Err(CircError::Parse(format!("unknown kind {other:?}"))),
    };
    if k == 0 {
        return Err(CircError::Parse("k must be positive".into()));
    }
    let mut params = vec![Complex64::new(0.0, 0.0); m * n * k];
    let mut seen = vec![false; m * n];
    for _ in 0..m * n {
        let line = lines.next().ok_or_else(|| CircError::Parse("truncated CAM input".into()))??;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != k + 2 {
            return Err(CircError::Parse(format!("expected {} fields in {line:?}", k + 2)));
        }
        let (r, c) = (dim(f[0])?, dim(f[1])?);
        if r == 0 || c == 0 || r > m || c > n {
            return Err(CircError::Parse(format!("entry ({r},{c}) outside {m}x{n}")));
        }
        let e = (r - 1) * n + (c - 1);
        if std::mem::replace(&mut seen[e], true) {
            return Err(CircError::Parse(format!("duplicate entry ({r},{c})")));
        }
        for (i, v) in f[2..].iter().enumerate() {
            params[e * k + i] = if real { Complex64::new(parse_real(v)?, 0.0) } else { parse_complex(v)? };
        }
    }
    if lines.next().is_some() {
        return Err(CircError::Parse("trailing data after CAM entries".into()));
    }
    if real {
        let p: Vec<f64> = params.iter().map(|z| z.re).collect();
        CircMatrix::from_real_params(m, n, k, &p)
    } else {
        CircMatrix::from_complex_params(m, n, k, &params)
    }
}
