//! Plain-text matrices: `rows cols` followed by `rows·cols` complex entries
//! in row-major order, each written `re+imi` and separated by whitespace.
//!
//! A bare real (`0.5`) or bare imaginary (`-2i`) entry is also accepted.

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64};

/// Parses one `re+imi` entry.
pub fn parse_complex(token: &str) -> Result<C64> {
    let bad = || Error::InvalidParameter(format!("malformed complex entry '{token}'"));
    let Some(body) = token.strip_suffix('i') else {
        return token.parse::<f64>().map(|re| c(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(c(re, im))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        tokens
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| {
                Error::InvalidParameter(format!("matrix text must start with the {what} count"))
            })
    };
    let rows = dim("row")?;
    let cols = dim("column")?;
    let entries = tokens
        .map(parse_complex)
        .collect::<Result<alloc::vec::Vec<_>>>()?;
    if entries.len() != rows * cols {
        return Err(Error::InvalidParameter(format!(
            "a {rows}x{cols} matrix needs {} entries, found {}",
            rows * cols,
            entries.len()
        )));
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, &entries))
}

/// Shortest round-trip decimal form.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(z.im.abs()))
}

/// One row per line, dimensions on the first line.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", format_complex(m[(i, j)]));
        }
        out.push('\n');
    }
    out
}
