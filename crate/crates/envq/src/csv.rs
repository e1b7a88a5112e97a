//! CSV output: `\n` line endings, numbers in their shortest round-trip form
//! after rounding to 12 significant digits.

use envq_core::text::format_real;

/// `x` rounded to 12 significant digits, printed as briefly as possible.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format_real(rounded)
}

/// Header line plus one line per row.
pub fn table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
