//! Matrix, report and split-vector text formats.

use std::collections::BTreeMap;

use serde::Serialize;

use treedist::splits::SplitVector;

/// Twelve significant digits, `.` as decimal point, shortest form.
pub fn fmt_value(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // -0 and 0 print alike.
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

pub fn tsv(m: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for j in 0..m.len() {
        out.push('\t');
        out.push_str(&j.to_string());
    }
    out.push('\n');
    for (i, row) in m.iter().enumerate() {
        out.push_str(&i.to_string());
        for x in row {
            out.push('\t');
            out.push_str(&fmt_value(*x));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonMatrix<'a> {
    metric: &'a str,
    inputs: &'a [String],
    matrix: &'a [Vec<f64>],
}

/// Non-finite values serialize as `null`.
pub fn json(metric: &str, inputs: &[String], m: &[Vec<f64>]) -> String {
    let mut s = serde_json::to_string_pretty(&JsonMatrix { metric, inputs, matrix: m }).expect("matrix serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct PairNote {
    pub i: usize,
    pub j: usize,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub metric: &'a str,
    pub inputs: &'a [String],
    pub flag_counts: BTreeMap<String, usize>,
    pub pairs: Vec<PairNote>,
}

impl Report<'_> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `n=<leaves>` then `<index> <weight>` per split; weights print exactly.
pub fn vector_block(v: &SplitVector) -> treedist::Result<String> {
    let mut out = format!("n={}\n", v.n());
    for (i, w) in v.indexed()? {
        out.push_str(&format!("{i} {w}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_value(2.0), "2");
        assert_eq!(fmt_value(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_value(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_value(-0.0), "0");
        assert_eq!(fmt_value(f64::NAN), "NaN");
        assert_eq!(fmt_value(1234567.891234567), "1234567.89123");
    }
}
