//! Text output: significant-digit formatting, CSV assembly, JSON mirrors.
//!
//! Every CSV uses `.` decimal points, `\n` line endings, and a header row;
//! values carry 12 significant digits. Files are assembled fully in memory
//! and written once, so identical configurations produce byte-identical
//! files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Formats with `sig` significant digits, trimming trailing zeros, in the
/// style of C's %g.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= sig as i32 {
        let s = format!("{:.*e}", sig.saturating_sub(1), x);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{e}", trim_decimal(mantissa)),
            None => s,
        }
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_decimal(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_decimal(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Default number of significant digits in CSV output.
pub const CSV_SIG: usize = 12;

pub fn fmt(x: f64) -> String {
    fmt_sig(x, CSV_SIG)
}

/// A CSV document under construction.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// Writes `content` to `dir/name`, creating the directory if needed, and
/// returns the full path.
pub fn write_text(dir: &Path, name: &str, content: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

/// Writes a JSON mirror with a trailing newline.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> io::Result<PathBuf> {
    let mut body = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    body.push('\n');
    write_text(dir, name, &body)
}

// ---- JSON mirror schemas (field order is fixed by the structs) ----

#[derive(Serialize)]
pub struct SpectrumJson {
    pub v: Vec<usize>,
    pub lambda: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeRowJson>>,
}

#[derive(Serialize)]
pub struct AmplitudeRowJson {
    pub v: usize,
    pub f: usize,
    #[serde(rename = "Q")]
    pub q: f64,
}

#[derive(Serialize)]
pub struct StrategyValuesJson {
    pub r1: f64,
    pub mp_r1: f64,
    pub r2: f64,
    pub r3: f64,
}

#[derive(Serialize)]
pub struct CompareJson {
    pub v: Vec<usize>,
    pub lambda: Vec<f64>,
    pub cmf: CmfJson,
    /// Accuracy measures scaled by 100 (same convention as the CSV footer).
    pub delta2: Delta2Json,
    pub overlap: OverlapJson,
}

#[derive(Serialize)]
pub struct CmfJson {
    pub r1: Vec<f64>,
    pub mp_r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub r3: Vec<f64>,
}

#[derive(Serialize)]
pub struct Delta2Json {
    #[serde(rename = "H")]
    pub h: StrategyValuesJson,
    #[serde(rename = "E")]
    pub e: StrategyValuesJson,
    #[serde(rename = "E_up")]
    pub e_up: StrategyValuesJson,
}

#[derive(Serialize)]
pub struct OverlapRowJson {
    pub v: usize,
    pub cos: f64,
    pub delta2_ef: f64,
}

#[derive(Serialize)]
pub struct OverlapJson {
    pub r1: Vec<OverlapRowJson>,
    pub r2: Vec<OverlapRowJson>,
    pub r3: Vec<OverlapRowJson>,
}

#[derive(Serialize)]
pub struct DynamicsJson {
    pub series: SeriesJson,
}

#[derive(Serialize)]
pub struct SeriesJson {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    #[serde(rename = "Y0")]
    pub y0: Vec<f64>,
    #[serde(rename = "N0")]
    pub n0: Vec<f64>,
    #[serde(rename = "N1")]
    pub n1: Vec<f64>,
    #[serde(rename = "Y0_qc", skip_serializing_if = "Option::is_none")]
    pub y0_qc: Option<Vec<f64>>,
    #[serde(rename = "N0_qc", skip_serializing_if = "Option::is_none")]
    pub n0_qc: Option<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt(-(2.0_f64.sqrt())), "-1.41421356237");
        assert_eq!(fmt(2.0_f64.sqrt()), "1.41421356237");
        assert_eq!(fmt(0.0), "0");
        assert_eq!(fmt(-0.0), "0");
        assert_eq!(fmt(0.025), "0.025");
        assert_eq!(fmt(17.5), "17.5");
        assert_eq!(fmt(1.0), "1");
        assert_eq!(fmt_sig(1536.912, 6), "1536.91");
        assert_eq!(fmt_sig(1.23e-7, 3), "1.23e-7");
        assert_eq!(fmt_sig(1e15, 4), "1e15");
    }

    #[test]
    fn csv_assembly() {
        let mut csv = Csv::new("a,b");
        csv.row(&["1".into(), "2".into()]);
        assert_eq!(csv.into_string(), "a,b\n1,2\n");
    }
}
