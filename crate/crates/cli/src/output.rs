//! Fixed-precision number formatting and file writers.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// `printf("%.17g")`: 17 significant digits, trailing zeros removed,
/// exponent form outside `1e-4 ≤ |v| < 1e17`.
pub fn g17(v: f64) -> String {
    const PRECISION: i32 = 17;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..PRECISION).contains(&exp) {
        trim_zeros(format!("{:.*}", (PRECISION - 1 - exp) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn g17_opt(v: Option<f64>) -> String {
    v.map(g17).unwrap_or_default()
}

fn create(path: &Path) -> io::Result<File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    File::create(path)
}

/// Writes to `path`, or stdout when `path` is `None`.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), crate::error::CliError> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        // reference strings from C printf("%.17g")
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1e-4), "0.0001");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(1e16), "10000000000000000");
        assert_eq!(g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(g17(2.0 / std::f64::consts::PI), "0.63661977236758138");
        assert_eq!(g17(6.02214076e23), "6.0221407599999999e+23");
        assert_eq!(g17(-3e-300), "-3.0000000000000002e-300");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(f64::NAN), "nan");
    }

    #[test]
    fn round_trips() {
        for v in [0.1, 1.0 / 3.0, 5.671281819617709, -7.596e-9, 1.7976931348623157e308, 5e-324] {
            assert_eq!(g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
