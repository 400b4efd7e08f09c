use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// A real with 10 significant digits.
pub fn real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (9 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

fn round_real(x: f64) -> f64 {
    real(x).parse().unwrap_or(x)
}

/// Rounds every non-integer number in a JSON tree to 10 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            serde_json::Number::from_f64(round_real(n.as_f64().unwrap()))
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn print_json(v: Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &round_json(v))?;
    writeln!(out)
}

pub fn print_csv(header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

/// Left-aligned text columns separated by two spaces.
pub fn print_table(header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, cell) in r.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = io::stdout().lock();
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            if i + 1 < cells.len() {
                s.extend(std::iter::repeat_n(' ', widths[i] - c.chars().count()));
            }
        }
        s
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for r in rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(real(615_581.527_912_3), "615581.5279");
        assert_eq!(real(5.716_497_291_9), "5.716497292");
        assert_eq!(real(0.001_885_6), "0.001885600000");
        assert_eq!(real(2.128e-7), "2.128000000e-7");
        assert_eq!(real(1e9), "1000000000");
        assert_eq!(real(0.0), "0");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let v = serde_json::json!({"a": 3, "b": 0.123456789012345, "c": [1.0000000000001]});
        let r = round_json(v);
        assert_eq!(r["a"], 3);
        assert_eq!(r["b"].as_f64().unwrap(), 0.1234567890);
        assert_eq!(r["c"][0].as_f64().unwrap(), 1.0);
    }
}
