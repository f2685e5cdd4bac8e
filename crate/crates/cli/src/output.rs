//! Machine records, CSV tables and text rendering.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::Formatter;
use ssys_core::{Classification, RobustCase, Trajectory};

/// Significant digits of every floating-point value written by the tool.
pub const SIGNIFICANT_DIGITS: usize = 17;

/// Formats a finite float with 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Compact JSON with fixed-width floats.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// One line-delimited JSON record.
pub fn record_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).context("serializing record")?;
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

/// Standard output, or a file when `path` is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_csv(out: &mut dyn Write, traj: &Trajectory) -> Result<()> {
    let header = if traj.dim == 2 { "t,u,v" } else { "t,x1,x2,x3,x4" };
    writeln!(out, "{header}")?;
    for (t, y) in traj.times.iter().zip(&traj.states) {
        let mut row = fmt_f64(*t);
        for v in y {
            row.push(',');
            row.push_str(&fmt_f64(*v));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_short).unwrap_or_else(|| "-".into())
}

/// Human-friendly number for text reports.
pub fn fmt_short(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    } else {
        format!("{v:.6e}")
    }
}

pub fn classification_text(cl: &Classification, robust: Option<RobustCase>) -> String {
    let mut s = String::new();
    s += &format!("verdict: {}\n", cl.verdict);
    s += &format!("case: {}\n", cl.case.map(|c| c.to_string()).unwrap_or_else(|| "-".into()));
    s += &format!("reason: {}\n", cl.reason);
    if let Some(j) = &cl.jacobian {
        s += &format!(
            "J: [[{}, {}], [{}, {}]]\n",
            fmt_short(j.j11),
            fmt_short(j.j12),
            fmt_short(j.j21),
            fmt_short(j.j22)
        );
        s += &format!("det J: {}\ntr J: {}\n", fmt_short(j.det), fmt_short(j.trace));
    }
    if let Some(c) = &cl.c {
        let c: Vec<String> = c.c.iter().map(|v| fmt_short(*v)).collect();
        s += &format!("c: ({})\n", c.join(", "));
    }
    if cl.l_infinity.is_some() {
        s += &format!("L_inf: {}\n", opt(cl.l_infinity));
    }
    if cl.l.is_some() {
        s += &format!("L: {}\n", opt(cl.l));
    }
    if let Some(gas) = cl.gas {
        s += &format!("globally asymptotically stable: {}\n", if gas { "yes" } else { "no" });
    }
    s += &format!(
        "robustly permanent: {}\n",
        robust.map(|r| format!("yes ({r})")).unwrap_or_else(|| "no".into())
    );
    s
}
