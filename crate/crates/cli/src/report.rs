//! Report envelope, number formatting and output.

use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Format, Opts};

pub const SCHEMA: u32 = 1;

const SOURCES: &[&str] = &[
    include_str!("../../core/src/act.rs"),
    include_str!("../../core/src/complex.rs"),
    include_str!("../../core/src/equidist.rs"),
    include_str!("../../core/src/lattice.rs"),
    include_str!("../../core/src/scalar.rs"),
    include_str!("../../core/src/surface.rs"),
    include_str!("../../core/src/trop.rs"),
    include_str!("../../core/src/support/laurent.rs"),
    include_str!("../../core/src/support/numeric.rs"),
    include_str!("../../core/src/support/pl.rs"),
    include_str!("../../core/src/support/ronkin.rs"),
    include_str!("../../core/src/tmap/profile.rs"),
    include_str!("../../core/src/tmap/regime.rs"),
    include_str!("../../core/src/tmap/stability.rs"),
    include_str!("../../core/src/tmap/word.rs"),
    include_str!("../../core/src/oracle/mod.rs"),
    include_str!("../../core/src/oracle/catalog.rs"),
    include_str!("../../core/src/oracle/line.rs"),
    include_str!("commands.rs"),
];

/// Version plus a digest of the library sources the binary was built from.
pub fn version_hash() -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION"));
    for s in SOURCES {
        h.update(s.as_bytes());
    }
    let d = h.finalize();
    let hex: String = d.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("{}+{hex}", env!("CARGO_PKG_VERSION"))
}

/// Rounds to 12 significant digits; non-finite values become strings.
pub fn sig12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    if x == 0.0 {
        return json!(0.0);
    }
    let r: f64 = format!("{x:.11e}").parse().expect("float");
    json!(r)
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => sig12(n.as_f64().unwrap()),
        Value::Array(a) => Value::Array(a.into_iter().map(round_all).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

pub fn fmt12(x: f64) -> String {
    match sig12(x) {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s,
        _ => unreachable!(),
    }
}

/// A finished command: the payload, optional CSV rows and the property verdict.
pub struct Outcome {
    pub result: Value,
    pub csv: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub passed: bool,
}

impl Outcome {
    pub fn new(result: impl Serialize) -> Result<Self> {
        Ok(Outcome { result: serde_json::to_value(result)?, csv: None, passed: true })
    }

    pub fn code(&self) -> u8 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

pub fn emit(config: &Value, opts: &Opts, out: &Outcome) -> Result<()> {
    let text = match opts.format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "version": version_hash(),
                "config": config,
                "passed": out.passed,
                "result": round_all(out.result.clone()),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let (head, rows) = out.csv.as_ref().context("this command has no CSV form; use --format json")?;
            let mut s = head.join(",") + "\n";
            for r in rows {
                s += &r.join(",");
                s += "\n";
            }
            s
        }
    };
    match &opts.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(2f64.sqrt()), "1.41421356237");
        assert_eq!(fmt12(0.0), "0.0");
        assert_eq!(sig12(f64::INFINITY), Value::String("inf".into()));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(version_hash(), version_hash());
        assert!(version_hash().starts_with(env!("CARGO_PKG_VERSION")));
    }
}
