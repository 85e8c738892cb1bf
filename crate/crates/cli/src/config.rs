//! Flag values and the flat JSON config file.
//!
//! A config file is one JSON object whose keys are flag names with `_` in
//! place of `-`. Values may be strings in flag syntax, numbers, booleans or
//! arrays of scalars. A flag given on the command line wins over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde_json::Value;

/// Comma-separated integers; `a..b` is an inclusive range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ints(pub Vec<u32>);

impl FromStr for Ints {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once("..") {
                Some((a, b)) => {
                    let a: u32 = a.trim().parse().map_err(|_| format!("bad range start in `{item}`"))?;
                    let b: u32 = b.trim().parse().map_err(|_| format!("bad range end in `{item}`"))?;
                    if a > b {
                        return Err(format!("empty range `{item}`"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(
                    item.parse()
                        .map_err(|_| format!("`{item}` is not a non-negative integer"))?,
                ),
            }
        }
        Ok(Ints(out))
    }
}

impl fmt::Display for Ints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

/// Comma-separated floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Floats(pub Vec<f64>);

impl FromStr for Floats {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
            .collect::<Result<Vec<_>, _>>()
            .map(Floats)
    }
}

impl fmt::Display for Floats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[T]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Closed interval `lo:hi`; a single number is a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `n` evenly spaced values, endpoints included.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        if n <= 1 || self.is_point() {
            return vec![self.lo];
        }
        (0..n)
            .map(|i| match i {
                0 => self.lo,
                _ if i == n - 1 => self.hi,
                _ => self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64,
            })
            .collect()
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", t.trim()))
        };
        let span = match s.split_once(':') {
            Some((a, b)) => Span {
                lo: num(a)?,
                hi: num(b)?,
            },
            None => Span::point(num(s)?),
        };
        if !span.lo.is_finite() || !span.hi.is_finite() {
            return Err(format!("range `{s}` is not finite"));
        }
        if span.lo > span.hi {
            return Err(format!("range `{s}` has lo > hi"));
        }
        Ok(span)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}", self.lo, self.hi)
        }
    }
}

/// Parsed config file, restricted to the keys a command accepts.
#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, allowed).with_context(|| format!("config {}", path.display()))
    }

    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self> {
        let values: BTreeMap<String, Value> = serde_json::from_str(text).context("expected a flat JSON object")?;
        if let Some(k) = values.keys().find(|k| !allowed.contains(&k.as_str())) {
            bail!("unknown key `{k}`; accepted keys: {}", allowed.join(", "));
        }
        Ok(Self { values })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let Some(v) = self.values.get(key) else {
            return Ok(None);
        };
        let text = value_text(v).with_context(|| format!("config key `{key}`"))?;
        text.parse::<T>()
            .map(Some)
            .map_err(|e| anyhow::anyhow!("config key `{key}`: {e}"))
    }

    /// `flag`, else the config value, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

fn value_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(|x| match x {
                    Value::Array(_) | Value::Object(_) | Value::Null => bail!("arrays may only hold scalars"),
                    other => value_text(other),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(parts.join(","))
        }
        Value::Null | Value::Object(_) => bail!("expected a string, number, boolean or array"),
    }
}
