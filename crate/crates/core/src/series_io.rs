//! CSV form of [`DataSeries`].
//!
//! Output has optional `# key = value` comment lines, then the header
//! `model,regime,d,d_R,p_phy,p_log` and one row per point. Probabilities are
//! written in scientific notation with 6 significant digits. Input accepts the
//! same layout or the short header `d,p_phy,p_log`, in which case the caller
//! supplies the model, regime and the `d → d_R` map.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scaling::{DataSeries, NoiseModel, Regime};

pub const SERIES_HEADER: [&str; 6] = ["model", "regime", "d", "d_R", "p_phy", "p_log"];
pub const SHORT_HEADER: [&str; 3] = ["d", "p_phy", "p_log"];

/// Six significant digits, scientific notation.
pub fn format_sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Writes `# line` for every comment, then the CSV table.
pub fn write_series_csv<W: Write>(mut w: W, series: &[DataSeries], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}").map_err(io_err)?;
    }
    writeln!(w, "{}", SERIES_HEADER.join(",")).map_err(io_err)?;
    for s in series {
        for &(p, l) in &s.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.model,
                s.regime,
                s.d,
                s.d_r,
                format_sci(p),
                format_sci(l)
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Values used for columns that a short-header file does not carry.
pub struct SeriesDefaults<'a> {
    pub model: NoiseModel,
    pub regime: Regime,
    pub effective_distance: &'a dyn Fn(u32) -> f64,
}

enum Layout {
    Full,
    Short,
}

/// Parses either CSV layout. Points are grouped by `(model, regime, d, d_R)`
/// in order of first appearance and sorted by `p_phy` within each series.
pub fn read_series_csv<R: Read>(r: R, defaults: &SeriesDefaults<'_>) -> Result<Vec<DataSeries>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers().map_err(|e| parse_err(&e))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let layout = if names == SERIES_HEADER {
        Layout::Full
    } else if names == SHORT_HEADER {
        Layout::Short
    } else {
        return Err(Error::Parse {
            line: headers.position().map_or(1, |p| p.line()),
            message: format!(
                "unrecognized header `{}`; expected `{}` or `{}`",
                names.join(","),
                SERIES_HEADER.join(","),
                SHORT_HEADER.join(",")
            ),
        });
    };

    let mut out: Vec<DataSeries> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<&str> {
            rec.get(i).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing column `{name}`"),
            })
        };
        let num = |i: usize, name: &str| -> Result<f64> {
            let s = field(i, name)?;
            s.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("column `{name}`: `{s}` is not a number"),
            })
        };
        let int = |i: usize, name: &str| -> Result<u32> {
            let s = field(i, name)?;
            s.parse::<u32>().map_err(|_| Error::Parse {
                line,
                message: format!("column `{name}`: `{s}` is not a non-negative integer"),
            })
        };
        let tag = |e: Error| Error::Parse {
            line,
            message: e.to_string(),
        };
        let (model, regime, d, d_r, p, l) = match layout {
            Layout::Full => (
                field(0, "model")?.parse().map_err(tag)?,
                field(1, "regime")?.parse().map_err(tag)?,
                int(2, "d")?,
                num(3, "d_R")?,
                num(4, "p_phy")?,
                num(5, "p_log")?,
            ),
            Layout::Short => {
                let d = int(0, "d")?;
                (
                    defaults.model,
                    defaults.regime,
                    d,
                    (defaults.effective_distance)(d),
                    num(1, "p_phy")?,
                    num(2, "p_log")?,
                )
            }
        };
        if !(p > 0.0 && p <= 1.0 && l > 0.0) || !l.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("p_phy = {p}, p_log = {l}: probabilities must be positive and p_phy <= 1"),
            });
        }
        match out
            .iter_mut()
            .find(|s| s.model == model && s.regime == regime && s.d == d && s.d_r == d_r)
        {
            Some(s) => s.points.push((p, l)),
            None => out.push(DataSeries {
                model,
                regime,
                d,
                d_r,
                points: vec![(p, l)],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    Ok(out)
}

fn parse_err(e: &csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}
