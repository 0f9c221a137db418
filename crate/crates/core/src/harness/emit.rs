use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::sweep::SweepRow;

pub const CSV_HEADER: &str = "scenario_id,relation,n,d_b,lhs,rhs,slack,satisfied,certified,ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" | "jsonlines" => Ok(OutputFormat::JsonLines),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "jsonl",
        })
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "jsonl",
        }
    }
}

/// 17 significant digits.
fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scenario_id,
            r.relation,
            r.n,
            r.d_b,
            g17(r.lhs),
            g17(r.rhs),
            g17(r.slack),
            r.satisfied,
            r.certified,
            g17(r.ms)
        )?;
    }
    w.flush()
}

pub fn write_jsonl<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<SweepRow>> {
    r.lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|(i, line)| {
            serde_json::from_str(&line?).map_err(|e| Error::Parse {
                context: format!("line {}", i + 1),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[SweepRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let write = |w: &mut dyn Write| match format {
        OutputFormat::Csv => write_csv(rows, w),
        OutputFormat::JsonLines => write_jsonl(rows, w),
    };
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            write(&mut BufWriter::new(f)).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        }
        None => write(&mut BufWriter::new(io::stdout().lock())).map_err(Error::from),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_sweep, SweepConfig};

    fn rows() -> Vec<SweepRow> {
        run_sweep(&SweepConfig {
            seed: 11,
            count: 2,
            n_values: vec![2, 3],
            d_b_values: vec![2],
            random_povms: 0,
            ..SweepConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut out = Vec::new();
        write_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_columns_are_consistent() {
        let rows = rows();
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 10);
            let (lhs, rhs, slack): (f64, f64, f64) =
                (f[4].parse().unwrap(), f[5].parse().unwrap(), f[6].parse().unwrap());
            assert!((slack - (rhs - lhs)).abs() <= 1e-12);
            // d.dddddddddddddddde±x
            assert_eq!(f[4].split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
        }
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let rows = rows();
        let mut out = Vec::new();
        write_jsonl(&rows, &mut out).unwrap();
        assert_eq!(read_jsonl(&out[..]).unwrap(), rows);
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("JSONL".parse::<OutputFormat>().unwrap(), OutputFormat::JsonLines);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
