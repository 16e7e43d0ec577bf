use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

pub const SCHEMA: &str = "stingray-kneser/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// What a command produced: a status plus a flat list of records.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub records: Vec<T>,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &'static str, status: Status, records: Vec<T>) -> Self {
        Report {
            schema: SCHEMA,
            command,
            status,
            message: None,
            records,
        }
    }

    pub fn skipped(command: &'static str, message: String) -> Self {
        Report {
            schema: SCHEMA,
            command,
            status: Status::Skipped,
            message: Some(message),
            records: Vec::new(),
        }
    }
}

fn to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing csv")?)?)
}

/// Left-aligned columns built from the CSV rendering, so both formats show
/// the same fields.
fn to_table<T: Serialize>(records: &[T]) -> Result<String> {
    let csv_text = to_csv(records)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(csv_text.as_bytes());
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| {
            r.map(|r| {
                r.iter()
                    .map(|s| if s.is_empty() { "-".into() } else { s.to_string() })
                    .collect()
            })
        })
        .collect::<Result<_, _>>()?;
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}

pub fn render<T: Serialize>(report: &Report<T>, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => to_csv(&report.records),
        Format::Table => {
            let mut s = to_table(&report.records)?;
            if let Some(m) = &report.message {
                s.push_str(m);
                s.push('\n');
            }
            s.push_str(&format!(
                "status: {}\n",
                serde_json::to_value(report.status)?.as_str().unwrap_or("?")
            ));
            Ok(s)
        }
    }
}

pub fn emit<T: Serialize>(report: &Report<T>, format: Format, out: Option<&Path>) -> Result<()> {
    let text = render(report, format)?;
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u32,
        b: Option<String>,
    }

    #[test]
    fn table_pads_and_marks_missing() {
        let r = Report::new(
            "t",
            Status::Pass,
            vec![
                Row { a: 10, b: None },
                Row {
                    a: 2,
                    b: Some("x/y".into()),
                },
            ],
        );
        let s = render(&r, Format::Table).unwrap();
        assert_eq!(s, "a   b\n10  -\n2   x/y\nstatus: pass\n");
    }

    #[test]
    fn json_has_schema() {
        let r = Report::new("t", Status::Fail, vec![Row { a: 1, b: None }]);
        let v: serde_json::Value = serde_json::from_str(&render(&r, Format::Json).unwrap()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["status"], "fail");
        assert!(v["records"][0]["b"].is_null());
    }
}
