//! On-disk formats: frame JSON, eigenstep CSV and number lists.

use std::fmt::Write as _;

use frametoric::eigensteps::EigenstepTable;
use frametoric::frame::{CMatrix, Frame, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// `{"format_version":1,"d":..,"N":..,"entries":[[[re,im],..],..]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDocument {
    pub format_version: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl FrameDocument {
    pub fn from_frame(f: &Frame, seed: Option<u64>) -> Self {
        let m = f.matrix();
        let entries = (0..f.d())
            .map(|i| (0..f.n()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            d: f.d(),
            n: f.n(),
            entries,
            seed,
        }
    }

    pub fn to_frame(&self, source: &str) -> Result<Frame, CliError> {
        let field_error = |field: String, message: String| CliError::Input {
            origin: source.to_owned(),
            line: None,
            field: Some(field),
            message,
        };
        if self.format_version != FORMAT_VERSION {
            return Err(field_error(
                "format_version".into(),
                format!("unsupported version {}", self.format_version),
            ));
        }
        if self.entries.len() != self.d {
            return Err(field_error(
                "entries".into(),
                format!("expected {} rows, found {}", self.d, self.entries.len()),
            ));
        }
        let mut data = Vec::with_capacity(self.d * self.n);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(field_error(
                    format!("entries[{i}]"),
                    format!("expected {} columns, found {}", self.n, row.len()),
                ));
            }
            data.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
        }
        Frame::new(CMatrix::from_row_slice(self.d, self.n, &data))
            .map_err(|e| field_error("entries".into(), e.to_string()))
    }
}

pub fn parse_frame_json(text: &str, source: &str) -> Result<Frame, CliError> {
    let doc: FrameDocument = serde_json::from_str(text).map_err(|e| CliError::Input {
        origin: source.to_owned(),
        line: Some(e.line()),
        field: None,
        message: e.to_string(),
    })?;
    doc.to_frame(source)
}

pub fn frame_json(f: &Frame, seed: Option<u64>) -> String {
    let mut s = serde_json::to_string_pretty(&FrameDocument::from_frame(f, seed))
        .expect("frame document serializes");
    s.push('\n');
    s
}

/// JSON form of an eigenstep table, mirroring the CSV content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub format_version: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl TableDocument {
    pub fn from_table(t: &EigenstepTable) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            d: t.d(),
            n: t.n(),
            rows: t.rows().to_vec(),
        }
    }
}

fn write_table_body(out: &mut String, t: &EigenstepTable) {
    writeln!(out, "# d={} N={}", t.d(), t.n()).expect("writing to a string");
    for row in t.rows() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(out, "{}", cells.join(",")).expect("writing to a string");
    }
}

pub fn table_csv(t: &EigenstepTable) -> String {
    let mut out = format!("# format_version={FORMAT_VERSION}\n");
    write_table_body(&mut out, t);
    out
}

/// Several tables in one file, each introduced by its own `# d= N=` header.
pub fn tables_csv(tables: &[EigenstepTable], seed: u64) -> String {
    let mut out = format!("# format_version={FORMAT_VERSION}\n# seed={seed}\n");
    for (i, t) in tables.iter().enumerate() {
        writeln!(out, "# sample={}", i + 1).expect("writing to a string");
        write_table_body(&mut out, t);
    }
    out
}

struct PendingTable {
    d: usize,
    n: usize,
    header_line: usize,
    rows: Vec<Vec<f64>>,
}

fn header_value(token: &str, key: &str) -> Option<String> {
    token.strip_prefix(key)?.strip_prefix('=').map(str::to_owned)
}

pub fn parse_tables_csv(text: &str, source: &str) -> Result<Vec<EigenstepTable>, CliError> {
    let at = |line: usize, field: Option<String>, message: String| CliError::Input {
        origin: source.to_owned(),
        line: Some(line),
        field,
        message,
    };
    let mut tables = Vec::new();
    let mut pending: Option<PendingTable> = None;
    let finish = |p: PendingTable| -> Result<EigenstepTable, CliError> {
        if p.rows.len() != p.n {
            return Err(at(
                p.header_line,
                None,
                format!("header declares N={} but {} rows follow", p.n, p.rows.len()),
            ));
        }
        EigenstepTable::new(p.d, p.rows).map_err(|e| at(p.header_line, None, e.to_string()))
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            if let Some(v) = tokens.first().and_then(|t| header_value(t, "format_version")) {
                if v != FORMAT_VERSION.to_string() {
                    return Err(at(line_no, Some("format_version".into()), format!("unsupported version {v}")));
                }
            } else if tokens.first().is_some_and(|t| t.starts_with("d=")) {
                let parse = |key: &str| -> Result<usize, CliError> {
                    tokens
                        .iter()
                        .find_map(|t| header_value(t, key))
                        .ok_or_else(|| at(line_no, Some(key.into()), "missing".into()))?
                        .parse()
                        .map_err(|e| at(line_no, Some(key.into()), format!("{e}")))
                };
                let (d, n) = (parse("d")?, parse("N")?);
                if let Some(p) = pending.take() {
                    tables.push(finish(p)?);
                }
                pending = Some(PendingTable {
                    d,
                    n,
                    header_line: line_no,
                    rows: Vec::new(),
                });
            }
            continue;
        }
        let table = pending
            .as_mut()
            .ok_or_else(|| at(line_no, None, "data before the '# d= N=' header".into()))?;
        let row = line
            .split(',')
            .enumerate()
            .map(|(j, cell)| {
                cell.trim().parse::<f64>().map_err(|e| {
                    at(line_no, Some(format!("column {}", j + 1)), format!("{e}: {:?}", cell.trim()))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        table.rows.push(row);
    }
    if let Some(p) = pending.take() {
        tables.push(finish(p)?);
    }
    Ok(tables)
}

pub fn parse_table_csv(text: &str, source: &str) -> Result<EigenstepTable, CliError> {
    let mut tables = parse_tables_csv(text, source)?;
    match tables.len() {
        1 => Ok(tables.pop().expect("one table")),
        k => Err(CliError::Input {
            origin: source.to_owned(),
            line: None,
            field: None,
            message: format!("expected exactly one table, found {k}"),
        }),
    }
}

/// A decimal or an exact fraction `p/q`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("{e}: {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("{e}: {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator: {s:?}"));
            }
            p / q
        }
        None => s.parse().map_err(|e| format!("{e}: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

/// Comma-separated numbers; errors name the offending entry as `name[i]`.
pub fn parse_list(text: &str, name: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .enumerate()
        .map(|(i, item)| {
            parse_number(item).map_err(|message| CliError::Input {
                origin: "arguments".into(),
                line: None,
                field: Some(format!("{name}[{}]", i + 1)),
                message,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use frametoric::eigensteps::compute_eigensteps;
    use frametoric::frame::complex_gaussian;
    use frametoric::rng::rng_from_seed;

    #[test]
    fn frame_json_round_trip() {
        let f = Frame::new(complex_gaussian(&mut rng_from_seed(1), 3, 5)).unwrap();
        let text = frame_json(&f, Some(9));
        let back = parse_frame_json(&text, "mem").unwrap();
        assert_eq!(back.matrix(), f.matrix());
        assert!(text.contains("\"format_version\": 1"));
    }

    #[test]
    fn frame_json_reports_fields() {
        let bad = r#"{"format_version":1,"d":2,"N":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#;
        match parse_frame_json(bad, "x.json") {
            Err(CliError::Input { field, .. }) => assert_eq!(field.as_deref(), Some("entries[1]")),
            other => panic!("{other:?}"),
        }
        match parse_frame_json("{\n\"d\": 2,\n oops", "x.json") {
            Err(CliError::Input { line, .. }) => assert_eq!(line, Some(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_csv_round_trip() {
        let f = Frame::new(complex_gaussian(&mut rng_from_seed(2), 2, 4)).unwrap();
        let t = compute_eigensteps(&f);
        let text = table_csv(&t);
        assert!(text.starts_with("# format_version=1\n# d=2 N=4\n"));
        assert_eq!(parse_table_csv(&text, "mem").unwrap(), t);
        let many = tables_csv(&[t.clone(), t.clone()], 4);
        assert_eq!(parse_tables_csv(&many, "mem").unwrap(), vec![t.clone(), t]);
    }

    #[test]
    fn table_csv_reports_line_and_column() {
        let text = "# d=2 N=2\n1\n2,abc\n";
        match parse_table_csv(text, "t.csv") {
            Err(CliError::Input { line, field, .. }) => {
                assert_eq!(line, Some(3));
                assert_eq!(field.as_deref(), Some("column 2"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_table_csv("# d=2 N=3\n1\n2,0\n", "t.csv").is_err());
    }

    #[test]
    fn fractions_are_exact() {
        assert_eq!(parse_list("5/2, 2.5,1", "lambda").unwrap(), vec![2.5, 2.5, 1.0]);
        assert_eq!(parse_list("5/3", "lambda").unwrap(), vec![5.0 / 3.0]);
        match parse_list("1,1/0", "r") {
            Err(CliError::Input { field, .. }) => assert_eq!(field.as_deref(), Some("r[2]")),
            other => panic!("{other:?}"),
        }
    }
}
