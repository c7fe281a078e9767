//! CSV reading and writing.
//!
//! Dialect: comma separator, decimal point, no locale dependence; an
//! optional single header row is auto-detected by a non-numeric first line;
//! line feeds with or without carriage return. Numbers are written with
//! Rust's shortest round-trip formatting, so emit → parse is lossless.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// A parsed CSV matrix with its optional header row.
#[derive(Clone, Debug)]
pub struct CsvMatrix {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvMatrix {
    pub fn into_data_matrix(self) -> Result<DataMatrix> {
        DataMatrix::from_rows(self.rows)
    }
}

fn parse_line(line: &str) -> std::result::Result<Vec<f64>, usize> {
    let mut out = Vec::new();
    for (i, field) in line.split(',').enumerate() {
        match field.trim().parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) => return Err(i),
        }
    }
    Ok(out)
}

pub fn read_csv<R: Read>(reader: R) -> Result<CsvMatrix> {
    let buf = BufReader::new(reader);
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in buf.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(values) => {
                if let Some(first) = rows.first() {
                    if values.len() != first.len() {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!(
                                "expected {} fields, found {}",
                                first.len(),
                                values.len()
                            ),
                        });
                    }
                }
                rows.push(values);
            }
            Err(col) => {
                if rows.is_empty() && header.is_none() {
                    header = Some(line.split(',').map(|s| s.trim().to_string()).collect());
                } else {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("field {} is not numeric", col + 1),
                    });
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no data rows in CSV input".into()));
    }
    Ok(CsvMatrix { header, rows })
}

pub fn read_csv_path(path: &Path) -> Result<CsvMatrix> {
    read_csv(fs::File::open(path)?)
}

pub fn format_row(row: &[f64]) -> String {
    let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
    fields.join(",")
}

pub fn write_csv<W: Write>(mut w: W, header: Option<&[&str]>, rows: &[Vec<f64>]) -> Result<()> {
    if let Some(h) = header {
        writeln!(w, "{}", h.join(","))?;
    }
    for row in rows {
        writeln!(w, "{}", format_row(row))?;
    }
    Ok(())
}

/// Writes through a temporary file in the destination directory and renames,
/// so a failed run leaves no partial output behind.
pub fn write_file_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into())
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_autodetect_and_crlf() {
        let text = "u1,u2\r\n0.25,0.5\r\n0.75,0.125\n";
        let m = read_csv(text.as_bytes()).unwrap();
        assert_eq!(m.header.as_deref(), Some(&["u1".to_string(), "u2".into()][..]));
        assert_eq!(m.rows, vec![vec![0.25, 0.5], vec![0.75, 0.125]]);
    }

    #[test]
    fn headerless_numeric_first_row() {
        let m = read_csv("1,2\n3,4\n".as_bytes()).unwrap();
        assert!(m.header.is_none());
        assert_eq!(m.rows.len(), 2);
    }

    #[test]
    fn round_trip_is_lossless() {
        let rows = vec![
            vec![0.1, 1.0 / 3.0, f64::MIN_POSITIVE],
            vec![123456.789012345678, 1e-300, 0.9999999999999999],
        ];
        let mut out = Vec::new();
        write_csv(&mut out, None, &rows).unwrap();
        let back = read_csv(&out[..]).unwrap();
        assert_eq!(back.rows, rows);
    }

    #[test]
    fn ragged_and_bad_fields_error() {
        assert!(read_csv("1,2\n3\n".as_bytes()).is_err());
        assert!(read_csv("1,2\n3,x\n".as_bytes()).is_err());
        assert!(read_csv("".as_bytes()).is_err());
    }

    #[test]
    fn atomic_write_then_rename() {
        let dir = std::env::temp_dir().join(format!("arcop-io-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_file_atomic(&path, "a,b\n1,2\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
