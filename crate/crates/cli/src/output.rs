use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::{Cli, Command, Format};
use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "PENCIL_OUT_DIR";

/// Rows for a CSV file. Every cell is pre-formatted.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct Metadata<'a> {
    generated_by: String,
    core_version: &'static str,
    config: &'a Command,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    metadata: Metadata<'a>,
    data: T,
}

fn metadata(cli: &Cli) -> Metadata<'_> {
    Metadata {
        generated_by: format!("pencil {}", env!("CARGO_PKG_VERSION")),
        core_version: pencil_core::VERSION,
        config: &cli.command,
    }
}

pub fn resolve_path(cli: &Cli) -> PathBuf {
    let out = cli.command.output();
    if let Some(p) = &out.out {
        return p.clone();
    }
    let dir = std::env::var_os(OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{}.{}", cli.command.stem(), out.format.extension()))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name: OsString = path.file_name().unwrap_or_default().to_owned();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp_name: OsString = path.file_name().unwrap_or_default().to_owned();
    tmp_name.push(format!(".tmp-{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(path, e));
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("output types serialise");
    v.push(b'\n');
    v
}

fn csv_bytes(table: &Table) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Write `table` (CSV) or `data` (JSON) to the configured path and return it.
pub fn emit<T: Serialize>(cli: &Cli, table: &Table, data: &T) -> Result<PathBuf, CliError> {
    let path = resolve_path(cli);
    match cli.command.output().format {
        Format::Csv => {
            write_atomic(&path, &csv_bytes(table))?;
            let meta = Document {
                metadata: metadata(cli),
                data: serde_json::Value::Null,
            };
            write_atomic(&sidecar(&path), &json_bytes(&meta))?;
        }
        Format::Json => {
            let doc = Document {
                metadata: metadata(cli),
                data,
            };
            write_atomic(&path, &json_bytes(&doc))?;
        }
    }
    Ok(path)
}

/// CSV sidecars carry a summary alongside the metadata.
pub fn emit_with_summary<T: Serialize, S: Serialize>(
    cli: &Cli,
    table: &Table,
    data: &T,
    summary: &S,
) -> Result<PathBuf, CliError> {
    let path = resolve_path(cli);
    match cli.command.output().format {
        Format::Csv => {
            write_atomic(&path, &csv_bytes(table))?;
            let meta = Document {
                metadata: metadata(cli),
                data: summary,
            };
            write_atomic(&sidecar(&path), &json_bytes(&meta))?;
            Ok(path)
        }
        Format::Json => emit(cli, table, data),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        let x = -0.629_960_524_947_436_6;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar(Path::new("/a/b.csv")), PathBuf::from("/a/b.csv.meta.json"));
    }

    #[test]
    fn csv_quotes_when_needed() {
        let t = Table {
            header: vec!["a", "b"],
            rows: vec![vec!["x,y".to_string(), "1".to_string()]],
        };
        assert_eq!(String::from_utf8(csv_bytes(&t)).unwrap(), "a,b\n\"x,y\",1\n");
    }
}
