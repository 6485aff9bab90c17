//! Report plumbing: metadata, config digests, JSON and CSV writers, and
//! parsing of real-valued flags.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use domsplit::io::fmt_float;

pub type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

pub const TOOL: &str = "domsplit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Embedded in every artifact. Deliberately free of timestamps and paths so
/// that identical inputs give byte-identical outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_digest: String,
    pub seed: Option<u64>,
}

impl Meta {
    /// Digest over the command name, its serialized parameters and the
    /// contents of every input file, in order.
    pub fn new<P: Serialize>(command: &str, params: &P, files: &[&Path], seed: Option<u64>) -> CliResult<Self> {
        let mut h = Sha256::new();
        h.update(TOOL.as_bytes());
        h.update([0]);
        h.update(VERSION.as_bytes());
        h.update([0]);
        h.update(command.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(params)?);
        for f in files {
            let bytes = fs::read(f).map_err(|e| format!("{}: {e}", f.display()))?;
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
        Ok(Meta {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            config_digest: hex::encode(h.finalize()),
            seed,
        })
    }

    fn comment_line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# tool={} version={} command={} config_digest={} seed={}\n",
            self.tool, self.version, self.command, self.config_digest, seed
        )
    }
}

pub struct OutDir {
    dir: PathBuf,
    meta: Meta,
}

impl OutDir {
    pub fn create(dir: &Path, meta: Meta) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        Ok(OutDir { dir: dir.to_path_buf(), meta })
    }

    /// `{"meta": …, "<key>": body…}` with keys in sorted order.
    pub fn write_json<T: Serialize>(&self, name: &str, body: &T) -> CliResult<PathBuf> {
        let mut value = serde_json::to_value(body)?;
        let Value::Object(ref mut map) = value else {
            return Err("report body must serialize to an object".into());
        };
        map.insert("meta".into(), json!(self.meta));
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(path)
    }

    /// A CSV file whose first line is a `#` comment carrying the metadata.
    pub fn csv(&self, name: &str, header: &[&str]) -> CliResult<CsvSink> {
        let path = self.dir.join(name);
        let mut file = BufWriter::new(File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?);
        file.write_all(self.meta.comment_line().as_bytes())?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header)?;
        Ok(CsvSink { writer, path })
    }
}

pub struct CsvSink {
    writer: csv::Writer<BufWriter<File>>,
    path: PathBuf,
}

/// One CSV cell.
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Pass(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<isize> for Cell {
    fn from(v: isize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Pass(true) => "PASS".into(),
            Cell::Pass(false) => "FAIL".into(),
        }
    }
}

impl CsvSink {
    pub fn row(&mut self, cells: Vec<Cell>) -> CliResult<()> {
        self.writer.write_record(cells.iter().map(Cell::render))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// Parse a real number, also accepting `log2`, `ln 3`, `log(2)` and a
/// leading sign, so exponents can be given exactly.
pub fn parse_real(text: &str) -> CliResult<f64> {
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim_start()),
        None => (1.0, t.strip_prefix('+').unwrap_or(t).trim_start()),
    };
    let log_arg = body.strip_prefix("log").or_else(|| body.strip_prefix("ln"));
    let value = match log_arg {
        Some(arg) => {
            let arg = arg.trim();
            let arg = arg.strip_prefix('(').and_then(|a| a.strip_suffix(')')).unwrap_or(arg);
            let x: f64 = arg.trim().parse().map_err(|_| format!("cannot parse {text:?} as a real number"))?;
            x.ln()
        }
        None => body.parse().map_err(|_| format!("cannot parse {text:?} as a real number"))?,
    };
    if !value.is_finite() {
        return Err(format!("{text:?} is not a finite real number").into());
    }
    Ok(sign * value)
}

pub fn parse_real_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(parse_real).collect()
}
