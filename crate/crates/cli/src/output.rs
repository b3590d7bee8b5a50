//! Deterministic text output: every float is written with 17 significant
//! digits in lowercase scientific notation, in CSV and JSON alike.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::CliError;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Pretty JSON with fixed float formatting; non-finite values become `null`.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Compact variant, one document per line.
struct CompactFixedFloats;

impl Formatter for CompactFixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        FixedFloats(PrettyFormatter::new()).write_f64(w, value)
    }
}

pub fn to_json<T: Serialize>(value: &T, pretty: bool) -> String {
    let mut buf = Vec::new();
    if pretty {
        let mut ser =
            serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
        value.serialize(&mut ser).expect("serializable report");
    } else {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, CompactFixedFloats);
        value.serialize(&mut ser).expect("serializable report");
    }
    let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
    s.push('\n');
    s
}

/// A file, or stdout when no path is given.
pub struct Sink {
    path: Option<PathBuf>,
    out: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
                CliError::Io {
                    path: p.display().to_string(),
                    source,
                }
            })?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self {
            path: path.map(Path::to_path_buf),
            out,
        })
    }

    fn label(&self) -> String {
        self.path
            .as_ref()
            .map_or_else(|| "<stdout>".to_owned(), |p| p.display().to_string())
    }

    pub fn write_str(&mut self, s: &str) -> Result<(), CliError> {
        let label = self.label();
        self.out
            .write_all(s.as_bytes())
            .map_err(|source| CliError::Io {
                path: label,
                source,
            })
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        let label = self.label();
        self.out.flush().map_err(|source| CliError::Io {
            path: label,
            source,
        })
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut sink = Sink::open(Some(path))?;
    sink.write_str(contents)?;
    sink.finish()
}

/// Provenance written next to the outputs. The outputs themselves never carry
/// the timestamp, so they stay byte-identical across runs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    /// The pipeline draws no randomness; identical arguments give identical outputs.
    pub deterministic: bool,
    pub tool_version: &'static str,
    pub timestamp_unix: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, outputs: Vec<String>) -> Self {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.to_owned(),
            config,
            deterministic: true,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix,
            outputs,
        }
    }
}
