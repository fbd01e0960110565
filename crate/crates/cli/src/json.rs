//! JSON and CSV writing with every float at 17 significant digits.

use std::io;
use std::path::Path;

use lp_extremal::format::sig17;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::manifest::RunManifest;
use crate::Failure;

/// Version of every JSON document this binary writes.
pub const SCHEMA: u32 = 1;

struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Single-line JSON with floats written by [`sig17`].
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// An output document: schema version, the manifest of the run, then the payload fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: u32,
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub payload: T,
}

impl<T> Envelope<T> {
    pub fn new(manifest: RunManifest, payload: T) -> Self {
        Envelope { schema: SCHEMA, manifest, payload }
    }
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// CSV with a leading `# ` line holding the manifest as JSON.
pub fn csv_document(manifest: &RunManifest, header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("# {}\n{header}\n", to_json(manifest));
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn coordinate_header(dim: usize) -> String {
    (1..=dim).map(|d| format!("x{d}")).collect::<Vec<_>>().join(",")
}
