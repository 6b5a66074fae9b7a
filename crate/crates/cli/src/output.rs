use crate::args::Format;
use crate::CliError;
use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const ARTIFACT_VERSION: &str = concat!("npp-lab/", env!("CARGO_PKG_VERSION"));

/// One experiment's output, renderable as CSV or JSON.
pub struct Artifact {
    pub format: Format,
    pub config: Value,
    /// Summary values written as `# key: value` header lines in CSV.
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// The JSON body under the `result` key.
    pub result: Value,
}

impl Artifact {
    pub fn render(&self) -> String {
        match self.format {
            Format::Json => {
                let mut doc = json!({
                    "artifact": ARTIFACT_VERSION,
                    "config": self.config,
                    "result": self.result,
                });
                if !self.meta.is_empty() {
                    doc["summary"] = Value::Object(self.meta.iter().cloned().collect());
                }
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# artifact: {ARTIFACT_VERSION}\n# config: {}\n", self.config);
                for (k, v) in &self.meta {
                    s.push_str(&format!("# {k}: {v}\n"));
                }
                let header = self.columns.join(",");
                s.push_str(&format!("# columns: {header}\n{header}\n"));
                for row in &self.rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn emit(artifact: &Artifact, out: Option<&Path>) -> Result<(), CliError> {
    let text = artifact.render();
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
        Some(path) => write_atomic(path, text.as_bytes()),
    }
}

/// Write to a sibling temp file, then rename over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("--out {} names no file", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(CliError::Io)
}

/// Shortest round-trip decimal; non-finite values as `inf`, `-inf`, `nan`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number; infinities as the strings "inf" and "-inf", NaN as null.
pub fn jnum(v: f64) -> Value {
    match serde_json::Number::from_f64(v) {
        Some(x) => Value::Number(x),
        None if v.is_nan() => Value::Null,
        None => Value::String(num(v)),
    }
}
