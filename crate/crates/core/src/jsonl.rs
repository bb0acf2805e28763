//! JSON and JSON Lines file helpers shared by the stages.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("{0} already exists (pass --force to overwrite)")]
    OutputExists(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> JsonlError + '_ {
    move |source| JsonlError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One compact JSON document per line, each terminated by `\n`.
pub fn to_bytes<T: Serialize>(items: &[T]) -> Result<Vec<u8>, JsonlError> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(|e| JsonlError::Serialize(e.to_string()))?;
        out.push(b'\n');
    }
    Ok(out)
}

/// Writes through a sibling temporary file and a rename, so readers never see a partial file.
pub fn write_bytes(path: &Path, bytes: &[u8], force: bool) -> Result<(), JsonlError> {
    if !force && path.exists() {
        return Err(JsonlError::OutputExists(path.to_path_buf()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T], force: bool) -> Result<(), JsonlError> {
    write_bytes(path, &to_bytes(items)?, force)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T, force: bool) -> Result<(), JsonlError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| JsonlError::Serialize(e.to_string()))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes, force)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| JsonlError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, JsonlError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|e| JsonlError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}
