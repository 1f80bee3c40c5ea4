// SPDX-License-Identifier: MIT OR Apache-2.0

//! Crash-safe file output.
//!
//! Results are first written under a temporary name in the destination
//! directory and then renamed into place, so an interrupted run leaves
//! either the previous file or nothing — never a partial results file.

use std::io;
use std::path::{Path, PathBuf};

/// Write `bytes` to `path` atomically (write to a sibling temp file,
/// then rename over the destination).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp-{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes)?;
    match std::fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            // Best effort: do not leave the temp file lying around.
            let _ = std::fs::remove_file(&tmp);
            Err(e)
        }
    }
}
