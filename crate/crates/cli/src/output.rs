//! All-or-nothing output files.
//!
//! Every artifact is first written to a temp file next to its destination.
//! Nothing is renamed into place until every artifact has been staged, and
//! if any rename fails the artifacts already placed are removed again.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

#[derive(Default)]
pub struct Outputs {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl Outputs {
    pub fn stage(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        let io = |source| CliError::Io { path: path.to_path_buf(), source };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(bytes).map_err(io)?;
        tmp.flush().map_err(io)?;
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(self) -> Result<(), CliError> {
        let mut placed: Vec<PathBuf> = Vec::new();
        for (tmp, dest) in self.staged {
            if let Err(e) = tmp.persist(&dest) {
                for p in &placed {
                    let _ = std::fs::remove_file(p);
                }
                return Err(CliError::Io { path: dest, source: e.error });
            }
            placed.push(dest);
        }
        Ok(())
    }
}
