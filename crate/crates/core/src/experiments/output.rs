use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::ExperimentConfig;
use crate::Result;

/// `phireg <crate version> (<git describe>)`, the describe part omitted
/// when the build had no repository.
pub fn version_string() -> String {
    let describe = env!("PHIREG_GIT_DESCRIBE");
    if describe.is_empty() {
        format!("phireg {}", env!("CARGO_PKG_VERSION"))
    } else {
        format!("phireg {} ({describe})", env!("CARGO_PKG_VERSION"))
    }
}

/// Create `dir/name` and write the comment header echoing `cfg`.
pub(crate) fn create(dir: &Path, name: &str, cfg: &ExperimentConfig) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    write_header(&mut w, cfg, "#")?;
    Ok(w)
}

pub(crate) fn write_header<W: Write>(w: &mut W, cfg: &ExperimentConfig, comment: &str) -> Result<()> {
    writeln!(w, "{comment} {}", version_string())?;
    writeln!(w, "{comment} config: {}", cfg.to_json())?;
    Ok(())
}

/// Comma-joined `Display` forms.
pub(crate) fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
