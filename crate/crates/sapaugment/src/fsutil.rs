//! Whole-file atomic writes: write to a temp sibling, then rename.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile_path(dir, path);
    let mut attempts = 0;
    let mut file = loop {
        match fs::OpenOptions::new().write(true).create_new(true).open(&tmp) {
            Ok(f) => break f,
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists && attempts < 16 => {
                attempts += 1;
                tmp = tempfile_path(dir, path);
            }
            Err(e) => return Err(e.into()),
        }
    };
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

fn tempfile_path(dir: &Path, target: &Path) -> std::path::PathBuf {
    let stem = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let nonce = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.subsec_nanos())
        .unwrap_or(0);
    dir.join(format!(".{stem}.{}.{nonce}.tmp", std::process::id()))
}
