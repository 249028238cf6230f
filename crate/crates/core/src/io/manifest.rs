use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::IoError;

/// Write `manifest.txt` into `out_dir`, listing each artifact (sorted by
/// name) with its SHA-256 content hash. Returns the manifest path.
pub fn write_manifest(out_dir: &Path, files: &[PathBuf]) -> Result<PathBuf, IoError> {
    let mut entries: Vec<(String, String)> = files
        .iter()
        .map(|f| {
            let bytes = std::fs::read(f).map_err(|e| IoError::io(f, e))?;
            let digest = Sha256::digest(&bytes);
            let name = f
                .strip_prefix(out_dir)
                .unwrap_or(f)
                .to_string_lossy()
                .into_owned();
            Ok((name, hex(&digest)))
        })
        .collect::<Result<_, IoError>>()?;
    entries.sort();

    let path = out_dir.join("manifest.txt");
    let mut w = BufWriter::new(File::create(&path).map_err(|e| IoError::io(&path, e))?);
    for (name, digest) in &entries {
        writeln!(w, "{digest}  {name}").map_err(|e| IoError::io(&path, e))?;
    }
    w.flush().map_err(|e| IoError::io(&path, e))?;
    Ok(path)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_sorted_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let f1 = dir.path().join("b.csv");
        let f2 = dir.path().join("a.csv");
        std::fs::write(&f1, "hello").unwrap();
        std::fs::write(&f2, "world").unwrap();
        let manifest = write_manifest(dir.path(), &[f1, f2]).unwrap();
        let text = std::fs::read_to_string(manifest).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].ends_with("  a.csv"));
        assert!(lines[1].ends_with("  b.csv"));
        // SHA-256 of "world".
        assert!(lines[0]
            .starts_with("486ea46224d1bb4fb680f34f7c9ad96a8f24ec88be73ea8e5a6c65260e9cb8a7"));
    }
}
