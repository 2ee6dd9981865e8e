//! Artifact output. Every command leaves a self-describing directory whose
//! contents are a pure function of config bytes and seed: no timestamps, no
//! hostnames, no absolute paths. The manifest lists each file with its
//! digest so runs can be compared byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

pub struct ArtifactWriter {
    dir: PathBuf,
    /// (file name, sha256 hex) in write order.
    written: Vec<(String, String)>,
}

impl ArtifactWriter {
    pub fn create(dir: &Path) -> Result<ArtifactWriter, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(ArtifactWriter { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    /// Writes the manifest last so it can list every other artifact. The
    /// header lines come from the caller; files are listed sorted by name.
    pub fn finish(mut self, header: &str) -> Result<PathBuf, CliError> {
        let mut text = String::from(header);
        let mut files = self.written.clone();
        files.sort();
        for (name, digest) in &files {
            let _ = writeln!(text, "artifact: {digest}  {name}");
        }
        self.write("manifest.txt", &text)?;
        Ok(self.dir)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Manifest header: run identity (config digest, seed, task) plus the crate
/// versions that produced the artifacts.
pub fn manifest_header(config_sha256: &str, seed: Option<u64>, task: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "config_sha256: {config_sha256}");
    match seed {
        Some(s) => {
            let _ = writeln!(out, "seed: {s}");
        }
        None => {
            let _ = writeln!(out, "seed: -");
        }
    }
    let _ = writeln!(out, "task: {task}");
    let _ = writeln!(out, "nmrc_cli_version: {}", env!("CARGO_PKG_VERSION"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_files_sorted_with_digests() {
        let tmp = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::create(tmp.path()).unwrap();
        w.write("b.csv", "2\n").unwrap();
        w.write("a.csv", "1\n").unwrap();
        let dir = w.finish(&manifest_header("cafe", Some(7), "demo")).unwrap();
        let manifest = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
        assert!(manifest.starts_with("config_sha256: cafe\nseed: 7\ntask: demo\n"));
        let a = manifest.find("a.csv").unwrap();
        let b = manifest.find("b.csv").unwrap();
        assert!(a < b);
        assert!(manifest.contains(&sha256_hex(b"1\n")));
    }
}
