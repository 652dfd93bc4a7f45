//! License evidence from inside a jar archive: license-named entries are run
//! through the detector, and any bundled `META-INF/maven/**/pom.xml` has its
//! declared license names read.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use zip::ZipArchive;

use crate::buildfiles::maven;
use crate::detector::{DetectionMethod, DetectionResult, Detector};
use crate::error::{Error, Result};
use crate::resolver::{normalize_license_name, Evidence, EvidenceSource};
use crate::scanner::Warning;

/// Entries larger than this are skipped rather than read into memory.
pub const MAX_ENTRY_BYTES: u64 = 1024 * 1024;

/// Inspects a jar for license evidence. The archive is the unit of failure:
/// an unreadable file or broken central directory is an error, while an
/// individual entry that cannot be read degrades to a warning.
pub fn inspect_jar(path: &Path, detector: &Detector<'_>) -> Result<(Vec<Evidence>, Vec<Warning>)> {
    let file = File::open(path).map_err(|e| Error::Io { path: path.to_path_buf(), cause: e })?;
    let mut archive = ZipArchive::new(file).map_err(|e| Error::Archive {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;

    let mut license_entries = Vec::new();
    let mut pom_entries = Vec::new();
    for name in archive.file_names() {
        if name.ends_with('/') {
            continue;
        }
        let base = name.rsplit('/').next().unwrap_or(name);
        if crate::scanner::is_license_file_name(base) {
            license_entries.push(name.to_string());
        } else if name.starts_with("META-INF/maven/") && name.ends_with("/pom.xml") {
            pom_entries.push(name.to_string());
        }
    }
    license_entries.sort();
    pom_entries.sort();

    let mut evidence = Vec::new();
    let mut warnings = Vec::new();
    let label = |entry: &str| format!("{}!{entry}", path.display());

    for entry in &license_entries {
        match read_entry(&mut archive, entry) {
            Ok(text) => evidence.push(Evidence {
                source: EvidenceSource::JarFile,
                detection: detector.detect(&text),
            }),
            Err(detail) => warnings.push(Warning::new(label(entry), detail)),
        }
    }

    for entry in &pom_entries {
        let text = match read_entry(&mut archive, entry) {
            Ok(text) => text,
            Err(detail) => {
                warnings.push(Warning::new(label(entry), detail));
                continue;
            }
        };
        match maven::parse_pom(&text) {
            Ok(pom) => {
                for name in pom.license_names {
                    let id = normalize_license_name(detector.corpus(), &name);
                    evidence.push(Evidence {
                        source: EvidenceSource::JarPom,
                        detection: DetectionResult {
                            license: id,
                            method: DetectionMethod::DeclaredName,
                            score: if id.is_supported() { 1.0 } else { 0.0 },
                            runner_up: None,
                        },
                    });
                }
            }
            Err(e) => warnings.push(Warning::new(label(entry), e.to_string())),
        }
    }

    Ok((evidence, warnings))
}

fn read_entry<R: Read + std::io::Seek>(
    archive: &mut ZipArchive<R>,
    name: &str,
) -> std::result::Result<String, String> {
    let entry = archive.by_name(name).map_err(|e| e.to_string())?;
    if entry.size() > MAX_ENTRY_BYTES {
        return Err(format!("entry is {} bytes, over the {MAX_ENTRY_BYTES}-byte limit; skipped", entry.size()));
    }
    let mut bytes = Vec::new();
    entry
        .take(MAX_ENTRY_BYTES + 1)
        .read_to_end(&mut bytes)
        .map_err(|e| e.to_string())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}
