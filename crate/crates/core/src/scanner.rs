//! Project scanning: discovers the module tree from Maven or Gradle build
//! files, locates and detects each module's license file, and fills in
//! effective licenses by parent inheritance.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::buildfiles::{gradle, maven};
use crate::corpus::LicenseId;
use crate::detector::{DetectionResult, Detector};
use crate::error::{Error, Result};
use crate::resolver::Dependency;

/// A module's own license file and what the detector made of it.
#[derive(Clone, Debug, Serialize)]
pub struct DeclaredLicense {
    /// File name within the module directory (e.g. `LICENSE.txt`).
    pub file: String,
    pub detection: DetectionResult,
}

/// One module in the project tree.
#[derive(Clone, Debug, Serialize)]
pub struct ModuleNode {
    /// Path relative to the project root, `/`-separated; `"."` for the root.
    pub path: String,
    #[serde(skip)]
    pub dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared: Option<DeclaredLicense>,
    /// The license this module is governed by after inheritance.
    pub effective: LicenseId,
    pub children: Vec<ModuleNode>,
    pub dependencies: Vec<Dependency>,
}

/// A non-fatal problem tied to a location (module path, file, or coordinate).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Warning {
    pub path: String,
    pub message: String,
}

impl Warning {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Warning { path: path.into(), message: message.into() }
    }
}

/// Result of scanning a project directory.
#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub root: ModuleNode,
    pub warnings: Vec<Warning>,
}

/// License-file outcome for one directory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LicenseFilePick {
    /// The file the scan will read, if any.
    pub chosen: Option<String>,
    /// Every candidate present, sorted by the same precedence as `chosen`.
    pub candidates: Vec<String>,
}

const LICENSE_STEMS: [&str; 4] = ["license", "licence", "copying", "unlicense"];
const LICENSE_EXTENSIONS: [&str; 3] = ["txt", "md", "rst"];

/// Whether a bare file name is one of the recognized license-file spellings
/// (a known stem, optionally with a `.txt`/`.md`/`.rst` extension), matched
/// case-insensitively.
pub(crate) fn is_license_file_name(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    match lower.rsplit_once('.') {
        None => LICENSE_STEMS.contains(&lower.as_str()),
        Some((stem, ext)) => {
            LICENSE_STEMS.contains(&stem) && LICENSE_EXTENSIONS.contains(&ext)
        }
    }
}

/// Finds the license file for a directory. When several candidates exist the
/// extensionless `LICENSE` wins, then the lexicographically smallest
/// (case-insensitive) name.
pub fn find_license_file(dir: &Path) -> Result<LicenseFilePick> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), cause: e })?;
    let mut candidates = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::Io { path: dir.to_path_buf(), cause: e })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if entry.file_type().map(|t| t.is_file()).unwrap_or(false) && is_license_file_name(&name) {
            candidates.push(name);
        }
    }
    candidates.sort_by_key(|name| {
        let lower = name.to_ascii_lowercase();
        (lower != "license", lower, name.clone())
    });
    Ok(LicenseFilePick { chosen: candidates.first().cloned(), candidates })
}

/// An undetected module tree: paths and directories only.
struct Skeleton {
    path: String,
    dir: PathBuf,
    children: Vec<Skeleton>,
}

impl Skeleton {
    fn flatten_into(&self, out: &mut Vec<String>) {
        out.push(self.path.clone());
        for child in &self.children {
            child.flatten_into(out);
        }
    }
}

/// Lists the project's module paths in depth-first, lexicographic order.
/// The root is always first as `"."`. A directory with no recognized build
/// file is a single-module project.
pub fn discover_modules(root: &Path) -> Result<(Vec<String>, Vec<Warning>)> {
    let (skeleton, warnings) = discover_tree(root)?;
    let mut paths = Vec::new();
    skeleton.flatten_into(&mut paths);
    Ok((paths, warnings))
}

fn discover_tree(root: &Path) -> Result<(Skeleton, Vec<Warning>)> {
    // Surface unreadable roots as a hard error up front.
    fs::read_dir(root).map_err(|e| Error::Io { path: root.to_path_buf(), cause: e })?;

    let mut warnings = Vec::new();
    let skeleton = if root.join("pom.xml").is_file() {
        let mut visited = BTreeSet::new();
        walk_maven(root, ".", &mut visited, &mut warnings)
    } else if let Some(settings) = gradle_settings_file(root) {
        gradle_tree(root, &settings, &mut warnings)
    } else {
        Skeleton { path: ".".into(), dir: root.to_path_buf(), children: Vec::new() }
    };
    Ok((skeleton, warnings))
}

fn gradle_settings_file(root: &Path) -> Option<PathBuf> {
    ["settings.gradle", "settings.gradle.kts"]
        .iter()
        .map(|name| root.join(name))
        .find(|p| p.is_file())
}

fn walk_maven(
    dir: &Path,
    rel: &str,
    visited: &mut BTreeSet<PathBuf>,
    warnings: &mut Vec<Warning>,
) -> Skeleton {
    let mut node = Skeleton { path: rel.to_string(), dir: dir.to_path_buf(), children: Vec::new() };
    let marker = dir.canonicalize().unwrap_or_else(|_| dir.to_path_buf());
    if !visited.insert(marker) {
        warnings.push(Warning::new(rel, "module cycle detected; not descending again"));
        return node;
    }

    let pom_path = dir.join("pom.xml");
    let pom = match fs::read_to_string(&pom_path).map_err(|e| e.to_string()).and_then(|text| {
        maven::parse_pom(&text).map_err(|e| e.to_string())
    }) {
        Ok(pom) => pom,
        Err(detail) => {
            warnings.push(Warning::new(rel, format!("unreadable pom.xml: {detail}")));
            return node;
        }
    };
    for note in &pom.notes {
        warnings.push(Warning::new(rel, format!("pom.xml: {note}")));
    }

    let mut entries: Vec<String> = Vec::new();
    for raw in &pom.modules {
        let cleaned = raw.trim().trim_start_matches("./").trim_end_matches('/');
        if cleaned.is_empty() || cleaned.starts_with('/') || cleaned.split('/').any(|s| s == "..") {
            warnings.push(Warning::new(rel, format!("module path {raw:?} is not a plain subdirectory; skipped")));
            continue;
        }
        let normalized = cleaned.replace('\\', "/");
        if !entries.contains(&normalized) {
            entries.push(normalized);
        }
    }
    entries.sort();

    for entry in entries {
        let child_dir = dir.join(&entry);
        let child_rel = if rel == "." { entry.clone() } else { format!("{rel}/{entry}") };
        if !child_dir.is_dir() {
            warnings.push(Warning::new(&child_rel, "declared module directory does not exist; skipped"));
            continue;
        }
        if !child_dir.join("pom.xml").is_file() {
            warnings.push(Warning::new(&child_rel, "module directory has no pom.xml"));
            node.children.push(Skeleton { path: child_rel, dir: child_dir, children: Vec::new() });
            continue;
        }
        node.children.push(walk_maven(&child_dir, &child_rel, visited, warnings));
    }
    node
}

fn gradle_tree(root: &Path, settings_path: &Path, warnings: &mut Vec<Warning>) -> Skeleton {
    let mut paths = match fs::read_to_string(settings_path) {
        Ok(text) => gradle::parse_settings_includes(&text),
        Err(e) => {
            warnings.push(Warning::new(".", format!("unreadable settings file: {e}")));
            Vec::new()
        }
    };
    paths.retain(|p| {
        if root.join(p).is_dir() {
            true
        } else {
            warnings.push(Warning::new(p.as_str(), "included project directory does not exist; skipped"));
            false
        }
    });
    paths.sort();
    paths.dedup();

    // Nest each path under its longest included prefix so `a/b` becomes a
    // child of `a` when both are listed, and of the root otherwise.
    let mut tree = Skeleton { path: ".".into(), dir: root.to_path_buf(), children: Vec::new() };
    for path in paths {
        let dir = root.join(&path);
        let node = Skeleton { path: path.clone(), dir, children: Vec::new() };
        attach_under_longest_prefix(&mut tree, node);
    }
    tree
}

fn attach_under_longest_prefix(parent: &mut Skeleton, node: Skeleton) {
    // Lexicographic insertion order guarantees a parent path is attached
    // before any of its descendants.
    for child in &mut parent.children {
        if node.path.starts_with(&format!("{}/", child.path)) {
            attach_under_longest_prefix(child, node);
            return;
        }
    }
    parent.children.push(node);
}

/// Scans a project: discovers modules, detects each module's license file,
/// and computes effective licenses. Dependency lists start empty; resolution
/// is a separate pass.
pub fn scan(root: &Path, detector: &Detector<'_>) -> Result<ScanReport> {
    let (skeleton, mut warnings) = discover_tree(root)?;
    let mut tree = detect_node(skeleton, detector, &mut warnings);
    apply_inheritance(&mut tree, LicenseId::None);
    Ok(ScanReport { root: tree, warnings })
}

fn detect_node(skeleton: Skeleton, detector: &Detector<'_>, warnings: &mut Vec<Warning>) -> ModuleNode {
    let declared = match find_license_file(&skeleton.dir) {
        Ok(pick) => {
            if pick.candidates.len() > 1 {
                warnings.push(Warning::new(
                    &skeleton.path,
                    format!(
                        "multiple license files ({}); using {}",
                        pick.candidates.join(", "),
                        pick.chosen.as_deref().unwrap_or("none")
                    ),
                ));
            }
            pick.chosen.and_then(|file| match fs::read_to_string(skeleton.dir.join(&file)) {
                Ok(text) => {
                    let detection = detector.detect(&text);
                    if detection.license == LicenseId::Unknown {
                        warnings.push(Warning::new(
                            &skeleton.path,
                            format!("{file} does not match any license in the corpus"),
                        ));
                    }
                    Some(DeclaredLicense { file, detection })
                }
                Err(e) => {
                    warnings.push(Warning::new(&skeleton.path, format!("unreadable {file}: {e}")));
                    None
                }
            })
        }
        Err(e) => {
            warnings.push(Warning::new(&skeleton.path, format!("cannot list directory: {e}")));
            None
        }
    };

    let children = skeleton
        .children
        .into_iter()
        .map(|child| detect_node(child, detector, warnings))
        .collect();

    ModuleNode {
        path: skeleton.path,
        dir: skeleton.dir,
        declared,
        effective: LicenseId::None,
        children,
        dependencies: Vec::new(),
    }
}

/// Fills in `effective` for a tree: a module with a declared license uses it
/// (even when detection said `Unknown`); otherwise it inherits `parent`. Pass
/// `LicenseId::None` as the root's parent.
pub fn apply_inheritance(node: &mut ModuleNode, parent: LicenseId) {
    node.effective = match &node.declared {
        Some(declared) => declared.detection.license,
        None => parent,
    };
    for child in &mut node.children {
        apply_inheritance(child, node.effective);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DetectionMethod;
    use std::fs;

    fn write(path: &Path, content: &str) {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).unwrap();
        }
        fs::write(path, content).unwrap();
    }

    fn mit_text() -> &'static str {
        &crate::corpus::Corpus::embedded().lookup(LicenseId::Mit).unwrap().canonical_text
    }

    #[test]
    fn recognizes_license_file_spellings() {
        for name in ["LICENSE", "license.txt", "Licence.md", "COPYING", "UNLICENSE.rst"] {
            assert!(is_license_file_name(name), "{name} should match");
        }
        for name in ["LICENSES", "license.html", "license.old.txt", "NOTICE", "copying.bak"] {
            assert!(!is_license_file_name(name), "{name} should not match");
        }
    }

    #[test]
    fn extensionless_license_outranks_other_candidates() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("LICENSE.txt"), "a");
        write(&dir.path().join("COPYING"), "b");
        write(&dir.path().join("LICENSE"), "c");
        let pick = find_license_file(dir.path()).unwrap();
        assert_eq!(pick.chosen.as_deref(), Some("LICENSE"));
        assert_eq!(pick.candidates, ["LICENSE", "COPYING", "LICENSE.txt"]);
    }

    #[test]
    fn directory_without_candidates_picks_nothing() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("README.md"), "hello");
        let pick = find_license_file(dir.path()).unwrap();
        assert_eq!(pick, LicenseFilePick::default());
    }

    #[test]
    fn plain_directory_is_a_single_module() {
        let dir = tempfile::tempdir().unwrap();
        let (paths, warnings) = discover_modules(dir.path()).unwrap();
        assert_eq!(paths, ["."]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn maven_modules_are_listed_depth_first_in_order() {
        let dir = tempfile::tempdir().unwrap();
        write(
            &dir.path().join("pom.xml"),
            "<project><modules><module>zeta</module><module>alpha</module></modules></project>",
        );
        write(
            &dir.path().join("alpha/pom.xml"),
            "<project><modules><module>inner</module></modules></project>",
        );
        write(&dir.path().join("alpha/inner/pom.xml"), "<project/>");
        write(&dir.path().join("zeta/pom.xml"), "<project/>");
        let (paths, warnings) = discover_modules(dir.path()).unwrap();
        assert_eq!(paths, [".", "alpha", "alpha/inner", "zeta"]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn missing_maven_module_directory_warns_and_continues() {
        let dir = tempfile::tempdir().unwrap();
        write(
            &dir.path().join("pom.xml"),
            "<project><modules><module>ghost</module><module>real</module></modules></project>",
        );
        write(&dir.path().join("real/pom.xml"), "<project/>");
        let (paths, warnings) = discover_modules(dir.path()).unwrap();
        assert_eq!(paths, [".", "real"]);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].path, "ghost");
    }

    #[test]
    fn gradle_includes_nest_under_their_prefix() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("settings.gradle"), "include ':web:api', ':web', ':core'\n");
        fs::create_dir_all(dir.path().join("web/api")).unwrap();
        fs::create_dir_all(dir.path().join("core")).unwrap();
        let (skeleton, warnings) = discover_tree(dir.path()).unwrap();
        assert!(warnings.is_empty());
        let top: Vec<&str> = skeleton.children.iter().map(|c| c.path.as_str()).collect();
        assert_eq!(top, ["core", "web"]);
        assert_eq!(skeleton.children[1].children[0].path, "web/api");
    }

    #[test]
    fn scan_detects_and_inherits_licenses() {
        let dir = tempfile::tempdir().unwrap();
        write(
            &dir.path().join("pom.xml"),
            "<project><modules><module>lib</module></modules></project>",
        );
        write(&dir.path().join("LICENSE"), mit_text());
        write(&dir.path().join("lib/pom.xml"), "<project/>");
        let detector = Detector::embedded();
        let report = scan(dir.path(), &detector).unwrap();
        let root = &report.root;
        assert_eq!(root.effective, LicenseId::Mit);
        let declared = root.declared.as_ref().unwrap();
        assert_eq!(declared.file, "LICENSE");
        assert!(matches!(
            declared.detection.method,
            DetectionMethod::Classifier | DetectionMethod::Dice
        ));
        assert_eq!(root.children[0].effective, LicenseId::Mit);
        assert!(root.children[0].declared.is_none());
    }

    #[test]
    fn unlicensed_tree_is_effectively_none() {
        let dir = tempfile::tempdir().unwrap();
        let detector = Detector::embedded();
        let report = scan(dir.path(), &detector).unwrap();
        assert_eq!(report.root.effective, LicenseId::None);
        assert!(report.root.declared.is_none());
    }

    #[test]
    fn unrecognized_license_file_warns_but_stays_declared() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("LICENSE"), "you may do as you please with this code\n");
        let detector = Detector::embedded();
        let report = scan(dir.path(), &detector).unwrap();
        let declared = report.root.declared.as_ref().unwrap();
        assert_eq!(declared.detection.license, LicenseId::Unknown);
        assert_eq!(report.root.effective, LicenseId::Unknown);
        assert!(report.warnings.iter().any(|w| w.message.contains("does not match")));
    }

    #[test]
    fn inheritance_is_reapplied_after_overriding_a_declaration() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("LICENSE"), mit_text());
        let detector = Detector::embedded();
        let mut report = scan(dir.path(), &detector).unwrap();
        report.root.declared = None;
        apply_inheritance(&mut report.root, LicenseId::None);
        assert_eq!(report.root.effective, LicenseId::None);
    }
}
