//! Dependency license resolution. Dependencies are extracted from a module's
//! build file, then each one gathers evidence from up to three places — a
//! license file inside the cached jar, the pom bundled in the jar's
//! `META-INF/maven` tree, and the metadata provider — and resolves to the
//! highest-priority piece of usable evidence.

pub mod jar;
pub mod provider;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::buildfiles::{gradle, maven};
use crate::corpus::{Corpus, LicenseId};
use crate::detector::{DetectionMethod, DetectionResult, Detector};
use crate::scanner::Warning;

pub use provider::{
    CachedProvider, DisabledProvider, FixtureProvider, HttpProvider, MetadataProvider,
    ProviderRecord,
};

/// Where a piece of license evidence came from, in decreasing priority.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceSource {
    /// A license file found inside the jar archive.
    JarFile,
    /// A declared license name in the jar's bundled pom.
    JarPom,
    /// The metadata provider's record.
    Provider,
}

impl std::fmt::Display for EvidenceSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvidenceSource::JarFile => "jar-file",
            EvidenceSource::JarPom => "jar-pom",
            EvidenceSource::Provider => "provider",
        })
    }
}

/// One observed license signal for a dependency.
#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub source: EvidenceSource,
    pub detection: DetectionResult,
}

/// A dependency declared by some module, with everything learned about it.
#[derive(Clone, Debug, Serialize)]
pub struct Dependency {
    pub group: String,
    pub artifact: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declaration_line: Option<usize>,
    pub evidence: Vec<Evidence>,
    /// The license the dependency resolved to; `Unknown` when no evidence
    /// was usable.
    pub resolved: LicenseId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homepage: Option<String>,
}

impl Dependency {
    pub fn new(group: impl Into<String>, artifact: impl Into<String>, version: impl Into<String>) -> Self {
        Dependency {
            group: group.into(),
            artifact: artifact.into(),
            version: version.into(),
            scope: None,
            declaration_line: None,
            evidence: Vec::new(),
            resolved: LicenseId::Unknown,
            homepage: None,
        }
    }

    /// `group:artifact:version`, the form used in messages and fixture names.
    pub fn coordinates(&self) -> String {
        format!("{}:{}:{}", self.group, self.artifact, self.version)
    }

    /// True for Maven `test` scope and Gradle `test*` configurations.
    pub fn is_test_scoped(&self) -> bool {
        self.scope.as_deref().is_some_and(|s| s == "test" || s.starts_with("test"))
    }
}

/// Reads a module's direct dependencies from its build file. `pom.xml` is
/// preferred when both build systems are present. A module with no build
/// file yields an empty list and a warning.
pub fn extract_dependencies(module_path: &str, module_dir: &Path) -> (Vec<Dependency>, Vec<Warning>) {
    let mut warnings = Vec::new();
    let pom_path = module_dir.join("pom.xml");
    if pom_path.is_file() {
        let deps = extract_from_pom(module_path, &pom_path, &mut warnings);
        return (deps, warnings);
    }
    for name in ["build.gradle", "build.gradle.kts"] {
        let path = module_dir.join(name);
        if !path.is_file() {
            continue;
        }
        let deps = match std::fs::read_to_string(&path) {
            Ok(text) => gradle::parse_dependencies(&text)
                .into_iter()
                .map(|d| Dependency {
                    scope: Some(d.configuration),
                    declaration_line: Some(d.line),
                    ..Dependency::new(d.group, d.artifact, d.version)
                })
                .collect(),
            Err(e) => {
                warnings.push(Warning::new(module_path, format!("unreadable {name}: {e}")));
                Vec::new()
            }
        };
        return (deps, warnings);
    }
    warnings.push(Warning::new(module_path, "no pom.xml or build.gradle found; no dependencies read"));
    (Vec::new(), warnings)
}

fn extract_from_pom(module_path: &str, pom_path: &Path, warnings: &mut Vec<Warning>) -> Vec<Dependency> {
    let text = match std::fs::read_to_string(pom_path) {
        Ok(text) => text,
        Err(e) => {
            warnings.push(Warning::new(module_path, format!("unreadable pom.xml: {e}")));
            return Vec::new();
        }
    };
    let pom = match maven::parse_pom(&text) {
        Ok(pom) => pom,
        Err(e) => {
            warnings.push(Warning::new(module_path, e.to_string()));
            return Vec::new();
        }
    };
    for note in &pom.notes {
        warnings.push(Warning::new(module_path, format!("pom.xml: {note}")));
    }
    let mut deps = Vec::new();
    for dep in pom.dependencies {
        let Some(version) = dep.version else {
            warnings.push(Warning::new(
                module_path,
                format!(
                    "dependency {}:{} at line {} has no literal version (managed elsewhere); skipped",
                    dep.group, dep.artifact, dep.line
                ),
            ));
            continue;
        };
        deps.push(Dependency {
            scope: dep.scope,
            declaration_line: Some(dep.line),
            ..Dependency::new(dep.group, dep.artifact, version)
        });
    }
    deps
}

/// Maps a free-form license name to a supported id: the ordered pattern
/// table first, then strict SPDX spelling. Anything else is `Unknown`.
pub fn normalize_license_name(corpus: &Corpus, name: &str) -> LicenseId {
    let name = name.trim();
    if name.is_empty() {
        return LicenseId::Unknown;
    }
    for (pattern, id) in corpus.name_patterns() {
        if pattern.is_match(name) {
            return *id;
        }
    }
    match LicenseId::parse_spdx(name) {
        LicenseId::None => LicenseId::Unknown,
        id => id,
    }
}

/// Knobs for the resolution pass.
pub struct ResolveOptions<'a> {
    /// Local artifact repository to look jars up in (layout like
    /// `~/.m2/repository`). `None` disables jar inspection.
    pub artifact_cache: Option<&'a Path>,
    pub provider: &'a dyn MetadataProvider,
    /// Upper bound on concurrently resolving dependencies.
    pub max_in_flight: usize,
}

impl<'a> ResolveOptions<'a> {
    pub fn new(provider: &'a dyn MetadataProvider) -> Self {
        ResolveOptions { artifact_cache: None, provider, max_in_flight: 8 }
    }

    pub fn with_artifact_cache(mut self, dir: Option<&'a Path>) -> Self {
        self.artifact_cache = dir;
        self
    }
}

fn jar_path_in_cache(cache: &Path, dep: &Dependency) -> PathBuf {
    cache
        .join(dep.group.replace('.', "/"))
        .join(&dep.artifact)
        .join(&dep.version)
        .join(format!("{}-{}.jar", dep.artifact, dep.version))
}

/// Resolves one dependency in place: gathers evidence, picks the
/// highest-priority usable license, and records the provider's homepage.
/// Every failure along the way degrades to a warning.
pub fn resolve(dep: &mut Dependency, detector: &Detector<'_>, opts: &ResolveOptions<'_>) -> Vec<Warning> {
    let mut warnings = Vec::new();
    let coords = dep.coordinates();

    if let Some(cache) = opts.artifact_cache {
        let jar = jar_path_in_cache(cache, dep);
        if jar.is_file() {
            match jar::inspect_jar(&jar, detector) {
                Ok((evidence, jar_warnings)) => {
                    dep.evidence.extend(evidence);
                    warnings.extend(jar_warnings);
                }
                Err(e) => warnings.push(Warning::new(&coords, format!("jar inspection failed: {e}"))),
            }
        }
    }

    // The provider is always consulted: even when the jar already settled
    // the license it is the only source of the homepage.
    match opts.provider.fetch(&dep.group, &dep.artifact, &dep.version) {
        Ok(Some(record)) => {
            dep.homepage = record.homepage;
            if let Some(name) = record.license_name {
                let id = normalize_license_name(detector.corpus(), &name);
                dep.evidence.push(Evidence {
                    source: EvidenceSource::Provider,
                    detection: DetectionResult {
                        license: id,
                        method: DetectionMethod::Provider,
                        score: if id.is_supported() { 1.0 } else { 0.0 },
                        runner_up: None,
                    },
                });
                if !id.is_supported() {
                    warnings.push(Warning::new(
                        &coords,
                        format!("provider license name {name:?} is not recognized"),
                    ));
                }
            }
        }
        Ok(None) => {}
        Err(e) => warnings.push(Warning::new(&coords, format!("provider lookup failed: {e}"))),
    }

    dep.resolved = dep
        .evidence
        .iter()
        .filter(|ev| ev.detection.license.is_supported())
        .min_by_key(|ev| ev.source)
        .map(|ev| ev.detection.license)
        .unwrap_or(LicenseId::Unknown);

    let distinct: BTreeSet<LicenseId> = dep
        .evidence
        .iter()
        .map(|ev| ev.detection.license)
        .filter(|id| id.is_supported())
        .collect();
    if distinct.len() > 1 {
        let listing: Vec<String> = dep
            .evidence
            .iter()
            .filter(|ev| ev.detection.license.is_supported())
            .map(|ev| format!("{}={}", ev.source, ev.detection.license))
            .collect();
        warnings.push(Warning::new(
            &coords,
            format!("license evidence disagrees ({}); using {}", listing.join(", "), dep.resolved),
        ));
    }

    warnings
}

/// Resolves a batch of dependencies, at most `max_in_flight` at a time.
/// Results and warnings come back in input order regardless of scheduling.
pub fn resolve_all(
    deps: &mut [Dependency],
    detector: &Detector<'_>,
    opts: &ResolveOptions<'_>,
) -> Vec<Warning> {
    let workers = opts.max_in_flight.max(1).min(deps.len());
    if workers <= 1 {
        let mut warnings = Vec::new();
        for dep in deps.iter_mut() {
            warnings.extend(resolve(dep, detector, opts));
        }
        return warnings;
    }

    type Slot = Mutex<Option<(Dependency, Vec<Warning>)>>;
    let n = deps.len();
    let slots: Vec<Mutex<Option<Dependency>>> =
        deps.iter_mut().map(|d| Mutex::new(Some(std::mem::replace(d, Dependency::new("", "", ""))))).collect();
    let results: Vec<Slot> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let mut dep = slots[i].lock().unwrap().take().expect("slot taken once");
                let warnings = resolve(&mut dep, detector, opts);
                *results[i].lock().unwrap() = Some((dep, warnings));
            });
        }
    });

    let mut warnings = Vec::new();
    for (slot, result) in deps.iter_mut().zip(results) {
        let (dep, dep_warnings) = result.into_inner().unwrap().expect("worker filled every slot");
        *slot = dep;
        warnings.extend(dep_warnings);
    }
    warnings
}
