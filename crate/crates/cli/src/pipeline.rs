//! Command implementations. Each runs the needed prefix of the
//! scan → resolve → check → suggest pipeline and returns the text to print
//! plus the process exit code; fatal errors bubble up as `Err` and exit 2.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use licheck_core::buildfiles::{gradle, maven};
use licheck_core::compat::{self, check_library};
use licheck_core::corpus::{Corpus, LicenseId};
use licheck_core::detector::Detector;
use licheck_core::resolver::{self, Dependency, ResolveOptions};
use licheck_core::scanner::{self, ModuleNode, Warning};

use crate::config::{FailOn, OutputFormat, RunConfig};
use crate::report::{
    self, render_detection, render_suggestion, Hint, ModuleReport, Report, ToolInfo,
};

/// A command's printable output and exit code.
pub type CmdOutput = (String, i32);

/// The fully analyzed project: the resolved tree plus the assembled report.
pub struct Analysis {
    pub corpus: Corpus,
    pub tree: ModuleNode,
    pub report: Report,
}

/// Runs scan → extract → resolve → check → suggest over the configured
/// project root.
pub fn analyze(config: &RunConfig) -> Result<Analysis> {
    config.validate()?;
    let corpus = config.load_corpus()?;
    let detector = config.build_detector(&corpus)?;
    let provider = config.build_provider()?;
    let artifact_cache = config.artifact_cache_dir();

    let scan = scanner::scan(&config.project_root, &detector)
        .with_context(|| format!("scanning {}", config.project_root.display()))?;
    let mut tree = scan.root;
    let mut warnings = scan.warnings;

    let opts = ResolveOptions::new(provider.as_ref()).with_artifact_cache(artifact_cache.as_deref());
    attach_dependencies(&mut tree, &detector, &opts, &mut warnings);

    let findings = compat::check_tree(&corpus, &tree);
    warnings.extend(findings.warnings);

    let mut modules = Vec::new();
    flatten(&corpus, &tree, &mut modules);

    let report = Report {
        tool: ToolInfo { name: report::TOOL_NAME, version: report::TOOL_VERSION },
        matrix_version: corpus.matrix().version(),
        project_root: config.project_root.display().to_string(),
        modules,
        violations: findings.violations,
        warnings,
    };
    Ok(Analysis { corpus, tree, report })
}

fn attach_dependencies(
    node: &mut ModuleNode,
    detector: &Detector<'_>,
    opts: &ResolveOptions<'_>,
    warnings: &mut Vec<Warning>,
) {
    let (deps, extract_warnings) = resolver::extract_dependencies(&node.path, &node.dir);
    node.dependencies = deps;
    warnings.extend(extract_warnings);
    warnings.extend(resolver::resolve_all(&mut node.dependencies, detector, opts));
    for child in &mut node.children {
        attach_dependencies(child, detector, opts, warnings);
    }
}

fn flatten(corpus: &Corpus, node: &ModuleNode, out: &mut Vec<ModuleReport>) {
    out.push(ModuleReport {
        path: node.path.clone(),
        declared: node.declared.clone(),
        effective: node.effective,
        dependencies: node.dependencies.clone(),
        suggestion: compat::suggest(corpus, node),
    });
    for child in &node.children {
        flatten(corpus, child, out);
    }
}

fn find_module<'t>(tree: &'t ModuleNode, path: &str) -> Option<&'t ModuleNode> {
    if tree.path == path {
        return Some(tree);
    }
    tree.children.iter().find_map(|child| find_module(child, path))
}

fn module_dir(config: &RunConfig, module_path: &str) -> PathBuf {
    if module_path == "." {
        config.project_root.clone()
    } else {
        config.project_root.join(module_path)
    }
}

pub fn run_scan(config: &RunConfig) -> Result<CmdOutput> {
    let analysis = analyze(config)?;
    let code = match config.fail_on {
        FailOn::Violations if analysis.report.has_violations() => 1,
        _ => 0,
    };
    let out = match config.format {
        OutputFormat::Json => analysis.report.to_json(),
        OutputFormat::Text => analysis.report.render_text(),
    };
    Ok((out, code))
}

pub fn run_detect(config: &RunConfig, file: &Path) -> Result<CmdOutput> {
    config.validate()?;
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let corpus = config.load_corpus()?;
    let detector = config.build_detector(&corpus)?;
    let detection = detector.detect(&text);
    let out = match config.format {
        OutputFormat::Json => to_json_line(&detection),
        OutputFormat::Text => render_detection(&detection),
    };
    Ok((out, 0))
}

pub fn run_suggest(config: &RunConfig, module: &str) -> Result<CmdOutput> {
    let analysis = analyze(config)?;
    let node = find_module(&analysis.tree, module)
        .ok_or_else(|| anyhow!("module `{module}` not found in {}", config.project_root.display()))?;
    let suggestion = compat::suggest(&analysis.corpus, node);
    let out = match config.format {
        OutputFormat::Json => to_json_line(&suggestion),
        OutputFormat::Text => render_suggestion(&suggestion),
    };
    Ok((out, 0))
}

pub fn run_create_license(
    config: &RunConfig,
    module: &str,
    license: Option<LicenseId>,
    force: bool,
) -> Result<CmdOutput> {
    let analysis = analyze(config)?;
    let node = find_module(&analysis.tree, module)
        .ok_or_else(|| anyhow!("module `{module}` not found in {}", config.project_root.display()))?;
    let dir = module_dir(config, module);

    let existing = scanner::find_license_file(&dir)?;
    if let (Some(found), false) = (&existing.chosen, force) {
        bail!("module `{module}` already has a license file ({found}); pass --force to replace it");
    }

    let suggestion = compat::suggest(&analysis.corpus, node);
    let chosen = match license {
        Some(id) => id,
        None => match suggestion.recommended {
            Some(id) => id,
            None => {
                let mut out = String::from("refusing to pick a license:\n");
                out.push_str(&render_suggestion(&suggestion));
                out.push_str("pass --license <id> to override\n");
                return Ok((out, 1));
            }
        },
    };

    let record = analysis.corpus.lookup(chosen)?;
    let target = dir.join("LICENSE");
    fs::write(&target, &record.canonical_text)
        .with_context(|| format!("writing {}", target.display()))?;

    let mut out = format!("wrote {} ({chosen})\n", target.display());
    let caused: Vec<String> = constraint_licenses(node)
        .into_iter()
        .filter(|lib| check_library(analysis.corpus.matrix(), chosen, *lib).is_some())
        .map(|lib| format!("warning: {chosen} cannot use the {lib} libraries this module depends on\n"))
        .collect();
    for line in caused {
        out.push_str(&line);
    }
    Ok((out, 0))
}

/// The distinct resolved licenses constraining a module: its own libraries
/// plus those of descendants that inherit its license.
fn constraint_licenses(node: &ModuleNode) -> Vec<LicenseId> {
    fn gather(node: &ModuleNode, scope_root: bool, out: &mut Vec<LicenseId>) {
        if !scope_root && node.declared.is_some() {
            return;
        }
        for dep in &node.dependencies {
            if dep.resolved.is_supported() && !out.contains(&dep.resolved) {
                out.push(dep.resolved);
            }
        }
        for child in &node.children {
            gather(child, false, out);
        }
    }
    let mut out = Vec::new();
    gather(node, true, &mut out);
    out.sort();
    out
}

pub fn run_hints(config: &RunConfig, file: &Path) -> Result<CmdOutput> {
    config.validate()?;
    let name = file
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| anyhow!("{} has no usable file name", file.display()))?;
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;

    let mut warnings: Vec<Warning> = Vec::new();
    let mut deps: Vec<Dependency> = match name {
        "pom.xml" => {
            let pom = maven::parse_pom(&text)?;
            for note in &pom.notes {
                warnings.push(Warning::new(name, note.clone()));
            }
            pom.dependencies
                .into_iter()
                .filter_map(|d| match d.version {
                    Some(version) => Some(Dependency {
                        scope: d.scope,
                        declaration_line: Some(d.line),
                        ..Dependency::new(d.group, d.artifact, version)
                    }),
                    None => {
                        warnings.push(Warning::new(
                            name,
                            format!(
                                "dependency {}:{} at line {} has no literal version; skipped",
                                d.group, d.artifact, d.line
                            ),
                        ));
                        None
                    }
                })
                .collect()
        }
        "build.gradle" | "build.gradle.kts" => gradle::parse_dependencies(&text)
            .into_iter()
            .map(|d| Dependency {
                scope: Some(d.configuration),
                declaration_line: Some(d.line),
                ..Dependency::new(d.group, d.artifact, d.version)
            })
            .collect(),
        other => bail!("{other} is not a recognized build file (expected pom.xml or build.gradle)"),
    };

    let corpus = config.load_corpus()?;
    let detector = config.build_detector(&corpus)?;
    let provider = config.build_provider()?;
    let artifact_cache = config.artifact_cache_dir();
    let opts = ResolveOptions::new(provider.as_ref()).with_artifact_cache(artifact_cache.as_deref());
    warnings.extend(resolver::resolve_all(&mut deps, &detector, &opts));

    let hints: Vec<Hint> = deps.iter().map(Hint::of).collect();
    let out = match config.format {
        OutputFormat::Json => to_json_line(&hints),
        OutputFormat::Text => {
            let mut out = String::new();
            for hint in &hints {
                out.push_str(&hint.render());
                out.push('\n');
            }
            for warning in &warnings {
                out.push_str(&format!("warning: {}: {}\n", warning.path, warning.message));
            }
            out
        }
    };
    Ok((out, 0))
}

pub fn run_diff(config: &RunConfig, file: &Path, license: Option<LicenseId>) -> Result<CmdOutput> {
    config.validate()?;
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let corpus = config.load_corpus()?;
    let detector = config.build_detector(&corpus)?;

    let id = match license {
        Some(id) => id,
        None => {
            let detection = detector.detect(&text);
            if !detection.license.is_supported() {
                bail!(
                    "cannot pick a baseline: the file does not match any supported license; \
                     pass --license <id> to compare against a specific one"
                );
            }
            detection.license
        }
    };

    let runs = detector.diff_against_canonical(&text, id)?;
    let identical = runs
        .iter()
        .all(|run| matches!(run, licheck_core::detector::DiffRun::Equal(_)));

    let out = match config.format {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct DiffReport<'a> {
                license: LicenseId,
                identical: bool,
                runs: &'a [licheck_core::detector::DiffRun],
            }
            to_json_line(&DiffReport { license: id, identical, runs: &runs })
        }
        OutputFormat::Text => {
            if identical {
                format!("no differences from the canonical {id} text\n")
            } else {
                format!("comparing against {id}\n{}", render_diff(&runs))
            }
        }
    };
    Ok((out, if identical { 0 } else { 1 }))
}

/// Inline word-diff rendering: deletions in `[-...-]`, insertions in
/// `{+...+}`, wrapped to keep lines readable.
fn render_diff(runs: &[licheck_core::detector::DiffRun]) -> String {
    use licheck_core::detector::DiffRun;
    let mut pieces = Vec::new();
    for run in runs {
        match run {
            DiffRun::Equal(words) => pieces.extend(words.iter().cloned()),
            DiffRun::Delete(words) => pieces.push(format!("[-{}-]", words.join(" "))),
            DiffRun::Insert(words) => pieces.push(format!("{{+{}+}}", words.join(" "))),
        }
    }
    let mut out = String::new();
    let mut column = 0usize;
    for piece in pieces {
        if column > 0 && column + 1 + piece.len() > 96 {
            out.push('\n');
            column = 0;
        } else if column > 0 {
            out.push(' ');
            column += 1;
        }
        column += piece.len();
        out.push_str(&piece);
    }
    out.push('\n');
    out
}

fn to_json_line<T: serde::Serialize>(value: &T) -> String {
    let mut json = serde_json::to_string_pretty(value).expect("value serializes");
    json.push('\n');
    json
}
