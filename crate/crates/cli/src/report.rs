//! The scan report: a schema-stable structure serialized as JSON for
//! pipelines, or rendered as sectioned text for people. The same inputs must
//! always produce byte-identical JSON, so nothing here reads clocks or
//! environment.

use licheck_core::compat::{Suggestion, Violation, ViolationKind};
use licheck_core::corpus::LicenseId;
use licheck_core::resolver::Dependency;
use licheck_core::scanner::{DeclaredLicense, Warning};
use serde::Serialize;

pub const TOOL_NAME: &str = "licheck";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

/// One module's slice of the report, in depth-first tree order.
#[derive(Serialize)]
pub struct ModuleReport {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared: Option<DeclaredLicense>,
    pub effective: LicenseId,
    pub dependencies: Vec<Dependency>,
    pub suggestion: Suggestion,
}

/// Everything a scan produces.
#[derive(Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub matrix_version: u32,
    pub project_root: String,
    pub modules: Vec<ModuleReport>,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("report serializes");
        json.push('\n');
        json
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: &str| {
            out.push_str(line);
            out.push('\n');
        };

        push(&mut out, &format!("{TOOL_NAME} {TOOL_VERSION} — {}", self.project_root));
        push(&mut out, &format!("matrix version {}", self.matrix_version));
        push(&mut out, "");

        let width = self.modules.iter().map(|m| m.path.len()).max().unwrap_or(1).max(1);

        push(&mut out, "modules");
        for module in &self.modules {
            let origin = match &module.declared {
                Some(declared) => format!(
                    "{} ({} {:.3})",
                    declared.file,
                    declared.detection.method,
                    declared.detection.score
                ),
                None => "inherited".to_string(),
            };
            push(
                &mut out,
                &format!("  {:width$}  {:32}  {origin}", module.path, module.effective.to_string()),
            );
        }

        if self.modules.iter().any(|m| !m.dependencies.is_empty()) {
            push(&mut out, "");
            push(&mut out, "dependencies");
            for module in &self.modules {
                for dep in &module.dependencies {
                    let line = dep
                        .declaration_line
                        .map(|l| format!("line {l:>4}"))
                        .unwrap_or_else(|| "        ".to_string());
                    push(
                        &mut out,
                        &format!(
                            "  {:width$}  {line}  {}  {}",
                            module.path,
                            dep.coordinates(),
                            dep.resolved
                        ),
                    );
                }
            }
        }

        push(&mut out, "");
        push(&mut out, "violations");
        if self.violations.is_empty() {
            push(&mut out, "  none");
        }
        for violation in &self.violations {
            push(&mut out, &format!("  {}", describe_violation(violation)));
        }

        push(&mut out, "");
        push(&mut out, "suggestions");
        for module in &self.modules {
            push(&mut out, &format!("  {:width$}  {}", module.path, describe_suggestion(&module.suggestion)));
        }

        if !self.warnings.is_empty() {
            push(&mut out, "");
            push(&mut out, "warnings");
            for warning in &self.warnings {
                push(&mut out, &format!("  {}: {}", warning.path, warning.message));
            }
        }
        out
    }

    pub fn has_violations(&self) -> bool {
        !self.violations.is_empty()
    }
}

/// One line explaining a violation.
pub fn describe_violation(violation: &Violation) -> String {
    match violation.kind {
        ViolationKind::LibraryVsModule => format!(
            "module `{}` ({}) cannot use {} ({})",
            violation.module_path,
            violation.context_license,
            violation.dependency.as_deref().unwrap_or("a library"),
            violation.subject_license
        ),
        ViolationKind::SubmoduleVsParent => format!(
            "submodule `{}` declares {} under a parent licensed {}",
            violation.module_path, violation.subject_license, violation.context_license
        ),
    }
}

/// One line summarizing a suggestion (the full candidate list is rendered by
/// the suggest command).
pub fn describe_suggestion(suggestion: &Suggestion) -> String {
    if suggestion.conflicted {
        let pairs: Vec<String> = suggestion
            .conflicting_pairs
            .iter()
            .map(|(a, b)| format!("{a} × {b}"))
            .collect();
        let detail = if pairs.is_empty() { String::new() } else { format!(" ({})", pairs.join(", ")) };
        return format!("conflicted: no compatible license{detail}");
    }
    let caveat = if suggestion.has_unknown_libraries { "; some library licenses unknown" } else { "" };
    match suggestion.recommended {
        Some(id) => format!(
            "recommend {id} ({} candidate{}){caveat}",
            suggestion.candidates.len(),
            if suggestion.candidates.len() == 1 { "" } else { "s" }
        ),
        None => format!("no recommendation{caveat}"),
    }
}

/// Multi-line rendering for the suggest command: every candidate marked as
/// compatible, the recommendation called out, conflicts explained.
pub fn render_suggestion(suggestion: &Suggestion) -> String {
    let mut out = format!("suggestion for module `{}`\n", suggestion.module_path);
    if suggestion.conflicted {
        out.push_str("no license is compatible with every library in use\n");
        if !suggestion.conflicting_pairs.is_empty() {
            out.push_str("irreconcilable license pairs:\n");
            for (a, b) in &suggestion.conflicting_pairs {
                out.push_str(&format!("  {a} × {b}\n"));
            }
        }
    } else {
        for candidate in &suggestion.candidates {
            let mark = if Some(*candidate) == suggestion.recommended { "  (recommended)" } else { "" };
            out.push_str(&format!("  + {candidate}{mark}\n"));
        }
        if let Some(id) = suggestion.recommended {
            out.push_str(&format!("recommended: {id}\n"));
        }
    }
    if suggestion.has_unknown_libraries {
        out.push_str("note: some dependencies have unknown licenses and were not counted\n");
    }
    out
}

/// Rendering for the detect command: `MIT (dice, 1.000)` with an optional
/// runner-up line.
pub fn render_detection(detection: &licheck_core::detector::DetectionResult) -> String {
    let mut out = format!("{} ({}, {:.3})\n", detection.license, detection.method, detection.score);
    if let Some((id, score)) = &detection.runner_up {
        out.push_str(&format!("runner-up: {id} ({score:.3})\n"));
    }
    out
}

/// A compact per-dependency line for the hints command.
#[derive(Serialize)]
pub struct Hint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub coordinates: String,
    pub license: LicenseId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homepage: Option<String>,
}

impl Hint {
    pub fn of(dep: &Dependency) -> Hint {
        Hint {
            line: dep.declaration_line,
            coordinates: dep.coordinates(),
            license: dep.resolved,
            homepage: dep.homepage.clone(),
        }
    }

    pub fn render(&self) -> String {
        let line = self.line.map(|l| format!("line {l:>4}: ")).unwrap_or_default();
        format!("{line}{} — {}", self.coordinates, self.license)
    }
}
