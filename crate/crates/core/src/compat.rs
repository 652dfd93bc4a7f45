//! Compatibility checking over a resolved module tree, and license
//! suggestion by intersecting the compatibility sets of everything a module
//! (and its license-inheriting descendants) depends on.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::{CompatibilityMatrix, Corpus, LicenseId};
use crate::scanner::{ModuleNode, Warning};

/// The two edge kinds a violation can sit on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// A module uses a library whose license does not permit it.
    LibraryVsModule,
    /// A submodule declares a license its parent's license cannot contain.
    SubmoduleVsParent,
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ViolationKind::LibraryVsModule => "library-vs-module",
            ViolationKind::SubmoduleVsParent => "submodule-vs-parent",
        })
    }
}

/// One confirmed incompatibility.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The library's license, or the submodule's declared license.
    pub subject_license: LicenseId,
    /// The module's effective license, or the parent's.
    pub context_license: LicenseId,
    /// The module the violation is attributed to.
    pub module_path: String,
    /// `group:artifact:version` for library violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependency: Option<String>,
}

/// Checks one module→library edge. `None` means no violation; an
/// `Unknown`-licensed library is never a violation here (the tree walk
/// records a warning for it instead).
pub fn check_library(
    matrix: &CompatibilityMatrix,
    module: LicenseId,
    library: LicenseId,
) -> Option<Violation> {
    if !library.is_supported() || matrix.permits(module, library) {
        return None;
    }
    Some(Violation {
        kind: ViolationKind::LibraryVsModule,
        subject_license: library,
        context_license: module,
        module_path: String::new(),
        dependency: None,
    })
}

/// Checks one parent→submodule edge against the submodule's *declared*
/// license. Submodules without their own declaration inherit and cannot
/// conflict.
pub fn check_submodule(
    matrix: &CompatibilityMatrix,
    parent: LicenseId,
    child_declared: LicenseId,
) -> Option<Violation> {
    if !child_declared.is_supported() || matrix.permits(parent, child_declared) {
        return None;
    }
    Some(Violation {
        kind: ViolationKind::SubmoduleVsParent,
        subject_license: child_declared,
        context_license: parent,
        module_path: String::new(),
        dependency: None,
    })
}

/// Everything `check_tree` finds.
#[derive(Debug, Default)]
pub struct TreeFindings {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

/// Walks a scanned-and-resolved tree and collects every violation, in
/// depth-first module order with a module's library edges before its child
/// edges. Unknown licenses produce warnings, not violations.
pub fn check_tree(corpus: &Corpus, root: &ModuleNode) -> TreeFindings {
    let mut findings = TreeFindings::default();
    walk(corpus.matrix(), root, &mut findings);
    findings
}

fn walk(matrix: &CompatibilityMatrix, node: &ModuleNode, findings: &mut TreeFindings) {
    for dep in &node.dependencies {
        if dep.resolved == LicenseId::Unknown {
            findings.warnings.push(Warning::new(
                &node.path,
                format!(
                    "dependency {} has an unrecognized license; compatibility not checked",
                    dep.coordinates()
                ),
            ));
        } else if let Some(mut violation) = check_library(matrix, node.effective, dep.resolved) {
            violation.module_path = node.path.clone();
            violation.dependency = Some(dep.coordinates());
            findings.violations.push(violation);
        }
    }
    for child in &node.children {
        if let Some(declared) = &child.declared {
            let id = declared.detection.license;
            if id == LicenseId::Unknown {
                findings.warnings.push(Warning::new(
                    &child.path,
                    "declared license is unrecognized; compatibility with the parent not checked",
                ));
            } else if let Some(mut violation) = check_submodule(matrix, node.effective, id) {
                violation.module_path = child.path.clone();
                findings.violations.push(violation);
            }
        }
        walk(matrix, child, findings);
    }
}

/// A license suggestion for one module.
#[derive(Clone, Debug, Serialize)]
pub struct Suggestion {
    pub module_path: String,
    /// Every license the module could adopt without violating a library
    /// constraint, in id order.
    pub candidates: BTreeSet<LicenseId>,
    /// The most permissive candidate, when any exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommended: Option<LicenseId>,
    /// True when the constraints admit no license at all.
    pub conflicted: bool,
    /// True when at least one dependency resolved to `Unknown` and was left
    /// out of the constraint set.
    pub has_unknown_libraries: bool,
    /// For conflicted results: constraint pairs whose compatibility sets are
    /// disjoint, each pair in id order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conflicting_pairs: Vec<(LicenseId, LicenseId)>,
}

/// Computes the suggestion for a module: starts from all sixteen supported
/// licenses and intersects the compatibility set of every library used by
/// the module or by a descendant that inherits its license. Descendants
/// with their own declaration constrain themselves, not this module.
pub fn suggest(corpus: &Corpus, module: &ModuleNode) -> Suggestion {
    let mut constraints = BTreeSet::new();
    let mut has_unknown = false;
    gather_constraints(module, true, &mut constraints, &mut has_unknown);

    let mut candidates: BTreeSet<LicenseId> = LicenseId::SUPPORTED.into_iter().collect();
    for constraint in &constraints {
        match corpus.matrix().compatible_with(*constraint) {
            Some(allowed) => candidates.retain(|c| allowed.contains(c)),
            None => candidates.clear(),
        }
    }

    let conflicted = candidates.is_empty();
    let recommended =
        (!conflicted).then(|| corpus.most_permissive(&candidates).expect("candidates are supported"));
    let conflicting_pairs = if conflicted { disjoint_pairs(corpus.matrix(), &constraints) } else { Vec::new() };

    Suggestion {
        module_path: module.path.clone(),
        candidates,
        recommended,
        conflicted,
        has_unknown_libraries: has_unknown,
        conflicting_pairs,
    }
}

fn gather_constraints(
    node: &ModuleNode,
    is_scope_root: bool,
    out: &mut BTreeSet<LicenseId>,
    has_unknown: &mut bool,
) {
    if !is_scope_root && node.declared.is_some() {
        return; // this subtree answers to its own declaration
    }
    for dep in &node.dependencies {
        match dep.resolved {
            LicenseId::Unknown => *has_unknown = true,
            id if id.is_supported() => {
                out.insert(id);
            }
            _ => {}
        }
    }
    for child in &node.children {
        gather_constraints(child, false, out, has_unknown);
    }
}

fn disjoint_pairs(
    matrix: &CompatibilityMatrix,
    constraints: &BTreeSet<LicenseId>,
) -> Vec<(LicenseId, LicenseId)> {
    let list: Vec<LicenseId> = constraints.iter().copied().collect();
    let mut pairs = Vec::new();
    for (i, &a) in list.iter().enumerate() {
        for &b in &list[i + 1..] {
            let (Some(row_a), Some(row_b)) = (matrix.compatible_with(a), matrix.compatible_with(b))
            else {
                continue;
            };
            if row_a.intersection(row_b).next().is_none() {
                pairs.push((a, b));
            }
        }
    }
    pairs
}
