//! Tolerant `pom.xml` reading: `<modules>` entries, `<licenses>` names, and
//! direct `<dependencies>` coordinates with the line each one is declared on.

use roxmltree::{Document, Node};

use crate::error::{Error, Result};

/// One `<dependency>` entry from a pom's direct dependency list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PomDependency {
    pub group: String,
    pub artifact: String,
    pub version: Option<String>,
    pub scope: Option<String>,
    /// 1-based line of the `<dependency>` element in the source file.
    pub line: usize,
}

/// The parts of a pom this tool cares about.
#[derive(Clone, Debug, Default)]
pub struct PomFile {
    pub modules: Vec<String>,
    /// Declared `<license><name>` strings, in document order.
    pub license_names: Vec<String>,
    pub dependencies: Vec<PomDependency>,
    /// Non-fatal oddities found while reading (skipped entries and the like).
    pub notes: Vec<String>,
}

/// Parses a pom document. Fails only on malformed XML; structural surprises
/// inside a well-formed document are reported as notes instead.
pub fn parse_pom(text: &str) -> Result<PomFile> {
    let doc = Document::parse(text).map_err(|e| Error::DataFormat {
        what: "pom.xml".into(),
        detail: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "project" {
        return Err(Error::DataFormat {
            what: "pom.xml".into(),
            detail: format!("root element is <{}>, expected <project>", root.tag_name().name()),
        });
    }

    let mut pom = PomFile::default();
    for section in root.children().filter(Node::is_element) {
        match section.tag_name().name() {
            "modules" => {
                for module in elements_named(section, "module") {
                    match element_text(module) {
                        Some(path) => pom.modules.push(path),
                        None => pom.notes.push(format!(
                            "empty <module> entry at line {}",
                            line_of(&doc, module)
                        )),
                    }
                }
            }
            "licenses" => {
                for license in elements_named(section, "license") {
                    if let Some(name) = child_element(license, "name").and_then(element_text) {
                        pom.license_names.push(name);
                    }
                }
            }
            "dependencies" => {
                for dep in elements_named(section, "dependency") {
                    let line = line_of(&doc, dep);
                    let group = child_element(dep, "groupId").and_then(element_text);
                    let artifact = child_element(dep, "artifactId").and_then(element_text);
                    let (Some(group), Some(artifact)) = (group, artifact) else {
                        pom.notes.push(format!(
                            "dependency at line {line} is missing groupId or artifactId; skipped"
                        ));
                        continue;
                    };
                    pom.dependencies.push(PomDependency {
                        group,
                        artifact,
                        version: child_element(dep, "version").and_then(element_text),
                        scope: child_element(dep, "scope").and_then(element_text),
                        line,
                    });
                }
            }
            _ => {}
        }
    }
    Ok(pom)
}

fn elements_named<'a>(parent: Node<'a, 'a>, name: &'static str) -> impl Iterator<Item = Node<'a, 'a>> {
    parent
        .children()
        .filter(move |c| c.is_element() && c.tag_name().name() == name)
}

fn child_element<'a>(parent: Node<'a, 'a>, name: &str) -> Option<Node<'a, 'a>> {
    parent
        .children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
}

fn element_text(node: Node<'_, '_>) -> Option<String> {
    let text = node.text()?.trim();
    (!text.is_empty()).then(|| text.to_string())
}

fn line_of(doc: &Document<'_>, node: Node<'_, '_>) -> usize {
    doc.text_pos_at(node.range().start).row as usize
}
