//! Helpers shared by the CLI integration tests: tiny project generators,
//! provider fixtures, and a wrapper for running the compiled binaries.
//!
//! Each test target uses its own slice of these.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Outcome of one binary invocation.
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn run_binary(exe: &str, args: &[&str]) -> Run {
    let output: Output = Command::new(exe).args(args).output().expect("binary runs");
    Run {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

/// Run the main binary with the given arguments.
pub fn licheck(args: &[&str]) -> Run {
    run_binary(env!("CARGO_BIN_EXE_licheck"), args)
}

/// Run the trainer binary.
pub fn licheck_train(args: &[&str]) -> Run {
    run_binary(env!("CARGO_BIN_EXE_licheck-train"), args)
}

pub fn write_file(path: &Path, contents: &str) {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).unwrap();
    }
    std::fs::write(path, contents).unwrap();
}

/// One dependency declaration destined for a generated pom.
#[derive(Clone, Copy)]
pub struct Dep<'a> {
    pub group: &'a str,
    pub artifact: &'a str,
    pub version: &'a str,
}

impl<'a> Dep<'a> {
    pub fn new(group: &'a str, artifact: &'a str, version: &'a str) -> Self {
        Dep {
            group,
            artifact,
            version,
        }
    }
}

fn pom_xml(artifact: &str, modules: &[&str], deps: &[Dep<'_>]) -> String {
    let mut out = String::from("<project>\n");
    out.push_str("  <groupId>com.fixture</groupId>\n");
    out.push_str(&format!("  <artifactId>{artifact}</artifactId>\n"));
    out.push_str("  <version>1.0</version>\n");
    if !modules.is_empty() {
        out.push_str("  <modules>\n");
        for m in modules {
            out.push_str(&format!("    <module>{m}</module>\n"));
        }
        out.push_str("  </modules>\n");
    }
    if !deps.is_empty() {
        out.push_str("  <dependencies>\n");
        for d in deps {
            out.push_str(&format!(
                "    <dependency><groupId>{}</groupId><artifactId>{}</artifactId><version>{}</version></dependency>\n",
                d.group, d.artifact, d.version
            ));
        }
        out.push_str("  </dependencies>\n");
    }
    out.push_str("</project>\n");
    out
}

/// Lay down a Maven project: a root pom plus one directory per submodule.
/// `submodules` maps a module directory name to its dependencies.
pub fn maven_project(root: &Path, root_deps: &[Dep<'_>], submodules: &[(&str, &[Dep<'_>])]) {
    let names: Vec<&str> = submodules.iter().map(|(n, _)| *n).collect();
    write_file(&root.join("pom.xml"), &pom_xml("root", &names, root_deps));
    for (name, deps) in submodules {
        write_file(&root.join(name).join("pom.xml"), &pom_xml(name, &[], deps));
    }
}

/// Write one provider fixture record for `group:artifact:version`.
pub fn provider_fixture(dir: &Path, dep: Dep<'_>, license_name: &str, homepage: Option<&str>) {
    let mut record = serde_json::json!({ "license_name": license_name });
    if let Some(url) = homepage {
        record["homepage"] = serde_json::Value::String(url.to_string());
    }
    write_file(
        &dir.join(format!(
            "{}__{}__{}.json",
            dep.group, dep.artifact, dep.version
        )),
        &record.to_string(),
    );
}

/// Standard arguments pointing a scan at a fixture provider directory.
pub fn fixture_args(project: &Path, fixtures: &Path) -> Vec<String> {
    vec![
        "scan".to_string(),
        project.display().to_string(),
        "--provider".to_string(),
        "fixtures".to_string(),
        "--fixtures-dir".to_string(),
        fixtures.display().to_string(),
    ]
}

/// Borrow a `Vec<String>` as `&[&str]` for `licheck()`.
pub fn as_strs(args: &[String]) -> Vec<&str> {
    args.iter().map(String::as_str).collect()
}

/// A scratch directory that lives under the target dir and is cleaned up.
pub fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
