//! End-to-end behavior of the command-line interface: exit codes, output
//! formats, evidence plumbing, and the report schema.

mod common;

use std::io::Write as _;
use std::path::Path;

use common::{
    as_strs, fixture_args, licheck, maven_project, provider_fixture, scratch, write_file, Dep,
};
use licheck_core::corpus::{Corpus, LicenseId};

fn canonical(id: LicenseId) -> &'static str {
    &Corpus::embedded().lookup(id).unwrap().canonical_text
}

/// Zip up entries into a jar at `path`.
fn build_jar(path: &Path, entries: &[(&str, &str)]) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    let file = std::fs::File::create(path).unwrap();
    let mut writer = zip::ZipWriter::new(file);
    let options = zip::write::SimpleFileOptions::default();
    for (name, contents) in entries {
        writer.start_file(*name, options).unwrap();
        writer.write_all(contents.as_bytes()).unwrap();
    }
    writer.finish().unwrap();
}

// --- scan -------------------------------------------------------------------

#[test]
fn scan_reports_violation_and_exits_one() {
    let root = scratch("cli-violation");
    let providers = root.join("providers");
    let project = root.join("proj");
    let dep = Dep::new("org.net", "daemon", "4.2");
    provider_fixture(&providers, dep, "GNU Affero General Public License v3.0", None);
    maven_project(&project, &[dep], &[]);
    write_file(&project.join("LICENSE"), canonical(LicenseId::Apache2));

    let run = licheck(&as_strs(&fixture_args(&project, &providers)));
    assert_eq!(run.code, 1, "{}\n{}", run.stdout, run.stderr);
    assert!(run.stdout.contains("cannot use org.net:daemon:4.2"), "{}", run.stdout);
    assert!(run.stdout.contains("AGPL-3.0-only"), "{}", run.stdout);

    let mut args = fixture_args(&project, &providers);
    args.push("--fail-on".to_string());
    args.push("never".to_string());
    let tolerant = licheck(&as_strs(&args));
    assert_eq!(tolerant.code, 0, "--fail-on never must not gate the exit code");
    assert!(tolerant.stdout.contains("cannot use"), "report still lists it");
}

#[test]
fn scan_of_missing_directory_is_fatal() {
    let run = licheck(&["scan", "/nonexistent/project"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.starts_with("licheck:"), "{}", run.stderr);
}

#[test]
fn scan_json_validates_against_shipped_schema() {
    let root = scratch("cli-schema");
    let providers = root.join("providers");
    let project = root.join("proj");
    // Exercise as much of the schema as possible: jar evidence, provider
    // evidence, a violation, a conflicted suggestion, and warnings.
    let jarred = Dep::new("org.schema", "jarred", "1.0");
    let agpl = Dep::new("org.schema", "restrictive", "2.0");
    let gpl2 = Dep::new("org.schema", "older", "3.0");
    let gpl3 = Dep::new("org.schema", "newer", "4.0");
    let missing = Dep::new("org.schema", "ghost", "5.0");
    provider_fixture(&providers, jarred, "MIT License", Some("https://example.com"));
    provider_fixture(&providers, agpl, "GNU Affero General Public License v3.0", None);
    provider_fixture(&providers, gpl2, "GNU General Public License v2.0", None);
    provider_fixture(&providers, gpl3, "GNU General Public License v3.0", None);
    maven_project(
        &project,
        &[jarred, agpl],
        &[("sub", &[gpl2, gpl3, missing])],
    );
    write_file(&project.join("LICENSE"), canonical(LicenseId::Apache2));

    let cache = root.join("artifact-cache");
    build_jar(
        &cache.join("org/schema/jarred/1.0/jarred-1.0.jar"),
        &[("LICENSE", canonical(LicenseId::Mit))],
    );

    let mut args = fixture_args(&project, &providers);
    args.extend([
        "--format".to_string(),
        "json".to_string(),
        "--cache-dir".to_string(),
        cache.display().to_string(),
        "--fail-on".to_string(),
        "never".to_string(),
    ]);
    let run = licheck(&as_strs(&args));
    assert_eq!(run.code, 0, "{}", run.stderr);

    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&report)
        .map(|e| format!("{}: {e}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "schema violations:\n{}", errors.join("\n"));

    // The interesting shapes really made it into the instance.
    assert!(!report["violations"].as_array().unwrap().is_empty());
    let jar_evidence = &report["modules"][0]["dependencies"][0]["evidence"];
    assert!(
        jar_evidence
            .as_array()
            .unwrap()
            .iter()
            .any(|e| e["source"] == "jar-file"),
        "jar evidence missing: {jar_evidence}"
    );
    assert!(report["modules"]
        .as_array()
        .unwrap()
        .iter()
        .any(|m| m["suggestion"]["conflicted"] == true));
    assert!(!report["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn jar_license_file_outranks_pom_and_provider() {
    let root = scratch("cli-evidence-priority");
    let providers = root.join("providers");
    let project = root.join("proj");
    let dep = Dep::new("org.layered", "lib", "0.9");
    provider_fixture(&providers, dep, "Eclipse Public License v2.0", None);
    maven_project(&project, &[dep], &[]);
    write_file(&project.join("LICENSE"), canonical(LicenseId::Apache2));

    let cache = root.join("cache");
    build_jar(
        &cache.join("org/layered/lib/0.9/lib-0.9.jar"),
        &[
            ("LICENSE", canonical(LicenseId::Mit)),
            (
                "META-INF/maven/org.layered/lib/pom.xml",
                r#"<project>
                     <groupId>org.layered</groupId>
                     <artifactId>lib</artifactId>
                     <version>0.9</version>
                     <licenses><license><name>Eclipse Public License v2.0</name></license></licenses>
                   </project>"#,
            ),
        ],
    );

    let mut args = fixture_args(&project, &providers);
    args.extend([
        "--format".to_string(),
        "json".to_string(),
        "--cache-dir".to_string(),
        cache.display().to_string(),
    ]);
    let run = licheck(&as_strs(&args));
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    let dep_report = &report["modules"][0]["dependencies"][0];

    // All three evidence sources are present; the license file inside the
    // jar wins over both declared names.
    let sources: Vec<&str> = dep_report["evidence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["source"].as_str().unwrap())
        .collect();
    assert!(sources.contains(&"jar-file"), "{sources:?}");
    assert!(sources.contains(&"jar-pom"), "{sources:?}");
    assert!(sources.contains(&"provider"), "{sources:?}");
    assert_eq!(dep_report["resolved"], "MIT");

    // The disagreement is surfaced as a warning.
    let warnings = report["warnings"].as_array().unwrap();
    assert!(
        warnings
            .iter()
            .any(|w| w["message"].as_str().unwrap().contains("disagree")),
        "{warnings:?}"
    );
}

#[test]
fn gradle_projects_scan_end_to_end() {
    let root = scratch("cli-gradle");
    let providers = root.join("providers");
    let project = root.join("proj");
    let dep = Dep::new("org.gradle-test", "engine", "7.7");
    provider_fixture(&providers, dep, "MIT License", None);

    write_file(&project.join("settings.gradle"), "include ':app'\n");
    write_file(
        &project.join("build.gradle"),
        "plugins { id 'java' }\n",
    );
    write_file(
        &project.join("app").join("build.gradle"),
        "dependencies {\n    implementation 'org.gradle-test:engine:7.7'\n}\n",
    );
    write_file(&project.join("LICENSE"), canonical(LicenseId::Apache2));

    let mut args = fixture_args(&project, &providers);
    args.extend(["--format".to_string(), "json".to_string()]);
    let run = licheck(&as_strs(&args));
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    let modules = report["modules"].as_array().unwrap();
    assert_eq!(modules.len(), 2);
    assert_eq!(modules[1]["path"], "app");
    assert_eq!(modules[1]["effective"], "Apache-2.0", "inherits the root license");
    assert_eq!(modules[1]["dependencies"][0]["resolved"], "MIT");
}

#[test]
fn versionless_managed_dependency_is_flagged_and_skipped() {
    let root = scratch("cli-versionless");
    let project = root.join("proj");
    write_file(
        &project.join("pom.xml"),
        r#"<project>
  <groupId>g</groupId><artifactId>a</artifactId><version>1</version>
  <dependencies>
    <dependency><groupId>org.managed</groupId><artifactId>bom-dep</artifactId></dependency>
  </dependencies>
</project>
"#,
    );
    write_file(&project.join("LICENSE"), canonical(LicenseId::Mit));

    let run = licheck(&["scan", project.to_str().unwrap(), "--format", "json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["modules"][0]["dependencies"].as_array().unwrap().len(), 0);
    assert!(
        report["warnings"]
            .as_array()
            .unwrap()
            .iter()
            .any(|w| w["message"].as_str().unwrap().contains("org.managed:bom-dep")),
        "{}",
        run.stdout
    );
}

// --- detect -----------------------------------------------------------------

#[test]
fn detect_names_the_license_and_method() {
    let dir = scratch("cli-detect");
    let mit = dir.join("LICENSE-mit.txt");
    write_file(&mit, canonical(LicenseId::Mit));
    let run = licheck(&["detect", mit.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.starts_with("MIT (classifier, "), "{}", run.stdout);

    let cddl = dir.join("LICENSE-cddl.txt");
    write_file(&cddl, canonical(LicenseId::Cddl1));
    let run = licheck(&["detect", cddl.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.starts_with("CDDL-1.0 (dice, "), "{}", run.stdout);

    let prose = dir.join("README.txt");
    write_file(&prose, "Just an ordinary readme about a parser library.\n");
    let run = licheck(&["detect", prose.to_str().unwrap()]);
    assert_eq!(run.code, 0, "unrecognized text is an answer, not an error");
    assert!(run.stdout.starts_with("unknown ("), "{}", run.stdout);

    let run = licheck(&["detect", dir.to_str().unwrap()]);
    assert_eq!(run.code, 2, "an unreadable path is an error");
}

// --- suggest ----------------------------------------------------------------

#[test]
fn suggest_recommends_and_rejects_unknown_module() {
    let root = scratch("cli-suggest");
    let providers = root.join("providers");
    let project = root.join("proj");
    let dep = Dep::new("org.sugg", "net", "1.0");
    provider_fixture(&providers, dep, "GNU Affero General Public License v3.0", None);
    maven_project(&project, &[dep], &[]);

    let run = licheck(&[
        "suggest",
        project.to_str().unwrap(),
        "--provider",
        "fixtures",
        "--fixtures-dir",
        providers.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("AGPL-3.0-only"), "{}", run.stdout);
    assert!(run.stdout.contains("(recommended)"), "{}", run.stdout);

    let run = licheck(&["suggest", project.to_str().unwrap(), "--module", "no/such"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("not found"), "{}", run.stderr);
}

// --- create-license ---------------------------------------------------------

#[test]
fn create_license_writes_canonical_text_with_unix_newlines() {
    let root = scratch("cli-create");
    let project = root.join("proj");
    maven_project(&project, &[], &[]);

    let run = licheck(&["create-license", project.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("wrote"), "{}", run.stdout);

    let bytes = std::fs::read(project.join("LICENSE")).unwrap();
    let text = String::from_utf8(bytes).expect("valid UTF-8");
    assert!(!text.contains('\r'), "no carriage returns");
    assert!(text.ends_with('\n'), "trailing newline");
    // No constraints at all: the most permissive license wins.
    assert_eq!(text, canonical(LicenseId::Mit));
}

#[test]
fn create_license_refuses_to_overwrite_without_force() {
    let root = scratch("cli-create-existing");
    let project = root.join("proj");
    maven_project(&project, &[], &[]);
    write_file(&project.join("LICENSE"), canonical(LicenseId::Isc));

    let run = licheck(&["create-license", project.to_str().unwrap()]);
    assert_eq!(run.code, 2, "{}\n{}", run.stdout, run.stderr);
    assert!(run.stderr.contains("--force"), "{}", run.stderr);
    // Untouched.
    assert_eq!(
        std::fs::read_to_string(project.join("LICENSE")).unwrap(),
        canonical(LicenseId::Isc)
    );

    let run = licheck(&["create-license", project.to_str().unwrap(), "--force"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(
        std::fs::read_to_string(project.join("LICENSE")).unwrap(),
        canonical(LicenseId::Mit)
    );
}

#[test]
fn create_license_with_explicit_incompatible_choice_warns() {
    let root = scratch("cli-create-override");
    let providers = root.join("providers");
    let project = root.join("proj");
    let dep = Dep::new("org.copyleft", "svc", "2.0");
    provider_fixture(&providers, dep, "GNU Affero General Public License v3.0", None);
    maven_project(&project, &[dep], &[]);

    let run = licheck(&[
        "create-license",
        project.to_str().unwrap(),
        "--license",
        "MIT",
        "--provider",
        "fixtures",
        "--fixtures-dir",
        providers.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "an explicit choice is honored: {}", run.stderr);
    assert_eq!(
        std::fs::read_to_string(project.join("LICENSE")).unwrap(),
        canonical(LicenseId::Mit)
    );
    assert!(
        run.stdout.contains("AGPL-3.0-only"),
        "must warn about the incompatible library: {}",
        run.stdout
    );
}

#[test]
fn create_license_rejects_unsupported_ids() {
    let root = scratch("cli-create-badid");
    let project = root.join("proj");
    maven_project(&project, &[], &[]);
    let run = licheck(&[
        "create-license",
        project.to_str().unwrap(),
        "--license",
        "WTFPL",
    ]);
    assert_eq!(run.code, 2, "{}", run.stderr);
}

// --- hints ------------------------------------------------------------------

#[test]
fn hints_annotate_build_file_lines() {
    let root = scratch("cli-hints");
    let providers = root.join("providers");
    let pom = root.join("pom.xml");
    let dep = Dep::new("org.hint", "left", "1.0");
    let dep2 = Dep::new("org.hint", "right", "2.0");
    provider_fixture(&providers, dep, "MIT License", None);
    provider_fixture(&providers, dep2, "Eclipse Public License v2.0", None);
    write_file(
        &pom,
        r#"<project>
  <groupId>g</groupId><artifactId>a</artifactId><version>1</version>
  <dependencies>
    <dependency><groupId>org.hint</groupId><artifactId>left</artifactId><version>1.0</version></dependency>
    <dependency><groupId>org.hint</groupId><artifactId>right</artifactId><version>2.0</version></dependency>
  </dependencies>
</project>
"#,
    );

    let run = licheck(&[
        "hints",
        pom.to_str().unwrap(),
        "--provider",
        "fixtures",
        "--fixtures-dir",
        providers.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout.contains("org.hint:left:1.0 — MIT"),
        "{}",
        run.stdout
    );
    assert!(
        run.stdout.contains("org.hint:right:2.0 — EPL-2.0"),
        "{}",
        run.stdout
    );
    // Line numbers point at the declarations.
    assert!(run.stdout.contains("line    4"), "{}", run.stdout);
    assert!(run.stdout.contains("line    5"), "{}", run.stdout);

    let run = licheck(&["hints", root.join("providers").to_str().unwrap()]);
    assert_eq!(run.code, 2, "directories are not build files");

    let other = root.join("notes.txt");
    write_file(&other, "not a build file");
    let run = licheck(&["hints", other.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("not a recognized build file"), "{}", run.stderr);
}

#[test]
fn hints_work_on_gradle_files_too() {
    let root = scratch("cli-hints-gradle");
    let providers = root.join("providers");
    let gradle = root.join("build.gradle");
    let dep = Dep::new("org.hintg", "core", "3.3");
    provider_fixture(&providers, dep, "MIT License", None);
    write_file(
        &gradle,
        "dependencies {\n    api 'org.hintg:core:3.3'\n    testImplementation 'org.hintg:tests:9.9'\n}\n",
    );

    let run = licheck(&[
        "hints",
        gradle.to_str().unwrap(),
        "--provider",
        "fixtures",
        "--fixtures-dir",
        providers.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let hints: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    let list = hints.as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[0]["coordinates"], "org.hintg:core:3.3");
    assert_eq!(list[0]["license"], "MIT");
    assert_eq!(list[0]["line"], 2);
    // No fixture for the second coordinate: honest unknown.
    assert_eq!(list[1]["license"], "unknown");
}

// --- diff -------------------------------------------------------------------

#[test]
fn diff_distinguishes_identical_from_modified() {
    let dir = scratch("cli-diff");
    let exact = dir.join("exact.txt");
    write_file(&exact, canonical(LicenseId::Mit));
    let run = licheck(&["diff", exact.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}\n{}", run.stdout, run.stderr);
    assert!(run.stdout.contains("no differences"), "{}", run.stdout);

    let modified = dir.join("modified.txt");
    write_file(
        &modified,
        &canonical(LicenseId::Mit).replace("substantial", "sizable enough"),
    );
    let run = licheck(&["diff", modified.to_str().unwrap()]);
    assert_eq!(run.code, 1, "{}\n{}", run.stdout, run.stderr);
    assert!(run.stdout.contains("[-"), "deletions marked: {}", run.stdout);
    assert!(run.stdout.contains("{+"), "insertions marked: {}", run.stdout);

    // Text that matches nothing cannot be diffed without naming a baseline.
    let prose = dir.join("prose.txt");
    write_file(&prose, "a short note that resembles no license at all\n");
    let run = licheck(&["diff", prose.to_str().unwrap()]);
    assert_eq!(run.code, 2, "{}", run.stderr);
    assert!(run.stderr.contains("--license"), "{}", run.stderr);

    // Naming one works.
    let run = licheck(&["diff", prose.to_str().unwrap(), "--license", "MIT"]);
    assert_eq!(run.code, 1, "{}", run.stderr);
}

// --- argument handling -------------------------------------------------------

#[test]
fn usage_errors_exit_two() {
    let run = licheck(&["scan", ".", "--no-such-flag"]);
    assert_eq!(run.code, 2);

    let run = licheck(&[]);
    assert_eq!(run.code, 2, "missing subcommand is a usage error");

    let run = licheck(&["scan", ".", "--provider", "live"]);
    assert_eq!(run.code, 2, "live provider requires a URL");
    assert!(run.stderr.contains("--provider-url"), "{}", run.stderr);

    let run = licheck(&["scan", ".", "--provider", "fixtures"]);
    assert_eq!(run.code, 2, "fixture provider requires a directory");
    assert!(run.stderr.contains("--fixtures-dir"), "{}", run.stderr);
}
