//! Line-oriented extraction from Gradle scripts. Two things are read:
//! `include` project paths from settings files, and dependency declarations
//! whose coordinates appear as a single `group:artifact:version` string
//! literal. Groovy/Kotlin expressions beyond that shape are out of scope.

use std::sync::LazyLock;

use regex::Regex;

/// A dependency declared with a string-literal coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradleDependency {
    /// The configuration name as written (`implementation`, `testImplementation`, ...).
    pub configuration: String,
    pub group: String,
    pub artifact: String,
    pub version: String,
    /// 1-based line of the declaration.
    pub line: usize,
}

/// Extracts included project paths from a `settings.gradle(.kts)` body,
/// mapping Gradle's `:a:b` notation to the relative directory `a/b`.
/// Order of first appearance is preserved; duplicates collapse.
pub fn parse_settings_includes(text: &str) -> Vec<String> {
    static INCLUDE_LINE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"^\s*include\b").unwrap());
    static STRING_LITERAL: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r#"['"]([^'"]+)['"]"#).unwrap());

    let mut seen = Vec::new();
    for line in text.lines() {
        if !INCLUDE_LINE.is_match(line) {
            continue;
        }
        for captures in STRING_LITERAL.captures_iter(line) {
            let path = captures[1].trim_start_matches(':').replace(':', "/");
            if !path.is_empty() && !seen.contains(&path) {
                seen.push(path);
            }
        }
    }
    seen
}

/// Extracts string-literal dependency declarations from a build script.
/// Declarations with variable interpolation or map syntax are ignored.
pub fn parse_dependencies(text: &str) -> Vec<GradleDependency> {
    static DECLARATION: LazyLock<Regex> = LazyLock::new(|| {
        Regex::new(
            r#"(?x)
            ^\s*
            (implementation|api|compileOnly|compile|runtimeOnly|runtime
            |testImplementation|testCompileOnly|testCompile|testRuntimeOnly|testRuntime
            |annotationProcessor|kapt)
            \s*\(?\s*
            ['"]([^'":\s]+):([^'":\s]+):([^'"\s]+)['"]
            "#,
        )
        .unwrap()
    });

    let mut deps = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let Some(captures) = DECLARATION.captures(line) else {
            continue;
        };
        if captures[0].contains('$') {
            continue; // interpolated coordinate, not a literal
        }
        // A coordinate may carry a classifier after the version; keep the
        // version segment only.
        let version = captures[4].split(':').next().unwrap_or_default().to_string();
        deps.push(GradleDependency {
            configuration: captures[1].to_string(),
            group: captures[2].to_string(),
            artifact: captures[3].to_string(),
            version,
            line: index + 1,
        });
    }
    deps
}
