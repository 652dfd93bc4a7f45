//! `licheck` — scan a Java project's modules and dependencies for license
//! problems, and suggest a license that fits.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use licheck::config::{FailOn, OutputFormat, ProviderChoice, RunConfig};
use licheck::pipeline;
use licheck_core::corpus::LicenseId;

#[derive(Parser)]
#[command(name = "licheck", version, about = "License detection and compatibility checking for Java projects")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: OutputFormat,

    /// Package-metadata provider mode.
    #[arg(long, global = true, value_enum, default_value = "off")]
    provider: ProviderMode,

    /// Base URL of the live metadata provider (with --provider live).
    #[arg(long, global = true, value_name = "URL")]
    provider_url: Option<String>,

    /// Directory of provider fixture records (with --provider fixtures).
    #[arg(long, global = true, value_name = "DIR")]
    fixtures_dir: Option<PathBuf>,

    /// Classifier model file overriding the embedded one.
    #[arg(long, global = true, value_name = "FILE")]
    model: Option<PathBuf>,

    /// Directory overriding the embedded corpus data (matrix, patterns, texts).
    #[arg(long, global = true, value_name = "DIR")]
    matrix_dir: Option<PathBuf>,

    /// Local artifact repository to inspect dependency jars from.
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// When findings should make the exit code nonzero.
    #[arg(long, global = true, value_enum, default_value = "violations")]
    fail_on: FailOn,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ProviderMode {
    Live,
    Fixtures,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a project: modules, licenses, dependencies, violations, suggestions.
    Scan {
        /// Project root directory.
        path: PathBuf,
    },
    /// Detect the license of one text file.
    Detect {
        /// File to classify.
        file: PathBuf,
    },
    /// Suggest a license compatible with everything a module uses.
    Suggest {
        /// Project root directory.
        path: PathBuf,
        /// Module path within the project (`.` is the root).
        #[arg(long, default_value = ".")]
        module: String,
    },
    /// Write a LICENSE file for a module.
    CreateLicense {
        /// Project root directory.
        path: PathBuf,
        /// Module path within the project (`.` is the root).
        #[arg(long, default_value = ".")]
        module: String,
        /// License to write instead of the suggestion's recommendation.
        #[arg(long, value_parser = parse_license_id, value_name = "SPDX-ID")]
        license: Option<LicenseId>,
        /// Replace an existing license file.
        #[arg(long)]
        force: bool,
    },
    /// Show per-dependency license hints for one build file.
    Hints {
        /// A pom.xml or build.gradle(.kts) file.
        file: PathBuf,
    },
    /// Compare a license file against the canonical text.
    Diff {
        /// License file to compare.
        file: PathBuf,
        /// Baseline license (defaults to whatever the file detects as).
        #[arg(long, value_parser = parse_license_id, value_name = "SPDX-ID")]
        license: Option<LicenseId>,
    },
}

fn parse_license_id(s: &str) -> Result<LicenseId, String> {
    match LicenseId::try_parse(s) {
        Some(id) if id.is_supported() => Ok(id),
        _ => Err(format!(
            "`{s}` is not a supported license id (expected an SPDX id like MIT or Apache-2.0)"
        )),
    }
}

fn build_config(global: &GlobalArgs, project_root: PathBuf) -> Result<RunConfig, String> {
    let provider = match global.provider {
        ProviderMode::Off => ProviderChoice::Off,
        ProviderMode::Fixtures => match &global.fixtures_dir {
            Some(dir) => ProviderChoice::Fixtures(dir.clone()),
            None => return Err("--provider fixtures requires --fixtures-dir".into()),
        },
        ProviderMode::Live => match &global.provider_url {
            Some(url) => ProviderChoice::Live(url.clone()),
            None => return Err("--provider live requires --provider-url".into()),
        },
    };
    Ok(RunConfig {
        project_root,
        format: global.format,
        provider,
        model_path: global.model.clone(),
        matrix_dir: global.matrix_dir.clone(),
        artifact_cache: global.cache_dir.clone(),
        fail_on: global.fail_on,
    })
}

fn run(cli: Cli) -> anyhow::Result<(String, i32)> {
    let root_for = |path: &PathBuf| path.clone();
    match &cli.command {
        Command::Scan { path } => {
            let config = build_config(&cli.global, root_for(path)).map_err(anyhow::Error::msg)?;
            pipeline::run_scan(&config)
        }
        Command::Detect { file } => {
            let config = build_config(&cli.global, PathBuf::from(".")).map_err(anyhow::Error::msg)?;
            pipeline::run_detect(&config, file)
        }
        Command::Suggest { path, module } => {
            let config = build_config(&cli.global, root_for(path)).map_err(anyhow::Error::msg)?;
            pipeline::run_suggest(&config, module)
        }
        Command::CreateLicense { path, module, license, force } => {
            let config = build_config(&cli.global, root_for(path)).map_err(anyhow::Error::msg)?;
            pipeline::run_create_license(&config, module, *license, *force)
        }
        Command::Hints { file } => {
            let config = build_config(&cli.global, PathBuf::from(".")).map_err(anyhow::Error::msg)?;
            pipeline::run_hints(&config, file)
        }
        Command::Diff { file, license } => {
            let config = build_config(&cli.global, PathBuf::from(".")).map_err(anyhow::Error::msg)?;
            pipeline::run_diff(&config, file, *license)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, code)) => {
            print!("{output}");
            std::process::exit(code);
        }
        Err(error) => {
            eprintln!("licheck: {error:#}");
            std::process::exit(2);
        }
    }
}
