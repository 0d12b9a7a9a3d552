//! Batch experiment driver.
//!
//! `vvlab <experiment> [--key value ...]` runs one experiment, writes its
//! aggregate CSV, per-trial CSVs, and a JSON summary into the output
//! directory, and exits 0 exactly when every embedded bound-check passed.
//! `vvlab list` prints the experiment catalog. All outputs are a pure
//! function of the resolved configuration: same config, same bytes.

mod experiments;
mod output;
mod params;

pub use experiments::{catalog, find, ExperimentDef, ExperimentInfo, ParamInfo, REGISTRY};
pub use output::{write_artifacts, AggRow, Artifacts, TrialSeries};
pub use params::{CliError, CliResult, ParamKind, ParamSpec, Params};

use std::path::{Path, PathBuf};

/// A fully resolved invocation: which experiment, where to write, and the
/// validated parameter set.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: &'static ExperimentDef,
    pub out_dir: PathBuf,
    pub params: Params,
}

impl ExperimentConfig {
    pub fn resolve(
        experiment: &str,
        out_dir: impl AsRef<Path>,
        config_text: Option<&str>,
        cli_pairs: &[(String, String)],
    ) -> CliResult<Self> {
        let def = find(experiment)
            .ok_or_else(|| CliError(format!("unknown experiment `{experiment}`")))?;
        let params = Params::resolve(def.params, config_text, cli_pairs)?;
        Ok(Self {
            experiment: def,
            out_dir: out_dir.as_ref().to_path_buf(),
            params,
        })
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub pass: bool,
    pub rows: Vec<AggRow>,
    pub files: Vec<PathBuf>,
}

/// Execute a resolved config and write its artifacts.
pub fn run(config: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut artifacts = Artifacts::new();
    (config.experiment.run)(&config.params, &mut artifacts)?;
    let files = write_artifacts(
        &config.out_dir,
        config.experiment.name,
        config.params.resolved(),
        &artifacts,
    )?;
    Ok(RunOutcome {
        pass: artifacts.overall_pass(),
        rows: artifacts.rows,
        files,
    })
}

fn usage() -> String {
    let mut text = String::from(
        "usage: vvlab <experiment> [--config <file>] [--out <dir>] [--<param> <value> ...]\n\
         \x20      vvlab list [--json]\n\nexperiments:\n",
    );
    for def in REGISTRY {
        text.push_str(&format!("  {:<16} {}\n", def.name, def.about));
    }
    text.push_str("\nparameters are key=value lines in --config files; flags override.\n");
    text
}

fn catalog_text() -> String {
    let mut text = String::new();
    for def in REGISTRY {
        text.push_str(&format!("{}  ({})\n", def.name, def.about));
        if def.randomized {
            text.push_str("    randomized: --seed required\n");
        }
        for p in def.params {
            let default = p
                .default
                .map(|d| format!(" [default {d}]"))
                .unwrap_or_default();
            let req = if p.required { " (required)" } else { "" };
            text.push_str(&format!(
                "    --{} <{}>{}{} — {}\n",
                p.name,
                p.kind.name(),
                req,
                default,
                p.help
            ));
        }
    }
    text
}

/// Parse `--key value` / `--key=value` pairs.
fn parse_flags(args: &[String]) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let key = arg
            .strip_prefix("--")
            .ok_or_else(|| CliError(format!("expected --flag, got `{arg}`")))?;
        if let Some((k, v)) = key.split_once('=') {
            pairs.push((k.to_string(), v.to_string()));
            i += 1;
        } else {
            let value = args
                .get(i + 1)
                .ok_or_else(|| CliError(format!("flag --{key} needs a value")))?;
            pairs.push((key.to_string(), value.clone()));
            i += 2;
        }
    }
    Ok(pairs)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_from_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    let Some(command) = args.first() else {
        eprint!("{}", usage());
        return 2;
    };
    match command.as_str() {
        "list" => {
            if args.iter().any(|a| a == "--json") {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&catalog()).expect("catalog serializes")
                );
            } else {
                print!("{}", catalog_text());
            }
            0
        }
        "--help" | "-h" | "help" => {
            print!("{}", usage());
            0
        }
        name => {
            let pairs = match parse_flags(&args[1..]) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let mut out_dir = PathBuf::from("vvlab-out");
            let mut config_path: Option<String> = None;
            let mut experiment_pairs = Vec::new();
            for (k, v) in pairs {
                match k.as_str() {
                    "out" => out_dir = PathBuf::from(v),
                    "config" => config_path = Some(v),
                    _ => experiment_pairs.push((k, v)),
                }
            }
            let config_text = match config_path {
                None => None,
                Some(path) => match std::fs::read_to_string(&path) {
                    Ok(text) => Some(text),
                    Err(e) => {
                        eprintln!("error: cannot read config `{path}`: {e}");
                        return 2;
                    }
                },
            };
            let config = match ExperimentConfig::resolve(
                name,
                &out_dir,
                config_text.as_deref(),
                &experiment_pairs,
            ) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    if find(name).is_none() {
                        eprint!("{}", usage());
                    }
                    return 2;
                }
            };
            match run(&config) {
                Ok(outcome) => {
                    for row in &outcome.rows {
                        println!(
                            "{} l={} {} estimate={} bound={} => {}",
                            row.experiment,
                            if row.l.is_empty() { "-" } else { &row.l },
                            row.parameterization,
                            row.estimate,
                            row.bound,
                            if row.pass { "pass" } else { "FAIL" }
                        );
                    }
                    for file in &outcome.files {
                        println!("wrote {}", file.display());
                    }
                    if outcome.pass {
                        println!("PASS");
                        0
                    } else {
                        println!("FAIL");
                        1
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_contains_the_core_experiments() {
        let names: Vec<String> = catalog().into_iter().map(|e| e.name).collect();
        for required in [
            "vv-np",
            "vv-ma",
            "vv-qcma",
            "isolation",
            "second-moment",
            "projection-gap",
            "basis-tvd",
            "lh-classify",
            "eigen-surgery",
        ] {
            assert!(names.iter().any(|n| n == required), "missing {required}");
        }
    }

    #[test]
    fn every_catalog_entry_round_trips_through_resolution() {
        for def in REGISTRY {
            // Fill required params with plausible values.
            let mut pairs: Vec<(String, String)> = Vec::new();
            for p in def.params {
                if p.required {
                    let value = match p.name {
                        "seed" => "7".to_string(),
                        "chain" => "heisenberg:2".to_string(),
                        "a" => "-2".to_string(),
                        "b" => "0".to_string(),
                        other => panic!("no example value for required param {other}"),
                    };
                    pairs.push((p.name.to_string(), value));
                }
            }
            let config = ExperimentConfig::resolve(def.name, "unused", None, &pairs);
            assert!(config.is_ok(), "{}: {:?}", def.name, config.err());
        }
    }

    #[test]
    fn randomized_experiments_require_a_seed() {
        for def in REGISTRY.iter().filter(|d| d.randomized) {
            assert!(
                def.params
                    .iter()
                    .any(|p| p.name == "seed" && p.required),
                "{} must require a seed",
                def.name
            );
        }
    }

    #[test]
    fn unknown_experiment_is_rejected() {
        let err = ExperimentConfig::resolve("frobnicate", "out", None, &[]).unwrap_err();
        assert!(err.0.contains("frobnicate"));
    }

    #[test]
    fn flag_parsing_accepts_both_forms() {
        let pairs = parse_flags(&[
            "--l".to_string(),
            "10".to_string(),
            "--seed=7".to_string(),
        ])
        .unwrap();
        assert_eq!(
            pairs,
            vec![
                ("l".to_string(), "10".to_string()),
                ("seed".to_string(), "7".to_string())
            ]
        );
        assert!(parse_flags(&["oops".to_string()]).is_err());
    }

    #[test]
    fn cap_violations_name_the_field() {
        let err = ExperimentConfig::resolve(
            "vv-np",
            "out",
            None,
            &[
                ("l".to_string(), "25".to_string()),
                ("seed".to_string(), "1".to_string()),
            ],
        )
        .and_then(|c| run(&c))
        .unwrap_err();
        assert!(err.0.contains("`l`"), "{err}");
    }
}
