//! Command-line harness: `run` a configured benchmark, `inspect` a
//! dataset, or `validate` a configuration without running it.
//!
//! Exit codes: 0 success, 1 benchmark completed with per-classifier
//! failures, 2 usage error, 3 data/config error, 4 internal error.
//! Machine output goes to stdout, logs and errors to stderr.

use ckdbench::bench::{self, parse_config_file, BenchConfig, BenchError, DataFormat, OutputFormat};
use ckdbench::dataset::{canonical_ckd_schema, summarize};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

const EXIT_OK: i32 = 0;
const EXIT_CLASSIFIER_FAILED: i32 = 1;
const EXIT_DATA: i32 = 3;
const EXIT_INTERNAL: i32 = 4;

#[derive(Parser)]
#[command(
    name = "ckdbench",
    about = "Chronic kidney disease classification benchmark",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Arff,
    Csv,
}

impl From<CliFormat> for DataFormat {
    fn from(f: CliFormat) -> DataFormat {
        match f {
            CliFormat::Arff => DataFormat::Arff,
            CliFormat::Csv => DataFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured benchmark and write report artifacts.
    Run(RunArgs),
    /// Print a dataset summary (rows, class counts, missing values).
    Inspect(InspectArgs),
    /// Check a configuration and its dataset without running anything.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Override the cross-validation seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the output formats (comma-separated: text,csv,json,svg).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct InspectArgs {
    /// Dataset file; optional with --schema.
    dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "arff")]
    format: CliFormat,
    /// Emit the summary as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Print the embedded canonical schema as JSON and exit.
    #[arg(long)]
    schema: bool,
}

fn data_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_DATA
}

fn bench_error_code(e: &BenchError) -> i32 {
    match e {
        BenchError::Io(_) => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

fn parse_format_list(s: &str) -> Result<Vec<OutputFormat>, String> {
    let mut formats = Vec::new();
    for tok in s.split(',') {
        let fmt = match tok.trim() {
            "text" => OutputFormat::Text,
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "svg" => OutputFormat::Svg,
            other => return Err(format!("invalid output format '{other}'")),
        };
        if !formats.contains(&fmt) {
            formats.push(fmt);
        }
    }
    Ok(formats)
}

fn cmd_run(args: RunArgs) -> i32 {
    let mut config: BenchConfig = match parse_config_file(&args.config) {
        Ok(c) => c,
        Err(e) => return data_error(e),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
        for spec in &mut config.classifiers {
            spec.hyperparameters.seed = seed;
        }
    }
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(fmt) = &args.format {
        match parse_format_list(fmt) {
            Ok(f) => config.formats = f,
            Err(e) => return data_error(e),
        }
    }

    let ds = match bench::load_dataset(&config.dataset_path, config.format) {
        Ok(ds) => ds,
        Err(e) => return data_error(e),
    };

    let models_dir = config.output_dir.join("models");
    if config.archive_models {
        if let Err(e) = std::fs::create_dir_all(&models_dir) {
            eprintln!("error: cannot create {}: {e}", models_dir.display());
            return EXIT_INTERNAL;
        }
    }
    let mut archive_failure: Option<String> = None;
    let report = {
        let mut sink = |id: &str, fold: usize, json: String| {
            let path = models_dir.join(format!("{id}_fold{fold}.json"));
            if let Err(e) = std::fs::write(&path, json) {
                archive_failure.get_or_insert(format!("{}: {e}", path.display()));
            }
        };
        match bench::run_benchmark_with(&config, &ds, &mut sink) {
            Ok(r) => r,
            Err(e) => {
                let code = bench_error_code(&e);
                eprintln!("error: {e}");
                return code;
            }
        }
    };
    if let Some(msg) = archive_failure {
        eprintln!("error: failed to archive models: {msg}");
        return EXIT_INTERNAL;
    }

    for entry in &report.entries {
        match &entry.error {
            None => eprintln!(
                "{}: {:.2}s",
                entry.classifier,
                entry.wall_clock.as_secs_f64()
            ),
            Some(err) => eprintln!("{}: failed: {err}", entry.classifier),
        }
    }
    match bench::write_artifacts(&config, &report) {
        Ok(paths) => {
            for p in &paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    }
    print!("{}", bench::render_table(&report, OutputFormat::Text));
    if report.any_failed() {
        EXIT_CLASSIFIER_FAILED
    } else {
        EXIT_OK
    }
}

fn cmd_inspect(args: InspectArgs) -> i32 {
    if args.schema {
        println!("{}", canonical_ckd_schema().to_json());
        return EXIT_OK;
    }
    let Some(path) = args.dataset else {
        eprintln!("error: a dataset path is required unless --schema is given");
        return 2;
    };
    let ds = match bench::load_dataset(&path, args.format.into()) {
        Ok(ds) => ds,
        Err(e) => return data_error(e),
    };
    let summary = summarize(&ds);
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        );
    } else {
        print!("{}", summary.render_text());
    }
    EXIT_OK
}

fn cmd_validate(config_path: PathBuf) -> i32 {
    let config = match parse_config_file(&config_path) {
        Ok(c) => c,
        Err(e) => return data_error(e),
    };
    let ds = match bench::load_dataset(&config.dataset_path, config.format) {
        Ok(ds) => ds,
        Err(e) => return data_error(e),
    };
    if config.folds > ds.n_rows() {
        return data_error(format!(
            "cv.folds = {} exceeds the {} dataset rows",
            config.folds,
            ds.n_rows()
        ));
    }
    println!(
        "ok: {} rows, {} classifiers, {} folds, seed {}",
        ds.n_rows(),
        config.classifiers.len(),
        config.folds,
        config.seed
    );
    EXIT_OK
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Inspect(args) => cmd_inspect(args),
        Command::Validate { config } => cmd_validate(config),
    };
    std::process::exit(code);
}
