mod error;
mod formats;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frametoric::admissibility::{check_admissible, classify_space, frame_space_dimensions};
use frametoric::eigensteps::{compute_eigensteps, validate_eigensteps};
use frametoric::exec::Execution;
use frametoric::experiments::{membership_error, run_invariant_suite_with, run_trichotomy_with, ExperimentReport};
use frametoric::frame::{Frame, NormVector, Spectrum};
use frametoric::polytope::{default_thin, polytope_system, sample_relative_interior, DEFAULT_BURN_IN};
use frametoric::singularity::{
    is_orthodecomposable, momentum_jacobian_rank, stabilizer_dimension, DEFAULT_ODF_TOL,
};
use frametoric::spark::{spark, DEFAULT_SPARK_TOL};
use frametoric::synthesis::{frame_from_eigensteps, random_frame_with, SamplerConfig, SynthesisOptions};
use frametoric::torus::{torus_action, ActionIndex, AnglePack};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::formats::{
    frame_json, parse_frame_json, parse_list, parse_table_csv, table_csv, tables_csv,
    FrameDocument, TableDocument, FORMAT_VERSION,
};

const DEFAULT_SEED: u64 = 0;
const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "frametoric", version, about = "Frames with prescribed spectrum and norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Params {
    /// Frame spectrum, nonincreasing, comma-separated (fractions like 5/2 allowed).
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Squared column norms, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    r: String,
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Frames,
    Eigensteps,
}

#[derive(Subcommand)]
enum Command {
    /// Majorization check of (lambda, r).
    Admissible {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Output,
    },
    /// Empty / singular / smooth classification with a partition witness.
    Classify {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Output,
    },
    /// Dimensions of the frame space, its quotient and the eigenstep polytope.
    Dims {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Output,
    },
    /// Eigensteps of a frame.
    Eigensteps {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Frame with the given eigensteps and ordered norms.
    Synth {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Randomize phases and apply a Haar unitary drawn from this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Accept tables with ties between consecutive rows.
        #[arg(long)]
        allow_ties: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Random frames or eigenstep tables for (lambda, r).
    Sample {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "frames")]
        kind: SampleKind,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
        #[arg(long)]
        thin: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Spark of a frame with a minimal dependent set.
    Spark {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPARK_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Orthodecomposability, stabilizer dimension and momentum-Jacobian rank.
    Odf {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ODF_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Apply eigenstep circle actions, each given as K:J:ANGLE.
    Action {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long = "act", required = true, value_parser = parse_act)]
        acts: Vec<(ActionIndex, f64)>,
        #[command(flatten)]
        out: Output,
    },
    /// Check a frame or an eigenstep table against (lambda, r).
    Verify {
        #[arg(long, conflicts_with = "table", required_unless_present = "table")]
        frame: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Trichotomy experiment for (lambda, r), or the invariant suite.
    Montecarlo {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "suite")]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "suite")]
        r: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run every invariant battery instead of the trichotomy experiment.
        #[arg(long, conflicts_with_all = ["lambda", "r"])]
        suite: bool,
        /// Keep the measured wall time (otherwise reported as 0 so that
        /// identical invocations produce identical files).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: Output,
    },
}

fn parse_act(s: &str) -> Result<(ActionIndex, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [k, j, t] = parts.as_slice() else {
        return Err(format!("expected K:J:ANGLE, got {s:?}"));
    };
    let k: usize = k.parse().map_err(|e| format!("K: {e}"))?;
    let j: usize = j.parse().map_err(|e| format!("J: {e}"))?;
    let t = formats::parse_number(t)?;
    Ok((ActionIndex::new(k, j), t))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|error| CliError::Io {
        path: path.to_owned(),
        error,
    })
}

fn read_frame(path: &Path) -> Result<Frame, CliError> {
    parse_frame_json(&read(path)?, &path.display().to_string())
}

fn emit(out: &Output, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|error| CliError::Io {
            path: path.clone(),
            error,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Output, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    emit(out, &text)
}

fn field_error(field: &str, message: String) -> CliError {
    CliError::Input {
        origin: "arguments".into(),
        line: None,
        field: Some(field.into()),
        message,
    }
}

fn spectrum(text: &str) -> Result<Spectrum, CliError> {
    Spectrum::new(parse_list(text, "lambda")?).map_err(|e| field_error("lambda", e.to_string()))
}

fn norm_vector(text: &str) -> Result<NormVector, CliError> {
    NormVector::new(parse_list(text, "r")?).map_err(|e| field_error("r", e.to_string()))
}

fn params(p: &Params) -> Result<(Spectrum, NormVector), CliError> {
    Ok((spectrum(&p.lambda)?, norm_vector(&p.r)?))
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn finish_report(report: ExperimentReport, timing: bool, out: &Output) -> Result<(), CliError> {
    let report = if timing { report } else { report.without_timing() };
    emit_json(out, &report)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.metric.as_str())
            .collect();
        Err(CliError::ExperimentFailed(failed.join(", ")))
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Admissible { params: p, out } => {
            let (lambda, r) = params(&p)?;
            emit_json(&out, &check_admissible(&lambda, &r))
        }
        Command::Classify { params: p, out } => {
            let (lambda, r) = params(&p)?;
            emit_json(&out, &classify_space(&lambda, &r)?)
        }
        Command::Dims { params: p, out } => {
            let (lambda, r) = params(&p)?;
            emit_json(&out, &frame_space_dimensions(&lambda, &r)?)
        }
        Command::Eigensteps { frame, format, out } => {
            let table = compute_eigensteps(&read_frame(&frame)?);
            match format {
                Format::Csv => emit(&out, &table_csv(&table)),
                Format::Json => emit_json(&out, &TableDocument::from_table(&table)),
            }
        }
        Command::Synth {
            table,
            r,
            seed,
            allow_ties,
            out,
        } => {
            let t = parse_table_csv(&read(&table)?, &table.display().to_string())?;
            let r = parse_list(&r, "r")?;
            let mut opts = SynthesisOptions::canonical();
            if allow_ties {
                opts = opts.allow_ties();
            }
            if let Some(seed) = seed {
                opts = opts
                    .with_phase_seed(seed)
                    .with_left_unitary_seed(seed.wrapping_add(1));
            }
            let f = frame_from_eigensteps(&t, &r, opts)?;
            emit(&out, &frame_json(&f, seed))
        }
        Command::Sample {
            params: p,
            count,
            seed,
            kind,
            burn_in,
            thin,
            format,
            sequential,
            out,
        } => {
            let (lambda, r) = params(&p)?;
            match kind {
                SampleKind::Frames => {
                    if matches!(format, Format::Csv) {
                        return Err(field_error("format", "frames are written as JSON".into()));
                    }
                    let config = SamplerConfig {
                        burn_in,
                        thin,
                        execution: execution(sequential),
                    };
                    let frames = random_frame_with(&lambda, &r, count, seed, config)?;
                    let docs: Vec<FrameDocument> =
                        frames.iter().map(|f| FrameDocument::from_frame(f, None)).collect();
                    emit_json(
                        &out,
                        &json!({ "format_version": FORMAT_VERSION, "seed": seed, "frames": docs }),
                    )
                }
                SampleKind::Eigensteps => {
                    let system = polytope_system(&lambda, &r)?;
                    let thin = thin.unwrap_or_else(|| default_thin(system.dim()));
                    let tables = sample_relative_interior(&system, count, burn_in, thin, seed)?;
                    match format {
                        Format::Csv => emit(&out, &tables_csv(&tables, seed)),
                        Format::Json => {
                            let docs: Vec<TableDocument> = tables.iter().map(TableDocument::from_table).collect();
                            emit_json(
                                &out,
                                &json!({ "format_version": FORMAT_VERSION, "seed": seed, "tables": docs }),
                            )
                        }
                    }
                }
            }
        }
        Command::Spark { frame, tol, out } => emit_json(&out, &spark(&read_frame(&frame)?, tol)?),
        Command::Odf { frame, tol, out } => {
            let f = read_frame(&frame)?;
            let partition = is_orthodecomposable(&f, tol)?;
            let rank = momentum_jacobian_rank(&f);
            let full = f.d() * f.d() + f.n() - 1;
            emit_json(
                &out,
                &json!({
                    "orthodecomposable": partition.is_some(),
                    "partition": partition,
                    "stabilizer_dimension": stabilizer_dimension(&f),
                    "jacobian_rank": rank,
                    "jacobian_rank_deficiency": full - rank,
                }),
            )
        }
        Command::Action { frame, acts, out } => {
            let pack: AnglePack = acts.into_iter().collect();
            let moved = torus_action(&read_frame(&frame)?, &pack)?;
            emit(&out, &frame_json(&moved, None))
        }
        Command::Verify {
            frame,
            table,
            params: p,
            tol,
            out,
        } => {
            let lambda = spectrum(&p.lambda)?;
            let r = parse_list(&p.r, "r")?;
            if let Some(path) = frame {
                let err = membership_error(&read_frame(&path)?, &lambda, &r);
                let pass = err <= tol;
                emit_json(&out, &json!({ "membership_error": err, "tol": tol, "pass": pass }))?;
                if !pass {
                    return Err(CliError::Validation(format!("membership error {err:e} exceeds {tol:e}")));
                }
            } else if let Some(path) = table {
                let t = parse_table_csv(&read(&path)?, &path.display().to_string())?;
                let v = validate_eigensteps(&t, &lambda, &r, tol);
                emit_json(&out, &v)?;
                if !v.valid {
                    return Err(CliError::Validation(format!("{} violated constraints", v.violations.len())));
                }
            }
            Ok(())
        }
        Command::Montecarlo {
            lambda,
            r,
            samples,
            seed,
            suite,
            timing,
            sequential,
            out,
        } => {
            let mode = execution(sequential);
            let report = if suite {
                run_invariant_suite_with(seed, None, mode)
            } else {
                let lambda = spectrum(lambda.as_deref().unwrap_or_default())?;
                let r = norm_vector(r.as_deref().unwrap_or_default())?;
                run_trichotomy_with(&lambda, &r, samples, seed, mode)
            };
            finish_report(report, timing, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
