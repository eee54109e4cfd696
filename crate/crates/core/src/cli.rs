//! Command-line front end: `convert`, `validate`, `stats`, `roundtrip`, `synth`.
//!
//! Exit codes: 0 ok, 1 usage, 2 ingest/parse error, 3 violations, 4 I/O.
//! Logs go to stderr; graphs and reports go only to the paths given (reports
//! default to stdout).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::mapping::{convert, convert_root, ConvertError, MappingContext, RecordError, Strictness, DEFAULT_BASE_IRI};
use crate::meds::{load_dataset, read_descriptor, write_dataset};
use crate::rdf::{parse_ntriples, serialize_ntriples_canonical, serialize_turtle, Graph};
use crate::roundtrip::{fidelity, invert};
use crate::shapes::{builtin_meds_suite, load_suite, validate, ShapeFileError, ShapeSuite, ValidationReport};
use crate::stats::{compute_stats, emit_stats_report, render_stats_table};
use crate::synth::{generate, LabelKind, SynthConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Ok = 0,
    Usage = 1,
    Ingest = 2,
    Violations = 3,
    Io = 4,
}

/// An outcome other than success, with the error chain for the log.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

trait OrExit<T> {
    fn or_exit(self, exit: Exit) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, exit: Exit) -> Result<T, Failure> {
        self.map_err(|e| Failure { exit, error: e.into() })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Ntriples,
    Turtle,
}

#[derive(Parser, Debug)]
#[command(name = "meds-graph", version, about = "MEDS datasets as validated RDF graphs")]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Worker threads; output bytes do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Base for minted node IRIs.
    #[arg(long, env = "MEDS_GRAPH_BASE_IRI", default_value = DEFAULT_BASE_IRI)]
    pub base_iri: String,
    /// Omit prov:wasDerivedFrom on events.
    #[arg(long)]
    pub no_event_provenance: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// MEDS root -> validated RDF.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[command(flatten)]
        map: MapArgs,
        /// Shape file replacing the built-in suite.
        #[arg(long)]
        shapes: Option<PathBuf>,
        #[arg(long)]
        stats_out: Option<PathBuf>,
        #[arg(long)]
        no_validate: bool,
        /// Any malformed record fails the run (default).
        #[arg(long, conflicts_with = "collect")]
        strict: bool,
        /// Map malformed records best-effort and keep going.
        #[arg(long)]
        collect: bool,
    },
    /// Validate an N-Triples file.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        shapes: Option<PathBuf>,
        /// Report path; stdout if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Graph statistics for an N-Triples file or a MEDS root.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        map: MapArgs,
        /// Human-readable table instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// MEDS root -> graph -> MEDS, reporting table differences.
    Roundtrip {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Write a synthetic MEDS root.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        subjects: usize,
        #[arg(long, default_value_t = 5)]
        min_events: usize,
        #[arg(long, default_value_t = 30)]
        max_events: usize,
        #[arg(long, default_value_t = 0.8)]
        p_time: f64,
        #[arg(long, default_value_t = 0.3)]
        p_numeric: f64,
        #[arg(long, default_value_t = 0.1)]
        p_text: f64,
        #[arg(long, default_value_t = 50)]
        codes: usize,
        #[arg(long, default_value_t = 2)]
        code_depth: usize,
        #[arg(long, default_value_t = 2)]
        max_labels: usize,
        #[arg(long, value_enum, default_value = "boolean")]
        label_kind: LabelKindArg,
        #[arg(long, default_value_t = 1)]
        shards: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LabelKindArg {
    Boolean,
    Integer,
    Float,
    Categorical,
}

impl From<LabelKindArg> for LabelKind {
    fn from(k: LabelKindArg) -> Self {
        match k {
            LabelKindArg::Boolean => LabelKind::Boolean,
            LabelKindArg::Integer => LabelKind::Integer,
            LabelKindArg::Float => LabelKind::Float,
            LabelKindArg::Categorical => LabelKind::Categorical,
        }
    }
}

/// Settings for `convert` and `validate`.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub base_iri: String,
    pub event_provenance: bool,
    pub shapes: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    pub strictness: Strictness,
    pub validate: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            output: None,
            format: Format::Ntriples,
            base_iri: DEFAULT_BASE_IRI.into(),
            event_provenance: true,
            shapes: None,
            stats_out: None,
            strictness: Strictness::FailFast,
            validate: true,
        }
    }
}

#[derive(Serialize)]
struct RecordProblem {
    location: String,
    focus: String,
    message: String,
}

impl From<&RecordError> for RecordProblem {
    fn from(e: &RecordError) -> Self {
        RecordProblem {
            location: e.location.to_string(),
            focus: e.focus.as_str().to_string(),
            message: e.error.to_string(),
        }
    }
}

#[derive(Serialize)]
struct ConvertReport<'a> {
    #[serde(flatten)]
    validation: &'a ValidationReport,
    record_errors: Vec<RecordProblem>,
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .or_exit(Exit::Io)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .or_exit(Exit::Io)
}

/// Write with `f` to `path`, or to stdout when `path` is `None`.
fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let res = match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w).and_then(|_| w.flush())
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w).and_then(|_| w.flush())
        }
    };
    res.context("writing output").or_exit(Exit::Io)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    write_to(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

fn suite_for(shapes: Option<&Path>, ctx: &MappingContext) -> Result<ShapeSuite, Failure> {
    match shapes {
        None => Ok(builtin_meds_suite(&ctx.vocab)),
        Some(p) => load_suite(p).map_err(|e| {
            let exit = match e {
                ShapeFileError::Io { .. } => Exit::Io,
                ShapeFileError::Syntax { .. } => Exit::Usage,
            };
            Failure {
                exit,
                error: anyhow::Error::new(e).context(format!("loading shapes from {}", p.display())),
            }
        }),
    }
}

fn context_for(root: &Path, base_iri: &str, provenance: bool) -> Result<MappingContext, Failure> {
    let meta = read_descriptor(root).or_exit(Exit::Ingest)?;
    let ctx = MappingContext::new(base_iri, &meta.dataset_name)
        .with_context(|| format!("base IRI `{base_iri}`"))
        .or_exit(Exit::Usage)?;
    Ok(ctx.with_event_provenance(provenance))
}

fn convert_failure(e: ConvertError) -> Failure {
    let exit = match e {
        ConvertError::Ingest(_) => Exit::Ingest,
        ConvertError::Record(_) => Exit::Violations,
    };
    Failure { exit, error: e.into() }
}

fn convert_impl(cfg: &RunConfig) -> Result<Exit, Failure> {
    let output = cfg
        .output
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("convert needs --output"))
        .or_exit(Exit::Usage)?;
    // Always map leniently; strictness decides whether record problems fail the run.
    let ctx = context_for(&cfg.input, &cfg.base_iri, cfg.event_provenance)?.with_strictness(Strictness::Collect);
    let suite = suite_for(cfg.shapes.as_deref(), &ctx)?;
    let conv = convert_root(&cfg.input, &ctx).map_err(convert_failure)?;
    log::info!("mapped {} triples, {} record problems", conv.graph.len(), conv.errors.len());
    for e in &conv.errors {
        log::warn!("{e}");
    }

    let report = if cfg.validate {
        validate(&conv.graph, &suite)
    } else {
        ValidationReport::from_violations(vec![])
    };
    let strict_failure = cfg.strictness == Strictness::FailFast && !conv.errors.is_empty();
    if !report.conforms || strict_failure {
        log::error!(
            "{} violations, {} record problems; nothing serialized",
            report.violations.len(),
            conv.errors.len()
        );
        write_json(
            None,
            &ConvertReport {
                validation: &report,
                record_errors: conv.errors.iter().map(RecordProblem::from).collect(),
            },
        )?;
        return Ok(Exit::Violations);
    }

    let prefixes = ctx.vocab.prefixes();
    write_to(Some(output), |w| match cfg.format {
        Format::Ntriples => serialize_ntriples_canonical(&conv.graph, w),
        Format::Turtle => serialize_turtle(&conv.graph, &prefixes, w),
    })?;
    if let Some(p) = &cfg.stats_out {
        let stats = compute_stats(&conv.graph, &ctx.vocab);
        write_to(Some(p), |w| emit_stats_report(&stats, w))?;
    }
    log::info!("wrote {}", output.display());
    Ok(Exit::Ok)
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .or_exit(Exit::Io)?;
    parse_ntriples(BufReader::new(file)).map_err(|e| {
        let exit = match e {
            crate::rdf::NTriplesError::Io(_) => Exit::Io,
            _ => Exit::Ingest,
        };
        Failure {
            exit,
            error: anyhow::Error::new(e).context(format!("parsing {}", path.display())),
        }
    })
}

fn validate_impl(cfg: &RunConfig) -> Result<Exit, Failure> {
    let ctx = MappingContext::for_dataset("validate");
    let suite = suite_for(cfg.shapes.as_deref(), &ctx)?;
    let graph = read_graph(&cfg.input)?;
    let report = validate(&graph, &suite);
    write_json(cfg.output.as_deref(), &report)?;
    Ok(if report.conforms { Exit::Ok } else { Exit::Violations })
}

fn finish(r: Result<Exit, Failure>) -> Exit {
    match r {
        Ok(e) => e,
        Err(f) => {
            log::error!("{:#}", f.error);
            f.exit
        }
    }
}

/// Ingest, map, validate and serialize one MEDS root.
pub fn run_convert(cfg: &RunConfig) -> Exit {
    finish(convert_impl(cfg))
}

/// Validate an N-Triples file and print the report.
pub fn run_validate(cfg: &RunConfig) -> Exit {
    finish(validate_impl(cfg))
}

fn stats_impl(input: &Path, output: Option<&Path>, map: &MapArgs, table: bool) -> Result<Exit, Failure> {
    let (graph, vocab) = if input.is_dir() {
        let ctx = context_for(input, &map.base_iri, !map.no_event_provenance)?;
        let conv = convert_root(input, &ctx).map_err(convert_failure)?;
        (conv.graph, ctx.vocab)
    } else {
        (read_graph(input)?, MappingContext::for_dataset("stats").vocab)
    };
    let stats = compute_stats(&graph, &vocab);
    if table {
        write_to(output, |w| w.write_all(render_stats_table(&stats).as_bytes()))?;
    } else {
        write_to(output, |w| emit_stats_report(&stats, w))?;
    }
    Ok(Exit::Ok)
}

fn roundtrip_impl(input: &Path, output: Option<&Path>, map: &MapArgs) -> Result<Exit, Failure> {
    let ds = load_dataset(input).or_exit(Exit::Ingest)?;
    let ctx = MappingContext::new(&map.base_iri, &ds.metadata.dataset_name)
        .with_context(|| format!("base IRI `{}`", map.base_iri))
        .or_exit(Exit::Usage)?
        .with_event_provenance(!map.no_event_provenance);
    let conv = convert(&ds, &ctx).or_exit(Exit::Violations)?;
    let back = invert(&conv.graph, &ctx).or_exit(Exit::Violations)?;
    let report = fidelity(&ds, &back);
    write_json(output, &report)?;
    Ok(if report.is_exact() { Exit::Ok } else { Exit::Violations })
}

fn run_command(cli: Cli) -> Result<Exit, Failure> {
    match cli.command {
        Command::Convert {
            input,
            output,
            format,
            map,
            shapes,
            stats_out,
            no_validate,
            strict: _,
            collect,
        } => convert_impl(&RunConfig {
            input,
            output: Some(output),
            format,
            base_iri: map.base_iri,
            event_provenance: !map.no_event_provenance,
            shapes,
            stats_out,
            strictness: if collect { Strictness::Collect } else { Strictness::FailFast },
            validate: !no_validate,
        }),
        Command::Validate { input, shapes, output } => validate_impl(&RunConfig {
            output,
            shapes,
            ..RunConfig::new(input)
        }),
        Command::Stats { input, output, map, table } => stats_impl(&input, output.as_deref(), &map, table),
        Command::Roundtrip { input, output, map } => roundtrip_impl(&input, output.as_deref(), &map),
        Command::Synth {
            output,
            seed,
            subjects,
            min_events,
            max_events,
            p_time,
            p_numeric,
            p_text,
            codes,
            code_depth,
            max_labels,
            label_kind,
            shards,
        } => {
            let cfg = SynthConfig {
                seed,
                n_subjects: subjects,
                events_per_subject: min_events..=max_events,
                p_time,
                p_numeric,
                p_text,
                n_codes: codes,
                code_hierarchy_depth: code_depth,
                n_labels_per_subject: 0..=max_labels,
                label_kind: label_kind.into(),
                n_shards: shards,
                ..SynthConfig::default()
            };
            let ds = generate(&cfg).or_exit(Exit::Usage)?;
            write_dataset(&ds, &output).or_exit(Exit::Io)?;
            log::info!("wrote {} events to {}", ds.event_count(), output.display());
            Ok(Exit::Ok)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("MEDS_GRAPH_LOG")
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Usage } else { Exit::Ok };
        }
    };
    init_logging(cli.verbose);
    let run = |cli: Cli| finish(run_command(cli));
    match cli.threads {
        None => run(cli),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => {
                log::error!("thread pool: {e}");
                Exit::Usage
            }
        },
    }
}
