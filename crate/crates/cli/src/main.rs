//! `mured` — multivariate entropy and mutual redundancy statistics over
//! categorical data tables.

mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mured_core::distribution::{JointDistribution, VariableSet};
use mured_core::ingest::{
    self, AlphabetScope, CategoricalDataset, ReadOptions, SeriesOptions, TimeOrdering, WindowSpec,
};
use mured_core::measures::{self, MeasureOptions};
use mured_core::synth::{self, oracle, GeneratorSpec};
use mured_core::{Error, MeasureKind};

use output::{
    sig15, ColumnSummary, DescribeItem, OracleItem, OutputRecord, ReportItem, ResultItem,
    SynthItem, TimeSummary,
};

const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "mured",
    version,
    about = "Multivariate entropy, transmission, and mutual redundancy statistics",
    after_help = "Exit codes: 0 success, 2 input or usage error, \
                  3 internal identity violation, 4 oracle mismatch.\n\
                  Set MURED_LOG=debug for diagnostics on stderr."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a delimited file: columns, rows, cardinalities, time range.
    Describe(DescribeArgs),
    /// Evaluate one measure over the named variables of a file.
    Measure(MeasureArgs),
    /// Evaluate one measure per time window and emit the series.
    Series(SeriesArgs),
    /// Write a generator's exact distribution as a weighted table.
    Synth(SynthArgs),
    /// Run a measure through both the main path and the dense oracle.
    OracleCheck(OracleCheckArgs),
}

/// Flags shared by every file-reading command.
#[derive(Args)]
struct InputArgs {
    /// Delimited input file (UTF-8).
    input: PathBuf,
    /// Tab-delimited input instead of comma-delimited.
    #[arg(long)]
    tab: bool,
    /// The file has no header row; columns are named c0..cK.
    #[arg(long)]
    no_header: bool,
}

impl InputArgs {
    fn read(&self) -> Result<CategoricalDataset, Error> {
        read_dataset(&self.input, self.tab, self.no_header)
    }

    fn echo(&self, inputs: &mut BTreeMap<String, String>) {
        inputs.insert("input".into(), self.input.display().to_string());
        inputs.insert("tab".into(), self.tab.to_string());
        inputs.insert("no_header".into(), self.no_header.to_string());
    }
}

fn read_dataset(path: &Path, tab: bool, no_header: bool) -> Result<CategoricalDataset, Error> {
    let options = ReadOptions {
        delimiter: if tab { b'\t' } else { b',' },
        has_header: !no_header,
        declared_alphabets: None,
    };
    ingest::read_delimited(path, &options)
}

#[derive(Args)]
struct DescribeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Column holding totally ordered time labels.
    #[arg(long)]
    time_col: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    /// Joint entropy H of the margin on --vars.
    Entropy,
    /// Transmission: the signed inclusion-exclusion of subset entropies.
    T,
    /// The opposite-sign convention: Q = (-1)^n * T.
    Q,
    /// Mutual redundancy: R = (-1)^(n+1) * T, dual-route checked.
    R,
    /// Excess entropy: joint uncertainty with overlaps counted twice.
    Y,
    /// Redundancy fraction (H_max - H)/H_max.
    Rfrac,
    /// Conditional transmission T(x;y|G); --vars x,y and --given G.
    Tcond,
    /// Interaction information beyond the best lower-order margin model.
    Ii,
}

impl MeasureArg {
    fn kind(self) -> MeasureKind {
        match self {
            MeasureArg::Entropy => MeasureKind::Entropy,
            MeasureArg::T => MeasureKind::Transmission,
            MeasureArg::Q => MeasureKind::QMeasure,
            MeasureArg::R => MeasureKind::MutualRedundancy,
            MeasureArg::Y => MeasureKind::ExcessEntropy,
            MeasureArg::Rfrac => MeasureKind::RedundancyFraction,
            MeasureArg::Tcond => MeasureKind::ConditionalTransmission,
            MeasureArg::Ii => MeasureKind::InteractionInformation,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated variable names, e.g. --vars u,i,g.
    #[arg(long)]
    vars: String,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Conditioning variables for tcond, comma-separated.
    #[arg(long)]
    given: Option<String>,
    /// Log base; 2 reports bits.
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Attach the component subset entropies to the report.
    #[arg(long)]
    explain: bool,
    /// Treat this column as a (possibly fractional) count per row.
    #[arg(long)]
    weighted: Option<String>,
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Column holding totally ordered time labels.
    #[arg(long)]
    time_col: String,
    /// Window width in consecutive time labels.
    #[arg(long, default_value_t = 1)]
    window: usize,
    /// Labels to advance between windows.
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long)]
    vars: String,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long)]
    given: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Restrict each window's alphabets to its own observed values instead
    /// of the full dataset's.
    #[arg(long)]
    per_window_alphabets: bool,
    /// Force the time ordering instead of auto-detecting.
    #[arg(long, value_enum, default_value_t = TimeOrderArg::Auto)]
    time_order: TimeOrderArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TimeOrderArg {
    Auto,
    Numeric,
    Lexical,
}

impl TimeOrderArg {
    fn ordering(self) -> TimeOrdering {
        match self {
            TimeOrderArg::Auto => TimeOrdering::Auto,
            TimeOrderArg::Numeric => TimeOrdering::Numeric,
            TimeOrderArg::Lexical => TimeOrdering::Lexical,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Parity,
    Independent,
    Copy,
    Latent,
    Random,
}

#[derive(Args)]
struct GeneratorArgs {
    /// Which distribution family to generate.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Variable count (parity, copy).
    #[arg(long)]
    arity: Option<usize>,
    /// Per-variable cardinalities, e.g. --cards 2,3,2 (independent, random);
    /// a single value for copy.
    #[arg(long)]
    cards: Option<String>,
    /// Flip probability in [0,1] (latent).
    #[arg(long)]
    noise: Option<f64>,
    /// Reproducibility seed (random).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of cells forced to zero, in [0,1) (random).
    #[arg(long, default_value_t = 0.0)]
    sparsity: f64,
}

impl GeneratorArgs {
    fn kind(&self) -> Result<KindArg, Error> {
        self.kind
            .ok_or_else(|| Error::Malformed("--kind is required".into()))
    }

    fn spec(&self) -> Result<GeneratorSpec, Error> {
        let cards = || -> Result<Vec<usize>, Error> {
            let raw = self
                .cards
                .as_deref()
                .ok_or_else(|| Error::Malformed("--cards is required for this kind".into()))?;
            raw.split(',')
                .map(|c| {
                    c.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Malformed(format!("bad cardinality `{c}`")))
                })
                .collect()
        };
        Ok(match self.kind()? {
            KindArg::Parity => GeneratorSpec::Parity {
                arity: self
                    .arity
                    .ok_or_else(|| Error::Malformed("--arity is required for parity".into()))?,
            },
            KindArg::Independent => GeneratorSpec::IndependentUniform {
                cardinalities: cards()?,
            },
            KindArg::Copy => GeneratorSpec::CopyChain {
                arity: self
                    .arity
                    .ok_or_else(|| Error::Malformed("--arity is required for copy".into()))?,
                cardinality: match &self.cards {
                    Some(_) => *cards()?.first().unwrap_or(&2),
                    None => 2,
                },
            },
            KindArg::Latent => GeneratorSpec::LatentCommonCause {
                noise: self
                    .noise
                    .ok_or_else(|| Error::Malformed("--noise is required for latent".into()))?,
            },
            KindArg::Random => GeneratorSpec::Random {
                seed: self.seed,
                cardinalities: cards()?,
                sparsity: self.sparsity,
            },
        })
    }

    fn kind_token(&self) -> &'static str {
        match self.kind {
            Some(KindArg::Parity) => "parity",
            Some(KindArg::Independent) => "independent",
            Some(KindArg::Copy) => "copy",
            Some(KindArg::Latent) => "latent",
            Some(KindArg::Random) => "random",
            None => "unset",
        }
    }

    fn echo(&self, inputs: &mut BTreeMap<String, String>) {
        inputs.insert("kind".into(), self.kind_token().to_string());
        if let Some(arity) = self.arity {
            inputs.insert("arity".into(), arity.to_string());
        }
        if let Some(cards) = &self.cards {
            inputs.insert("cards".into(), cards.clone());
        }
        if let Some(noise) = self.noise {
            inputs.insert("noise".into(), noise.to_string());
        }
        if matches!(self.kind, Some(KindArg::Random)) {
            inputs.insert("seed".into(), self.seed.to_string());
            inputs.insert("sparsity".into(), self.sparsity.to_string());
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Output file for the weighted table.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Generator to check, as in `synth`; alternatively --input.
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Delimited input file instead of a generator.
    #[arg(long, conflicts_with = "kind")]
    input: Option<PathBuf>,
    #[arg(long)]
    tab: bool,
    #[arg(long)]
    no_header: bool,
    /// Weight column when reading a file.
    #[arg(long)]
    weighted: Option<String>,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Variables to measure; defaults to all non-conditioning variables.
    #[arg(long)]
    vars: Option<String>,
    #[arg(long)]
    given: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("mured: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    let mut current = err;
    while let Error::Window { source, .. } = current {
        current = source;
    }
    match current {
        Error::PathMismatch { .. } => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Describe(args) => cmd_describe(args),
        Command::Measure(args) => cmd_measure(args),
        Command::Series(args) => cmd_series(args),
        Command::Synth(args) => cmd_synth(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    }
}

fn parse_vars(raw: &str) -> Result<VariableSet, Error> {
    raw.parse()
}

fn parse_given(raw: &Option<String>) -> Result<Option<VariableSet>, Error> {
    raw.as_deref().map(parse_vars).transpose()
}

fn cmd_describe(args: DescribeArgs) -> Result<u8, Error> {
    let mut inputs = BTreeMap::new();
    args.input.echo(&mut inputs);
    if let Some(col) = &args.time_col {
        inputs.insert("time_col".into(), col.clone());
    }

    let dataset = args.input.read()?;
    diag(|| format!("describe: {} rows", dataset.len()));
    let columns = dataset
        .columns()
        .iter()
        .map(|name| {
            Ok(ColumnSummary {
                name: name.clone(),
                cardinality: dataset.observed_alphabet(name)?.len(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let time = match &args.time_col {
        Some(col) => {
            let idx = dataset
                .column_index(col)
                .ok_or_else(|| Error::UnknownVariable(col.clone()))?;
            let labels: Vec<&str> = dataset.rows().iter().map(|r| r[idx].as_str()).collect();
            if labels.is_empty() {
                None
            } else if let Ok(parsed) = labels
                .iter()
                .map(|l| l.parse::<i64>())
                .collect::<Result<Vec<i64>, _>>()
            {
                Some(TimeSummary {
                    column: col.clone(),
                    min: parsed.iter().min().unwrap().to_string(),
                    max: parsed.iter().max().unwrap().to_string(),
                })
            } else {
                Some(TimeSummary {
                    column: col.clone(),
                    min: labels.iter().min().unwrap().to_string(),
                    max: labels.iter().max().unwrap().to_string(),
                })
            }
        }
        None => None,
    };

    let mut record = OutputRecord::new("describe", inputs);
    record.results.push(ResultItem::Describe(DescribeItem {
        columns,
        row_count: dataset.len(),
        time,
    }));
    print!("{}", record.to_json());
    Ok(0)
}

/// The analysis distribution for measure-style commands: weighted rows or
/// plain record counting, over the measured variables plus any conditioning
/// variables.
fn distribution_for(
    dataset: &CategoricalDataset,
    vars: &VariableSet,
    given: Option<&VariableSet>,
    weighted: &Option<String>,
) -> Result<JointDistribution, Error> {
    let record_vars = match given {
        Some(given) => vars.union_disjoint(given)?,
        None => vars.clone(),
    };
    match weighted {
        Some(col) => ingest::weighted_distribution(dataset, &record_vars, col),
        None => JointDistribution::from_records(dataset, &record_vars),
    }
}

fn cmd_measure(args: MeasureArgs) -> Result<u8, Error> {
    let vars = parse_vars(&args.vars)?;
    let given = parse_given(&args.given)?;
    let kind = args.measure.kind();

    let mut inputs = BTreeMap::new();
    args.input.echo(&mut inputs);
    inputs.insert("measure".into(), kind.token().to_string());
    inputs.insert("vars".into(), vars.joined());
    if let Some(given) = &given {
        inputs.insert("given".into(), given.joined());
    }
    inputs.insert("base".into(), args.base.to_string());
    inputs.insert("explain".into(), args.explain.to_string());
    if let Some(col) = &args.weighted {
        inputs.insert("weighted".into(), col.clone());
    }

    let dataset = args.input.read()?;
    let dist = distribution_for(&dataset, &vars, given.as_ref(), &args.weighted)?;
    diag(|| {
        format!(
            "measure: {} cells over {} variables",
            dist.support_len(),
            dist.arity()
        )
    });

    let options = MeasureOptions {
        base: args.base,
        explain: args.explain,
        ..MeasureOptions::default()
    };
    let report = measures::measure_report(&dist, kind, &vars, given.as_ref(), &options)?;

    let mut record = OutputRecord::new("measure", inputs);
    record.warnings.extend(report.warnings.iter().cloned());
    record
        .results
        .push(ResultItem::Report(ReportItem::from_report(&report)));
    emit(&record, args.format)?;
    Ok(0)
}

fn cmd_series(args: SeriesArgs) -> Result<u8, Error> {
    let vars = parse_vars(&args.vars)?;
    let given = parse_given(&args.given)?;
    let kind = args.measure.kind();
    let spec = WindowSpec::sliding(args.window, args.step)?;

    let mut inputs = BTreeMap::new();
    args.input.echo(&mut inputs);
    inputs.insert("time_col".into(), args.time_col.clone());
    inputs.insert("window".into(), args.window.to_string());
    inputs.insert("step".into(), args.step.to_string());
    inputs.insert("measure".into(), kind.token().to_string());
    inputs.insert("vars".into(), vars.joined());
    if let Some(given) = &given {
        inputs.insert("given".into(), given.joined());
    }
    inputs.insert("base".into(), args.base.to_string());
    inputs.insert(
        "per_window_alphabets".into(),
        args.per_window_alphabets.to_string(),
    );

    let mut dataset = args.input.read()?;
    dataset.set_time_column(&args.time_col)?;

    let options = SeriesOptions {
        ordering: args.time_order.ordering(),
        alphabet_scope: if args.per_window_alphabets {
            AlphabetScope::PerWindow
        } else {
            AlphabetScope::FullDataset
        },
        measure: MeasureOptions {
            base: args.base,
            ..MeasureOptions::default()
        },
        given,
        parallel: true,
    };
    let series = ingest::measure_series(&dataset, &vars, kind, &spec, &options)?;
    diag(|| {
        format!(
            "series: {} points, {} gaps",
            series.points.len(),
            series.gaps.len()
        )
    });

    let mut record = OutputRecord::new("series", inputs);
    for gap in &series.gaps {
        record.warnings.push(format!("empty window {gap}"));
    }
    for point in &series.points {
        record
            .warnings
            .extend(point.report.warnings.iter().cloned());
    }
    record.results = output::series_points(&series);
    emit(&record, args.format)?;
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> Result<u8, Error> {
    let spec = args.generator.spec()?;
    let dist = synth::generate(&spec)?;

    let mut inputs = BTreeMap::new();
    args.generator.echo(&mut inputs);
    inputs.insert("out".into(), args.out.display().to_string());

    write_weight_table(&dist, &args.out)?;

    let mut record = OutputRecord::new("synth", inputs);
    record.results.push(ResultItem::Synth(SynthItem {
        kind: args.generator.kind_token().to_string(),
        variables: dist.variables().map(|v| v.name().to_string()).collect(),
        cells: dist.support_len(),
        out: args.out.display().to_string(),
    }));
    print!("{}", record.to_json());
    Ok(0)
}

/// One row per positive cell; the `weight` column carries the probability in
/// shortest round-trip decimal form, so re-reading reproduces the
/// distribution exactly.
fn write_weight_table(dist: &JointDistribution, path: &Path) -> Result<(), Error> {
    let file = std::fs::File::create(path)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    let mut header: Vec<String> = dist.variables().map(|v| v.name().to_string()).collect();
    header.push("weight".to_string());
    w.write_record(&header).map_err(csv_io)?;
    for (tuple, p) in dist.cells() {
        let mut row: Vec<String> = tuple
            .iter()
            .zip(dist.alphabets())
            .map(|(&idx, alphabet)| alphabet.label(idx as usize).unwrap_or("").to_string())
            .collect();
        row.push(format!("{p}"));
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Malformed(e.to_string())
}

fn cmd_oracle_check(args: OracleCheckArgs) -> Result<u8, Error> {
    let kind = args.measure.kind();
    let given = parse_given(&args.given)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("measure".into(), kind.token().to_string());
    if let Some(given) = &given {
        inputs.insert("given".into(), given.joined());
    }

    let (dist, vars) = if args.generator.kind.is_some() {
        args.generator.echo(&mut inputs);
        let dist = synth::generate(&args.generator.spec()?)?;
        let vars = match &args.vars {
            Some(raw) => parse_vars(raw)?,
            None => default_vars(&dist, given.as_ref())?,
        };
        (dist, vars)
    } else if let Some(path) = &args.input {
        inputs.insert("input".into(), path.display().to_string());
        let dataset = read_dataset(path, args.tab, args.no_header)?;
        let vars = match &args.vars {
            Some(raw) => parse_vars(raw)?,
            None => {
                // Everything except the weight and conditioning columns.
                let names: Vec<&str> = dataset
                    .columns()
                    .iter()
                    .map(String::as_str)
                    .filter(|c| Some(*c) != args.weighted.as_deref())
                    .filter(|c| {
                        given
                            .as_ref()
                            .map(|g| !g.iter().any(|v| v.name() == *c))
                            .unwrap_or(true)
                    })
                    .collect();
                VariableSet::from_names(names)?
            }
        };
        let dist = distribution_for(&dataset, &vars, given.as_ref(), &args.weighted)?;
        (dist, vars)
    } else {
        return Err(Error::Malformed(
            "oracle-check needs either --kind or --input".into(),
        ));
    };
    inputs.insert("vars".into(), vars.joined());

    let cmp = oracle::compare_with_oracle(&dist, kind, &vars, given.as_ref())?;
    let passed = cmp.diff <= ORACLE_TOLERANCE;
    diag(|| {
        format!(
            "oracle-check: main {} oracle {} diff {:e}",
            cmp.main, cmp.oracle, cmp.diff
        )
    });

    let mut record = OutputRecord::new("oracle-check", inputs);
    record.results.push(ResultItem::OracleCheck(OracleItem {
        measure: kind.token().to_string(),
        variables: vars.iter().map(|v| v.name().to_string()).collect(),
        main: sig15(cmp.main),
        oracle: sig15(cmp.oracle),
        diff: sig15(cmp.diff),
        tolerance: ORACLE_TOLERANCE,
        passed,
    }));
    print!("{}", record.to_json());
    Ok(if passed { 0 } else { 4 })
}

/// All variables of the distribution except conditioning ones.
fn default_vars(
    dist: &JointDistribution,
    given: Option<&VariableSet>,
) -> Result<VariableSet, Error> {
    match given {
        Some(given) => VariableSet::new(
            dist.variable_set()
                .iter()
                .filter(|v| !given.contains(v))
                .cloned(),
        ),
        None => Ok(dist.variable_set()),
    }
}

fn emit(record: &OutputRecord, format: Format) -> Result<(), Error> {
    match format {
        Format::Json => {
            print!("{}", record.to_json());
        }
        Format::Csv => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::write_csv(record, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Diagnostics gated on MURED_LOG (any value other than empty, `0`, or
/// `off` enables them).
fn diag(message: impl FnOnce() -> String) {
    static ENABLED: OnceLock<bool> = OnceLock::new();
    let enabled = *ENABLED.get_or_init(|| {
        std::env::var("MURED_LOG")
            .map(|v| !v.is_empty() && v != "0" && v != "off")
            .unwrap_or(false)
    });
    if enabled {
        eprintln!("mured: {}", message());
    }
}
