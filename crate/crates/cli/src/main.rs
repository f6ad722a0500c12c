//! `catout`: outlier detection, feature selection and data-complexity
//! indicators for categorical CSV data.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use catout::evaluation::{DEFAULT_EPSILON, DEFAULT_THETA};
use catout::scoring;
use catout::value_graph::{self, DEFAULT_STATS_NODE_CAP};
use catout::{
    auc, complexity_report, compute_stats, detect, factors, generate_synthetic, load_csv, preprocess, select,
    CategoricalDataset, CsvOptions, DetectorConfig, Engine, EngineParams, Error, ExponentWeighting, IndicatorParams,
    LabelColumn, LiftScaling, Method, SdrwScoring, Selection, SyntheticConfig, Variant, WalkParams,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Format, Table};

#[derive(Parser)]
#[command(name = "catout", version, about = "Outlier detection for categorical data")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score and rank objects.
    Detect(DetectArgs),
    /// Rank features by relevance and keep the most outlying ones.
    Select(SelectArgs),
    /// Data-complexity indicators (needs labels).
    Indicators(IndicatorArgs),
    /// AUC of one or more methods against the labels.
    Eval(EvalArgs),
    /// Diameter and clustering coefficient of the value graphs.
    GraphStats(GraphStatsArgs),
    /// Generate a labeled synthetic dataset as CSV.
    Gen(GenArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV file.
    #[arg(long, short)]
    input: PathBuf,
    /// Label column, by header name or 0-based index; excluded from the features.
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// The first row is data, not a header.
    #[arg(long)]
    no_header: bool,
}

impl InputArgs {
    fn load(&self) -> Result<CategoricalDataset> {
        if !self.delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character");
        }
        let mut opts = CsvOptions {
            has_header: !self.no_header,
            label_column: self.label_column.clone().map(LabelColumn::Name),
            delimiter: self.delimiter as u8,
        };
        let loaded = match load_csv(&self.input, &opts) {
            Err(Error::UnknownLabelColumn(name)) => match name.parse::<usize>() {
                Ok(i) => {
                    opts.label_column = Some(LabelColumn::Index(i));
                    load_csv(&self.input, &opts)
                }
                Err(_) => Err(Error::UnknownLabelColumn(name)),
            },
            other => other,
        };
        loaded.with_context(|| format!("loading {}", self.input.display()))
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl OutputArgs {
    fn emit(&self, table: &Table) -> Result<()> {
        let mut out = open_output(self.output.as_deref())?;
        table.write(&mut out, self.format)?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LiftArg {
    Support,
    Frequency,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoringArg {
    DensityProfile,
    ClosedForm,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Relevance,
    Normalized,
}

#[derive(Args)]
struct EngineArgs {
    /// cbrw, sdrw, marp, base, cbrw-ia, cbrw-ie, sdrw-ia or sdrw-ie.
    #[arg(long, short, default_value = "sdrw")]
    method: Method,
    /// Damping factor of the walk.
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Stop when the L1 change of the walk falls below this.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = LiftArg::Support)]
    lift_scaling: LiftArg,
    #[arg(long, value_enum, default_value_t = ScoringArg::DensityProfile)]
    sdrw_scoring: ScoringArg,
    /// Per-feature exponent in the object score.
    #[arg(long, value_enum, default_value_t = WeightingArg::Relevance)]
    weighting: WeightingArg,
}

impl EngineArgs {
    fn params(&self) -> EngineParams {
        EngineParams {
            walk: WalkParams {
                alpha: self.alpha,
                tol: self.tol,
                max_iter: self.max_iter,
            },
            lift_scaling: match self.lift_scaling {
                LiftArg::Support => LiftScaling::Support,
                LiftArg::Frequency => LiftScaling::Frequency,
            },
            sdrw_scoring: match self.sdrw_scoring {
                ScoringArg::DensityProfile => SdrwScoring::DensityProfile,
                ScoringArg::ClosedForm => SdrwScoring::ClosedForm,
            },
            weighting: match self.weighting {
                WeightingArg::Relevance => ExponentWeighting::Relevance,
                WeightingArg::Normalized => ExponentWeighting::Normalized,
            },
        }
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct SelectionArgs {
    /// Keep this fraction of features, most relevant first.
    #[arg(long)]
    top_ratio: Option<f64>,
    /// Keep features with relevance at least this.
    #[arg(long)]
    min_rel: Option<f64>,
}

impl SelectionArgs {
    fn selection(&self) -> Option<Selection> {
        match (self.top_ratio, self.min_rel) {
            (Some(r), _) => Some(Selection::TopRatio(r)),
            (_, Some(m)) => Some(Selection::MinRel(m)),
            _ => None,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Score on the selected features only.
    #[command(flatten)]
    selection: SelectionArgs,
    /// Write the walk's per-iteration L1 change as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the peeling order and subgraph densities as CSV (sdrw methods).
    #[arg(long)]
    dump_peeling: Option<PathBuf>,
    /// Write the value graph as a tab-separated edge list.
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    /// Write per-value outlierness as CSV.
    #[arg(long)]
    dump_values: Option<PathBuf>,
    /// Write per-feature relevance as CSV.
    #[arg(long)]
    dump_relevance: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    selection: SelectionArgs,
    /// Also write the dataset restricted to the kept features as CSV.
    #[arg(long)]
    reduced: Option<PathBuf>,
}

#[derive(Args)]
struct IndicatorArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Frequency at or below which a value counts as rare.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Methods to evaluate, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
struct GraphStatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Refuse graphs with more nodes than this.
    #[arg(long, default_value_t = DEFAULT_STATS_NODE_CAP)]
    node_cap: usize,
}

#[derive(Args)]
struct GenArgs {
    /// Output file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    n_objects: usize,
    #[arg(long, default_value_t = 5)]
    n_relevant: usize,
    #[arg(long, default_value_t = 5)]
    n_noisy: usize,
    #[arg(long, default_value_t = 50)]
    n_outliers: usize,
    /// Probability that an outlier takes a relevant feature's outlying value.
    #[arg(long, default_value_t = 0.9)]
    coupling: f64,
    #[arg(long, default_value_t = 4)]
    n_normal_values: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_table(path: &Path, table: &Table) -> Result<()> {
    let mut out = open_output(Some(path))?;
    table.write(&mut out, Format::Csv)?;
    out.flush()?;
    Ok(())
}

fn write_dataset(path: Option<&Path>, ds: &CategoricalDataset) -> Result<()> {
    let mut header: Vec<String> = ds.feature_names().to_vec();
    if ds.labels().is_some() {
        header.push("label".into());
    }
    let mut table = Table::new(header).all_text();
    for i in 0..ds.n_objects() {
        let mut row: Vec<String> = (0..ds.n_features()).map(|f| ds.value_name(ds.cell(i, f)).to_string()).collect();
        if let Some(l) = ds.labels() {
            row.push(if l[i] { "1" } else { "0" }.into());
        }
        table.push(row);
    }
    let mut out = open_output(path)?;
    table.write(&mut out, Format::Csv)?;
    out.flush()?;
    Ok(())
}

/// Rejects side-artifact flags the method cannot serve, before any work.
fn check_artifacts(args: &DetectArgs) -> Result<()> {
    let method = args.engine.method;
    let ev = method.engine_variant();
    let walk = matches!(ev, Some((Engine::Cbrw, v)) if v != Variant::Base);
    let peels = matches!(ev, Some((Engine::Sdrw, v)) if v != Variant::Base);
    if args.trace.is_some() && !walk {
        bail!("method {method} has no walk to trace");
    }
    if args.dump_peeling.is_some() && !peels {
        bail!("method {method} does not peel subgraphs");
    }
    if args.dump_graph.is_some() && !(walk || peels) {
        bail!("method {method} builds no value graph");
    }
    if (args.dump_values.is_some() || args.dump_relevance.is_some()) && ev.is_none() {
        bail!("method {method} has no value outlierness");
    }
    Ok(())
}

fn run_detect(args: &DetectArgs) -> Result<()> {
    check_artifacts(args)?;
    let ds = args.input.load()?;
    let config = DetectorConfig {
        method: args.engine.method,
        params: args.engine.params(),
        selection: args.selection.selection(),
        trace: args.trace.is_some(),
    };
    let det = detect(&ds, &config)?;

    let mut columns = vec!["rank", "object", "score"];
    if ds.labels().is_some() {
        columns.push("label");
    }
    let mut table = Table::new(columns);
    for (pos, &i) in det.scores.ranking.iter().enumerate() {
        let mut row = vec![(pos + 1).to_string(), i.to_string(), det.scores.score[i].to_string()];
        if let Some(l) = ds.labels() {
            row.push((l[i] as u8).to_string());
        }
        table.push(row);
    }
    args.output.emit(&table)?;

    let needs_work = args.dump_values.is_some() || args.dump_relevance.is_some() || args.dump_graph.is_some();
    let work = if needs_work { Some(ds.select_features(&det.features)?) } else { None };

    if let Some(path) = &args.trace {
        let trace = det
            .trace
            .as_ref()
            .with_context(|| format!("method {} has no walk to trace", config.method))?;
        let mut t = Table::new(["iteration", "l1_change"]);
        for (k, d) in trace.iter().enumerate() {
            t.push([(k + 1).to_string(), d.to_string()]);
        }
        write_table(path, &t)?;
    }
    if let Some(path) = &args.dump_peeling {
        let peel = det
            .peeling
            .as_ref()
            .with_context(|| format!("method {} does not peel subgraphs", config.method))?;
        let n = peel.n_nodes();
        let mut t = Table::new(["step", "removed_value", "remaining_nodes", "density"]);
        t.push(["0".into(), String::new(), n.to_string(), peel.full_density.to_string()]);
        for (step, &v) in peel.removal_order.iter().enumerate() {
            let density = peel.subgraph_densities.get(step).map(|d| d.to_string()).unwrap_or_default();
            t.push([(step + 1).to_string(), v.to_string(), (n - step - 1).to_string(), density]);
        }
        write_table(path, &t)?;
    }
    if let Some(path) = &args.dump_values {
        let phi = det
            .phi
            .as_ref()
            .with_context(|| format!("method {} has no value outlierness", config.method))?;
        let work = work.as_ref().expect("built above");
        let mut t = Table::new(["value", "feature", "name", "outlierness"]).text(["feature", "name"]);
        for (v, p) in phi.phi.iter().enumerate() {
            t.push([
                v.to_string(),
                work.feature_name(work.feature_of(v)).to_string(),
                work.value_name(v).to_string(),
                p.to_string(),
            ]);
        }
        write_table(path, &t)?;
    }
    if let Some(path) = &args.dump_relevance {
        let rel = det
            .relevance
            .as_ref()
            .with_context(|| format!("method {} has no feature relevance", config.method))?;
        let work = work.as_ref().expect("built above");
        let mut t = Table::new(["feature", "name", "rel", "tau"]).text(["name"]);
        for (f, (r, tau)) in rel.rel.iter().zip(&rel.tau).enumerate() {
            t.push([det.features[f].to_string(), work.feature_name(f).to_string(), r.to_string(), tau.to_string()]);
        }
        write_table(path, &t)?;
    }
    if let Some(path) = &args.dump_graph {
        let (engine, variant) = config
            .method
            .engine_variant()
            .with_context(|| format!("method {} builds no value graph", config.method))?;
        let out = scoring::value_outlierness(work.as_ref().expect("built above"), engine, variant, &config.params)?;
        let graph = out.graph.with_context(|| format!("method {} builds no value graph", config.method))?;
        let mut w = open_output(Some(path))?;
        graph.write_edge_list(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn run_select(args: &SelectArgs) -> Result<()> {
    let ds = args.input.load()?;
    let selection = args.selection.selection().unwrap_or_default();
    let out = select(&ds, args.engine.method, &args.engine.params(), selection)?;
    let mut table = Table::new(["feature", "name", "rel", "tau", "kept"]).text(["name"]);
    for (k, &f) in out.scored_features.iter().enumerate() {
        table.push([
            f.to_string(),
            ds.feature_name(f).to_string(),
            out.relevance.rel[k].to_string(),
            out.relevance.tau[k].to_string(),
            out.kept.contains(&f).to_string(),
        ]);
    }
    args.output.emit(&table)?;
    if let Some(path) = &args.reduced {
        write_dataset(Some(path), &ds.select_features(&out.kept)?)?;
    }
    Ok(())
}

fn run_indicators(args: &IndicatorArgs) -> Result<()> {
    let (ds, _) = preprocess(args.input.load()?)?;
    let params = IndicatorParams {
        theta: args.theta,
        epsilon: args.epsilon,
    };
    let report = complexity_report(&ds, params)?;
    let mut table = Table::new(["indicator", "value"]).text(["indicator"]);
    table.push(["kappa_vcc".into(), report.kappa_vcc.to_string()]);
    table.push(["kappa_het".into(), report.kappa_het.to_string()]);
    table.push(["kappa_ins".into(), report.kappa_ins.to_string()]);
    table.push(["kappa_fnl".into(), report.kappa_fnl.to_string()]);
    for (f, e) in report.per_feature_efficiency.iter().enumerate() {
        table.push([format!("efficiency:{}", ds.feature_name(f)), e.to_string()]);
    }
    args.output.emit(&table)
}

fn run_eval(args: &EvalArgs) -> Result<()> {
    let ds = args.input.load()?;
    let labels = ds.labels().context("eval needs a label column")?;
    let methods = if args.methods.is_empty() { Method::ALL.to_vec() } else { args.methods.clone() };
    let mut table = Table::new(["method", "auc"]).text(["method"]);
    for method in methods {
        let config = DetectorConfig {
            method,
            params: args.engine.params(),
            selection: args.selection.selection(),
            trace: false,
        };
        let det = detect(&ds, &config).with_context(|| format!("method {method}"))?;
        table.push([method.to_string(), auc(&det.scores.score, labels)?.to_string()]);
    }
    args.output.emit(&table)
}

fn run_graph_stats(args: &GraphStatsArgs) -> Result<()> {
    let (ds, _) = preprocess(args.input.load()?)?;
    let stats = compute_stats(&ds);
    let delta = factors::intra_outlierness(&stats)?;
    let nf = stats.value_features();
    let graphs = [
        ("cbrw", value_graph::build_cbrw_graph(&delta, &factors::conditional_influence(&stats), nf)?),
        ("sdrw", value_graph::build_sdrw_graph(&delta, &factors::lift_influence(&stats, LiftScaling::Support), nf)?),
    ];
    let mut table = Table::new(["graph", "nodes", "edges", "diameter", "clustering_coefficient"]).text(["graph", "diameter"]);
    for (name, g) in &graphs {
        let s = value_graph::graph_stats(g, args.node_cap)?;
        table.push([
            name.to_string(),
            g.n_nodes().to_string(),
            g.n_edges().to_string(),
            s.diameter.to_string(),
            s.clustering_coefficient.to_string(),
        ]);
    }
    args.output.emit(&table)
}

fn run_gen(args: &GenArgs) -> Result<()> {
    let cfg = SyntheticConfig {
        n_objects: args.n_objects,
        n_relevant: args.n_relevant,
        n_noisy: args.n_noisy,
        n_outliers: args.n_outliers,
        coupling_strength: args.coupling,
        n_normal_values: args.n_normal_values,
        seed: args.seed,
    };
    write_dataset(args.output.as_deref(), &generate_synthetic(&cfg)?)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Detect(a) => run_detect(a),
        Command::Select(a) => run_select(a),
        Command::Indicators(a) => run_indicators(a),
        Command::Eval(a) => run_eval(a),
        Command::GraphStats(a) => run_graph_stats(a),
        Command::Gen(a) => run_gen(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
