//! Command-line front end: counting and enumeration reports, colouring
//! classification, a lattice calculator, model fitting, dual inspection and
//! full search runs.
//!
//! The dispatcher is single threaded. Parallelism lives inside the invoked
//! library operations; the `search` subcommand bounds it with `--jobs`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classes::{classification_counts, classify, in_class, sup, ModelClass};
use crate::gaussian::{fit_rcon, fit_to_json, Divisor, GaussianData, RconFit};
use crate::graph::{enumerate_coloured_graphs, ClassId, ColouredGraph, Label};
use crate::partition::model_count;
use crate::search::{dual_set, eh_search, Direction, ModelSet, Reduction, SearchTest, SearchTrace};

/// Report format.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Key-sorted JSON, stable across runs.
    Json,
    /// Human-readable text.
    Text,
}

/// Parsed command line: the global options plus one subcommand.
#[derive(Debug, Parser)]
#[command(
    name = "symlat",
    version,
    about = "Graphical Gaussian models with equality constraints from graph colourings"
)]
pub struct RunConfig {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Reorder graph files into canonical form instead of rejecting them.
    #[arg(long, global = true)]
    pub normalize: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// One CLI operation.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the coloured graphs on n vertices.
    Count {
        /// Number of vertices.
        #[arg(long)]
        n: usize,
    },
    /// List the coloured graphs on n vertices.
    Enumerate {
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        /// Restrict to one class: B, P, R or Pi.
        #[arg(long, default_value = "all")]
        class: String,
        /// Print only how many graphs matched.
        #[arg(long)]
        count_only: bool,
    },
    /// Classify one graph file, or summarise all classes on n vertices.
    Classify {
        /// Graph file to classify.
        graph: Option<PathBuf>,
        /// Census size; use together with --summary.
        #[arg(long, conflicts_with = "graph", requires = "summary")]
        n: Option<usize>,
        /// Print the class census for --n vertices.
        #[arg(long, requires = "n")]
        summary: bool,
    },
    /// Greatest lower bound of two graphs.
    Meet {
        /// Left graph file.
        a: PathBuf,
        /// Right graph file.
        b: PathBuf,
    },
    /// Least upper bound of two graphs.
    Join {
        /// Left graph file.
        a: PathBuf,
        /// Right graph file.
        b: PathBuf,
    },
    /// Smallest refinement of a graph inside a class.
    Sup {
        /// Target class: B, P, R or Pi.
        #[arg(long)]
        class: String,
        /// Graph file.
        graph: PathBuf,
    },
    /// Maximum-likelihood fit of one model.
    Fit {
        /// Raw data CSV with named columns.
        #[arg(long, conflicts_with = "cov", required_unless_present = "cov")]
        data: Option<PathBuf>,
        /// Covariance CSV with named columns; needs --n.
        #[arg(long, requires = "n")]
        cov: Option<PathBuf>,
        /// Observation count behind a covariance matrix.
        #[arg(long)]
        n: Option<usize>,
        /// Covariance divisor: n or n-1.
        #[arg(long, default_value = "n-1")]
        divisor: String,
        /// Graph file.
        graph: PathBuf,
    },
    /// Dual model set of one graph.
    Duals {
        /// Class lattice: B or Pi.
        #[arg(long)]
        class: String,
        /// a (acceptance) or r (rejection).
        #[arg(long)]
        direction: String,
        /// Graph file.
        graph: PathBuf,
        /// Data CSV; adds a fit summary for every dual member.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Covariance divisor for --data: n or n-1.
        #[arg(long, default_value = "n-1")]
        divisor: String,
    },
    /// Stepwise model selection over a class lattice.
    Search {
        /// Class lattice: B or Pi.
        #[arg(long)]
        class: String,
        /// Data CSV with named columns.
        #[arg(long)]
        data: PathBuf,
        /// Significance level of the likelihood-ratio test.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Shuffle each stage's candidates with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the stage fits.
        #[arg(long)]
        jobs: Option<usize>,
        /// Covariance divisor: n or n-1.
        #[arg(long, default_value = "n-1")]
        divisor: String,
    },
}

/// Parses `argv` and runs the command. Returns the process exit code:
/// 0 on success, 1 on any input or execution error, 2 when a search
/// flagged a model without a maximum likelihood estimate.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(config) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(config: RunConfig) -> Result<i32, String> {
    let mut sink: Box<dyn Write> = match &config.output {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let code = dispatch(&config, &mut sink)?;
    sink.flush().map_err(|e| e.to_string())?;
    Ok(code)
}

fn dispatch(config: &RunConfig, sink: &mut dyn Write) -> Result<i32, String> {
    match &config.command {
        Command::Count { n } => cmd_count(*n, config.format, sink),
        Command::Enumerate {
            n,
            class,
            count_only,
        } => cmd_enumerate(*n, class, *count_only, config.format, sink),
        Command::Classify { graph, n, summary } => match (graph, n, summary) {
            (Some(path), _, _) => cmd_classify_graph(path, config, sink),
            (None, Some(n), true) => cmd_classify_summary(*n, config.format, sink),
            _ => Err("give a graph file, or --n <k> --summary".into()),
        },
        Command::Meet { a, b } => cmd_meet_join(a, b, true, config, sink),
        Command::Join { a, b } => cmd_meet_join(a, b, false, config, sink),
        Command::Sup { class, graph } => cmd_sup(class, graph, config, sink),
        Command::Fit {
            data,
            cov,
            n,
            divisor,
            graph,
        } => cmd_fit(data.as_deref(), cov.as_deref(), *n, divisor, graph, config, sink),
        Command::Duals {
            class,
            direction,
            graph,
            data,
            divisor,
        } => cmd_duals(class, direction, graph, data.as_deref(), divisor, config, sink),
        Command::Search {
            class,
            data,
            alpha,
            seed,
            jobs,
            divisor,
        } => cmd_search(class, data, *alpha, *seed, *jobs, divisor, config.format, sink),
    }
}

fn int_labels(n: usize) -> Vec<Label> {
    (1..=n as i64).map(Label::Int).collect()
}

/// The fixtures directory: `SYMLAT_FIXTURES` when set, the crate's bundled
/// fixtures otherwise.
fn fixtures_dir() -> PathBuf {
    std::env::var_os("SYMLAT_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

/// Input files resolve as given first, then relative to the fixtures
/// directory, so the bundled datasets work by bare name.
fn resolve_input(path: &Path) -> Result<PathBuf, String> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    let fallback = fixtures_dir().join(path);
    if fallback.exists() {
        return Ok(fallback);
    }
    Err(format!("file not found: {}", path.display()))
}

fn load_graph(path: &Path, normalize: bool) -> Result<ColouredGraph, String> {
    let p = resolve_input(path)?;
    let text = fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
    ColouredGraph::from_json_str(&text, normalize).map_err(|e| format!("{}: {e}", p.display()))
}

fn parse_divisor(s: &str) -> Result<Divisor, String> {
    match s {
        "n-1" => Ok(Divisor::NMinus1),
        "n" => Ok(Divisor::N),
        other => Err(format!("unknown divisor {other:?}; expected n or n-1")),
    }
}

fn load_data(path: &Path, divisor: Divisor) -> Result<GaussianData, String> {
    let p = resolve_input(path)?;
    let file = fs::File::open(&p).map_err(|e| format!("{}: {e}", p.display()))?;
    GaussianData::from_data_csv(file, divisor).map_err(|e| format!("{}: {e}", p.display()))
}

fn parse_class(s: &str) -> Result<ModelClass, String> {
    s.parse::<ModelClass>().map_err(|e| e.to_string())
}

fn write_json(sink: &mut dyn Write, value: &Value) -> Result<(), String> {
    serde_json::to_writer_pretty(&mut *sink, value).map_err(|e| e.to_string())?;
    sink.write_all(b"\n").map_err(|e| e.to_string())
}

fn write_text(sink: &mut dyn Write, text: &str) -> Result<(), String> {
    sink.write_all(text.as_bytes()).map_err(|e| e.to_string())
}

const MARKERS: &[char] = &['*', '+', '#', '~', '^', '@', '%', '&'];

fn marker(i: usize) -> String {
    let base = MARKERS[i % MARKERS.len()];
    match i / MARKERS.len() {
        0 => base.to_string(),
        round => format!("{base}{round}"),
    }
}

/// Renders a colouring as text: one marker per colour class, singleton
/// vertex classes unmarked.
fn render_graph_text(g: &ColouredGraph) -> String {
    let mut out = String::new();
    let vcls = g.vertex_classes_by_label();
    out.push_str("vertices:");
    for v in g.labels() {
        let ci = vcls
            .iter()
            .position(|block| block.contains(v))
            .expect("every vertex is in a class");
        if vcls[ci].len() > 1 {
            write!(out, " {v}{}", marker(ci)).unwrap();
        } else {
            write!(out, " {v}").unwrap();
        }
    }
    out.push('\n');
    let ecls = g.edge_classes_by_label();
    if ecls.is_empty() {
        out.push_str("edges: none\n");
    } else {
        out.push_str("edge classes:\n");
        for (i, block) in ecls.iter().enumerate() {
            let edges: Vec<String> = block.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            writeln!(out, "  {} {}", marker(i), edges.join(", ")).unwrap();
        }
    }
    out
}

fn render_fit_text(g: &ColouredGraph, fit: &RconFit) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "converged: {} in {} iterations",
        if fit.converged { "yes" } else { "no" },
        fit.iterations
    )
    .unwrap();
    writeln!(out, "parameters: {}", fit.num_params).unwrap();
    writeln!(out, "log-likelihood: {:.6}", fit.loglik).unwrap();
    writeln!(
        out,
        "deviance: {:.6} on {} df, p = {:.6}",
        fit.deviance, fit.df, fit.p_value
    )
    .unwrap();
    writeln!(out, "bic: {:.4}", fit.bic).unwrap();
    writeln!(out, "lambda:").unwrap();
    let vcls = g.vertex_classes_by_label();
    let ecls = g.edge_classes_by_label();
    for (id, value) in &fit.lambda {
        let members = match id {
            ClassId::Vertex(i) => vcls[*i]
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            ClassId::EdgeClass(i) => ecls[*i]
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(", "),
        };
        writeln!(out, "  {id} [{members}]: {value:.6}").unwrap();
    }
    out
}

fn cmd_count(n: usize, format: Format, sink: &mut dyn Write) -> Result<i32, String> {
    let count = model_count(n);
    match format {
        Format::Text => write_text(sink, &format!("{count}\n"))?,
        Format::Json => write_json(sink, &json!({"n": n, "count": count.to_string()}))?,
    }
    Ok(0)
}

fn cmd_enumerate(
    n: usize,
    class: &str,
    count_only: bool,
    format: Format,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let filter = match class {
        "all" => None,
        other => Some(parse_class(other)?),
    };
    let iter = enumerate_coloured_graphs(&int_labels(n), false).map_err(|e| e.to_string())?;
    let mut matched: u64 = 0;
    let mut first = true;
    if !count_only && format == Format::Json {
        write_text(sink, "[")?;
    }
    for g in iter {
        if let Some(class) = filter {
            if !in_class(class, &g).map_err(|e| e.to_string())? {
                continue;
            }
        }
        matched += 1;
        if count_only {
            continue;
        }
        match format {
            Format::Text => {
                let line = serde_json::to_string(&g.to_json_value()).map_err(|e| e.to_string())?;
                write_text(sink, &line)?;
                write_text(sink, "\n")?;
            }
            Format::Json => {
                write_text(sink, if first { "\n" } else { ",\n" })?;
                let line = serde_json::to_string(&g.to_json_value()).map_err(|e| e.to_string())?;
                write_text(sink, &line)?;
            }
        }
        first = false;
    }
    if count_only {
        match format {
            Format::Text => write_text(sink, &format!("{matched}\n"))?,
            Format::Json => write_json(sink, &json!({"n": n, "class": class, "count": matched}))?,
        }
    } else if format == Format::Json {
        write_text(sink, "\n]\n")?;
    }
    Ok(0)
}

fn cmd_classify_graph(
    path: &Path,
    config: &RunConfig,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let g = load_graph(path, config.normalize)?;
    let c = classify(&g).map_err(|e| e.to_string())?;
    match config.format {
        Format::Json => write_json(
            sink,
            &json!({
                "edge_regular": c.edge_regular,
                "vertex_regular": c.vertex_regular,
                "regular": c.regular,
                "permutation_generated": c.permutation_generated,
            }),
        )?,
        Format::Text => {
            let yes = |b: bool| if b { "yes" } else { "no" };
            let mut out = render_graph_text(&g);
            writeln!(out, "edge regular (B): {}", yes(c.edge_regular)).unwrap();
            writeln!(out, "vertex regular (P): {}", yes(c.vertex_regular)).unwrap();
            writeln!(out, "regular (R): {}", yes(c.regular)).unwrap();
            writeln!(out, "permutation generated (Pi): {}", yes(c.permutation_generated))
                .unwrap();
            write_text(sink, &out)?;
        }
    }
    Ok(0)
}

fn cmd_classify_summary(n: usize, format: Format, sink: &mut dyn Write) -> Result<i32, String> {
    let counts = classification_counts(&int_labels(n), false).map_err(|e| e.to_string())?;
    match format {
        Format::Json => write_json(
            sink,
            &json!({
                "n": n,
                "total": counts.total,
                "edge_regular": counts.edge_regular,
                "vertex_regular": counts.vertex_regular,
                "regular": counts.regular,
                "permutation_generated": counts.permutation_generated,
            }),
        )?,
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "colourings of {n} vertices: {}", counts.total).unwrap();
            writeln!(out, "edge regular (B): {}", counts.edge_regular).unwrap();
            writeln!(out, "vertex regular (P): {}", counts.vertex_regular).unwrap();
            writeln!(out, "regular (R): {}", counts.regular).unwrap();
            writeln!(out, "permutation generated (Pi): {}", counts.permutation_generated)
                .unwrap();
            write_text(sink, &out)?;
        }
    }
    Ok(0)
}

fn write_graph_report(
    g: &ColouredGraph,
    format: Format,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    match format {
        Format::Json => write_json(sink, &g.to_json_value())?,
        Format::Text => write_text(sink, &render_graph_text(g))?,
    }
    Ok(0)
}

fn cmd_meet_join(
    a: &Path,
    b: &Path,
    is_meet: bool,
    config: &RunConfig,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let ga = load_graph(a, config.normalize)?;
    let gb = load_graph(b, config.normalize)?;
    let result = if is_meet { ga.meet(&gb) } else { ga.join(&gb) };
    write_graph_report(&result.map_err(|e| e.to_string())?, config.format, sink)
}

fn cmd_sup(
    class: &str,
    graph: &Path,
    config: &RunConfig,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let class = parse_class(class)?;
    let g = load_graph(graph, config.normalize)?;
    let s = sup(class, &g).map_err(|e| e.to_string())?;
    write_graph_report(&s, config.format, sink)
}

fn cmd_fit(
    data: Option<&Path>,
    cov: Option<&Path>,
    n: Option<usize>,
    divisor: &str,
    graph: &Path,
    config: &RunConfig,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let divisor = parse_divisor(divisor)?;
    let data = match (data, cov) {
        (Some(path), None) => load_data(path, divisor)?,
        (None, Some(path)) => {
            let n = n.ok_or("--cov needs --n, the observation count")?;
            let p = resolve_input(path)?;
            let file = fs::File::open(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            GaussianData::from_cov_csv(file, n, divisor)
                .map_err(|e| format!("{}: {e}", p.display()))?
        }
        _ => return Err("give exactly one of --data or --cov".into()),
    };
    let g = load_graph(graph, config.normalize)?;
    let fit = fit_rcon(&g, &data).map_err(|e| e.to_string())?;
    match config.format {
        Format::Json => write_json(sink, &fit_to_json(&fit))?,
        Format::Text => write_text(sink, &render_fit_text(&g, &fit))?,
    }
    Ok(0)
}

fn cmd_duals(
    class: &str,
    direction: &str,
    graph: &Path,
    data: Option<&Path>,
    divisor: &str,
    config: &RunConfig,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let class = parse_class(class)?;
    let direction: Direction = direction.parse()?;
    let g = load_graph(graph, config.normalize)?;
    let input = ModelSet::from_models(Reduction::Minimal, [g]).map_err(|e| e.to_string())?;
    let duals = dual_set(class, &input, direction).map_err(|e| e.to_string())?;
    let data = match data {
        Some(path) => Some(load_data(path, parse_divisor(divisor)?)?),
        None => None,
    };
    let fit_of = |m: &ColouredGraph| -> Result<Option<RconFit>, String> {
        match &data {
            None => Ok(None),
            Some(data) => match fit_rcon(m, data) {
                Ok(fit) => Ok(Some(fit)),
                Err(e) => {
                    use crate::gaussian::GaussianError::*;
                    match e {
                        NonexistentMle(_) | NotConverged(_) | Numerical(_) => Ok(None),
                        other => Err(other.to_string()),
                    }
                }
            },
        }
    };
    match config.format {
        Format::Json => {
            let mut members = Vec::new();
            for m in duals.members() {
                let mut entry = serde_json::Map::new();
                entry.insert("graph".into(), m.to_json_value());
                if data.is_some() {
                    let fit = fit_of(m)?;
                    entry.insert("fit".into(), fit.as_ref().map(fit_to_json).unwrap_or(Value::Null));
                }
                members.push(Value::Object(entry));
            }
            write_json(
                sink,
                &json!({
                    "class": class.to_string(),
                    "direction": direction.to_string(),
                    "members": members,
                }),
            )?;
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "{direction} dual over {class}: {} members", duals.len()).unwrap();
            for m in duals.members() {
                match fit_of(m)? {
                    Some(fit) => writeln!(
                        out,
                        "bic={:.4} p_value={:.4} {}",
                        fit.bic,
                        fit.p_value,
                        serde_json::to_string(&m.to_json_value()).map_err(|e| e.to_string())?
                    )
                    .unwrap(),
                    None => {
                        if data.is_some() {
                            out.push_str("no fit ");
                        }
                        writeln!(
                            out,
                            "{}",
                            serde_json::to_string(&m.to_json_value()).map_err(|e| e.to_string())?
                        )
                        .unwrap();
                    }
                }
            }
            write_text(sink, &out)?;
        }
    }
    Ok(0)
}

fn render_search_text(trace: &SearchTrace) -> String {
    let mut out = String::new();
    writeln!(out, "search over {}", trace.class).unwrap();
    for (i, (tested, accepted)) in trace.stage_summary().iter().enumerate() {
        writeln!(out, "stage {}: tested {tested}, accepted {accepted}", i + 1).unwrap();
    }
    writeln!(out, "models fitted: {}", trace.models_fitted).unwrap();
    if trace.nonexistent_mle > 0 {
        writeln!(out, "flagged without an estimate: {}", trace.nonexistent_mle).unwrap();
    }
    writeln!(out, "minimal accepted models: {}", trace.final_accepted.len()).unwrap();
    for record in &trace.final_accepted {
        match &record.fit {
            Some(fit) => writeln!(
                out,
                "- bic {:.4}, {} parameters, p {:.4}",
                fit.bic, fit.num_params, fit.p_value
            )
            .unwrap(),
            None => writeln!(out, "- accepted without a fit").unwrap(),
        }
        for line in render_graph_text(&record.graph).lines() {
            writeln!(out, "  {line}").unwrap();
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    class: &str,
    data: &Path,
    alpha: f64,
    seed: Option<u64>,
    jobs: Option<usize>,
    divisor: &str,
    format: Format,
    sink: &mut dyn Write,
) -> Result<i32, String> {
    let class = parse_class(class)?;
    let data = load_data(data, parse_divisor(divisor)?)?;
    let test = SearchTest::Lrt { alpha };
    let run = || eh_search(class, data.names(), &test, Some(&data), seed);
    let trace = match jobs {
        None => run(),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| e.to_string())?
            .install(run),
    }
    .map_err(|e| e.to_string())?;
    match format {
        Format::Json => write_json(sink, &trace.to_json_value())?,
        Format::Text => write_text(sink, &render_search_text(&trace))?,
    }
    Ok(if trace.nonexistent_mle > 0 { 2 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report");
        let mut argv: Vec<String> = vec!["symlat".into()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.push("--output".into());
        argv.push(out.display().to_string());
        let code = run(argv);
        let report = fs::read_to_string(&out).unwrap_or_default();
        (code, report)
    }

    fn write_graph(dir: &Path, name: &str, g: &ColouredGraph) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, g.to_json_string()).unwrap();
        path
    }

    fn sample_graph() -> ColouredGraph {
        ColouredGraph::new(
            int_labels(4),
            vec![
                vec![Label::Int(1), Label::Int(3)],
                vec![Label::Int(2), Label::Int(4)],
            ],
            vec![
                vec![(Label::Int(1), Label::Int(2)), (Label::Int(3), Label::Int(4))],
                vec![(Label::Int(1), Label::Int(4)), (Label::Int(2), Label::Int(3))],
            ],
        )
        .unwrap()
    }

    #[test]
    fn count_prints_the_model_count() {
        let (code, report) = run_capture(&["count", "--n", "4"]);
        assert_eq!(code, 0);
        assert_eq!(report.trim(), "13155");
        let (code, report) = run_capture(&["count", "--n", "4", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["count"], json!("13155"));
    }

    #[test]
    fn enumerate_counts_and_filters() {
        let (code, report) = run_capture(&["enumerate", "--n", "3", "--count-only"]);
        assert_eq!(code, 0);
        assert_eq!(report.trim(), "75");
        let (code, report) = run_capture(&[
            "enumerate",
            "--n",
            "3",
            "--class",
            "B",
            "--count-only",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["class"], json!("B"));
        let (code, report) = run_capture(&["enumerate", "--n", "2", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 4);
    }

    #[test]
    fn classify_reports_summary_and_single_graphs() {
        let (code, report) = run_capture(&["classify", "--n", "3", "--summary", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["total"], json!(75));

        let dir = tempfile::tempdir().unwrap();
        let path = write_graph(dir.path(), "g.json", &sample_graph());
        let (code, report) = run_capture(&["classify", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["edge_regular"], json!(true));

        let (code, _) = run_capture(&["classify"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn meet_join_and_sup_emit_reparseable_graphs() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_graph(dir.path(), "a.json", &sample_graph());
        let unit = ColouredGraph::unit(int_labels(4)).unwrap();
        let b = write_graph(dir.path(), "b.json", &unit);
        for sub in ["meet", "join"] {
            let (code, report) = run_capture(&[
                sub,
                a.to_str().unwrap(),
                b.to_str().unwrap(),
                "--format",
                "json",
            ]);
            assert_eq!(code, 0);
            let parsed = ColouredGraph::from_json_str(&report, false).unwrap();
            let expected = if sub == "meet" { sample_graph() } else { unit.clone() };
            assert_eq!(parsed, expected);
        }
        let (code, report) = run_capture(&[
            "sup",
            "--class",
            "Pi",
            a.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let parsed = ColouredGraph::from_json_str(&report, false).unwrap();
        assert!(in_class(ModelClass::Pi, &parsed).unwrap());
    }

    #[test]
    fn strict_parsing_rejects_unordered_files_unless_normalized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        fs::write(
            &path,
            r#"{"vertices": [2, 1], "vertex_classes": [[1], [2]], "edge_classes": []}"#,
        )
        .unwrap();
        let (code, _) = run_capture(&["classify", path.to_str().unwrap()]);
        assert_eq!(code, 1);
        let (code, _) = run_capture(&["classify", path.to_str().unwrap(), "--normalize"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn fit_reports_the_reference_statistics() {
        if !fixtures_dir().join("frets.csv").exists() {
            println!("SKIP: fixture frets.csv not found");
            return;
        }
        let dir = tempfile::tempdir().unwrap();
        let t = |s: &str| Label::Text(s.into());
        let h9 = ColouredGraph::new(
            ["B1", "B2", "L1", "L2"].iter().map(|s| t(s)).collect(),
            vec![vec![t("B1"), t("B2")], vec![t("L1"), t("L2")]],
            vec![vec![
                (t("B1"), t("L1")),
                (t("B1"), t("L2")),
                (t("B2"), t("L1")),
                (t("B2"), t("L2")),
            ]],
        )
        .unwrap();
        let path = write_graph(dir.path(), "h9.json", &h9);
        let (code, report) = run_capture(&[
            "fit",
            "--data",
            "frets.csv",
            path.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert!((v["bic"].as_f64().unwrap() - 447.5655).abs() < 1e-3);
        assert_eq!(v["p"], json!(3));
        assert_eq!(v["converged"], json!(true));
    }

    #[test]
    fn duals_list_members_in_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let unit = ColouredGraph::unit(int_labels(4)).unwrap();
        let path = write_graph(dir.path(), "unit.json", &unit);
        let (code, report) = run_capture(&[
            "duals",
            "--class",
            "B",
            "--direction",
            "r",
            path.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        let members = v["members"].as_array().unwrap();
        assert_eq!(members.len(), 12);
        for m in members {
            ColouredGraph::from_json_value(&m["graph"], false).unwrap();
        }
        let (code, report) = run_capture(&[
            "duals",
            "--class",
            "B",
            "--direction",
            "accept",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(report.starts_with("accept dual over B: 0 members"));
    }

    #[test]
    fn search_emits_a_trace_and_exit_code() {
        if !fixtures_dir().join("frets.csv").exists() {
            println!("SKIP: fixture frets.csv not found");
            return;
        }
        let (code, report) = run_capture(&[
            "search",
            "--class",
            "Pi",
            "--data",
            "frets.csv",
            "--jobs",
            "2",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["final_accepted"].as_array().unwrap().len(), 9);
        assert_eq!(v["stages"].as_array().unwrap().len(), 4);

        let (code, report) = run_capture(&["search", "--class", "Pi", "--data", "frets.csv"]);
        assert_eq!(code, 0);
        assert!(report.contains("minimal accepted models: 9"));
    }

    #[test]
    fn bad_inputs_exit_one_with_a_message() {
        let (code, _) = run_capture(&["sup", "--class", "Q", "missing.json"]);
        assert_eq!(code, 1);
        let (code, _) = run_capture(&["meet", "nope.json", "nope.json"]);
        assert_eq!(code, 1);
        let (code, _) = run_capture(&["search", "--class", "R", "--data", "frets.csv"]);
        assert_eq!(code, 1);
        let (code, _) = run_capture(&[
            "search",
            "--class",
            "Pi",
            "--data",
            "frets.csv",
            "--alpha",
            "2.0",
        ]);
        assert_eq!(code, 1);
    }
}
