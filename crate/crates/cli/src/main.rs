mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::ToPrimitive;
use rayon::prelude::*;

use chipfire::enumerate::{self, Modes, SweepRecord};
use chipfire::quasipoly;
use chipfire::reach::{self, Limits, ResidueClassifier, ResidueLabel};
use chipfire::{Graph, GraphSpec, Int, IntConfiguration, IntQuasipolynomial};

/// Error carrying the process exit code.
///
/// Codes: 0 success, 1 verification failure, 2 usage or parse error,
/// 3 resource guard tripped.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<chipfire::Error> for Failure {
    fn from(err: chipfire::Error) -> Self {
        let code = if err.is_resource_limit() { 3 } else { 2 };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "chipfire",
    version,
    about = "Chip-firing reachability, counting, and quasipolynomial fitting on finite graphs"
)]
struct Cli {
    /// Cap on BFS states (overrides the CHIPFIRE_MAX_STATES environment variable)
    #[arg(long, global = true)]
    max_states: Option<u64>,

    /// Cap on enumerated configurations per counting call
    #[arg(long, global = true)]
    max_compositions: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count configurations debt-reachable or legally reachable from a source
    Count {
        /// Graph: cycle:N, path:N, complete:N, or file:PATH (JSON)
        #[arg(long)]
        graph: String,
        /// Source configuration, e.g. 3,0,0
        #[arg(long)]
        source: String,
        #[arg(long, value_enum)]
        mode: CountMode,
    },
    /// Tabulate counts for every total c in a range
    Sweep(SweepArgs),
    /// Fit or search for an exact quasipolynomial law over a count sequence
    Fit(FitArgs),
    /// Partition all configurations with total c into debt-reachability blocks
    Blocks {
        #[arg(long)]
        graph: String,
        /// Total chip count
        #[arg(long)]
        c: u64,
        /// Also list the configurations in each block
        #[arg(long)]
        list: bool,
    },
    /// Run a named verification bundle; exit 0 iff every check passes
    Verify(verify::VerifyArgs),
    /// Print the number of spanning trees
    SpanningTrees {
        #[arg(long)]
        graph: String,
    },
    /// Decide both debt-reachability (with witness) and legal reachability
    /// between two configurations
    Reachability {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Also run the exhaustive BFS oracle and fail if it disagrees
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMode {
    Debt,
    Reachable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
    Human,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: String,
    /// Vertex that holds all c chips in the source configuration
    #[arg(long, default_value_t = 0)]
    source_vertex: usize,
    #[arg(long)]
    cmin: u64,
    #[arg(long)]
    cmax: u64,
    /// Comma-separated subset of debt,reachable,blocks
    #[arg(long, default_value = "debt")]
    modes: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for evaluating distinct c values (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Fill the seconds column with wall-clock timings. Off by default so
    /// that identical runs produce byte-identical output.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct FitArgs {
    /// CSV file of "c,count" rows (a "c,count" header line is allowed)
    #[arg(long)]
    values: Option<PathBuf>,
    /// Compute the values by sweeping this graph instead of reading a file
    #[arg(long, conflicts_with = "values")]
    graph: Option<String>,
    #[arg(long, default_value_t = 0)]
    source_vertex: usize,
    #[arg(long)]
    cmin: Option<u64>,
    #[arg(long)]
    cmax: Option<u64>,
    /// Which count to sweep when --graph is given
    #[arg(long, value_enum, default_value_t = CountMode::Debt)]
    mode: CountMode,
    /// Fit exactly this period (requires --degree)
    #[arg(long)]
    period: Option<u64>,
    /// Fit exactly this degree (requires --period)
    #[arg(long)]
    degree: Option<usize>,
    /// First c the law must hold from (explicit fit only)
    #[arg(long, default_value_t = 0)]
    onset: u64,
    /// Search bound on the period (default: spanning-tree count of the
    /// graph, or 12 for file input)
    #[arg(long)]
    max_period: Option<u64>,
    /// Search bound on the degree (default: vertex count, or 6 for file input)
    #[arg(long)]
    max_degree: Option<usize>,
    /// Search bound on the onset (default: smallest c in the data plus 8)
    #[arg(long)]
    max_onset: Option<u64>,
    #[arg(long, value_enum, default_value_t = FitFormat::Human)]
    format: FitFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitFormat {
    Human,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let limits = resolve_limits(cli.max_states, cli.max_compositions)?;
    match cli.command {
        Command::Count {
            graph,
            source,
            mode,
        } => cmd_count(&graph, &source, mode, &limits),
        Command::Sweep(args) => cmd_sweep(args, &limits),
        Command::Fit(args) => cmd_fit(args, &limits),
        Command::Blocks { graph, c, list } => cmd_blocks(&graph, c, list, &limits),
        Command::Verify(args) => verify::cmd_verify(args, &limits),
        Command::SpanningTrees { graph } => {
            let g = load_graph(&graph)?;
            println!("{}", g.spanning_tree_count::<Int>());
            Ok(())
        }
        Command::Reachability {
            graph,
            from,
            to,
            oracle,
        } => cmd_reachability(&graph, &from, &to, oracle, &limits),
    }
}

fn resolve_limits(max_states: Option<u64>, max_compositions: Option<u64>) -> CliResult<Limits> {
    let mut limits = Limits::default();
    if let Ok(text) = std::env::var("CHIPFIRE_MAX_STATES") {
        limits.max_states = text.parse().map_err(|_| {
            Failure::usage(format!(
                "CHIPFIRE_MAX_STATES must be a nonnegative integer, got {text:?}"
            ))
        })?;
    }
    if let Some(v) = max_states {
        limits.max_states = v;
    }
    if let Some(v) = max_compositions {
        limits.max_compositions = v;
    }
    Ok(limits)
}

pub fn load_graph(spec: &str) -> CliResult<Graph> {
    let parsed: GraphSpec = spec.parse()?;
    Ok(parsed.build()?)
}

fn parse_config(text: &str, g: &Graph) -> CliResult<IntConfiguration> {
    let config: IntConfiguration = text.parse()?;
    config.check_graph(g)?;
    Ok(config)
}

fn cmd_count(graph: &str, source: &str, mode: CountMode, limits: &Limits) -> CliResult<()> {
    let g = load_graph(graph)?;
    let from = parse_config(source, &g)?;
    let count = match mode {
        CountMode::Debt => enumerate::count_debt_reachable(&g, &from, limits)?,
        CountMode::Reachable => enumerate::count_reachable(&g, &from, limits)?,
    };
    println!("{count}");
    Ok(())
}

fn parse_modes(text: &str) -> CliResult<Modes> {
    let mut modes = Modes::default();
    for part in text.split(',') {
        match part.trim() {
            "debt" => modes.debt = true,
            "reachable" => modes.reachable = true,
            "blocks" => modes.blocks = true,
            other => {
                return Err(Failure::usage(format!(
                    "unknown mode {other:?}; expected a comma-separated subset of debt,reachable,blocks"
                )))
            }
        }
    }
    if !modes.any() {
        return Err(Failure::usage("at least one mode is required"));
    }
    Ok(modes)
}

fn cmd_sweep(args: SweepArgs, limits: &Limits) -> CliResult<()> {
    let g = load_graph(&args.graph)?;
    g.check_vertex(args.source_vertex)?;
    if args.cmin > args.cmax {
        return Err(Failure::usage(format!(
            "empty sweep range: cmin {} > cmax {}",
            args.cmin, args.cmax
        )));
    }
    let modes = parse_modes(&args.modes)?;
    let records = parallel_sweep(&g, args.source_vertex, args.cmin, args.cmax, modes, limits, args.jobs)?;
    let rendered = match args.format {
        Format::Csv => render_csv(&records, args.timings),
        Format::Jsonl => render_jsonl(&records, args.timings),
        Format::Human => render_human(&records, modes, args.timings),
    };
    emit(&rendered, args.out.as_deref())
}

/// Evaluates distinct c values concurrently; rows come back in c order
/// regardless of completion order, so output bytes do not depend on --jobs.
fn parallel_sweep(
    g: &Graph,
    source: usize,
    cmin: u64,
    cmax: u64,
    modes: Modes,
    limits: &Limits,
    jobs: Option<usize>,
) -> CliResult<Vec<SweepRecord<Int>>> {
    let work = || {
        (cmin..=cmax)
            .into_par_iter()
            .map(|c| enumerate::sweep_one::<Int>(g, source, c, modes, limits))
            .collect::<Result<Vec<_>, chipfire::Error>>()
    };
    let records = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::usage(format!("bad --jobs value: {e}")))?
            .install(work),
        None => work(),
    }?;
    Ok(records)
}

fn opt_string<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(T::to_string).unwrap_or_default()
}

fn seconds_field(record: &SweepRecord<Int>, timings: bool) -> String {
    if timings {
        format!("{:.6}", record.seconds)
    } else {
        String::new()
    }
}

fn render_csv(records: &[SweepRecord<Int>], timings: bool) -> String {
    let mut out = String::from("c,debt_count,reachable_count,block_count,seconds\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.c,
            opt_string(&r.debt_count),
            opt_string(&r.reachable_count),
            opt_string(&r.block_count),
            seconds_field(r, timings),
        ));
    }
    out
}

fn render_jsonl(records: &[SweepRecord<Int>], timings: bool) -> String {
    // counts are serialized as JSON strings: they are arbitrary-precision
    // integers and must survive consumers that parse numbers as f64
    let mut out = String::new();
    for r in records {
        let quoted = |v: &Option<Int>| match v {
            Some(n) => format!("\"{n}\""),
            None => "null".to_string(),
        };
        let blocks = match r.block_count {
            Some(b) => b.to_string(),
            None => "null".to_string(),
        };
        let seconds = if timings {
            format!("{:.6}", r.seconds)
        } else {
            "null".to_string()
        };
        out.push_str(&format!(
            "{{\"c\":{},\"debt_count\":{},\"reachable_count\":{},\"block_count\":{},\"seconds\":{}}}\n",
            r.c,
            quoted(&r.debt_count),
            quoted(&r.reachable_count),
            blocks,
            seconds,
        ));
    }
    out
}

fn render_human(records: &[SweepRecord<Int>], modes: Modes, timings: bool) -> String {
    let mut columns: Vec<(&str, Vec<String>)> = vec![(
        "c",
        records.iter().map(|r| r.c.to_string()).collect(),
    )];
    if modes.debt {
        columns.push((
            "debt",
            records.iter().map(|r| opt_string(&r.debt_count)).collect(),
        ));
    }
    if modes.reachable {
        columns.push((
            "reachable",
            records
                .iter()
                .map(|r| opt_string(&r.reachable_count))
                .collect(),
        ));
    }
    if modes.blocks {
        columns.push((
            "blocks",
            records.iter().map(|r| opt_string(&r.block_count)).collect(),
        ));
    }
    if timings {
        columns.push((
            "seconds",
            records.iter().map(|r| format!("{:.6}", r.seconds)).collect(),
        ));
    }
    let widths: Vec<usize> = columns
        .iter()
        .map(|(header, cells)| {
            cells
                .iter()
                .map(String::len)
                .chain(std::iter::once(header.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (i, (header, _)) in columns.iter().enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        out.push_str(&format!("{:>width$}", header, width = widths[i]));
    }
    out.push('\n');
    for row in 0..records.len() {
        for (i, (_, cells)) in columns.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{:>width$}", cells[row], width = widths[i]));
        }
        out.push('\n');
    }
    out
}

fn emit(rendered: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, rendered).map_err(|e| Failure {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn cmd_blocks(graph: &str, c: u64, list: bool, limits: &Limits) -> CliResult<()> {
    let g = load_graph(graph)?;
    let partition = reach::block_partition::<Int>(&g, c, limits)?;
    println!("c: {c}");
    println!("blocks: {}", partition.block_count());
    let sizes: Vec<String> = partition
        .blocks
        .iter()
        .map(|(_, size)| size.to_string())
        .collect();
    println!("sizes: {}", sizes.join(","));
    if list {
        let classifier = ResidueClassifier::<Int>::new(&g);
        let mut groups: BTreeMap<ResidueLabel<Int>, Vec<String>> = BTreeMap::new();
        for config in enumerate::all_configurations::<Int>(g.vertex_count(), c) {
            groups
                .entry(classifier.label(&config))
                .or_default()
                .push(config.to_string());
        }
        for (index, (_, members)) in groups.iter().enumerate() {
            println!("block {index}: {}", members.join(" "));
        }
    }
    Ok(())
}

fn cmd_reachability(
    graph: &str,
    from: &str,
    to: &str,
    oracle: bool,
    limits: &Limits,
) -> CliResult<()> {
    let g = load_graph(graph)?;
    let from = parse_config(from, &g)?;
    let to = parse_config(to, &g)?;
    match reach::debt_reachability_vector(&g, &from, &to) {
        Some(witness) => {
            println!("debt-reachable: yes");
            println!("witness: {witness}");
        }
        None => println!("debt-reachable: no"),
    }
    let legal = reach::is_reachable(&g, &from, &to);
    println!("reachable: {}", if legal { "yes" } else { "no" });
    if oracle {
        let via_bfs = reach::is_reachable_bfs(&g, &from, &to, limits)?;
        println!("bfs-oracle: {}", if via_bfs { "yes" } else { "no" });
        if via_bfs != legal {
            return Err(Failure::verification(
                "greedy decision and BFS oracle disagree",
            ));
        }
    }
    Ok(())
}

fn read_values_file(path: &Path) -> CliResult<BTreeMap<u64, Int>> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::usage(format!("cannot read {}: {e}", path.display()))
    })?;
    let mut values = BTreeMap::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (c_text, count_text) = (
            fields.next().unwrap_or("").trim(),
            fields.next().unwrap_or("").trim(),
        );
        if line_no == 0 && c_text.parse::<u64>().is_err() {
            continue; // header row
        }
        let c: u64 = c_text.parse().map_err(|_| {
            Failure::usage(format!("line {}: bad c value {c_text:?}", line_no + 1))
        })?;
        let count: Int = count_text.parse().map_err(|_| {
            Failure::usage(format!(
                "line {}: bad count value {count_text:?}",
                line_no + 1
            ))
        })?;
        if values.insert(c, count).is_some() {
            return Err(Failure::usage(format!("duplicate c value {c}")));
        }
    }
    if values.is_empty() {
        return Err(Failure::usage(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(values)
}

fn collect_fit_values(
    args: &FitArgs,
    limits: &Limits,
) -> CliResult<(BTreeMap<u64, Int>, Option<Graph>)> {
    if let Some(path) = &args.values {
        return Ok((read_values_file(path)?, None));
    }
    let Some(spec) = &args.graph else {
        return Err(Failure::usage("either --values FILE or --graph is required"));
    };
    let (Some(cmin), Some(cmax)) = (args.cmin, args.cmax) else {
        return Err(Failure::usage("--graph input requires --cmin and --cmax"));
    };
    if cmin > cmax {
        return Err(Failure::usage(format!(
            "empty sweep range: cmin {cmin} > cmax {cmax}"
        )));
    }
    let g = load_graph(spec)?;
    g.check_vertex(args.source_vertex)?;
    let counts = (cmin..=cmax)
        .into_par_iter()
        .map(|c| {
            let from = IntConfiguration::concentrated(
                g.vertex_count(),
                args.source_vertex,
                Int::from(c),
            )
            .expect("source vertex checked");
            let count = match args.mode {
                CountMode::Debt => enumerate::count_debt_reachable(&g, &from, limits),
                CountMode::Reachable => enumerate::count_reachable(&g, &from, limits),
            }?;
            Ok((c, count))
        })
        .collect::<Result<Vec<_>, chipfire::Error>>()?;
    Ok((counts.into_iter().collect(), Some(g)))
}

fn cmd_fit(args: FitArgs, limits: &Limits) -> CliResult<()> {
    let (values, graph) = collect_fit_values(&args, limits)?;
    let fitted: IntQuasipolynomial = match (args.period, args.degree) {
        (Some(period), Some(degree)) => {
            match quasipoly::fit_quasipolynomial(&values, period, degree, args.onset) {
                Ok(Some(q)) => q,
                Ok(None) => {
                    return Err(Failure::verification(
                        "no quasipolynomial of the requested shape fits the data",
                    ))
                }
                Err(err @ chipfire::Error::InsufficientSamples { .. }) => {
                    return Err(Failure::usage(err.to_string()))
                }
                Err(err) => return Err(err.into()),
            }
        }
        (None, None) => {
            let max_period = args.max_period.unwrap_or_else(|| {
                graph
                    .as_ref()
                    .and_then(|g| g.spanning_tree_count::<Int>().to_u64())
                    .unwrap_or(12)
            });
            let max_degree = args
                .max_degree
                .unwrap_or_else(|| graph.as_ref().map_or(6, Graph::vertex_count));
            let data_min = *values.keys().next().expect("values checked nonempty");
            let max_onset = args.max_onset.unwrap_or(data_min + 8);
            quasipoly::detect_quasipolynomial(&values, max_period, max_degree, max_onset)
                .ok_or_else(|| {
                    Failure::verification("no quasipolynomial law found on the search grid")
                })?
        }
        _ => {
            return Err(Failure::usage(
                "--period and --degree must be given together (or neither, to search)",
            ))
        }
    };
    // The leading-coefficient law applies to debt-reachable sweeps, where
    // the graph is known.
    let leading = match (&graph, args.mode) {
        (Some(g), CountMode::Debt) if args.values.is_none() => {
            Some(quasipoly::leading_coefficient_check(&fitted, g))
        }
        _ => None,
    };
    match args.format {
        FitFormat::Human => print_fit_human(&fitted, leading),
        FitFormat::Json => println!("{}", fit_report_json(&fitted, leading)),
    }
    Ok(())
}

fn print_fit_human(q: &IntQuasipolynomial, leading: Option<bool>) {
    println!("period: {}", q.period());
    println!("degree: {}", q.degree());
    println!("onset: {}", q.onset());
    for residue in 0..q.period() {
        println!(
            "c \u{2261} {residue} (mod {}): {}",
            q.period(),
            q.branch_display(residue)
        );
    }
    if let Some(ok) = leading {
        println!(
            "leading coefficient 1/((n-1)!\u{00b7}\u{03ba}): {}",
            if ok { "ok" } else { "MISMATCH" }
        );
    }
}

fn fit_report_json(q: &IntQuasipolynomial, leading: Option<bool>) -> String {
    let mut residues = Vec::with_capacity(q.period() as usize);
    for (residue, branch) in q.coefficients().iter().enumerate() {
        let pairs: Vec<String> = branch
            .iter()
            .map(|coeff| format!("[{},{}]", coeff.numer(), coeff.denom()))
            .collect();
        residues.push(format!(
            "{{\"residue\":{},\"coefficients\":[{}],\"branch\":{}}}",
            residue,
            pairs.join(","),
            serde_json::to_string(&q.branch_display(residue as u64)).expect("string encodes"),
        ));
    }
    let leading_field = match leading {
        Some(ok) => format!(",\"leading_coefficient_ok\":{ok}"),
        None => String::new(),
    };
    format!(
        "{{\"period\":{},\"degree\":{},\"onset\":{},\"residues\":[{}]{}}}",
        q.period(),
        q.degree(),
        q.onset(),
        residues.join(","),
        leading_field,
    )
}
