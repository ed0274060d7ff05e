use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dynsketch::container::{size_words_for_k, Problem, Sketch};
use dynsketch::cut::compress_cut;
use dynsketch::fixtures::{gen_cut_lb, gen_membership, planted_length};
use dynsketch::graph::{apply_query, parse_graph, parse_query, write_graph, write_query, Graph, Query, TerminalCut};
use dynsketch::matching::compress;
use dynsketch::mst::compress_mst;
use dynsketch::oracle::{edge_connectivity, matching_size, max_flow, mst, shortest_path};
use dynsketch::path::{compress_paths, INFINITY};
use dynsketch::stconn::compress_stconn;
use dynsketch::verify::{verify, Target, VerifyConfig};
use dynsketch::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "dynsketch", version, about = "Compact graph sketches answering terminal edge-insertion queries")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "DYNSKETCH_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Matching,
    Cut,
    Stconn,
    Mst,
    Path,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Matching => Problem::Matching,
            ProblemArg::Cut => Problem::Cut,
            ProblemArg::Stconn => Problem::Stconn,
            ProblemArg::Mst => Problem::Mst,
            ProblemArg::Path => Problem::Path,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Matching,
    Cut,
    Separating,
    Stconn,
    Mst,
    Path,
    Membership,
    Cutlb,
}

impl From<VerifyArg> for Target {
    fn from(v: VerifyArg) -> Self {
        match v {
            VerifyArg::Matching => Target::Matching,
            VerifyArg::Cut => Target::Cut,
            VerifyArg::Separating => Target::Separating,
            VerifyArg::Stconn => Target::Stconn,
            VerifyArg::Mst => Target::Mst,
            VerifyArg::Path => Target::Path,
            VerifyArg::Membership => Target::Membership,
            VerifyArg::Cutlb => Target::CutLb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureArg {
    Membership,
    Cutlb,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a graph into a sketch container.
    Build {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Answer a query from a sketch container.
    Query {
        /// Expected problem; fails if the container holds another.
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
        #[arg(short, long)]
        input: PathBuf,
        /// Query file of `q i j [w]` lines; empty query if omitted.
        #[arg(short, long)]
        query: Option<PathBuf>,
        /// Terminal cut such as "A:0,2 B:1" (cut sketches only).
        #[arg(long)]
        cut: Option<String>,
    },
    /// Answer a query by brute force on the full graph.
    Oracle {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        query: Option<PathBuf>,
        #[arg(long)]
        cut: Option<String>,
    },
    /// Emit a hardness gadget in the text graph format.
    Fixture {
        #[arg(long, value_enum)]
        name: FixtureArg,
        /// Element count N (membership, a perfect square) or k' (cutlb, even).
        #[arg(long)]
        size: usize,
        /// Members of S (membership) or planted bits as 0/1 (cutlb),
        /// comma separated; drawn from the seed if omitted.
        #[arg(long)]
        set: Option<String>,
        /// Membership only: also write the query for this element.
        #[arg(long, requires = "query_out")]
        element: Option<usize>,
        #[arg(long)]
        query_out: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare sketches against the oracles on random instances.
    Verify {
        #[arg(long, value_enum)]
        problem: VerifyArg,
        /// Verify this graph, reseeding the sketch per trial.
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seeds_per_graph: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Report the size of a container, or the size for `k` terminals.
    Size {
        #[arg(short, long, conflicts_with_all = ["problem", "k"])]
        input: Option<PathBuf>,
        #[arg(long, value_enum, requires = "k")]
        problem: Option<ProblemArg>,
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::NegativeWeight { .. }
            | Error::Format(_)
            | Error::Version { .. }
            | Error::TagMismatch { .. }
            | Error::InvalidGraph(_)
            | Error::InvalidQuery(_)
            | Error::InvalidCut(_) => EXIT_PARSE,
            _ => EXIT_USAGE,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: EXIT_PARSE, msg: format!("{}: {e}", path.display()) })
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    parse_graph(&read_text(path)?).map_err(|e| Failure::from(e).with_path(path))
}

fn read_query(path: Option<&Path>) -> Result<Query, Failure> {
    match path {
        Some(p) => parse_query(&read_text(p)?).map_err(|e| Failure::from(e).with_path(p)),
        None => Ok(Query::empty()),
    }
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl Failure {
    fn with_path(mut self, path: &Path) -> Self {
        self.msg = format!("{}: {}", path.display(), self.msg);
        self
    }
}

fn need_cut(cut: Option<&str>) -> Result<TerminalCut, Failure> {
    let text = cut.ok_or_else(|| usage("cut queries need --cut \"A:.. B:..\""))?;
    Ok(TerminalCut::parse(text)?)
}

fn no_cut(cut: Option<&str>, problem: Problem) -> Result<(), Failure> {
    match cut {
        Some(_) => Err(usage(format!("--cut does not apply to {problem} sketches"))),
        None => Ok(()),
    }
}

fn show_distance(d: u64) -> String {
    if d == INFINITY {
        "inf".into()
    } else {
        d.to_string()
    }
}

fn build(problem: Problem, delta: f64, seed: u64, input: &Path, output: &Path) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let sketch = match problem {
        Problem::Matching => Sketch::Matching(compress(&g, delta, seed)?),
        Problem::Cut => Sketch::Cut(compress_cut(&g, delta, seed)?),
        Problem::Stconn => Sketch::Stconn(compress_stconn(&g, delta, seed)?),
        Problem::Mst => Sketch::Mst(compress_mst(&g)?),
        Problem::Path => Sketch::Path(compress_paths(&g, None)?),
    };
    let bytes = sketch.to_bytes();
    write_out(output, &bytes)?;
    println!("{problem} sketch: {} words, {} bytes", bytes.len() / 8, bytes.len());
    Ok(())
}

fn query(expected: Option<Problem>, input: &Path, query: Option<&Path>, cut: Option<&str>) -> Result<(), Failure> {
    let bytes = fs::read(input).map_err(|e| Failure { code: EXIT_PARSE, msg: format!("{}: {e}", input.display()) })?;
    let sketch = Sketch::from_bytes(&bytes).map_err(|e| Failure::from(e).with_path(input))?;
    if let Some(p) = expected {
        if p != sketch.problem() {
            return Err(Error::TagMismatch { expected: p.name().into(), found: sketch.problem().name().into() }.into());
        }
    }
    let problem = sketch.problem();
    if problem != Problem::Cut {
        no_cut(cut, problem)?;
    } else if query.is_some() {
        return Err(usage("cut sketches take --cut, not a query file"));
    }
    let q = read_query(query)?;
    let answer = match sketch {
        Sketch::Matching(s) => s.extract(&q)?.to_string(),
        Sketch::Cut(s) => s.query_cut(&need_cut(cut)?)?.to_string(),
        Sketch::Stconn(s) => s.extract(&q)?.to_string(),
        Sketch::Mst(s) => s.extract(&q)?.to_string(),
        Sketch::Path(s) => show_distance(s.extract(&q)?),
    };
    println!("{answer}");
    Ok(())
}

fn source_sink(g: &Graph) -> Result<(usize, usize), Failure> {
    match (g.source(), g.sink()) {
        (Some(s), Some(t)) => Ok((s, t)),
        _ => Err(Error::InvalidGraph("the graph needs `s` and `d` lines for this problem".into()).into()),
    }
}

fn oracle(problem: Problem, input: &Path, query: Option<&Path>, cut: Option<&str>) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let answer = if problem == Problem::Cut {
        if query.is_some() {
            return Err(usage("cut queries take --cut, not a query file"));
        }
        let c = need_cut(cut)?;
        c.validate(g.k())?;
        let side = |ids: &[usize]| ids.iter().map(|&i| g.terminals()[i]).collect::<Vec<_>>();
        max_flow(&g, &side(c.a()), &side(c.b())).to_string()
    } else {
        no_cut(cut, problem)?;
        let gq = apply_query(&g, &read_query(query)?)?;
        match problem {
            Problem::Matching => matching_size(&gq)?.to_string(),
            Problem::Stconn => {
                let (s, t) = source_sink(&g)?;
                edge_connectivity(&gq, s, t).to_string()
            }
            Problem::Mst => mst(&gq).0.to_string(),
            Problem::Path => {
                let (s, t) = source_sink(&g)?;
                show_distance(shortest_path(&gq, s, t).unwrap_or(INFINITY))
            }
            Problem::Cut => unreachable!(),
        }
    };
    println!("{answer}");
    Ok(())
}

fn parse_list(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| usage(format!("bad list entry {s:?}"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn fixture(
    name: FixtureArg,
    size: usize,
    set: Option<&str>,
    element: Option<usize>,
    query_out: Option<&Path>,
    output: Option<&Path>,
    seed: u64,
) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = match name {
        FixtureArg::Membership => {
            let members = match set {
                Some(text) => parse_list(text)?,
                None => (1..=size).filter(|_| rng.gen_bool(0.5)).collect(),
            };
            let gadget = gen_membership(size, &members)?;
            if let (Some(e), Some(path)) = (element, query_out) {
                write_out(path, write_query(&gadget.query(e)?).as_bytes())?;
            }
            gadget.graph
        }
        FixtureArg::Cutlb => {
            if element.is_some() {
                return Err(usage("--element applies to the membership fixture only"));
            }
            if size < 2 || !size.is_multiple_of(2) {
                return Err(usage(format!("cutlb needs an even k' >= 2, got {size}")));
            }
            let len = planted_length(size);
            let bits: Vec<bool> = match set {
                Some(text) => parse_list(text)?.into_iter().map(|b| b != 0).collect(),
                None => (0..len).map(|_| rng.gen_bool(0.5)).collect(),
            };
            if bits.len() != len {
                return Err(usage(format!("k' = {size} plants {len} bits, got {}", bits.len())));
            }
            gen_cut_lb(size, &bits)?.graph
        }
    };
    let text = write_graph(&graph);
    match output {
        Some(path) => write_out(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn size(input: Option<&Path>, problem: Option<Problem>, k: Option<usize>) -> Result<(), Failure> {
    match (input, problem, k) {
        (Some(path), _, _) => {
            let bytes =
                fs::read(path).map_err(|e| Failure { code: EXIT_PARSE, msg: format!("{}: {e}", path.display()) })?;
            let sketch = Sketch::from_bytes(&bytes).map_err(|e| Failure::from(e).with_path(path))?;
            println!("{} sketch: {} words, {} bytes", sketch.problem(), bytes.len() / 8, bytes.len());
        }
        (None, Some(p), Some(k)) => {
            let words = size_words_for_k(p, k)
                .ok_or_else(|| usage(format!("{p} sketch size depends on the graph; build one and pass -i")))?;
            let exact = matches!(p, Problem::Matching | Problem::Stconn);
            println!("{p} sketch, k = {k}: {}{words} words, {} bytes", if exact { "" } else { "at most " }, 8 * words);
        }
        _ => return Err(usage("pass -i CONTAINER or --problem P --k K")),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { problem, delta, input, output } => build(problem.into(), delta, cli.seed, &input, &output),
        Command::Query { problem, input, query: q, cut } => {
            query(problem.map(Into::into), &input, q.as_deref(), cut.as_deref())
        }
        Command::Oracle { problem, input, query, cut } => {
            oracle(problem.into(), &input, query.as_deref(), cut.as_deref())
        }
        Command::Fixture { name, size: n, set, element, query_out, output } => {
            fixture(name, n, set.as_deref(), element, query_out.as_deref(), output.as_deref(), cli.seed)
        }
        Command::Verify { problem, input, trials, delta, max_k, max_n, seeds_per_graph, threads } => {
            let target: Target = problem.into();
            let defaults = VerifyConfig::for_target(target);
            let graph = input.as_deref().map(read_graph).transpose()?;
            let cfg = VerifyConfig {
                trials: trials.unwrap_or(defaults.trials),
                delta,
                max_k: max_k.unwrap_or(defaults.max_k),
                max_n: max_n.unwrap_or(defaults.max_n),
                seeds_per_graph,
                seed: cli.seed,
                threads: threads.unwrap_or(defaults.threads),
                graph,
            };
            let report = verify(target, &cfg)?;
            println!("{report}");
            for e in &report.examples {
                println!("  {e}");
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_VERIFY, msg: format!("{} verification failed", target.name()) })
            }
        }
        Command::Size { input, problem, k } => size(input.as_deref(), problem.map(Into::into), k),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
