//! `concur-graph`: generate graphs, convert formats and run the connectivity
//! algorithms with either the parallel or the sequential engine.

mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use concur_graph::bcc::run_bcc;
use concur_graph::cc::{run_cc, CcParams};
use concur_graph::gen::{gen_lattice, gen_random_digraph, gen_random_undirected, random_permutation, LatticeScheme, LatticeSpec};
use concur_graph::hashbag::BagParams;
use concur_graph::io::{load_graph, write_graph, write_lelists};
use concur_graph::lelists::{run_lelists, LeParams};
use concur_graph::oracles::{canonical_partition, cohen_lelists, count_classes, hopcroft_tarjan_bcc, seq_components, tarjan_scc};
use concur_graph::reach::{DenseMode, ReachParams, SearchStats, VgcParams};
use concur_graph::scc::{run_scc, PivotRule, SccParams};
use concur_graph::Graph;

use report::{digest, Report};

#[derive(Parser, Debug)]
#[command(name = "concur-graph", version, about = "Parallel graph connectivity toolkit")]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true, env = "CONCUR_GRAPH_THREADS")]
    threads: Option<usize>,
    /// Emit line-delimited JSON records instead of one report object.
    #[arg(long, global = true)]
    stream: bool,
    #[arg(long, global = true, value_enum, default_value_t = Engine::Par)]
    engine: Engine,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Par,
    Seq,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    Oriented,
    Sampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Pivot {
    Maxdeg,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Dense {
    Auto,
    Sparse,
    Dense,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Scc,
    Cc,
    Bcc,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a lattice or random graph.
    Gen(GenArgs),
    /// Convert between the text and binary graph formats.
    Convert(ConvertArgs),
    /// Strongly connected components.
    Scc(RunArgs),
    /// Connected components (input is symmetrized).
    Cc(RunArgs),
    /// Biconnected components (input is symmetrized).
    Bcc(RunArgs),
    /// Least-element lists (input is symmetrized).
    Lelists(LeArgs),
    /// Time one algorithm over a range of local-search budgets.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Lattice dimensions, e.g. `100x100`.
    #[arg(long, conflicts_with_all = ["random", "preset"])]
    lattice: Option<String>,
    /// Full-size lattice preset: SQR, REC, SQR' or REC'.
    #[arg(long, conflicts_with = "random")]
    preset: Option<String>,
    /// Random graph `n,m`.
    #[arg(long)]
    random: Option<String>,
    #[arg(long, value_enum, default_value_t = Scheme::Oriented)]
    scheme: Scheme,
    /// Lattice without wrap-around links.
    #[arg(long)]
    no_wrap: bool,
    /// Random graph is undirected.
    #[arg(long)]
    undirected: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; `.bin` selects the binary format.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    symmetrize: bool,
}

#[derive(Args, Debug, Clone)]
struct TuneArgs {
    /// Local-search budget τ.
    #[arg(long, default_value_t = 512)]
    tau: usize,
    /// Turn local search off.
    #[arg(long)]
    no_vgc: bool,
    /// First hash-bag chunk size λ.
    #[arg(long, default_value_t = 1024)]
    lambda: usize,
    /// Hash-bag samples per resize σ.
    #[arg(long, default_value_t = 50)]
    sigma: usize,
    /// Batch growth factor β.
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    /// Dense-mode threshold θ.
    #[arg(long, default_value_t = 20.0)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = Dense::Auto)]
    dense: Dense,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Pivot::Maxdeg)]
    pivot: Pivot,
}

#[derive(Args, Debug)]
struct RunArgs {
    graph: PathBuf,
    #[command(flatten)]
    tune: TuneArgs,
    /// Also run without local search and report rounds for both.
    #[arg(long)]
    compare_rounds: bool,
}

#[derive(Args, Debug)]
struct LeArgs {
    graph: PathBuf,
    #[command(flatten)]
    tune: TuneArgs,
    /// Seed of the random priority order.
    #[arg(long, default_value_t = 0)]
    priority_seed: u64,
    /// Write the lists here; `.bin`/`.lel` select the binary format.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    compare_rounds: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Scc)]
    algo: Algo,
    /// Comma-separated τ values; the first is the baseline.
    #[arg(long, default_value = "1,8,64,512", value_delimiter = ',')]
    taus: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[command(flatten)]
    tune: TuneArgs,
}

impl TuneArgs {
    fn bag(&self) -> BagParams {
        BagParams {
            lambda: self.lambda,
            sigma: self.sigma,
            ..BagParams::default()
        }
    }

    fn reach(&self) -> ReachParams {
        ReachParams {
            vgc: if self.no_vgc { VgcParams::disabled() } else { VgcParams::with_tau(self.tau) },
            dense: match self.dense {
                Dense::Auto => DenseMode::Auto,
                Dense::Sparse => DenseMode::ForceSparse,
                Dense::Dense => DenseMode::ForceDense,
            },
            theta: self.theta,
            bag: self.bag(),
        }
    }

    fn scc(&self) -> SccParams {
        SccParams {
            reach: self.reach(),
            beta: self.beta,
            pivot: match self.pivot {
                Pivot::Maxdeg => PivotRule::MaxDegree,
                Pivot::Random => PivotRule::Random,
            },
            seed: self.seed,
        }
    }

    fn cc(&self) -> CcParams {
        CcParams {
            reach: self.reach(),
            seed: self.seed,
            ..CcParams::default()
        }
    }

    fn without_vgc(&self) -> Self {
        Self { no_vgc: true, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        self.scc().validate()?;
        self.cc().validate()?;
        Ok(())
    }

    fn to_json(&self) -> Value {
        json!({
            "tau": self.tau,
            "vgc": !self.no_vgc,
            "lambda": self.lambda,
            "sigma": self.sigma,
            "alpha": BagParams::default().alpha,
            "kappa": BagParams::default().kappa,
            "beta": self.beta,
            "theta": self.theta,
            "dense": format!("{:?}", self.dense).to_lowercase(),
            "seed": self.seed,
            "pivot": format!("{:?}", self.pivot).to_lowercase(),
        })
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = real_main(cli) {
        let broken_pipe = e
            .downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe);
        if !broken_pipe {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn real_main(cli: Cli) -> Result<()> {
    let threads = match cli.threads {
        Some(0) => bail!("invalid parameter: --threads must be at least 1"),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let report = pool.install(|| run(&cli, threads))?;
    report.emit(cli.stream)
}

fn run(cli: &Cli, threads: usize) -> Result<Report> {
    let engine = match cli.engine {
        Engine::Par => "par",
        Engine::Seq => "seq",
    };
    match &cli.cmd {
        Command::Gen(a) => gen(a, engine, threads),
        Command::Convert(a) => convert(a, engine, threads),
        Command::Scc(a) => scc(a, cli.engine, engine, threads),
        Command::Cc(a) => cc(a, cli.engine, engine, threads),
        Command::Bcc(a) => bcc(a, cli.engine, engine, threads),
        Command::Lelists(a) => lelists(a, cli.engine, engine, threads),
        Command::Bench(a) => bench(a, cli.engine, engine, threads),
    }
}

fn parse_pair(s: &str, sep: char, what: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(sep)
        .with_context(|| format!("{what} must look like A{sep}B, got {s:?}"))?;
    Ok((
        a.trim().parse().with_context(|| format!("bad {what} {s:?}"))?,
        b.trim().parse().with_context(|| format!("bad {what} {s:?}"))?,
    ))
}

fn graph_meta(path: &Path, g: &Graph, symmetrized: bool) -> Value {
    json!({
        "path": path.display().to_string(),
        "n": g.num_vertices(),
        "m": g.num_edges(),
        "symmetric": g.is_symmetric(),
        "symmetrized": symmetrized,
    })
}

fn graph_digest(g: &Graph) -> String {
    digest(g.edges().map(|(u, v)| ((u as u64) << 32) | v as u64))
}

fn load(path: &Path, symmetric: bool, report: &mut Report) -> Result<Graph> {
    let t = Instant::now();
    let g = load_graph(path).with_context(|| format!("cannot read graph {}", path.display()))?;
    let (g, sym) = if symmetric && !g.is_symmetric() { (g.symmetrize(), true) } else { (g, false) };
    report.timing("load", t.elapsed());
    report.graph = graph_meta(path, &g, sym);
    Ok(g)
}

fn gen(a: &GenArgs, engine: &str, threads: usize) -> Result<Report> {
    let mut report = Report::new("gen", engine, threads);
    let t = Instant::now();
    let (g, source) = if let Some(r) = &a.random {
        let (n, m) = parse_pair(r, ',', "--random")?;
        let g = if a.undirected { gen_random_undirected(n, m, a.seed)? } else { gen_random_digraph(n, m, a.seed)? };
        (g, json!({"kind": "random", "n": n, "m": m, "undirected": a.undirected}))
    } else {
        let mut spec = if let Some(p) = &a.preset {
            LatticeSpec::preset(p, a.seed).with_context(|| format!("unknown preset {p:?}"))?
        } else if let Some(l) = &a.lattice {
            let (rows, cols) = parse_pair(&l.to_ascii_lowercase(), 'x', "--lattice")?;
            match a.scheme {
                Scheme::Oriented => LatticeSpec::oriented(rows, cols, a.seed),
                Scheme::Sampled => LatticeSpec::sampled(rows, cols, a.seed),
            }
        } else {
            bail!("gen needs one of --lattice, --preset or --random");
        };
        spec.wrap = !a.no_wrap;
        let scheme = match spec.scheme {
            LatticeScheme::Oriented => "oriented",
            LatticeScheme::Sampled => "sampled",
        };
        (
            gen_lattice(&spec)?,
            json!({"kind": "lattice", "rows": spec.rows, "cols": spec.cols, "wrap": spec.wrap, "scheme": scheme}),
        )
    };
    report.timing("generate", t.elapsed());
    let t = Instant::now();
    write_graph(&g, &a.output).with_context(|| format!("cannot write {}", a.output.display()))?;
    report.timing("write", t.elapsed());
    report.graph = graph_meta(&a.output, &g, false);
    report.params = json!({"seed": a.seed, "source": source});
    report.result = json!({"n": g.num_vertices(), "m": g.num_edges(), "edge_digest": graph_digest(&g)});
    Ok(report)
}

fn convert(a: &ConvertArgs, engine: &str, threads: usize) -> Result<Report> {
    let mut report = Report::new("convert", engine, threads);
    let g = load(&a.input, a.symmetrize, &mut report)?;
    let t = Instant::now();
    write_graph(&g, &a.output).with_context(|| format!("cannot write {}", a.output.display()))?;
    report.timing("write", t.elapsed());
    report.params = json!({"symmetrize": a.symmetrize, "output": a.output.display().to_string()});
    report.result = json!({"n": g.num_vertices(), "m": g.num_edges(), "edge_digest": graph_digest(&g)});
    Ok(report)
}

fn search_json(s: &SearchStats) -> Value {
    json!({"rounds": s.rounds, "dense_rounds": s.dense_rounds()})
}

fn scc_rounds(g: &Graph, tune: &TuneArgs, report: &mut Report, name: &str) -> Result<Value> {
    let r = run_scc(g, &tune.scc())?;
    let s = &r.stats;
    for (search, st) in [("first_forward", &s.first_forward), ("first_backward", &s.first_backward)] {
        report.round_records(name, search, st);
    }
    Ok(json!({
        "first_forward": search_json(&s.first_forward),
        "first_backward": search_json(&s.first_backward),
        "multi": s.multi_rounds(),
        "batches": s.batches.len(),
        "total": s.total_rounds(),
        "trimmed": s.trimmed,
        "first_scc_size": s.first_scc_size,
    }))
}

fn partition_result(labels: &[u32]) -> Value {
    let classes = count_classes(labels);
    let mut sizes = vec![0usize; classes];
    for &l in labels {
        sizes[l as usize] += 1;
    }
    json!({
        "components": classes,
        "largest": sizes.iter().copied().max().unwrap_or(0),
        "partition_digest": digest(labels.iter().map(|&l| l as u64)),
    })
}

fn scc(a: &RunArgs, e: Engine, engine: &str, threads: usize) -> Result<Report> {
    let mut report = Report::new("scc", engine, threads);
    a.tune.validate()?;
    report.params = a.tune.to_json();
    let g = load(&a.graph, false, &mut report)?;
    let t = Instant::now();
    match e {
        Engine::Seq => {
            let part = canonical_partition(&tarjan_scc(&g));
            report.timing("tarjan", t.elapsed());
            report.result = partition_result(&part);
        }
        Engine::Par => {
            let r = run_scc(&g, &a.tune.scc())?;
            let s = &r.stats;
            report.timing("trim", s.trim_time);
            report.timing("first_scc", s.first_scc_time);
            report.timing("multi_search", s.multi_search_time);
            report.timing("table_resize", s.table_resize_time);
            report.timing("labeling", s.labeling_time);
            report.timing("algorithm", t.elapsed());
            report.result = partition_result(&canonical_partition(&r.labels.label));
            if !a.compare_rounds {
                report.round_records("vgc", "first_forward", &s.first_forward);
                report.round_records("vgc", "first_backward", &s.first_backward);
                report.rounds = json!({
                    "first_forward": search_json(&s.first_forward),
                    "first_backward": search_json(&s.first_backward),
                    "multi": s.multi_rounds(),
                    "batches": s.batches.len(),
                    "total": s.total_rounds(),
                    "trimmed": s.trimmed,
                    "first_scc_size": s.first_scc_size,
                });
            }
        }
    }
    if a.compare_rounds {
        let with = scc_rounds(&g, &a.tune, &mut report, "vgc")?;
        let without = scc_rounds(&g, &a.tune.without_vgc(), &mut report, "no_vgc")?;
        report.rounds = json!({"vgc": with, "no_vgc": without});
    }
    Ok(report)
}

fn cc(a: &RunArgs, e: Engine, engine: &str, threads: usize) -> Result<Report> {
    let mut report = Report::new("cc", engine, threads);
    a.tune.validate()?;
    report.params = a.tune.to_json();
    let g = load(&a.graph, true, &mut report)?;
    let t = Instant::now();
    let labels = match e {
        Engine::Seq => seq_components(&g),
        Engine::Par => {
            let r = run_cc(&g, &a.tune.cc())?;
            if !a.compare_rounds {
                report.round_records("vgc", "ldd", &r.ldd_stats);
                report.rounds = json!({"ldd": search_json(&r.ldd_stats), "clusters": r.num_clusters});
            }
            r.labels
        }
    };
    report.timing("algorithm", t.elapsed());
    report.result = partition_result(&canonical_partition(&labels));
    if a.compare_rounds {
        let mut both = serde_json::Map::new();
        for (name, tune) in [("vgc", a.tune.clone()), ("no_vgc", a.tune.without_vgc())] {
            let r = run_cc(&g, &tune.cc())?;
            report.round_records(name, "ldd", &r.ldd_stats);
            both.insert(name.into(), json!({"ldd": search_json(&r.ldd_stats), "clusters": r.num_clusters}));
        }
        report.rounds = Value::Object(both);
    }
    Ok(report)
}

fn bcc(a: &RunArgs, e: Engine, engine: &str, threads: usize) -> Result<Report> {
    let mut report = Report::new("bcc", engine, threads);
    a.tune.validate()?;
    report.params = a.tune.to_json();
    let g = load(&a.graph, true, &mut report)?;
    let t = Instant::now();
    let summary = match e {
        Engine::Seq => hopcroft_tarjan_bcc(&g),
        Engine::Par => {
            let r = run_bcc(&g, &a.tune.cc())?;
            let s = &r.stats;
            report.timing("first_cc", s.first_cc_time);
            report.timing("euler_tour", s.euler_tour_time);
            report.timing("low_high", s.low_high_time);
            report.timing("last_cc", s.last_cc_time);
            if !a.compare_rounds {
                report.rounds = json!({"first_cc": s.first_cc_rounds, "last_cc": s.last_cc_rounds});
            }
            r.labeling.summary()
        }
    };
    report.timing("algorithm", t.elapsed());
    let mut s = summary;
    s.normalize();
    let comp_digest = digest(
        s.components
            .iter()
            .flat_map(|c| c.iter().map(|&v| v as u64).chain(std::iter::once(u64::MAX))),
    );
    report.result = json!({
        "components": s.components.len(),
        "largest": s.components.iter().map(Vec::len).max().unwrap_or(0),
        "articulation_points": s.articulation_points.len(),
        "bridges": s.bridges.len(),
        "component_digest": comp_digest,
        "articulation_digest": digest(s.articulation_points.iter().map(|&v| v as u64)),
        "bridge_digest": digest(s.bridges.iter().map(|&(u, v)| ((u as u64) << 32) | v as u64)),
    });
    if a.compare_rounds {
        let mut both = serde_json::Map::new();
        for (name, tune) in [("vgc", a.tune.clone()), ("no_vgc", a.tune.without_vgc())] {
            let r = run_bcc(&g, &tune.cc())?;
            both.insert(name.into(), json!({"first_cc": r.stats.first_cc_rounds, "last_cc": r.stats.last_cc_rounds}));
        }
        report.rounds = Value::Object(both);
    }
    Ok(report)
}

fn lelists(a: &LeArgs, e: Engine, engine: &str, threads: usize) -> Result<Report> {
    let mut report = Report::new("lelists", engine, threads);
    a.tune.validate()?;
    let mut params = a.tune.to_json();
    params["priority_seed"] = json!(a.priority_seed);
    report.params = params;
    let g = load(&a.graph, true, &mut report)?;
    let order = random_permutation(g.num_vertices(), a.priority_seed);
    let t = Instant::now();
    let lists = match e {
        Engine::Seq => cohen_lelists(&g, &order),
        Engine::Par => {
            let le = LeParams {
                beta: a.tune.beta,
                bag: a.tune.bag(),
                trace_delta: false,
            };
            let r = run_lelists(&g, &order, &le)?;
            // Local search does not apply here, so both sides of a comparison coincide.
            let rounds = json!({"bfs_rounds": r.stats.rounds, "batches": r.stats.batches, "candidates": r.stats.candidates});
            report.rounds = if a.compare_rounds { json!({"vgc": rounds, "no_vgc": rounds}) } else { rounds };
            r.lists
        }
    };
    report.timing("algorithm", t.elapsed());
    let total: usize = lists.iter().map(Vec::len).sum();
    let n = g.num_vertices();
    report.result = json!({
        "total_length": total,
        "mean_length": if n == 0 { 0.0 } else { total as f64 / n as f64 },
        "max_length": lists.iter().map(Vec::len).max().unwrap_or(0),
        "list_digest": digest(lists.iter().flat_map(|l| {
            l.iter().map(|&(s, d)| ((s as u64) << 32) | d as u64).chain(std::iter::once(u64::MAX))
        })),
    });
    if let Some(out) = &a.output {
        let t = Instant::now();
        write_lelists(&lists, out).with_context(|| format!("cannot write {}", out.display()))?;
        report.timing("write", t.elapsed());
        report.result["output"] = json!(out.display().to_string());
    }
    Ok(report)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn bench(a: &BenchArgs, e: Engine, engine: &str, threads: usize) -> Result<Report> {
    let cmd = match a.algo {
        Algo::Scc => "scc",
        Algo::Cc => "cc",
        Algo::Bcc => "bcc",
    };
    let mut report = Report::new("bench", engine, threads);
    if a.repeat == 0 || a.taus.is_empty() {
        bail!("invalid parameter: --repeat and --taus must be non-empty");
    }
    a.tune.validate()?;
    let mut params = a.tune.to_json();
    params["algo"] = json!(cmd);
    params["taus"] = json!(a.taus);
    params["repeat"] = json!(a.repeat);
    report.params = params;
    let g = load(&a.graph, !matches!(a.algo, Algo::Scc), &mut report)?;

    if e == Engine::Seq {
        let mut times = Vec::new();
        let mut result = Value::Null;
        for _ in 0..a.repeat {
            let t = Instant::now();
            result = match a.algo {
                Algo::Scc => json!(count_classes(&tarjan_scc(&g))),
                Algo::Cc => json!(count_classes(&seq_components(&g))),
                Algo::Bcc => json!(hopcroft_tarjan_bcc(&g).components.len()),
            };
            times.push(t.elapsed().as_secs_f64());
        }
        report.result = json!({"components": result});
        report.timings["median_seconds"] = json!(median(times));
        return Ok(report);
    }

    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for &tau in &a.taus {
        let tune = TuneArgs { tau, no_vgc: false, ..a.tune.clone() };
        tune.validate()?;
        let mut times = Vec::new();
        let mut row = Value::Null;
        for _ in 0..a.repeat {
            let t = Instant::now();
            row = match a.algo {
                Algo::Scc => {
                    let r = run_scc(&g, &tune.scc())?;
                    json!({"tau": tau, "components": r.labels.num_components(), "rounds": r.stats.total_rounds(),
                           "first_forward_rounds": r.stats.first_forward.rounds})
                }
                Algo::Cc => {
                    let r = run_cc(&g, &tune.cc())?;
                    json!({"tau": tau, "components": r.num_components, "rounds": r.ldd_stats.rounds})
                }
                Algo::Bcc => {
                    let r = run_bcc(&g, &tune.cc())?;
                    json!({"tau": tau, "components": r.labeling.num_labels(),
                           "rounds": r.stats.first_cc_rounds + r.stats.last_cc_rounds})
                }
            };
            times.push(t.elapsed().as_secs_f64());
        }
        rows.push(row);
        medians.push(median(times));
    }
    let base = medians[0];
    let timing_rows: Vec<Value> = a
        .taus
        .iter()
        .zip(&medians)
        .map(|(&tau, &m)| json!({"tau": tau, "median_seconds": m, "relative": if base > 0.0 { m / base } else { 1.0 }}))
        .collect();
    report.result = json!({"rows": rows});
    report.timings["matrix"] = json!(timing_rows);
    Ok(report)
}
