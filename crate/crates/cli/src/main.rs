//! `qgraph`: resonances of quantum graphs from the command line.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 when a
//! computation fails.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgraph::circle::{self, Parity};
use qgraph::dtn;
use qgraph::exppoly::format_f64;
use qgraph::roots::{self, Rect, RootFinderOptions};
use qgraph::sampling;
use qgraph::{assemble, MetricGraph};

#[derive(Parser, Debug)]
#[command(name = "qgraph", version, about = "Resonances of quantum graphs with leads")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Graph description in JSON.
    graph: Option<PathBuf>,

    /// Use the circle with two leads at parameter c instead of a file.
    #[arg(long)]
    circle: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a graph for structural problems.
    Validate {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Report whether the graph obeys the Weyl law.
    Classify {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Expand det A(k) as an exponential polynomial (CSV).
    Det {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Zeros of det A(k) in a rectangle (CSV).
    Roots {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_max: f64,
        #[arg(long, default_value_t = roots::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Number of resonances in the disc |k| <= R, with multiplicity.
    Count {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, conflicts_with = "radii", required_unless_present = "radii")]
        radius: Option<f64>,
        /// Comma-separated radii; prints a radius,count table.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long, default_value_t = roots::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the Dirichlet-to-Neumann identities at random k.
    DtnCheck {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Finite-difference step for the derivative identity.
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
    /// Trace one resonance curve of the circle graph in c (CSV).
    CircleCurve {
        #[arg(long)]
        parity: Parity,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 400)]
        c_steps: usize,
    },
    /// Compare det A(k, c) with 4 F_even F_odd at random k.
    CircleVerify {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Compute(String),
    /// Normal output that signals a rejected input.
    Rejected(String),
}

impl From<qgraph::Error> for Failure {
    fn from(e: qgraph::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

impl GraphSource {
    fn load(&self) -> Result<MetricGraph, Failure> {
        match (&self.graph, self.circle) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
                Ok(MetricGraph::from_json_str(&text)?)
            }
            (None, Some(c)) => Ok(circle::build_graph(c)?),
            (None, None) => Err(Failure::Input("no graph given".into())),
        }
    }

    fn load_valid(&self) -> Result<MetricGraph, Failure> {
        let g = self.load()?;
        g.ensure_valid()?;
        Ok(g)
    }
}

fn options(tol: f64, seed: u64) -> RootFinderOptions {
    RootFinderOptions {
        tol,
        seed,
        ..RootFinderOptions::default()
    }
}

fn validate(source: &GraphSource) -> Outcome {
    let report = source.load()?.validate();
    if report.is_pass() {
        return Ok("pass\n".into());
    }
    let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    Err(Failure::Rejected(format!("fail\n{}\n", lines.join("\n"))))
}

fn classify(source: &GraphSource) -> Outcome {
    let g = source.load_valid()?;
    let w = g.classify_weyl();
    let balanced = if w.balanced_vertices.is_empty() {
        "none".to_string()
    } else {
        w.balanced_vertices.iter().map(|&v| g.name(v)).collect::<Vec<_>>().join(", ")
    };
    Ok(format!("Weyl: {}; volume: {}; balanced vertices: {balanced}\n", w.is_weyl, w.volume))
}

fn det(source: &GraphSource) -> Outcome {
    let g = source.load_valid()?;
    let det = assemble(&g)?.determinant()?;
    let mut out = String::new();
    let header: Vec<String> = (0..g.edges().len()).map(|e| format!("e{e}")).collect();
    let _ = writeln!(out, "{}sigma,coefficient", header.iter().map(|h| format!("{h},")).collect::<String>());
    for (e, a) in det.terms() {
        let exps: String = e.components().iter().map(|x| format!("{x},")).collect();
        let _ = writeln!(out, "{exps}{},{a}", format_f64(det.sigma(e)));
    }
    Ok(out)
}

fn roots_table(found: &[roots::Resonance]) -> String {
    let mut out = String::from("re,im,multiplicity,residual\n");
    for r in found {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_f64(r.k.re),
            format_f64(r.k.im),
            r.multiplicity,
            format_f64(r.residual)
        );
    }
    out
}

fn find(source: &GraphSource, region: [f64; 4], tol: f64, seed: u64) -> Outcome {
    let [re_min, re_max, im_min, im_max] = region;
    let rect = Rect::new(re_min, re_max, im_min, im_max)?;
    let g = source.load_valid()?;
    let det = assemble(&g)?.determinant()?;
    let found = roots::find_roots(&det, &rect, &options(tol, seed))?;
    Ok(roots_table(&found))
}

fn count(source: &GraphSource, radius: Option<f64>, radii: Option<&[f64]>, tol: f64, seed: u64) -> Outcome {
    let g = source.load_valid()?;
    let det = assemble(&g)?.determinant()?;
    let opts = options(tol, seed);
    if let Some(r) = radius {
        return Ok(format!("{}\n", roots::count_in_disc(&det, r, &opts)?.count));
    }
    let mut out = String::from("radius,count\n");
    for &r in radii.unwrap_or_default() {
        let _ = writeln!(out, "{},{}", format_f64(r), roots::count_in_disc(&det, r, &opts)?.count);
    }
    Ok(out)
}

fn dtn_check(source: &GraphSource, samples: usize, seed: u64, step: f64) -> Outcome {
    if samples == 0 {
        return Err(Failure::Input("need at least one sample".into()));
    }
    let g = source.load_valid()?;
    let det = assemble(&g)?.determinant()?;
    let mut rng = sampling::rng(seed);
    let (mut worst_det, mut worst_der): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let k = sampling::sample_k(&mut rng, 5.0, 0.3..=2.0);
        worst_det = worst_det.max(dtn::det_identity_residual(&g, &det, k)?);
        worst_der = worst_der.max(dtn::derivative_identity_residual(&g, k, step)?);
    }
    Ok(format!(
        "samples: {samples}\ndet identity max residual: {}\nderivative identity max residual: {}\n",
        format_f64(worst_det),
        format_f64(worst_der)
    ))
}

fn circle_curve(parity: Parity, n: i64, c_steps: usize) -> Outcome {
    if c_steps == 0 {
        return Err(Failure::Input("c-steps must be positive".into()));
    }
    let curve = circle::trace_curve(parity, n, &circle::uniform_grid(c_steps))?;
    let mut out = String::from("c,re_k,im_k,crossed_real\n");
    for s in &curve.samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_f64(s.c),
            format_f64(s.k.re),
            format_f64(s.k.im),
            u8::from(s.crossed_real)
        );
    }
    if curve.diverged {
        eprintln!("diverged: last tracked c = {}, k = {}", format_f64(curve.last_c), curve.last_k);
    }
    for c in &curve.coincidences {
        eprintln!("possible collision with another zero near c = {}", format_f64(*c));
    }
    Ok(out)
}

fn circle_verify(c: f64, samples: usize, seed: u64) -> Outcome {
    let r = circle::verify_factorization(c, samples, seed)?;
    Ok(format!(
        "c: {}\nsamples: {}\nsign: {:+}\nmax relative residual: {}\n",
        r.c,
        r.samples,
        r.sign,
        format_f64(r.max_relative_residual)
    ))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { source } => validate(source),
        Command::Classify { source } => classify(source),
        Command::Det { source } => det(source),
        Command::Roots { source, re_min, re_max, im_min, im_max, tol, seed } => {
            find(source, [*re_min, *re_max, *im_min, *im_max], *tol, *seed)
        }
        Command::Count { source, radius, radii, tol, seed } => {
            count(source, *radius, radii.as_deref(), *tol, *seed)
        }
        Command::DtnCheck { source, samples, seed, step } => dtn_check(source, *samples, *seed, *step),
        Command::CircleCurve { parity, n, c_steps } => circle_curve(*parity, *n, *c_steps),
        Command::CircleVerify { c, samples, seed } => circle_verify(*c, *samples, *seed),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("QGRAPH_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("QGRAPH_THREADS must be a non-negative integer, got {value:?}"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Rejected(text)) => {
            if let Err(e) = emit(&cli, &text) {
                eprintln!("error: cannot write output: {e}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
