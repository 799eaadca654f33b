use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cat0rect::boundary::boundary_walk;
use cat0rect::complex::{validate_cat0, PointSpec, ValidationConfig};
use cat0rect::engine::{Breakpoint, QueryIndex};
use cat0rect::error::{Error, Result};
use cat0rect::generate::{generate, Family, GeneratorSpec, Lengths};
use cat0rect::io::{self, StructureFile};
use cat0rect::oracle::{OracleConfig, SampleGraph, DEFAULT_NODE_CAP};
use cat0rect::structures::StructureKind;
use cat0rect::theta::compute_theta;
use cat0rect::unfold::unfold;

#[derive(Parser)]
#[command(name = "cat0rect", version, about = "Geodesics in CAT(0) rectangular complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a complex is a CAT(0) rectangular complex.
    Validate {
        complex: PathBuf,
        #[arg(long, default_value_t = 2000)]
        exhaustive_limit: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the Θ-classes, their lengths and the incompatibility graph.
    Theta { complex: PathBuf },
    /// Build a query structure and write it together with the complex.
    Build {
        complex: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Auto)]
        kind: KindArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the two boundary paths of I(p, q).
    Boundary(PairArgs),
    /// Print the planar unfolding of I(p, q).
    Unfold(PairArgs),
    /// Shortest path between two points.
    Query {
        #[command(flatten)]
        points: PointArgs,
        #[arg(long)]
        json: bool,
        /// Write an SVG drawing of the unfolding and the path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        emit_triangulation: bool,
        #[arg(long)]
        no_timing: bool,
    },
    /// Discretized reference distance between two points.
    Oracle {
        #[command(flatten)]
        points: PointArgs,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Generate a random or structured complex.
    Generate {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `unit` or `uniform:a,b`.
        #[arg(long, default_value = "unit", value_parser = parse_lengths)]
        lengths: Lengths,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time random queries and report walk statistics.
    Bench {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Auto,
    Dense,
    Treeproduct,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
}

#[derive(Args)]
struct PointArgs {
    /// Structure file or bare complex.
    #[arg(long)]
    structure: PathBuf,
    /// `face,alpha,beta`
    #[arg(long, value_parser = io::parse_point)]
    from: PointSpec,
    /// `face,alpha,beta`
    #[arg(long, value_parser = io::parse_point)]
    to: PointSpec,
}

fn parse_lengths(s: &str) -> std::result::Result<Lengths, String> {
    if s == "unit" {
        return Ok(Lengths::Unit);
    }
    let range = s
        .strip_prefix("uniform:")
        .ok_or_else(|| format!("expected unit or uniform:a,b, got {s:?}"))?;
    let (a, b) = range
        .split_once(',')
        .ok_or_else(|| format!("expected uniform:a,b, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Lengths::Uniform { a: num(a)?, b: num(b)? })
}

fn emit(value: &impl Serialize, output: Option<&PathBuf>) -> Result<()> {
    let text = io::to_pretty(value)?;
    match output {
        Some(path) => io::write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_vertex(index: &QueryIndex, v: usize) -> Result<()> {
    let n = index.complex.vertex_count();
    if v >= n {
        return Err(Error::Invalid(format!("vertex {v} out of range (vertex count {n})")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate {
            complex,
            exhaustive_limit,
            samples,
            seed,
        } => {
            let k = io::read_complex(&complex)?;
            let config = ValidationConfig {
                exhaustive_limit,
                sampled_triples: samples,
                seed,
            };
            emit(&validate_cat0(&k, &config)?, None)
        }
        Command::Theta { complex } => {
            let k = io::read_complex(&complex)?;
            emit(&compute_theta(&k)?, None)
        }
        Command::Build { complex, kind, output } => {
            let k = io::read_complex(&complex)?;
            validate_cat0(&k, &ValidationConfig::default())?;
            let kind = match kind {
                KindArg::Auto => None,
                KindArg::Dense => Some(StructureKind::Dense),
                KindArg::Treeproduct => Some(StructureKind::TreeProduct),
            };
            let index = QueryIndex::new(k, kind)?;
            emit(&StructureFile::new(&index), output.as_ref())
        }
        Command::Boundary(args) => {
            let index = io::read_index(&args.structure)?;
            check_vertex(&index, args.p)?;
            check_vertex(&index, args.q)?;
            emit(&boundary_walk(&index.structure, args.p, args.q)?, None)
        }
        Command::Unfold(args) => {
            let index = io::read_index(&args.structure)?;
            check_vertex(&index, args.p)?;
            check_vertex(&index, args.q)?;
            let b = boundary_walk(&index.structure, args.p, args.q)?;
            emit(&unfold(&b, &index.complex, &index.theta)?, None)
        }
        Command::Query {
            points,
            json,
            svg,
            emit_triangulation,
            no_timing,
        } => {
            let index = io::read_index(&points.structure)?;
            let start = Instant::now();
            let (path, trace) = index.query_traced(&points.from, &points.to)?;
            let micros = (!no_timing).then(|| start.elapsed().as_secs_f64() * 1e6);
            if let Some(out) = &svg {
                io::write_text(out, &io::path_svg(&index, &path, &trace))?;
            }
            if json || emit_triangulation {
                let mut value = json!({
                    "breakpoints": path.breakpoints,
                    "length": path.length,
                    "gates": [path.gates.0, path.gates.1],
                    "blocks": path.blocks,
                    "steps": path.stats,
                });
                if let Some(m) = micros {
                    value["micros"] = json!(m);
                }
                if emit_triangulation {
                    value["triangulations"] = json!(trace.triangulations);
                }
                emit(&value, None)
            } else {
                let items: Vec<String> = path
                    .breakpoints
                    .iter()
                    .map(|b| match b {
                        Breakpoint::Point(p) => format!("({}, {}, {})", p.face, p.alpha, p.beta),
                        Breakpoint::Vertex(v) => format!("v{v}"),
                    })
                    .collect();
                println!("length {}", path.length);
                println!("path {}", items.join(" -> "));
                if let Some(m) = micros {
                    println!("time {m:.1} us");
                }
                Ok(())
            }
        }
        Command::Oracle {
            points,
            h,
            node_cap,
        } => {
            let index = io::read_index(&points.structure)?;
            let graph = SampleGraph::new(&index.complex, &OracleConfig { h, node_cap })?;
            let d = graph.distance(&points.from, &points.to)?;
            emit(
                &json!({"length": d, "h": h, "nodes": graph.node_count()}),
                None,
            )
        }
        Command::Generate {
            family,
            n,
            seed,
            lengths,
            output,
        } => {
            let spec = GeneratorSpec {
                family,
                n,
                seed,
                lengths,
            };
            let k = generate(&spec)?;
            let mut value = io::versioned(&k)?;
            value["generator"] = serde_json::to_value(spec)?;
            emit(&value, output.as_ref())
        }
        Command::Bench {
            structure,
            queries,
            seed,
            no_timing,
        } => {
            let index = io::read_index(&structure)?;
            emit(&cat0rect::bench::benchmark(&index, queries, seed, !no_timing)?, None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
