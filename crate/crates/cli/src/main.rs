use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pafg::apps::{evm, forkcascade, run_direct_and_optimized, BenchReport, Lcg};
use pafg::format::{parse_graph_file, parse_pafg_file, read_samples, serialize_pafg, write_samples};
use pafg::model::IoRole;
use pafg::pafg::{check_abc, is_alternating};
use pafg::runtime::{instantiate, IoBindings, StopCondition};
use pafg::transform::{
    compute_bmr, derive_direct_pafg, find_candidates, passivize_fixpoint, PassivizationPolicy,
};
use pafg::{ActorLibrary, CoordinatedPafg, TokenType};

#[derive(Parser)]
#[command(name = "pafg", version, about = "Passive-active flow graph toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate an application graph file
    Validate { graph: PathBuf },
    /// Write the direct PAFG of a graph
    Derive {
        graph: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List passivization candidates of a PAFG
    Candidates { pafg: PathBuf },
    /// Passivize buffer blocks of a PAFG
    Passivize {
        pafg: PathBuf,
        #[command(flatten)]
        which: Which,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the BMR report and structural checks of a PAFG
    Analyze { pafg: PathBuf },
    /// Execute a PAFG on sample files
    Run {
        pafg: PathBuf,
        /// Directory holding `<source>.txt` for every source actor
        #[arg(long)]
        inputs: PathBuf,
        /// Directory to write `<sink>.txt` into
        #[arg(long)]
        outputs: PathBuf,
        #[command(flatten)]
        stop: Stop,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Run a benchmark graph in direct and passivized form
    Bench {
        #[command(subcommand)]
        app: BenchApp,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Which {
    /// Repeatedly passivize the first candidate in name order
    #[arg(long)]
    auto: bool,
    /// Passivize exactly these blocks, in order
    #[arg(long, value_delimiter = ',')]
    blocks: Vec<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Stop {
    #[arg(long)]
    sink_tokens: Option<u64>,
    /// Number of scheduler sweeps
    #[arg(long)]
    iterations: Option<u64>,
}

#[derive(Args)]
struct BenchOpts {
    #[arg(long)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchApp {
    /// EVM measurement graph, `--windows` windows of `--window` samples
    Evm {
        #[command(flatten)]
        opts: BenchOpts,
        #[arg(long, default_value_t = 2)]
        windows: usize,
        #[arg(long, default_value_t = 2)]
        length_fanout: usize,
    },
    /// Chain of forks, one window of `--window` samples
    Forkcascade {
        #[command(flatten)]
        opts: BenchOpts,
        #[arg(long, default_value_t = 6)]
        forks: usize,
        #[arg(long, default_value_t = 2)]
        fanout: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_pafg(path: &Path, lib: &ActorLibrary) -> Result<CoordinatedPafg> {
    parse_pafg_file(&read(path)?, lib).with_context(|| format!("in {}", path.display()))
}

fn load_inputs(z: &CoordinatedPafg, lib: &ActorLibrary, dir: &Path) -> Result<IoBindings> {
    let mut io = IoBindings::new();
    for decl in z.source().actors() {
        if lib.instantiate_active(decl)?.io_role() != IoRole::Source {
            continue;
        }
        let layout = lib.layout(decl)?;
        let ty = match layout.outputs.as_slice() {
            [only] => only.ty.unwrap_or(TokenType::F64),
            _ => TokenType::F64,
        };
        let path = dir.join(format!("{}.txt", decl.name));
        let tokens = read_samples(&read(&path)?, ty).with_context(|| format!("in {}", path.display()))?;
        io = io.input(decl.name.clone(), tokens);
    }
    Ok(io)
}

fn print_bench(report: &BenchReport, stats: Option<&Path>) -> Result<()> {
    for step in &report.log.steps {
        println!("{step}");
    }
    println!("streams_equal: {}", report.comparison.equal);
    for (label, s) in [("direct", &report.direct), ("optimized", &report.optimized)] {
        println!(
            "{label}: sink_tokens={} token_stores={} bmr_bytes={} throughput_sps={:.0}",
            s.sink_tokens, s.token_stores, s.bmr_bytes, s.throughput_sps
        );
    }
    if let Some(path) = stats {
        write(path, &serde_json::to_string_pretty(&report.stats_json())?)?;
    }
    if let Some(d) = &report.comparison.divergence {
        bail!(
            "sink `{}` diverges at index {}: direct {:?}, optimized {:?}",
            d.sink,
            d.index,
            d.a,
            d.b
        );
    }
    Ok(())
}

fn execute(cmd: Cmd) -> Result<()> {
    let lib = ActorLibrary::standard();
    match cmd {
        Cmd::Validate { graph } => {
            let g = parse_graph_file(&read(&graph)?, &lib)?;
            println!("ok: {} actors, {} edges", g.actor_count(), g.edge_count());
        }
        Cmd::Derive { graph, output } => {
            let g = parse_graph_file(&read(&graph)?, &lib)?;
            let z = derive_direct_pafg(g, &lib)?;
            write(&output, &serialize_pafg(&z))?;
            println!("{} blocks, {} edges", z.pafg().block_count(), z.pafg().edge_count());
        }
        Cmd::Candidates { pafg } => {
            let z = load_pafg(&pafg, &lib)?;
            for c in find_candidates(&z) {
                let removed: Vec<_> = c.removed.into_iter().collect();
                println!("{} removes {}", c.block, removed.join(","));
            }
        }
        Cmd::Passivize { pafg, which, output } => {
            let z = load_pafg(&pafg, &lib)?;
            let policy = if which.auto {
                PassivizationPolicy::Auto
            } else {
                PassivizationPolicy::List(which.blocks)
            };
            let (p, log) = passivize_fixpoint(&z, &policy)?;
            print!("{log}");
            write(&output, &serialize_pafg(&p))?;
        }
        Cmd::Analyze { pafg } => {
            let z = load_pafg(&pafg, &lib)?;
            let bmr = compute_bmr(&z)?;
            for (block, bytes) in &bmr.per_block {
                println!("block {block} {bytes}");
            }
            println!("bmr_bytes: {}", bmr.total_bytes);
            println!("alternating: {}", is_alternating(&z));
            println!("abc: {}", check_abc(&z));
        }
        Cmd::Run {
            pafg,
            inputs,
            outputs,
            stop,
            stats,
        } => {
            let z = load_pafg(&pafg, &lib)?;
            let io = load_inputs(&z, &lib, &inputs)?;
            let mut inst = instantiate(&z, &lib, &io)?;
            let stop = match (stop.sink_tokens, stop.iterations) {
                (Some(n), _) => StopCondition::SinkTokens(n),
                (_, Some(n)) => StopCondition::Iterations(n),
                _ => unreachable!("clap enforces one stop condition"),
            };
            let s = inst.run(stop)?;
            fs::create_dir_all(&outputs)
                .with_context(|| format!("creating {}", outputs.display()))?;
            for (sink, tokens) in inst.sink_streams() {
                write(&outputs.join(format!("{sink}.txt")), &write_samples(&tokens))?;
            }
            let json = serde_json::to_string_pretty(&s)?;
            match stats {
                Some(path) => write(&path, &json)?,
                None => println!("{json}"),
            }
        }
        Cmd::Bench { app } => match app {
            BenchApp::Evm {
                opts,
                windows,
                length_fanout,
            } => {
                let mut cfg = evm::EvmConfig::new(vec![opts.window as i64; windows]);
                cfg.length_fanout = length_fanout;
                let inputs = evm::EvmInputs::random(&cfg, &mut Lcg::new(opts.seed));
                let g = evm::build_evm_graph(&cfg, &lib)?;
                let io = evm::io_bindings(&cfg, &inputs)?;
                let stop = StopCondition::SinkTokens(evm::expected_sink_tokens(&cfg));
                let report = run_direct_and_optimized(g, &lib, &io, stop)?;
                print_bench(&report, opts.stats.as_deref())?;
            }
            BenchApp::Forkcascade {
                opts,
                forks,
                fanout,
            } => {
                let mut cfg = forkcascade::ForkCascadeConfig::new(opts.window);
                cfg.forks = forks;
                cfg.fanout = fanout;
                let g = forkcascade::build_fork_cascade(&cfg, &lib)?;
                let io = forkcascade::io_bindings(opts.window, &mut Lcg::new(opts.seed));
                let stop = StopCondition::SinkTokens((cfg.sink_count() * opts.window) as u64);
                let report = run_direct_and_optimized(g, &lib, &io, stop)?;
                print_bench(&report, opts.stats.as_deref())?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
