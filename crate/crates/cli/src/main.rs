use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use repack_core::coloring::ColoringStrategy;
use repack_core::eptas::approx_repack_with;
use repack_core::gadget::{assemble_instance, parse_embedding, parse_graph, TileConstants};
use repack_core::geom::Tolerance;
use repack_core::io::{parse_instance, parse_witness, render_svg, serialize_instance, serialize_witness, verify_witness, Instance};
use repack_core::oracle::{brute_force_decide, gen_corridor, gen_grid, BruteAnswer, GroundTruthInstance};
use repack_core::pipeline::{solve_with, Answer, SolveOptions};

#[derive(Parser)]
#[command(name = "repack", version, about = "Disk repacking: decide, approximate, generate and verify")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance> {
        let d = Tolerance::default();
        let t = Tolerance { tau: self.tau.unwrap_or(d.tau), sigma: self.sigma.unwrap_or(d.sigma), delta: self.delta.unwrap_or(d.delta) };
        if !t.is_valid() {
            bail!("invalid tolerances: need 0 < tau < sigma and delta > 0 (got tau={}, sigma={}, delta={})", t.tau, t.sigma, t.delta);
        }
        Ok(t)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the instance exactly (at kernel resolution) and write a witness on YES.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add as many disks as the shifting scheme (or the exact solver) finds.
    Approx {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate instances.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Check a witness against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Draw an instance (and optionally a witness) as SVG.
    Render {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid brute force; the answer is qualified by the grid pitch `--delta`.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Odd-grid packing in [0,2a]x[0,2b] with some cells left empty.
    Grid {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        /// Empty cells as `i,j;i,j;...`.
        #[arg(long, default_value = "")]
        holes: String,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the known-answer table next to the instance.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Disks on the line x=1 of a [0,2]x[0,L] strip.
    Corridor {
        #[arg(long)]
        length: f64,
        /// Centers as `y1,y2,...`.
        #[arg(long)]
        ys: String,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Hardness gadget for a cubic planar graph with a rectilinear embedding.
    Gadget {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        emb: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-6)]
        round: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn load_instance(path: &Path, tol: &Tolerance) -> Result<Instance> {
    parse_instance(&read(path)?, tol).with_context(|| format!("bad instance {}", path.display()))
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (i, j) = p.split_once(',').with_context(|| format!("expected i,j in {p:?}"))?;
            Ok((i.trim().parse()?, j.trim().parse()?))
        })
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| Ok(p.trim().parse::<f64>()?)).collect()
}

fn write_generated(g: &GroundTruthInstance, h: Option<usize>, k: Option<usize>, out: &Path, manifest: Option<&Path>) -> Result<()> {
    let inst = g.instance.with_budgets(h.unwrap_or(g.instance.h), k.unwrap_or(g.instance.k));
    write(out, &serialize_instance(&inst))?;
    if let Some(m) = manifest {
        let json = serde_json::to_vec_pretty(&g.known).context("serializing known answers")?;
        write(m, &json)?;
    }
    println!("{}: {} disks in {}x{}", g.name, inst.disks.len(), inst.rect.a, inst.rect.b);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let tol = cli.tol.tolerance()?;
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        repack_core::par::set_jobs(n);
    }
    match cli.cmd {
        Command::Solve { instance, mode, samples, seed, h, k, out } => {
            if samples == 0 {
                bail!("--samples must be positive");
            }
            let base = load_instance(&instance, &tol)?;
            let inst = base.with_budgets(h.unwrap_or(base.h), k.unwrap_or(base.k));
            let strategy = match mode {
                Mode::Exhaustive => ColoringStrategy::Exhaustive,
                Mode::Randomized => ColoringStrategy::Randomized { samples, seed },
            };
            let report = solve_with(&inst, &SolveOptions { strategy, tol, seed, ..SolveOptions::default() })?;
            match report.answer {
                Answer::Yes(w) => {
                    println!("YES");
                    if let Some(o) = out {
                        write(&o, &serialize_witness(&w))?;
                    }
                    Ok(0)
                }
                Answer::No => {
                    println!("NO");
                    Ok(2)
                }
                Answer::NoHeuristic => {
                    println!("NO-HEURISTIC");
                    Ok(2)
                }
            }
        }
        Command::Approx { instance, eps, seed, h, out } => {
            if !(eps > 0.0 && eps < 1.0) {
                bail!("--eps must lie in (0, 1)");
            }
            let base = load_instance(&instance, &tol)?;
            let inst = base.with_budgets(h.unwrap_or(base.h), base.k);
            let report = approx_repack_with(&inst, eps, seed, &tol)?;
            println!("{} added ({:?})", report.added.len(), report.source);
            if let Some(o) = out {
                write(&o, &serialize_witness(&report.witness()))?;
            }
            Ok(0)
        }
        Command::Gen { kind } => {
            match kind {
                GenKind::Grid { a, b, holes, h, k, out, manifest } => {
                    let g = gen_grid(a, b, &parse_pairs(&holes)?)?;
                    write_generated(&g, h, k, &out, manifest.as_deref())?;
                }
                GenKind::Corridor { length, ys, h, k, out, manifest } => {
                    let g = gen_corridor(length, &parse_floats(&ys)?)?;
                    write_generated(&g, h, k, &out, manifest.as_deref())?;
                }
                GenKind::Gadget { graph, emb, k, round, out } => {
                    let graph = parse_graph(&read(&graph)?)?;
                    let emb = parse_embedding(&read(&emb)?)?;
                    let consts = TileConstants::rounded(round);
                    let inst = assemble_instance(&graph, &emb, k, &consts)?;
                    write(&out, &serialize_instance(&inst))?;
                    println!("gadget: {} disks in {}x{}, k' = {}", inst.disks.len(), inst.rect.a, inst.rect.b, inst.k);
                }
            }
            Ok(0)
        }
        Command::Verify { instance, witness } => {
            let inst = load_instance(&instance, &tol)?;
            let w = parse_witness(&read(&witness)?).with_context(|| format!("bad witness {}", witness.display()))?;
            match verify_witness(&inst, &w, &tol) {
                Ok(()) => {
                    println!("OK");
                    Ok(0)
                }
                Err(report) => {
                    println!("{report}");
                    Ok(1)
                }
            }
        }
        Command::Render { instance, witness, out } => {
            let inst = load_instance(&instance, &tol)?;
            let w = match witness {
                Some(p) => Some(parse_witness(&read(&p)?)?),
                None => None,
            };
            write(&out, &render_svg(&inst, w.as_ref()))?;
            Ok(0)
        }
        Command::Oracle { instance, h, k, out } => {
            let base = load_instance(&instance, &tol)?;
            let inst = base.with_budgets(h.unwrap_or(base.h), k.unwrap_or(base.k));
            match brute_force_decide(&inst, tol.delta)? {
                BruteAnswer::Yes(w) => {
                    println!("YES (grid {})", tol.delta);
                    if let Some(o) = out {
                        write(&o, &serialize_witness(&w))?;
                    }
                    Ok(0)
                }
                BruteAnswer::NoAtResolution => {
                    println!("NO at grid {}", tol.delta);
                    Ok(2)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
