//! Single-binary front end: generation, partitioning, verification, counting
//! and the refinement-pressure experiment, with reproducible seeded runs and
//! JSON reports that embed their full configuration.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use regal_core::error::Error as CoreError;
use regal_core::lb::{self, BuildParams};
use regal_core::partition::Partition;
use regal_core::ratio::{parse_rat, Rat};
use regal_core::regularity::{self, Mode, VerifierConfig};
use regal_core::report::{Report, RunConfig};
use regal_core::sral::FnSpec;
use regal_core::{counting, gen, weakreg, DenseGraph, VertexSet};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "regal", version, about = "Graph-regularity toolkit: partitions, potentials, perturbation and blow-up constructions with exact verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; all randomness derives from it through named paths.
    #[arg(long, global = true, default_value_t = 0, env = "REGAL_SEED")]
    seed: u64,

    /// Verification mode for subset searches.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Sampled, env = "REGAL_MODE")]
    mode: ModeArg,

    /// Enumerated-side cap for exact pair scans.
    #[arg(long, global = true, default_value_t = 18, env = "REGAL_EXACT_THRESHOLD")]
    exact_threshold: usize,

    /// Candidate budget for sampled searches.
    #[arg(long, global = true, default_value_t = 20_000, env = "REGAL_SAMPLES")]
    samples: usize,

    /// Worker threads (0 = all cores). Verdicts are identical for any count.
    #[arg(long, global = true, default_value_t = 0, env = "REGAL_WORKERS")]
    workers: usize,

    /// Output directory for reports and artifacts.
    #[arg(long, global = true, default_value = "out", env = "REGAL_OUT")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Sampled => Mode::Sampled,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random graph (optionally bipartite).
    GenRandom {
        #[arg(long)]
        n: usize,
        /// Edge probability as an exact rational ("1/8" or "0.125").
        #[arg(long)]
        density: String,
        /// Make the graph bipartite with this many left-side vertices.
        #[arg(long)]
        bipartite: Option<usize>,
    },
    /// Build an iterated modified-blow-up construction and verify its claims.
    GenLb {
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 4)]
        n0: usize,
        /// Per-level inflation factor.
        #[arg(long, default_value_t = 4)]
        nr: usize,
        /// Orthogonality target per level (default: record achieved only).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 1)]
        final_blowup: usize,
        /// Use the source regime's parameters (refuses beyond the vertex cap).
        #[arg(long, default_value_t = false)]
        paper_exact: bool,
    },
    /// Build the multicolored decomposition of the complete bipartite graph.
    GenMulticolor {
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 4)]
        n0: usize,
        #[arg(long, default_value_t = 4)]
        nr: usize,
    },
    /// Run the weak regularizer on a graph.
    Weakreg {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: String,
        /// Seed partition file; defaults to an equitable partition of
        /// `--p0-order` classes.
        #[arg(long)]
        p0: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        p0_order: usize,
    },
    /// Run the regular-approximation pipeline.
    Sral {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        delta: String,
        /// Regularity schedule, e.g. const:0.3, pow:1:1, log:0.5.
        #[arg(long, conflicts_with = "eps_file")]
        f: Option<String>,
        /// File containing the schedule spec.
        #[arg(long)]
        eps_file: Option<PathBuf>,
        #[arg(long)]
        p0: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        p0_order: usize,
    },
    /// Verify a regularity property; exit 0 if it holds, 1 if not.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Count pattern copies in a clustered graph.
    Count {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Cluster partition; defaults to bipartite sides.
        #[arg(long)]
        clusters: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CountModeArg::Induced)]
        count_mode: CountModeArg,
    },
    /// Partition a construction and report how deep it approximately refines
    /// the level tower (exploratory output).
    Experiment {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long, default_value = "0.3")]
        eps: String,
        /// Randomly edit this fraction of edges before partitioning.
        #[arg(long, default_value = "0")]
        edit_fraction: String,
        #[arg(long, default_value_t = 2)]
        p0_order: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// ε-regularity of a pair: bipartite sides, or two classes of a partition.
    Pair {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        class_a: usize,
        #[arg(long, default_value_t = 1)]
        class_b: usize,
    },
    /// ε-regularity of a partition (count and weighted criteria).
    Partition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Weighted-deviation weak regularity of a partition.
    Weak {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Bipartite weak regularity (partition classes split by the sides).
    WeakBip {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Multiplicative (density-relative) regularity of a bipartite graph.
    Super {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Codegree quasirandomness of a regular bipartite graph.
    Quasirandom {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        delta: String,
    },
    /// Re-run the structural claim suite on a saved construction artifact.
    Claims {
        #[arg(long)]
        artifact: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountModeArg {
    Induced,
    Noninduced,
    Fcopy,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.workers)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<CoreError>() {
                Some(CoreError::Capability(_)) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn verifier_config(c: &Common) -> VerifierConfig {
    VerifierConfig {
        exact_pair_side: c.exact_threshold,
        samples: c.samples,
        seed: c.seed,
        ..Default::default()
    }
}

fn run_config(c: &Common, command: &str, args: BTreeMap<String, String>) -> RunConfig {
    RunConfig {
        command: command.into(),
        args,
        seed: c.seed,
        mode: match c.mode {
            ModeArg::Exact => "exact".into(),
            ModeArg::Sampled => "sampled".into(),
        },
        workers: c.workers,
        exact_threshold: c.exact_threshold,
        samples: c.samples,
    }
}

fn rat_arg(s: &str, what: &str) -> anyhow::Result<Rat> {
    parse_rat(s).ok_or_else(|| anyhow!("{what} must be a rational like 1/8 or 0.125 (got {s:?})"))
}

fn load_graph(path: &Path) -> anyhow::Result<DenseGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(DenseGraph::parse(&text)?)
}

fn load_partition(path: &Path) -> anyhow::Result<Partition> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(Partition::parse(&text)?)
}

fn write_report<T: serde::Serialize>(out: &Path, cfg: RunConfig, payload: T) -> anyhow::Result<()> {
    std::fs::create_dir_all(out)?;
    let report = Report::new(cfg, payload);
    std::fs::write(out.join("report.json"), report.to_json())?;
    Ok(())
}

/// Returns Ok(verdict) where false maps to exit code 1.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let common = cli.common.clone();
    let cfg = verifier_config(&common);
    let mode: Mode = common.mode.into();
    match cli.command {
        Command::GenRandom { n, density, bipartite } => {
            let p = rat_arg(&density, "--density")?;
            let mut args = BTreeMap::new();
            args.insert("n".into(), n.to_string());
            args.insert("density".into(), density.clone());
            let g = match bipartite {
                Some(nu) => {
                    args.insert("bipartite".into(), nu.to_string());
                    if nu == 0 || nu >= n {
                        return Err(anyhow!("--bipartite must be between 1 and n-1"));
                    }
                    gen::gnp_bipartite(nu, n - nu, &p, common.seed)?
                }
                None => gen::gnp(n, &p, common.seed)?,
            };
            std::fs::create_dir_all(&common.out)?;
            std::fs::write(common.out.join("graph.txt"), g.to_text())?;
            write_report(
                &common.out,
                run_config(&common, "gen-random", args),
                json!({
                    "n": g.n(),
                    "edges": g.edge_count(),
                    "global_density": regal_core::ratio::to_f64(&g.global_density()),
                }),
            )?;
            println!("wrote {} ({} vertices, {} edges)", common.out.join("graph.txt").display(), g.n(), g.edge_count());
            Ok(true)
        }
        Command::GenLb { s, n0, nr, alpha, final_blowup, paper_exact } => {
            let mut params = if paper_exact {
                BuildParams::paper_exact(s, common.seed)?
            } else {
                let mut p = BuildParams::desk(s, n0, nr, common.seed);
                p.final_blowup = final_blowup;
                if let Some(a) = &alpha {
                    rat_arg(a, "--alpha")?;
                    p.alpha_targets = Some(vec![a.clone(); s]);
                }
                p
            };
            params.seed = common.seed;
            let c = lb::build_construction(&params, &cfg)?;
            let claims = lb::verify_construction_claims(&c, &cfg)?;
            lb::save_artifact(&c, &claims, &common.out)?;
            let mut args = BTreeMap::new();
            args.insert("s".into(), s.to_string());
            args.insert("n0".into(), params.n0.to_string());
            args.insert("nr".into(), nr.to_string());
            args.insert("final_blowup".into(), final_blowup.to_string());
            write_report(
                &common.out,
                run_config(&common, "gen-lb", args),
                json!({
                    "vertices": c.graph.n(),
                    "edges": c.graph.edge_count(),
                    "density": regal_core::ratio::to_f64(&c.density()),
                    "levels": c.levels.iter().map(|l| l.order()).collect::<Vec<_>>(),
                    "claims_pass": claims.all_pass(),
                }),
            )?;
            println!(
                "artifact in {} ({} vertices, density 2^-{s}, claims {})",
                common.out.display(),
                c.graph.n(),
                if claims.all_pass() { "all-pass" } else { "FAILED" }
            );
            Ok(claims.all_pass())
        }
        Command::GenMulticolor { s, n0, nr } => {
            let params = BuildParams::desk(s, n0, nr, common.seed);
            let mc = lb::build_multicolored(&params, &cfg)?;
            lb::save_multicolor(&mc, &common.out)?;
            let mut args = BTreeMap::new();
            args.insert("s".into(), s.to_string());
            args.insert("n0".into(), n0.to_string());
            args.insert("nr".into(), nr.to_string());
            let ok = mc.union_is_complete && mc.colors_disjoint;
            write_report(
                &common.out,
                run_config(&common, "gen-multicolor", args),
                json!({
                    "colors": mc.colors.len(),
                    "union_is_complete": mc.union_is_complete,
                    "colors_disjoint": mc.colors_disjoint,
                    "per_color_density": mc.colors.iter().map(|c| regal_core::ratio::to_f64(&c.density())).collect::<Vec<_>>(),
                }),
            )?;
            println!(
                "{} colors, union complete: {}, disjoint: {}",
                mc.colors.len(),
                mc.union_is_complete,
                mc.colors_disjoint
            );
            Ok(ok)
        }
        Command::Weakreg { graph, eps, p0, p0_order } => {
            let g = load_graph(&graph)?;
            let e = rat_arg(&eps, "--eps")?;
            let seed_part = match p0 {
                Some(p) => load_partition(&p)?,
                None => Partition::equitable_blocks(g.n(), p0_order)?,
            };
            let run = weakreg::weak_regularize(&g, &seed_part, &e, mode, &cfg)?;
            std::fs::create_dir_all(&common.out)?;
            std::fs::write(common.out.join("final.part"), run.final_partition.to_text())?;
            let mut args = BTreeMap::new();
            args.insert("graph".into(), graph.display().to_string());
            args.insert("eps".into(), eps.clone());
            args.insert("p0_order".into(), seed_part.order().to_string());
            let order = run.final_partition.order();
            let iters = run.iterations.len();
            write_report(&common.out, run_config(&common, "weakreg", args), &run)?;
            println!(
                "{} iterations, final order {}, terminated by {:?}",
                iters, order, run.terminated_by
            );
            Ok(true)
        }
        Command::Sral { graph, delta, f, eps_file, p0, p0_order } => {
            let g = load_graph(&graph)?;
            let d = rat_arg(&delta, "--delta")?;
            let spec_str = match (f, eps_file) {
                (Some(s), None) => s,
                (None, Some(p)) => std::fs::read_to_string(&p)
                    .with_context(|| format!("reading {p:?}"))?
                    .trim()
                    .to_string(),
                _ => return Err(anyhow!("supply exactly one of --f or --eps-file")),
            };
            let f_fn = FnSpec::parse(&spec_str)?;
            let seed_part = match p0 {
                Some(p) => load_partition(&p)?,
                None => Partition::equitable_blocks(g.n(), p0_order)?,
            };
            let result = regal_core::sral::sral(&g, &seed_part, &d, &f_fn, common.seed, mode, &cfg)?;
            std::fs::create_dir_all(&common.out)?;
            std::fs::write(common.out.join("edited_graph.txt"), result.edited_graph.to_text())?;
            std::fs::write(common.out.join("final.part"), result.final_partition.to_text())?;
            let mut args = BTreeMap::new();
            args.insert("graph".into(), graph.display().to_string());
            args.insert("delta".into(), delta.clone());
            args.insert("f".into(), spec_str.clone());
            let ok = result.all_pairs_regular && result.edit_fraction <= regal_core::ratio::to_f64(&d);
            let summary = format!(
                "order {}, {} edits ({:.4} of edges), pairs regular: {}",
                result.order, result.edit_count, result.edit_fraction, result.all_pairs_regular
            );
            write_report(&common.out, run_config(&common, "sral", args), &result)?;
            println!("{summary}");
            Ok(ok)
        }
        Command::Verify { check } => run_verify(check, &common, mode, &cfg),
        Command::Count { pattern, graph, clusters, count_mode } => {
            let g = load_graph(&graph)?;
            let pat_text =
                std::fs::read_to_string(&pattern).with_context(|| format!("reading {pattern:?}"))?;
            let pat = counting::PatternGraph::parse(&pat_text)?;
            let cluster_sets: Vec<VertexSet> = match clusters {
                Some(p) => load_partition(&p)?.classes().to_vec(),
                None => {
                    let (u, v) =
                        g.sides().ok_or_else(|| anyhow!("graph is not bipartite; supply --clusters"))?;
                    vec![u, v]
                }
            };
            let m = match count_mode {
                CountModeArg::Induced => counting::CountMode::Induced,
                CountModeArg::Noninduced => counting::CountMode::NonInduced,
                CountModeArg::Fcopy => counting::CountMode::FCopy,
            };
            let count = counting::count_copies(&pat, &g, &cluster_sets, m)?;
            let mut args = BTreeMap::new();
            args.insert("pattern".into(), pattern.display().to_string());
            args.insert("graph".into(), graph.display().to_string());
            write_report(
                &common.out,
                run_config(&common, "count", args),
                json!({"count": count.to_string(), "mode": format!("{m:?}")}),
            )?;
            println!("{count}");
            Ok(true)
        }
        Command::Experiment { artifact, eps, edit_fraction, p0_order } => {
            let c = lb::load_construction(&artifact)?;
            let e = rat_arg(&eps, "--eps")?;
            let frac = rat_arg(&edit_fraction, "--edit-fraction")?;
            let frac_f = regal_core::ratio::to_f64(&frac);
            let target = if frac_f > 0.0 {
                lb::random_edit(&c.graph, frac_f, regal_core::seed::derive(common.seed, "experiment-edit"))?
            } else {
                c.graph.clone()
            };
            let p0 = Partition::equitable_blocks(target.n(), p0_order)?;
            let run = weakreg::weak_regularize(&target, &p0, &e, mode, &cfg)?;
            let report = lb::refinement_pressure_experiment(&c, &run.final_partition, frac_f)?;
            let mut args = BTreeMap::new();
            args.insert("artifact".into(), artifact.display().to_string());
            args.insert("eps".into(), eps.clone());
            args.insert("edit_fraction".into(), edit_fraction.clone());
            for curve in &report.curves {
                println!(
                    "level {:>2} (order {:>6}): min γ = {:.4}",
                    curve.level, curve.level_order, curve.min_gamma
                );
            }
            write_report(&common.out, run_config(&common, "experiment", args), &report)?;
            Ok(true)
        }
    }
}

fn run_verify(
    check: VerifyCommand,
    common: &Common,
    mode: Mode,
    cfg: &VerifierConfig,
) -> anyhow::Result<bool> {
    let (name, verdict, payload): (&str, bool, serde_json::Value) = match check {
        VerifyCommand::Pair { graph, eps, partition, class_a, class_b } => {
            let g = load_graph(&graph)?;
            let e = rat_arg(&eps, "--eps")?;
            let (a, b) = match partition {
                Some(p) => {
                    let part = load_partition(&p)?;
                    if class_a >= part.order() || class_b >= part.order() {
                        return Err(anyhow!("class index out of range"));
                    }
                    (part.class(class_a).clone(), part.class(class_b).clone())
                }
                None => g.sides().ok_or_else(|| anyhow!("graph is not bipartite; supply --partition"))?,
            };
            let v = regularity::check_pair_regular(&g, &a, &b, &e, mode, cfg)?;
            ("pair", v.regular, serde_json::to_value(&v)?)
        }
        VerifyCommand::Partition { graph, partition, eps } => {
            let g = load_graph(&graph)?;
            let part = load_partition(&partition)?;
            let e = rat_arg(&eps, "--eps")?;
            let v = regularity::check_partition_regular(&g, &part, &e, mode, cfg)?;
            ("partition", v.count_criterion || v.weighted_criterion, serde_json::to_value(&v)?)
        }
        VerifyCommand::Weak { graph, partition, eps } => {
            let g = load_graph(&graph)?;
            let part = load_partition(&partition)?;
            let e = rat_arg(&eps, "--eps")?;
            let v = regularity::check_weak_regular(&g, &part, &e, mode, cfg)?;
            ("weak", v.regular, serde_json::to_value(&v)?)
        }
        VerifyCommand::WeakBip { graph, partition, eps } => {
            let g = load_graph(&graph)?;
            let part = load_partition(&partition)?;
            let e = rat_arg(&eps, "--eps")?;
            let (u, v_side) =
                g.sides().ok_or_else(|| anyhow!("graph is not bipartite"))?;
            let a_classes = part.restrict_to(&u);
            let b_classes = part.restrict_to(&v_side);
            let v = regularity::check_weak_regular_bipartite(&g, &a_classes, &b_classes, &e, mode, cfg)?;
            ("weak-bip", v.regular, serde_json::to_value(&v)?)
        }
        VerifyCommand::Super { graph, eps } => {
            let g = load_graph(&graph)?;
            let e = rat_arg(&eps, "--eps")?;
            let v = regularity::check_super_regular(&g, &e, mode, cfg)?;
            ("super", v.regular, serde_json::to_value(&v)?)
        }
        VerifyCommand::Quasirandom { graph, p, delta } => {
            let g = load_graph(&graph)?;
            let pv = rat_arg(&p, "--p")?;
            let dv = rat_arg(&delta, "--delta")?;
            let v = regularity::check_quasirandom(&g, &pv, &dv)?;
            ("quasirandom", v.quasirandom, serde_json::to_value(&v)?)
        }
        VerifyCommand::Claims { artifact } => {
            let c = lb::load_construction(&artifact)?;
            let claims = lb::verify_construction_claims(&c, cfg)?;
            ("claims", claims.all_pass(), serde_json::to_value(&claims)?)
        }
    };
    let mut args = BTreeMap::new();
    args.insert("check".into(), name.to_string());
    let report = Report::new(run_config(common, &format!("verify {name}"), args), &payload);
    let text = report.to_json();
    print!("{text}");
    std::fs::create_dir_all(&common.out)?;
    std::fs::write(common.out.join("report.json"), text)?;
    Ok(verdict)
}
