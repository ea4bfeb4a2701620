use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use linext::chain::{normalized_product_weights, stationary_solve, stationary_weight};
use linext::mixing::{check_convergence_bound, mixing_time_upper, simulate_walk};
use linext::monoid::{generate_monoid, generators_of, Product, DEFAULT_MONOID_CAP};
use linext::spectral::{predicted_spectrum, probe_linear_spectrum, verify_spectrum_report, ProbeOptions, VerifyOptions};
use linext::subsets::{subset_stationary, summarize, NetworkTarget};
use linext::{
    parse_poset, run_sweep, sorting_network_union, transition_matrix, verify_master_equation, Family, LinearForm,
    Mode, PermSubset, Poset, PromotionSystem, SweepConfig, WeightVector, Word,
};

mod report;

use report::{Outcome, Report};

#[derive(Parser)]
#[command(name = "linext", version, about = "Promotion Markov chains on linear extensions of posets")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Promotion,
    Uniform,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Promotion => Mode::Promotion,
            ModeArg::Uniform => Mode::Uniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductArg {
    Matrix,
    Action,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    All,
    RootedForests,
    NonForests,
}

#[derive(Subcommand)]
enum Command {
    /// List the linear extensions of a poset.
    Extensions { poset: PathBuf },
    /// Print the transition matrix, symbolically or at given weights.
    Matrix {
        poset: PathBuf,
        #[arg(long, value_enum, default_value = "promotion")]
        mode: ModeArg,
        #[arg(long)]
        weights: Option<String>,
    },
    /// Product-formula weights, checked against an exact solve when weights are given.
    Stationary {
        poset: PathBuf,
        #[arg(long, value_enum, default_value = "promotion")]
        mode: ModeArg,
        #[arg(long)]
        weights: Option<String>,
    },
    /// Predicted spectrum for rooted forests, or a linear-factor probe.
    Spectrum {
        poset: PathBuf,
        #[arg(long)]
        probe: bool,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// The promotion monoid and its Green's classes.
    Monoid {
        poset: PathBuf,
        /// Write the egg-box picture as DOT.
        #[arg(long)]
        eggbox: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "matrix")]
        product: ProductArg,
        #[arg(long, default_value_t = DEFAULT_MONOID_CAP)]
        cap: usize,
    },
    /// Exact total-variation decay against the convergence bound.
    Mix {
        poset: PathBuf,
        #[arg(long)]
        weights: String,
        #[arg(long)]
        kmax: Option<u64>,
        /// Write `k,tv_exact,bound` rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also run a seeded random walk of this many steps.
        #[arg(long)]
        simulate: Option<usize>,
    },
    /// Promotion on a subset of the symmetric group.
    Subset {
        /// File with one permutation per line.
        file: Option<PathBuf>,
        /// Comma-separated targets of a sorting-network union.
        #[arg(long, value_delimiter = ',', conflicts_with = "file")]
        targets: Vec<String>,
        /// Read the targets as one explicit chain from the identity.
        #[arg(long, requires = "targets")]
        chain: bool,
        #[arg(long, value_enum, default_value = "promotion")]
        mode: ModeArg,
        #[arg(long)]
        weights: Option<String>,
    },
    /// Exhaustive verification over a poset family.
    Sweep {
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The promotion graph as DOT.
    Graph {
        poset: PathBuf,
        #[arg(long, value_enum, default_value = "promotion")]
        mode: ModeArg,
        #[arg(long)]
        no_loops: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = if cli.json { outcome.json } else { outcome.text };
            let result = match &outcome.out {
                Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = result {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_poset(path: &Path) -> Result<Poset> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_poset(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_weights(text: &str, n: usize) -> Result<WeightVector> {
    WeightVector::parse(text, n).with_context(|| format!("weights {text:?}"))
}

fn sample_weights(n: usize, samples: usize, seed: u64) -> Vec<WeightVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| WeightVector::random_normalized(n, &mut rng)).collect()
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Promotion => "promotion",
        Mode::Uniform => "uniform",
    }
}

fn words(ws: &[Word]) -> Vec<String> {
    ws.iter().map(Word::to_string).collect()
}

fn run(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Extensions { poset } => {
            let p = load_poset(poset)?;
            let ext = words(&p.linear_extensions()?);
            let mut text = format!("{} extension{}:\n", ext.len(), if ext.len() == 1 { "" } else { "s" });
            for e in &ext {
                let _ = writeln!(text, "{e}");
            }
            Report::new("extensions", seed)
                .input("poset", poset.display())
                .finish(text, json!({ "poset": p.encoding(), "extensions": ext }), true)
        }

        Command::Matrix { poset, mode, weights } => {
            let p = load_poset(poset)?;
            let mode = Mode::from(*mode);
            let m = transition_matrix(&p, mode)?;
            let report = Report::new("matrix", seed).input("poset", poset.display()).flag("mode", mode_name(mode));
            match weights {
                None => report.finish(m.to_text(), m.to_json(), true),
                Some(wt) => {
                    let w = parse_weights(wt, p.size())?;
                    let dense = m.evaluate(&w)?.to_dense();
                    let cells: Vec<Vec<String>> =
                        dense.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
                    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
                    let mut text = format!("basis: {}\n", words(m.basis()).join(" "));
                    for row in &cells {
                        let padded: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
                        let _ = writeln!(text, "{}", padded.join("  ").trim_end());
                    }
                    report.flag("weights", &w).finish(
                        text,
                        json!({ "mode": mode_name(mode), "basis": m.basis(), "entries": cells }),
                        true,
                    )
                }
            }
        }

        Command::Stationary { poset, mode, weights } => {
            let p = load_poset(poset)?;
            let mode = Mode::from(*mode);
            let sys = PromotionSystem::from_poset(&p)?;
            let report = Report::new("stationary", seed).input("poset", poset.display()).flag("mode", mode_name(mode));
            let formulas: Vec<String> = match mode {
                Mode::Promotion => sys
                    .states()
                    .iter()
                    .map(|pi| stationary_weight(&p, pi).map(|w| w.to_string()))
                    .collect::<linext::Result<_>>()?,
                Mode::Uniform => vec![format!("1/{}", sys.len()); sys.len()],
            };
            let mut text = String::new();
            for (pi, f) in sys.states().iter().zip(&formulas) {
                let _ = writeln!(text, "{pi}  {f}");
            }
            let mut payload = json!({ "basis": sys.states(), "formula": formulas });
            let mut ok = true;
            let report = if let Some(wt) = weights {
                let w = parse_weights(wt, p.size())?;
                let solved = stationary_solve(&transition_matrix(&p, mode)?.evaluate(&w)?)?;
                let expected = match mode {
                    Mode::Promotion => normalized_product_weights(sys.states(), &w)?,
                    Mode::Uniform => subset_stationary(&PermSubset::new(sys.states().to_vec())?, Mode::Uniform, &w)?,
                };
                ok = solved == expected;
                let solved_s: Vec<String> = solved.iter().map(ToString::to_string).collect();
                let _ = writeln!(text, "at weights {w}:");
                for (pi, v) in sys.states().iter().zip(&solved_s) {
                    let _ = writeln!(text, "{pi}  {v}");
                }
                let _ = writeln!(text, "matches formula: {ok}");
                payload["solved"] = json!(solved_s);
                payload["matches_formula"] = json!(ok);
                report.flag("weights", &w)
            } else {
                report
            };
            report.finish(text, payload, ok)
        }

        Command::Spectrum { poset, probe, weights, samples } => {
            let p = load_poset(poset)?;
            let report = Report::new("spectrum", seed).input("poset", poset.display());
            if p.is_rooted_forest() && !probe {
                let pred = predicted_spectrum(&p)?;
                let ws = match weights {
                    Some(wt) => vec![parse_weights(wt, p.size())?],
                    None => sample_weights(p.size(), *samples, seed),
                };
                let opts = VerifyOptions { seed, ..VerifyOptions::default() };
                let mut text = String::from("eigenvalue  multiplicity  upper set\n");
                for item in &pred.items {
                    let _ = writeln!(text, "{}  {}  {:?}", item.form, item.multiplicity, item.upper_set);
                }
                let _ = writeln!(text, "total multiplicity: {}", pred.total_multiplicity());
                let mut checks = Vec::new();
                let mut ok = true;
                for w in &ws {
                    let check = verify_spectrum_report(&p, &pred, w, &opts)?;
                    ok &= check.matches;
                    let _ = writeln!(text, "verified at {w}: {}", check.matches);
                    checks.push(json!({ "weights": w.to_string(), "check": check }));
                }
                report.flag("mode", "predicted").finish(text, json!({ "prediction": pred, "checks": checks }), ok)
            } else {
                let opts = ProbeOptions { samples: (*samples).max(2), seed };
                let probe = probe_linear_spectrum(&p, &opts)?;
                let mut text = String::new();
                match &probe.factors {
                    None => text.push_str("nonlinear\n"),
                    Some(factors) => {
                        let total = LinearForm::total(p.size());
                        for f in factors {
                            let shown = if f.coeffs == total { "1".to_string() } else { f.form.clone() };
                            let _ = writeln!(text, "{shown}  {}", f.multiplicity);
                        }
                    }
                }
                report.flag("mode", "probe").finish(text, json!(probe), true)
            }
        }

        Command::Monoid { poset, eggbox, product, cap } => {
            let p = load_poset(poset)?;
            let sys = PromotionSystem::from_poset(&p)?;
            let product = match product {
                ProductArg::Matrix => Product::Matrix,
                ProductArg::Action => Product::Action,
            };
            let m = generate_monoid(&generators_of(&sys), *cap, product)?;
            let classes = m.green_classes();
            let boxes = m.eggbox();
            let shapes: Vec<String> = boxes
                .shapes()
                .iter()
                .map(|s| format!("{}x{}:{}", s.rows, s.cols, s.stars))
                .collect();
            let mut text = format!(
                "R-trivial: {}; {} elements\nL-trivial: {}\naperiodic: {}\nidempotents: {}\nD-classes: {}\n",
                classes.r_trivial(),
                m.len(),
                classes.l_trivial(),
                m.is_aperiodic(),
                m.idempotents().len(),
                classes.d_count(),
            );
            let _ = writeln!(text, "shapes: {}", shapes.join(" "));
            let mut report = Report::new("monoid", seed)
                .input("poset", poset.display())
                .flag("product", if product == Product::Matrix { "matrix" } else { "action" });
            if let Some(path) = eggbox {
                fs::write(path, boxes.to_dot()).with_context(|| format!("writing {}", path.display()))?;
                text.push_str(&boxes.to_ascii());
                report = report.flag("eggbox", path.display());
            }
            report.finish(
                text,
                json!({
                    "elements": m.len(),
                    "r_trivial": classes.r_trivial(),
                    "l_trivial": classes.l_trivial(),
                    "aperiodic": m.is_aperiodic(),
                    "idempotents": m.idempotents().len(),
                    "d_classes": classes.d_count(),
                    "shapes": boxes.shapes(),
                }),
                true,
            )
        }

        Command::Mix { poset, weights, kmax, csv, simulate } => {
            let p = load_poset(poset)?;
            let w = parse_weights(weights, p.size())?;
            let check = check_convergence_bound(&p, &w, *kmax)?;
            let t_mix = mixing_time_upper(p.size(), w.min(), 1)?;
            let mut text = format!(
                "n: {}\np_x: {}\nmixing time bound (c = 1): {}\nk_max: {}\nbound holds: {}\nmonotone decay: {}\n",
                check.n,
                w.min(),
                t_mix,
                check.k_max,
                check.all_hold,
                check.monotone
            );
            if let Some(path) = csv {
                fs::write(path, check.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            } else {
                text.push_str(&check.to_csv());
            }
            let mut payload = json!({ "check": check, "mixing_time_upper": t_mix.to_string() });
            let mut report = Report::new("mix", seed).input("poset", poset.display()).flag("weights", &w);
            if let Some(steps) = simulate {
                let walk = simulate_walk(&p, &w, *steps, seed)?;
                let target = normalized_product_weights(PromotionSystem::from_poset(&p)?.states(), &w)?;
                let tv: f64 = walk
                    .empirical
                    .iter()
                    .zip(&target)
                    .map(|(e, t)| (e - num_traits::ToPrimitive::to_f64(t).unwrap_or(f64::NAN)).abs())
                    .sum::<f64>()
                    / 2.0;
                let _ = writeln!(text, "simulated {steps} steps: empirical tv {tv:e}");
                payload["simulation"] = json!({ "steps": steps, "empirical": walk.empirical, "tv": tv });
                report = report.flag("simulate", steps);
            }
            report.finish(text, payload, check.all_hold)
        }

        Command::Subset { file, targets, chain, mode, weights } => {
            let subset = if let Some(path) = file {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                PermSubset::parse(&text).with_context(|| format!("parsing {}", path.display()))?
            } else if !targets.is_empty() {
                let ws: Vec<Word> = targets
                    .iter()
                    .map(|t| t.trim().parse::<Word>().with_context(|| format!("target {t:?}")))
                    .collect::<Result<_>>()?;
                if *chain {
                    sorting_network_union(&[NetworkTarget::chain(ws)?])?
                } else {
                    sorting_network_union(&ws.into_iter().map(NetworkTarget::all_geodesics).collect::<Vec<_>>())?
                }
            } else {
                bail!("give a subset file or --targets");
            };
            let mode = Mode::from(*mode);
            let w = match weights {
                Some(wt) => parse_weights(wt, subset.size())?,
                None => sample_weights(subset.size(), 1, seed).remove(0),
            };
            let summary = summarize(&subset);
            let m = subset.transition_matrix(mode);
            let formula = subset_stationary(&subset, mode, &w)?;
            let master = verify_master_equation(&m, &formula, &w)?;
            let ok = master && (!summary.sorting_network_union || summary.strongly_connected);
            let mut text = format!(
                "size: {}\npermutations: {}\ncontains identity: {}\nsorting network union: {}\nstrongly connected: {}\nbijective promotions: {}\n",
                summary.size,
                words(subset.perms()).join(" "),
                summary.contains_identity,
                summary.sorting_network_union,
                summary.strongly_connected,
                summary.bijective,
            );
            let _ = writeln!(text, "stationary formula satisfies master equation at {w}: {master}");
            let input = match file {
                Some(path) => path.display().to_string(),
                None => targets.join(","),
            };
            Report::new("subset", seed)
                .input("subset", input)
                .flag("mode", mode_name(mode))
                .flag("chain", chain)
                .flag("weights", &w)
                .finish(
                    text,
                    json!({
                        "summary": summary,
                        "permutations": subset.perms(),
                        "formula": formula.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "master_equation": master,
                    }),
                    ok,
                )
        }

        Command::Sweep { nmax, family, samples, out } => {
            let family = match family {
                FamilyArg::All => Family::All,
                FamilyArg::RootedForests => Family::RootedForests,
                FamilyArg::NonForests => Family::NonForests,
            };
            let config = SweepConfig {
                n_max: *nmax,
                family,
                seed,
                samples: *samples,
                ..SweepConfig::default()
            };
            let sweep = run_sweep(&config)?;
            let mut outcome = Report::new("sweep", seed)
                .flag("nmax", nmax)
                .flag("family", family)
                .flag("samples", samples)
                .finish(sweep.to_text(), json!(sweep), sweep.all_passed)?;
            outcome.out = out.clone();
            Ok(outcome)
        }

        Command::Graph { poset, mode, no_loops } => {
            let p = load_poset(poset)?;
            let mode = Mode::from(*mode);
            let graph = PromotionSystem::from_poset(&p)?.graph(mode);
            Report::new("graph", seed)
                .input("poset", poset.display())
                .flag("mode", mode_name(mode))
                .flag("no_loops", no_loops)
                .finish(graph.to_dot(*no_loops), json!(graph), true)
        }
    }
}
