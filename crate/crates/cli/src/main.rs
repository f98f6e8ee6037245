use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tbisim::axioms::{self, SampleConfig, Which};
use tbisim::bisim::{self, Relation};
use tbisim::encode::encode_from;
use tbisim::lts::Mode;
use tbisim::modal::{distinguish, sat, sat_env, Fragment, Target};
use tbisim::parser::{parse_formula, parse_source, render_formula, render_source};
use tbisim::semantics::{build_lts_over, ExplorationLimits};
use tbisim::{ActionSet, Alphabet, Lts, Term};

#[derive(Parser)]
#[command(name = "tbisim", version, about = "Process terms with time-outs: LTS generation and equivalence checking")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a source file and print it back.
    Parse { file: PathBuf },
    /// Build the transition system of a source file.
    Lts {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Aut)]
        fmt: Format,
        #[command(flatten)]
        space: Space,
    },
    /// Apply the time-out encoding to a process or an .aut system.
    Encode {
        file: PathBuf,
        /// Start in an environment instead of the triggered mode.
        #[arg(long, value_parser = action_set)]
        env: Option<ActionSet>,
        #[arg(long)]
        rooted: bool,
        #[arg(long, value_enum, default_value_t = Format::Aut)]
        fmt: Format,
        #[command(flatten)]
        space: Space,
    },
    /// Compare two inputs under one relation.
    Check {
        /// strong, brb, brb-rooted, brbX, cbrb, cbrb-rooted, gbrb,
        /// gbrb-rooted, tob, tob-rooted, tb, tb-rooted
        #[arg(long)]
        rel: String,
        /// Environment for `brbX`.
        #[arg(long, value_parser = action_set)]
        env: Option<ActionSet>,
        #[arg(long)]
        json: bool,
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        space: Space,
    },
    #[command(subcommand)]
    Modal(ModalCmd),
    /// Print the head normal form of a process.
    Hnf { file: PathBuf },
    #[command(subcommand)]
    Axioms(AxiomsCmd),
}

#[derive(Subcommand)]
enum ModalCmd {
    /// Evaluate a formula at the initial state.
    Eval {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Evaluate under an environment instead of the triggered mode.
        #[arg(long, value_parser = action_set)]
        env: Option<ActionSet>,
        #[command(flatten)]
        space: Space,
    },
    /// Find a formula true of the left input and false of the right.
    Distinguish {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        rooted: bool,
        #[arg(long, value_parser = action_set)]
        env: Option<ActionSet>,
        #[command(flatten)]
        space: Space,
    },
}

#[derive(Subcommand)]
enum AxiomsCmd {
    /// List the axiom schemas and laws.
    List,
    /// Check axioms on random instances.
    Soundcheck {
        /// A schema or law name; all of them when absent.
        #[arg(long)]
        axiom: Option<String>,
        #[arg(long, value_parser = which)]
        which: Option<Which>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, env = "PABR_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct Space {
    /// Extra actions for the label universe.
    #[arg(long, value_parser = action_set)]
    sigma: Option<ActionSet>,
    #[arg(long, default_value_t = 50_000)]
    max_states: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Aut,
    Dot,
    Json,
}

fn action_set(s: &str) -> Result<ActionSet, String> {
    let mut out = ActionSet::new();
    for a in s.split(',').map(str::trim).filter(|a| !a.is_empty()) {
        if !tbisim::action::is_action_name(a) {
            return Err(format!("`{a}` is not an action name"));
        }
        out.insert(a);
    }
    Ok(out)
}

fn which(s: &str) -> Result<Which, String> {
    Which::from_id(s).ok_or_else(|| format!("expected ax or axr, got `{s}`"))
}

enum Input {
    Term { root: Term, sigma: Option<ActionSet> },
    System(Lts),
}

fn read(path: &Path) -> anyhow::Result<Input> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "aut") {
        let lts = Lts::from_aut(&text).with_context(|| path.display().to_string())?;
        return Ok(Input::System(lts));
    }
    let src = parse_source(&text).with_context(|| path.display().to_string())?;
    Ok(Input::Term {
        root: src.root,
        sigma: src.sigma,
    })
}

fn read_term(path: &Path) -> anyhow::Result<(Term, Option<ActionSet>)> {
    match read(path)? {
        Input::Term { root, sigma } => Ok((root, sigma)),
        Input::System(_) => bail!("{}: expected a process term, not a transition system", path.display()),
    }
}

fn universe(inputs: &[&Input], extra: Option<&ActionSet>) -> ActionSet {
    let mut sigma = extra.cloned().unwrap_or_default();
    for i in inputs {
        match i {
            Input::Term { root, sigma: s } => {
                sigma.extend(&root.alphabet());
                if let Some(s) = s {
                    sigma.extend(s);
                }
            }
            Input::System(l) => sigma.extend(&l.alphabet().to_set()),
        }
    }
    sigma
}

fn explore(input: Input, sigma: &ActionSet, space: &Space) -> anyhow::Result<Lts> {
    let alpha = Alphabet::new(sigma)?;
    match input {
        Input::Term { root, .. } => {
            let lim = ExplorationLimits {
                max_states: space.max_states,
                ..ExplorationLimits::default()
            };
            Ok(build_lts_over(&root, &alpha, lim)?)
        }
        Input::System(l) if l.has_encoded_labels() => Ok(l),
        Input::System(l) => Ok(l.remap(&alpha)?),
    }
}

fn load_pair(left: &Path, right: &Path, space: &Space) -> anyhow::Result<(Lts, Lts)> {
    let (a, b) = (read(left)?, read(right)?);
    let sigma = universe(&[&a, &b], space.sigma.as_ref());
    let l1 = explore(a, &sigma, space).with_context(|| left.display().to_string())?;
    let l2 = explore(b, &sigma, space).with_context(|| right.display().to_string())?;
    Ok((l1, l2))
}

fn load_one(path: &Path, space: &Space) -> anyhow::Result<Lts> {
    let a = read(path)?;
    let sigma = universe(&[&a], space.sigma.as_ref());
    explore(a, &sigma, space).with_context(|| path.display().to_string())
}

fn export(lts: &Lts, fmt: Format) -> String {
    match fmt {
        Format::Aut => lts.to_aut(),
        Format::Dot => lts.to_dot(),
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                initial: usize,
                alphabet: Vec<String>,
                states: Vec<String>,
                transitions: Vec<(usize, String, usize)>,
            }
            let out = Out {
                initial: lts.initial(),
                alphabet: lts.alphabet().names().map(String::from).collect(),
                states: (0..lts.num_states()).map(|s| lts.state_text(s)).collect(),
                transitions: lts.transitions().map(|(s, l, d)| (s, lts.label_text(l), d)).collect(),
            };
            serde_json::to_string_pretty(&out).expect("plain data") + "\n"
        }
    }
}

fn verdict_code(b: bool) -> ExitCode {
    if b {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Command::Parse { file } => {
            let (root, sigma) = read_term(&file)?;
            print!("{}", render_source(&root, sigma.as_ref()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Lts { file, fmt, space } => {
            let lts = load_one(&file, &space)?;
            print!("{}", export(&lts, fmt));
            Ok(ExitCode::SUCCESS)
        }
        Command::Encode {
            file,
            env,
            rooted,
            fmt,
            space,
        } => {
            let lts = load_one(&file, &space)?;
            let mode = match (env, rooted) {
                (None, false) => Mode::Triggered,
                (None, true) => Mode::TriggeredRooted,
                (Some(x), r) => {
                    let m = lts.alphabet().mask(&x);
                    if r {
                        Mode::EnvRooted(m)
                    } else {
                        Mode::Env(m)
                    }
                }
            };
            print!("{}", export(&encode_from(&lts, mode)?, fmt));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            rel,
            env,
            json,
            left,
            right,
            space,
        } => {
            let relation = match rel.as_str() {
                "brbX" | "brbx" | "brb-x" => {
                    if env.is_none() {
                        bail!("--rel brbX needs --env");
                    }
                    Relation::Brb
                }
                other => Relation::from_id(other).ok_or_else(|| anyhow!("unknown relation `{other}`"))?,
            };
            if env.is_some() && relation != Relation::Brb {
                bail!("--env is only meaningful with brbX");
            }
            let (l1, l2) = load_pair(&left, &right, &space)?;
            let v = bisim::check(relation, &l1, l1.initial(), &l2, l2.initial(), env.as_ref())?;
            if json {
                #[derive(Serialize)]
                struct Out {
                    #[serde(flatten)]
                    report: bisim::Report,
                    env: Option<Vec<String>>,
                }
                let out = Out {
                    report: v.report(),
                    env: v.env.as_ref().map(|x| x.iter().map(String::from).collect()),
                };
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                let name = match &v.env {
                    Some(x) => format!("brb under {{{x}}}"),
                    None => v.relation.id().to_string(),
                };
                let verdict = if v.equivalent { "equivalent" } else { "inequivalent" };
                println!("{verdict} ({name}, {} entries checked, {} iterations)", v.entries_checked, v.iterations);
                for r in &v.refutation {
                    let env = r.env.as_ref().map(|e| format!(" under {e}")).unwrap_or_default();
                    println!("  [{}] {} vs {}{env}: {}", r.clause, r.lhs, r.rhs, r.detail);
                }
            }
            Ok(verdict_code(v.equivalent))
        }
        Command::Modal(ModalCmd::Eval {
            file,
            formula,
            env,
            space,
        }) => {
            let lts = load_one(&file, &space)?;
            let f = parse_formula(&formula).context("formula")?;
            let holds = match &env {
                Some(x) => sat_env(&lts, lts.initial(), x, &f),
                None => sat(&lts, lts.initial(), &f),
            };
            println!("{holds}");
            Ok(verdict_code(holds))
        }
        Command::Modal(ModalCmd::Distinguish {
            left,
            right,
            rooted,
            env,
            space,
        }) => {
            let (l1, l2) = load_pair(&left, &right, &space)?;
            let fragment = if rooted { Fragment::Lbr } else { Fragment::Lb };
            let target = env.map_or(Target::Triggered, Target::Env);
            match distinguish(&l1, l1.initial(), &l2, l2.initial(), fragment, &target)? {
                Some(f) => {
                    println!("{}", render_formula(&f));
                    Ok(ExitCode::from(1))
                }
                None => {
                    println!("equivalent");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Hnf { file } => {
            let (root, sigma) = read_term(&file)?;
            let h = axioms::head_normal_form(&root)?;
            print!("{}", render_source(&h, sigma.as_ref()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Axioms(AxiomsCmd::List) => {
            for w in [Which::Axr, Which::Ax] {
                for s in axioms::schema_set(w).into_iter().chain(axioms::derived_laws(w)) {
                    if w == Which::Ax && s.sort.includes(Which::Axr) {
                        continue;
                    }
                    let sort = match s.sort {
                        axioms::Sort::Both => "Ax, Axr",
                        axioms::Sort::Ax => "Ax",
                        axioms::Sort::Axr => "Axr",
                    };
                    let tag = if s.derived { " (derived)" } else { "" };
                    println!("{:<16} [{sort}]{tag}  {s}", s.name);
                }
            }
            for l in axioms::strong_laws() {
                println!("{:<16} [strong]  {}", l.name, l.statement);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Axioms(AxiomsCmd::Soundcheck {
            axiom,
            which,
            samples,
            seed,
            json,
        }) => {
            let cfg = SampleConfig::default();
            let reports = match axiom.as_deref() {
                None => {
                    let ws = which.map_or(vec![Which::Axr, Which::Ax], |w| vec![w]);
                    let mut out = Vec::new();
                    for w in ws {
                        out.extend(axioms::soundness_suite(w, samples, seed));
                    }
                    out.extend(axioms::strong_laws().iter().map(|l| axioms::check_law(l, samples, seed, &cfg)));
                    out
                }
                Some(name) => {
                    if let Some(s) = axioms::lookup(name) {
                        let w = which.unwrap_or(if s.sort.includes(Which::Axr) { Which::Axr } else { Which::Ax });
                        if !s.sort.includes(w) {
                            bail!("`{name}` is not part of {w:?}");
                        }
                        vec![axioms::soundcheck(&s, w, samples, seed, &cfg)]
                    } else if let Some(l) = axioms::strong_laws().into_iter().find(|l| l.name == name) {
                        vec![axioms::check_law(&l, samples, seed, &cfg)]
                    } else {
                        bail!("unknown axiom `{name}`; see `tbisim axioms list`");
                    }
                }
            };
            if json {
                if reports.len() == 1 {
                    println!("{}", serde_json::to_string_pretty(&reports[0])?);
                } else {
                    println!("{}", serde_json::to_string_pretty(&reports)?);
                }
            } else {
                for r in &reports {
                    println!(
                        "{:<16} {:<11} {}/{} passed{}",
                        r.axiom,
                        r.relation,
                        r.passes,
                        r.passes + r.failures.len(),
                        if r.skipped > 0 { format!(", {} skipped", r.skipped) } else { String::new() }
                    );
                    for f in &r.failures {
                        println!("  {} =/= {}", f.lhs, f.rhs);
                    }
                }
            }
            Ok(verdict_code(reports.iter().all(|r| r.sound())))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
