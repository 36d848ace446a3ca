use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mttc::harness::{
    check_axioms, membership_file, nonempty_file, parse_market, random_profile, AxiomOptions, MarketFile, RandomSpec,
};
use mttc::market::{Allocation, Market};
use mttc::mttc::{compute_po, enumerate_extensions, label, run_mttc, run_mttc_star, MttcError};
use mttc::oracle::{enumerate_strict_core, find_blocking_coalition, in_strict_core, Budget, Verdict};
use mttc::preference::Profile;
use mttc::reductions::parse_dimacs;

const DEFAULT_BUDGET: u64 = 10_000_000;
const EXTENSION_CAP: usize = 100_000;
const CORE_CAP: usize = 100_000;

/// Multi-type housing markets: top trading cycles and the strict core.
#[derive(Parser)]
#[command(name = "mttc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run MTTC and print its cycles round by round.
    Solve { file: PathBuf },
    /// Implement the cycles of MTTC one at a time in the given order.
    SolveStar {
        file: PathBuf,
        /// Comma-separated cycle labels, e.g. C1,C3,C2,C4.
        #[arg(long)]
        schedule: String,
    },
    /// Print the precedence order over MTTC's cycles and count its linear extensions.
    Po { file: PathBuf },
    /// Check whether the file's allocation (or MTTC's) is in the strict core.
    VerifyCore {
        file: PathBuf,
        /// Check every allocation instead.
        #[arg(long)]
        all: bool,
    },
    /// List every strict-core allocation.
    EnumerateCore { file: PathBuf },
    /// Check MTTC's axioms on the market.
    CheckAxioms {
        file: PathBuf,
        /// Also try joint misreports by pairs of agents.
        #[arg(long)]
        pairs: bool,
    },
    /// Build a strict-core instance from a 3-CNF formula.
    Reduce {
        kind: Reduction,
        #[arg(long)]
        cnf: PathBuf,
        /// Write the instance here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random lexicographic market.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long)]
        separable: bool,
        #[arg(long)]
        shared_importance: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    Instrictcore,
    Corenonempty,
}

/// Ends a command: the message becomes the `RESULT:` line.
enum Finish {
    Ok(String),
    /// Success whose standard output is a market file; the `RESULT:` line
    /// goes to standard error so the output stays parseable.
    Emitted(String),
    Violation(String),
    Usage(String),
}

impl Finish {
    fn exit(self) -> ExitCode {
        let (msg, code) = match self {
            Finish::Ok(m) => (m, 0),
            Finish::Emitted(m) => {
                eprintln!("RESULT: {m}");
                return ExitCode::SUCCESS;
            }
            Finish::Violation(m) => (m, 1),
            Finish::Usage(m) => (m, 2),
        };
        println!("RESULT: {msg}");
        ExitCode::from(code)
    }
}

fn budget() -> Result<Budget, Finish> {
    match std::env::var("MTTC_BUDGET") {
        Err(_) => Ok(Budget::nodes(DEFAULT_BUDGET)),
        Ok(v) if v == "unlimited" => Ok(Budget::UNLIMITED),
        Ok(v) => v
            .parse()
            .map(Budget::nodes)
            .map_err(|_| Finish::Usage(format!("MTTC_BUDGET must be a node count or `unlimited`, got `{v}`"))),
    }
}

fn read(path: &Path) -> Result<String, Finish> {
    fs::read_to_string(path).map_err(|e| Finish::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MarketFile, Finish> {
    parse_market(&read(path)?).map_err(|e| Finish::Usage(format!("{}: {e}", path.display())))
}

fn mechanism(file: &MarketFile) -> Result<(Allocation, mttc::mttc::CycleTrace), Finish> {
    run_mttc(&file.market, &file.profile).map_err(|e| Finish::Usage(e.to_string()))
}

fn emit(text: &str, out: Option<&Path>, summary: String) -> Result<Finish, Finish> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| Finish::Usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(Finish::Ok(format!("{summary}, written to {}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(Finish::Emitted(summary))
        }
    }
}

fn solve(path: &Path) -> Result<Finish, Finish> {
    let file = load(path)?;
    let (alloc, trace) = mechanism(&file)?;
    for (round, ks) in trace.by_round() {
        for k in ks {
            println!("round {round}: {} = {}", label(k), trace.cycles[k].cycle.describe(&file.market));
        }
    }
    Ok(Finish::Ok(file.market.allocation_label(&alloc)))
}

fn solve_star(path: &Path, schedule: &str) -> Result<Finish, Finish> {
    let file = load(path)?;
    let (_, trace) = mechanism(&file)?;
    let mut cycles = Vec::new();
    for tok in schedule.split(',').map(str::trim) {
        let k = tok
            .strip_prefix('C')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&k| (1..=trace.len()).contains(&k))
            .ok_or_else(|| Finish::Usage(format!("unknown cycle `{tok}` (have C1..C{})", trace.len())))?;
        cycles.push(trace.cycles[k - 1].cycle.clone());
    }
    match run_mttc_star(&file.market, &file.profile, &cycles) {
        Ok((alloc, _)) => Ok(Finish::Ok(file.market.allocation_label(&alloc))),
        Err(MttcError::InfeasibleSchedule { step, cycle }) => Ok(Finish::Violation(format!(
            "schedule infeasible: {} is not available at step {}",
            label(cycle),
            step + 1
        ))),
        Err(e) => Err(Finish::Usage(e.to_string())),
    }
}

fn po(path: &Path) -> Result<Finish, Finish> {
    let file = load(path)?;
    let (_, trace) = mechanism(&file)?;
    for (k, c) in trace.cycles.iter().enumerate() {
        println!("{} (round {}): {}", label(k), c.round, c.cycle.describe(&file.market));
    }
    let order = compute_po(&file.market, &file.profile, &trace).map_err(|e| Finish::Usage(e.to_string()))?;
    let pairs = order.pairs();
    for &(k, l) in &pairs {
        println!("{} > {}", label(k), label(l));
    }
    let ext = enumerate_extensions(&order, EXTENSION_CAP).map_err(|e| Finish::Usage(e.to_string()))?;
    for e in &ext {
        let names: Vec<String> = e.iter().map(|&k| label(k)).collect();
        println!("extension: {}", names.join(" "));
    }
    Ok(Finish::Ok(format!("{} relations, {} extensions", pairs.len(), ext.len())))
}

fn verify_core(path: &Path, all: bool) -> Result<Finish, Finish> {
    let file = load(path)?;
    let budget = budget()?;
    let (market, profile) = (&file.market, &file.profile);
    if all {
        return verify_all(market, profile, budget);
    }
    let alloc = match &file.allocation {
        Some(a) => a.clone(),
        None => mechanism(&file)?.0,
    };
    println!("allocation: {}", market.allocation_label(&alloc));
    match in_strict_core(market, profile, &alloc, budget).map_err(|e| Finish::Usage(e.to_string()))? {
        Verdict::Yes => Ok(Finish::Ok("in strict core".into())),
        Verdict::No(w) => {
            println!("blocked by {}", w.describe(market));
            Ok(Finish::Violation("not in strict core".into()))
        }
        Verdict::Indeterminate => Ok(Finish::Violation("undecided: search budget exhausted".into())),
    }
}

fn verify_all(market: &Market, profile: &Profile, budget: Budget) -> Result<Finish, Finish> {
    let allocs = mttc::market::enumerate_allocations(market, CORE_CAP as u128)
        .map_err(|e| Finish::Usage(format!("{e}; try enumerate-core")))?;
    let mut core = 0;
    for a in allocs {
        let r = find_blocking_coalition(market, profile, &a, budget).map_err(|e| Finish::Usage(e.to_string()))?;
        match r.witness {
            Some(w) if w.verify(market, profile, &a) => {
                println!("{} blocked by {}", market.allocation_label(&a), w.describe(market));
            }
            Some(_) => return Err(Finish::Usage("witness failed to verify".into())),
            None if r.exhausted_budget => {
                return Ok(Finish::Violation(format!("undecided for {}", market.allocation_label(&a))))
            }
            None => {
                core += 1;
                println!("{} in strict core", market.allocation_label(&a));
            }
        }
    }
    Ok(if core == 0 {
        Finish::Violation("strict core empty".into())
    } else {
        Finish::Ok(format!("strict core has {core} allocations"))
    })
}

fn enumerate_core(path: &Path) -> Result<Finish, Finish> {
    let file = load(path)?;
    let core = enumerate_strict_core(&file.market, &file.profile, CORE_CAP, budget()?)
        .map_err(|e| Finish::Usage(e.to_string()))?;
    for a in &core {
        println!("{}", file.market.allocation_label(a));
    }
    Ok(if core.is_empty() {
        Finish::Ok("strict core empty".into())
    } else {
        Finish::Ok(format!("{} strict-core allocations", core.len()))
    })
}

fn axioms(path: &Path, pairs: bool) -> Result<Finish, Finish> {
    let file = load(path)?;
    let options = AxiomOptions {
        budget: budget()?,
        pairs,
        ..AxiomOptions::default()
    };
    let report = check_axioms(&file.market, &file.profile, &options);
    print!("{report}");
    let summary = format!(
        "{} checks, {} failed, {} skipped",
        report.checks.len(),
        report.failures(),
        report.skipped()
    );
    Ok(if report.failures() > 0 {
        Finish::Violation(summary)
    } else {
        Finish::Ok(summary)
    })
}

fn reduce(kind: Reduction, cnf_path: &Path, out: Option<&Path>) -> Result<Finish, Finish> {
    let cnf = parse_dimacs(&read(cnf_path)?).map_err(|e| Finish::Usage(format!("{}: {e}", cnf_path.display())))?;
    let source = cnf_path
        .file_name()
        .map_or_else(|| cnf_path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let file = match kind {
        Reduction::Instrictcore => membership_file(&cnf, &source),
        Reduction::Corenonempty => nonempty_file(&cnf, &source),
    };
    let summary = match file.allocation {
        Some(_) => format!("{} agents, allocation included", file.market.agents()),
        None => format!("{} agents, formula unsatisfiable", file.market.agents()),
    };
    emit(&file.to_text(), out, summary)
}

fn run(cli: Cli) -> Result<Finish, Finish> {
    match cli.command {
        Command::Solve { file } => solve(&file),
        Command::SolveStar { file, schedule } => solve_star(&file, &schedule),
        Command::Po { file } => po(&file),
        Command::VerifyCore { file, all } => verify_core(&file, all),
        Command::EnumerateCore { file } => enumerate_core(&file),
        Command::CheckAxioms { file, pairs } => axioms(&file, pairs),
        Command::Reduce { kind, cnf, out } => reduce(kind, &cnf, out.as_deref()),
        Command::Gen {
            seed,
            n,
            p,
            separable,
            shared_importance,
            out,
        } => {
            if n == 0 || p == 0 {
                return Err(Finish::Usage("n and p must be positive".into()));
            }
            let spec = RandomSpec {
                seed,
                n,
                p,
                separable_only: separable,
                shared_importance,
            };
            let (market, profile) = random_profile(spec);
            let file = MarketFile::new(market, profile).with_comments([format!(
                "random market: seed={seed} n={n} p={p} separable={separable} shared_importance={shared_importance}"
            )]);
            emit(&file.to_text(), out.as_deref(), format!("generated seed {seed}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(f) | Err(f) => f.exit(),
    }
}
