use std::io::{IsTerminal, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use pya_core::duality::{pyasetskii_dual_lines, LineDual};
use pya_core::enumerate::{build_poset, enum_parameters, DEFAULT_CAP};
use pya_core::oracle::{verify_dual, Field, OracleConfig, VerifyReport, DEFAULT_PRIME};
use pya_core::{closure_leq, rank_matrices, CoreError, LParameter, MultiSegment};

mod doc;
mod selftest;

use doc::{trace_docs, DocError, Document, GroupDoc};

#[derive(Parser)]
#[command(name = "pya", version, about = "Pyasetskii duals, rank matrices and orbit posets of multi-segment L-parameters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dual parameter, in the input schema
    Dual {
        /// Parameter document, or - for stdin
        input: PathBuf,
        /// Append the extraction steps of every line
        #[arg(long)]
        trace: bool,
    },
    /// Rank matrix of every line
    Rank { input: PathBuf },
    /// Compare two parameters in the closure order
    Le { first: PathBuf, second: PathBuf },
    /// All parameters with a given infinitesimal parameter
    Enumerate {
        /// Document with `support`, or with `segments` whose exponents are taken
        input: PathBuf,
        #[arg(long)]
        poset: bool,
        #[arg(long)]
        dot: bool,
        /// Largest support allowed on one line
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Ignore the cap
        #[arg(long)]
        force: bool,
    },
    /// Compare the dual against the linear-algebra oracle
    VerifyDual {
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        /// Perturb the algorithm's rank matrices before comparing; exercises the mismatch path
        #[arg(long, hide = true)]
        corrupt_expected: bool,
    },
    /// Replay the bundled fixtures
    Selftest {
        /// Run only fixtures whose name contains NAME or that carry the tag NAME
        #[arg(long)]
        filter: Option<String>,
        /// Read fixtures from this directory instead of the bundled set
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Invalid(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Invalid(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Invariant(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<Document, Failure> {
    Ok(Document::parse(&read_input(path)?)?)
}

fn load_valid(path: &Path) -> Result<(Document, LParameter), Failure> {
    let doc = load(path)?;
    let p = doc.to_parameter()?;
    p.validate()?;
    Ok((doc, p))
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_dual(input: &Path, trace: bool) -> Outcome {
    let (doc, p) = load_valid(input)?;
    let lines: Vec<LineDual> = pyasetskii_dual_lines(&p)?;
    let mut mseg = MultiSegment::new();
    for l in &lines {
        mseg.extend_from(&l.output);
    }
    let mut out = Document::from_parameter(&LParameter::new(p.group, mseg), &doc.rho_classes);
    if trace {
        out.trace = Some(trace_docs(&lines));
    }
    print_json(&out);
    Ok(())
}

fn cmd_rank(input: &Path) -> Outcome {
    let (_, p) = load_valid(input)?;
    let lines: Vec<_> = rank_matrices(&p.mseg)?
        .into_iter()
        .map(|(k, r)| json!({"line": k.to_string(), "rank_matrix": r}))
        .collect();
    print_json(&json!({"group": GroupDoc::from_group(&p.group), "lines": lines}));
    Ok(())
}

fn cmd_le(first: &Path, second: &Path) -> Outcome {
    let (_, p1) = load_valid(first)?;
    let (_, p2) = load_valid(second)?;
    let le = closure_leq(&p1, &p2)?;
    let ge = closure_leq(&p2, &p1)?;
    print_json(&json!({"le": le, "ge": ge}));
    Ok(())
}

fn cmd_enumerate(input: &Path, poset: bool, dot: bool, cap: usize, force: bool) -> Outcome {
    let doc = load(input)?;
    let (group, lambda) = doc.to_infinitesimal()?;
    let params = enum_parameters(&lambda, group, (!force).then_some(cap))?;
    let docs = |ps: &[LParameter]| -> Vec<Document> {
        ps.iter().map(|p| Document::from_parameter(p, &doc.rho_classes)).collect()
    };
    if !poset && !dot {
        print_json(&json!({"group": doc.group, "count": params.len(), "parameters": docs(&params)}));
        return Ok(());
    }
    let poset_v = build_poset(params)?;
    if dot {
        print!("{}", poset_v.to_dot());
    } else {
        let hasse: Vec<[usize; 2]> = poset_v.hasse.iter().map(|&(a, b)| [a, b]).collect();
        print_json(&json!({"nodes": docs(&poset_v.nodes), "hasse": hasse}));
    }
    Ok(())
}

/// Pushes every nonempty algorithm matrix off by one so that nothing matches.
fn corrupt(report: &mut VerifyReport) {
    for l in &mut report.lines {
        match l.algorithm_rank_matrix.entries.first_mut().and_then(|r| r.first_mut()) {
            Some(x) => *x += 1,
            None => l.algorithm_rank_matrix.e_max = l.algorithm_rank_matrix.e_max.shift(1),
        }
        l.matches = l.algorithm_rank_matrix == l.oracle_rank_matrix;
    }
}

fn cmd_verify(input: &Path, trials: u32, seed: u64, prime: u64, corrupt_expected: bool) -> Outcome {
    if trials == 0 {
        return Err(Failure::Parse("--trials must be positive".into()));
    }
    if Field::new(prime).is_none() {
        return Err(Failure::Parse(format!("--prime {prime} is not an odd prime below 2^63")));
    }
    let (_, p) = load_valid(input)?;
    let cfg = OracleConfig { trials, seed, prime, split_seed: seed };
    let mut report = verify_dual(&p, &cfg)?;
    if corrupt_expected {
        corrupt(&mut report);
    }
    let all = report.all_match();
    print_json(&json!({"all_match": all, "lines": report.lines}));
    if all {
        Ok(())
    } else {
        Err(Failure::Mismatch("oracle and algorithm disagree on at least one line".into()))
    }
}

/// `PYA_COLOR=0` turns ANSI off, any other value forces it on; unset follows the terminal.
pub fn color_enabled(terminal: bool) -> bool {
    match std::env::var("PYA_COLOR").as_deref() {
        Ok("0") => false,
        Ok(_) => true,
        Err(_) => terminal,
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Dual { input, trace } => cmd_dual(&input, trace),
        Cmd::Rank { input } => cmd_rank(&input),
        Cmd::Le { first, second } => cmd_le(&first, &second),
        Cmd::Enumerate { input, poset, dot, cap, force } => cmd_enumerate(&input, poset, dot, cap, force),
        Cmd::VerifyDual { input, trials, seed, prime, corrupt_expected } => {
            cmd_verify(&input, trials, seed, prime, corrupt_expected)
        }
        Cmd::Selftest { filter, fixtures } => selftest::run(filter.as_deref(), fixtures.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors share the parse exit code; --help and --version succeed
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let prefix = if color_enabled(std::io::stderr().is_terminal()) { "\x1b[31merror\x1b[0m" } else { "error" };
            eprintln!("{prefix}: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
