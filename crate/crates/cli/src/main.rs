use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use afalab::automata::{Afa, Automaton, Comparison, CutpointSpec, Machine, ModelError, RunError};
use afalab::format::{from_json, to_json, FormatError};
use afalab::scalar::{parse_rational, Scalar, ScalarMode, DEFAULT_TOL};
use afalab::transforms::{amplify_with_bound, gfa_to_afa, mcqfa_to_afa, pfa_to_afa, qfa_to_afa, TransformError, DEFAULT_STATE_BOUND};
use afalab::unary::{classify, enumerate_with_tol, extract, ClassifyError, Extracted, Tail, TraceError, UnaryParams};
use afalab::zoo::{default_ks, env_seed, UnaryTuple, ZooError, ZooSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

#[derive(Parser)]
#[command(name = "afalab", version, about = "Affine, probabilistic and quantum finite automata workbench")]
struct Cli {
    /// Tolerance for float comparisons and model validation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print `word,value` for each given word.
    Run {
        machine: PathBuf,
        #[arg(long = "word", allow_hyphen_values = true)]
        words: Vec<String>,
        /// One word per line; empty lines are the empty word.
        #[arg(long)]
        words_file: Option<PathBuf>,
    },
    /// Convert a PFA, MCQFA, QFA or GFA into an equivalent AfA.
    Convert {
        machine: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Afa)]
        to: Target,
        #[command(flatten)]
        out: Output,
    },
    /// Parallel copies of an AfA accepting when any copy accepts.
    Amplify {
        machine: PathBuf,
        #[arg(long, short = 't')]
        copies: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_BOUND)]
        max_states: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Language of a two-state unary AfA at a cutpoint.
    Classify {
        /// Machine file; alternatively give `--tuple`.
        machine: Option<PathBuf>,
        /// `p,q,f1,f2,m` as rationals.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "machine")]
        tuple: Option<String>,
        #[arg(long)]
        lambda: String,
    },
    /// Membership trace `length,value,member` of a unary AfA.
    Enumerate {
        machine: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 50)]
        max_len: usize,
        #[arg(long, value_enum, default_value_t = Cmp::Gt)]
        comparison: Cmp,
    },
    /// Compare two machines on every word up to a length.
    Verify {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Cutpoint for `--mode cutpoint`.
        #[arg(long)]
        lambda: Option<String>,
        /// Report every counterexample instead of the first.
        #[arg(long)]
        all: bool,
    },
    /// Emit a machine from the built-in families.
    Zoo {
        #[command(subcommand)]
        family: Family,
        /// Write the machine here instead of stdout.
        #[arg(long, short = 'o', global = true)]
        output: Option<PathBuf>,
    },
    /// `length,value` for `a^0 … a^L` of a unary machine.
    Sweep {
        machine: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_len: usize,
    },
}

#[derive(Args)]
struct Output {
    /// Write the machine here instead of stdout.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Afa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cmp {
    Gt,
    Ne,
    Eq,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Exact,
    Cutpoint,
    Cutpoint0,
}

#[derive(Subcommand)]
enum Family {
    /// Accepts `a^n` with value 1, every other length with value ≤ 2/3.
    Count { n: u32 },
    /// Rotation MCQFA for lengths divisible by a prime `p`.
    Modp {
        p: u64,
        /// Rotation multipliers; defaults to a seeded draw (`AFALAB_SEED`).
        #[arg(long, value_delimiter = ',')]
        ks: Vec<u64>,
    },
    /// Two-state MCQFA for the MOD 2^k promise problem.
    Mod2k { k: u32 },
    /// Three-state AfA for the MOD 4^k promise problem.
    Mod4k { k: u32 },
    /// Two-state AfA for `{a^j : j ≤ n}` at cutpoint 3/4.
    Less { n: u64 },
    /// Two-state AfA for `{a^j : k ≤ j ≤ l}` at cutpoint 3/4.
    Interval { k: u64, l: u64 },
    /// General two-state unary AfA from `p,q,f1,f2,m`.
    TwoState {
        #[arg(allow_hyphen_values = true)]
        tuple: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

const VERIFY_FAILED: u8 = 1;
const INVALID: u8 = 2;
const UNKNOWN_SYMBOL: u8 = 3;
const UNSUPPORTED: u8 = 4;
const PRECONDITION: u8 = 5;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        fail(INVALID, e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::UnknownSymbol(_) => fail(UNKNOWN_SYMBOL, e.to_string()),
            _ => fail(PRECONDITION, e.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        fail(PRECONDITION, e.to_string())
    }
}

impl From<ZooError> for Failure {
    fn from(e: ZooError) -> Self {
        fail(INVALID, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        fail(INVALID, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    let tol = cli.tol;
    match &cli.command {
        Command::Run {
            machine,
            words,
            words_file,
        } => {
            let m = load(machine, tol)?;
            let mut all = words.clone();
            if let Some(path) = words_file {
                all.extend(read(path)?.lines().map(str::to_string));
            }
            let mut out = String::new();
            for w in &all {
                out.push_str(&format!("{w},{}\n", m.run(w)?));
            }
            print(&out);
            Ok(0)
        }
        Command::Convert { machine, to: Target::Afa, out } => {
            let m = load(machine, tol)?;
            let converted = match &m {
                Machine::Pfa(p) => {
                    if p.mode() != ScalarMode::Rational {
                        return Err(fail(PRECONDITION, "PFA conversion needs rational entries"));
                    }
                    pfa_to_afa(p)?
                }
                Machine::Mcqfa(q) => mcqfa_to_afa(q)?,
                Machine::Qfa(q) => qfa_to_afa(q)?,
                Machine::Gfa(g) => gfa_to_afa(g)?,
                Machine::Afa(_) => return Err(fail(UNSUPPORTED, "machine is already an afa")),
            };
            eprintln!("{} -> {}", m.states(), converted.states());
            emit(&converted.into(), out.output.as_deref())
        }
        Command::Amplify {
            machine,
            copies,
            max_states,
            out,
        } => {
            let m = load_afa(machine, tol)?;
            let amp = amplify_with_bound(&m, *copies, *max_states)?;
            eprintln!("{} -> {}", m.states(), amp.states());
            emit(&amp.into(), out.output.as_deref())
        }
        Command::Classify { machine, tuple, lambda } => {
            let lambda = rational(lambda, "lambda")?;
            let tuple = match (machine, tuple) {
                (_, Some(t)) => parse_tuple(t)?,
                (Some(path), None) => match extract(&load_afa(path, tol)?) {
                    Some(Extracted::Tuple(t)) => t,
                    Some(Extracted::Constant(bit)) => {
                        let entry = if bit { "ALL" } else { "EMPTY" };
                        print(&format!("entry,branch,language\n{entry},constant,({})*\n", u8::from(bit)));
                        return Ok(0);
                    }
                    None => return Err(fail(PRECONDITION, "classify needs a two-state unary rational afa")),
                },
                (None, None) => return Err(fail(INVALID, "give a machine file or --tuple")),
            };
            match classify(&UnaryParams::new(&tuple, lambda)) {
                Ok(c) => {
                    print(&format!(
                        "entry,branch,language\n{},{},{}\n",
                        csv_field(&c.entry.to_string()),
                        c.branch,
                        c.language
                    ));
                    Ok(0)
                }
                Err(ClassifyError::OutsideCatalog { language, branch }) => {
                    print(&format!("entry,branch,language\nOUTSIDE,{branch},{language}\n"));
                    eprintln!("language is outside the catalog");
                    Ok(VERIFY_FAILED)
                }
                Err(e @ ClassifyError::Cutpoint(_)) => Err(fail(INVALID, e.to_string())),
                Err(e) => Err(fail(VERIFY_FAILED, e.to_string())),
            }
        }
        Command::Enumerate {
            machine,
            lambda,
            max_len,
            comparison,
        } => {
            let m = load_afa(machine, tol)?;
            let spec = cutpoint(lambda, m.machine().mode(), match comparison {
                Cmp::Gt => Comparison::StrictlyGreater,
                Cmp::Ne => Comparison::NotEqual,
                Cmp::Eq => Comparison::Equal,
            })?;
            let trace = enumerate_with_tol(&m, &spec, *max_len, tol).map_err(|e| match e {
                TraceError::Run(r) => Failure::from(r),
                other => fail(PRECONDITION, other.to_string()),
            })?;
            print(&trace.to_csv());
            match (trace.tail, trace.language()) {
                (Tail::Unknown, _) | (_, None) => eprintln!("tail: unknown"),
                (_, Some(lang)) => eprintln!("tail: from {} as {lang}", lang.tail_start()),
            }
            Ok(0)
        }
        Command::Verify {
            first,
            second,
            max_len,
            mode,
            lambda,
            all,
        } => verify(&load(first, tol)?, &load(second, tol)?, *max_len, *mode, lambda.as_deref(), *all, tol),
        Command::Zoo { family, output } => {
            let spec = match family {
                Family::Count { n } => ZooSpec::Count(*n),
                Family::Modp { p, ks } => ZooSpec::ModP {
                    p: *p,
                    ks: if ks.is_empty() { default_ks(*p, env_seed()) } else { ks.clone() },
                },
                Family::Mod2k { k } => ZooSpec::Mod2k(*k),
                Family::Mod4k { k } => ZooSpec::Mod4k(*k),
                Family::Less { n } => ZooSpec::Less(*n),
                Family::Interval { k, l } => ZooSpec::Interval(*k, *l),
                Family::TwoState { tuple } => ZooSpec::TwoStateUnary(parse_tuple(tuple)?),
            };
            emit(&spec.build()?, output.as_deref())
        }
        Command::Sweep { machine, max_len } => {
            let m = load(machine, tol)?;
            if !m.alphabet().is_unary() {
                return Err(fail(PRECONDITION, "sweep needs a unary machine"));
            }
            let mut out = String::from("length,value\n");
            for (j, v) in m.unary_values(*max_len)?.iter().enumerate() {
                out.push_str(&format!("{j},{v}\n"));
            }
            print(&out);
            Ok(0)
        }
    }
}

fn verify(
    a: &Machine,
    b: &Machine,
    max_len: usize,
    mode: Mode,
    lambda: Option<&str>,
    all: bool,
    tol: f64,
) -> Result<u8, Failure> {
    if a.alphabet() != b.alphabet() {
        return Err(fail(PRECONDITION, "machines have different alphabets"));
    }
    let specs = match (mode, lambda) {
        (Mode::Cutpoint, None) => return Err(fail(INVALID, "--mode cutpoint needs --lambda")),
        (Mode::Cutpoint, Some(l)) => Some((
            cutpoint(l, a.mode(), Comparison::StrictlyGreater)?,
            cutpoint(l, b.mode(), Comparison::StrictlyGreater)?,
        )),
        _ => None,
    };
    let va = a.values_up_to(max_len)?;
    let vb = b.values_up_to(max_len)?;
    let is_zero = |x: &Scalar| x.cmp_tol(&Scalar::zero(x.mode()), tol).is_eq();
    let mut out = String::new();
    let mut failures = 0usize;
    for ((word, x), (_, y)) in va.iter().zip(&vb) {
        let agree = match mode {
            Mode::Exact => match (x.mode(), y.mode()) {
                (ScalarMode::Rational, ScalarMode::Rational) => x == y,
                _ => (x.to_f64() - y.to_f64()).abs() <= tol,
            },
            Mode::Cutpoint => {
                let (sa, sb) = specs.as_ref().expect("parsed above");
                sa.holds(x, Some(tol))? == sb.holds(y, Some(tol))?
            }
            Mode::Cutpoint0 => is_zero(x) == is_zero(y),
        };
        if !agree {
            failures += 1;
            if failures == 1 || all {
                out.push_str(&format!("fail,{word},{x},{y}\n"));
            }
            if !all {
                break;
            }
        }
    }
    if failures == 0 {
        out.push_str(&format!("pass,{}\n", va.len()));
        print(&out);
        Ok(0)
    } else {
        print(&out);
        Ok(VERIFY_FAILED)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(INVALID, format!("{}: {e}", path.display())))
}

fn load(path: &Path, tol: f64) -> Result<Machine, Failure> {
    from_json(&read(path)?, tol).map_err(|e| fail(INVALID, format!("{}: {e}", path.display())))
}

fn load_afa(path: &Path, tol: f64) -> Result<Afa, Failure> {
    match load(path, tol)? {
        Machine::Afa(m) => Ok(m),
        other => Err(fail(
            UNSUPPORTED,
            format!("expected an afa, found a {} (run `convert` first)", other.model()),
        )),
    }
}

fn emit(m: &Machine, out: Option<&Path>) -> Result<u8, Failure> {
    let text = to_json(m);
    match out {
        Some(path) => fs::write(path, text).map_err(|e| fail(INVALID, format!("{}: {e}", path.display())))?,
        None => print(&text),
    }
    Ok(0)
}

fn print(text: &str) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    // a closed pipe is not an error worth reporting
    let _ = lock.write_all(text.as_bytes());
}

fn rational(text: &str, what: &str) -> Result<BigRational, Failure> {
    parse_rational(text.trim()).map_err(|e| fail(INVALID, format!("{what}: {e}")))
}

fn cutpoint(lambda: &str, mode: ScalarMode, cmp: Comparison) -> Result<CutpointSpec, Failure> {
    let value = Scalar::parse(mode, lambda).map_err(|e| fail(INVALID, format!("lambda: {e}")))?;
    Ok(CutpointSpec::new(value, cmp)?)
}

fn parse_tuple(text: &str) -> Result<UnaryTuple, Failure> {
    let parts = text
        .split(',')
        .map(|s| rational(s, "tuple"))
        .collect::<Result<Vec<_>, _>>()?;
    match <[_; 5]>::try_from(parts) {
        Ok([p, q, f1, f2, m]) => Ok(UnaryTuple::new(p, q, f1, f2, m)),
        Err(_) => Err(fail(INVALID, "tuple needs five values p,q,f1,f2,m")),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
