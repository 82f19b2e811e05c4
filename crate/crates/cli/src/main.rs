//! `canon`: generate colorings, canonize them, check witnesses and evaluate
//! the bounds.
//!
//! Exit codes: 0 success or true, 1 false or nothing found, 2 a stage (or a
//! budget) fell short, 64 bad usage or unreadable input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use canon_core::bounds::{
    check_obs16, comparison_table, lemma_bound, parse_rational, render_table, schedule_18, show_rational,
    ComparisonConstants, ScheduleParams,
};
use canon_core::canonicity::{er_search, is_canonical, oracle_find, ErOutcome};
use canon_core::coloring::{generate, Generator};
use canon_core::pipeline::{canonize, coloring_checksum, CanonizeConfig, CanonizeTrace, Canonized, Schedule};
use canon_core::{Coloring, Error, NPlace, Pattern, SortedSubset};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

const EXIT_NO: u8 = 1;
const EXIT_STAGE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "canon", version, about = "Canonical Ramsey experiments: colorings, canonization, exact bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated coloring.
    Gen(GenArgs),
    /// Run the canonization pipeline on a coloring file.
    Canonize(CanonizeArgs),
    /// Check that a coloring is canonical on a subset with a pattern.
    Verify(VerifyArgs),
    /// Exhaustive search for a canonical m-subset.
    Oracle(OracleArgs),
    /// Exact check of ER(n; m) <= N over all colorings.
    ErSearch(ErArgs),
    /// Schedules, the beth observation grid and the comparison table.
    Bound(BoundArgs),
    /// Re-run a saved trace and compare.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    Canonical,
    Constant,
    Injective,
    MinPosition,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleKind {
    Paper,
    Custom,
    Opportunistic,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "N")]
    big_n: u32,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Colors for `random`.
    #[arg(long, default_value_t = 2)]
    colors: u32,
    /// Pattern for `canonical`, e.g. `1,3` or `{}`.
    #[arg(long, default_value = "")]
    v: String,
    /// 1-based position for `min-position`.
    #[arg(long, default_value_t = 1)]
    position: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CanonizeArgs {
    input: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ScheduleKind::Opportunistic)]
    schedule: ScheduleKind,
    /// For `custom`: the n-1 ramification sizes, then the sizes after the
    /// two unary cleanups.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Deepest ramification tree for `opportunistic`.
    #[arg(long, default_value_t = 48)]
    ram_cap: usize,
    #[arg(long, env = "CANON_RETRY_BUDGET", default_value_t = 64)]
    retry_budget: usize,
    #[arg(long, env = "CANON_VERIFY_BUDGET", default_value_t = 2_000_000)]
    verify_budget: u64,
    #[arg(long, default_value = "1")]
    epsilon: String,
    /// Write the JSON trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    /// Elements, e.g. `2,5,9`.
    #[arg(long)]
    subset: String,
    #[arg(long, default_value = "")]
    v: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long)]
    m: usize,
    /// Largest C(N, m) searched without --force.
    #[arg(long, env = "CANON_ORACLE_BUDGET", default_value_t = 10_000_000)]
    budget: u64,
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ErArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "N")]
    big_n: u32,
    /// Largest number of colorings (a Bell number) checked without --force.
    #[arg(long, env = "CANON_ER_BUDGET", default_value_t = 100_000_000)]
    budget: u64,
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value = "1")]
    epsilon: String,
    /// Values of m for the comparison table; defaults to --m.
    #[arg(long, value_delimiter = ',')]
    ms: Vec<u64>,
    /// Print the beth observation grid instead.
    #[arg(long)]
    check_obs16: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ReplayArgs {
    trace: PathBuf,
    /// The coloring the trace was made from.
    #[arg(long)]
    input: PathBuf,
}

/// A command's result: exit code plus what to print.
struct Report {
    code: u8,
    text: String,
    json: Value,
}

enum Failure {
    Usage(String),
    Stage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Stage(format!("{e} (raise the budget or pass --force)")),
            Error::Stage(s) => Failure::Stage(s.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<Report, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(format: Format, r: Report) -> ExitCode {
    match format {
        Format::Text => print!("{}", r.text),
        Format::Json => println!("{}", serde_json::to_string_pretty(&r.json).unwrap()),
    }
    ExitCode::from(r.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (format, res) = match cli.cmd {
        Command::Gen(a) => (Format::Text, cmd_gen(&a)),
        Command::Canonize(a) => (a.format, cmd_canonize(&a)),
        Command::Verify(a) => (a.format, cmd_verify(&a)),
        Command::Oracle(a) => (a.format, cmd_oracle(&a)),
        Command::ErSearch(a) => (a.format, cmd_er(&a)),
        Command::Bound(a) => (a.format, cmd_bound(&a)),
        Command::Replay(a) => (Format::Text, cmd_replay(&a)),
    };
    match res {
        Ok(r) => emit(format, r),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Stage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_STAGE)
        }
    }
}

fn parse_pattern(s: &str) -> Result<Pattern, Failure> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn read_coloring(path: &Path) -> Result<Coloring, Failure> {
    Ok(Coloring::read(path)?)
}

fn cmd_gen(a: &GenArgs) -> CmdResult {
    let kind = match a.kind {
        Kind::Random => Generator::Random { colors: a.colors },
        Kind::Canonical => Generator::Canonical {
            pattern: parse_pattern(&a.v)?,
        },
        Kind::Constant => Generator::Constant,
        Kind::Injective => Generator::Injective,
        Kind::MinPosition => Generator::MinPosition { position: a.position },
    };
    let f = generate(&kind, a.n, a.big_n, a.seed)?;
    let text = match &a.out {
        Some(p) => {
            f.write(p)?;
            String::new()
        }
        None => f.to_text(),
    };
    Ok(Report {
        code: 0,
        text,
        json: Value::Null,
    })
}

fn schedule_from(a: &CanonizeArgs, n: usize) -> Result<Schedule, Failure> {
    Ok(match a.schedule {
        ScheduleKind::Paper => Schedule::Paper,
        ScheduleKind::Opportunistic => Schedule::Opportunistic { ram_cap: a.ram_cap },
        ScheduleKind::Custom => {
            let want = n.saturating_sub(1) + 2;
            if a.sizes.len() != want {
                return Err(usage(format!(
                    "--schedule custom needs --sizes with {want} values for arity {n}: {} ramification sizes, then the two cleanup sizes",
                    n.saturating_sub(1)
                )));
            }
            let (ram, rest) = a.sizes.split_at(want - 2);
            Schedule::Custom {
                ram: ram.to_vec(),
                coi: rest[0],
                cleanup: rest[1],
            }
        }
    })
}

fn canonized_report(out: &Canonized) -> Report {
    match (&out.witness, &out.failure) {
        (Some(w), _) => {
            let mut text = format!("A* = {}\nv = {}\n", w.subset, w.pattern);
            if out.trace.agreement == Some(false) {
                if let Some(b) = out.trace.bookkeeping_pattern {
                    text.push_str(&format!("note: the stage data suggested v = {b}\n"));
                }
            }
            Report {
                code: 0,
                text,
                json: json!({ "witness": w, "failure": null, "trace": out.trace }),
            }
        }
        (None, f) => {
            let f = f.clone().expect("a run without witness has a failure");
            Report {
                code: EXIT_STAGE,
                text: format!("{f}\n"),
                json: json!({ "witness": null, "failure": f, "trace": out.trace }),
            }
        }
    }
}

fn cmd_canonize(a: &CanonizeArgs) -> CmdResult {
    let f = read_coloring(&a.input)?;
    let config = CanonizeConfig {
        schedule: schedule_from(a, f.arity())?,
        seed: a.seed,
        retry_budget: a.retry_budget,
        verify_budget: a.verify_budget,
        epsilon: a.epsilon.clone(),
    };
    let out = canonize(&f, a.m, &config)?;
    if let Some(p) = &a.trace {
        let body = serde_json::to_string_pretty(&out.trace).expect("traces serialize");
        fs::write(p, body + "\n").map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    Ok(canonized_report(&out))
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let f = read_coloring(&a.input)?;
    let mut elems = Vec::new();
    for part in a.subset.trim_matches(|c| c == '{' || c == '}').split(',').map(str::trim) {
        if part.is_empty() {
            continue;
        }
        elems.push(part.parse::<u32>().map_err(|_| usage(format!("bad subset element `{part}`")))?);
    }
    let s = SortedSubset::new(elems)?;
    if SortedSubset::max(&s).is_some_and(|x| x > f.domain()) {
        return Err(usage(format!("subset leaves [1, {}]", f.domain())));
    }
    let v = parse_pattern(&a.v)?;
    let ok = is_canonical(&f, &s, v)?;
    Ok(Report {
        code: if ok { 0 } else { EXIT_NO },
        text: format!("{ok}\n"),
        json: json!({ "subset": s, "pattern": v, "canonical": ok }),
    })
}

fn cmd_oracle(a: &OracleArgs) -> CmdResult {
    let f = read_coloring(&a.input)?;
    let budget = (!a.force).then_some(a.budget);
    Ok(match oracle_find(&f, a.m, budget)? {
        Some(w) => Report {
            code: 0,
            text: format!("A = {}\nv = {}\n", w.subset, w.pattern),
            json: json!({ "witness": w }),
        },
        None => Report {
            code: EXIT_NO,
            text: format!("no canonical {}-subset\n", a.m),
            json: json!({ "witness": null }),
        },
    })
}

fn cmd_er(a: &ErArgs) -> CmdResult {
    let budget = (!a.force).then_some(a.budget);
    Ok(match er_search(a.n, a.m, a.big_n, budget)? {
        ErOutcome::AllColoringsOk { colorings_checked } => Report {
            code: 0,
            text: format!(
                "all colorings admit a witness: ER({};{}) <= {} ({colorings_checked} colorings up to renaming)\n",
                a.n, a.m, a.big_n
            ),
            json: json!({ "outcome": "all_colorings_ok", "colorings_checked": colorings_checked }),
        },
        ErOutcome::Counterexample { coloring } => Report {
            code: EXIT_NO,
            text: format!(
                "counterexample: ER({};{}) > {}\n{}",
                a.n,
                a.m,
                a.big_n,
                coloring.to_text()
            ),
            json: json!({ "outcome": "counterexample", "coloring": coloring.to_text() }),
        },
    })
}

fn cmd_bound(a: &BoundArgs) -> CmdResult {
    if a.check_obs16 {
        return Ok(obs_grid());
    }
    let epsilon = parse_rational(&a.epsilon)?;
    let params = ScheduleParams {
        epsilon,
        ..ScheduleParams::default()
    };
    let mut text = String::new();
    let mut out = serde_json::Map::new();
    out.insert("n".into(), json!(a.n));
    out.insert("m".into(), json!(a.m));
    if a.n >= 2 {
        let s = schedule_18(a.n, a.m, &params)?;
        let small = s.m_small.clone().expect("assembly schedule");
        let names = ["m_0", "m_1", "m_2", "m_3"];
        let row: Vec<String> = names.iter().zip(&small).map(|(k, v)| format!("{k}={v}")).collect();
        text.push_str(&format!("schedule for ER({};{}): {}\n", a.n, a.m, row.join(", ")));
        text.push_str(&format!("c1 = {}, c3 = {}\n", show_rational(&s.c1), show_rational(&s.c3)));
        let mut levels = Vec::new();
        for l in &s.levels {
            let step = match l.step_ok {
                None => "",
                Some(true) => "  step holds",
                Some(false) => "  STEP FAILS",
            };
            text.push_str(&format!("  m({}) = beth_{}({}) = {}{step}\n", l.n, l.height, l.arg, l.value));
            levels.push(json!({
                "n": l.n, "height": l.height, "arg": l.arg.to_string(),
                "value": l.value.to_string(), "step_ok": l.step_ok,
            }));
        }
        out.insert(
            "schedule".into(),
            json!({
                "m_small": small.iter().map(BigUint::to_string).collect::<Vec<_>>(),
                "c1": show_rational(&s.c1), "c3": show_rational(&s.c3),
                "levels": levels, "all_steps_ok": s.all_steps_ok(),
            }),
        );
    }
    let consts = ComparisonConstants::default();
    let lemma = lemma_bound(a.n, a.m, &BigUint::from(consts.lemma_c), &params)?;
    text.push_str(&format!(
        "lemma threshold beth_{}(c m^{}) = {}; the schedule's own content grows like m^{}\n",
        a.n - 1,
        lemma.lemma_exponent,
        lemma.threshold,
        lemma.schedule_exponent
    ));
    out.insert(
        "lemma".into(),
        json!({
            "threshold": lemma.threshold.to_string(), "lemma_exponent": lemma.lemma_exponent,
            "schedule_content": lemma.schedule_content.as_ref().map(BigUint::to_string),
            "schedule_exponent": lemma.schedule_exponent,
        }),
    );
    let ms = if a.ms.is_empty() { vec![a.m] } else { a.ms.clone() };
    let rows = comparison_table(a.n, ms, &consts)?;
    text.push_str(&render_table(&rows));
    out.insert("comparison".into(), json!(rows));
    out.insert("constants".into(), json!(consts));
    Ok(Report {
        code: 0,
        text,
        json: Value::Object(out),
    })
}

fn obs_grid() -> Report {
    let mut text = String::from("l k x  first second\n");
    let mut cells = Vec::new();
    let mut all = true;
    for ell in 1..=4u32 {
        for k in 2..=5u64 {
            for x in 2..=5u64 {
                let (p, q) = check_obs16(ell, k, x);
                all &= p && q;
                text.push_str(&format!("{ell} {k} {x}  {p} {q}\n"));
                cells.push(json!({ "l": ell, "k": k, "x": x, "first": p, "second": q }));
            }
        }
    }
    text.push_str(&format!("all true: {all}\n"));
    Report {
        code: if all { 0 } else { EXIT_NO },
        text,
        json: json!({ "grid": cells, "all_true": all }),
    }
}

fn cmd_replay(a: &ReplayArgs) -> CmdResult {
    let body = fs::read_to_string(&a.trace).map_err(|e| usage(format!("{}: {e}", a.trace.display())))?;
    let trace: CanonizeTrace =
        serde_json::from_str(&body).map_err(|e| usage(format!("{}: not a trace: {e}", a.trace.display())))?;
    let f = read_coloring(&a.input)?;
    if coloring_checksum(&f) != trace.input_checksum {
        return Err(usage(format!(
            "{} is not the coloring the trace was made from (checksum {} vs {})",
            a.input.display(),
            coloring_checksum(&f),
            trace.input_checksum
        )));
    }
    let out = canonize(&f, trace.m, &trace.config)?;
    let same = out.trace == trace;
    let mut r = canonized_report(&out);
    if same {
        r.code = 0;
        r.text = format!("replay identical\n{}", r.text);
    } else {
        r.code = EXIT_NO;
        r.text = format!("replay differs from the trace\n{}", r.text);
    }
    Ok(r)
}
