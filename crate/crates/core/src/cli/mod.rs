//! The `qe3` command line: `table`, `solve` and `riccati`.

mod table;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use table::{
    compute_table, expected, is_disputed, sl2r_candidate, CellStatus, ClassificationTable, TableCell, TableError,
    TableSummary, DISPUTED, EXPECTED,
};

use crate::algebra::{Canonicalization, MilnorFrame};
use crate::products::{product_qe, space_form_verdict, space_form_verdict_at, EinsteinFactor, ProductVerdict};
use crate::qe_solver::{numeric_oracle, solve_fixed_metric, Geometry, MetricFrame, QeSolution, SignCell};
use crate::riccati::{classify_global, rk4_oracle, RiccatiProblem};
use crate::scalar::Sign;

/// Usage errors, following `sysexits.h`.
pub const EXIT_USAGE: i32 = 64;

const INTEGRATION_SPAN: (f64, f64) = (-5.0, 5.0);
const INTEGRATION_STEP: f64 = 1e-3;
const CSV_STRIDE: usize = 100;
const SOLVE_ORACLE_STARTS: usize = 100;

#[derive(Parser, Debug)]
#[command(name = "qe3", version, about = "Quasi-Einstein metrics on locally homogeneous 3-geometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regenerate the classification table and diff it against the reference table.
    Table(TableArgs),
    /// Solve ric_X^m = A g on one left-invariant metric.
    Solve(SolveArgs),
    /// Classify the global solutions of f' = λ + f²/m.
    Riccati(RiccatiArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MSign {
    Pos,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ASign {
    Pos,
    Zero,
    Neg,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Restrict to one geometry (r3, su2, sl2r, nil, e11, e2, h2xr, s2xr, h3).
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, value_enum)]
    pub m_sign: Option<MSign>,
    #[arg(long, value_enum)]
    pub a_sign: Option<ASign>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: Format,
    /// Residual tolerance for witnesses, in (0, 1e-4).
    #[arg(long, default_value_t = 1e-10, value_parser = parse_tolerance)]
    pub tolerance: f64,
    /// Seed for the numeric-oracle starts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the certificate of every cell, not only the differing ones.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub group: String,
    /// Structure constants λ1,λ2,λ3 in any order and orientation.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: f64,
    /// Einstein constant scale for h2xr, s2xr and h3.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Fix A (h3 only).
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: Format,
    #[arg(long, default_value_t = 1e-10, value_parser = parse_tolerance)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also print the eliminated support branches.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Args, Debug)]
pub struct RiccatiArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub f0: Option<f64>,
    /// Emit an RK4 trajectory on [-5, 5] as CSV (needs --f0).
    #[arg(long)]
    pub integrate: bool,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: Format,
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t < 1e-4 {
        Ok(t)
    } else {
        Err(format!("tolerance must lie in (0, 1e-4), got {t}"))
    }
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Table(a) => cmd_table(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Riccati(a) => cmd_riccati(&a),
    };
    match result {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            code
        }
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Formats a float with `-0` normalized to `0`.
fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

fn vec3(v: &[f64; 3]) -> String {
    format!("({}, {}, {})", num(v[0]), num(v[1]), num(v[2]))
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_table(args: &TableArgs) -> Result<(String, i32), Usage> {
    let geometries: Vec<Geometry> = match &args.group {
        Some(g) => vec![g.parse::<Geometry>()?],
        None => Geometry::ALL.to_vec(),
    };
    let cells: Vec<SignCell> = SignCell::ALL
        .into_iter()
        .filter(|c| match args.m_sign {
            Some(MSign::Pos) => c.m == Sign::Positive,
            Some(MSign::Neg) => c.m == Sign::Negative,
            None => true,
        })
        .filter(|c| match args.a_sign {
            Some(ASign::Pos) => c.a == Sign::Positive,
            Some(ASign::Zero) => c.a == Sign::Zero,
            Some(ASign::Neg) => c.a == Sign::Negative,
            None => true,
        })
        .collect();
    // errors here are internal failures, not usage errors
    let table = match compute_table(&geometries, &cells, args.seed, args.tolerance) {
        Ok(t) => t,
        Err(e) => return Ok((format!("internal error: {e}\n"), 1)),
    };
    let code = table.exit_code();
    let text = match args.format {
        Format::Markdown => table_markdown(&table, &geometries, &cells, args.certify),
        Format::Json => {
            let mut v = serde_json::to_value(&table).expect("serializable");
            if !args.certify {
                for c in v["cells"].as_array_mut().expect("cells array") {
                    if c["status"] == "match" {
                        c["certificate"] = serde_json::Value::Array(vec![]);
                    }
                }
            }
            v["summary"] = serde_json::to_value(table.summary()).expect("serializable");
            v["exit_code"] = code.into();
            json_text(&v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["geometry", "cell", "expected", "computed", "status"]).expect("in-memory write");
            for c in &table.cells {
                let status = serde_json::to_value(c.status).expect("serializable");
                w.write_record([
                    c.geometry.name(),
                    &c.label,
                    &c.expected.to_string(),
                    &c.computed.to_string(),
                    status.as_str().unwrap_or_default(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
    };
    Ok((text, code))
}

fn table_markdown(table: &ClassificationTable, geometries: &[Geometry], cells: &[SignCell], certify: bool) -> String {
    let mut s = String::new();
    let header: Vec<String> = cells.iter().map(SignCell::label).collect();
    let _ = writeln!(s, "| Geometry | {} |", header.join(" | "));
    let _ = writeln!(s, "|---|{}", "---|".repeat(cells.len()));
    for g in geometries {
        let row: Vec<String> = cells
            .iter()
            .map(|c| {
                let cell = table.get(*g, *c).expect("computed cell");
                match cell.status {
                    CellStatus::Match => cell.computed.to_string(),
                    _ => format!("{} (expected {})", cell.computed, cell.expected),
                }
            })
            .collect();
        let _ = writeln!(s, "| {} | {} |", g.name(), row.join(" | "));
    }
    let differing: Vec<&TableCell> = table.cells.iter().filter(|c| c.status != CellStatus::Match).collect();
    if !differing.is_empty() {
        let _ = writeln!(s, "\n## Differences\n");
        for c in &differing {
            let tag = if c.status == CellStatus::Disputed { "disputed" } else { "MISMATCH" };
            let _ = writeln!(s, "### {} ({}): {tag}\n", c.geometry.name(), c.label);
            let _ = writeln!(s, "expected {}, computed {}", c.expected, c.computed);
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "witness: {}", serde_json::to_string(&strip_draws(w)).expect("serializable"));
            }
            if let Some(o) = &c.oracle {
                let _ = writeln!(s, "{o}");
            }
            for line in &c.certificate {
                let _ = writeln!(s, "- {line}");
            }
            let _ = writeln!(s);
        }
    }
    if certify {
        let _ = writeln!(s, "\n## Certificates\n");
        for c in table.cells.iter().filter(|c| c.status == CellStatus::Match) {
            let _ = writeln!(s, "### {} ({}): {}\n", c.geometry.name(), c.label, c.computed);
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "witness: {}", serde_json::to_string(&strip_draws(w)).expect("serializable"));
            }
            for line in &c.certificate {
                let _ = writeln!(s, "- {line}");
            }
            let _ = writeln!(s);
        }
    }
    let sum = table.summary();
    let _ = writeln!(
        s,
        "\n{} cells: {} match, {} disputed, {} mismatched",
        sum.cells, sum.matched, sum.disputed, sum.mismatched
    );
    s
}

fn strip_draws(w: &serde_json::Value) -> serde_json::Value {
    let mut w = w.clone();
    if let Some(obj) = w.as_object_mut() {
        if let Some(draws) = obj.remove("draws") {
            obj.insert("draws_checked".into(), draws.as_array().map_or(0, Vec::len).into());
        }
    }
    w
}

fn cmd_solve(args: &SolveArgs) -> Result<(String, i32), Usage> {
    if args.m == 0.0 || !args.m.is_finite() {
        return Err(Usage(format!("m must be finite and nonzero, got {}", args.m)));
    }
    let geometry: Geometry = args.group.parse()?;
    match geometry {
        Geometry::S2xR | Geometry::H3 => return solve_product(geometry, args),
        _ => {}
    }
    let (frame, canon) = match geometry {
        Geometry::H2xR => (MetricFrame::h2xr_from_rho(args.rho)?, Canonicalization::identity()),
        _ => {
            let lambda = match (&args.lambda, geometry) {
                (Some(l), _) if l.len() == 3 => [l[0], l[1], l[2]],
                (Some(l), _) => return Err(Usage(format!("--lambda takes three values, got {}", l.len()))),
                (None, Geometry::R3) => [0.0; 3],
                (None, _) => return Err(Usage(format!("--lambda a,b,c is required for {}", geometry.name()))),
            };
            let (f, canon) = MilnorFrame::canonicalize(lambda)?;
            if Geometry::from_group(f.group) != geometry {
                return Err(Usage(format!(
                    "λ* = {} has the sign pattern of {}, not {}",
                    vec3(&lambda),
                    f.group.display_name(),
                    geometry.name()
                )));
            }
            (MetricFrame::Milnor(f), canon)
        }
    };
    let sols = solve_fixed_metric(&frame, args.m)?;
    let oracle = numeric_oracle(&frame, args.m, SOLVE_ORACLE_STARTS, args.seed)?;
    let all: Vec<QeSolution> = sols.solutions.iter().chain(&sols.non_killing).cloned().collect();
    let (missed, extra) = oracle.compare(&all);
    let oracle_ok = missed.is_empty() && extra.is_empty();
    let residual_ok = all.iter().all(|s| s.residual < args.tolerance);
    let code = if oracle_ok && residual_ok { 0 } else { 1 };
    let to_input = |s: &QeSolution| {
        let mut s = s.clone();
        s.x = canon.field_to_input(&s.x).map(|v| if v == 0.0 { 0.0 } else { v });
        s
    };
    let text = match args.format {
        Format::Json | Format::Csv => {
            let mut v = sols.to_json();
            v["solutions"] = serde_json::to_value(sols.solutions.iter().map(to_input).collect::<Vec<_>>()).expect("serializable");
            v["non_killing"] = serde_json::to_value(sols.non_killing.iter().map(to_input).collect::<Vec<_>>()).expect("serializable");
            v["frame_change"] = serde_json::to_value(canon).expect("serializable");
            v["oracle"] = serde_json::json!({
                "starts": SOLVE_ORACLE_STARTS,
                "seed": args.seed,
                "clusters": oracle.clusters.len(),
                "missed": missed.len(),
                "extra": extra.len(),
            });
            if !args.certify {
                v.as_object_mut().expect("object").remove("certificates");
            }
            json_text(&v)
        }
        Format::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "# {} m = {}\n", frame.describe(), num(args.m));
            if canon != Canonicalization::identity() {
                let _ = writeln!(
                    s,
                    "canonical frame: permutation {:?}{}; X is reported in the input frame\n",
                    canon.permutation,
                    if canon.negated { ", negated" } else { "" }
                );
            }
            let section = |s: &mut String, title: &str, list: &[QeSolution]| {
                let _ = writeln!(s, "## {title}\n");
                if list.is_empty() {
                    let _ = writeln!(s, "none\n");
                    return;
                }
                for sol in list.iter().map(to_input) {
                    let _ = writeln!(
                        s,
                        "- X = {}, A = {}, residual = {:.1e}, killing = {}, constraint: {}",
                        vec3(&sol.x),
                        num(sol.a),
                        sol.residual,
                        sol.killing,
                        sol.constraint
                    );
                }
                let _ = writeln!(s);
            };
            section(&mut s, "Killing solutions", &sols.solutions);
            section(&mut s, "Non-Killing solutions", &sols.non_killing);
            if args.certify {
                let _ = writeln!(s, "## Eliminated branches\n");
                for c in &sols.certificates {
                    let _ = writeln!(s, "- {c}");
                }
                let _ = writeln!(s);
            }
            let _ = writeln!(
                s,
                "oracle ({} starts, seed {}): {} cluster(s), {} missed, {} extra",
                SOLVE_ORACLE_STARTS,
                args.seed,
                oracle.clusters.len(),
                missed.len(),
                extra.len()
            );
            s
        }
    };
    Ok((text, code))
}

fn solve_product(geometry: Geometry, args: &SolveArgs) -> Result<(String, i32), Usage> {
    let verdict: ProductVerdict = match geometry {
        Geometry::S2xR => product_qe(&EinsteinFactor::sphere(2, args.rho)?, &EinsteinFactor::line(), args.m, true)?,
        _ => match args.a {
            Some(a) => space_form_verdict_at(args.rho, args.m, a)?,
            None => space_form_verdict(args.rho, args.m)?,
        },
    };
    let text = match args.format {
        Format::Json | Format::Csv => json_text(&serde_json::to_value(&verdict).expect("serializable")),
        Format::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "# {} ρ = {} m = {}\n", geometry.name(), num(args.rho), num(args.m));
            let _ = writeln!(s, "verdict: {}", verdict.verdict);
            if let Some(a) = verdict.a {
                let _ = writeln!(s, "A = {}", num(a));
            }
            if let Some(f) = &verdict.field {
                let _ = writeln!(
                    s,
                    "X = {} ∂r, block residual = {:.1e}, branches: {}",
                    num(f.coefficient),
                    f.block_residual,
                    f.branches.join(", ")
                );
            }
            let _ = writeln!(s);
            for r in &verdict.reasoning {
                let _ = writeln!(s, "- {r}");
            }
            s
        }
    };
    Ok((text, 0))
}

fn cmd_riccati(args: &RiccatiArgs) -> Result<(String, i32), Usage> {
    let p = RiccatiProblem::new(args.lambda, args.m, args.f0)?;
    let classes = classify_global(&p);
    let trajectory = if args.integrate {
        if args.f0.is_none() {
            return Err(Usage("--integrate needs --f0".into()));
        }
        Some(rk4_oracle(&p, INTEGRATION_SPAN, INTEGRATION_STEP)?)
    } else {
        None
    };
    let text = match args.format {
        Format::Json => {
            let v = serde_json::json!({ "problem": p, "classification": classes, "trajectory": trajectory });
            json_text(&v)
        }
        Format::Markdown | Format::Csv => {
            let mut s = String::new();
            let header = if trajectory.is_some() { "# " } else { "" };
            let _ = writeln!(
                s,
                "{header}f' = λ + f²/m with λ = {}, m = {}{}",
                num(args.lambda),
                num(args.m),
                args.f0.map(|f| format!(", f(0) = {}", num(f))).unwrap_or_default()
            );
            for c in &classes {
                let _ = writeln!(s, "{header}{}", c.kind.describe());
            }
            if let Some(t) = trajectory {
                if let Some(b) = t.blow_up {
                    let _ = writeln!(s, "# blow-up at t ≈ {:.3} (confirmed: {})", b.time, b.confirmed);
                }
                let mut sampled = t.clone();
                sampled.t = t.t.iter().step_by(CSV_STRIDE).copied().collect();
                sampled.f = t.f.iter().step_by(CSV_STRIDE).copied().collect();
                s.push_str(&sampled.to_csv());
            }
            s
        }
    };
    Ok((text, 0))
}

