//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a property or validation failure (rejected
//! certificate, no map constructed), `2` invalid input.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{bounds_report, compare_remark310, corollary37_report, corollary39_bound, UNITS};
use crate::constructions::{plan_theorem13, validate_certificate, worst_case_c, Certificate};
use crate::cyclic_ring::{quotient_invariants, Locality, QuotientCtx};
use crate::error::Error;
use crate::euler::{lemma41_nonvanishing, sharpness_scan, verify_identity_a, EulerQuery};
use crate::group_rep::{delta, effective_reduction, valuation, GroupSpec, RepInput, RepSpec};

/// Environment variable capping the worker threads used by `scan`.
pub const THREADS_ENV: &str = "BU_THREADS";

#[derive(Debug, Parser)]
#[command(name = "equibound", about = "Exact Borsuk-Ulam / Bourgin-Yang bounds for cyclic p-groups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LocalityArg {
    /// localized at p
    P,
    Integral,
}

impl From<LocalityArg> for Locality {
    fn from(l: LocalityArg) -> Self {
        match l {
            LocalityArg::P => Locality::PLocal,
            LocalityArg::Integral => Locality::Integral,
        }
    }
}

#[derive(Debug, Args)]
struct GroupArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, allow_negative_numbers = true)]
    k: i64,
}

#[derive(Debug, Args)]
struct RepArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    /// Tensor exponents t_i, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["profile", "rep"])]
    exps: Option<Vec<i64>>,
    /// Valuation profile m_0,...,m_k (expanded to exponents p^l).
    #[arg(long, value_delimiter = ',', conflicts_with = "rep")]
    profile: Option<Vec<usize>>,
    /// JSON file {"p": .., "k": .., "exponents": [..]}.
    #[arg(long, conflicts_with_all = ["p", "k"])]
    rep: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// δ(V) and the valuation profile.
    Delta {
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Zero-set bound report; also the fixed-point bound and the S(U) → V bound.
    Bound {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        /// Exponents of a source module U (bound for maps S(U) → V).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["n", "manifold_dim"])]
        source_exps: Option<Vec<i64>>,
        /// Dimension r of a target manifold (fixed-point bound; no V needed).
        #[arg(long)]
        manifold_dim: Option<u64>,
    },
    /// Is e(V)(1 − z)^j non-zero modulo (1 − z)^n?
    Oracle {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[arg(long, value_enum, default_value_t = LocalityArg::Integral)]
        local: LocalityArg,
        /// Restrict to the subgroup on which m_k ≠ 0 first.
        #[arg(long)]
        reduce: bool,
    },
    /// Verdict table over 0 ≤ j ≤ n at fixed n.
    Scan {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value_t = LocalityArg::P)]
        local: LocalityArg,
        #[arg(long)]
        reduce: bool,
    },
    /// Solve the integral identity for a_l.
    IdentityA {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        l: u32,
    },
    /// Plan the map S(n_0 L) → S(V) and emit its certificate.
    Construct {
        #[command(flatten)]
        rep: RepArgs,
        /// Write the certificate here instead of embedding it in the report.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Re-validate a certificate file.
    Verify { path: PathBuf },
    /// Compare with earlier bounds.
    Compare {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        n: i64,
    },
    /// Abelian group structure of Z[z]/(z^N − 1, (1 − z)^n).
    Structure {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        n: i64,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Failure with its exit code.
struct Failure {
    code: i32,
    message: String,
    payload: Option<Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into(), payload: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = std::result::Result<Value, Failure>;

fn big(v: &BigInt) -> Value {
    serde_json::from_str(&v.to_string()).expect("integer literal is valid JSON")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

impl RepArgs {
    fn build(&self) -> std::result::Result<RepSpec, Failure> {
        if let Some(path) = &self.rep {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            let input: RepInput = serde_json::from_str(&text)
                .map_err(|e| Failure::input(format!("bad representation file {}: {e}", path.display())))?;
            return Ok(input.build()?);
        }
        let (Some(p), Some(k)) = (self.p, self.k) else {
            return Err(Failure::input("need --p and --k (or --rep FILE)"));
        };
        let group = GroupSpec::new(p, k)?;
        match (&self.exps, &self.profile) {
            (Some(e), None) => Ok(RepSpec::new(group, e)?),
            (None, Some(m)) => Ok(RepSpec::from_profile(group, m)?),
            _ => Err(Failure::input("need exactly one of --exps or --profile")),
        }
    }
}

fn maybe_reduce(rep: RepSpec, reduce: bool) -> std::result::Result<(RepSpec, Option<u32>), Failure> {
    if rep.top_level_nonempty() {
        return Ok((rep, None));
    }
    if !reduce {
        // surfaces the TopLevelEmpty error with the level to reduce to
        delta(&rep)?;
    }
    let eff = effective_reduction(&rep);
    Ok((eff.rep, Some(eff.k)))
}

fn cmd_delta(args: &RepArgs) -> CmdResult {
    let rep = args.build()?;
    let eff = effective_reduction(&rep);
    let mut out = json!({ "delta": eff.delta, "profile": rep.profile() });
    if eff.k < rep.group().k() {
        out["effective_k"] = json!(eff.k);
    }
    Ok(out)
}

fn cmd_bound(
    args: &RepArgs,
    n: Option<i64>,
    source_exps: &Option<Vec<i64>>,
    manifold_dim: Option<u64>,
) -> CmdResult {
    if let Some(r) = manifold_dim {
        if args.exps.is_some() || args.profile.is_some() || args.rep.is_some() {
            return Err(Failure::input("--manifold-dim takes only --p, --k and --n"));
        }
        let (Some(p), Some(k), Some(n)) = (args.p, args.k, n) else {
            return Err(Failure::input("--manifold-dim needs --p, --k and --n"));
        };
        let k = u32::try_from(k).map_err(|_| Error::NegativeLevel(k))?;
        let b = corollary37_report(p, k, r, n)?;
        return Ok(json!({
            "bound": b.bound,
            "delta": b.delta,
            "profile": b.profile,
            "note": b.note,
            "units": UNITS,
        }));
    }
    let rep = args.build()?;
    if let Some(u) = source_exps {
        let source = RepSpec::new(rep.group(), u)?;
        let b = corollary39_bound(&source, &rep)?;
        return Ok(json!({
            "n": b.n,
            "delta": delta(&rep)?,
            "lower_bound_dim": b.bound,
            "gamma_order": big(&b.gamma_order),
            "units": UNITS,
        }));
    }
    let n = n.ok_or_else(|| Failure::input("bound needs --n"))?;
    Ok(to_value(&bounds_report(&rep, n)))
}

fn cmd_oracle(args: &RepArgs, n: i64, j: u32, local: LocalityArg, reduce: bool) -> CmdResult {
    let (rep, _) = maybe_reduce(args.build()?, reduce)?;
    let q = EulerQuery::new(rep, n, j, local.into())?;
    Ok(json!({ "nonzero": lemma41_nonvanishing(&q)? }))
}

fn scan_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&t| t > 0)
}

fn cmd_scan(args: &RepArgs, n: i64, local: LocalityArg, reduce: bool) -> CmdResult {
    let (rep, effective_k) = maybe_reduce(args.build()?, reduce)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = scan_threads() {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Failure::input(format!("thread pool: {e}")))?;
    let scan = pool.install(|| sharpness_scan(&rep, n, local.into()))?;
    let mut out = to_value(&scan);
    out["divergent_j"] = json!(scan.divergent_rows().map(|r| r.j).collect::<Vec<_>>());
    if let Some(k) = effective_k {
        out["effective_k"] = json!(k);
    }
    Ok(out)
}

fn cmd_identity_a(group: &GroupArgs, l: u32) -> CmdResult {
    let g = GroupSpec::new(group.p, group.k)?;
    let a = verify_identity_a(g, l)?;
    Ok(json!({ "a_l": a.iter().map(big).collect::<Vec<_>>() }))
}

fn cmd_construct(args: &RepArgs, output: &Option<PathBuf>) -> CmdResult {
    let (rep, effective_k) = maybe_reduce(args.build()?, true)?;
    let group = rep.group();
    let d = delta(&rep)?;
    let c_worst = worst_case_c(group.p(), group.k());
    let plan = match plan_theorem13(&rep) {
        Ok(plan) => plan,
        Err(Error::NoMapConstructed) => {
            return Err(Failure {
                code: 1,
                message: "no map constructed: every level has n_l = 0".into(),
                payload: Some(json!({
                    "constructed": false,
                    "delta": d,
                    "weighted_sum": rep.weighted_sum(),
                    "c_worst": c_worst,
                })),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let unit_adjusted = rep
        .exponents()
        .iter()
        .any(|&t| t != group.p_pow(valuation(group.p(), t)));
    let mut out = json!({
        "constructed": true,
        "delta": d,
        "n0": plan.n0,
        "c_achieved": plan.c_achieved,
        "c_worst": c_worst,
        "levels": plan.levels,
        "unit_power_maps": unit_adjusted,
        "source": plan.certificate.source.iter().map(|&(a, u)| [a, u]).collect::<Vec<_>>(),
        "target": plan.certificate.target.iter().map(|&(a, u)| [a, u]).collect::<Vec<_>>(),
    });
    if let Some(k) = effective_k {
        out["effective_k"] = json!(k);
    }
    match output {
        Some(path) => {
            std::fs::write(path, plan.certificate.to_json() + "\n")
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            out["certificate"] = json!(path.display().to_string());
        }
        None => {
            out["certificate"] = serde_json::from_str(&plan.certificate.to_json()).expect("round-trips");
        }
    }
    Ok(out)
}

fn cmd_verify(path: &PathBuf) -> CmdResult {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let rejected = |path: String, message: String| Failure {
        code: 1,
        message: format!("certificate rejected at {path}: {message}"),
        payload: Some(json!({ "valid": false, "path": path, "error": message })),
    };
    let cert = Certificate::from_json(&text).map_err(|e| rejected(e.path, e.message))?;
    let (src, tgt) = validate_certificate(&cert).map_err(|e| rejected(e.path, e.message))?;
    Ok(json!({
        "valid": true,
        "group": { "p": cert.group.p(), "kappa": cert.group.kappa() },
        "source": src.summands().iter().map(|&(a, u)| [a, u]).collect::<Vec<_>>(),
        "target": tgt.summands().iter().map(|&(a, u)| [a, u]).collect::<Vec<_>>(),
        "nodes": cert.size(),
    }))
}

fn cmd_compare(args: &RepArgs, n: i64) -> CmdResult {
    let rep = args.build()?;
    let mut out = to_value(&compare_remark310(&rep, n));
    out["units"] = to_value(&UNITS);
    Ok(out)
}

fn cmd_structure(group: &GroupArgs, n: i64) -> CmdResult {
    let g = GroupSpec::new(group.p, group.k)?;
    let ctx = QuotientCtx::new(g, n)?;
    let s = quotient_invariants(&ctx);
    Ok(json!({
        "order": g.order(),
        "n": n,
        "free_rank": s.free_rank,
        "torsion": s.torsion.iter().map(big).collect::<Vec<_>>(),
    }))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Aligned text: `key  value` lines, arrays of objects as column tables.
fn render_table(v: &Value) -> String {
    let Value::Object(map) = v else { return scalar(v) + "\n" };
    let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    let mut tables = Vec::new();
    for (key, val) in map {
        match val {
            Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
                tables.push((key, rows));
            }
            _ => out.push_str(&format!("{key:<width$}  {}\n", scalar(val))),
        }
    }
    for (key, rows) in tables {
        let cols: Vec<&String> = rows[0].as_object().expect("object rows").keys().collect();
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| cols.iter().map(|c| scalar(&r[c.as_str()])).collect())
            .collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        out.push_str(&format!("\n{key}:\n"));
        let header: Vec<String> = cols.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(&format!("  {}\n", header.join("  ")));
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(&format!("  {}\n", line.join("  ")));
        }
    }
    out
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(v).expect("value serializes") + "\n",
        Format::Table => render_table(v),
    }
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match &cli.command {
        Command::Delta { rep } => cmd_delta(rep),
        Command::Bound { rep, n, source_exps, manifold_dim } => cmd_bound(rep, *n, source_exps, *manifold_dim),
        Command::Oracle { rep, n, j, local, reduce } => cmd_oracle(rep, *n, *j, *local, *reduce),
        Command::Scan { rep, n, local, reduce } => cmd_scan(rep, *n, *local, *reduce),
        Command::IdentityA { group, l } => cmd_identity_a(group, *l),
        Command::Construct { rep, output } => cmd_construct(rep, output),
        Command::Verify { path } => cmd_verify(path),
        Command::Compare { rep, n } => cmd_compare(rep, *n),
        Command::Structure { group, n } => cmd_structure(group, *n),
    };
    match result {
        Ok(v) => Outcome { code: 0, stdout: render(&v, cli.format), stderr: String::new() },
        Err(f) => Outcome {
            code: f.code,
            stdout: f.payload.as_ref().map(|v| render(v, cli.format)).unwrap_or_default(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}
