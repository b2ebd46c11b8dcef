mod parse;

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use cuspidal::divisors::CuspDivisor;
use cuspidal::etalinalg::{eta_qexpansion, DEFAULT_PRECISION};
use cuspidal::structure::{self, CyclicFactor};
use cuspidal::{cusps, orderengine, Error};

use parse::parse_divisor_spec;

#[derive(Parser, Debug)]
#[command(name = "cuspidal", version, about = "Rational cuspidal divisor class groups of X0(N)")]
struct Cli {
    /// Largest level accepted by any command.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    level_cap: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List the cusps of X0(N) with their widths.
    Cusps {
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Order invariants of a divisor, e.g. --divisor "1*(1),-1*(11)".
    Order {
        n: u64,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        json: bool,
    },
    /// Eta quotient realizing a multiple of a degree-zero divisor.
    Eta {
        n: u64,
        #[arg(long)]
        divisor: String,
        /// Number of q-expansion coefficients.
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        qexp: usize,
        #[arg(long)]
        json: bool,
    },
    /// Structure of C(N), or of its ℓ-primary part with --ell.
    Group {
        n: u64,
        #[arg(long)]
        ell: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Compare the generator decomposition with the lattice computation.
    Verify {
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run verify for every N ≤ max, caching results as JSON lines.
    Batch {
        #[arg(long)]
        max: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recompute levels already present in the cache.
        #[arg(long)]
        force: bool,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(m) => Failure::Verification(format!("internal error: {m}")),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
    }
}

fn check_level(n: u64, cap: u64) -> CliResult {
    if n == 0 {
        return Err(Failure::Usage("N must be at least 1".into()));
    }
    if n > cap {
        return Err(Failure::Usage(format!("N={n} exceeds the level cap {cap}")));
    }
    Ok(())
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> CliResult {
    let cap = cli.level_cap;
    match cli.cmd {
        Cmd::Cusps { n, json } => {
            check_level(n, cap)?;
            cmd_cusps(n, json)
        }
        Cmd::Order { n, divisor, json } => {
            check_level(n, cap)?;
            cmd_order(n, &divisor, json)
        }
        Cmd::Eta { n, divisor, qexp, json } => {
            check_level(n, cap)?;
            cmd_eta(n, &divisor, qexp, json)
        }
        Cmd::Group { n, ell, json } => {
            check_level(n, cap)?;
            cmd_group(n, ell, json)
        }
        Cmd::Verify { n, json } => {
            check_level(n, cap)?;
            cmd_verify(n, json)
        }
        Cmd::Batch { max, jobs, out, force } => {
            check_level(max, cap)?;
            cmd_batch(max, jobs, out.as_deref(), force)
        }
    }
}

fn cmd_cusps(n: u64, json: bool) -> CliResult {
    let all = cusps::enumerate(n);
    if json {
        let rows: Vec<Value> = all
            .iter()
            .map(|c| json!({"symbol": c.to_string(), "d": c.d, "x": c.x, "width": c.width()}))
            .collect();
        print_json(&json!({"N": n, "cusps": rows}));
        return Ok(());
    }
    println!("X0({n}) has {} cusps", all.len());
    for c in &all {
        println!("{:<12} d={:<8} width={}", c.to_string(), c.d, c.width());
    }
    Ok(())
}

fn fmt_vec(v: &[i128]) -> String {
    let parts: Vec<String> = v.iter().map(i128::to_string).collect();
    format!("({})", parts.join(", "))
}

fn cmd_order(n: u64, spec: &str, json: bool) -> CliResult {
    let c = parse_divisor_spec(spec, n)?;
    let p = orderengine::profile(&c);
    if json {
        print_json(&p);
        return Ok(());
    }
    println!("divisor  {}", pretty_divisor(&c));
    println!("V        {}", fmt_vec(&p.v));
    println!("GCD      {}", p.gcd_value);
    match &p.normalized {
        Some(v) => println!("Vbar     {}", fmt_vec(v)),
        None => println!("Vbar     undefined"),
    }
    for (q, w) in &p.pw {
        println!("Pw_{q:<5} {w}");
    }
    println!("h        {}", p.h);
    match p.order {
        Some(o) => println!("order    {o}"),
        None => println!("order    undefined (degree {})", c.degree()),
    }
    Ok(())
}

fn cmd_eta(n: u64, spec: &str, qexp: usize, json: bool) -> CliResult {
    let c = parse_divisor_spec(spec, n)?;
    let order = orderengine::order(&c)?;
    let r = orderengine::eta_certificate(&c, order)?;
    let q = eta_qexpansion(&r, qexp)?;
    if json {
        let coeffs: Vec<String> = q.coeffs.iter().map(|x| x.to_string()).collect();
        print_json(&json!({
            "N": n,
            "divisor": c,
            "order": order.to_string(),
            "r": r,
            "qexp": {"shift24": q.shift24.to_string(), "coeffs": coeffs},
        }));
        return Ok(());
    }
    println!("order {order}");
    println!("{order}·[{}] = div({r})", pretty_divisor(&c));
    println!("{q}");
    Ok(())
}

/// (0), (∞) and (P_d) notation with unicode minus signs.
fn pretty_divisor(c: &CuspDivisor) -> String {
    let n = c.level();
    let mut out = String::new();
    for (i, (d, k)) in c.terms().into_iter().enumerate() {
        let name = if d == 1 {
            "(0)".to_string()
        } else if d == n {
            "(∞)".to_string()
        } else {
            format!("(P_{d})")
        };
        let sign = if k < 0 { "−" } else if i > 0 { "+" } else { "" };
        let mag = k.unsigned_abs();
        if mag == 1 {
            out.push_str(&format!("{sign}{name}"));
        } else {
            out.push_str(&format!("{sign}{mag}{name}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn shape_of(orders: &[u128]) -> String {
    if orders.is_empty() {
        return "0".into();
    }
    orders.iter().map(|o| format!("Z/{o}")).collect::<Vec<_>>().join(" ⊕ ")
}

fn print_factors(factors: &[CyclicFactor]) {
    for f in factors {
        let label = match f.ell {
            Some(l) => format!("{} [ℓ={l}]", f.label),
            None => f.label.clone(),
        };
        println!("  {:<16} order {:<8} {}", label, f.order, pretty_divisor(&f.divisor));
    }
}

fn cmd_group(n: u64, ell: Option<u64>, json: bool) -> CliResult {
    if let Some(l) = ell {
        let factors = structure::compute_ell_primary(n, l)?;
        if json {
            print_json(&json!({"N": n, "ell": l, "generators": factors}));
            return Ok(());
        }
        let orders: Vec<u128> = factors.iter().map(|f| f.order).collect();
        println!("C({n})[{l}^∞] ≅ {}", shape_of(&orders));
        print_factors(&factors);
        return Ok(());
    }
    let g = structure::compute_group(n)?;
    if json {
        print_json(&g);
        return Ok(());
    }
    match g.cyclic_factors.as_slice() {
        [f] => println!("C({n}) ≅ Z/{}, generator {}", f.order, pretty_divisor(&f.divisor)),
        factors => {
            println!("C({n}) ≅ {}", g.shape());
            if !factors.is_empty() {
                println!("order {}, generators:", g.group_order);
                print_factors(factors);
            }
        }
    }
    Ok(())
}

fn cmd_verify(n: u64, json: bool) -> CliResult {
    let rep = structure::crosscheck(n)?;
    if json {
        print_json(&rep);
    } else {
        let orders: Vec<u128> = rep.group.iter().map(|s| s.parse().unwrap_or(0)).collect();
        let status = if rep.agree { "pass" } else { "FAIL" };
        let fallback = if rep.oracle_fallback { " (confirmed by lattice oracle)" } else { "" };
        println!("verify {n}: {status}, {}{fallback}", shape_of(&orders));
    }
    if rep.agree {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "N={n}: generators {:?}, oracle {:?}, certificates {}, order mismatches {:?}",
            rep.group, rep.oracle, rep.certificates_passed, rep.order_mismatches
        )))
    }
}

fn cache_path() -> PathBuf {
    let dir = std::env::var_os("CUSPIDAL_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".cuspidal-cache"));
    dir.join("crosscheck.jsonl")
}

/// Cached lines keyed by N; unreadable lines are ignored.
fn read_cache(path: &Path) -> std::io::Result<BTreeMap<u64, String>> {
    let mut out = BTreeMap::new();
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e),
    };
    for line in BufReader::new(f).lines() {
        let line = line?;
        if let Ok(v) = serde_json::from_str::<Value>(&line) {
            if let Some(n) = v.get("N").and_then(Value::as_u64) {
                out.insert(n, line);
            }
        }
    }
    Ok(out)
}

fn line_passes(line: &str) -> bool {
    serde_json::from_str::<Value>(line)
        .ok()
        .and_then(|v| v.get("agree").and_then(Value::as_bool))
        .unwrap_or(false)
}

fn crosscheck_line(n: u64) -> String {
    let v = match structure::crosscheck(n) {
        Ok(r) => serde_json::to_value(r).expect("serializable"),
        Err(e) => json!({"N": n, "agree": false, "error": e.to_string()}),
    };
    serde_json::to_string(&v).expect("serializable")
}

fn write_sorted(path: &Path, lines: &BTreeMap<u64, String>, max: Option<u64>) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::io::BufWriter::new(File::create(&tmp)?);
        for (_, l) in lines.range(..=max.unwrap_or(u64::MAX)) {
            writeln!(f, "{l}")?;
        }
        f.flush()?;
    }
    fs::rename(tmp, path)
}

const CHUNK: usize = 32;

fn cmd_batch(max: u64, jobs: Option<usize>, out: Option<&Path>, force: bool) -> CliResult {
    let path = cache_path();
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut cache = read_cache(&path)?;
    let todo: Vec<u64> = (1..=max).filter(|n| force || !cache.contains_key(n)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    let mut writer = OpenOptions::new().create(true).append(true).open(&path)?;
    for chunk in todo.chunks(CHUNK) {
        let lines: Vec<String> = pool.install(|| chunk.par_iter().map(|&n| crosscheck_line(n)).collect());
        for (&n, line) in chunk.iter().zip(lines) {
            writeln!(writer, "{line}")?;
            cache.insert(n, line);
        }
        writer.flush()?;
    }
    drop(writer);
    write_sorted(&path, &cache, None)?;
    if let Some(out) = out {
        write_sorted(out, &cache, Some(max))?;
    }
    let failed: Vec<u64> = cache.range(1..=max).filter(|(_, l)| !line_passes(l)).map(|(n, _)| *n).collect();
    println!("batch: {}/{max} pass", max as usize - failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failing levels: {failed:?}")))
    }
}
