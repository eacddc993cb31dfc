//! `dickson` — closed-form residue sums and image sizes of Dickson
//! polynomials over small finite fields, with a brute-force oracle behind
//! every formula.
//!
//! Subcommands: `sum` and `size` answer single-point queries, `table` prints
//! family tables (optionally grouped by the divisor pair), and `verify` runs
//! the closed-form-vs-oracle sweep. csv and json output is byte-stable for
//! identical inputs except for the timing fields of `verify`.

mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dickson_core::closed_form::{image_size, residue_sum};
use dickson_core::dickson::{dickson_eval_fast, DicksonParams};
use dickson_core::ff::{make_field, FieldCtx, FieldElem};
use dickson_core::oracle::{brute_image, verify_sweep, ClassChecks, Sample, SweepGrid};
use table::{build_rows, group_rows, Family, TableSpec};

#[derive(Parser)]
#[command(name = "dickson", version, about = "Residue sums and value sets of Dickson polynomials over F_q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form residue sum S_q(D_n(x, a)) with its branch trace
    Sum(SumArgs),
    /// Closed-form size of the value set of D_n(x, a) (even n)
    Size(SizeArgs),
    /// Residue-sum table for a polynomial family over a range of indices
    Table(TableArgs),
    /// Compare every closed form against exhaustive enumeration
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Args)]
struct FieldArgs {
    /// Odd prime characteristic
    #[arg(long)]
    p: u64,
    /// Extension degree (q = p^k)
    #[arg(long, default_value_t = 1)]
    k: u32,
}

#[derive(Args)]
struct SumArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Index of the Dickson polynomial
    #[arg(long)]
    n: u64,
    /// Parameter a: an integer (reduced mod p) or a comma list of
    /// coefficients for extension fields
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Also enumerate the true sum and compare
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
}

#[derive(Args)]
struct SizeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: u64,
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Enumerate instead of using the closed form (required for odd n)
    #[arg(long)]
    oracle: bool,
    /// Also enumerate and compare
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[command(flatten)]
    field: FieldArgs,
    /// Inclusive index range, e.g. 1..40
    #[arg(long)]
    range: String,
    /// Parameter a (only with --family dickson)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Add enumerated sums and a match column
    #[arg(long)]
    check: bool,
    /// Keep only odd indices
    #[arg(long)]
    odd_only: bool,
    /// Keep only even indices
    #[arg(long)]
    even_only: bool,
    /// Collapse the table to one row per divisor pair; the only supported
    /// grouping is "d,delta"
    #[arg(long)]
    group_by: Option<String>,
    /// Group on gcd(n, 2(q+1)) instead of gcd(n, q+1)
    #[arg(long)]
    double_delta: bool,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassMode {
    Auto,
    On,
    Off,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated odd prime powers; defaults to
    /// 3,5,7,9,11,13,25,27,49
    #[arg(long, value_delimiter = ',')]
    q_set: Option<Vec<u64>>,
    /// Largest index per field; defaults to q^2 - 1
    #[arg(long)]
    n_max: Option<u64>,
    /// Randomly subsample this many (a, n) pairs per field instead of the
    /// full grid
    #[arg(long)]
    sample: Option<usize>,
    /// Seed for --sample (recorded in the report)
    #[arg(long)]
    seed: Option<u64>,
    /// Per-class image/sum/overlap comparisons; auto enables them for q <= 27
    #[arg(long, value_enum, default_value_t = ClassMode::Auto)]
    class_checks: ClassMode,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
}

fn main() -> ExitCode {
    // die quietly when the consumer closes the pipe (e.g. `dickson table | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Sum(args) => cmd_sum(args),
        Command::Size(args) => cmd_size(args),
        Command::Table(args) => cmd_table(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn build_field(args: &FieldArgs) -> Result<FieldCtx, String> {
    make_field(args.p, args.k).map_err(|e| e.to_string())
}

fn parse_elem(ctx: &FieldCtx, text: &str) -> Result<FieldElem, String> {
    if let Ok(value) = text.parse::<i64>() {
        return Ok(ctx.from_int(value));
    }
    let parts: Result<Vec<i64>, _> = text.split(',').map(|t| t.trim().parse::<i64>()).collect();
    let parts = parts.map_err(|_| format!("cannot parse field element {text:?}"))?;
    if parts.len() > ctx.k() as usize {
        return Err(format!(
            "{} coefficients given but the field has degree {}",
            parts.len(),
            ctx.k()
        ));
    }
    let p = ctx.p() as i64;
    let coeffs: Vec<u64> = parts.iter().map(|&c| c.rem_euclid(p) as u64).collect();
    Ok(ctx.from_coeffs(&coeffs))
}

fn parse_range(text: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("range must look like LO..HI, got {text:?}"))?;
    let lo: u64 = lo.trim().parse().map_err(|_| format!("bad range start {lo:?}"))?;
    let hi: u64 = hi.trim().parse().map_err(|_| format!("bad range end {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {text:?}"));
    }
    Ok((lo, hi))
}

fn enumerated_sum(ctx: &FieldCtx, n: u64, a: FieldElem) -> FieldElem {
    brute_image(ctx, |x| dickson_eval_fast(ctx, DicksonParams::new(n, a), x)).sum
}

fn enumerated_size(ctx: &FieldCtx, n: u64, a: FieldElem) -> u64 {
    brute_image(ctx, |x| dickson_eval_fast(ctx, DicksonParams::new(n, a), x)).size
}

fn cmd_sum(args: SumArgs) -> Result<ExitCode, String> {
    let ctx = build_field(&args.field)?;
    let a = parse_elem(&ctx, &args.a)?;
    let result = residue_sum(&ctx, args.n, a);
    let oracle = args.check.then(|| enumerated_sum(&ctx, args.n, a));
    let matched = oracle.map(|o| o == result.value);

    match args.format {
        Format::Markdown => {
            println!("q = {} (p = {}, k = {})", ctx.q(), ctx.p(), ctx.k());
            println!("n = {}", args.n);
            println!("a = {}", ctx.render(a));
            println!("value = {}", ctx.render(result.value));
            println!("trace: {}", result.trace.render(&ctx));
            if let (Some(o), Some(m)) = (oracle, matched) {
                println!("oracle = {}", ctx.render(o));
                println!("match = {}", if m { "true" } else { "false" });
            }
        }
        Format::Csv => {
            let mut header = "q,n,a,value".to_string();
            let mut row = format!("{},{},{},{}", ctx.q(), args.n, ctx.render(a), ctx.render(result.value));
            if let (Some(o), Some(m)) = (oracle, matched) {
                header.push_str(",oracle,match");
                row.push_str(&format!(",{},{}", ctx.render(o), m));
            }
            println!("{header}");
            println!("{row}");
        }
        Format::Json => {
            let mut doc = json!({
                "schema_version": 1,
                "command": "sum",
                "q": ctx.q(),
                "n": args.n,
                "a": ctx.render(a),
                "value": ctx.render(result.value),
                "trace": result.trace.render(&ctx),
            });
            if let (Some(o), Some(m)) = (oracle, matched) {
                doc["oracle"] = json!(ctx.render(o));
                doc["match"] = json!(m);
            }
            println!("{doc}");
        }
    }
    Ok(if matched == Some(false) { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_size(args: SizeArgs) -> Result<ExitCode, String> {
    let ctx = build_field(&args.field)?;
    let a = parse_elem(&ctx, &args.a)?;
    let closed = if args.oracle {
        None
    } else {
        Some(image_size(&ctx, args.n, a).map_err(|e| format!("{e}; pass --oracle to enumerate"))?)
    };
    let oracle = (args.oracle || args.check).then(|| enumerated_size(&ctx, args.n, a));
    let value = closed.or(oracle).expect("one source is always present");
    let matched = match (closed, oracle) {
        (Some(c), Some(o)) => Some(c == o),
        _ => None,
    };

    match args.format {
        Format::Markdown => {
            println!("q = {} (p = {}, k = {})", ctx.q(), ctx.p(), ctx.k());
            println!("n = {}", args.n);
            println!("a = {}", ctx.render(a));
            println!("size = {value}");
            if let (Some(o), Some(m)) = (oracle, matched) {
                println!("oracle = {o}");
                println!("match = {}", if m { "true" } else { "false" });
            }
        }
        Format::Csv => {
            let mut header = "q,n,a,size".to_string();
            let mut row = format!("{},{},{},{}", ctx.q(), args.n, ctx.render(a), value);
            if let (Some(o), Some(m)) = (oracle, matched) {
                header.push_str(",oracle,match");
                row.push_str(&format!(",{o},{m}"));
            }
            println!("{header}");
            println!("{row}");
        }
        Format::Json => {
            let mut doc = json!({
                "schema_version": 1,
                "command": "size",
                "q": ctx.q(),
                "n": args.n,
                "a": ctx.render(a),
                "size": value,
                "source": if args.oracle { "oracle" } else { "closed" },
            });
            if let (Some(o), Some(m)) = (oracle, matched) {
                doc["oracle"] = json!(o);
                doc["match"] = json!(m);
            }
            println!("{doc}");
        }
    }
    Ok(if matched == Some(false) { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_table(args: TableArgs) -> Result<ExitCode, String> {
    let ctx = build_field(&args.field)?;
    let (lo, hi) = parse_range(&args.range)?;
    if args.odd_only && args.even_only {
        return Err("--odd-only and --even-only exclude each other".into());
    }
    let a = match (args.family, &args.a) {
        (Family::Dickson, Some(text)) => Some(parse_elem(&ctx, text)?),
        (Family::Dickson, None) => return Err("--family dickson requires --a".into()),
        (_, Some(_)) => {
            return Err(format!("--a is only valid with --family dickson (the {} parameter is fixed)", args.family.as_str()))
        }
        (Family::Lucas, None) => Some(ctx.from_int(-1)),
        (Family::Chebyshev, None) => Some(ctx.one()),
        (Family::Fibonacci, None) => None,
    };
    if args.family == Family::Fibonacci && lo == 0 {
        return Err("fibonacci indexing starts at 1".into());
    }
    if let Some(group) = &args.group_by {
        if group != "d,delta" {
            return Err(format!("unsupported grouping {group:?}; only d,delta is available"));
        }
        if args.family == Family::Fibonacci {
            return Err("grouping needs a closed form; fibonacci has none".into());
        }
    } else if args.double_delta {
        return Err("--double-delta only applies with --group-by d,delta".into());
    }

    let spec = TableSpec {
        ctx: &ctx,
        family: args.family,
        a,
        lo,
        hi,
        odd_only: args.odd_only,
        even_only: args.even_only,
        check: args.check,
    };

    if args.group_by.is_some() {
        let groups = match group_rows(&spec, args.double_delta).map_err(|e| e.to_string())? {
            Ok(groups) => groups,
            Err(inconsistency) => {
                eprintln!("error: {inconsistency}");
                return Ok(ExitCode::from(1));
            }
        };
        match args.format {
            Format::Markdown => {
                println!("| d | delta | sum_closed | count |");
                println!("| - | - | - | - |");
                for g in &groups {
                    println!("| {} | {} | {} | {} |", g.d, g.delta, ctx.render(g.value), g.count);
                }
            }
            Format::Csv => {
                println!("d,delta,sum_closed,count");
                for g in &groups {
                    println!("{},{},{},{}", g.d, g.delta, ctx.render(g.value), g.count);
                }
            }
            Format::Json => {
                let rows: Vec<_> = groups
                    .iter()
                    .map(|g| {
                        json!({
                            "d": g.d,
                            "delta": g.delta,
                            "sum_closed": ctx.render(g.value),
                            "count": g.count,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "schema_version": 1,
                        "command": "table",
                        "family": args.family.as_str(),
                        "q": ctx.q(),
                        "grouped_by": "d,delta",
                        "double_delta": args.double_delta,
                        "rows": rows,
                    })
                );
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let rows = build_rows(&spec).map_err(|e| e.to_string())?;
    let has_oracle = rows.iter().any(|r| r.oracle.is_some());
    let has_match = rows.iter().any(|r| r.matched().is_some());
    let all_matched = rows.iter().all(|r| r.matched() != Some(false));
    let render_opt = |v: Option<FieldElem>| v.map(|e| ctx.render(e)).unwrap_or_default();

    match args.format {
        Format::Markdown => {
            let mut header = "| n | d | delta | sum_closed |".to_string();
            if has_oracle {
                header.push_str(" sum_oracle |");
            }
            if has_match {
                header.push_str(" match |");
            }
            println!("{header}");
            println!("{}", "| - ".repeat(header.matches('|').count() - 1) + "|");
            for r in &rows {
                let mut line =
                    format!("| {} | {} | {} | {} |", r.n, r.d, r.delta, render_opt(r.closed));
                if has_oracle {
                    line.push_str(&format!(" {} |", render_opt(r.oracle)));
                }
                if has_match {
                    let cell = r.matched().map(|m| m.to_string()).unwrap_or_default();
                    line.push_str(&format!(" {cell} |"));
                }
                println!("{line}");
            }
        }
        Format::Csv => {
            let mut header = "n,d,delta,sum_closed".to_string();
            if has_oracle {
                header.push_str(",sum_oracle");
            }
            if has_match {
                header.push_str(",match");
            }
            println!("{header}");
            for r in &rows {
                let mut line = format!("{},{},{},{}", r.n, r.d, r.delta, render_opt(r.closed));
                if has_oracle {
                    line.push_str(&format!(",{}", render_opt(r.oracle)));
                }
                if has_match {
                    let cell = r.matched().map(|m| m.to_string()).unwrap_or_default();
                    line.push_str(&format!(",{cell}"));
                }
                println!("{line}");
            }
        }
        Format::Json => {
            let rows_json: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "d": r.d,
                        "delta": r.delta,
                        "sum_closed": r.closed.map(|e| ctx.render(e)),
                        "sum_oracle": r.oracle.map(|e| ctx.render(e)),
                        "match": r.matched(),
                    })
                })
                .collect();
            println!(
                "{}",
                json!({
                    "schema_version": 1,
                    "command": "table",
                    "family": args.family.as_str(),
                    "q": ctx.q(),
                    "a": a.map(|e| ctx.render(e)),
                    "rows": rows_json,
                })
            );
        }
    }
    Ok(if all_matched { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let qs = args.q_set.unwrap_or_else(|| vec![3, 5, 7, 9, 11, 13, 25, 27, 49]);
    let mut grid = SweepGrid::for_q_values(&qs).map_err(|e| e.to_string())?;
    grid.n_max = args.n_max;
    grid.sample = args
        .sample
        .map(|pairs_per_field| Sample { pairs_per_field, seed: args.seed.unwrap_or(0xD1C5) });
    grid.class_checks = match args.class_checks {
        ClassMode::Auto => ClassChecks::Auto,
        ClassMode::On => ClassChecks::On,
        ClassMode::Off => ClassChecks::Off,
    };
    let report = verify_sweep(&grid).map_err(|e| e.to_string())?;

    match args.format {
        Format::Markdown => {
            let q_list: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
            println!("grid: q = {}", q_list.join(","));
            match grid.sample {
                Some(s) => println!("sample: {} pairs per field, seed {}", s.pairs_per_field, s.seed),
                None => println!("sample: full grid (every a, n = 0..={})",
                    grid.n_max.map_or("q^2-1".to_string(), |n| n.to_string())),
            }
            let c = report.counts;
            println!(
                "checks: residue_sum={} membership={} image_size={} per_class={}",
                c.residue_sum, c.membership, c.image_size, c.per_class
            );
            println!("elapsed: {} ms", report.elapsed.as_millis());
            for m in &report.mismatches {
                println!(
                    "MISMATCH q={} a={} n={} check={} closed={} oracle={}{}",
                    m.q,
                    m.a,
                    m.n,
                    m.check.as_str(),
                    m.closed,
                    m.oracle,
                    m.trace.as_deref().map(|t| format!(" trace: {t}")).unwrap_or_default()
                );
            }
            println!("mismatches: {}", report.mismatches.len());
            println!("{}", if report.passed() { "PASS" } else { "FAIL" });
        }
        Format::Csv => {
            println!("q,a,n,check,closed,oracle");
            for m in &report.mismatches {
                println!(
                    "{},{},{},{},{},{}",
                    m.q,
                    m.a,
                    m.n,
                    m.check.as_str(),
                    m.closed.replace(',', ";"),
                    m.oracle.replace(',', ";")
                );
            }
        }
        Format::Json => {
            let mismatches: Vec<_> = report
                .mismatches
                .iter()
                .map(|m| {
                    json!({
                        "q": m.q,
                        "a": m.a,
                        "n": m.n,
                        "check": m.check.as_str(),
                        "closed": m.closed,
                        "oracle": m.oracle,
                        "trace": m.trace,
                    })
                })
                .collect();
            let c = report.counts;
            println!(
                "{}",
                json!({
                    "schema_version": 1,
                    "command": "verify",
                    "grid": {
                        "q_set": qs,
                        "n_max": grid.n_max,
                        "sample_pairs": grid.sample.map(|s| s.pairs_per_field),
                        "seed": grid.sample.map(|s| s.seed),
                        "class_checks": match grid.class_checks {
                            ClassChecks::Auto => "auto",
                            ClassChecks::On => "on",
                            ClassChecks::Off => "off",
                        },
                    },
                    "checks": {
                        "residue_sum": c.residue_sum,
                        "membership": c.membership,
                        "image_size": c.image_size,
                        "per_class": c.per_class,
                    },
                    "mismatches": mismatches,
                    "elapsed_ms": report.elapsed.as_millis() as u64,
                })
            );
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
