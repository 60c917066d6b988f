//! `herm-density`: command-line front end for exact hermitian local densities.
//!
//! Every verb prints either an aligned table of exact values or a JSON
//! document carrying `command`, `version` and `q` alongside the `result`.
//! Exit codes: 0 ok, 1 verification failure, 2 usage or parse error,
//! 3 computation refused (oracle budget or no stabilization).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use herm_density::arith::rat_string;
use herm_density::fourier_checks::{d_sum_standard, mu_identities};
use herm_density::hermitian_lattice::{genus_from_gram, mu_counts, AmbientLattice, GenusSymbol, GramMatrix};
use herm_density::local_density::{coefficients_c, dden, den_poly, pden_poly, pdden_closed, pdden_machine};
use herm_density::oracle::{den_oracle, pden_oracle};
use herm_density::suites::{run_suite, SuiteReport, SUITES};
use herm_density::{Error, Poly, QValue};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "herm-density", version, about = "Exact local densities of hermitian lattices over a ramified quadratic extension")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args, Debug, Clone)]
struct QArg {
    /// Residue field size; odd, at least 3.
    #[arg(long, default_value_t = 3)]
    q: u64,
}

#[derive(Args, Debug, Clone)]
struct LatticeArg {
    /// Genus symbol, e.g. "0^1+,1H^1,2^1-".
    #[arg(long, allow_hyphen_values = true)]
    genus: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank, fundamental invariants and block statistics of a genus symbol.
    Invariants {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        q: QArg,
    },
    /// Canonical genus symbol, from a symbol or from a Gram matrix in JSON.
    Genus {
        /// Genus symbol to canonicalize.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "gram")]
        genus: Option<String>,
        /// Gram matrix as an array of rows of {"a": "p/q", "b": "p/q"} (entry a + b·π).
        #[arg(long, required_unless_present = "genus")]
        gram: Option<String>,
        #[command(flatten)]
        q: QArg,
    },
    /// Genus symbol of the dual lattice.
    Dual {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        q: QArg,
    },
    /// Sign χ of the ambient hermitian space.
    Chi {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        q: QArg,
    },
    /// Local density polynomial Den(I_m^ε, L, X).
    DenPoly(PolyArgs),
    /// Primitive local density polynomial Pden(I_m^ε, L, X).
    PdenPoly(PolyArgs),
    /// Modified derived density ∂Den(L).
    Dden {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        q: QArg,
    },
    /// Primitive modified derived density, by the machine route and the closed formula.
    Pdden {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        q: QArg,
    },
    /// Coefficients c_t of the defining system.
    Coeffs {
        /// Rank or inclusive range "a..b".
        #[arg(long)]
        n: String,
        /// Ambient sign ε.
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        eps: String,
        #[command(flatten)]
        q: QArg,
    },
    /// Coset counts μ of L^♯/L and the identities they satisfy.
    Mu {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        q: QArg,
    },
    /// The finite D-sum over cosets of a flat lattice, x = π^valx·w.
    Dsum {
        /// Genus symbol of the flat lattice.
        #[arg(long, allow_hyphen_values = true)]
        flat: String,
        /// Sign χ of the ambient space V.
        #[arg(long, allow_hyphen_values = true)]
        ambient_chi: String,
        /// Valuation of (x, x).
        #[arg(long)]
        valx: u32,
        #[command(flatten)]
        q: QArg,
    },
    /// Brute-force density by counting maps over truncated rings.
    Oracle {
        /// Genus symbol of the target M.
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        /// Genus symbol of the source L.
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        /// Number of hyperbolic planes H added to M.
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Largest truncation depth tried.
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Count only primitive maps.
        #[arg(long)]
        primitive: bool,
        #[command(flatten)]
        q: QArg,
    },
    /// Run a verification suite, or "all" in dependency order.
    Verify {
        /// Suite name or "all".
        suite: String,
        #[command(flatten)]
        q: QArg,
    },
}

#[derive(Args, Debug, Clone)]
struct PolyArgs {
    #[command(flatten)]
    lattice: LatticeArg,
    /// Rank of the unimodular target; defaults to rank(L).
    #[arg(long)]
    m: Option<u32>,
    /// Sign of the target; defaults to -χ(L).
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<String>,
    #[command(flatten)]
    q: QArg,
}

/// A failed command with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } | Error::NoStabilization { .. } => 3,
            Error::Consistency(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// What a verb produced: JSON payload, table rows, and whether verification passed.
struct Report {
    q: u64,
    result: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    ok: bool,
    note: Option<String>,
}

impl Report {
    fn new(q: u64, result: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report { q, result, header, rows, ok: true, note: None }
    }
}

fn parse_q(q: &QArg) -> Result<QValue, Failure> {
    Ok(QValue::odd(q.q)?)
}

fn parse_prime_q(q: &QArg) -> Result<QValue, Failure> {
    let v = parse_q(q)?;
    if !v.is_prime() {
        return Err(usage(format!("q = {} must be prime for this command", q.q)));
    }
    Ok(v)
}

fn parse_sign(s: &str) -> Result<i32, Failure> {
    match s.trim() {
        "+1" | "1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        other => Err(usage(format!("sign must be +1 or -1, got {other:?}"))),
    }
}

fn parse_genus(s: &str) -> Result<GenusSymbol, Failure> {
    Ok(s.parse::<GenusSymbol>()?)
}

fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || usage(format!("expected n or a..b, got {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn poly_rows(p: &Poly) -> Vec<Vec<String>> {
    p.to_strings().into_iter().enumerate().map(|(i, c)| vec![format!("X^{i}"), c]).collect()
}

fn run(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Invariants { lattice, q } => {
            let q = parse_q(q)?;
            let l = parse_genus(&lattice.genus)?;
            let inv = l.invariants();
            let stats = l.stats();
            let chi = l.chi(q.get());
            let inv_text = inv.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
            Ok(Report::new(
                q.get(),
                json!({"L": l, "rank": l.rank(), "invariants": inv, "stats": stats, "chi": chi, "integral": l.is_integral()}),
                vec!["field", "value"],
                vec![
                    vec!["L".into(), l.to_string()],
                    vec!["rank".into(), l.rank().to_string()],
                    vec!["invariants".into(), inv_text],
                    vec!["chi".into(), chi.to_string()],
                    vec!["integral".into(), l.is_integral().to_string()],
                ],
            ))
        }
        Command::Genus { genus, gram, q } => {
            let q = parse_q(q)?;
            let l = match (genus, gram) {
                (Some(s), _) => parse_genus(s)?,
                (None, Some(g)) => {
                    let v: Value = serde_json::from_str(g).map_err(|e| usage(format!("bad Gram JSON: {e}")))?;
                    genus_from_gram(&GramMatrix::from_json(&v, q.get())?)?
                }
                (None, None) => return Err(usage("one of --genus or --gram is required")),
            };
            Ok(Report::new(q.get(), json!({"L": l}), vec!["genus"], vec![vec![l.to_string()]]))
        }
        Command::Dual { lattice, q } => {
            let q = parse_q(q)?;
            let l = parse_genus(&lattice.genus)?;
            let d = l.dual();
            Ok(Report::new(q.get(), json!({"L": l, "dual": d}), vec!["L", "dual"], vec![vec![l.to_string(), d.to_string()]]))
        }
        Command::Chi { lattice, q } => {
            let q = parse_q(q)?;
            let l = parse_genus(&lattice.genus)?;
            let chi = l.chi(q.get());
            Ok(Report::new(q.get(), json!({"L": l, "chi": chi}), vec!["L", "chi"], vec![vec![l.to_string(), chi.to_string()]]))
        }
        Command::DenPoly(args) | Command::PdenPoly(args) => {
            let primitive = matches!(command, Command::PdenPoly(_));
            let q = if primitive { parse_q(&args.q)? } else { parse_prime_q(&args.q)? };
            let l = parse_genus(&args.lattice.genus)?;
            let m = args.m.unwrap_or(l.rank());
            let sign = match &args.sign {
                Some(s) => parse_sign(s)?,
                None => -l.chi(q.get()),
            };
            let p = if primitive { pden_poly(m, sign, &l, q) } else { den_poly(m, sign, &l, q)? };
            Ok(Report::new(q.get(), json!({"L": l, "m": m, "sign": sign, "coefficients": p}), vec!["term", "coefficient"], poly_rows(&p)))
        }
        Command::Dden { lattice, q } => {
            let q = parse_prime_q(q)?;
            let l = parse_genus(&lattice.genus)?;
            let v = dden(&l, q)?;
            Ok(Report::new(q.get(), json!({"L": l, "dden": v.to_string()}), vec!["L", "dden"], vec![vec![l.to_string(), v.to_string()]]))
        }
        Command::Pdden { lattice, q } => {
            let q = parse_q(q)?;
            let l = parse_genus(&lattice.genus)?;
            let machine = pdden_machine(&l, q);
            let closed = pdden_closed(&l, q);
            let mut r = Report::new(
                q.get(),
                json!({"L": l, "pdden": rat_string(&machine), "closed": rat_string(&closed)}),
                vec!["L", "pdden", "closed"],
                vec![vec![l.to_string(), rat_string(&machine), rat_string(&closed)]],
            );
            if machine != closed {
                r.ok = false;
                r.note = Some(format!("machine value {} differs from closed formula {} for L = {l}", rat_string(&machine), rat_string(&closed)));
            }
            Ok(r)
        }
        Command::Coeffs { n, eps, q } => {
            let q = parse_q(q)?;
            let eps = parse_sign(eps)?;
            let (a, b) = parse_range(n)?;
            let mut rows = Vec::new();
            let mut entries = Vec::new();
            for n in a..=b {
                for (t, c) in coefficients_c(n, eps, q) {
                    rows.push(vec![n.to_string(), t.to_string(), rat_string(&c)]);
                    entries.push(json!({"n": n, "t": t, "c": rat_string(&c)}));
                }
            }
            Ok(Report::new(q.get(), json!({"eps": eps, "coefficients": entries}), vec!["n", "t", "c_t"], rows))
        }
        Command::Mu { lattice, q } => {
            let q = parse_prime_q(q)?;
            let l = parse_genus(&lattice.genus)?;
            let mu = mu_counts(&AmbientLattice::from_symbol(&l, q.get()))?;
            let mut rows = vec![
                vec!["mu+".into(), mu.plus.to_string()],
                vec!["mu0".into(), mu.zero.to_string()],
                vec!["mu0+".into(), mu.zero_plus.to_string()],
                vec!["mu0-".into(), mu.zero_minus.to_string()],
                vec!["mu-".into(), mu.minus.to_string()],
            ];
            let mut result = json!({"L": l, "mu": mu});
            let mut r_ok = true;
            // the identities only apply to lattices of full type
            if let Ok(id) = mu_identities(&l, q) {
                rows.push(vec!["identities hold".into(), id.holds().to_string()]);
                r_ok = id.holds();
                result["identities"] = serde_json::to_value(&id).expect("serializable");
            }
            let mut r = Report::new(q.get(), result, vec!["quantity", "value"], rows);
            if !r_ok {
                r.ok = false;
                r.note = Some(format!("mu identities fail for L = {l}"));
            }
            Ok(r)
        }
        Command::Dsum { flat, ambient_chi, valx, q } => {
            let q = parse_prime_q(q)?;
            let flat = parse_genus(flat)?;
            let chi = parse_sign(ambient_chi)?;
            let rep = d_sum_standard(&flat, chi, *valx, q)?;
            let rows = vec![
                vec!["D".into(), rat_string(&rep.value)],
                vec!["t".into(), rep.t.to_string()],
                vec!["consistent".into(), rep.all_consistent().to_string()],
            ];
            let ok = rep.all_consistent();
            let mut r = Report::new(q.get(), json!({"flat": flat, "ambient_chi": chi, "valx": valx, "report": rep}), vec!["quantity", "value"], rows);
            if !ok {
                r.ok = false;
                r.note = Some(format!("D-sum bookkeeping inconsistent for flat = {flat}, chi = {chi}, valx = {valx}"));
            }
            Ok(r)
        }
        Command::Oracle { m, l, k, depth, primitive, q } => {
            let q = parse_prime_q(q)?;
            let ms = parse_genus(m)?;
            let ls = parse_genus(l)?;
            let (mg, lg) = (ms.gram(q.get()), ls.gram(q.get()));
            let res = if *primitive { pden_oracle(&mg, &lg, *k, *depth, q)? } else { den_oracle(&mg, &lg, *k, *depth, q)? };
            let rows = res
                .trace
                .iter()
                .map(|r| vec![r.d.to_string(), r.count.to_string(), rat_string(&r.normalized)])
                .collect();
            Ok(Report::new(
                q.get(),
                json!({"M": ms, "L": ls, "k": k, "primitive": primitive, "value": rat_string(&res.value), "trace": res.trace}),
                vec!["d", "count", "normalized"],
                rows,
            ))
        }
        Command::Verify { suite, q } => {
            let q = parse_q(q)?;
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
                return Err(usage(format!("unknown suite {bad}; known: all, {}", SUITES.join(", "))));
            }
            let mut reports: Vec<SuiteReport> = Vec::new();
            for name in names {
                let rep = run_suite(name, q)?;
                let stop = !rep.passed();
                reports.push(rep);
                // later suites depend on earlier ones, so stop at the first failure
                if stop {
                    break;
                }
            }
            let mut rows = Vec::new();
            for rep in &reports {
                for part in &rep.parts {
                    rows.push(vec![
                        rep.suite.clone(),
                        part.name.clone(),
                        part.checks.to_string(),
                        part.failures.to_string(),
                        if part.passed() { "PASS".into() } else { "FAIL".into() },
                    ]);
                }
            }
            let failure = reports.iter().find_map(|r| r.first_failure().map(|(part, ctx)| format!("{}/{part}: {ctx}", r.suite)));
            let mut r = Report::new(q.get(), json!({"suites": reports}), vec!["suite", "part", "checks", "failures", "status"], rows);
            if let Some(f) = failure {
                r.ok = false;
                r.note = Some(format!("first counterexample: {f}"));
            }
            Ok(r)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Invariants { .. } => "invariants",
        Command::Genus { .. } => "genus",
        Command::Dual { .. } => "dual",
        Command::Chi { .. } => "chi",
        Command::DenPoly(_) => "den-poly",
        Command::PdenPoly(_) => "pden-poly",
        Command::Dden { .. } => "dden",
        Command::Pdden { .. } => "pdden",
        Command::Coeffs { .. } => "coeffs",
        Command::Mu { .. } => "mu",
        Command::Dsum { .. } => "dsum",
        Command::Oracle { .. } => "oracle",
        Command::Verify { .. } => "verify",
    }
}

fn print_table(header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        println!("{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("HERM_DENSITY_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("HERM_DENSITY_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    let outcome = configure_threads().and_then(|_| run(&cli.command));
    match outcome {
        Ok(report) => {
            match cli.format {
                Format::Json => {
                    let doc = json!({
                        "command": name,
                        "version": env!("CARGO_PKG_VERSION"),
                        "q": report.q,
                        "ok": report.ok,
                        "result": report.result,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                }
                Format::Table => print_table(&report.header, &report.rows),
            }
            if let Some(note) = &report.note {
                eprintln!("{note}");
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == 2 {
                eprintln!("run `herm-density --help` for usage");
            }
            ExitCode::from(f.code)
        }
    }
}
