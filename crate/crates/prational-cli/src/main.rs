//! Deterministic command-line surface over prational-core. Every subcommand
//! emits machine-readable rows on stdout, one row per result; progress and
//! errors go to stderr. Rationals are always printed `num/den`, absent fields
//! are `-` in TSV and null in JSON.
//!
//! Exit codes: 0 success, 2 argument errors (from the parser), 3 violated
//! preconditions, reported with the library's stable error tag.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use prational_core::cohen::{h_coeff, h_series, CohenIndex};
use prational_core::dirichlet::{l_neg, QuadCharacter};
use prational_core::qexp_io::{load_residue, save_qexp, save_residue};
use prational_core::qseries::ResidueSeries;
use prational_core::rationality::{is_p_rational_real, scan_real, RationalityReport};
use prational_core::search5::{find_d, identity_eval, next_new_5rational, sieve_lemma42};
use prational_core::serre::{
    convolve_theta, hyp_check, scan_series, scan_with_series, ScanConfig, ScanSeries,
    SCAN_GUARD_E,
};
use prational_core::{Error, Result};

#[derive(Parser)]
#[command(name = "prational", version, about = "p-rationality toolkit", max_term_width = 100)]
struct Cli {
    /// Output format for result rows
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,

    /// Directory for qexp sidecar files; only accelerates, never changes results
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads; results are identical for any value
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=512))]
    jobs: u32,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// L(1-i, chi_d) exactly. Columns: i d l_value
    Lvalue {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        d: i64,
    },
    /// Cohen series coefficient h(i, n). Columns: i n value
    Cohen {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        n: u64,
    },
    /// Write the weight i + 1/2 Cohen series to a qexp v1 file
    #[command(name = "cohen-series")]
    CohenSeries {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        prec: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// p-rationality verdict for the real quadratic field of discriminant d.
    /// Columns: d p l_value valuation verdict reason
    #[command(name = "is-p-rational")]
    IsPRational {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: i64,
    },
    /// Verdicts for every fundamental 1 < d <= dmax. Columns as is-p-rational
    Scan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        dmax: i64,
    },
    /// Both sides of the weight-5 identity for 1 <= n <= nmax.
    /// Columns: n lhs rhs_divisor rhs_two_square equal
    #[command(name = "verify-identity")]
    VerifyIdentity {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
    },
    /// Witness 2 ell ell' = x^2 + d y^2 with 5-rational d. Columns: d x y l_value
    #[command(name = "find-5rational")]
    Find5Rational {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        lprime: u64,
    },
    /// Primes ell' = 3 mod 4 splitting every listed discriminant. Columns: ell
    Sieve {
        #[arg(long, value_name = "CSV")]
        d_list: String,
        #[arg(long)]
        bound: u64,
    },
    /// One 5-rational discriminant outside the known list.
    /// Columns: d_new ell ell_prime x y l_value
    #[command(name = "next-new")]
    NextNew {
        #[arg(long, value_name = "CSV", default_value = "")]
        known: String,
        #[arg(long)]
        sieve_bound: u64,
        #[arg(long)]
        lp_bound: u64,
    },
    /// Candidate congruence scan. Columns: ell congruence_ok cornacchia_a
    /// cornacchia_b b_prime wieferich_ok eps_b_mod_p2 hp_holds a_mod_p2
    /// b_mod_p2 ab_congruence_ok d x y1
    #[command(name = "serre-scan")]
    SerreScan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        t: u64,
        /// Restriction primes, may be empty
        #[arg(long, value_name = "CSV", default_value = "")]
        primes: String,
        #[arg(long)]
        prec: usize,
        #[arg(long)]
        ncheck: usize,
        #[arg(long)]
        lmin: u64,
        #[arg(long)]
        lmax: u64,
    },
    /// Two-square hypothesis report for one prime. Columns: p t ell
    /// cornacchia_a cornacchia_b b_prime wieferich_ok eps_b_mod_p2 hp_holds
    #[command(name = "hyp-check")]
    HypCheck {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        l: u64,
    },
}

enum Cell {
    U(u64),
    I(i64),
    Rat(BigRational),
    Text(String),
    Bool(bool),
    Missing,
}

struct Row(Vec<(&'static str, Cell)>);

impl Row {
    fn new() -> Self {
        Row(Vec::new())
    }
    fn u(mut self, k: &'static str, v: u64) -> Self {
        self.0.push((k, Cell::U(v)));
        self
    }
    fn i(mut self, k: &'static str, v: i64) -> Self {
        self.0.push((k, Cell::I(v)));
        self
    }
    fn rat(mut self, k: &'static str, v: &BigRational) -> Self {
        self.0.push((k, Cell::Rat(v.clone())));
        self
    }
    fn text(mut self, k: &'static str, v: &str) -> Self {
        self.0.push((k, Cell::Text(v.to_owned())));
        self
    }
    fn b(mut self, k: &'static str, v: bool) -> Self {
        self.0.push((k, Cell::Bool(v)));
        self
    }
    fn opt<T>(mut self, k: &'static str, v: Option<T>, f: impl Fn(T) -> Cell) -> Self {
        self.0.push((k, v.map_or(Cell::Missing, f)));
        self
    }
}

fn tsv_cell(c: &Cell) -> String {
    match c {
        Cell::U(v) => v.to_string(),
        Cell::I(v) => v.to_string(),
        Cell::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => "-".into(),
    }
}

fn json_cell(c: &Cell) -> serde_json::Value {
    match c {
        Cell::U(v) => (*v).into(),
        Cell::I(v) => (*v).into(),
        Cell::Rat(r) => format!("{}/{}", r.numer(), r.denom()).into(),
        Cell::Text(s) => s.clone().into(),
        Cell::Bool(b) => (*b).into(),
        Cell::Missing => serde_json::Value::Null,
    }
}

fn emit(format: Format, rows: &[Row]) {
    let mut out = String::new();
    for row in rows {
        match format {
            Format::Tsv => {
                let line: Vec<String> = row.0.iter().map(|(_, c)| tsv_cell(c)).collect();
                out.push_str(&line.join("\t"));
            }
            Format::Json => {
                let map: serde_json::Map<String, serde_json::Value> =
                    row.0.iter().map(|(k, c)| ((*k).to_owned(), json_cell(c))).collect();
                out.push_str(&serde_json::Value::Object(map).to_string());
            }
        }
        out.push('\n');
    }
    std::io::stdout().lock().write_all(out.as_bytes()).expect("stdout");
}

fn parse_csv<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse::<T>()
                .map_err(|_| Error::Parse(format!("bad {what} entry '{part}'")))
        })
        .collect()
}

fn verdict_row(rep: &RationalityReport) -> Row {
    Row::new()
        .i("d", rep.d)
        .u("p", rep.p)
        .opt("l_value", rep.l_value.as_ref(), |r| Cell::Rat(r.clone()))
        .opt("valuation", rep.valuation, Cell::I)
        .text("verdict", &rep.verdict.to_string())
        .text("reason", rep.reason)
}

/// Sidecar name for the restricted residue series; one file per exact
/// parameter tuple so a stale cache can never alias a different series.
fn cache_name(p: u64, l: &[u64], prec: usize) -> String {
    let ls = if l.is_empty() {
        "none".to_owned()
    } else {
        l.iter().map(u64::to_string).collect::<Vec<_>>().join("_")
    };
    format!("g-p{p}-e{SCAN_GUARD_E}-l{ls}-n{prec}.qexp")
}

fn cached_g(dir: &Path, cfg: &ScanConfig) -> Option<ResidueSeries> {
    let path = dir.join(cache_name(cfg.p, &cfg.l, cfg.prec));
    let g = load_residue(&path).ok()?;
    (g.p == cfg.p && g.e == SCAN_GUARD_E && g.prec() == cfg.prec).then_some(g)
}

fn serre_series(cfg: &ScanConfig, cache: Option<&Path>) -> Result<ScanSeries> {
    if let Some(dir) = cache {
        if let Some(g) = cached_g(dir, cfg) {
            eprintln!("serre-scan: residue series loaded from cache");
            let f = convolve_theta(&g, cfg.t);
            return Ok(ScanSeries { g, f });
        }
    }
    eprintln!("serre-scan: building residue series to precision {}", cfg.prec);
    let series = scan_series(cfg)?;
    if let Some(dir) = cache {
        fs::create_dir_all(dir)?;
        save_residue(&dir.join(cache_name(cfg.p, &cfg.l, cfg.prec)), &series.g)?;
    }
    Ok(series)
}

fn run(cli: Cli) -> Result<()> {
    let rows = match cli.cmd {
        Cmd::Lvalue { i, d } => {
            let value = l_neg(i, QuadCharacter::new(d)?)?.value;
            vec![Row::new().u("i", i as u64).i("d", d).rat("l_value", &value)]
        }
        Cmd::Cohen { i, n } => {
            let value = h_coeff(CohenIndex::new(i)?, n);
            vec![Row::new().u("i", i as u64).u("n", n).rat("value", &value)]
        }
        Cmd::CohenSeries { i, prec, out } => {
            let series = h_series(CohenIndex::new(i)?, prec);
            save_qexp(&out, &series)?;
            vec![]
        }
        Cmd::IsPRational { p, d } => vec![verdict_row(&is_p_rational_real(d, p)?)],
        Cmd::Scan { p, dmax } => scan_real(p, dmax)?.iter().map(verdict_row).collect(),
        Cmd::VerifyIdentity { nmax } => (1..=nmax)
            .map(|n| {
                let ev = identity_eval(n);
                Row::new()
                    .u("n", n)
                    .rat("lhs", &ev.lhs)
                    .rat("rhs_divisor", &ev.rhs_divisor_term)
                    .rat("rhs_two_square", &ev.rhs_two_square_term)
                    .b("equal", ev.equal)
            })
            .collect(),
        Cmd::Find5Rational { l, lprime } => {
            let w = find_d(l, lprime)?;
            vec![Row::new().i("d", w.d).u("x", w.x).u("y", w.y).rat("l_value", &w.l_value)]
        }
        Cmd::Sieve { d_list, bound } => {
            let ds: Vec<i64> = parse_csv(&d_list, "discriminant")?;
            sieve_lemma42(&ds, bound)?
                .into_iter()
                .map(|ell| Row::new().u("ell", ell))
                .collect()
        }
        Cmd::NextNew { known, sieve_bound, lp_bound } => {
            let known: Vec<i64> = parse_csv(&known, "discriminant")?;
            let nn = next_new_5rational(&known, sieve_bound, lp_bound)?;
            vec![Row::new()
                .i("d_new", nn.d_new)
                .u("ell", nn.ell)
                .u("ell_prime", nn.ell_prime)
                .u("x", nn.x)
                .u("y", nn.y)
                .rat("l_value", &nn.l_value)]
        }
        Cmd::SerreScan { p, t, primes, prec, ncheck, lmin, lmax } => {
            let l: Vec<u64> = parse_csv(&primes, "prime")?;
            let cfg = ScanConfig { p, t, l, prec, n_check: ncheck, ell_range: (lmin, lmax) };
            cfg.validate()?;
            let series = serre_series(&cfg, cli.cache.as_deref())?;
            scan_with_series(&cfg, &series)?
                .into_iter()
                .map(|r| {
                    Row::new()
                        .u("ell", r.ell)
                        .b("congruence_ok", r.congruence_ok)
                        .opt("cornacchia_a", r.cornacchia, |(a, _)| Cell::U(a))
                        .opt("cornacchia_b", r.cornacchia, |(_, b)| Cell::U(b))
                        .opt("b_prime", r.b_prime, Cell::Bool)
                        .opt("wieferich_ok", r.wieferich_ok, Cell::Bool)
                        .opt("eps_b_mod_p2", r.eps_sigma_b_mod_p2, Cell::U)
                        .b("hp_holds", r.hp_holds)
                        .u("a_mod_p2", r.a_mod_p2)
                        .u("b_mod_p2", r.b_mod_p2)
                        .b("ab_congruence_ok", r.ab_congruence_ok)
                        .opt("d", r.extracted_d, |(d, _, _)| Cell::I(d))
                        .opt("x", r.extracted_d, |(_, x, _)| Cell::U(x))
                        .opt("y1", r.extracted_d, |(_, _, y1)| Cell::U(y1))
                })
                .collect()
        }
        Cmd::HypCheck { p, t, l } => {
            let h = hyp_check(p, t, l)?;
            vec![Row::new()
                .u("p", h.p)
                .u("t", h.t)
                .u("ell", h.ell)
                .opt("cornacchia_a", h.cornacchia, |(a, _)| Cell::U(a))
                .opt("cornacchia_b", h.cornacchia, |(_, b)| Cell::U(b))
                .opt("b_prime", h.b_prime, Cell::Bool)
                .opt("wieferich_ok", h.wieferich_ok, Cell::Bool)
                .opt("eps_b_mod_p2", h.eps_sigma_b_mod_p2, Cell::U)
                .b("hp_holds", h.hp_holds)]
        }
    };
    emit(cli.format, &rows);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs as usize)
        .build_global()
        .ok();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}
