use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use primword::asymptotics::{
    check_eps2_bound, prime_product_table, ratio_eps1_l, ratio_eps1_n, ratio_eps2_l, ratio_eps2_n,
    RatioTable,
};
use primword::counting::{consistency_report, reports_to_csv, CountReport};
use primword::numtheory::{count_primitive, mobius};
use primword::pairs::{classify_pair, construct_e1, construct_e2, PairWitness, DEFAULT_BUDGET};
use primword::verify::run_all;
use primword::{Error, Word};

const EXIT_DISAGREEMENT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_DOMAIN: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

#[derive(Parser)]
#[command(
    name = "primword",
    version,
    about = "Primitive word pairs: counts, witnesses and checks"
)]
struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Subcommand)]
enum Command {
    /// Number of primitive words of length l over n letters.
    Pi {
        #[arg(short = 'n', long = "n", value_parser = parse_alphabet)]
        n: u64,
        /// A length or an inclusive range such as 1..12.
        #[arg(short = 'l', long = "l")]
        l: Lengths,
    },
    /// Möbius function.
    Mobius {
        /// A positive integer or an inclusive range such as 1..30.
        values: Lengths,
    },
    /// Every formulation of eps1, eps2 and eps with agreement verdicts.
    Count {
        #[arg(short = 'n', long = "n", value_parser = parse_alphabet)]
        n: u64,
        #[arg(short = 'l', long = "l")]
        l: Lengths,
        /// Also run the brute-force oracle when n^(3l) fits the budget.
        #[arg(long)]
        oracle: bool,
        /// Exit 1 if any two evaluated variants disagree.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Writes the constructed witnesses of E1 and/or E2 as JSON lines.
    Enumerate {
        #[arg(short = 'n', long = "n", value_parser = parse_alphabet)]
        n: u64,
        #[arg(short = 'l', long = "l", value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        #[arg(long, value_enum, default_value = "both")]
        set: PairSet,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Normal form of a pair (p, q).
    Classify {
        #[arg(short = 'n', long = "n", value_parser = parse_alphabet)]
        n: u64,
        #[arg(short = 'p')]
        p: String,
        #[arg(short = 'q')]
        q: String,
    },
    /// Finite-scale ratio tables.
    Asymptote {
        #[arg(long, value_enum)]
        regime: Regime,
        #[arg(short = 'n', long = "n", value_parser = parse_alphabet)]
        n: Option<u64>,
        #[arg(short = 'l', long = "l")]
        l: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,10,100")]
        n_values: Vec<u64>,
        /// Explicit l values; otherwise derived from --l-max per regime
        /// (even l for l-to-inf-eps1, multiples of 4 for l-to-inf-eps2).
        #[arg(long, value_delimiter = ',')]
        l_values: Option<Vec<u64>>,
        #[arg(long, default_value_t = 40)]
        l_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        k: Vec<u64>,
        /// Exit 1 if the table is flagged.
        #[arg(long)]
        strict: bool,
    },
    /// Runs the full consistency grid and prints a pass/fail matrix.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args)]
struct Budget {
    /// Maximum number of words or pairs an enumeration may materialize.
    #[arg(long = "budget", env = "PRIMWORD_BUDGET", default_value_t = DEFAULT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    value: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairSet {
    E1,
    E2,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Regime {
    NToInfEps2,
    NToInfEps1,
    LToInfEps1,
    LToInfEps2,
    Bound,
    PrimeProduct,
}

#[derive(Clone, Debug)]
struct Lengths(Vec<u64>);

impl Lengths {
    fn single(&self) -> Option<u64> {
        (self.0.len() == 1).then(|| self.0[0])
    }
}

impl FromStr for Lengths {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| -> Result<u64, String> {
            match t.trim().parse::<u64>() {
                Ok(0) => Err("must be at least 1".to_string()),
                Ok(v) => Ok(v),
                Err(e) => Err(format!("{t:?}: {e}")),
            }
        };
        match s.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty range {s}"));
                }
                Ok(Lengths((a..=b).collect()))
            }
            None => Ok(Lengths(vec![parse(s)?])),
        }
    }
}

fn parse_alphabet(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(n) if n >= 2 => Ok(n),
        Ok(n) => Err(format!("alphabet size must be at least 2, got {n}")),
        Err(e) => Err(e.to_string()),
    }
}

/// A failure with its exit code and an optional machine-readable payload
/// written to stdout.
struct Failure {
    code: u8,
    message: String,
    payload: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Parse(_)
            | Error::LetterOutOfRange { .. }
            | Error::AlphabetTooSmall(_)
            | Error::AlphabetMismatch(..)
            | Error::InvalidArgument(_)
            | Error::EmptyWord => EXIT_USAGE,
            Error::TrichotomyViolated(_) => EXIT_INTERNAL,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
            payload: None,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
            payload: None,
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
        payload: None,
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) if flushed.is_ok() => ExitCode::from(code),
        Ok(_) => ExitCode::from(EXIT_USAGE),
        Err(f) => {
            if let Some(payload) = f.payload {
                println!("{payload}");
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Outcome {
    let format = cli.format;
    match cli.command {
        Command::Pi { n, l } => cmd_pi(out, format.unwrap_or(Format::Plain), n, &l),
        Command::Mobius { values } => cmd_mobius(out, format.unwrap_or(Format::Plain), &values),
        Command::Count {
            n,
            l,
            oracle,
            strict,
            budget,
        } => cmd_count(
            out,
            format.unwrap_or(Format::Json),
            n,
            &l,
            oracle.then_some(budget.value),
            strict,
        ),
        Command::Enumerate {
            n,
            l,
            set,
            out: path,
            budget,
        } => {
            let format = format.unwrap_or(Format::Json);
            match path {
                Some(path) => {
                    // nothing touches the file unless enumeration succeeds
                    let mut buf = Vec::new();
                    let code = cmd_enumerate(&mut buf, format, n, l, set, budget.value)?;
                    fs::write(&path, buf)?;
                    Ok(code)
                }
                None => cmd_enumerate(out, format, n, l, set, budget.value),
            }
        }
        Command::Classify { n, p, q } => {
            cmd_classify(out, format.unwrap_or(Format::Json), n, &p, &q)
        }
        Command::Asymptote {
            regime,
            n,
            l,
            n_values,
            l_values,
            l_max,
            k,
            strict,
        } => {
            let table = build_table(regime, n, l, &n_values, l_values, l_max, &k)?;
            write_table(out, format.unwrap_or(Format::Plain), &table)?;
            Ok(if strict && table.flagged {
                EXIT_DISAGREEMENT
            } else {
                0
            })
        }
        Command::Verify { seed } => cmd_verify(out, format.unwrap_or(Format::Plain), seed),
    }
}

fn write_csv(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    out.write_all(&writer.into_inner().map_err(|e| e.into_error())?)
}

fn cmd_pi(out: &mut impl Write, format: Format, n: u64, lengths: &Lengths) -> Outcome {
    let values = lengths
        .0
        .iter()
        .map(|&l| Ok((l, count_primitive(n, l)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    match (format, lengths.single()) {
        (Format::Plain, Some(_)) => writeln!(out, "{}", values[0].1)?,
        (Format::Plain, None) => {
            for (l, v) in &values {
                writeln!(out, "{l} {v}")?;
            }
        }
        (Format::Json, single) => {
            let rows: Vec<Value> = values
                .iter()
                .map(|(l, v)| json!({"n": n, "l": l, "pi": v.to_string()}))
                .collect();
            match single {
                Some(_) => writeln!(out, "{}", rows[0])?,
                None => writeln!(out, "{}", Value::Array(rows))?,
            }
        }
        (Format::Csv, _) => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|(l, v)| vec![n.to_string(), l.to_string(), v.to_string()])
                .collect();
            write_csv(out, &["n", "l", "pi"], &rows)?;
        }
    }
    Ok(0)
}

fn cmd_mobius(out: &mut impl Write, format: Format, values: &Lengths) -> Outcome {
    let mus = values
        .0
        .iter()
        .map(|&d| Ok((d, mobius(d)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    match (format, values.single()) {
        (Format::Plain, Some(_)) => writeln!(out, "{}", mus[0].1)?,
        (Format::Plain, None) => {
            for (d, mu) in &mus {
                writeln!(out, "{d} {mu}")?;
            }
        }
        (Format::Json, single) => {
            let rows: Vec<Value> = mus
                .iter()
                .map(|(d, mu)| json!({"n": d, "mu": mu}))
                .collect();
            match single {
                Some(_) => writeln!(out, "{}", rows[0])?,
                None => writeln!(out, "{}", Value::Array(rows))?,
            }
        }
        (Format::Csv, _) => {
            let rows: Vec<Vec<String>> = mus
                .iter()
                .map(|(d, mu)| vec![d.to_string(), mu.to_string()])
                .collect();
            write_csv(out, &["n", "mu"], &rows)?;
        }
    }
    Ok(0)
}

fn write_report_plain(out: &mut impl Write, report: &CountReport) -> io::Result<()> {
    writeln!(out, "n={} l={}", report.n, report.l)?;
    for (quantity, map) in [
        ("eps1", &report.eps1),
        ("eps2", &report.eps2),
        ("eps", &report.eps),
    ] {
        for (source, value) in map {
            writeln!(out, "{quantity} {source} {value}")?;
        }
    }
    if let Some(o) = &report.oracle {
        writeln!(out, "eps1 oracle {}", o.eps1)?;
        writeln!(out, "eps2 oracle {}", o.eps2)?;
    }
    for a in report.disagreements() {
        writeln!(out, "disagree {} {} {}", a.quantity, a.left, a.right)?;
    }
    for note in &report.notes {
        writeln!(out, "note {note}")?;
    }
    writeln!(out, "all_agree {}", report.all_agree())
}

fn cmd_count(
    out: &mut impl Write,
    format: Format,
    n: u64,
    lengths: &Lengths,
    oracle_budget: Option<u64>,
    strict: bool,
) -> Outcome {
    let reports = lengths
        .0
        .iter()
        .map(|&l| consistency_report(n, l, oracle_budget))
        .collect::<Result<Vec<_>, Error>>()?;
    match format {
        Format::Json => match lengths.single() {
            Some(_) => writeln!(out, "{}", reports[0].to_json())?,
            None => writeln!(
                out,
                "{}",
                Value::Array(reports.iter().map(CountReport::to_json).collect())
            )?,
        },
        Format::Csv => out.write_all(reports_to_csv(&reports).as_bytes())?,
        Format::Plain => {
            for report in &reports {
                write_report_plain(out, report)?;
            }
        }
    }
    let disagree = reports.iter().any(|r| !r.all_agree());
    Ok(if strict && disagree {
        EXIT_DISAGREEMENT
    } else {
        0
    })
}

const WITNESS_HEADER: [&str; 9] = ["p", "q", "case", "x", "alpha", "beta", "s", "root", "k"];

fn witness_row(w: &PairWitness) -> Vec<String> {
    let r = w.to_record();
    let opt = |v: Option<String>| v.unwrap_or_default();
    vec![
        r.p,
        r.q,
        r.case.to_string(),
        opt(r.x),
        opt(r.alpha),
        opt(r.beta),
        r.s.map(|s| s.to_string()).unwrap_or_default(),
        r.root,
        r.k.to_string(),
    ]
}

fn cmd_enumerate(
    out: &mut impl Write,
    format: Format,
    n: u64,
    l: u64,
    set: PairSet,
    budget: u64,
) -> Outcome {
    let l_usize = usize::try_from(l).map_err(|_| usage("l too large"))?;
    let want_e1 = matches!(set, PairSet::E1 | PairSet::Both);
    let want_e2 = matches!(set, PairSet::E2 | PairSet::Both);
    // E1 is empty for odd l
    let e1 = if want_e1 && l.is_multiple_of(2) {
        construct_e1(n, l_usize, budget)?
    } else {
        Vec::new()
    };
    let e2 = if want_e2 {
        construct_e2(n, l_usize, budget)?
    } else {
        Vec::new()
    };
    let set_name = match set {
        PairSet::E1 => "e1",
        PairSet::E2 => "e2",
        PairSet::Both => "both",
    };
    let summary = json!({
        "summary": {
            "n": n,
            "l": l,
            "set": set_name,
            "e1": want_e1.then_some(e1.len()),
            "e2": want_e2.then_some(e2.len()),
            "total": e1.len() + e2.len(),
        }
    });
    let witnesses = e1.iter().chain(&e2);
    match format {
        Format::Json => {
            for w in witnesses {
                let line =
                    serde_json::to_string(&w.to_record()).map_err(|e| usage(e.to_string()))?;
                writeln!(out, "{line}")?;
            }
            writeln!(out, "{summary}")?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = witnesses.map(witness_row).collect();
            write_csv(out, &WITNESS_HEADER, &rows)?;
            writeln!(out, "# summary {summary}")?;
        }
        Format::Plain => {
            for w in witnesses {
                writeln!(out, "{} {} {} k={}", w.p, w.q, w.case, w.exponent)?;
            }
            writeln!(
                out,
                "total {} (e1 {}, e2 {})",
                e1.len() + e2.len(),
                e1.len(),
                e2.len()
            )?;
        }
    }
    Ok(0)
}

fn cmd_classify(out: &mut impl Write, format: Format, n: u64, p: &str, q: &str) -> Outcome {
    let alphabet = u32::try_from(n).map_err(|_| usage("alphabet too large"))?;
    let p = Word::parse(p, alphabet)?;
    let q = Word::parse(q, alphabet)?;
    let witness = match classify_pair(&p, &q) {
        Ok(w) => w,
        Err(Error::PairPrecondition(req)) => {
            return Err(Failure {
                code: EXIT_DOMAIN,
                message: format!("precondition failed: {}", req.reason()),
                payload: Some(json!({"error": "precondition", "reason": req.reason()})),
            })
        }
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::Json => {
            let line =
                serde_json::to_string(&witness.to_record()).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "{line}")?;
        }
        Format::Csv => write_csv(out, &WITNESS_HEADER, &[witness_row(&witness)])?,
        Format::Plain => {
            let r = witness.to_record();
            write!(out, "case {} root {} k {}", r.case, r.root, r.k)?;
            if let Some(x) = r.x {
                write!(out, " x {x}")?;
            }
            if let (Some(a), Some(b), Some(s)) = (r.alpha, r.beta, r.s) {
                write!(out, " alpha {a} beta {b} s {s}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn require<T>(value: Option<T>, flag: &str, regime: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("--regime {regime} requires {flag}")))
}

fn build_table(
    regime: Regime,
    n: Option<u64>,
    l: Option<u64>,
    n_values: &[u64],
    l_values: Option<Vec<u64>>,
    l_max: u64,
    k: &[u64],
) -> Result<RatioTable, Failure> {
    if let Some(&bad) = n_values.iter().find(|&&v| v < 2) {
        return Err(usage(format!(
            "alphabet size must be at least 2, got {bad}"
        )));
    }
    let table = match regime {
        Regime::NToInfEps2 => ratio_eps2_n(require(l, "-l", "n-to-inf-eps2")?, n_values)?,
        Regime::NToInfEps1 => ratio_eps1_n(require(l, "-l", "n-to-inf-eps1")?, n_values)?,
        Regime::LToInfEps1 => {
            let ls = l_values.unwrap_or_else(|| (2..=l_max).step_by(2).collect());
            ratio_eps1_l(require(n, "-n", "l-to-inf-eps1")?, &ls)?
        }
        Regime::LToInfEps2 => {
            // multiples of 4 keep delta(l) = 4 fixed
            let ls = l_values.unwrap_or_else(|| (4..=l_max).step_by(4).collect());
            ratio_eps2_l(require(n, "-n", "l-to-inf-eps2")?, &ls)?
        }
        Regime::Bound => {
            let ls = l_values.unwrap_or_else(|| (1..=l_max).collect());
            check_eps2_bound(require(n, "-n", "bound")?, &ls)?
        }
        Regime::PrimeProduct => prime_product_table(require(n, "-n", "prime-product")?, k)?,
    };
    Ok(table)
}

fn write_table(out: &mut impl Write, format: Format, table: &RatioTable) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", table.to_json()),
        Format::Csv => out.write_all(table.to_csv().as_bytes()),
        Format::Plain => {
            let fixed: Vec<String> = table
                .fixed
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            writeln!(out, "regime {} {}", table.regime, fixed.join(" "))?;
            writeln!(out, "{:>10}  {:<16}  verdict", "parameter", "ratio")?;
            for row in &table.rows {
                let verdict = match row.verdict {
                    Some(true) => "pass",
                    Some(false) => "fail",
                    None => "-",
                };
                writeln!(out, "{:>10}  {:<16}  {verdict}", row.parameter, row.ratio)?;
            }
            writeln!(out, "monotone {} flagged {}", table.monotone, table.flagged)
        }
    }
}

fn cmd_verify(out: &mut impl Write, format: Format, seed: u64) -> Outcome {
    let results = run_all(seed);
    match format {
        Format::Json => writeln!(out, "{}", json!({"seed": seed, "criteria": results}))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.name.to_string(),
                        r.passed.to_string(),
                        r.detail.clone(),
                    ]
                })
                .collect();
            write_csv(out, &["id", "name", "passed", "detail"], &rows)?;
        }
        Format::Plain => {
            for r in &results {
                writeln!(out, "{r}")?;
            }
        }
    }
    Ok(if results.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_DISAGREEMENT
    })
}
