//! `freeprod`: command-line front end for the free product library.
//!
//! Exit codes: 0 success, 1 verification or property failure, 2 input,
//! configuration or format error, 3 word-length cap exceeded.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use freeprod_core::format::{certificate_from_json, certificate_to_json};
use freeprod_core::freeprod::DEFAULT_CAP;
use freeprod_core::rational::parse_rational;
use freeprod_core::suites::{parse_targets, run_suite, Suite, SuiteOptions};
use freeprod_core::{
    CheckMode, Error, FreeProduct, Groups, IdentityScales, ReducedWord, Separator,
};

use render::REPORT_VERSION;

#[derive(Parser, Debug)]
#[command(name = "freeprod", version, about = "Words, normal forms and separation certificates in free products of topological groups")]
struct Cli {
    /// Group configuration (TOML); the built-in standard configuration when absent.
    #[arg(long, global = true)]
    groups: Option<PathBuf>,
    /// Longest word accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of samples (check) or cases (proptest).
    #[arg(short = 'k', global = true, default_value_t = 1000)]
    k: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Radius of default Euclidean identity neighborhoods.
    #[arg(long, global = true, default_value = "1")]
    euclidean_radius: String,
    /// Level of default p-adic identity neighborhoods.
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    padic_level: i64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the normal form of a word and its length.
    Reduce { word: String },
    /// List the uniform subterms of a word.
    Subterms {
        word: String,
        /// Only subterms whose value is not 1.
        #[arg(long)]
        nonidentity: bool,
    },
    /// Check that a word equal to 1 has trivial per-group products.
    Lemma31 { word: String },
    /// Evaluate the two cancellation hypotheses for a pair of words.
    Lemma32 { t: String, t2: String },
    /// Build a separation certificate for a word.
    Separate {
        word: String,
        /// Separate from this value instead of the identity.
        #[arg(long)]
        target: Option<String>,
        /// Write the certificate here; otherwise it goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a certificate file.
    Check {
        certificate: PathBuf,
        /// Enumerate every selection (finite sets only).
        #[arg(long, conflicts_with = "symbolic")]
        exhaustive: bool,
        /// Decide exactly from the set descriptors.
        #[arg(long)]
        symbolic: bool,
        /// Values to avoid instead of the certificate's own list.
        #[arg(long)]
        forbidden: Vec<String>,
    },
    /// Run property suites.
    Proptest {
        /// A suite name or `all`.
        #[arg(default_value = "all")]
        suite: String,
        /// Enumerate all words up to this length (lemma31).
        #[arg(long)]
        exhaustive_len: Option<usize>,
        /// Groups forming the exhaustive lemma31 alphabet.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
        /// Selections sampled per certificate.
        #[arg(long, default_value_t = 200)]
        per_certificate: usize,
        /// Rewrite orders per word (confluence).
        #[arg(long, default_value_t = 20)]
        orders: usize,
    },
    /// Certify that the complement of finitely many values is open at the given witnesses.
    X0check {
        /// One word per line.
        witnesses: PathBuf,
        /// One word per line; reduced before use.
        excluded: PathBuf,
        /// Directory receiving one certificate per witness.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status of a command that ran to completion.
struct Done {
    code: u8,
}

impl Done {
    fn ok() -> Done {
        Done { code: 0 }
    }

    fn failed() -> Done {
        Done { code: 1 }
    }

    fn passed(ok: bool) -> Done {
        if ok {
            Done::ok()
        } else {
            Done::failed()
        }
    }
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::CapExceeded { .. } => 3,
                Error::Parse { .. }
                | Error::Config(_)
                | Error::Format(_)
                | Error::ConfigMismatch { .. }
                | Error::ExhaustiveNotFinite
                | Error::UnknownGroup(_)
                | Error::Invalid(_)
                | Error::LengthMismatch { .. } => 2,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

type CliResult = Result<Done, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn separator(cli: &Cli) -> Result<Separator, CliError> {
    let groups = match &cli.groups {
        Some(path) => Groups::from_toml_str(&read(path)?)?,
        None => Groups::standard(),
    };
    let radius = parse_rational(&cli.euclidean_radius)
        .ok_or_else(|| Error::Invalid(format!("`{}` is not a rational", cli.euclidean_radius)))?;
    let scales = IdentityScales {
        euclidean_radius: radius,
        padic_level: cli.padic_level,
    };
    Ok(Separator::new(FreeProduct::new(groups, cli.cap)?, scales)?)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string(value).expect("JSON values serialize"));
}

fn run(cli: &Cli) -> CliResult {
    let sep = separator(cli)?;
    let fp = sep.free_product();
    let machine = cli.format == OutputFormat::Machine;
    match &cli.command {
        Command::Reduce { word } => {
            let r = fp.reduce(&fp.parse_word(word)?)?;
            if machine {
                print_json(&json!({
                    "version": REPORT_VERSION,
                    "reduced": render::reduced_tokens(fp, &r),
                    "length": r.len(),
                }));
            } else {
                println!("{}", fp.format_reduced(&r));
                println!("length {}", r.len());
            }
            Ok(Done::ok())
        }
        Command::Subterms { word, nonidentity } => {
            let w = fp.parse_word(word)?;
            let subterms = fp.uniform_subterms(&w, *nonidentity)?;
            let groups = fp.groups();
            let rows = subterms
                .iter()
                .map(|s| Ok((s, groups.format_value(&fp.subterm_value(&w, s)?))))
                .collect::<Result<Vec<_>, Error>>()?;
            if machine {
                print_json(&json!({
                    "version": REPORT_VERSION,
                    "subterms": rows.iter().map(|(s, v)| json!({
                        "group": groups.name(s.group),
                        "positions": s.positions,
                        "value": v,
                    })).collect::<Vec<_>>(),
                }));
            } else {
                for (s, v) in &rows {
                    println!("{} {:?} {v}", groups.name(s.group), s.positions);
                }
                println!("{} subterms", rows.len());
            }
            Ok(Done::ok())
        }
        Command::Lemma31 { word } => {
            let r = fp.lemma31_check(&fp.parse_word(word)?)?;
            let violating = r.violating_group.map(|g| fp.groups().name(g).to_string());
            if machine {
                print_json(&json!({
                    "version": REPORT_VERSION,
                    "reduces_to_identity": r.premise_met,
                    "holds": r.holds,
                    "violating_group": violating,
                }));
            } else {
                println!("reduces to 1: {}", r.premise_met);
                println!("per-group products trivial: {}", if r.premise_met { r.holds.to_string() } else { "not applicable".into() });
                if let Some(g) = violating {
                    println!("violating group: {g}");
                }
            }
            Ok(Done::passed(r.holds))
        }
        Command::Lemma32 { t, t2 } => {
            let (t, t2) = (fp.parse_word(t)?, fp.parse_word(t2)?);
            let r = fp.lemma32_conditions(&t, &t2)?;
            let t_one = fp.reduce(&t)?.is_empty();
            let t2_one = fp.reduce(&t2)?.is_empty();
            // With both hypotheses, a nontrivial t forces a nontrivial t2.
            let conclusion = !(r.cond_i && r.cond_ii) || t_one || !t2_one;
            if machine {
                print_json(&json!({
                    "version": REPORT_VERSION,
                    "cond_i": r.cond_i,
                    "cond_ii": r.cond_ii,
                    "witness_i": r.witness_i,
                    "witness_ii": r.witness_ii,
                    "t_is_identity": t_one,
                    "t2_is_identity": t2_one,
                    "conclusion_holds": conclusion,
                }));
            } else {
                println!("condition (i): {}", r.cond_i);
                if let Some(w) = &r.witness_i {
                    println!("  uniform in t' but not in t: {w:?}");
                }
                println!("condition (ii): {}", r.cond_ii);
                if let Some(w) = &r.witness_ii {
                    println!("  value not 1 in t but 1 in t': {w:?}");
                }
                println!("t reduces to 1: {t_one}");
                println!("t' reduces to 1: {t2_one}");
            }
            Ok(Done::passed(conclusion))
        }
        Command::Separate { word, target, out } => {
            let w = fp.parse_word(word)?;
            let c = match target {
                Some(t) => sep.separate_from_point(&w, &fp.parse_reduced(t)?)?,
                None => sep.separate_word_from_identity(&w)?,
            };
            let text = certificate_to_json(fp, &c);
            let summary = if machine {
                serde_json::to_string(&render::certificate_summary_json(fp, &c)).expect("JSON values serialize") + "\n"
            } else {
                render::certificate_summary(fp, &c)
            };
            match out {
                Some(path) => {
                    write(path, &text)?;
                    print!("{summary}");
                }
                None => {
                    eprint!("{summary}");
                    print!("{text}");
                }
            }
            Ok(Done::ok())
        }
        Command::Check {
            certificate,
            exhaustive,
            symbolic,
            forbidden,
        } => {
            let c = certificate_from_json(fp, &read(certificate)?)?;
            let mode = if *exhaustive {
                CheckMode::Exhaustive
            } else if *symbolic {
                CheckMode::Symbolic
            } else {
                CheckMode::Sampled { k: cli.k, seed: cli.seed }
            };
            let forbidden: Vec<ReducedWord> = forbidden
                .iter()
                .map(|f| fp.parse_reduced(f))
                .collect::<Result<_, _>>()?;
            let targets = if forbidden.is_empty() { c.forbidden.clone() } else { forbidden };
            let report = sep.check_certificate(&c, mode, Some(&targets))?;
            if machine {
                print_json(&render::report_json(fp, &targets, &report));
            } else {
                print!("{}", render::report_text(fp, &targets, &report));
                eprintln!("elapsed: {:.1?}", report.elapsed);
            }
            Ok(Done::passed(report.passed()))
        }
        Command::Proptest {
            suite,
            exhaustive_len,
            alphabet,
            per_certificate,
            orders,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let opts = SuiteOptions {
                k: cli.k,
                seed: cli.seed,
                samples: *per_certificate,
                orders: *orders,
                exhaustive_len: *exhaustive_len,
                alphabet: alphabet.clone(),
            };
            if opts.k == 0 {
                return Err(Error::Invalid("k must be at least 1".into()).into());
            }
            let mut all = true;
            let mut reports = Vec::new();
            for s in suites {
                let r = run_suite(&sep, s, &opts)?;
                all &= r.passed();
                if machine {
                    reports.push(render::suite_json(&r));
                } else {
                    println!("{}", render::suite_text(&r));
                    eprintln!("  elapsed: {:.1?}", r.elapsed);
                }
            }
            if machine {
                print_json(&json!({"version": REPORT_VERSION, "suites": reports, "passed": all}));
            }
            Ok(Done::passed(all))
        }
        Command::X0check { witnesses, excluded, out } => x0check(cli, &sep, witnesses, excluded, out.as_deref()),
    }
}

fn x0check(cli: &Cli, sep: &Separator, witnesses: &Path, excluded: &Path, out: Option<&Path>) -> CliResult {
    let fp = sep.free_product();
    let groups = fp.groups();
    let words = read(witnesses)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| fp.parse_word(l))
        .collect::<Result<Vec<_>, _>>()?;
    let excluded = parse_targets(fp, &read(excluded)?)?;
    let certificates = sep.certify_open_complement(&words, &excluded)?;
    // Condition (i): the traces of every set on every group are open descriptors.
    let mut per_group = std::collections::BTreeMap::new();
    for c in &certificates {
        for w in &c.neighborhoods {
            for id in groups.ids() {
                if let Some(n) = groups.trace(w, id) {
                    per_group.entry(groups.name(id).to_string()).or_insert_with(Vec::new).push(n.clone());
                }
            }
        }
    }
    let condition_i = groups.check_condition_i(&per_group)?;
    let mut results = Vec::new();
    let mut all = condition_i;
    for (i, c) in certificates.iter().enumerate() {
        let sampled = sep.check_certificate(c, CheckMode::Sampled { k: cli.k, seed: cli.seed }, None)?;
        let exact = sep.check_certificate(c, CheckMode::Symbolic, None)?;
        let ok = sampled.passed() && exact.passed();
        all &= ok;
        if let Some(dir) = out {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            write(&dir.join(format!("certificate-{i}.json")), &certificate_to_json(fp, c))?;
        }
        results.push((c, ok));
    }
    if cli.format == OutputFormat::Machine {
        print_json(&json!({
            "version": REPORT_VERSION,
            "condition_i": condition_i,
            "witnesses": results.iter().map(|(c, ok)| json!({
                "word": render::tokens(fp, &c.word),
                "passed": ok,
            })).collect::<Vec<_>>(),
            "passed": all,
        }));
    } else {
        println!("condition (i): {condition_i}");
        for (c, ok) in &results {
            println!("{}: {}", fp.format_word(&c.word), if *ok { "ok" } else { "FAILED" });
        }
        println!("{} witnesses, {} excluded values", results.len(), excluded.len());
    }
    Ok(Done::passed(all))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(done) => ExitCode::from(done.code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

