use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use treeaxes::folds::{bbt_report, decomposition_report, fold_decompose, format_fold_sequence, parse_morphism};
use treeaxes::free_group::{parse_automorphism_list, parse_word, parse_words, GroupPresentation, ReducedWord};
use treeaxes::report::Verdict;
use treeaxes::suite::{self, Budgets, CheckEntry, SuiteResult};

#[derive(Parser)]
#[command(name = "treeaxes", version, about = "Axes, projections and folds for groups acting on trees")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Group: `F2`, `Z2*Z3`, or TOML such as `free_rank = 2`.
    #[arg(long, global = true, default_value = "F2")]
    presentation: String,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML file of budgets; unspecified keys keep their defaults.
    #[arg(long = "budget-file", global = true)]
    budget_file: Option<PathBuf>,
    /// Small smoke-test budgets.
    #[arg(long = "budget-quick", global = true)]
    budget_quick: bool,
    /// Instances per randomized sweep.
    #[arg(long = "budget-samples", global = true)]
    budget_samples: Option<usize>,
    /// Word length of the exhaustive sweeps.
    #[arg(long = "budget-length", global = true)]
    budget_length: Option<usize>,
    /// Nielsen pool length.
    #[arg(long = "budget-pool", global = true)]
    budget_pool: Option<usize>,
    /// C_K window radius.
    #[arg(long = "budget-radius", global = true)]
    budget_radius: Option<i64>,
    /// Any budget as key=value, e.g. `--budget-set twist_max=20`.
    #[arg(long = "budget-set", global = true, value_name = "KEY=VALUE")]
    budget_set: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Reduction, cyclic core, root, translation length, primitivity and axis.
    Analyze {
        words: Vec<String>,
        /// File with one word per line.
        #[arg(long)]
        words_file: Option<PathBuf>,
    },
    /// Tree-lemma, fold and BBT suites.
    Lemmas,
    /// Projection family, axioms, C_K sandwich and hyperbolicity.
    Complex {
        /// Base element; a generic word is drawn from the seed when absent.
        #[arg(long)]
        g: Option<String>,
        /// Automorphisms separated by `---` lines; the Nielsen pool when absent.
        #[arg(long)]
        pool_file: Option<PathBuf>,
    },
    /// Persistence estimate, or the Dehn-twist counterexample for primitive g.
    Persistence {
        #[arg(long)]
        g: Option<String>,
    },
    /// Fold decomposition of a morphism file, or the random fold suites.
    Folds {
        #[arg(long)]
        morphism: Option<PathBuf>,
    },
    /// The full acceptance pipeline.
    Acceptance,
}

fn budgets(c: &Common) -> anyhow::Result<Budgets> {
    let mut b = match &c.budget_file {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("bad budget file {}", p.display()))?,
        None if c.budget_quick => Budgets::quick(),
        None => Budgets::default(),
    };
    if let Some(n) = c.budget_samples {
        b.random_instances = n;
        b.sandwich_samples = n;
        b.collapse_pairs = n;
        b.bbt_triples = n;
    }
    if let Some(n) = c.budget_length {
        b.paulin_length = n;
        b.overlap_length = n;
    }
    if let Some(n) = c.budget_pool {
        b.nielsen_length = n;
    }
    if c.budget_radius.is_some() {
        b.window_radius = c.budget_radius;
    }
    if !c.budget_set.is_empty() {
        let mut table = toml::Value::try_from(&b)?;
        for kv in &c.budget_set {
            let Some((k, v)) = kv.split_once('=') else { bail!("--budget-set expects KEY=VALUE, got `{kv}`") };
            let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {v}"))
                .with_context(|| format!("bad value in `{kv}`"))?
                .remove("v")
                .expect("present");
            match table.as_table_mut().expect("table").get_mut(k.trim()) {
                Some(slot) => *slot = value,
                None => bail!("unknown budget `{k}`"),
            }
        }
        b = table.try_into().context("budget values have the wrong type")?;
    }
    if let Some(r) = b.window_radius {
        if r < 1 {
            bail!("the window radius must be positive");
        }
    }
    Ok(b)
}

fn read(p: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn word(p: &GroupPresentation, s: &str) -> anyhow::Result<ReducedWord> {
    parse_word(p, s).with_context(|| format!("bad word `{s}`"))
}

/// Output text and overall verdict.
fn run(cli: &Cli) -> anyhow::Result<(String, Verdict)> {
    let c = &cli.common;
    let b = budgets(c)?;
    let p = GroupPresentation::from_spec(&c.presentation).context("bad presentation")?;
    let mut extra: Option<String> = None;
    let result: SuiteResult = match &cli.command {
        Command::Analyze { words, words_file } => {
            let mut ws: Vec<ReducedWord> = words.iter().map(|w| word(&p, w)).collect::<anyhow::Result<_>>()?;
            if let Some(f) = words_file {
                ws.extend(parse_words(&p, &read(f)?)?);
            }
            if ws.is_empty() {
                bail!("no words given");
            }
            suite::analyze(&c.presentation, &ws, c.seed, &b)?
        }
        Command::Lemmas => suite::lemma_suite(&b, c.seed),
        Command::Complex { g, pool_file } => {
            let g = g.as_deref().map(|s| word(&p, s)).transpose()?;
            let pool = match pool_file {
                Some(f) => Some(parse_automorphism_list(&p, &read(f)?)?),
                None => None,
            };
            let (r, dot) = suite::complex_suite(&c.presentation, g, pool, &b, c.seed, c.format == Format::Dot)?;
            extra = dot;
            r
        }
        Command::Persistence { g } => {
            let g = g.as_deref().map(|s| word(&p, s)).transpose()?;
            let (r, csv) = suite::persistence_suite(&c.presentation, g, &b, c.seed)?;
            if c.format == Format::Csv && !csv.is_empty() {
                extra = Some(csv);
            }
            r
        }
        Command::Folds { morphism: Some(path) } => {
            let f = parse_morphism(&read(path)?)?;
            let seq = fold_decompose(&f)?;
            if c.format == Format::Text {
                extra = Some(format_fold_sequence(&seq));
            }
            let mut rec = suite::Recorder::new("folds", &c.presentation, c.seed, &b);
            let d = decomposition_report(&f)?;
            rec.push(CheckEntry::from_report(&d.lemma_id, &d));
            let r = bbt_report(&f, b.bbt_triples, b.path_length, c.seed);
            rec.push(CheckEntry::from_report(&r.lemma_id, &r));
            rec.finish()
        }
        Command::Folds { morphism: None } => suite::folds_suite(&b, c.seed),
        Command::Acceptance => suite::acceptance_pipeline(&b, c.seed),
    };
    let text = match (c.format, extra) {
        (Format::Dot | Format::Csv | Format::Text, Some(x)) => x,
        (Format::Dot, None) => bail!("dot output is available for `complex` only"),
        (Format::Csv, None) => result.to_csv(),
        (Format::Text, None) => result.to_text(),
        (Format::Json, _) => result.to_json(),
    };
    Ok((text, result.verdict))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.common.workers {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} worker(s)");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((text, verdict)) => {
            let written = match &cli.common.out {
                Some(p) => std::fs::write(p, &text).with_context(|| format!("cannot write {}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(if verdict == Verdict::Fail { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
