use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use weakfs::checks::{self, Tolerances, Verdict};
use weakfs::examples::{ExampleConfig, Family};
use weakfs::sampling::SampleSet;
use weakfs::structure::{self, LocalSamples};
use weakfs::suite::{self, RunConfig, SuiteConfig};
use weakfs::{Error, Result};

#[derive(Parser)]
#[command(name = "weakfs", version, about = "Residual checks for weak metric f-structures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ExampleArgs {
    /// paper_R2ns or unit_tangent_flat
    #[arg(long, default_value = "paper_R2ns")]
    example: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl ExampleArgs {
    fn config(&self) -> Result<ExampleConfig> {
        let cfg = ExampleConfig { family: Family::parse(&self.example)?, n: self.n, s: self.s, beta: self.beta, bounds: None };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the structure axioms.
    Validate {
        #[command(flatten)]
        ex: ExampleArgs,
        #[command(flatten)]
        smp: SampleArgs,
    },
    /// Weak almost K/C/S, Killing Reeb fields, normality.
    Classify {
        #[command(flatten)]
        ex: ExampleArgs,
        #[command(flatten)]
        smp: SampleArgs,
    },
    /// Run one check group, or `all`.
    Check {
        name: String,
        #[command(flatten)]
        ex: ExampleArgs,
        #[command(flatten)]
        smp: SampleArgs,
        /// Tolerance override, NAME=VALUE; repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Print the full report document instead of one line per check.
        #[arg(long)]
        json: bool,
    },
    /// Least-squares (kappa, mu) nullity fit.
    NullityFit {
        #[command(flatten)]
        ex: ExampleArgs,
        #[command(flatten)]
        smp: SampleArgs,
    },
    /// Run a suite from a flat JSON config file.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List check group names.
    List,
}

fn locals(ex: &ExampleArgs, smp: &SampleArgs) -> Result<LocalSamples> {
    let st = ex.config()?.build()?;
    let samples = SampleSet::generate(&st.chart, smp.samples, smp.seed)?;
    LocalSamples::new(&st, &samples)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    print!("{}", suite::to_json(v)?);
    Ok(())
}

fn code(pass: bool) -> ExitCode {
    ExitCode::from(if pass { 0 } else { 1 })
}

fn parse_tol(items: &[String]) -> Result<std::collections::BTreeMap<String, f64>> {
    let mut m = std::collections::BTreeMap::new();
    for it in items {
        let (k, v) = it.split_once('=').ok_or_else(|| Error::Config(format!("--tol expects NAME=VALUE, got '{it}'")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("tolerance '{k}' is not a number")))?;
        m.insert(k.trim().to_string(), v);
    }
    Tolerances::merged(&m)?;
    Ok(m)
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Skipped => "SKIP",
        Verdict::Vacuous => "VACUOUS",
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Validate { ex, smp } => {
            let rep = structure::validate_local(&locals(&ex, &smp)?)?;
            print_json(&rep)?;
            Ok(code(rep.passed()))
        }
        Cmd::Classify { ex, smp } => {
            print_json(&structure::classify(&locals(&ex, &smp)?))?;
            Ok(code(true))
        }
        Cmd::NullityFit { ex, smp } => {
            let fit = checks::nullity_fit(&locals(&ex, &smp)?)?;
            print_json(&fit)?;
            Ok(code(true))
        }
        Cmd::Check { name, ex, smp, tol, json } => {
            let run = RunConfig { seed: smp.seed, samples: smp.samples, tolerances: parse_tol(&tol)?, checks: vec![name] };
            let doc = suite::run_suite(&ex.config()?, &run)?;
            if json {
                print_json(&doc)?;
            } else {
                for c in &doc.checks {
                    let r = c.max_residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
                    println!("{:<8} {:<62} max {:>10}  tol {:.0e}", verdict_word(c.verdict), c.name, r, c.tolerance);
                    if c.verdict == Verdict::Fail {
                        if let Some(n) = &c.note {
                            println!("         note: {n}");
                        }
                    }
                }
                for f in &doc.flags {
                    let vals: Vec<String> = f.values.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
                    println!("FLAG     {}: {}", f.name, vals.join(" "));
                }
                println!("overall: {}", verdict_word(doc.overall));
            }
            Ok(code(doc.passed()))
        }
        Cmd::Suite { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let cfg = SuiteConfig::from_json(&text)?;
            let doc = suite::run_suite(&cfg.example, &cfg.run)?;
            let json = suite::to_json(&doc)?;
            match out {
                Some(p) => std::fs::write(&p, json)?,
                None => print!("{json}"),
            }
            eprintln!("overall: {}", verdict_word(doc.overall));
            Ok(code(doc.passed()))
        }
        Cmd::List => {
            for g in checks::group_names() {
                println!("{g}");
            }
            Ok(code(true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(c) => c,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
