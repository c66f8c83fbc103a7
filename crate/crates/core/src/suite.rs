//! Run configuration, the report document and its deterministic JSON form.

use crate::checks::{self, CheckReport, Ctx, Finding, Tolerances, Verdict};
use crate::error::{Error, Result};
use crate::examples::ExampleConfig;
use crate::sampling::SampleSet;
use crate::structure::WeakFStructure;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_samples() -> usize {
    20
}

fn default_checks() -> Vec<String> {
    vec!["all".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, samples: default_samples(), tolerances: BTreeMap::new(), checks: default_checks() }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.checks.is_empty() {
            return Err(Error::Config("check list is empty".into()));
        }
        Tolerances::merged(&self.tolerances)?;
        Ok(())
    }
}

/// A suite configuration file: one flat JSON object holding the example
/// fields and the run fields side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    #[serde(flatten)]
    pub example: ExampleConfig,
    #[serde(flatten)]
    pub run: RunConfig,
}

const EXAMPLE_KEYS: &[&str] = &["family", "n", "s", "beta", "box"];
const RUN_KEYS: &[&str] = &["seed", "samples", "tolerances", "checks"];

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let obj = v.as_object().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        let mut ex = serde_json::Map::new();
        let mut run = serde_json::Map::new();
        for (k, val) in obj {
            if EXAMPLE_KEYS.contains(&k.as_str()) {
                ex.insert(k.clone(), val.clone());
            } else if RUN_KEYS.contains(&k.as_str()) {
                run.insert(k.clone(), val.clone());
            } else {
                return Err(Error::Config(format!("unknown config key '{k}'")));
            }
        }
        let example: ExampleConfig = serde_json::from_value(ex.into())?;
        let run: RunConfig = serde_json::from_value(run.into())?;
        example.validate()?;
        run.validate()?;
        Ok(SuiteConfig { example, run })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub example: Option<ExampleConfig>,
    pub run: RunConfig,
    /// Tolerances in force, defaults merged with overrides.
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckReport>,
    pub flags: Vec<Finding>,
    /// Fitted quantities that are not pass/fail statements.
    pub diagnostics: Vec<Finding>,
    pub overall: Verdict,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

/// Pass iff every check that was evaluated passed.
pub fn overall(checks: &[CheckReport]) -> Verdict {
    if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    }
}

fn nullity_diagnostic(ctx: &Ctx) -> Finding {
    match ctx.nullity() {
        Ok(fit) => {
            let mut values = BTreeMap::new();
            values.insert("kappa".to_string(), fit.kappa);
            if let Some(mu) = fit.mu {
                values.insert("mu".to_string(), mu);
            }
            values.insert("residual".to_string(), fit.residual);
            for (i, r) in fit.per_reeb.iter().enumerate() {
                values.insert(format!("kappa_{}", i + 1), r.kappa);
                if let Some(mu) = r.mu {
                    values.insert(format!("mu_{}", i + 1), mu);
                }
                values.insert(format!("residual_{}", i + 1), r.residual);
            }
            let detail = if fit.mu_identifiable {
                "least-squares (kappa, mu) for R_{X,Y} xi_i".to_string()
            } else {
                "least-squares kappa for R_{X,Y} xi_i; mu unidentifiable since h = 0 at every sample".to_string()
            };
            Finding { name: "nullity fit".into(), detail, values }
        }
        Err(e) => Finding { name: "nullity fit".into(), detail: format!("not fitted: {e}"), values: BTreeMap::new() },
    }
}

/// Runs the configured checks on an arbitrary structure.
pub fn run_on(st: &WeakFStructure, example: Option<&ExampleConfig>, run: &RunConfig) -> Result<ReportDocument> {
    run.validate()?;
    let tol = Tolerances::merged(&run.tolerances)?;
    let samples = SampleSet::generate(&st.chart, run.samples, run.seed)?;
    let ctx = Ctx::new(st, example, &samples, tol.clone(), run.seed)?;
    let checks = checks::run_groups(&ctx, &run.checks)?;
    let flags = checks::flags(&ctx);
    let diagnostics = vec![nullity_diagnostic(&ctx)];
    Ok(ReportDocument {
        version: VERSION.into(),
        config: ConfigEcho { example: example.cloned(), run: run.clone(), tolerances: tol },
        overall: overall(&checks),
        checks,
        flags,
        diagnostics,
    })
}

pub fn run_suite(example: &ExampleConfig, run: &RunConfig) -> Result<ReportDocument> {
    example.validate()?;
    run.validate()?;
    let st = example.build()?;
    run_on(&st, Some(example), run)
}

/// Writes finite reals with 17 significant digits.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

/// Deterministic JSON: struct fields in declaration order, maps sorted,
/// reals with 17 significant digits, two-space indentation.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Pretty::new());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_json(text: &str) -> Result<ReportDocument> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty printing with [`FixedDigits`] reals.
struct Pretty<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl Pretty<'_> {
    fn new() -> Self {
        Pretty { inner: serde_json::ser::PrettyFormatter::with_indent(b"  ") }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for Pretty<'_> {
    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        FixedDigits.write_f64(w, v)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        FixedDigits.write_f32(w, v)
    }
}
