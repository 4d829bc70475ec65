use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sympq_cli::parser::{parse_form, print_form};
use sympq_cli::suite::{self, Check, Config};
use sympq_core::actions::{builtin, ActionSpec, LinearAction};
use sympq_core::integration::{cone_scaling_experiment, scaling_csv, stokes_check, volume_csv, volume_finiteness, CutoffFamily};
use sympq_core::quotient::{cohomology_with, default_seed, in_ideal, is_phi_basic, SamplingPolicy};
use sympq_core::model::Model;

#[derive(Parser)]
#[command(name = "sympq", version, about = "de Rham complexes of singular symplectic quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Built-in example: cp1, teardrop, cone11, zk-cone (k = 3) or zK-cone
    #[arg(long)]
    example: Option<String>,
    /// JSON config file: example, action, max_degree, samples, cases, seed, kmax
    #[arg(long)]
    config: Option<PathBuf>,
    /// Truncation degree D
    #[arg(long)]
    max_degree: Option<u32>,
    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Randomized cases per batch
    #[arg(long)]
    cases: Option<usize>,
    /// Largest cutoff index k
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the machine-readable report
    #[arg(long)]
    json: bool,
    /// Write the report (CSV for volume and cone-scaling) to a file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a form and print its canonical text and JSON tree
    Parse {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Certify that a form is Φ-basic
    CheckBasic {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Certify that a form lies in the ideal I_Φ
    CheckIdeal {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated cohomology of the quotient complex
    Cohomology(Common),
    /// Poincaré lemma at a level-zero example
    Poincare(Common),
    /// Stokes identity for random (or one given) compactly supported forms
    Stokes {
        /// Basic 1-form β; γ = χ_k β
        expr: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Excluded-neighbourhood volumes
    Volume(Common),
    /// Log-log slope of the cone-neighbourhood volumes
    ConeScaling(Common),
    /// ∫ω against the Duistermaat–Heckman value
    Pairing(Common),
    /// Reduction in stages for an induced space
    Induction(Common),
    /// Extension lemma and functoriality batches
    Appendix(Common),
    /// Run a verification suite: poincare, stokes, restrict, induction, appendix, cohomology, all
    Suite {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Usage or configuration failure (exit 2).
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Resolved {
    config: Config,
    example: Option<LinearAction>,
}

fn resolve(c: &Common) -> Result<Resolved, Usage> {
    let mut config = Config { seed: default_seed(), ..Config::default() };
    let mut example = None;
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)?;
        let obj = v.as_object().ok_or_else(|| Usage("config must be a JSON object".into()))?;
        for (key, val) in obj {
            let as_u64 = || val.as_u64().ok_or_else(|| Usage(format!("config key `{key}` must be a non-negative integer")));
            match key.as_str() {
                "example" => example = Some(builtin(val.as_str().ok_or_else(|| Usage("`example` must be a string".into()))?, 3)?),
                "action" => {
                    let spec: ActionSpec = serde_json::from_value(val.clone())?;
                    example = Some(spec.into_action("custom")?);
                }
                "max_degree" => config.max_degree = as_u64()? as u32,
                "samples" => config.samples = as_u64()? as usize,
                "cases" => config.cases = Some(as_u64()? as usize),
                "seed" => config.seed = as_u64()?,
                "kmax" => config.kmax = as_u64()? as u32,
                other => return Err(Usage(format!("unknown config key `{other}`"))),
            }
        }
    }
    if let Some(name) = &c.example {
        example = Some(builtin(name, 3)?);
    }
    if let Some(d) = c.max_degree {
        config.max_degree = d;
    }
    if let Some(s) = c.samples {
        config.samples = s;
    }
    if c.cases.is_some() {
        config.cases = c.cases;
    }
    if let Some(s) = c.seed {
        config.seed = s;
    }
    if let Some(k) = c.kmax {
        config.kmax = k;
    }
    config.example = example.clone();
    Ok(Resolved { config, example })
}

fn example_or(r: &Resolved, default: &str) -> Result<LinearAction, Usage> {
    match &r.example {
        Some(a) => Ok(a.clone()),
        None => Ok(builtin(default, 3)?),
    }
}

fn require_example(r: &Resolved) -> Result<LinearAction, Usage> {
    r.example.clone().ok_or_else(|| Usage("this command needs --example or a config with `example`/`action`".into()))
}

/// Finished command: pass flag, JSON report, human text, optional file artifact.
struct Outcome {
    passed: bool,
    report: Value,
    text: String,
    artifact: Option<String>,
}

impl Outcome {
    fn from_checks(checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        let text = checks.iter().map(|c| format!("{c}\n  {}", c.detail)).collect::<Vec<_>>().join("\n");
        Outcome { passed, report: json!({"passed": passed, "checks": checks}), text, artifact: None }
    }
}

fn run(cmd: &Command) -> Result<Outcome, Usage> {
    match cmd {
        Command::Parse { expr, common } => {
            let r = resolve(common)?;
            let f = parse_form(expr, r.example.as_ref().map(|a| a.layout()), r.example.as_ref())?;
            let text = print_form(&f);
            Ok(Outcome {
                passed: true,
                report: json!({"text": text, "degree": f.degree(), "form": f.to_json()}),
                text,
                artifact: None,
            })
        }
        Command::CheckBasic { expr, common } | Command::CheckIdeal { expr, common } => {
            let r = resolve(common)?;
            let a = require_example(&r)?;
            let f = parse_form(expr, Some(a.layout()), Some(&a))?;
            let policy = SamplingPolicy::with_seed(r.config.seed);
            let (what, cert) = match cmd {
                Command::CheckBasic { .. } => ("Φ-basic", is_phi_basic(&a, &f, &policy)?),
                _ => ("in the ideal", in_ideal(&a, &f, &policy)?),
            };
            let text = format!(
                "{} {what} on {}: {} ({} samples{})",
                print_form(&f),
                a.name,
                if cert.member { "yes" } else { "no" },
                cert.samples,
                if cert.randomized { ", randomized" } else { "" }
            );
            Ok(Outcome { passed: cert.member, report: cert.to_json(), text, artifact: None })
        }
        Command::Cohomology(common) => {
            let r = resolve(common)?;
            let a = require_example(&r)?;
            let rep = cohomology_with(&a, a.default_filtration(), r.config.max_degree, &SamplingPolicy::with_seed(r.config.seed), false)?;
            let text = format!("{} at D = {}: dims {:?}, betti {:?}", rep.label, rep.truncation, rep.dims, rep.betti);
            Ok(Outcome { passed: rep.d_squared_zero, report: serde_json::to_value(&rep)?, text, artifact: None })
        }
        Command::Poincare(common) => {
            let r = resolve(common)?;
            let a = example_or(&r, "cone11")?;
            Ok(Outcome::from_checks(vec![suite::check_poincare(&a, r.config.max_degree, r.config.seed)?]))
        }
        Command::Stokes { expr, common } => {
            let r = resolve(common)?;
            let a = example_or(&r, "teardrop")?;
            match expr {
                Some(e) => {
                    let beta = parse_form(e, Some(a.layout()), Some(&a))?;
                    let rep = stokes_check(&a, &beta, &CutoffFamily::default(), 1, r.config.mc_grid(), r.config.seed)?;
                    let passed = rep.passes(1e-3, 1e-6);
                    let text = format!(
                        "Stokes on {}: quadrature ratio {:.3e}, Monte Carlo ratio {:.3e}",
                        a.name, rep.quadrature_ratio, rep.monte_carlo_ratio
                    );
                    Ok(Outcome { passed, report: serde_json::to_value(&rep)?, text, artifact: None })
                }
                None => Ok(Outcome::from_checks(vec![suite::check_stokes(&a, r.config.cases.unwrap_or(20), r.config.samples, r.config.seed)?])),
            }
        }
        Command::Volume(common) => {
            let r = resolve(common)?;
            let a = example_or(&r, "teardrop")?;
            let rep = volume_finiteness(&a, &CutoffFamily::default(), r.config.kmax)?;
            let passed = rep.monotone && rep.last_relative_increment < 1e-3;
            let text = format!(
                "{}: monotone {}, relative increment at k = {} is {:.3e}, extrapolated volume {:.9}",
                a.name, rep.monotone, r.config.kmax, rep.last_relative_increment, rep.extrapolated
            );
            Ok(Outcome { passed, report: serde_json::to_value(&rep)?, text, artifact: Some(volume_csv(&rep)) })
        }
        Command::ConeScaling(common) => {
            let r = resolve(common)?;
            let a = example_or(&r, "teardrop")?;
            let rep = cone_scaling_experiment(&a, &CutoffFamily::default(), common.kmax.unwrap_or(64))?;
            let passed = (rep.slope - rep.expected).abs() < 0.05;
            let text = format!("{}: slope {:.4} (expected {})", a.name, rep.slope, rep.expected);
            Ok(Outcome { passed, report: serde_json::to_value(&rep)?, text, artifact: Some(scaling_csv(&rep)) })
        }
        Command::Pairing(common) => {
            let r = resolve(common)?;
            let a = example_or(&r, "cp1")?;
            Ok(Outcome::from_checks(vec![suite::check_pairing(&a, r.config.samples, r.config.seed)?]))
        }
        Command::Induction(common) => {
            let r = resolve(common)?;
            let a = example_or(&r, "z3-cone")?;
            let k = a
                .name
                .strip_prefix('z')
                .and_then(|s| s.strip_suffix("-cone"))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Usage(format!("induction takes a cyclic cone example (zK-cone), not `{}`", a.name)))?;
            Ok(Outcome::from_checks(vec![suite::check_induction(k, common.max_degree.unwrap_or(6), r.config.seed)?]))
        }
        Command::Appendix(common) => {
            let r = resolve(common)?;
            Ok(Outcome::from_checks(suite::check_appendix(r.config.cases.unwrap_or(200), r.config.seed)?))
        }
        Command::Suite { name, common } => {
            let r = resolve(common)?;
            if !suite::SUITES.contains(&name.as_str()) {
                return Err(Usage(format!("unknown suite `{name}` (expected one of {})", suite::SUITES.join(", "))));
            }
            let rep = suite::run_suite(name, &r.config)?;
            let mut out = Outcome::from_checks(rep.checks.clone());
            out.report = serde_json::to_value(&rep)?;
            Ok(out)
        }
    }
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Parse { common, .. }
        | Command::CheckBasic { common, .. }
        | Command::CheckIdeal { common, .. }
        | Command::Stokes { common, .. }
        | Command::Suite { common, .. } => common,
        Command::Cohomology(c)
        | Command::Poincare(c)
        | Command::Volume(c)
        | Command::ConeScaling(c)
        | Command::Pairing(c)
        | Command::Induction(c)
        | Command::Appendix(c) => c,
    }
}

fn setup_threads() -> Result<(), Usage> {
    if let Ok(v) = std::env::var("SYMPQ_THREADS") {
        let n: usize = v.parse().map_err(|_| Usage(format!("SYMPQ_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = setup_threads().and_then(|_| run(&cli.command));
    let common = common_of(&cli.command);
    match outcome {
        Ok(o) => {
            let report = serde_json::to_string_pretty(&o.report).expect("json");
            if common.json {
                println!("{report}");
            } else {
                println!("{}", o.text);
                println!("{}", if o.passed { "PASS" } else { "FAIL" });
            }
            if let Some(path) = &common.out {
                let body = o.artifact.unwrap_or(report + "\n");
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
