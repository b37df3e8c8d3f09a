use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use linex_core::campaign::run_campaign;
use linex_core::economy::{
    document_violations, parse_allocation_json, Allocation, EconomyDocument,
};
use linex_core::equilibrium::{
    certify_noncompetitive_core, check_competitive, core_max_allocation, find_blocking_coalition,
    find_equilibrium, rescale, verify_certificate, AnalysisError, Lambda,
    NoncompetitivenessCertificate,
};
use linex_core::rational::parse_rational;
use linex_core::{summary, Economy, ModelError, PriceSystem};

#[derive(Parser)]
#[command(
    name = "linex",
    version,
    about = "Exact analysis of linear exchange economies with atoms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the outcome payload to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check an economy document against the model invariants.
    Validate { economy: PathBuf },
    /// Build and self-check a certificate that the core holds a non-competitive allocation.
    Certify { economy: PathBuf },
    /// Re-check a certificate against its economy without re-solving.
    Verify {
        economy: PathBuf,
        certificate: PathBuf,
    },
    /// Run the seeded randomized property campaign.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
    /// Pareto status, equilibria and core-max allocation in one payload.
    Report { economy: PathBuf },
    /// The core allocation most favourable to the atom.
    CoreMax { economy: PathBuf },
    /// All competitive equilibria of a two-cohort economy.
    FindEq { economy: PathBuf },
    /// Check whether a price and allocation form a competitive equilibrium.
    CheckEq {
        economy: PathBuf,
        /// Price file (JSON array of fractions) or inline list such as `1/2,1/2`.
        #[arg(long)]
        price: String,
        /// Allocation document.
        #[arg(long)]
        alloc: PathBuf,
    },
    /// Search for a coalition blocking an allocation.
    Block {
        economy: PathBuf,
        #[arg(long)]
        alloc: PathBuf,
    },
    /// Rescale cohorts: endowments times λ, masses divided by λ.
    Rescale {
        economy: PathBuf,
        /// JSON object file or inline list such as `A1=2,C2=1/3`.
        #[arg(long)]
        lambda: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Certify { .. } => "certify",
            Command::Verify { .. } => "verify",
            Command::Suite { .. } => "suite",
            Command::Report { .. } => "report",
            Command::CoreMax { .. } => "core-max",
            Command::FindEq { .. } => "find-eq",
            Command::CheckEq { .. } => "check-eq",
            Command::Block { .. } => "block",
            Command::Rescale { .. } => "rescale",
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    input_digest: String,
    outcome: Value,
    /// Wall-clock seconds.
    elapsed: f64,
}

enum Failure {
    Validation(Value),
    Hypothesis(Value),
    Usage(String),
    Certification(Value),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Hypothesis(_) => 2,
            Failure::Usage(_) => 3,
            Failure::Certification(_) => 4,
        }
    }

    fn payload(&self) -> Value {
        match self {
            Failure::Usage(why) => json!({"status": "usage_error", "detail": why}),
            Failure::Validation(v) | Failure::Hypothesis(v) | Failure::Certification(v) => {
                v.clone()
            }
        }
    }
}

fn error_payload(kind: &str, detail: impl ToString) -> Value {
    json!({"status": "error", "kind": kind, "detail": detail.to_string()})
}

fn model_failure(e: &ModelError) -> Failure {
    Failure::Validation(json!({
        "status": "invalid",
        "violations": [{"kind": e.kind(), "detail": e.to_string()}],
    }))
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match &e {
            AnalysisError::Model(m) => model_failure(m),
            AnalysisError::Preference(_)
            | AnalysisError::NotFeasible
            | AnalysisError::MissingLambda(_)
            | AnalysisError::NonPositiveLambda(_) => {
                Failure::Validation(error_payload(variant(&e), &e))
            }
            AnalysisError::HypothesisViolation(h) => Failure::Hypothesis(json!({
                "status": "hypothesis_violation",
                "hypothesis": h,
                "detail": e.to_string(),
            })),
            AnalysisError::UnsupportedShape(_) | AnalysisError::NotParetoOptimal => {
                Failure::Hypothesis(error_payload(variant(&e), &e))
            }
            AnalysisError::CertificationFailure(evidence) => Failure::Certification(json!({
                "status": "certification_failure",
                "detail": e.to_string(),
                "counterevidence": summary::counterevidence(evidence),
            })),
            AnalysisError::Lp(_) | AnalysisError::Internal(_) => {
                Failure::Certification(error_payload(variant(&e), &e))
            }
        }
    }
}

fn variant(e: &AnalysisError) -> &'static str {
    match e {
        AnalysisError::Model(m) => m.kind(),
        AnalysisError::Preference(_) => "InvalidPrice",
        AnalysisError::Lp(_) => "SolverError",
        AnalysisError::NotParetoOptimal => "NotParetoOptimal",
        AnalysisError::UnsupportedShape(_) => "UnsupportedShape",
        AnalysisError::NotFeasible => "NotFeasible",
        AnalysisError::NonPositiveLambda(_) => "NonPositiveLambda",
        AnalysisError::MissingLambda(_) => "MissingLambda",
        AnalysisError::HypothesisViolation(_) => "HypothesisViolation",
        AnalysisError::CertificationFailure(_) => "CertificationFailure",
        AnalysisError::Internal(_) => "Internal",
    }
}

/// Reads command inputs and hashes them in the order they were read.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        Inputs {
            hasher: Sha256::new(),
        }
    }

    fn record(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.record("file", text.as_bytes());
        Ok(text)
    }

    /// A file's contents if `arg` names an existing file, else `arg` itself.
    fn file_or_inline(&mut self, arg: &str) -> Result<(String, bool), Failure> {
        if Path::new(arg).is_file() {
            Ok((self.read(Path::new(arg))?, true))
        } else {
            self.record("inline", arg.as_bytes());
            Ok((arg.to_string(), false))
        }
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

fn parse_document(text: &str, path: &Path) -> Result<EconomyDocument, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::Usage(format!("{}: not an economy document: {e}", path.display())))
}

fn violations_payload(violations: &[ModelError]) -> Value {
    json!({
        "status": "invalid",
        "violations": violations
            .iter()
            .map(|v| json!({"kind": v.kind(), "detail": v.to_string()}))
            .collect::<Vec<_>>(),
    })
}

fn load_economy(inputs: &mut Inputs, path: &Path) -> Result<Economy, Failure> {
    let doc = parse_document(&inputs.read(path)?, path)?;
    let violations = document_violations(&doc);
    if !violations.is_empty() {
        return Err(Failure::Validation(violations_payload(&violations)));
    }
    linex_core::economy::validate_economy(&doc).map_err(|e| model_failure(&e))
}

fn load_allocation(inputs: &mut Inputs, path: &Path) -> Result<Allocation, Failure> {
    match parse_allocation_json(&inputs.read(path)?) {
        Ok(Ok(x)) => Ok(x),
        Ok(Err(e)) => Err(model_failure(&e)),
        Err(e) => Err(Failure::Usage(format!(
            "{}: not an allocation document: {e}",
            path.display()
        ))),
    }
}

fn parse_price(text: &str, from_file: bool) -> Result<PriceSystem, Failure> {
    let parts: Vec<String> = if from_file {
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("price file: {e}")))?
    } else {
        text.split(',').map(|s| s.trim().to_string()).collect()
    };
    let values = parts
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Validation(error_payload("MalformedRational", e)))?;
    PriceSystem::new(values).map_err(|e| Failure::Validation(error_payload("InvalidPrice", e)))
}

fn parse_lambda(text: &str, from_file: bool) -> Result<Lambda, Failure> {
    let pairs: Vec<(String, String)> = if from_file {
        let map: std::collections::BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| Failure::Usage(format!("lambda file: {e}")))?;
        map.into_iter().collect()
    } else {
        text.split(',')
            .map(|item| {
                item.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Failure::Usage(format!("expected id=factor, got {item:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    pairs
        .into_iter()
        .map(|(k, v)| {
            parse_rational(&v)
                .map(|q| (k, q))
                .map_err(|e| Failure::Validation(error_payload("MalformedRational", e)))
        })
        .collect()
}

/// Accepts a bare certificate or a run report wrapping one.
fn parse_certificate(text: &str) -> Result<NoncompetitivenessCertificate, Failure> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("certificate: {e}")))?;
    let inner = match value.get("outcome") {
        Some(outcome) => outcome.clone(),
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| Failure::Usage(format!("not a certificate: {e}")))
}

fn run(command: &Command, inputs: &mut Inputs) -> Result<Value, Failure> {
    match command {
        Command::Validate { economy } => {
            let doc = parse_document(&inputs.read(economy)?, economy)?;
            let violations = document_violations(&doc);
            if violations.is_empty() {
                Ok(json!("valid"))
            } else {
                Err(Failure::Validation(violations_payload(&violations)))
            }
        }
        Command::Certify { economy } => {
            let e = load_economy(inputs, economy)?;
            let cert = certify_noncompetitive_core(&e)?;
            Ok(serde_json::to_value(cert).expect("certificate serializes"))
        }
        Command::Verify {
            economy,
            certificate,
        } => {
            let e = load_economy(inputs, economy)?;
            let cert = parse_certificate(&inputs.read(certificate)?)?;
            match verify_certificate(&cert, &e) {
                Ok(()) => Ok(json!({"verified": true})),
                Err(why) => Err(Failure::Certification(
                    json!({"verified": false, "detail": why}),
                )),
            }
        }
        Command::Suite { seed, trials } => {
            if *trials == 0 {
                return Err(Failure::Usage("--trials must be at least 1".into()));
            }
            inputs.record("suite", format!("seed={seed} trials={trials}").as_bytes());
            let report = run_campaign(*seed, *trials);
            let payload = serde_json::to_value(&report).expect("report serializes");
            if report.all_passed() {
                Ok(payload)
            } else {
                Err(Failure::Certification(payload))
            }
        }
        Command::Report { economy } => {
            Ok(summary::analysis_report(&load_economy(inputs, economy)?)?)
        }
        Command::CoreMax { economy } => Ok(summary::core_max(&core_max_allocation(
            &load_economy(inputs, economy)?,
        )?)),
        Command::FindEq { economy } => {
            let eqs = find_equilibrium(&load_economy(inputs, economy)?)?;
            Ok(json!({"equilibria": eqs.iter().map(summary::equilibrium).collect::<Vec<_>>()}))
        }
        Command::CheckEq {
            economy,
            price,
            alloc,
        } => {
            let e = load_economy(inputs, economy)?;
            let (text, from_file) = inputs.file_or_inline(price)?;
            let p = parse_price(&text, from_file)?;
            let x = load_allocation(inputs, alloc)?;
            Ok(summary::competitive_check(&check_competitive(&e, &p, &x)?))
        }
        Command::Block { economy, alloc } => {
            let e = load_economy(inputs, economy)?;
            let x = load_allocation(inputs, alloc)?;
            Ok(summary::blocking(find_blocking_coalition(&e, &x)?.as_ref()))
        }
        Command::Rescale { economy, lambda } => {
            let e = load_economy(inputs, economy)?;
            let (text, from_file) = inputs.file_or_inline(lambda)?;
            let r = rescale(&e, &parse_lambda(&text, from_file)?)?;
            Ok(serde_json::to_value(r.to_document()).expect("document serializes"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs::new();
    let result = run(&cli.command, &mut inputs);
    let (outcome, code) = match result {
        Ok(v) => (v, 0),
        Err(f) => {
            let payload = f.payload();
            eprintln!("linex {}: {}", cli.command.name(), payload);
            (payload, f.exit_code())
        }
    };
    if let Some(path) = &cli.out {
        let text = serde_json::to_string_pretty(&outcome).expect("payload serializes");
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("linex: cannot write {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    let report = RunReport {
        command: cli.command.name().to_string(),
        input_digest: inputs.digest(),
        outcome,
        elapsed: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    // A closed pipe (e.g. piping into `head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
