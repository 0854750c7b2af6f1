//! Command-line front end: analyze, plan, share, reconstruct, leakage, qkd,
//! oracle. Every command is replayable — the seed and the inputs fully
//! determine the outputs section of the report.

use crate::access::{
    build_aqss_plan, evaluate_coalition, home_share_analytics, maximalize, min_clique_partition,
    parse_access_structure, AsGraph, Coalition, PlanMode,
};
use crate::engine::{
    self, certify_leakage, encrypted_reconstruct, encrypted_share, leakage_report,
    quantum_reconstruct, quantum_share, EngineConfig,
};
use crate::error::{Error, Result};
use crate::oracle;
use crate::qkd::{
    self, Decision, EveAttack, LinearCode, ProtocolConfig, ReconciliationMode,
};
use crate::quantum::QuditRegister;
use crate::report::RunReport;
use crate::rng::RngStream;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(
    name = "aqss",
    about = "Assisted quantum secret sharing: access-structure analysis, share plans, \
             a qudit simulator, and a two-group QKD protocol",
    version
)]
pub struct Cli {
    /// Seed for every random stream in this run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Override the register-size cap (total dimension); the AQSS_MAX_DIM
    /// environment variable does the same.
    #[arg(long, global = true)]
    pub max_dim: Option<u128>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    DealerAssisted,
}

impl From<ModeArg> for PlanMode {
    fn from(m: ModeArg) -> PlanMode {
        match m {
            ModeArg::Strict => PlanMode::Strict,
            ModeArg::DealerAssisted => PlanMode::DealerAssisted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReconciliationArg {
    Syndrome,
    PaperLiteral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and analyze an access structure: canonical form, the
    /// no-cloning check, lambda with a minimum clique partition, a maximal
    /// extension, and home-share accounting.
    Analyze {
        /// Compact text like '{ABC, BD, EFG}' or JSON
        /// '{"players":[...],"sets":[[...],...]}'.
        gamma: String,
    },

    /// Build the share plan for an access structure.
    Plan {
        gamma: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
    },

    /// Share a secret quantumly and print the allocation manifest.
    Share {
        gamma: String,
        /// Named state (0, 1, +, -) or a register JSON.
        #[arg(long, default_value = "+")]
        secret: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Use the encrypted-home-share construction instead of share plans.
        #[arg(long)]
        encrypted: bool,
    },

    /// Share, then reconstruct for a coalition, reporting fidelity, or a
    /// refusal plus a leakage certificate when the coalition is
    /// unauthorized.
    Reconstruct {
        gamma: String,
        /// Comma-separated members, e.g. 'A,B,dealer'.
        #[arg(long)]
        coalition: String,
        #[arg(long, default_value = "+")]
        secret: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        #[arg(long)]
        encrypted: bool,
    },

    /// Trace distance between two secrets as seen by an unauthorized
    /// coalition.
    Leakage {
        gamma: String,
        #[arg(long)]
        coalition: String,
        #[arg(long, default_value = "0")]
        secret_a: String,
        #[arg(long, default_value = "1")]
        secret_b: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
    },

    /// Simulate the two-group key distribution protocol.
    Qkd {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Size of the first group (the second takes the rest).
        #[arg(long, default_value_t = 2)]
        split: usize,
        /// Total GHZ rounds (half become check rounds).
        #[arg(long, default_value_t = 32)]
        rounds: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Intercept-resend eavesdropper on a tree edge: 'edge=1' or '1'.
        #[arg(long)]
        eve: Option<String>,
        /// Abort threshold; defaults to the code's correctable fraction.
        #[arg(long)]
        threshold: Option<f64>,
        /// Spanning tree: 'chain', 'star', or a JSON edge list.
        #[arg(long, default_value = "chain")]
        tree: String,
        #[arg(long, default_value_t = 0)]
        leader: usize,
        #[arg(long, value_enum, default_value_t = ReconciliationArg::Syndrome)]
        reconciliation: ReconciliationArg,
        /// Full protocol config as a JSON file; overrides the other flags.
        #[arg(long)]
        config: Option<std::path::PathBuf>,
        /// Include the complete transcript in the report.
        #[arg(long)]
        full: bool,
        /// Fan out this many independently seeded runs and aggregate.
        #[arg(long)]
        trials: Option<usize>,
    },

    /// Run an independent brute-force oracle suite and report agreement.
    Oracle {
        /// clique_bruteforce | qts_disentangle | parity_law | p_formula.
        suite: String,
    },
}

/// Exit codes: 0 success, 2 input error (also used by clap), 3 domain
/// refusal (unauthorized coalition, protocol abort, oracle disagreement
/// maps to 4), 4 internal fault.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUSAL: i32 = 3;
pub const EXIT_FAULT: i32 = 4;

/// Run a parsed command, returning the report and the exit code.
pub fn run(cli: &Cli) -> (Result<RunReport>, i32) {
    let start = std::time::Instant::now();
    let outcome = dispatch(cli);
    match outcome {
        Ok((report_inputs, outputs, code)) => {
            let timing = start.elapsed().as_millis();
            let report = RunReport::new(
                &command_name(&cli.command),
                cli.seed,
                &report_inputs,
                outputs,
                timing,
            );
            (report, code)
        }
        Err(e) => {
            let code = classify_error(&e);
            (Err(e), code)
        }
    }
}

fn classify_error(e: &Error) -> i32 {
    if e.is_refusal() {
        EXIT_REFUSAL
    } else {
        match e {
            Error::Parse { .. }
            | Error::EmptyStructure
            | Error::EmptySet
            | Error::UnknownPlayer(_)
            | Error::InvalidParams(_)
            | Error::InvalidConfig(_)
            | Error::UnknownSuite(_)
            | Error::Io(_)
            | Error::Json(_) => EXIT_INPUT,
            _ => EXIT_FAULT,
        }
    }
}

fn command_name(command: &Command) -> String {
    match command {
        Command::Analyze { .. } => "analyze",
        Command::Plan { .. } => "plan",
        Command::Share { .. } => "share",
        Command::Reconstruct { .. } => "reconstruct",
        Command::Leakage { .. } => "leakage",
        Command::Qkd { .. } => "qkd",
        Command::Oracle { .. } => "oracle",
    }
    .to_string()
}

fn engine_config(cli: &Cli) -> EngineConfig {
    let mut config = EngineConfig::from_env();
    if let Some(cap) = cli.max_dim {
        config.max_total_dim = cap;
    }
    config
}

/// Parse a named state (0, 1, +, -) or a register JSON.
pub fn parse_secret(text: &str) -> Result<QuditRegister> {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| Complex64::new(re, 0.0);
    match text.trim() {
        "0" => QuditRegister::basis_state(&[2], &[0]),
        "1" => QuditRegister::basis_state(&[2], &[1]),
        "+" | "plus" => QuditRegister::prepare(&[2], vec![c(w), c(w)]),
        "-" | "minus" => QuditRegister::prepare(&[2], vec![c(w), c(-w)]),
        other if other.starts_with('{') => Ok(serde_json::from_str(other)?),
        other => Err(Error::InvalidParams(format!(
            "secret must be 0, 1, +, - or a register JSON, got {other:?}"
        ))),
    }
}

type Dispatch = (serde_json::Value, serde_json::Value, i32);

fn dispatch(cli: &Cli) -> Result<Dispatch> {
    match &cli.command {
        Command::Analyze { gamma } => cmd_analyze(gamma),
        Command::Plan { gamma, mode } => cmd_plan(gamma, (*mode).into()),
        Command::Share {
            gamma,
            secret,
            mode,
            encrypted,
        } => cmd_share(cli, gamma, secret, (*mode).into(), *encrypted),
        Command::Reconstruct {
            gamma,
            coalition,
            secret,
            mode,
            encrypted,
        } => cmd_reconstruct(cli, gamma, coalition, secret, (*mode).into(), *encrypted),
        Command::Leakage {
            gamma,
            coalition,
            secret_a,
            secret_b,
            mode,
        } => cmd_leakage(cli, gamma, coalition, secret_a, secret_b, (*mode).into()),
        Command::Qkd { .. } => cmd_qkd(cli),
        Command::Oracle { suite } => cmd_oracle(cli, suite),
    }
}

fn cmd_analyze(gamma_text: &str) -> Result<Dispatch> {
    let gamma = parse_access_structure(gamma_text)?;
    let graph = AsGraph::from_structure(&gamma)?;
    let partition = min_clique_partition(&graph)?;
    let no_cloning = gamma.check_no_cloning();
    let gamma_max = if no_cloning {
        Some(maximalize(&gamma)?)
    } else {
        None
    };
    let report = home_share_analytics(&gamma)?;
    let outputs = json!({
        "gamma": gamma,
        "compact": gamma.to_compact(),
        "no_cloning": no_cloning,
        "lambda": partition.size(),
        "partition": {
            "classes": partition.classes,
            "exact": partition.exact,
        },
        "as_graph_edges": graph.edges(),
        "gamma_max": gamma_max,
        "home_share_report": report,
    });
    Ok((json!({ "gamma": gamma_text }), outputs, EXIT_OK))
}

fn cmd_plan(gamma_text: &str, mode: PlanMode) -> Result<Dispatch> {
    let gamma = parse_access_structure(gamma_text)?;
    let plan = build_aqss_plan(&gamma, mode)?;
    let realization = engine::realize_plan(&plan, 2)?;
    let outputs = json!({
        "plan": plan,
        "field": realization.q,
        "site_count": realization.site_count(),
        "total_dim": realization.total_dim().to_string(),
    });
    Ok((
        json!({ "gamma": gamma_text, "mode": mode.to_string() }),
        outputs,
        EXIT_OK,
    ))
}

fn cmd_share(
    cli: &Cli,
    gamma_text: &str,
    secret_text: &str,
    mode: PlanMode,
    encrypted: bool,
) -> Result<Dispatch> {
    let gamma = parse_access_structure(gamma_text)?;
    let secret = parse_secret(secret_text)?;
    let inputs = json!({
        "gamma": gamma_text,
        "secret": secret_text,
        "mode": mode.to_string(),
        "encrypted": encrypted,
    });
    if encrypted {
        let mut rng = RngStream::from_seed(cli.seed).child("encrypted-share");
        let enc = encrypted_share(&gamma, &secret, &mut rng)?;
        let outputs = json!({
            "ciphertext_dims": enc.ciphertext.dims(),
            "key_bits": enc.key_bundles.iter()
                .map(|b| b.pads.values().map(|p| p.len()).sum::<usize>())
                .sum::<usize>(),
            "bundles": enc.key_bundles,
        });
        return Ok((inputs, outputs, EXIT_OK));
    }
    let plan = build_aqss_plan(&gamma, mode)?;
    let alloc = quantum_share(&plan, &secret, &engine_config(cli))?;
    Ok((inputs, json!({ "manifest": alloc.manifest() }), EXIT_OK))
}

fn cmd_reconstruct(
    cli: &Cli,
    gamma_text: &str,
    coalition_text: &str,
    secret_text: &str,
    mode: PlanMode,
    encrypted: bool,
) -> Result<Dispatch> {
    let gamma = parse_access_structure(gamma_text)?;
    let coalition = Coalition::parse(coalition_text)?;
    let secret = parse_secret(secret_text)?;
    let inputs = json!({
        "gamma": gamma_text,
        "coalition": coalition_text,
        "secret": secret_text,
        "mode": mode.to_string(),
        "encrypted": encrypted,
    });

    if encrypted {
        let mut rng = RngStream::from_seed(cli.seed).child("encrypted-share");
        let enc = encrypted_share(&gamma, &secret, &mut rng)?;
        return match encrypted_reconstruct(&enc, &coalition.players) {
            Ok(recovered) => {
                let overlap = recovered.inner_product(&secret)?.norm_sqr();
                let outputs = json!({ "reconstructed": true, "fidelity": overlap });
                Ok((inputs, outputs, EXIT_OK))
            }
            Err(Error::Unauthorized) => {
                let outputs = json!({
                    "reconstructed": false,
                    "refusal": "coalition contains no authorized set",
                });
                Ok((inputs, outputs, EXIT_REFUSAL))
            }
            Err(e) => Err(e),
        };
    }

    let plan = build_aqss_plan(&gamma, mode)?;
    let config = engine_config(cli);
    if evaluate_coalition(&plan, &coalition) {
        let alloc = quantum_share(&plan, &secret, &config)?;
        let reconstruction = quantum_reconstruct(&alloc, &coalition)?;
        let fidelity = reconstruction.fidelity(&alloc)?;
        let outputs = json!({ "reconstructed": true, "fidelity": fidelity });
        Ok((inputs, outputs, EXIT_OK))
    } else {
        // Refused; certify that the coalition's view leaks nothing, using
        // the canonical orthogonal pair |0⟩, |1⟩.
        let zero = QuditRegister::basis_state(&[2], &[0])?;
        let one = QuditRegister::basis_state(&[2], &[1])?;
        let alloc_a = quantum_share(&plan, &zero, &config)?;
        let alloc_b = quantum_share(&plan, &one, &config)?;
        let mut rng = RngStream::from_seed(cli.seed).child("leakage-probes");
        let certificate = certify_leakage(&alloc_a, &alloc_b, &coalition, &mut rng)?;
        let outputs = json!({
            "reconstructed": false,
            "refusal": "coalition does not satisfy the plan",
            "leakage": certificate,
        });
        Ok((inputs, outputs, EXIT_REFUSAL))
    }
}

fn cmd_leakage(
    cli: &Cli,
    gamma_text: &str,
    coalition_text: &str,
    secret_a_text: &str,
    secret_b_text: &str,
    mode: PlanMode,
) -> Result<Dispatch> {
    let gamma = parse_access_structure(gamma_text)?;
    let coalition = Coalition::parse(coalition_text)?;
    let secret_a = parse_secret(secret_a_text)?;
    let secret_b = parse_secret(secret_b_text)?;
    let plan = build_aqss_plan(&gamma, mode)?;
    let mut rng = RngStream::from_seed(cli.seed).child("leakage-probes");
    let report = leakage_report(
        &plan,
        &coalition,
        &secret_a,
        &secret_b,
        &mut rng,
        &engine_config(cli),
    )?;
    let inputs = json!({
        "gamma": gamma_text,
        "coalition": coalition_text,
        "secret_a": secret_a_text,
        "secret_b": secret_b_text,
        "mode": mode.to_string(),
    });
    Ok((inputs, json!({ "report": report }), EXIT_OK))
}

fn parse_tree(text: &str, n: usize, leader: usize) -> Result<Vec<(usize, usize)>> {
    match text {
        "chain" => Ok((0..n - 1).map(|i| (i, i + 1)).collect()),
        "star" => Ok((0..n).filter(|&p| p != leader).map(|p| (leader, p)).collect()),
        other => Ok(serde_json::from_str(other)?),
    }
}

fn parse_eve(text: &str) -> Result<EveAttack> {
    let raw = text.strip_prefix("edge=").unwrap_or(text);
    let edge: usize = raw.trim().parse().map_err(|_| {
        Error::InvalidConfig(format!("eve spec {text:?} is not 'edge=<index>'"))
    })?;
    Ok(EveAttack::InterceptResend { edge })
}

fn cmd_qkd(cli: &Cli) -> Result<Dispatch> {
    let Command::Qkd {
        n,
        split,
        rounds,
        noise,
        eve,
        threshold,
        tree,
        leader,
        reconciliation,
        config,
        full,
        trials,
    } = &cli.command
    else {
        unreachable!("dispatched on Qkd");
    };

    let protocol_config = match config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)?;
            let mut parsed: ProtocolConfig = serde_json::from_str(&raw)?;
            parsed.seed = cli.seed;
            parsed
        }
        None => {
            let code = LinearCode::hamming_7_4();
            let abort_threshold = threshold
                .unwrap_or(code.correctable() as f64 / code.block_len() as f64);
            ProtocolConfig {
                n: *n,
                group_split: (*split, n - split),
                tree: parse_tree(tree, *n, *leader)?,
                leader: *leader,
                rounds: *rounds,
                noise_p: *noise,
                eve: eve.as_deref().map(parse_eve).transpose()?,
                abort_threshold,
                code,
                reconciliation: match reconciliation {
                    ReconciliationArg::Syndrome => ReconciliationMode::Syndrome,
                    ReconciliationArg::PaperLiteral => ReconciliationMode::PaperLiteral,
                },
                seed: cli.seed,
            }
        }
    };
    protocol_config.validate()?;
    let inputs = json!({ "config": protocol_config });

    if let Some(trials) = trials {
        let mut agreed = 0usize;
        let mut aborted = 0usize;
        let mut delta_sum = 0.0f64;
        let mut proceeded = 0usize;
        for trial in 0..*trials {
            let trial_config = ProtocolConfig {
                seed: RngStream::from_seed(protocol_config.seed)
                    .child_indexed("trial", trial as u64)
                    .below(u64::MAX - 1),
                ..protocol_config.clone()
            };
            let transcript = qkd::run_protocol(&trial_config)?;
            match transcript.decision {
                Decision::Abort { .. } => aborted += 1,
                Decision::Proceed => {
                    proceeded += 1;
                    delta_sum += transcript.delta_fraction();
                    if transcript.key_result.as_ref().is_some_and(|k| k.agreed) {
                        agreed += 1;
                    }
                }
            }
        }
        let outputs = json!({
            "trials": trials,
            "aborted": aborted,
            "abort_rate": aborted as f64 / *trials as f64,
            "agreed": agreed,
            "agreed_rate": agreed as f64 / *trials as f64,
            "mean_delta_fraction": if proceeded > 0 { delta_sum / proceeded as f64 } else { 0.0 },
        });
        return Ok((inputs, outputs, EXIT_OK));
    }

    let transcript = qkd::run_protocol(&protocol_config)?;
    let m = protocol_config.rounds / 2;
    let predicted = qkd::effective_error_probability(protocol_config.n, protocol_config.noise_p);
    let mut outputs = json!({
        "decision": transcript.decision,
        "delta": transcript.delta,
        "delta_fraction": transcript.delta_fraction(),
        "check_bits": m,
        "agreed": transcript.key_result.as_ref().map(|k| k.agreed),
        "key_bits": transcript.key_result.as_ref().map(|k| k.key_a.len()),
        "key_rate": transcript.key_rate(),
        "predicted_mismatch": predicted,
        "edge_stats": transcript.edge_stats,
        "classical_bits_per_step": transcript.bus.bits_per_step,
    });
    if *full {
        outputs["transcript"] = serde_json::to_value(&transcript)?;
    }
    let code = match transcript.decision {
        Decision::Proceed => EXIT_OK,
        Decision::Abort { .. } => EXIT_REFUSAL,
    };
    Ok((inputs, outputs, code))
}

fn cmd_oracle(cli: &Cli, suite: &str) -> Result<Dispatch> {
    let outcome = oracle::run_suite(suite, cli.seed)?;
    let code = if outcome.agree { EXIT_OK } else { EXIT_FAULT };
    Ok((
        json!({ "suite": suite }),
        serde_json::to_value(&outcome)?,
        code,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_args(args: &[&str]) -> (Result<RunReport>, i32) {
        let cli = Cli::parse_from(args);
        run(&cli)
    }

    #[test]
    fn analyze_reports_lambda_two() {
        let (report, code) = run_args(&["aqss", "analyze", "{ABC,BD,EFG}"]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(report.outputs["lambda"], 2);
        assert_eq!(report.outputs["no_cloning"], false);
    }

    #[test]
    fn analyze_reports_no_cloning_structure() {
        let (report, code) = run_args(&["aqss", "analyze", "{ABC,ADE,BDF}"]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(report.outputs["lambda"], 1);
        assert_eq!(report.outputs["no_cloning"], true);
        assert!(!report.outputs["gamma_max"].is_null());
    }

    #[test]
    fn analyze_rejects_empty_structure() {
        let (report, code) = run_args(&["aqss", "analyze", "{}"]);
        assert!(report.is_err());
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn reconstruct_round_trips_for_authorized_coalitions() {
        let (report, code) = run_args(&[
            "aqss",
            "reconstruct",
            "{AB,CD}",
            "--coalition",
            "A,B,dealer",
        ]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        let fidelity = report.outputs["fidelity"].as_f64().unwrap();
        assert!((fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reconstruct_refuses_unauthorized_coalitions() {
        let (report, code) = run_args(&[
            "aqss",
            "reconstruct",
            "{AB,CD}",
            "--coalition",
            "A,C",
        ]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_REFUSAL);
        assert_eq!(report.outputs["reconstructed"], false);
        let leak = report.outputs["leakage"]["orthogonal_pair"].as_f64().unwrap();
        assert!(leak < 1e-9);
    }

    #[test]
    fn encrypted_reconstruct_works_without_no_cloning() {
        let (report, code) = run_args(&[
            "aqss",
            "reconstruct",
            "{AB,CD}",
            "--coalition",
            "C,D",
            "--encrypted",
        ]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        let fidelity = report.outputs["fidelity"].as_f64().unwrap();
        assert!((fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qkd_noiseless_agrees() {
        let (report, code) = run_args(&[
            "aqss", "qkd", "--n", "4", "--split", "2", "--rounds", "32", "--seed", "7",
        ]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(report.outputs["agreed"], true);
        assert_eq!(report.outputs["delta"], 0);
    }

    #[test]
    fn qkd_is_replayable() {
        let args = [
            "aqss", "qkd", "--n", "4", "--rounds", "32", "--noise", "0.05", "--seed", "21",
        ];
        let (a, _) = run_args(&args);
        let (b, _) = run_args(&args);
        assert_eq!(
            serde_json::to_string(&a.unwrap().outputs).unwrap(),
            serde_json::to_string(&b.unwrap().outputs).unwrap()
        );
    }

    #[test]
    fn qkd_eve_aborts() {
        let (report, code) = run_args(&[
            "aqss", "qkd", "--n", "4", "--rounds", "64", "--eve", "edge=1", "--seed", "3",
        ]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_REFUSAL);
        assert_eq!(report.outputs["decision"]["outcome"], "abort");
        assert_eq!(report.outputs["decision"]["step"], 1);
    }

    #[test]
    fn oracle_suites_agree() {
        let (report, code) = run_args(&["aqss", "oracle", "p_formula"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(report.unwrap().outputs["agree"], true);
    }

    #[test]
    fn unknown_oracle_is_an_input_error() {
        let (report, code) = run_args(&["aqss", "oracle", "nonsense"]);
        assert!(report.is_err());
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn plan_outputs_the_tree() {
        let (report, code) = run_args(&["aqss", "plan", "{ABC,BD,EFG}"]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(report.outputs["plan"]["lambda"], 2);
        assert_eq!(report.outputs["field"], 3);
        assert_eq!(report.outputs["site_count"], 15);
    }

    #[test]
    fn share_manifest_lists_ownership() {
        let (report, code) = run_args(&["aqss", "share", "{AB,CD}"]);
        let report = report.unwrap();
        assert_eq!(code, EXIT_OK);
        let ownership = report.outputs["manifest"]["ownership"].as_array().unwrap();
        assert_eq!(ownership.len(), 7);
    }
}
