//! Batch front end: load a space file, run an analysis or completion,
//! emit a machine-readable JSON report.
//!
//! Exit codes: 0 on success, 1 on domain errors (NotAdmissible,
//! NonCommuting, ...), 2 on I/O, parse, or input-validation errors.
//! Reports are deterministic for identical inputs and flags; the
//! `CCC_SEED` environment variable fixes the seed used for randomized
//! verification sampling.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ccc_core::bell_ccc::{chsh_classical, chsh_quantum};
use ccc_core::classical_completion::{complete, CompleteOptions};
use ccc_core::error::CcError;
use ccc_core::event_algebra::{AtomicSpace, Event, DEFAULT_ENUM_LIMIT};
use ccc_core::io::{
    cctype_to_json, completion_report_to_json, event_to_names,
    parse_space, quantum_extension_to_json, ClassicalFile, QuantumFile, SpaceFile,
};
use ccc_core::quantum_completion::{complete_quantum, QCompleteOptions};
use ccc_core::quantum_space::{
    check_quantum_common_cause, commutes, is_correlated_q, meet_commuting, state_value,
    Projection, Tolerances,
};
use ccc_core::rational::{format_rat, from_f64, parse_rat, to_f64, Rat};
use ccc_core::reichenbach::{
    common_cause_closed, survey_common_causes, type_from_params, CcType,
};

#[derive(Parser)]
#[command(name = "ccc", version, about = "Common cause analysis and completion", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Input space file (classical or quantum JSON, auto-detected)
    input: String,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<String>,
    /// Equality tolerance override for quantum-side comparisons
    #[arg(long)]
    tolerance: Option<f64>,
    /// Enumeration limit (atom count) for event sweeps
    #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
    limit: usize,
}

#[derive(Args, Clone)]
struct TypeSpec {
    /// Correlated pair by event/projection names, e.g. --pair A,B (repeatable)
    #[arg(long = "pair", required = true)]
    pairs: Vec<String>,
    /// Free parameter t = r_{A|C} as an exact rational, e.g. 4/5
    #[arg(long, requires = "s", conflicts_with = "quintuple")]
    t: Option<String>,
    /// Free parameter s = r_{B|C} as an exact rational
    #[arg(long, requires = "t", conflicts_with = "quintuple")]
    s: Option<String>,
    /// Explicit admissible quintuple r_c,r_ac,r_bc,r_acp,r_bcp
    #[arg(long = "type")]
    quintuple: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List correlated pairs, their common causes, and completeness
    Analyze(CommonOpts),
    /// Extend a classical space with common causes of requested types
    Complete {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        types: TypeSpec,
    },
    /// Extend a quantum space with common causes of requested types
    Qcomplete {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        types: TypeSpec,
    },
    /// Probability-form CHSH report for four events or projections
    Bell {
        #[command(flatten)]
        common: CommonOpts,
        a1: String,
        a2: String,
        b1: String,
        b2: String,
    },
    /// Common cause closedness of a classical space
    Closed(CommonOpts),
}

enum Failure {
    /// Domain error from an operation: exit 1.
    Domain(CcError),
    /// Parse, I/O, or input-validation error: exit 2.
    Input(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Errors raised while interpreting the input file or resolving names are
/// input errors; everything after that is a domain error.
fn input_err(e: CcError) -> Failure {
    Failure::Input(format!("{} ({})", e, e.name()))
}

fn domain_err(e: CcError) -> Failure {
    match e {
        CcError::UnknownName { .. } | CcError::ParseError { .. } => input_err(e),
        other => Failure::Domain(other),
    }
}

fn seed_from_env() -> u64 {
    std::env::var("CCC_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

fn tolerances(opts: &CommonOpts) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(eq) = opts.tolerance {
        tol.equality = eq;
        tol.clamp = eq;
    }
    tol
}

fn tolerances_json(tol: &Tolerances) -> Value {
    json!({
        "hermitian": tol.hermitian,
        "projection": tol.projection,
        "commutator": tol.commutator,
        "equality": tol.equality,
        "strict_margin": tol.strict_margin,
        "trace": tol.trace,
        "psd": tol.psd,
        "clamp": tol.clamp,
    })
}

fn envelope(command: &str, tol: &Tolerances, seed: u64, payload: Value) -> Value {
    json!({
        "tool": {"name": "ccc", "version": env!("CARGO_PKG_VERSION")},
        "command": command,
        "tolerances": tolerances_json(tol),
        "seed": seed,
        "report": payload,
    })
}

fn load(opts: &CommonOpts, tol: &Tolerances) -> CliResult<SpaceFile> {
    let text = std::fs::read_to_string(&opts.input)?;
    parse_space(&text, tol).map_err(input_err)
}

fn named_event<'a>(file: &'a ClassicalFile, name: &str) -> CliResult<&'a Event> {
    file.events
        .get(name)
        .ok_or_else(|| Failure::Input(format!("unknown event name {name:?} (UnknownName)")))
}

fn named_projection<'a>(file: &'a QuantumFile, name: &str) -> CliResult<&'a Projection> {
    file.projections
        .get(name)
        .ok_or_else(|| Failure::Input(format!("unknown projection name {name:?} (UnknownName)")))
}

fn split_pair(spec: &str) -> CliResult<(String, String)> {
    match spec.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.into(), b.into())),
        _ => Err(Failure::Input(format!("--pair must be NAME,NAME (got {spec:?})"))),
    }
}

fn parse_rat_arg(text: &str, what: &str) -> CliResult<Rat> {
    parse_rat(text).map_err(|_| Failure::Input(format!("{what} must be an exact rational, got {text:?}")))
}

fn parse_quintuple(text: &str) -> CliResult<CcType> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 5 {
        return Err(Failure::Input("--type needs exactly five rationals".into()));
    }
    let mut vals = Vec::with_capacity(5);
    for p in &parts {
        vals.push(parse_rat_arg(p, "--type component")?);
    }
    Ok(CcType::new(
        vals[0].clone(),
        vals[1].clone(),
        vals[2].clone(),
        vals[3].clone(),
        vals[4].clone(),
    ))
}

/// Per-pair cause type: explicit quintuple, or derived from (t, s) and
/// the pair's own marginals.
fn resolve_type(
    types: &TypeSpec,
    mu_a: &Rat,
    mu_b: &Rat,
    mu_ab: &Rat,
) -> CliResult<CcType> {
    if let Some(q) = &types.quintuple {
        return parse_quintuple(q);
    }
    match (&types.t, &types.s) {
        (Some(t), Some(s)) => {
            let t = parse_rat_arg(t, "--t")?;
            let s = parse_rat_arg(s, "--s")?;
            type_from_params(mu_a, mu_b, mu_ab, &t, &s).map_err(domain_err)
        }
        _ => Err(Failure::Input("give either --t and --s, or --type".into())),
    }
}

fn pair_json(space: &AtomicSpace, a: &Event, b: &Event) -> Value {
    json!({"a": event_to_names(space, a), "b": event_to_names(space, b)})
}

// ---- subcommands -----------------------------------------------------------

fn analyze_classical(file: &ClassicalFile, limit: usize) -> CliResult<Value> {
    let space = &file.space;
    let survey = survey_common_causes(space, limit).map_err(domain_err)?;
    let mut pair_reports = Vec::new();
    let mut all_proper = true;
    for entry in &survey {
        all_proper &= entry.has_proper;
        let causes_json: Vec<Value> = entry
            .causes
            .iter()
            .map(|(c, v)| json!({"event": event_to_names(space, c), "verdict": v}))
            .collect();
        pair_reports.push(json!({
            "a": event_to_names(space, &entry.a),
            "b": event_to_names(space, &entry.b),
            "correlation": format_rat(&entry.correlation),
            "common_causes": causes_json,
            "has_proper_cause": entry.has_proper,
            "verdict": if entry.has_proper { "complete" } else { "incomplete" },
        }));
    }
    Ok(json!({
        "kind": "classical",
        "atom_count": space.atom_count(),
        "correlated_pairs": pair_reports,
        "closed": all_proper,
    }))
}

/// Quantum analysis is relative to the named projections: correlations
/// among cross-commuting named pairs, with every other named projection
/// tried as a candidate cause.
fn analyze_quantum(file: &QuantumFile, tol: &Tolerances) -> CliResult<Value> {
    let qs = &file.space;
    let names: Vec<&String> = file.projections.keys().collect();
    let mut pair_reports = Vec::new();
    for (i, na) in names.iter().enumerate() {
        for nb in names.iter().skip(i + 1) {
            let a = &file.projections[*na];
            let b = &file.projections[*nb];
            if !commutes(a, b, tol).map_err(domain_err)? {
                continue;
            }
            let corr = is_correlated_q(qs, a, b, tol).map_err(domain_err)?;
            if corr <= 0.0 {
                continue;
            }
            let mut causes = Vec::new();
            let mut has_proper = false;
            for nc in &names {
                if nc == na || nc == nb {
                    continue;
                }
                let c = &file.projections[*nc];
                if let Ok(v) = check_quantum_common_cause(qs, a, b, c, tol) {
                    if v.is_common_cause {
                        has_proper |= v.is_proper();
                        causes.push(json!({"projection": nc, "verdict": v}));
                    }
                }
            }
            pair_reports.push(json!({
                "a": na,
                "b": nb,
                "correlation": corr,
                "common_causes": causes,
                "has_proper_named_cause": has_proper,
            }));
        }
    }
    Ok(json!({
        "kind": "quantum",
        "dim": qs.dim(),
        "correlated_named_pairs": pair_reports,
    }))
}

fn run_complete(common: &CommonOpts, types: &TypeSpec, seed: u64) -> CliResult<Value> {
    let tol = tolerances(common);
    let file = match load(common, &tol)? {
        SpaceFile::Classical(f) => f,
        SpaceFile::Quantum(_) => {
            return Err(Failure::Input("complete requires a classical space file".into()))
        }
    };
    let space = &file.space;
    let mut requests = Vec::new();
    for spec in &types.pairs {
        let (na, nb) = split_pair(spec)?;
        let a = named_event(&file, &na)?.clone();
        let b = named_event(&file, &nb)?.clone();
        let mu_a = space.measure(&a).map_err(domain_err)?;
        let mu_b = space.measure(&b).map_err(domain_err)?;
        let mu_ab = space.measure(&a.meet(&b).map_err(domain_err)?).map_err(domain_err)?;
        let ct = resolve_type(types, &mu_a, &mu_b, &mu_ab)?;
        requests.push((a, b, ct));
    }
    let opts = CompleteOptions { enum_limit: common.limit, seed, ..CompleteOptions::default() };
    let report = complete(space, &requests, &opts).map_err(domain_err)?;
    Ok(completion_report_to_json(space, &report, &file.events))
}

fn run_qcomplete(common: &CommonOpts, types: &TypeSpec, seed: u64) -> CliResult<Value> {
    let tol = tolerances(common);
    let file = match load(common, &tol)? {
        SpaceFile::Quantum(f) => f,
        SpaceFile::Classical(_) => {
            return Err(Failure::Input("qcomplete requires a quantum space file".into()))
        }
    };
    let qs = &file.space;
    let mut requests = Vec::new();
    for spec in &types.pairs {
        let (na, nb) = split_pair(spec)?;
        let a = named_projection(&file, &na)?.clone();
        let b = named_projection(&file, &nb)?.clone();
        let phi_a = state_value(qs, &a, &tol).map_err(domain_err)?;
        let phi_b = state_value(qs, &b, &tol).map_err(domain_err)?;
        let ab = meet_commuting(&a, &b, &tol).map_err(domain_err)?;
        let phi_ab = state_value(qs, &ab, &tol).map_err(domain_err)?;
        let (mu_a, mu_b, mu_ab) = (
            from_f64(phi_a).map_err(domain_err)?,
            from_f64(phi_b).map_err(domain_err)?,
            from_f64(phi_ab).map_err(domain_err)?,
        );
        let ct = resolve_type(types, &mu_a, &mu_b, &mu_ab)?;
        requests.push((a, b, ct));
    }
    let qopts = QCompleteOptions { seed, ..QCompleteOptions::default() };
    let report = complete_quantum(qs, &requests, &tol, &qopts).map_err(domain_err)?;

    let mut named: BTreeMap<String, Projection> = BTreeMap::new();
    for (name, p) in &file.projections {
        named.insert(name.clone(), report.embedding.embed(p, &tol).map_err(domain_err)?);
    }
    for (i, c) in report.causes.iter().enumerate() {
        named.insert(format!("C{}", i + 1), c.clone());
    }

    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "pair_index": e.pair_index,
                "requested_type": cctype_to_json(&e.requested),
                "measured": e.measured,
                "type_matches": e.type_matches,
                "verdict": e.verdict,
            })
        })
        .collect();

    Ok(json!({
        "extended_space": quantum_extension_to_json(&report.extension, &report.embedding, &named),
        "common_causes": entries,
        "fidelity": {
            "samples": report.fidelity.samples,
            "seed": report.fidelity.seed,
            "max_deviation": report.fidelity.max_deviation,
        },
        "cause_commutation": report.cause_commutes,
    }))
}

fn run_bell(common: &CommonOpts, names: [&str; 4]) -> CliResult<Value> {
    let tol = tolerances(common);
    match load(common, &tol)? {
        SpaceFile::Classical(file) => {
            let [a1, a2, b1, b2] = names;
            let a1 = named_event(&file, a1)?;
            let a2 = named_event(&file, a2)?;
            let b1 = named_event(&file, b1)?;
            let b2 = named_event(&file, b2)?;
            let r = chsh_classical(&file.space, a1, a2, b1, b2).map_err(domain_err)?;
            Ok(json!({
                "kind": "classical",
                "value": format_rat(&r.value),
                "value_approx": to_f64(&r.value),
                "satisfied": r.satisfied,
                "terms": r.terms.iter().map(format_rat).collect::<Vec<_>>(),
            }))
        }
        SpaceFile::Quantum(file) => {
            let [a1, a2, b1, b2] = names;
            let a1 = named_projection(&file, a1)?;
            let a2 = named_projection(&file, a2)?;
            let b1 = named_projection(&file, b1)?;
            let b2 = named_projection(&file, b2)?;
            let r = chsh_quantum(&file.space, a1, a2, b1, b2, &tol).map_err(domain_err)?;
            Ok(json!({
                "kind": "quantum",
                "value": r.value,
                "satisfied": r.satisfied,
                "terms": r.terms,
            }))
        }
    }
}

fn run_closed(common: &CommonOpts) -> CliResult<Value> {
    let tol = tolerances(common);
    let file = match load(common, &tol)? {
        SpaceFile::Classical(f) => f,
        SpaceFile::Quantum(_) => {
            return Err(Failure::Input("closed requires a classical space file".into()))
        }
    };
    let report = common_cause_closed(&file.space, common.limit).map_err(domain_err)?;
    let incomplete: Vec<Value> = report
        .incomplete_pairs
        .iter()
        .map(|(a, b)| pair_json(&file.space, a, b))
        .collect();
    Ok(json!({
        "closed": report.closed,
        "incomplete_pairs": incomplete,
    }))
}

fn run(cli: &Cli) -> CliResult<(String, Value, CommonOpts)> {
    let seed = seed_from_env();
    match &cli.command {
        Command::Analyze(common) => {
            let tol = tolerances(common);
            let payload = match load(common, &tol)? {
                SpaceFile::Classical(file) => analyze_classical(&file, common.limit)?,
                SpaceFile::Quantum(file) => analyze_quantum(&file, &tol)?,
            };
            Ok(("analyze".into(), payload, common.clone()))
        }
        Command::Complete { common, types } => {
            Ok(("complete".into(), run_complete(common, types, seed)?, common.clone()))
        }
        Command::Qcomplete { common, types } => {
            Ok(("qcomplete".into(), run_qcomplete(common, types, seed)?, common.clone()))
        }
        Command::Bell { common, a1, a2, b1, b2 } => {
            Ok(("bell".into(), run_bell(common, [a1, a2, b1, b2])?, common.clone()))
        }
        Command::Closed(common) => Ok(("closed".into(), run_closed(common)?, common.clone())),
    }
}

fn emit(doc: &Value, output: Option<&str>) -> CliResult<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(doc).expect("report serializes"));
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((command, payload, common)) => {
            let tol = tolerances(&common);
            let doc = envelope(&command, &tol, seed_from_env(), payload);
            match emit(&doc, common.output.as_deref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(_) => ExitCode::from(2),
            }
        }
        Err(Failure::Domain(e)) => {
            let doc = json!({
                "tool": {"name": "ccc", "version": env!("CARGO_PKG_VERSION")},
                "error": {"name": e.name(), "message": e.to_string()},
            });
            eprintln!("{}", serde_json::to_string_pretty(&doc).unwrap());
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
