//! Command dispatch and exit codes.

use clap::{Parser, Subcommand};

use nbhd_core::builder::{rebuild, roundtrip, BuilderError, RoundtripOptions, RoundtripVerdict};
use nbhd_core::conjugacy::Decision;
use nbhd_core::invariant::{
    check_realizability, check_surface_relation, decide_equivalence, CheckKind, EquivalenceMode, InvariantTuple,
};
use nbhd_core::jet::{canonical_form_ti, JetError};
use nbhd_core::surface::{ueda_form_from_pair, SurfaceError};
use nbhd_core::{DiffeoTuple, Execution, JetDiffeo, Scalar};

use crate::job::{read_job, Invariant, Job, JobError};
use crate::report::*;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nbhd", version, about = "Exact jet calculus for neighborhoods of curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Truncate all series to this order (at most the order of the job).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Also compare up to a constant factor of the form.
    #[arg(long, global = true)]
    pub scale_quotient: bool,
    /// Seed for the patch perturbations of `roundtrip`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Re-check the certificates printed in an earlier report on the same inputs.
    #[arg(long, global = true, value_name = "REPORT")]
    pub verify_certificate: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Realizability checks for a bifoliated invariant.
    Check { file: String },
    /// Equivalence of two invariants of the same kind.
    Equiv { a: String, b: String },
    /// Normal form of every entry, and the tuple normalized by its first entry of least tangency.
    Canon { file: String },
    /// Tangency order and periods of the form read off the two representations.
    Ueda { file: String },
    /// Build patches, perturb, re-extract and compare.
    Roundtrip { file: String },
    /// Surface group relation for both representations.
    Relation { file: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Equiv { .. } => "equiv",
            Command::Canon { .. } => "canon",
            Command::Ueda { .. } => "ueda",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Relation { .. } => "relation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::report(code, text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.verify_certificate {
        Some(report) => verify(cli, report),
        None => match &cli.command {
            Command::Check { file } => check(cli, file),
            Command::Equiv { a, b } => equiv(cli, a, b),
            Command::Canon { file } => canon(cli, file),
            Command::Ueda { file } => ueda(cli, file),
            Command::Roundtrip { file } => roundtrip_cmd(cli, file),
            Command::Relation { file } => relation(cli, file),
        },
    };
    result.unwrap_or_else(|e| Outcome {
        code: EXIT_MALFORMED,
        stdout: String::new(),
        stderr: format!("nbhd: {e}\n"),
    })
}

fn statement(kind: CheckKind) -> &'static str {
    match kind {
        CheckKind::Tangency => "every entry is tangent to the identity at order at least k",
        CheckKind::Periods => "rho_G(g) o rho_F(g)^-1 = t + (period of omega along g) t^(k+1) + ... for every basis loop g",
        CheckKind::Transports => "transport(1,j) = t - (integral of omega from p1 to pj) t^(k+1) + ...",
        CheckKind::Relation => "[rho(a1), rho(b1)] ... [rho(ag), rho(bg)] = id for rho_F and rho_G",
    }
}

fn check(cli: &Cli, file: &str) -> Result<Outcome, JobError> {
    let job = read_job(file, cli.order)?;
    let k = job.require_k()?;
    let omega = job.require_omega()?;
    let inv = job.invariant.bifoliated();
    let report = check_realizability(&inv, k, omega, &job.surface)?;
    let passed = report.passed();
    let body = CheckReport {
        command: "check",
        status: if passed { "pass" } else { "fail" },
        genus: job.genus,
        order: job.order,
        k,
        checks: report
            .checks
            .iter()
            .map(|c| CheckRecord::from_result(c, statement(c.kind)))
            .collect(),
    };
    Ok(Outcome::report(if passed { EXIT_PASS } else { EXIT_FAIL }, render(&body)))
}

fn decide(a: &Invariant, b: &Invariant, mode: EquivalenceMode) -> Result<Decision, JobError> {
    let exec = Execution::default();
    Ok(match (a, b) {
        (Invariant::Bifoliated(x), Invariant::Bifoliated(y)) => decide_equivalence(x, y, mode, exec)?,
        (Invariant::Neighborhood(x), Invariant::Neighborhood(y)) => decide_equivalence(x, y, mode, exec)?,
        _ => unreachable!("kinds checked by caller"),
    })
}

fn load_pair(cli: &Cli, a: &str, b: &str) -> Result<(Job, Job), JobError> {
    let ja = read_job(a, cli.order)?;
    let jb = read_job(b, cli.order)?;
    if ja.invariant.kind() != jb.invariant.kind() {
        return Err(JobError::Invalid(format!(
            "cannot compare a {} invariant with a {} invariant",
            ja.invariant.kind(),
            jb.invariant.kind()
        )));
    }
    if ja.genus != jb.genus {
        return Err(JobError::GenusMismatch {
            file: jb.genus,
            other: ja.genus,
        });
    }
    if ja.order != jb.order {
        return Err(JobError::Invalid(format!("orders differ: {} vs {}", ja.order, jb.order)));
    }
    Ok((ja, jb))
}

fn verdict_code(d: &Decision) -> (i32, &'static str) {
    match d {
        Decision::Certificate(_) => (EXIT_PASS, "equivalent"),
        Decision::Obstruction(_) => (EXIT_FAIL, "not-equivalent"),
        Decision::Undecided(_) => (EXIT_UNDECIDED, "undecided"),
    }
}

fn equiv(cli: &Cli, a: &str, b: &str) -> Result<Outcome, JobError> {
    let (ja, jb) = load_pair(cli, a, b)?;
    let labels = ja.invariant.labels();
    let fixed = decide(&ja.invariant, &jb.invariant, EquivalenceMode::FixedForm)?;
    let scaled = if cli.scale_quotient {
        Some(decide(&ja.invariant, &jb.invariant, EquivalenceMode::UpToScale)?)
    } else {
        None
    };
    let (code, status) = verdict_code(scaled.as_ref().unwrap_or(&fixed));
    let body = EquivReport {
        command: "equiv",
        status,
        genus: ja.genus,
        order: ja.order,
        kind: ja.invariant.kind(),
        fixed_form: DecisionRecord::new(EquivalenceMode::FixedForm.name(), &fixed, &labels),
        up_to_scale: scaled
            .as_ref()
            .map(|d| DecisionRecord::new(EquivalenceMode::UpToScale.name(), d, &labels)),
    };
    Ok(Outcome::report(code, render(&body)))
}

fn canon(cli: &Cli, file: &str) -> Result<Outcome, JobError> {
    let job = read_job(file, cli.order)?;
    let tuple = job.invariant.concatenated();
    let labels = job.invariant.labels();
    let mut entries = Vec::new();
    let mut driver: Option<(usize, usize, JetDiffeo)> = None;
    let mut complete = true;
    for (idx, (f, label)) in tuple.entries().iter().zip(&labels).enumerate() {
        let mut e = CanonEntry {
            label: label.clone(),
            identity: false,
            k: None,
            a: None,
            b: None,
            conjugator: None,
            normal: None,
            error: None,
        };
        match canonical_form_ti(f) {
            Ok(cf) => {
                if driver.as_ref().is_none_or(|(k, _, _)| cf.k < *k) {
                    driver = Some((cf.k, idx, cf.psi.clone()));
                }
                e.k = Some(cf.k);
                e.a = Some(cf.a.to_string());
                e.b = Some(cf.b.to_string());
                e.conjugator = Some(jet_strings(&cf.psi));
                e.normal = Some(jet_strings(&cf.normal_jet(f.order())));
            }
            Err(JetError::IdentityHasNoLeadingTerm) => e.identity = true,
            Err(err) => {
                complete = false;
                e.error = Some(err.to_string());
            }
        }
        entries.push(e);
    }
    let normalized = driver.map(|(_, idx, psi)| Normalized {
        driver: labels[idx].clone(),
        conjugator: jet_strings(&psi),
        entries: tuple.conjugate_by(&psi).entries().iter().map(jet_strings).collect(),
    });
    let body = CanonReport {
        command: "canon",
        status: if complete { "ok" } else { "incomplete" },
        genus: job.genus,
        order: job.order,
        entries,
        normalized,
    };
    Ok(Outcome::report(if complete { EXIT_PASS } else { EXIT_FAIL }, render(&body)))
}

fn ueda(cli: &Cli, file: &str) -> Result<Outcome, JobError> {
    let job = read_job(file, cli.order)?;
    let inv = job.invariant.bifoliated();
    let mut body = UedaReport {
        command: "ueda",
        status: "ok",
        genus: job.genus,
        order: job.order,
        k: None,
        a_periods: None,
        b_periods: None,
        matches_input: None,
        reason: None,
    };
    let strs = |v: &[Scalar]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    let code = match ueda_form_from_pair(inv.rho_f().entries(), inv.rho_g().entries(), &job.surface) {
        Ok(data) => {
            body.k = Some(data.k);
            body.a_periods = Some(strs(&data.a_periods));
            body.b_periods = Some(strs(&data.b_periods));
            let matches = match (&job.omega, job.k) {
                (Some(o), Some(k)) => Some(k == data.k && o.a_periods == data.a_periods && o.b_periods == data.b_periods),
                _ => None,
            };
            body.matches_input = matches;
            if matches == Some(false) {
                body.status = "mismatch";
                EXIT_FAIL
            } else {
                EXIT_PASS
            }
        }
        Err(SurfaceError::PairsCoincide) => {
            body.status = "foliations-coincide";
            body.reason = Some(SurfaceError::PairsCoincide.to_string());
            EXIT_FAIL
        }
        Err(e @ SurfaceError::HolomorphicityViolated(_)) => {
            body.status = "not-holomorphic";
            body.reason = Some(e.to_string());
            EXIT_FAIL
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome::report(code, render(&body)))
}

fn roundtrip_cmd(cli: &Cli, file: &str) -> Result<Outcome, JobError> {
    let job = read_job(file, cli.order)?;
    let k = job.require_k()?;
    let omega = job.require_omega()?;
    let inv = job.invariant.bifoliated();
    let opts = RoundtripOptions {
        seed: cli.seed,
        ..Default::default()
    };
    let mut body = RoundtripReport {
        command: "roundtrip",
        status: "certificate",
        genus: job.genus,
        order: job.order,
        k,
        seed: cli.seed,
        extracted: Vec::new(),
        certificate: None,
        entry: None,
        degree: None,
        decision: None,
        reason: None,
    };
    let verdict = match roundtrip(&inv, k, omega, &job.surface, &opts) {
        Ok(v) => v,
        Err(BuilderError::RealizabilityFailed(kinds)) => {
            body.status = "not-realizable";
            body.reason = Some(format!(
                "failing checks: {}",
                kinds.iter().map(|k| k.numeral()).collect::<Vec<_>>().join(", ")
            ));
            return Ok(Outcome::report(EXIT_FAIL, render(&body)));
        }
        Err(BuilderError::Invariant(e)) => return Err(e.into()),
        Err(e) => return Err(JobError::Invalid(e.to_string())),
    };
    let rebuilt = rebuild(&inv, k, &opts).map_err(|e| JobError::Invalid(e.to_string()))?;
    body.extracted = rebuilt.transports().entries().iter().map(jet_strings).collect();
    let code = match verdict {
        RoundtripVerdict::Certificate(psi) => {
            body.certificate = Some(jet_strings(&psi));
            EXIT_PASS
        }
        RoundtripVerdict::Mismatch {
            label,
            degree,
            decision,
            ..
        } => {
            body.status = "mismatch";
            body.entry = Some(label);
            body.degree = degree;
            body.decision = Some(DecisionRecord::new(
                EquivalenceMode::UpToScale.name(),
                &decision,
                &inv.labels(),
            ));
            EXIT_FAIL
        }
    };
    Ok(Outcome::report(code, render(&body)))
}

fn relation(cli: &Cli, file: &str) -> Result<Outcome, JobError> {
    let job = read_job(file, cli.order)?;
    let inv = job.invariant.bifoliated();
    let mut relations = Vec::new();
    for (name, rho) in [("rho_F", inv.rho_f()), ("rho_G", inv.rho_g())] {
        let r = check_surface_relation(rho)?;
        relations.push(RelationRecord {
            representation: name.to_string(),
            passed: r.passes(),
            failing_degree: r.failing_degree(),
            residual: jet_strings(&r.residual),
        });
    }
    let passed = relations.iter().all(|r| r.passed);
    let body = RelationReport {
        command: "relation",
        status: if passed { "pass" } else { "fail" },
        genus: job.genus,
        order: job.order,
        relations,
    };
    Ok(Outcome::report(if passed { EXIT_PASS } else { EXIT_FAIL }, render(&body)))
}

// Certificate verification ---------------------------------------------------

fn field<'a>(t: &'a toml::Table, key: &str) -> Option<&'a toml::Value> {
    t.get(key)
}

fn jet_field(v: &toml::Value, order: usize) -> Result<JetDiffeo, JobError> {
    let arr = v
        .as_array()
        .ok_or_else(|| JobError::Invalid("certificate is not a list".into()))?;
    let coeffs = arr
        .iter()
        .map(|x| {
            x.as_str()
                .ok_or_else(|| JobError::Invalid("coefficient is not a string".into()))
                .and_then(|s| s.parse::<Scalar>().map_err(JobError::from))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.len() != order {
        return Err(JobError::Invalid(format!(
            "certificate has {} coefficients, expected {order}",
            coeffs.len()
        )));
    }
    Ok(JetDiffeo::from_coeffs(order, coeffs)?)
}

fn report_order(t: &toml::Table) -> Result<usize, JobError> {
    field(t, "order")
        .and_then(toml::Value::as_integer)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(JobError::Missing("order"))
}

fn item(name: impl Into<String>, ok: bool, why: &str) -> VerifiedItem {
    VerifiedItem {
        certificate: name.into(),
        verified: ok,
        reason: (!ok).then(|| why.to_string()),
    }
}

fn verify(cli: &Cli, report_path: &str) -> Result<Outcome, JobError> {
    let text = std::fs::read_to_string(report_path).map_err(|source| JobError::Io {
        path: report_path.to_string(),
        source,
    })?;
    let table: toml::Table = toml::from_str(&text)?;
    let of = field(&table, "command")
        .and_then(toml::Value::as_str)
        .ok_or(JobError::Missing("command"))?;
    if of != cli.command.name() {
        return Err(JobError::Invalid(format!(
            "report is for `{of}`, not `{}`",
            cli.command.name()
        )));
    }
    let order = report_order(&table)?;
    let mut items = Vec::new();
    match &cli.command {
        Command::Equiv { a, b } => {
            let (ja, jb) = load_pair(cli, a, b)?;
            let (ja, jb) = (truncated(ja, order)?, truncated(jb, order)?);
            let ta = ja.invariant.concatenated();
            let tb = jb.invariant.concatenated();
            for section in ["fixed_form", "up_to_scale"] {
                let Some(cert) = field(&table, section)
                    .and_then(toml::Value::as_table)
                    .and_then(|s| s.get("certificate"))
                else {
                    continue;
                };
                let psi = jet_field(cert, order)?;
                let mut ok = ta.conjugate_by(&psi) == tb;
                if section == "fixed_form" {
                    let k = match &ja.invariant {
                        Invariant::Bifoliated(x) => x.ueda_index()?,
                        Invariant::Neighborhood(x) => x.ueda_index()?,
                    };
                    ok &= psi.linear_part().pow(k as i64).is_some_and(|p| p.is_one());
                }
                items.push(item(section, ok, "conjugation does not map the first invariant to the second"));
            }
        }
        Command::Canon { file } => {
            let job = truncated(read_job(file, cli.order)?, order)?;
            let tuple = job.invariant.concatenated();
            let entries = field(&table, "entries").and_then(toml::Value::as_array);
            for (f, e) in tuple.entries().iter().zip(entries.into_iter().flatten()) {
                let Some(e) = e.as_table() else { continue };
                let (Some(c), Some(n), Some(k)) = (
                    e.get("conjugator"),
                    e.get("normal"),
                    e.get("k").and_then(toml::Value::as_integer),
                ) else {
                    continue;
                };
                let psi = jet_field(c, order)?;
                let normal = jet_field(n, order)?;
                let k = k as usize;
                let shape = (2..=order).all(|d| d == k + 1 || d == 2 * k + 1 || normal.coeff(d).is_zero());
                let ok = shape && psi.is_tangent_to_identity() && f.conjugate_by(&psi) == normal;
                let label = e.get("label").and_then(toml::Value::as_str).unwrap_or("entry");
                items.push(item(label, ok, "conjugator does not produce the printed normal form"));
            }
            if let Some(nz) = field(&table, "normalized").and_then(toml::Value::as_table) {
                let psi = jet_field(nz.get("conjugator").ok_or(JobError::Missing("conjugator"))?, order)?;
                let printed = nz
                    .get("entries")
                    .and_then(toml::Value::as_array)
                    .ok_or(JobError::Missing("entries"))?
                    .iter()
                    .map(|v| jet_field(v, order))
                    .collect::<Result<Vec<_>, _>>()?;
                let ok = DiffeoTuple::new(printed).is_ok_and(|p| tuple.conjugate_by(&psi) == p);
                items.push(item("normalized", ok, "conjugated tuple differs from the printed one"));
            }
        }
        Command::Roundtrip { file } => {
            let job = truncated(read_job(file, cli.order)?, order)?;
            if let Some(cert) = field(&table, "certificate") {
                let psi = jet_field(cert, order)?;
                let k = job.require_k()?;
                let seed = field(&table, "seed")
                    .and_then(toml::Value::as_integer)
                    .map_or(cli.seed, |s| s as u64);
                let inv = job.invariant.bifoliated();
                let opts = RoundtripOptions {
                    seed,
                    ..Default::default()
                };
                let rebuilt = rebuild(&inv, k, &opts).map_err(|e| JobError::Invalid(e.to_string()))?;
                let ok = inv.concatenated().conjugate_by(&psi) == rebuilt.concatenated();
                items.push(item("roundtrip", ok, "certificate does not map the input to the rebuilt invariant"));
            }
        }
        _ => {}
    }
    let verified = !items.is_empty() && items.iter().all(|i| i.verified);
    let body = VerifyReport {
        command: "verify",
        of: of.to_string(),
        status: if items.is_empty() {
            "no-certificate"
        } else if verified {
            "verified"
        } else {
            "rejected"
        },
        items,
    };
    Ok(Outcome::report(if verified { EXIT_PASS } else { EXIT_FAIL }, render(&body)))
}

/// Brings a job to the order recorded in a report.
fn truncated(job: Job, order: usize) -> Result<Job, JobError> {
    if order > job.order {
        return Err(JobError::OrderOverride {
            requested: order,
            order: job.order,
        });
    }
    if order == job.order {
        return Ok(job);
    }
    let inv = match &job.invariant {
        Invariant::Bifoliated(b) => Invariant::Bifoliated(b.truncate(order)),
        Invariant::Neighborhood(n) => Invariant::Neighborhood(nbhd_core::invariant::NeighborhoodInvariant::from_concatenated(
            job.genus,
            &n.concatenated().truncate(order),
        )?),
    };
    Ok(Job {
        order,
        invariant: inv,
        ..job
    })
}
