//! Report records. Reports are TOML documents preceded by a version header.

use serde::Serialize;

use nbhd_core::conjugacy::{Decision, Undecided};
use nbhd_core::invariant::CheckResult;
use nbhd_core::JetDiffeo;

use crate::job::full_coeffs;

pub const HEADER: &str = "# nbhd-report v1";

pub fn render<T: Serialize>(body: &T) -> String {
    let text = toml::to_string(body).expect("reports serialize");
    format!("{HEADER}\n{text}")
}

#[derive(Serialize)]
pub struct Failure {
    pub subject: String,
    pub degree: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub name: String,
    pub statement: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
}

impl CheckRecord {
    pub fn from_result(r: &CheckResult, statement: &str) -> Self {
        CheckRecord {
            id: r.kind.numeral().to_string(),
            name: r.kind.name().to_string(),
            statement: statement.to_string(),
            passed: r.passed(),
            failures: r
                .failures
                .iter()
                .map(|f| Failure {
                    subject: f.subject.clone(),
                    degree: f.degree,
                    expected: f.expected.to_string(),
                    found: f.found.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub status: &'static str,
    pub genus: usize,
    pub order: usize,
    pub k: usize,
    pub checks: Vec<CheckRecord>,
}

#[derive(Serialize)]
pub struct BranchRecord {
    pub linear_part: String,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    pub kind: String,
    pub free_parameters: usize,
}

#[derive(Serialize, Default)]
pub struct DecisionRecord {
    pub mode: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_part: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl DecisionRecord {
    pub fn new(mode: &str, d: &Decision, labels: &[String]) -> Self {
        let label = |e: Option<usize>| e.map(|i| labels[i].clone());
        let mut r = DecisionRecord {
            mode: mode.to_string(),
            ..Default::default()
        };
        match d {
            Decision::Certificate(psi) => {
                r.verdict = "certificate".into();
                r.linear_part = Some(psi.linear_part().to_string());
                r.certificate = Some(full_coeffs(psi));
            }
            Decision::Obstruction(o) => {
                r.verdict = "obstruction".into();
                r.order = Some(o.order);
                r.entry = label(o.entry);
                r.kind = Some(o.kind.name().into());
                r.branches = o
                    .branches
                    .iter()
                    .map(|b| BranchRecord {
                        linear_part: b.linear_part.to_string(),
                        order: b.order,
                        entry: label(b.entry),
                        kind: b.kind.name().into(),
                        free_parameters: b.free_parameters,
                    })
                    .collect();
            }
            Decision::Undecided(Undecided::RootNotInField { degree, value }) => {
                r.verdict = "undecided".into();
                r.reason = Some(format!("s^{degree} = {value} has no solution in Q(i)"));
            }
            Decision::Undecided(Undecided::AmbiguousCentralizer { linear_part, candidates }) => {
                r.verdict = "undecided".into();
                r.linear_part = Some(linear_part.to_string());
                r.reason = Some(format!("{candidates} candidate centralizer parameters remain"));
            }
        }
        r
    }
}

#[derive(Serialize)]
pub struct EquivReport {
    pub command: &'static str,
    pub status: &'static str,
    pub genus: usize,
    pub order: usize,
    pub kind: &'static str,
    pub fixed_form: DecisionRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub up_to_scale: Option<DecisionRecord>,
}

#[derive(Serialize)]
pub struct CanonEntry {
    pub label: String,
    pub identity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct Normalized {
    pub driver: String,
    pub conjugator: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct CanonReport {
    pub command: &'static str,
    pub status: &'static str,
    pub genus: usize,
    pub order: usize,
    pub entries: Vec<CanonEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<Normalized>,
}

#[derive(Serialize)]
pub struct UedaReport {
    pub command: &'static str,
    pub status: &'static str,
    pub genus: usize,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_periods: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_periods: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_input: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Serialize)]
pub struct RoundtripReport {
    pub command: &'static str,
    pub status: &'static str,
    pub genus: usize,
    pub order: usize,
    pub k: usize,
    pub seed: u64,
    pub extracted: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<DecisionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Serialize)]
pub struct RelationRecord {
    pub representation: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_degree: Option<usize>,
    pub residual: Vec<String>,
}

#[derive(Serialize)]
pub struct RelationReport {
    pub command: &'static str,
    pub status: &'static str,
    pub genus: usize,
    pub order: usize,
    pub relations: Vec<RelationRecord>,
}

#[derive(Serialize)]
pub struct VerifiedItem {
    pub certificate: String,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub of: String,
    pub status: &'static str,
    pub items: Vec<VerifiedItem>,
}

pub fn jet_strings(f: &JetDiffeo) -> Vec<String> {
    full_coeffs(f)
}
