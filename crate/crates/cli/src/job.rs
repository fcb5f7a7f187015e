//! Job files: TOML with `surface`, `omega` and `tuples` sections.
//!
//! Scalars are strings such as `"3/2"`, `"1-2*i"` or `"i"`; a series is the
//! list of its coefficients from degree 1, zero-padded to `order`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use nbhd_core::invariant::{embed, BifoliatedInvariant, InvariantError, InvariantTuple, NeighborhoodInvariant};
use nbhd_core::jet::JetError;
use nbhd_core::scalar::ParseScalarError;
use nbhd_core::surface::{default_zero_labels, SurfaceError, SurfaceModel, UedaFormData};
use nbhd_core::{DiffeoTuple, JetDiffeo, Scalar};

#[derive(Debug, Error)]
pub enum JobError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid job file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error("{what}: {len} coefficients exceed order {order}")]
    SeriesTooLong { what: String, len: usize, order: usize },
    #[error("--order {requested} exceeds the order {order} of the job")]
    OrderOverride { requested: usize, order: usize },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("unknown tuple kind `{0}` (expected `bifoliated` or `neighborhood`)")]
    UnknownKind(String),
    #[error("unsupported nerve `{0}` (only `polygon`)")]
    UnknownNerve(String),
    #[error("genus {file} in file disagrees with {other}")]
    GenusMismatch { file: usize, other: usize },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub genus: usize,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub surface: SurfaceSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaSection>,
    pub tuples: TuplesSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub tau: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nerve: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSection {
    pub a_periods: Vec<String>,
    pub b_periods: Vec<String>,
    pub rel_periods: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple_zeros: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuplesSection {
    pub kind: String,
    #[serde(rename = "rho_F", default, skip_serializing_if = "Option::is_none")]
    pub rho_f: Option<Vec<Vec<String>>>,
    #[serde(rename = "rho_G", default, skip_serializing_if = "Option::is_none")]
    pub rho_g: Option<Vec<Vec<String>>>,
    #[serde(rename = "phi_F_beta", default, skip_serializing_if = "Option::is_none")]
    pub phi_f_beta: Option<Vec<Vec<String>>>,
    #[serde(rename = "phi_G_alpha", default, skip_serializing_if = "Option::is_none")]
    pub phi_g_alpha: Option<Vec<Vec<String>>>,
    pub transports: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Invariant {
    Bifoliated(BifoliatedInvariant),
    Neighborhood(NeighborhoodInvariant),
}

impl Invariant {
    pub fn kind(&self) -> &'static str {
        match self {
            Invariant::Bifoliated(_) => "bifoliated",
            Invariant::Neighborhood(_) => "neighborhood",
        }
    }

    /// The bifoliated form; neighborhood data is embedded as a canonical pair.
    pub fn bifoliated(&self) -> BifoliatedInvariant {
        match self {
            Invariant::Bifoliated(b) => b.clone(),
            Invariant::Neighborhood(n) => embed(n),
        }
    }

    pub fn concatenated(&self) -> DiffeoTuple {
        match self {
            Invariant::Bifoliated(b) => b.concatenated(),
            Invariant::Neighborhood(n) => n.concatenated(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Invariant::Bifoliated(b) => b.labels(),
            Invariant::Neighborhood(n) => n.labels(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Job {
    pub genus: usize,
    pub order: usize,
    pub k: Option<usize>,
    pub surface: SurfaceModel,
    pub omega: Option<UedaFormData>,
    pub invariant: Invariant,
}

impl Job {
    pub fn require_k(&self) -> Result<usize, JobError> {
        self.k.ok_or(JobError::Missing("k"))
    }

    pub fn require_omega(&self) -> Result<&UedaFormData, JobError> {
        self.omega.as_ref().ok_or(JobError::Missing("omega"))
    }
}

fn scalars(v: &[String]) -> Result<Vec<Scalar>, JobError> {
    v.iter().map(|s| s.parse::<Scalar>().map_err(JobError::from)).collect()
}

fn jet(what: String, coeffs: &[String], file_order: usize, order: usize) -> Result<JetDiffeo, JobError> {
    if coeffs.len() > file_order {
        return Err(JobError::SeriesTooLong {
            what,
            len: coeffs.len(),
            order: file_order,
        });
    }
    let mut c = scalars(coeffs)?;
    c.resize(order.max(c.len()), Scalar::zero());
    c.truncate(order);
    Ok(JetDiffeo::from_coeffs(order, c)?)
}

fn tuple(
    name: &'static str,
    list: Option<&Vec<Vec<String>>>,
    file_order: usize,
    order: usize,
) -> Result<DiffeoTuple, JobError> {
    let list = list.ok_or(JobError::Missing(name))?;
    if list.is_empty() {
        return Err(JobError::Invalid(format!("`{name}` is empty")));
    }
    let jets = list
        .iter()
        .enumerate()
        .map(|(i, c)| jet(format!("{name}[{}]", i + 1), c, file_order, order))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiffeoTuple::new(jets)?)
}

impl JobFile {
    pub fn parse(text: &str) -> Result<JobFile, JobError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("job files serialize")
    }

    /// Validates everything and builds the typed job, optionally truncating to `order`.
    pub fn load(&self, order_override: Option<usize>) -> Result<Job, JobError> {
        let order = match order_override {
            Some(n) if n > self.order => {
                return Err(JobError::OrderOverride {
                    requested: n,
                    order: self.order,
                })
            }
            Some(n) => n,
            None => self.order,
        };
        if order == 0 {
            return Err(JobError::Invalid("order must be positive".into()));
        }
        let g = self.genus;
        if let Some(nerve) = &self.surface.nerve {
            if nerve != "polygon" {
                return Err(JobError::UnknownNerve(nerve.clone()));
            }
        }
        let tau = self
            .surface
            .tau
            .iter()
            .map(|row| scalars(row))
            .collect::<Result<Vec<_>, _>>()?;
        let zeros = self.surface.zeros.clone().unwrap_or_else(|| default_zero_labels(g));
        let surface = SurfaceModel::new(g, tau, zeros)?;
        let omega = match &self.omega {
            None => None,
            Some(o) => Some(UedaFormData {
                k: self.k.unwrap_or(0),
                a_periods: scalars(&o.a_periods)?,
                b_periods: scalars(&o.b_periods)?,
                rel_periods: scalars(&o.rel_periods)?,
                simple_zeros: o.simple_zeros.unwrap_or(true),
            }),
        };
        let t = &self.tuples;
        let fo = self.order;
        let transports = tuple("transports", Some(&t.transports), fo, order)?;
        let invariant = match t.kind.as_str() {
            "bifoliated" => Invariant::Bifoliated(BifoliatedInvariant::new(
                g,
                tuple("rho_F", t.rho_f.as_ref(), fo, order)?,
                tuple("rho_G", t.rho_g.as_ref(), fo, order)?,
                transports,
            )?),
            "neighborhood" => Invariant::Neighborhood(NeighborhoodInvariant::new(
                g,
                tuple("phi_F_beta", t.phi_f_beta.as_ref(), fo, order)?,
                tuple("phi_G_alpha", t.phi_g_alpha.as_ref(), fo, order)?,
                transports,
            )?),
            other => return Err(JobError::UnknownKind(other.to_string())),
        };
        Ok(Job {
            genus: g,
            order,
            k: self.k,
            surface,
            omega,
            invariant,
        })
    }

    /// A job file describing the given data, with trailing zero coefficients dropped.
    pub fn from_parts(
        surface: &SurfaceModel,
        k: Option<usize>,
        omega: Option<&UedaFormData>,
        invariant: &Invariant,
    ) -> JobFile {
        let strs = |v: &[Scalar]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let tup = |t: &DiffeoTuple| Some(t.entries().iter().map(trimmed_coeffs).collect::<Vec<_>>());
        let (kind, rho_f, rho_g, phi_f_beta, phi_g_alpha, transports) = match invariant {
            Invariant::Bifoliated(b) => ("bifoliated", tup(b.rho_f()), tup(b.rho_g()), None, None, b.transports()),
            Invariant::Neighborhood(n) => (
                "neighborhood",
                None,
                None,
                tup(n.phi_f_beta()),
                tup(n.phi_g_alpha()),
                n.transports(),
            ),
        };
        JobFile {
            genus: surface.genus(),
            order: transports.order(),
            k,
            surface: SurfaceSection {
                tau: surface.tau().iter().map(|r| strs(r)).collect(),
                zeros: Some(surface.zeros().to_vec()),
                nerve: None,
            },
            omega: omega.map(|o| OmegaSection {
                a_periods: strs(&o.a_periods),
                b_periods: strs(&o.b_periods),
                rel_periods: strs(&o.rel_periods),
                simple_zeros: None,
            }),
            tuples: TuplesSection {
                kind: kind.to_string(),
                rho_f,
                rho_g,
                phi_f_beta,
                phi_g_alpha,
                transports: tup(transports).expect("present"),
            },
        }
    }
}

/// Every coefficient `c_1..c_N`.
pub fn full_coeffs(f: &JetDiffeo) -> Vec<String> {
    f.coeffs_from_one().iter().map(ToString::to_string).collect()
}

pub fn trimmed_coeffs(f: &JetDiffeo) -> Vec<String> {
    let c = f.coeffs_from_one();
    let len = c.iter().rposition(|x| !x.is_zero()).map_or(1, |i| i + 1);
    c[..len].iter().map(ToString::to_string).collect()
}

pub fn read_job(path: &str, order_override: Option<usize>) -> Result<Job, JobError> {
    let text = std::fs::read_to_string(path).map_err(|source| JobError::Io {
        path: path.to_string(),
        source,
    })?;
    JobFile::parse(&text)?.load(order_override)
}
