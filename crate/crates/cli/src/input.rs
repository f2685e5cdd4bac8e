//! Input documents and their resolution into parameter tuples.

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use ssys_core::scenarios::{self, ScenarioArgs};
use ssys_core::{
    find_positive_equilibrium, to_exponential, EquilibriumSet, ExpParams, IntegratorConfig, PositiveEquilibrium,
    SSystemSpec, TimeScale,
};

use crate::UsageError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTable {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

#[derive(Debug, Clone, Deserialize)]
pub struct SSystemTable {
    #[serde(flatten)]
    pub spec: SSystemSpec,
    /// Positive equilibrium to expand around; solved for when absent.
    pub equilibrium: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScenarioTable {
    pub name: String,
    #[serde(flatten)]
    pub args: ScenarioArgs,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub horizon: Option<f64>,
    pub max_step: Option<f64>,
    pub max_steps: Option<usize>,
    pub time_scale: Option<TimeScale>,
    pub sample_interval: Option<f64>,
    pub escape_radius: Option<f64>,
}

impl IntegratorOverrides {
    /// Later values win.
    pub fn merge(self, other: IntegratorOverrides) -> IntegratorOverrides {
        IntegratorOverrides {
            rel_tol: other.rel_tol.or(self.rel_tol),
            abs_tol: other.abs_tol.or(self.abs_tol),
            horizon: other.horizon.or(self.horizon),
            max_step: other.max_step.or(self.max_step),
            max_steps: other.max_steps.or(self.max_steps),
            time_scale: other.time_scale.or(self.time_scale),
            sample_interval: other.sample_interval.or(self.sample_interval),
            escape_radius: other.escape_radius.or(self.escape_radius),
        }
    }

    pub fn apply(&self, mut cfg: IntegratorConfig) -> IntegratorConfig {
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.max_step {
            cfg.max_step = v;
        }
        if let Some(v) = self.max_steps {
            cfg.max_steps = v;
        }
        if let Some(v) = self.time_scale {
            cfg.time_scale = v;
        }
        if let Some(v) = self.sample_interval {
            cfg.sample_interval = Some(v);
            cfg.dense_output = true;
        }
        if let Some(v) = self.escape_radius {
            cfg.escape_radius = Some(v);
        }
        cfg
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    exp_params: Option<ExpTable>,
    s_system: Option<SSystemTable>,
    scenario: Option<ScenarioTable>,
    #[serde(default)]
    integrator: IntegratorOverrides,
}

/// The system under study, before it is reduced to exponential form.
#[derive(Debug, Clone)]
pub enum Model {
    Exp(ExpParams),
    SSystem(SSystemSpec, Option<[f64; 2]>),
    Scenario(String, ScenarioArgs),
}

#[derive(Debug, Clone)]
pub struct Document {
    pub model: Model,
    pub integrator: IntegratorOverrides,
}

/// Outcome of reducing a model to exponential form.
pub enum Reduced {
    Params(ExpParams),
    /// The S-system has no positive equilibrium.
    NoEquilibrium,
}

impl Model {
    pub fn describe(&self) -> String {
        match self {
            Model::Exp(_) => "exp_params".into(),
            Model::SSystem(..) => "s_system".into(),
            Model::Scenario(name, _) => format!("scenario:{name}"),
        }
    }

    pub fn reduce(&self) -> Result<Reduced> {
        match self {
            Model::Exp(p) => Ok(Reduced::Params(p.clone())),
            Model::Scenario(name, args) => Ok(Reduced::Params(
                scenarios::named(name, args)?.params,
            )),
            Model::SSystem(spec, eq) => {
                spec.validate()?;
                let eq = match eq {
                    Some([x1, x2]) => PositiveEquilibrium::new(*x1, *x2)?,
                    None => match find_positive_equilibrium(spec) {
                        EquilibriumSet::None => return Ok(Reduced::NoEquilibrium),
                        EquilibriumSet::Unique(e) | EquilibriumSet::Line(e) => e,
                    },
                };
                Ok(Reduced::Params(to_exponential(spec, &eq)?))
            }
        }
    }

    pub fn params(&self) -> Result<ExpParams> {
        match self.reduce()? {
            Reduced::Params(p) => Ok(p),
            Reduced::NoEquilibrium => Err(ssys_core::Error::Degenerate("the S-system has no positive equilibrium".into()).into()),
        }
    }

    /// Set one named coordinate, for sweeps.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match self {
            Model::Exp(p) => {
                let (row, idx) = match name.as_bytes() {
                    [b'a', d @ b'1'..=b'4'] => (&mut p.a, (d - b'1') as usize),
                    [b'b', d @ b'1'..=b'4'] => (&mut p.b, (d - b'1') as usize),
                    _ => bail!(UsageError(format!("unknown exp_params coordinate {name:?} (use a1..a4, b1..b4)"))),
                };
                row[idx] = value;
            }
            Model::Scenario(_, args) => {
                let slot = match name {
                    "k" => &mut args.k,
                    "gamma" => &mut args.gamma,
                    "alpha" => &mut args.alpha,
                    "beta" => &mut args.beta,
                    "eps" => &mut args.eps,
                    "mu" => &mut args.mu,
                    _ => bail!(UsageError(format!("unknown scenario argument {name:?}"))),
                };
                *slot = Some(value);
            }
            Model::SSystem(spec, _) => {
                let slot = match name {
                    "alpha1" => &mut spec.alpha1,
                    "alpha2" => &mut spec.alpha2,
                    "beta1" => &mut spec.beta1,
                    "beta2" => &mut spec.beta2,
                    "g11" => &mut spec.g11,
                    "g12" => &mut spec.g12,
                    "g21" => &mut spec.g21,
                    "g22" => &mut spec.g22,
                    "h11" => &mut spec.h11,
                    "h12" => &mut spec.h12,
                    "h21" => &mut spec.h21,
                    "h22" => &mut spec.h22,
                    _ => bail!(UsageError(format!("unknown s_system field {name:?}"))),
                };
                *slot = value;
            }
        }
        Ok(())
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| UsageError(format!("invalid input document: {e}")))?;
    let mut forms = Vec::new();
    if let Some(t) = raw.exp_params {
        forms.push(Model::Exp(ExpParams::from_arrays(t.a, t.b)));
    }
    if let Some(t) = raw.s_system {
        forms.push(Model::SSystem(t.spec, t.equilibrium));
    }
    if let Some(t) = raw.scenario {
        forms.push(Model::Scenario(t.name, t.args));
    }
    if forms.len() != 1 {
        bail!(UsageError(format!(
            "the input document needs exactly one of [exp_params], [s_system], [scenario] (found {})",
            forms.len()
        )));
    }
    Ok(Document {
        model: forms.pop().unwrap(),
        integrator: raw.integrator,
    })
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?
    };
    parse_document(&text)
}
