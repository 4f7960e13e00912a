//! Run configuration files and their resolution against a model.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::bayes::{build_grid_model, posterior, BayesError, DiscreteModel, ModelSpec, Observation, Posterior};
use crate::decisions::{cutoffs_from_loss, CutoffPair, DecisionError, LossSpec};
use crate::fbst::{FbstError, GfbstConfig, Reference};
use crate::lattice::predicate::{Predicate, PredicateError};
use crate::lattice::{enumerate_hypotheses, Hypothesis, LatticeError, ParameterGrid};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Fbst(#[from] FbstError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Inline(ModelSpec),
    Path(PathBuf),
}

/// A single cutoff or a sweep over several.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Cutoffs {
    One(f64),
    Sweep(Vec<f64>),
}

impl Cutoffs {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Cutoffs::One(c) => vec![*c],
            Cutoffs::Sweep(cs) => cs.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TestSpec {
    Cutoff {
        a: Option<f64>,
        b: Option<f64>,
        c1: Option<f64>,
        c2: Option<f64>,
    },
    Fbst {
        c: Cutoffs,
        #[serde(default)]
        tie_tolerance: f64,
        #[serde(default)]
        reference: Reference,
    },
    Gfbst {
        c: Cutoffs,
        #[serde(default)]
        tie_tolerance: f64,
        #[serde(default)]
        reference: Reference,
    },
    Region {
        region: HypothesisSpec,
    },
}

/// An explicit list of point ids or a predicate over coordinates.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum HypothesisSpec {
    Ids(Vec<String>),
    Predicate(String),
}

impl HypothesisSpec {
    pub fn resolve(&self, grid: &ParameterGrid) -> Result<Hypothesis, ConfigError> {
        match self {
            HypothesisSpec::Ids(ids) => Ok(grid.hypothesis(ids)?),
            HypothesisSpec::Predicate(src) => Ok(Predicate::parse(src)?.select(grid)?),
        }
    }

    pub fn label(&self, grid: &ParameterGrid, h: &Hypothesis) -> String {
        match self {
            HypothesisSpec::Ids(_) => grid.describe(h),
            HypothesisSpec::Predicate(src) => src.clone(),
        }
    }
}

/// The hypotheses to evaluate: a list, or `"all"` for every subset.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum HypothesisList {
    List(Vec<HypothesisSpec>),
    Keyword(String),
}

impl Default for HypothesisList {
    fn default() -> Self {
        HypothesisList::List(Vec::new())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSource,
    #[serde(default)]
    pub observation: Option<Observation>,
    #[serde(default)]
    pub test: Option<TestSpec>,
    #[serde(default)]
    pub hypotheses: HypothesisList,
    #[serde(default)]
    pub output: Option<OutputFormat>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Command-line values that replace parts of the config's test spec.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TestOverrides {
    pub loss: Option<(f64, f64)>,
    pub cuts: Option<(f64, f64)>,
    pub cutoff_c: Vec<f64>,
    pub tie_tolerance: Option<f64>,
    pub reference: Option<Reference>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Applies command-line overrides to the test spec.
    pub fn apply(&mut self, o: &TestOverrides) -> Result<(), ConfigError> {
        if let Some((a, b)) = o.loss {
            self.test = Some(TestSpec::Cutoff { a: Some(a), b: Some(b), c1: None, c2: None });
        }
        if let Some((c1, c2)) = o.cuts {
            self.test = Some(TestSpec::Cutoff { a: None, b: None, c1: Some(c1), c2: Some(c2) });
        }
        if !o.cutoff_c.is_empty() {
            let sweep =
                if o.cutoff_c.len() == 1 { Cutoffs::One(o.cutoff_c[0]) } else { Cutoffs::Sweep(o.cutoff_c.clone()) };
            match &mut self.test {
                Some(TestSpec::Fbst { c, .. } | TestSpec::Gfbst { c, .. }) => *c = sweep,
                Some(_) => return Err(ConfigError::Invalid("--cutoff-c applies to fbst and gfbst tests only".into())),
                None => {
                    self.test = Some(TestSpec::Gfbst { c: sweep, tie_tolerance: 0.0, reference: Reference::Uniform })
                }
            }
        }
        if o.tie_tolerance.is_some() || o.reference.is_some() {
            match &mut self.test {
                Some(
                    TestSpec::Fbst { tie_tolerance, reference, .. } | TestSpec::Gfbst { tie_tolerance, reference, .. },
                ) => {
                    *tie_tolerance = o.tie_tolerance.unwrap_or(*tie_tolerance);
                    *reference = o.reference.unwrap_or(*reference);
                }
                _ => {
                    return Err(ConfigError::Invalid(
                        "--tie-tolerance and --reference apply to fbst and gfbst tests only".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResolvedTest {
    Cutoff { cuts: CutoffPair, loss: Option<LossSpec> },
    Evidence { generalized: bool, configs: Vec<GfbstConfig>, tie_tolerance: f64, reference: Reference },
    Region(Hypothesis),
}

#[derive(Clone, Debug)]
pub struct ResolvedHypothesis {
    pub label: String,
    pub hypothesis: Hypothesis,
}

/// A config with every name resolved against the model grid.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub model: DiscreteModel,
    pub posterior: Option<Posterior>,
    pub test: ResolvedTest,
    pub hypotheses: Vec<ResolvedHypothesis>,
    pub seed: u64,
}

impl Resolved {
    pub fn grid(&self) -> &ParameterGrid {
        self.model.grid()
    }

    pub fn require_posterior(&self) -> Result<&Posterior, ConfigError> {
        self.posterior.as_ref().ok_or_else(|| ConfigError::Invalid("this test needs an observation".into()))
    }
}

fn load_model(source: &ModelSource, base: Option<&Path>) -> Result<DiscreteModel, ConfigError> {
    let spec = match source {
        ModelSource::Inline(spec) => spec.clone(),
        ModelSource::Path(path) => {
            let full = match base {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            let text =
                std::fs::read_to_string(&full).map_err(|source| ConfigError::Io { path: full.clone(), source })?;
            serde_json::from_str(&text)?
        }
    };
    Ok(build_grid_model(&spec)?)
}

fn resolve_test(spec: &TestSpec, grid: &ParameterGrid) -> Result<ResolvedTest, ConfigError> {
    match spec {
        TestSpec::Cutoff { a, b, c1, c2 } => match (a, b, c1, c2) {
            (Some(a), Some(b), None, None) => {
                let loss = LossSpec::new(*a, *b)?;
                Ok(ResolvedTest::Cutoff { cuts: cutoffs_from_loss(&loss), loss: Some(loss) })
            }
            (None, None, Some(c1), Some(c2)) => {
                Ok(ResolvedTest::Cutoff { cuts: CutoffPair::new(*c1, *c2)?, loss: None })
            }
            _ => Err(ConfigError::Invalid("cutoff test needs either a and b, or c1 and c2".into())),
        },
        TestSpec::Fbst { c, tie_tolerance, reference } | TestSpec::Gfbst { c, tie_tolerance, reference } => {
            let values = c.values();
            if values.is_empty() {
                return Err(ConfigError::Invalid("empty cutoff sweep".into()));
            }
            let configs = values.into_iter().map(GfbstConfig::new).collect::<Result<Vec<_>, _>>()?;
            if !tie_tolerance.is_finite() || *tie_tolerance < 0.0 {
                return Err(FbstError::InvalidTolerance(*tie_tolerance).into());
            }
            Ok(ResolvedTest::Evidence {
                generalized: matches!(spec, TestSpec::Gfbst { .. }),
                configs,
                tie_tolerance: *tie_tolerance,
                reference: *reference,
            })
        }
        TestSpec::Region { region } => {
            let s = region.resolve(grid)?;
            if s.is_empty() {
                return Err(LatticeError::EmptyRegion.into());
            }
            Ok(ResolvedTest::Region(s))
        }
    }
}

fn resolve_hypotheses(list: &HypothesisList, grid: &ParameterGrid) -> Result<Vec<ResolvedHypothesis>, ConfigError> {
    match list {
        HypothesisList::Keyword(k) if k == "all" => Ok(enumerate_hypotheses(grid)?
            .map(|h| ResolvedHypothesis { label: grid.describe(&h), hypothesis: h })
            .collect()),
        HypothesisList::Keyword(k) => {
            Err(ConfigError::Invalid(format!("unknown hypothesis keyword {k:?}; use a list or \"all\"")))
        }
        HypothesisList::List(specs) => specs
            .iter()
            .map(|spec| {
                let h = spec.resolve(grid)?;
                Ok(ResolvedHypothesis { label: spec.label(grid, &h), hypothesis: h })
            })
            .collect(),
    }
}

/// Loads the model, computes the posterior and resolves names.
/// `base` is the directory relative model paths are taken from.
pub fn resolve(config: &RunConfig, base: Option<&Path>, seed: Option<u64>) -> Result<Resolved, ConfigError> {
    let model = load_model(&config.model, base)?;
    let spec = config.test.as_ref().ok_or_else(|| ConfigError::Invalid("config has no test spec".into()))?;
    let test = resolve_test(spec, model.grid())?;
    let posterior = match &config.observation {
        Some(x) => Some(posterior(&model, x)?),
        None => None,
    };
    if !matches!(test, ResolvedTest::Region(_)) && posterior.is_none() {
        return Err(ConfigError::Invalid("cutoff, fbst and gfbst tests need an observation".into()));
    }
    let hypotheses = resolve_hypotheses(&config.hypotheses, model.grid())?;
    Ok(Resolved { model, posterior, test, hypotheses, seed: seed.or(config.seed).unwrap_or(0) })
}
