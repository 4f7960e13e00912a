//! Discrete Bayesian models and posterior probabilities of hypotheses.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{GridPoint, Hypothesis, LatticeError, ParameterGrid};

pub const MASS_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BayesError {
    #[error("every grid point with prior mass has zero likelihood for observation {0}")]
    ZeroNormalizer(String),
    #[error("observation `{0}` is not in the likelihood table")]
    UnknownObservation(String),
    #[error("observation {observation} does not fit a {family} model")]
    ObservationKind { observation: String, family: &'static str },
    #[error("likelihood at point {index} is {value}; must be finite and >= 0")]
    InvalidLikelihood { index: usize, value: f64 },
    #[error("likelihood row `{key}` has {found} values for a grid of {expected} points")]
    LikelihoodLength { key: String, expected: usize, found: usize },
    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),
    #[error("posterior mass at point {index} is {value}")]
    InvalidMass { index: usize, value: f64 },
    #[error("posterior masses sum to {0}")]
    MassSum(f64),
    #[error("posterior puts mass on point {0} whose prior mass is zero")]
    MassWithoutPrior(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// An observed data value. The engine treats it as an opaque key except
/// for the built-in grid families, which read success counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observation {
    Key(String),
    Counts { trials: u64, successes: u64 },
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Key(k) => write!(f, "`{k}`"),
            Observation::Counts { trials, successes } => write!(f, "{successes}/{trials}"),
        }
    }
}

pub type LikelihoodFn = dyn Fn(usize, &Observation) -> Option<f64> + Send + Sync;

#[derive(Clone)]
enum Likelihood {
    Table(BTreeMap<String, Vec<f64>>),
    /// i.i.d. Bernoulli sequence with the given counts (no binomial coefficient).
    Bernoulli,
    Binomial,
    Custom(Arc<LikelihoodFn>),
}

/// Parameter grid plus a likelihood keyed by observation.
#[derive(Clone)]
pub struct DiscreteModel {
    grid: Arc<ParameterGrid>,
    likelihood: Likelihood,
}

impl fmt::Debug for DiscreteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match &self.likelihood {
            Likelihood::Table(t) => format!("tabular ({} observations)", t.len()),
            Likelihood::Bernoulli => "bernoulli-grid".into(),
            Likelihood::Binomial => "binomial-grid".into(),
            Likelihood::Custom(_) => "custom".into(),
        };
        f.debug_struct("DiscreteModel").field("points", &self.grid.len()).field("family", &family).finish()
    }
}

/// JSON description of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelSpec {
    Tabular {
        grid: ParameterGrid,
        likelihood: BTreeMap<String, Vec<f64>>,
    },
    BernoulliGrid {
        points: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
    },
    BinomialGrid {
        points: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
    },
}

fn equispaced_grid(points: usize, prior: Option<&[f64]>) -> Result<ParameterGrid, BayesError> {
    if points < 2 {
        return Err(BayesError::InvalidParameters(format!("grid resolution must be at least 2, got {points}")));
    }
    let uniform = vec![1.0 / points as f64; points];
    let prior = prior.unwrap_or(&uniform);
    if prior.len() != points {
        return Err(BayesError::InvalidParameters(format!("{} prior masses for {points} grid points", prior.len())));
    }
    let step = (points - 1) as f64;
    let grid = ParameterGrid::new(
        (0..points)
            .map(|i| GridPoint {
                id: format!("t{}", i + 1),
                coord: vec![i as f64 / step],
                prior: prior[i],
                reference: 1.0 / points as f64,
            })
            .collect(),
    )?;
    Ok(grid)
}

pub fn build_grid_model(spec: &ModelSpec) -> Result<DiscreteModel, BayesError> {
    match spec {
        ModelSpec::Tabular { grid, likelihood } => DiscreteModel::tabular(grid.clone(), likelihood.clone()),
        ModelSpec::BernoulliGrid { points, prior } => Ok(DiscreteModel {
            grid: Arc::new(equispaced_grid(*points, prior.as_deref())?),
            likelihood: Likelihood::Bernoulli,
        }),
        ModelSpec::BinomialGrid { points, prior } => Ok(DiscreteModel {
            grid: Arc::new(equispaced_grid(*points, prior.as_deref())?),
            likelihood: Likelihood::Binomial,
        }),
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).fold(0.0, |acc, x| acc + x)
}

fn log_success_likelihood(theta: f64, trials: u64, successes: u64) -> f64 {
    let term = |p: f64, count: u64| if count == 0 { 0.0 } else { count as f64 * p.ln() };
    term(theta, successes) + term(1.0 - theta, trials - successes)
}

impl DiscreteModel {
    pub fn tabular(
        grid: impl Into<Arc<ParameterGrid>>,
        likelihood: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, BayesError> {
        let grid = grid.into();
        for (key, row) in &likelihood {
            if row.len() != grid.len() {
                return Err(BayesError::LikelihoodLength { key: key.clone(), expected: grid.len(), found: row.len() });
            }
            if let Some((index, &value)) = row.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
                return Err(BayesError::InvalidLikelihood { index, value });
            }
        }
        Ok(DiscreteModel { grid, likelihood: Likelihood::Table(likelihood) })
    }

    /// Caller-supplied likelihood. `None` means the observation is not
    /// in the model's sample space.
    pub fn from_fn(
        grid: impl Into<Arc<ParameterGrid>>,
        likelihood: impl Fn(usize, &Observation) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        DiscreteModel { grid: grid.into(), likelihood: Likelihood::Custom(Arc::new(likelihood)) }
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<ParameterGrid> {
        Arc::clone(&self.grid)
    }

    fn counts(&self, x: &Observation, family: &'static str) -> Result<(u64, u64), BayesError> {
        match x {
            Observation::Counts { trials, successes } if successes <= trials => Ok((*trials, *successes)),
            _ => Err(BayesError::ObservationKind { observation: x.to_string(), family }),
        }
    }

    /// Likelihood of every grid point for `x`, possibly rescaled by a
    /// common positive factor.
    fn scaled_likelihoods(&self, x: &Observation) -> Result<Vec<f64>, BayesError> {
        let n = self.grid.len();
        let from_logs = |logs: Vec<f64>| {
            let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == f64::NEG_INFINITY {
                return vec![0.0; logs.len()];
            }
            logs.into_iter().map(|l| (l - max).exp()).collect()
        };
        let values = match &self.likelihood {
            Likelihood::Table(table) => {
                let key = match x {
                    Observation::Key(k) => k.clone(),
                    other => other.to_string(),
                };
                table.get(&key).cloned().ok_or(BayesError::UnknownObservation(key))?
            }
            Likelihood::Bernoulli => {
                let (t, s) = self.counts(x, "bernoulli-grid")?;
                from_logs(self.grid.points().iter().map(|p| log_success_likelihood(p.coord[0], t, s)).collect())
            }
            Likelihood::Binomial => {
                let (t, s) = self.counts(x, "binomial-grid")?;
                let c = ln_choose(t, s);
                from_logs(self.grid.points().iter().map(|p| c + log_success_likelihood(p.coord[0], t, s)).collect())
            }
            Likelihood::Custom(f) => (0..n)
                .map(|i| f(i, x).ok_or_else(|| BayesError::UnknownObservation(x.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(BayesError::InvalidLikelihood { index, value });
        }
        Ok(values)
    }

    /// Likelihood of grid point `index` for `x`, unscaled.
    pub fn likelihood(&self, index: usize, x: &Observation) -> Result<f64, BayesError> {
        let theta = || self.grid.point(index).coord[0];
        match &self.likelihood {
            Likelihood::Bernoulli => {
                let (t, s) = self.counts(x, "bernoulli-grid")?;
                Ok(log_success_likelihood(theta(), t, s).exp())
            }
            Likelihood::Binomial => {
                let (t, s) = self.counts(x, "binomial-grid")?;
                Ok((ln_choose(t, s) + log_success_likelihood(theta(), t, s)).exp())
            }
            _ => Ok(self.scaled_likelihoods(x)?[index]),
        }
    }
}

/// Posterior masses over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior {
    grid: Arc<ParameterGrid>,
    masses: Vec<f64>,
    observation: Option<Observation>,
}

/// Bayes' theorem on the grid: prior times likelihood, normalised.
pub fn posterior(model: &DiscreteModel, x: &Observation) -> Result<Posterior, BayesError> {
    let likelihoods = model.scaled_likelihoods(x)?;
    let weights: Vec<f64> = model.grid.priors().zip(&likelihoods).map(|(p, l)| p * l).collect();
    let normalizer: f64 = weights.iter().sum();
    if !(normalizer > 0.0 && normalizer.is_finite()) {
        return Err(BayesError::ZeroNormalizer(x.to_string()));
    }
    Ok(Posterior {
        grid: model.shared_grid(),
        masses: weights.iter().map(|w| w / normalizer).collect(),
        observation: Some(x.clone()),
    })
}

/// Posterior probability of `h`.
pub fn prob(posterior: &Posterior, h: &Hypothesis) -> f64 {
    posterior.prob(h)
}

impl Posterior {
    /// A posterior given directly by its masses.
    pub fn from_masses(grid: impl Into<Arc<ParameterGrid>>, masses: Vec<f64>) -> Result<Self, BayesError> {
        let grid = grid.into();
        if masses.len() != grid.len() {
            return Err(BayesError::LikelihoodLength {
                key: "masses".into(),
                expected: grid.len(),
                found: masses.len(),
            });
        }
        for (index, (&m, prior)) in masses.iter().zip(grid.priors()).enumerate() {
            if !m.is_finite() || !(0.0..=1.0).contains(&m) {
                return Err(BayesError::InvalidMass { index, value: m });
            }
            if m > 0.0 && prior == 0.0 {
                return Err(BayesError::MassWithoutPrior(index));
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(BayesError::MassSum(sum));
        }
        Ok(Posterior { grid, masses, observation: None })
    }

    /// Convenience: grid `t1..tn` with the masses as uniform-prior posterior.
    pub fn on_uniform_grid(masses: &[f64]) -> Result<Self, BayesError> {
        Self::from_masses(ParameterGrid::uniform(masses.len())?, masses.to_vec())
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<ParameterGrid> {
        Arc::clone(&self.grid)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn observation(&self) -> Option<&Observation> {
        self.observation.as_ref()
    }

    /// Sum of member masses in increasing index order. The fixed order
    /// makes the result monotone under set inclusion.
    pub fn prob(&self, h: &Hypothesis) -> f64 {
        assert_eq!(h.universe_len(), self.masses.len(), "hypothesis over a different grid");
        h.indices().map(|i| self.masses[i]).fold(0.0, |acc, m| acc + m)
    }

    /// The highest-mass point (lowest index on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, &m) in self.masses.iter().enumerate() {
            if m > self.masses[best] {
                best = i;
            }
        }
        best
    }
}
