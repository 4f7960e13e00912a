//! Loss-based posterior cutoff tests.
//!
//! With loss 0 for a correct decision, 1 for accepting a false
//! hypothesis, `a` for rejecting a true one and `b` for remaining
//! agnostic, the Bayes action accepts when p(H|x) > c1, rejects when
//! p(H|x) < c2 and is agnostic otherwise, where
//! c1 = max(1/(1+a), 1−b) and c2 = min(1/(1+a), b/a).

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bayes::{BayesError, Posterior};
use crate::lattice::{AgnosticTest, Hypothesis, ParameterGrid};
use crate::modality::ModalVerdict;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error("loss requires a > 0 and 0 < b < min(a, 1); got a = {a}, b = {b}")]
    InvalidLoss { a: f64, b: f64 },
    #[error("cutoffs require 0 <= c2 <= c1 <= 1, c1 > 0 and c2 < 1; got c1 = {c1}, c2 = {c2}")]
    InvalidCutoffs { c1: f64, c2: f64 },
    #[error("a witness needs c2 > 0")]
    ZeroLowerCutoff,
    #[error("a witness needs c1 < 1 so that the full space is accepted")]
    UnitUpperCutoff,
    #[error("{n} parts give each part probability 1/{n}, which is not below c2 = {c2}")]
    TooFewParts { n: usize, c2: f64 },
    #[error(transparent)]
    Bayes(#[from] BayesError),
}

/// Losses `a` (rejecting a true hypothesis) and `b` (remaining agnostic).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LossSpec {
    a: f64,
    b: f64,
}

impl LossSpec {
    pub fn new(a: f64, b: f64) -> Result<Self, DecisionError> {
        let valid = a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 && b < a.min(1.0);
        if !valid {
            return Err(DecisionError::InvalidLoss { a, b });
        }
        Ok(LossSpec { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Threshold of the two-action (accept/reject) problem.
    pub fn two_action_cutoff(&self) -> f64 {
        1.0 / (1.0 + self.a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffPair {
    c1: f64,
    c2: f64,
}

impl CutoffPair {
    pub fn new(c1: f64, c2: f64) -> Result<Self, DecisionError> {
        let valid = c1.is_finite() && c2.is_finite() && c1 > 0.0 && c1 <= 1.0 && (0.0..1.0).contains(&c2) && c2 <= c1;
        if !valid {
            return Err(DecisionError::InvalidCutoffs { c1, c2 });
        }
        Ok(CutoffPair { c1, c2 })
    }

    /// c1 = 1 − c, c2 = c.
    pub fn symmetric(c: f64) -> Result<Self, DecisionError> {
        Self::new(1.0 - c, c)
    }

    pub fn upper(&self) -> f64 {
        self.c1
    }

    pub fn lower(&self) -> f64 {
        self.c2
    }

    /// Verdict for a hypothesis with posterior probability `p`.
    pub fn verdict(&self, p: f64) -> ModalVerdict {
        if p > self.c1 {
            ModalVerdict::Accept
        } else if p < self.c2 {
            ModalVerdict::Reject
        } else {
            ModalVerdict::Agnostic
        }
    }
}

pub fn cutoffs_from_loss(loss: &LossSpec) -> CutoffPair {
    let two_action = loss.two_action_cutoff();
    let c1 = two_action.max(1.0 - loss.b);
    let c2 = two_action.min(loss.b / loss.a);
    CutoffPair::new(c1, c2).expect("loss invariants imply 0 < c2 <= c1 < 1")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedLosses {
    pub accept: f64,
    pub agnostic: f64,
    pub reject: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub verdict: ModalVerdict,
    pub expected_losses: ExpectedLosses,
}

pub fn expected_losses(p: f64, loss: &LossSpec) -> ExpectedLosses {
    ExpectedLosses { accept: 1.0 - p, agnostic: loss.b, reject: loss.a * p }
}

/// Direct minimisation of expected loss. Ties prefer agnostic, then
/// accept, then reject.
pub fn bayes_optimal_decision(p: f64, loss: &LossSpec) -> Decision {
    let losses = expected_losses(p, loss);
    let mut best = (ModalVerdict::Agnostic, losses.agnostic);
    for (verdict, value) in [(ModalVerdict::Accept, losses.accept), (ModalVerdict::Reject, losses.reject)] {
        if value < best.1 {
            best = (verdict, value);
        }
    }
    Decision { verdict: best.0, expected_losses: losses }
}

/// Accept/reject only: the agnostic action is unavailable. Ties prefer accept.
pub fn two_action_decision(p: f64, loss: &LossSpec) -> ModalVerdict {
    let losses = expected_losses(p, loss);
    if losses.reject < losses.accept {
        ModalVerdict::Reject
    } else {
        ModalVerdict::Accept
    }
}

pub fn cutoff_test(posterior: &Posterior, h: &Hypothesis, cuts: &CutoffPair) -> ModalVerdict {
    cuts.verdict(posterior.prob(h))
}

/// The cutoff test as a rule over every hypothesis of the posterior's grid.
pub fn build_cutoff_test(posterior: &Posterior, cuts: CutoffPair) -> AgnosticTest {
    let masses: Arc<[f64]> = posterior.masses().into();
    let description = format!("posterior cutoff test (c1 = {}, c2 = {})", cuts.c1, cuts.c2);
    AgnosticTest::rule(posterior.shared_grid(), description, move |h| {
        cuts.verdict(h.indices().fold(0.0, |acc, i| acc + masses[i]))
    })
}

/// A posterior and a partition of Θ on which the cutoff test rejects every
/// part but not their union.
#[derive(Clone, Debug)]
pub struct ConsonanceWitness {
    pub posterior: Posterior,
    pub partition: Vec<Hypothesis>,
    pub cuts: CutoffPair,
}

/// Uniform posterior on `n` points with the singleton partition. Needs
/// 1/n < c2 and c1 < 1.
pub fn consonance_failure_witness(cuts: CutoffPair, n: usize) -> Result<ConsonanceWitness, DecisionError> {
    if cuts.c2 <= 0.0 {
        return Err(DecisionError::ZeroLowerCutoff);
    }
    if cuts.c1 >= 1.0 {
        return Err(DecisionError::UnitUpperCutoff);
    }
    let part = 1.0 / n as f64;
    if n == 0 || part >= cuts.c2 {
        return Err(DecisionError::TooFewParts { n, c2: cuts.c2 });
    }
    let grid = ParameterGrid::uniform(n).map_err(BayesError::from)?;
    let posterior = Posterior::from_masses(grid, vec![part; n])?;
    let partition = (0..n).map(|i| Hypothesis::singleton(n, i).expect("index in range")).collect();
    Ok(ConsonanceWitness { posterior, partition, cuts })
}
