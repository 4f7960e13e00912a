//! Agnostic (three-valued) hypothesis tests over finite parameter spaces.
//!
//! A test assigns every hypothesis one of three verdicts: accept, remain
//! agnostic, or reject. The crate provides
//!
//! - the six credal modalities and the hexagon of oppositions relating them ([`modality`]),
//! - finite parameter grids, hypotheses as subsets and test representations ([`lattice`]),
//! - an exhaustive/sampled checker for logical consistency ([`consistency`]),
//! - discrete Bayesian updating ([`bayes`]),
//! - loss-based posterior cutoff tests ([`decisions`]),
//! - e-values, FBST and GFBST ([`fbst`]),
//! - the command-line front end and hexagon renderers ([`cli`]).

pub mod bayes;
pub mod cli;
pub mod consistency;
pub mod decisions;
pub mod fbst;
pub mod lattice;
pub mod modality;

pub use bayes::{DiscreteModel, Observation, Posterior};
pub use consistency::{classify, CheckOptions, ConsistencyReport};
pub use decisions::{CutoffPair, LossSpec};
pub use fbst::{GfbstConfig, SurpriseProfile};
pub use lattice::{AgnosticTest, Hypothesis, ParameterGrid};
pub use modality::{ModalVerdict, Modality};
