//! Surprise functions, tangent sets, e-values, and the FBST/GFBST.
//!
//! The surprise of a point is its posterior mass divided by a reference
//! weight. The tangent set of H holds the points whose surprise strictly
//! exceeds that of every point of H, and ev(H) = 1 − p(T(H)). The GFBST
//! rejects H when ev(H) <= c, accepts when ev(Θ − H) <= c, and is agnostic
//! otherwise; it is the region test of S = {θ : ev({θ}) > c}.
//!
//! "Strictly exceeds" means `s1 > s0 + tie_tolerance`; the default
//! tolerance is zero.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bayes::Posterior;
use crate::consistency::{CheckMode, CheckOptions};
use crate::lattice::{AgnosticTest, Hypothesis, LatticeError, ParameterGrid, Subsets};
use crate::modality::ModalVerdict;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FbstError {
    #[error("cutoff c = {0} must lie in (0, 1)")]
    InvalidCutoff(f64),
    #[error("the probability bridge needs c < 0.5, got {0}")]
    BridgeCutoff(f64),
    #[error("the supremum over an empty hypothesis is undefined")]
    EmptyHypothesis,
    #[error("tie tolerance must be finite and >= 0, got {0}")]
    InvalidTolerance(f64),
    #[error("surprise values must be finite, >= 0, with at least one > 0")]
    InvalidSurprise,
    #[error("implication {0} does not hold")]
    ChainViolation(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Which reference density divides the posterior.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// 1/n on every point.
    #[default]
    Uniform,
    /// The `reference` weight stored with each grid point.
    FromGrid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurpriseProfile {
    grid: Arc<ParameterGrid>,
    values: Vec<f64>,
    tie_tolerance: f64,
}

impl SurpriseProfile {
    pub fn from_values(grid: impl Into<Arc<ParameterGrid>>, values: Vec<f64>) -> Result<Self, FbstError> {
        let grid = grid.into();
        if values.len() != grid.len() {
            return Err(LatticeError::GridMismatch { expected: grid.len(), found: values.len() }.into());
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) || !values.iter().any(|v| *v > 0.0) {
            return Err(FbstError::InvalidSurprise);
        }
        Ok(SurpriseProfile { grid, values, tie_tolerance: 0.0 })
    }

    pub fn with_tie_tolerance(mut self, tolerance: f64) -> Result<Self, FbstError> {
        if !tolerance.is_finite() || tolerance < 0.0 {
            return Err(FbstError::InvalidTolerance(tolerance));
        }
        self.tie_tolerance = tolerance;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tolerance
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    fn check(&self, h: &Hypothesis) -> Result<(), LatticeError> {
        self.grid.check(h)
    }
}

/// s(θ|x) = p(θ|x) / r(θ).
pub fn surprise(posterior: &Posterior, reference: Reference) -> SurpriseProfile {
    let grid = posterior.shared_grid();
    let n = grid.len() as f64;
    let values = match reference {
        Reference::Uniform => posterior.masses().iter().map(|m| m / (1.0 / n)).collect(),
        Reference::FromGrid => posterior.masses().iter().zip(grid.references()).map(|(m, r)| m / r).collect(),
    };
    SurpriseProfile { grid, values, tie_tolerance: 0.0 }
}

/// T(H): points whose surprise exceeds that of every point of H. T(∅) = Θ.
pub fn tangent_set(profile: &SurpriseProfile, h: &Hypothesis) -> Hypothesis {
    let s = &profile.values;
    let tau = profile.tie_tolerance;
    // s1 > s0 + τ for every θ0 in H  ⇔  s1 > max over H of (s0 + τ)
    let bound = h.indices().map(|j| s[j] + tau).fold(f64::NEG_INFINITY, f64::max);
    let mut t = Hypothesis::empty(s.len());
    for (i, &v) in s.iter().enumerate() {
        if v > bound {
            t.insert(i);
        }
    }
    t
}

/// T*(H): points whose surprise exceeds the supremum over H.
pub fn tangent_set_star(profile: &SurpriseProfile, h: &Hypothesis) -> Result<Hypothesis, FbstError> {
    profile.check(h)?;
    let s = &profile.values;
    let sup = h.indices().map(|j| s[j]).reduce(f64::max).ok_or(FbstError::EmptyHypothesis)?;
    let threshold = sup + profile.tie_tolerance;
    Hypothesis::from_indices(s.len(), (0..s.len()).filter(|&i| s[i] > threshold)).map_err(Into::into)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EValue {
    pub value: f64,
    pub hypothesis: Hypothesis,
    pub tangent_set: Hypothesis,
}

/// ev(H|x) = 1 − p(T(H)|x).
pub fn ev(posterior: &Posterior, profile: &SurpriseProfile, h: &Hypothesis) -> EValue {
    let tangent = tangent_set(profile, h);
    EValue { value: 1.0 - posterior.prob(&tangent), hypothesis: h.clone(), tangent_set: tangent }
}

/// Largest singleton e-value over H.
pub fn ev_via_sup(posterior: &Posterior, profile: &SurpriseProfile, h: &Hypothesis) -> Result<f64, FbstError> {
    profile.check(h)?;
    let n = h.universe_len();
    h.indices()
        .map(|i| ev(posterior, profile, &Hypothesis::singleton(n, i).expect("member index")).value)
        .reduce(f64::max)
        .ok_or(FbstError::EmptyHypothesis)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GfbstConfig {
    c: f64,
}

impl GfbstConfig {
    pub fn new(c: f64) -> Result<Self, FbstError> {
        if !(c > 0.0 && c < 1.0) {
            return Err(FbstError::InvalidCutoff(c));
        }
        Ok(GfbstConfig { c })
    }

    pub fn cutoff(&self) -> f64 {
        self.c
    }

    /// Whether the probability bridge applies (c < 0.5).
    pub fn supports_bridge(&self) -> bool {
        self.c < 0.5
    }

    fn require_bridge(&self) -> Result<(), FbstError> {
        if self.supports_bridge() {
            Ok(())
        } else {
            Err(FbstError::BridgeCutoff(self.c))
        }
    }
}

/// Two-valued FBST: accept iff ev(H) > c.
pub fn fbst(posterior: &Posterior, profile: &SurpriseProfile, h: &Hypothesis, config: &GfbstConfig) -> ModalVerdict {
    if ev(posterior, profile, h).value > config.c {
        ModalVerdict::Accept
    } else {
        ModalVerdict::Reject
    }
}

fn gfbst_from_evs(ev_h: f64, ev_complement: f64, c: f64) -> ModalVerdict {
    if ev_h <= c {
        ModalVerdict::Reject
    } else if ev_complement <= c {
        ModalVerdict::Accept
    } else {
        ModalVerdict::Agnostic
    }
}

pub fn gfbst(posterior: &Posterior, profile: &SurpriseProfile, h: &Hypothesis, config: &GfbstConfig) -> ModalVerdict {
    let ev_h = ev(posterior, profile, h).value;
    let ev_c = ev(posterior, profile, &h.complement()).value;
    gfbst_from_evs(ev_h, ev_c, config.c)
}

/// S = {θ : ev({θ}) > c}. Never empty: a point of maximal surprise has ev 1.
pub fn gfbst_region(posterior: &Posterior, profile: &SurpriseProfile, config: &GfbstConfig) -> Hypothesis {
    let n = profile.values.len();
    let mut region = Hypothesis::empty(n);
    for i in 0..n {
        let single = Hypothesis::singleton(n, i).expect("index in range");
        if ev(posterior, profile, &single).value > config.c {
            region.insert(i);
        }
    }
    debug_assert!(!region.is_empty());
    region
}

/// The GFBST as a rule over every hypothesis of the grid.
pub fn build_gfbst_test(posterior: &Posterior, profile: &SurpriseProfile, config: GfbstConfig) -> AgnosticTest {
    let (post, prof) = (posterior.clone(), profile.clone());
    let description = format!("GFBST (c = {}, tie tolerance = {})", config.c, profile.tie_tolerance);
    AgnosticTest::rule(posterior.shared_grid(), description, move |h| gfbst(&post, &prof, h, &config))
}

pub fn build_fbst_test(posterior: &Posterior, profile: &SurpriseProfile, config: GfbstConfig) -> AgnosticTest {
    let (post, prof) = (posterior.clone(), profile.clone());
    let description = format!("FBST (c = {}, tie tolerance = {})", config.c, profile.tie_tolerance);
    AgnosticTest::rule(posterior.shared_grid(), description, move |h| fbst(&post, &prof, h, &config))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BridgeViolation {
    pub hypothesis: Hypothesis,
    pub verdict: ModalVerdict,
    pub probability: f64,
    pub link: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BridgeCheck {
    pub passed: bool,
    pub mode: CheckMode,
    pub counterexample: Option<BridgeViolation>,
}

fn bridge_violation(
    posterior: &Posterior,
    profile: &SurpriseProfile,
    h: &Hypothesis,
    c: f64,
) -> Option<BridgeViolation> {
    let config = GfbstConfig { c };
    let verdict = gfbst(posterior, profile, h, &config);
    let probability = posterior.prob(h);
    let link = if verdict == ModalVerdict::Accept && probability < 1.0 - c {
        "accept => p >= 1 - c"
    } else if probability > c && verdict == ModalVerdict::Reject {
        "p > c => not reject"
    } else {
        return None;
    };
    Some(BridgeViolation { hypothesis: h.clone(), verdict, probability, link })
}

/// With c < 0.5: GFBST-accept ⇒ p(H) >= 1 − c ⇒ p(H) > c ⇒ GFBST-not-reject.
pub fn check_ev_prob_bridge(
    posterior: &Posterior,
    profile: &SurpriseProfile,
    config: &GfbstConfig,
    options: &CheckOptions,
) -> Result<BridgeCheck, FbstError> {
    config.require_bridge()?;
    let n = profile.values.len();
    let c = config.c;
    if n <= crate::consistency::EXHAUSTIVE_SINGLE_LIMIT {
        let cx = Subsets::new(n)?.find_map(|h| bridge_violation(posterior, profile, &h, c));
        return Ok(BridgeCheck { passed: cx.is_none(), mode: CheckMode::Exhaustive, counterexample: cx });
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
    let words = n.div_ceil(64);
    let cx = (0..options.trials).find_map(|_| {
        let h = Hypothesis::from_words(n, (0..words).map(|_| rng.gen::<u64>()));
        bridge_violation(posterior, profile, &h, c)
    });
    Ok(BridgeCheck {
        passed: cx.is_none(),
        mode: CheckMode::Sampled { seed: options.seed, trials: options.trials },
        counterexample: cx,
    })
}

/// Possibilistic (GFBST) and probabilistic (cutoff test with c1 = 1 − c,
/// c2 = c) modalities of one hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridRecord {
    /// GFBST accepts H.
    pub necessity: bool,
    /// Cutoff test accepts H: p(H|x) > 1 − c.
    pub probable_necessity: bool,
    /// Cutoff test does not reject H: p(H|x) >= c.
    pub probable_possibility: bool,
    /// GFBST does not reject H.
    pub possibility: bool,
    pub posterior_prob: f64,
    pub prior_prob: f64,
}

impl HybridRecord {
    /// necessity ⇒ probable necessity ⇒ probable possibility ⇒ possibility.
    ///
    /// The first and last links can fail only when p(H|x) equals 1 − c or
    /// c exactly, because the cutoff test treats both boundaries as agnostic.
    pub fn chain_holds(&self) -> bool {
        (!self.necessity || self.probable_necessity)
            && (!self.probable_necessity || self.probable_possibility)
            && (!self.probable_possibility || self.possibility)
    }

    pub fn on_boundary(&self, c: f64) -> bool {
        self.posterior_prob == c || self.posterior_prob == 1.0 - c
    }
}

pub fn hybrid_relations(
    posterior: &Posterior,
    profile: &SurpriseProfile,
    config: &GfbstConfig,
    h: &Hypothesis,
) -> Result<HybridRecord, FbstError> {
    config.require_bridge()?;
    profile.check(h)?;
    let c = config.c;
    let verdict = gfbst(posterior, profile, h, config);
    let p = posterior.prob(h);
    let prior_prob: f64 = h.indices().fold(0.0, |acc, i| acc + posterior.grid().point(i).prior);
    let cuts = crate::decisions::CutoffPair::symmetric(c).expect("0 < c < 0.5");
    let probabilistic = cuts.verdict(p);
    let record = HybridRecord {
        necessity: verdict == ModalVerdict::Accept,
        probable_necessity: probabilistic == ModalVerdict::Accept,
        probable_possibility: probabilistic != ModalVerdict::Reject,
        possibility: verdict != ModalVerdict::Reject,
        posterior_prob: p,
        prior_prob,
    };
    if record.necessity && p < 1.0 - c {
        return Err(FbstError::ChainViolation("GFBST accept => p(H|x) >= 1 - c"));
    }
    if p > c && !record.possibility {
        return Err(FbstError::ChainViolation("p(H|x) > c => GFBST not reject"));
    }
    if !record.on_boundary(c) && !record.chain_holds() {
        return Err(FbstError::ChainViolation(
            "necessity => probable necessity => probable possibility => possibility",
        ));
    }
    if prior_prob == 0.0 && (record.probable_possibility || record.necessity) {
        return Err(FbstError::ChainViolation("p(H) = 0 => cutoff reject and no GFBST accept"));
    }
    Ok(record)
}
