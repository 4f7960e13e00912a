//! Finite parameter spaces, hypotheses as subsets, and agnostic tests.
//!
//! The sigma-field is the full power set of the grid. Hypotheses are
//! bitmasks over grid indices; exhaustive operations are limited to
//! [`MAX_EXHAUSTIVE_POINTS`] points and grids to [`MAX_GRID_POINTS`].

pub mod predicate;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::modality::ModalVerdict;

pub const MAX_GRID_POINTS: usize = 4096;
pub const MAX_EXHAUSTIVE_POINTS: usize = 20;
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("parameter grid has no points")]
    EmptyGrid,
    #[error("parameter grid has {found} points, the maximum is {max}")]
    TooManyPoints { found: usize, max: usize },
    #[error("duplicate point id `{0}`")]
    DuplicateId(String),
    #[error("point `{id}` has invalid prior mass {value}")]
    InvalidPrior { id: String, value: f64 },
    #[error("prior masses sum to {sum}, expected 1 within {PRIOR_SUM_TOLERANCE:e}")]
    PriorSum { sum: f64 },
    #[error("point `{id}` has reference weight {value}, must be finite and > 0")]
    InvalidReference { id: String, value: f64 },
    #[error("point `{id}` has a non-finite coordinate")]
    InvalidCoord { id: String },
    #[error("unknown point id `{0}`")]
    UnknownId(String),
    #[error("index {index} is outside a grid of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("hypothesis over {found} points used with a grid of {expected} points")]
    GridMismatch { expected: usize, found: usize },
    #[error("family of hypotheses must be non-empty")]
    EmptyFamily,
    #[error("region estimator is empty; every hypothesis would be both accepted and rejected")]
    EmptyRegion,
    #[error("exhaustive enumeration needs at most {max} points, grid has {found}")]
    SizeGuard { found: usize, max: usize },
    #[error("verdict table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
}

/// A subset of grid point indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Hypothesis {
    pub fn empty(len: usize) -> Self {
        Hypothesis { len, words: smallvec![0; word_count(len)] }
    }

    pub fn full(len: usize) -> Self {
        let mut h = Hypothesis { len, words: smallvec![u64::MAX; word_count(len)] };
        h.trim();
        h
    }

    pub fn singleton(len: usize, index: usize) -> Result<Self, LatticeError> {
        Self::from_indices(len, [index])
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self, LatticeError> {
        let mut h = Self::empty(len);
        for index in indices {
            if index >= len {
                return Err(LatticeError::IndexOutOfRange { index, len });
            }
            h.insert(index);
        }
        Ok(h)
    }

    /// Bits of `mask` above `len` are dropped. Requires `len <= 64`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "from_mask needs a grid of at most 64 points");
        let mut h = Hypothesis { len, words: smallvec![mask; word_count(len)] };
        h.trim();
        h
    }

    /// Build from raw 64-bit words, least significant bit first. Missing
    /// words are zero and bits beyond `len` are dropped.
    pub fn from_words(len: usize, words: impl IntoIterator<Item = u64>) -> Self {
        let mut h = Self::empty(len);
        for (slot, w) in h.words.iter_mut().zip(words) {
            *slot = w;
        }
        h.trim();
        h
    }

    /// The bitmask for grids of at most 64 points.
    pub fn mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Number of points in the underlying grid.
    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.len && self.words[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.len, "index {index} outside grid of {}", self.len);
        self.words[index / 64] |= 1 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        if index < self.len {
            self.words[index / 64] &= !(1 << (index % 64));
        }
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut rest = bits;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            })
        })
    }

    fn zip_with(&self, other: &Hypothesis, f: impl Fn(u64, u64) -> u64) -> Hypothesis {
        assert_eq!(self.len, other.len, "hypotheses over different grids");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| f(*a, *b)).collect();
        let mut h = Hypothesis { len: self.len, words };
        h.trim();
        h
    }

    pub fn union(&self, other: &Hypothesis) -> Hypothesis {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Hypothesis) -> Hypothesis {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Hypothesis) -> Hypothesis {
        self.zip_with(other, |a, b| a & !b)
    }

    /// Θ − H.
    pub fn complement(&self) -> Hypothesis {
        let mut h = Hypothesis { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        h.trim();
        h
    }

    /// Θ − (H1 ∩ H2).
    pub fn nand(&self, other: &Hypothesis) -> Hypothesis {
        self.intersection(other).complement()
    }

    pub fn is_subset(&self, other: &Hypothesis) -> bool {
        assert_eq!(self.len, other.len, "hypotheses over different grids");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Hypothesis) -> bool {
        assert_eq!(self.len, other.len, "hypotheses over different grids");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypothesis({}/{}: ", self.count(), self.len)?;
        f.debug_set().entries(self.indices()).finish()?;
        write!(f, ")")
    }
}

/// Θ − H, checked against the grid.
pub fn complement(grid: &ParameterGrid, h: &Hypothesis) -> Result<Hypothesis, LatticeError> {
    grid.check(h)?;
    Ok(h.complement())
}

fn check_family(family: &[Hypothesis]) -> Result<usize, LatticeError> {
    let first = family.first().ok_or(LatticeError::EmptyFamily)?;
    for h in family {
        if h.len != first.len {
            return Err(LatticeError::GridMismatch { expected: first.len, found: h.len });
        }
    }
    Ok(first.len)
}

pub fn family_union(family: &[Hypothesis]) -> Result<Hypothesis, LatticeError> {
    let len = check_family(family)?;
    Ok(family.iter().fold(Hypothesis::empty(len), |acc, h| acc.union(h)))
}

pub fn family_intersection(family: &[Hypothesis]) -> Result<Hypothesis, LatticeError> {
    let len = check_family(family)?;
    Ok(family.iter().fold(Hypothesis::full(len), |acc, h| acc.intersection(h)))
}

/// Verdict of the region-based test with estimator `region` for `h`.
pub fn region_test_evaluate(region: &Hypothesis, h: &Hypothesis) -> Result<ModalVerdict, LatticeError> {
    if region.len != h.len {
        return Err(LatticeError::GridMismatch { expected: region.len, found: h.len });
    }
    if region.is_empty() {
        return Err(LatticeError::EmptyRegion);
    }
    Ok(region_verdict(region, h))
}

fn region_verdict(region: &Hypothesis, h: &Hypothesis) -> ModalVerdict {
    if region.is_subset(h) {
        ModalVerdict::Accept
    } else if !region.intersects(h) {
        ModalVerdict::Reject
    } else {
        ModalVerdict::Agnostic
    }
}

#[inline]
fn region_verdict_mask(region: u64, h: u64) -> ModalVerdict {
    if region & !h == 0 {
        ModalVerdict::Accept
    } else if region & h == 0 {
        ModalVerdict::Reject
    } else {
        ModalVerdict::Agnostic
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coord: Vec<f64>,
    pub prior: f64,
    #[serde(default = "default_reference")]
    pub reference: f64,
}

fn default_reference() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    points: Vec<GridPoint>,
}

/// Finite parameter space with prior masses and reference weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFile", into = "GridFile")]
pub struct ParameterGrid {
    points: Vec<GridPoint>,
}

impl TryFrom<GridFile> for ParameterGrid {
    type Error = LatticeError;

    fn try_from(file: GridFile) -> Result<Self, Self::Error> {
        ParameterGrid::new(file.points)
    }
}

impl From<ParameterGrid> for GridFile {
    fn from(grid: ParameterGrid) -> Self {
        GridFile { points: grid.points }
    }
}

impl ParameterGrid {
    pub fn new(points: Vec<GridPoint>) -> Result<Self, LatticeError> {
        if points.is_empty() {
            return Err(LatticeError::EmptyGrid);
        }
        if points.len() > MAX_GRID_POINTS {
            return Err(LatticeError::TooManyPoints { found: points.len(), max: MAX_GRID_POINTS });
        }
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(p.id.as_str()) {
                return Err(LatticeError::DuplicateId(p.id.clone()));
            }
            if !p.prior.is_finite() || p.prior < 0.0 {
                return Err(LatticeError::InvalidPrior { id: p.id.clone(), value: p.prior });
            }
            if !p.reference.is_finite() || p.reference <= 0.0 {
                return Err(LatticeError::InvalidReference { id: p.id.clone(), value: p.reference });
            }
            if p.coord.iter().any(|c| !c.is_finite()) {
                return Err(LatticeError::InvalidCoord { id: p.id.clone() });
            }
        }
        let sum: f64 = points.iter().map(|p| p.prior).sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(LatticeError::PriorSum { sum });
        }
        Ok(ParameterGrid { points })
    }

    /// `n` points `t1..tn` with uniform prior and uniform reference.
    pub fn uniform(n: usize) -> Result<Self, LatticeError> {
        Self::with_priors(&vec![1.0 / n.max(1) as f64; n])
    }

    /// Points `t1..tn` with the given priors and uniform reference.
    pub fn with_priors(priors: &[f64]) -> Result<Self, LatticeError> {
        let n = priors.len();
        let points = priors
            .iter()
            .enumerate()
            .map(|(i, &prior)| GridPoint {
                id: format!("t{}", i + 1),
                coord: Vec::new(),
                prior,
                reference: 1.0 / n as f64,
            })
            .collect();
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &GridPoint {
        &self.points[index]
    }

    pub fn priors(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.prior)
    }

    pub fn references(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.reference)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn full(&self) -> Hypothesis {
        Hypothesis::full(self.len())
    }

    pub fn empty_hypothesis(&self) -> Hypothesis {
        Hypothesis::empty(self.len())
    }

    pub fn check(&self, h: &Hypothesis) -> Result<(), LatticeError> {
        if h.len != self.len() {
            return Err(LatticeError::GridMismatch { expected: self.len(), found: h.len });
        }
        Ok(())
    }

    pub fn hypothesis<S: AsRef<str>>(&self, ids: &[S]) -> Result<Hypothesis, LatticeError> {
        let indices = ids
            .iter()
            .map(|id| self.index_of(id.as_ref()).ok_or_else(|| LatticeError::UnknownId(id.as_ref().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Hypothesis::from_indices(self.len(), indices)
    }

    pub fn ids_of(&self, h: &Hypothesis) -> Vec<String> {
        h.indices().map(|i| self.points[i].id.clone()).collect()
    }

    /// `{t1, t2}` style rendering.
    pub fn describe(&self, h: &Hypothesis) -> String {
        format!("{{{}}}", self.ids_of(h).join(", "))
    }
}

/// Every subset of a grid of at most [`MAX_EXHAUSTIVE_POINTS`] points, in
/// binary counting order on the indices.
pub fn enumerate_hypotheses(grid: &ParameterGrid) -> Result<Subsets, LatticeError> {
    Subsets::new(grid.len())
}

#[derive(Clone, Debug)]
pub struct Subsets {
    len: usize,
    next: u64,
    end: u64,
}

impl Subsets {
    pub fn new(len: usize) -> Result<Self, LatticeError> {
        if len > MAX_EXHAUSTIVE_POINTS {
            return Err(LatticeError::SizeGuard { found: len, max: MAX_EXHAUSTIVE_POINTS });
        }
        Ok(Subsets { len, next: 0, end: 1u64 << len })
    }
}

impl Iterator for Subsets {
    type Item = Hypothesis;

    fn next(&mut self) -> Option<Hypothesis> {
        if self.next >= self.end {
            return None;
        }
        let h = Hypothesis::from_mask(self.len, self.next);
        self.next += 1;
        Some(h)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Subsets {}

pub type RuleFn = dyn Fn(&Hypothesis) -> ModalVerdict + Send + Sync;

/// How a test produces its verdicts.
#[derive(Clone)]
pub enum TestForm {
    /// One verdict per subset, indexed by the subset's bitmask.
    Table(Arc<[ModalVerdict]>),
    /// Region-based test with a non-empty estimator.
    Region(Hypothesis),
    /// Deterministic, side-effect free evaluator.
    Rule { description: String, rule: Arc<RuleFn> },
}

/// A total map from hypotheses on a grid to verdicts.
#[derive(Clone)]
pub struct AgnosticTest {
    grid: Arc<ParameterGrid>,
    form: TestForm,
}

impl fmt::Debug for AgnosticTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AgnosticTest").field("points", &self.grid.len()).field("form", &self.description()).finish()
    }
}

impl AgnosticTest {
    pub fn table(grid: impl Into<Arc<ParameterGrid>>, verdicts: Vec<ModalVerdict>) -> Result<Self, LatticeError> {
        let grid = grid.into();
        let n = grid.len();
        if n > MAX_EXHAUSTIVE_POINTS {
            return Err(LatticeError::SizeGuard { found: n, max: MAX_EXHAUSTIVE_POINTS });
        }
        if verdicts.len() != 1 << n {
            return Err(LatticeError::TableSize { expected: 1 << n, found: verdicts.len() });
        }
        Ok(AgnosticTest { grid, form: TestForm::Table(verdicts.into()) })
    }

    pub fn table_from_fn(
        grid: impl Into<Arc<ParameterGrid>>,
        f: impl Fn(&Hypothesis) -> ModalVerdict,
    ) -> Result<Self, LatticeError> {
        let grid = grid.into();
        let verdicts = Subsets::new(grid.len())?.map(|h| f(&h)).collect();
        Self::table(grid, verdicts)
    }

    /// Every subset gets the same verdict.
    pub fn constant(grid: impl Into<Arc<ParameterGrid>>, verdict: ModalVerdict) -> Result<Self, LatticeError> {
        Self::table_from_fn(grid, |_| verdict)
    }

    pub fn region(grid: impl Into<Arc<ParameterGrid>>, region: Hypothesis) -> Result<Self, LatticeError> {
        let grid = grid.into();
        grid.check(&region)?;
        if region.is_empty() {
            return Err(LatticeError::EmptyRegion);
        }
        Ok(AgnosticTest { grid, form: TestForm::Region(region) })
    }

    pub fn rule(
        grid: impl Into<Arc<ParameterGrid>>,
        description: impl Into<String>,
        rule: impl Fn(&Hypothesis) -> ModalVerdict + Send + Sync + 'static,
    ) -> Self {
        AgnosticTest {
            grid: grid.into(),
            form: TestForm::Rule { description: description.into(), rule: Arc::new(rule) },
        }
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<ParameterGrid> {
        Arc::clone(&self.grid)
    }

    pub fn form(&self) -> &TestForm {
        &self.form
    }

    pub fn description(&self) -> String {
        match &self.form {
            TestForm::Table(_) => "explicit table".to_string(),
            TestForm::Region(s) => format!("region {}", self.grid.describe(s)),
            TestForm::Rule { description, .. } => description.clone(),
        }
    }

    /// Panics if `h` belongs to a different grid.
    pub fn verdict(&self, h: &Hypothesis) -> ModalVerdict {
        assert_eq!(h.len, self.grid.len(), "hypothesis over a different grid");
        match &self.form {
            TestForm::Table(t) => t[h.mask().expect("tables are limited to small grids") as usize],
            TestForm::Region(s) => region_verdict(s, h),
            TestForm::Rule { rule, .. } => rule(h),
        }
    }

    /// Verdict for the subset with bitmask `mask`; grid must have at most 64 points.
    pub fn verdict_mask(&self, mask: u64) -> ModalVerdict {
        match &self.form {
            TestForm::Table(t) => t[mask as usize],
            TestForm::Region(s) => region_verdict_mask(s.mask().expect("grid of at most 64 points"), mask),
            TestForm::Rule { rule, .. } => rule(&Hypothesis::from_mask(self.grid.len(), mask)),
        }
    }

    /// Materialise the verdicts of every subset.
    pub fn tabulate(&self) -> Result<AgnosticTest, LatticeError> {
        let n = self.grid.len();
        if n > MAX_EXHAUSTIVE_POINTS {
            return Err(LatticeError::SizeGuard { found: n, max: MAX_EXHAUSTIVE_POINTS });
        }
        let verdicts = (0..1u64 << n).map(|m| self.verdict_mask(m)).collect();
        Self::table(Arc::clone(&self.grid), verdicts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(len: usize, idx: &[usize]) -> Hypothesis {
        Hypothesis::from_indices(len, idx.iter().copied()).unwrap()
    }

    #[test]
    fn complement_cases() {
        let grid = ParameterGrid::uniform(3).unwrap();
        assert_eq!(complement(&grid, &h(3, &[0])).unwrap(), h(3, &[1, 2]));
        assert_eq!(complement(&grid, &grid.empty_hypothesis()).unwrap(), grid.full());
        assert_eq!(complement(&grid, &grid.full()).unwrap(), grid.empty_hypothesis());
        assert!(complement(&grid, &h(4, &[0])).is_err());
    }

    #[test]
    fn families() {
        assert_eq!(family_union(&[h(3, &[0]), h(3, &[1])]).unwrap(), h(3, &[0, 1]));
        assert_eq!(family_intersection(&[h(3, &[0, 1]), h(3, &[1, 2])]).unwrap(), h(3, &[1]));
        let partition = [h(4, &[0, 3]), h(4, &[1]), h(4, &[2])];
        assert_eq!(family_union(&partition).unwrap(), Hypothesis::full(4));
        assert_eq!(family_union(&[]), Err(LatticeError::EmptyFamily));
        assert_eq!(family_intersection(&[]), Err(LatticeError::EmptyFamily));
        assert!(matches!(family_union(&[h(3, &[0]), h(4, &[0])]), Err(LatticeError::GridMismatch { .. })));
    }

    #[test]
    fn region_cases() {
        let s = h(4, &[0, 1]);
        assert_eq!(region_test_evaluate(&s, &h(4, &[0, 1, 2])).unwrap(), ModalVerdict::Accept);
        assert_eq!(region_test_evaluate(&s, &h(4, &[2])).unwrap(), ModalVerdict::Reject);
        assert_eq!(region_test_evaluate(&s, &h(4, &[1, 2])).unwrap(), ModalVerdict::Agnostic);
        assert_eq!(region_test_evaluate(&Hypothesis::empty(4), &s), Err(LatticeError::EmptyRegion));
        let grid = ParameterGrid::uniform(4).unwrap();
        assert_eq!(AgnosticTest::region(grid, Hypothesis::empty(4)).unwrap_err(), LatticeError::EmptyRegion);
    }

    #[test]
    fn enumeration() {
        let three = ParameterGrid::uniform(3).unwrap();
        let all: Vec<_> = enumerate_hypotheses(&three).unwrap().collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 8);
        assert_eq!(all[5], h(3, &[0, 2]));
        let one = ParameterGrid::uniform(1).unwrap();
        let all: Vec<_> = enumerate_hypotheses(&one).unwrap().collect();
        assert_eq!(all, vec![Hypothesis::empty(1), Hypothesis::full(1)]);
        let big = ParameterGrid::uniform(21).unwrap();
        assert_eq!(enumerate_hypotheses(&big).unwrap_err(), LatticeError::SizeGuard { found: 21, max: 20 });
    }

    #[test]
    fn grid_validation() {
        let p = |id: &str, prior: f64, reference: f64| GridPoint { id: id.into(), coord: vec![], prior, reference };
        assert_eq!(ParameterGrid::new(vec![]), Err(LatticeError::EmptyGrid));
        assert!(matches!(
            ParameterGrid::new(vec![p("a", 0.5, 1.0), p("a", 0.5, 1.0)]),
            Err(LatticeError::DuplicateId(_))
        ));
        assert!(matches!(
            ParameterGrid::new(vec![p("a", 0.5, 1.0), p("b", 0.4, 1.0)]),
            Err(LatticeError::PriorSum { .. })
        ));
        assert!(matches!(ParameterGrid::new(vec![p("a", 1.0, 0.0)]), Err(LatticeError::InvalidReference { .. })));
        assert!(matches!(
            ParameterGrid::new(vec![p("a", -0.1, 1.0), p("b", 1.1, 1.0)]),
            Err(LatticeError::InvalidPrior { .. })
        ));
        assert!(ParameterGrid::uniform(MAX_GRID_POINTS).is_ok());
        assert!(matches!(ParameterGrid::uniform(MAX_GRID_POINTS + 1), Err(LatticeError::TooManyPoints { .. })));
    }

    #[test]
    fn grid_json_round_trip() {
        let text = r#"{"points":[{"id":"a","coord":[0.0],"prior":0.25,"reference":2.0},{"id":"b","prior":0.75}]}"#;
        let grid: ParameterGrid = serde_json::from_str(text).unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid.point(1).reference, 1.0);
        let back: ParameterGrid = serde_json::from_str(&serde_json::to_string(&grid).unwrap()).unwrap();
        assert_eq!(back, grid);
        assert!(serde_json::from_str::<ParameterGrid>(r#"{"points":[]}"#).is_err());
    }

    #[test]
    fn wide_hypotheses() {
        let a = h(200, &[0, 64, 199]);
        let b = h(200, &[64, 150]);
        assert_eq!(a.intersection(&b), h(200, &[64]));
        assert_eq!(a.complement().count(), 197);
        assert_eq!(a.indices().collect::<Vec<_>>(), vec![0, 64, 199]);
        assert!(a.mask().is_none());
        assert_eq!(Hypothesis::full(200).count(), 200);
    }

    #[test]
    fn table_and_rule_forms_agree() {
        let grid = Arc::new(ParameterGrid::uniform(4).unwrap());
        let s = h(4, &[1, 3]);
        let region = AgnosticTest::region(Arc::clone(&grid), s.clone()).unwrap();
        let table = region.tabulate().unwrap();
        let rule = AgnosticTest::rule(Arc::clone(&grid), "copy", move |x| region_test_evaluate(&s, x).unwrap());
        for x in Subsets::new(4).unwrap() {
            let m = x.mask().unwrap();
            assert_eq!(region.verdict(&x), table.verdict(&x));
            assert_eq!(region.verdict(&x), rule.verdict(&x));
            assert_eq!(region.verdict_mask(m), rule.verdict_mask(m));
        }
        assert!(AgnosticTest::table(Arc::clone(&grid), vec![ModalVerdict::Accept; 3]).is_err());
    }

    fn arb_family(n: usize) -> impl Strategy<Value = Vec<Hypothesis>> {
        prop::collection::vec(0u64..(1 << n), 1..6)
            .prop_map(move |ms| ms.into_iter().map(|m| Hypothesis::from_mask(n, m)).collect())
    }

    proptest! {
        #[test]
        fn de_morgan((n, family) in (1usize..=8).prop_flat_map(|n| (Just(n), arb_family(n)))) {
            let lhs = family_union(&family).unwrap().complement();
            let complements: Vec<_> = family.iter().map(Hypothesis::complement).collect();
            prop_assert_eq!(lhs.universe_len(), n);
            prop_assert_eq!(lhs, family_intersection(&complements).unwrap());
        }

        #[test]
        fn region_accept_iff_complement_rejected(n in 1usize..=8, s in 1u64..256, x in 0u64..256) {
            let s = Hypothesis::from_mask(n, s);
            prop_assume!(!s.is_empty());
            let x = Hypothesis::from_mask(n, x);
            let accept = region_test_evaluate(&s, &x).unwrap() == ModalVerdict::Accept;
            let reject = region_test_evaluate(&s, &x.complement()).unwrap() == ModalVerdict::Reject;
            prop_assert_eq!(accept, reject);
        }

        #[test]
        fn complement_is_involution(n in 1usize..=130, seed in any::<u64>()) {
            let x = Hypothesis::from_indices(n, (0..n).filter(|i| (seed.rotate_left(*i as u32) & 1) == 1)).unwrap();
            prop_assert_eq!(x.complement().complement(), x.clone());
            prop_assert_eq!(x.complement().count() + x.count(), n);
        }
    }
}
