//! Model checker for the logical-consistency conditions of agnostic tests.
//!
//! A test is logically consistent when it is invertible, monotone, union
//! and intersection consonant, and accepts the whole parameter space.
//! Checks are exhaustive on small grids ([`EXHAUSTIVE_SINGLE_LIMIT`] points
//! for conditions quantifying over one hypothesis, [`EXHAUSTIVE_PAIR_LIMIT`]
//! for pairs) and seeded random samples above that.
//!
//! Consonance is checked on pairs only: on a finite grid, closure of
//! rejection under pairwise unions gives closure under every finite union
//! by induction, and likewise for acceptance and intersections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lattice::{AgnosticTest, Hypothesis, LatticeError, ParameterGrid, Subsets};
use crate::modality::ModalVerdict;

pub const EXHAUSTIVE_SINGLE_LIMIT: usize = 12;
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 8;

#[derive(Debug, Error)]
pub enum ConsistencyError {
    #[error("test is not logically consistent")]
    Inconsistent(Box<ConsistencyReport>),
    #[error("hypothesis H{position} is undecided (agnostic); the nand lemma needs decided inputs")]
    Undecided { position: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Sampler settings used above the exhaustive limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    pub trials: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 0, trials: 20_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, trials: usize },
}

impl CheckMode {
    fn combine(self, other: CheckMode) -> CheckMode {
        match (self, other) {
            (CheckMode::Exhaustive, m) | (m, CheckMode::Exhaustive) => m,
            (m, _) => m,
        }
    }
}

/// A concrete witness of a failed condition.
#[derive(Clone, Debug, PartialEq)]
pub enum Counterexample {
    /// H and its complement violate invertibility.
    Invertibility {
        hypothesis: Hypothesis,
    },
    /// `smaller ⊆ larger` but the verdict got less favourable.
    Monotonicity {
        smaller: Hypothesis,
        larger: Hypothesis,
    },
    /// Both rejected, union not rejected.
    UnionConsonance {
        first: Hypothesis,
        second: Hypothesis,
    },
    /// Both accepted, intersection not accepted.
    IntersectionConsonance {
        first: Hypothesis,
        second: Hypothesis,
    },
    ThetaNotAccepted,
    /// The test and the region test from `region` disagree at `hypothesis`.
    Representation {
        region: Hypothesis,
        hypothesis: Hypothesis,
    },
}

impl Counterexample {
    pub fn hypotheses(&self, grid: &ParameterGrid) -> Vec<Hypothesis> {
        match self {
            Counterexample::Invertibility { hypothesis } => vec![hypothesis.clone(), hypothesis.complement()],
            Counterexample::Monotonicity { smaller, larger } => vec![smaller.clone(), larger.clone()],
            Counterexample::UnionConsonance { first, second } => {
                vec![first.clone(), second.clone(), first.union(second)]
            }
            Counterexample::IntersectionConsonance { first, second } => {
                vec![first.clone(), second.clone(), first.intersection(second)]
            }
            Counterexample::ThetaNotAccepted => vec![grid.full()],
            Counterexample::Representation { hypothesis, .. } => vec![hypothesis.clone()],
        }
    }

    /// Re-evaluates the test and reports whether the violation still occurs.
    pub fn violated_by(&self, test: &AgnosticTest) -> bool {
        let v = |h: &Hypothesis| test.verdict(h);
        match self {
            Counterexample::Invertibility { hypothesis } => {
                !invertible_pair(v(hypothesis), v(&hypothesis.complement()))
            }
            Counterexample::Monotonicity { smaller, larger } => {
                smaller.is_subset(larger) && !monotone_pair(v(smaller), v(larger))
            }
            Counterexample::UnionConsonance { first, second } => {
                v(first) == ModalVerdict::Reject
                    && v(second) == ModalVerdict::Reject
                    && v(&first.union(second)) != ModalVerdict::Reject
            }
            Counterexample::IntersectionConsonance { first, second } => {
                v(first) == ModalVerdict::Accept
                    && v(second) == ModalVerdict::Accept
                    && v(&first.intersection(second)) != ModalVerdict::Accept
            }
            Counterexample::ThetaNotAccepted => v(&test.grid().full()) != ModalVerdict::Accept,
            Counterexample::Representation { region, hypothesis } => {
                match crate::lattice::region_test_evaluate(region, hypothesis) {
                    Ok(expected) => v(hypothesis) != expected,
                    Err(_) => true,
                }
            }
        }
    }

    fn to_json(&self, test: &AgnosticTest) -> Value {
        let grid = test.grid();
        let hs = self.hypotheses(grid);
        let kind = match self {
            Counterexample::Invertibility { .. } => "invertibility",
            Counterexample::Monotonicity { .. } => "monotonicity",
            Counterexample::UnionConsonance { .. } => "union_consonance",
            Counterexample::IntersectionConsonance { .. } => "intersection_consonance",
            Counterexample::ThetaNotAccepted => "accepts_theta",
            Counterexample::Representation { .. } => "representation",
        };
        json!({
            "kind": kind,
            "hypotheses": hs.iter().map(|h| grid.ids_of(h)).collect::<Vec<_>>(),
            "verdicts": hs.iter().map(|h| test.verdict(h)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub passed: bool,
    pub mode: CheckMode,
    pub counterexample: Option<Counterexample>,
}

impl CheckResult {
    fn new(mode: CheckMode, counterexample: Option<Counterexample>) -> Self {
        CheckResult { passed: counterexample.is_none(), mode, counterexample }
    }

    pub fn to_json(&self, test: &AgnosticTest) -> Value {
        json!({
            "passed": self.passed,
            "mode": self.mode,
            "counterexample": self.counterexample.as_ref().map(|c| c.to_json(test)),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub invertibility: CheckResult,
    pub monotonicity: CheckResult,
    pub union_consonance: CheckResult,
    pub intersection_consonance: CheckResult,
    pub accepts_theta: CheckResult,
    pub overall: bool,
    pub mode: CheckMode,
}

impl ConsistencyReport {
    pub fn checks(&self) -> [(&'static str, &CheckResult); 5] {
        [
            ("invertibility", &self.invertibility),
            ("monotonicity", &self.monotonicity),
            ("union_consonance", &self.union_consonance),
            ("intersection_consonance", &self.intersection_consonance),
            ("accepts_theta", &self.accepts_theta),
        ]
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Counterexample> {
        self.checks().into_iter().filter_map(|(_, c)| c.counterexample.as_ref())
    }

    /// JSON view with counterexamples as lists of point ids.
    pub fn to_json(&self, test: &AgnosticTest) -> Value {
        let mut out = serde_json::Map::new();
        out.insert("test".into(), json!(test.description()));
        out.insert("points".into(), json!(test.grid().len()));
        out.insert("overall".into(), json!(self.overall));
        out.insert("mode".into(), json!(self.mode));
        out.insert("consonance_reduction".into(), json!("pairwise"));
        for (name, check) in self.checks() {
            out.insert(name.into(), check.to_json(test));
        }
        Value::Object(out)
    }
}

fn invertible_pair(h: ModalVerdict, complement: ModalVerdict) -> bool {
    use ModalVerdict::*;
    (h == Accept) == (complement == Reject) && (h == Agnostic) == (complement == Agnostic)
}

fn monotone_pair(smaller: ModalVerdict, larger: ModalVerdict) -> bool {
    use ModalVerdict::*;
    (smaller != Accept || larger == Accept) && (smaller == Reject || larger != Reject)
}

fn rng_for(options: &CheckOptions, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(stream);
    rng
}

/// Random subset whose inclusion probability is itself drawn uniformly,
/// so that both sparse and dense hypotheses are sampled.
fn random_hypothesis(rng: &mut impl Rng, n: usize) -> Hypothesis {
    let density: f64 = rng.gen();
    let mut h = Hypothesis::empty(n);
    for i in 0..n {
        if rng.gen_bool(density) {
            h.insert(i);
        }
    }
    h
}

fn sampled(options: &CheckOptions) -> CheckMode {
    CheckMode::Sampled { seed: options.seed, trials: options.trials }
}

/// Verdicts of every subset, indexed by bitmask.
fn verdict_table(test: &AgnosticTest) -> Vec<ModalVerdict> {
    (0..1u64 << test.grid().len()).map(|m| test.verdict_mask(m)).collect()
}

pub fn check_invertibility(test: &AgnosticTest, options: &CheckOptions) -> CheckResult {
    let n = test.grid().len();
    if n <= EXHAUSTIVE_SINGLE_LIMIT {
        let table = verdict_table(test);
        let full = (1u64 << n) - 1;
        let bad = (0..=full).find(|&m| !invertible_pair(table[m as usize], table[(full ^ m) as usize]));
        let cx = bad.map(|m| Counterexample::Invertibility { hypothesis: Hypothesis::from_mask(n, m) });
        return CheckResult::new(CheckMode::Exhaustive, cx);
    }
    let mut rng = rng_for(options, 1);
    let cx = (0..options.trials).find_map(|_| {
        let h = random_hypothesis(&mut rng, n);
        (!invertible_pair(test.verdict(&h), test.verdict(&h.complement())))
            .then(|| Counterexample::Invertibility { hypothesis: h })
    });
    CheckResult::new(sampled(options), cx)
}

pub fn check_monotonicity(test: &AgnosticTest, options: &CheckOptions) -> CheckResult {
    let n = test.grid().len();
    if n <= EXHAUSTIVE_PAIR_LIMIT {
        let table = verdict_table(test);
        let size = 1u64 << n;
        for small in 0..size {
            let free = (size - 1) & !small;
            // every superset is small | (a submask of the free bits)
            let mut extra = free;
            loop {
                let large = small | extra;
                if !monotone_pair(table[small as usize], table[large as usize]) {
                    let cx = Counterexample::Monotonicity {
                        smaller: Hypothesis::from_mask(n, small),
                        larger: Hypothesis::from_mask(n, large),
                    };
                    return CheckResult::new(CheckMode::Exhaustive, Some(cx));
                }
                if extra == 0 {
                    break;
                }
                extra = (extra - 1) & free;
            }
        }
        return CheckResult::new(CheckMode::Exhaustive, None);
    }
    let mut rng = rng_for(options, 2);
    let cx = (0..options.trials).find_map(|_| {
        let smaller = random_hypothesis(&mut rng, n);
        let larger = smaller.union(&random_hypothesis(&mut rng, n));
        (!monotone_pair(test.verdict(&smaller), test.verdict(&larger)))
            .then_some(Counterexample::Monotonicity { smaller, larger })
    });
    CheckResult::new(sampled(options), cx)
}

#[derive(Clone, Copy)]
enum Closure {
    Union,
    Intersection,
}

impl Closure {
    fn verdict(self) -> ModalVerdict {
        match self {
            Closure::Union => ModalVerdict::Reject,
            Closure::Intersection => ModalVerdict::Accept,
        }
    }

    fn combine_masks(self, a: u64, b: u64) -> u64 {
        match self {
            Closure::Union => a | b,
            Closure::Intersection => a & b,
        }
    }

    fn combine(self, a: &Hypothesis, b: &Hypothesis) -> Hypothesis {
        match self {
            Closure::Union => a.union(b),
            Closure::Intersection => a.intersection(b),
        }
    }

    fn counterexample(self, first: Hypothesis, second: Hypothesis) -> Counterexample {
        match self {
            Closure::Union => Counterexample::UnionConsonance { first, second },
            Closure::Intersection => Counterexample::IntersectionConsonance { first, second },
        }
    }
}

fn check_closure(test: &AgnosticTest, options: &CheckOptions, closure: Closure) -> CheckResult {
    let n = test.grid().len();
    let target = closure.verdict();
    if n <= EXHAUSTIVE_PAIR_LIMIT {
        let table = verdict_table(test);
        let members: Vec<u64> = (0..1u64 << n).filter(|&m| table[m as usize] == target).collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if table[closure.combine_masks(a, b) as usize] != target {
                    let cx = closure.counterexample(Hypothesis::from_mask(n, a), Hypothesis::from_mask(n, b));
                    return CheckResult::new(CheckMode::Exhaustive, Some(cx));
                }
            }
        }
        return CheckResult::new(CheckMode::Exhaustive, None);
    }
    let stream = match closure {
        Closure::Union => 3,
        Closure::Intersection => 4,
    };
    let mut rng = rng_for(options, stream);
    let cx = (0..options.trials).find_map(|_| {
        let a = random_hypothesis(&mut rng, n);
        let b = random_hypothesis(&mut rng, n);
        let holds = test.verdict(&a) != target
            || test.verdict(&b) != target
            || test.verdict(&closure.combine(&a, &b)) == target;
        (!holds).then(|| closure.counterexample(a, b))
    });
    CheckResult::new(sampled(options), cx)
}

/// Rejection is closed under (pairwise, hence finite) unions.
pub fn check_union_consonance(test: &AgnosticTest, options: &CheckOptions) -> CheckResult {
    check_closure(test, options, Closure::Union)
}

/// Acceptance is closed under (pairwise, hence finite) intersections.
pub fn check_intersection_consonance(test: &AgnosticTest, options: &CheckOptions) -> CheckResult {
    check_closure(test, options, Closure::Intersection)
}

pub fn check_accepts_theta(test: &AgnosticTest) -> CheckResult {
    let ok = test.verdict(&test.grid().full()) == ModalVerdict::Accept;
    CheckResult::new(CheckMode::Exhaustive, (!ok).then_some(Counterexample::ThetaNotAccepted))
}

/// Runs all five conditions.
pub fn classify(test: &AgnosticTest, options: &CheckOptions) -> ConsistencyReport {
    let invertibility = check_invertibility(test, options);
    let monotonicity = check_monotonicity(test, options);
    let union_consonance = check_union_consonance(test, options);
    let intersection_consonance = check_intersection_consonance(test, options);
    let accepts_theta = check_accepts_theta(test);
    let mode = [&monotonicity, &union_consonance, &intersection_consonance]
        .iter()
        .fold(invertibility.mode, |m, c| m.combine(c.mode));
    let overall = invertibility.passed
        && monotonicity.passed
        && union_consonance.passed
        && intersection_consonance.passed
        && accepts_theta.passed;
    ConsistencyReport {
        invertibility,
        monotonicity,
        union_consonance,
        intersection_consonance,
        accepts_theta,
        overall,
        mode,
    }
}

/// The region estimator of a consistent test: the points whose singleton
/// hypotheses are not rejected.
pub fn extract_region(test: &AgnosticTest, options: &CheckOptions) -> Result<Hypothesis, ConsistencyError> {
    let report = classify(test, options);
    if !report.overall {
        return Err(ConsistencyError::Inconsistent(Box::new(report)));
    }
    Ok(possible_singletons(test))
}

fn possible_singletons(test: &AgnosticTest) -> Hypothesis {
    let n = test.grid().len();
    let mut region = Hypothesis::empty(n);
    for i in 0..n {
        let mut single = Hypothesis::empty(n);
        single.insert(i);
        if test.verdict(&single) != ModalVerdict::Reject {
            region.insert(i);
        }
    }
    region
}

/// Intersection of every accepted hypothesis (Θ when nothing is accepted).
/// Coincides with [`extract_region`] on consistent tests.
pub fn region_by_accepted_intersection(test: &AgnosticTest) -> Result<Hypothesis, LatticeError> {
    let n = test.grid().len();
    let mut region = Hypothesis::full(n);
    for h in Subsets::new(n)? {
        if test.verdict(&h) == ModalVerdict::Accept {
            region = region.intersection(&h);
        }
    }
    Ok(region)
}

/// Whether `test` coincides with the region-based test built on `region`.
pub fn verify_representation(
    test: &AgnosticTest,
    region: &Hypothesis,
    options: &CheckOptions,
) -> Result<CheckResult, LatticeError> {
    let n = test.grid().len();
    test.grid().check(region)?;
    if region.is_empty() {
        return Err(LatticeError::EmptyRegion);
    }
    let disagrees = |h: &Hypothesis| {
        let expected = crate::lattice::region_test_evaluate(region, h).expect("region checked non-empty");
        test.verdict(h) != expected
    };
    let mk = |h: Hypothesis| Counterexample::Representation { region: region.clone(), hypothesis: h };
    if n <= EXHAUSTIVE_SINGLE_LIMIT {
        let cx = Subsets::new(n)?.find(|h| disagrees(h)).map(mk);
        return Ok(CheckResult::new(CheckMode::Exhaustive, cx));
    }
    let mut rng = rng_for(options, 5);
    let cx = (0..options.trials).map(|_| random_hypothesis(&mut rng, n)).find(|h| disagrees(h)).map(mk);
    Ok(CheckResult::new(sampled(options), cx))
}

/// For decided `h1`, `h2` on a consistent test: the test accepts
/// Θ − (h1 ∩ h2) exactly when it does not accept both `h1` and `h2`.
pub fn check_nand_lemma(test: &AgnosticTest, h1: &Hypothesis, h2: &Hypothesis) -> Result<bool, ConsistencyError> {
    test.grid().check(h1)?;
    test.grid().check(h2)?;
    let (v1, v2) = (test.verdict(h1), test.verdict(h2));
    if !v1.is_decided() {
        return Err(ConsistencyError::Undecided { position: 1 });
    }
    if !v2.is_decided() {
        return Err(ConsistencyError::Undecided { position: 2 });
    }
    let lhs = test.verdict(&h1.nand(h2)) == ModalVerdict::Accept;
    let rhs = !(v1 == ModalVerdict::Accept && v2 == ModalVerdict::Accept);
    Ok(lhs == rhs)
}

/// Every decided pair on a small grid; returns the first failing pair.
pub fn nand_sweep(test: &AgnosticTest) -> Result<Option<(Hypothesis, Hypothesis)>, ConsistencyError> {
    let n = test.grid().len();
    if n > EXHAUSTIVE_PAIR_LIMIT {
        return Err(LatticeError::SizeGuard { found: n, max: EXHAUSTIVE_PAIR_LIMIT }.into());
    }
    let decided: Vec<Hypothesis> = Subsets::new(n)?.filter(|h| test.verdict(h).is_decided()).collect();
    for a in &decided {
        for b in &decided {
            if !check_nand_lemma(test, a, b)? {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::Posterior;
    use crate::decisions::{build_cutoff_test, CutoffPair};
    use crate::modality::ModalVerdict::*;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    fn region_test(n: usize, idx: &[usize]) -> AgnosticTest {
        let grid = ParameterGrid::uniform(n).unwrap();
        AgnosticTest::region(grid, Hypothesis::from_indices(n, idx.iter().copied()).unwrap()).unwrap()
    }

    fn cutoff(masses: &[f64], c1: f64, c2: f64) -> AgnosticTest {
        build_cutoff_test(&Posterior::on_uniform_grid(masses).unwrap(), CutoffPair::new(c1, c2).unwrap())
    }

    fn uniform5() -> AgnosticTest {
        cutoff(&[0.2; 5], 0.75, 0.25)
    }

    #[test]
    fn invertibility_examples() {
        assert!(check_invertibility(&region_test(3, &[0]), &opts()).passed);
        let g3 = cutoff(&[0.5, 0.3, 0.2], 0.75, 0.25);
        let h1 = Hypothesis::from_indices(3, [0]).unwrap();
        assert_eq!(g3.verdict(&h1), Agnostic);
        assert_eq!(g3.verdict(&h1.complement()), Agnostic);
        assert!(check_invertibility(&g3, &opts()).passed);

        let constant = AgnosticTest::constant(ParameterGrid::uniform(3).unwrap(), Accept).unwrap();
        let result = check_invertibility(&constant, &opts());
        assert!(!result.passed);
        let cx = result.counterexample.unwrap();
        let hs = cx.hypotheses(constant.grid());
        assert_eq!(hs[1], hs[0].complement());
        assert!(cx.violated_by(&constant));
    }

    #[test]
    fn monotonicity_examples() {
        assert!(check_monotonicity(&region_test(4, &[1, 2]), &opts()).passed);
        assert!(check_monotonicity(&cutoff(&[0.5, 0.3, 0.2], 0.75, 0.25), &opts()).passed);

        let grid = ParameterGrid::uniform(3).unwrap();
        let table = AgnosticTest::table_from_fn(grid, |h| match h.mask().unwrap() {
            0b001 => Accept,
            0b011 => Reject,
            _ => Agnostic,
        })
        .unwrap();
        let result = check_monotonicity(&table, &opts());
        assert!(!result.passed);
        let cx = result.counterexample.unwrap();
        assert!(cx.violated_by(&table));
        let Counterexample::Monotonicity { smaller, larger } = cx else { panic!("wrong kind") };
        assert!(smaller.is_subset(&larger));
    }

    #[test]
    fn consonance_examples() {
        assert!(check_union_consonance(&region_test(5, &[0, 3]), &opts()).passed);
        assert!(check_intersection_consonance(&region_test(5, &[0, 3]), &opts()).passed);

        let u = uniform5();
        let union = check_union_consonance(&u, &opts());
        assert!(!union.passed);
        assert!(union.counterexample.as_ref().unwrap().violated_by(&u));
        let inter = check_intersection_consonance(&u, &opts());
        assert!(!inter.passed);
        assert!(inter.counterexample.as_ref().unwrap().violated_by(&u));

        let agnostic = AgnosticTest::constant(ParameterGrid::uniform(4).unwrap(), Agnostic).unwrap();
        assert!(check_union_consonance(&agnostic, &opts()).passed);
        assert!(check_intersection_consonance(&agnostic, &opts()).passed);
    }

    #[test]
    fn classify_examples() {
        let report = classify(&region_test(3, &[0, 1]), &opts());
        assert!(report.overall);
        assert_eq!(report.mode, CheckMode::Exhaustive);

        let report = classify(&uniform5(), &opts());
        assert!(!report.overall);
        assert!(!report.union_consonance.passed && !report.intersection_consonance.passed);
        assert_eq!(report.counterexamples().count(), 2);

        let constant = AgnosticTest::constant(ParameterGrid::uniform(3).unwrap(), Accept).unwrap();
        let report = classify(&constant, &opts());
        assert!(!report.invertibility.passed);
        assert!(report.accepts_theta.passed);
        assert!(!report.overall);
    }

    // The cutoff test on (0.5, 0.3, 0.2) with cutoffs (0.75, 0.25) is the
    // region test of {t1, t2}: all eight verdicts agree.
    #[test]
    fn g3_cutoff_test_is_consistent() {
        let g3 = cutoff(&[0.5, 0.3, 0.2], 0.75, 0.25);
        assert!(classify(&g3, &opts()).overall);
        let s = extract_region(&g3, &opts()).unwrap();
        assert_eq!(s, Hypothesis::from_indices(3, [0, 1]).unwrap());
    }

    #[test]
    fn extract_region_examples() {
        let s = Hypothesis::from_indices(4, [0, 1]).unwrap();
        let test = region_test(4, &[0, 1]);
        assert_eq!(extract_region(&test, &opts()).unwrap(), s);
        assert_eq!(extract_region(&region_test(4, &[2]), &opts()).unwrap(), Hypothesis::singleton(4, 2).unwrap());
        assert!(matches!(extract_region(&uniform5(), &opts()), Err(ConsistencyError::Inconsistent(_))));
    }

    #[test]
    fn representation_examples() {
        let test = region_test(4, &[1, 3]);
        let s = Hypothesis::from_indices(4, [1, 3]).unwrap();
        assert!(verify_representation(&test, &s, &opts()).unwrap().passed);
        let other = Hypothesis::from_indices(4, [1]).unwrap();
        let result = verify_representation(&test, &other, &opts()).unwrap();
        assert!(!result.passed);
        assert!(result.counterexample.unwrap().violated_by(&test));

        let u = uniform5();
        for s in Subsets::new(5).unwrap() {
            match verify_representation(&u, &s, &opts()) {
                Ok(r) => assert!(!r.passed),
                Err(e) => assert_eq!(e, LatticeError::EmptyRegion),
            }
        }
    }

    #[test]
    fn nand_examples() {
        let t = region_test(3, &[0]);
        let h = |idx: &[usize]| Hypothesis::from_indices(3, idx.iter().copied()).unwrap();
        // both accepted; nand = {t2, t3} is rejected
        assert_eq!(t.verdict(&h(&[0, 1]).nand(&h(&[0, 2]))), Reject);
        assert!(check_nand_lemma(&t, &h(&[0, 1]), &h(&[0, 2])).unwrap());
        // accepted and rejected; nand = Θ is accepted
        assert_eq!(t.verdict(&h(&[0]).nand(&h(&[1]))), Accept);
        assert!(check_nand_lemma(&t, &h(&[0]), &h(&[1])).unwrap());

        let t = region_test(3, &[0, 1]);
        assert!(matches!(
            check_nand_lemma(&t, &h(&[0]), &h(&[0, 1])),
            Err(ConsistencyError::Undecided { position: 1 })
        ));
        assert!(matches!(
            check_nand_lemma(&t, &h(&[0, 1]), &h(&[1])),
            Err(ConsistencyError::Undecided { position: 2 })
        ));
    }

    #[test]
    fn nand_fails_on_inconsistent_tests() {
        assert!(nand_sweep(&uniform5()).unwrap().is_none());
        // accepting everything accepts Θ and also Θ ↑ Θ = ∅
        let always = AgnosticTest::constant(ParameterGrid::uniform(3).unwrap(), Accept).unwrap();
        let (a, b) = nand_sweep(&always).unwrap().unwrap();
        assert!(!check_nand_lemma(&always, &a, &b).unwrap());
        let full = Hypothesis::full(3);
        assert!(!check_nand_lemma(&always, &full, &full).unwrap());
    }

    #[test]
    fn sampled_mode_on_large_grids() {
        let n = 40;
        let grid = Arc::new(ParameterGrid::uniform(n).unwrap());
        let s = Hypothesis::from_indices(n, [3, 17, 39]).unwrap();
        let test = AgnosticTest::region(Arc::clone(&grid), s.clone()).unwrap();
        let options = CheckOptions { seed: 7, trials: 2_000 };
        let report = classify(&test, &options);
        assert!(report.overall);
        assert_eq!(report.mode, CheckMode::Sampled { seed: 7, trials: 2_000 });
        assert_eq!(extract_region(&test, &options).unwrap(), s);
        assert!(verify_representation(&test, &s, &options).unwrap().passed);

        let masses = vec![1.0 / n as f64; n];
        let posterior = Posterior::from_masses(grid, masses).unwrap();
        let bad = build_cutoff_test(&posterior, CutoffPair::new(0.9, 0.1).unwrap());
        let report = classify(&bad, &options);
        assert!(!report.union_consonance.passed);
        assert!(report.union_consonance.counterexample.as_ref().unwrap().violated_by(&bad));
        // same seed, same result
        assert_eq!(classify(&bad, &options), report);
    }

    #[test]
    fn report_json_uses_ids() {
        let report = classify(&uniform5(), &opts());
        let value = report.to_json(&uniform5());
        assert_eq!(value["overall"], json!(false));
        let hs = &value["union_consonance"]["counterexample"]["hypotheses"];
        assert!(hs[0].as_array().unwrap().iter().all(|id| id.as_str().unwrap().starts_with('t')));
    }

    fn arb_region() -> impl Strategy<Value = AgnosticTest> {
        (2usize..=8).prop_flat_map(|n| (Just(n), 1u64..(1 << n))).prop_map(|(n, m)| {
            AgnosticTest::region(ParameterGrid::uniform(n).unwrap(), Hypothesis::from_mask(n, m)).unwrap()
        })
    }

    fn arb_invertible_table() -> impl Strategy<Value = AgnosticTest> {
        (1usize..=5).prop_flat_map(|n| (Just(n), prop::collection::vec(0u8..3, 1 << n))).prop_map(|(n, raw)| {
            let full = (1usize << n) - 1;
            let mut verdicts = vec![Agnostic; 1 << n];
            for m in 0..=full {
                let c = full ^ m;
                if m <= c {
                    let (v, w) = match raw[m] {
                        0 => (Accept, Reject),
                        1 => (Reject, Accept),
                        _ => (Agnostic, Agnostic),
                    };
                    verdicts[m] = v;
                    verdicts[c] = if m == c { v } else { w };
                }
            }
            AgnosticTest::table(ParameterGrid::uniform(n).unwrap(), verdicts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn region_tests_are_consistent(test in arb_region()) {
            let report = classify(&test, &opts());
            prop_assert!(report.overall);
            let s = extract_region(&test, &opts()).unwrap();
            prop_assert_eq!(&s, &region_by_accepted_intersection(&test).unwrap());
            prop_assert!(verify_representation(&test, &s, &opts()).unwrap().passed);
        }

        #[test]
        fn transitivity_chains(test in arb_region(), m in any::<u64>()) {
            let h = Hypothesis::from_mask(test.grid().len(), m);
            let (v, w) = (test.verdict(&h), test.verdict(&h.complement()));
            if v == Reject {
                prop_assert_eq!(w, Accept);
            }
            if v == Accept {
                prop_assert_eq!(w, Reject);
                prop_assert!(w != Agnostic);
            }
        }

        #[test]
        fn consonances_equivalent_under_invertibility(test in arb_invertible_table()) {
            prop_assert!(check_invertibility(&test, &opts()).passed);
            let u = check_union_consonance(&test, &opts()).passed;
            let i = check_intersection_consonance(&test, &opts()).passed;
            prop_assert_eq!(u, i);
        }

        #[test]
        fn counterexamples_replay(raw in prop::collection::vec(0u8..3, 16)) {
            let verdicts = raw.iter().map(|r| ModalVerdict::ALL[*r as usize]).collect();
            let test = AgnosticTest::table(ParameterGrid::uniform(4).unwrap(), verdicts).unwrap();
            let report = classify(&test, &opts());
            let all_passed = report.checks().iter().all(|(_, c)| c.passed);
            prop_assert_eq!(report.overall, all_passed);
            for cx in report.counterexamples() {
                prop_assert!(cx.violated_by(&test));
            }
            if report.overall {
                prop_assert_eq!(extract_region(&test, &opts()).unwrap(), region_by_accepted_intersection(&test).unwrap());
            }
        }
    }
}
