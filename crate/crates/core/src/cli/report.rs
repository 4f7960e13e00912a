//! Reports produced by `run`, `check` and `demo`.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Resolved, ResolvedTest};
use super::render::{render_svg_stack, GlyphStyle, HexagonState};
use super::CliError;
use crate::bayes::Posterior;
use crate::consistency::{
    check_intersection_consonance, check_union_consonance, classify, extract_region, verify_representation,
    CheckOptions, CheckResult, ConsistencyReport,
};
use crate::decisions::{
    build_cutoff_test, consonance_failure_witness, cutoff_test, expected_losses, ConsonanceWitness, CutoffPair,
    ExpectedLosses,
};
use crate::fbst::{
    build_fbst_test, build_gfbst_test, ev, fbst, gfbst, gfbst_region, surprise, GfbstConfig, SurpriseProfile,
};
use crate::lattice::{AgnosticTest, Hypothesis, ParameterGrid};
use crate::modality::{modalities_of, ModalVerdict, Modality};

fn id_list(grid: &ParameterGrid, h: &Hypothesis) -> Vec<String> {
    grid.ids_of(h)
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub hypothesis: Vec<String>,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ev_complement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent_set: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_losses: Option<ExpectedLosses>,
    pub verdict: ModalVerdict,
    pub modalities: Vec<Modality>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Run {
    pub test: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<String>>,
    pub rows: Vec<Row>,
    #[serde(skip)]
    style: GlyphStyle,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub grid: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior: Option<Vec<f64>>,
    pub runs: Vec<Run>,
}

fn profile_for(
    posterior: &Posterior,
    tie_tolerance: f64,
    reference: crate::fbst::Reference,
) -> Result<SurpriseProfile, CliError> {
    surprise(posterior, reference).with_tie_tolerance(tie_tolerance).map_err(|e| CliError::Evaluation(e.to_string()))
}

fn base_row(resolved: &Resolved, label: &str, h: &Hypothesis, verdict: ModalVerdict) -> Row {
    Row {
        hypothesis: id_list(resolved.grid(), h),
        label: label.to_string(),
        posterior_prob: resolved.posterior.as_ref().map(|p| p.prob(h)),
        ev: None,
        ev_complement: None,
        tangent_set: None,
        expected_losses: None,
        verdict,
        modalities: modalities_of(verdict).holding(),
    }
}

pub fn run_report(resolved: &Resolved) -> Result<RunReport, CliError> {
    let grid = resolved.grid();
    let mut runs = Vec::new();
    match &resolved.test {
        ResolvedTest::Cutoff { cuts, loss } => {
            let posterior = resolved.require_posterior()?;
            let rows = resolved
                .hypotheses
                .iter()
                .map(|rh| {
                    let mut row =
                        base_row(resolved, &rh.label, &rh.hypothesis, cutoff_test(posterior, &rh.hypothesis, cuts));
                    row.expected_losses = loss.as_ref().map(|l| expected_losses(posterior.prob(&rh.hypothesis), l));
                    row
                })
                .collect();
            runs.push(Run {
                test: cutoff_description(cuts),
                c: None,
                region: None,
                rows,
                style: GlyphStyle::Probabilistic,
            });
        }
        ResolvedTest::Evidence { generalized, configs, tie_tolerance, reference } => {
            let posterior = resolved.require_posterior()?;
            let profile = profile_for(posterior, *tie_tolerance, *reference)?;
            for config in configs {
                let rows = resolved
                    .hypotheses
                    .iter()
                    .map(|rh| {
                        let h = &rh.hypothesis;
                        let verdict = if *generalized {
                            gfbst(posterior, &profile, h, config)
                        } else {
                            fbst(posterior, &profile, h, config)
                        };
                        let e = ev(posterior, &profile, h);
                        let mut row = base_row(resolved, &rh.label, h, verdict);
                        row.ev = Some(e.value);
                        row.ev_complement = Some(ev(posterior, &profile, &h.complement()).value);
                        row.tangent_set = Some(id_list(grid, &e.tangent_set));
                        row
                    })
                    .collect();
                let test = evidence_test(posterior, &profile, *config, *generalized).description();
                let region = generalized.then(|| id_list(grid, &gfbst_region(posterior, &profile, config)));
                runs.push(Run { test, c: Some(config.cutoff()), region, rows, style: GlyphStyle::Alethic });
            }
        }
        ResolvedTest::Region(s) => {
            let test = AgnosticTest::region(resolved.model.shared_grid(), s.clone())
                .map_err(|e| CliError::Evaluation(e.to_string()))?;
            let rows = resolved
                .hypotheses
                .iter()
                .map(|rh| base_row(resolved, &rh.label, &rh.hypothesis, test.verdict(&rh.hypothesis)))
                .collect();
            runs.push(Run {
                test: test.description(),
                c: None,
                region: Some(id_list(grid, s)),
                rows,
                style: GlyphStyle::Alethic,
            });
        }
    }
    Ok(RunReport {
        grid: grid.points().iter().map(|p| p.id.clone()).collect(),
        posterior: resolved.posterior.as_ref().map(|p| p.masses().to_vec()),
        runs,
    })
}

fn cutoff_description(cuts: &CutoffPair) -> String {
    format!("posterior cutoff (c1 = {}, c2 = {})", cuts.upper(), cuts.lower())
}

fn evidence_test(
    posterior: &Posterior,
    profile: &SurpriseProfile,
    config: GfbstConfig,
    generalized: bool,
) -> AgnosticTest {
    if generalized {
        build_gfbst_test(posterior, profile, config)
    } else {
        build_fbst_test(posterior, profile, config)
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

pub fn run_text(report: &RunReport) -> String {
    let mut out = String::new();
    if let Some(p) = &report.posterior {
        let masses: Vec<String> = report.grid.iter().zip(p).map(|(id, m)| format!("{id}={m:.6}")).collect();
        let _ = writeln!(out, "posterior: {}", masses.join(" "));
    }
    for run in &report.runs {
        let _ = writeln!(out, "test: {}", run.test);
        if let Some(region) = &run.region {
            let _ = writeln!(out, "region: {{{}}}", region.join(", "));
        }
        let _ = writeln!(
            out,
            "{:<24} {:>10} {:>10} {:>10}  {:<9} modalities",
            "hypothesis", "p(H|x)", "ev(H)", "ev(~H)", "verdict"
        );
        for row in &run.rows {
            let mods: Vec<String> = row.modalities.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(
                out,
                "{:<24} {:>10} {:>10} {:>10}  {:<9} {}",
                row.label,
                opt(row.posterior_prob),
                opt(row.ev),
                opt(row.ev_complement),
                row.verdict.as_str(),
                mods.join(" ")
            );
        }
    }
    out
}

pub fn run_svg(report: &RunReport) -> String {
    let states: Vec<HexagonState> = report
        .runs
        .iter()
        .flat_map(|run| {
            run.rows.iter().map(move |row| {
                let label = match run.c {
                    Some(c) => format!("{}: {} (c = {c})", row.label, row.verdict),
                    None => format!("{}: {}", row.label, row.verdict),
                };
                HexagonState::from_verdict(label, row.verdict, run.style)
            })
        })
        .collect();
    render_svg_stack(&states)
}

/// Every test described by the config, ready to be checked.
pub fn build_tests(resolved: &Resolved) -> Result<Vec<AgnosticTest>, CliError> {
    match &resolved.test {
        ResolvedTest::Cutoff { cuts, .. } => Ok(vec![build_cutoff_test(resolved.require_posterior()?, *cuts)]),
        ResolvedTest::Evidence { generalized, configs, tie_tolerance, reference } => {
            let posterior = resolved.require_posterior()?;
            let profile = profile_for(posterior, *tie_tolerance, *reference)?;
            Ok(configs.iter().map(|c| evidence_test(posterior, &profile, *c, *generalized)).collect())
        }
        ResolvedTest::Region(s) => Ok(vec![AgnosticTest::region(resolved.model.shared_grid(), s.clone())
            .map_err(|e| CliError::Evaluation(e.to_string()))?]),
    }
}

pub struct CheckOutcome {
    pub test: AgnosticTest,
    pub report: ConsistencyReport,
    pub region: Option<Hypothesis>,
    pub representation: Option<CheckResult>,
}

pub fn check_tests(tests: Vec<AgnosticTest>, options: &CheckOptions) -> Result<Vec<CheckOutcome>, CliError> {
    tests
        .into_iter()
        .map(|test| {
            let report = classify(&test, options);
            let (region, representation) = if report.overall {
                let region = extract_region(&test, options).map_err(|e| CliError::Evaluation(e.to_string()))?;
                let rep =
                    verify_representation(&test, &region, options).map_err(|e| CliError::Evaluation(e.to_string()))?;
                (Some(region), Some(rep))
            } else {
                (None, None)
            };
            Ok(CheckOutcome { test, report, region, representation })
        })
        .collect()
}

pub fn check_json(outcomes: &[CheckOutcome]) -> String {
    let reports: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut v = o.report.to_json(&o.test);
            if let (Some(region), Some(rep)) = (&o.region, &o.representation) {
                v["region"] = json!(o.test.grid().ids_of(region));
                v["representation"] = rep.to_json(&o.test);
            }
            v
        })
        .collect();
    to_json_text(&json!({ "overall": outcomes.iter().all(|o| o.report.overall), "reports": reports }))
}

fn describe_counterexample(test: &AgnosticTest, result: &CheckResult) -> String {
    let Some(cx) = &result.counterexample else { return String::new() };
    let grid = test.grid();
    let parts: Vec<String> =
        cx.hypotheses(grid).iter().map(|h| format!("{} -> {}", grid.describe(h), test.verdict(h))).collect();
    format!("  counterexample: {}", parts.join("; "))
}

fn mode_text(result: &CheckResult) -> String {
    match result.mode {
        crate::consistency::CheckMode::Exhaustive => "exhaustive".into(),
        crate::consistency::CheckMode::Sampled { seed, trials } => format!("sampled, seed {seed}, {trials} trials"),
    }
}

pub fn check_text(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let _ = writeln!(out, "test: {}", o.test.description());
        for (name, result) in o.report.checks() {
            let status = if result.passed { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "  {name:<25} {status} ({}){}",
                mode_text(result),
                describe_counterexample(&o.test, result)
            );
        }
        let _ = writeln!(out, "overall: {}", if o.report.overall { "consistent" } else { "inconsistent" });
        if let (Some(region), Some(rep)) = (&o.region, &o.representation) {
            let status = if rep.passed { "matches" } else { "does not match" };
            let _ = writeln!(out, "region: {} ({status} the region test)", o.test.grid().describe(region));
        }
    }
    out
}

pub struct DemoOutcome {
    pub witness: ConsonanceWitness,
    pub test: AgnosticTest,
    pub union_consonance: CheckResult,
    pub intersection_consonance: CheckResult,
}

pub fn demo(cuts: CutoffPair, n: usize, options: &CheckOptions) -> Result<DemoOutcome, CliError> {
    let witness = consonance_failure_witness(cuts, n).map_err(|e| CliError::Config(e.into()))?;
    let test = build_cutoff_test(&witness.posterior, cuts);
    let union_consonance = check_union_consonance(&test, options);
    let intersection_consonance = check_intersection_consonance(&test, options);
    Ok(DemoOutcome { witness, test, union_consonance, intersection_consonance })
}

fn part_json(d: &DemoOutcome, h: &Hypothesis) -> Value {
    json!({
        "hypothesis": d.test.grid().ids_of(h),
        "posterior_prob": d.witness.posterior.prob(h),
        "verdict": d.test.verdict(h),
    })
}

pub fn demo_json(d: &DemoOutcome) -> String {
    let union = d.test.grid().full();
    to_json_text(&json!({
        "c1": d.witness.cuts.upper(),
        "c2": d.witness.cuts.lower(),
        "points": d.test.grid().len(),
        "parts": d.witness.partition.iter().map(|h| part_json(d, h)).collect::<Vec<_>>(),
        "union": part_json(d, &union),
        "union_consonance": d.union_consonance.to_json(&d.test),
        "intersection_consonance": d.intersection_consonance.to_json(&d.test),
    }))
}

pub fn demo_text(d: &DemoOutcome) -> String {
    let grid = d.test.grid();
    let mut out = String::new();
    let _ = writeln!(out, "{} on a uniform posterior over {} points", cutoff_description(&d.witness.cuts), grid.len());
    let _ = writeln!(out, "partition of the parameter space:");
    for h in &d.witness.partition {
        let _ =
            writeln!(out, "  {:<12} p = {:.6}  {}", grid.describe(h), d.witness.posterior.prob(h), d.test.verdict(h));
    }
    let full = grid.full();
    let _ = writeln!(
        out,
        "union {:<12} p = {:.6}  {}",
        grid.describe(&full),
        d.witness.posterior.prob(&full),
        d.test.verdict(&full)
    );
    for (name, result) in
        [("union consonance", &d.union_consonance), ("intersection consonance", &d.intersection_consonance)]
    {
        let status = if result.passed { "holds" } else { "fails" };
        let _ = writeln!(out, "{name}: {status}{}", describe_counterexample(&d.test, result));
    }
    out
}
