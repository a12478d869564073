use std::fmt::Write as _;

use epm_core::game::{
    check_epm, observation_stage, observation_stage_by_scan, EpmStatus, PerfectRecallReport, Player, RecallCondition,
};
use epm_core::random::random_strategy;
use epm_core::reduction::{compare_values, CompareOptions, SnapChain};
use epm_core::scalar::ratio;
use epm_core::scenarios::{run_fixture, scenario_suite, Scenario, ScenarioParams};
use epm_core::solver::{brute_force_value, sequence_form_value, ValueReport};
use epm_core::strategy::{build_grids, coupled_sample, payoff, snap_strategy, strategy_distance};
use epm_core::{Rational, Scalar};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{format_mask, strategy_doc, strategy_from_doc, Mode, Resolved, StrategyDoc};
use crate::error::CliError;
use crate::report::{columns, Status, Table};

/// A command's result plus the assertions it made.
pub struct Finished<R> {
    pub result: R,
    pub diagnostics: Vec<String>,
}

impl<R> Finished<R> {
    pub fn status(&self) -> Status {
        if self.diagnostics.is_empty() {
            Status::Ok
        } else {
            Status::AssertionFailed
        }
    }
}

fn player(p: Player) -> &'static str {
    match p {
        Player::One => "one",
        Player::Two => "two",
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn any_diagnostic_fails_the_run() {
        let ok = Finished {
            result: (),
            diagnostics: Vec::new(),
        };
        assert_eq!(ok.status(), Status::Ok);
        let bad = Finished {
            result: (),
            diagnostics: vec!["gap".to_string()],
        };
        assert_eq!(bad.status(), Status::AssertionFailed);
    }
}

// ---- check

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub histories: usize,
    pub winning: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<String>,
    pub atoms_per_stage: Vec<usize>,
    pub perfect_recall: RecallResult,
    pub epm: EpmResult,
    pub observation_stages: Vec<StageRow>,
}

#[derive(Debug, Serialize)]
pub struct RecallResult {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Debug, Serialize)]
pub struct Violation {
    pub stage: usize,
    pub condition: &'static str,
    pub first: String,
    pub second: String,
}

#[derive(Debug, Serialize)]
pub struct EpmResult {
    pub terminal_revelation: bool,
    pub holds: bool,
    pub failures: Vec<EpmRow>,
    pub entries: Vec<EpmRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpmRow {
    pub stage: usize,
    pub observer: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct StageRow {
    pub stage: usize,
    pub mover: &'static str,
    pub tree: Option<usize>,
    pub scan: Option<usize>,
}

pub fn check(cfg: &Resolved) -> Result<Finished<CheckResult>, CliError> {
    let g = &cfg.game;
    let m = g.monitoring();
    let perfect_recall = match m.check_perfect_recall() {
        PerfectRecallReport::Ok => RecallResult {
            holds: true,
            violation: None,
        },
        PerfectRecallReport::Violation(v) => RecallResult {
            holds: false,
            violation: Some(Violation {
                stage: v.stage,
                condition: match v.condition {
                    RecallCondition::OwnActions => "own-actions",
                    RecallCondition::NoForgetting => "no-forgetting",
                },
                first: m.actions().format_history(v.first.actions()),
                second: m.actions().format_history(v.second.actions()),
            }),
        },
    };
    let report = check_epm(m, cfg.terminal_revelation)?;
    let row = |e: &epm_core::game::EpmEntry| {
        let (status, at) = match e.status {
            EpmStatus::Observed(n) => ("observed", Some(n)),
            EpmStatus::BeyondHorizon(n) => ("beyond-horizon", Some(n)),
            EpmStatus::NotObserved => ("not-observed", None),
        };
        EpmRow {
            stage: e.stage,
            observer: player(e.observer),
            status,
            at,
        }
    };
    let epm = EpmResult {
        terminal_revelation: report.terminal_revelation,
        holds: report.is_ok(),
        failures: report.failures().into_iter().map(row).collect(),
        entries: report.entries.iter().map(row).collect(),
    };
    let mut observation_stages = Vec::new();
    for stage in 0..m.horizon() {
        let tree = observation_stage(m, stage)?;
        let scan = observation_stage_by_scan(m, stage)?;
        if tree != scan {
            return Err(CliError::Invariant(format!(
                "observation stage of {stage}: tree gives {tree:?}, scan gives {scan:?}"
            )));
        }
        observation_stages.push(StageRow {
            stage,
            mover: player(Player::mover(stage)),
            tree,
            scan,
        });
    }
    // checks report, they never fail the run
    Ok(Finished {
        result: CheckResult {
            histories: g.winning().len(),
            winning: g.winning().iter().filter(|&&w| w).count(),
            mask: (m.action_count() == 2).then(|| format_mask(g.winning())),
            atoms_per_stage: m.partitions().iter().map(|p| p.len()).collect(),
            perfect_recall,
            epm,
            observation_stages,
        },
        diagnostics: Vec::new(),
    })
}

impl Table for CheckResult {
    fn table(&self, out: &mut String) {
        let _ = writeln!(out, "histories: {} ({} winning)", self.histories, self.winning);
        let _ = writeln!(out, "atoms per stage: {:?}", self.atoms_per_stage);
        match &self.perfect_recall.violation {
            None => {
                let _ = writeln!(out, "perfect recall: holds");
            }
            Some(v) => {
                let _ = writeln!(
                    out,
                    "perfect recall: fails at stage {} ({}): {:?} vs {:?}",
                    v.stage, v.condition, v.first, v.second
                );
            }
        }
        let _ = writeln!(
            out,
            "eventual perfect monitoring: {} ({} failures, terminal revelation {})",
            if self.epm.holds { "holds" } else { "fails" },
            self.epm.failures.len(),
            self.epm.terminal_revelation
        );
        for f in &self.epm.failures {
            let _ = writeln!(out, "  stage {} unseen by player {}: {}", f.stage, f.observer, f.status);
        }
        let mut rows = vec![vec!["m".into(), "mover".into(), "k(m)".into(), "scan".into()]];
        for r in &self.observation_stages {
            rows.push(vec![r.stage.to_string(), r.mover.into(), opt(r.tree), opt(r.scan)]);
        }
        columns(out, &rows);
    }
}

// ---- value

#[derive(Debug, Serialize)]
pub struct ValueResult {
    pub mode: Mode,
    pub method: &'static str,
    pub value: String,
    pub lower: String,
    pub upper: String,
    pub gap: String,
    pub x: StrategyDoc,
    pub y: StrategyDoc,
    pub oracle: Oracle,
}

#[derive(Debug, Serialize)]
pub struct Oracle {
    pub method: &'static str,
    pub ran: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Float answers are accepted within this distance of each other.
const FLOAT_AGREEMENT: f64 = 1e-7;

fn close<T: Scalar>(a: &T, b: &T) -> bool {
    if T::EXACT {
        a == b
    } else {
        (a.clone() - b.clone()).abs().to_f64() <= FLOAT_AGREEMENT
    }
}

fn solve<T: Scalar>(cfg: &Resolved) -> Result<Finished<ValueResult>, CliError> {
    let g = &cfg.game;
    let r: ValueReport<T> = sequence_form_value(g)?;
    let mut diagnostics = Vec::new();
    let gap = r.certificate.gap();
    if !close(&gap, &T::from_ratio(0, 1)) {
        diagnostics.push(format!("best-response gap {} is not zero", gap.render()));
    }
    let oracle = match brute_force_value::<T>(g, cfg.cap_matrix) {
        Ok(b) => {
            let agrees = close(&b.value, &r.value);
            if !agrees {
                diagnostics.push(format!(
                    "brute force gives {}, sequence form {}",
                    b.value.render(),
                    r.value.render()
                ));
            }
            Oracle {
                method: "brute-force",
                ran: true,
                value: Some(b.value.render()),
                agrees: Some(agrees),
                skipped: None,
            }
        }
        // too many pure strategies for the cap: reported, not fatal
        Err(epm_core::Error::Size(why)) => Oracle {
            method: "brute-force",
            ran: false,
            value: None,
            agrees: None,
            skipped: Some(why),
        },
        Err(e) => return Err(e.into()),
    };
    Ok(Finished {
        result: ValueResult {
            mode: cfg.mode,
            method: r.method.name(),
            value: r.value.render(),
            lower: r.certificate.lower.render(),
            upper: r.certificate.upper.render(),
            gap: gap.render(),
            x: strategy_doc(&r.x),
            y: strategy_doc(&r.y),
            oracle,
        },
        diagnostics,
    })
}

pub fn value(cfg: &Resolved) -> Result<Finished<ValueResult>, CliError> {
    match cfg.mode {
        Mode::Rational => solve::<Rational>(cfg),
        Mode::Float => solve::<f64>(cfg),
    }
}

fn strategy_rows(out: &mut String, name: &str, doc: &StrategyDoc) {
    for (stage, atoms) in doc {
        for (atom, dist) in atoms.iter().enumerate() {
            let _ = writeln!(out, "  {name} stage {stage} atom {atom}: [{}]", dist.join(", "));
        }
    }
}

impl Table for ValueResult {
    fn table(&self, out: &mut String) {
        let _ = writeln!(out, "value ({}, {}): {}", self.method, self.mode.name(), self.value);
        let _ = writeln!(out, "bounds: [{}, {}], gap {}", self.lower, self.upper, self.gap);
        match (&self.oracle.value, &self.oracle.skipped) {
            (Some(v), _) => {
                let _ = writeln!(out, "oracle ({}): {v}, agrees {}", self.oracle.method, self.oracle.agrees == Some(true));
            }
            (None, Some(why)) => {
                let _ = writeln!(out, "oracle ({}) skipped: {why}", self.oracle.method);
            }
            _ => {}
        }
        strategy_rows(out, "x", &self.x);
        strategy_rows(out, "y", &self.y);
    }
}

// ---- reduce

#[derive(Debug, Serialize)]
pub struct ReduceResult {
    pub epsilon: String,
    pub value: String,
    pub aux_value: String,
    pub difference: String,
    pub bound: String,
    pub checks: Vec<CheckRow>,
    pub aux: AuxSummary,
    pub upper: Chain,
    pub lower: Chain,
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
pub struct AuxSummary {
    pub nodes_per_stage: Vec<usize>,
    pub support_per_stage: Vec<usize>,
    pub memo_hits: usize,
    pub combinations: usize,
    pub largest_component: usize,
}

/// One side of the sandwich: a snapped optimal strategy and the numbers
/// the chain of inequalities compares.
#[derive(Debug, Serialize)]
pub struct Chain {
    pub snapped: &'static str,
    pub distance: String,
    pub aux_response: String,
    pub projected_payoff: String,
    pub enumerated_payoff: String,
    pub base_response: String,
}

fn chain(c: &SnapChain) -> Chain {
    Chain {
        snapped: player(c.snapped.owner()),
        distance: c.distance.render(),
        aux_response: c.aux_response.render(),
        projected_payoff: c.projected_payoff.render(),
        enumerated_payoff: c.enumerated_payoff.render(),
        base_response: c.base_response.render(),
    }
}

pub fn reduce(cfg: &Resolved) -> Result<Finished<ReduceResult>, CliError> {
    if cfg.mode != Mode::Rational {
        return Err(CliError::Config("reduce runs in exact arithmetic only; use --mode rational".into()));
    }
    let options = CompareOptions {
        grid_cap: cfg.grid_cap,
        aux: cfg.aux.clone(),
    };
    let r = compare_values(&cfg.game, &cfg.epsilon, &options)?;
    let diagnostics = r
        .failures()
        .iter()
        .map(|c| format!("sandwich check failed: {}", c.name))
        .collect();
    let s = &r.aux_stats;
    Ok(Finished {
        result: ReduceResult {
            epsilon: r.epsilon.render(),
            value: r.value.render(),
            aux_value: r.aux_value.render(),
            difference: (&r.value - &r.aux_value).abs().render(),
            bound: (&r.epsilon * ratio(2, 1)).render(),
            checks: r
                .checks
                .iter()
                .map(|c| CheckRow {
                    name: c.name.clone(),
                    holds: c.holds,
                })
                .collect(),
            aux: AuxSummary {
                nodes_per_stage: s.nodes_per_stage.clone(),
                support_per_stage: s.support_per_stage.clone(),
                memo_hits: s.memo_hits,
                combinations: s.combinations,
                largest_component: s.largest_component,
            },
            upper: chain(&r.upper),
            lower: chain(&r.lower),
        },
        diagnostics,
    })
}

impl Table for ReduceResult {
    fn table(&self, out: &mut String) {
        let _ = writeln!(out, "epsilon {}: v = {}, v* = {}", self.epsilon, self.value, self.aux_value);
        let _ = writeln!(out, "|v - v*| = {} (bound {})", self.difference, self.bound);
        let mut rows = vec![vec!["check".to_string(), "holds".to_string()]];
        rows.extend(self.checks.iter().map(|c| vec![c.name.clone(), c.holds.to_string()]));
        columns(out, &rows);
        let _ = writeln!(
            out,
            "aux nodes per stage {:?}, memo hits {}, largest component {}",
            self.aux.nodes_per_stage, self.aux.memo_hits, self.aux.largest_component
        );
    }
}

// ---- couple

#[derive(Debug, Serialize)]
pub struct CoupleResult {
    pub source: &'static str,
    pub payoff: String,
    pub payoff_alt: String,
    pub payoff_gap: String,
    pub bound: String,
    pub bound_holds: bool,
    pub samples: usize,
    pub diverged: usize,
    pub divergence_rate: f64,
    pub rate_limit: f64,
    pub rate_holds: bool,
    pub x: StrategyDoc,
    pub y: StrategyDoc,
    pub x_alt: StrategyDoc,
    pub y_alt: StrategyDoc,
}

pub fn couple(cfg: &Resolved) -> Result<Finished<CoupleResult>, CliError> {
    let g = &cfg.game;
    let m = g.monitoring();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (source, [x, y, x2, y2]) = match &cfg.document.couple {
        Some(c) => (
            "config",
            [
                strategy_from_doc(&c.x, Player::One, m)?,
                strategy_from_doc(&c.y, Player::Two, m)?,
                strategy_from_doc(&c.x_alt, Player::One, m)?,
                strategy_from_doc(&c.y_alt, Player::Two, m)?,
            ],
        ),
        None => {
            // random strategies and their snaps onto the epsilon grids
            let x = random_strategy(Player::One, m, 6, &mut rng);
            let y = random_strategy(Player::Two, m, 6, &mut rng);
            let grids = build_grids(m.action_count(), &cfg.epsilon, m.horizon(), cfg.grid_cap)?;
            let x2 = snap_strategy(&x, &grids)?;
            let y2 = snap_strategy(&y, &grids)?;
            ("random", [x, y, x2, y2])
        }
    };
    let p = payoff(&x, &y, g)?;
    let p2 = payoff(&x2, &y2, g)?;
    let gap = (&p - &p2).abs();
    let bound = (strategy_distance(&x, &x2)? + strategy_distance(&y, &y2)?) / ratio(2, 1);
    let mut diverged = 0usize;
    for _ in 0..cfg.samples {
        diverged += usize::from(coupled_sample(&x, &y, &x2, &y2, m, &mut rng)?.divergence.is_some());
    }
    let rate = if cfg.samples == 0 { 0.0 } else { diverged as f64 / cfg.samples as f64 };
    let b = bound.to_f64().min(1.0);
    let limit = b + 3.0 * (b * (1.0 - b) / cfg.samples.max(1) as f64).sqrt();
    let mut diagnostics = Vec::new();
    if gap > bound {
        diagnostics.push(format!("payoff gap {} exceeds the coupling bound {}", gap.render(), bound.render()));
    }
    if rate > limit {
        diagnostics.push(format!("divergence rate {rate} exceeds bound + 3 sigma = {limit}"));
    }
    Ok(Finished {
        result: CoupleResult {
            source,
            payoff: p.render(),
            payoff_alt: p2.render(),
            payoff_gap: gap.render(),
            bound_holds: gap <= bound,
            bound: bound.render(),
            samples: cfg.samples,
            diverged,
            divergence_rate: rate,
            rate_limit: limit,
            rate_holds: rate <= limit,
            x: strategy_doc(&x),
            y: strategy_doc(&y),
            x_alt: strategy_doc(&x2),
            y_alt: strategy_doc(&y2),
        },
        diagnostics,
    })
}

impl Table for CoupleResult {
    fn table(&self, out: &mut String) {
        let _ = writeln!(out, "strategies: {}", self.source);
        let _ = writeln!(
            out,
            "payoffs {} and {}: gap {} <= bound {}: {}",
            self.payoff, self.payoff_alt, self.payoff_gap, self.bound, self.bound_holds
        );
        let _ = writeln!(
            out,
            "divergence {}/{} = {:.5} <= {:.5}: {}",
            self.diverged, self.samples, self.divergence_rate, self.rate_limit, self.rate_holds
        );
    }
}

// ---- example

/// Resolved scenario parameters, echoed as the report's config.
#[derive(Debug, Serialize)]
pub struct ExampleConfig {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    pub delay: usize,
    pub horizon: usize,
    pub leave_by: usize,
    pub battery: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ExampleResult {
    pub fixtures: Vec<FixtureRow>,
}

#[derive(Debug, Serialize)]
pub struct FixtureRow {
    pub name: String,
    pub summary: String,
    pub check: &'static str,
    pub monitoring: &'static str,
    pub horizon: usize,
    pub tails: String,
    pub expected: String,
    pub evaluated: usize,
    pub mismatches: usize,
    /// Distinct observed values, ascending.
    pub observed: Vec<String>,
    pub passed: bool,
}

pub fn example(
    scenario: Scenario,
    params: &ScenarioParams,
    only: Option<&str>,
) -> Result<(ExampleConfig, Finished<ExampleResult>), CliError> {
    let params = params.resolve(scenario)?;
    let suite = scenario_suite(scenario, &params)?;
    let names: Vec<&str> = suite.iter().map(|f| f.name.as_str()).collect();
    if let Some(name) = only {
        if !names.contains(&name) {
            return Err(CliError::Config(format!("no fixture {name:?}; available: {}", names.join(", "))));
        }
    }
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for f in suite.iter().filter(|f| only.is_none_or(|n| f.name == n)) {
        let o = run_fixture(f)?;
        let mut observed: Vec<Rational> = o.observed.clone();
        observed.sort();
        observed.dedup();
        if !o.passed() {
            diagnostics.push(format!(
                "{}: {} of {} evaluations differ from {}",
                f.name,
                o.mismatches(),
                o.observed.len(),
                o.expected.render()
            ));
        }
        rows.push(FixtureRow {
            name: f.name.clone(),
            summary: f.summary.clone(),
            check: f.check.kind(),
            monitoring: f.game.monitoring().kind().name(),
            horizon: f.game.horizon(),
            tails: format!("{} / {}", f.tails.one, f.tails.two),
            expected: o.expected.render(),
            evaluated: o.observed.len(),
            mismatches: o.mismatches(),
            observed: observed.iter().map(Scalar::render).collect(),
            passed: o.passed(),
        });
    }
    let config = ExampleConfig {
        scenario: scenario.name().into(),
        fixture: only.map(str::to_string),
        delay: params.delay,
        horizon: params.horizon.unwrap_or_default(),
        leave_by: params.leave_by.unwrap_or_default(),
        battery: params.battery,
        seed: params.seed,
    };
    Ok((
        config,
        Finished {
            result: ExampleResult { fixtures: rows },
            diagnostics,
        },
    ))
}

impl Table for ExampleResult {
    fn table(&self, out: &mut String) {
        let mut rows = vec![vec![
            "fixture".to_string(),
            "N".into(),
            "check".into(),
            "expected".into(),
            "observed".into(),
            "runs".into(),
            "passed".into(),
        ]];
        for f in &self.fixtures {
            rows.push(vec![
                f.name.clone(),
                f.horizon.to_string(),
                f.check.into(),
                f.expected.clone(),
                f.observed.join(" "),
                f.evaluated.to_string(),
                f.passed.to_string(),
            ]);
        }
        columns(out, &rows);
    }
}
