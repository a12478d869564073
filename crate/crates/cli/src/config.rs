//! Game configuration documents and their resolution into games.

use std::collections::BTreeMap;
use std::path::Path;

use epm_core::game::{ActionSet, FiniteHistory, MonitoringKind, MonitoringStructure, Player, TruncatedGame};
use epm_core::reduction::AuxOptions;
use epm_core::scalar::parse_rational;
use epm_core::scenarios::{scenario_suite, Fixture, Scenario, ScenarioParams};
use epm_core::solver::DEFAULT_MATRIX_CAP;
use epm_core::strategy::{BehavioralStrategy, DEFAULT_GRID_CAP};
use epm_core::{Rational, Scalar};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_EPSILON: &str = "1/2";
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    #[serde(rename = "$schema", default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monitoring: Option<MonitoringSpec>,
    pub winning: WinningSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couple: Option<CoupleSpec>,
}

/// Builder name plus parameters. Delays of `null` (or omitted) mean the
/// actions are never shown to the opponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MonitoringSpec {
    // empty braces so that stray parameters are rejected
    Perfect {},
    Blackwell {},
    Delayed {
        #[serde(default)]
        p1: Option<usize>,
        #[serde(default)]
        p2: Option<usize>,
    },
    VariableDelay {
        delays: Vec<Option<usize>>,
    },
    Block {
        sizes: Vec<usize>,
    },
    NoMonitoring {},
    /// Atoms per stage, each a list of histories.
    Custom {
        stages: Vec<Vec<Vec<String>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum WinningSpec {
    /// Player one's winning histories of length N.
    Histories(Vec<String>),
    /// Hex bitmask over history indices, bit 0 being the first history.
    /// Two actions only.
    Mask(String),
    Scenario(ScenarioSpec),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    /// Fixture whose game is used; the first of the suite by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leave_by: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_matrix: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_revelation: Option<bool>,
}

/// Per-stage tables, keyed by the owner's stages: one distribution per atom,
/// probabilities as `p/q` strings.
pub type StrategyDoc = BTreeMap<usize, Vec<Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupleSpec {
    pub x: StrategyDoc,
    pub y: StrategyDoc,
    pub x_alt: StrategyDoc,
    pub y_alt: StrategyDoc,
}

/// Command-line overrides; they win over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub epsilon: Option<String>,
    pub seed: Option<u64>,
    pub cap_matrix: Option<usize>,
    pub samples: Option<usize>,
}

/// A validated configuration: the game plus every option with defaults
/// filled in. `document` is the echo written into reports.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub document: GameConfig,
    pub game: TruncatedGame,
    pub mode: Mode,
    pub epsilon: Rational,
    pub cap_matrix: usize,
    pub grid_cap: usize,
    pub seed: u64,
    pub samples: usize,
    pub terminal_revelation: bool,
    pub aux: AuxOptions,
}

pub fn load(path: &Path) -> Result<GameConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_epsilon(text: &str) -> Result<Rational, CliError> {
    let eps = parse_rational(text).map_err(|e| CliError::Config(e.to_string()))?;
    if eps <= Rational::zero() {
        return Err(CliError::Config(format!("epsilon must be positive, got {text}")));
    }
    Ok(eps)
}

impl GameConfig {
    pub fn resolve(mut self, overrides: &Overrides) -> Result<Resolved, CliError> {
        let game = self.resolve_game()?;
        let solver = &mut self.solver;
        merge(&mut solver.mode, overrides.mode, Mode::Rational);
        merge(&mut solver.epsilon, overrides.epsilon.clone(), DEFAULT_EPSILON.to_string());
        merge(&mut solver.seed, overrides.seed, 0);
        merge(&mut solver.cap_matrix, overrides.cap_matrix, DEFAULT_MATRIX_CAP);
        merge(&mut solver.samples, overrides.samples, DEFAULT_SAMPLES);
        merge(&mut solver.grid_cap, None, DEFAULT_GRID_CAP);
        merge(&mut solver.node_cap, None, AuxOptions::default().node_cap);
        merge(&mut solver.terminal_revelation, None, false);
        let epsilon = parse_epsilon(solver.epsilon.as_deref().unwrap_or(DEFAULT_EPSILON))?;
        // canonical form in the echo
        solver.epsilon = Some(epsilon.render());
        let aux = AuxOptions {
            node_cap: solver.node_cap.unwrap_or_default(),
            ..AuxOptions::default()
        };
        Ok(Resolved {
            mode: solver.mode.unwrap_or(Mode::Rational),
            epsilon,
            cap_matrix: solver.cap_matrix.unwrap_or_default(),
            grid_cap: solver.grid_cap.unwrap_or_default(),
            seed: solver.seed.unwrap_or_default(),
            samples: solver.samples.unwrap_or_default(),
            terminal_revelation: solver.terminal_revelation.unwrap_or_default(),
            aux,
            game,
            document: self,
        })
    }

    /// Builds the game and fills `actions`, `horizon` and `monitoring` in
    /// the document when a scenario supplied them.
    fn resolve_game(&mut self) -> Result<TruncatedGame, CliError> {
        if let WinningSpec::Scenario(spec) = &self.winning {
            let fixture = scenario_fixture(spec)?;
            let m = fixture.game.monitoring();
            let actions: Vec<String> = m.actions().labels().to_vec();
            let monitoring = monitoring_spec(m.kind(), m.actions());
            let given = (&self.actions, self.horizon, &self.monitoring);
            if given.0.as_ref().is_some_and(|a| *a != actions)
                || given.1.is_some_and(|h| h != m.horizon())
                || given.2.as_ref().is_some_and(|s| *s != monitoring)
            {
                return Err(CliError::Config(format!(
                    "scenario {} fixes actions {actions:?}, horizon {} and {} monitoring; the document disagrees",
                    fixture.name,
                    m.horizon(),
                    m.kind().name()
                )));
            }
            self.actions = Some(actions);
            self.horizon = Some(m.horizon());
            self.monitoring = Some(monitoring);
            return Ok(fixture.game);
        }
        let labels = self.actions.as_ref().ok_or_else(|| missing("actions"))?;
        let horizon = self.horizon.ok_or_else(|| missing("horizon"))?;
        let spec = self.monitoring.as_ref().ok_or_else(|| missing("monitoring"))?;
        let actions = ActionSet::new(labels)?;
        let kind = spec.to_kind(&actions)?;
        let m = MonitoringStructure::build(kind, actions, horizon)?;
        let game = match &self.winning {
            WinningSpec::Histories(list) => {
                let histories = list
                    .iter()
                    .map(|h| parse_history(m.actions(), h, horizon))
                    .collect::<Result<Vec<_>, _>>()?;
                TruncatedGame::from_histories(m, &histories)?
            }
            WinningSpec::Mask(hex) => {
                let winning = parse_mask(hex, m.action_count(), horizon)?;
                TruncatedGame::new(m, winning)?
            }
            WinningSpec::Scenario(_) => unreachable!(),
        };
        Ok(game)
    }
}

fn merge<T>(slot: &mut Option<T>, flag: Option<T>, default: T) {
    if let Some(v) = flag {
        *slot = Some(v);
    }
    if slot.is_none() {
        *slot = Some(default);
    }
}

fn missing(field: &str) -> CliError {
    CliError::Config(format!("missing field `{field}` (required unless the winning set is a scenario)"))
}

fn parse_history(actions: &ActionSet, text: &str, length: usize) -> Result<FiniteHistory, CliError> {
    let h = actions.parse_history(text)?;
    if h.stage() != length {
        return Err(CliError::Config(format!(
            "history {text:?} has length {}, expected {length}",
            h.stage()
        )));
    }
    Ok(h)
}

/// Hex digits read from the right: the lowest bit is history 0.
pub fn parse_mask(text: &str, actions: usize, horizon: usize) -> Result<Vec<bool>, CliError> {
    if actions != 2 || horizon > 20 {
        return Err(CliError::Config(
            "bitmask winning sets need two actions and a horizon of at most 20".into(),
        ));
    }
    let digits = text.trim().trim_start_matches("0x").trim_start_matches("0X");
    if digits.is_empty() {
        return Err(CliError::Config("empty bitmask".into()));
    }
    let count = 1usize << horizon;
    let mut winning = vec![false; count];
    for (i, c) in digits.chars().rev().enumerate() {
        let d = c
            .to_digit(16)
            .ok_or_else(|| CliError::Config(format!("bad hex digit {c:?} in mask")))?;
        for bit in 0..4 {
            if d >> bit & 1 == 1 {
                let h = 4 * i + bit;
                if h >= count {
                    return Err(CliError::Config(format!("mask sets bit {h}, but there are only {count} histories")));
                }
                winning[h] = true;
            }
        }
    }
    Ok(winning)
}

/// The inverse of [`parse_mask`], without leading zeros.
pub fn format_mask(winning: &[bool]) -> String {
    let digits: String = winning
        .chunks(4)
        .map(|c| {
            let d = c.iter().enumerate().fold(0u32, |d, (i, &w)| d | (u32::from(w) << i));
            char::from_digit(d, 16).unwrap_or('0')
        })
        .rev()
        .collect();
    let trimmed = digits.trim_start_matches('0');
    format!("0x{}", if trimmed.is_empty() { "0" } else { trimmed })
}

impl MonitoringSpec {
    pub fn to_kind(&self, actions: &ActionSet) -> Result<MonitoringKind, CliError> {
        Ok(match self {
            MonitoringSpec::Perfect {} => MonitoringKind::Perfect,
            MonitoringSpec::Blackwell {} => MonitoringKind::Blackwell,
            MonitoringSpec::Delayed { p1, p2 } => MonitoringKind::Delayed { p1: *p1, p2: *p2 },
            MonitoringSpec::VariableDelay { delays } => MonitoringKind::VariableDelay { delays: delays.clone() },
            MonitoringSpec::Block { sizes } => MonitoringKind::Block { sizes: sizes.clone() },
            MonitoringSpec::NoMonitoring {} => MonitoringKind::NoMonitoring,
            MonitoringSpec::Custom { stages } => {
                let k = actions.len();
                let stages = stages
                    .iter()
                    .enumerate()
                    .map(|(n, atoms)| {
                        atoms
                            .iter()
                            .map(|atom| {
                                atom.iter()
                                    .map(|h| Ok(parse_history(actions, h, n)?.index(k)))
                                    .collect::<Result<Vec<_>, CliError>>()
                            })
                            .collect::<Result<Vec<_>, CliError>>()
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                MonitoringKind::Custom { stages }
            }
        })
    }
}

pub fn monitoring_spec(kind: &MonitoringKind, actions: &ActionSet) -> MonitoringSpec {
    match kind {
        MonitoringKind::Perfect => MonitoringSpec::Perfect {},
        MonitoringKind::Blackwell => MonitoringSpec::Blackwell {},
        MonitoringKind::Delayed { p1, p2 } => MonitoringSpec::Delayed { p1: *p1, p2: *p2 },
        MonitoringKind::VariableDelay { delays } => MonitoringSpec::VariableDelay { delays: delays.clone() },
        MonitoringKind::Block { sizes } => MonitoringSpec::Block { sizes: sizes.clone() },
        MonitoringKind::NoMonitoring => MonitoringSpec::NoMonitoring {},
        MonitoringKind::Custom { stages } => MonitoringSpec::Custom {
            stages: stages
                .iter()
                .enumerate()
                .map(|(n, atoms)| {
                    atoms
                        .iter()
                        .map(|atom| {
                            atom.iter()
                                .map(|&h| actions.format_history(FiniteHistory::from_index(h, n, actions.len()).actions()))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        },
    }
}

pub fn scenario_params(spec: &ScenarioSpec, seed: u64) -> ScenarioParams {
    let defaults = ScenarioParams::default();
    ScenarioParams {
        delay: spec.delay.unwrap_or(defaults.delay),
        horizon: spec.horizon,
        leave_by: spec.leave_by,
        seed,
        ..defaults
    }
}

fn scenario_fixture(spec: &ScenarioSpec) -> Result<Fixture, CliError> {
    let scenario: Scenario = spec.name.parse()?;
    let suite = scenario_suite(scenario, &scenario_params(spec, 0))?;
    match &spec.fixture {
        None => suite.into_iter().next().ok_or_else(|| CliError::Config("empty scenario suite".into())),
        Some(name) => {
            let names: Vec<String> = suite.iter().map(|f| f.name.clone()).collect();
            suite
                .into_iter()
                .find(|f| f.name == *name)
                .ok_or_else(|| CliError::Config(format!("no fixture {name:?}; available: {}", names.join(", "))))
        }
    }
}

pub fn strategy_from_doc(
    doc: &StrategyDoc,
    owner: Player,
    m: &MonitoringStructure,
) -> Result<BehavioralStrategy<Rational>, CliError> {
    let mut tables = vec![Vec::new(); m.horizon()];
    for (&stage, atoms) in doc {
        if stage >= m.horizon() || !owner.owns(stage) {
            return Err(CliError::Config(format!("{owner} does not move at stage {stage}")));
        }
        tables[stage] = atoms
            .iter()
            .map(|dist| {
                dist.iter()
                    .map(|p| parse_rational(p).map_err(CliError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
    }
    Ok(BehavioralStrategy::new(owner, m, tables)?)
}

pub fn strategy_doc<T: Scalar>(s: &BehavioralStrategy<T>) -> StrategyDoc {
    s.owned_stages()
        .map(|n| {
            let atoms = s
                .stage_table(n)
                .iter()
                .map(|d| d.iter().map(Scalar::render).collect())
                .collect();
            (n, atoms)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let w = parse_mask("0x9", 2, 2).unwrap();
        assert_eq!(w, vec![true, false, false, true]);
        assert_eq!(format_mask(&w), "0x9");
        assert!(parse_mask("0x10", 2, 2).is_err());
        assert!(parse_mask("zz", 2, 2).is_err());
        assert_eq!(format_mask(&[false; 8]), "0x0");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = r#"{"winning": {"mask": "0x9"}, "horizon": 2, "colour": 1}"#;
        assert!(serde_json::from_str::<GameConfig>(doc).is_err());
        let doc = r#"{"winning": {"mask": "0x9"}, "monitoring": {"builder": "perfect", "delay": 1}}"#;
        assert!(serde_json::from_str::<GameConfig>(doc).is_err());
    }

    #[test]
    fn overrides_win_and_defaults_are_echoed() {
        let doc = r#"{"actions": ["H", "T"], "horizon": 2, "monitoring": {"builder": "blackwell"},
                      "winning": {"histories": ["HH", "TT"]}, "solver": {"epsilon": "0.25"}}"#;
        let cfg: GameConfig = serde_json::from_str(doc).unwrap();
        let r = cfg
            .resolve(&Overrides {
                seed: Some(9),
                ..Overrides::default()
            })
            .unwrap();
        assert_eq!(r.document.solver.epsilon.as_deref(), Some("1/4"));
        assert_eq!(r.document.solver.seed, Some(9));
        assert_eq!(r.document.solver.mode, Some(Mode::Rational));
        assert_eq!(r.game.winning(), &[true, false, false, true]);
    }

    #[test]
    fn scenario_fills_in_the_game() {
        let doc = r#"{"winning": {"scenario": {"name": "example3"}}}"#;
        let cfg: GameConfig = serde_json::from_str(doc).unwrap();
        let r = cfg.resolve(&Overrides::default()).unwrap();
        assert_eq!(r.document.horizon, Some(6));
        assert_eq!(r.document.actions, Some(vec!["S".to_string(), "L".to_string()]));
        // the echo resolves again to the same game
        let again = r.document.clone().resolve(&Overrides::default()).unwrap();
        assert_eq!(again.game, r.game);
    }

    #[test]
    fn custom_atoms_round_trip() {
        let actions = ActionSet::new(&["a", "b"]).unwrap();
        let spec = MonitoringSpec::Custom {
            stages: vec![vec![vec!["".into()]], vec![vec!["a".into(), "b".into()]]],
        };
        let kind = spec.to_kind(&actions).unwrap();
        assert_eq!(monitoring_spec(&kind, &actions), spec);
    }
}
