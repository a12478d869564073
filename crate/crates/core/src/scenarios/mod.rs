//! Stay/Leave games: player one wins by leaving after player two does, or
//! by leaving at all while player two never leaves. Infinite plays are
//! evaluated from a finite prefix plus deterministic tail policies.

mod fixtures;
mod outcome;

pub use fixtures::{
    bounded_leave_game, copycat, leave_at, leave_by, responder, run_fixture, scenario_suite, stay_after, Check,
    Fixture, FixtureOutcome, Scenario, ScenarioParams,
};
pub use outcome::{
    classify_outcome, exact_payoff_with_tails, first_leave, stay_leave_actions, tail_game, LeaveStayOutcome,
    TailPolicy, Tails, LEAVE, STAY,
};
