//! The auxiliary perfect-information game in which Nature performs the
//! players' randomizations: revelation schedule, filters, backward
//! induction, lifting and projection of strategies, and the value sandwich.

mod aux;
mod compare;
mod schedule;
mod strategies;
mod value;

pub use aux::{nature_transition, replay, AuxGame, AuxHistory, Filter};
pub use compare::{compare_values, CompareOptions, SandwichCheck, SandwichReport, SnapChain};
pub use schedule::StateSchedule;
pub use strategies::{
    aux_payoff, aux_solve, lift, lift_player2, project, project_player1, AuxPolicy, AuxStrategy,
    LiftedStrategy, SeededAnnouncer,
};
pub use value::{aux_value, AuxOptions, AuxSolver, AuxStats, AuxValueReport, Filler};
