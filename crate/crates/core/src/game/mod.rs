//! Histories, information partitions and monitoring structures.

mod history;
mod monitoring;
mod observation;
mod partition;
mod truncated;

pub use history::{ActionSet, FiniteHistory, Player};
pub(crate) use history::{action_at, decode, prefix_index};
pub use monitoring::{
    MonitoringKind, MonitoringStructure, PerfectRecallReport, RecallCondition, RecallViolation,
    MAX_HISTORIES,
};
pub use observation::{
    check_epm, observation_stage, observation_stage_by_scan, observation_table, EpmEntry,
    EpmReport, EpmStatus, ObservationTree,
};
pub use partition::StagePartition;
pub use truncated::TruncatedGame;
