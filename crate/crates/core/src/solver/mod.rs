//! Exact and approximate values of truncated games: the normal form with a
//! matrix-game program, the sequence form, best responses and fictitious
//! play.

mod fictitious;
mod lp;
mod normal;
mod report;
mod response;
mod sequence;
mod space;

pub use fictitious::{fictitious_play, FictitiousPlayReport};
pub use lp::{LinearProgram, LpSolution, Relation};
pub use normal::{brute_force_value, NormalForm, DEFAULT_MATRIX_CAP};
pub use report::{Certificate, Method, ValueReport};
pub use response::best_response;
pub use sequence::sequence_form_value;
pub use space::{Infoset, SequenceSpace};
