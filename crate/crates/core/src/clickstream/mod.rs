//! Request logs to per-type transition counts: parsing, sessionization,
//! navigation-type classification and LCC-restricted transition extraction.

mod classify;
mod navtype;
mod parse;
mod session;
mod transitions;

pub use classify::{classify, referrer_host, ClassificationRules};
pub use navtype::{NavSelector, NavType};
pub use parse::{parse_log, FieldMap, LogFormat, LogSchema, ParsedLog, RecordStream, RequestRecord, SkippedLine};
pub use session::{sessionize, Session, SessionConfig, SessionStep};
pub use transitions::{
    extract_transitions, read_transitions, ExtractConfig, ExtractStats, TransitionEntry,
    TransitionSet, TransitionSetBuilder,
};
