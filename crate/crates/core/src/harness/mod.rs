//! File formats, random markets and the axiom checker used by the CLI and
//! the test suites.

mod axioms;
mod format;
mod instances;
mod random;

pub use axioms::{check_axioms, separable_misreports, AxiomOptions, AxiomReport, Check, Outcome};
pub use format::{parse_market, FormatError, MarketFile};
pub use instances::{membership_file, nonempty_file};
pub use random::{random_lex, random_profile, RandomSpec};
