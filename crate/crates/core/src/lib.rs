//! Multi-type housing markets with lexicographic preferences.
//!
//! Every agent owns one item of each type and ranks bundles through an
//! importance order over types and a CP-net of conditional tables. The
//! crate runs the multi-type top trading cycles mechanism ([`mttc`]),
//! decides strict-core membership exactly ([`oracle`]) and builds the
//! SAT-based instances on which that question is hard ([`reductions`]).
//!
//! ```
//! use mttc::mttc::run_mttc;
//! use mttc::oracle::{in_strict_core, Budget};
//! use mttc::reductions::house_car_market;
//!
//! let (market, profile) = house_car_market();
//! let (alloc, trace) = run_mttc(&market, &profile).unwrap();
//! assert_eq!(trace.len(), 4);
//! assert!(in_strict_core(&market, &profile, &alloc, Budget::UNLIMITED).unwrap().is_yes());
//! ```
//!
//! Indices are zero-based throughout the API; labels and files are
//! one-based.

pub mod market;
pub mod preference;
pub mod mttc;
pub mod oracle;
pub mod reductions;
pub mod harness;

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/markets.md")]
    mod markets {}
    #[doc = include_str!("../../../book/src/mttc.md")]
    mod mttc {}
    #[doc = include_str!("../../../book/src/core.md")]
    mod core {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
