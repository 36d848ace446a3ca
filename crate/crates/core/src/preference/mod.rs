//! Agent preferences over bundles.
//!
//! Two kinds of preference are supported: the lexicographic extension of an
//! O-legal CP-net ([`LexPreference`]), which is what the mechanism runs on,
//! and an explicit ranked list with a canonical tail ([`ExplicitPreference`]),
//! which the hardness gadgets need because their preferences are not
//! lexicographic.

mod cpnet;
mod explicit;
mod lex;

use std::cmp::Ordering;

use thiserror::Error;

pub use cpnet::CpNet;
pub use explicit::ExplicitPreference;
pub use lex::LexPreference;

use crate::market::{Bundle, Market, MarketError};

/// Default cap on the number of bundles [`Preference::materialize`] will rank.
pub const DEFAULT_MATERIALIZE_CAP: u128 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreferenceError {
    #[error("importance order {0:?} is not a permutation of the types")]
    NotAPermutation(Vec<usize>),
    #[error("expected {expected} types, got {got}")]
    TypeCount { expected: usize, got: usize },
    #[error("expected {expected} conditional preference tables, got {got}")]
    TableCount { expected: usize, got: usize },
    #[error("type {ty} lists parent {parent}, which is not a type")]
    ParentOutOfRange { ty: usize, parent: usize },
    #[error("type {ty} lists itself as a parent")]
    SelfParent { ty: usize },
    #[error("type {ty} lists parent {parent} twice")]
    DuplicateParent { ty: usize, parent: usize },
    #[error("dependency graph has a cycle")]
    CyclicDependency,
    #[error("table for type {ty} has {got} rows, expected {expected}")]
    RowCount { ty: usize, expected: usize, got: usize },
    #[error("row {row} of the table for type {ty} is not a permutation of the items")]
    RowNotPermutation { ty: usize, row: usize },
    #[error("parent {parent} of type {ty} is not more important than it")]
    NotOLegal { ty: usize, parent: usize },
    #[error("no item of parent type {parent} given when looking up type {ty}")]
    MissingParent { ty: usize, parent: usize },
    #[error("no remaining item of type {ty} to choose from")]
    EmptyChoice { ty: usize },
    #[error("bundle {0} listed twice")]
    DuplicateBundle(String),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("ranking {count} bundles exceeds cap {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("profile has {got} preferences for {expected} agents")]
    ProfileSize { expected: usize, got: usize },
    #[error("preference of agent {agent} does not match the market shape")]
    ShapeMismatch { agent: usize },
}

/// A linear order over types, most important first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImportanceOrder {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl ImportanceOrder {
    pub fn new(order: Vec<usize>) -> Result<Self, PreferenceError> {
        let p = order.len();
        let mut position = vec![usize::MAX; p];
        for (pos, &t) in order.iter().enumerate() {
            if t >= p || position[t] != usize::MAX {
                return Err(PreferenceError::NotAPermutation(order));
            }
            position[t] = pos;
        }
        Ok(ImportanceOrder { order, position })
    }

    /// Type 1 first, then type 2, and so on.
    pub fn identity(p: usize) -> Self {
        ImportanceOrder::new((0..p).collect()).expect("identity is a permutation")
    }

    pub fn types(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, ty: usize) -> usize {
        self.position[ty]
    }

    /// True iff `a` is more important than `b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }
}

/// A single agent's preference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preference {
    Lex(LexPreference),
    Explicit(ExplicitPreference),
}

impl Preference {
    /// `Greater` iff `a` is strictly preferred to `b`; `Equal` iff `a == b`.
    pub fn compare(&self, a: &Bundle, b: &Bundle) -> Ordering {
        match self {
            Preference::Lex(lex) => lex.compare(a, b),
            Preference::Explicit(ex) => ex.compare(a, b),
        }
    }

    pub fn prefers(&self, a: &Bundle, b: &Bundle) -> bool {
        self.compare(a, b) == Ordering::Greater
    }

    pub fn weakly_prefers(&self, a: &Bundle, b: &Bundle) -> bool {
        self.compare(a, b) != Ordering::Less
    }

    pub fn as_lex(&self) -> Option<&LexPreference> {
        match self {
            Preference::Lex(lex) => Some(lex),
            Preference::Explicit(_) => None,
        }
    }

    /// Every bundle of `market`, best first. Refuses when `n^p > cap`.
    pub fn materialize(&self, market: &Market, cap: u128) -> Result<Vec<Bundle>, PreferenceError> {
        let count = market.bundle_count();
        if count > cap {
            return Err(PreferenceError::CapExceeded { count, cap });
        }
        let mut all: Vec<Bundle> = market.bundles().collect();
        all.sort_by(|a, b| self.compare(b, a));
        Ok(all)
    }

    fn fits(&self, market: &Market) -> bool {
        match self {
            Preference::Lex(lex) => {
                lex.cpnet().types() == market.types()
                    && lex.cpnet().items_per_type() == market.agents()
            }
            Preference::Explicit(ex) => ex
                .ranked()
                .iter()
                .all(|b| market.check_bundle(b).is_ok()),
        }
    }
}

impl From<LexPreference> for Preference {
    fn from(lex: LexPreference) -> Self {
        Preference::Lex(lex)
    }
}

impl From<ExplicitPreference> for Preference {
    fn from(ex: ExplicitPreference) -> Self {
        Preference::Explicit(ex)
    }
}

/// One preference per agent, all over the same market's bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile(Vec<Preference>);

impl Profile {
    pub fn new(market: &Market, prefs: Vec<Preference>) -> Result<Self, PreferenceError> {
        if prefs.len() != market.agents() {
            return Err(PreferenceError::ProfileSize {
                expected: market.agents(),
                got: prefs.len(),
            });
        }
        if let Some(agent) = prefs.iter().position(|pr| !pr.fits(market)) {
            return Err(PreferenceError::ShapeMismatch { agent });
        }
        Ok(Profile(prefs))
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.0
    }

    pub fn get(&self, agent: usize) -> &Preference {
        &self.0[agent]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All preferences are lexicographic.
    pub fn is_lexicographic(&self) -> bool {
        self.0.iter().all(|p| p.as_lex().is_some())
    }

    /// Copy with agent `agent`'s preference replaced.
    pub fn with_replaced(&self, agent: usize, pref: Preference) -> Profile {
        let mut prefs = self.0.clone();
        prefs[agent] = pref;
        Profile(prefs)
    }
}
