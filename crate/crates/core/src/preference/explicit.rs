use std::cmp::Ordering;
use std::collections::HashMap;

use super::PreferenceError;
use crate::market::{Bundle, Market};

/// A ranked list of bundles followed by every unlisted bundle.
///
/// Unlisted bundles rank below all listed ones and among themselves follow
/// the canonical tail order: lexicographic by owner index, type by type,
/// smaller owners first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitPreference {
    ranked: Vec<Bundle>,
    rank: HashMap<Bundle, usize>,
}

impl ExplicitPreference {
    pub fn new(market: &Market, ranked: Vec<Bundle>) -> Result<Self, PreferenceError> {
        let mut rank = HashMap::with_capacity(ranked.len());
        for (pos, bundle) in ranked.iter().enumerate() {
            market.check_bundle(bundle)?;
            if rank.insert(bundle.clone(), pos).is_some() {
                return Err(PreferenceError::DuplicateBundle(bundle.to_string()));
            }
        }
        Ok(ExplicitPreference { ranked, rank })
    }

    pub fn ranked(&self) -> &[Bundle] {
        &self.ranked
    }

    /// Position in the ranked prefix, if listed.
    pub fn rank_of(&self, bundle: &Bundle) -> Option<usize> {
        self.rank.get(bundle).copied()
    }

    /// `Greater` iff `a` is preferred to `b`.
    pub fn compare(&self, a: &Bundle, b: &Bundle) -> Ordering {
        match (self.rank.get(a), self.rank.get(b)) {
            (Some(ra), Some(rb)) => rb.cmp(ra),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => b.owners().cmp(a.owners()),
        }
    }
}
