//! Markets, items, bundles and allocations.
//!
//! Indices are zero-based throughout the library. An item is named by its
//! type and by the agent who initially owns it, so agent `j`'s endowment is
//! always the bundle `(j, j, ..., j)`. Human-facing output (see
//! [`Market::item_label`]) and the market file format use one-based indices.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

/// Errors raised while building or checking market values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("a market needs at least one agent and one type (got n={n}, p={p})")]
    Empty { n: usize, p: usize },
    #[error("bundle has {got} items but the market has {expected} types")]
    BundleLength { expected: usize, got: usize },
    #[error("owner index {owner} out of range for type {ty} (n={n})")]
    OwnerOutOfRange { ty: usize, owner: usize, n: usize },
    #[error("enumeration of {count} allocations exceeds cap {cap}")]
    CapExceeded { count: u128, cap: u128 },
}

/// An indivisible good: the type-`ty` item initially owned by `owner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub ty: usize,
    pub owner: usize,
}

impl Item {
    pub const fn new(ty: usize, owner: usize) -> Self {
        Item { ty, owner }
    }
}

/// One item of each type, stored as the owner index per type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle(Vec<usize>);

impl Bundle {
    pub fn new(owners: Vec<usize>) -> Self {
        Bundle(owners)
    }

    /// The endowment of `agent` in a market with `p` types.
    pub fn endowment(agent: usize, p: usize) -> Self {
        Bundle(vec![agent; p])
    }

    pub fn owners(&self) -> &[usize] {
        &self.0
    }

    pub fn owner(&self, ty: usize) -> usize {
        self.0[ty]
    }

    pub fn item(&self, ty: usize) -> Item {
        Item::new(ty, self.0[ty])
    }

    pub fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.0.iter().enumerate().map(|(ty, &owner)| Item::new(ty, owner))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for Bundle {
    fn from(owners: Vec<usize>) -> Self {
        Bundle(owners)
    }
}

/// A multi-type housing market with `n` agents and `p` item types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Market {
    n: usize,
    p: usize,
}

impl Market {
    pub fn new(n: usize, p: usize) -> Result<Self, MarketError> {
        if n == 0 || p == 0 {
            return Err(MarketError::Empty { n, p });
        }
        Ok(Market { n, p })
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn types(&self) -> usize {
        self.p
    }

    pub fn endowment(&self, agent: usize) -> Bundle {
        Bundle::endowment(agent, self.p)
    }

    /// Checks that `bundle` has one in-range item per type.
    pub fn check_bundle(&self, bundle: &Bundle) -> Result<(), MarketError> {
        if bundle.len() != self.p {
            return Err(MarketError::BundleLength {
                expected: self.p,
                got: bundle.len(),
            });
        }
        for item in bundle.items() {
            if item.owner >= self.n {
                return Err(MarketError::OwnerOutOfRange {
                    ty: item.ty,
                    owner: item.owner,
                    n: self.n,
                });
            }
        }
        Ok(())
    }

    /// Number of bundles, `n^p` (saturating).
    pub fn bundle_count(&self) -> u128 {
        (self.n as u128).saturating_pow(self.p as u32)
    }

    /// Number of allocations, `(n!)^p` (saturating).
    pub fn allocation_count(&self) -> u128 {
        let fact = (1..=self.n as u128).fold(1u128, |acc, k| acc.saturating_mul(k));
        fact.saturating_pow(self.p as u32)
    }

    /// Every bundle, in lexicographic order of owner indices.
    pub fn bundles(&self) -> impl Iterator<Item = Bundle> {
        let n = self.n;
        (0..self.p)
            .map(|_| 0..n)
            .multi_cartesian_product()
            .map(Bundle)
    }

    /// Display label of a type: `H`/`C` for two-type markets, otherwise the
    /// one-based type number.
    pub fn type_label(&self, ty: usize) -> String {
        match (self.p, ty) {
            (2, 0) => "H".to_string(),
            (2, 1) => "C".to_string(),
            _ => (ty + 1).to_string(),
        }
    }

    /// One-based display label such as `2_H`.
    pub fn item_label(&self, item: Item) -> String {
        format!("{}_{}", item.owner + 1, self.type_label(item.ty))
    }

    pub fn bundle_label(&self, bundle: &Bundle) -> String {
        format!(
            "({})",
            bundle.items().map(|it| self.item_label(it)).join(",")
        )
    }

    pub fn allocation_label(&self, alloc: &Allocation) -> String {
        alloc
            .bundles()
            .iter()
            .enumerate()
            .map(|(j, b)| format!("{}: {}", j + 1, self.bundle_label(b)))
            .join("; ")
    }
}

/// Describes the first constraint an allocation violates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationViolation {
    #[error("allocation has {got} bundles but the market has {expected} agents")]
    AgentCount { expected: usize, got: usize },
    #[error("bundle of agent {agent} has {got} items, expected {expected}")]
    BundleLength {
        agent: usize,
        expected: usize,
        got: usize,
    },
    #[error("agent {agent} holds type-{ty} item of owner {owner}, which does not exist")]
    UnknownItem { agent: usize, ty: usize, owner: usize },
    #[error("type-{ty} item of owner {owner} is assigned to both agent {first} and agent {second}")]
    DuplicateItem {
        ty: usize,
        owner: usize,
        first: usize,
        second: usize,
    },
}

/// A bundle for each agent; `bundles()[j]` is what agent `j` receives.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation(Vec<Bundle>);

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation(bundles)
    }

    /// Every agent keeps her own endowment.
    pub fn endowment(market: &Market) -> Self {
        Allocation((0..market.agents()).map(|j| market.endowment(j)).collect())
    }

    /// Builds the allocation where agent `j` receives the type-`t` item of
    /// owner `perms[t][j]`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Self {
        let n = perms.first().map_or(0, Vec::len);
        Allocation(
            (0..n)
                .map(|j| Bundle(perms.iter().map(|perm| perm[j]).collect()))
                .collect(),
        )
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.0
    }

    pub fn bundle(&self, agent: usize) -> &Bundle {
        &self.0[agent]
    }

    pub fn into_bundles(self) -> Vec<Bundle> {
        self.0
    }

    /// Checks the per-type permutation property, reporting the first
    /// violated constraint.
    pub fn validate(&self, market: &Market) -> Result<(), AllocationViolation> {
        let (n, p) = (market.agents(), market.types());
        if self.0.len() != n {
            return Err(AllocationViolation::AgentCount {
                expected: n,
                got: self.0.len(),
            });
        }
        for (agent, bundle) in self.0.iter().enumerate() {
            if bundle.len() != p {
                return Err(AllocationViolation::BundleLength {
                    agent,
                    expected: p,
                    got: bundle.len(),
                });
            }
        }
        for ty in 0..p {
            let mut holder: Vec<Option<usize>> = vec![None; n];
            for (agent, bundle) in self.0.iter().enumerate() {
                let owner = bundle.owner(ty);
                if owner >= n {
                    return Err(AllocationViolation::UnknownItem { agent, ty, owner });
                }
                if let Some(first) = holder[owner] {
                    return Err(AllocationViolation::DuplicateItem {
                        ty,
                        owner,
                        first,
                        second: agent,
                    });
                }
                holder[owner] = Some(agent);
            }
        }
        Ok(())
    }

    /// Per-type permutations `perm[t][j]` = owner of agent `j`'s type-`t` item.
    pub fn permutations(&self, p: usize) -> Vec<Vec<usize>> {
        (0..p)
            .map(|t| self.0.iter().map(|b| b.owner(t)).collect())
            .collect()
    }
}

/// Every allocation of `market`, lexicographic over the tuple of per-type
/// permutations (type 1 most significant).
///
/// Refuses to start when `(n!)^p` exceeds `cap`.
pub fn enumerate_allocations(
    market: &Market,
    cap: u128,
) -> Result<impl Iterator<Item = Allocation>, MarketError> {
    let count = market.allocation_count();
    if count > cap {
        return Err(MarketError::CapExceeded { count, cap });
    }
    let perms: Vec<Vec<usize>> = (0..market.agents())
        .permutations(market.agents())
        .collect();
    Ok((0..market.types())
        .map(move |_| perms.clone())
        .multi_cartesian_product()
        .map(|tuple| Allocation::from_permutations(&tuple)))
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().map(|o| o + 1).join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn market(n: usize, p: usize) -> Market {
        Market::new(n, p).unwrap()
    }

    #[test]
    fn endowment_single_agent() {
        let m = market(1, 2);
        let a = Allocation::endowment(&m);
        assert_eq!(a.bundles(), &[Bundle::new(vec![0, 0])]);
    }

    #[test]
    fn endowment_three_agents_two_types() {
        let m = market(3, 2);
        let a = Allocation::endowment(&m);
        for j in 0..3 {
            assert_eq!(a.bundle(j).owners(), &[j, j]);
        }
        assert_eq!(m.allocation_label(&a), "1: (1_H,1_C); 2: (2_H,2_C); 3: (3_H,3_C)");
    }

    #[test]
    fn endowment_two_agents_three_types() {
        let m = market(2, 3);
        let a = Allocation::endowment(&m);
        assert_eq!(a.bundles().len(), 2);
        let items: HashSet<Item> = a.bundles().iter().flat_map(|b| b.items()).collect();
        assert_eq!(items.len(), 6);
        assert_eq!(a.permutations(3), vec![vec![0, 1]; 3]);
        assert!(a.validate(&m).is_ok());
    }

    #[test]
    fn duplicate_item_rejected() {
        let m = market(2, 2);
        let a = Allocation::new(vec![Bundle::new(vec![0, 0]), Bundle::new(vec![0, 1])]);
        assert_eq!(
            a.validate(&m),
            Err(AllocationViolation::DuplicateItem {
                ty: 0,
                owner: 0,
                first: 0,
                second: 1
            })
        );
    }

    #[test]
    fn length_mismatches_rejected() {
        let m = market(2, 2);
        let short = Allocation::new(vec![Bundle::new(vec![0, 0])]);
        assert!(matches!(
            short.validate(&m),
            Err(AllocationViolation::AgentCount { .. })
        ));
        let thin = Allocation::new(vec![Bundle::new(vec![0]), Bundle::new(vec![1, 1])]);
        assert!(matches!(
            thin.validate(&m),
            Err(AllocationViolation::BundleLength { agent: 0, .. })
        ));
        let ghost = Allocation::new(vec![Bundle::new(vec![0, 5]), Bundle::new(vec![1, 1])]);
        assert!(matches!(
            ghost.validate(&m),
            Err(AllocationViolation::UnknownItem { owner: 5, .. })
        ));
    }

    #[test]
    fn house_car_output_is_valid() {
        let m = market(3, 2);
        let a = Allocation::new(vec![
            Bundle::new(vec![1, 0]),
            Bundle::new(vec![2, 1]),
            Bundle::new(vec![0, 2]),
        ]);
        assert!(a.validate(&m).is_ok());
    }

    fn brute_force_count(n: usize, p: usize) -> usize {
        // Every assignment of n^p bundles to n agents, filtered by validity.
        let m = market(n, p);
        let bundles: Vec<Bundle> = m.bundles().collect();
        (0..n)
            .map(|_| bundles.iter().cloned())
            .multi_cartesian_product()
            .filter(|bs| Allocation::new(bs.clone()).validate(&m).is_ok())
            .count()
    }

    #[test]
    fn enumeration_counts_match_brute_force() {
        for (n, p, expected) in [(1, 2, 1), (2, 2, 4), (3, 2, 36)] {
            let m = market(n, p);
            let all: Vec<_> = enumerate_allocations(&m, u128::MAX).unwrap().collect();
            assert_eq!(all.len(), expected);
            assert_eq!(brute_force_count(n, p), expected);
        }
    }

    #[test]
    fn enumeration_is_exhaustive_distinct_and_valid() {
        for n in 1..=4 {
            for p in 1..=2 {
                let m = market(n, p);
                let all: Vec<_> = enumerate_allocations(&m, u128::MAX).unwrap().collect();
                assert_eq!(all.len() as u128, m.allocation_count());
                let distinct: HashSet<_> = all.iter().collect();
                assert_eq!(distinct.len(), all.len());
                assert!(all.iter().all(|a| a.validate(&m).is_ok()));
                assert!(all.windows(2).all(|w| {
                    w[0].permutations(p) < w[1].permutations(p)
                }));
            }
        }
    }

    #[test]
    fn enumeration_refuses_over_cap() {
        let m = market(3, 2);
        assert!(matches!(
            enumerate_allocations(&m, 35),
            Err(MarketError::CapExceeded { count: 36, cap: 35 })
        ));
    }

    #[test]
    fn empty_market_rejected() {
        assert!(Market::new(0, 2).is_err());
        assert!(Market::new(2, 0).is_err());
        assert!(Market::new(1, 1).is_ok());
    }
}
