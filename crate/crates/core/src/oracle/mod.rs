//! Exact blocking, Pareto and strict-core checks.
//!
//! The checks share one search (see `search.rs`): it looks for a coalition
//! and a reallocation of the coalition's endowments in which every member
//! weakly improves on a reference bundle. Each agent only considers items
//! that can still lead to such a bundle, which keeps the search small on
//! instances where most agents like few items.
//!
//! The search counts nodes. When a [`Budget`] runs out the answer is
//! [`Verdict::Indeterminate`], never a silent "yes".

mod model;
mod search;

use std::collections::HashSet;

use thiserror::Error;

use crate::market::{Allocation, AllocationViolation, Bundle, Market};
use crate::preference::Profile;
use search::{Search, Stop};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("invalid allocation: {0:?}")]
    Allocation(AllocationViolation),
    #[error("profile has {got} preferences for {expected} agents")]
    ProfileSize { expected: usize, got: usize },
    #[error("invalid reallocation: {0}")]
    Reallocation(String),
    #[error("more than {cap} allocations")]
    CapExceeded { cap: usize },
    #[error("search budget of {nodes} nodes exhausted")]
    BudgetExhausted { nodes: u64 },
}

/// Limit on search nodes; `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget(pub Option<u64>);

impl Budget {
    pub const UNLIMITED: Budget = Budget(None);

    pub fn nodes(n: u64) -> Self {
        Budget(Some(n))
    }
}

/// A coalition, a reallocation of its endowments and a member who gains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingWitness {
    /// Sorted agent indices.
    pub coalition: Vec<usize>,
    /// `reallocation[k]` goes to `coalition[k]`.
    pub reallocation: Vec<Bundle>,
    pub strict_agent: usize,
}

impl BlockingWitness {
    pub fn bundle_of(&self, agent: usize) -> Option<&Bundle> {
        self.coalition
            .iter()
            .position(|&a| a == agent)
            .map(|k| &self.reallocation[k])
    }

    /// Re-checks the witness against `alloc`.
    pub fn verify(&self, market: &Market, profile: &Profile, alloc: &Allocation) -> bool {
        weakly_blocks(market, profile, alloc, &self.coalition, &self.reallocation).unwrap_or(false)
            && profile
                .get(self.strict_agent)
                .prefers(self.bundle_of(self.strict_agent).expect("member"), alloc.bundle(self.strict_agent))
    }

    /// `S = {1, 3}: 1 gets (3_H,1_C); 3 gets (1_H,3_C)` (one-based).
    pub fn describe(&self, market: &Market) -> String {
        let members: Vec<String> = self.coalition.iter().map(|a| (a + 1).to_string()).collect();
        let gets: Vec<String> = self
            .coalition
            .iter()
            .zip(&self.reallocation)
            .map(|(a, b)| format!("{} gets {}", a + 1, market.bundle_label(b)))
            .collect();
        format!("S = {{{}}}: {}", members.join(", "), gets.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(BlockingWitness),
    Indeterminate,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }
}

/// Outcome of a blocking search together with the nodes it used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub witness: Option<BlockingWitness>,
    pub exhausted_budget: bool,
    pub nodes: u64,
}

fn check_inputs(market: &Market, profile: &Profile, alloc: &Allocation) -> Result<(), OracleError> {
    if profile.len() != market.agents() {
        return Err(OracleError::ProfileSize {
            expected: market.agents(),
            got: profile.len(),
        });
    }
    alloc.validate(market).map_err(OracleError::Allocation)
}

/// True iff every member weakly prefers her bundle in `realloc` to her
/// bundle in `alloc` and at least one strictly prefers it.
///
/// `realloc[k]` is the bundle of `coalition[k]` and must use only items
/// the coalition owns, each exactly once.
pub fn weakly_blocks(
    market: &Market,
    profile: &Profile,
    alloc: &Allocation,
    coalition: &[usize],
    realloc: &[Bundle],
) -> Result<bool, OracleError> {
    check_inputs(market, profile, alloc)?;
    let bad = |m: String| Err(OracleError::Reallocation(m));
    if coalition.is_empty() {
        return bad("empty coalition".into());
    }
    if coalition.len() != realloc.len() {
        return bad(format!("{} members but {} bundles", coalition.len(), realloc.len()));
    }
    let members: HashSet<usize> = coalition.iter().copied().collect();
    if members.len() != coalition.len() || coalition.iter().any(|&a| a >= market.agents()) {
        return bad("coalition has duplicate or unknown agents".into());
    }
    for t in 0..market.types() {
        let mut used = HashSet::new();
        for b in realloc {
            if b.len() != market.types() {
                return bad(format!("bundle {b} has the wrong length"));
            }
            let o = b.owner(t);
            if !members.contains(&o) {
                return bad(format!("item of type {} owned by {} is outside the coalition", t + 1, o + 1));
            }
            if !used.insert(o) {
                return bad(format!("item of type {} owned by {} used twice", t + 1, o + 1));
            }
        }
    }
    let mut strict = false;
    for (&a, b) in coalition.iter().zip(realloc) {
        match profile.get(a).compare(b, alloc.bundle(a)) {
            std::cmp::Ordering::Less => return Ok(false),
            std::cmp::Ordering::Greater => strict = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    Ok(strict)
}

/// Searches for a coalition that weakly blocks `alloc`.
///
/// Exhaustive unless the budget runs out. Agents that cannot take part in
/// any weakly improving trade are discarded first; the rest are tried as
/// the smallest member of the coalition in increasing order.
pub fn find_blocking_coalition(
    market: &Market,
    profile: &Profile,
    alloc: &Allocation,
    budget: Budget,
) -> Result<SearchReport, OracleError> {
    check_inputs(market, profile, alloc)?;
    let mut search = Search::new(profile, alloc, budget.0);
    let viable = search.viable_agents();
    let result = search.find_coalition(&viable);
    let nodes = search.nodes;
    Ok(match result {
        Ok(found) => SearchReport {
            witness: found.map(|(coalition, reallocation, strict_agent)| BlockingWitness {
                coalition,
                reallocation,
                strict_agent,
            }),
            exhausted_budget: false,
            nodes,
        },
        Err(Stop::Budget) => SearchReport {
            witness: None,
            exhausted_budget: true,
            nodes,
        },
        Err(Stop::Done) => unreachable!("find_coalition reports completion as Ok"),
    })
}

pub fn in_strict_core(
    market: &Market,
    profile: &Profile,
    alloc: &Allocation,
    budget: Budget,
) -> Result<Verdict, OracleError> {
    let report = find_blocking_coalition(market, profile, alloc, budget)?;
    Ok(match report {
        SearchReport { witness: Some(w), .. } => Verdict::No(w),
        SearchReport { exhausted_budget: true, .. } => Verdict::Indeterminate,
        _ => Verdict::Yes,
    })
}

/// No agent prefers her endowment to her bundle.
pub fn is_individually_rational(market: &Market, profile: &Profile, alloc: &Allocation) -> Result<bool, OracleError> {
    check_inputs(market, profile, alloc)?;
    Ok((0..market.agents()).all(|j| profile.get(j).weakly_prefers(alloc.bundle(j), &market.endowment(j))))
}

/// Not weakly blocked by the grand coalition.
pub fn is_pareto_optimal(
    market: &Market,
    profile: &Profile,
    alloc: &Allocation,
    budget: Budget,
) -> Result<Verdict, OracleError> {
    check_inputs(market, profile, alloc)?;
    let mut search = Search::new(profile, alloc, budget.0);
    let mut better = None;
    let result = search.for_each_allocation(&mut |b: Allocation| {
        let strict = (0..market.agents()).find(|&j| profile.get(j).prefers(b.bundle(j), alloc.bundle(j)));
        match strict {
            Some(j) => {
                better = Some((b, j));
                true
            }
            None => false,
        }
    });
    Ok(match (result, better) {
        (Err(_), _) => Verdict::Indeterminate,
        (Ok(()), Some((b, j))) => Verdict::No(BlockingWitness {
            coalition: (0..market.agents()).collect(),
            reallocation: b.into_bundles(),
            strict_agent: j,
        }),
        (Ok(()), None) => Verdict::Yes,
    })
}

/// Every allocation in which each agent weakly prefers her bundle to her
/// bundle in `reference`. With the endowment as reference these are the
/// individually rational allocations.
pub fn enumerate_weak_improvements(
    market: &Market,
    profile: &Profile,
    reference: &Allocation,
    cap: usize,
    budget: Budget,
) -> Result<Vec<Allocation>, OracleError> {
    check_inputs(market, profile, reference)?;
    let mut search = Search::new(profile, reference, budget.0);
    let mut out = Vec::new();
    let mut over = false;
    let result = search.for_each_allocation(&mut |b: Allocation| {
        if out.len() == cap {
            over = true;
            return true;
        }
        out.push(b);
        false
    });
    if result.is_err() {
        return Err(OracleError::BudgetExhausted { nodes: search.nodes });
    }
    if over {
        return Err(OracleError::CapExceeded { cap });
    }
    out.sort();
    Ok(out)
}

/// Every individually rational allocation, sorted.
pub fn enumerate_individually_rational(
    market: &Market,
    profile: &Profile,
    cap: usize,
    budget: Budget,
) -> Result<Vec<Allocation>, OracleError> {
    enumerate_weak_improvements(market, profile, &Allocation::endowment(market), cap, budget)
}

/// The whole strict core, sorted.
///
/// Strict-core allocations are individually rational, so only those are
/// enumerated (at most `cap` of them) and each is checked for blocking.
/// `budget` applies to each search separately.
pub fn enumerate_strict_core(
    market: &Market,
    profile: &Profile,
    cap: usize,
    budget: Budget,
) -> Result<Vec<Allocation>, OracleError> {
    let mut core = Vec::new();
    for alloc in enumerate_individually_rational(market, profile, cap, budget)? {
        match in_strict_core(market, profile, &alloc, budget)? {
            Verdict::Yes => core.push(alloc),
            Verdict::No(_) => {}
            Verdict::Indeterminate => {
                return Err(OracleError::BudgetExhausted {
                    nodes: budget.0.unwrap_or(0),
                })
            }
        }
    }
    Ok(core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::enumerate_allocations;
    use crate::mttc::run_mttc;
    use crate::preference::{ExplicitPreference, ImportanceOrder, LexPreference, Preference};
    use itertools::Itertools;
    use proptest::prelude::*;

    fn b(o: &[usize]) -> Bundle {
        Bundle::new(o.to_vec())
    }

    fn alloc(bs: &[&[usize]]) -> Allocation {
        Allocation::new(bs.iter().map(|o| b(o)).collect())
    }

    fn three_agent_market() -> (Market, Profile) {
        crate::mttc::tests::three_agent_market()
    }

    /// Independent check: every coalition and every per-type permutation of
    /// its items.
    fn brute_blocked(market: &Market, profile: &Profile, a: &Allocation) -> bool {
        let n = market.agents();
        (1..=n).any(|size| {
            (0..n).combinations(size).any(|coal| {
                let perms: Vec<Vec<usize>> = coal.iter().copied().permutations(size).collect();
                (0..market.types())
                    .map(|_| perms.iter())
                    .multi_cartesian_product()
                    .any(|per_type| {
                        let realloc: Vec<Bundle> = (0..size)
                            .map(|k| Bundle::new(per_type.iter().map(|perm| perm[k]).collect()))
                            .collect();
                        weakly_blocks(market, profile, a, &coal, &realloc).unwrap()
                    })
            })
        })
    }

    #[test]
    fn mttc_output_blocks_endowment() {
        let (m, prof) = three_agent_market();
        let (a, _) = run_mttc(&m, &prof).unwrap();
        let e = Allocation::endowment(&m);
        assert!(weakly_blocks(&m, &prof, &e, &[0, 1, 2], a.bundles()).unwrap());
    }

    #[test]
    fn singleton_keeping_endowment_does_not_block() {
        let (m, prof) = three_agent_market();
        let e = Allocation::endowment(&m);
        for j in 0..3 {
            assert!(!weakly_blocks(&m, &prof, &e, &[j], &[m.endowment(j)]).unwrap());
        }
    }

    #[test]
    fn malformed_reallocations_rejected() {
        let (m, prof) = three_agent_market();
        let e = Allocation::endowment(&m);
        assert!(weakly_blocks(&m, &prof, &e, &[0], &[b(&[1, 0])]).is_err());
        assert!(weakly_blocks(&m, &prof, &e, &[0, 1], &[b(&[1, 0]), b(&[1, 1])]).is_err());
        assert!(weakly_blocks(&m, &prof, &e, &[], &[]).is_err());
        assert!(weakly_blocks(&m, &prof, &e, &[0, 0], &[b(&[0, 0]), b(&[0, 0])]).is_err());
    }

    #[test]
    fn single_agent_is_never_blocked() {
        let m = Market::new(1, 2).unwrap();
        let prof = Profile::new(
            &m,
            vec![Preference::Lex(LexPreference::separable(ImportanceOrder::identity(2), 1, vec![vec![0], vec![0]]).unwrap())],
        )
        .unwrap();
        let e = Allocation::endowment(&m);
        assert_eq!(in_strict_core(&m, &prof, &e, Budget::UNLIMITED).unwrap(), Verdict::Yes);
        assert_eq!(is_pareto_optimal(&m, &prof, &e, Budget::UNLIMITED).unwrap(), Verdict::Yes);
        assert_eq!(enumerate_strict_core(&m, &prof, 10, Budget::UNLIMITED).unwrap(), vec![e]);
    }

    #[test]
    fn two_agents_swap_everything() {
        let m = Market::new(2, 2).unwrap();
        let prefs = (0..2)
            .map(|j| {
                let other = vec![1 - j, j];
                Preference::Lex(LexPreference::separable(ImportanceOrder::identity(2), 2, vec![other.clone(), other]).unwrap())
            })
            .collect();
        let prof = Profile::new(&m, prefs).unwrap();
        let e = Allocation::endowment(&m);
        let report = find_blocking_coalition(&m, &prof, &e, Budget::UNLIMITED).unwrap();
        let w = report.witness.unwrap();
        assert_eq!(w.coalition, vec![0, 1]);
        assert!(w.reallocation.iter().all(|x| x.owners().contains(&(1 - w.coalition[0]))));
        assert!(w.verify(&m, &prof, &e));
        // Brute force over all four allocations: only the full swap is in the core.
        let core: Vec<Allocation> = enumerate_allocations(&m, 100)
            .unwrap()
            .filter(|a| !brute_blocked(&m, &prof, a))
            .collect();
        assert_eq!(core, vec![alloc(&[&[1, 1], &[0, 0]])]);
        assert_eq!(enumerate_strict_core(&m, &prof, 100, Budget::UNLIMITED).unwrap(), core);
    }

    #[test]
    fn tiny_budget_is_indeterminate() {
        let (m, prof) = three_agent_market();
        let (a, _) = run_mttc(&m, &prof).unwrap();
        assert_eq!(in_strict_core(&m, &prof, &a, Budget::nodes(1)).unwrap(), Verdict::Indeterminate);
        assert_eq!(in_strict_core(&m, &prof, &a, Budget::UNLIMITED).unwrap(), Verdict::Yes);
    }

    #[test]
    fn individual_rationality() {
        let (m, prof) = three_agent_market();
        assert!(is_individually_rational(&m, &prof, &Allocation::endowment(&m)).unwrap());
        let (a, _) = run_mttc(&m, &prof).unwrap();
        assert!(is_individually_rational(&m, &prof, &a).unwrap());
        // Agent 3 prefers 3_H to 2_H.
        assert!(!is_individually_rational(&m, &prof, &alloc(&[&[2, 0], &[0, 1], &[1, 2]])).unwrap());
    }

    fn random_profile(m: &Market, seed: u64, explicit: bool) -> Profile {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let prefs = (0..m.agents())
            .map(|j| {
                if explicit && rng.gen_bool(0.5) {
                    let mut all: Vec<Bundle> = m.bundles().collect();
                    all.shuffle(&mut rng);
                    all.truncate(rng.gen_range(0..=all.len()));
                    Preference::Explicit(ExplicitPreference::new(m, all).unwrap())
                } else {
                    Preference::Lex(crate::preference::tests::random_lex(m.agents(), m.types(), seed ^ (j as u64 + 1) << 20))
                }
            })
            .collect();
        Profile::new(m, prefs).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn search_agrees_with_brute_force(n in 1usize..=3, p in 1usize..=2, seed in any::<u64>(), explicit in any::<bool>(), pick in any::<prop::sample::Index>()) {
            let m = Market::new(n, p).unwrap();
            let prof = random_profile(&m, seed, explicit);
            let all: Vec<Allocation> = enumerate_allocations(&m, 1000).unwrap().collect();
            let a = pick.get(&all);
            let report = find_blocking_coalition(&m, &prof, a, Budget::UNLIMITED).unwrap();
            prop_assert!(!report.exhausted_budget);
            prop_assert_eq!(report.witness.is_some(), brute_blocked(&m, &prof, a));
            if let Some(w) = report.witness {
                prop_assert!(w.verify(&m, &prof, a));
            }
        }

        #[test]
        fn pareto_agrees_with_brute_force(n in 1usize..=3, p in 1usize..=2, seed in any::<u64>(), explicit in any::<bool>(), pick in any::<prop::sample::Index>()) {
            let m = Market::new(n, p).unwrap();
            let prof = random_profile(&m, seed, explicit);
            let all: Vec<Allocation> = enumerate_allocations(&m, 1000).unwrap().collect();
            let a = pick.get(&all);
            let dominated = all.iter().any(|c| {
                weakly_blocks(&m, &prof, a, &(0..n).collect::<Vec<_>>(), c.bundles()).unwrap()
            });
            let v = is_pareto_optimal(&m, &prof, a, Budget::UNLIMITED).unwrap();
            prop_assert_eq!(v.is_yes(), !dominated);
            if let Verdict::No(w) = v {
                prop_assert!(w.verify(&m, &prof, a));
            }
        }

        #[test]
        fn ir_enumeration_agrees_with_filter(n in 1usize..=3, p in 1usize..=2, seed in any::<u64>(), explicit in any::<bool>()) {
            let m = Market::new(n, p).unwrap();
            let prof = random_profile(&m, seed, explicit);
            let mut expected: Vec<Allocation> = enumerate_allocations(&m, 1000)
                .unwrap()
                .filter(|a| is_individually_rational(&m, &prof, a).unwrap())
                .collect();
            expected.sort();
            prop_assert_eq!(enumerate_individually_rational(&m, &prof, 1000, Budget::UNLIMITED).unwrap(), expected);
        }
    }
}
