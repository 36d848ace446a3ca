//! Small fixed markets with known behavior. Type 1 is the house (`H`),
//! type 2 the car (`C`).

use crate::market::{Allocation, Bundle, Market};
use crate::preference::{ExplicitPreference, ImportanceOrder, LexPreference, Preference, Profile};

fn separable(importance: Vec<usize>, orders: [Vec<usize>; 2]) -> Preference {
    let [h, c] = orders;
    Preference::Lex(
        LexPreference::separable(ImportanceOrder::new(importance).expect("permutation"), 3, vec![h, c])
            .expect("valid orders"),
    )
}

/// Three agents, houses before cars for all. MTTC gives agent 1 `(2_H,1_C)`,
/// agent 2 `(3_H,2_C)` and agent 3 `(1_H,3_C)`.
pub fn house_car_market() -> (Market, Profile) {
    let market = Market::new(3, 2).expect("nonempty");
    let prefs = vec![
        separable(vec![0, 1], [vec![1, 0, 2], vec![2, 0, 1]]),
        separable(vec![0, 1], [vec![2, 0, 1], vec![1, 0, 2]]),
        separable(vec![0, 1], [vec![0, 1, 2], vec![2, 0, 1]]),
    ];
    let profile = Profile::new(&market, prefs).expect("three agents");
    (market, profile)
}

/// A second strict-core allocation of [`house_car_market`], different from
/// the MTTC outcome.
pub fn house_car_alternative() -> Allocation {
    Allocation::from_permutations(&[vec![1, 2, 0], vec![2, 1, 0]])
}

/// Three agents with explicit preferences and an empty strict core.
pub fn konishi_gadget() -> (Market, Profile) {
    let market = Market::new(3, 2).expect("nonempty");
    let lists: [&[(usize, usize)]; 3] = [
        &[(1, 3), (3, 3), (1, 2)],
        &[(2, 3), (2, 1), (3, 3), (3, 1), (2, 2)],
        &[(2, 1), (2, 2), (3, 1), (1, 1), (3, 2), (1, 2), (2, 3), (3, 3), (1, 3)],
    ];
    let prefs = lists
        .iter()
        .map(|l| {
            let ranked = l.iter().map(|&(h, c)| Bundle::new(vec![h - 1, c - 1])).collect();
            Preference::Explicit(ExplicitPreference::new(&market, ranked).expect("distinct bundles"))
        })
        .collect();
    let profile = Profile::new(&market, prefs).expect("three agents");
    (market, profile)
}

/// Separable lexicographic market on which no mechanism is individually
/// rational, Pareto optimal and strategy-proof. Agent 2 cares about cars
/// first.
pub fn impossibility_market() -> (Market, Profile) {
    let market = Market::new(3, 2).expect("nonempty");
    let prefs = vec![
        separable(vec![0, 1], [vec![1, 0, 2], vec![0, 2, 1]]),
        separable(vec![1, 0], [vec![2, 1, 0], vec![1, 0, 2]]),
        separable(vec![0, 1], [vec![0, 2, 1], vec![0, 2, 1]]),
    ];
    let profile = Profile::new(&market, prefs).expect("three agents");
    (market, profile)
}
