use std::collections::BTreeSet;

use mttc::harness::{random_profile, RandomSpec};
use mttc::market::{Allocation, Market};
use mttc::mttc::{compute_po, enumerate_extensions, mttc_star_orders, run_mttc};
use mttc::preference::{Preference, Profile};
use proptest::prelude::*;

/// Plain top trading cycles on one type; `rank[j]` lists owners best first.
fn ttc(rank: &[Vec<usize>]) -> Vec<usize> {
    let n = rank.len();
    let mut gets = vec![None; n];
    let mut left = vec![true; n];
    while left.iter().any(|&l| l) {
        let point: Vec<usize> = (0..n)
            .map(|j| if left[j] { *rank[j].iter().find(|&&o| left[o]).unwrap() } else { usize::MAX })
            .collect();
        let start = (0..n).find(|&j| left[j]).unwrap();
        // Walk until a node repeats; that node lies on a cycle.
        let mut seen = vec![false; n];
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = point[v];
        }
        let first = v;
        loop {
            gets[v] = Some(point[v]);
            v = point[v];
            if v == first {
                break;
            }
        }
        for j in 0..n {
            if gets[j].is_some() {
                left[j] = false;
            }
        }
    }
    gets.into_iter().map(Option::unwrap).collect()
}

/// With one shared importance order, types can be traded one at a time.
fn sequential_ttc(market: &Market, profile: &Profile) -> Allocation {
    let (n, p) = (market.agents(), market.types());
    let lex = |j: usize| profile.get(j).as_lex().unwrap();
    let order = lex(0).importance().types().to_vec();
    let mut held: Vec<Vec<Option<usize>>> = vec![vec![None; p]; n];
    let mut perms = vec![Vec::new(); p];
    for &t in &order {
        let rank: Vec<Vec<usize>> = (0..n).map(|j| lex(j).cpt_lookup(t, &held[j]).unwrap().to_vec()).collect();
        let got = ttc(&rank);
        for j in 0..n {
            held[j][t] = Some(got[j]);
        }
        perms[t] = got;
    }
    Allocation::from_permutations(&perms)
}

fn spec(seed: u64, n: usize, p: usize) -> RandomSpec {
    RandomSpec::new(seed, n, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_cycle_runs_are_the_extensions(seed in any::<u64>(), n in 2usize..=3, p in 1usize..=3) {
        let (m, prof) = random_profile(spec(seed, n, p));
        let (alloc, trace) = run_mttc(&m, &prof).unwrap();
        let po = compute_po(&m, &prof, &trace).unwrap();
        let ext: BTreeSet<Vec<usize>> = enumerate_extensions(&po, 100_000).unwrap().into_iter().collect();
        let runs = mttc_star_orders(&m, &prof, 100_000).unwrap();
        let mut orders = BTreeSet::new();
        for r in runs {
            prop_assert_eq!(&r.allocation, &alloc);
            let order: Vec<usize> = r.order.iter().map(|c| trace.index_of(c).unwrap()).collect();
            orders.insert(order);
        }
        prop_assert_eq!(orders, ext);
    }

    #[test]
    fn top_bundle_invariance(seed in any::<u64>(), n in 2usize..=4, p in 1usize..=3) {
        let (m, prof) = random_profile(spec(seed, n, p));
        let (alloc, _) = run_mttc(&m, &prof).unwrap();
        for j in 0..n {
            let promoted = prof.get(j).as_lex().unwrap().with_top_bundle(alloc.bundle(j));
            let (again, _) = run_mttc(&m, &prof.with_replaced(j, Preference::Lex(promoted))).unwrap();
            prop_assert_eq!(&again, &alloc);
        }
    }

    #[test]
    fn one_type_is_plain_ttc(seed in any::<u64>(), n in 1usize..=6) {
        let (m, prof) = random_profile(spec(seed, n, 1));
        let (alloc, _) = run_mttc(&m, &prof).unwrap();
        let rank: Vec<Vec<usize>> = (0..n).map(|j| prof.get(j).as_lex().unwrap().cpnet().order(0, 0).to_vec()).collect();
        prop_assert_eq!(alloc, Allocation::from_permutations(&[ttc(&rank)]));
    }

    #[test]
    fn shared_importance_is_sequential_ttc(seed in any::<u64>(), n in 1usize..=5, p in 1usize..=3) {
        let s = RandomSpec { shared_importance: true, ..spec(seed, n, p) };
        let (m, prof) = random_profile(s);
        let (alloc, _) = run_mttc(&m, &prof).unwrap();
        prop_assert_eq!(alloc, sequential_ttc(&m, &prof));
    }

    #[test]
    fn rounds_and_pointers_are_bounded(seed in any::<u64>(), n in 1usize..=6, p in 1usize..=4) {
        let (m, prof) = random_profile(spec(seed, n, p));
        let (alloc, trace) = run_mttc(&m, &prof).unwrap();
        prop_assert!(alloc.validate(&m).is_ok());
        prop_assert!(trace.rounds <= n * p);
        prop_assert!(trace.pointer_computations <= n * n * p);
        let traded: usize = trace.cycles.iter().map(|c| c.cycle.len()).sum();
        prop_assert_eq!(traded, n * p);
    }
}

#[test]
fn ttc_oracle_on_a_known_case() {
    // 1 wants 2's item, 2 wants 1's, 3 keeps its own.
    assert_eq!(ttc(&[vec![1, 0, 2], vec![0, 1, 2], vec![0, 1, 2]]), vec![1, 0, 2]);
}
