use std::fs;
use std::path::PathBuf;

use mttc::harness::{parse_market, MarketFile};
use mttc::mttc::run_mttc;
use mttc::oracle::{enumerate_strict_core, in_strict_core, Budget, Verdict};
use mttc::reductions::{
    house_car_market, impossibility_market, konishi_gadget, parse_dimacs, reduce_core_nonempty,
    reduce_in_strict_core,
};

fn data(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

const MARKETS: [&str; 5] = [
    "house_car.market",
    "impossibility.market",
    "konishi.market",
    "two_clause_membership.market",
    "two_clause_nonempty.market",
];

#[test]
fn corpus_is_canonical() {
    for name in MARKETS {
        let text = data(name);
        let f = parse_market(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(f.to_text(), text, "{name} is not in canonical form");
    }
}

#[test]
fn corpus_matches_constructors() {
    let same = |name: &str, (m, p)| {
        let f = parse_market(&data(name)).unwrap();
        assert_eq!((f.market, f.profile), (m, p), "{name}");
    };
    same("house_car.market", house_car_market());
    same("impossibility.market", impossibility_market());
    same("konishi.market", konishi_gadget());

    let cnf = parse_dimacs(&data("two_clause.cnf")).unwrap();
    let member = reduce_in_strict_core(&cnf);
    let f = parse_market(&data("two_clause_membership.market")).unwrap();
    assert_eq!(f.profile, member.profile);
    assert_eq!(f.allocation, Some(member.allocation));
    let nonempty = reduce_core_nonempty(&cnf);
    let f = parse_market(&data("two_clause_nonempty.market")).unwrap();
    assert_eq!(f.profile, nonempty.profile);
    assert_eq!(f.allocation, Some(nonempty.top_allocation().unwrap()));
}

#[test]
fn pinned_results() {
    let f = parse_market(&data("house_car.market")).unwrap();
    let (a, _) = run_mttc(&f.market, &f.profile).unwrap();
    assert_eq!(f.market.allocation_label(&a), "1: (2_H,1_C); 2: (3_H,2_C); 3: (1_H,3_C)");

    let f = parse_market(&data("konishi.market")).unwrap();
    assert!(enumerate_strict_core(&f.market, &f.profile, 1000, Budget::UNLIMITED).unwrap().is_empty());

    let f = parse_market(&data("two_clause_membership.market")).unwrap();
    let v = in_strict_core(&f.market, &f.profile, f.allocation.as_ref().unwrap(), Budget::UNLIMITED).unwrap();
    assert!(v.is_no());

    let f = parse_market(&data("two_clause_nonempty.market")).unwrap();
    let v = in_strict_core(&f.market, &f.profile, f.allocation.as_ref().unwrap(), Budget::UNLIMITED).unwrap();
    assert_eq!(v, Verdict::Yes);
}

#[test]
fn reparsing_is_stable() {
    for name in MARKETS {
        let once = parse_market(&data(name)).unwrap().to_text();
        let twice = parse_market(&once).unwrap().to_text();
        assert_eq!(once, twice);
        let f: MarketFile = parse_market(&twice).unwrap();
        assert_eq!(f, parse_market(&once).unwrap());
    }
}

#[test]
fn every_sign_pattern_membership_instance_is_in_core() {
    // All eight clauses over three variables: unsatisfiable, so the
    // constructed allocation must survive an exhaustive search.
    let mut clauses = Vec::new();
    for mask in 0..8i64 {
        let s = |bit: i64, v: i64| if mask >> bit & 1 == 1 { -v } else { v };
        clauses.push([s(0, 1), s(1, 2), s(2, 3)]);
    }
    let cnf = mttc::reductions::Cnf3::from_signed(3, &clauses).unwrap();
    assert!(!cnf.is_satisfiable());
    let inst = reduce_in_strict_core(&cnf);
    let v = in_strict_core(&inst.market, &inst.profile, &inst.allocation, Budget::UNLIMITED).unwrap();
    assert_eq!(v, Verdict::Yes);
}
