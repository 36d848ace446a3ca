//! Checks of the mechanism's axioms on one market.

use std::fmt;

use itertools::Itertools;

use crate::market::{Allocation, Market};
use crate::mttc::run_mttc;
use crate::oracle::{
    enumerate_individually_rational, in_strict_core, is_individually_rational, is_pareto_optimal, Budget, Verdict,
};
use crate::preference::{ImportanceOrder, LexPreference, Preference, Profile};

#[derive(Debug, Clone, Copy)]
pub struct AxiomOptions {
    pub budget: Budget,
    /// Also try joint misreports by pairs of agents.
    pub pairs: bool,
    /// Largest misreport space tried per agent.
    pub misreport_cap: usize,
    /// Largest number of individually rational allocations listed.
    pub enumeration_cap: usize,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        AxiomOptions {
            budget: Budget::UNLIMITED,
            pairs: false,
            misreport_cap: 5_000,
            enumeration_cap: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped(String),
    /// A finding that is not a violation of any claimed axiom.
    Info(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<Check>,
}

impl AxiomReport {
    fn push(&mut self, name: &'static str, outcome: Outcome) {
        self.checks.push(Check { name, outcome });
    }

    pub fn get(&self, name: &str) -> Option<&Outcome> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.outcome)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| matches!(c.outcome, Outcome::Fail(_))).count()
    }

    pub fn skipped(&self) -> usize {
        self.checks.iter().filter(|c| matches!(c.outcome, Outcome::Skipped(_))).count()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.outcome {
                Outcome::Pass => writeln!(f, "PASS {}", c.name)?,
                Outcome::Fail(m) => writeln!(f, "FAIL {}: {m}", c.name)?,
                Outcome::Skipped(m) => writeln!(f, "SKIP {}: {m}", c.name)?,
                Outcome::Info(m) => writeln!(f, "INFO {}: {m}", c.name)?,
            }
        }
        Ok(())
    }
}

/// Every separable preference with the given importance order.
pub fn separable_misreports(n: usize, importance: &ImportanceOrder, cap: usize) -> Option<Vec<Preference>> {
    let p = importance.types().len();
    let per_type: usize = (1..=n).product();
    let total = (0..p).try_fold(1usize, |acc, _| acc.checked_mul(per_type))?;
    if total > cap {
        return None;
    }
    let orders = (0..p).map(|_| (0..n).permutations(n)).multi_cartesian_product();
    Some(
        orders
            .map(|o| {
                Preference::Lex(
                    LexPreference::separable(importance.clone(), n, o).expect("permutations are valid orders"),
                )
            })
            .collect(),
    )
}

fn mttc(market: &Market, profile: &Profile) -> Allocation {
    run_mttc(market, profile).expect("lexicographic profile").0
}

/// Runs the axiom checks. MTTC-based checks need a lexicographic profile
/// and are skipped otherwise.
pub fn check_axioms(market: &Market, profile: &Profile, options: &AxiomOptions) -> AxiomReport {
    let mut report = AxiomReport::default();
    let n = market.agents();
    count_ir_po(market, profile, options, &mut report);
    if !profile.is_lexicographic() {
        let why = "profile is not lexicographic".to_string();
        for name in MTTC_CHECKS {
            report.push(name, Outcome::Skipped(why.clone()));
        }
        return report;
    }
    let alloc = mttc(market, profile);
    let label = |a: &Allocation| market.allocation_label(a);

    report.push(
        "individual-rationality",
        match is_individually_rational(market, profile, &alloc) {
            Ok(true) => Outcome::Pass,
            Ok(false) => Outcome::Fail(label(&alloc)),
            Err(e) => Outcome::Skipped(e.to_string()),
        },
    );
    report.push(
        "pareto-optimality",
        match is_pareto_optimal(market, profile, &alloc, options.budget) {
            Ok(Verdict::Yes) => Outcome::Pass,
            Ok(Verdict::No(w)) => Outcome::Fail(w.describe(market)),
            Ok(Verdict::Indeterminate) => Outcome::Skipped("search budget exhausted".into()),
            Err(e) => Outcome::Skipped(e.to_string()),
        },
    );
    report.push(
        "strict-core",
        match in_strict_core(market, profile, &alloc, options.budget) {
            Ok(Verdict::Yes) => Outcome::Pass,
            Ok(Verdict::No(w)) => Outcome::Fail(w.describe(market)),
            Ok(Verdict::Indeterminate) => Outcome::Skipped("search budget exhausted".into()),
            Err(e) => Outcome::Skipped(e.to_string()),
        },
    );

    let lex = |j: usize| profile.get(j).as_lex().expect("lexicographic");
    let spaces: Option<Vec<Vec<Preference>>> = (0..n)
        .map(|j| separable_misreports(n, lex(j).importance(), options.misreport_cap))
        .collect();
    match &spaces {
        None => {
            let why = format!("more than {} misreports per agent", options.misreport_cap);
            report.push("strategy-proofness", Outcome::Skipped(why.clone()));
            report.push("non-bossiness", Outcome::Skipped(why));
        }
        Some(spaces) => {
            let mut sp = Outcome::Pass;
            let mut nb = Outcome::Pass;
            for (j, space) in spaces.iter().enumerate() {
                for r in space {
                    let other = mttc(market, &profile.with_replaced(j, r.clone()));
                    let (mine, theirs) = (alloc.bundle(j), other.bundle(j));
                    if sp == Outcome::Pass && profile.get(j).prefers(theirs, mine) {
                        sp = Outcome::Fail(format!(
                            "agent {} gets {} instead of {} by misreporting",
                            j + 1,
                            market.bundle_label(theirs),
                            market.bundle_label(mine)
                        ));
                    }
                    if nb == Outcome::Pass && theirs == mine && other != alloc {
                        nb = Outcome::Fail(format!(
                            "agent {} keeps {} but changes the outcome to {}",
                            j + 1,
                            market.bundle_label(mine),
                            label(&other)
                        ));
                    }
                }
            }
            report.push("strategy-proofness", sp);
            report.push("non-bossiness", nb);
        }
    }

    let mut top = Outcome::Pass;
    for j in 0..n {
        let promoted = Preference::Lex(lex(j).with_top_bundle(alloc.bundle(j)));
        let other = mttc(market, &profile.with_replaced(j, promoted));
        if other != alloc {
            top = Outcome::Fail(format!(
                "agent {} ranking {} first changes the outcome to {}",
                j + 1,
                market.bundle_label(alloc.bundle(j)),
                label(&other)
            ));
            break;
        }
    }
    report.push("top-bundle-invariance", top);

    if options.pairs {
        report.push("pair-strategy-proofness", match &spaces {
            None => Outcome::Skipped(format!("more than {} misreports per agent", options.misreport_cap)),
            Some(spaces) => pair_deviations(market, profile, &alloc, spaces),
        });
    }

    report.push("importance-manipulation", importance_manipulation(market, profile, &alloc));
    report
}

const MTTC_CHECKS: [&str; 7] = [
    "individual-rationality",
    "pareto-optimality",
    "strict-core",
    "strategy-proofness",
    "non-bossiness",
    "top-bundle-invariance",
    "importance-manipulation",
];

fn count_ir_po(market: &Market, profile: &Profile, options: &AxiomOptions, report: &mut AxiomReport) {
    let outcome = match enumerate_individually_rational(market, profile, options.enumeration_cap, options.budget) {
        Ok(ir) => {
            let mut po = 0;
            let mut unknown = false;
            for a in &ir {
                match is_pareto_optimal(market, profile, a, options.budget) {
                    Ok(Verdict::Yes) => po += 1,
                    Ok(Verdict::No(_)) => {}
                    _ => unknown = true,
                }
            }
            if unknown {
                Outcome::Skipped(format!("{} IR allocations, Pareto search budget exhausted", ir.len()))
            } else {
                Outcome::Info(format!("{} IR allocations, {po} IR∧PO", ir.len()))
            }
        }
        Err(e) => Outcome::Skipped(e.to_string()),
    };
    report.push("ir-po-count", outcome);
}

fn pair_deviations(market: &Market, profile: &Profile, alloc: &Allocation, spaces: &[Vec<Preference>]) -> Outcome {
    let n = market.agents();
    for (a, b) in (0..n).tuple_combinations() {
        for ra in &spaces[a] {
            let with_a = profile.with_replaced(a, ra.clone());
            for rb in &spaces[b] {
                let other = mttc(market, &with_a.with_replaced(b, rb.clone()));
                let cmp = |j: usize| profile.get(j).compare(other.bundle(j), alloc.bundle(j));
                let (ca, cb) = (cmp(a), cmp(b));
                if ca.is_ge() && cb.is_ge() && (ca.is_gt() || cb.is_gt()) {
                    return Outcome::Fail(format!(
                        "agents {} and {} jointly misreport to reach {}",
                        a + 1,
                        b + 1,
                        market.allocation_label(&other)
                    ));
                }
            }
        }
    }
    Outcome::Pass
}

/// Tries every other importance order with the agent's own CP-net, where
/// that net stays legal. A gain is reported as information: the mechanism
/// is only claimed strategy-proof with importance orders held fixed.
fn importance_manipulation(market: &Market, profile: &Profile, alloc: &Allocation) -> Outcome {
    let n = market.agents();
    let p = market.types();
    for j in 0..n {
        let lex = profile.get(j).as_lex().expect("lexicographic");
        for order in (0..p).permutations(p) {
            let imp = ImportanceOrder::new(order).expect("permutation");
            if &imp == lex.importance() {
                continue;
            }
            let Ok(fake) = LexPreference::new(imp.clone(), lex.cpnet().clone()) else {
                continue;
            };
            let other = mttc(market, &profile.with_replaced(j, fake.into()));
            if profile.get(j).prefers(other.bundle(j), alloc.bundle(j)) {
                let names: Vec<String> = imp.types().iter().map(|&t| market.type_label(t)).collect();
                return Outcome::Info(format!(
                    "agent {} reporting importance {} gets {} instead of {}",
                    j + 1,
                    names.join(">"),
                    market.bundle_label(other.bundle(j)),
                    market.bundle_label(alloc.bundle(j))
                ));
            }
        }
    }
    Outcome::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{house_car_market, impossibility_market, konishi_gadget};

    #[test]
    fn house_car_passes_and_shows_importance_gain() {
        let (m, p) = house_car_market();
        let opts = AxiomOptions {
            pairs: true,
            ..AxiomOptions::default()
        };
        let r = check_axioms(&m, &p, &opts);
        assert_eq!(r.failures(), 0, "{r}");
        assert_eq!(r.skipped(), 0, "{r}");
        assert_eq!(
            r.get("importance-manipulation"),
            Some(&Outcome::Info("agent 1 reporting importance C>H gets (2_H,3_C) instead of (2_H,1_C)".into()))
        );
    }

    #[test]
    fn impossibility_counts() {
        let (m, p) = impossibility_market();
        let r = check_axioms(&m, &p, &AxiomOptions::default());
        assert_eq!(r.get("ir-po-count"), Some(&Outcome::Info("3 IR allocations, 2 IR∧PO".into())));
    }

    #[test]
    fn single_agent_is_vacuous() {
        let m = Market::new(1, 2).unwrap();
        let lex = LexPreference::separable(ImportanceOrder::identity(2), 1, vec![vec![0], vec![0]]).unwrap();
        let p = Profile::new(&m, vec![lex.into()]).unwrap();
        let r = check_axioms(&m, &p, &AxiomOptions::default());
        assert_eq!(r.failures(), 0);
        assert_eq!(r.skipped(), 0);
    }

    #[test]
    fn explicit_profile_skips_mechanism_checks() {
        let (m, p) = konishi_gadget();
        let r = check_axioms(&m, &p, &AxiomOptions::default());
        assert_eq!(r.failures(), 0);
        assert_eq!(r.skipped(), MTTC_CHECKS.len());
        assert_eq!(r.get("ir-po-count").map(|o| matches!(o, Outcome::Info(_))), Some(true));
    }

    #[test]
    fn misreport_space_size() {
        let s = separable_misreports(3, &ImportanceOrder::identity(2), 100).unwrap();
        assert_eq!(s.len(), 36);
        assert!(separable_misreports(5, &ImportanceOrder::identity(2), 100).is_none());
    }
}
