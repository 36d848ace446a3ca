//! 3-SAT to strict-core non-emptiness with two types and explicit
//! preferences.
//!
//! Each clause gets three agents wired like the three-agent market with an
//! empty strict core; the first of them can escape by trading her type-1
//! item with a literal agent whose literal satisfies the clause. Literal
//! agents for one variable and sign form a chain passing type-2 items
//! towards the next variable's agent, so a stable allocation encodes a
//! consistent valuation.

use super::{Cnf3, Literal, LiteralOrderW, ReductionError};
use crate::market::{Allocation, Bundle, Market};
use crate::preference::{ExplicitPreference, Preference, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonEmptyAgent {
    /// `Clause(j, k)` with `k` in `0..3`.
    Clause(usize, usize),
    Var(usize),
    /// `Lit(lit, j)`: the agent for literal `lit` in the chain of clause `j`.
    Lit(Literal, usize),
}

impl NonEmptyAgent {
    pub fn label(self) -> String {
        match self {
            NonEmptyAgent::Clause(j, k) => format!("c{}^{}", j + 1, k + 1),
            NonEmptyAgent::Var(i) => format!("x{}", i + 1),
            NonEmptyAgent::Lit(l, j) => format!("{}_{}^{}", u8::from(l.positive), l.var + 1, j + 1),
        }
    }
}

/// Readings applied where the construction is ambiguous or, taken
/// literally, not individually rational.
pub const NORMALIZATIONS: &[&str] = &[
    "the negative chain of the last occurrence ends at the next variable agent, as the positive chain does",
    "the variable after the last one wraps to the first",
    "a variable agent's type-2 item comes from the first agent of the chosen chain",
    "literal agents whose literal is in the clause also rank (own, next) second, so passing type-2 items along the chosen chain is individually rational",
    "literal agents of the unchosen sign keep their endowment",
];

#[derive(Debug, Clone)]
pub struct NonEmptyInstance {
    pub market: Market,
    pub profile: Profile,
    pub agents: Vec<NonEmptyAgent>,
    cnf: Cnf3,
}

impl NonEmptyInstance {
    pub fn index(&self, agent: NonEmptyAgent) -> usize {
        position(&self.agents, agent)
    }

    pub fn labels(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.label()).collect()
    }

    /// The allocation built from a satisfying valuation: each clause trades
    /// type-1 items with its best satisfied literal under the W order.
    pub fn allocation_for(&self, valuation: &[bool]) -> Result<Allocation, ReductionError> {
        let cnf = &self.cnf;
        if valuation.len() != cnf.num_vars() {
            return Err(ReductionError::ValuationLength {
                expected: cnf.num_vars(),
                got: valuation.len(),
            });
        }
        if !cnf.satisfies(valuation) {
            return Err(ReductionError::NotSatisfying);
        }
        let ix = |a| self.index(a);
        let w = LiteralOrderW::new(cnf.num_vars());
        let n = cnf.clauses().len();
        let mut bundles: Vec<Option<Bundle>> = vec![None; self.agents.len()];
        fn set(bundles: &mut [Option<Bundle>], a: usize, t1: usize, t2: usize) {
            bundles[a] = Some(Bundle::new(vec![t1, t2]));
        }
        for (j, clause) in cnf.clauses().iter().enumerate() {
            let best = *w
                .sort_clause(clause)
                .iter()
                .find(|l| l.satisfied_by(valuation))
                .expect("clause is satisfied");
            let (c1, c2, c3) = (ix(NonEmptyAgent::Clause(j, 0)), ix(NonEmptyAgent::Clause(j, 1)), ix(NonEmptyAgent::Clause(j, 2)));
            let lit = ix(NonEmptyAgent::Lit(best, j));
            set(&mut bundles, c1, lit, ix(NonEmptyAgent::Clause((j + 1) % n, 0)));
            set(&mut bundles, c2, c2, c3);
            set(&mut bundles, c3, c3, c2);
            set(&mut bundles, lit, c1, self.next(best, j));
        }
        for (i, &v) in valuation.iter().enumerate() {
            let chosen = Literal { var: i, positive: v };
            let occ = cnf.occurrences(i);
            let x = ix(NonEmptyAgent::Var(i));
            set(&mut bundles, x, x, ix(NonEmptyAgent::Lit(chosen, occ[0])));
            for &j in &occ {
                let own = ix(NonEmptyAgent::Lit(chosen, j));
                if bundles[own].is_none() {
                    set(&mut bundles, own, own, self.next(chosen, j));
                }
                let other = ix(NonEmptyAgent::Lit(Literal { var: i, positive: !v }, j));
                set(&mut bundles, other, other, other);
            }
        }
        Ok(Allocation::new(bundles.into_iter().map(|b| b.expect("every agent assigned")).collect()))
    }

    /// The allocation for the best satisfying valuation, which prefers
    /// `true` at the lowest differing variable.
    pub fn top_allocation(&self) -> Result<Allocation, ReductionError> {
        let v = self
            .cnf
            .satisfying_valuations()
            .into_iter()
            .next()
            .ok_or(ReductionError::Unsatisfiable)?;
        self.allocation_for(&v)
    }

    fn next(&self, lit: Literal, j: usize) -> usize {
        next_in_chain(&self.agents, &self.cnf, lit, j)
    }
}

fn position(agents: &[NonEmptyAgent], agent: NonEmptyAgent) -> usize {
    agents
        .iter()
        .position(|&a| a == agent)
        .unwrap_or_else(|| panic!("no agent {}", agent.label()))
}

/// The agent whose type-2 item the chain agent `Lit(lit, j)` wants.
fn next_in_chain(agents: &[NonEmptyAgent], cnf: &Cnf3, lit: Literal, j: usize) -> usize {
    let occ = cnf.occurrences(lit.var);
    let k = occ.iter().position(|&c| c == j).expect("occurrence");
    match occ.get(k + 1) {
        Some(&j2) => position(agents, NonEmptyAgent::Lit(lit, j2)),
        None => position(agents, NonEmptyAgent::Var((lit.var + 1) % cnf.num_vars())),
    }
}

/// Builds an instance whose strict core is non-empty iff `cnf` is
/// satisfiable.
pub fn reduce_core_nonempty(cnf: &Cnf3) -> NonEmptyInstance {
    let (m, n) = (cnf.num_vars(), cnf.clauses().len());
    let mut agents = Vec::new();
    for j in 0..n {
        agents.extend((0..3).map(|k| NonEmptyAgent::Clause(j, k)));
    }
    agents.extend((0..m).map(NonEmptyAgent::Var));
    for i in 0..m {
        for j in cnf.occurrences(i) {
            agents.push(NonEmptyAgent::Lit(Literal::pos(i), j));
            agents.push(NonEmptyAgent::Lit(Literal::neg(i), j));
        }
    }
    let market = Market::new(agents.len(), 2).expect("nonempty");
    let ix = |a| position(&agents, a);
    let b = |t1: usize, t2: usize| Bundle::new(vec![t1, t2]);
    let w = LiteralOrderW::new(m);
    let mut lists: Vec<Vec<Bundle>> = Vec::with_capacity(agents.len());
    for &agent in &agents {
        let me = ix(agent);
        let list = match agent {
            NonEmptyAgent::Clause(j, k) => {
                let c = |k: usize| ix(NonEmptyAgent::Clause(j, k));
                let (c1, c2, c3) = (c(0), c(1), c(2));
                match k {
                    0 => {
                        let next = ix(NonEmptyAgent::Clause((j + 1) % n, 0));
                        let mut l: Vec<Bundle> = w
                            .sort_clause(&cnf.clauses()[j])
                            .iter()
                            .map(|&lit| b(ix(NonEmptyAgent::Lit(lit, j)), next))
                            .collect();
                        l.extend([b(c1, c3), b(c3, c3), b(c1, c2), b(c1, c1)]);
                        l
                    }
                    1 => vec![b(c2, c3), b(c2, c1), b(c3, c3), b(c3, c1), b(c2, c2)],
                    _ => vec![
                        b(c2, c1),
                        b(c2, c2),
                        b(c3, c1),
                        b(c1, c1),
                        b(c3, c2),
                        b(c1, c2),
                        b(c2, c3),
                        b(c3, c3),
                        b(c1, c3),
                    ],
                }
            }
            NonEmptyAgent::Var(i) => {
                let first = cnf.occurrences(i)[0];
                vec![
                    b(me, ix(NonEmptyAgent::Lit(Literal::pos(i), first))),
                    b(me, ix(NonEmptyAgent::Lit(Literal::neg(i), first))),
                    b(me, me),
                ]
            }
            NonEmptyAgent::Lit(lit, j) => {
                let next = next_in_chain(&agents, cnf, lit, j);
                let mut l = Vec::new();
                if cnf.contains(j, lit) {
                    l.push(b(ix(NonEmptyAgent::Clause(j, 0)), next));
                }
                l.extend([b(me, next), b(me, me)]);
                l
            }
        };
        lists.push(list);
    }
    let prefs = lists
        .into_iter()
        .map(|l| Preference::Explicit(ExplicitPreference::new(&market, l).expect("distinct valid bundles")))
        .collect();
    let profile = Profile::new(&market, prefs).expect("shape matches");
    NonEmptyInstance {
        market,
        profile,
        agents,
        cnf: cnf.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_strict_core, in_strict_core, is_individually_rational, Budget, Verdict};

    fn two_clause() -> Cnf3 {
        Cnf3::from_signed(3, &[[1, 2, 3], [-1, -2, -3]]).unwrap()
    }

    #[test]
    fn agents_for_two_clauses() {
        let inst = reduce_core_nonempty(&two_clause());
        // 3 per clause, one per variable, two per variable occurrence.
        assert_eq!(inst.market.agents(), 6 + 3 + 12);
        assert_eq!(&inst.labels()[..7], ["c1^1", "c1^2", "c1^3", "c2^1", "c2^2", "c2^3", "x1"]);
        assert_eq!(inst.labels()[9..13], ["1_1^1", "0_1^1", "1_1^2", "0_1^2"]);
    }

    #[test]
    fn clause_agent_lists_follow_w_order() {
        let cnf = Cnf3::from_signed(2, &[[-1, 2, 1]]).unwrap();
        let inst = reduce_core_nonempty(&cnf);
        let c1 = inst.index(NonEmptyAgent::Clause(0, 0));
        let Preference::Explicit(ex) = inst.profile.get(c1) else { panic!() };
        let l = inst.labels();
        let firsts: Vec<&str> = ex.ranked()[..3].iter().map(|b| l[b.owner(0)].as_str()).collect();
        assert_eq!(firsts, ["1_1^1", "1_2^1", "0_1^1"]);
        // A single clause points back to itself.
        assert!(ex.ranked()[..3].iter().all(|b| b.owner(1) == c1));
    }

    #[test]
    fn top_allocation_swaps_clause_helpers() {
        let inst = reduce_core_nonempty(&two_clause());
        let a = inst.top_allocation().unwrap();
        assert!(a.validate(&inst.market).is_ok());
        for j in 0..2 {
            let c2 = inst.index(NonEmptyAgent::Clause(j, 1));
            let c3 = inst.index(NonEmptyAgent::Clause(j, 2));
            assert_eq!(a.bundle(c2), &Bundle::new(vec![c2, c3]));
            assert_eq!(a.bundle(c3), &Bundle::new(vec![c3, c2]));
        }
        // (1,1,0): clause 1 takes x1, clause 2 takes ~x3.
        let c11 = inst.index(NonEmptyAgent::Clause(0, 0));
        let c21 = inst.index(NonEmptyAgent::Clause(1, 0));
        assert_eq!(a.bundle(c11).owner(0), inst.index(NonEmptyAgent::Lit(Literal::pos(0), 0)));
        assert_eq!(a.bundle(c21).owner(0), inst.index(NonEmptyAgent::Lit(Literal::neg(2), 1)));
        assert!(is_individually_rational(&inst.market, &inst.profile, &a).unwrap());
    }

    #[test]
    fn bad_valuations_rejected() {
        let inst = reduce_core_nonempty(&two_clause());
        assert_eq!(inst.allocation_for(&[true, true, true]), Err(ReductionError::NotSatisfying));
        assert!(matches!(inst.allocation_for(&[true]), Err(ReductionError::ValuationLength { .. })));
        let unsat = reduce_core_nonempty(&Cnf3::from_signed(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap());
        assert_eq!(unsat.top_allocation(), Err(ReductionError::Unsatisfiable));
    }

    #[test]
    fn single_clause_top_allocation_is_stable() {
        let cnf = Cnf3::from_signed(3, &[[1, -2, 3]]).unwrap();
        let inst = reduce_core_nonempty(&cnf);
        let a = inst.top_allocation().unwrap();
        let v = in_strict_core(&inst.market, &inst.profile, &a, Budget::UNLIMITED).unwrap();
        assert_eq!(v, Verdict::Yes);
    }

    #[test]
    fn unsatisfiable_formula_has_empty_core() {
        let cnf = Cnf3::from_signed(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
        let inst = reduce_core_nonempty(&cnf);
        let core = enumerate_strict_core(&inst.market, &inst.profile, 100_000, Budget::UNLIMITED).unwrap();
        assert!(core.is_empty());
    }
}
