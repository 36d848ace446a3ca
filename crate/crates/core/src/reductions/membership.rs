//! 3-SAT to strict-core membership with two types and separable
//! lexicographic preferences (type 1 more important for everyone).
//!
//! Each type is described by a graph over agents. A dashed edge `(a, b)`
//! gives `a` the item of `b` in the challenged allocation and ranks it above
//! `a`'s own item; a solid edge `(a, b)` ranks `b`'s item above the allocated
//! one. Every other item ranks below the agent's own. Local orders are
//! solid targets (by agent index), then the dashed target, then the own
//! item, then the rest by agent index.

use super::{Cnf3, Literal, ReductionError};
use crate::market::{Allocation, Bundle, Market};
use crate::oracle::BlockingWitness;
use crate::preference::{ImportanceOrder, LexPreference, Preference, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Dashed,
    Solid,
}

/// `(from, to, kind)` triples over agent indices.
pub type EdgeSet = Vec<(usize, usize, EdgeKind)>;

/// Agent names of the membership construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberAgent {
    Clause(usize),
    /// `True(i, j)`: the agent for variable `i` set true, clause `j`.
    True(usize, usize),
    False(usize, usize),
    Var(usize),
    NegVar(usize),
    Chain(usize),
    E1,
    E2,
}

impl MemberAgent {
    pub fn label(self) -> String {
        match self {
            MemberAgent::Clause(j) => format!("c{}", j + 1),
            MemberAgent::True(i, j) => format!("1_{}^{}", i + 1, j + 1),
            MemberAgent::False(i, j) => format!("0_{}^{}", i + 1, j + 1),
            MemberAgent::Var(i) => format!("x{}", i + 1),
            MemberAgent::NegVar(i) => format!("~x{}", i + 1),
            MemberAgent::Chain(i) => format!("d{}", i + 1),
            MemberAgent::E1 => "e1".into(),
            MemberAgent::E2 => "e2".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MembershipInstance {
    pub market: Market,
    pub profile: Profile,
    pub allocation: Allocation,
    pub agents: Vec<MemberAgent>,
    pub g1: EdgeSet,
    pub g2: EdgeSet,
}

impl MembershipInstance {
    pub fn index(&self, agent: MemberAgent) -> usize {
        self.agents
            .iter()
            .position(|&a| a == agent)
            .unwrap_or_else(|| panic!("no agent {}", agent.label()))
    }

    pub fn labels(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.label()).collect()
    }
}

struct Layout<'a> {
    cnf: &'a Cnf3,
    agents: Vec<MemberAgent>,
    occ: Vec<Vec<usize>>,
}

impl Layout<'_> {
    fn new(cnf: &Cnf3) -> Layout<'_> {
        let (m, n) = (cnf.num_vars(), cnf.clauses().len());
        let occ: Vec<Vec<usize>> = (0..m).map(|i| cnf.occurrences(i)).collect();
        let mut agents: Vec<MemberAgent> = (0..n).map(MemberAgent::Clause).collect();
        for (i, js) in occ.iter().enumerate() {
            for &j in js {
                agents.push(MemberAgent::True(i, j));
                agents.push(MemberAgent::False(i, j));
            }
        }
        for i in 0..m {
            agents.push(MemberAgent::Var(i));
            agents.push(MemberAgent::NegVar(i));
        }
        agents.extend((0..m).map(MemberAgent::Chain));
        agents.push(MemberAgent::E1);
        agents.push(MemberAgent::E2);
        Layout { cnf, agents, occ }
    }

    fn ix(&self, a: MemberAgent) -> usize {
        self.agents.iter().position(|&b| b == a).expect("agent exists")
    }

    fn first(&self, i: usize, positive: bool) -> usize {
        let j = self.occ[i][0];
        self.ix(if positive { MemberAgent::True(i, j) } else { MemberAgent::False(i, j) })
    }

    fn g1(&self) -> EdgeSet {
        use EdgeKind::*;
        use MemberAgent::*;
        let (m, n) = (self.cnf.num_vars(), self.cnf.clauses().len());
        let mut e = Vec::new();
        for i in 0..m {
            let js = &self.occ[i];
            for (lit, end) in [(true, Var(i)), (false, NegVar(i))] {
                let node = |j: usize| if lit { True(i, j) } else { False(i, j) };
                for w in js.windows(2) {
                    e.push((self.ix(node(w[0])), self.ix(node(w[1])), Dashed));
                }
                e.push((self.ix(node(*js.last().expect("variable occurs"))), self.ix(end), Dashed));
            }
            if i + 1 < m {
                e.push((self.ix(Var(i)), self.first(i + 1, true), Dashed));
                e.push((self.ix(Var(i)), self.first(i + 1, false), Solid));
                e.push((self.ix(NegVar(i)), self.first(i + 1, true), Solid));
                e.push((self.ix(NegVar(i)), self.first(i + 1, false), Solid));
            }
            e.push((self.ix(NegVar(i)), self.ix(Chain(i)), Dashed));
            e.push((self.ix(Chain(i)), self.first(i, false), Dashed));
        }
        for j in 0..n.saturating_sub(1) {
            e.push((self.ix(Clause(j)), self.ix(Clause(j + 1)), Dashed));
        }
        e.push((self.ix(E1), self.ix(Clause(0)), Dashed));
        e.push((self.ix(Clause(n - 1)), self.ix(E2), Dashed));
        e.push((self.ix(E2), self.first(0, true), Dashed));
        e.push((self.ix(Var(m - 1)), self.ix(E1), Dashed));
        e.push((self.ix(E2), self.first(0, false), Solid));
        e.push((self.ix(NegVar(m - 1)), self.ix(E1), Solid));
        e.sort();
        e
    }

    fn g2(&self) -> EdgeSet {
        use EdgeKind::*;
        use MemberAgent::*;
        let (m, n) = (self.cnf.num_vars(), self.cnf.clauses().len());
        let mut e = Vec::new();
        for (i, js) in self.occ.iter().enumerate() {
            for &j in js {
                for a in [True(i, j), False(i, j)] {
                    e.push((self.ix(a), self.ix(a), Dashed));
                }
            }
            for a in [Var(i), NegVar(i)] {
                e.push((self.ix(a), self.ix(a), Dashed));
            }
        }
        // c_n -> c_{n-1} -> ... -> c_1 -> d_1 -> ... -> d_m -> c_n
        let mut ring: Vec<usize> = (0..n).rev().map(|j| self.ix(Clause(j))).collect();
        ring.extend((0..m).map(|i| self.ix(Chain(i))));
        for k in 0..ring.len() {
            e.push((ring[k], ring[(k + 1) % ring.len()], Dashed));
        }
        for (j, clause) in self.cnf.clauses().iter().enumerate() {
            for lit in clause {
                let a = self.ix(if lit.positive { True(lit.var, j) } else { False(lit.var, j) });
                let c = self.ix(Clause(j));
                e.push((c, a, Solid));
                e.push((a, c, Solid));
            }
        }
        e.push((self.ix(E1), self.ix(E1), Dashed));
        e.push((self.ix(E2), self.ix(E2), Dashed));
        e.sort();
        e.dedup();
        e
    }
}

/// The local order of `agent` in one graph, and the item she is allocated.
fn local_order(edges: &EdgeSet, agent: usize, n: usize) -> (Vec<usize>, usize) {
    let mut solid: Vec<usize> = edges
        .iter()
        .filter(|&&(a, _, k)| a == agent && k == EdgeKind::Solid)
        .map(|&(_, b, _)| b)
        .collect();
    solid.sort_unstable();
    solid.dedup();
    let dashed: Vec<usize> = edges
        .iter()
        .filter(|&&(a, _, k)| a == agent && k == EdgeKind::Dashed)
        .map(|&(_, b, _)| b)
        .collect();
    assert_eq!(dashed.len(), 1, "agent {agent} needs exactly one allocated item");
    let allocated = dashed[0];
    let mut order = solid;
    for x in [allocated, agent].into_iter().chain(0..n) {
        if !order.contains(&x) {
            order.push(x);
        }
    }
    (order, allocated)
}

/// Builds the membership instance for `cnf`: the challenged allocation is
/// in the strict core iff `cnf` is unsatisfiable.
pub fn reduce_in_strict_core(cnf: &Cnf3) -> MembershipInstance {
    let layout = Layout::new(cnf);
    let (g1, g2) = (layout.g1(), layout.g2());
    let n = layout.agents.len();
    let market = Market::new(n, 2).expect("nonempty");
    let mut prefs = Vec::with_capacity(n);
    let mut bundles = Vec::with_capacity(n);
    for a in 0..n {
        let (o1, a1) = local_order(&g1, a, n);
        let (o2, a2) = local_order(&g2, a, n);
        prefs.push(Preference::Lex(
            LexPreference::separable(ImportanceOrder::identity(2), n, vec![o1, o2]).expect("valid orders"),
        ));
        bundles.push(Bundle::new(vec![a1, a2]));
    }
    let profile = Profile::new(&market, prefs).expect("shape matches");
    let allocation = Allocation::new(bundles);
    debug_assert!(allocation.validate(&market).is_ok());
    MembershipInstance {
        market,
        profile,
        allocation,
        agents: layout.agents,
        g1,
        g2,
    }
}

/// The blocking coalition and reallocation induced by a satisfying
/// valuation.
///
/// Type 1 runs one cycle `e1 -> c1 -> ... -> cn -> e2 -> (chain of the
/// chosen literal of x1) -> ... -> e1`; in type 2 each clause swaps with the
/// agent of its lowest-index satisfied variable and everyone else keeps her
/// own item.
pub fn valuation_to_coalition(
    cnf: &Cnf3,
    valuation: &[bool],
    instance: &MembershipInstance,
) -> Result<BlockingWitness, ReductionError> {
    use MemberAgent::*;
    if valuation.len() != cnf.num_vars() {
        return Err(ReductionError::ValuationLength {
            expected: cnf.num_vars(),
            got: valuation.len(),
        });
    }
    if !cnf.satisfies(valuation) {
        return Err(ReductionError::NotSatisfying);
    }
    let ix = |a: MemberAgent| instance.index(a);
    let (m, n) = (cnf.num_vars(), cnf.clauses().len());
    // Type-1 cycle in visiting order; each agent receives the next one's item.
    let mut ring = vec![ix(E1)];
    ring.extend((0..n).map(|j| ix(Clause(j))));
    ring.push(ix(E2));
    for (i, &v) in valuation.iter().enumerate() {
        for j in cnf.occurrences(i) {
            ring.push(ix(if v { True(i, j) } else { False(i, j) }));
        }
        ring.push(ix(if v { Var(i) } else { NegVar(i) }));
    }
    let total = instance.market.agents();
    let mut first = vec![None; total];
    let mut second = vec![None; total];
    for k in 0..ring.len() {
        first[ring[k]] = Some(ring[(k + 1) % ring.len()]);
        second[ring[k]] = Some(ring[k]);
    }
    for (j, clause) in cnf.clauses().iter().enumerate() {
        let i = (0..m)
            .find(|&i| clause.contains(&Literal { var: i, positive: valuation[i] }))
            .expect("clause is satisfied");
        let lit = ix(if valuation[i] { True(i, j) } else { False(i, j) });
        let c = ix(Clause(j));
        second[c] = Some(lit);
        second[lit] = Some(c);
    }
    let mut coalition: Vec<usize> = ring.clone();
    coalition.sort_unstable();
    let reallocation: Vec<Bundle> = coalition
        .iter()
        .map(|&a| Bundle::new(vec![first[a].expect("in ring"), second[a].expect("in ring")]))
        .collect();
    let alloc = &instance.allocation;
    let strict_agent = coalition
        .iter()
        .zip(&reallocation)
        .find(|(&a, b)| instance.profile.get(a).prefers(b, alloc.bundle(a)))
        .map(|(&a, _)| a)
        .expect("a clause agent improves");
    Ok(BlockingWitness {
        coalition,
        reallocation,
        strict_agent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::weakly_blocks;
    use EdgeKind::*;
    use MemberAgent::*;

    fn two_clause() -> Cnf3 {
        Cnf3::from_signed(3, &[[1, 2, 3], [-1, -2, -3]]).unwrap()
    }

    fn named(inst: &MembershipInstance, edges: &EdgeSet) -> Vec<(String, String, EdgeKind)> {
        let l = inst.labels();
        let mut v: Vec<_> = edges.iter().map(|&(a, b, k)| (l[a].clone(), l[b].clone(), k)).collect();
        v.sort();
        v
    }

    fn expect(list: &[(&str, &str, EdgeKind)]) -> Vec<(String, String, EdgeKind)> {
        let mut v: Vec<_> = list.iter().map(|&(a, b, k)| (a.to_string(), b.to_string(), k)).collect();
        v.sort();
        v
    }

    #[test]
    fn agent_count_and_order() {
        let inst = reduce_in_strict_core(&two_clause());
        // 2 clauses, 3 variables x 2 clauses x 2 signs, 6 literal agents, 3 chain agents, e1, e2.
        assert_eq!(inst.market.agents(), 2 + 12 + 6 + 3 + 2);
        assert_eq!(&inst.labels()[..4], ["c1", "c2", "1_1^1", "0_1^1"]);
        assert_eq!(inst.labels().last().unwrap(), "e2");
    }

    #[test]
    fn type_one_graph() {
        let inst = reduce_in_strict_core(&two_clause());
        let want = expect(&[
            ("1_1^1", "1_1^2", Dashed),
            ("1_1^2", "x1", Dashed),
            ("0_1^1", "0_1^2", Dashed),
            ("0_1^2", "~x1", Dashed),
            ("1_2^1", "1_2^2", Dashed),
            ("1_2^2", "x2", Dashed),
            ("0_2^1", "0_2^2", Dashed),
            ("0_2^2", "~x2", Dashed),
            ("1_3^1", "1_3^2", Dashed),
            ("1_3^2", "x3", Dashed),
            ("0_3^1", "0_3^2", Dashed),
            ("0_3^2", "~x3", Dashed),
            ("x1", "1_2^1", Dashed),
            ("x1", "0_2^1", Solid),
            ("~x1", "1_2^1", Solid),
            ("~x1", "0_2^1", Solid),
            ("x2", "1_3^1", Dashed),
            ("x2", "0_3^1", Solid),
            ("~x2", "1_3^1", Solid),
            ("~x2", "0_3^1", Solid),
            ("~x1", "d1", Dashed),
            ("~x2", "d2", Dashed),
            ("~x3", "d3", Dashed),
            ("d1", "0_1^1", Dashed),
            ("d2", "0_2^1", Dashed),
            ("d3", "0_3^1", Dashed),
            ("c1", "c2", Dashed),
            ("e1", "c1", Dashed),
            ("c2", "e2", Dashed),
            ("e2", "1_1^1", Dashed),
            ("x3", "e1", Dashed),
            ("e2", "0_1^1", Solid),
            ("~x3", "e1", Solid),
        ]);
        assert_eq!(named(&inst, &inst.g1), want);
    }

    #[test]
    fn type_two_graph() {
        let inst = reduce_in_strict_core(&two_clause());
        let mut list: Vec<(String, String, EdgeKind)> = Vec::new();
        for s in ["1_1^1", "1_1^2", "0_1^1", "0_1^2", "1_2^1", "1_2^2", "0_2^1", "0_2^2", "1_3^1", "1_3^2", "0_3^1", "0_3^2", "x1", "~x1", "x2", "~x2", "x3", "~x3", "e1", "e2"] {
            list.push((s.into(), s.into(), Dashed));
        }
        for (a, b) in [("c2", "c1"), ("c1", "d1"), ("d1", "d2"), ("d2", "d3"), ("d3", "c2")] {
            list.push((a.into(), b.into(), Dashed));
        }
        for (c, l) in [("c1", "1_1^1"), ("c1", "1_2^1"), ("c1", "1_3^1"), ("c2", "0_1^2"), ("c2", "0_2^2"), ("c2", "0_3^2")] {
            list.push((c.into(), l.into(), Solid));
            list.push((l.into(), c.into(), Solid));
        }
        list.sort();
        assert_eq!(named(&inst, &inst.g2), list);
    }

    #[test]
    fn preferences_are_separable_with_type_one_first() {
        let inst = reduce_in_strict_core(&two_clause());
        for p in inst.profile.prefs() {
            let lex = p.as_lex().unwrap();
            assert!(lex.cpnet().is_separable());
            assert!(lex.cpnet().is_o_legal(&ImportanceOrder::identity(2)));
            assert_eq!(lex.importance().types(), &[0, 1]);
        }
    }

    #[test]
    fn local_order_follows_edge_classes() {
        let inst = reduce_in_strict_core(&two_clause());
        let e2 = inst.index(E2);
        let lex = inst.profile.get(e2).as_lex().unwrap();
        let row = lex.cpnet().order(0, 0);
        assert_eq!(row[0], inst.index(False(0, 0)));
        assert_eq!(row[1], inst.index(True(0, 0)));
        assert_eq!(row[2], e2);
    }

    #[test]
    fn satisfying_valuation_gives_the_expected_coalition() {
        let cnf = two_clause();
        let inst = reduce_in_strict_core(&cnf);
        let w = valuation_to_coalition(&cnf, &[true, true, false], &inst).unwrap();
        let mut got: Vec<String> = w.coalition.iter().map(|&a| inst.agents[a].label()).collect();
        got.sort();
        let mut want: Vec<String> = ["1_1^1", "1_1^2", "x1", "1_2^1", "1_2^2", "x2", "0_3^1", "0_3^2", "~x3", "e1", "c1", "c2", "e2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        want.sort();
        assert_eq!(got, want);
        assert!(weakly_blocks(&inst.market, &inst.profile, &inst.allocation, &w.coalition, &w.reallocation).unwrap());
        for c in [Clause(0), Clause(1)] {
            let a = inst.index(c);
            assert!(inst.profile.get(a).prefers(w.bundle_of(a).unwrap(), inst.allocation.bundle(a)));
        }
    }

    #[test]
    fn non_satisfying_valuation_rejected() {
        let cnf = two_clause();
        let inst = reduce_in_strict_core(&cnf);
        assert!(matches!(
            valuation_to_coalition(&cnf, &[true, true, true], &inst),
            Err(ReductionError::NotSatisfying)
        ));
        assert!(matches!(
            valuation_to_coalition(&cnf, &[true], &inst),
            Err(ReductionError::ValuationLength { .. })
        ));
    }

    #[test]
    fn single_clause_witnesses_verify() {
        for signs in [[1, 2, 3], [-1, 2, -3], [-1, -2, -3], [1, 1, 2]] {
            let m = signs.iter().map(|l: &i64| l.unsigned_abs()).max().unwrap() as usize;
            let cnf = Cnf3::from_signed(m, &[signs]).unwrap();
            let inst = reduce_in_strict_core(&cnf);
            for v in cnf.satisfying_valuations() {
                let w = valuation_to_coalition(&cnf, &v, &inst).unwrap();
                assert!(w.verify(&inst.market, &inst.profile, &inst.allocation), "{signs:?} {v:?}");
            }
        }
    }
}
