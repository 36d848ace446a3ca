use super::{lex_profile, CycleTrace, MttcError};
use crate::market::Market;
use crate::preference::Profile;

/// A strict partial order over the cycles of a trace, stored closed under
/// transitivity. Element `k` is cycle `C(k+1)` of the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePartialOrder {
    above: Vec<Vec<bool>>,
}

impl CyclePartialOrder {
    /// Transitive closure of the given pairs `(k, l)` meaning `Ck > Cl`.
    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut above = vec![vec![false; size]; size];
        for (k, l) in pairs {
            above[k][l] = true;
        }
        for m in 0..size {
            let via = above[m].clone();
            for row in above.iter_mut() {
                if row[m] {
                    for (cell, &b) in row.iter_mut().zip(&via) {
                        *cell |= b;
                    }
                }
            }
        }
        CyclePartialOrder { above }
    }

    pub fn len(&self) -> usize {
        self.above.len()
    }

    pub fn is_empty(&self) -> bool {
        self.above.is_empty()
    }

    /// True iff `Ck > Cl`.
    pub fn precedes(&self, k: usize, l: usize) -> bool {
        self.above[k][l]
    }

    /// Every related pair, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|k| (0..n).map(move |l| (k, l)))
            .filter(|&(k, l)| self.above[k][l])
            .collect()
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.len()).all(|k| !self.above[k][k])
    }

    /// True iff `order` (a permutation of the elements) respects every pair.
    pub fn is_extension(&self, order: &[usize]) -> bool {
        let n = self.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &k) in order.iter().enumerate() {
            if k >= n || pos[k] != usize::MAX {
                return false;
            }
            pos[k] = i;
        }
        order.len() == n && self.pairs().iter().all(|&(k, l)| pos[k] < pos[l])
    }
}

/// The precedence order over the cycles of the canonical run.
///
/// `Ck > Cl` when an agent in both gets a more important type in `Ck`, or
/// when an agent of `Cl` prefers some item of `Ck` of the type she points to
/// in `Cl`, given what she held at the start of `Cl`'s round.
pub fn compute_po(
    market: &Market,
    profile: &Profile,
    trace: &CycleTrace,
) -> Result<CyclePartialOrder, MttcError> {
    let prefs = lex_profile(market, profile)?;
    let cycles = &trace.cycles;
    let mut pairs = Vec::new();
    for (l, cl) in cycles.iter().enumerate() {
        for (idx, &(j, target)) in cl.cycle.edges().iter().enumerate() {
            let pref = prefs[j];
            let row = pref.cpt_lookup(target.ty, &cl.contexts[idx])?;
            let rank = |o: usize| row.iter().position(|&x| x == o).expect("row is a permutation");
            for (k, ck) in cycles.iter().enumerate() {
                if k == l {
                    continue;
                }
                if let Some(item) = ck.cycle.item_of(j) {
                    if pref.importance().precedes(item.ty, target.ty) {
                        pairs.push((k, l));
                        continue;
                    }
                }
                let better = ck
                    .cycle
                    .edges()
                    .iter()
                    .any(|&(_, it)| it.ty == target.ty && rank(it.owner) < rank(target.owner));
                if better {
                    pairs.push((k, l));
                }
            }
        }
    }
    let po = CyclePartialOrder::from_pairs(cycles.len(), pairs);
    debug_assert!(po.is_irreflexive());
    Ok(po)
}

/// Every linear extension, in lexicographic order of the element sequence.
pub fn enumerate_extensions(po: &CyclePartialOrder, cap: usize) -> Result<Vec<Vec<usize>>, MttcError> {
    fn go(
        po: &CyclePartialOrder,
        used: &mut Vec<bool>,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<(), MttcError> {
        let n = po.len();
        if prefix.len() == n {
            if out.len() == cap {
                return Err(MttcError::CapExceeded { cap });
            }
            out.push(prefix.clone());
            return Ok(());
        }
        for k in 0..n {
            if used[k] || (0..n).any(|m| !used[m] && po.precedes(m, k)) {
                continue;
            }
            used[k] = true;
            prefix.push(k);
            go(po, used, prefix, out, cap)?;
            prefix.pop();
            used[k] = false;
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(po, &mut vec![false; po.len()], &mut Vec::new(), &mut out, cap)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mttc::run_mttc;
    use crate::mttc::tests::three_agent_market;
    use itertools::Itertools;

    #[test]
    fn three_agent_po() {
        let (m, prof) = three_agent_market();
        let (_, trace) = run_mttc(&m, &prof).unwrap();
        let po = compute_po(&m, &prof, &trace).unwrap();
        assert_eq!(po.pairs(), vec![(0, 1), (0, 2), (0, 3), (2, 3)]);
    }

    #[test]
    fn three_agent_extensions_match_brute_force() {
        let (m, prof) = three_agent_market();
        let (_, trace) = run_mttc(&m, &prof).unwrap();
        let po = compute_po(&m, &prof, &trace).unwrap();
        let ext = enumerate_extensions(&po, 100).unwrap();
        assert_eq!(ext, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3], vec![0, 2, 3, 1]]);
        // Independent check: filter all 4! orders by the four relations.
        let relations = [(0, 1), (0, 2), (0, 3), (2, 3)];
        let brute: Vec<Vec<usize>> = (0..4)
            .permutations(4)
            .filter(|o| {
                relations.iter().all(|&(a, b)| {
                    o.iter().position(|&x| x == a) < o.iter().position(|&x| x == b)
                })
            })
            .collect();
        assert_eq!(ext, brute);
    }

    #[test]
    fn empty_relation_has_factorial_extensions() {
        let po = CyclePartialOrder::from_pairs(4, []);
        assert_eq!(enumerate_extensions(&po, 100).unwrap().len(), 24);
        assert_eq!(
            enumerate_extensions(&po, 10),
            Err(MttcError::CapExceeded { cap: 10 })
        );
    }

    #[test]
    fn total_order_has_one_extension() {
        let po = CyclePartialOrder::from_pairs(5, (0..4).map(|k| (k, k + 1)));
        assert_eq!(enumerate_extensions(&po, 10).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
        assert!(po.precedes(0, 4));
        assert!(po.is_irreflexive());
    }
}
