use std::cmp::Ordering;

use super::{CpNet, ImportanceOrder, PreferenceError};
use crate::market::Bundle;

/// The lexicographic extension of an O-legal CP-net.
///
/// Two bundles are compared along the importance order; the first type on
/// which they differ decides, using the CPT row selected by the (shared)
/// items of the more important types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexPreference {
    importance: ImportanceOrder,
    cpnet: CpNet,
}

impl LexPreference {
    pub fn new(importance: ImportanceOrder, cpnet: CpNet) -> Result<Self, PreferenceError> {
        if importance.types().len() != cpnet.types() {
            return Err(PreferenceError::TypeCount {
                expected: cpnet.types(),
                got: importance.types().len(),
            });
        }
        for ty in 0..cpnet.types() {
            for &q in cpnet.parents(ty) {
                if importance.position(q) > importance.position(ty) {
                    return Err(PreferenceError::NotOLegal { ty, parent: q });
                }
            }
        }
        Ok(LexPreference { importance, cpnet })
    }

    /// Separable preference with the given per-type orders (owners, best first).
    pub fn separable(
        importance: ImportanceOrder,
        n: usize,
        orders: Vec<Vec<usize>>,
    ) -> Result<Self, PreferenceError> {
        LexPreference::new(importance, CpNet::separable(n, orders)?)
    }

    pub fn importance(&self) -> &ImportanceOrder {
        &self.importance
    }

    pub fn cpnet(&self) -> &CpNet {
        &self.cpnet
    }

    /// The CPT row for `ty` selected by `context` (owners indexed by type;
    /// only the parents of `ty` are read).
    pub fn cpt_lookup(&self, ty: usize, context: &[Option<usize>]) -> Result<&[usize], PreferenceError> {
        let row = self.row(ty, context)?;
        Ok(self.cpnet.order(ty, row))
    }

    fn row(&self, ty: usize, context: &[Option<usize>]) -> Result<usize, PreferenceError> {
        if let Some(parent) = self.cpnet.missing_parent(ty, context) {
            return Err(PreferenceError::MissingParent { ty, parent });
        }
        Ok(self
            .cpnet
            .row_index(ty, |q| context[q].expect("parent checked above")))
    }

    /// `Greater` iff `a` is preferred to `b`.
    pub fn compare(&self, a: &Bundle, b: &Bundle) -> Ordering {
        for &ty in self.importance.types() {
            let (x, y) = (a.owner(ty), b.owner(ty));
            if x != y {
                let row = self.cpnet.row_index(ty, |q| a.owner(q));
                return self
                    .cpnet
                    .rank(ty, row, y)
                    .cmp(&self.cpnet.rank(ty, row, x));
            }
        }
        Ordering::Equal
    }

    /// Best owner among `remaining` (flags indexed by owner) for type `ty`,
    /// given the items already `received`.
    pub fn top_remaining(
        &self,
        ty: usize,
        remaining: &[bool],
        received: &[Option<usize>],
    ) -> Result<usize, PreferenceError> {
        let order = self.cpt_lookup(ty, received)?;
        order
            .iter()
            .copied()
            .find(|&o| remaining.get(o).copied().unwrap_or(false))
            .ok_or(PreferenceError::EmptyChoice { ty })
    }

    /// Same importance order, with `target` promoted to the top of every
    /// CPT row, so that `target` becomes the unique best bundle.
    pub fn with_top_bundle(&self, target: &Bundle) -> LexPreference {
        LexPreference {
            importance: self.importance.clone(),
            cpnet: self.cpnet.promote(target.owners()),
        }
    }

    /// The best bundle: greedily take the top item of each type in importance order.
    pub fn top_bundle(&self) -> Bundle {
        let p = self.cpnet.types();
        let mut owners = vec![None; p];
        for &ty in self.importance.types() {
            owners[ty] = Some(self.cpt_lookup(ty, &owners).expect("O-legal")[0]);
        }
        Bundle::new(owners.into_iter().map(Option::unwrap).collect())
    }
}
