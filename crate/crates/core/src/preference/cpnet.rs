use super::{ImportanceOrder, PreferenceError};

/// An acyclic CP-net over the types of a market with `n` items per type.
///
/// Conditional preference tables are stored densely: type `t` has one row
/// per assignment of owners to its parents, in mixed-radix order with the
/// first listed parent most significant. Each row lists the `n` owners of
/// type-`t` items, best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CpNet {
    n: usize,
    parents: Vec<Vec<usize>>,
    rows: Vec<Vec<Vec<usize>>>,
    // ranks[t][row][owner] = position of owner in rows[t][row]
    ranks: Vec<Vec<Vec<usize>>>,
}

fn is_permutation(xs: &[usize], n: usize) -> bool {
    if xs.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in xs {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

impl CpNet {
    pub fn new(
        n: usize,
        parents: Vec<Vec<usize>>,
        rows: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, PreferenceError> {
        let p = parents.len();
        if rows.len() != p {
            return Err(PreferenceError::TableCount {
                expected: p,
                got: rows.len(),
            });
        }
        for (ty, pa) in parents.iter().enumerate() {
            for (k, &q) in pa.iter().enumerate() {
                if q >= p {
                    return Err(PreferenceError::ParentOutOfRange { ty, parent: q });
                }
                if q == ty {
                    return Err(PreferenceError::SelfParent { ty });
                }
                if pa[..k].contains(&q) {
                    return Err(PreferenceError::DuplicateParent { ty, parent: q });
                }
            }
        }
        if !Self::acyclic(&parents) {
            return Err(PreferenceError::CyclicDependency);
        }
        for (ty, table) in rows.iter().enumerate() {
            let expected = n.pow(parents[ty].len() as u32);
            if table.len() != expected {
                return Err(PreferenceError::RowCount {
                    ty,
                    expected,
                    got: table.len(),
                });
            }
            for (row, order) in table.iter().enumerate() {
                if !is_permutation(order, n) {
                    return Err(PreferenceError::RowNotPermutation { ty, row });
                }
            }
        }
        let ranks = rows
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|order| {
                        let mut rank = vec![0; n];
                        for (pos, &o) in order.iter().enumerate() {
                            rank[o] = pos;
                        }
                        rank
                    })
                    .collect()
            })
            .collect();
        Ok(CpNet {
            n,
            parents,
            rows,
            ranks,
        })
    }

    /// A CP-net with no dependencies: `orders[t]` ranks the type-`t` items.
    pub fn separable(n: usize, orders: Vec<Vec<usize>>) -> Result<Self, PreferenceError> {
        let p = orders.len();
        CpNet::new(
            n,
            vec![Vec::new(); p],
            orders.into_iter().map(|o| vec![o]).collect(),
        )
    }

    fn acyclic(parents: &[Vec<usize>]) -> bool {
        // Kahn's algorithm over parent -> child edges.
        let p = parents.len();
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..p).filter(|&t| indegree[t] == 0).collect();
        let mut done = 0;
        while let Some(q) = ready.pop() {
            done += 1;
            for (child, pa) in parents.iter().enumerate() {
                if pa.contains(&q) {
                    indegree[child] -= 1;
                    if indegree[child] == 0 {
                        ready.push(child);
                    }
                }
            }
        }
        done == p
    }

    pub fn items_per_type(&self) -> usize {
        self.n
    }

    pub fn types(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, ty: usize) -> &[usize] {
        &self.parents[ty]
    }

    /// All rows of the table for `ty`.
    pub fn table(&self, ty: usize) -> &[Vec<usize>] {
        &self.rows[ty]
    }

    /// True iff the dependency graph has no edges.
    pub fn is_separable(&self) -> bool {
        self.parents.iter().all(Vec::is_empty)
    }

    /// True iff every dependency edge runs from a more important type to a
    /// less important one under `importance`.
    pub fn is_o_legal(&self, importance: &ImportanceOrder) -> bool {
        importance.types().len() == self.types()
            && self.parents.iter().enumerate().all(|(ty, pa)| {
                pa.iter()
                    .all(|&q| importance.position(q) < importance.position(ty))
            })
    }

    /// First parent of `ty` missing from `context`, if any.
    pub fn missing_parent(&self, ty: usize, context: &[Option<usize>]) -> Option<usize> {
        self.parents[ty]
            .iter()
            .copied()
            .find(|&q| context.get(q).copied().flatten().is_none())
    }

    /// Row index for `ty` given owners of the parent items.
    pub fn row_index(&self, ty: usize, owner_of: impl Fn(usize) -> usize) -> usize {
        self.parents[ty]
            .iter()
            .fold(0, |acc, &q| acc * self.n + owner_of(q))
    }

    /// Parent assignment (parent type, owner) pairs of a row index.
    pub fn row_assignment(&self, ty: usize, mut row: usize) -> Vec<(usize, usize)> {
        let pa = &self.parents[ty];
        let mut out = vec![(0, 0); pa.len()];
        for k in (0..pa.len()).rev() {
            out[k] = (pa[k], row % self.n);
            row /= self.n;
        }
        out
    }

    pub fn order(&self, ty: usize, row: usize) -> &[usize] {
        &self.rows[ty][row]
    }

    pub fn rank(&self, ty: usize, row: usize, owner: usize) -> usize {
        self.ranks[ty][row][owner]
    }

    /// Copy of this net with `owners[t]` moved to the top of every row of
    /// type `t`; the other items keep their relative order.
    pub fn promote(&self, owners: &[usize]) -> CpNet {
        let rows = self
            .rows
            .iter()
            .zip(owners)
            .map(|(table, &top)| {
                table
                    .iter()
                    .map(|order| {
                        std::iter::once(top)
                            .chain(order.iter().copied().filter(|&o| o != top))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CpNet::new(self.n, self.parents.clone(), rows).expect("promotion preserves validity")
    }
}
