//! Backtracking search for reallocations of a coalition's endowments in
//! which every member weakly improves on a reference bundle.
//!
//! Each agent is `Out`, `Undecided` or `In`. Every node picks one decision
//! with the fewest options: either an unfilled type of an `In` agent (which
//! item does she get?) or an untaken item of an `In` agent (who gets it?).
//! Naming an owner or receiver pulls that agent `In`. A leaf is reached once
//! every `In` agent is full and every item of an `In` agent is taken.

use super::model::AgentModel;
use crate::market::{Allocation, Bundle};
use crate::preference::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Out,
    Undecided,
    In,
}

pub(crate) enum Stop {
    Budget,
    Done,
}

/// Coalition, the bundles its members receive, and one strict improver.
pub(crate) type Found = (Vec<usize>, Vec<Bundle>, usize);

pub(crate) struct Search<'a> {
    n: usize,
    p: usize,
    profile: &'a Profile,
    reference: &'a [Bundle],
    models: Vec<AgentModel>,
    status: Vec<Status>,
    slots: Vec<Vec<Option<usize>>>,
    taken: Vec<Vec<Option<usize>>>,
    pub(crate) nodes: u64,
    budget: Option<u64>,
}

enum Decision {
    Slot { agent: usize, ty: usize },
    Item { ty: usize, owner: usize },
}

impl<'a> Search<'a> {
    pub(crate) fn new(profile: &'a Profile, reference: &'a Allocation, budget: Option<u64>) -> Self {
        let n = reference.bundles().len();
        let p = reference.bundles().first().map_or(0, Bundle::len);
        let models = (0..n)
            .map(|j| AgentModel::new(profile.get(j), reference.bundle(j), n))
            .collect();
        Search {
            n,
            p,
            profile,
            reference: reference.bundles(),
            models,
            status: vec![Status::Undecided; n],
            slots: vec![vec![None; p]; n],
            taken: vec![vec![None; n]; p],
            nodes: 0,
            budget,
        }
    }

    /// Agents that can belong to some weakly improving coalition: for every
    /// type, each must sit on a cycle of the graph linking an agent to the
    /// owners of items she could accept.
    pub(crate) fn viable_agents(&self) -> Vec<bool> {
        let (n, p) = (self.n, self.p);
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for t in 0..p {
                let edges: Vec<Vec<usize>> = (0..n)
                    .map(|j| {
                        if !alive[j] {
                            return Vec::new();
                        }
                        let avail = |_: usize, o: usize| alive[o];
                        (0..n)
                            .filter(|&o| {
                                alive[o] && {
                                    let mut slots = vec![None; p];
                                    slots[t] = Some(o);
                                    self.models[j].feasible(&slots, &avail).0
                                }
                            })
                            .collect()
                    })
                    .collect();
                for (j, a) in alive.iter_mut().enumerate() {
                    if *a && !on_cycle(&edges, j) {
                        *a = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    fn avail(&self, t: usize, o: usize) -> bool {
        self.taken[t][o].is_none() && self.status[o] != Status::Out
    }

    fn feasible_with(&self, j: usize, t: usize, o: usize) -> bool {
        let mut slots = self.slots[j].clone();
        slots[t] = Some(o);
        let avail = |ty: usize, ow: usize| self.avail(ty, ow);
        self.models[j].feasible(&slots, &avail).0
    }

    fn choose(&self) -> Option<(Decision, Vec<usize>)> {
        let mut best: Option<(Decision, Vec<usize>)> = None;
        let better = |best: &Option<(Decision, Vec<usize>)>, len: usize| best.as_ref().is_none_or(|(_, c)| len < c.len());
        for j in 0..self.n {
            if self.status[j] != Status::In {
                continue;
            }
            for t in 0..self.p {
                if self.slots[j][t].is_none() {
                    let cands: Vec<usize> = (0..self.n)
                        .filter(|&o| self.avail(t, o) && self.feasible_with(j, t, o))
                        .collect();
                    if better(&best, cands.len()) {
                        let done = cands.is_empty();
                        best = Some((Decision::Slot { agent: j, ty: t }, cands));
                        if done {
                            return best;
                        }
                    }
                }
                if self.taken[t][j].is_none() {
                    let cands: Vec<usize> = (0..self.n)
                        .filter(|&r| {
                            self.status[r] != Status::Out
                                && self.slots[r][t].is_none()
                                && self.feasible_with(r, t, j)
                        })
                        .collect();
                    if better(&best, cands.len()) {
                        let done = cands.is_empty();
                        best = Some((Decision::Item { ty: t, owner: j }, cands));
                        if done {
                            return best;
                        }
                    }
                }
            }
        }
        best
    }

    fn assign(&mut self, agent: usize, ty: usize, owner: usize) -> Vec<usize> {
        self.slots[agent][ty] = Some(owner);
        self.taken[ty][owner] = Some(agent);
        let mut pulled = Vec::new();
        for a in [agent, owner] {
            if self.status[a] == Status::Undecided {
                self.status[a] = Status::In;
                pulled.push(a);
            }
        }
        pulled
    }

    fn unassign(&mut self, agent: usize, ty: usize, owner: usize, pulled: Vec<usize>) {
        self.slots[agent][ty] = None;
        self.taken[ty][owner] = None;
        for a in pulled {
            self.status[a] = Status::Undecided;
        }
    }

    fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.status[j] == Status::In).collect()
    }

    fn bundle_of(&self, j: usize) -> Bundle {
        Bundle::new(self.slots[j].iter().map(|o| o.expect("full")).collect())
    }

    fn dfs(&mut self, leaf: &mut dyn FnMut(&Search<'_>) -> bool) -> Result<(), Stop> {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return Err(Stop::Budget);
        }
        let Some((decision, cands)) = self.choose() else {
            return if leaf(self) { Err(Stop::Done) } else { Ok(()) };
        };
        for c in cands {
            let (agent, ty, owner) = match decision {
                Decision::Slot { agent, ty } => (agent, ty, c),
                Decision::Item { ty, owner } => (c, ty, owner),
            };
            let pulled = self.assign(agent, ty, owner);
            let r = self.dfs(leaf);
            self.unassign(agent, ty, owner, pulled);
            r?;
        }
        Ok(())
    }

    /// A blocking coalition among `viable` agents, searched with each
    /// possible smallest member in turn.
    pub(crate) fn find_coalition(&mut self, viable: &[bool]) -> Result<Option<Found>, Stop> {
        let mut found = None;
        for seed in 0..self.n {
            if !viable[seed] {
                continue;
            }
            for (j, st) in self.status.iter_mut().enumerate() {
                *st = if j < seed || !viable[j] {
                    Status::Out
                } else {
                    Status::Undecided
                };
            }
            self.status[seed] = Status::In;
            let outcome = {
                let mut leaf = |s: &Search<'_>| match s.strict_member() {
                    Some(strict) => {
                        let members = s.members();
                        let bundles = members.iter().map(|&j| s.bundle_of(j)).collect();
                        found = Some((members, bundles, strict));
                        true
                    }
                    None => false,
                };
                self.dfs(&mut leaf)
            };
            match outcome {
                Err(Stop::Done) => return Ok(found),
                Err(Stop::Budget) => return Err(Stop::Budget),
                Ok(()) => {}
            }
        }
        Ok(None)
    }

    /// Visits every allocation of all agents in which each agent weakly
    /// improves on the reference. `visit` returns true to stop.
    pub(crate) fn for_each_allocation(&mut self, visit: &mut dyn FnMut(Allocation) -> bool) -> Result<(), Stop> {
        self.status = vec![Status::In; self.n];
        let mut leaf = |s: &Search<'_>| visit(Allocation::new((0..s.n).map(|j| s.bundle_of(j)).collect()));
        match self.dfs(&mut leaf) {
            Err(Stop::Budget) => Err(Stop::Budget),
            _ => Ok(()),
        }
    }

    fn strict_member(&self) -> Option<usize> {
        self.members()
            .into_iter()
            .find(|&j| self.profile.get(j).prefers(&self.bundle_of(j), &self.reference[j]))
    }
}

fn on_cycle(edges: &[Vec<usize>], start: usize) -> bool {
    let mut seen = vec![false; edges.len()];
    let mut stack = edges[start].clone();
    while let Some(v) = stack.pop() {
        if v == start {
            return true;
        }
        if !seen[v] {
            seen[v] = true;
            stack.extend(edges[v].iter().copied());
        }
    }
    false
}
