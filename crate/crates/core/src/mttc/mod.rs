//! Multi-type top trading cycles.
//!
//! Each round every agent that still lacks some type points to her favourite
//! remaining item of the next type in her importance order, conditioned on
//! what she already holds; every item points to its initial owner. All
//! cycles of the resulting functional graph are implemented, and agents stay
//! in the graph until they hold one item of every type.

mod po;
mod star;

use std::fmt;

use thiserror::Error;

pub use po::{compute_po, enumerate_extensions, CyclePartialOrder};
pub use star::{mttc_star_orders, run_mttc_star, StarRun};

use crate::market::{Allocation, Bundle, Item, Market};
use crate::preference::{LexPreference, PreferenceError, Profile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MttcError {
    #[error("agent {} has a preference that is not lexicographic", .agent + 1)]
    NotLexicographic { agent: usize },
    #[error("profile has {got} preferences for {expected} agents")]
    ProfileSize { expected: usize, got: usize },
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error("schedule entry {position} is not a cycle of the canonical run")]
    UnknownCycle { position: usize },
    #[error("schedule has {got} cycles, the canonical run implemented {expected}")]
    ScheduleLength { expected: usize, got: usize },
    #[error("schedule lists cycle C{} twice", .cycle + 1)]
    DuplicateCycle { cycle: usize },
    #[error("cycle C{} is not available at step {}", .cycle + 1, .step + 1)]
    InfeasibleSchedule { step: usize, cycle: usize },
    #[error("more than {cap} orders")]
    CapExceeded { cap: usize },
}

/// Extracts the lexicographic preferences of a profile.
pub(crate) fn lex_profile<'a>(
    market: &Market,
    profile: &'a Profile,
) -> Result<Vec<&'a LexPreference>, MttcError> {
    if profile.len() != market.agents() {
        return Err(MttcError::ProfileSize {
            expected: market.agents(),
            got: profile.len(),
        });
    }
    profile
        .prefs()
        .iter()
        .enumerate()
        .map(|(agent, p)| p.as_lex().ok_or(MttcError::NotLexicographic { agent }))
        .collect()
}

/// Mutable state of one execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MttcState {
    /// Position in the agent's importance order of the next type she needs.
    cursor: Vec<usize>,
    /// `received[j][t]` = owner of the type-`t` item agent `j` holds.
    received: Vec<Vec<Option<usize>>>,
    /// `remaining[t][o]` = the type-`t` item of `o` is unallocated.
    remaining: Vec<Vec<bool>>,
}

impl MttcState {
    pub fn new(market: &Market) -> Self {
        let (n, p) = (market.agents(), market.types());
        MttcState {
            cursor: vec![0; n],
            received: vec![vec![None; p]; n],
            remaining: vec![vec![true; n]; p],
        }
    }

    pub fn received(&self, agent: usize) -> &[Option<usize>] {
        &self.received[agent]
    }

    pub fn is_remaining(&self, item: Item) -> bool {
        self.remaining[item.ty][item.owner]
    }

    pub fn is_satisfied(&self, agent: usize) -> bool {
        self.cursor[agent] == self.remaining.len()
    }

    pub fn is_done(&self) -> bool {
        (0..self.cursor.len()).all(|j| self.is_satisfied(j))
    }

    /// Gives every agent of `cycle` the item she points to and advances
    /// her cursor.
    pub fn implement(&mut self, cycle: &Cycle) {
        for &(agent, item) in cycle.edges() {
            debug_assert!(self.remaining[item.ty][item.owner]);
            self.remaining[item.ty][item.owner] = false;
            self.received[agent][item.ty] = Some(item.owner);
            self.cursor[agent] += 1;
        }
    }

    /// The allocation once every agent is satisfied.
    pub fn allocation(&self) -> Option<Allocation> {
        self.received
            .iter()
            .map(|r| r.iter().copied().collect::<Option<Vec<usize>>>().map(Bundle::new))
            .collect::<Option<Vec<Bundle>>>()
            .map(Allocation::new)
    }
}

/// The pointer graph of one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundGraph {
    /// The item each agent points to; `None` once she is satisfied.
    pub agent_edges: Vec<Option<Item>>,
    remaining: Vec<Vec<bool>>,
}

impl RoundGraph {
    /// Builds a graph directly from agent pointers. Items point to owners.
    pub fn from_pointers(agent_edges: Vec<Option<Item>>, remaining: Vec<Vec<bool>>) -> Self {
        RoundGraph {
            agent_edges,
            remaining,
        }
    }

    /// Every unallocated item; each one points to its owner.
    pub fn item_edges(&self) -> impl Iterator<Item = (Item, usize)> + '_ {
        self.remaining.iter().enumerate().flat_map(|(ty, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &r)| r)
                .map(move |(owner, _)| (Item::new(ty, owner), owner))
        })
    }
}

pub fn build_round_graph(
    market: &Market,
    profile: &Profile,
    state: &MttcState,
) -> Result<RoundGraph, MttcError> {
    let prefs = lex_profile(market, profile)?;
    build_with(&prefs, state)
}

pub(crate) fn build_with(prefs: &[&LexPreference], state: &MttcState) -> Result<RoundGraph, MttcError> {
    let agent_edges = prefs
        .iter()
        .enumerate()
        .map(|(j, pref)| {
            if state.is_satisfied(j) {
                return Ok(None);
            }
            let ty = pref.importance().types()[state.cursor[j]];
            let owner = pref.top_remaining(ty, &state.remaining[ty], &state.received[j])?;
            Ok(Some(Item::new(ty, owner)))
        })
        .collect::<Result<Vec<_>, PreferenceError>>()?;
    Ok(RoundGraph {
        agent_edges,
        remaining: state.remaining.clone(),
    })
}

/// A trading cycle: agent `edges[k].0` receives item `edges[k].1`, which is
/// owned by the next agent in the cycle.
///
/// Stored rotated so that the smallest agent comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    edges: Vec<(usize, Item)>,
}

impl Cycle {
    /// Builds a cycle from its edges in order, rotating to canonical form.
    pub fn new(mut edges: Vec<(usize, Item)>) -> Self {
        if let Some(k) = edges
            .iter()
            .enumerate()
            .min_by_key(|(_, (a, _))| *a)
            .map(|(k, _)| k)
        {
            edges.rotate_left(k);
        }
        Cycle { edges }
    }

    pub fn edges(&self) -> &[(usize, Item)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn min_agent(&self) -> usize {
        self.edges[0].0
    }

    pub fn agents(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().map(|&(a, _)| a)
    }

    /// The item `agent` receives in this cycle.
    pub fn item_of(&self, agent: usize) -> Option<Item> {
        self.edges.iter().find(|&&(a, _)| a == agent).map(|&(_, i)| i)
    }

    /// `1 -> 2_H -> 2 -> 1_H -> 1` style rendering (one-based).
    pub fn describe(&self, market: &Market) -> String {
        let mut s = String::new();
        for &(agent, item) in &self.edges {
            s.push_str(&format!("{} -> {} -> ", agent + 1, market.item_label(item)));
        }
        s.push_str(&(self.min_agent() + 1).to_string());
        s
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(agent, item) in &self.edges {
            write!(f, "{} -> ({},{}) -> ", agent + 1, item.ty + 1, item.owner + 1)?;
        }
        write!(f, "{}", self.min_agent() + 1)
    }
}

/// Every cycle of the round graph, ordered by smallest agent.
pub fn find_cycles(graph: &RoundGraph) -> Vec<Cycle> {
    // Agent j points (through an item) to the item's owner, so the agent
    // part of the graph is functional.
    let n = graph.agent_edges.len();
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on current path, 2 done
    let mut cycles = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if state[cur] == 1 {
                let from = path.iter().position(|&(a, _)| a == cur).expect("on path");
                cycles.push(Cycle::new(path[from..].to_vec()));
                break;
            }
            if state[cur] == 2 {
                break;
            }
            let Some(item) = graph.agent_edges[cur] else {
                break;
            };
            state[cur] = 1;
            path.push((cur, item));
            cur = item.owner;
        }
        for &(a, _) in &path {
            state[a] = 2;
        }
        state[start] = 2;
    }
    cycles.sort();
    cycles
}

/// A cycle implemented by the canonical run, with the round it ran in and
/// what each of its agents held at the start of that round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracedCycle {
    pub cycle: Cycle,
    /// One-based round number.
    pub round: usize,
    /// `contexts[k]` belongs to the agent of `cycle.edges()[k]`.
    pub contexts: Vec<Vec<Option<usize>>>,
}

impl TracedCycle {
    pub fn context_of(&self, agent: usize) -> Option<&[Option<usize>]> {
        self.cycle
            .agents()
            .position(|a| a == agent)
            .map(|k| self.contexts[k].as_slice())
    }
}

/// Cycles(P): every cycle of the canonical run, labelled C1..Ck by round and
/// then by smallest agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTrace {
    pub cycles: Vec<TracedCycle>,
    pub rounds: usize,
    /// Number of agent pointers computed over the whole run.
    pub pointer_computations: usize,
}

impl CycleTrace {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Cycle indices implemented in each round.
    pub fn by_round(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for (k, c) in self.cycles.iter().enumerate() {
            match out.last_mut() {
                Some((r, ks)) if *r == c.round => ks.push(k),
                _ => out.push((c.round, vec![k])),
            }
        }
        out
    }

    pub fn index_of(&self, cycle: &Cycle) -> Option<usize> {
        self.cycles.iter().position(|c| &c.cycle == cycle)
    }

    /// The allocation obtained by implementing every cycle.
    pub fn allocation(&self, market: &Market) -> Allocation {
        let mut state = MttcState::new(market);
        for c in &self.cycles {
            state.implement(&c.cycle);
        }
        state.allocation().expect("trace covers every item")
    }
}

pub fn label(k: usize) -> String {
    format!("C{}", k + 1)
}

/// Runs MTTC, returning the allocation and the trace of implemented cycles.
pub fn run_mttc(market: &Market, profile: &Profile) -> Result<(Allocation, CycleTrace), MttcError> {
    let prefs = lex_profile(market, profile)?;
    let mut state = MttcState::new(market);
    let mut trace = CycleTrace {
        cycles: Vec::new(),
        rounds: 0,
        pointer_computations: 0,
    };
    while !state.is_done() {
        let graph = build_with(&prefs, &state)?;
        trace.rounds += 1;
        trace.pointer_computations += graph.agent_edges.iter().filter(|e| e.is_some()).count();
        let cycles = find_cycles(&graph);
        debug_assert!(!cycles.is_empty());
        let start = state.clone();
        for cycle in cycles {
            state.implement(&cycle);
            let contexts = cycle.agents().map(|a| start.received[a].clone()).collect();
            trace.cycles.push(TracedCycle {
                cycle,
                round: trace.rounds,
                contexts,
            });
        }
    }
    let alloc = state.allocation().expect("every agent is satisfied");
    Ok((alloc, trace))
}
