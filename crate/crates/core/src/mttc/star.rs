use std::collections::HashSet;

use super::{build_with, find_cycles, lex_profile, run_mttc, Cycle, MttcError, MttcState};
use crate::market::{Allocation, Market};
use crate::preference::{LexPreference, Profile};

/// Runs the single-cycle variant along `schedule`, which must list every
/// cycle of the canonical run exactly once. Each scheduled cycle must be
/// present in the graph of its own round.
///
/// Returns the allocation and the realized order as trace indices.
pub fn run_mttc_star(
    market: &Market,
    profile: &Profile,
    schedule: &[Cycle],
) -> Result<(Allocation, Vec<usize>), MttcError> {
    let prefs = lex_profile(market, profile)?;
    let (_, trace) = run_mttc(market, profile)?;
    let mut order = Vec::with_capacity(schedule.len());
    let mut seen = HashSet::new();
    for (position, cycle) in schedule.iter().enumerate() {
        let k = trace
            .index_of(cycle)
            .ok_or(MttcError::UnknownCycle { position })?;
        if !seen.insert(k) {
            return Err(MttcError::DuplicateCycle { cycle: k });
        }
        order.push(k);
    }
    if order.len() != trace.len() {
        return Err(MttcError::ScheduleLength {
            expected: trace.len(),
            got: order.len(),
        });
    }
    let mut state = MttcState::new(market);
    for (step, (&k, cycle)) in order.iter().zip(schedule).enumerate() {
        let graph = build_with(&prefs, &state)?;
        if !find_cycles(&graph).contains(cycle) {
            return Err(MttcError::InfeasibleSchedule { step, cycle: k });
        }
        state.implement(cycle);
    }
    let alloc = state.allocation().expect("all cycles implemented");
    Ok((alloc, order))
}

/// One way of running the single-cycle variant to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarRun {
    pub order: Vec<Cycle>,
    pub allocation: Allocation,
}

/// Every run of the single-cycle variant, found by branching on each cycle
/// available in each round. Does not consult the canonical run.
pub fn mttc_star_orders(market: &Market, profile: &Profile, cap: usize) -> Result<Vec<StarRun>, MttcError> {
    fn go(
        prefs: &[&LexPreference],
        state: &MttcState,
        prefix: &mut Vec<Cycle>,
        out: &mut Vec<StarRun>,
        cap: usize,
    ) -> Result<(), MttcError> {
        if state.is_done() {
            if out.len() == cap {
                return Err(MttcError::CapExceeded { cap });
            }
            out.push(StarRun {
                order: prefix.clone(),
                allocation: state.allocation().expect("done"),
            });
            return Ok(());
        }
        for cycle in find_cycles(&build_with(prefs, state)?) {
            let mut next = state.clone();
            next.implement(&cycle);
            prefix.push(cycle);
            go(prefs, &next, prefix, out, cap)?;
            prefix.pop();
        }
        Ok(())
    }
    let prefs = lex_profile(market, profile)?;
    let mut out = Vec::new();
    go(&prefs, &MttcState::new(market), &mut Vec::new(), &mut out, cap)?;
    Ok(out)
}
