//! Online blocking heuristic for games with exits.
//!
//! A pursuer can block an exit when it is no farther from it than the
//! evader. Exits nobody can block are "removed" and become the evader's
//! targets. The remaining exits are sorted by distance to the evader, and the
//! longest prefix that can be blocked one pursuer per exit is matched.

use crate::error::{Error, Result};
use crate::game::{GlobalState, PegSpec};
use crate::matching::max_prefix_perfect_matching;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExitMatchState {
    /// Blockable exits sorted by (distance to the evader, id).
    pub exit_order: Vec<usize>,
    /// For each exit in `exit_order`, the pursuer indices that can block it.
    pub edges: Vec<Vec<usize>>,
    /// Unblockable exits sorted by (distance to the evader, id).
    pub removed_exits: Vec<usize>,
    /// Pursuers that can block no exit.
    pub idle_pursuers: Vec<usize>,
    /// Length of the blocked prefix of `exit_order`.
    pub k: usize,
    /// Pursuer assigned to each exit of the prefix.
    pub matching: Vec<usize>,
}

impl ExitMatchState {
    /// Builds the bipartite graph and the maximal blocked prefix.
    pub fn build(spec: &PegSpec, s: &GlobalState) -> Result<ExitMatchState> {
        let mut st = build_bipartite(spec, s)?;
        let (k, partners) = max_prefix_perfect_matching(&st.edges, spec.pursuers());
        st.k = k;
        st.matching = partners[..k].iter().map(|p| p.expect("prefix is saturated")).collect();
        Ok(st)
    }

    /// Exit a pursuer should head to, if any.
    pub fn target_exit(&self, pursuer: usize) -> Option<usize> {
        if let Some(i) = self.matching.iter().position(|&p| p == pursuer) {
            return Some(self.exit_order[i]);
        }
        self.edges.iter().position(|ps| ps.contains(&pursuer)).map(|i| self.exit_order[i])
    }
}

/// Edges, removed exits and idle pursuers, without the matching.
pub fn build_bipartite(spec: &PegSpec, s: &GlobalState) -> Result<ExitMatchState> {
    if !spec.has_exits() {
        return Err(Error::UnsupportedMode("the exit heuristic needs at least one exit".into()));
    }
    spec.check_state(s)?;
    if spec.terminal(s).is_some() {
        return Err(Error::Query("no move is defined at a terminal state".into()));
    }
    let apsp = spec.apsp();
    let mut exits: Vec<usize> = spec.exits().to_vec();
    exits.sort_by_key(|&x| (apsp.dist(s.evader, x), x));
    let mut exit_order = Vec::new();
    let mut edges = Vec::new();
    let mut removed_exits = Vec::new();
    let mut has_edge = vec![false; s.pursuers.len()];
    for x in exits {
        let de = apsp.dist(s.evader, x);
        let blockers: Vec<usize> = (0..s.pursuers.len()).filter(|&i| apsp.dist(s.pursuers[i], x) <= de).collect();
        if blockers.is_empty() {
            removed_exits.push(x);
        } else {
            blockers.iter().for_each(|&i| has_edge[i] = true);
            exit_order.push(x);
            edges.push(blockers);
        }
    }
    let idle_pursuers = (0..s.pursuers.len()).filter(|&i| !has_edge[i]).collect();
    Ok(ExitMatchState { exit_order, edges, removed_exits, idle_pursuers, k: 0, matching: Vec::new() })
}

/// Matched pursuers head for their exit, idle ones chase the evader, and the
/// rest head for the nearest-to-evader exit they can block.
pub fn heuristic_pursuer_action(spec: &PegSpec, s: &GlobalState) -> Result<Vec<usize>> {
    let st = ExitMatchState::build(spec, s)?;
    let apsp = spec.apsp();
    Ok((0..s.pursuers.len())
        .map(|i| {
            let target = st.target_exit(i).unwrap_or(s.evader);
            apsp.next_hop(spec.graph(), s.pursuers[i], target)
        })
        .collect())
}

/// Heads for the nearest unblockable exit, else the nearest exit without a
/// pursuer on it, else flees.
pub fn heuristic_evader_action(spec: &PegSpec, s: &GlobalState) -> Result<usize> {
    let st = build_bipartite(spec, s)?;
    let apsp = spec.apsp();
    let target = st.removed_exits.first().copied().or_else(|| {
        let mut open: Vec<usize> = spec.exits().iter().copied().filter(|x| !s.pursuers.contains(x)).collect();
        open.sort_by_key(|&x| (apsp.dist(s.evader, x), x));
        open.first().copied()
    });
    Ok(match target {
        Some(x) => apsp.next_hop(spec.graph(), s.evader, x),
        None => flee_move(spec, s),
    })
}

/// Closed neighbor maximizing the distance to the nearest pursuer; smallest
/// id on ties.
pub fn flee_move(spec: &PegSpec, s: &GlobalState) -> usize {
    let apsp = spec.apsp();
    let mut best = (s.evader, 0u32);
    for (i, &v) in spec.moves(s.evader).iter().enumerate() {
        let near = s.pursuers.iter().map(|&p| apsp.dist(p, v)).min().unwrap_or(u32::MAX);
        if i == 0 || near > best.1 {
            best = (v, near);
        }
    }
    best.0
}
