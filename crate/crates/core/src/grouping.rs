//! Team decomposition for games with many pursuers.
//!
//! Pursuers are split into teams of two or three. Each team plays the exact
//! policy of a small sub-game that uses the same graph and radius and a
//! capture threshold of `ceil(size / 2)`. The evader scores every grouping by
//! its most distant team and then evades the worst team of the best-scoring
//! grouping.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dp::{solve_dp_with, DpTable, SolveOptions};
use crate::error::{Error, Result};
use crate::game::{GlobalState, PegSpec};

/// Teams of zero-based pursuer indices, each sorted, ordered by first member.
pub type Grouping = Vec<Vec<usize>>;

/// Refuse to enumerate more groupings than this.
pub const MAX_GROUPINGS: u128 = 10_000;

/// Number of partitions of `m` items into parts of size 2 and 3.
pub fn grouping_count(m: usize) -> u128 {
    let mut f = vec![0u128; m.max(3) + 1];
    f[0] = 1;
    for k in 2..=m {
        let k1 = (k - 1) as u128;
        f[k] = k1 * f[k - 2];
        if k >= 3 {
            f[k] += k1 * (k1 - 1) / 2 * f[k - 3];
        }
    }
    f[m]
}

/// All partitions of `0..m` into teams of size 2 and 3.
///
/// Order: the smallest unassigned pursuer is placed first in a pair (partners
/// ascending), then in a triple (partner pairs in lexicographic order).
pub fn enumerate_groupings(m: usize) -> Result<Vec<Grouping>> {
    if m < 2 {
        return Err(Error::Argument(format!("grouping needs at least 2 pursuers, got {m}")));
    }
    let count = grouping_count(m);
    if count > MAX_GROUPINGS {
        return Err(Error::Capacity { states: count, cap: MAX_GROUPINGS });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut used = vec![false; m];
    let mut current = Vec::new();
    partitions(&mut used, &mut current, &mut out);
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn partitions(used: &mut [bool], current: &mut Grouping, out: &mut Vec<Grouping>) {
    let Some(first) = used.iter().position(|&u| !u) else {
        out.push(current.clone());
        return;
    };
    used[first] = true;
    let free: Vec<usize> = (first + 1..used.len()).filter(|&i| !used[i]).collect();
    for &j in &free {
        used[j] = true;
        current.push(vec![first, j]);
        partitions(used, current, out);
        current.pop();
        used[j] = false;
    }
    for (a, &j) in free.iter().enumerate() {
        for &k in &free[a + 1..] {
            used[j] = true;
            used[k] = true;
            current.push(vec![first, j, k]);
            partitions(used, current, out);
            current.pop();
            used[j] = false;
            used[k] = false;
        }
    }
    used[first] = false;
}

/// Checks that `grouping` partitions `0..m` into teams of size 2 and 3 and
/// returns it in canonical order.
pub fn normalize_grouping(grouping: &[Vec<usize>], m: usize) -> Result<Grouping> {
    let mut seen = vec![false; m];
    let mut teams: Grouping = Vec::with_capacity(grouping.len());
    for team in grouping {
        if !(2..=3).contains(&team.len()) {
            return Err(Error::Argument(format!("team {team:?} must have 2 or 3 members")));
        }
        for &i in team {
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Argument(format!("team {team:?} repeats or exceeds pursuer indices 0..{m}")));
            }
        }
        let mut t = team.clone();
        t.sort_unstable();
        teams.push(t);
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Argument(format!("pursuer {missing} is not assigned to a team")));
    }
    teams.sort();
    Ok(teams)
}

/// A solved sub-game for one team size.
#[derive(Debug)]
pub struct SubGame {
    pub spec: PegSpec,
    pub table: DpTable,
}

/// Sub-tables for every team size that occurs, plus the pursuers' grouping.
#[derive(Debug)]
pub struct GroupedOracle {
    fingerprint: u64,
    m: usize,
    grouping: Grouping,
    groupings: Vec<Grouping>,
    tables: BTreeMap<usize, Arc<SubGame>>,
}

impl GroupedOracle {
    /// Solves the needed sub-tables. `grouping` overrides the pursuer side's
    /// default (the first enumerated grouping).
    pub fn solve(spec: &PegSpec, grouping: Option<&[Vec<usize>]>, opts: &SolveOptions) -> Result<GroupedOracle> {
        if spec.has_exits() {
            return Err(Error::UnsupportedMode("grouped policies handle no-exit games only".into()));
        }
        let m = spec.pursuers();
        let groupings = enumerate_groupings(m)?;
        let grouping = match grouping {
            Some(g) => normalize_grouping(g, m)?,
            None => groupings[0].clone(),
        };
        // Team tables are symmetric in their members, so the canonical solve
        // gives the same table for less work.
        let opts = SolveOptions { canonical_pursuers: true, ..opts.clone() };
        let mut tables = BTreeMap::new();
        for size in [2, 3] {
            if groupings.iter().flatten().any(|t| t.len() == size) {
                let sub = spec.sub_game(size, size.div_ceil(2))?;
                let (table, _) = solve_dp_with(&sub, &opts)?;
                tables.insert(size, Arc::new(SubGame { spec: sub, table }));
            }
        }
        Ok(GroupedOracle { fingerprint: spec.fingerprint(), m, grouping, groupings, tables })
    }

    /// Builds an oracle from already-solved sub-games.
    pub fn from_parts(
        spec: &PegSpec,
        grouping: Option<&[Vec<usize>]>,
        subs: Vec<Arc<SubGame>>,
    ) -> Result<GroupedOracle> {
        let m = spec.pursuers();
        let groupings = enumerate_groupings(m)?;
        let grouping = match grouping {
            Some(g) => normalize_grouping(g, m)?,
            None => groupings[0].clone(),
        };
        let mut tables = BTreeMap::new();
        for sub in subs {
            let size = sub.spec.pursuers();
            let expected = spec.sub_game(size, size.div_ceil(2))?;
            sub.table.check_spec(&expected)?;
            tables.insert(size, sub);
        }
        for size in groupings.iter().flatten().map(Vec::len) {
            if !tables.contains_key(&size) {
                return Err(Error::Argument(format!("missing the {size}-pursuer sub-table")));
            }
        }
        Ok(GroupedOracle { fingerprint: spec.fingerprint(), m, grouping, groupings, tables })
    }

    pub fn grouping(&self) -> &Grouping {
        &self.grouping
    }

    pub fn groupings(&self) -> &[Grouping] {
        &self.groupings
    }

    pub fn sub_game(&self, size: usize) -> Option<&SubGame> {
        self.tables.get(&size).map(|s| s.as_ref())
    }

    fn check(&self, spec: &PegSpec, s: &GlobalState) -> Result<()> {
        if spec.fingerprint() != self.fingerprint {
            return Err(Error::FingerprintMismatch { expected: spec.fingerprint(), found: self.fingerprint });
        }
        spec.check_state(s)?;
        if spec.is_capture(s) {
            return Err(Error::Query("no move is defined at a capture state".into()));
        }
        Ok(())
    }

    fn team_state(s: &GlobalState, team: &[usize]) -> GlobalState {
        GlobalState::new(team.iter().map(|&i| s.pursuers[i]).collect(), s.evader)
    }

    fn sub(&self, team: &[usize]) -> &SubGame {
        &self.tables[&team.len()]
    }

    /// `D` of one team against the evader in its sub-game.
    pub fn team_steps(&self, s: &GlobalState, team: &[usize]) -> u16 {
        self.sub(team).table.get(&Self::team_state(s, team))
    }
}

/// Each team of the oracle's grouping plays its sub-game move; moves are
/// reassembled in pursuer order.
pub fn grouped_pursuer_action(oracle: &GroupedOracle, spec: &PegSpec, s: &GlobalState) -> Result<Vec<usize>> {
    oracle.check(spec, s)?;
    let mut joint = vec![0; oracle.m];
    for team in &oracle.grouping {
        let sub = oracle.sub(team);
        // A team may already satisfy its own sub-game capture rule while the
        // full game goes on; the extractor is defined there too.
        let (moves, _) = sub.table.minimax_pursuer_move(&sub.spec, &GroupedOracle::team_state(s, team));
        for (&i, mv) in team.iter().zip(moves) {
            joint[i] = mv;
        }
    }
    Ok(joint)
}

/// Picks the grouping whose worst team is closest to capture, then plays the
/// sub-game evader move against that grouping's most distant team.
pub fn grouped_evader_action(oracle: &GroupedOracle, spec: &PegSpec, s: &GlobalState) -> Result<usize> {
    oracle.check(spec, s)?;
    let (grouping, team) = evader_target(oracle, s);
    let team = &oracle.groupings[grouping][team];
    let sub = oracle.sub(team);
    Ok(sub.table.maximin_evader_move(&sub.spec, &GroupedOracle::team_state(s, team)).0)
}

/// Index of the selected grouping and of its argmax team.
pub fn evader_target(oracle: &GroupedOracle, s: &GlobalState) -> (usize, usize) {
    let mut best: Option<(usize, usize, u16)> = None;
    for (g, grouping) in oracle.groupings.iter().enumerate() {
        let mut arg = 0;
        let mut score = 0u16;
        for (i, team) in grouping.iter().enumerate() {
            let d = oracle.team_steps(s, team);
            if i == 0 || d > score {
                arg = i;
                score = d;
            }
        }
        if best.is_none_or(|b| score < b.2) {
            best = Some((g, arg, score));
        }
    }
    let (g, team, _) = best.expect("at least one grouping");
    (g, team)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{dp_evader_action, dp_pursuer_action, solve_dp};
    use crate::graph::gen_grid;

    #[test]
    fn counts() {
        let expected = [(2, 1), (3, 1), (4, 3), (5, 10), (6, 25), (7, 105), (8, 385)];
        for (m, c) in expected {
            assert_eq!(grouping_count(m), c);
            assert_eq!(enumerate_groupings(m).unwrap().len() as u128, c);
        }
        assert!(enumerate_groupings(1).is_err());
    }

    #[test]
    fn enumeration_order() {
        let g = enumerate_groupings(4).unwrap();
        assert_eq!(g[0], vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(g[1], vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(g[2], vec![vec![0, 3], vec![1, 2]]);
        let g6 = enumerate_groupings(6).unwrap();
        assert_eq!(g6[0], vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        assert_eq!(g6.iter().filter(|g| g.len() == 2).count(), 10);
    }

    #[test]
    fn normalize_rejects_bad_teams() {
        assert_eq!(normalize_grouping(&[vec![3, 2], vec![1, 0]], 4).unwrap(), vec![vec![0, 1], vec![2, 3]]);
        assert!(normalize_grouping(&[vec![0, 1, 2, 3]], 4).is_err());
        assert!(normalize_grouping(&[vec![0, 1], vec![1, 2]], 3).is_err());
        assert!(normalize_grouping(&[vec![0, 1]], 4).is_err());
    }

    #[test]
    fn two_pursuers_reduce_to_exact_policy() {
        let g = gen_grid(4, 3).unwrap();
        let spec = PegSpec::builder(g, 2).capture_radius(1).capture_threshold(1).build().unwrap();
        let table = solve_dp(&spec).unwrap();
        let oracle = GroupedOracle::solve(&spec, None, &SolveOptions::default()).unwrap();
        let space = spec.state_space();
        for idx in 0..table.len() {
            let s = space.unindex(idx);
            if spec.is_capture(&s) {
                continue;
            }
            assert_eq!(
                grouped_pursuer_action(&oracle, &spec, &s).unwrap(),
                dp_pursuer_action(&table, &spec, &s).unwrap()
            );
            assert_eq!(
                grouped_evader_action(&oracle, &spec, &s).unwrap(),
                dp_evader_action(&table, &spec, &s).unwrap()
            );
        }
    }
}
