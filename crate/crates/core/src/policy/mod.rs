//! Policy abstraction and the concrete policy kinds.
//!
//! A [`PolicyKind`] names a policy and is cheap to clone; [`Resources`] holds
//! the solved tables the table-driven kinds share. Each episode runner
//! instantiates its own policy objects, since `random` owns an RNG stream
//! and `external` owns a connection.

pub mod baseline;
pub mod best_response;
pub mod external;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dp::{dp_evader_action, dp_pursuer_action, solve_dp_with, DpTable, SolveOptions};
use crate::error::{Error, Result};
use crate::exit_heuristic::{heuristic_evader_action, heuristic_pursuer_action};
use crate::game::{GlobalState, Outcome, PegSpec};
use crate::grouping::{grouped_evader_action, grouped_pursuer_action, GroupedOracle, Grouping};

pub use baseline::{flee_evader_action, random_evader_action, random_pursuer_action, sps_pursuer_action};
pub use best_response::{best_response_value, BestResponseReport, Opponent};
pub use external::{Endpoint, ExternalConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pursuer,
    Evader,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Pursuer => "pursuer",
            Side::Evader => "evader",
        })
    }
}

/// Identifies an episode to the policies playing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeInfo {
    pub episode: u64,
    pub seed: u64,
}

pub trait PursuerPolicy: Send {
    fn name(&self) -> String;
    /// True if the policy is a fixed function of the state.
    fn stationary(&self) -> bool {
        true
    }
    fn begin_episode(&mut self, _spec: &PegSpec, _info: EpisodeInfo) -> Result<()> {
        Ok(())
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, t: usize) -> Result<Vec<usize>>;
    fn end_episode(&mut self, _outcome: Outcome, _steps: usize) -> Result<()> {
        Ok(())
    }
}

pub trait EvaderPolicy: Send {
    fn name(&self) -> String;
    fn stationary(&self) -> bool {
        true
    }
    fn begin_episode(&mut self, _spec: &PegSpec, _info: EpisodeInfo) -> Result<()> {
        Ok(())
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, t: usize) -> Result<usize>;
    fn end_episode(&mut self, _outcome: Outcome, _steps: usize) -> Result<()> {
        Ok(())
    }
}

/// Selectable policy kinds. As strings: `dp`, `grouped-dp`,
/// `exit-heuristic`, `sps`, `random`, `external:<program> [args...]` and
/// `tcp:<host:port>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyKind {
    Dp,
    GroupedDp,
    ExitHeuristic,
    /// Shortest-path chasing for pursuers; for the evader, stepping to the
    /// neighbor farthest from the nearest pursuer.
    Sps,
    Random,
    External(Endpoint),
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dp" => PolicyKind::Dp,
            "grouped-dp" => PolicyKind::GroupedDp,
            "exit-heuristic" => PolicyKind::ExitHeuristic,
            "sps" => PolicyKind::Sps,
            "random" => PolicyKind::Random,
            _ => {
                if let Some(cmd) = s.strip_prefix("external:") {
                    let argv: Vec<String> = cmd.split_whitespace().map(str::to_owned).collect();
                    if argv.is_empty() {
                        return Err(Error::Argument("external policy needs a command".into()));
                    }
                    PolicyKind::External(Endpoint::Command(argv))
                } else if let Some(addr) = s.strip_prefix("tcp:") {
                    PolicyKind::External(Endpoint::Tcp(addr.to_owned()))
                } else {
                    return Err(Error::Argument(format!("unknown policy kind {s:?}")));
                }
            }
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Dp => f.write_str("dp"),
            PolicyKind::GroupedDp => f.write_str("grouped-dp"),
            PolicyKind::ExitHeuristic => f.write_str("exit-heuristic"),
            PolicyKind::Sps => f.write_str("sps"),
            PolicyKind::Random => f.write_str("random"),
            PolicyKind::External(_) => f.write_str("external"),
        }
    }
}

impl PolicyKind {
    /// Rejects kinds that cannot play `spec`'s mode.
    pub fn check_mode(&self, spec: &PegSpec) -> Result<()> {
        match self {
            PolicyKind::Dp | PolicyKind::GroupedDp if spec.has_exits() => {
                Err(Error::UnsupportedMode(format!("{self} policies need a game without exits")))
            }
            PolicyKind::GroupedDp if spec.pursuers() < 2 => {
                Err(Error::UnsupportedMode("grouped-dp needs at least 2 pursuers".into()))
            }
            PolicyKind::ExitHeuristic if !spec.has_exits() => {
                Err(Error::UnsupportedMode("exit-heuristic policies need at least one exit".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Tables shared by the table-driven policies.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub table: Option<Arc<DpTable>>,
    pub grouped: Option<Arc<GroupedOracle>>,
    pub external: ExternalConfig,
}

impl Resources {
    /// Solves whatever `kinds` need. A preloaded table is used instead of
    /// solving when given.
    pub fn prepare(
        spec: &PegSpec,
        kinds: &[&PolicyKind],
        grouping: Option<&Grouping>,
        opts: &SolveOptions,
        preloaded: Option<DpTable>,
    ) -> Result<Resources> {
        for k in kinds {
            k.check_mode(spec)?;
        }
        let mut res = Resources::default();
        if kinds.contains(&&PolicyKind::Dp) {
            let table = match preloaded {
                Some(t) => {
                    t.check_spec(spec)?;
                    t
                }
                None => solve_dp_with(spec, opts)?.0,
            };
            res.table = Some(Arc::new(table));
        }
        if kinds.contains(&&PolicyKind::GroupedDp) {
            res.grouped = Some(Arc::new(GroupedOracle::solve(spec, grouping.map(Vec::as_slice), opts)?));
        }
        Ok(res)
    }

    fn table(&self) -> Result<Arc<DpTable>> {
        self.table.clone().ok_or_else(|| Error::Argument("dp policy requested without a solved table".into()))
    }

    fn grouped(&self) -> Result<Arc<GroupedOracle>> {
        self.grouped.clone().ok_or_else(|| Error::Argument("grouped-dp policy requested without sub-tables".into()))
    }

    pub fn pursuer(&self, kind: &PolicyKind, spec: &PegSpec) -> Result<Box<dyn PursuerPolicy>> {
        kind.check_mode(spec)?;
        Ok(match kind {
            PolicyKind::Dp => Box::new(DpPursuer { table: self.table()? }),
            PolicyKind::GroupedDp => Box::new(GroupedPursuer { oracle: self.grouped()? }),
            PolicyKind::ExitHeuristic => Box::new(ExitPursuer),
            PolicyKind::Sps => Box::new(baseline::SpsPursuer),
            PolicyKind::Random => Box::new(baseline::RandomPursuer::new(0)),
            PolicyKind::External(ep) => {
                Box::new(external::ExternalPolicy::connect(ep, &self.external, spec, Side::Pursuer)?)
            }
        })
    }

    pub fn evader(&self, kind: &PolicyKind, spec: &PegSpec) -> Result<Box<dyn EvaderPolicy>> {
        kind.check_mode(spec)?;
        Ok(match kind {
            PolicyKind::Dp => Box::new(DpEvader { table: self.table()? }),
            PolicyKind::GroupedDp => Box::new(GroupedEvader { oracle: self.grouped()? }),
            PolicyKind::ExitHeuristic => Box::new(ExitEvader),
            PolicyKind::Sps => Box::new(baseline::FleeEvader),
            PolicyKind::Random => Box::new(baseline::RandomEvader::new(0)),
            PolicyKind::External(ep) => {
                Box::new(external::ExternalPolicy::connect(ep, &self.external, spec, Side::Evader)?)
            }
        })
    }
}

/// Equilibrium pursuers from a solved table.
#[derive(Debug, Clone)]
pub struct DpPursuer {
    pub table: Arc<DpTable>,
}

impl PursuerPolicy for DpPursuer {
    fn name(&self) -> String {
        "dp".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<Vec<usize>> {
        dp_pursuer_action(&self.table, spec, s)
    }
}

/// Equilibrium evader from a solved table.
#[derive(Debug, Clone)]
pub struct DpEvader {
    pub table: Arc<DpTable>,
}

impl EvaderPolicy for DpEvader {
    fn name(&self) -> String {
        "dp".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<usize> {
        dp_evader_action(&self.table, spec, s)
    }
}

#[derive(Debug, Clone)]
pub struct GroupedPursuer {
    pub oracle: Arc<GroupedOracle>,
}

impl PursuerPolicy for GroupedPursuer {
    fn name(&self) -> String {
        "grouped-dp".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<Vec<usize>> {
        grouped_pursuer_action(&self.oracle, spec, s)
    }
}

#[derive(Debug, Clone)]
pub struct GroupedEvader {
    pub oracle: Arc<GroupedOracle>,
}

impl EvaderPolicy for GroupedEvader {
    fn name(&self) -> String {
        "grouped-dp".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<usize> {
        grouped_evader_action(&self.oracle, spec, s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExitPursuer;

impl PursuerPolicy for ExitPursuer {
    fn name(&self) -> String {
        "exit-heuristic".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<Vec<usize>> {
        heuristic_pursuer_action(spec, s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExitEvader;

impl EvaderPolicy for ExitEvader {
    fn name(&self) -> String {
        "exit-heuristic".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<usize> {
        heuristic_evader_action(spec, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_kinds() {
        for s in ["dp", "grouped-dp", "exit-heuristic", "sps", "random"] {
            assert_eq!(s.parse::<PolicyKind>().unwrap().to_string(), s);
        }
        assert_eq!(
            "external:python3 agent.py --fast".parse::<PolicyKind>().unwrap(),
            PolicyKind::External(Endpoint::Command(vec!["python3".into(), "agent.py".into(), "--fast".into()]))
        );
        assert_eq!(
            "tcp:127.0.0.1:9000".parse::<PolicyKind>().unwrap(),
            PolicyKind::External(Endpoint::Tcp("127.0.0.1:9000".into()))
        );
        assert!("external:".parse::<PolicyKind>().is_err());
        assert!("minimax".parse::<PolicyKind>().is_err());
    }
}
