//! Exact best response against a fixed deterministic stationary opponent.
//!
//! Fixing one side turns the game into a single-controller discounted
//! decision process with the same state space. Value iteration on it gives
//! the responder's optimal value: `1` at capture, `-1` at escape, and
//! `gamma` times the best successor elsewhere.

use super::{EvaderPolicy, PursuerPolicy, Side};
use crate::error::{Error, Result};
use crate::game::{GlobalState, JointMoves, PegSpec, Terminal};
use crate::vi::VI_STATE_CAP;

/// Stop once a sweep changes no value by this much.
pub const BR_TOLERANCE: f64 = 1e-10;

/// The fixed side.
pub enum Opponent<'a> {
    Pursuer(&'a mut dyn PursuerPolicy),
    Evader(&'a mut dyn EvaderPolicy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseReport {
    /// The responding side.
    pub side: Side,
    /// Discounted value at the start state, from the pursuers' point of view.
    pub value: f64,
    pub residual: f64,
    pub sweeps: usize,
    /// Whether the response beats the reference value, if one was given.
    pub improving: Option<bool>,
}

pub fn best_response_value(
    spec: &PegSpec,
    opponent: Opponent<'_>,
    s0: &GlobalState,
    reference: Option<f64>,
) -> Result<BestResponseReport> {
    spec.check_state(s0)?;
    let space = spec.state_space();
    let total = space.size().unwrap_or(u128::MAX);
    if total > VI_STATE_CAP {
        return Err(Error::Capacity { states: total, cap: VI_STATE_CAP });
    }
    let total = total as usize;
    let n = spec.node_count();
    let terminal_value = |s: &GlobalState| match spec.terminal(s) {
        Some(Terminal::Capture) => Some(1.0),
        Some(Terminal::Escape) => Some(-1.0),
        None => None,
    };

    let states: Vec<GlobalState> = (0..total).map(|i| space.unindex(i)).collect();
    let fixed: Vec<Option<f64>> = states.iter().map(terminal_value).collect();
    // The opponent's move at each non-terminal state: a pursuer configuration
    // index or an evader node.
    let mut reply = vec![0usize; total];
    let side = match opponent {
        Opponent::Pursuer(p) => {
            if !p.stationary() {
                return Err(Error::UnsupportedMode(format!("{} pursuers are not stationary", p.name())));
            }
            for (idx, s) in states.iter().enumerate() {
                if fixed[idx].is_none() {
                    let mv = p.act(spec, s, 0)?;
                    spec.step(s, &mv, s.evader)?;
                    reply[idx] = space.pursuer_index(&mv);
                }
            }
            Side::Evader
        }
        Opponent::Evader(e) => {
            if !e.stationary() {
                return Err(Error::UnsupportedMode(format!("{} evaders are not stationary", e.name())));
            }
            for (idx, s) in states.iter().enumerate() {
                if fixed[idx].is_none() {
                    let mv = e.act(spec, s, 0)?;
                    spec.step(s, &s.pursuers, mv)?;
                    reply[idx] = mv;
                }
            }
            Side::Pursuer
        }
    };
    let pursuer_moves: Vec<Vec<usize>> = if side == Side::Pursuer {
        (0..space.pursuer_configs())
            .map(|cfg| {
                let mut out = Vec::new();
                let mut joint = JointMoves::new(spec, &states[cfg * n].pursuers);
                while let Some(np) = joint.next() {
                    out.push(space.pursuer_index(np));
                }
                out
            })
            .collect()
    } else {
        Vec::new()
    };

    let gamma = spec.discount();
    let mut v: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    let mut next = v.clone();
    let max_sweeps = ((BR_TOLERANCE.ln() / gamma.ln()).ceil() as usize).saturating_add(total + 10);
    let mut sweeps = 0;
    let residual = loop {
        let mut residual = 0.0f64;
        for idx in 0..total {
            if fixed[idx].is_some() {
                continue;
            }
            let cfg = idx / n;
            let e = idx % n;
            let best = match side {
                Side::Evader => {
                    let base = reply[idx] * n;
                    spec.moves(e).iter().map(|&ne| v[base + ne]).fold(f64::INFINITY, f64::min)
                }
                Side::Pursuer => {
                    let ne = reply[idx];
                    pursuer_moves[cfg].iter().map(|&np| v[np * n + ne]).fold(f64::NEG_INFINITY, f64::max)
                }
            };
            let updated = gamma * best;
            residual = residual.max((updated - v[idx]).abs());
            next[idx] = updated;
        }
        std::mem::swap(&mut v, &mut next);
        sweeps += 1;
        if residual < BR_TOLERANCE {
            break residual;
        }
        if sweeps >= max_sweeps {
            return Err(Error::Validation(format!("best-response iteration stalled at residual {residual:e}")));
        }
    };
    let value = v[space.index(s0)];
    let improving = reference.map(|r| match side {
        Side::Pursuer => value > r + 1e-9,
        Side::Evader => value < r - 1e-9,
    });
    Ok(BestResponseReport { side, value, residual, sweeps, improving })
}
