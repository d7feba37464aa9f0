//! Value iteration on the minimax Bellman operator, used as an independent
//! check of the retrograde solver.
//!
//! `V(s) = 1` at capture states and `V(s) = gamma * max_a min_b V(step(s, a, b))`
//! elsewhere, iterated synchronously from `V = 0`. The implementation shares
//! nothing with the solver beyond the move and capture rules.

use crate::error::{Error, Result};
use crate::game::{GlobalState, PegSpec};

/// Largest state space the oracle accepts by default.
pub const VI_STATE_CAP: u128 = 2_000_000;

#[derive(Debug, Clone)]
pub struct ViResult {
    pub values: Vec<f64>,
    /// Sup-norm change of the last sweep.
    pub residual: f64,
    pub sweeps: usize,
}

impl ViResult {
    pub fn value(&self, spec: &PegSpec, s: &GlobalState) -> f64 {
        self.values[spec.state_space().index(s)]
    }
}

pub fn value_iteration_oracle(spec: &PegSpec, tol: f64) -> Result<ViResult> {
    value_iteration_oracle_capped(spec, tol, VI_STATE_CAP)
}

pub fn value_iteration_oracle_capped(spec: &PegSpec, tol: f64, cap: u128) -> Result<ViResult> {
    if spec.has_exits() {
        return Err(Error::UnsupportedMode("the value-iteration oracle handles no-exit games only".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let space = spec.state_space();
    let total = space.size().unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::Capacity { states: total, cap });
    }
    let total = total as usize;
    let n = spec.node_count();
    let gamma = spec.discount();

    let states: Vec<GlobalState> = (0..total).map(|i| space.unindex(i)).collect();
    let capture: Vec<bool> = states.iter().map(|s| spec.is_capture(s)).collect();
    // All joint pursuer moves per pursuer configuration, as configuration ids.
    let configs = space.pursuer_configs();
    let successors: Vec<Vec<usize>> = (0..configs)
        .map(|cfg| {
            let mut out = Vec::new();
            let here = &states[cfg * n].pursuers;
            joint_configs(spec, here, 0, 0, &mut out);
            out
        })
        .collect();

    let mut v: Vec<f64> = capture.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
    let mut next = v.clone();
    let max_sweeps = ((tol.ln() / gamma.ln()).ceil() as usize).saturating_add(total + 10);
    let mut sweeps = 0;
    loop {
        let mut residual = 0.0f64;
        for idx in 0..total {
            if capture[idx] {
                continue;
            }
            let cfg = idx / n;
            let e = idx % n;
            let mut best = f64::NEG_INFINITY;
            for &np in &successors[cfg] {
                let worst = spec.moves(e).iter().map(|&ne| v[np * n + ne]).fold(f64::INFINITY, f64::min);
                best = best.max(worst);
            }
            let updated = gamma * best;
            residual = residual.max((updated - v[idx]).abs());
            next[idx] = updated;
        }
        std::mem::swap(&mut v, &mut next);
        sweeps += 1;
        if residual < tol {
            return Ok(ViResult { values: v, residual, sweeps });
        }
        if sweeps >= max_sweeps {
            return Err(Error::Validation(format!("value iteration stalled at residual {residual:e}")));
        }
    }
}

fn joint_configs(spec: &PegSpec, pursuers: &[usize], i: usize, acc: usize, out: &mut Vec<usize>) {
    if i == pursuers.len() {
        out.push(acc);
        return;
    }
    for &q in spec.moves(pursuers[i]) {
        joint_configs(spec, pursuers, i + 1, acc * spec.node_count() + q, out);
    }
}
