//! Greedy and random baselines.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EpisodeInfo, EvaderPolicy, PursuerPolicy};
use crate::error::{Error, Result};
use crate::exit_heuristic::flee_move;
use crate::game::{GlobalState, PegSpec};

// Distinct salts keep the two sides' streams independent within an episode.
const PURSUER_SALT: u64 = 0x7075_7273_7565_7273;
const EVADER_SALT: u64 = 0x6576_6164_6572_0000;

fn non_terminal(spec: &PegSpec, s: &GlobalState) -> Result<()> {
    spec.check_state(s)?;
    if spec.terminal(s).is_some() {
        return Err(Error::Query("no move is defined at a terminal state".into()));
    }
    Ok(())
}

/// Each pursuer steps to its smallest-id closed neighbor nearest the evader.
pub fn sps_pursuer_action(spec: &PegSpec, s: &GlobalState) -> Result<Vec<usize>> {
    non_terminal(spec, s)?;
    let apsp = spec.apsp();
    Ok(s.pursuers
        .iter()
        .map(|&p| *spec.moves(p).iter().min_by_key(|&&u| (apsp.dist(u, s.evader), u)).expect("non-empty"))
        .collect())
}

/// The evader steps to the closed neighbor farthest from its nearest
/// pursuer, smallest id on ties.
pub fn flee_evader_action(spec: &PegSpec, s: &GlobalState) -> Result<usize> {
    non_terminal(spec, s)?;
    Ok(flee_move(spec, s))
}

/// Independent uniform closed-neighborhood moves.
pub fn random_pursuer_action<R: Rng>(spec: &PegSpec, s: &GlobalState, rng: &mut R) -> Vec<usize> {
    s.pursuers.iter().map(|&p| *spec.moves(p).choose(rng).expect("non-empty")).collect()
}

pub fn random_evader_action<R: Rng>(spec: &PegSpec, s: &GlobalState, rng: &mut R) -> usize {
    *spec.moves(s.evader).choose(rng).expect("non-empty")
}

#[derive(Debug, Clone, Copy)]
pub struct SpsPursuer;

impl PursuerPolicy for SpsPursuer {
    fn name(&self) -> String {
        "sps".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<Vec<usize>> {
        sps_pursuer_action(spec, s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FleeEvader;

impl EvaderPolicy for FleeEvader {
    fn name(&self) -> String {
        "sps".into()
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<usize> {
        flee_evader_action(spec, s)
    }
}

/// Uniform random pursuers, reseeded from the episode seed.
#[derive(Debug, Clone)]
pub struct RandomPursuer {
    rng: ChaCha8Rng,
}

impl RandomPursuer {
    pub fn new(seed: u64) -> Self {
        RandomPursuer { rng: ChaCha8Rng::seed_from_u64(seed ^ PURSUER_SALT) }
    }
}

impl PursuerPolicy for RandomPursuer {
    fn name(&self) -> String {
        "random".into()
    }
    fn stationary(&self) -> bool {
        false
    }
    fn begin_episode(&mut self, _spec: &PegSpec, info: EpisodeInfo) -> Result<()> {
        *self = RandomPursuer::new(info.seed);
        Ok(())
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<Vec<usize>> {
        Ok(random_pursuer_action(spec, s, &mut self.rng))
    }
}

/// Uniform random evader, reseeded from the episode seed.
#[derive(Debug, Clone)]
pub struct RandomEvader {
    rng: ChaCha8Rng,
}

impl RandomEvader {
    pub fn new(seed: u64) -> Self {
        RandomEvader { rng: ChaCha8Rng::seed_from_u64(seed ^ EVADER_SALT) }
    }
}

impl EvaderPolicy for RandomEvader {
    fn name(&self) -> String {
        "random".into()
    }
    fn stationary(&self) -> bool {
        false
    }
    fn begin_episode(&mut self, _spec: &PegSpec, info: EpisodeInfo) -> Result<()> {
        *self = RandomEvader::new(info.seed);
        Ok(())
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, _t: usize) -> Result<usize> {
        Ok(random_evader_action(spec, s, &mut self.rng))
    }
}
