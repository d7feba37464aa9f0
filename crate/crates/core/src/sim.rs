//! Seeded episodes, initial-condition samplers and aggregate metrics.
//!
//! Episode `i` of a run with base seed `b` uses seed
//! `splitmix64(b ^ splitmix64(i))`, so any episode can be replayed alone and
//! results do not depend on the thread count.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GlobalState, Outcome, PegSpec};
use crate::policy::{EpisodeInfo, EvaderPolicy, PolicyKind, PursuerPolicy, Resources};

pub const DEFAULT_MIN_DISTANCE: u32 = 5;
pub const DEFAULT_MAX_ATTEMPTS: usize = 100_000;

/// One round of the SplitMix64 generator, used as a 64-bit mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn episode_seed(base_seed: u64, episode: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(episode))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    /// No-exit games: every pursuer starts strictly farther than this from
    /// the evader.
    pub min_distance: u32,
    pub max_attempts: usize,
    /// Multi-exit games: draw a fresh exit set of the spec's size each
    /// episode instead of keeping the spec's exits.
    pub resample_exits: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { min_distance: DEFAULT_MIN_DISTANCE, max_attempts: DEFAULT_MAX_ATTEMPTS, resample_exits: true }
    }
}

fn uniform_state<R: Rng>(spec: &PegSpec, rng: &mut R) -> GlobalState {
    let n = spec.node_count();
    let pursuers = (0..spec.pursuers()).map(|_| rng.random_range(0..n)).collect();
    GlobalState::new(pursuers, rng.random_range(0..n))
}

/// Uniform positions with every pursuer more than `min_distance` from the
/// evader.
pub fn sample_initial_no_exit<R: Rng>(spec: &PegSpec, rng: &mut R, cfg: &SamplerConfig) -> Result<GlobalState> {
    let apsp = spec.apsp();
    for _ in 0..cfg.max_attempts {
        let s = uniform_state(spec, rng);
        if s.pursuers.iter().all(|&p| apsp.dist(p, s.evader) > cfg.min_distance) && spec.terminal(&s).is_none() {
            return Ok(s);
        }
    }
    Err(Error::Infeasible(format!(
        "no start with all pursuers farther than {} from the evader after {} attempts",
        cfg.min_distance, cfg.max_attempts
    )))
}

/// Whether `s` is an acceptable multi-exit start for `spec`'s exits.
pub fn multi_exit_start_ok(spec: &PegSpec, s: &GlobalState) -> bool {
    let apsp = spec.apsp();
    let horizon = spec.horizon() as u32;
    if spec.terminal(s).is_some() {
        return false;
    }
    let mut any_near = false;
    for &x in spec.exits() {
        let de = apsp.dist(s.evader, x);
        if de <= horizon {
            any_near = true;
            if !s.pursuers.iter().any(|&p| apsp.dist(p, x) <= de) {
                return false;
            }
        }
    }
    any_near
}

/// Exits (fresh or the spec's) plus positions such that the evader has an
/// exit within the horizon, every such exit is blockable by some pursuer,
/// and nothing is terminal.
pub fn sample_initial_multi_exit<R: Rng>(
    spec: &PegSpec,
    rng: &mut R,
    cfg: &SamplerConfig,
) -> Result<(GlobalState, PegSpec)> {
    if !spec.has_exits() {
        return Err(Error::UnsupportedMode("multi-exit sampling needs exits".into()));
    }
    let n = spec.node_count();
    let count = spec.exits().len();
    for _ in 0..cfg.max_attempts {
        let episode_spec = if cfg.resample_exits {
            let exits = sample(rng, n, count).into_vec();
            spec.with_exits(exits)?
        } else {
            spec.clone()
        };
        let s = uniform_state(spec, rng);
        if multi_exit_start_ok(&episode_spec, &s) {
            return Ok((s, episode_spec));
        }
    }
    Err(Error::Infeasible(format!("no acceptable multi-exit start after {} attempts", cfg.max_attempts)))
}

/// One move of an episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub state: GlobalState,
    pub pursuer_move: Vec<usize>,
    pub evader_move: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub episode: u64,
    pub seed: u64,
    pub outcome: Outcome,
    pub steps: usize,
    pub initial: GlobalState,
    pub exits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Step>>,
}

/// Plays from `initial` until a terminal state or the horizon. Both
/// policies see the same pre-move state.
pub fn play(
    spec: &PegSpec,
    pursuer: &mut dyn PursuerPolicy,
    evader: &mut dyn EvaderPolicy,
    initial: &GlobalState,
    info: EpisodeInfo,
    record: bool,
) -> Result<EpisodeResult> {
    let mut run = || -> Result<EpisodeResult> {
        spec.check_state(initial)?;
        if spec.terminal(initial).is_some() {
            return Err(Error::Query("episode cannot start in a terminal state".into()));
        }
        pursuer.begin_episode(spec, info)?;
        evader.begin_episode(spec, info)?;
        let mut trajectory = record.then(Vec::new);
        let mut s = initial.clone();
        let mut t = 0;
        let outcome = loop {
            if t == spec.horizon() {
                break Outcome::Timeout;
            }
            let a = pursuer.act(spec, &s, t)?;
            let b = evader.act(spec, &s, t)?;
            let next = spec.step(&s, &a, b)?;
            if let Some(tr) = trajectory.as_mut() {
                tr.push(Step { state: s, pursuer_move: a, evader_move: b });
            }
            s = next;
            t += 1;
            if let Some(term) = spec.terminal(&s) {
                break term.into();
            }
        };
        pursuer.end_episode(outcome, t)?;
        evader.end_episode(outcome, t)?;
        Ok(EpisodeResult {
            episode: info.episode,
            seed: info.seed,
            outcome,
            steps: t,
            initial: initial.clone(),
            exits: spec.exits().to_vec(),
            trajectory,
        })
    };
    run().map_err(|e| e.in_episode(info.episode))
}

/// Samples the start of episode `episode` and plays it.
pub fn run_episode(
    spec: &PegSpec,
    pursuer: &mut dyn PursuerPolicy,
    evader: &mut dyn EvaderPolicy,
    sampler: &SamplerConfig,
    base_seed: u64,
    episode: u64,
    record: bool,
) -> Result<EpisodeResult> {
    let seed = episode_seed(base_seed, episode);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let info = EpisodeInfo { episode, seed };
    if spec.has_exits() {
        let (s, episode_spec) =
            sample_initial_multi_exit(spec, &mut rng, sampler).map_err(|e| e.in_episode(episode))?;
        play(&episode_spec, pursuer, evader, &s, info, record)
    } else {
        let s = sample_initial_no_exit(spec, &mut rng, sampler).map_err(|e| e.in_episode(episode))?;
        play(spec, pursuer, evader, &s, info, record)
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub episodes: u64,
    pub base_seed: u64,
    pub threads: usize,
    pub sampler: SamplerConfig,
    pub record: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { episodes: 500, base_seed: 0, threads: 1, sampler: SamplerConfig::default(), record: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec_id: String,
    pub pursuer: String,
    pub evader: String,
    pub episodes: u64,
    pub captures: u64,
    pub escapes: u64,
    pub timeouts: u64,
    pub success_rate: f64,
    /// Over all episodes, timeouts counted at the horizon.
    pub mean_steps: f64,
    /// Population standard deviation.
    pub std_steps: f64,
}

pub const CSV_HEADER: &str =
    "spec_id,pursuer,evader,episodes,success_rate,mean_steps,std_steps,timeouts,captures,escapes";

impl EvalReport {
    pub fn from_results(spec: &PegSpec, pursuer: &str, evader: &str, results: &[EpisodeResult]) -> EvalReport {
        let n = results.len() as u64;
        let count = |o: Outcome| results.iter().filter(|r| r.outcome == o).count() as u64;
        let captures = count(Outcome::Capture);
        let denom = n.max(1) as f64;
        let mean = results.iter().map(|r| r.steps as f64).sum::<f64>() / denom;
        let var = results.iter().map(|r| (r.steps as f64 - mean).powi(2)).sum::<f64>() / denom;
        EvalReport {
            spec_id: format!("{:016x}", spec.fingerprint()),
            pursuer: pursuer.into(),
            evader: evader.into(),
            episodes: n,
            captures,
            escapes: count(Outcome::Escape),
            timeouts: count(Outcome::Timeout),
            success_rate: captures as f64 / denom,
            mean_steps: mean,
            std_steps: var.sqrt(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }

    pub fn to_csv_row(&self) -> String {
        let mut row = String::new();
        write!(
            row,
            "{},{},{},{},{},{},{},{},{},{}",
            self.spec_id,
            self.pursuer,
            self.evader,
            self.episodes,
            self.success_rate,
            self.mean_steps,
            self.std_steps,
            self.timeouts,
            self.captures,
            self.escapes
        )
        .expect("writing to a String");
        row
    }
}

type PursuerFactory<'a> = dyn Fn() -> Result<Box<dyn PursuerPolicy>> + Sync + 'a;
type EvaderFactory<'a> = dyn Fn() -> Result<Box<dyn EvaderPolicy>> + Sync + 'a;

/// Runs `cfg.episodes` episodes across `cfg.threads` workers, each with its
/// own policy instances, and returns results in episode order.
pub fn run_episodes(
    spec: &PegSpec,
    make_pursuer: &PursuerFactory<'_>,
    make_evader: &EvaderFactory<'_>,
    cfg: &EvalConfig,
) -> Result<Vec<EpisodeResult>> {
    if cfg.episodes == 0 {
        return Err(Error::Argument("at least one episode is required".into()));
    }
    let threads = cfg.threads.clamp(1, cfg.episodes as usize);
    let worker = |tid: usize| -> Vec<(u64, Result<EpisodeResult>)> {
        let mut out = Vec::new();
        let policies = make_pursuer().and_then(|p| Ok((p, make_evader()?)));
        let (mut p, mut e) = match policies {
            Ok(pe) => pe,
            Err(err) => {
                out.push((tid as u64, Err(err)));
                return out;
            }
        };
        let mut i = tid as u64;
        while i < cfg.episodes {
            let r = run_episode(spec, p.as_mut(), e.as_mut(), &cfg.sampler, cfg.base_seed, i, cfg.record);
            let failed = r.is_err();
            out.push((i, r));
            if failed {
                break;
            }
            i += threads as u64;
        }
        out
    };
    let mut all: Vec<(u64, Result<EpisodeResult>)> = if threads == 1 {
        worker(0)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads).map(|tid| scope.spawn(move || worker(tid))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("episode worker panicked")).collect()
        })
    };
    all.sort_by_key(|(i, _)| *i);
    all.into_iter().map(|(_, r)| r).collect()
}

/// Runs the named policies and aggregates the results.
pub fn evaluate(
    spec: &PegSpec,
    resources: &Resources,
    pursuer: &PolicyKind,
    evader: &PolicyKind,
    cfg: &EvalConfig,
) -> Result<(EvalReport, Vec<EpisodeResult>)> {
    pursuer.check_mode(spec)?;
    evader.check_mode(spec)?;
    let results = run_episodes(spec, &|| resources.pursuer(pursuer, spec), &|| resources.evader(evader, spec), cfg)?;
    let report = EvalReport::from_results(spec, &pursuer.to_string(), &evader.to_string(), &results);
    Ok((report, results))
}
