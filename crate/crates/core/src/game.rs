//! Game definition: rules, joint states, the simultaneous-move transition and
//! the two termination tests (capture and escape).

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Agent, Error, Result};
use crate::graph::{compute_apsp, ApspTable, Graph};

pub const DEFAULT_DISCOUNT: f64 = 0.99;
pub const DEFAULT_HORIZON_NO_EXIT: usize = 128;
pub const DEFAULT_HORIZON_MULTI_EXIT: usize = 10;

/// Which termination wins when a post-move state both captures the evader
/// and puts it on an exit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Priority {
    #[default]
    Pursuer,
    Evader,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Capture,
    Escape,
}

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Capture,
    Escape,
    Timeout,
}

impl From<Terminal> for Outcome {
    fn from(t: Terminal) -> Self {
        match t {
            Terminal::Capture => Outcome::Capture,
            Terminal::Escape => Outcome::Escape,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Capture => "capture",
            Outcome::Escape => "escape",
            Outcome::Timeout => "timeout",
        })
    }
}

/// Pursuer positions plus evader position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GlobalState {
    pub pursuers: Vec<usize>,
    pub evader: usize,
}

impl GlobalState {
    pub fn new(pursuers: Vec<usize>, evader: usize) -> Self {
        GlobalState { pursuers, evader }
    }
}

/// Mixed-radix encoding of `V^m x V`: base `n`, first pursuer most
/// significant, evader least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateSpace {
    n: usize,
    m: usize,
}

impl StateSpace {
    pub fn new(n: usize, m: usize) -> Self {
        StateSpace { n, m }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn pursuer_count(&self) -> usize {
        self.m
    }

    /// `n^(m+1)`, or `None` if it overflows `u128`.
    pub fn size(&self) -> Option<u128> {
        (self.n as u128).checked_pow(self.m as u32 + 1)
    }

    /// Number of joint pursuer configurations, `n^m`.
    pub fn pursuer_configs(&self) -> usize {
        self.n.pow(self.m as u32)
    }

    #[inline]
    pub fn pursuer_index(&self, pursuers: &[usize]) -> usize {
        pursuers.iter().fold(0, |acc, &p| acc * self.n + p)
    }

    #[inline]
    pub fn index(&self, s: &GlobalState) -> usize {
        self.pursuer_index(&s.pursuers) * self.n + s.evader
    }

    /// Writes the pursuer digits of configuration `config` into `out`.
    #[inline]
    pub fn decode_pursuers(&self, mut config: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = config % self.n;
            config /= self.n;
        }
    }

    pub fn unindex(&self, idx: usize) -> GlobalState {
        let mut pursuers = vec![0; self.m];
        self.decode_pursuers(idx / self.n, &mut pursuers);
        GlobalState { pursuers, evader: idx % self.n }
    }
}

/// A fully validated game definition.
#[derive(Debug, Clone)]
pub struct PegSpec {
    graph: Arc<Graph>,
    apsp: Arc<ApspTable>,
    closed: Arc<Vec<Vec<usize>>>,
    pursuers: usize,
    capture_radius: u32,
    capture_threshold: usize,
    exits: Vec<usize>,
    exit_mask: Vec<bool>,
    horizon: usize,
    discount: f64,
    priority: Priority,
    fingerprint: u64,
}

/// Builder for [`PegSpec`]. Unset fields take mode-dependent defaults: with
/// no exits, radius 1 and threshold `ceil(m/2)` and horizon 128; with exits,
/// radius 0, threshold 1 and horizon 10. The discount defaults to 0.99.
#[derive(Debug, Clone)]
pub struct PegSpecBuilder {
    graph: Arc<Graph>,
    apsp: Option<Arc<ApspTable>>,
    pursuers: usize,
    capture_radius: Option<u32>,
    capture_threshold: Option<usize>,
    exits: Vec<usize>,
    horizon: Option<usize>,
    discount: f64,
    priority: Priority,
}

impl PegSpecBuilder {
    pub fn apsp(mut self, apsp: Arc<ApspTable>) -> Self {
        self.apsp = Some(apsp);
        self
    }
    pub fn capture_radius(mut self, r: u32) -> Self {
        self.capture_radius = Some(r);
        self
    }
    pub fn capture_threshold(mut self, k: usize) -> Self {
        self.capture_threshold = Some(k);
        self
    }
    pub fn exits(mut self, exits: Vec<usize>) -> Self {
        self.exits = exits;
        self
    }
    pub fn horizon(mut self, t: usize) -> Self {
        self.horizon = Some(t);
        self
    }
    pub fn discount(mut self, gamma: f64) -> Self {
        self.discount = gamma;
        self
    }
    pub fn priority(mut self, p: Priority) -> Self {
        self.priority = p;
        self
    }

    pub fn build(self) -> Result<PegSpec> {
        let n = self.graph.node_count();
        let m = self.pursuers;
        if m == 0 {
            return Err(Error::Argument("at least one pursuer is required".into()));
        }
        if !self.graph.is_connected() {
            return Err(Error::Argument("game graph must be connected".into()));
        }
        let mut exits = self.exits;
        exits.sort_unstable();
        exits.dedup();
        if let Some(&x) = exits.iter().find(|&&x| x >= n) {
            return Err(Error::Argument(format!("exit {x} is not a node id (n = {n})")));
        }
        let multi_exit = !exits.is_empty();
        let capture_radius = self.capture_radius.unwrap_or(if multi_exit { 0 } else { 1 });
        let capture_threshold = self.capture_threshold.unwrap_or(if multi_exit { 1 } else { m.div_ceil(2) });
        if capture_threshold == 0 || capture_threshold > m {
            return Err(Error::Argument(format!("capture threshold must lie in 1..={m}, got {capture_threshold}")));
        }
        let horizon =
            self.horizon.unwrap_or(if multi_exit { DEFAULT_HORIZON_MULTI_EXIT } else { DEFAULT_HORIZON_NO_EXIT });
        if horizon == 0 {
            return Err(Error::Argument("horizon must be positive".into()));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::Argument(format!("discount must lie in (0, 1), got {}", self.discount)));
        }
        let apsp = match self.apsp {
            Some(a) if a.node_count() == n => a,
            Some(_) => return Err(Error::Argument("APSP table does not match the graph".into())),
            None => Arc::new(compute_apsp(&self.graph)),
        };
        let closed = (0..n).map(|v| closed_neighborhood(&self.graph, v)).collect();
        let mut exit_mask = vec![false; n];
        for &x in &exits {
            exit_mask[x] = true;
        }
        let mut spec = PegSpec {
            graph: self.graph,
            apsp,
            closed: Arc::new(closed),
            pursuers: m,
            capture_radius,
            capture_threshold,
            exits,
            exit_mask,
            horizon,
            discount: self.discount,
            priority: self.priority,
            fingerprint: 0,
        };
        spec.fingerprint = spec.compute_fingerprint();
        Ok(spec)
    }
}

impl PegSpec {
    pub fn builder(graph: impl Into<Arc<Graph>>, pursuers: usize) -> PegSpecBuilder {
        PegSpecBuilder {
            graph: graph.into(),
            apsp: None,
            pursuers,
            capture_radius: None,
            capture_threshold: None,
            exits: Vec::new(),
            horizon: None,
            discount: DEFAULT_DISCOUNT,
            priority: Priority::default(),
        }
    }

    /// Rebuilds the spec for a different pursuer count with the given capture
    /// threshold, sharing the graph and distance table. Exits are dropped.
    pub fn sub_game(&self, pursuers: usize, capture_threshold: usize) -> Result<PegSpec> {
        PegSpec::builder(self.graph.clone(), pursuers)
            .apsp(self.apsp.clone())
            .capture_radius(self.capture_radius)
            .capture_threshold(capture_threshold)
            .horizon(self.horizon)
            .discount(self.discount)
            .priority(self.priority)
            .build()
    }

    /// Same rules with a different exit set.
    pub fn with_exits(&self, exits: Vec<usize>) -> Result<PegSpec> {
        PegSpec::builder(self.graph.clone(), self.pursuers)
            .apsp(self.apsp.clone())
            .capture_radius(self.capture_radius)
            .capture_threshold(self.capture_threshold)
            .exits(exits)
            .horizon(self.horizon)
            .discount(self.discount)
            .priority(self.priority)
            .build()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    pub fn graph_arc(&self) -> Arc<Graph> {
        self.graph.clone()
    }
    pub fn apsp(&self) -> &ApspTable {
        &self.apsp
    }
    pub fn apsp_arc(&self) -> Arc<ApspTable> {
        self.apsp.clone()
    }
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
    pub fn pursuers(&self) -> usize {
        self.pursuers
    }
    pub fn capture_radius(&self) -> u32 {
        self.capture_radius
    }
    pub fn capture_threshold(&self) -> usize {
        self.capture_threshold
    }
    pub fn exits(&self) -> &[usize] {
        &self.exits
    }
    pub fn has_exits(&self) -> bool {
        !self.exits.is_empty()
    }
    pub fn horizon(&self) -> usize {
        self.horizon
    }
    pub fn discount(&self) -> f64 {
        self.discount
    }
    pub fn priority(&self) -> Priority {
        self.priority
    }
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
    pub fn state_space(&self) -> StateSpace {
        StateSpace::new(self.node_count(), self.pursuers)
    }

    /// Sorted closed neighborhood (the legal move set) of `v`.
    #[inline]
    pub fn moves(&self, v: usize) -> &[usize] {
        &self.closed[v]
    }

    /// Termination `f`.
    pub fn is_capture(&self, s: &GlobalState) -> bool {
        self.capture_count(&s.pursuers, s.evader) >= self.capture_threshold
    }

    #[inline]
    pub(crate) fn capture_count(&self, pursuers: &[usize], evader: usize) -> usize {
        let row = self.apsp.row(evader);
        pursuers.iter().filter(|&&p| row[p] <= self.capture_radius).count()
    }

    /// Termination `g`.
    #[inline]
    pub fn is_escape(&self, evader: usize) -> bool {
        self.exit_mask[evader]
    }

    /// Terminal status of a state, resolving simultaneous capture and escape
    /// by [`Priority`].
    pub fn terminal(&self, s: &GlobalState) -> Option<Terminal> {
        let capture = self.is_capture(s);
        let escape = self.is_escape(s.evader);
        match (capture, escape, self.priority) {
            (true, true, Priority::Evader) => Some(Terminal::Escape),
            (true, _, _) => Some(Terminal::Capture),
            (false, true, _) => Some(Terminal::Escape),
            (false, false, _) => None,
        }
    }

    /// Validates that `s` names real nodes and the right number of pursuers.
    pub fn check_state(&self, s: &GlobalState) -> Result<()> {
        let n = self.node_count();
        if s.pursuers.len() != self.pursuers {
            return Err(Error::Query(format!("state has {} pursuers, spec has {}", s.pursuers.len(), self.pursuers)));
        }
        if let Some(&bad) = s.pursuers.iter().chain(std::iter::once(&s.evader)).find(|&&v| v >= n) {
            return Err(Error::Query(format!("node {bad} out of range (n = {n})")));
        }
        Ok(())
    }

    /// Simultaneous move. Both sides' targets must lie in their closed
    /// neighborhoods and `s` must not already be terminal.
    pub fn step(&self, s: &GlobalState, pursuer_moves: &[usize], evader_move: usize) -> Result<GlobalState> {
        self.check_state(s)?;
        if self.terminal(s).is_some() {
            return Err(Error::Query("cannot step from a terminal state".into()));
        }
        if pursuer_moves.len() != self.pursuers {
            return Err(Error::Query(format!("expected {} pursuer moves, got {}", self.pursuers, pursuer_moves.len())));
        }
        for (i, (&from, &to)) in s.pursuers.iter().zip(pursuer_moves).enumerate() {
            if !self.is_move(from, to) {
                return Err(Error::IllegalMove { agent: Agent::Pursuer(i), from, to });
            }
        }
        if !self.is_move(s.evader, evader_move) {
            return Err(Error::IllegalMove { agent: Agent::Evader, from: s.evader, to: evader_move });
        }
        Ok(GlobalState { pursuers: pursuer_moves.to_vec(), evader: evader_move })
    }

    #[inline]
    pub fn is_move(&self, from: usize, to: usize) -> bool {
        from < self.node_count() && self.closed[from].binary_search(&to).is_ok()
    }

    /// +1 on capture, -1 on escape, 0 otherwise, evaluated on the post-move
    /// state.
    pub fn reward(&self, next: &GlobalState) -> i32 {
        match self.terminal(next) {
            Some(Terminal::Capture) => 1,
            Some(Terminal::Escape) => -1,
            None => 0,
        }
    }

    fn compute_fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update(b"pegkit-spec-v1");
        let mut put = |x: u64| h.update(x.to_le_bytes());
        put(self.node_count() as u64);
        put(self.graph.edge_count() as u64);
        for (u, v) in self.graph.edges() {
            put(u as u64);
            put(v as u64);
        }
        put(self.pursuers as u64);
        put(self.capture_radius as u64);
        put(self.capture_threshold as u64);
        put(self.exits.len() as u64);
        for &x in &self.exits {
            put(x as u64);
        }
        put(self.horizon as u64);
        put(self.discount.to_bits());
        put(self.priority as u64);
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }
}

/// Enumerates joint pursuer moves (the product of closed neighborhoods) in
/// lexicographic order, first pursuer most significant.
pub struct JointMoves<'a> {
    lists: Vec<&'a [usize]>,
    pos: Vec<usize>,
    current: Vec<usize>,
    started: bool,
}

impl<'a> JointMoves<'a> {
    pub fn new(spec: &'a PegSpec, pursuers: &[usize]) -> Self {
        let lists: Vec<&[usize]> = pursuers.iter().map(|&p| spec.moves(p)).collect();
        let current = lists.iter().map(|l| l[0]).collect();
        JointMoves { pos: vec![0; lists.len()], lists, current, started: false }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for i in (0..self.lists.len()).rev() {
            self.pos[i] += 1;
            if self.pos[i] < self.lists[i].len() {
                self.current[i] = self.lists[i][self.pos[i]];
                return Some(&self.current);
            }
            self.pos[i] = 0;
            self.current[i] = self.lists[i][0];
        }
        None
    }
}

/// `adjacency(v) ∪ {v}`, ascending.
pub fn closed_neighborhood(graph: &Graph, v: usize) -> Vec<usize> {
    let ns = graph.neighbors(v);
    let mut out = Vec::with_capacity(ns.len() + 1);
    let split = ns.partition_point(|&u| u < v);
    out.extend_from_slice(&ns[..split]);
    out.push(v);
    out.extend_from_slice(&ns[split..]);
    out
}
