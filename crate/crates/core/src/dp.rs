//! Retrograde solver for no-exit games.
//!
//! `D(s_p, s_e)` is the number of steps within which the pursuers can force
//! capture when both sides play pure strategies, with [`INF`] where they
//! cannot. The table is filled backwards from the capture states: a FIFO
//! queue pops states in non-decreasing `D`, and popping `(s_p, s_e)` with
//! value `d` finalizes every `(n_p, n_e)` whose pursuers can step to `s_p`
//! while every evader reply from `n_e` lands on a state of value at most
//! `d`. The induced value of a state is `gamma^D`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::game::{GlobalState, JointMoves, PegSpec, StateSpace};

/// Table sentinel for "capture cannot be forced".
pub const INF: u16 = u16::MAX;

/// Default ceiling on `n^(m+1)`.
pub const DEFAULT_STATE_CAP: u128 = 1 << 31;

mod layered;

const MAGIC: &[u8; 8] = b"PEGDPTB1";

/// How the solver decides that an evader position's replies are all settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Expansion {
    /// FIFO queue; re-reads the closed neighborhood of each candidate evader
    /// position at pop time. Each `(s_p, n_e)` pair is expanded at most once.
    Rescan,
    /// FIFO queue with a per-`(s_p, n_e)` count of unpopped neighbors,
    /// expanding when it reaches zero.
    Countdown,
    /// Countdown processed one value layer at a time over an evader-major
    /// working copy, so each expansion stays inside one evader block. No
    /// queue is kept. Much faster on large tables.
    #[default]
    Layered,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub state_cap: u128,
    pub expansion: Expansion,
    /// Solve only pursuer tuples in non-decreasing order and copy the result
    /// to their permutations. Pursuers are interchangeable, so the table is
    /// unchanged.
    pub canonical_pursuers: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { state_cap: DEFAULT_STATE_CAP, expansion: Expansion::default(), canonical_pursuers: false }
    }
}

impl SolveOptions {
    /// Layered expansion over canonical pursuer tuples.
    pub fn fast() -> Self {
        SolveOptions { expansion: Expansion::Layered, canonical_pursuers: true, ..Default::default() }
    }
}

/// Counters gathered while solving.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub states: u64,
    pub pushes: u64,
    pub pops: u64,
    /// False if any pop had a smaller value than its predecessor.
    pub monotone_pops: bool,
    pub finite: u64,
    pub max_finite: u16,
}

impl SolveStats {
    pub fn finite_fraction(&self) -> f64 {
        self.finite as f64 / self.states as f64
    }
}

/// Flat `D` array over the mixed-radix state encoding of [`StateSpace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    fingerprint: u64,
    space: StateSpace,
    d: Vec<u16>,
}

/// Solves with default options.
pub fn solve_dp(spec: &PegSpec) -> Result<DpTable> {
    solve_dp_with(spec, &SolveOptions::default()).map(|(t, _)| t)
}

pub fn solve_dp_with(spec: &PegSpec, opts: &SolveOptions) -> Result<(DpTable, SolveStats)> {
    if spec.has_exits() {
        return Err(Error::UnsupportedMode("the retrograde solver handles no-exit games only".into()));
    }
    let space = spec.state_space();
    let states = space.size().unwrap_or(u128::MAX);
    let cap = opts.state_cap.min(u32::MAX as u128);
    if states > cap {
        return Err(Error::Capacity { states, cap });
    }
    let (d, mut stats) = match opts.expansion {
        Expansion::Layered => layered::solve(spec, opts.canonical_pursuers)?,
        queue => {
            let mut solver = Solver::new(spec, opts.canonical_pursuers);
            solver.seed_captures(spec);
            if queue == Expansion::Rescan {
                solver.run_rescan()?;
            } else {
                solver.run_countdown()?;
            }
            if solver.canonical {
                fill_permutations(&mut solver.d, solver.n, solver.m);
            }
            (solver.d, solver.stats)
        }
    };
    stats.states = states as u64;
    stats.finite = d.iter().filter(|&&v| v != INF).count() as u64;
    stats.max_finite = d.iter().copied().filter(|&v| v != INF).max().unwrap_or(0);
    debug_assert!(stats.pushes <= stats.states);
    Ok((DpTable { fingerprint: spec.fingerprint(), space, d }, stats))
}

struct Solver {
    n: usize,
    m: usize,
    canonical: bool,
    closed: Vec<Vec<u32>>,
    d: Vec<u16>,
    queue: Vec<u32>,
    stats: SolveStats,
    // Scratch buffers for expansion.
    digits: Vec<usize>,
    pos: Vec<usize>,
    tuple: Vec<usize>,
}

impl Solver {
    fn new(spec: &PegSpec, canonical: bool) -> Self {
        let n = spec.node_count();
        let m = spec.pursuers();
        let total = spec.state_space().size().expect("checked against cap") as usize;
        let closed = (0..n).map(|v| spec.moves(v).iter().map(|&u| u as u32).collect()).collect();
        Solver {
            n,
            m,
            canonical: canonical && m > 1,
            closed,
            d: vec![INF; total],
            queue: Vec::new(),
            stats: SolveStats { monotone_pops: true, ..Default::default() },
            digits: vec![0; m],
            pos: vec![0; m],
            tuple: vec![0; m],
        }
    }

    fn configs(&self) -> usize {
        self.n.pow(self.m as u32)
    }

    fn is_canonical(digits: &[usize]) -> bool {
        digits.windows(2).all(|w| w[0] <= w[1])
    }

    fn seed_captures(&mut self, spec: &PegSpec) {
        let n = self.n;
        let mut digits = vec![0; self.m];
        let space = spec.state_space();
        for cfg in 0..self.configs() {
            space.decode_pursuers(cfg, &mut digits);
            if self.canonical && !Self::is_canonical(&digits) {
                continue;
            }
            for e in 0..n {
                if spec.capture_count(&digits, e) >= spec.capture_threshold() {
                    let idx = cfg * n + e;
                    self.d[idx] = 0;
                    self.queue.push(idx as u32);
                }
            }
        }
        self.stats.pushes = self.queue.len() as u64;
    }

    fn decode(&mut self, cfg: usize) {
        let mut c = cfg;
        for slot in self.digits.iter_mut().rev() {
            *slot = c % self.n;
            c /= self.n;
        }
    }

    fn run_rescan(&mut self) -> Result<()> {
        let n = self.n;
        let mut fired = vec![0u64; self.d.len().div_ceil(64)];
        let mut head = 0;
        let mut last = 0u16;
        while head < self.queue.len() {
            let idx = self.queue[head] as usize;
            head += 1;
            let d = self.d[idx];
            self.note_pop(d, &mut last);
            let cfg = idx / n;
            let e = idx % n;
            let base = cfg * n;
            let mut decoded = false;
            for i in 0..self.closed[e].len() {
                let ne = self.closed[e][i] as usize;
                let key = base + ne;
                if fired[key / 64] & (1 << (key % 64)) != 0 {
                    continue;
                }
                let row = &self.d[base..base + n];
                if self.closed[ne].iter().all(|&x| row[x as usize] <= d) {
                    fired[key / 64] |= 1 << (key % 64);
                    if !decoded {
                        self.decode(cfg);
                        decoded = true;
                    }
                    self.expand(ne, d)?;
                }
            }
        }
        self.stats.pops = head as u64;
        Ok(())
    }

    fn run_countdown(&mut self) -> Result<()> {
        let n = self.n;
        let widest = self.closed.iter().map(Vec::len).max().unwrap_or(1);
        if widest > u8::MAX as usize {
            return Err(Error::Argument(format!(
                "countdown expansion supports closed neighborhoods up to 255 nodes, found {widest}"
            )));
        }
        let row_init: Vec<u8> = self.closed.iter().map(|c| c.len() as u8).collect();
        let mut counter = vec![0u8; self.d.len()];
        for row in counter.chunks_exact_mut(n) {
            row.copy_from_slice(&row_init);
        }
        let mut head = 0;
        let mut last = 0u16;
        while head < self.queue.len() {
            let idx = self.queue[head] as usize;
            head += 1;
            let d = self.d[idx];
            self.note_pop(d, &mut last);
            let cfg = idx / n;
            let e = idx % n;
            let base = cfg * n;
            let mut decoded = false;
            for i in 0..self.closed[e].len() {
                let ne = self.closed[e][i] as usize;
                let c = &mut counter[base + ne];
                *c -= 1;
                if *c == 0 {
                    if !decoded {
                        self.decode(cfg);
                        decoded = true;
                    }
                    self.expand(ne, d)?;
                }
            }
        }
        self.stats.pops = head as u64;
        Ok(())
    }

    #[inline]
    fn note_pop(&mut self, d: u16, last: &mut u16) {
        debug_assert!(d >= *last, "queue popped {d} after {last}");
        if d < *last {
            self.stats.monotone_pops = false;
        }
        *last = d;
    }

    /// Assigns `d + 1` to every unsolved `(n_p, ne)` with `n_p` a joint move
    /// from the pursuer tuple in `self.digits`.
    fn expand(&mut self, ne: usize, d: u16) -> Result<()> {
        let value = d + 1;
        if value == INF {
            return Err(Error::StepOverflow(value as u32));
        }
        let n = self.n;
        let m = self.m;
        self.pos.iter_mut().for_each(|p| *p = 0);
        loop {
            for i in 0..m {
                self.tuple[i] = self.closed[self.digits[i]][self.pos[i]] as usize;
            }
            if self.canonical {
                self.tuple.sort_unstable();
            }
            let cfg = self.tuple.iter().fold(0, |acc, &p| acc * n + p);
            let t = cfg * n + ne;
            if self.d[t] == INF {
                self.d[t] = value;
                self.queue.push(t as u32);
                self.stats.pushes += 1;
            }
            // Advance the odometer, last pursuer fastest.
            let mut i = m;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                self.pos[i] += 1;
                if self.pos[i] < self.closed[self.digits[i]].len() {
                    break;
                }
                self.pos[i] = 0;
            }
        }
    }
}

/// Copies each canonical (sorted) pursuer row onto its permutations.
fn fill_permutations(d: &mut [u16], n: usize, m: usize) {
    let mut digits = vec![0; m];
    for cfg in 0..n.pow(m as u32) {
        let mut c = cfg;
        for slot in digits.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        if Solver::is_canonical(&digits) {
            continue;
        }
        digits.sort_unstable();
        let src = digits.iter().fold(0, |acc, &p| acc * n + p);
        d.copy_within(src * n..(src + 1) * n, cfg * n);
    }
}

impl DpTable {
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn state_space(&self) -> StateSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Raw entries, [`INF`] for unreachable capture.
    pub fn raw(&self) -> &[u16] {
        &self.d
    }

    pub fn raw_mut(&mut self) -> &mut [u16] {
        &mut self.d
    }

    #[inline]
    pub fn get(&self, s: &GlobalState) -> u16 {
        self.d[self.space.index(s)]
    }

    /// `D(s)` with `None` for an unforceable capture.
    pub fn steps(&self, s: &GlobalState) -> Option<u32> {
        match self.get(s) {
            INF => None,
            v => Some(v as u32),
        }
    }

    /// True when capture can be forced from every state.
    pub fn all_finite(&self) -> bool {
        !self.d.contains(&INF)
    }

    pub fn check_spec(&self, spec: &PegSpec) -> Result<()> {
        if self.fingerprint != spec.fingerprint() {
            return Err(Error::FingerprintMismatch { expected: spec.fingerprint(), found: self.fingerprint });
        }
        Ok(())
    }

    fn check_query(&self, spec: &PegSpec, s: &GlobalState) -> Result<()> {
        self.check_spec(spec)?;
        spec.check_state(s)?;
        if spec.is_capture(s) {
            return Err(Error::Query("no move is defined at a capture state".into()));
        }
        Ok(())
    }

    /// Joint move minimizing the worst-case successor value; the first such
    /// move in lexicographic order. Defined at every state.
    pub(crate) fn minimax_pursuer_move(&self, spec: &PegSpec, s: &GlobalState) -> (Vec<usize>, u16) {
        let n = spec.node_count();
        let replies = spec.moves(s.evader);
        let mut best: Option<(Vec<usize>, u16)> = None;
        let mut joint = JointMoves::new(spec, &s.pursuers);
        while let Some(np) = joint.next() {
            let base = self.space.pursuer_index(np) * n;
            let bound = best.as_ref().map_or(u16::MAX, |b| b.1);
            let mut worst = 0u16;
            for &ne in replies {
                worst = worst.max(self.d[base + ne]);
                if best.is_some() && worst >= bound {
                    break;
                }
            }
            if best.is_none() || worst < bound {
                best = Some((np.to_vec(), worst));
            }
        }
        best.expect("closed neighborhoods are never empty")
    }

    /// Evader move maximizing the best pursuer response's value; the
    /// smallest such node id. Defined at every state.
    pub(crate) fn maximin_evader_move(&self, spec: &PegSpec, s: &GlobalState) -> (usize, u16) {
        let n = spec.node_count();
        let mut best: Option<(usize, u16)> = None;
        for &ne in spec.moves(s.evader) {
            let mut joint = JointMoves::new(spec, &s.pursuers);
            let mut least = INF;
            while let Some(np) = joint.next() {
                least = least.min(self.d[self.space.pursuer_index(np) * n + ne]);
                if best.is_some_and(|b| least <= b.1) {
                    break;
                }
            }
            if best.is_none_or(|b| least > b.1) {
                best = Some((ne, least));
            }
        }
        best.expect("closed neighborhoods are never empty")
    }

    /// Total number of `(state, reply)` evaluations the two extractors would
    /// make at `s`; exposed for the grouping cost guard.
    pub fn query_cost(spec: &PegSpec, s: &GlobalState) -> usize {
        let joint: usize = s.pursuers.iter().map(|&p| spec.moves(p).len()).product();
        joint * spec.moves(s.evader).len()
    }
}

/// Equilibrium pursuer move from the table.
pub fn dp_pursuer_action(table: &DpTable, spec: &PegSpec, s: &GlobalState) -> Result<Vec<usize>> {
    table.check_query(spec, s)?;
    Ok(table.minimax_pursuer_move(spec, s).0)
}

/// Equilibrium evader move from the table.
pub fn dp_evader_action(table: &DpTable, spec: &PegSpec, s: &GlobalState) -> Result<usize> {
    table.check_query(spec, s)?;
    Ok(table.maximin_evader_move(spec, s).0)
}

/// `gamma^D(s)`, zero where capture cannot be forced.
pub fn nash_value(table: &DpTable, spec: &PegSpec, s: &GlobalState) -> Result<f64> {
    table.check_spec(spec)?;
    spec.check_state(s)?;
    Ok(value_of(table.get(s), spec.discount()))
}

#[inline]
pub fn value_of(d: u16, discount: f64) -> f64 {
    if d == INF {
        0.0
    } else {
        discount.powi(d as i32)
    }
}

/// Counts states violating `D(s) = 0` at captures and
/// `D(s) = 1 + min_{n_p} max_{n_e} D(n_p, n_e)` elsewhere (with `INF`
/// absorbing on both sides).
pub fn bellman_residual_check(table: &DpTable, spec: &PegSpec) -> Result<usize> {
    table.check_spec(spec)?;
    let space = spec.state_space();
    let mut violations = 0;
    for idx in 0..table.len() {
        let s = space.unindex(idx);
        let d = table.d[idx];
        let ok = if spec.is_capture(&s) {
            d == 0
        } else {
            let (_, best) = table.minimax_pursuer_move(spec, &s);
            let expected = if best == INF { INF } else { best + 1 };
            d == expected
        };
        if !ok {
            violations += 1;
        }
    }
    Ok(violations)
}

impl DpTable {
    /// Writes magic, fingerprint, `n`, `m` and the little-endian entries.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.fingerprint.to_le_bytes())?;
        w.write_all(&(self.space.node_count() as u32).to_le_bytes())?;
        w.write_all(&(self.space.pursuer_count() as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(1 << 17);
        for chunk in self.d.chunks(1 << 16) {
            buf.clear();
            buf.extend(chunk.iter().flat_map(|v| v.to_le_bytes()));
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`DpTable::write_to`] without checking it
    /// against a spec.
    pub fn read_from<R: Read>(mut r: R) -> Result<DpTable> {
        let mut header = [0u8; 24];
        r.read_exact(&mut header).map_err(|_| Error::CorruptTable("truncated header".into()))?;
        if &header[..8] != MAGIC {
            return Err(Error::CorruptTable("bad magic bytes".into()));
        }
        let fingerprint = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let n = u32::from_le_bytes(header[16..20].try_into().unwrap()) as usize;
        let m = u32::from_le_bytes(header[20..24].try_into().unwrap()) as usize;
        let space = StateSpace::new(n, m);
        let len = match space.size() {
            Some(len) if n > 0 && m > 0 && len <= u32::MAX as u128 => len as usize,
            _ => return Err(Error::CorruptTable(format!("implausible dimensions n = {n}, m = {m}"))),
        };
        let mut bytes = Vec::with_capacity(len * 2);
        r.take(len as u64 * 2 + 1).read_to_end(&mut bytes)?;
        if bytes.len() != len * 2 {
            return Err(Error::CorruptTable(format!(
                "expected {} payload bytes, found {}{}",
                len * 2,
                bytes.len().min(len * 2),
                if bytes.len() > len * 2 { " plus trailing data" } else { "" }
            )));
        }
        let d = bytes.chunks_exact(2).map(|b| u16::from_le_bytes([b[0], b[1]])).collect();
        Ok(DpTable { fingerprint, space, d })
    }

    /// Reads a table and rejects it unless it was solved for `spec`.
    pub fn read_for<R: Read>(r: R, spec: &PegSpec) -> Result<DpTable> {
        let table = DpTable::read_from(r)?;
        table.check_spec(spec)?;
        if table.space != spec.state_space() {
            return Err(Error::CorruptTable("dimensions do not match the spec".into()));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn spec(g: Graph, m: usize, r: u32, k: usize) -> PegSpec {
        PegSpec::builder(g, m).capture_radius(r).capture_threshold(k).build().unwrap()
    }

    fn s(p: &[usize], e: usize) -> GlobalState {
        GlobalState::new(p.to_vec(), e)
    }

    #[test]
    fn path3_table() {
        let sp = spec(path(3), 1, 1, 1);
        let t = solve_dp(&sp).unwrap();
        for idx in 0..t.len() {
            let st = sp.state_space().unindex(idx);
            let expected = if st == s(&[0], 2) || st == s(&[2], 0) { 1 } else { 0 };
            assert_eq!(t.get(&st), expected, "{st:?}");
        }
        assert!(t.all_finite());
    }

    #[test]
    fn cycle4_table() {
        let sp = spec(cycle(4), 1, 1, 1);
        let t = solve_dp(&sp).unwrap();
        let antipodal = [s(&[0], 2), s(&[1], 3), s(&[2], 0), s(&[3], 1)];
        for idx in 0..t.len() {
            let st = sp.state_space().unindex(idx);
            let expected = if antipodal.contains(&st) { INF } else { 0 };
            assert_eq!(t.get(&st), expected, "{st:?}");
        }
    }

    #[test]
    fn pursuer_actions() {
        let sp = spec(path(3), 1, 1, 1);
        let t = solve_dp(&sp).unwrap();
        assert_eq!(dp_pursuer_action(&t, &sp, &s(&[0], 2)).unwrap(), vec![1]);
        let c4 = spec(cycle(4), 1, 1, 1);
        let t4 = solve_dp(&c4).unwrap();
        assert_eq!(dp_pursuer_action(&t4, &c4, &s(&[0], 2)).unwrap(), vec![0]);
        assert!(matches!(dp_pursuer_action(&t, &sp, &s(&[1], 2)), Err(Error::Query(_))));
    }

    #[test]
    fn evader_actions_break_ties_by_id() {
        let sp = spec(path(3), 1, 1, 1);
        let t = solve_dp(&sp).unwrap();
        // Both replies 1 and 2 have max-min value 0.
        assert_eq!(dp_evader_action(&t, &sp, &s(&[0], 2)).unwrap(), 1);
        let c4 = spec(cycle(4), 1, 1, 1);
        let t4 = solve_dp(&c4).unwrap();
        // Every reply can be met by some pursuer move that captures.
        assert_eq!(dp_evader_action(&t4, &c4, &s(&[0], 2)).unwrap(), 1);
        assert!(dp_evader_action(&t4, &c4, &s(&[0], 1)).is_err());
    }

    #[test]
    fn overlap_capture_cycle_evader_keeps_away() {
        let c4 = spec(cycle(4), 1, 0, 1);
        let t = solve_dp(&c4).unwrap();
        assert_eq!(dp_evader_action(&t, &c4, &s(&[0], 2)).unwrap(), 2);
        assert_eq!(dp_evader_action(&t, &c4, &s(&[0], 1)).unwrap(), 2);
    }

    #[test]
    fn nash_values() {
        let sp = spec(path(3), 1, 1, 1);
        let t = solve_dp(&sp).unwrap();
        assert_eq!(nash_value(&t, &sp, &s(&[1], 1)).unwrap(), 1.0);
        assert!((nash_value(&t, &sp, &s(&[0], 2)).unwrap() - 0.99).abs() < 1e-15);
        let c4 = spec(cycle(4), 1, 1, 1);
        let t4 = solve_dp(&c4).unwrap();
        assert_eq!(nash_value(&t4, &c4, &s(&[0], 2)).unwrap(), 0.0);
    }

    #[test]
    fn bellman_check_catches_corruption() {
        let sp = spec(path(5), 1, 1, 1);
        let mut t = solve_dp(&sp).unwrap();
        assert_eq!(bellman_residual_check(&t, &sp).unwrap(), 0);
        let c4 = spec(cycle(4), 1, 1, 1);
        assert_eq!(bellman_residual_check(&solve_dp(&c4).unwrap(), &c4).unwrap(), 0);
        let idx = sp.state_space().index(&s(&[0], 4));
        t.raw_mut()[idx] += 1;
        assert!(bellman_residual_check(&t, &sp).unwrap() >= 1);
    }

    #[test]
    fn rejects_exits_and_oversized_tables() {
        let with_exit = PegSpec::builder(path(3), 1).exits(vec![2]).build().unwrap();
        assert!(matches!(solve_dp(&with_exit), Err(Error::UnsupportedMode(_))));
        let big = spec(path(10), 3, 1, 1);
        let opts = SolveOptions { state_cap: 1000, ..Default::default() };
        match solve_dp_with(&big, &opts) {
            Err(Error::Capacity { states, cap }) => assert_eq!((states, cap), (10_000, 1000)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn expansion_modes_agree() {
        let sp = spec(cycle(7), 2, 1, 1);
        let (a, sa) = solve_dp_with(&sp, &SolveOptions::default()).unwrap();
        let opts = |expansion, canonical_pursuers| SolveOptions { expansion, canonical_pursuers, ..Default::default() };
        let (b, sb) = solve_dp_with(&sp, &opts(Expansion::Rescan, false)).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa.pushes, sb.pushes);
        assert!(sa.monotone_pops && sb.monotone_pops);
        assert!(sa.pushes <= sa.states);
        for exp in [Expansion::Rescan, Expansion::Countdown, Expansion::Layered] {
            for canon in [false, true] {
                let (t, st) = solve_dp_with(&sp, &opts(exp, canon)).unwrap();
                assert_eq!(a, t, "{exp:?} canonical={canon}");
                assert!(st.monotone_pops);
            }
        }
    }

    #[test]
    fn persistence_round_trip_and_checks() {
        let sp = spec(path(4), 2, 1, 1);
        let t = solve_dp(&sp).unwrap();
        let mut bytes = Vec::new();
        t.write_to(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 24 + 2 * 64);
        assert_eq!(DpTable::read_for(&bytes[..], &sp).unwrap(), t);
        let other = spec(path(4), 2, 0, 1);
        assert!(matches!(DpTable::read_for(&bytes[..], &other), Err(Error::FingerprintMismatch { .. })));
        assert!(matches!(DpTable::read_from(&bytes[..30]), Err(Error::CorruptTable(_))));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(DpTable::read_from(&extra[..]), Err(Error::CorruptTable(_))));
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(matches!(DpTable::read_from(&bad[..]), Err(Error::CorruptTable(_))));
    }
}
