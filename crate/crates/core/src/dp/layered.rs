//! Layer-at-a-time countdown over an evader-major copy of the table.
//!
//! Working index is `e * C + cfg` with `C = n^m`. Popping the layer-`d`
//! states of one evader block `e` only touches the counters and values of
//! the blocks `ne` in `N(e)`, and all predecessor writes for a fired
//! `(cfg, ne)` land in block `ne`. Within a layer the processing order does
//! not affect the result: a pair fires once its last neighbor with value at
//! most `d` has been popped, whatever the order.

use super::{fill_permutations, SolveStats, INF};
use crate::error::{Error, Result};
use crate::game::PegSpec;

trait Count: Copy {
    fn from_len(len: usize) -> Self;
    /// Decrements and reports whether the count reached zero.
    fn tick(&mut self) -> bool;
}

impl Count for u8 {
    fn from_len(len: usize) -> Self {
        len as u8
    }
    #[inline]
    fn tick(&mut self) -> bool {
        *self -= 1;
        *self == 0
    }
}

impl Count for u16 {
    fn from_len(len: usize) -> Self {
        len as u16
    }
    #[inline]
    fn tick(&mut self) -> bool {
        *self -= 1;
        *self == 0
    }
}

pub(super) fn solve(spec: &PegSpec, canonical: bool) -> Result<(Vec<u16>, SolveStats)> {
    let widest = (0..spec.node_count()).map(|v| spec.moves(v).len()).max().unwrap_or(1);
    if widest <= u8::MAX as usize {
        solve_with::<u8>(spec, canonical)
    } else if widest < u16::MAX as usize {
        solve_with::<u16>(spec, canonical)
    } else {
        Err(Error::Argument(format!("closed neighborhood of {widest} nodes is too wide")))
    }
}

struct Layers<'a, C> {
    n: usize,
    m: usize,
    configs: usize,
    canonical: bool,
    closed: &'a [Vec<u32>],
    dt: Vec<u16>,
    counter: Vec<C>,
    pushes: u64,
    digits: Vec<usize>,
    pos: Vec<usize>,
    tuple: Vec<usize>,
}

fn solve_with<C: Count>(spec: &PegSpec, canonical: bool) -> Result<(Vec<u16>, SolveStats)> {
    let n = spec.node_count();
    let m = spec.pursuers();
    let configs = n.pow(m as u32);
    let canonical = canonical && m > 1;
    let closed: Vec<Vec<u32>> = (0..n).map(|v| spec.moves(v).iter().map(|&u| u as u32).collect()).collect();

    let mut counter = Vec::with_capacity(configs * n);
    for nbrs in &closed {
        counter.resize(counter.len() + configs, C::from_len(nbrs.len()));
    }
    let mut st = Layers {
        n,
        m,
        configs,
        canonical,
        closed: &closed,
        dt: vec![INF; configs * n],
        counter,
        pushes: 0,
        digits: vec![0; m],
        pos: vec![0; m],
        tuple: vec![0; m],
    };

    let space = spec.state_space();
    let mut digits = vec![0; m];
    for cfg in 0..configs {
        space.decode_pursuers(cfg, &mut digits);
        if canonical && !digits.windows(2).all(|w| w[0] <= w[1]) {
            continue;
        }
        for e in 0..n {
            if spec.capture_count(&digits, e) >= spec.capture_threshold() {
                st.dt[e * configs + cfg] = 0;
                st.pushes += 1;
            }
        }
    }

    let mut pops = 0u64;
    let mut frontier: Vec<u32> = Vec::new();
    let mut d = 0u16;
    loop {
        let mut layer_pops = 0;
        for (e, around) in closed.iter().enumerate().take(n) {
            frontier.clear();
            let block = &st.dt[e * configs..(e + 1) * configs];
            frontier.extend(block.iter().enumerate().filter(|(_, &v)| v == d).map(|(cfg, _)| cfg as u32));
            layer_pops += frontier.len();
            for &ne in around {
                let ne = ne as usize;
                let base = ne * configs;
                for &cfg in &frontier {
                    if st.counter[base + cfg as usize].tick() {
                        st.expand(cfg as usize, ne, d)?;
                    }
                }
            }
        }
        if layer_pops == 0 {
            break;
        }
        pops += layer_pops as u64;
        d += 1;
    }

    let pushes = st.pushes;
    let mut out = transpose(&st.dt, configs, n);
    drop(st);
    if canonical {
        fill_permutations(&mut out, n, m);
    }
    Ok((out, SolveStats { pushes, pops, monotone_pops: true, ..Default::default() }))
}

impl<C: Count> Layers<'_, C> {
    /// Assigns `d + 1` to every unsolved predecessor `(n_p, ne)` of `(cfg, ne)`.
    #[inline]
    fn expand(&mut self, cfg: usize, ne: usize, d: u16) -> Result<()> {
        let value = d + 1;
        if value == INF {
            return Err(Error::StepOverflow(value as u32));
        }
        let n = self.n;
        let base = ne * self.configs;
        let closed = self.closed;
        match self.m {
            1 => {
                for &a in &closed[cfg] {
                    self.set(base + a as usize, value);
                }
            }
            2 => {
                let (a, b) = (cfg / n, cfg % n);
                for &a2 in &closed[a] {
                    let a2 = a2 as usize;
                    for &b2 in &closed[b] {
                        let b2 = b2 as usize;
                        let t = if self.canonical && b2 < a2 { b2 * n + a2 } else { a2 * n + b2 };
                        self.set(base + t, value);
                    }
                }
            }
            3 => {
                let (a, b, c) = (cfg / (n * n), cfg / n % n, cfg % n);
                for &a2 in &closed[a] {
                    for &b2 in &closed[b] {
                        for &c2 in &closed[c] {
                            let (mut x, mut y, mut z) = (a2 as usize, b2 as usize, c2 as usize);
                            if self.canonical {
                                if x > y {
                                    std::mem::swap(&mut x, &mut y);
                                }
                                if y > z {
                                    std::mem::swap(&mut y, &mut z);
                                }
                                if x > y {
                                    std::mem::swap(&mut x, &mut y);
                                }
                            }
                            self.set(base + (x * n + y) * n + z, value);
                        }
                    }
                }
            }
            m => {
                let mut c = cfg;
                for slot in self.digits.iter_mut().rev() {
                    *slot = c % n;
                    c /= n;
                }
                self.pos.iter_mut().for_each(|p| *p = 0);
                loop {
                    for i in 0..m {
                        self.tuple[i] = closed[self.digits[i]][self.pos[i]] as usize;
                    }
                    if self.canonical {
                        self.tuple.sort_unstable();
                    }
                    let t = self.tuple.iter().fold(0, |acc, &p| acc * n + p);
                    self.set(base + t, value);
                    let mut i = m;
                    loop {
                        if i == 0 {
                            return Ok(());
                        }
                        i -= 1;
                        self.pos[i] += 1;
                        if self.pos[i] < closed[self.digits[i]].len() {
                            break;
                        }
                        self.pos[i] = 0;
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn set(&mut self, idx: usize, value: u16) {
        let slot = &mut self.dt[idx];
        if *slot == INF {
            *slot = value;
            self.pushes += 1;
        }
    }
}

/// Evader-major `e * configs + cfg` to pursuer-major `cfg * n + e`.
fn transpose(dt: &[u16], configs: usize, n: usize) -> Vec<u16> {
    const TILE: usize = 64;
    let mut out = vec![INF; dt.len()];
    for c0 in (0..configs).step_by(TILE) {
        let c1 = (c0 + TILE).min(configs);
        for e in 0..n {
            let src = &dt[e * configs..];
            for cfg in c0..c1 {
                out[cfg * n + e] = src[cfg];
            }
        }
    }
    out
}
