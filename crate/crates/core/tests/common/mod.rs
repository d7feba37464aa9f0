#![allow(dead_code)]

use std::collections::VecDeque;

use pegkit::graph::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Random spanning tree plus `extra` random chords.
pub fn random_connected(rng: &mut impl Rng, n: usize, extra: usize) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        edges.push((order[i], parent));
    }
    for _ in 0..extra {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            edges.push((u, v));
        }
    }
    let mut edges: Vec<_> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    edges.dedup();
    Graph::from_edges(n, &edges).unwrap()
}

/// Hop distances from `src` by plain BFS.
pub fn bfs(g: &Graph, src: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.node_count()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Maximum matching size by trying every assignment.
pub fn brute_matching(adj: &[Vec<usize>], right_count: usize) -> usize {
    fn go(adj: &[Vec<usize>], i: usize, used: &mut Vec<bool>) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = go(adj, i + 1, used);
        for &r in &adj[i] {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + go(adj, i + 1, used));
                used[r] = false;
            }
        }
        best
    }
    go(adj, 0, &mut vec![false; right_count])
}

/// Checks that `partners` is a matching using only edges of `adj`.
pub fn is_matching(adj: &[Vec<usize>], right_count: usize, partners: &[Option<usize>]) -> bool {
    let mut used = vec![false; right_count];
    for (l, p) in partners.iter().enumerate() {
        if let Some(r) = *p {
            if !adj[l].contains(&r) || used[r] {
                return false;
            }
            used[r] = true;
        }
    }
    true
}

/// All set partitions of `0..m` into blocks of size 2 or 3, each as a sorted
/// list of sorted blocks.
pub fn brute_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    // Restricted growth strings enumerate every set partition exactly once.
    let mut out = Vec::new();
    let mut label = vec![0usize; m];
    fn go(i: usize, blocks: usize, label: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == label.len() {
            let mut parts = vec![Vec::new(); blocks];
            for (x, &b) in label.iter().enumerate() {
                parts[b].push(x);
            }
            if parts.iter().all(|p| p.len() == 2 || p.len() == 3) {
                parts.sort();
                out.push(parts);
            }
            return;
        }
        for b in 0..=blocks {
            label[i] = b;
            go(i + 1, blocks.max(b + 1), label, out);
        }
    }
    go(0, 0, &mut label, &mut out);
    out
}
