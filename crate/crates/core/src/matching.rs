//! Maximum-cardinality bipartite matching by augmenting paths.
//!
//! Left vertices are tried in index order and right neighbors in the order
//! given, so results are deterministic.

/// Incremental matcher: left vertices are added one at a time and each
/// addition either extends the matching by one or leaves it unchanged.
#[derive(Debug, Clone)]
pub struct Matcher<'a> {
    adj: &'a [Vec<usize>],
    left: Vec<Option<usize>>,
    right: Vec<Option<usize>>,
    seen: Vec<bool>,
}

impl<'a> Matcher<'a> {
    /// `adj[l]` lists the right neighbors of left vertex `l`.
    pub fn new(adj: &'a [Vec<usize>], right_count: usize) -> Self {
        Matcher { adj, left: vec![None; adj.len()], right: vec![None; right_count], seen: vec![false; right_count] }
    }

    /// Tries to match `l` along an augmenting path. Previously matched left
    /// vertices stay matched (possibly to different partners).
    pub fn augment(&mut self, l: usize) -> bool {
        self.seen.iter_mut().for_each(|s| *s = false);
        self.visit(l)
    }

    fn visit(&mut self, l: usize) -> bool {
        for &r in &self.adj[l] {
            if self.seen[r] {
                continue;
            }
            self.seen[r] = true;
            if self.right[r].is_none_or(|l2| self.visit(l2)) {
                self.left[l] = Some(r);
                self.right[r] = Some(l);
                return true;
            }
        }
        false
    }

    /// Partner of each left vertex.
    pub fn left_partners(&self) -> &[Option<usize>] {
        &self.left
    }

    pub fn size(&self) -> usize {
        self.left.iter().flatten().count()
    }
}

/// Maximum matching; returns the partner of each left vertex.
pub fn max_bipartite_matching(adj: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    let mut m = Matcher::new(adj, right_count);
    for l in 0..adj.len() {
        m.augment(l);
    }
    m.left
}

/// Largest `k` such that left vertices `0..k` can all be matched at once,
/// with a matching that saturates them.
pub fn max_prefix_perfect_matching(adj: &[Vec<usize>], right_count: usize) -> (usize, Vec<Option<usize>>) {
    let mut m = Matcher::new(adj, right_count);
    let mut k = 0;
    while k < adj.len() && m.augment(k) {
        k += 1;
    }
    (k, m.left)
}
