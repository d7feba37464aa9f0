//! Distance features: one row per agent and per exit, each holding the
//! normalized shortest-path distance from that agent or exit to every node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GlobalState, PegSpec};

/// Row-major `(m + 1 + exits) x n` matrix of `dist / diameter`.
///
/// Rows `0..m` are the pursuers in order, row `m` the evader, then one row
/// per exit in ascending id order. `acting_node` is the node of the acting
/// pursuer `acting_order` (zero-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFeature {
    pub pursuers: usize,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub acting_node: usize,
    pub acting_order: usize,
}

impl StateFeature {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }
}

/// Result of inverting a feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub state: GlobalState,
    pub exits: Vec<usize>,
    /// Smallest pursuer index standing on the acting node.
    pub acting_order: usize,
    /// More than one pursuer stands on the acting node, so the acting order
    /// cannot be told apart.
    pub ambiguous: bool,
}

pub fn extract_feature(spec: &PegSpec, s: &GlobalState, acting_order: usize) -> Result<StateFeature> {
    spec.check_state(s)?;
    let apsp = spec.apsp();
    let diameter = apsp.diameter();
    if diameter == 0 {
        return Err(Error::DegenerateGraph);
    }
    let m = spec.pursuers();
    if acting_order >= m {
        return Err(Error::Argument(format!("acting order {acting_order} out of range for {m} pursuers")));
    }
    let n = spec.node_count();
    let sources = s.pursuers.iter().copied().chain([s.evader]).chain(spec.exits().iter().copied());
    let scale = diameter as f64;
    let mut data = Vec::with_capacity((m + 1 + spec.exits().len()) * n);
    for src in sources {
        data.extend(apsp.row(src).iter().map(|&d| d as f64 / scale));
    }
    Ok(StateFeature {
        pursuers: m,
        rows: data.len() / n,
        cols: n,
        data,
        acting_node: s.pursuers[acting_order],
        acting_order,
    })
}

pub fn reconstruct_state(feature: &StateFeature) -> Result<Reconstruction> {
    let (rows, cols, m) = (feature.rows, feature.cols, feature.pursuers);
    if cols == 0 || feature.data.len() != rows * cols || rows < m + 1 || m == 0 {
        return Err(Error::MalformedFeature(format!(
            "{} values do not form a {rows}x{cols} matrix with {m} pursuer rows",
            feature.data.len()
        )));
    }
    if feature.acting_node >= cols {
        return Err(Error::MalformedFeature(format!("acting node {} out of range", feature.acting_node)));
    }
    let mut nodes = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut zeros = feature.row(i).iter().enumerate().filter(|(_, &v)| v == 0.0).map(|(j, _)| j);
        match (zeros.next(), zeros.next()) {
            (Some(j), None) => nodes.push(j),
            (None, _) => return Err(Error::MalformedFeature(format!("row {i} has no zero"))),
            (Some(_), Some(_)) => return Err(Error::MalformedFeature(format!("row {i} has several zeros"))),
        }
    }
    let c = feature.acting_node;
    let acting: Vec<usize> = (0..m).filter(|&i| feature.get(i, c) == 0.0).collect();
    let Some(&acting_order) = acting.first() else {
        return Err(Error::MalformedFeature(format!("no pursuer row is zero at acting node {c}")));
    };
    Ok(Reconstruction {
        state: GlobalState::new(nodes[..m].to_vec(), nodes[m]),
        exits: nodes[m + 1..].to_vec(),
        acting_order,
        ambiguous: acting.len() > 1,
    })
}
