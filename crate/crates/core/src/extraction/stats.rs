//! Rows of the computation-statistics table.

use serde_json::json;

use super::AdgReport;

/// Column names, in output order.
pub const STATS_COLUMNS: [&str; 8] = [
    "file",
    "states",
    "compatible_pairs",
    "compatible_pct",
    "splitting_nodes",
    "depth",
    "undistinguished",
    "undistinguished_pct",
];

#[derive(Clone, Debug, PartialEq)]
pub struct StatsRow {
    pub file: String,
    pub states: usize,
    pub compatible_pairs: usize,
    pub splitting_nodes: usize,
    pub depth: usize,
    pub undistinguished: usize,
}

/// Share of the `n(n-1)/2` unordered pairs of distinct states, in percent.
pub fn pair_percentage(count: usize, states: usize) -> f64 {
    let pairs = states * states.saturating_sub(1) / 2;
    if pairs == 0 {
        0.0
    } else {
        100.0 * count as f64 / pairs as f64
    }
}

impl StatsRow {
    pub fn new(file: impl Into<String>, r: &AdgReport) -> Self {
        StatsRow {
            file: file.into(),
            states: r.states,
            compatible_pairs: r.compatible_pairs,
            splitting_nodes: r.splitting_nodes,
            depth: r.depth,
            undistinguished: r.missed.len(),
        }
    }

    pub fn compatible_pct(&self) -> f64 {
        pair_percentage(self.compatible_pairs, self.states)
    }

    pub fn undistinguished_pct(&self) -> f64 {
        pair_percentage(self.undistinguished, self.states)
    }

    /// Cell values in [`STATS_COLUMNS`] order.
    pub fn cells(&self) -> [String; 8] {
        [
            self.file.clone(),
            self.states.to_string(),
            self.compatible_pairs.to_string(),
            format!("{:.3}", self.compatible_pct()),
            self.splitting_nodes.to_string(),
            self.depth.to_string(),
            self.undistinguished.to_string(),
            format!("{:.3}", self.undistinguished_pct()),
        ]
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "file": self.file,
            "states": self.states,
            "compatible_pairs": self.compatible_pairs,
            "compatible_pct": self.compatible_pct(),
            "splitting_nodes": self.splitting_nodes,
            "depth": self.depth,
            "undistinguished": self.undistinguished,
            "undistinguished_pct": self.undistinguished_pct(),
        })
    }
}

/// Tab-separated table with a header line.
pub fn stats_table(rows: &[StatsRow]) -> String {
    let mut out = STATS_COLUMNS.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&r.cells().join("\t"));
        out.push('\n');
    }
    out
}
