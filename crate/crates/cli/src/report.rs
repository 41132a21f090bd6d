use serde::Serialize;
use sha2::{Digest, Sha256};

use contour_core::tree::ContourTree;

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportCounters {
    pub comparisons: u64,
    pub local_comparisons: u64,
    pub heap_cost: f64,
    pub t: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub pieces: usize,
    pub cuts: usize,
    pub synthetic_vertices: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub input_digest: String,
    pub algorithm: String,
    pub tree: String,
    pub tree_digest: String,
    pub counters: ReportCounters,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(input: &[u8], algorithm: &str, kind: &str, tree: &ContourTree, counters: ReportCounters) -> Self {
        RunReport {
            input_digest: digest(input),
            algorithm: algorithm.to_string(),
            tree: kind.to_string(),
            tree_digest: digest(tree.canonical().as_bytes()),
            counters,
            wall_time_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let c = &self.counters;
        format!(
            "input_digest,algorithm,tree,tree_digest,comparisons,local_comparisons,heap_cost,t,N,pieces,cuts,synthetic_vertices,wall_time_ms\n\
             {},{},{},{},{},{},{:.3},{},{},{},{},{},{:.3}\n",
            self.input_digest,
            self.algorithm,
            self.tree,
            self.tree_digest,
            c.comparisons,
            c.local_comparisons,
            c.heap_cost,
            c.t,
            c.n,
            c.pieces,
            c.cuts,
            c.synthetic_vertices,
            self.wall_time_ms
        )
    }
}
