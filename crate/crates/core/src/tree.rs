use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invariant, Result};

/// Rooted tree over critical nodes with edges stored child -> parent.
/// For a join tree parents are lower; for a split tree parents are higher.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MergeTree {
    pub nodes: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl MergeTree {
    pub fn new(mut nodes: Vec<u32>, mut edges: Vec<(u32, u32)>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        edges.sort_unstable();
        edges.dedup();
        MergeTree { nodes, edges }
    }

    pub fn parent_map(&self) -> HashMap<u32, u32> {
        self.edges.iter().copied().collect()
    }

    pub fn children_map(&self) -> HashMap<u32, Vec<u32>> {
        let mut m: HashMap<u32, Vec<u32>> = HashMap::new();
        for &(c, p) in &self.edges {
            m.entry(p).or_default().push(c);
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    }

    pub fn roots(&self) -> Vec<u32> {
        let p = self.parent_map();
        self.nodes.iter().copied().filter(|v| !p.contains_key(v)).collect()
    }

    pub fn leaves(&self) -> Vec<u32> {
        let c = self.children_map();
        self.nodes.iter().copied().filter(|v| !c.contains_key(v)).collect()
    }

    pub fn ancestry(&self) -> Ancestry {
        Ancestry::new(&self.nodes, &self.edges)
    }

    /// Edges as (higher, lower) pairs for a join tree.
    pub fn as_contour_edges(&self) -> ContourTree {
        ContourTree::new(self.nodes.clone(), self.edges.clone())
    }
}

/// Constant-time ancestor queries via DFS entry/exit times.
#[derive(Clone, Debug)]
pub struct Ancestry {
    tin: HashMap<u32, (u32, u32)>,
}

impl Ancestry {
    pub fn new(nodes: &[u32], child_parent: &[(u32, u32)]) -> Self {
        let mut children: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut has_parent: HashMap<u32, bool> = HashMap::new();
        for &(c, p) in child_parent {
            children.entry(p).or_default().push(c);
            has_parent.insert(c, true);
        }
        let mut tin: HashMap<u32, (u32, u32)> = HashMap::with_capacity(nodes.len());
        let mut clock = 0u32;
        for &r in nodes {
            if has_parent.contains_key(&r) {
                continue;
            }
            let mut stack = vec![(r, false)];
            while let Some((v, done)) = stack.pop() {
                if done {
                    let e = tin.get_mut(&v).expect("entered");
                    *e = (e.0, clock);
                    clock += 1;
                    continue;
                }
                tin.insert(v, (clock, 0));
                clock += 1;
                stack.push((v, true));
                if let Some(ch) = children.get(&v) {
                    for &c in ch {
                        stack.push((c, false));
                    }
                }
            }
        }
        Ancestry { tin }
    }

    /// True when `a` is an ancestor of `b` (or equal).
    pub fn is_ancestor(&self, a: u32, b: u32) -> bool {
        match (self.tin.get(&a), self.tin.get(&b)) {
            (Some(&(ia, oa)), Some(&(ib, ob))) => ia <= ib && ob <= oa,
            _ => false,
        }
    }

    pub fn related(&self, a: u32, b: u32) -> bool {
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    pub fn contains(&self, a: u32) -> bool {
        self.tin.contains_key(&a)
    }
}

/// Unrooted tree over critical points with edges stored (higher, lower).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContourTree {
    pub nodes: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Serialize)]
struct JsonNode<'a> {
    id: u32,
    height: f64,
    kind: &'a str,
}

#[derive(Serialize)]
struct JsonTree<'a> {
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<[u32; 2]>,
}

impl ContourTree {
    pub fn new(mut nodes: Vec<u32>, mut edges: Vec<(u32, u32)>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        edges.sort_unstable();
        edges.dedup();
        ContourTree { nodes, edges }
    }

    /// (up-degree, down-degree) per node.
    pub fn degrees(&self) -> BTreeMap<u32, (u32, u32)> {
        let mut d: BTreeMap<u32, (u32, u32)> = self.nodes.iter().map(|&v| (v, (0, 0))).collect();
        for &(hi, lo) in &self.edges {
            d.entry(hi).or_default().1 += 1;
            d.entry(lo).or_default().0 += 1;
        }
        d
    }

    pub fn kind_of(up: u32, down: u32) -> &'static str {
        match (up, down) {
            (0, 0) => "isolated",
            (0, _) => "max",
            (_, 0) => "min",
            (1, 1) => "regular",
            (u, d) if u >= 2 && d >= 2 => "multi",
            (u, _) if u >= 2 => "join",
            _ => "split",
        }
    }

    pub fn joins_and_splits(&self) -> (usize, usize) {
        let mut j = 0;
        let mut s = 0;
        for (_, (u, d)) in self.degrees() {
            if u >= 2 {
                j += 1;
            }
            if d >= 2 {
                s += 1;
            }
        }
        (j, s)
    }

    /// Nodes of total degree above 3 (contracted multi-saddles).
    pub fn high_degree_nodes(&self) -> Vec<u32> {
        self.degrees().into_iter().filter(|(_, (u, d))| u + d > 3).map(|(v, _)| v).collect()
    }

    /// Connected and acyclic.
    pub fn check_tree(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return invariant("empty tree");
        }
        if self.edges.len() + 1 != self.nodes.len() {
            return invariant(format!("{} nodes but {} edges", self.nodes.len(), self.edges.len()));
        }
        let idx: HashMap<u32, usize> = self.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = crate::union_find::UnionFind::new(self.nodes.len());
        for &(a, b) in &self.edges {
            let (Some(&ia), Some(&ib)) = (idx.get(&a), idx.get(&b)) else {
                return invariant(format!("edge ({a},{b}) names a missing node"));
            };
            if uf.same(ia as u32, ib as u32) {
                return invariant("tree has a cycle");
            }
            uf.union(ia as u32, ib as u32);
        }
        Ok(())
    }

    pub fn to_json(&self, heights: &dyn Fn(u32) -> f64) -> String {
        let deg = self.degrees();
        let nodes = self
            .nodes
            .iter()
            .map(|&v| {
                let (u, d) = deg[&v];
                JsonNode { id: v, height: heights(v), kind: Self::kind_of(u, d) }
            })
            .collect();
        let edges = self.edges.iter().map(|&(a, b)| [a, b]).collect();
        let mut s = serde_json::to_string(&JsonTree { nodes, edges }).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_dot(&self, heights: &dyn Fn(u32) -> f64) -> String {
        let deg = self.degrees();
        let mut s = String::from("digraph tree {\n");
        for &v in &self.nodes {
            let (u, d) = deg[&v];
            let _ = writeln!(s, "  n{v} [label=\"{v} ({}) {}\"];", heights(v), Self::kind_of(u, d));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }

    /// Canonical text used for digests and equality across runs.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for &v in &self.nodes {
            let _ = write!(s, "{v},");
        }
        s.push('|');
        for &(a, b) in &self.edges {
            let _ = write!(s, "{a}>{b},");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ancestry_on_chain() {
        let t = MergeTree::new(vec![1, 2, 3, 4], vec![(1, 2), (2, 3), (4, 3)]);
        let a = t.ancestry();
        assert!(a.is_ancestor(3, 1));
        assert!(!a.is_ancestor(1, 3));
        assert!(!a.related(1, 4));
    }

    #[test]
    fn kinds_and_shape() {
        let t = ContourTree::new(vec![0, 1, 2, 3], vec![(0, 2), (1, 2), (2, 3)]);
        t.check_tree().unwrap();
        let json = t.to_json(&|v| v as f64);
        assert!(json.contains("\"kind\":\"join\""));
        assert_eq!(t.joins_and_splits(), (1, 0));
        let bad = ContourTree::new(vec![0, 1, 2], vec![(0, 1)]);
        assert!(bad.check_tree().is_err());
    }
}
