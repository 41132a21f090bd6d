use std::collections::{HashMap, VecDeque};

use crate::critical::Skeleton;
use crate::error::{Error, Result};
use crate::mesh::ScalarMesh;
use crate::order::HeightOrder;
use crate::tree::{ContourTree, MergeTree};
use crate::union_find::UnionFind;

pub const DEFAULT_ORACLE_MAX: usize = 500;

/// Oracle size policy, overridable through `CONTOUR_ORACLE_MAX`.
pub fn oracle_limit() -> usize {
    std::env::var("CONTOUR_ORACLE_MAX").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_ORACLE_MAX)
}

/// Merge tree over every node, with edges child -> parent.
#[derive(Clone, Debug)]
pub struct AugmentedTree {
    pub tree: MergeTree,
    /// Nodes in sweep order (root last).
    pub sweep: Vec<u32>,
}

impl AugmentedTree {
    /// Keep only `keep` nodes; each kept node hangs off its nearest kept
    /// ancestor.
    pub fn restrict(&self, keep: &dyn Fn(u32) -> bool) -> MergeTree {
        let parent = self.tree.parent_map();
        let mut nearest: HashMap<u32, u32> = HashMap::new();
        let mut edges = Vec::new();
        // parents precede children when walking the sweep backwards
        for &v in self.sweep.iter().rev() {
            if let Some(&p) = parent.get(&v) {
                let up = if keep(p) { p } else { nearest.get(&p).copied().unwrap_or(u32::MAX) };
                if up != u32::MAX {
                    nearest.insert(v, up);
                    if keep(v) {
                        edges.push((v, up));
                    }
                }
            }
        }
        let nodes = self.sweep.iter().copied().filter(|&v| keep(v)).collect();
        MergeTree::new(nodes, edges)
    }
}

/// Join tree augmented with all nodes: one global sort (counted), then a
/// union-find sweep from the top that makes no comparisons.
pub fn sorted_sweep_join_tree(s: &Skeleton, order: &HeightOrder) -> AugmentedTree {
    let mut sorted = s.nodes.clone();
    order.sort_ascending(&mut sorted);
    sorted.reverse();
    sweep_with(s, sorted)
}

/// Split tree from an ascending order (reusing a previous sort).
pub fn sorted_sweep_split_tree(s: &Skeleton, ascending: Vec<u32>) -> AugmentedTree {
    sweep_with(s, ascending)
}

fn sweep_with(s: &Skeleton, sweep: Vec<u32>) -> AugmentedTree {
    let n = s.id_space();
    let mut uf = UnionFind::new(n);
    let mut low = vec![u32::MAX; n];
    let mut seen = vec![false; n];
    let mut edges = Vec::with_capacity(sweep.len());
    for &v in &sweep {
        seen[v as usize] = true;
        low[v as usize] = v;
        for &w in &s.adj[v as usize] {
            if !seen[w as usize] {
                continue;
            }
            let (rv, rw) = (uf.find(v), uf.find(w));
            if rv == rw {
                continue;
            }
            edges.push((low[rw as usize], v));
            let r = uf.union(rv, rw);
            low[r as usize] = v;
        }
    }
    AugmentedTree { tree: MergeTree::new(sweep.clone(), edges), sweep }
}

/// Tree with parent/children links supporting the erase operation.
#[derive(Clone, Debug)]
pub struct DynTree {
    parent: HashMap<u32, u32>,
    children: HashMap<u32, Vec<u32>>,
}

impl DynTree {
    pub fn from_merge_tree(t: &MergeTree) -> Self {
        let mut children: HashMap<u32, Vec<u32>> = t.nodes.iter().map(|&v| (v, Vec::new())).collect();
        for &(c, p) in &t.edges {
            children.entry(p).or_default().push(c);
        }
        DynTree { parent: t.parent_map(), children }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.children.contains_key(&v)
    }

    pub fn child_count(&self, v: u32) -> usize {
        self.children.get(&v).map_or(0, |c| c.len())
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent.get(&v).copied()
    }

    pub fn children(&self, v: u32) -> &[u32] {
        self.children.get(&v).map_or(&[], |c| c.as_slice())
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn to_merge_tree(&self) -> MergeTree {
        MergeTree::new(self.children.keys().copied().collect(), self.parent.iter().map(|(&c, &p)| (c, p)).collect())
    }
}

/// The ⊖ operation: delete a leaf, or splice out a node with one child.
pub fn erase(t: &mut DynTree, v: u32) -> Result<()> {
    let kids = t.children.get(&v).ok_or_else(|| Error::Invariant(format!("erase: {v} not in tree")))?.clone();
    if kids.len() > 1 {
        return Err(Error::Invariant(format!("erase: {v} has {} children", kids.len())));
    }
    let parent = t.parent.remove(&v);
    if let Some(p) = parent {
        let pc = t.children.get_mut(&p).expect("parent present");
        pc.retain(|&x| x != v);
        if let Some(&c) = kids.first() {
            pc.push(c);
        }
    }
    if let Some(&c) = kids.first() {
        match parent {
            Some(p) => {
                t.parent.insert(c, p);
            }
            None => {
                t.parent.remove(&c);
            }
        }
    }
    t.children.remove(&v);
    Ok(())
}

/// Leaf-peeling merge of augmented join and split trees (both with edges
/// child -> parent). Returns the augmented contour tree as (higher, lower).
pub fn csa_merge(join: &MergeTree, split: &MergeTree) -> Result<ContourTree> {
    let mut j = DynTree::from_merge_tree(join);
    let mut s = DynTree::from_merge_tree(split);
    if j.len() != s.len() {
        return Err(Error::Invariant("join and split trees cover different nodes".into()));
    }
    let candidate = |j: &DynTree, s: &DynTree, v: u32| j.child_count(v) + s.child_count(v) == 1;
    let mut queue: VecDeque<u32> = join.nodes.iter().copied().filter(|&v| candidate(&j, &s, v)).collect();
    let mut edges = Vec::with_capacity(join.nodes.len());
    let mut remaining = j.len();
    let mut done: HashMap<u32, bool> = HashMap::new();
    while remaining > 1 {
        let v = queue.pop_front().ok_or_else(|| Error::Invariant("merge queue ran dry".into()))?;
        if done.contains_key(&v) || !candidate(&j, &s, v) {
            continue;
        }
        let (jp, sp) = (j.parent(v), s.parent(v));
        let neighbour = if j.child_count(v) == 0 {
            let lo = jp.ok_or_else(|| Error::Invariant(format!("upper leaf {v} has no join parent")))?;
            edges.push((v, lo));
            lo
        } else {
            let hi = sp.ok_or_else(|| Error::Invariant(format!("lower leaf {v} has no split parent")))?;
            edges.push((hi, v));
            hi
        };
        erase(&mut j, v)?;
        erase(&mut s, v)?;
        done.insert(v, true);
        remaining -= 1;
        for w in [neighbour, jp.unwrap_or(neighbour), sp.unwrap_or(neighbour)] {
            if j.contains(w) && candidate(&j, &s, w) {
                queue.push_back(w);
            }
        }
    }
    Ok(ContourTree::new(join.nodes.clone(), edges))
}

/// Remove nodes with one higher and one lower neighbour, joining their
/// neighbours.
pub fn smooth(t: &ContourTree) -> ContourTree {
    let deg = t.degrees();
    let regular = |v: u32| deg.get(&v).is_some_and(|&(u, d)| u == 1 && d == 1);
    let mut down: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(hi, lo) in &t.edges {
        down.entry(hi).or_default().push(lo);
    }
    let mut edges = Vec::new();
    for &v in &t.nodes {
        if regular(v) {
            continue;
        }
        for &w0 in down.get(&v).map_or(&[][..], |x| x.as_slice()) {
            let mut w = w0;
            while regular(w) {
                w = down[&w][0];
            }
            edges.push((v, w));
        }
    }
    ContourTree::new(t.nodes.iter().copied().filter(|&v| !regular(v)).collect(), edges)
}

/// Counters from a baseline run.
#[derive(Clone, Copy, Debug, Default)]
pub struct BaselineStats {
    pub comparisons: u64,
}

/// Contour tree by sorted sweeps and the leaf-peeling merge.
pub fn csa_contour_tree(s: &Skeleton, order: &HeightOrder) -> Result<(ContourTree, BaselineStats)> {
    let start = order.count();
    let j = sorted_sweep_join_tree(s, order);
    let ascending: Vec<u32> = j.sweep.iter().rev().copied().collect();
    let sp = sorted_sweep_split_tree(s, ascending);
    let aug = csa_merge(&j.tree, &sp.tree)?;
    let c = smooth(&aug);
    Ok((c, BaselineStats { comparisons: order.count() - start }))
}

/// Brute-force contour tree: components of the level-set graph between
/// every pair of consecutive node heights, tracked across nodes.
pub fn sweep_oracle(mesh: &ScalarMesh) -> Result<ContourTree> {
    let nodes = mesh.nodes();
    let limit = oracle_limit();
    if nodes.len() > limit {
        return Err(Error::OracleSize { size: nodes.len(), limit });
    }
    let order = mesh.height_order();
    let mut sorted = nodes.clone();
    sorted.sort_by(|&a, &b| order.compare(a, b));
    let n = mesh.vertex_count();
    let mut rank = vec![0usize; n];
    for (i, &u) in sorted.iter().enumerate() {
        rank[u as usize] = i;
    }
    for v in 0..n as u32 {
        rank[v as usize] = rank[mesh.node_of(v) as usize];
    }
    let mut edge_ids: HashMap<(u32, u32), usize> = HashMap::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut face_edges: Vec<[usize; 3]> = Vec::with_capacity(mesh.face_count());
    for f in mesh.faces() {
        let mut ids = [0usize; 3];
        for i in 0..3 {
            let (a, b) = (f[i], f[(i + 1) % 3]);
            let (lo, hi) = if rank[a as usize] <= rank[b as usize] { (a, b) } else { (b, a) };
            let key = (lo.min(hi), lo.max(hi));
            let next = edges.len();
            let id = *edge_ids.entry(key).or_insert_with(|| {
                edges.push((lo, hi));
                next
            });
            ids[i] = id;
        }
        face_edges.push(ids);
    }
    let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    for (fi, fe) in face_edges.iter().enumerate() {
        for &e in fe {
            edge_faces[e].push(fi);
        }
    }
    let crosses = |e: usize, gap: usize| {
        let (a, b) = edges[e];
        rank[a as usize] <= gap && gap < rank[b as usize]
    };
    let mut birth: Vec<u32> = Vec::new();
    let mut prev_class: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::new();
    for (i, &u) in sorted.iter().enumerate() {
        let mut comp_of: HashMap<usize, usize> = HashMap::new();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        if i + 1 < sorted.len() {
            for e in 0..edges.len() {
                if !crosses(e, i) || comp_of.contains_key(&e) {
                    continue;
                }
                let cid = comps.len();
                let mut members = vec![e];
                comp_of.insert(e, cid);
                let mut k = 0;
                while k < members.len() {
                    let x = members[k];
                    k += 1;
                    for &fi in &edge_faces[x] {
                        for &y in &face_edges[fi] {
                            if y != x && crosses(y, i) && !comp_of.contains_key(&y) {
                                comp_of.insert(y, cid);
                                members.push(y);
                            }
                        }
                    }
                }
                comps.push(members);
            }
        }
        let touches = |e: usize| {
            let (a, b) = edges[e];
            rank[a as usize] == i || rank[b as usize] == i
        };
        let mut below: Vec<usize> = prev_class
            .iter()
            .filter(|(&e, _)| touches(e))
            .map(|(_, &c)| c)
            .collect();
        below.sort_unstable();
        below.dedup();
        let above: Vec<usize> = (0..comps.len()).filter(|&c| comps[c].iter().any(|&e| touches(e))).collect();
        let mut class_of_comp = vec![usize::MAX; comps.len()];
        for c in 0..comps.len() {
            if !above.contains(&c) {
                class_of_comp[c] = prev_class[&comps[c][0]];
            }
        }
        if above.len() == 1 && below.len() == 1 {
            class_of_comp[above[0]] = below[0];
        } else {
            for &b in &below {
                out.push((u, birth[b]));
            }
            for &a in &above {
                class_of_comp[a] = birth.len();
                birth.push(u);
            }
        }
        prev_class.clear();
        for (c, members) in comps.iter().enumerate() {
            for &e in members {
                prev_class.insert(e, class_of_comp[c]);
            }
        }
    }
    let mut used: Vec<u32> = out.iter().flat_map(|&(a, b)| [a, b]).collect();
    if used.is_empty() {
        used = sorted.clone();
    }
    Ok(ContourTree::new(used, out))
}
