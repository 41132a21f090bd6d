//! Leaf assignments, heap sets and path decompositions of a join tree, and
//! the bounds tying the build cost to them.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{invariant, Result};
use crate::heap::log_cost;
use crate::painted_join::BuildTrace;
use crate::tree::MergeTree;

/// χ(v): the maxima of the colours `v` was inserted under, one per up-star.
pub fn leaf_assignment(trace: &BuildTrace) -> BTreeMap<u32, Vec<u32>> {
    trace
        .chosen
        .iter()
        .map(|(v, cols)| (*v, cols.iter().map(|&c| trace.max_of_color[c as usize]).collect()))
        .collect()
}

/// Checks that every leaf of χ(v) lies below `v` and that every child
/// subtree of `v` receives one.
pub fn check_assignment(tree: &MergeTree, chi: &BTreeMap<u32, Vec<u32>>) -> Result<()> {
    let anc = tree.ancestry();
    let children = tree.children_map();
    for (&v, leaves) in chi {
        let kids = children.get(&v).map(|k| k.as_slice()).unwrap_or(&[]);
        let mut hit = vec![false; kids.len()];
        for &l in leaves {
            let Some(i) = kids.iter().position(|&c| c == l || anc.is_ancestor(c, l)) else {
                return invariant(format!("leaf {l} assigned to {v} is not below it"));
            };
            hit[i] = true;
        }
        if hit.iter().any(|h| !h) {
            return invariant(format!("a child subtree of {v} has no assigned leaf"));
        }
    }
    Ok(())
}

fn depth_order(tree: &MergeTree) -> Vec<u32> {
    let children = tree.children_map();
    let mut out = tree.roots();
    let mut i = 0;
    while i < out.len() {
        if let Some(k) = children.get(&out[i]) {
            out.extend_from_slice(k);
        }
        i += 1;
    }
    out
}

/// Preorder index and depth of every node.
fn preorder(tree: &MergeTree) -> (HashMap<u32, usize>, HashMap<u32, usize>) {
    let children = tree.children_map();
    let mut tin = HashMap::new();
    let mut depth = HashMap::new();
    let mut stack: Vec<(u32, usize)> = tree.roots().into_iter().rev().map(|r| (r, 0)).collect();
    while let Some((v, d)) = stack.pop() {
        tin.insert(v, tin.len());
        depth.insert(v, d);
        if let Some(k) = children.get(&v) {
            stack.extend(k.iter().rev().map(|&c| (c, d + 1)));
        }
    }
    (tin, depth)
}

/// |H_v| for every node: the number of proper ancestors u whose χ(u) meets
/// the leaves below `v`. Each u adds one along the union of the paths from
/// its leaves up to, but excluding, u.
pub fn heap_sets(tree: &MergeTree, chi: &BTreeMap<u32, Vec<u32>>) -> HashMap<u32, usize> {
    let parent = tree.parent_map();
    let (tin, depth) = preorder(tree);
    let lca = |mut a: u32, mut b: u32| {
        while depth[&a] > depth[&b] {
            a = parent[&a];
        }
        while depth[&b] > depth[&a] {
            b = parent[&b];
        }
        while a != b {
            a = parent[&a];
            b = parent[&b];
        }
        a
    };
    let mut delta: HashMap<u32, i64> = tree.nodes.iter().map(|&v| (v, 0)).collect();
    for (&u, leaves) in chi {
        let mut ls = leaves.clone();
        ls.sort_by_key(|l| tin[l]);
        ls.dedup();
        for (i, &l) in ls.iter().enumerate() {
            *delta.get_mut(&l).expect("leaf") += 1;
            if i > 0 {
                *delta.get_mut(&lca(ls[i - 1], l)).expect("lca") -= 1;
            }
        }
        *delta.get_mut(&u).expect("node") -= 1;
    }
    for &v in depth_order(tree).iter().rev() {
        if let Some(&p) = parent.get(&v) {
            let d = delta[&v];
            *delta.get_mut(&p).expect("parent") += d;
        }
    }
    delta.into_iter().map(|(v, d)| (v, d.max(0) as usize)).collect()
}

/// Direct evaluation of |H_v| for cross-checking.
pub fn heap_sets_naive(tree: &MergeTree, chi: &BTreeMap<u32, Vec<u32>>) -> HashMap<u32, usize> {
    let anc = tree.ancestry();
    let below = |v: u32, l: u32| v == l || anc.is_ancestor(v, l);
    tree.nodes
        .iter()
        .map(|&v| {
            let n = chi
                .iter()
                .filter(|&(&u, ls)| u != v && anc.is_ancestor(u, v) && ls.iter().any(|&l| below(v, l)))
                .count();
            (v, n)
        })
        .collect()
}

/// Monotone leaf-to-root paths, each listed from its leaf down to its base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    pub paths: Vec<Vec<u32>>,
}

impl PathDecomposition {
    pub fn cost(&self) -> f64 {
        self.paths.iter().map(|p| p.len() as f64 * log_cost(p.len())).sum()
    }

    /// Path index of every node.
    pub fn path_of(&self) -> HashMap<u32, usize> {
        let mut m = HashMap::new();
        for (i, p) in self.paths.iter().enumerate() {
            for &v in p {
                m.insert(v, i);
            }
        }
        m
    }

    /// Parent path of every non-root path: the path holding the parent of
    /// its base.
    pub fn shrub(&self, tree: &MergeTree) -> Vec<Option<usize>> {
        let parent = tree.parent_map();
        let of = self.path_of();
        self.paths
            .iter()
            .map(|p| parent.get(p.last().expect("non-empty path")).map(|b| of[b]))
            .collect()
    }
}

/// P_max: every node continues through its child with the larger |H|, ties
/// going to the lower id.
pub fn max_path_decomposition(tree: &MergeTree, h: &HashMap<u32, usize>) -> PathDecomposition {
    let children = tree.children_map();
    let parent = tree.parent_map();
    let heavy: HashMap<u32, u32> = children
        .iter()
        .map(|(&v, kids)| {
            let best = kids.iter().copied().max_by(|&a, &b| h[&a].cmp(&h[&b]).then(b.cmp(&a))).expect("child");
            (v, best)
        })
        .collect();
    let mut paths = Vec::new();
    for l in tree.leaves() {
        let mut p = vec![l];
        let mut cur = l;
        while let Some(&up) = parent.get(&cur) {
            if heavy[&up] != cur {
                break;
            }
            p.push(up);
            cur = up;
        }
        paths.push(p);
    }
    PathDecomposition { paths }
}

/// Σ_v log2 max(ℓ_v, 2) where ℓ_v counts the nodes of a longest monotone
/// path through v.
pub fn sum_log_longest(tree: &MergeTree) -> f64 {
    let children = tree.children_map();
    let parent = tree.parent_map();
    let order = depth_order(tree);
    let mut up: HashMap<u32, usize> = HashMap::new();
    for &v in &order {
        up.insert(v, parent.get(&v).map_or(1, |p| up[p] + 1));
    }
    let mut down: HashMap<u32, usize> = HashMap::new();
    for &v in order.iter().rev() {
        let d = children.get(&v).map_or(1, |k| 1 + k.iter().map(|c| down[c]).max().unwrap_or(0));
        down.insert(v, d);
    }
    tree.nodes.iter().map(|v| log_cost(up[v] + down[v] - 1)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub t: usize,
    pub heap_cost: f64,
    pub comparisons: u64,
    pub sum_log_hv: f64,
    pub cost_pmax: f64,
    pub sum_log_longest: f64,
    /// heap_cost / (Σ log|H_v| + t)
    pub ratio1: f64,
    /// Σ log|H_v| / (cost(P_max) + t)
    pub ratio2: f64,
    pub c1: f64,
    pub c2: f64,
    pub ok: bool,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "t,N,comparisons,heap_cost,sum_log_Hv,cost_Pmax,ratio1,ratio2,csa_comparisons";

    pub fn csv_row(&self, n: usize, csa_comparisons: u64) -> String {
        format!(
            "{},{n},{},{:.3},{:.3},{:.3},{:.6},{:.6},{csa_comparisons}",
            self.t, self.comparisons, self.heap_cost, self.sum_log_hv, self.cost_pmax, self.ratio1, self.ratio2
        )
    }
}

/// Heap cost against Σ log|H_v| + t, and Σ log|H_v| against cost(P_max) + t.
/// Logs are clamped below at 1, as the heap ledger does.
pub fn verify_bound(tree: &MergeTree, trace: &BuildTrace, c1: f64, c2: f64) -> Result<BoundReport> {
    let chi = leaf_assignment(trace);
    check_assignment(tree, &chi)?;
    let h = heap_sets(tree, &chi);
    let t = tree.nodes.len();
    let sum_log_hv: f64 = tree.nodes.iter().map(|v| log_cost(h[v])).sum();
    let cost_pmax = max_path_decomposition(tree, &h).cost();
    let ratio1 = trace.heap_cost / (sum_log_hv + t as f64);
    let ratio2 = sum_log_hv / (cost_pmax + t as f64);
    Ok(BoundReport {
        t,
        heap_cost: trace.heap_cost,
        comparisons: trace.comparisons,
        sum_log_hv,
        cost_pmax,
        sum_log_longest: sum_log_longest(tree),
        ratio1,
        ratio2,
        c1,
        c2,
        ok: ratio1 <= c1 && ratio2 <= c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::classify_mesh;
    use crate::fixtures;
    use crate::lbgen::{gen_join_family, PathSpec};
    use crate::mesh::ScalarMesh;
    use crate::painted_join::{build, BuildOptions, JoinBuild};

    fn run(m: &ScalarMesh) -> JoinBuild {
        let o = m.height_order();
        build(&classify_mesh(m, &o), &o, BuildOptions::default())
    }

    #[test]
    fn twin_peaks_sets() {
        let b = run(&fixtures::twin_peaks());
        let chi = leaf_assignment(&b.trace);
        check_assignment(&b.tree, &chi).unwrap();
        let mut leaves = chi[&fixtures::TP_S].clone();
        leaves.sort_unstable();
        assert_eq!(leaves, vec![fixtures::TP_P1, fixtures::TP_P2]);
        let h = heap_sets(&b.tree, &chi);
        assert_eq!(h[&fixtures::TP_P1], 2);
        assert_eq!(h[&fixtures::TP_S], 1);
        assert_eq!(h[&fixtures::TP_RING], 0);
    }

    #[test]
    fn fast_sets_match_naive() {
        for seed in 0..30 {
            let (r, c) = fixtures::corpus_dims(seed);
            let b = run(&fixtures::random_grid(r, c, seed));
            let chi = leaf_assignment(&b.trace);
            check_assignment(&b.tree, &chi).unwrap();
            let (f, n) = (heap_sets(&b.tree, &chi), heap_sets_naive(&b.tree, &chi));
            assert_eq!(f, n, "seed {seed}");
        }
    }

    #[test]
    fn pmax_covers_and_ties_low() {
        let tree = MergeTree::new(vec![0, 1, 2, 3], vec![(1, 0), (2, 1), (3, 1)]);
        let h: HashMap<u32, usize> = [(0, 0), (1, 1), (2, 2), (3, 2)].into_iter().collect();
        let p = max_path_decomposition(&tree, &h);
        assert_eq!(p.paths, vec![vec![2, 1, 0], vec![3]]);
        assert_eq!(p.shrub(&tree), vec![None, Some(0)]);
        assert!((p.cost() - (3.0 * 3f64.log2() + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn caterpillar_sets_bounded_by_path() {
        let g = gen_join_family(&PathSpec::single_path(8).with_seed(11)).unwrap();
        let b = run(&g.mesh);
        let chi = leaf_assignment(&b.trace);
        let h = heap_sets(&b.tree, &chi);
        for (&v, &p) in &g.saddle_path {
            assert!(h[&v] <= g.path_len[p]);
        }
        let r = verify_bound(&b.tree, &b.trace, 8.0, 8.0).unwrap();
        assert!(r.ok);
        assert!(r.sum_log_hv <= r.sum_log_longest + 1e-9);
    }
}
