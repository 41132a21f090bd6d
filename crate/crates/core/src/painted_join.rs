use std::collections::VecDeque;

use crate::critical::{Kind, Skeleton};
use crate::heap::{HeapForest, HeapHandle, HeapOp};
use crate::order::HeightOrder;
use crate::tree::MergeTree;
use crate::union_find::UnionFind;

const NONE: u32 = u32::MAX;

/// Edge colouring of a skeleton: colour `c` belongs to maximum `max_of_color[c]`.
#[derive(Clone, Debug)]
pub struct Painting {
    pub edge_color: Vec<Vec<u32>>,
    pub max_of_color: Vec<u32>,
}

impl Painting {
    pub fn color(&self, s: &Skeleton, v: u32, w: u32) -> u32 {
        let k = s.adj[v as usize].binary_search(&w).expect("adjacent");
        self.edge_color[v as usize][k]
    }
}

/// Descending multi-source BFS from the maxima in id order; every edge takes
/// the colour of its upper endpoint's first arrival. No comparisons: the
/// skeleton's edge orientation is reused.
pub fn initial_painting(s: &Skeleton) -> Painting {
    let n = s.id_space();
    let maxima = s.maxima();
    let mut edge_color: Vec<Vec<u32>> = s.adj.iter().map(|a| vec![NONE; a.len()]).collect();
    let mut vcolor = vec![NONE; n];
    let mut queue = VecDeque::new();
    for (c, &m) in maxima.iter().enumerate() {
        vcolor[m as usize] = c as u32;
        queue.push_back(m);
    }
    while let Some(u) = queue.pop_front() {
        let c = vcolor[u as usize];
        let ui = u as usize;
        for k in 0..s.adj[ui].len() {
            if s.higher[ui][k] || edge_color[ui][k] != NONE {
                continue;
            }
            let w = s.adj[ui][k];
            edge_color[ui][k] = c;
            let j = s.adj[w as usize].binary_search(&u).expect("symmetric");
            edge_color[w as usize][j] = c;
            if vcolor[w as usize] == NONE {
                vcolor[w as usize] = c;
                queue.push_back(w);
            }
        }
    }
    Painting { edge_color, max_of_color: maxima }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Record every comparison made while the heaps run.
    pub log_comparisons: bool,
    /// Snapshot heap contents at every merge and delete.
    pub audit_heaps: bool,
    /// Record the heap-op ledger entries.
    pub log_heap_ops: bool,
    /// Check ripeness against all touching colours, not only the chosen ones.
    pub audit_ripeness: bool,
}

impl BuildOptions {
    pub fn all() -> Self {
        BuildOptions { log_comparisons: true, audit_heaps: true, log_heap_ops: true, audit_ripeness: true }
    }
}

/// Everything the analytics need from one build.
#[derive(Clone, Debug, Default)]
pub struct BuildTrace {
    /// (vertex, initial colours it was inserted under), in insertion order.
    pub chosen: Vec<(u32, Vec<u32>)>,
    pub max_of_color: Vec<u32>,
    pub comparisons: u64,
    pub heap_cost: f64,
    pub inserts: u64,
    pub merges: u64,
    pub deletes: u64,
    pub pushes: u64,
    pub processed_order: Vec<u32>,
    pub comparison_log: Vec<(u32, u32)>,
    pub heap_snapshots: Vec<Vec<u32>>,
    pub heap_ops: Vec<HeapOp>,
    pub ripeness_violations: u64,
    pub stack_violations: u64,
    pub critical_count: usize,
}

#[derive(Clone, Debug)]
pub struct JoinBuild {
    pub tree: MergeTree,
    pub trace: BuildTrace,
}

struct State<'a> {
    s: &'a Skeleton,
    order: &'a HeightOrder,
    opts: BuildOptions,
    painting: Painting,
    uf: UnionFind,
    heaps: Vec<HeapHandle>,
    att: Vec<u32>,
    forest: HeapForest,
    chosen: Vec<Vec<u32>>,
    processed: Vec<bool>,
    stack: Vec<u32>,
    edges: Vec<(u32, u32)>,
    trace: BuildTrace,
}

impl<'a> State<'a> {
    fn snapshot(&mut self, h: &HeapHandle) {
        if self.opts.audit_heaps {
            let items = self.forest.items(h);
            self.trace.heap_snapshots.push(items);
        }
    }

    fn ripe_blocker(&mut self, h: u32) -> Option<u32> {
        for k in 0..self.chosen[h as usize].len() {
            let c = self.chosen[h as usize][k];
            let r = self.uf.find(c);
            let top = self.forest.peek_max(&self.heaps[r as usize]).expect("h is still queued");
            if top != h {
                return Some(top);
            }
        }
        None
    }

    /// Push until the head of the stack is ripe; returns it.
    fn update(&mut self, worklist: &mut impl Iterator<Item = u32>) -> Option<u32> {
        if self.stack.is_empty() {
            let next = worklist.find(|&v| !self.processed[v as usize])?;
            self.stack.push(next);
            self.trace.pushes += 1;
        }
        loop {
            let h = *self.stack.last().expect("non-empty");
            match self.ripe_blocker(h) {
                None => return Some(h),
                Some(top) => {
                    if self.opts.audit_ripeness && self.order.compare_uncounted(top, h).is_le() {
                        self.trace.stack_violations += 1;
                    }
                    self.stack.push(top);
                    self.trace.pushes += 1;
                }
            }
        }
    }

    fn process(&mut self, h: u32) {
        let mut reps: Vec<u32> = self.chosen[h as usize].iter().map(|&c| self.uf.find(c)).collect();
        reps.sort_unstable();
        reps.dedup();
        if self.opts.audit_ripeness {
            let s = self.s;
            for star in &s.up_stars[h as usize] {
                for &w in star {
                    let c = self.painting.color(s, h, w);
                    let r = self.uf.find(c);
                    if !reps.contains(&r) {
                        self.trace.ripeness_violations += 1;
                    }
                }
            }
        }
        let mut merged = HeapHandle::EMPTY;
        for &r in &reps {
            self.edges.push((self.att[r as usize], h));
            let mut heap = std::mem::take(&mut self.heaps[r as usize]);
            while self.forest.peek_max(&heap) == Some(h) {
                self.snapshot(&heap);
                self.forest.delete_max(&mut heap, self.order);
            }
            if !merged.is_empty() && !heap.is_empty() {
                let m = self.forest.merge(merged, heap, self.order);
                self.snapshot(&m);
                merged = m;
            } else if merged.is_empty() {
                merged = heap;
            }
        }
        let mut root = reps[0];
        for &r in &reps[1..] {
            root = self.uf.union(root, r);
        }
        for &r in &reps {
            self.heaps[r as usize] = HeapHandle::EMPTY;
        }
        self.heaps[root as usize] = merged;
        self.att[root as usize] = h;
        self.processed[h as usize] = true;
        self.trace.processed_order.push(h);
    }
}

/// Join tree of the skeleton under `order` by paint spilling. The skeleton's
/// edge orientation must agree with `order`.
pub fn build(s: &Skeleton, order: &HeightOrder, opts: BuildOptions) -> JoinBuild {
    let painting = initial_painting(s);
    let ncol = painting.max_of_color.len();
    let n = s.id_space();
    let start = order.count();
    if opts.log_comparisons {
        order.enable_log();
    }
    let mut st = State {
        s,
        order,
        opts,
        uf: UnionFind::new(ncol),
        heaps: vec![HeapHandle::EMPTY; ncol],
        att: painting.max_of_color.clone(),
        forest: HeapForest::new(),
        chosen: vec![Vec::new(); n],
        processed: vec![false; n],
        stack: Vec::new(),
        edges: Vec::new(),
        trace: BuildTrace { max_of_color: painting.max_of_color.clone(), ..Default::default() },
        painting,
    };
    if opts.log_heap_ops {
        st.forest.enable_log();
    }
    let critical: Vec<u32> = s.critical();
    st.trace.critical_count = critical.len();
    let work: Vec<u32> =
        critical.iter().copied().filter(|&v| s.class[v as usize].kind != Kind::Maximum).collect();
    for &v in &critical {
        if s.class[v as usize].kind == Kind::Maximum {
            st.processed[v as usize] = true;
        }
    }
    for &v in &work {
        let mut cols: Vec<u32> = s.up_stars[v as usize]
            .iter()
            .map(|star| st.painting.color(s, v, star[0]))
            .collect();
        cols.sort_unstable();
        cols.dedup();
        for &c in &cols {
            let mut h = st.heaps[c as usize];
            st.forest.insert(&mut h, v, order);
            st.heaps[c as usize] = h;
        }
        st.trace.chosen.push((v, cols.clone()));
        st.chosen[v as usize] = cols;
    }
    let mut worklist = work.clone().into_iter();
    while let Some(h) = st.update(&mut worklist) {
        st.process(h);
        st.stack.pop();
    }
    let mut nodes = critical;
    nodes.sort_unstable();
    let tree = MergeTree::new(nodes, st.edges);
    let mut trace = st.trace;
    trace.comparisons = order.count() - start;
    trace.heap_cost = st.forest.cost;
    trace.inserts = st.forest.inserts;
    trace.merges = st.forest.merges;
    trace.deletes = st.forest.deletes;
    if opts.log_heap_ops {
        trace.heap_ops = st.forest.take_log();
    }
    if opts.log_comparisons {
        trace.comparison_log = order.take_log();
    }
    JoinBuild { tree, trace }
}

/// Split tree: the join tree of the height-inverted input. Edges are
/// (child, parent) with parents higher.
pub fn split_tree(s: &Skeleton, order: &HeightOrder, opts: BuildOptions) -> JoinBuild {
    let inv = s.inverted();
    let inv_order = HeightOrder::with_inversion(order.keys().to_vec(), !order.inverted());
    let b = build(&inv, &inv_order, opts);
    order.add_count(inv_order.count());
    b
}

/// Post-hoc audit: every logged comparison relates an ancestor and a
/// descendant of the tree. Returns the offending pairs.
pub fn locality_violations(tree: &MergeTree, log: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let a = tree.ancestry();
    log.iter().copied().filter(|&(u, v)| u != v && !a.related(u, v)).collect()
}

/// Post-hoc audit: every heap snapshot lies on one leaf-to-root path.
pub fn heap_path_violations(tree: &MergeTree, snapshots: &[Vec<u32>]) -> usize {
    let a = tree.ancestry();
    let mut bad = 0;
    for snap in snapshots {
        if snap.is_empty() {
            continue;
        }
        // the deepest element is the one every other element is an ancestor of
        let mut deepest = snap[0];
        for &x in &snap[1..] {
            if a.is_ancestor(deepest, x) {
                deepest = x;
            }
        }
        if !snap.iter().all(|&x| a.is_ancestor(x, deepest)) {
            bad += 1;
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::classify_mesh;
    use crate::fixtures;

    #[test]
    fn cone_single_edge() {
        let m = fixtures::cone();
        let o = m.height_order();
        let s = classify_mesh(&m, &o);
        let p = initial_painting(&s);
        assert_eq!(p.max_of_color, vec![0]);
        assert!(p.edge_color.iter().flatten().all(|&c| c == 0));
        let b = build(&s, &o, BuildOptions::all());
        assert_eq!(b.tree.edges, vec![(0, 1)]);
    }

    #[test]
    fn twin_peaks_join() {
        let m = fixtures::twin_peaks();
        let o = m.height_order();
        let s = classify_mesh(&m, &o);
        let b = build(&s, &o, BuildOptions::all());
        let (p1, p2, sd, ring) = (fixtures::TP_P1, fixtures::TP_P2, fixtures::TP_S, fixtures::TP_RING);
        assert_eq!(b.tree.edges, {
            let mut e = vec![(p1, sd), (p2, sd), (sd, ring)];
            e.sort();
            e
        });
        assert_eq!(b.trace.chosen[0].0, sd);
        assert_eq!(b.trace.chosen[0].1.len(), 2);
        assert_eq!(b.trace.processed_order[0], sd);
        assert_eq!(b.trace.ripeness_violations, 0);
        assert!(locality_violations(&b.tree, &b.trace.comparison_log).is_empty());
    }

    #[test]
    fn crater_split_tree() {
        let m = fixtures::crater();
        let o = m.height_order();
        let s = classify_mesh(&m, &o);
        let b = split_tree(&s, &o, BuildOptions::default());
        let cm = b.tree.children_map();
        // rim saddle r1 has the pit and the outer ring below it
        let kids = &cm[&fixtures::CR_R1];
        assert_eq!(kids, &vec![fixtures::CR_PIT, fixtures::CR_RING]);
    }
}
