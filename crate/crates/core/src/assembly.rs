//! Per-piece contour trees from join trees, glued back along the cuts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::critical::{classify_mesh, unfold_multisaddles, Kind, Skeleton};
use crate::error::{Error, Result};
use crate::mesh::ScalarMesh;
use crate::order::HeightOrder;
use crate::painted_join::{build, BuildOptions, JoinBuild};
use crate::rain::{rain, Label, RecursionTree};
use crate::tree::{ContourTree, MergeTree};

/// Contour tree of a minimum-dominant piece from its join tree: each
/// non-dominant minimum m is lifted off the edge below its split s and
/// re-attached as a pendant (s, m). Edges are (higher, lower).
pub fn contour_tree_of_piece(s: &Skeleton, join: &MergeTree) -> Result<ContourTree> {
    let roots = join.roots();
    if roots.len() != 1 {
        return Err(Error::Invariant(format!("join tree has {} roots", roots.len())));
    }
    let root = roots[0];
    let mut parent = join.parent_map();
    let mut children = join.children_map();
    let minima: BTreeSet<u32> =
        join.nodes.iter().copied().filter(|&v| v != root && s.class[v as usize].kind == Kind::Minimum).collect();
    let mut pendants = Vec::new();
    for &m in &minima {
        let kids = children.remove(&m).unwrap_or_default();
        let [split] = kids[..] else {
            return Err(Error::Invariant(format!("non-dominant minimum {m} has {} children", kids.len())));
        };
        if minima.contains(&split) {
            return Err(Error::Invariant(format!("non-dominant minimum {m} sits below minimum {split}")));
        }
        let p = parent.remove(&m).ok_or_else(|| Error::Invariant(format!("minimum {m} has no parent")))?;
        parent.insert(split, p);
        let pk = children.get_mut(&p).expect("parent has children");
        for c in pk.iter_mut() {
            if *c == m {
                *c = split;
            }
        }
        pendants.push((split, m));
    }
    let mut edges: Vec<(u32, u32)> = parent.into_iter().collect();
    edges.extend(pendants);
    Ok(ContourTree::new(join.nodes.clone(), edges))
}

/// Aggregated pipeline counters.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Counters {
    /// Comparisons made by the join-tree builds (heap operations).
    pub comparisons: u64,
    /// Comparisons made locally: edge orientation and raining.
    pub local_comparisons: u64,
    pub heap_cost: f64,
    pub inserts: u64,
    pub merges: u64,
    pub deletes: u64,
    /// Critical points in the output tree.
    pub t: usize,
    pub vertices: usize,
    /// Face count of the input.
    pub faces: usize,
    pub pieces: usize,
    pub cuts: usize,
    pub synthetic_vertices: usize,
    pub max_face_cuts: u32,
    pub size_ratio: f64,
    pub unfolded_copies: usize,
}

#[derive(Clone, Debug)]
pub struct PieceBuild {
    pub skeleton: Skeleton,
    pub build: JoinBuild,
    /// True when the join tree was built on heights negated.
    pub inverted: bool,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub tree: ContourTree,
    pub rain: RecursionTree,
    pub builds: Vec<PieceBuild>,
    pub counters: Counters,
    /// Contracted multi-saddles whose degree exceeds 3.
    pub high_degree: Vec<u32>,
}

/// Replace each cut's two boundary leaves by one edge between their
/// neighbours. `edges` are (higher, lower) over labels.
pub fn surgery_glue(rt: &RecursionTree, edges: Vec<(Label, Label)>) -> Result<Vec<(Label, Label)>> {
    let mut adj: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    let mut dir: HashMap<(Label, Label), bool> = HashMap::new();
    for &(a, b) in &edges {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
        dir.insert((a, b), true);
    }
    for (c, rec) in rt.cuts.iter().enumerate() {
        let a = Label::Cut { cut: c as u32, plus: false };
        let b = Label::Cut { cut: c as u32, plus: true };
        let leaf = |adj: &BTreeMap<Label, BTreeSet<Label>>, x: Label| -> Result<Label> {
            match adj.get(&x) {
                Some(n) if n.len() == 1 => Ok(*n.iter().next().expect("one")),
                _ => Err(Error::Invariant(format!("cut boundary {x} is not a leaf"))),
            }
        };
        let a2 = leaf(&adj, a)?;
        let b2 = leaf(&adj, b)?;
        for (x, y) in [(a, a2), (b, b2)] {
            adj.remove(&x);
            adj.get_mut(&y).expect("neighbour").remove(&x);
            dir.remove(&(x, y));
            dir.remove(&(y, x));
        }
        adj.entry(a2).or_default().insert(b2);
        adj.entry(b2).or_default().insert(a2);
        // the child side lies above in the parent piece's rain direction
        if rt.pieces[rec.parent].inverted {
            dir.insert((a2, b2), true);
        } else {
            dir.insert((b2, a2), true);
        }
    }
    let mut out: Vec<(Label, Label)> = dir.into_keys().collect();
    out.sort();
    Ok(out)
}

/// Full pipeline: unfold, rain, per-piece painted join trees, join-to-contour
/// conversion, gluing, and contraction of unfolded copies.
pub fn compute_contour_tree(mesh: &ScalarMesh, opts: BuildOptions) -> Result<PipelineOutput> {
    let unf = unfold_multisaddles(mesh)?;
    let rt = rain(&unf.mesh)?;
    let mut counters = Counters {
        vertices: mesh.vertex_count(),
        faces: mesh.face_count(),
        pieces: rt.pieces.len(),
        cuts: rt.cuts.len(),
        synthetic_vertices: rt.synthetic_vertices,
        max_face_cuts: rt.max_face_cuts(),
        size_ratio: rt.size_ratio(),
        unfolded_copies: unf.copies,
        local_comparisons: rt.comparisons,
        ..Default::default()
    };
    let mut builds = Vec::with_capacity(rt.pieces.len());
    let mut labelled: Vec<(Label, Label)> = Vec::new();
    let mut lone: Option<Label> = None;
    for p in &rt.pieces {
        let inverted = !p.inverted;
        let order = HeightOrder::with_inversion(p.mesh.keys().to_vec(), inverted);
        let s = classify_mesh(&p.mesh, &order);
        counters.local_comparisons += order.count();
        let b = build(&s, &order, opts);
        counters.comparisons += b.trace.comparisons;
        counters.heap_cost += b.trace.heap_cost;
        counters.inserts += b.trace.inserts;
        counters.merges += b.trace.merges;
        counters.deletes += b.trace.deletes;
        let ct = contour_tree_of_piece(&s, &b.tree)?;
        for &(hi, lo) in &ct.edges {
            let (hi, lo) = if inverted { (lo, hi) } else { (hi, lo) };
            labelled.push((p.node_label(hi), p.node_label(lo)));
        }
        if ct.edges.is_empty() {
            lone = ct.nodes.first().map(|&v| p.node_label(v));
        }
        builds.push(PieceBuild { skeleton: s, build: b, inverted });
    }
    let glued = surgery_glue(&rt, labelled)?;
    let vid = |l: Label| -> Result<u32> {
        match l {
            Label::Vertex(v) => Ok(unf.origin[v as usize]),
            other => Err(Error::Invariant(format!("synthetic node {other} survived gluing"))),
        }
    };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (a, b) in glued {
        let (a, b) = (vid(a)?, vid(b)?);
        nodes.push(a);
        nodes.push(b);
        if a != b {
            edges.push((a, b));
        }
    }
    if nodes.is_empty() {
        if let Some(l) = lone {
            nodes.push(vid(l)?);
        }
    }
    let tree = ContourTree::new(nodes, edges);
    tree.check_tree()?;
    counters.t = tree.nodes.len();
    let high_degree = tree.high_degree_nodes();
    Ok(PipelineOutput { tree, rain: rt, builds, counters, high_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::sweep_oracle;
    use crate::fixtures;

    fn paper(m: &ScalarMesh) -> ContourTree {
        compute_contour_tree(m, BuildOptions::default()).unwrap().tree
    }

    #[test]
    fn fixtures_match_oracle() {
        for m in [fixtures::cone(), fixtures::twin_peaks(), fixtures::crater(), fixtures::staircase(4)] {
            assert_eq!(paper(&m), sweep_oracle(&m).unwrap());
        }
    }

    #[test]
    fn twin_peaks_glued() {
        let (p1, p2, s, r) = (fixtures::TP_P1, fixtures::TP_P2, fixtures::TP_S, fixtures::TP_RING);
        let t = paper(&fixtures::twin_peaks());
        assert_eq!(t, ContourTree::new(vec![p1, p2, s, r], vec![(p1, s), (p2, s), (s, r)]));
    }

    #[test]
    fn wet_piece_reattaches_boundary() {
        // wet piece of twin peaks: the cut minimum hangs off s
        let out = compute_contour_tree(&fixtures::twin_peaks(), BuildOptions::default()).unwrap();
        let pb = &out.builds[0];
        let ct = contour_tree_of_piece(&pb.skeleton, &pb.build.tree).unwrap();
        let p = &out.rain.pieces[0];
        let labels: Vec<(Label, Label)> =
            ct.edges.iter().map(|&(a, b)| (p.node_label(a), p.node_label(b))).collect();
        let cut = Label::Cut { cut: 0, plus: false };
        let s = Label::Vertex(fixtures::TP_S);
        assert!(labels.contains(&(s, cut)));
    }

    #[test]
    fn monkey_saddle_contracts() {
        let m = fixtures::monkey_saddle();
        let out = compute_contour_tree(&m, BuildOptions::default()).unwrap();
        assert_eq!(out.tree, sweep_oracle(&m).unwrap());
        assert_eq!(out.high_degree, vec![0]);
    }

    #[test]
    fn random_grids_match_oracle() {
        for seed in 0..40 {
            let (r, c) = fixtures::corpus_dims(seed);
            let m = fixtures::random_grid(r, c, seed);
            assert_eq!(paper(&m), sweep_oracle(&m).unwrap(), "seed {seed}");
        }
    }
}
