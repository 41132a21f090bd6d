//! Partition of a triangulated terrain into extremum-dominant pieces by
//! raining from an extremum and cutting just above each dry/wet interface.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::ScalarMesh;
use crate::order::HeightOrder;
use crate::union_find::UnionFind;

/// Identity of a piece vertex in the mesh the recursion started from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    Vertex(u32),
    /// Synthetic vertex of cut `cut`; `plus` is the side away from the
    /// rain source (the child piece).
    Cut { cut: u32, plus: bool },
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vertex(v) => write!(f, "v{v}"),
            Label::Cut { cut, plus: true } => write!(f, "c{cut}+"),
            Label::Cut { cut, plus: false } => write!(f, "c{cut}-"),
        }
    }
}

/// One extremum-dominant output piece.
#[derive(Clone, Debug)]
pub struct CutPiece {
    pub mesh: ScalarMesh,
    pub labels: Vec<Label>,
    /// Original face each local face came from.
    pub face_origin: Vec<u32>,
    /// Local node id of the dominant extremum.
    pub dominant: u32,
    /// false: max-dominant (rained downward); true: min-dominant.
    pub inverted: bool,
    pub parent_cut: Option<u32>,
    pub child_cuts: Vec<u32>,
}

impl CutPiece {
    pub fn orientation(&self) -> &'static str {
        if self.inverted {
            "min-dominant"
        } else {
            "max-dominant"
        }
    }

    /// Label of a skeleton node; groups are named by their smallest member.
    pub fn node_label(&self, v: u32) -> Label {
        self.labels[self.mesh.node_of(v) as usize]
    }

    /// Order in which this piece is max-dominant.
    pub fn rain_order(&self) -> HeightOrder {
        HeightOrder::with_inversion(self.mesh.keys().to_vec(), self.inverted)
    }
}

/// A lifted contour that was cut: `parent` holds the minus side, `child`
/// the plus side.
#[derive(Clone, Debug, Serialize)]
pub struct CutRecord {
    pub saddle: Label,
    pub parent: usize,
    pub child: usize,
    pub crossed_faces: usize,
}

#[derive(Clone, Debug)]
pub struct RecursionTree {
    pub pieces: Vec<CutPiece>,
    pub cuts: Vec<CutRecord>,
    /// Cut events per original face.
    pub face_cuts: Vec<u32>,
    pub synthetic_vertices: usize,
    pub comparisons: u64,
    input_size: usize,
}

impl RecursionTree {
    pub fn max_face_cuts(&self) -> u32 {
        self.face_cuts.iter().copied().max().unwrap_or(0)
    }

    pub fn output_size(&self) -> usize {
        self.pieces.iter().map(|p| p.mesh.vertex_count() + p.mesh.face_count()).sum()
    }

    /// Output vertices plus faces over input vertices plus faces.
    pub fn size_ratio(&self) -> f64 {
        self.output_size() as f64 / self.input_size.max(1) as f64
    }

    /// `PIECES` debug dump.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "PIECES {} {}", self.pieces.len(), self.cuts.len());
        for (i, p) in self.pieces.iter().enumerate() {
            let parent = match p.parent_cut {
                Some(c) => format!("c{c}"),
                None => "-".to_string(),
            };
            let _ = write!(
                s,
                "piece {i} {} dominant {} parent {parent} vertices",
                p.orientation(),
                p.node_label(p.dominant)
            );
            for l in &p.labels {
                let _ = write!(s, " {l}");
            }
            s.push('\n');
        }
        for (i, c) in self.cuts.iter().enumerate() {
            let _ = writeln!(
                s,
                "cut {i} saddle {} parent {} child {} faces {}",
                c.saddle, c.parent, c.child, c.crossed_faces
            );
        }
        s
    }
}

/// Binary max-heap of (level, face) whose level comparisons are counted.
struct LevelHeap {
    items: Vec<(u32, u32)>,
}

impl LevelHeap {
    fn greater(order: &HeightOrder, a: u32, b: u32) -> bool {
        a != b && order.compare(a, b) == Ordering::Greater
    }

    fn push(&mut self, item: (u32, u32), order: &HeightOrder) {
        self.items.push(item);
        let mut i = self.items.len() - 1;
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::greater(order, self.items[i].0, self.items[p].0) {
                break;
            }
            self.items.swap(i, p);
            i = p;
        }
    }

    fn pop(&mut self, order: &HeightOrder) -> Option<(u32, u32)> {
        let n = self.items.len();
        if n == 0 {
            return None;
        }
        self.items.swap(0, n - 1);
        let top = self.items.pop();
        let n = self.items.len();
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && Self::greater(order, self.items[l].0, self.items[m].0) {
                m = l;
            }
            if r < n && Self::greater(order, self.items[r].0, self.items[m].0) {
                m = r;
            }
            if m == i {
                break;
            }
            self.items.swap(i, m);
            i = m;
        }
        top
    }
}

fn ekey(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

fn not_below(order: &HeightOrder, a: u32, b: u32) -> bool {
    a == b || order.compare(a, b) != Ordering::Less
}

/// Water level of every face when it rains on `source` (a maximum under
/// `order`): the highest vertex key whose level reaches the face, or `None`
/// for dry faces. The wet part of a face is the part at or below its level.
pub fn wet_levels(mesh: &ScalarMesh, order: &HeightOrder, source: u32) -> Vec<Option<u32>> {
    let nf = mesh.face_count();
    let mut best: Vec<Option<u32>> = vec![None; nf];
    let mut done = vec![false; nf];
    let mut spread = vec![false; mesh.groups().len()];
    let mut heap = LevelHeap { items: Vec::new() };
    let offer = |f: u32, cand: u32, best: &mut Vec<Option<u32>>, heap: &mut LevelHeap| {
        let better = match best[f as usize] {
            None => true,
            Some(cur) => cur != cand && order.compare(cand, cur) == Ordering::Greater,
        };
        if better {
            best[f as usize] = Some(cand);
            heap.push((cand, f), order);
        }
    };
    let members: Vec<u32> = match mesh.group_of(source) {
        Some(g) => {
            spread[g as usize] = true;
            mesh.groups()[g as usize].clone()
        }
        None => vec![source],
    };
    for &m in &members {
        for &f in mesh.vertex_faces(m) {
            offer(f, source, &mut best, &mut heap);
        }
    }
    let mut edge_faces: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (fi, f) in mesh.faces().iter().enumerate() {
        for i in 0..3 {
            edge_faces.entry(ekey(f[i], f[(i + 1) % 3])).or_default().push(fi as u32);
        }
    }
    while let Some((lvl, f)) = heap.pop(order) {
        if done[f as usize] || best[f as usize] != Some(lvl) {
            continue;
        }
        done[f as usize] = true;
        let face = mesh.faces()[f as usize];
        for &g in &face {
            if let Some(gi) = mesh.group_of(g) {
                if !spread[gi as usize] && not_below(order, lvl, g) {
                    spread[gi as usize] = true;
                    let node = mesh.node_of(g);
                    for &m in &mesh.groups()[gi as usize] {
                        for &h in mesh.vertex_faces(m) {
                            if !done[h as usize] {
                                offer(h, node, &mut best, &mut heap);
                            }
                        }
                    }
                }
            }
        }
        for i in 0..3 {
            let (a, b) = (face[i], face[(i + 1) % 3]);
            let (lo, hi) = if not_below(order, a, b) { (b, a) } else { (a, b) };
            if !not_below(order, lvl, lo) {
                continue;
            }
            let cand = if not_below(order, lvl, hi) { hi } else { lvl };
            for &h in &edge_faces[&ekey(a, b)] {
                if h != f && !done[h as usize] {
                    offer(h, cand, &mut best, &mut heap);
                }
            }
        }
    }
    best
}

/// Interface saddles: vertices y with an upper face whose water level is
/// exactly y. Returns (y, a dry upper neighbour w, the face) per saddle.
pub fn interface_saddles(mesh: &ScalarMesh, order: &HeightOrder, levels: &[Option<u32>]) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for y in 0..mesh.vertex_count() as u32 {
        if mesh.group_of(y).is_some() {
            continue;
        }
        for &f in mesh.vertex_faces(y) {
            if levels[f as usize] != Some(y) {
                continue;
            }
            let face = mesh.faces()[f as usize];
            if let Some(&w) = face.iter().find(|&&w| w != y && order.compare(w, y) == Ordering::Greater) {
                out.push((y, w, f));
                break;
            }
        }
    }
    out
}

/// A directed edge `(from, to)`.
pub type Edge = (u32, u32);

/// Crossed faces of the regular contour just above `y`, traced from the
/// edge (y, w) through face `f0`: (face, entry edge, exit edge) in order.
pub fn lift(
    mesh: &ScalarMesh,
    order: &HeightOrder,
    edge_faces: &HashMap<(u32, u32), Vec<u32>>,
    y: u32,
    w: u32,
    f0: u32,
) -> Result<Vec<(u32, Edge, Edge)>> {
    let mut above: HashMap<u32, bool> = HashMap::new();
    let mut is_above = |v: u32| -> bool {
        *above.entry(v).or_insert_with(|| v != y && order.compare(v, y) == Ordering::Greater)
    };
    let e0 = ekey(y, w);
    let mut out = Vec::new();
    let (mut f, mut e) = (f0, e0);
    loop {
        let face = mesh.faces()[f as usize];
        let mut exit = None;
        for i in 0..3 {
            let d = ekey(face[i], face[(i + 1) % 3]);
            if d != e && is_above(d.0) != is_above(d.1) {
                if exit.is_some() {
                    return Err(Error::Invariant(format!("lift above {y} crosses face {f} three times")));
                }
                exit = Some(d);
            }
        }
        let exit = exit.ok_or_else(|| Error::Invariant(format!("lift above {y} dead-ends in face {f}")))?;
        out.push((f, e, exit));
        if exit == e0 {
            break;
        }
        if out.len() > mesh.face_count() {
            return Err(Error::Invariant(format!("lift above {y} does not close")));
        }
        let next = edge_faces[&exit].iter().copied().find(|&h| h != f);
        f = next.ok_or_else(|| Error::Invariant(format!("lift above {y} leaves the surface")))?;
        e = exit;
    }
    Ok(out)
}

struct Work {
    mesh: ScalarMesh,
    labels: Vec<Label>,
    face_origin: Vec<u32>,
    source: u32,
    inverted: bool,
    parent_cut: Option<u32>,
}

/// Rain from the highest node and recurse on dry pieces with flipped
/// direction until every piece is extremum dominant.
pub fn rain(mesh: &ScalarMesh) -> Result<RecursionTree> {
    let order = mesh.height_order();
    let nodes = mesh.nodes();
    let mut top = nodes[0];
    for &v in &nodes[1..] {
        top = order.max_of(v, top);
    }
    let mut tree = RecursionTree {
        pieces: Vec::new(),
        cuts: Vec::new(),
        face_cuts: vec![0; mesh.face_count()],
        synthetic_vertices: 0,
        comparisons: order.count(),
        input_size: mesh.vertex_count() + mesh.face_count(),
    };
    let mut queue = VecDeque::new();
    queue.push_back(Work {
        mesh: mesh.clone(),
        labels: (0..mesh.vertex_count() as u32).map(Label::Vertex).collect(),
        face_origin: (0..mesh.face_count() as u32).collect(),
        source: top,
        inverted: false,
        parent_cut: None,
    });
    while let Some(w) = queue.pop_front() {
        step(w, &mut tree, &mut queue)?;
    }
    Ok(tree)
}

fn step(w: Work, tree: &mut RecursionTree, queue: &mut VecDeque<Work>) -> Result<()> {
    let mesh = &w.mesh;
    let order = HeightOrder::with_inversion(mesh.keys().to_vec(), w.inverted);
    let levels = wet_levels(mesh, &order, w.source);
    let saddles = interface_saddles(mesh, &order, &levels);
    let piece_idx = tree.pieces.len();
    if let Some(c) = w.parent_cut {
        tree.cuts[c as usize].child = piece_idx;
    }
    if saddles.is_empty() {
        tree.comparisons += order.count();
        tree.pieces.push(CutPiece {
            dominant: mesh.node_of(w.source),
            mesh: w.mesh,
            labels: w.labels,
            face_origin: w.face_origin,
            inverted: w.inverted,
            parent_cut: w.parent_cut,
            child_cuts: Vec::new(),
        });
        return Ok(());
    }
    let mut edge_faces: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (fi, f) in mesh.faces().iter().enumerate() {
        for i in 0..3 {
            edge_faces.entry(ekey(f[i], f[(i + 1) % 3])).or_default().push(fi as u32);
        }
    }
    let mut heights = mesh.heights().to_vec();
    let mut keys = mesh.keys().to_vec();
    let mut labels = w.labels.clone();
    let mut face_lift: Vec<Option<(usize, Edge, Edge)>> = vec![None; mesh.face_count()];
    // (lift, edge) -> (plus vertex, minus vertex)
    let mut split: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    let mut cut_ids = Vec::with_capacity(saddles.len());
    let mut plus_groups: Vec<Vec<u32>> = Vec::new();
    let mut minus_groups: Vec<Vec<u32>> = Vec::new();
    let mut child_cuts = Vec::new();
    for (li, &(y, up, f0)) in saddles.iter().enumerate() {
        let crossed = lift(mesh, &order, &edge_faces, y, up, f0)?;
        let cut = tree.cuts.len() as u32;
        tree.cuts.push(CutRecord { saddle: w.labels[y as usize], parent: piece_idx, child: usize::MAX, crossed_faces: crossed.len() });
        cut_ids.push(cut);
        child_cuts.push(cut);
        let (eps_minus, eps_plus) = if w.inverted { (-1, -2) } else { (1, 2) };
        let (mut pg, mut mg) = (Vec::new(), Vec::new());
        for &(f, e_in, _) in &crossed {
            if face_lift[f as usize].is_some() {
                return Err(Error::Invariant(format!("face {f} crossed by two lifts")));
            }
            if split.contains_key(&e_in) {
                return Err(Error::Invariant(format!("edge {e_in:?} crossed twice")));
            }
            let p = heights.len() as u32;
            for (eps, plus) in [(eps_plus, true), (eps_minus, false)] {
                let mut k = keys[y as usize];
                k.eps = eps;
                keys.push(k);
                heights.push(mesh.heights()[y as usize]);
                labels.push(Label::Cut { cut, plus });
            }
            split.insert(e_in, (p, p + 1));
            pg.push(p);
            mg.push(p + 1);
        }
        for &(f, e_in, e_out) in &crossed {
            face_lift[f as usize] = Some((li, e_in, e_out));
        }
        plus_groups.push(pg);
        minus_groups.push(mg);
        tree.synthetic_vertices += 2 * crossed.len();
    }
    let above_of = |v: u32, li: usize| -> bool {
        let y = saddles[li].0;
        v != y && order.compare_uncounted(v, y) == Ordering::Greater
    };
    let mut faces: Vec<[u32; 3]> = Vec::with_capacity(mesh.face_count() + 2 * split.len());
    let mut origin: Vec<u32> = Vec::with_capacity(faces.capacity());
    for (fi, face) in mesh.faces().iter().enumerate() {
        let fo = w.face_origin[fi];
        let Some((li, e1, e2)) = face_lift[fi] else {
            faces.push(*face);
            origin.push(fo);
            continue;
        };
        tree.face_cuts[fo as usize] += 1;
        let lone = if e1.0 == e2.0 || e1.0 == e2.1 { e1.0 } else { e1.1 };
        let o1 = if e1.0 == lone { e1.1 } else { e1.0 };
        let o2 = if e2.0 == lone { e2.1 } else { e2.0 };
        let (p1, m1) = split[&e1];
        let (p2, m2) = split[&e2];
        let (tri, quad) = if above_of(lone, li) {
            ([lone, p1, p2], [o1, o2, m2, m1])
        } else {
            ([lone, m1, m2], [o1, o2, p2, p1])
        };
        faces.push(tri);
        origin.push(fo);
        let i = if quad[2] < quad[3] { 2 } else { 3 };
        faces.push([quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]]);
        faces.push([quad[i], quad[(i + 2) % 4], quad[(i + 3) % 4]]);
        origin.push(fo);
        origin.push(fo);
    }
    let total = heights.len();
    let mut uf = UnionFind::new(total);
    for f in &faces {
        uf.union(f[0], f[1]);
        uf.union(f[1], f[2]);
    }
    let mut comp_index: HashMap<u32, usize> = HashMap::new();
    let mut comp_vertices: Vec<Vec<u32>> = Vec::new();
    for v in 0..total as u32 {
        let r = uf.find(v);
        let c = *comp_index.entry(r).or_insert_with(|| {
            comp_vertices.push(Vec::new());
            comp_vertices.len() - 1
        });
        comp_vertices[c].push(v);
    }
    if comp_vertices.len() != saddles.len() + 1 {
        return Err(Error::Invariant(format!(
            "{} cuts produced {} pieces",
            saddles.len(),
            comp_vertices.len()
        )));
    }
    let wet = comp_index[&uf.find(w.source)];
    let mut local = vec![u32::MAX; total];
    for vs in &comp_vertices {
        for (i, &v) in vs.iter().enumerate() {
            local[v as usize] = i as u32;
        }
    }
    let mut comp_faces: Vec<Vec<[u32; 3]>> = vec![Vec::new(); comp_vertices.len()];
    let mut comp_origin: Vec<Vec<u32>> = vec![Vec::new(); comp_vertices.len()];
    for (f, &o) in faces.iter().zip(&origin) {
        let c = comp_index[&uf.find(f[0])];
        comp_faces[c].push([local[f[0] as usize], local[f[1] as usize], local[f[2] as usize]]);
        comp_origin[c].push(o);
    }
    let mut comp_groups: Vec<Vec<Vec<u32>>> = vec![Vec::new(); comp_vertices.len()];
    let mut place = |g: &[u32], expect: Option<usize>| -> Result<usize> {
        let c = comp_index[&uf.find(g[0])];
        if g.iter().any(|&v| comp_index[&uf.find(v)] != c) || expect.is_some_and(|e| e != c) {
            return Err(Error::Invariant("boundary group split across pieces".into()));
        }
        comp_groups[c].push(g.iter().map(|&v| local[v as usize]).collect());
        Ok(c)
    };
    for g in mesh.groups() {
        place(g, None)?;
    }
    let mut dry_of_comp: HashMap<usize, (usize, u32)> = HashMap::new();
    for li in 0..saddles.len() {
        place(&minus_groups[li], Some(wet))?;
        let c = place(&plus_groups[li], None)?;
        if c == wet || dry_of_comp.insert(c, (li, plus_groups[li][0])).is_some() {
            return Err(Error::Invariant("cut does not separate a dry piece".into()));
        }
    }
    let mut built: Vec<Option<Work>> = Vec::with_capacity(comp_vertices.len());
    for (c, vs) in comp_vertices.iter().enumerate() {
        let h: Vec<f64> = vs.iter().map(|&v| heights[v as usize]).collect();
        let k = vs.iter().map(|&v| keys[v as usize]).collect();
        let l: Vec<Label> = vs.iter().map(|&v| labels[v as usize]).collect();
        let pm = ScalarMesh::with_keys(h, k, std::mem::take(&mut comp_faces[c]), std::mem::take(&mut comp_groups[c]))
            .map_err(|e| Error::Invariant(format!("cut produced an invalid piece: {e}")))?;
        let (source, inverted, parent_cut) = if c == wet {
            (local[w.source as usize], w.inverted, w.parent_cut)
        } else {
            let (li, pv) = dry_of_comp[&c];
            (local[pv as usize], !w.inverted, Some(cut_ids[li]))
        };
        built.push(Some(Work {
            source: pm.node_of(source),
            mesh: pm,
            labels: l,
            face_origin: std::mem::take(&mut comp_origin[c]),
            inverted,
            parent_cut,
        }));
    }
    tree.comparisons += order.count();
    let wet_work = built[wet].take().expect("wet piece");
    tree.pieces.push(CutPiece {
        dominant: wet_work.source,
        mesh: wet_work.mesh,
        labels: wet_work.labels,
        face_origin: wet_work.face_origin,
        inverted: wet_work.inverted,
        parent_cut: wet_work.parent_cut,
        child_cuts,
    });
    let mut dry: Vec<Work> = built.into_iter().flatten().collect();
    dry.sort_by_key(|d| d.parent_cut);
    queue.extend(dry);
    Ok(())
}

/// Every vertex outside the non-dominant extremal groups is reachable from
/// the dominant extremum by a path that never rises (in the piece's rain
/// orientation).
pub fn is_extremum_dominant(p: &CutPiece) -> bool {
    let m = &p.mesh;
    let order = p.rain_order();
    let n = m.vertex_count();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let start: Vec<u32> = match m.group_of(p.dominant) {
        Some(g) => m.groups()[g as usize].clone(),
        None => vec![p.dominant],
    };
    for v in start {
        seen[v as usize] = true;
        stack.push(v);
    }
    while let Some(v) = stack.pop() {
        let mut next: Vec<u32> = m
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| order.compare_uncounted(w, v) != Ordering::Greater)
            .collect();
        if let Some(g) = m.group_of(v) {
            next.extend(m.groups()[g as usize].iter().copied());
        }
        for w in next {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    (0..n as u32).all(|v| {
        if seen[v as usize] {
            return true;
        }
        // only other maxima may stay unreached
        let node = m.node_of(v);
        node != m.node_of(p.dominant)
            && m.neighbors(v)
                .iter()
                .all(|&w| m.node_of(w) == node || order.compare_uncounted(w, v) == Ordering::Less)
    })
}
