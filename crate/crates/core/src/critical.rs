use serde::Serialize;

use crate::error::{invariant, Error, Result};
use crate::mesh::{GraphInput, ScalarMesh};
use crate::order::{HeightOrder, OrderKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Regular,
    Maximum,
    Minimum,
    Saddle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexClass {
    pub vertex: u32,
    pub morse_up: u32,
    pub morse_down: u32,
    pub kind: Kind,
}

impl VertexClass {
    fn from_counts(vertex: u32, up: u32, down: u32) -> Self {
        let kind = match (up, down) {
            (0, _) => Kind::Maximum,
            (_, 0) => Kind::Minimum,
            (1, 1) => Kind::Regular,
            _ => Kind::Saddle,
        };
        VertexClass { vertex, morse_up: up, morse_down: down, kind }
    }
}

/// 1-skeleton over nodes (boundary groups contracted to their smallest
/// member) with oriented edges and per-node up-/down-stars.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub nodes: Vec<u32>,
    pub adj: Vec<Vec<u32>>,
    pub higher: Vec<Vec<bool>>,
    pub up_stars: Vec<Vec<Vec<u32>>>,
    pub down_stars: Vec<Vec<Vec<u32>>>,
    pub class: Vec<VertexClass>,
    pub is_node: Vec<bool>,
}

impl Skeleton {
    pub fn id_space(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn is_critical(&self, v: u32) -> bool {
        self.is_node[v as usize] && self.class[v as usize].kind != Kind::Regular
    }

    pub fn maxima(&self) -> Vec<u32> {
        self.nodes.iter().copied().filter(|&v| self.class[v as usize].kind == Kind::Maximum).collect()
    }

    pub fn minima(&self) -> Vec<u32> {
        self.nodes.iter().copied().filter(|&v| self.class[v as usize].kind == Kind::Minimum).collect()
    }

    pub fn critical(&self) -> Vec<u32> {
        self.nodes.iter().copied().filter(|&v| self.is_critical(v)).collect()
    }

    /// Same skeleton seen with heights negated. No comparisons.
    pub fn inverted(&self) -> Skeleton {
        let mut s = self.clone();
        for h in s.higher.iter_mut() {
            for b in h.iter_mut() {
                *b = !*b;
            }
        }
        std::mem::swap(&mut s.up_stars, &mut s.down_stars);
        for c in s.class.iter_mut() {
            *c = VertexClass::from_counts(c.vertex, c.morse_down, c.morse_up);
        }
        s
    }

    /// Higher neighbours of `v` according to the stored edge orientation.
    pub fn up_neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let i = v as usize;
        self.adj[i].iter().zip(&self.higher[i]).filter(|(_, &h)| h).map(|(&w, _)| w)
    }

    pub fn down_neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let i = v as usize;
        self.adj[i].iter().zip(&self.higher[i]).filter(|(_, &h)| !h).map(|(&w, _)| w)
    }

    pub fn is_higher(&self, v: u32, w: u32) -> bool {
        let i = v as usize;
        let k = self.adj[i].binary_search(&w).expect("adjacent");
        self.higher[i][k]
    }
}

fn orient(adj: &[Vec<u32>], nodes: &[u32], order: &HeightOrder) -> Vec<Vec<bool>> {
    let mut higher: Vec<Vec<bool>> = adj.iter().map(|a| vec![false; a.len()]).collect();
    for &v in nodes {
        for (k, &w) in adj[v as usize].iter().enumerate() {
            if w < v {
                continue;
            }
            let up = order.higher(w, v);
            higher[v as usize][k] = up;
            let j = adj[w as usize].binary_search(&v).expect("symmetric adjacency");
            higher[w as usize][j] = !up;
        }
    }
    higher
}

fn merge_sharing(mut sets: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    for s in sets.iter_mut() {
        s.sort_unstable();
        s.dedup();
    }
    let mut changed = true;
    while changed {
        changed = false;
        'outer: for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i].iter().any(|x| sets[j].binary_search(x).is_ok()) {
                    let b = sets.remove(j);
                    sets[i].extend(b);
                    sets[i].sort_unstable();
                    sets[i].dedup();
                    changed = true;
                    break 'outer;
                }
            }
        }
    }
    sets.sort();
    sets
}

/// Maximal runs of `up == want` in a cyclic (or open) sequence.
fn arcs(seq: &[(u32, bool)], closed: bool, want: bool) -> Vec<Vec<u32>> {
    let n = seq.len();
    let mut out: Vec<Vec<u32>> = Vec::new();
    if n == 0 {
        return out;
    }
    let start = if closed {
        match (0..n).find(|&i| seq[i].1 != want) {
            None => return vec![seq.iter().map(|x| x.0).collect()],
            Some(i) => i,
        }
    } else {
        0
    };
    let mut cur: Vec<u32> = Vec::new();
    for k in 0..n {
        let (w, up) = seq[(start + k) % n];
        if up == want {
            cur.push(w);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Local Morse degrees of an interior vertex from its cyclic link.
pub fn link_components(mesh: &ScalarMesh, order: &HeightOrder, v: u32) -> (u32, u32) {
    let link = mesh.link(v);
    let seq: Vec<(u32, bool)> = link.verts.iter().map(|&w| (w, order.higher(w, v))).collect();
    (arcs(&seq, link.closed, true).len() as u32, arcs(&seq, link.closed, false).len() as u32)
}

/// Classify every node of a triangulated mesh. Each skeleton edge is compared
/// exactly once.
pub fn classify_mesh(mesh: &ScalarMesh, order: &HeightOrder) -> Skeleton {
    let n = mesh.vertex_count();
    let nodes = mesh.nodes();
    let mut is_node = vec![false; n];
    for &v in &nodes {
        is_node[v as usize] = true;
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n as u32 {
        let a = mesh.node_of(v);
        for &w in mesh.neighbors(v) {
            let b = mesh.node_of(w);
            if a != b {
                adj[a as usize].push(b);
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let higher = orient(&adj, &nodes, order);
    let mut up_stars = vec![Vec::new(); n];
    let mut down_stars = vec![Vec::new(); n];
    let mut class: Vec<VertexClass> = (0..n as u32).map(|v| VertexClass::from_counts(v, 1, 1)).collect();
    for &v in &nodes {
        let i = v as usize;
        let up_of = |w: u32| {
            let k = adj[i].binary_search(&w).expect("node neighbour");
            higher[i][k]
        };
        if mesh.group_of(v).is_some() {
            let all: Vec<u32> = adj[i].clone();
            if all.is_empty() {
                continue;
            }
            if up_of(all[0]) {
                up_stars[i] = vec![all];
                class[i] = VertexClass::from_counts(v, 1, 0);
            } else {
                down_stars[i] = vec![all];
                class[i] = VertexClass::from_counts(v, 0, 1);
            }
            continue;
        }
        let link = mesh.link(v);
        let mut seq: Vec<(u32, bool)> = Vec::with_capacity(link.verts.len());
        for &w in &link.verts {
            let b = mesh.node_of(w);
            let up = up_of(b);
            if seq.last().map(|x: &(u32, bool)| x.0) != Some(b) {
                seq.push((b, up));
            }
        }
        if link.closed && seq.len() > 1 && seq[0].0 == seq[seq.len() - 1].0 {
            seq.pop();
        }
        let ups = merge_sharing(arcs(&seq, link.closed, true));
        let downs = merge_sharing(arcs(&seq, link.closed, false));
        class[i] = VertexClass::from_counts(v, ups.len() as u32, downs.len() as u32);
        up_stars[i] = ups;
        down_stars[i] = downs;
    }
    Skeleton { nodes, adj, higher, up_stars, down_stars, class, is_node }
}

/// Classification for 1-skeleton inputs: stars are connected components of
/// the higher (lower) neighbours inside the link graph.
pub fn classify_graph(n: usize, edges: &[(u32, u32)], order: &HeightOrder) -> Skeleton {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let nodes: Vec<u32> = (0..n as u32).collect();
    let higher = orient(&adj, &nodes, order);
    let mut up_stars = vec![Vec::new(); n];
    let mut down_stars = vec![Vec::new(); n];
    let mut class = Vec::with_capacity(n);
    for v in 0..n {
        let mut stars = [Vec::new(), Vec::new()];
        for (side, want) in [(0usize, true), (1usize, false)] {
            let members: Vec<u32> =
                adj[v].iter().zip(&higher[v]).filter(|(_, &h)| h == want).map(|(&w, _)| w).collect();
            let mut label: Vec<usize> = (0..members.len()).collect();
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    if adj[members[a] as usize].binary_search(&members[b]).is_ok() {
                        let (la, lb) = (label[a], label[b]);
                        if la != lb {
                            for l in label.iter_mut() {
                                if *l == lb {
                                    *l = la;
                                }
                            }
                        }
                    }
                }
            }
            let mut groups: Vec<Vec<u32>> = Vec::new();
            let mut ids: Vec<usize> = label.clone();
            ids.sort_unstable();
            ids.dedup();
            for l in ids {
                groups.push((0..members.len()).filter(|&k| label[k] == l).map(|k| members[k]).collect());
            }
            groups.sort();
            stars[side] = groups;
        }
        let [ups, downs] = stars;
        class.push(VertexClass::from_counts(v as u32, ups.len() as u32, downs.len() as u32));
        up_stars[v] = ups;
        down_stars[v] = downs;
    }
    Skeleton { nodes, adj, higher, up_stars, down_stars, class, is_node: vec![true; n] }
}

pub fn classify_all(mesh: &ScalarMesh) -> Vec<VertexClass> {
    let order = mesh.height_order();
    let s = classify_mesh(mesh, &order);
    s.nodes.iter().map(|&v| s.class[v as usize]).collect()
}

pub fn graph_order(g: &GraphInput) -> HeightOrder {
    HeightOrder::new(g.heights.iter().enumerate().map(|(i, &h)| OrderKey::new(h, i as u32)).collect())
}

/// Mesh with multi-saddles split into simple saddles, plus `origin[v]`, the
/// original vertex each vertex descends from.
#[derive(Clone, Debug)]
pub struct Unfolded {
    pub mesh: ScalarMesh,
    pub origin: Vec<u32>,
    pub copies: usize,
}

/// Split every vertex with three or more upper arcs. The lower copy keeps the
/// first upper/lower arc pair plus an edge to the upper copy, which takes the
/// remaining arcs; repeated until all copies have at most two upper arcs.
pub fn unfold_multisaddles(mesh: &ScalarMesh) -> Result<Unfolded> {
    let n0 = mesh.vertex_count();
    let mut heights = mesh.heights().to_vec();
    let mut keys = mesh.keys().to_vec();
    let mut faces = mesh.faces().to_vec();
    let mut origin: Vec<u32> = (0..n0 as u32).collect();
    let mut vfaces: Vec<Vec<u32>> = (0..n0 as u32).map(|v| mesh.vertex_faces(v).to_vec()).collect();
    let mut copies = 0;
    for v in 0..n0 as u32 {
        if mesh.group_of(v).is_some() {
            continue;
        }
        let link = mesh.link(v);
        let cmp = |w: u32| keys[w as usize].cmp_raw(&keys[v as usize]).is_gt();
        let seq: Vec<(u32, bool)> = link.verts.iter().map(|&w| (mesh.node_of(w), cmp(w))).collect();
        let k = arcs(&seq, true, true).len();
        if k < 3 {
            continue;
        }
        if merge_sharing(arcs(&seq, true, true)).len() != k || merge_sharing(arcs(&seq, true, false)).len() != k {
            return Err(Error::Validation(format!(
                "multi-saddle {v} touches one boundary group along separate arcs"
            )));
        }
        let mut lv: Vec<(u32, bool)> = link.verts.iter().map(|&w| (w, cmp(w))).collect();
        let mut cur = v;
        loop {
            let k = arcs(&lv, true, true).len();
            if k < 3 {
                break;
            }
            // rotate so lv starts at the first vertex of an upper arc
            let d = lv.len();
            let s = (0..d).find(|&i| lv[i].1 && !lv[(i + d - 1) % d].1).expect("upper arc");
            lv.rotate_left(s);
            let a = lv[d - 1].0;
            let first_low = (0..d).find(|&i| !lv[i].1).expect("lower arc");
            let end_l1 = (first_low..d).find(|&i| lv[i].1).expect("second upper arc") - 1;
            let b = lv[end_l1].0;
            let p2: Vec<(u32, bool)> = lv[end_l1..].to_vec();
            let nv = heights.len() as u32;
            heights.push(heights[cur as usize]);
            let mut key = keys[cur as usize];
            key.sub += 1;
            keys.push(key);
            origin.push(origin[cur as usize]);
            vfaces.push(Vec::new());
            copies += 1;
            let p2_edges: std::collections::HashSet<(u32, u32)> = p2
                .windows(2)
                .map(|w| (w[0].0.min(w[1].0), w[0].0.max(w[1].0)))
                .collect();
            let owned = std::mem::take(&mut vfaces[cur as usize]);
            let mut keep = Vec::new();
            for fi in owned {
                let f = &mut faces[fi as usize];
                let others: Vec<u32> = f.iter().copied().filter(|&x| x != cur).collect();
                let e = (others[0].min(others[1]), others[0].max(others[1]));
                if p2_edges.contains(&e) {
                    for x in f.iter_mut() {
                        if *x == cur {
                            *x = nv;
                        }
                    }
                    vfaces[nv as usize].push(fi);
                } else {
                    keep.push(fi);
                }
            }
            vfaces[cur as usize] = keep;
            for third in [a, b] {
                let fi = faces.len() as u32;
                faces.push([cur, nv, third]);
                vfaces[cur as usize].push(fi);
                vfaces[nv as usize].push(fi);
                vfaces[third as usize].push(fi);
            }
            // the upper copy's link: p2 then the lower copy
            lv = p2;
            lv.push((cur, false));
            cur = nv;
        }
    }
    if copies == 0 {
        return Ok(Unfolded { mesh: mesh.clone(), origin, copies });
    }
    let groups = mesh.groups().to_vec();
    let out = ScalarMesh::with_keys(heights, keys, faces, groups)?;
    let check = out.height_order();
    let s = classify_mesh(&out, &check);
    for &v in &s.nodes {
        let c = s.class[v as usize];
        if c.morse_up > 2 || c.morse_down > 2 {
            return invariant(format!("vertex {v} still has Morse degree above 2 after unfolding"));
        }
    }
    Ok(Unfolded { mesh: out, origin, copies })
}
