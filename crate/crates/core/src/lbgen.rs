//! Tent terrains realizing a prescribed path decomposition, for join-tree
//! and contour-tree lower-bound families.
//!
//! Budget: a tent for a path of length `l` with `o` opposite-orientation
//! children has `m = max(3, (l - 1) + o + 2)` cone faces. Faces 0 and m-1
//! touch the anchor and stay empty; faces 1..=l-1 host the same-orientation
//! children (missing ones are filled with single-apex leaf tents); the next
//! `o` faces host the opposite children.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::ScalarMesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Down,
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEntry {
    pub id: usize,
    pub parent: Option<usize>,
    pub len: usize,
    pub orientation: Orientation,
}

/// Shrub of paths plus per-path saddle-height permutations. `perms[p][i]`
/// is the rank (1 = lowest) of the saddle in slot `i` of path `p`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathSpec {
    pub paths: Vec<PathEntry>,
    pub perms: BTreeMap<usize, Vec<usize>>,
}

fn spec_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Spec(msg.into()))
}

fn lehmer(mut code: u128, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=k).collect();
    let mut out = Vec::with_capacity(k);
    for i in (1..=k).rev() {
        let f: u128 = (1..i as u128).product();
        let idx = (code / f) as usize;
        code %= f;
        out.push(pool.remove(idx));
    }
    out
}

impl PathSpec {
    /// Parse the `SHRUB` / `PERM` text format:
    ///
    /// ```text
    /// SHRUB 2
    /// 0 - 3 down
    /// 1 0 3 down
    /// PERM
    /// 0 2 1
    /// ```
    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty spec".into()))?;
        let mut hw = head.split_whitespace();
        if hw.next() != Some("SHRUB") {
            return Err(Error::Parse("spec must start with SHRUB".into()));
        }
        let n: usize = hw
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse("SHRUB needs a path count".into()))?;
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
        };
        let mut spec = PathSpec::default();
        for _ in 0..n {
            let l = lines.next().ok_or_else(|| Error::Parse("SHRUB section is short".into()))?;
            let w: Vec<&str> = l.split_whitespace().collect();
            if w.len() != 4 {
                return Err(Error::Parse(format!("path line needs 4 fields: '{l}'")));
            }
            let parent = if w[1] == "-" { None } else { Some(num(w[1], "parent")?) };
            let orientation = match w[3] {
                "down" => Orientation::Down,
                "up" => Orientation::Up,
                o => return Err(Error::Parse(format!("bad orientation '{o}'"))),
            };
            spec.paths.push(PathEntry { id: num(w[0], "path id")?, parent, len: num(w[2], "length")?, orientation });
        }
        match lines.next() {
            None => {}
            Some("PERM") => {
                for l in lines {
                    let w: Vec<usize> =
                        l.split_whitespace().map(|x| num(x, "permutation entry")).collect::<Result<_>>()?;
                    spec.perms.insert(w[0], w[1..].to_vec());
                }
            }
            Some(other) => return Err(Error::Parse(format!("expected PERM, found '{other}'"))),
        }
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "SHRUB {}", self.paths.len());
        for p in &self.paths {
            let parent = p.parent.map_or("-".to_string(), |x| x.to_string());
            let o = if p.orientation == Orientation::Down { "down" } else { "up" };
            let _ = writeln!(s, "{} {parent} {} {o}", p.id, p.len);
        }
        if !self.perms.is_empty() {
            s.push_str("PERM\n");
            for (id, perm) in &self.perms {
                let _ = write!(s, "{id}");
                for x in perm {
                    let _ = write!(s, " {x}");
                }
                s.push('\n');
            }
        }
        s
    }

    fn index(&self) -> BTreeMap<usize, usize> {
        self.paths.iter().enumerate().map(|(i, p)| (p.id, i)).collect()
    }

    /// Structural checks: one root, known parents, acyclic, arity within the
    /// join slots, valid permutations.
    pub fn validate(&self) -> Result<()> {
        let idx = self.index();
        if idx.len() != self.paths.len() {
            return spec_err("duplicate path id");
        }
        let roots: Vec<&PathEntry> = self.paths.iter().filter(|p| p.parent.is_none()).collect();
        if roots.len() != 1 {
            return spec_err(format!("spec needs exactly one root path, found {}", roots.len()));
        }
        if roots[0].orientation != Orientation::Down {
            return spec_err("root path must be oriented down");
        }
        for p in &self.paths {
            if p.len == 0 {
                return spec_err(format!("path {} has length 0", p.id));
            }
            let mut cur = p.parent;
            let mut steps = 0;
            while let Some(c) = cur {
                let Some(&i) = idx.get(&c) else {
                    return spec_err(format!("path {} names unknown parent {c}", p.id));
                };
                steps += 1;
                if steps > self.paths.len() {
                    return spec_err("shrub has a cycle");
                }
                cur = self.paths[i].parent;
            }
            let same = self
                .paths
                .iter()
                .filter(|c| c.parent == Some(p.id) && c.orientation == p.orientation)
                .count();
            if same > p.len - 1 {
                return spec_err(format!(
                    "path {} of length {} cannot host {same} children (at most {})",
                    p.id,
                    p.len,
                    p.len - 1
                ));
            }
            if let Some(perm) = self.perms.get(&p.id) {
                let mut s = perm.clone();
                s.sort_unstable();
                if s != (1..p.len).collect::<Vec<_>>() {
                    return spec_err(format!("PERM for path {} is not a permutation of 1..{}", p.id, p.len - 1));
                }
            }
        }
        for id in self.perms.keys() {
            if !idx.contains_key(id) {
                return spec_err(format!("PERM names unknown path {id}"));
            }
        }
        Ok(())
    }

    /// Number of distinct saddle orderings, Π (|p| - 1)!, saturating.
    pub fn family_size(&self) -> u128 {
        let mut total: u128 = 1;
        for p in &self.paths {
            for i in 1..p.len as u128 {
                total = total.saturating_mul(i);
            }
        }
        total
    }

    /// Replace every permutation with one derived from `seed`: mixed-radix
    /// Lehmer codes while the family is small enough, seeded shuffles
    /// otherwise.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.perms.clear();
        let mut code = seed as u128;
        for p in &self.paths {
            let k = p.len - 1;
            if k == 0 {
                continue;
            }
            let perm = if k <= 20 {
                let radix: u128 = (1..=k as u128).product();
                let c = code % radix;
                code /= radix;
                lehmer(c, k)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p.id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut v: Vec<usize> = (1..=k).collect();
                v.shuffle(&mut rng);
                v
            };
            out.perms.insert(p.id, perm);
        }
        out
    }

    /// Complete binary join tree with `2^h` leaves, decomposed into leftmost
    /// paths. Together with the boundary it has `t = 2^(h+1)` critical points.
    pub fn balanced(h: usize) -> Self {
        let mut spec = PathSpec::default();
        fn add(spec: &mut PathSpec, h: usize, parent: Option<usize>) {
            let id = spec.paths.len();
            spec.paths.push(PathEntry { id, parent, len: h + 1, orientation: Orientation::Down });
            // slot i hosts the subtree of height h-1-i; identity keeps the
            // tallest subtree at the lowest saddle
            if h > 0 {
                spec.perms.insert(id, (1..=h).collect());
            }
            for j in (1..h).rev() {
                add(spec, j, Some(id));
            }
        }
        add(&mut spec, h, None);
        spec
    }

    /// A single path of `len` vertices: a caterpillar join tree.
    pub fn single_path(len: usize) -> Self {
        PathSpec {
            paths: vec![PathEntry { id: 0, parent: None, len, orientation: Orientation::Down }],
            perms: BTreeMap::new(),
        }
    }
}

/// Generated terrain plus the bookkeeping of the construction.
#[derive(Clone, Debug)]
pub struct Generated {
    pub mesh: ScalarMesh,
    /// Length of every path including the implicit single-apex leaves.
    pub path_len: Vec<usize>,
    /// Apex vertex of every path.
    pub apex: Vec<u32>,
    /// Saddle vertex -> index (into `path_len`) of the path it lies on.
    pub saddle_path: BTreeMap<u32, usize>,
}

struct Tent {
    len: usize,
    down: bool,
    same: Vec<Tent>,
    opposite: Vec<Tent>,
    perm: Vec<usize>,
}

fn expand(spec: &PathSpec, i: usize) -> Tent {
    let p = &spec.paths[i];
    let down = p.orientation == Orientation::Down;
    let mut same = Vec::new();
    let mut opposite = Vec::new();
    for (j, c) in spec.paths.iter().enumerate() {
        if c.parent == Some(p.id) {
            if c.orientation == p.orientation {
                same.push(expand(spec, j));
            } else {
                opposite.push(expand(spec, j));
            }
        }
    }
    while same.len() < p.len - 1 {
        same.push(Tent { len: 1, down, same: Vec::new(), opposite: Vec::new(), perm: Vec::new() });
    }
    let perm = spec.perms.get(&p.id).cloned().unwrap_or_else(|| (1..p.len).collect());
    Tent { len: p.len, down, same, opposite, perm }
}

#[derive(Default)]
struct Builder {
    n: u32,
    faces: Vec<[u32; 3]>,
    below: Vec<(u32, u32)>,
    ring: Vec<u32>,
    path_len: Vec<usize>,
    apex: Vec<u32>,
    saddle_path: BTreeMap<u32, usize>,
}

impl Builder {
    fn vertex(&mut self) -> u32 {
        self.n += 1;
        self.n - 1
    }

    /// `x` below `y` in the frame of a tent (`down` = global heights).
    fn lt(&mut self, x: u32, y: u32, down: bool) {
        if down {
            self.below.push((x, y));
        } else {
            self.below.push((y, x));
        }
    }

    /// Fill the annulus between triangle (top, left, right) and the base
    /// cycle `c` whose anchor `c[0]` faces `top`.
    fn annulus(&mut self, top: u32, left: u32, right: u32, c: &[u32]) {
        let m = c.len();
        let t = m / 2;
        self.faces.push([top, c[0], c[1]]);
        self.faces.push([top, c[m - 1], c[0]]);
        self.faces.push([top, c[1], left]);
        self.faces.push([top, right, c[m - 1]]);
        for j in 1..t {
            self.faces.push([left, c[j], c[j + 1]]);
        }
        self.faces.push([left, right, c[t]]);
        for j in (t + 1..m).rev() {
            self.faces.push([right, c[j], c[j - 1]]);
        }
    }

    /// Build a tent; returns (apex, base cycle). `root` tents sit on the
    /// boundary ring instead of a host face.
    fn tent(&mut self, t: &Tent, root: bool) -> (u32, Vec<u32>) {
        let k = t.same.len();
        let o = t.opposite.len();
        let m = (k + o + 2).max(3);
        let tt = m / 2;
        let path = self.path_len.len();
        self.path_len.push(t.len);
        let a = self.vertex();
        self.apex.push(a);
        let c: Vec<u32> = (0..m).map(|_| self.vertex()).collect();
        let d = t.down;
        for i in 0..tt {
            self.lt(c[i + 1], c[i], d);
        }
        for j in tt..m {
            self.lt(c[j], c[(j + 1) % m], d);
        }
        self.lt(c[0], a, d);
        let mut anchors = Vec::with_capacity(k);
        for f in 0..m {
            let (u, w) = (c[f], c[(f + 1) % m]);
            if (1..=k).contains(&f) {
                let child = &t.same[f - 1];
                let (_, qc) = self.tent(child, false);
                let qt = qc[qc.len() / 2];
                self.annulus(a, u, w, &qc);
                self.lt(u, qt, d);
                self.lt(w, qt, d);
                self.lt(qc[0], a, d);
                if !root {
                    self.lt(c[0], qc[0], d);
                }
                self.saddle_path.insert(qc[0], path);
                anchors.push(qc[0]);
            } else if f > k && f <= k + o {
                let child = &t.opposite[f - k - 1];
                let (_, qc) = self.tent(child, false);
                let qt = qc[qc.len() / 2];
                let (lo, hi) = if f < tt { (w, u) } else { (u, w) };
                self.annulus(lo, a, hi, &qc);
                self.lt(lo, qc[0], d);
                self.lt(qt, hi, d);
            } else {
                self.faces.push([a, u, w]);
            }
        }
        let mut slots: Vec<usize> = (0..k).collect();
        slots.sort_by_key(|&i| t.perm[i]);
        for w in slots.windows(2) {
            self.lt(anchors[w[0]], anchors[w[1]], d);
        }
        if root {
            let g: Vec<u32> = (0..m).map(|_| self.vertex()).collect();
            for i in 0..m {
                let j = (i + 1) % m;
                self.faces.push([c[i], g[i], g[j]]);
                self.faces.push([c[i], g[j], c[j]]);
            }
            self.lt(g[0], c[tt], d);
            self.ring = g;
        }
        (a, c)
    }

    fn finish(self) -> Result<Generated> {
        let n = self.n as usize;
        let ring_rep = self.ring[0];
        let rep = |v: u32| if self.ring.contains(&v) { ring_rep } else { v };
        let mut succ: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut indeg = vec![0u32; n];
        for &(x, y) in &self.below {
            let (x, y) = (rep(x), rep(y));
            succ[x as usize].push(y);
            indeg[y as usize] += 1;
        }
        let active = |v: u32| !self.ring.contains(&v) || v == ring_rep;
        let mut heap: BinaryHeap<Reverse<u32>> =
            (0..n as u32).filter(|&v| active(v) && indeg[v as usize] == 0).map(Reverse).collect();
        let mut height = vec![0.0f64; n];
        let mut placed = 0usize;
        while let Some(Reverse(v)) = heap.pop() {
            height[v as usize] = placed as f64;
            placed += 1;
            for &w in &succ[v as usize] {
                indeg[w as usize] -= 1;
                if indeg[w as usize] == 0 {
                    heap.push(Reverse(w));
                }
            }
        }
        if placed != n - self.ring.len() + 1 {
            return Err(Error::Invariant("tent height constraints are cyclic".into()));
        }
        for &g in &self.ring {
            height[g as usize] = height[ring_rep as usize];
        }
        let mesh = ScalarMesh::new(height, self.faces, vec![self.ring])
            .map_err(|e| Error::Invariant(format!("generated terrain is invalid: {e}")))?;
        Ok(Generated { mesh, path_len: self.path_len, apex: self.apex, saddle_path: self.saddle_path })
    }
}

/// Join-tree family: every path oriented down.
pub fn gen_join_family(spec: &PathSpec) -> Result<Generated> {
    if spec.paths.iter().any(|p| p.orientation != Orientation::Down) {
        return spec_err("join family requires every path oriented down");
    }
    gen_contour_family(spec)
}

/// Contour-tree family: children with the opposite orientation are glued
/// upside down, so their anchors become splits of the host.
pub fn gen_contour_family(spec: &PathSpec) -> Result<Generated> {
    spec.validate()?;
    let root = spec.paths.iter().position(|p| p.parent.is_none()).expect("validated");
    let tree = expand(spec, root);
    let mut b = Builder::default();
    b.tent(&tree, true);
    b.finish()
}

/// A lone tent: apex over a base cycle of `m` vertices whose heights fall
/// monotonically from `anchor` to `trap` on both sides. With `flat_base`
/// the base is a boundary group at `trap`; otherwise it is closed by a fan
/// from the trap.
pub fn gen_tent(m: usize, anchor: f64, trap: f64, apex: f64, flat_base: bool) -> Result<ScalarMesh> {
    if m < 3 {
        return spec_err("a tent needs at least 3 faces");
    }
    if !(apex > anchor && anchor > trap) {
        return spec_err("tent heights must satisfy apex > anchor > trap");
    }
    let tt = m / 2;
    let mut heights = vec![apex];
    for i in 0..m {
        let dist = i.min(m - i) as f64;
        let h = if flat_base { trap } else { anchor - (anchor - trap) * dist / tt as f64 };
        // the right side sits a hair lower so that no two base heights tie
        let skew = if !flat_base && i > tt { (anchor - trap) * 1e-3 / m as f64 } else { 0.0 };
        heights.push(h - skew);
    }
    let c: Vec<u32> = (1..=m as u32).collect();
    let mut faces: Vec<[u32; 3]> = (0..m).map(|i| [0, c[i], c[(i + 1) % m]]).collect();
    let groups = if flat_base {
        vec![c.clone()]
    } else {
        for i in 0..m {
            let j = (i + 1) % m;
            if i != tt && j != tt {
                faces.push([c[tt], c[i], c[j]]);
            }
        }
        Vec::new()
    };
    ScalarMesh::new(heights, faces, groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::compute_contour_tree;
    use crate::baseline::sweep_oracle;
    use crate::critical::{classify_all, classify_mesh, Kind};
    use crate::painted_join::{build, BuildOptions};

    fn join_edges(m: &ScalarMesh) -> Vec<(u32, u32)> {
        let o = m.height_order();
        let s = classify_mesh(m, &o);
        build(&s, &o, BuildOptions::default()).tree.edges
    }

    #[test]
    fn tent_m3() {
        let m = gen_tent(3, 1.0, 0.0, 10.0, false).unwrap();
        assert_eq!(m.vertex_count(), 4);
        let maxima = classify_all(&m).iter().filter(|c| c.kind == Kind::Maximum).count();
        assert_eq!(maxima, 1);
        let flat = gen_tent(6, 1.0, 0.0, 10.0, true).unwrap();
        assert_eq!(sweep_oracle(&flat).unwrap().edges.len(), 1);
    }

    #[test]
    fn tent_m6_monotone() {
        let m = gen_tent(6, 5.0, 0.0, 10.0, false).unwrap();
        let c = &m.heights()[1..];
        assert!(c[0] > c[1] && c[1] > c[2] && c[2] > c[3]);
        assert!(c[0] > c[5] && c[5] > c[4] && c[4] > c[3]);
        assert_eq!(classify_all(&m).iter().filter(|v| v.kind != Kind::Regular).count(), 2);
    }

    #[test]
    fn spec_roundtrip_and_arity() {
        let s = PathSpec::parse("SHRUB 2\n0 - 3 down\n1 0 3 down\nPERM\n0 2 1\n").unwrap();
        assert_eq!(PathSpec::parse(&s.to_text()).unwrap(), s);
        s.validate().unwrap();
        let over = PathSpec::parse("SHRUB 3\n0 - 2 down\n1 0 1 down\n2 0 1 down\n").unwrap();
        assert!(matches!(over.validate(), Err(Error::Spec(_))));
        assert!(PathSpec::parse("SHRUB x").is_err());
    }

    #[test]
    fn lehmer_enumerates() {
        let mut all: Vec<Vec<usize>> = (0..6).map(|c| lehmer(c, 3)).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn single_path_caterpillar() {
        let g = gen_join_family(&PathSpec::single_path(4).with_seed(3)).unwrap();
        let classes = classify_all(&g.mesh);
        let saddles = classes.iter().filter(|c| c.kind == Kind::Saddle).count();
        let maxima = classes.iter().filter(|c| c.kind == Kind::Maximum).count();
        assert_eq!((saddles, maxima), (3, 4));
        let edges = join_edges(&g.mesh);
        let apex = g.apex[0];
        // the path apex sits above a chain of three saddles
        let mut cur = apex;
        for _ in 0..3 {
            cur = edges.iter().find(|e| e.0 == cur).unwrap().1;
            assert_eq!(g.saddle_path[&cur], 0);
        }
    }

    #[test]
    fn balanced_small_matches_oracle() {
        for h in 1..4 {
            let g = gen_join_family(&PathSpec::balanced(h)).unwrap();
            let t = compute_contour_tree(&g.mesh, BuildOptions::default()).unwrap().tree;
            assert_eq!(t, sweep_oracle(&g.mesh).unwrap());
            assert_eq!(t.nodes.len(), 1 << (h + 1));
        }
    }

    #[test]
    fn contour_family_join_and_splits() {
        let s = PathSpec::parse("SHRUB 2\n0 - 2 down\n1 0 2 up\n").unwrap();
        let g = gen_contour_family(&s).unwrap();
        let out = compute_contour_tree(&g.mesh, BuildOptions::default()).unwrap();
        assert_eq!(out.tree, sweep_oracle(&g.mesh).unwrap());
        assert_eq!(out.tree.joins_and_splits(), (1, 2));
        assert_eq!(out.counters.pieces, 2);
    }
}
