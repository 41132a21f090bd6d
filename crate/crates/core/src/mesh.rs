use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::order::{HeightOrder, OrderKey};

pub const NO_GROUP: u32 = u32::MAX;

/// Triangulated terrain with per-vertex heights and constant-height boundary
/// groups. Each group is treated as a single node of the 1-skeleton.
#[derive(Clone, Debug)]
pub struct ScalarMesh {
    heights: Vec<f64>,
    keys: Vec<OrderKey>,
    faces: Vec<[u32; 3]>,
    groups: Vec<Vec<u32>>,
    group_of: Vec<u32>,
    adjacency: Vec<Vec<u32>>,
    vertex_faces: Vec<Vec<u32>>,
    grid: Option<(usize, usize)>,
}

/// Ordered link of a vertex: a cycle for interior vertices, possibly a path
/// for vertices on the surface boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub verts: Vec<u32>,
    pub closed: bool,
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub enum Input {
    Mesh(ScalarMesh),
    Graph(GraphInput),
}

/// 1-skeleton-only input (`GRAPH` format).
#[derive(Clone, Debug)]
pub struct GraphInput {
    pub heights: Vec<f64>,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Grid,
    TriangleMesh,
    Graph,
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ScalarMesh {
    /// Build and validate. Keys default to (height, id), with every group
    /// sharing the key of its smallest member.
    pub fn new(heights: Vec<f64>, faces: Vec<[u32; 3]>, groups: Vec<Vec<u32>>) -> Result<Self> {
        let n = heights.len();
        let mut keys: Vec<OrderKey> = (0..n).map(|v| OrderKey::new(heights[v], v as u32)).collect();
        for g in &groups {
            if let Some(&rep) = g.iter().min() {
                if (rep as usize) < n {
                    let k = keys[rep as usize];
                    for &v in g {
                        if (v as usize) < n {
                            keys[v as usize] = k;
                        }
                    }
                }
            }
        }
        Self::with_keys(heights, keys, faces, groups)
    }

    pub fn with_keys(
        heights: Vec<f64>,
        keys: Vec<OrderKey>,
        faces: Vec<[u32; 3]>,
        mut groups: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let n = heights.len();
        if keys.len() != n {
            return Err(Error::Validation("key count differs from vertex count".into()));
        }
        if n == 0 {
            return Err(Error::Validation("empty mesh".into()));
        }
        if let Some(v) = heights.iter().position(|h| !h.is_finite()) {
            return Err(Error::Validation(format!("vertex {v} has non-finite height")));
        }
        let mut group_of = vec![NO_GROUP; n];
        for (gi, g) in groups.iter_mut().enumerate() {
            if g.is_empty() {
                return Err(Error::Validation(format!("boundary group {gi} is empty")));
            }
            g.sort_unstable();
            g.dedup();
            for &v in g.iter() {
                if v as usize >= n {
                    return Err(Error::Validation(format!("boundary group {gi} names unknown vertex {v}")));
                }
                if group_of[v as usize] != NO_GROUP {
                    return Err(Error::Validation(format!("vertex {v} belongs to two boundary groups")));
                }
                group_of[v as usize] = gi as u32;
            }
        }
        let mut vertex_faces = vec![Vec::new(); n];
        let mut adjacency = vec![Vec::new(); n];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v as usize >= n {
                    return Err(Error::Validation(format!("face {fi} names unknown vertex {v}")));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Validation(format!("face {fi} is degenerate")));
            }
            for &v in f {
                vertex_faces[v as usize].push(fi as u32);
            }
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        for a in adjacency.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let mut sorted_faces: Vec<[u32; 3]> = faces
            .iter()
            .map(|f| {
                let mut f = *f;
                f.sort_unstable();
                f
            })
            .collect();
        sorted_faces.sort_unstable();
        if sorted_faces.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate face".into()));
        }
        let mesh = ScalarMesh { heights, keys, faces, groups, group_of, adjacency, vertex_faces, grid: None };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        let n = self.heights.len();
        let mut edge_count: HashMap<(u32, u32), u32> = HashMap::new();
        for f in &self.faces {
            for i in 0..3 {
                *edge_count.entry(edge_key(f[i], f[(i + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &edge_count {
            if c > 2 {
                return Err(Error::Validation(format!("edge ({a},{b}) lies on {c} faces")));
            }
            if c == 1 {
                let ga = self.group_of[a as usize];
                if ga == NO_GROUP || ga != self.group_of[b as usize] {
                    return Err(Error::Validation(format!(
                        "open boundary edge ({a},{b}) is not inside a boundary group"
                    )));
                }
            }
        }
        for v in 0..n as u32 {
            if self.vertex_faces[v as usize].is_empty() {
                return Err(Error::Validation(format!("vertex {v} lies on no face")));
            }
            let link = self.try_link(v)?;
            if !link.closed && self.group_of[v as usize] == NO_GROUP {
                return Err(Error::Validation(format!("interior vertex {v} has an open link")));
            }
        }
        for (gi, g) in self.groups.iter().enumerate() {
            let k0 = self.keys[g[0] as usize];
            let h0 = self.heights[g[0] as usize];
            for &v in g {
                if self.heights[v as usize] != h0 || self.keys[v as usize] != k0 {
                    return Err(Error::Validation(format!("boundary group {gi} is not constant-height")));
                }
            }
            let (mut above, mut below) = (false, false);
            for &v in g {
                for &w in &self.adjacency[v as usize] {
                    if self.group_of[w as usize] == gi as u32 {
                        continue;
                    }
                    match self.keys[w as usize].cmp_raw(&k0) {
                        std::cmp::Ordering::Greater => above = true,
                        std::cmp::Ordering::Less => below = true,
                        std::cmp::Ordering::Equal => {
                            return Err(Error::Validation(format!(
                                "vertex {w} ties with boundary group {gi}"
                            )))
                        }
                    }
                }
            }
            if above && below {
                return Err(Error::Validation(format!(
                    "boundary group {gi} has neighbours both above and below"
                )));
            }
        }
        let mut node_keys: Vec<OrderKey> =
            (0..n).filter(|&v| self.is_node(v as u32)).map(|v| self.keys[v]).collect();
        node_keys.sort_by(|a, b| a.cmp_raw(b));
        if node_keys.windows(2).any(|w| w[0].cmp_raw(&w[1]).is_eq()) {
            return Err(Error::Validation("two vertices share a perturbed height".into()));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != n {
            return Err(Error::Validation("mesh is not connected".into()));
        }
        let cycles = self.boundary_cycle_count(&edge_count);
        let euler = n as i64 - edge_count.len() as i64 + self.faces.len() as i64 + cycles as i64;
        if euler != 2 {
            return Err(Error::Validation(format!(
                "mesh is not a simply connected surface (filled Euler characteristic {euler})"
            )));
        }
        Ok(())
    }

    fn boundary_cycle_count(&self, edge_count: &HashMap<(u32, u32), u32>) -> usize {
        let mut parent: HashMap<u32, u32> = HashMap::new();
        fn find(p: &mut HashMap<u32, u32>, x: u32) -> u32 {
            let mut r = x;
            while let Some(&q) = p.get(&r) {
                if q == r {
                    break;
                }
                r = q;
            }
            p.insert(x, r);
            r
        }
        let mut edges: Vec<(u32, u32)> =
            edge_count.iter().filter(|(_, &c)| c == 1).map(|(&e, _)| e).collect();
        edges.sort_unstable();
        for &(a, b) in &edges {
            parent.entry(a).or_insert(a);
            parent.entry(b).or_insert(b);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent.insert(ra, rb);
            }
        }
        let keys: Vec<u32> = parent.keys().copied().collect();
        let mut roots: Vec<u32> = keys.into_iter().map(|k| find(&mut parent, k)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.heights.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Faces with no boundary-group vertex.
    pub fn interior_face_count(&self) -> usize {
        self.faces.iter().filter(|f| f.iter().all(|&v| self.group_of[v as usize] == NO_GROUP)).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn keys(&self) -> &[OrderKey] {
        &self.keys
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn groups(&self) -> &[Vec<u32>] {
        &self.groups
    }

    pub fn group_of(&self, v: u32) -> Option<u32> {
        let g = self.group_of[v as usize];
        (g != NO_GROUP).then_some(g)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn vertex_faces(&self, v: u32) -> &[u32] {
        &self.vertex_faces[v as usize]
    }

    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        self.grid
    }

    /// Skeleton node representing `v`: the smallest member for group vertices.
    pub fn node_of(&self, v: u32) -> u32 {
        match self.group_of(v) {
            Some(g) => self.groups[g as usize][0],
            None => v,
        }
    }

    pub fn is_node(&self, v: u32) -> bool {
        self.node_of(v) == v
    }

    pub fn nodes(&self) -> Vec<u32> {
        (0..self.vertex_count() as u32).filter(|&v| self.is_node(v)).collect()
    }

    pub fn is_boundary_face(&self, f: u32) -> bool {
        let [a, b, c] = self.faces[f as usize];
        let g = self.group_of[a as usize];
        g != NO_GROUP && g == self.group_of[b as usize] && g == self.group_of[c as usize]
    }

    pub fn height_order(&self) -> HeightOrder {
        HeightOrder::new(self.keys.clone())
    }

    pub fn link(&self, v: u32) -> Link {
        self.try_link(v).expect("link validated at construction")
    }

    fn try_link(&self, v: u32) -> Result<Link> {
        let mut partners: Vec<(u32, [u32; 2], u8)> = Vec::new();
        let slot = |x: u32, y: u32, partners: &mut Vec<(u32, [u32; 2], u8)>| -> Result<()> {
            match partners.iter_mut().find(|p| p.0 == x) {
                Some(p) => {
                    if p.2 >= 2 {
                        return Err(Error::Validation(format!("vertex {v} has a non-manifold link")));
                    }
                    p.1[p.2 as usize] = y;
                    p.2 += 1;
                }
                None => partners.push((x, [y, u32::MAX], 1)),
            }
            Ok(())
        };
        for &fi in &self.vertex_faces[v as usize] {
            let f = self.faces[fi as usize];
            let others: Vec<u32> = f.iter().copied().filter(|&w| w != v).collect();
            slot(others[0], others[1], &mut partners)?;
            slot(others[1], others[0], &mut partners)?;
        }
        partners.sort_by_key(|p| p.0);
        let closed = partners.iter().all(|p| p.2 == 2);
        let start = if closed {
            partners[0].0
        } else {
            let ends: Vec<u32> = partners.iter().filter(|p| p.2 == 1).map(|p| p.0).collect();
            if ends.len() != 2 {
                return Err(Error::Validation(format!("vertex {v} has a non-manifold link")));
            }
            ends[0]
        };
        let get = |x: u32| &partners[partners.binary_search_by_key(&x, |p| p.0).expect("partner")];
        let mut verts = vec![start];
        let mut prev = None;
        let mut cur = start;
        loop {
            let p = get(cur);
            let next = p.1[..p.2 as usize].iter().copied().find(|&y| Some(y) != prev);
            match next {
                Some(y) if y != start => {
                    if verts.len() >= partners.len() {
                        return Err(Error::Validation(format!("vertex {v} has a non-manifold link")));
                    }
                    verts.push(y);
                    prev = Some(cur);
                    cur = y;
                }
                _ => break,
            }
        }
        if verts.len() != partners.len() {
            return Err(Error::Validation(format!("vertex {v} has a disconnected link")));
        }
        Ok(Link { verts, closed })
    }

    /// Grid terrain wrapped in a constant boundary ring at min - 1.
    pub fn grid(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::Validation("grid shape does not match value count".into()));
        }
        if values.iter().any(|h| !h.is_finite()) {
            return Err(Error::Validation("grid holds a non-finite height".into()));
        }
        let (pr, pc) = (rows + 2, cols + 2);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
        let mut id = vec![0u32; pr * pc];
        let mut heights = values.to_vec();
        let mut ring = Vec::new();
        for i in 0..pr {
            for j in 0..pc {
                if i >= 1 && i <= rows && j >= 1 && j <= cols {
                    id[i * pc + j] = ((i - 1) * cols + (j - 1)) as u32;
                } else {
                    id[i * pc + j] = heights.len() as u32;
                    ring.push(heights.len() as u32);
                    heights.push(lo);
                }
            }
        }
        let mut faces = Vec::with_capacity(2 * (pr - 1) * (pc - 1));
        for i in 0..pr - 1 {
            for j in 0..pc - 1 {
                let a = id[i * pc + j];
                let b = id[i * pc + j + 1];
                let c = id[(i + 1) * pc + j];
                let d = id[(i + 1) * pc + j + 1];
                faces.push([a, d, b]);
                faces.push([a, c, d]);
            }
        }
        let mut m = Self::new(heights, faces, vec![ring])?;
        m.grid = Some((rows, cols));
        Ok(m)
    }

    pub fn to_tmesh(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "TMESH {} {} {}", self.vertex_count(), self.face_count(), self.groups.len());
        for (v, h) in self.heights.iter().enumerate() {
            let _ = writeln!(s, "{v} {h}");
        }
        for f in &self.faces {
            let _ = writeln!(s, "{} {} {}", f[0], f[1], f[2]);
        }
        for g in &self.groups {
            let parts: Vec<String> = g.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", parts.join(" "));
        }
        s
    }
}

struct Tokens<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Tokens<'a> {
    fn new(src: &'a str) -> Self {
        Tokens { lines: src.lines().enumerate().peekable() }
    }

    fn next_line(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.lines.by_ref() {
            let line = line.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            if !toks.is_empty() {
                return Ok((i + 1, toks));
            }
        }
        Err(Error::Parse("unexpected end of input".into()))
    }

    fn rest(&mut self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        for (i, line) in self.lines.by_ref() {
            let line = line.split('#').next().unwrap_or("");
            out.extend(line.split_whitespace().map(|t| (i + 1, t)));
        }
        out
    }

    fn at_end(&mut self) -> bool {
        loop {
            match self.lines.peek() {
                None => return true,
                Some((_, l)) if l.split('#').next().unwrap_or("").trim().is_empty() => {
                    self.lines.next();
                }
                Some(_) => return false,
            }
        }
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse(format!("line {line}: bad number {tok:?}")))
}

fn header(toks: &[&str], line: usize, tag: &str, n: usize) -> Result<Vec<usize>> {
    if toks.len() != n + 1 {
        return Err(Error::Parse(format!("line {line}: expected `{tag}` with {n} counts")));
    }
    toks[1..].iter().map(|t| num::<usize>(t, line)).collect()
}

pub fn detect_format(src: &str) -> Result<Format> {
    let first = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    match first.split_whitespace().next() {
        Some("GRID") => Ok(Format::Grid),
        Some("TMESH") => Ok(Format::TriangleMesh),
        Some("GRAPH") => Ok(Format::Graph),
        Some(t) => Err(Error::Parse(format!("unknown format tag {t:?}"))),
        None => Err(Error::Parse("empty input".into())),
    }
}

pub fn parse_input(src: &str) -> Result<Input> {
    match detect_format(src)? {
        Format::Grid | Format::TriangleMesh => Ok(Input::Mesh(load_mesh(src)?)),
        Format::Graph => Ok(Input::Graph(parse_graph(src)?)),
    }
}

/// Parse a `GRID` or `TMESH` source into a validated mesh.
pub fn load_mesh(src: &str) -> Result<ScalarMesh> {
    match detect_format(src)? {
        Format::Grid => {
            let (rows, cols, values) = parse_grid_values(src)?;
            ScalarMesh::grid(rows, cols, &values)
        }
        Format::TriangleMesh => {
            let (heights, faces, groups) = parse_tmesh_parts(src)?;
            ScalarMesh::new(heights, faces, groups)
        }
        Format::Graph => Err(Error::Parse("GRAPH input has no faces; use the join-tree path".into())),
    }
}

pub fn parse_grid_values(src: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut t = Tokens::new(src);
    let (line, toks) = t.next_line()?;
    if toks[0] != "GRID" {
        return Err(Error::Parse(format!("line {line}: expected GRID header")));
    }
    let dims = header(&toks, line, "GRID", 2)?;
    let (rows, cols) = (dims[0], dims[1]);
    if rows == 0 || cols == 0 {
        return Err(Error::Parse(format!("line {line}: grid dimensions must be positive")));
    }
    let rest = t.rest();
    if rest.len() != rows * cols {
        return Err(Error::Parse(format!("expected {} heights, found {}", rows * cols, rest.len())));
    }
    let values = rest.iter().map(|&(l, tok)| num::<f64>(tok, l)).collect::<Result<Vec<_>>>()?;
    if let Some(i) = values.iter().position(|h| !h.is_finite()) {
        return Err(Error::Parse(format!("height #{i} is not finite")));
    }
    Ok((rows, cols, values))
}

type TmeshParts = (Vec<f64>, Vec<[u32; 3]>, Vec<Vec<u32>>);

pub fn parse_tmesh_parts(src: &str) -> Result<TmeshParts> {
    let mut t = Tokens::new(src);
    let (line, toks) = t.next_line()?;
    if toks[0] != "TMESH" {
        return Err(Error::Parse(format!("line {line}: expected TMESH header")));
    }
    let c = header(&toks, line, "TMESH", 3)?;
    let (nv, nf, nb) = (c[0], c[1], c[2]);
    let heights = read_vertices(&mut t, nv)?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, toks) = t.next_line()?;
        if toks.len() != 3 {
            return Err(Error::Parse(format!("line {l}: a face needs 3 vertex ids")));
        }
        let f = [num(toks[0], l)?, num(toks[1], l)?, num(toks[2], l)?];
        faces.push(f);
    }
    let mut groups = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (l, toks) = t.next_line()?;
        groups.push(toks.iter().map(|x| num::<u32>(x, l)).collect::<Result<Vec<_>>>()?);
    }
    if !t.at_end() {
        return Err(Error::Parse("trailing data after TMESH body".into()));
    }
    Ok((heights, faces, groups))
}

fn read_vertices(t: &mut Tokens<'_>, nv: usize) -> Result<Vec<f64>> {
    let mut heights = vec![f64::NAN; nv];
    let mut seen = vec![false; nv];
    for _ in 0..nv {
        let (l, toks) = t.next_line()?;
        if toks.len() != 2 {
            return Err(Error::Parse(format!("line {l}: expected `id height`")));
        }
        let id: usize = num(toks[0], l)?;
        let h: f64 = num(toks[1], l)?;
        if id >= nv || seen[id] {
            return Err(Error::Parse(format!("line {l}: vertex id {id} out of range or repeated")));
        }
        if !h.is_finite() {
            return Err(Error::Parse(format!("line {l}: height is not finite")));
        }
        seen[id] = true;
        heights[id] = h;
    }
    Ok(heights)
}

pub fn parse_graph(src: &str) -> Result<GraphInput> {
    let mut t = Tokens::new(src);
    let (line, toks) = t.next_line()?;
    if toks[0] != "GRAPH" {
        return Err(Error::Parse(format!("line {line}: expected GRAPH header")));
    }
    let c = header(&toks, line, "GRAPH", 2)?;
    let (nv, ne) = (c[0], c[1]);
    let heights = read_vertices(&mut t, nv)?;
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (l, toks) = t.next_line()?;
        if toks.len() != 2 {
            return Err(Error::Parse(format!("line {l}: expected `u v`")));
        }
        let (u, v): (u32, u32) = (num(toks[0], l)?, num(toks[1], l)?);
        if u as usize >= nv || v as usize >= nv || u == v {
            return Err(Error::Parse(format!("line {l}: bad edge ({u},{v})")));
        }
        edges.push((u, v));
    }
    if !t.at_end() {
        return Err(Error::Parse("trailing data after GRAPH body".into()));
    }
    Ok(GraphInput { heights, edges })
}

pub fn grid_to_string(rows: usize, cols: usize, values: &[f64]) -> String {
    let mut s = format!("GRID {rows} {cols}\n");
    for r in 0..rows {
        let row: Vec<String> = values[r * cols..(r + 1) * cols].iter().map(|h| h.to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_grid() {
        let m = load_mesh("GRID 1 1\n5\n").unwrap();
        assert_eq!(m.vertex_count(), 9);
        assert_eq!(m.groups().len(), 1);
        assert_eq!(m.heights()[1], 4.0);
        assert_eq!(m.neighbors(0).len(), 6);
    }

    #[test]
    fn three_by_three_counts() {
        let m = load_mesh("GRID 3 3\n1 2 3\n4 9 5\n6 7 8\n").unwrap();
        assert_eq!(m.interior_face_count(), 8);
        let interior_max: Vec<u32> = (0..9)
            .filter(|&v| m.neighbors(v).iter().all(|&w| m.keys()[w as usize].cmp_raw(&m.keys()[v as usize]).is_lt()))
            .collect();
        assert_eq!(interior_max, vec![4]);
    }

    #[test]
    fn adjacency_symmetric() {
        let m = load_mesh("GRID 3 4\n1 2 3 4\n5 6 7 8\n9 10 11 12\n").unwrap();
        for v in 0..m.vertex_count() as u32 {
            for &w in m.neighbors(v) {
                assert!(m.neighbors(w).contains(&v));
            }
        }
    }

    #[test]
    fn rejects_edge_on_three_faces() {
        let src = "TMESH 5 3 0\n0 1\n1 2\n2 3\n3 4\n4 5\n0 1 2\n0 1 3\n0 1 4\n";
        assert!(matches!(load_mesh(src), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_group_with_mixed_neighbours() {
        // ring group around a vertex, plus one ring vertex raised above it
        let src = "TMESH 4 4 1\n0 5\n1 0\n2 0\n3 0\n0 1 2\n0 2 3\n0 3 1\n1 3 2\n1 2 3\n";
        assert!(load_mesh(src).is_ok());
        let bad = "TMESH 5 3 1\n0 5\n1 0\n2 0\n3 0\n4 9\n0 1 2\n0 2 3\n0 3 1\n1 2 3 4\n";
        assert!(load_mesh(bad).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(load_mesh("GRID 2 2\n1 2 3\n"), Err(Error::Parse(_))));
        assert!(matches!(load_mesh("HELLO\n"), Err(Error::Parse(_))));
        assert!(matches!(load_mesh("GRID 1 1\nx\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn links_are_cycles_inside() {
        let m = load_mesh("GRID 2 2\n1 2\n3 4\n").unwrap();
        for v in 0..4 {
            let l = m.link(v);
            assert!(l.closed);
            assert_eq!(l.verts.len(), 6);
        }
    }

    #[test]
    fn graph_parse() {
        let g = parse_graph("GRAPH 3 2\n0 1\n1 2\n2 3\n0 1\n1 2\n").unwrap();
        assert_eq!(g.edges.len(), 2);
    }
}
