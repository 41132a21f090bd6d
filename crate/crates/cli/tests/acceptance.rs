//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contour_core::assembly::{compute_contour_tree, PipelineOutput};
use contour_core::baseline::{csa_contour_tree, erase, sweep_oracle, DynTree};
use contour_core::critical::{classify_mesh, Kind};
use contour_core::decomp::verify_bound;
use contour_core::fixtures::{corpus_dims, random_grid, staircase};
use contour_core::heap::{HeapForest, HeapHandle};
use contour_core::lbgen::{gen_contour_family, gen_join_family, PathSpec};
use contour_core::painted_join::{build, heap_path_violations, locality_violations, BuildOptions};
use contour_core::tree::{ContourTree, MergeTree};
use contour_core::union_find::UnionFind;
use contour_core::{HeightOrder, OrderKey, ScalarMesh};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn paper(m: &ScalarMesh) -> PipelineOutput {
    compute_contour_tree(m, BuildOptions::all()).expect("pipeline")
}

fn csa(m: &ScalarMesh) -> (ContourTree, u64) {
    let o = m.height_order();
    let s = classify_mesh(m, &o);
    o.reset_count();
    let (t, st) = csa_contour_tree(&s, &o).expect("csa");
    (t, st.comparisons)
}

fn grids(seeds: std::ops::Range<u64>) -> Vec<(String, ScalarMesh)> {
    seeds
        .map(|i| {
            let (r, c) = corpus_dims(i);
            (format!("grid {r}x{c} seed {i}"), random_grid(r, c, i))
        })
        .collect()
}

fn family_specs() -> Vec<(String, PathSpec)> {
    let mut out = Vec::new();
    for h in 1..=4 {
        out.push((format!("balanced h={h}"), PathSpec::balanced(h)));
    }
    let texts = [
        ("two paths", "SHRUB 2\n0 - 3 down\n1 0 3 down\n"),
        ("one path", "SHRUB 1\n0 - 4 down\n"),
        ("alternating 2", "SHRUB 2\n0 - 2 down\n1 0 2 up\n"),
        ("alternating 3", "SHRUB 2\n0 - 3 down\n1 0 3 up\n"),
        ("mixed", "SHRUB 4\n0 - 3 down\n1 0 2 down\n2 0 3 up\n3 2 2 up\n"),
        ("deep", "SHRUB 4\n0 - 2 down\n1 0 2 up\n2 1 2 down\n3 2 3 up\n"),
    ];
    for (name, t) in texts {
        let spec = PathSpec::parse(t).expect("spec");
        let n = spec.family_size().min(6) as u64;
        for seed in 0..n {
            out.push((format!("{name} seed {seed}"), spec.with_seed(seed)));
        }
    }
    for len in [1, 2, 5, 9] {
        for seed in 0..3 {
            out.push((format!("path {len} seed {seed}"), PathSpec::single_path(len).with_seed(seed)));
        }
    }
    out
}

fn families() -> Vec<(String, ScalarMesh)> {
    family_specs()
        .into_iter()
        .map(|(n, s)| (n, gen_contour_family(&s).expect("family").mesh))
        .filter(|(_, m)| m.vertex_count() <= 200)
        .collect()
}

fn staircases() -> Vec<(String, ScalarMesh)> {
    (4..=64).map(|k| (format!("staircase k={k}"), staircase(k))).collect()
}

fn c1_oracle() -> Outcome {
    let mut n = 0;
    let mut fam = 0;
    for (name, m) in grids(0..200).into_iter().chain(families().into_iter().inspect(|_| fam += 1)) {
        let p = paper(&m).tree;
        let o = sweep_oracle(&m).map_err(|e| format!("{name}: {e}"))?;
        let (c, _) = csa(&m);
        if p != o || c != o {
            return Err(format!("{name}: paper/csa/oracle disagree"));
        }
        n += 1;
    }
    Ok(format!("{n} instances ({fam} lbgen) identical across paper, csa, oracle"))
}

fn c2_locality() -> Outcome {
    let mut logged = 0usize;
    for (name, m) in grids(1000..1100) {
        let out = paper(&m);
        for pb in &out.builds {
            let log = &pb.build.trace.comparison_log;
            logged += log.len();
            if let Some(p) = locality_violations(&pb.build.tree, log).first() {
                return Err(format!("{name}: comparison {p:?} is not ancestor-descendant"));
            }
        }
    }
    if logged == 0 {
        return Err("no comparisons were logged".into());
    }
    Ok(format!("100 terrains, {logged} logged comparisons, 0 violations"))
}

fn c3_cut_once() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cuts = 0;
    for (name, m) in grids(0..200).into_iter().chain(grids(1000..1100)).chain(staircases()) {
        let c = paper(&m).counters;
        if c.max_face_cuts > 1 {
            return Err(format!("{name}: a face was cut {} times", c.max_face_cuts));
        }
        if c.size_ratio > 4.0 {
            return Err(format!("{name}: output {:.2}x input", c.size_ratio));
        }
        worst = worst.max(c.size_ratio);
        cuts += c.cuts;
    }
    Ok(format!("361 terrains, {cuts} cuts, no face cut twice, max size ratio {worst:.3}"))
}

fn c4_heap_paths() -> Outcome {
    let mut snaps = 0usize;
    for (name, m) in grids(2000..2100) {
        for pb in &paper(&m).builds {
            let tr = &pb.build.trace;
            snaps += tr.heap_snapshots.len();
            let bad = heap_path_violations(&pb.build.tree, &tr.heap_snapshots);
            if bad > 0 {
                return Err(format!("{name}: {bad} heap snapshots off a leaf-to-root path"));
            }
        }
    }
    Ok(format!("100 runs, {snaps} heap snapshots, 0 violations"))
}

fn c5_bounds() -> Outcome {
    let mut checked = 0;
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    let corpus = grids(0..200).into_iter().chain(grids(1000..1100)).chain(families()).chain(staircases());
    for (name, m) in corpus {
        for pb in &paper(&m).builds {
            let r = verify_bound(&pb.build.tree, &pb.build.trace, 8.0, 8.0).map_err(|e| format!("{name}: {e}"))?;
            if !r.ok {
                return Err(format!("{name}: ratios {:.3}, {:.3}", r.ratio1, r.ratio2));
            }
            r1 = r1.max(r.ratio1);
            r2 = r2.max(r.ratio2);
            checked += 1;
        }
    }
    Ok(format!("{checked} piece builds, max ratio1 {r1:.3}, max ratio2 {r2:.3} (limit 8)"))
}

fn c6_separation() -> Outcome {
    let mut prev = f64::INFINITY;
    let mut rows = Vec::new();
    let mut last = (0.0, 0.0);
    for k in 8..=14u32 {
        let g = gen_join_family(&PathSpec::balanced(k as usize - 1)).map_err(|e| e.to_string())?;
        let out = compute_contour_tree(&g.mesh, BuildOptions::default()).map_err(|e| e.to_string())?;
        let t = out.counters.t as f64;
        if t != (1u64 << k) as f64 {
            return Err(format!("k={k}: family has t={t}"));
        }
        let norm = t * t.log2();
        let p = out.counters.comparisons as f64 / norm;
        let c = csa(&g.mesh).1 as f64 / norm;
        rows.push(format!("2^{k}:{p:.3}/{c:.3}"));
        if p > prev {
            return Err(format!("paper ratio rose at t=2^{k}: {}", rows.join(" ")));
        }
        if c < 0.9 {
            return Err(format!("csa ratio {c:.3} < 0.9 at t=2^{k}"));
        }
        prev = p;
        last = (p, c);
    }
    if last.0 >= 0.5 {
        return Err(format!("paper ratio {:.3} at t=2^14", last.0));
    }
    Ok(format!("paper/csa per t log t: {}", rows.join(" ")))
}

fn join_edges(m: &ScalarMesh) -> Vec<(u32, u32)> {
    let o = m.height_order();
    build(&classify_mesh(m, &o), &o, BuildOptions::default()).tree.edges
}

fn c7_distinct() -> Outcome {
    let mut counts = Vec::new();
    for (text, want) in [("SHRUB 2\n0 - 3 down\n1 0 3 down\n", 4usize), ("SHRUB 1\n0 - 4 down\n", 6)] {
        let spec = PathSpec::parse(text).map_err(|e| e.to_string())?;
        if spec.family_size() != want as u128 {
            return Err(format!("family size {} != {want}", spec.family_size()));
        }
        let trees: BTreeSet<Vec<(u32, u32)>> =
            (0..want as u64).map(|s| join_edges(&gen_join_family(&spec.with_seed(s)).expect("family").mesh)).collect();
        if trees.len() != want {
            return Err(format!("{} distinct trees, expected {want}", trees.len()));
        }
        counts.push(trees.len());
    }
    Ok(format!("{} and {} pairwise-distinct labeled join trees", counts[0], counts[1]))
}

fn heap_suite() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seq in 0..10_000 {
        let n = 40;
        let o = HeightOrder::new((0..n).map(|i| OrderKey::new(rng.gen_range(0..15) as f64, i)).collect());
        let key = |v: u32| *o.key(v);
        let mut f = HeapForest::new();
        let mut heaps = [HeapHandle::EMPTY; 3];
        let mut refs: [Vec<u32>; 3] = Default::default();
        for _ in 0..rng.gen_range(1..30) {
            let h = rng.gen_range(0..3);
            match rng.gen_range(0..4) {
                0 | 1 => {
                    let x = rng.gen_range(0..n);
                    f.insert(&mut heaps[h], x, &o);
                    refs[h].push(x);
                }
                2 => {
                    let got = f.delete_max(&mut heaps[h], &o);
                    refs[h].sort_by(|&a, &b| key(a).cmp_raw(&key(b)));
                    if got != refs[h].pop() {
                        return Err(format!("sequence {seq}: delete-max mismatch"));
                    }
                }
                _ => {
                    let g = (h + 1) % 3;
                    heaps[h] = f.merge(heaps[h], heaps[g], &o);
                    heaps[g] = HeapHandle::EMPTY;
                    let moved = std::mem::take(&mut refs[g]);
                    refs[h].extend(moved);
                }
            }
            for i in 0..3 {
                let want = refs[i].iter().copied().max_by(|&a, &b| key(a).cmp_raw(&key(b)));
                if f.peek_max(&heaps[i]) != want {
                    return Err(format!("sequence {seq}: find-max mismatch"));
                }
            }
        }
    }
    Ok(())
}

fn union_find_suite() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for round in 0..200 {
        let n = rng.gen_range(1..60u32);
        let mut uf = UnionFind::new(n as usize);
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
        for _ in 0..rng.gen_range(0..n + 5) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            uf.union(a, b);
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let mut label = vec![u32::MAX; n as usize];
        for s in 0..n {
            if label[s as usize] != u32::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s as usize] = s;
            while let Some(v) = stack.pop() {
                for &w in &adj[v as usize] {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = s;
                        stack.push(w);
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if uf.same(a, b) != (label[a as usize] == label[b as usize]) {
                    return Err(format!("round {round}: {a}, {b} disagree"));
                }
            }
        }
    }
    Ok(())
}

fn erase_suite() -> Result<(), String> {
    let t = MergeTree::new(vec![1, 2, 3, 4, 5], vec![(1, 3), (2, 3), (3, 4), (5, 4)]);
    let mut d = DynTree::from_merge_tree(&t);
    if erase(&mut d, 3).is_ok() {
        return Err("erased a node with two children".into());
    }
    erase(&mut d, 1).map_err(|e| e.to_string())?;
    erase(&mut d, 3).map_err(|e| e.to_string())?;
    if d.to_merge_tree().edges != vec![(2, 4), (5, 4)] {
        return Err(format!("unexpected tree {:?}", d.to_merge_tree().edges));
    }
    erase(&mut d, 5).map_err(|e| e.to_string())?;
    erase(&mut d, 4).map_err(|e| e.to_string())?;
    if d.to_merge_tree().edges != Vec::<(u32, u32)>::new() || d.len() != 1 {
        return Err("root erase left the wrong tree".into());
    }
    Ok(())
}

/// Components of the upper and lower link subgraphs, by graph search over
/// neighbour pairs sharing a face with `v`.
fn brute_link(m: &ScalarMesh, o: &HeightOrder, v: u32) -> (u32, u32) {
    let nb = m.neighbors(v);
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &f in m.vertex_faces(v) {
        let others: Vec<u32> = m.faces()[f as usize].iter().copied().filter(|&x| x != v).collect();
        adj.entry(others[0]).or_default().push(others[1]);
        adj.entry(others[1]).or_default().push(others[0]);
    }
    let count = |up: bool| {
        let side: Vec<u32> = nb.iter().copied().filter(|&w| o.higher(w, v) == up).collect();
        let mut seen = BTreeSet::new();
        let mut comps = 0;
        for &s in &side {
            if !seen.insert(s) {
                continue;
            }
            comps += 1;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in adj.get(&x).into_iter().flatten() {
                    if side.contains(&y) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        comps
    };
    (count(true), count(false))
}

fn link_suite() -> Result<(), String> {
    let mut checked = 0;
    for (name, m) in grids(3000..3050) {
        let o = m.height_order();
        let s = classify_mesh(&m, &o);
        let (rows, cols) = m.grid_dims().expect("grid");
        for v in 0..(rows * cols) as u32 {
            let c = s.class[v as usize];
            let (u, d) = brute_link(&m, &o, v);
            let kind = match (u, d) {
                (0, _) => Kind::Maximum,
                (_, 0) => Kind::Minimum,
                (1, 1) => Kind::Regular,
                _ => Kind::Saddle,
            };
            if (c.morse_up, c.morse_down, c.kind) != (u, d, kind) {
                return Err(format!("{name}: vertex {v} classified {c:?}, brute force ({u}, {d})"));
            }
            checked += 1;
        }
    }
    if checked == 0 {
        return Err("nothing checked".into());
    }
    Ok(())
}

fn c8_units() -> Outcome {
    heap_suite().map_err(|e| format!("heap: {e}"))?;
    union_find_suite().map_err(|e| format!("union-find: {e}"))?;
    erase_suite().map_err(|e| format!("erase: {e}"))?;
    link_suite().map_err(|e| format!("link: {e}"))?;
    Ok("heap (10^4 sequences), union-find, erase, link classification".into())
}

fn run(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_contour")).args(args).current_dir(dir).output().expect("spawn contour");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn strip_wall_time(s: &str) -> String {
    s.lines().filter(|l| !l.contains("wall_time_ms")).collect::<Vec<_>>().join("\n")
}

fn c9_determinism() -> Outcome {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let snapshot = |tag: &str| -> Result<Vec<Vec<u8>>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let d = dir.path();
        let tp = data.join("twinpeaks.tmesh");
        let tp = tp.to_str().expect("utf-8 path");
        let spec = data.join("two_paths.shrub");
        let spec = spec.to_str().expect("utf-8 path");
        let cmds: Vec<Vec<&str>> = vec![
            vec!["compute", "--alg", "paper", tp, "--out-tree", "t.json", "--out-report", "r.json", "--log-comparisons", "c.log", "--log-heap-ops", "h.jsonl"],
            vec!["compute", "--alg", "csa", tp, "--out-tree", "t.dot", "--out-report", "r2.json"],
            vec!["compute", "--alg", "oracle", tp],
            vec!["compute", "--tree", "split", tp],
            vec!["validate", "--random", "8x8", "--count", "20", "--seed", "1"],
            vec!["bench", "--from", "6", "--to", "9"],
            vec!["bench", "--family", "path", "--from", "4", "--to", "7", "--seed", "3"],
            vec!["generate", spec, "--seed", "2"],
        ];
        let mut out = Vec::new();
        for c in &cmds {
            let (code, stdout) = run(c, d);
            if code != 0 {
                return Err(format!("{tag}: `{}` exited {code}", c.join(" ")));
            }
            out.push(stdout);
        }
        for f in ["t.json", "c.log", "h.jsonl", "t.dot"] {
            out.push(std::fs::read(d.join(f)).map_err(|e| e.to_string())?);
        }
        for f in ["r.json", "r2.json"] {
            let s = std::fs::read_to_string(d.join(f)).map_err(|e| e.to_string())?;
            out.push(strip_wall_time(&s).into_bytes());
        }
        Ok(out)
    };
    let a = snapshot("first run")?;
    let b = snapshot("second run")?;
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        if x != y {
            return Err(format!("output {i} differs between runs"));
        }
    }
    Ok(format!("{} outputs byte-identical across two runs", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", c1_oracle),
        ("comparison locality", c2_locality),
        ("cut-once and output size", c3_cut_once),
        ("heap path property", c4_heap_paths),
        ("running-time bounds", c5_bounds),
        ("separation scaling", c6_separation),
        ("family distinctness", c7_distinct),
        ("unit suites", c8_units),
        ("determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
