use contour_core::assembly::compute_contour_tree;
use contour_core::baseline::{csa_contour_tree, sorted_sweep_join_tree, sweep_oracle};
use contour_core::critical::{classify_graph, classify_mesh, graph_order};
use contour_core::decomp::verify_bound;
use contour_core::fixtures::random_grid_values;
use contour_core::mesh::{grid_to_string, parse_grid_values, Format};
use contour_core::painted_join::{build, heap_path_violations, locality_violations, BuildOptions};
use contour_core::{parse_input, Error, Input, ScalarMesh};

use crate::{read, write, CliResult, Failure, ValidateArgs};

fn mismatch<T>(msg: String) -> CliResult<T> {
    Err(Failure::Mismatch(msg))
}

fn check_mesh(mesh: &ScalarMesh, c1: f64, c2: f64) -> CliResult<()> {
    let out = compute_contour_tree(mesh, BuildOptions::all())?;
    for (i, pb) in out.builds.iter().enumerate() {
        let tr = &pb.build.trace;
        let bad = locality_violations(&pb.build.tree, &tr.comparison_log);
        if let Some((u, v)) = bad.first() {
            return mismatch(format!("piece {i}: comparison {u}~{v} is not ancestor-descendant"));
        }
        let hp = heap_path_violations(&pb.build.tree, &tr.heap_snapshots);
        if hp > 0 {
            return mismatch(format!("piece {i}: {hp} heaps leave a leaf-to-root path"));
        }
        if tr.ripeness_violations + tr.stack_violations > 0 {
            return mismatch(format!("piece {i}: ripeness or stack audit failed"));
        }
        let r = verify_bound(&pb.build.tree, tr, c1, c2)?;
        if !r.ok {
            return mismatch(format!("piece {i}: bound ratios {:.3}, {:.3} exceed the constants", r.ratio1, r.ratio2));
        }
    }
    if out.counters.max_face_cuts > 1 {
        return mismatch(format!("a face was cut {} times", out.counters.max_face_cuts));
    }
    if out.counters.size_ratio > 4.0 {
        return mismatch(format!("cut output is {:.2}x the input", out.counters.size_ratio));
    }
    let order = mesh.height_order();
    let s = classify_mesh(mesh, &order);
    let (csa, _) = csa_contour_tree(&s, &order)?;
    let oracle = sweep_oracle(mesh)?;
    if out.tree != oracle {
        return mismatch(format!("paper {} != oracle {}", out.tree.canonical(), oracle.canonical()));
    }
    if csa != oracle {
        return mismatch(format!("csa {} != oracle {}", csa.canonical(), oracle.canonical()));
    }
    Ok(())
}

/// Checks one input source against every algorithm and invariant.
pub fn check_source(src: &str, c1: f64, c2: f64) -> CliResult<()> {
    match parse_input(src)? {
        Input::Mesh(m) => check_mesh(&m, c1, c2),
        Input::Graph(g) => {
            let order = graph_order(&g);
            let s = classify_graph(g.heights.len(), &g.edges, &order);
            let b = build(&s, &order, BuildOptions { log_comparisons: true, audit_heaps: true, ..Default::default() });
            let keep = |v: u32| s.is_critical(v);
            let csa = sorted_sweep_join_tree(&s, &order).restrict(&keep);
            if b.tree != csa {
                return mismatch("paper and csa join trees differ".into());
            }
            if !locality_violations(&b.tree, &b.trace.comparison_log).is_empty() {
                return mismatch("non-local comparison in join build".into());
            }
            Ok(())
        }
    }
}

fn fails(src: &str, c1: f64, c2: f64) -> bool {
    matches!(check_source(src, c1, c2), Err(Failure::Mismatch(_)))
}

/// Crop grid rows and columns while the instance keeps failing.
pub fn minimize(src: &str, c1: f64, c2: f64) -> String {
    if contour_core::mesh::detect_format(src).ok() != Some(Format::Grid) {
        return src.to_string();
    }
    let Ok((mut rows, mut cols, mut vals)) = parse_grid_values(src) else {
        return src.to_string();
    };
    loop {
        let mut shrunk = false;
        for cut in 0..4 {
            let (r2, c2d, v2) = match cut {
                0 | 1 if rows > 1 => {
                    let skip = if cut == 0 { 0 } else { rows - 1 };
                    let v: Vec<f64> = (0..rows)
                        .filter(|&r| r != skip)
                        .flat_map(|r| vals[r * cols..(r + 1) * cols].iter().copied())
                        .collect();
                    (rows - 1, cols, v)
                }
                2 | 3 if cols > 1 => {
                    let skip = if cut == 2 { 0 } else { cols - 1 };
                    let v: Vec<f64> = (0..rows * cols).filter(|i| i % cols != skip).map(|i| vals[i]).collect();
                    (rows, cols - 1, v)
                }
                _ => continue,
            };
            let cand = grid_to_string(r2, c2d, &v2);
            if fails(&cand, c1, c2) {
                (rows, cols, vals) = (r2, c2d, v2);
                shrunk = true;
            }
        }
        if !shrunk {
            return grid_to_string(rows, cols, &vals);
        }
    }
}

fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || Failure::Core(Error::Parse(format!("--random expects RxC, got '{s}'")));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let r: usize = r.parse().map_err(|_| bad())?;
    let c: usize = c.parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(bad());
    }
    Ok((r, c))
}

pub fn validate(args: &ValidateArgs) -> CliResult<()> {
    let (c1, c2) = match args.consts[..] {
        [c] => (c, c),
        [a, b] => (a, b),
        _ => return Err(Failure::Core(Error::Parse("--const takes one or two values".into()))),
    };
    let sources: Vec<(String, String)> = match (&args.input, &args.random) {
        (Some(p), None) => {
            let b = read(p)?;
            let s = String::from_utf8(b).map_err(|_| Failure::Core(Error::Parse("input is not UTF-8".into())))?;
            vec![(p.display().to_string(), s)]
        }
        (None, Some(d)) => {
            let (r, c) = parse_dims(d)?;
            (0..args.count)
                .map(|i| {
                    let seed = args.seed.wrapping_add(i);
                    (format!("random {r}x{c} seed {seed}"), grid_to_string(r, c, &random_grid_values(r, c, seed)))
                })
                .collect()
        }
        _ => return Err(Failure::Core(Error::Parse("give either an input file or --random".into()))),
    };
    for (name, src) in &sources {
        match check_source(src, c1, c2) {
            Ok(()) => {}
            Err(Failure::Mismatch(m)) => {
                let small = minimize(src, c1, c2);
                write(Some(&args.dump), &small)?;
                return Err(Failure::Mismatch(format!("{name}: {m} (minimized instance in {})", args.dump.display())));
            }
            Err(e) => return Err(e),
        }
    }
    println!("validated {} instance(s)", sources.len());
    Ok(())
}
