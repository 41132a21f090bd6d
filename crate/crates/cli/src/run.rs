use std::fmt::Write as _;
use std::time::Instant;

use contour_core::assembly::compute_contour_tree;
use contour_core::baseline::{csa_contour_tree, sorted_sweep_join_tree, sorted_sweep_split_tree, sweep_oracle};
use contour_core::critical::{classify_graph, classify_mesh, graph_order};
use contour_core::painted_join::{build, split_tree, BuildOptions, JoinBuild};
use contour_core::tree::{ContourTree, MergeTree};
use contour_core::{parse_input, Error, Input};

use crate::report::{ReportCounters, RunReport};
use crate::{read, write, Alg, CliResult, ComputeArgs, Failure, TreeKind};

/// Result of one compute run, before serialization.
pub struct Computed {
    pub tree: ContourTree,
    pub kind: TreeKind,
    pub heights: Vec<f64>,
    pub counters: ReportCounters,
    pub comparison_log: Vec<(u32, u32)>,
    pub heap_ops: Vec<String>,
}

fn split_edges(t: &MergeTree) -> ContourTree {
    ContourTree::new(t.nodes.clone(), t.edges.iter().map(|&(c, p)| (p, c)).collect())
}

fn from_build(b: &JoinBuild, split: bool, counters: &mut ReportCounters) -> ContourTree {
    counters.comparisons = b.trace.comparisons;
    counters.heap_cost = b.trace.heap_cost;
    if split {
        split_edges(&b.tree)
    } else {
        b.tree.as_contour_edges()
    }
}

fn heap_lines(b: &JoinBuild, piece: usize) -> Vec<String> {
    b.trace
        .heap_ops
        .iter()
        .map(|op| {
            let mut s = format!("{{\"piece\":{piece},");
            let body = serde_json::to_string(op).expect("serializable");
            s.push_str(&body[1..]);
            s
        })
        .collect()
}

pub fn compute_input(src: &str, alg: Alg, kind: TreeKind, opts: BuildOptions) -> CliResult<Computed> {
    let input = parse_input(src)?;
    let mut counters = ReportCounters::default();
    let mut comparison_log = Vec::new();
    let mut heap_ops = Vec::new();
    let (tree, kind, heights) = match input {
        Input::Graph(g) => {
            let order = graph_order(&g);
            let s = classify_graph(g.heights.len(), &g.edges, &order);
            counters.local_comparisons = order.count();
            order.reset_count();
            counters.n = g.heights.len();
            let tree = match alg {
                Alg::Paper => {
                    let b = build(&s, &order, opts);
                    comparison_log = b.trace.comparison_log.clone();
                    heap_ops = heap_lines(&b, 0);
                    from_build(&b, false, &mut counters)
                }
                Alg::Csa => {
                    let j = sorted_sweep_join_tree(&s, &order);
                    counters.comparisons = order.count();
                    j.restrict(&|v| s.is_critical(v)).as_contour_edges()
                }
                Alg::Oracle => {
                    return Err(Failure::Core(Error::Parse("the oracle needs a triangulated input".into())));
                }
            };
            (tree, TreeKind::Join, g.heights)
        }
        Input::Mesh(mesh) => {
            counters.n = mesh.vertex_count();
            let heights = mesh.heights().to_vec();
            let tree = match (alg, kind) {
                (Alg::Paper, TreeKind::Contour) => {
                    let out = compute_contour_tree(&mesh, opts)?;
                    let c = &out.counters;
                    counters.comparisons = c.comparisons;
                    counters.local_comparisons = c.local_comparisons;
                    counters.heap_cost = c.heap_cost;
                    counters.pieces = c.pieces;
                    counters.cuts = c.cuts;
                    counters.synthetic_vertices = c.synthetic_vertices;
                    for (i, pb) in out.builds.iter().enumerate() {
                        comparison_log.extend(pb.build.trace.comparison_log.iter().copied());
                        heap_ops.extend(heap_lines(&pb.build, i));
                    }
                    out.tree
                }
                (Alg::Paper, k) => {
                    let order = mesh.height_order();
                    let s = classify_mesh(&mesh, &order);
                    counters.local_comparisons = order.count();
                    let split = k == TreeKind::Split;
                    let b = if split { split_tree(&s, &order, opts) } else { build(&s, &order, opts) };
                    comparison_log = b.trace.comparison_log.clone();
                    heap_ops = heap_lines(&b, 0);
                    from_build(&b, split, &mut counters)
                }
                (Alg::Csa, k) => {
                    let order = mesh.height_order();
                    let s = classify_mesh(&mesh, &order);
                    counters.local_comparisons = order.count();
                    order.reset_count();
                    let keep = |v: u32| s.is_critical(v);
                    let t = match k {
                        TreeKind::Contour => csa_contour_tree(&s, &order)?.0,
                        TreeKind::Join => sorted_sweep_join_tree(&s, &order).restrict(&keep).as_contour_edges(),
                        TreeKind::Split => {
                            let j = sorted_sweep_join_tree(&s, &order);
                            let asc: Vec<u32> = j.sweep.iter().rev().copied().collect();
                            split_edges(&sorted_sweep_split_tree(&s, asc).restrict(&keep))
                        }
                    };
                    counters.comparisons = order.count();
                    t
                }
                (Alg::Oracle, TreeKind::Contour) => sweep_oracle(&mesh)?,
                (Alg::Oracle, _) => {
                    return Err(Failure::Core(Error::Parse("the oracle computes contour trees only".into())));
                }
            };
            (tree, kind, heights)
        }
    };
    counters.t = tree.nodes.len();
    Ok(Computed { tree, kind, heights, counters, comparison_log, heap_ops })
}

pub fn kind_name(k: TreeKind) -> &'static str {
    match k {
        TreeKind::Contour => "contour",
        TreeKind::Join => "join",
        TreeKind::Split => "split",
    }
}

pub fn alg_name(a: Alg) -> &'static str {
    match a {
        Alg::Paper => "paper",
        Alg::Csa => "csa",
        Alg::Oracle => "oracle",
    }
}

pub fn compute(args: &ComputeArgs) -> CliResult<()> {
    let bytes = read(&args.input)?;
    let src = std::str::from_utf8(&bytes).map_err(|_| Failure::Core(Error::Parse("input is not UTF-8".into())))?;
    let opts = BuildOptions {
        log_comparisons: args.log_comparisons.is_some(),
        log_heap_ops: args.log_heap_ops.is_some(),
        ..Default::default()
    };
    let start = Instant::now();
    let c = compute_input(src, args.alg, args.tree, opts)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let h = |v: u32| c.heights[v as usize];
    let dot = args.out_tree.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "dot"));
    let text = if dot { c.tree.to_dot(&h) } else { c.tree.to_json(&h) };
    write(args.out_tree.as_deref(), &text)?;
    if let Some(p) = &args.log_comparisons {
        let mut s = String::new();
        for (u, v) in &c.comparison_log {
            let _ = writeln!(s, "{u} {v}");
        }
        write(Some(p), &s)?;
    }
    if let Some(p) = &args.log_heap_ops {
        let mut s = c.heap_ops.join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        write(Some(p), &s)?;
    }
    if let Some(p) = &args.out_report {
        let mut r = RunReport::new(&bytes, alg_name(args.alg), kind_name(c.kind), &c.tree, c.counters);
        r.wall_time_ms = elapsed;
        let csv = p.extension().is_some_and(|e| e == "csv");
        write(Some(p), &if csv { r.to_csv() } else { r.to_json() })?;
    }
    Ok(())
}
