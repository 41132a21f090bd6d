use contour_core::assembly::compute_contour_tree;
use contour_core::baseline::{csa_contour_tree, sweep_oracle};
use contour_core::critical::classify_mesh;
use contour_core::decomp::verify_bound;
use contour_core::fixtures::{self, TP_P1, TP_P2, TP_RING, TP_S};
use contour_core::painted_join::{build, split_tree, BuildOptions};
use contour_core::tree::ContourTree;
use contour_core::{load_mesh, Error, ScalarMesh};

fn paper(m: &ScalarMesh) -> ContourTree {
    compute_contour_tree(m, BuildOptions::default()).unwrap().tree
}

fn csa(m: &ScalarMesh) -> ContourTree {
    let o = m.height_order();
    csa_contour_tree(&classify_mesh(m, &o), &o).unwrap().0
}

#[test]
fn twin_peaks_frozen() {
    let m = fixtures::twin_peaks();
    let want = ContourTree::new(vec![TP_P1, TP_P2, TP_S, TP_RING], vec![(TP_P1, TP_S), (TP_P2, TP_S), (TP_S, TP_RING)]);
    assert_eq!(paper(&m), want);
    assert_eq!(csa(&m), want);
    assert_eq!(sweep_oracle(&m).unwrap(), want);
}

#[test]
fn small_grid_frozen() {
    // peaks 9 and 8 meet at the 3 cell; the diagonal misses the 5
    let m = load_mesh("GRID 3 3\n9 1 8\n2 5 3\n1 1 1\n").unwrap();
    let t = paper(&m);
    assert_eq!(t.joins_and_splits(), (1, 0));
    assert_eq!(t.nodes.len(), 4);
    assert_eq!(t.nodes, vec![0, 2, 5, 9]);
    assert_eq!(t.edges, vec![(0, 5), (2, 5), (5, 9)]);
    assert_eq!(t, sweep_oracle(&m).unwrap());
}

#[test]
fn crater_and_monkey_agree() {
    for m in [fixtures::crater(), fixtures::monkey_saddle()] {
        let o = sweep_oracle(&m).unwrap();
        assert_eq!(paper(&m), o);
        assert_eq!(csa(&m), o);
    }
}

#[test]
fn split_tree_is_join_of_inverse() {
    let m = fixtures::crater();
    let o = m.height_order();
    let s = classify_mesh(&m, &o);
    let st = split_tree(&s, &o, BuildOptions::default()).tree;
    let j = build(&s.inverted(), &contour_core::HeightOrder::with_inversion(m.keys().to_vec(), true), BuildOptions::default());
    assert_eq!(st, j.tree);
}

#[test]
fn staircase_counters_frozen() {
    let out = compute_contour_tree(&fixtures::staircase(8), BuildOptions::default()).unwrap();
    assert_eq!(out.counters.pieces, 2);
    assert_eq!(out.counters.max_face_cuts, 1);
    assert_eq!(out.counters.synthetic_vertices, out.rain.cuts.iter().map(|c| 2 * c.crossed_faces).sum::<usize>());
    assert!(out.counters.size_ratio <= 4.0);
}

#[test]
fn bounds_hold_on_pieces() {
    for seed in 0..20 {
        let (r, c) = fixtures::corpus_dims(seed);
        let out = compute_contour_tree(&fixtures::random_grid(r, c, seed), BuildOptions::default()).unwrap();
        for pb in &out.builds {
            assert!(verify_bound(&pb.build.tree, &pb.build.trace, 8.0, 8.0).unwrap().ok);
        }
    }
}

#[test]
fn oracle_policy_and_parse_errors() {
    assert!(matches!(sweep_oracle(&fixtures::random_grid(30, 30, 1)), Err(Error::OracleSize { .. })));
    assert!(matches!(load_mesh("GRID 2 2\n1 2 3\n"), Err(Error::Parse(_)) | Err(Error::Validation(_))));
    assert!(matches!(load_mesh("NOPE"), Err(Error::Parse(_))));
}

#[test]
fn pipeline_is_deterministic() {
    let m = fixtures::random_grid(9, 9, 5);
    let a = compute_contour_tree(&m, BuildOptions::all()).unwrap();
    let b = compute_contour_tree(&m, BuildOptions::all()).unwrap();
    assert_eq!(a.tree, b.tree);
    assert_eq!(a.rain.dump(), b.rain.dump());
    assert_eq!(serde_json::to_string(&a.counters).unwrap(), serde_json::to_string(&b.counters).unwrap());
    for (x, y) in a.builds.iter().zip(&b.builds) {
        assert_eq!(x.build.trace.comparison_log, y.build.trace.comparison_log);
    }
}
