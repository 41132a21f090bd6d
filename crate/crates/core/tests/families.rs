use std::collections::BTreeSet;

use contour_core::assembly::compute_contour_tree;
use contour_core::baseline::sweep_oracle;
use contour_core::critical::{classify_all, classify_mesh, Kind};
use contour_core::decomp::{heap_sets, leaf_assignment, max_path_decomposition, verify_bound};
use contour_core::lbgen::{gen_contour_family, gen_join_family, PathSpec};
use contour_core::painted_join::{build, BuildOptions, JoinBuild};
use contour_core::{Error, ScalarMesh};

fn join(m: &ScalarMesh) -> JoinBuild {
    let o = m.height_order();
    build(&classify_mesh(m, &o), &o, BuildOptions::default())
}

#[test]
fn balanced_bound_rows_frozen() {
    let rows: Vec<(usize, u64, f64)> = (7..10)
        .map(|h| {
            let g = gen_join_family(&PathSpec::balanced(h)).unwrap();
            let b = join(&g.mesh);
            let r = verify_bound(&b.tree, &b.trace, 8.0, 8.0).unwrap();
            (r.t, r.comparisons, (r.heap_cost * 1000.0).round() / 1000.0)
        })
        .collect();
    assert_eq!(rows, vec![(256, 262, 567.249), (512, 523, 1138.667), (1024, 1035, 2281.657)]);
}

#[test]
fn saddles_stay_within_their_path() {
    let specs = [
        PathSpec::balanced(5),
        PathSpec::single_path(12).with_seed(4),
        PathSpec::parse("SHRUB 3\n0 - 4 down\n1 0 3 down\n2 1 2 down\n").unwrap().with_seed(7),
    ];
    for spec in specs {
        let g = gen_join_family(&spec).unwrap();
        let b = join(&g.mesh);
        let h = heap_sets(&b.tree, &leaf_assignment(&b.trace));
        for (&v, &p) in &g.saddle_path {
            assert!(h[&v] <= g.path_len[p], "saddle {v}: |H| {} > path {}", h[&v], g.path_len[p]);
        }
    }
}

#[test]
fn critical_count_matches_paths() {
    for spec in [PathSpec::balanced(4), PathSpec::single_path(6), PathSpec::parse("SHRUB 2\n0 - 3 down\n1 0 2 down\n").unwrap()] {
        let g = gen_join_family(&spec).unwrap();
        let critical = classify_all(&g.mesh).iter().filter(|c| c.kind != Kind::Regular).count();
        let joins = g.path_len.iter().map(|l| l - 1).sum::<usize>();
        // one apex per path, one join per non-apex path vertex, one boundary
        assert_eq!(critical, g.path_len.len() + joins + 1);
    }
}

#[test]
fn balanced_pmax_cost_linear() {
    let per_t: Vec<f64> = (4..9)
        .map(|h| {
            let g = gen_join_family(&PathSpec::balanced(h)).unwrap();
            let b = join(&g.mesh);
            let hs = heap_sets(&b.tree, &leaf_assignment(&b.trace));
            max_path_decomposition(&b.tree, &hs).cost() / b.tree.nodes.len() as f64
        })
        .collect();
    assert!(per_t.iter().all(|&c| c < 2.0), "{per_t:?}");
}

#[test]
fn alternating_family_distinct_contour_trees() {
    let spec = PathSpec::parse("SHRUB 2\n0 - 3 down\n1 0 3 up\n").unwrap();
    let trees: BTreeSet<String> = (0..4)
        .map(|s| {
            let m = gen_contour_family(&spec.with_seed(s)).unwrap().mesh;
            let t = compute_contour_tree(&m, BuildOptions::default()).unwrap().tree;
            assert_eq!(t, sweep_oracle(&m).unwrap());
            t.canonical()
        })
        .collect();
    assert_eq!(trees.len(), 4);
}

#[test]
fn all_down_contour_family_is_join_family() {
    let spec = PathSpec::parse("SHRUB 2\n0 - 3 down\n1 0 2 down\n").unwrap().with_seed(1);
    let a = gen_join_family(&spec).unwrap().mesh;
    let b = gen_contour_family(&spec).unwrap().mesh;
    assert_eq!(a.to_tmesh(), b.to_tmesh());
}

#[test]
fn spec_errors() {
    let up = PathSpec::parse("SHRUB 2\n0 - 2 down\n1 0 2 up\n").unwrap();
    assert!(matches!(gen_join_family(&up), Err(Error::Spec(_))));
    let bad_perm = PathSpec::parse("SHRUB 1\n0 - 3 down\nPERM\n0 1 1\n").unwrap();
    assert!(matches!(gen_join_family(&bad_perm), Err(Error::Spec(_))));
    let two_roots = PathSpec::parse("SHRUB 2\n0 - 2 down\n1 - 2 down\n").unwrap();
    assert!(matches!(gen_join_family(&two_roots), Err(Error::Spec(_))));
    assert!(matches!(PathSpec::parse("SHRUB 1\n0 - 2 sideways\n"), Err(Error::Parse(_))));
}
