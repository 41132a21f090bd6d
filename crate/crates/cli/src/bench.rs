use contour_core::baseline::sorted_sweep_join_tree;
use contour_core::critical::classify_mesh;
use contour_core::decomp::{verify_bound, BoundReport};
use contour_core::lbgen::{gen_join_family, PathSpec};
use contour_core::painted_join::{build, BuildOptions};
use contour_core::Error;

use crate::{write, BenchArgs, CliResult, Failure, Family};

/// One CSV row per exponent k, for a family with t = 2^k critical points.
pub fn bench_csv(family: Family, from: u32, to: u32, seed: u64, c1: f64, c2: f64) -> CliResult<(String, bool)> {
    let mut out = String::from(BoundReport::CSV_HEADER);
    out.push('\n');
    let mut ok = true;
    for k in from..=to {
        if !(2..=24).contains(&k) {
            return Err(Failure::Core(Error::Parse(format!("exponent {k} outside 2..=24"))));
        }
        let spec = match family {
            Family::Balanced => PathSpec::balanced(k as usize - 1),
            Family::Path => PathSpec::single_path(1 << (k - 1)).with_seed(seed),
        };
        let g = gen_join_family(&spec)?;
        let order = g.mesh.height_order();
        let s = classify_mesh(&g.mesh, &order);
        let b = build(&s, &order, BuildOptions::default());
        let r = verify_bound(&b.tree, &b.trace, c1, c2)?;
        ok &= r.ok;
        order.reset_count();
        sorted_sweep_join_tree(&s, &order);
        out.push_str(&r.csv_row(g.mesh.vertex_count(), order.count()));
        out.push('\n');
    }
    Ok((out, ok))
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    let (c1, c2) = match args.consts[..] {
        [c] => (c, c),
        [a, b] => (a, b),
        _ => return Err(Failure::Core(Error::Parse("--const takes one or two values".into()))),
    };
    let (csv, ok) = bench_csv(args.family, args.from, args.to, args.seed, c1, c2)?;
    write(args.out.as_deref(), &csv)?;
    if !ok {
        return Err(Failure::Mismatch("a bound ratio exceeds its constant".into()));
    }
    Ok(())
}
