//! Splitting loops to hand indices to hardware.
//!
//! A lift turns one loop into an (outer, inner) pair: the outer index can
//! then name a processor, a thread group, or a cache block. Results never
//! change — only the iteration structure does.
//!
//! Run with `cargo run --example dimension_lifting`.

use moa::lift::{build_blocked, build_col_lifted, build_row_lifted, lift, LiftSpec};
use moa::onf::{build_gemm_nest, eval_nest, render_c, trace_nest, Pragmas};

fn main() -> moa::Result<()> {
    let (m, n, p) = (8i64, 8i64, 8i64);
    let a: Vec<f64> = (0..m * n).map(|x| (x % 7) as f64 - 3.0).collect();
    let b: Vec<f64> = (0..n * p).map(|x| (x % 5) as f64 - 2.0).collect();
    let run = |nest: &moa::onf::LoopNest| -> moa::Result<Vec<f64>> {
        let mut c = vec![0.0f64; (m * p) as usize];
        eval_nest(nest, &a, &b, &mut c)?;
        Ok(c)
    };

    let base = build_gemm_nest(m, n, p)?;
    let reference = run(&base)?;

    // Generic lift: split i into 4 groups of 2.
    let split = lift(&base, &LiftSpec::new("i", 2, "grp", "loc"))?;
    assert_eq!(run(&split)?, reference);
    println!(
        "lift i by 2: loops {:?}, same result",
        split
            .loops
            .iter()
            .map(|l| l.var.as_str())
            .collect::<Vec<_>>()
    );

    // Row split: the outer k loop indexes processors. Its write sets are
    // pairwise disjoint, which is exactly the license to run it in
    // parallel.
    let rows = build_row_lifted(m, n, p, 4)?;
    assert_eq!(run(&rows)?, reference);
    let groups = trace_nest(&rows)?.write_sets_by_var("k");
    let disjoint = groups
        .iter()
        .enumerate()
        .all(|(gi, (_, l))| groups.iter().skip(gi + 1).all(|(_, r)| l.is_disjoint(r)));
    println!(
        "row split np=4: {} partitions, disjoint writes: {disjoint}",
        groups.len()
    );
    let pragmas = Pragmas::none().above("k", "#pragma acc parallel loop");
    print!("\n{}", render_c(&rows, "ip_rows", &pragmas)?);

    // Column split: groups of consecutive columns map to vector lanes.
    let cols = build_col_lifted(m, n, p, 4)?;
    assert_eq!(run(&cols)?, reference);
    print!("\n{}", render_c(&cols, "ip_cols", &Pragmas::none())?);

    // Full blocking: all three loops split, block loops hoisted outward.
    // Per output component the contraction order is unchanged, so even the
    // float results are bitwise identical.
    let blocked = build_blocked(m, n, p, 4, 2, 4)?;
    assert_eq!(run(&blocked)?, reference);
    println!(
        "\nblocked 4x2x4: loops {:?}, {} iterations, bitwise-equal result",
        blocked
            .loops
            .iter()
            .map(|l| l.var.as_str())
            .collect::<Vec<_>>(),
        blocked.iteration_count()?
    );
    print!("\n{}", render_c(&blocked, "ip_blocked", &Pragmas::none())?);
    Ok(())
}
