//! Watching memory access patterns without running any arithmetic.
//!
//! The offset stream of a nest depends only on its loop structure, so the
//! tracer can prove access properties — contiguity, disjointness — that
//! timing can only suggest.
//!
//! Run with `cargo run --example access_traces`.

use moa::algebra::gemm_moa_traced;
use moa::lift::build_blocked;
use moa::onf::{build_gemm_nest, trace_nest};
use moa::DenseArray;

fn main() -> moa::Result<()> {
    let (n, p) = (3usize, 4usize);

    // The contiguous product touches B a full row at a time: within one
    // (i, k) step the read offsets are consecutive.
    let a = DenseArray::from_rows(vec![vec![1i64, 2, 3], vec![4, 5, 6]])?;
    let b = DenseArray::from_rows(vec![
        vec![1i64, 2, 3, 4],
        vec![5, 6, 7, 8],
        vec![9, 10, 11, 12],
    ])?;
    let (_, steps) = gemm_moa_traced(&a, &b)?;
    for step in steps.iter().take(3) {
        println!("i={} k={}: B reads {:?}", step.i, step.k, step.right_reads);
    }

    // The row-column design reads B down a column: same offsets, stride p.
    // That stream is what the contiguous form eliminates.
    let strided: Vec<usize> = (0..n).map(|k| k * p).collect();
    println!("row-column design would read B at {strided:?} (stride {p}) for C[0,0]");

    // The nest tracer shows the same thing for the derived loop nests,
    // including after blocking: every innermost sweep over B is a
    // consecutive run.
    for (name, nest) in [
        ("ip", build_gemm_nest(4, 4, 8)?),
        ("blocked 2x2x4", build_blocked(4, 4, 8, 2, 2, 4)?),
    ] {
        let trace = trace_nest(&nest)?;
        let runs = trace.right_runs_per_innermost_sweep();
        let contiguous = runs
            .iter()
            .all(|run| run.windows(2).all(|w| w[1] == w[0] + 1));
        println!(
            "{name}: {} sweeps of length {}, all consecutive: {contiguous}",
            runs.len(),
            runs.first().map_or(0, Vec::len),
        );
    }

    // Transform soundness is also an offset statement: lifting must not
    // change the multiset of touched offsets.
    let base = trace_nest(&build_gemm_nest(4, 4, 8)?)?;
    let blocked = trace_nest(&build_blocked(4, 4, 8, 2, 2, 4)?)?;
    println!(
        "offset multisets preserved under blocking: {}",
        base.offset_multisets() == blocked.offset_multisets()
    );
    Ok(())
}
