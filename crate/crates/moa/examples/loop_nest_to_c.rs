//! From the array-level product to an executable loop nest to C source.
//!
//! Run with `cargo run --example loop_nest_to_c`.

use moa::algebra::gemm_naive;
use moa::onf::{build_gemm_nest, eval_nest, render_c, Pragmas};
use moa::DenseArray;

fn main() -> moa::Result<()> {
    // The three-loop normal form for a 2x3 by 3x4 product. Loop order is
    // (i, sigma, j): the contraction loop sits in the middle so the inner
    // loop streams a row of B into a row of C.
    let (m, n, p) = (2i64, 3i64, 4i64);
    let nest = build_gemm_nest(m, n, p)?;
    println!(
        "loops: {:?}, {} iterations",
        nest.loops
            .iter()
            .map(|l| l.var.as_str())
            .collect::<Vec<_>>(),
        nest.iteration_count()?
    );
    println!(
        "body: C[{}] += A[{}] * B[{}]",
        nest.body.out, nest.body.left, nest.body.right
    );

    // The interpreter runs the nest over flat buffers with bounds checks;
    // it agrees with the reference product.
    let a = DenseArray::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]])?;
    let b = DenseArray::from_rows(vec![
        vec![1.0, 0.0, 2.0, 0.0],
        vec![0.0, 1.0, 0.0, 2.0],
        vec![3.0, 0.0, 1.0, 0.0],
    ])?;
    let mut c = vec![0.0f64; (m * p) as usize];
    eval_nest(&nest, a.data(), b.data(), &mut c)?;
    assert_eq!(c, gemm_naive(&a, &b)?.data());
    println!("eval_nest -> {c:?}");

    // Running the nest again accumulates: the statement is C[..] += ...,
    // so the caller owns initialization.
    eval_nest(&nest, a.data(), b.data(), &mut c)?;
    println!(
        "evaluated twice -> doubled checksum {}",
        c.iter().sum::<f64>()
    );

    // The same nest renders as a C function; parameters become arguments,
    // so the source is size-generic even though this instance binds 2x3x4.
    println!("\n{}", render_c(&nest, "ip", &Pragmas::none())?);
    let pragmas = Pragmas::none().above("i", "#pragma acc parallel loop");
    println!("{}", render_c(&nest, "ip_acc", &pragmas)?);
    Ok(())
}
