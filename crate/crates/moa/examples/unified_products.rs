//! One algorithmic core, three products.
//!
//! The matrix product is outer products (scalar extensions) folded by a
//! reduction; the Hadamard product is the no-reduction degenerate case; the
//! Kronecker product is a full outer product plus index reshuffling.
//!
//! Run with `cargo run --example unified_products`.

use moa::algebra::{
    gemm_moa, gemm_naive, hadamard, inner, kron, outer, pointwise, reduce, scalar_extend, ScalarOp,
};
use moa::{psi, DenseArray};

fn main() -> moa::Result<()> {
    let a = DenseArray::from_rows(vec![vec![1i64, 2], vec![3, 4]])?;
    let b = DenseArray::from_rows(vec![vec![5i64, 6], vec![7, 8]])?;

    // The general inner product takes the reduction op and the combining
    // op; Add/Mul instantiates the matrix product.
    let c = inner(ScalarOp::Add, ScalarOp::Mul, &a, &b)?;
    assert_eq!(c, gemm_moa(&a, &b)?);
    assert_eq!(c, gemm_naive(&a, &b)?);
    println!("A . B           = {:?}", c.data());

    // Row i of the product is literally a reduction over scaled rows of B:
    // stack scalar_extend(Mul, A[i,k], B[k,:]) over k and fold with Add.
    let i = 0usize;
    let mut stacked = Vec::new();
    for k in 0..2 {
        let scaled = scalar_extend(ScalarOp::Mul, a.get(&[i, k])?, &psi(&[k], &b)?);
        stacked.extend_from_slice(scaled.data());
    }
    let row = reduce(ScalarOp::Add, &DenseArray::from_vec([2, 2], stacked)?)?;
    assert_eq!(row, psi(&[i], &c)?);
    println!("row {i} via outer+reduce = {:?}", row.data());

    // Hadamard: same machinery, no reduction.
    let h = hadamard(&a, &b)?;
    assert_eq!(h, pointwise(ScalarOp::Mul, &a, &b)?);
    println!("A hadamard B    = {:?}", h.data());

    // Kronecker: the outer product is the whole computation; the reshape
    // to [m*p, n*q] is pure index arithmetic.
    let k = kron(&a, &b)?;
    let o = outer(ScalarOp::Mul, &a, &b)?;
    println!(
        "A kron B shape {} from outer shape {}",
        k.shape(),
        o.shape()
    );
    let (i, j, r, c) = (1usize, 0usize, 0usize, 1usize);
    assert_eq!(
        k.get(&[i * 2 + r, j * 2 + c])?,
        a.get(&[i, j])? * b.get(&[r, c])?
    );
    println!("A kron B        = {:?}", k.data());

    // Other reductions ride the same rails: Max-Mul gives a "tropical"
    // style product.
    let tropical = inner(ScalarOp::Max, ScalarOp::Mul, &a, &b)?;
    println!("max-mul product = {:?}", tropical.data());
    Ok(())
}
