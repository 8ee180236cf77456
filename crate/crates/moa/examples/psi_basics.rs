//! Shapes, layouts, and the psi indexing function.
//!
//! Run with `cargo run --example psi_basics`.

use moa::{gamma, gamma_inverse, iota, psi, rav, DenseArray, Layout, Shape};

fn main() -> moa::Result<()> {
    // An array is a shape plus a flat buffer; the shape alone determines
    // dimensionality and component count.
    let a = DenseArray::from_rows(vec![
        vec![1i64, 2, 3, 4],
        vec![5, 6, 7, 8],
        vec![9, 10, 11, 12],
    ])?;
    println!("shape {} rank {} count {}", a.shape(), a.rank(), a.count());

    // gamma maps a Cartesian index to a flat offset; gamma_inverse undoes it.
    let s = Shape::from([3, 4]);
    let off = gamma(&[1, 2], &s, Layout::RowMajor)?;
    println!(
        "gamma([1,2]) = {off}, back to {:?}",
        gamma_inverse(off, &s, Layout::RowMajor)?
    );

    // rav flattens in layout order; psi indexes. A full index yields a
    // scalar, a prefix yields the subarray under it — contiguous in the
    // buffer under row-major layout.
    println!("rav = {:?}", rav(&a).data());
    let row1 = psi(&[1], &a)?;
    println!("psi([1]) = {:?} (shape {})", row1.data(), row1.shape());
    let elem = psi(&[1, 0], &a)?;
    println!("psi([1,0]) = {}", elem.scalar_value()?);

    // The identity: indexing at every element of iota(shape) and
    // reassembling reproduces the array.
    let indices = iota(a.shape());
    let mut parts = Vec::new();
    for idx in indices.index_rows() {
        parts.push(psi(&idx, &a)?.scalar_value()?);
    }
    let rebuilt = DenseArray::from_vec(a.shape().clone(), parts)?;
    assert_eq!(rebuilt, a);
    println!(
        "iota(shape) has {} indices; reassembly round-trips",
        indices.shape().extents()[0]
    );

    // Scalars are rank-0 arrays with the empty shape; their only valid
    // index is the empty one.
    let sigma = DenseArray::scalar(42i64);
    assert_eq!(psi(&[], &sigma)?, sigma);
    println!("scalar shape {} count {}", sigma.shape(), sigma.count());
    Ok(())
}
