//! Scalar extension, outer product, reduction, and the inner-product family.
//!
//! One generic routine carries the whole family: [`inner`] combines rows of
//! the right argument with scalars of the left (a scalar extension per step,
//! the degenerate outer product) and folds them with a reduction op. The
//! matrix product is `inner(Add, Mul)`; the Hadamard product is the
//! no-reduction degenerate case ([`pointwise`]); the Kronecker product is a
//! full [`outer`] product whose result is reshaped by pure index
//! arithmetic. None of these ever walks a column of the right argument:
//! every access runs along contiguous rows.

use crate::array::{DenseArray, Element};
use crate::error::{Error, Result};
use crate::shape::{gamma, Layout, Shape};

/// Binary scalar operation, with an identity element where one exists.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ScalarOp {
    Add,
    Mul,
    Sub,
    Max,
    Min,
}

impl ScalarOp {
    pub fn apply<T: Element>(self, left: T, right: T) -> T {
        match self {
            ScalarOp::Add => left.add(right),
            ScalarOp::Mul => left.mul(right),
            ScalarOp::Sub => left.sub(right),
            ScalarOp::Max => left.max_elem(right),
            ScalarOp::Min => left.min_elem(right),
        }
    }

    /// Fold identity: Add -> 0, Mul -> 1, Max -> smallest value,
    /// Min -> largest value. Sub has none.
    pub fn identity<T: Element>(self) -> Option<T> {
        match self {
            ScalarOp::Add => Some(T::ZERO),
            ScalarOp::Mul => Some(T::ONE),
            ScalarOp::Sub => None,
            ScalarOp::Max => Some(T::MAX_IDENTITY),
            ScalarOp::Min => Some(T::MIN_IDENTITY),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalarOp::Add => "Add",
            ScalarOp::Mul => "Mul",
            ScalarOp::Sub => "Sub",
            ScalarOp::Max => "Max",
            ScalarOp::Min => "Min",
        }
    }
}

fn check_same_shape<T: Element>(l: &DenseArray<T>, r: &DenseArray<T>) -> Result<()> {
    if l.shape() != r.shape() {
        return Err(Error::ShapeMismatch {
            left: l.shape().clone(),
            right: r.shape().clone(),
        });
    }
    if l.layout() != r.layout() {
        return Err(Error::LayoutMismatch);
    }
    Ok(())
}

/// Componentwise combination of same-shape arrays. Indexing distributes
/// over the result: `psi(i, pointwise(f, l, r)) = f(psi(i, l), psi(i, r))`.
pub fn pointwise<T: Element>(
    f: ScalarOp,
    l: &DenseArray<T>,
    r: &DenseArray<T>,
) -> Result<DenseArray<T>> {
    check_same_shape(l, r)?;
    let data = l
        .data()
        .iter()
        .zip(r.data())
        .map(|(&a, &b)| f.apply(a, b))
        .collect();
    DenseArray::with_layout(l.shape().clone(), l.layout(), data)
}

/// Combine a scalar with every component of an array.
pub fn scalar_extend<T: Element>(f: ScalarOp, s: T, a: &DenseArray<T>) -> DenseArray<T> {
    let data = a.data().iter().map(|&v| f.apply(s, v)).collect();
    DenseArray::with_layout(a.shape().clone(), a.layout(), data)
        .expect("shape unchanged by scalar extension")
}

/// Outer product: result shape is the concatenation of the argument shapes,
/// component at `i ++ j` is `f(l[i], r[j])`. A scalar left argument
/// degenerates to [`scalar_extend`].
pub fn outer<T: Element>(
    f: ScalarOp,
    l: &DenseArray<T>,
    r: &DenseArray<T>,
) -> Result<DenseArray<T>> {
    if l.layout() != r.layout() {
        return Err(Error::LayoutMismatch);
    }
    let shape = l.shape().concat(r.shape());
    let (nl, nr) = (l.count(), r.count());
    let mut data = vec![T::ZERO; nl * nr];
    match l.layout() {
        // Flat offsets compose: gamma_row(i ++ j) = gamma_row(i)*count(r) + gamma_row(j),
        // and the column-major mirror.
        Layout::RowMajor => {
            for (a_off, &a) in l.data().iter().enumerate() {
                for (b_off, &b) in r.data().iter().enumerate() {
                    data[a_off * nr + b_off] = f.apply(a, b);
                }
            }
        }
        Layout::ColMajor => {
            for (b_off, &b) in r.data().iter().enumerate() {
                for (a_off, &a) in l.data().iter().enumerate() {
                    data[a_off + nl * b_off] = f.apply(a, b);
                }
            }
        }
    }
    DenseArray::with_layout(shape, l.layout(), data)
}

/// Fold the leading axis with `f`, starting from its identity. The result
/// drops the first extent.
pub fn reduce<T: Element>(f: ScalarOp, a: &DenseArray<T>) -> Result<DenseArray<T>> {
    if a.rank() == 0 {
        return Err(Error::RankError {
            context: "reduce",
            expected: 1,
            shape: a.shape().clone(),
        });
    }
    let identity = f
        .identity::<T>()
        .ok_or(Error::NoIdentity { op: f.name() })?;
    let lead = a.shape().extents()[0];
    let sub_shape = a.shape().drop_first(1);
    let sub_count = sub_shape.count();
    let mut acc = vec![identity; sub_count];
    match a.layout() {
        Layout::RowMajor => {
            for k in 0..lead {
                let slab = &a.data()[k * sub_count..(k + 1) * sub_count];
                for (c, &v) in acc.iter_mut().zip(slab) {
                    *c = f.apply(*c, v);
                }
            }
        }
        Layout::ColMajor => {
            // gamma_col(k ++ j; s) = k + lead * gamma_col(j; sub)
            for (j, c) in acc.iter_mut().enumerate() {
                for k in 0..lead {
                    *c = f.apply(*c, a.data()[k + lead * j]);
                }
            }
        }
    }
    DenseArray::with_layout(sub_shape, a.layout(), acc)
}

fn check_matrix<T: Element>(a: &DenseArray<T>, context: &'static str) -> Result<(usize, usize)> {
    if a.rank() != 2 {
        return Err(Error::RankError {
            context,
            expected: 2,
            shape: a.shape().clone(),
        });
    }
    let e = a.shape().extents();
    Ok((e[0], e[1]))
}

fn check_gemm_operands<T: Element>(
    a: &DenseArray<T>,
    b: &DenseArray<T>,
    op: &'static str,
) -> Result<(usize, usize, usize)> {
    let (m, n) = check_matrix(a, op)?;
    let (n2, p) = check_matrix(b, op)?;
    if n != n2 {
        return Err(Error::ShapeMismatch {
            left: a.shape().clone(),
            right: b.shape().clone(),
        });
    }
    if a.layout() != Layout::RowMajor || b.layout() != Layout::RowMajor {
        return Err(Error::RowMajorRequired { op });
    }
    Ok((m, n, p))
}

/// Per-step record of which offsets of the right matrix one scalar-vector
/// step of [`inner`] touched, in read order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerStep {
    /// Output row index.
    pub i: usize,
    /// Contraction index.
    pub k: usize,
    /// Flat offsets of the right matrix read during this step.
    pub right_reads: Vec<usize>,
}

fn inner_impl<T: Element>(
    f: ScalarOp,
    g: ScalarOp,
    a: &DenseArray<T>,
    b: &DenseArray<T>,
    mut trace: Option<&mut Vec<InnerStep>>,
) -> Result<DenseArray<T>> {
    let (m, n, p) = check_gemm_operands(a, b, "inner")?;
    let identity = f
        .identity::<T>()
        .ok_or(Error::NoIdentity { op: f.name() })?;
    let mut c = vec![identity; m * p];
    for i in 0..m {
        let a_row = &a.data()[i * n..(i + 1) * n];
        let c_row = &mut c[i * p..(i + 1) * p];
        for (k, &scale) in a_row.iter().enumerate() {
            // Row k of B, combined under g with the scalar A[i,k] and folded
            // into row i of C under f. The slice walks B contiguously; no
            // column of B is ever gathered.
            let b_row = &b.data()[k * p..(k + 1) * p];
            for (cj, &bv) in c_row.iter_mut().zip(b_row) {
                *cj = f.apply(*cj, g.apply(scale, bv));
            }
            if let Some(steps) = trace.as_deref_mut() {
                steps.push(InnerStep {
                    i,
                    k,
                    right_reads: (k * p..(k + 1) * p).collect(),
                });
            }
        }
    }
    DenseArray::from_vec([m, p], c)
}

/// Generalized inner product on matrices: fold `g`-combined rows of `b`
/// under `f`. Shapes `[m,n] x [n,p] -> [m,p]`; `f` must have an identity.
pub fn inner<T: Element>(
    f: ScalarOp,
    g: ScalarOp,
    a: &DenseArray<T>,
    b: &DenseArray<T>,
) -> Result<DenseArray<T>> {
    inner_impl(f, g, a, b, None)
}

/// Matrix product in contiguous form: for each output row `i`, the scalar
/// `A[i,k]` scales row `k` of `B` and accumulates into row `i` of `C`, `k`
/// ascending. All three matrices are accessed along their rows only. The
/// accumulation order is fixed, so results are deterministic and agree
/// bitwise with [`gemm_naive`] for integer elements.
pub fn gemm_moa<T: Element>(a: &DenseArray<T>, b: &DenseArray<T>) -> Result<DenseArray<T>> {
    inner(ScalarOp::Add, ScalarOp::Mul, a, b)
}

/// [`gemm_moa`] plus a per-step trace of right-matrix read offsets, for
/// access-pattern assertions.
pub fn gemm_moa_traced<T: Element>(
    a: &DenseArray<T>,
    b: &DenseArray<T>,
) -> Result<(DenseArray<T>, Vec<InnerStep>)> {
    let mut steps = Vec::new();
    let c = inner_impl(ScalarOp::Add, ScalarOp::Mul, a, b, Some(&mut steps))?;
    Ok((c, steps))
}

/// Reference matrix product: the textbook i-j-k triple loop pairing a row
/// of `A` with a column of `B` per output component. Serves as the
/// independent oracle the contiguous kernels are checked against; the
/// summation order over `k` is ascending, matching [`gemm_moa`], so integer
/// results are bitwise comparable.
pub fn gemm_naive<T: Element>(a: &DenseArray<T>, b: &DenseArray<T>) -> Result<DenseArray<T>> {
    let (m, n, p) = check_gemm_operands(a, b, "gemm_naive")?;
    let mut c = vec![T::ZERO; m * p];
    for i in 0..m {
        for j in 0..p {
            let mut acc = T::ZERO;
            for k in 0..n {
                acc = acc.add(a.data()[i * n + k].mul(b.data()[k * p + j]));
            }
            c[i * p + j] = acc;
        }
    }
    DenseArray::from_vec([m, p], c)
}

/// Componentwise matrix product; the no-reduction member of the family,
/// delegating to [`pointwise`].
pub fn hadamard<T: Element>(a: &DenseArray<T>, b: &DenseArray<T>) -> Result<DenseArray<T>> {
    check_matrix(a, "hadamard")?;
    check_matrix(b, "hadamard")?;
    pointwise(ScalarOp::Mul, a, b)
}

/// Kronecker product of an `[m,n]` and a `[p,q]` matrix: shape `[m*p, n*q]`
/// with `result[i*p + k, j*q + l] = A[i,j] * B[k,l]`. The computation is
/// exactly [`outer`]`(Mul)`; the `[m,n,p,q] -> [m*p, n*q]` step is pure
/// index permutation over the outer result.
pub fn kron<T: Element>(a: &DenseArray<T>, b: &DenseArray<T>) -> Result<DenseArray<T>> {
    let (m, n) = check_matrix(a, "kron")?;
    let (p, q) = check_matrix(b, "kron")?;
    let o = outer(ScalarOp::Mul, a, b)?;
    let o_shape = o.shape().clone();
    let out_shape = Shape::from([m * p, n * q]);
    let mut data = vec![T::ZERO; out_shape.count()];
    for i in 0..m {
        for j in 0..n {
            for k in 0..p {
                for l in 0..q {
                    let src = gamma(&[i, j, k, l], &o_shape, o.layout())?;
                    let dst = gamma(&[i * p + k, j * q + l], &out_shape, Layout::RowMajor)?;
                    data[dst] = o.data()[src];
                }
            }
        }
    }
    DenseArray::from_vec(out_shape, data)
}
