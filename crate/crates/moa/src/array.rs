//! Dense arrays and the psi indexing function.
//!
//! A [`DenseArray`] is a shape, a layout tag, and a flat element buffer; the
//! buffer is the flattening (`rav`) of the array under its layout, so
//! `data[gamma(i, shape, layout)]` is the component at Cartesian index `i`.
//! Arrays are immutable values: every operation returns a new array, and a
//! constructed array can be shared freely across threads.
//!
//! [`psi`] indexes with a full index (yielding a rank-0 array) or a prefix
//! index (yielding the subarray under it). Under row-major layout a prefix
//! selects a contiguous run of the buffer — the property all derived GEMM
//! loop nests in this crate are built on.

use std::fmt;

use crate::error::{Error, Result};
use crate::shape::{gamma, prefix_range, Layout, Shape};

/// Numeric element types arrays may hold. Arrays of different element types
/// cannot be mixed in one operation; the type system rejects it.
pub trait Element:
    Copy + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const ZERO: Self;
    const ONE: Self;
    /// Identity of the max fold (minimum representable value).
    const MAX_IDENTITY: Self;
    /// Identity of the min fold (maximum representable value).
    const MIN_IDENTITY: Self;

    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn max_elem(self, other: Self) -> Self;
    fn min_elem(self, other: Self) -> Self;
}

impl Element for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const MAX_IDENTITY: Self = f64::NEG_INFINITY;
    const MIN_IDENTITY: Self = f64::INFINITY;

    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn max_elem(self, other: Self) -> Self {
        self.max(other)
    }
    fn min_elem(self, other: Self) -> Self {
        self.min(other)
    }
}

impl Element for i64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;
    const MAX_IDENTITY: Self = i64::MIN;
    const MIN_IDENTITY: Self = i64::MAX;

    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn max_elem(self, other: Self) -> Self {
        self.max(other)
    }
    fn min_elem(self, other: Self) -> Self {
        self.min(other)
    }
}

/// Flat element buffer plus shape and layout.
#[derive(Clone, Debug)]
pub struct DenseArray<T: Element> {
    shape: Shape,
    layout: Layout,
    data: Vec<T>,
}

impl<T: Element> DenseArray<T> {
    /// Row-major array from a flat buffer. The buffer length must equal the
    /// shape's component count.
    pub fn from_vec(shape: impl Into<Shape>, data: Vec<T>) -> Result<Self> {
        Self::with_layout(shape, Layout::RowMajor, data)
    }

    pub fn with_layout(shape: impl Into<Shape>, layout: Layout, data: Vec<T>) -> Result<Self> {
        let shape = shape.into();
        let count = shape.count();
        if data.len() != count {
            return Err(Error::DataLength {
                len: data.len(),
                shape,
                count,
            });
        }
        Ok(DenseArray {
            shape,
            layout,
            data,
        })
    }

    /// Rank-0 array holding a single component.
    pub fn scalar(value: T) -> Self {
        DenseArray {
            shape: Shape::scalar(),
            layout: Layout::RowMajor,
            data: vec![value],
        }
    }

    pub fn zeros(shape: impl Into<Shape>) -> Self {
        Self::fill(shape, T::ZERO)
    }

    pub fn ones(shape: impl Into<Shape>) -> Self {
        Self::fill(shape, T::ONE)
    }

    pub fn fill(shape: impl Into<Shape>, value: T) -> Self {
        let shape = shape.into();
        let data = vec![value; shape.count()];
        DenseArray {
            shape,
            layout: Layout::RowMajor,
            data,
        }
    }

    /// Row-major matrix from nested rows; all rows must be equally long.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let shape = Shape::from([m, p]);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::DataLength {
                len: rows.iter().map(Vec::len).sum(),
                count: shape.count(),
                shape,
            });
        }
        let data = rows.into_iter().flatten().collect();
        DenseArray::from_vec(shape, data)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// The flat buffer in layout order (the rav of the array).
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.rank()
    }

    pub fn count(&self) -> usize {
        self.shape.count()
    }

    /// Component at a full index.
    pub fn get(&self, idx: &[usize]) -> Result<T> {
        let off = gamma(idx, &self.shape, self.layout)?;
        Ok(self.data[off])
    }

    /// The single component of a rank-0 array.
    pub fn scalar_value(&self) -> Result<T> {
        if self.shape.is_scalar() {
            Ok(self.data[0])
        } else {
            Err(Error::RankError {
                context: "scalar_value",
                expected: 0,
                shape: self.shape.clone(),
            })
        }
    }

    /// Same-shape arrays compare equal when every component matches; layout
    /// is representation, not identity.
    fn components_equal(&self, other: &Self) -> bool {
        if self.shape != other.shape {
            return false;
        }
        if self.layout == other.layout {
            return self.data == other.data;
        }
        iota(&self.shape)
            .index_rows()
            .all(|idx| self.get(&idx).unwrap() == other.get(&idx).unwrap())
    }
}

impl<T: Element> PartialEq for DenseArray<T> {
    fn eq(&self, other: &Self) -> bool {
        self.components_equal(other)
    }
}

/// Flattening: the rank-1 array of all components in layout order.
pub fn rav<T: Element>(a: &DenseArray<T>) -> DenseArray<T> {
    DenseArray {
        shape: Shape::from([a.count()]),
        layout: Layout::RowMajor,
        data: a.data.clone(),
    }
}

/// All full valid indices of `shape` in row-major enumeration order, as a
/// rank-2 integer array of shape `[count, rank]`. The empty shape yields a
/// single empty index; any zero extent yields none.
pub fn iota(shape: &Shape) -> DenseArray<i64> {
    let count = shape.count();
    let rank = shape.rank();
    let mut data = Vec::with_capacity(count * rank);
    let mut idx = vec![0usize; rank];
    for n in 0..count {
        data.extend(idx.iter().map(|&i| i as i64));
        if n + 1 < count {
            for d in (0..rank).rev() {
                idx[d] += 1;
                if idx[d] < shape.extents()[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
    DenseArray {
        shape: Shape::from([count, rank]),
        layout: Layout::RowMajor,
        data,
    }
}

impl DenseArray<i64> {
    /// Iterate the rows of an index array (as produced by [`iota`]) as
    /// usize index vectors.
    pub fn index_rows(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let rows = self.shape.extents()[0];
        let rank = self.shape.extents()[1];
        (0..rows).map(move |r| {
            self.data[r * rank..(r + 1) * rank]
                .iter()
                .map(|&c| c as usize)
                .collect()
        })
    }
}

/// Psi: index an array with a full or prefix index.
///
/// A full index yields a rank-0 array holding `data[gamma(idx)]`; a prefix
/// of length `q` yields the subarray of shape `drop_first(q)` whose
/// components extend the prefix. The empty index returns the whole array.
pub fn psi<T: Element>(idx: &[usize], a: &DenseArray<T>) -> Result<DenseArray<T>> {
    if !a.shape.valid_index(idx) {
        return Err(Error::InvalidIndex {
            index: idx.to_vec(),
            shape: a.shape.clone(),
        });
    }
    let sub_shape = a.shape.drop_first(idx.len());
    let data = match a.layout {
        Layout::RowMajor => {
            // The whole subarray is one contiguous run of the buffer.
            let range = prefix_range(idx, &a.shape)?;
            a.data[range].to_vec()
        }
        Layout::ColMajor => {
            let mut data = Vec::with_capacity(sub_shape.count());
            let mut full = idx.to_vec();
            full.resize(a.shape.rank(), 0);
            for sub_idx in iota(&sub_shape).index_rows() {
                full[idx.len()..].copy_from_slice(&sub_idx);
                data.push(a.data[gamma(&full, &a.shape, Layout::ColMajor)?]);
            }
            data
        }
    };
    DenseArray::with_layout(sub_shape, a.layout, data)
}
