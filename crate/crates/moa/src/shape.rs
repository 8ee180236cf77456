//! Shapes, index vectors, and the gamma layout functions.
//!
//! A shape is the vector of extents of an array; the empty shape denotes a
//! scalar. A full index locates one component; a prefix index (strictly
//! shorter than the shape) locates a subarray. The gamma functions map a
//! full Cartesian index to a flat buffer offset under a chosen layout, and
//! are the bridge between index-level algebra and executable address
//! arithmetic.

use std::fmt;

use crate::error::{Error, Result};

/// Vector of non-negative extents. `Shape::scalar()` (rank 0) describes a
/// scalar; the total component count of a shape is the product of its
/// extents, with the empty product equal to 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(extents: impl Into<Vec<usize>>) -> Self {
        Shape(extents.into())
    }

    /// The empty shape: rank 0, one component.
    pub fn scalar() -> Self {
        Shape(Vec::new())
    }

    pub fn extents(&self) -> &[usize] {
        &self.0
    }

    /// Dimensionality (number of axes).
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Total number of components; 1 for the empty shape.
    pub fn count(&self) -> usize {
        self.0.iter().product()
    }

    pub fn is_scalar(&self) -> bool {
        self.0.is_empty()
    }

    /// Shape left after indexing away the first `q` axes.
    pub fn drop_first(&self, q: usize) -> Shape {
        Shape(self.0[q..].to_vec())
    }

    /// Concatenation of axes, as produced by the outer product.
    pub fn concat(&self, other: &Shape) -> Shape {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Shape(v)
    }

    /// A full or prefix index is valid when it is no longer than the shape
    /// and every coordinate lies below its extent.
    pub fn valid_index(&self, idx: &[usize]) -> bool {
        idx.len() <= self.0.len() && idx.iter().zip(&self.0).all(|(&i, &e)| i < e)
    }

    fn check_full_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() == self.0.len() && self.valid_index(idx) {
            Ok(())
        } else {
            Err(Error::InvalidIndex {
                index: idx.to_vec(),
                shape: self.clone(),
            })
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ">")
    }
}

impl From<&[usize]> for Shape {
    fn from(extents: &[usize]) -> Self {
        Shape(extents.to_vec())
    }
}

impl<const N: usize> From<[usize; N]> for Shape {
    fn from(extents: [usize; N]) -> Self {
        Shape(extents.to_vec())
    }
}

/// Memory layout selecting which gamma function flattens the array.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Layout {
    /// Last axis fastest. The default, and the layout every derived loop
    /// nest in this crate assumes.
    #[default]
    RowMajor,
    /// First axis fastest.
    ColMajor,
}

/// Flat offset of a full index under the given layout.
///
/// Row-major is the Horner evaluation `((i0*s1 + i1)*s2 + i2)*...`;
/// column-major mirrors it with the leading axis fastest. The empty index
/// against the empty shape maps to offset 0.
pub fn gamma(idx: &[usize], shape: &Shape, layout: Layout) -> Result<usize> {
    shape.check_full_index(idx)?;
    let extents = shape.extents();
    let offset = match layout {
        Layout::RowMajor => idx
            .iter()
            .zip(extents)
            .fold(0usize, |acc, (&i, &e)| acc * e + i),
        Layout::ColMajor => idx
            .iter()
            .zip(extents)
            .rev()
            .fold(0usize, |acc, (&i, &e)| acc * e + i),
    };
    Ok(offset)
}

/// Inverse of [`gamma`]: the unique full index mapping to `offset`.
pub fn gamma_inverse(offset: usize, shape: &Shape, layout: Layout) -> Result<Vec<usize>> {
    let count = shape.count();
    if offset >= count {
        return Err(Error::OffsetOutOfRange {
            offset,
            shape: shape.clone(),
            count,
        });
    }
    let extents = shape.extents();
    let mut idx = vec![0usize; extents.len()];
    let mut rem = offset;
    match layout {
        Layout::RowMajor => {
            for (d, &e) in extents.iter().enumerate().rev() {
                idx[d] = rem % e;
                rem /= e;
            }
        }
        Layout::ColMajor => {
            for (d, &e) in extents.iter().enumerate() {
                idx[d] = rem % e;
                rem /= e;
            }
        }
    }
    Ok(idx)
}

/// Offsets covered by a prefix index under row-major layout: the components
/// of the subarray selected by `prefix` occupy exactly this contiguous range
/// of the flat buffer.
pub fn prefix_range(prefix: &[usize], shape: &Shape) -> Result<std::ops::Range<usize>> {
    if !shape.valid_index(prefix) || prefix.len() > shape.rank() {
        return Err(Error::InvalidIndex {
            index: prefix.to_vec(),
            shape: shape.clone(),
        });
    }
    let sub_count = shape.drop_first(prefix.len()).count();
    let mut padded = prefix.to_vec();
    padded.resize(shape.rank(), 0);
    // With a zero-extent trailing axis the padded index is invalid even
    // though the prefix is; the range is empty in that case.
    let start = if sub_count == 0 {
        0
    } else {
        gamma(&padded, shape, Layout::RowMajor)?
    };
    Ok(start..start + sub_count)
}
