//! Shape-driven array algebra and derived matrix-multiplication kernels.
//!
//! This crate implements a small Mathematics-of-Arrays (MoA) calculus and
//! uses it to derive, transform, and plan blocked general matrix-matrix
//! multiplication:
//!
//! - [`shape`] / [`array`](mod@array): shapes, the gamma layout functions,
//!   and the psi indexing function over immutable dense arrays.
//! - [`algebra`]: scalar extension, outer products, reductions, and the
//!   inner-product family — the contiguous GEMM, Hadamard, and Kronecker
//!   products share one generic routine.
//! - [`onf`]: an executable loop-nest IR for the GEMM normal form, with an
//!   interpreter, an offset tracer, and a C source renderer.
//! - [`lift`]: dimension lifting — splitting a loop into an
//!   (outer, inner) pair so the outer index can name an architectural
//!   resource — plus the row-lifted, column-lifted, and fully blocked
//!   GEMM nests.
//! - [`cost`]: declarative hardware shapes (cache sizes, SM counts) and
//!   cache-budget block-size selection.
//! - [`bench`](mod@bench) / [`cli`]: native timing kernels, CSV emission,
//!   and the `verify` / `bench` / `render` / `plan` subcommands.
//!
//! The runnable examples under `examples/` walk through each capability;
//! `README.md` shows the CLI.

pub mod algebra;
pub mod array;
pub mod bench;
pub mod cli;
pub mod cost;
pub mod error;
pub mod lift;
pub mod onf;
pub mod shape;

pub use array::{iota, psi, rav, DenseArray, Element};
pub use error::{Error, Result};
pub use shape::{gamma, gamma_inverse, prefix_range, Layout, Shape};
