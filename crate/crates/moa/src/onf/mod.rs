//! Executable loop-nest IR for the GEMM operational normal form.

mod expr;
mod nest;
mod render;

pub use expr::{Env, Expr};
pub use nest::{
    build_gemm_nest, eval_nest, trace_nest, AccessRecord, AccumStmt, Loop, LoopNest, NestTrace,
};
pub use render::{render_c, Pragmas};
