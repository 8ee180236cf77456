//! C source rendering of loop nests.
//!
//! Emits one C99 function per nest: pointer arguments for the three
//! buffers, one `int` argument per named parameter, upfront declaration of
//! the loop variables, and the nest as `for` loops around the single
//! accumulate statement. Output is deterministic byte-for-byte (2-space
//! indent, LF line endings) so rendered kernels can be pinned as golden
//! files.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::onf::nest::LoopNest;

/// Pragma lines to place immediately above named loops.
#[derive(Clone, Debug, Default)]
pub struct Pragmas {
    entries: Vec<(String, String)>,
}

impl Pragmas {
    pub fn none() -> Self {
        Pragmas::default()
    }

    pub fn above(mut self, loop_var: impl Into<String>, text: impl Into<String>) -> Self {
        self.entries.push((loop_var.into(), text.into()));
        self
    }

    fn for_var<'a>(&'a self, var: &'a str) -> impl Iterator<Item = &'a str> {
        self.entries
            .iter()
            .filter(move |(v, _)| v == var)
            .map(|(_, t)| t.as_str())
    }
}

/// Render the nest as a C function named `fn_name`.
pub fn render_c(nest: &LoopNest, fn_name: &str, pragmas: &Pragmas) -> Result<String> {
    nest.validate()?;
    if nest.params.iter().any(|(n, _)| n == fn_name) || nest.loops.iter().any(|l| l.var == fn_name)
    {
        return Err(Error::NameCollision {
            name: fn_name.to_string(),
        });
    }

    let mut out = String::new();
    write!(out, "void {fn_name}(double *C, double *A, double *B").unwrap();
    for (name, _) in &nest.params {
        write!(out, ", int {name}").unwrap();
    }
    out.push_str(") {\n");

    if !nest.loops.is_empty() {
        let vars: Vec<&str> = nest.loops.iter().map(|l| l.var.as_str()).collect();
        writeln!(out, "  int {};", vars.join(", ")).unwrap();
    }

    for (depth, lp) in nest.loops.iter().enumerate() {
        let indent = "  ".repeat(depth + 1);
        for text in pragmas.for_var(&lp.var) {
            writeln!(out, "{indent}{text}").unwrap();
        }
        writeln!(
            out,
            "{indent}for ({var} = 0; {var} < {bound}; {var}++) {{",
            var = lp.var,
            bound = lp.extent.to_c_bound()
        )
        .unwrap();
    }

    let body_indent = "  ".repeat(nest.loops.len() + 1);
    writeln!(
        out,
        "{body_indent}C[{o}] = C[{o}] + A[{l}]*B[{r}];",
        o = nest.body.out.to_c(),
        l = nest.body.left.to_c(),
        r = nest.body.right.to_c()
    )
    .unwrap();

    for depth in (0..nest.loops.len()).rev() {
        writeln!(out, "{}}}", "  ".repeat(depth + 1)).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
