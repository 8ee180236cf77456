//! Dimension lifting: splitting one loop into an (outer, inner) pair.
//!
//! Lifting partitions a shape component in two so the outer index can name
//! an architectural resource — processors for the row split, vector lanes
//! or thread groups for the column split, cache-sized blocks for the full
//! blocking. The transform replaces the target loop `v in 0..E` with
//! `outer in 0..E/s` enclosing `inner in 0..s` and substitutes
//! `v = outer*s + inner` into every offset, so the iteration space and the
//! touched offsets are exactly preserved. Splits must divide the extent
//! exactly; remainder loops are not generated.

use crate::error::{Error, Result};
use crate::onf::{build_gemm_nest, Env, Expr, Loop, LoopNest};

/// Printed arrangement of the substitution `target = outer*size + inner`.
/// Both forms are the same affine function; they differ only in the C text
/// the renderer produces.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SubstForm {
    /// `(outer*size)+inner`, as in the column split's `(jp*rsize)+kp`.
    #[default]
    OuterFirst,
    /// `inner+(size)*outer`, as in the row split's `ip+(sizel/np)*k`.
    InnerFirst,
}

/// Description of one split: which loop, how large the inner extent is,
/// and what the two new loops are called. Optional symbolic extents let the
/// rendered C carry parameter expressions like `(sizel/np)` instead of
/// literal numbers.
#[derive(Clone, Debug)]
pub struct LiftSpec {
    pub target_var: String,
    pub inner_extent: i64,
    pub outer_name: String,
    pub inner_name: String,
    outer_extent_expr: Option<Expr>,
    inner_extent_expr: Option<Expr>,
    form: SubstForm,
}

impl LiftSpec {
    pub fn new(
        target_var: impl Into<String>,
        inner_extent: i64,
        outer_name: impl Into<String>,
        inner_name: impl Into<String>,
    ) -> Self {
        LiftSpec {
            target_var: target_var.into(),
            inner_extent,
            outer_name: outer_name.into(),
            inner_name: inner_name.into(),
            outer_extent_expr: None,
            inner_extent_expr: None,
            form: SubstForm::default(),
        }
    }

    /// Symbolic extent for the outer loop; must evaluate to `E / inner_extent`.
    pub fn outer_extent_expr(mut self, expr: Expr) -> Self {
        self.outer_extent_expr = Some(expr);
        self
    }

    /// Symbolic extent for the inner loop; must evaluate to `inner_extent`.
    pub fn inner_extent_expr(mut self, expr: Expr) -> Self {
        self.inner_extent_expr = Some(expr);
        self
    }

    pub fn form(mut self, form: SubstForm) -> Self {
        self.form = form;
        self
    }
}

/// Apply one split to a nest. The target loop's extent must be a constant
/// under the nest's parameters and exactly divisible by the spec's inner
/// extent; the new names must be fresh.
pub fn lift(nest: &LoopNest, spec: &LiftSpec) -> Result<LoopNest> {
    nest.validate()?;
    let position = nest
        .loops
        .iter()
        .position(|l| l.var == spec.target_var)
        .ok_or_else(|| Error::UnknownVariable {
            name: spec.target_var.clone(),
        })?;

    for name in [&spec.outer_name, &spec.inner_name] {
        let taken =
            nest.loops.iter().any(|l| &l.var == name) || nest.params.iter().any(|(n, _)| n == name);
        if taken || spec.outer_name == spec.inner_name {
            return Err(Error::NameCollision { name: name.clone() });
        }
    }

    let env = Env::from_pairs(&nest.params);
    let extent = nest.loops[position].extent.eval(&env)?;
    if spec.inner_extent <= 0 || extent % spec.inner_extent != 0 {
        return Err(Error::NotDivisible {
            extent,
            divisor: spec.inner_extent,
        });
    }
    let outer_extent = extent / spec.inner_extent;

    let outer_expr = spec
        .outer_extent_expr
        .clone()
        .unwrap_or(Expr::Const(outer_extent));
    let inner_expr = spec
        .inner_extent_expr
        .clone()
        .unwrap_or(Expr::Const(spec.inner_extent));
    // Symbolic extents must agree with the numeric split.
    if outer_expr.eval(&env)? != outer_extent {
        return Err(Error::NotDivisible {
            extent,
            divisor: spec.inner_extent,
        });
    }
    if inner_expr.eval(&env)? != spec.inner_extent {
        return Err(Error::NotDivisible {
            extent,
            divisor: spec.inner_extent,
        });
    }

    let outer_var = Expr::var(&spec.outer_name);
    let inner_var = Expr::var(&spec.inner_name);
    let replacement = match spec.form {
        SubstForm::OuterFirst => outer_var * inner_expr.clone() + inner_var,
        SubstForm::InnerFirst => inner_var + inner_expr.clone() * outer_var,
    };

    let mut loops = Vec::with_capacity(nest.loops.len() + 1);
    for (d, lp) in nest.loops.iter().enumerate() {
        if d == position {
            loops.push(Loop::new(&spec.outer_name, outer_expr.clone()));
            loops.push(Loop::new(&spec.inner_name, inner_expr.clone()));
        } else {
            loops.push(Loop {
                var: lp.var.clone(),
                extent: lp.extent.substitute(&spec.target_var, &replacement),
            });
        }
    }

    let lifted = LoopNest {
        loops,
        body: crate::onf::AccumStmt {
            out: nest.body.out.substitute(&spec.target_var, &replacement),
            left: nest.body.left.substitute(&spec.target_var, &replacement),
            right: nest.body.right.substitute(&spec.target_var, &replacement),
        },
        params: nest.params.clone(),
    };
    lifted.validate()?;
    Ok(lifted)
}

/// Reorder the loops of a nest. Legal only when the new order is a
/// permutation of the old and no extent comes to depend on a loop that now
/// sits further in.
pub fn interchange(nest: &LoopNest, order: &[&str]) -> Result<LoopNest> {
    nest.validate()?;
    let bad_order = || Error::BadLoopOrder {
        order: order.iter().map(|s| s.to_string()).collect(),
    };
    let is_permutation = order.len() == nest.loops.len()
        && nest
            .loops
            .iter()
            .all(|l| order.iter().filter(|&&v| v == l.var).count() == 1);
    if !is_permutation {
        return Err(bad_order());
    }
    let mut loops = Vec::with_capacity(nest.loops.len());
    for &var in order {
        let lp = nest
            .loops
            .iter()
            .find(|l| l.var == var)
            .ok_or_else(bad_order)?;
        loops.push(lp.clone());
    }
    let reordered = LoopNest {
        loops,
        body: nest.body.clone(),
        params: nest.params.clone(),
    };
    reordered.validate()?;
    Ok(reordered)
}

/// Split the row loop `i` into `np` partitions: outer `k` over partitions
/// (the loop handed to processors), inner `ip` within a partition.
/// Substitution: `i = ip + (sizel/np)*k`.
pub fn build_row_lifted(m: i64, n: i64, p: i64, np: i64) -> Result<LoopNest> {
    let mut nest = build_gemm_nest(m, n, p)?;
    nest.set_param("np", np);
    if np <= 0 || m % np != 0 {
        return Err(Error::NotDivisible {
            extent: m,
            divisor: np,
        });
    }
    let spec = LiftSpec::new("i", m / np, "k", "ip")
        .outer_extent_expr(Expr::param("np"))
        .inner_extent_expr(Expr::param("sizel") / Expr::param("np"))
        .form(SubstForm::InnerFirst);
    lift(&nest, &spec)
}

/// Split the column loop `j` into groups of `rsize` consecutive columns:
/// outer `jp` over groups, inner `kp` within one (a vector register or
/// thread group). Substitution: `j = (jp*rsize)+kp`.
pub fn build_col_lifted(m: i64, n: i64, p: i64, rsize: i64) -> Result<LoopNest> {
    let mut nest = build_gemm_nest(m, n, p)?;
    nest.set_param("rsize", rsize);
    if rsize <= 0 || p % rsize != 0 {
        return Err(Error::NotDivisible {
            extent: p,
            divisor: rsize,
        });
    }
    let spec = LiftSpec::new("j", rsize, "jp", "kp")
        .outer_extent_expr(Expr::param("sizer") / Expr::param("rsize"))
        .inner_extent_expr(Expr::param("rsize"))
        .form(SubstForm::OuterFirst);
    lift(&nest, &spec)
}

/// Split all three loops into cache-sized blocks of extents `(bi, bk, bj)`
/// and hoist the block loops outward, giving
/// `(ib, sb, jb, ii, si, jj)` — block loops mirror the scalar `(i, sigma,
/// j)` order, so block partial products accumulate into each block row of C
/// in round-robin, row-major block order, and the intra-block loops keep
/// the contiguous access pattern. For any fixed output component the
/// contraction index still ascends monotonically, so even float results
/// are bitwise identical to the unblocked nest.
pub fn build_blocked(m: i64, n: i64, p: i64, bi: i64, bk: i64, bj: i64) -> Result<LoopNest> {
    let mut nest = build_gemm_nest(m, n, p)?;
    // The blocked variant has no unused riders in its signature.
    nest.params = vec![
        ("sizel".into(), m),
        ("sizer".into(), p),
        ("shr0".into(), n),
        ("bi".into(), bi),
        ("bk".into(), bk),
        ("bj".into(), bj),
    ];
    for (extent, divisor) in [(m, bi), (n, bk), (p, bj)] {
        if divisor <= 0 || extent % divisor != 0 {
            return Err(Error::NotDivisible { extent, divisor });
        }
    }
    let nest = lift(
        &nest,
        &LiftSpec::new("i", bi, "ib", "ii")
            .outer_extent_expr(Expr::param("sizel") / Expr::param("bi"))
            .inner_extent_expr(Expr::param("bi")),
    )?;
    let nest = lift(
        &nest,
        &LiftSpec::new("sigma", bk, "sb", "si")
            .outer_extent_expr(Expr::param("shr0") / Expr::param("bk"))
            .inner_extent_expr(Expr::param("bk")),
    )?;
    let nest = lift(
        &nest,
        &LiftSpec::new("j", bj, "jb", "jj")
            .outer_extent_expr(Expr::param("sizer") / Expr::param("bj"))
            .inner_extent_expr(Expr::param("bj")),
    )?;
    interchange(&nest, &["ib", "sb", "jb", "ii", "si", "jj"])
}
