//! The loop-nest IR: counted loops around one fused multiply-accumulate.
//!
//! A [`LoopNest`] is the executable form of the GEMM normal form — an
//! ordered list of zero-based counted loops enclosing the single statement
//! `C[out] += A[left] * B[right]`, with named size parameters bound to
//! concrete values at construction. The interpreter ([`eval_nest`]) runs the
//! nest sequentially in declared order with bounds-checked offsets; the
//! tracer ([`trace_nest`]) enumerates the offset stream without touching
//! data, which is what the access-pattern and transform-soundness checks
//! are built on.

use crate::array::Element;
use crate::error::{Error, Result};
use crate::onf::expr::{Env, Expr};

/// One counted loop: `for var in 0..extent`, step 1.
#[derive(Clone, PartialEq, Debug)]
pub struct Loop {
    pub var: String,
    pub extent: Expr,
}

impl Loop {
    pub fn new(var: impl Into<String>, extent: impl Into<Expr>) -> Self {
        Loop {
            var: var.into(),
            extent: extent.into(),
        }
    }
}

/// The fused statement `C[out] += A[left] * B[right]`.
#[derive(Clone, PartialEq, Debug)]
pub struct AccumStmt {
    pub out: Expr,
    pub left: Expr,
    pub right: Expr,
}

/// Ordered loops (outer to inner), one accumulate statement, and the named
/// parameters the expressions may reference. Parameter order is the C
/// signature order when rendered.
#[derive(Clone, PartialEq, Debug)]
pub struct LoopNest {
    pub loops: Vec<Loop>,
    pub body: AccumStmt,
    pub params: Vec<(String, i64)>,
}

impl LoopNest {
    /// Check well-formedness: unique names, no loop/parameter collisions,
    /// body variables declared by loops, extent names bound by parameters
    /// or strictly outer loops.
    pub fn validate(&self) -> Result<()> {
        let mut seen: Vec<&str> = Vec::new();
        for (name, _) in &self.params {
            if seen.contains(&name.as_str()) {
                return Err(Error::NameCollision { name: name.clone() });
            }
            seen.push(name);
        }
        for lp in &self.loops {
            if seen.contains(&lp.var.as_str()) {
                return Err(Error::NameCollision {
                    name: lp.var.clone(),
                });
            }
            seen.push(&lp.var);
        }

        let param_names: Vec<&str> = self.params.iter().map(|(n, _)| n.as_str()).collect();
        let loop_vars: Vec<&str> = self.loops.iter().map(|l| l.var.as_str()).collect();

        for (d, lp) in self.loops.iter().enumerate() {
            let outer: &[&str] = &loop_vars[..d];
            let mut err = None;
            lp.extent.visit_names(&mut |name, _| {
                if err.is_none() && !param_names.contains(&name) && !outer.contains(&name) {
                    err = Some(Error::ExtentDependency {
                        var: lp.var.clone(),
                        dependency: name.to_string(),
                    });
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }

        for expr in [&self.body.out, &self.body.left, &self.body.right] {
            let mut err = None;
            expr.visit_names(&mut |name, is_var| {
                if err.is_none() {
                    let known = if is_var {
                        loop_vars.contains(&name)
                    } else {
                        param_names.contains(&name)
                    };
                    if !known {
                        err = Some(if is_var {
                            Error::UnknownVariable {
                                name: name.to_string(),
                            }
                        } else {
                            Error::UnboundParameter {
                                name: name.to_string(),
                            }
                        });
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<i64> {
        self.params.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// Bind or rebind a parameter value.
    pub fn set_param(&mut self, name: &str, value: i64) {
        if let Some(slot) = self.params.iter_mut().find(|(n, _)| n == name) {
            slot.1 = value;
        } else {
            self.params.push((name.to_string(), value));
        }
    }

    fn base_env(&self) -> Env {
        Env::from_pairs(&self.params)
    }

    /// Concrete extents of the loops, outer to inner, under the bound
    /// parameters. Fails if any extent references a loop variable.
    pub fn extents(&self) -> Result<Vec<i64>> {
        let env = self.base_env();
        self.loops
            .iter()
            .map(|lp| {
                let e = lp.extent.eval(&env)?;
                if e < 0 {
                    Err(Error::NegativeExtent { value: e })
                } else {
                    Ok(e)
                }
            })
            .collect()
    }

    /// Total number of innermost iterations: the product of extents.
    pub fn iteration_count(&self) -> Result<i64> {
        Ok(self.extents()?.iter().product())
    }

    fn walk(&self, f: &mut impl FnMut(&Env, i64, i64, i64) -> Result<()>) -> Result<()> {
        self.validate()?;
        let mut env = self.base_env();
        self.walk_level(0, &mut env, f)
    }

    fn walk_level(
        &self,
        depth: usize,
        env: &mut Env,
        f: &mut impl FnMut(&Env, i64, i64, i64) -> Result<()>,
    ) -> Result<()> {
        if depth == self.loops.len() {
            let out = self.body.out.eval(env)?;
            let left = self.body.left.eval(env)?;
            let right = self.body.right.eval(env)?;
            return f(env, out, left, right);
        }
        let lp = &self.loops[depth];
        let extent = lp.extent.eval(env)?;
        if extent < 0 {
            return Err(Error::NegativeExtent { value: extent });
        }
        env.push(&lp.var, 0);
        for v in 0..extent {
            env.set_last(v);
            self.walk_level(depth + 1, env, f)?;
        }
        env.pop();
        Ok(())
    }
}

/// The three-loop GEMM nest in its contiguous normal form: loop order
/// `(i, sigma, j)` with body `C[j+i*sizer] += A[(i*shr0)+sigma] * B[(sigma*sizer)+j]`,
/// where `sizel = m`, `shr0 = n`, `sizer = p`. The `sizeres` and `np`
/// parameters ride along unused so the rendered signature matches the
/// lifted variants.
pub fn build_gemm_nest(m: i64, n: i64, p: i64) -> Result<LoopNest> {
    for value in [m, n, p] {
        if value < 0 {
            return Err(Error::NegativeExtent { value });
        }
    }
    let (i, sigma, j) = (Expr::var("i"), Expr::var("sigma"), Expr::var("j"));
    let (sizel, sizer, shr0) = (
        Expr::param("sizel"),
        Expr::param("sizer"),
        Expr::param("shr0"),
    );
    let nest = LoopNest {
        loops: vec![
            Loop::new("i", sizel),
            Loop::new("sigma", shr0.clone()),
            Loop::new("j", sizer.clone()),
        ],
        body: AccumStmt {
            out: j.clone() + i.clone() * sizer.clone(),
            left: i * shr0 + sigma.clone(),
            right: sigma * sizer + j,
        },
        params: vec![
            ("sizel".into(), m),
            ("sizer".into(), p),
            ("sizeres".into(), m * p),
            ("np".into(), 1),
            ("shr0".into(), n),
        ],
    };
    nest.validate()?;
    Ok(nest)
}

/// Run the nest over flat buffers, applying `C[out] += A[left] * B[right]`
/// at every innermost iteration in declared loop order. `c` is accumulated
/// into, not cleared; every offset is bounds-checked.
pub fn eval_nest<T: Element>(nest: &LoopNest, a: &[T], b: &[T], c: &mut [T]) -> Result<()> {
    let check = |buffer: &'static str, offset: i64, len: usize| -> Result<usize> {
        if offset < 0 || offset as usize >= len {
            Err(Error::OffsetOutOfBounds {
                buffer,
                offset,
                len,
            })
        } else {
            Ok(offset as usize)
        }
    };
    nest.walk(&mut |_env, out, left, right| {
        let out = check("C", out, c.len())?;
        let left = check("A", left, a.len())?;
        let right = check("B", right, b.len())?;
        c[out] = c[out].add(a[left].mul(b[right]));
        Ok(())
    })
}

/// One innermost iteration's loop-variable values and the three offsets it
/// would touch.
#[derive(Clone, Debug, PartialEq)]
pub struct AccessRecord {
    /// Loop variable bindings, outer to inner.
    pub vars: Vec<(String, i64)>,
    pub out: i64,
    pub left: i64,
    pub right: i64,
}

/// The complete offset stream of a nest, independent of any data.
#[derive(Clone, Debug, Default)]
pub struct NestTrace {
    pub records: Vec<AccessRecord>,
}

impl NestTrace {
    /// Write-offset sets keyed by the value of one loop variable.
    pub fn write_sets_by_var(&self, var: &str) -> Vec<(i64, std::collections::BTreeSet<i64>)> {
        let mut groups: Vec<(i64, std::collections::BTreeSet<i64>)> = Vec::new();
        for rec in &self.records {
            let key = rec
                .vars
                .iter()
                .find(|(n, _)| n == var)
                .map(|&(_, v)| v)
                .unwrap_or(0);
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, set)) => {
                    set.insert(rec.out);
                }
                None => {
                    let mut set = std::collections::BTreeSet::new();
                    set.insert(rec.out);
                    groups.push((key, set));
                }
            }
        }
        groups
    }

    /// Right-offset runs grouped by the surrounding (all-but-innermost)
    /// loop state: one vector of B offsets per innermost sweep, in
    /// iteration order.
    pub fn right_runs_per_innermost_sweep(&self) -> Vec<Vec<i64>> {
        let mut runs: Vec<Vec<i64>> = Vec::new();
        let mut last_outer: Option<Vec<(String, i64)>> = None;
        for rec in &self.records {
            let outer: Vec<(String, i64)> = rec.vars[..rec.vars.len().saturating_sub(1)].to_vec();
            if last_outer.as_ref() != Some(&outer) {
                runs.push(Vec::new());
                last_outer = Some(outer);
            }
            runs.last_mut().unwrap().push(rec.right);
        }
        runs
    }

    /// Sorted (out, left, right) offset multisets, for comparing a nest
    /// against a transformed version of itself.
    pub fn offset_multisets(&self) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
        let mut out: Vec<i64> = self.records.iter().map(|r| r.out).collect();
        let mut left: Vec<i64> = self.records.iter().map(|r| r.left).collect();
        let mut right: Vec<i64> = self.records.iter().map(|r| r.right).collect();
        out.sort_unstable();
        left.sort_unstable();
        right.sort_unstable();
        (out, left, right)
    }
}

/// Enumerate every offset the nest would touch, in iteration order, without
/// evaluating any data.
pub fn trace_nest(nest: &LoopNest) -> Result<NestTrace> {
    let param_names: Vec<String> = nest.params.iter().map(|(n, _)| n.clone()).collect();
    let mut records = Vec::new();
    nest.walk(&mut |env, out, left, right| {
        let vars: Vec<(String, i64)> = env
            .snapshot()
            .into_iter()
            .filter(|(n, _)| !param_names.contains(n))
            .collect();
        records.push(AccessRecord {
            vars,
            out,
            left,
            right,
        });
        Ok(())
    })?;
    Ok(NestTrace { records })
}
