//! Integer index expressions over loop variables and named parameters.
//!
//! Offsets and extents in the loop-nest IR are trees of additions,
//! multiplications, and exact divisions over loop variables (`Var`) and
//! size parameters (`Param`). Keeping the tree — rather than a flattened
//! coefficient list — preserves the factored index expressions that
//! dimension lifting produces, so rendered C shows `(ip+(sizel/np)*k)*sizer`
//! instead of an expanded sum. Every offset stays affine in the loop
//! variables; parameters only ever appear in coefficients and extents.

use std::fmt;
use std::ops;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Const(i64),
    /// A loop variable, bound by an enclosing loop during evaluation.
    Var(String),
    /// A named size parameter, bound by the nest.
    Param(String),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Exact integer division; evaluation fails if the divisor does not
    /// divide the dividend.
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    /// Evaluate under a name -> value environment (parameters and any bound
    /// loop variables share one namespace).
    pub fn eval(&self, env: &Env) -> Result<i64> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(name) => env
                .get(name)
                .ok_or_else(|| Error::UnknownVariable { name: name.clone() }),
            Expr::Param(name) => env
                .get(name)
                .ok_or_else(|| Error::UnboundParameter { name: name.clone() }),
            Expr::Add(l, r) => Ok(l.eval(env)? + r.eval(env)?),
            Expr::Mul(l, r) => Ok(l.eval(env)? * r.eval(env)?),
            Expr::Div(l, r) => {
                let (lv, rv) = (l.eval(env)?, r.eval(env)?);
                if rv == 0 {
                    return Err(Error::DivisionByZero);
                }
                if lv % rv != 0 {
                    return Err(Error::InexactDivision { lhs: lv, rhs: rv });
                }
                Ok(lv / rv)
            }
        }
    }

    /// Replace every occurrence of loop variable `var` with `replacement`.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(name) if name == var => replacement.clone(),
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Add(l, r) => Expr::Add(
                Box::new(l.substitute(var, replacement)),
                Box::new(r.substitute(var, replacement)),
            ),
            Expr::Mul(l, r) => Expr::Mul(
                Box::new(l.substitute(var, replacement)),
                Box::new(r.substitute(var, replacement)),
            ),
            Expr::Div(l, r) => Expr::Div(
                Box::new(l.substitute(var, replacement)),
                Box::new(r.substitute(var, replacement)),
            ),
        }
    }

    pub fn visit_names(&self, f: &mut impl FnMut(&str, bool)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(name) => f(name, true),
            Expr::Param(name) => f(name, false),
            Expr::Add(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.visit_names(f);
                r.visit_names(f);
            }
        }
    }

    /// Loop variables referenced.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_names(&mut |name, is_var| {
            if is_var && !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        });
        out
    }

    /// Parameters referenced.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_names(&mut |name, is_var| {
            if !is_var && !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        });
        out
    }
}

impl From<i64> for Expr {
    fn from(c: i64) -> Self {
        Expr::Const(c)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    /// Exact division node; evaluation rejects inexact quotients.
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

/// Position of a subexpression within its parent, used to decide
/// parenthesization when printing.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Root,
    /// Right-hand side of a loop bound comparison.
    Bound,
    AddLeft,
    AddRight,
    MulLeft,
    MulRight,
    DivChild,
}

fn needs_parens(expr: &Expr, pos: Pos) -> bool {
    match expr {
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => false,
        // A sum is parenthesized in any operand position.
        Expr::Add(..) => !matches!(pos, Pos::Root | Pos::Bound),
        // A product binds tighter than a sum on its right, so only the
        // left-of-add position (and tree-preserving right-of-mul) wraps.
        Expr::Mul(..) => matches!(pos, Pos::AddLeft | Pos::MulRight | Pos::DivChild),
        // Divisions are always grouped when nested.
        Expr::Div(..) => !matches!(pos, Pos::Root),
    }
}

fn write_expr(expr: &Expr, pos: Pos, out: &mut String) {
    let parens = needs_parens(expr, pos);
    if parens {
        out.push('(');
    }
    match expr {
        Expr::Const(c) => out.push_str(&c.to_string()),
        Expr::Var(name) | Expr::Param(name) => out.push_str(name),
        Expr::Add(l, r) => {
            write_expr(l, Pos::AddLeft, out);
            out.push('+');
            write_expr(r, Pos::AddRight, out);
        }
        Expr::Mul(l, r) => {
            write_expr(l, Pos::MulLeft, out);
            out.push('*');
            write_expr(r, Pos::MulRight, out);
        }
        Expr::Div(l, r) => {
            write_expr(l, Pos::DivChild, out);
            out.push('/');
            write_expr(r, Pos::DivChild, out);
        }
    }
    if parens {
        out.push(')');
    }
}

impl Expr {
    /// C text of the expression in offset position.
    pub fn to_c(&self) -> String {
        let mut s = String::new();
        write_expr(self, Pos::Root, &mut s);
        s
    }

    /// C text in loop-bound position: like [`Expr::to_c`] except a bare
    /// division is grouped, matching `ip < (sizel/np)`.
    pub fn to_c_bound(&self) -> String {
        let mut s = String::new();
        write_expr(self, Pos::Bound, &mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_c())
    }
}

/// Name -> value bindings for evaluation. Lookups are linear; environments
/// stay tiny (a handful of parameters plus nest depth).
#[derive(Clone, Debug, Default)]
pub struct Env {
    bindings: Vec<(String, i64)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn from_pairs(pairs: &[(String, i64)]) -> Self {
        Env {
            bindings: pairs.to_vec(),
        }
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    pub fn push(&mut self, name: &str, value: i64) {
        self.bindings.push((name.to_string(), value));
    }

    pub fn set_last(&mut self, value: i64) {
        if let Some(last) = self.bindings.last_mut() {
            last.1 = value;
        }
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    pub fn snapshot(&self) -> Vec<(String, i64)> {
        self.bindings.clone()
    }
}
