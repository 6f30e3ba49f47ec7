//! Arithmetic expressions over `x1..xm` with exact second-order jets.
//!
//! Jets come from forward-mode [`Dual2`] evaluation of the tree, so
//! derivatives are exact to roundoff and Hessians symmetric by construction.
//! Leaving the real domain of a function is an error, never a quiet NaN.

mod ast;
mod parser;

use std::fmt;

pub use ast::{Expr, Func};

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::scalar::{Dual2, Scalar};

/// A parsed expression bound to a variable count `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    expr: Expr,
    m: usize,
}

impl Expression {
    pub fn parse(src: &str, m: usize) -> Result<Self> {
        Ok(Expression {
            expr: parser::parse_expr(src, m)?,
            m,
        })
    }

    /// Parse `;`-separated expressions, e.g. `"ln(1+exp(2*x1))-x1; 0.5*x2"`.
    pub fn parse_list(src: &str, m: usize) -> Result<Vec<Self>> {
        Ok(parser::parse_list(src, m)?
            .into_iter()
            .map(|expr| Expression { expr, m })
            .collect())
    }

    pub fn from_expr(expr: Expr, m: usize) -> Result<Self> {
        if expr.arity() > m {
            return Err(Error::UnknownIdentifier {
                name: format!("x{}", expr.arity()),
                line: 0,
                column: 0,
            });
        }
        Ok(Expression { expr, m })
    }

    pub fn ast(&self) -> &Expr {
        &self.expr
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.eval_scalar(x)
    }

    pub fn eval_scalar<S: Scalar>(&self, x: &[S]) -> Result<S> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                what: "expression arguments",
                expected: self.m,
                got: x.len(),
            });
        }
        eval_node(&self.expr, x)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

fn domain(e: &Expr, reason: impl Into<String>) -> Error {
    Error::Domain {
        subexpr: e.to_string(),
        reason: reason.into(),
    }
}

fn checked<S: Scalar>(e: &Expr, v: S) -> Result<S> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(e, "non-finite value or derivative"))
    }
}

fn constant_value(e: &Expr) -> Option<f64> {
    if e.arity() == 0 {
        eval_node::<f64>(e, &[]).ok()
    } else {
        None
    }
}

fn eval_node<S: Scalar>(e: &Expr, x: &[S]) -> Result<S> {
    let v = match e {
        Expr::Num(v) => S::from_f64(*v),
        Expr::Var(k) => x[*k].clone(),
        Expr::Neg(a) => -eval_node(a, x)?,
        Expr::Add(a, b) => eval_node(a, x)? + eval_node(b, x)?,
        Expr::Sub(a, b) => eval_node(a, x)? - eval_node(b, x)?,
        Expr::Mul(a, b) => eval_node(a, x)? * eval_node(b, x)?,
        Expr::Div(a, b) => {
            let den = eval_node(b, x)?;
            if den.value() == 0.0 {
                return Err(domain(e, "division by zero"));
            }
            eval_node(a, x)? / den
        }
        Expr::Pow(a, b) => {
            let base = eval_node(a, x)?;
            match constant_value(b) {
                Some(p) if p.fract() == 0.0 && p.abs() <= f64::from(i32::MAX) => {
                    if base.value() == 0.0 && p < 0.0 {
                        return Err(domain(e, "zero raised to a negative power"));
                    }
                    base.powi(p as i32)
                }
                Some(p) => {
                    if base.value() < 0.0 {
                        return Err(domain(e, "negative base with non-integer exponent"));
                    }
                    base.powf(p)
                }
                None => {
                    if base.value() <= 0.0 {
                        return Err(domain(e, "non-positive base with variable exponent"));
                    }
                    (eval_node(b, x)? * base.ln()).exp()
                }
            }
        }
        Expr::Call(func, a) => {
            let arg = eval_node(a, x)?;
            match func {
                Func::Exp => arg.exp(),
                Func::Ln => {
                    if arg.value() <= 0.0 {
                        return Err(domain(e, "logarithm of a non-positive number"));
                    }
                    arg.ln()
                }
                Func::Sinh => arg.sinh(),
                Func::Cosh => arg.cosh(),
                Func::Tanh => arg.tanh(),
                Func::Sech => S::from_f64(1.0) / arg.cosh(),
                Func::Sqrt => {
                    if arg.value() < 0.0 {
                        return Err(domain(e, "square root of a negative number"));
                    }
                    arg.sqrt()
                }
            }
        }
    };
    checked(e, v)
}

fn check_point(exprs: &[Expression], x: &[f64]) -> Result<usize> {
    let m = x.len();
    if exprs.is_empty() {
        return Err(Error::InvalidInput("need at least one graph function".into()));
    }
    if let Some(bad) = exprs.iter().find(|e| e.m != m) {
        return Err(Error::DimensionMismatch {
            what: "expression variables",
            expected: m,
            got: bad.m,
        });
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("non-finite base point".into()));
    }
    Ok(m)
}

/// Exact jet of the graph functions `exprs` at `x`.
pub fn analytic_jet(exprs: &[Expression], x: &[f64]) -> Result<Jet2> {
    let m = check_point(exprs, x)?;
    let vars: Vec<Dual2<f64>> = (0..m).map(|k| Dual2::variable(x[k], k, m)).collect();
    let mut value = Vec::with_capacity(exprs.len());
    let mut grad = Vec::with_capacity(exprs.len() * m);
    let mut hess = Vec::with_capacity(exprs.len() * m * m);
    for e in exprs {
        let d = e.eval_scalar(&vars)?;
        value.push(d.val);
        grad.extend((0..m).map(|i| d.grad_at(i)));
        hess.extend((0..m * m).map(|k| d.hess_at(k / m, k % m)));
    }
    Jet2::new(x.to_vec(), value, grad, hess)
}

/// Jet whose entries are themselves second-order numbers in `x`: `u^a`,
/// `u^a_i` and `u^a_ij` each carry their own gradient and Hessian. Any
/// quantity computed from this jet comes out with exact first and second
/// derivatives along the graph's parameter domain.
pub fn analytic_jet_lifted(exprs: &[Expression], x: &[f64]) -> Result<Jet2<Dual2<f64>>> {
    let m = check_point(exprs, x)?;
    let vars: Vec<Dual2<Dual2<f64>>> = (0..m)
        .map(|k| {
            let mut grad = vec![Dual2::constant(0.0); m];
            grad[k] = Dual2::constant(1.0);
            Dual2 {
                val: Dual2::variable(x[k], k, m),
                grad,
                hess: vec![Dual2::constant(0.0); m * m],
            }
        })
        .collect();
    let mut value = Vec::with_capacity(exprs.len());
    let mut grad = Vec::with_capacity(exprs.len() * m);
    let mut hess = Vec::with_capacity(exprs.len() * m * m);
    for e in exprs {
        let d = e.eval_scalar(&vars)?;
        value.push(d.val.clone());
        grad.extend((0..m).map(|i| d.grad_at(i)));
        hess.extend((0..m * m).map(|k| d.hess_at(k / m, k % m)));
    }
    Jet2::new(x.to_vec(), value, grad, hess)
}

#[cfg(test)]
mod tests;
