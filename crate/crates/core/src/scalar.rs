//! Scalar abstraction shared by plain `f64` evaluation and second-order
//! forward-mode jets.
//!
//! [`Dual2`] carries a value together with its gradient and Hessian with
//! respect to the `m` base coordinates. Because `Dual2<S>` is itself a
//! [`Scalar`], nesting `Dual2<Dual2<f64>>` yields derivatives up to fourth
//! order, which is what the differential-inequality diagnostics need to
//! differentiate curvature quantities of an analytic graph exactly.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_f64(v: f64) -> Self;
    /// Plain value (the order-zero part).
    fn value(&self) -> f64;
    /// True when every carried component is finite.
    fn is_finite(&self) -> bool;

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn tanh(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn powi(&self, k: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn scale(&self, c: f64) -> Self {
        self.clone() * Self::from_f64(c)
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

/// Second-order forward-mode number: value, gradient and (row-major,
/// symmetric) Hessian in `dim` variables.
///
/// Constants are stored with empty derivative vectors and behave as zeros in
/// every operation.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual2<S> {
    pub val: S,
    pub grad: Vec<S>,
    pub hess: Vec<S>,
}

impl<S: Scalar> Dual2<S> {
    pub fn constant(val: S) -> Self {
        Dual2 {
            val,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    /// The `k`-th of `dim` independent variables, seeded at `val`.
    pub fn variable(val: S, k: usize, dim: usize) -> Self {
        let mut grad = vec![S::zero(); dim];
        grad[k] = S::from_f64(1.0);
        Dual2 {
            val,
            grad,
            hess: vec![S::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad_at(&self, i: usize) -> S {
        self.grad.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn hess_at(&self, i: usize, j: usize) -> S {
        let d = self.dim();
        if d == 0 {
            S::zero()
        } else {
            self.hess[i * d + j].clone()
        }
    }

    /// Apply a scalar function given its value and first two derivatives at
    /// `self.val`.
    fn chain(&self, f0: S, f1: S, f2: S) -> Self {
        let d = self.dim();
        if d == 0 {
            return Dual2::constant(f0);
        }
        let grad = self.grad.iter().map(|g| f1.clone() * g.clone()).collect();
        let mut hess = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let outer = self.grad[i].clone() * self.grad[j].clone();
                hess.push(f1.clone() * self.hess[i * d + j].clone() + f2.clone() * outer);
            }
        }
        Dual2 {
            val: f0,
            grad,
            hess,
        }
    }

    fn recip(&self) -> Self {
        let inv = S::from_f64(1.0) / self.val.clone();
        let f1 = -(inv.clone() * inv.clone());
        let f2 = (inv.clone() * inv.clone() * inv.clone()).scale(2.0);
        self.chain(inv, f1, f2)
    }
}

fn zip_dims<S: Scalar>(a: &Dual2<S>, b: &Dual2<S>) -> usize {
    let (da, db) = (a.dim(), b.dim());
    debug_assert!(da == 0 || db == 0 || da == db, "mismatched dual dimensions");
    da.max(db)
}

impl<S: Scalar> Add for Dual2<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = zip_dims(&self, &rhs);
        let grad = (0..d).map(|i| self.grad_at(i) + rhs.grad_at(i)).collect();
        let hess = (0..d * d)
            .map(|k| self.hess_at(k / d, k % d) + rhs.hess_at(k / d, k % d))
            .collect();
        Dual2 {
            val: self.val + rhs.val,
            grad,
            hess,
        }
    }
}

impl<S: Scalar> Sub for Dual2<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for Dual2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual2 {
            val: -self.val,
            grad: self.grad.into_iter().map(|g| -g).collect(),
            hess: self.hess.into_iter().map(|h| -h).collect(),
        }
    }
}

impl<S: Scalar> Mul for Dual2<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = zip_dims(&self, &rhs);
        let grad = (0..d)
            .map(|i| self.grad_at(i) * rhs.val.clone() + self.val.clone() * rhs.grad_at(i))
            .collect();
        let mut hess = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                // cross terms summed in an order that is symmetric in (i, j)
                let cross = self.grad_at(i) * rhs.grad_at(j) + self.grad_at(j) * rhs.grad_at(i);
                hess.push(
                    self.hess_at(i, j) * rhs.val.clone()
                        + cross
                        + self.val.clone() * rhs.hess_at(i, j),
                );
            }
        }
        Dual2 {
            val: self.val * rhs.val,
            grad,
            hess,
        }
    }
}

impl<S: Scalar> Div for Dual2<S> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<S: Scalar> Scalar for Dual2<S> {
    fn from_f64(v: f64) -> Self {
        Dual2::constant(S::from_f64(v))
    }
    fn value(&self) -> f64 {
        self.val.value()
    }
    fn is_finite(&self) -> bool {
        self.val.is_finite()
            && self.grad.iter().all(Scalar::is_finite)
            && self.hess.iter().all(Scalar::is_finite)
    }
    fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e.clone(), e.clone(), e)
    }
    fn ln(&self) -> Self {
        let inv = S::from_f64(1.0) / self.val.clone();
        let f2 = -(inv.clone() * inv.clone());
        self.chain(self.val.ln(), inv, f2)
    }
    fn sinh(&self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(s.clone(), c, s)
    }
    fn cosh(&self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(c.clone(), s, c)
    }
    fn tanh(&self) -> Self {
        let t = self.val.tanh();
        let d1 = S::from_f64(1.0) - t.clone() * t.clone();
        let d2 = (t.clone() * d1.clone()).scale(-2.0);
        self.chain(t, d1, d2)
    }
    fn sqrt(&self) -> Self {
        let r = self.val.sqrt();
        let d1 = S::from_f64(0.5) / r.clone();
        let d2 = S::from_f64(-0.25) / (r.clone() * self.val.clone());
        self.chain(r, d1, d2)
    }
    fn powf(&self, p: f64) -> Self {
        let f0 = self.val.powf(p);
        let f1 = self.val.powf(p - 1.0).scale(p);
        let f2 = self.val.powf(p - 2.0).scale(p * (p - 1.0));
        self.chain(f0, f1, f2)
    }
    fn powi(&self, k: i32) -> Self {
        let f0 = self.val.powi(k);
        let f1 = if k == 0 {
            S::zero()
        } else {
            self.val.powi(k - 1).scale(f64::from(k))
        };
        let f2 = if k == 0 || k == 1 {
            S::zero()
        } else {
            self.val.powi(k - 2).scale(f64::from(k) * f64::from(k - 1))
        };
        self.chain(f0, f1, f2)
    }
}
