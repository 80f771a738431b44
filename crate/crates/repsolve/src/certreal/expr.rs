//! Symbolic expressions over exact rationals, square roots, and logarithms.
//!
//! Expressions are cheap to clone (shared subtrees) and evaluate to certified
//! balls at any requested precision. Logarithm and square-root nodes are
//! memoized per (expression, precision) pair: the reduction stages evaluate
//! the same handful of logs tens of thousands of times.

use super::{ln_rational, CertReal, Dyadic};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Ratio(BigRational),
    Sqrt(Arc<Expr>),
    Ln(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
}

type Memo = RwLock<HashMap<(Expr, u32), CertReal>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Ratio(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn bigint(v: BigInt) -> Expr {
        Expr::Ratio(BigRational::from_integer(v))
    }

    pub fn ratio(p: BigInt, q: BigInt) -> Result<Expr> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Expr::Ratio(BigRational::new(p, q)))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Arc::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Arc::new(self))
    }

    pub fn add(self, other: Expr) -> Expr {
        Expr::Add(Arc::new(self), Arc::new(other))
    }

    pub fn sub(self, other: Expr) -> Expr {
        Expr::Sub(Arc::new(self), Arc::new(other))
    }

    pub fn mul(self, other: Expr) -> Expr {
        Expr::Mul(Arc::new(self), Arc::new(other))
    }

    pub fn div(self, other: Expr) -> Expr {
        Expr::Div(Arc::new(self), Arc::new(other))
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Arc::new(self))
    }

    /// The golden ratio (1 + sqrt 5) / 2, the dominant root of x^2 - x - 1.
    pub fn golden_ratio() -> Expr {
        Expr::int(1).add(Expr::int(5).sqrt()).div(Expr::int(2))
    }

    /// ln of the golden ratio.
    pub fn ln_alpha() -> Expr {
        Expr::golden_ratio().ln()
    }

    /// tau(g) = ln(alpha) / ln(g), the irrational ratio driving every
    /// base-g reduction.
    pub fn tau(g: u32) -> Expr {
        Expr::ln_alpha().div(Expr::int(g as i64).ln())
    }

    /// Evaluate to a certified ball; logs and roots are memoized.
    pub fn eval(&self, prec: u32) -> Result<CertReal> {
        match self {
            Expr::Ratio(r) => CertReal::from_ratio(r.numer(), r.denom(), prec),
            Expr::Neg(a) => Ok(a.eval(prec)?.neg()),
            Expr::Add(a, b) => Ok(a.eval(prec)?.add(&b.eval(prec)?)),
            Expr::Sub(a, b) => Ok(a.eval(prec)?.sub(&b.eval(prec)?)),
            Expr::Mul(a, b) => Ok(a.eval(prec)?.mul(&b.eval(prec)?)),
            Expr::Div(a, b) => a.eval(prec)?.div(&b.eval(prec)?),
            Expr::Sqrt(_) | Expr::Ln(_) => {
                let key = (self.clone(), prec);
                if let Some(hit) = memo().read().unwrap().get(&key) {
                    return Ok(hit.clone());
                }
                let val = match self {
                    Expr::Sqrt(a) => a.eval(prec)?.sqrt()?,
                    Expr::Ln(a) => match a.as_ref() {
                        // exact-rational logs get the sharper direct kernel
                        Expr::Ratio(r) => {
                            if r.is_negative() || r.is_zero() {
                                return Err(Error::AmbiguousSign);
                            }
                            ln_rational(r.numer(), r.denom(), prec)?
                        }
                        _ => a.eval(prec)?.ln()?,
                    },
                    _ => unreachable!(),
                };
                memo().write().unwrap().insert(key, val.clone());
                Ok(val)
            }
        }
    }

    /// Evaluate and additionally require radius below 2^-min_frac_bits.
    pub fn eval_sharp(&self, prec: u32, min_frac_bits: u32) -> Result<CertReal> {
        let v = self.eval(prec)?;
        if v.radius().cmp(&Dyadic::pow2(-(min_frac_bits as i64))) == std::cmp::Ordering::Less {
            Ok(v)
        } else {
            Err(Error::Unresolved)
        }
    }
}
