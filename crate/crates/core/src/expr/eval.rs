//! Exact rational evaluation, used by the probabilistic identity tests.

use super::{Expr, FuncAtom, Rat, Symbol};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Assignment of exact rational values to symbols and function atoms.
///
/// Function atoms are assigned independent values keyed by name and
/// derivative multi-index.  `exp(a)` evaluates as `B^a` for the fixed
/// rational base `B` when the argument value is an integer, which keeps
/// the morphism `exp(a)*exp(b) = exp(a+b)` exact; non-integer arguments
/// make the sample unusable and evaluation returns `None`.
#[derive(Clone, Debug, Default)]
pub struct Valuation {
    pub symbols: BTreeMap<Symbol, Rat>,
    pub funcs: BTreeMap<(Symbol, Vec<Symbol>), Rat>,
    pub exp_base: Option<Rat>,
}

impl Valuation {
    fn func_value(&self, atom: &FuncAtom) -> Option<Rat> {
        self.funcs
            .get(&(atom.name().clone(), atom.deriv().to_vec()))
            .cloned()
    }
}

/// Evaluate to an exact rational, or `None` when the sample point cannot
/// be evaluated exactly (missing assignment, inexact root, non-integer
/// exponential argument).
pub fn eval_rational(e: &Expr, v: &Valuation) -> Option<Rat> {
    match e {
        Expr::Rat(r) => Some(r.clone()),
        Expr::Sym(s) => v.symbols.get(s).cloned(),
        Expr::Func(a) => v.func_value(a),
        Expr::Pow(b, q) => {
            let base = eval_rational(b, v)?;
            rat_pow(&base, q)
        }
        Expr::Exp(arg) => {
            let a = eval_rational(arg, v)?;
            if !a.is_integer() {
                return None;
            }
            let base = v.exp_base.clone().unwrap_or_else(|| Rat::new(3.into(), 1.into()));
            rat_pow(&base, &a)
        }
        Expr::Prod(fs) => {
            let mut acc = Rat::new(1.into(), 1.into());
            for f in fs {
                acc *= eval_rational(f, v)?;
            }
            Some(acc)
        }
        Expr::Sum(ts) => {
            let mut acc = Rat::zero();
            for t in ts {
                acc += eval_rational(t, v)?;
            }
            Some(acc)
        }
    }
}

fn rat_pow(base: &Rat, q: &Rat) -> Option<Rat> {
    if q.is_zero() {
        return Some(Rat::new(1.into(), 1.into()));
    }
    if base.is_zero() {
        return if q.is_positive() { Some(Rat::zero()) } else { None };
    }
    let root = if q.is_integer() {
        base.clone()
    } else {
        exact_root(base, q.denom())?
    };
    let n = q.numer();
    Some(int_pow(&root, n))
}

fn int_pow(r: &Rat, n: &BigInt) -> Rat {
    let mut result = Rat::new(1.into(), 1.into());
    let mut base = if n.is_negative() { r.recip() } else { r.clone() };
    let mut k = n.abs();
    let two = BigInt::from(2);
    while k.is_positive() {
        if &k % &two == BigInt::from(1) {
            result *= &base;
        }
        base = &base * &base;
        k /= &two;
    }
    result
}

fn exact_root(r: &Rat, root: &BigInt) -> Option<Rat> {
    let root = root.to_u32()?;
    let num = int_root(r.numer(), root)?;
    let den = int_root(r.denom(), root)?;
    Some(Rat::new(num, den))
}

fn int_root(n: &BigInt, root: u32) -> Option<BigInt> {
    if n.is_negative() {
        if root % 2 == 0 {
            return None;
        }
        return int_root(&-n, root).map(|r| -r);
    }
    let r = n.nth_root(root);
    if num_traits::pow::Pow::pow(&r, root) == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_morphism_is_exact() {
        let u = Symbol::new("u");
        let mut v = Valuation::default();
        v.symbols.insert(u.clone(), Rat::new(2.into(), 1.into()));
        let e = Expr::exp(Expr::sym("u")) * Expr::exp(Expr::sym("u").neg());
        assert_eq!(eval_rational(&e, &v), Some(Rat::new(1.into(), 1.into())));
    }

    #[test]
    fn canonicalization_preserves_value() {
        let mut v = Valuation::default();
        for (s, val) in [("a", (3, 7)), ("b", (-2, 5)), ("c", (11, 4))] {
            v.symbols
                .insert(Symbol::new(s), Rat::new(val.0.into(), val.1.into()));
        }
        let raw = Expr::Sum(vec![
            Expr::Prod(vec![
                Expr::Sum(vec![Expr::sym("a"), Expr::sym("b")]),
                Expr::sym("c"),
            ]),
            Expr::Prod(vec![Expr::int(-1), Expr::sym("a"), Expr::sym("c")]),
        ]);
        let canonical = raw.clone().canonicalize();
        assert_eq!(eval_rational(&raw, &v), eval_rational(&canonical, &v));
    }
}
