//! Canonical normal form: fully expanded, collected polynomial form over
//! the atom alphabet (symbols, function atoms, formal powers, and a single
//! merged exponential factor per monomial).

use super::{Expr, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Internal monomial: formal factors `base^exponent` plus the canonical
/// argument of a single exponential factor (`Rat(0)` when absent).
/// Exponential factors are merged additively, so `exp(a)*exp(b)` and
/// `exp(a+b)` share one representation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Monomial {
    factors: BTreeMap<Expr, Rat>,
    exp_arg: Expr,
}

impl Monomial {
    fn unit() -> Self {
        Monomial {
            factors: BTreeMap::new(),
            exp_arg: Expr::zero(),
        }
    }

    fn atom(base: Expr, exponent: Rat) -> Self {
        let mut factors = BTreeMap::new();
        if !exponent.is_zero() {
            factors.insert(base, exponent);
        }
        Monomial {
            factors,
            exp_arg: Expr::zero(),
        }
    }

    fn exponential(arg: Expr) -> Self {
        Monomial {
            factors: BTreeMap::new(),
            exp_arg: arg,
        }
    }

}

type Poly = BTreeMap<Monomial, Rat>;

fn poly_zero() -> Poly {
    BTreeMap::new()
}

fn poly_const(r: Rat) -> Poly {
    let mut p = poly_zero();
    if !r.is_zero() {
        p.insert(Monomial::unit(), r);
    }
    p
}

fn poly_mono(m: Monomial, c: Rat) -> Poly {
    let mut p = poly_zero();
    if !c.is_zero() {
        p.insert(m, c);
    }
    p
}

fn poly_add_into(acc: &mut Poly, other: Poly) {
    for (m, c) in other {
        let entry = acc.entry(m).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            // remove the now-zero entry; need the key again, so do it lazily
        }
    }
    acc.retain(|_, c| !c.is_zero());
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = poly_zero();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let part = mul_monomials(ma, mb);
            let coeff = ca * cb;
            for (m, c) in part {
                let entry = out.entry(m).or_insert_with(Rat::zero);
                *entry += &coeff * c;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Multiply two monomials.  Merged factors whose exponent becomes an
/// integer on a compound base (rational, product, positive power of a sum)
/// overflow back into polynomial expansion, so the result is a `Poly`.
fn mul_monomials(a: &Monomial, b: &Monomial) -> Poly {
    let mut factors = a.factors.clone();
    for (base, exp) in &b.factors {
        let entry = factors.entry(base.clone()).or_insert_with(Rat::zero);
        *entry += exp;
    }
    factors.retain(|_, e| !e.is_zero());

    let exp_arg = sum(vec![a.exp_arg.clone(), b.exp_arg.clone()]);

    let mut plain = BTreeMap::new();
    let mut overflow: Vec<(Expr, Rat)> = Vec::new();
    for (base, exp) in factors {
        if exp.is_integer() && expandable(&base, &exp) {
            overflow.push((base, exp));
        } else {
            plain.insert(base, exp);
        }
    }
    let mut out = poly_mono(
        Monomial {
            factors: plain,
            exp_arg,
        },
        Rat::one(),
    );
    for (base, exp) in overflow {
        out = poly_mul(&out, &pow_expr(base, exp));
    }
    out
}

/// Whether `base^exp` (integer `exp`) must be expanded rather than kept as
/// a formal factor.
fn expandable(base: &Expr, exp: &Rat) -> bool {
    match base {
        Expr::Rat(r) => !r.is_zero() || exp.is_positive(),
        Expr::Prod(_) | Expr::Pow(..) | Expr::Exp(_) => true,
        Expr::Sum(_) => exp.is_positive(),
        Expr::Sym(_) | Expr::Func(_) => false,
    }
}

fn poly_of(e: &Expr) -> Poly {
    match e {
        Expr::Rat(r) => poly_const(r.clone()),
        Expr::Sym(_) | Expr::Func(_) => poly_mono(Monomial::atom(e.clone(), Rat::one()), Rat::one()),
        Expr::Exp(a) => {
            let arg = canonicalize((**a).clone());
            if arg.is_zero() {
                poly_const(Rat::one())
            } else {
                poly_mono(Monomial::exponential(arg), Rat::one())
            }
        }
        Expr::Pow(b, q) => pow_expr(canonicalize((**b).clone()), q.clone()),
        Expr::Prod(fs) => {
            let mut out = poly_const(Rat::one());
            for f in fs {
                out = poly_mul(&out, &poly_of(f));
                if out.is_empty() {
                    return out;
                }
            }
            out
        }
        Expr::Sum(ts) => {
            let mut out = poly_zero();
            for t in ts {
                poly_add_into(&mut out, poly_of(t));
            }
            out
        }
    }
}

/// Canonical power of a canonical base.
fn pow_expr(base: Expr, q: Rat) -> Poly {
    if q.is_zero() {
        return poly_const(Rat::one());
    }
    if q.is_one() {
        return poly_of(&base);
    }
    match &base {
        Expr::Rat(r) => {
            if r.is_zero() {
                if q.is_positive() {
                    return poly_zero();
                }
                // 0^negative kept formal; outside the engine's domain
                return poly_mono(Monomial::atom(base.clone(), q), Rat::one());
            }
            if q.is_integer() {
                return poly_const(rat_int_pow(r, q.to_integer()));
            }
            if let Some(root) = rat_exact_root(r, q.denom()) {
                let p = Rat::from_integer(q.numer().clone());
                return pow_expr(Expr::Rat(root), p);
            }
            poly_mono(Monomial::atom(base.clone(), q), Rat::one())
        }
        Expr::Exp(a) => {
            let arg = prod(vec![Expr::Rat(q), (**a).clone()]);
            poly_of(&Expr::exp(arg))
        }
        Expr::Pow(inner, p) => {
            if q.is_integer() {
                // (b^p)^n = b^(p*n) holds pointwise for integer n
                pow_expr((**inner).clone(), p * &q)
            } else {
                poly_mono(Monomial::atom(base.clone(), q), Rat::one())
            }
        }
        Expr::Prod(fs) => {
            if q.is_integer() {
                let mut out = poly_const(Rat::one());
                for f in fs {
                    out = poly_mul(&out, &pow_expr(f.clone(), q.clone()));
                }
                out
            } else {
                poly_mono(Monomial::atom(base, q), Rat::one())
            }
        }
        Expr::Sum(_) => {
            if q.is_integer() && q.is_positive() {
                let n = q
                    .to_integer()
                    .to_u32()
                    .expect("sum exponent fits in u32");
                let p = poly_of(&base);
                let mut out = poly_const(Rat::one());
                for _ in 0..n {
                    out = poly_mul(&out, &p);
                }
                out
            } else {
                poly_mono(Monomial::atom(base, q), Rat::one())
            }
        }
        Expr::Sym(_) | Expr::Func(_) => poly_mono(Monomial::atom(base, q), Rat::one()),
    }
}

fn rat_int_pow(r: &Rat, n: BigInt) -> Rat {
    let mut result = Rat::one();
    let mut base = if n.is_negative() { r.recip() } else { r.clone() };
    let mut k = n.abs();
    let two = BigInt::from(2);
    while k.is_positive() {
        if (&k % &two).is_one() {
            result *= &base;
        }
        let sq = &base * &base;
        base = sq;
        k /= &two;
    }
    result
}

/// Exact `root`-th root of a rational if one exists over the rationals.
fn rat_exact_root(r: &Rat, root: &BigInt) -> Option<Rat> {
    let root = root.to_u32()?;
    if root == 0 {
        return None;
    }
    let num = int_exact_root(r.numer(), root)?;
    let den = int_exact_root(r.denom(), root)?;
    Some(Rat::new(num, den))
}

fn int_exact_root(n: &BigInt, root: u32) -> Option<BigInt> {
    if n.is_negative() {
        if root % 2 == 0 {
            return None;
        }
        return int_exact_root(&-n, root).map(|r| -r);
    }
    let r = n.nth_root(root);
    if num_traits::pow::Pow::pow(&r, root) == *n {
        Some(r)
    } else {
        None
    }
}

fn emit_monomial(m: &Monomial) -> Option<Expr> {
    let mut factors: Vec<Expr> = m
        .factors
        .iter()
        .map(|(base, exp)| {
            if exp.is_one() {
                base.clone()
            } else {
                Expr::Pow(Box::new(base.clone()), exp.clone())
            }
        })
        .collect();
    if !m.exp_arg.is_zero() {
        factors.push(Expr::Exp(Box::new(m.exp_arg.clone())));
    }
    factors.sort();
    match factors.len() {
        0 => None,
        1 => Some(factors.pop().unwrap()),
        _ => Some(Expr::Prod(factors)),
    }
}

fn emit_term(coeff: &Rat, core: Option<Expr>) -> Expr {
    match core {
        None => Expr::Rat(coeff.clone()),
        Some(c) if coeff.is_one() => c,
        Some(Expr::Prod(fs)) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::Rat(coeff.clone()));
            v.extend(fs);
            Expr::Prod(v)
        }
        Some(c) => Expr::Prod(vec![Expr::Rat(coeff.clone()), c]),
    }
}

fn emit(p: Poly) -> Expr {
    let mut terms: Vec<(Option<Expr>, Rat)> = p
        .into_iter()
        .map(|(m, c)| (emit_monomial(&m), c))
        .collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    match terms.len() {
        0 => Expr::zero(),
        1 => {
            let (core, coeff) = terms.pop().unwrap();
            emit_term(&coeff, core)
        }
        _ => Expr::Sum(
            terms
                .into_iter()
                .map(|(core, coeff)| emit_term(&coeff, core))
                .collect(),
        ),
    }
}

pub(super) fn canonicalize(e: Expr) -> Expr {
    emit(poly_of(&e))
}

pub(super) fn sum(terms: Vec<Expr>) -> Expr {
    let mut p = poly_zero();
    for t in terms {
        poly_add_into(&mut p, poly_of(&t));
    }
    emit(p)
}

pub(super) fn prod(factors: Vec<Expr>) -> Expr {
    let mut p = poly_const(Rat::one());
    for f in factors {
        p = poly_mul(&p, &poly_of(&f));
        if p.is_empty() {
            break;
        }
    }
    emit(p)
}

pub(super) fn pow(base: Expr, exponent: Rat) -> Expr {
    emit(pow_expr(canonicalize(base), exponent))
}

pub(super) fn exp(arg: Expr) -> Expr {
    emit(poly_of(&Expr::Exp(Box::new(arg))))
}

/// One term of a canonical expression: `coeff * prod(factors) * exp(exp_arg)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rat,
    /// Formal factors as (base, exponent) pairs, sorted by base.
    pub factors: Vec<(Expr, Rat)>,
    /// Argument of the exponential factor; `Rat(0)` when absent.
    pub exp_arg: Expr,
}

impl Term {
    pub fn constant(coeff: Rat) -> Term {
        Term {
            coeff,
            factors: Vec::new(),
            exp_arg: Expr::zero(),
        }
    }

    /// The term without its numeric coefficient.
    pub fn core_expr(&self) -> Expr {
        let m = Monomial {
            factors: self.factors.iter().cloned().collect(),
            exp_arg: self.exp_arg.clone(),
        };
        emit_monomial(&m).unwrap_or_else(Expr::one)
    }

    pub fn into_expr(self) -> Expr {
        let core = {
            let m = Monomial {
                factors: self.factors.iter().cloned().collect(),
                exp_arg: self.exp_arg.clone(),
            };
            emit_monomial(&m)
        };
        emit_term(&self.coeff, core)
    }
}

pub(super) fn terms(e: &Expr) -> Vec<Term> {
    poly_of(e)
        .into_iter()
        .map(|(m, c)| Term {
            coeff: c,
            factors: m.factors.into_iter().collect(),
            exp_arg: m.exp_arg,
        })
        .collect()
}

pub(super) fn from_terms(ts: Vec<Term>) -> Expr {
    let mut p = poly_zero();
    for t in ts {
        poly_add_into(
            &mut p,
            poly_mono(
                Monomial {
                    factors: t.factors.into_iter().collect(),
                    exp_arg: t.exp_arg,
                },
                t.coeff,
            ),
        );
    }
    emit(p)
}

#[cfg(test)]
mod tests {
    use super::super::{rat, Expr};

    #[test]
    fn like_terms_merge() {
        let u = Expr::sym("u");
        let e = u.clone() + u.clone();
        assert_eq!(e, Expr::int(2) * u);
    }

    #[test]
    fn exponent_cancellation() {
        let x = Expr::sym("x");
        let e = x.clone() * Expr::pow(x, rat(-1, 1));
        assert_eq!(e, Expr::one());
    }

    #[test]
    fn self_subtraction_is_zero() {
        let e = Expr::func_d("E", &["u"], &["u"]) * Expr::func_d("xi1", &["t", "x"], &["x"]);
        assert!((e.clone() - e).is_zero());
    }

    #[test]
    fn products_expand_over_sums() {
        let (a, b, c) = (Expr::sym("a"), Expr::sym("b"), Expr::sym("c"));
        let lhs = (a.clone() + b.clone()) * c.clone();
        let rhs = a * c.clone() + b * c;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_factors_merge() {
        let u = Expr::sym("u");
        let e = Expr::exp(u.clone()) * Expr::exp(u.clone().neg());
        assert_eq!(e, Expr::one());
        let sq = Expr::pow(Expr::exp(u.clone()), rat(2, 1));
        assert_eq!(sq, Expr::exp(Expr::int(2) * u));
    }

    #[test]
    fn formal_radicals_do_not_collapse() {
        // (h^2)^(1/2) stays formal without a positivity assumption
        let h = Expr::sym("h");
        let e = Expr::pow(Expr::pow(h.clone(), rat(2, 1)), rat(1, 2));
        assert_ne!(e, h);
        // but integer powers of powers merge
        let e2 = Expr::pow(Expr::pow(h.clone(), rat(1, 2)), rat(2, 1));
        assert_eq!(e2, h);
    }

    #[test]
    fn rational_arithmetic_folds() {
        let e = Expr::rat(1, 2) * Expr::int(4) + Expr::int(1);
        assert_eq!(e, Expr::int(3));
        let r = Expr::pow(Expr::int(8), rat(1, 3));
        assert_eq!(r, Expr::int(2));
        let irr = Expr::pow(Expr::int(2), rat(1, 2));
        assert!(matches!(irr, Expr::Pow(..)));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let e = (Expr::sym("x") + Expr::int(1)).powi(3) * Expr::exp(Expr::sym("u"))
            + Expr::func_d("h", &["x"], &["x"]) * Expr::rat(2, 3);
        let c1 = e.clone().canonicalize();
        let c2 = c1.clone().canonicalize();
        assert_eq!(c1, c2);
        assert_eq!(e, c1);
    }
}
