//! Partial differentiation and atom substitution.

use super::{Expr, Rat, Symbol};
use num_traits::One;

/// Partial derivative with respect to a plain symbol.  Linear, satisfies
/// the Leibniz rule; a function atom differentiates to its derivative atom
/// when `sym` is among its arguments and to zero otherwise.
pub(super) fn differentiate(e: &Expr, sym: &Symbol) -> Expr {
    match e {
        Expr::Rat(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == sym {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Func(atom) => {
            if atom.args().contains(sym) {
                Expr::Func(atom.derived(sym).expect("argument checked"))
            } else {
                Expr::zero()
            }
        }
        Expr::Pow(base, q) => {
            let db = differentiate(base, sym);
            if db.is_zero() {
                return Expr::zero();
            }
            let q1 = q - Rat::one();
            Expr::prod(vec![Expr::Rat(q.clone()), Expr::pow((**base).clone(), q1), db])
        }
        Expr::Exp(arg) => {
            let da = differentiate(arg, sym);
            if da.is_zero() {
                return Expr::zero();
            }
            Expr::prod(vec![e.clone(), da])
        }
        Expr::Prod(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let df = differentiate(f, sym);
                if df.is_zero() {
                    continue;
                }
                let mut factors = Vec::with_capacity(fs.len());
                for (j, g) in fs.iter().enumerate() {
                    factors.push(if i == j { df.clone() } else { g.clone() });
                }
                terms.push(Expr::prod(factors));
            }
            Expr::sum(terms)
        }
        Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| differentiate(t, sym)).collect()),
    }
}

/// Replace every occurrence of `target` (a symbol or function atom) by
/// `replacement`, then canonicalize.  Compound targets are rejected.
pub(super) fn substitute(e: &Expr, target: &Expr, replacement: &Expr) -> Result<Expr, String> {
    match target {
        Expr::Sym(_) | Expr::Func(_) => Ok(subst_atom(e, target, replacement)),
        _ => Err(format!(
            "substitution target must be a symbol or function atom, got `{target}`"
        )),
    }
}

fn subst_atom(e: &Expr, target: &Expr, replacement: &Expr) -> Expr {
    if e == target {
        return replacement.clone();
    }
    match e {
        Expr::Rat(_) | Expr::Sym(_) | Expr::Func(_) => e.clone(),
        Expr::Pow(b, q) => Expr::pow(subst_atom(b, target, replacement), q.clone()),
        Expr::Exp(a) => Expr::exp(subst_atom(a, target, replacement)),
        Expr::Prod(fs) => Expr::prod(fs.iter().map(|f| subst_atom(f, target, replacement)).collect()),
        Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| subst_atom(t, target, replacement)).collect()),
    }
}

/// Replace every atom of the function `name` — including its derivative
/// atoms — by the matching partial derivative of `body`.
pub(super) fn substitute_func(e: &Expr, name: &Symbol, body: &Expr) -> Expr {
    match e {
        Expr::Rat(_) | Expr::Sym(_) => e.clone(),
        Expr::Func(atom) => {
            if atom.name() == name {
                let mut out = body.clone();
                for d in atom.deriv() {
                    out = differentiate(&out, d);
                }
                out
            } else {
                e.clone()
            }
        }
        Expr::Pow(b, q) => Expr::pow(substitute_func(b, name, body), q.clone()),
        Expr::Exp(a) => Expr::exp(substitute_func(a, name, body)),
        Expr::Prod(fs) => Expr::prod(fs.iter().map(|f| substitute_func(f, name, body)).collect()),
        Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| substitute_func(t, name, body)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Symbol};

    #[test]
    fn chain_rule_through_exp() {
        let u = Symbol::new("u");
        let e = Expr::exp(Expr::sym("u").neg());
        let d = e.differentiate(&u);
        assert_eq!(d, e.neg());
    }

    #[test]
    fn func_atom_derivatives() {
        let big_e = Expr::func("E", &["u"]);
        assert_eq!(
            big_e.differentiate(&Symbol::new("u")),
            Expr::func_d("E", &["u"], &["u"])
        );
        let h = Expr::func("h", &["x"]);
        assert!(h.differentiate(&Symbol::new("t")).is_zero());
    }

    #[test]
    fn mixed_partials_commute() {
        let eta = Expr::func("eta", &["t", "x", "u"]);
        let x = Symbol::new("x");
        let u = Symbol::new("u");
        let d1 = eta.differentiate(&x).differentiate(&u);
        let d2 = eta.differentiate(&u).differentiate(&x);
        assert_eq!(d1, d2);
        assert_eq!(d1, Expr::func_d("eta", &["t", "x", "u"], &["x", "u"]));
    }

    #[test]
    fn substitution_cancels_on_shell() {
        // u_t - h*u with u_t := h*u
        let u_t = Expr::sym("u_t");
        let hu = Expr::func("h", &["x"]) * Expr::sym("u");
        let e = u_t.clone() - hu.clone();
        let r = e.substitute(&u_t, &hu).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn compound_target_rejected() {
        let e = Expr::sym("x");
        let target = Expr::sym("x") + Expr::one();
        assert!(e.substitute(&target, &Expr::zero()).is_err());
    }

    #[test]
    fn func_body_substitution_tracks_derivatives() {
        // h -> c^2 * x^(-2), so h_x -> -2 c^2 x^(-3)
        let name = Symbol::new("h");
        let body = Expr::pow(Expr::sym("c"), super::super::rat(2, 1))
            * Expr::pow(Expr::sym("x"), super::super::rat(-2, 1));
        let h_x = Expr::func_d("h", &["x"], &["x"]);
        let got = h_x.substitute_func(&name, &body);
        let want = Expr::int(-2)
            * Expr::pow(Expr::sym("c"), super::super::rat(2, 1))
            * Expr::pow(Expr::sym("x"), super::super::rat(-3, 1));
        assert_eq!(got, want);
    }
}
