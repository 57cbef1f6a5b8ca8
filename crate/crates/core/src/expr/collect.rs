//! Polynomial collection of an expression by a set of atoms.

use super::{Expr, Rat, Term};
use std::collections::BTreeMap;

/// Collect `e` as a polynomial in the given atoms.
///
/// Returns a map from monomial (a canonical expression in the collected
/// atoms, `1` for the constant part) to its coefficient, which is free of
/// every collected atom.  Errors when the dependence is not polynomial:
/// an atom buried inside an exponential argument or inside a formal
/// compound power cannot be collected.
pub fn collect(e: &Expr, atoms: &[Expr]) -> Result<BTreeMap<Expr, Expr>, String> {
    let mut grouped: BTreeMap<Expr, Vec<Term>> = BTreeMap::new();
    for term in e.terms() {
        let mut mono_factors: Vec<(Expr, Rat)> = Vec::new();
        let mut coeff_factors: Vec<(Expr, Rat)> = Vec::new();
        for (base, exp) in term.factors {
            if atoms.contains(&base) {
                mono_factors.push((base, exp));
            } else {
                for a in atoms {
                    if base.contains(a) {
                        return Err(format!(
                            "non-polynomial dependence on `{a}` inside `{base}`"
                        ));
                    }
                }
                coeff_factors.push((base, exp));
            }
        }
        for a in atoms {
            if term.exp_arg.contains(a) {
                return Err(format!(
                    "non-polynomial dependence on `{a}` inside `exp({})`",
                    term.exp_arg
                ));
            }
        }
        let monomial = Term {
            coeff: Rat::from_integer(1.into()),
            factors: mono_factors,
            exp_arg: Expr::zero(),
        }
        .into_expr();
        let coeff_term = Term {
            coeff: term.coeff,
            factors: coeff_factors,
            exp_arg: term.exp_arg,
        };
        grouped.entry(monomial).or_default().push(coeff_term);
    }
    Ok(grouped
        .into_iter()
        .map(|(m, ts)| (m, Expr::from_terms(ts)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use super::collect;

    #[test]
    fn grouping_merges_like_monomials() {
        let (a, b, u_x) = (Expr::sym("a"), Expr::sym("b"), Expr::sym("u_x"));
        let e = a.clone() * u_x.clone().powi(2)
            + b.clone() * u_x.clone()
            + a.clone() * u_x.clone().powi(2);
        let m = collect(&e, std::slice::from_ref(&u_x)).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[&u_x.clone().powi(2)], Expr::int(2) * a);
        assert_eq!(m[&u_x], b);
    }

    #[test]
    fn constant_in_atom_case() {
        let e = Expr::func("E", &["u"]) * Expr::sym("u_xx");
        let m = collect(&e, &[Expr::sym("u_x")]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[&Expr::one()], e);
    }

    #[test]
    fn non_polynomial_dependence_errors() {
        let e = Expr::exp(Expr::sym("u_x"));
        assert!(collect(&e, &[Expr::sym("u_x")]).is_err());
    }

    #[test]
    fn reconstruction_round_trips() {
        let (a, b, u_x, u_xx) = (
            Expr::sym("a"),
            Expr::sym("b"),
            Expr::sym("u_x"),
            Expr::sym("u_xx"),
        );
        let e = a * u_x.clone().powi(3) + b.clone() * u_x.clone() * u_xx.clone()
            - Expr::int(2) * b * u_xx.clone();
        let m = collect(&e, &[u_x, u_xx]).unwrap();
        let back = Expr::sum(m.into_iter().map(|(mono, c)| mono * c).collect());
        assert_eq!(back, e);
    }
}
