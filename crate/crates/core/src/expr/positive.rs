//! Radical simplification under explicit positivity assumptions.
//!
//! The canonicalizer treats rational powers formally and never reduces
//! `(h^2)^(1/2)` to `h`.  When the caller asserts that specific symbols
//! are positive, nested powers over provably positive bases may be merged
//! and powers distributed over provably positive products.

use super::{Expr, Symbol};
use num_traits::Signed;
use std::collections::BTreeSet;

/// Symbols assumed strictly positive.
#[derive(Clone, Debug, Default)]
pub struct Assumptions {
    positive: BTreeSet<Symbol>,
}

impl Assumptions {
    pub fn positive(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        Assumptions {
            positive: symbols.into_iter().collect(),
        }
    }

    pub fn assume_positive(&mut self, s: Symbol) {
        self.positive.insert(s);
    }

    /// Conservative positivity check: true only when the expression is
    /// provably positive under the assumptions.
    pub fn is_positive(&self, e: &Expr) -> bool {
        match e {
            Expr::Rat(r) => r.is_positive(),
            Expr::Sym(s) => self.positive.contains(s),
            Expr::Exp(_) => true,
            Expr::Pow(b, _) => self.is_positive(b),
            Expr::Prod(fs) => fs.iter().all(|f| self.is_positive(f)),
            Expr::Sum(ts) => ts.iter().all(|t| self.is_positive(t)),
            Expr::Func(_) => false,
        }
    }
}

/// Simplify radicals over provably positive bases and recanonicalize.
pub fn simplify_positive(e: &Expr, assumptions: &Assumptions) -> Expr {
    rewrite(e, assumptions).canonicalize()
}

fn rewrite(e: &Expr, a: &Assumptions) -> Expr {
    match e {
        Expr::Rat(_) | Expr::Sym(_) | Expr::Func(_) => e.clone(),
        Expr::Exp(arg) => Expr::exp(rewrite(arg, a)),
        Expr::Prod(fs) => Expr::prod(fs.iter().map(|f| rewrite(f, a)).collect()),
        Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| rewrite(t, a)).collect()),
        Expr::Pow(base, q) => {
            let base = rewrite(base, a);
            pow_positive(base, q.clone(), a)
        }
    }
}

fn pow_positive(base: Expr, q: super::Rat, a: &Assumptions) -> Expr {
    if a.is_positive(&base) {
        match base {
            Expr::Pow(inner, p) => return pow_positive((*inner).clone(), p * q, a),
            Expr::Prod(fs) => {
                return Expr::prod(
                    fs.into_iter()
                        .map(|f| pow_positive(f, q.clone(), a))
                        .collect(),
                )
            }
            _ => {}
        }
    }
    Expr::pow(base, q)
}

#[cfg(test)]
mod tests {
    use super::super::{rat, Expr, Symbol};
    use super::{simplify_positive, Assumptions};

    #[test]
    fn positive_branch_collapses_radicals() {
        // h^(1/2)*x with h -> (c/x)^2 reduces to c on the positive branch
        let h = Expr::sym("h");
        let e = Expr::pow(h.clone(), rat(1, 2)) * Expr::sym("x");
        let c_over_x_sq =
            Expr::pow(Expr::sym("c") * Expr::pow(Expr::sym("x"), rat(-1, 1)), rat(2, 1));
        let substituted = e.substitute(&h, &c_over_x_sq).unwrap();
        let assume = Assumptions::positive([Symbol::new("c"), Symbol::new("x")]);
        assert_eq!(simplify_positive(&substituted, &assume), Expr::sym("c"));
    }

    #[test]
    fn no_assumption_no_collapse() {
        let h = Expr::sym("h");
        let e = Expr::pow(Expr::pow(h.clone(), rat(2, 1)), rat(1, 2));
        let plain = Assumptions::default();
        assert_ne!(simplify_positive(&e, &plain), h);
    }
}
