//! Exact symbolic expression kernel.
//!
//! [`Expr`] is an immutable tree with exact rational constants, symbols,
//! flattened sums and products, rational powers, exponentials, and
//! arbitrary-function atoms carrying a derivative multi-index.  Every
//! constructor canonicalizes, so two expressions are mathematically equal
//! (as members of the polynomial ring over the atom alphabet) exactly when
//! they are structurally equal.
//!
//! The canonical form is the fully expanded, collected normal form:
//! sums contain no nested sums, products no nested products, numeric
//! factors are merged into a single leading rational, and terms/factors
//! are sorted by a fixed total order on nodes (constants < symbols <
//! powers < exponentials < function atoms < products < sums).
//!
//! Rational powers are treated formally: `(h^2)^(1/2)` is *not* reduced
//! to `h`; radical simplification happens only under an explicit
//! positive-branch assumption (see [`positive`]).

mod canon;
mod collect;
mod diff;
mod eval;
mod parse;
mod positive;
mod print;

pub use canon::Term;
pub use collect::collect;
pub use eval::{eval_rational, Valuation};
pub use parse::{parse, parse_with, ParseError, Resolver};
pub use positive::{simplify_positive, Assumptions};

use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exact rational scalar used throughout the kernel.
pub type Rat = num_rational::BigRational;

/// Interned-by-value symbol name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Self {
        Symbol(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// An arbitrary (or unknown) smooth function of declared symbol arguments,
/// together with a derivative multi-index over those arguments.
///
/// The multi-index is kept sorted in argument-declaration order, so mixed
/// partials commute by construction.  Indices outside the argument list
/// are rejected at construction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FuncAtom {
    name: Symbol,
    args: Vec<Symbol>,
    deriv: Vec<Symbol>,
}

impl FuncAtom {
    pub fn new(name: Symbol, args: Vec<Symbol>, deriv: Vec<Symbol>) -> Result<Self, String> {
        let mut deriv = deriv;
        for d in &deriv {
            if !args.contains(d) {
                return Err(format!(
                    "illegal derivative index {d} for {name}({}): not an argument",
                    join_symbols(&args)
                ));
            }
        }
        let pos = |s: &Symbol| args.iter().position(|a| a == s).unwrap();
        deriv.sort_by_key(pos);
        Ok(FuncAtom { name, args, deriv })
    }

    pub fn name(&self) -> &Symbol {
        &self.name
    }

    pub fn args(&self) -> &[Symbol] {
        &self.args
    }

    pub fn deriv(&self) -> &[Symbol] {
        &self.deriv
    }

    /// The atom with one more derivative taken with respect to `arg`.
    pub fn derived(&self, arg: &Symbol) -> Result<Self, String> {
        let mut deriv = self.deriv.clone();
        deriv.push(arg.clone());
        FuncAtom::new(self.name.clone(), self.args.clone(), deriv)
    }

    pub fn order(&self) -> usize {
        self.deriv.len()
    }
}

fn join_symbols(syms: &[Symbol]) -> String {
    syms.iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// Immutable symbolic expression in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    /// Exact rational constant.
    Rat(Rat),
    /// Plain symbol (coordinates, jet coordinates, parameters).
    Sym(Symbol),
    /// Formal rational power of a base expression.
    Pow(Box<Expr>, Rat),
    /// Exponential of an argument expression.
    Exp(Box<Expr>),
    /// Arbitrary-function atom (possibly a derivative atom).
    Func(FuncAtom),
    /// Flattened product, factors sorted, at most one leading rational.
    Prod(Vec<Expr>),
    /// Flattened sum of terms, sorted by their non-numeric core.
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Rat(Rat::zero())
    }

    pub fn one() -> Expr {
        Expr::Rat(Rat::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Rat(Rat::from_integer(n.into()))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Rat(Rat::new(num.into(), den.into()))
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    /// Function atom with no derivatives taken, e.g. `E(u)`.
    pub fn func(name: &str, args: &[&str]) -> Expr {
        Expr::Func(
            FuncAtom::new(
                Symbol::new(name),
                args.iter().map(|a| Symbol::new(*a)).collect(),
                vec![],
            )
            .expect("empty multi-index is always legal"),
        )
    }

    /// Derivative atom, e.g. `func_d("E", &["u"], &["u"])` for `E_u`.
    pub fn func_d(name: &str, args: &[&str], deriv: &[&str]) -> Expr {
        Expr::Func(
            FuncAtom::new(
                Symbol::new(name),
                args.iter().map(|a| Symbol::new(*a)).collect(),
                deriv.iter().map(|d| Symbol::new(*d)).collect(),
            )
            .expect("derivative index must be an argument"),
        )
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        canon::sum(terms)
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        canon::prod(factors)
    }

    pub fn pow(base: Expr, exponent: Rat) -> Expr {
        canon::pow(base, exponent)
    }

    pub fn powi(self, exponent: i64) -> Expr {
        canon::pow(self, Rat::from_integer(exponent.into()))
    }

    pub fn exp(arg: Expr) -> Expr {
        canon::exp(arg)
    }

    pub fn neg(self) -> Expr {
        canon::prod(vec![Expr::int(-1), self])
    }

    /// Canonicalization (idempotent on the output of the constructors; the
    /// entry point for expressions assembled by hand or deserialized).
    pub fn canonicalize(self) -> Expr {
        canon::canonicalize(self)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Rat(r) if r.is_one())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Expr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Partial derivative with respect to a plain symbol.
    pub fn differentiate(&self, sym: &Symbol) -> Expr {
        diff::differentiate(self, sym)
    }

    /// Replace every occurrence of an atom (symbol or function atom) by a
    /// replacement expression, then canonicalize.
    pub fn substitute(&self, target: &Expr, replacement: &Expr) -> Result<Expr, String> {
        diff::substitute(self, target, replacement)
    }

    /// Replace every atom of the function `name` (including derivative
    /// atoms) by the corresponding derivative of `body`.
    pub fn substitute_func(&self, name: &Symbol, body: &Expr) -> Expr {
        diff::substitute_func(self, name, body)
    }

    /// True if the atom (symbol or function atom) occurs anywhere in the
    /// tree.  Function-atom arguments are dependency declarations, not
    /// subexpressions, and are not searched.
    pub fn contains(&self, atom: &Expr) -> bool {
        if self == atom {
            return true;
        }
        match self {
            Expr::Rat(_) | Expr::Sym(_) | Expr::Func(_) => false,
            Expr::Pow(b, _) => b.contains(atom),
            Expr::Exp(a) => a.contains(atom),
            Expr::Prod(fs) => fs.iter().any(|f| f.contains(atom)),
            Expr::Sum(ts) => ts.iter().any(|t| t.contains(atom)),
        }
    }

    /// True if any symbol from `syms` occurs in the tree (function-atom
    /// argument lists are not searched, derivative indices are not symbols
    /// of the tree either).
    pub fn mentions_symbol(&self, syms: &[Symbol]) -> bool {
        match self {
            Expr::Rat(_) => false,
            Expr::Sym(s) => syms.contains(s),
            Expr::Func(_) => false,
            Expr::Pow(b, _) => b.mentions_symbol(syms),
            Expr::Exp(a) => a.mentions_symbol(syms),
            Expr::Prod(fs) => fs.iter().any(|f| f.mentions_symbol(syms)),
            Expr::Sum(ts) => ts.iter().any(|t| t.mentions_symbol(syms)),
        }
    }

    /// Collect every distinct atom (symbol or function atom) in the tree.
    pub fn atoms(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        self.walk_atoms(&mut |a| {
            if !out.contains(a) {
                out.push(a.clone());
            }
        });
        out.sort();
        out
    }

    fn walk_atoms(&self, f: &mut impl FnMut(&Expr)) {
        match self {
            Expr::Rat(_) => {}
            Expr::Sym(_) | Expr::Func(_) => f(self),
            Expr::Pow(b, _) => b.walk_atoms(f),
            Expr::Exp(a) => a.walk_atoms(f),
            Expr::Prod(fs) => fs.iter().for_each(|x| x.walk_atoms(f)),
            Expr::Sum(ts) => ts.iter().for_each(|x| x.walk_atoms(f)),
        }
    }

    /// The canonical terms of the expression viewed as a sum.
    pub fn terms(&self) -> Vec<Term> {
        canon::terms(self)
    }

    /// Reassemble an expression from canonical terms.
    pub fn from_terms(terms: Vec<Term>) -> Expr {
        canon::from_terms(terms)
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Rat(_) => 0,
            Expr::Sym(_) => 1,
            Expr::Pow(..) => 2,
            Expr::Exp(_) => 3,
            Expr::Func(_) => 4,
            Expr::Prod(_) => 5,
            Expr::Sum(_) => 6,
        }
    }
}

/// Fixed total node order: constants < symbols < powers < exponentials <
/// function atoms (name, multi-index length, multi-index) < products < sums.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match (self, other) {
            (Expr::Rat(a), Expr::Rat(b)) => a.cmp(b),
            (Expr::Sym(a), Expr::Sym(b)) => a.cmp(b),
            (Expr::Pow(b1, e1), Expr::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            (Expr::Exp(a), Expr::Exp(b)) => a.cmp(b),
            (Expr::Func(a), Expr::Func(b)) => a
                .name
                .cmp(&b.name)
                .then_with(|| a.deriv.len().cmp(&b.deriv.len()))
                .then_with(|| a.deriv.cmp(&b.deriv))
                .then_with(|| a.args.cmp(&b.args)),
            (Expr::Prod(a), Expr::Prod(b)) | (Expr::Sum(a), Expr::Sum(b)) => a.cmp(b),
            _ => unreachable!("rank dispatch is exhaustive"),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs.neg()])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::prod(vec![self, rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::format(self, f)
    }
}

/// Convenience: exact rational from an i64 pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

