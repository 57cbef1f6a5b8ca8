//! Canonical printer.  Emits the same grammar the parser reads, so
//! `parse(print(e)) == e` for canonical `e`.

use super::{Expr, Rat};
use num_traits::Signed;
use std::fmt;

pub(super) fn format(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    write_term(t, f)?;
                } else if let Some(pos) = strip_negative(t) {
                    write!(f, " - ")?;
                    write_term(&pos, f)?;
                } else {
                    write!(f, " + ")?;
                    write_term(t, f)?;
                }
            }
            Ok(())
        }
        _ => write_term(e, f),
    }
}

/// If the term has a negative numeric coefficient, return its negation.
fn strip_negative(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Rat(r) if r.is_negative() => Some(Expr::Rat(-r.clone())),
        Expr::Prod(fs) => match fs.first() {
            Some(Expr::Rat(r)) if r.is_negative() => {
                let mut v = fs.clone();
                v[0] = Expr::Rat(-r.clone());
                Some(Expr::prod(v))
            }
            _ => None,
        },
        _ => None,
    }
}

fn write_term(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Rat(r) => write_rat(r, f),
        Expr::Sym(s) => write!(f, "{s}"),
        Expr::Func(a) => {
            write!(f, "{}", a.name())?;
            if !a.deriv().is_empty() {
                write!(f, "_")?;
                for d in a.deriv() {
                    write!(f, "{d}")?;
                }
            }
            Ok(())
        }
        Expr::Exp(arg) => write!(f, "exp({arg})"),
        Expr::Pow(base, exp) => {
            write_base(base, f)?;
            write_exponent(exp, f)
        }
        Expr::Prod(fs) => {
            let mut first = true;
            for (i, factor) in fs.iter().enumerate() {
                if let (0, Expr::Rat(r)) = (i, factor) {
                    // leading coefficient; unary minus binds the literal
                    if *r == -Rat::from_integer(1.into()) {
                        write!(f, "-")?;
                        continue;
                    }
                    write_rat(r, f)?;
                    first = false;
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                match factor {
                    Expr::Sum(_) => write!(f, "({factor})")?,
                    Expr::Rat(r) if r.is_negative() => write!(f, "({factor})")?,
                    _ => write_term(factor, f)?,
                }
            }
            if first {
                // lone "-1" coefficient; cannot happen for canonical input
                write!(f, "-1")?;
            }
            Ok(())
        }
        Expr::Sum(_) => {
            write!(f, "(")?;
            format(e, f)?;
            write!(f, ")")
        }
    }
}

fn write_base(base: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let atomic = matches!(base, Expr::Sym(_) | Expr::Func(_) | Expr::Exp(_))
        || matches!(base, Expr::Rat(r) if !r.is_negative() && r.is_integer());
    if atomic {
        write_term(base, f)
    } else {
        write!(f, "(")?;
        format(base, f)?;
        write!(f, ")")
    }
}

fn write_exponent(exp: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if exp.is_integer() && !exp.is_negative() {
        write!(f, "^{}", exp.numer())
    } else if exp.is_integer() {
        write!(f, "^({})", exp.numer())
    } else {
        write!(f, "^({}/{})", exp.numer(), exp.denom())
    }
}

fn write_rat(r: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, Expr};

    #[test]
    fn printed_forms() {
        // products sort symbols before function atoms
        let e = Expr::sym("u_t") - Expr::func("E", &["u"]) * Expr::sym("u_xx");
        assert_eq!(e.to_string(), "u_t - u_xx*E");
        let p = Expr::pow(Expr::sym("h"), rat(1, 2)) * Expr::sym("x");
        assert_eq!(p.to_string(), "x*h^(1/2)");
        let n = Expr::rat(-1, 2) * Expr::sym("y");
        assert_eq!(n.to_string(), "-1/2*y");
        let x = Expr::exp(Expr::sym("u").neg());
        assert_eq!(x.to_string(), "exp(-u)");
    }
}
