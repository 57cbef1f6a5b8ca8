//! Problem declarations: variables, constitutive functions, the equation,
//! and the generator ansatz.

use crate::expr::{Expr, FuncAtom, ParseError, Resolver, Symbol};
use crate::jet::{jet_name, DiffVar, JetContext};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("undeclared symbol `{0}` in the equation")]
    UndeclaredSymbol(String),
    #[error("equation must be solved for a single leading jet coordinate, got `{0}`")]
    BadLeading(String),
    #[error("leading coordinate `{0}` reappears on the right-hand side")]
    LeadingOnRhs(Symbol),
    #[error("ansatz must declare one unknown per generator coordinate: expected {expected}, got {got}")]
    AnsatzArity { expected: usize, got: usize },
    #[error("`{0}` is not a declared arbitrary function")]
    NoSuchArbitrary(Symbol),
    #[error("specializing `{name}` would zero the derivative atom `{atom}` present in the equation")]
    DegenerateSpecialization { name: Symbol, atom: String },
}

/// An arbitrary (constitutive) function declaration such as `E(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbitraryFn {
    pub name: Symbol,
    pub args: Vec<Symbol>,
}

/// One unknown of the generator ansatz, tied to a coordinate direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzFn {
    pub name: Symbol,
    pub args: Vec<Symbol>,
    /// The coordinate whose `d/d coordinate` this unknown multiplies.
    pub coordinate: Symbol,
    /// Optional shaped ansatz replacing the plain polynomial one,
    /// e.g. `exp(-u)*poly(E,2)`.
    pub shape: Option<crate::solver::Shape>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Base,
    Equivalence,
}

/// Full problem declaration.
///
/// In base mode the constitutive functions are function atoms; in
/// equivalence mode they are coordinates of the extended space and their
/// surviving first derivatives are jet coordinates.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub mode: Mode,
    pub independents: Vec<Symbol>,
    pub dependents: Vec<Symbol>,
    pub order: usize,
    pub arbitrary: Vec<ArbitraryFn>,
    /// Leading jet coordinate the equation is solved for (`u_t`).
    pub leading: Symbol,
    /// Expanded right-hand side.
    pub rhs: Expr,
    pub ansatz: Vec<AnsatzFn>,
}

impl ProblemSpec {
    /// The jet context induced by the declarations.
    pub fn jet_context(&self) -> JetContext {
        match self.mode {
            Mode::Base => JetContext::base(
                self.independents.clone(),
                self.dependents.clone(),
                self.order,
            ),
            Mode::Equivalence => {
                let mut base = self.independents.clone();
                base.extend(self.dependents.iter().cloned());
                let diffvars = self
                    .arbitrary
                    .iter()
                    .map(|a| DiffVar {
                        name: a.name.clone(),
                        base: base.clone(),
                        deps: a.args.clone(),
                    })
                    .collect();
                JetContext::equivalence(
                    self.independents.clone(),
                    self.dependents.clone(),
                    self.order,
                    diffvars,
                )
            }
        }
    }

    /// `Delta = leading - rhs`, the equation as a vanishing expression.
    pub fn delta(&self) -> Expr {
        Expr::Sym(self.leading.clone()) - self.rhs.clone()
    }

    /// Declared argument lists of the ansatz unknowns, keyed by the
    /// coordinate they act on.
    pub fn ansatz_deps(&self) -> BTreeMap<Symbol, Vec<Symbol>> {
        self.ansatz
            .iter()
            .map(|a| (a.coordinate.clone(), a.args.clone()))
            .collect()
    }

    pub fn ansatz_for(&self, coordinate: &Symbol) -> Option<&AnsatzFn> {
        self.ansatz.iter().find(|a| &a.coordinate == coordinate)
    }

    pub fn arbitrary_named(&self, name: &Symbol) -> Option<&ArbitraryFn> {
        self.arbitrary.iter().find(|a| &a.name == name)
    }

    /// The symbolic general generator of the declared ansatz.
    pub fn general_generator(&self) -> crate::jet::VectorField {
        let ctx = self.jet_context();
        let parts: Vec<(Symbol, Expr)> = self
            .ansatz
            .iter()
            .map(|a| {
                let atom = FuncAtom::new(a.name.clone(), a.args.clone(), vec![])
                    .expect("empty multi-index");
                (a.coordinate.clone(), Expr::Func(atom))
            })
            .collect();
        crate::jet::VectorField::from_components(ctx.base_space(), &parts)
    }

    /// Check declaration closure and leading-coordinate solvability.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let ctx = self.jet_context();
        if !ctx.is_jet(&self.leading) {
            return Err(ProblemError::BadLeading(self.leading.to_string()));
        }
        if self.rhs.contains(&Expr::Sym(self.leading.clone())) {
            return Err(ProblemError::LeadingOnRhs(self.leading.clone()));
        }
        let expected = ctx.base_space().len();
        if !self.ansatz.is_empty() && self.ansatz.len() != expected {
            return Err(ProblemError::AnsatzArity {
                expected,
                got: self.ansatz.len(),
            });
        }
        for atom in self.rhs.atoms() {
            if !self.is_declared(&atom) {
                return Err(ProblemError::UndeclaredSymbol(atom.to_string()));
            }
        }
        Ok(())
    }

    fn is_declared(&self, atom: &Expr) -> bool {
        let ctx = self.jet_context();
        match atom {
            Expr::Sym(s) => {
                ctx.base_space().contains(s)
                    || ctx.is_jet(s)
                    || ctx.diffvar_jets().contains(s)
                    || self.is_free_parameter(s)
            }
            Expr::Func(f) => self
                .arbitrary
                .iter()
                .any(|a| a.name == *f.name() && a.args == f.args()),
            _ => false,
        }
    }

    fn is_free_parameter(&self, s: &Symbol) -> bool {
        // fresh constants introduced by specialization stay legal
        !self.independents.contains(s)
            && !self.dependents.contains(s)
            && self.arbitrary.iter().all(|a| a.name != *s)
            && self.ansatz.iter().all(|a| a.name != *s)
    }

    /// Replace a declared arbitrary function by a concrete expression (or
    /// by another arbitrary-function atom), producing the specialized
    /// problem.  Rejected when the replacement identically zeroes a
    /// derivative atom that appears in the equation — for the fin class
    /// that bars constant conductivity, whose derivative carries the
    /// nonlinearity.
    pub fn specialize(&self, name: &Symbol, body: &Expr) -> Result<ProblemSpec, ProblemError> {
        let target = self
            .arbitrary_named(name)
            .ok_or_else(|| ProblemError::NoSuchArbitrary(name.clone()))?
            .clone();

        for atom in self.rhs.atoms() {
            if let Expr::Func(f) = &atom {
                if f.name() == name && f.order() > 0 {
                    let mut d = body.clone();
                    for s in f.deriv() {
                        d = d.differentiate(s);
                    }
                    if d.is_zero() {
                        return Err(ProblemError::DegenerateSpecialization {
                            name: name.clone(),
                            atom: atom.to_string(),
                        });
                    }
                }
            }
        }

        let mut spec = self.clone();
        spec.arbitrary.retain(|a| a.name != target.name);
        for a in body.atoms() {
            if let Expr::Func(f) = a {
                let decl = ArbitraryFn {
                    name: f.name().clone(),
                    args: f.args().to_vec(),
                };
                if !spec.arbitrary.contains(&decl) {
                    spec.arbitrary.push(decl);
                }
            }
        }
        spec.rhs = spec.rhs.substitute_func(name, body);
        spec.name = format!("{}[{}={}]", spec.name, name, body);
        Ok(spec)
    }

    /// Resolver for parsing expressions against these declarations.
    pub fn resolver(&self) -> SpecResolver<'_> {
        SpecResolver { spec: self }
    }

    /// Parse an expression in the declaration context.
    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        crate::expr::parse_with(text, &self.resolver())
    }
}

/// Declaration-aware identifier resolution: jet coordinates, derivative
/// atoms of arbitrary and ansatz functions, equivalence-mode coordinates,
/// and undeclared-symbol errors.  Also expands the total-derivative
/// markers `Dt(...)`/`Dx(...)` used in equation syntax.
pub struct SpecResolver<'a> {
    spec: &'a ProblemSpec,
}

impl SpecResolver<'_> {
    /// Greedy longest-match decomposition of a derivative suffix such as
    /// `tx` over declared argument names.
    fn split_indices(&self, args: &[Symbol], suffix: &str) -> Option<Vec<Symbol>> {
        let mut names: Vec<&Symbol> = args.iter().collect();
        names.sort_by_key(|s| std::cmp::Reverse(s.as_str().len()));
        let mut rest = suffix;
        let mut out = Vec::new();
        'outer: while !rest.is_empty() {
            for name in &names {
                if let Some(r) = rest.strip_prefix(name.as_str()) {
                    out.push((*name).clone());
                    rest = r;
                    continue 'outer;
                }
            }
            return None;
        }
        Some(out)
    }
}

impl Resolver for SpecResolver<'_> {
    fn resolve_symbol(&self, name: &str) -> Result<Expr, String> {
        let spec = self.spec;
        let ctx = spec.jet_context();
        let sym = Symbol::new(name);

        if ctx.base_space().contains(&sym) || ctx.is_jet(&sym) || ctx.diffvar_jets().contains(&sym)
        {
            return Ok(Expr::Sym(sym));
        }
        if let Some(a) = spec.arbitrary.iter().find(|a| a.name == sym) {
            return match spec.mode {
                Mode::Base => {
                    let atom = FuncAtom::new(a.name.clone(), a.args.clone(), vec![])
                        .expect("empty multi-index");
                    Ok(Expr::Func(atom))
                }
                Mode::Equivalence => Ok(Expr::Sym(sym)),
            };
        }
        if let Some(a) = spec.ansatz.iter().find(|a| a.name == sym) {
            let atom =
                FuncAtom::new(a.name.clone(), a.args.clone(), vec![]).expect("empty multi-index");
            return Ok(Expr::Func(atom));
        }

        if let Some((head, suffix)) = name.split_once('_') {
            let head_sym = Symbol::new(head);
            if spec.dependents.contains(&head_sym) {
                if let Some(idx) = self.split_indices(&spec.independents, suffix) {
                    if idx.len() > spec.order {
                        return Err(format!(
                            "jet coordinate `{name}` exceeds declared order {}",
                            spec.order
                        ));
                    }
                    let mut sorted = idx;
                    sorted.sort_by_key(|s| {
                        spec.independents.iter().position(|i| i == s).unwrap()
                    });
                    return Ok(Expr::Sym(jet_name(&head_sym, &sorted)));
                }
            }
            if let Some(a) = spec.arbitrary.iter().find(|a| a.name == head_sym) {
                match spec.mode {
                    Mode::Base => {
                        let idx = self.split_indices(&a.args, suffix).ok_or(format!(
                            "`{name}`: `{suffix}` is not a multi-index over the arguments of `{head}`"
                        ))?;
                        let atom = FuncAtom::new(a.name.clone(), a.args.clone(), idx)
                            .map_err(|e| e.to_string())?;
                        return Ok(Expr::Func(atom));
                    }
                    Mode::Equivalence => {
                        let dir = Symbol::new(suffix);
                        if let Some(e) = ctx.diffvar_derivative(&head_sym, &dir) {
                            return Ok(e);
                        }
                        return Err(format!(
                            "`{name}` is not a first-order coordinate of the differential variable `{head}`"
                        ));
                    }
                }
            }
            if let Some(a) = spec.ansatz.iter().find(|a| a.name == head_sym) {
                let idx = self.split_indices(&a.args, suffix).ok_or(format!(
                    "`{name}`: `{suffix}` is not a multi-index over the arguments of `{head}`"
                ))?;
                let atom = FuncAtom::new(a.name.clone(), a.args.clone(), idx)
                    .map_err(|e| e.to_string())?;
                return Ok(Expr::Func(atom));
            }
        }

        Err(format!("undeclared symbol `{name}`"))
    }

    fn resolve_call(&self, name: &str, arg: Expr) -> Result<Option<Expr>, String> {
        let ctx = self.spec.jet_context();
        let wrt = match name {
            "Dt" => Some(self.spec.independents.first()),
            "Dx" => Some(self.spec.independents.get(1)),
            _ => None,
        };
        match wrt {
            Some(Some(w)) => ctx
                .total_derivative(&arg, w)
                .map(Some)
                .map_err(|e| e.to_string()),
            Some(None) => Err(format!("`{name}` has no matching independent variable")),
            None => Ok(None),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::testspec::{fin_equiv_spec, fin_spec};
    use super::*;

    #[test]
    fn equation_expansion_via_total_derivative_marker() {
        let spec = fin_spec();
        let want = Expr::func_d("E", &["u"], &["u"]) * Expr::sym("u_x").powi(2)
            + Expr::func("E", &["u"]) * Expr::sym("u_xx")
            + Expr::func("h", &["x"]) * Expr::sym("u");
        assert_eq!(spec.rhs, want);
    }

    #[test]
    fn equivalence_expansion_uses_jet_coordinates() {
        let spec = fin_equiv_spec();
        let want = Expr::sym("E_u") * Expr::sym("u_x").powi(2)
            + Expr::sym("E") * Expr::sym("u_xx")
            + Expr::sym("h") * Expr::sym("u");
        assert_eq!(spec.rhs, want);
        // constrained atoms are eliminated to zero on parse
        assert!(spec.parse("E_t").unwrap().is_zero());
        assert!(spec.parse("h_u").unwrap().is_zero());
        assert_eq!(spec.parse("E_u").unwrap(), Expr::sym("E_u"));
    }

    #[test]
    fn derivative_atoms_resolve_in_context() {
        let spec = fin_spec();
        assert_eq!(
            spec.parse("E_uu").unwrap(),
            Expr::func_d("E", &["u"], &["u", "u"])
        );
        assert_eq!(
            spec.parse("xi1_tx").unwrap(),
            Expr::func_d("xi1", &["t", "x"], &["t", "x"])
        );
        // multi-index is normalized to argument order
        assert_eq!(spec.parse("xi1_xt").unwrap(), spec.parse("xi1_tx").unwrap());
        assert!(spec.parse("E_x").is_err());
        assert!(spec.parse("q").is_err());
    }

    #[test]
    fn constant_conductivity_is_rejected() {
        let spec = fin_spec();
        let err = spec
            .specialize(&Symbol::new("E"), &Expr::int(5))
            .unwrap_err();
        assert!(matches!(err, ProblemError::DegenerateSpecialization { .. }));
        // h -> constant is fine: h_x does not occur in the equation
        assert!(spec.specialize(&Symbol::new("h"), &Expr::sym("c")).is_ok());
    }

    #[test]
    fn specialization_substitutes_derivatives() {
        let spec = fin_spec();
        let phi = Expr::func("phi", &["u"]);
        let s = spec.specialize(&Symbol::new("E"), &phi).unwrap();
        assert!(s.rhs.contains(&Expr::func_d("phi", &["u"], &["u"])));
        assert!(s.arbitrary.iter().any(|a| a.name.as_str() == "phi"));
        s.validate().unwrap();
    }
}
