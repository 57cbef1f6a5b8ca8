//! Jet-space bookkeeping, total derivative operators (standard and
//! restricted), and second-order prolongation of generator ansätze.
//!
//! Jet coordinates are plain symbols with structured names: `u_t`, `u_x`,
//! `u_tt`, `u_tx`, `u_xx` (mixed indices sorted in independent-variable
//! order).  In equivalence mode the constitutive functions become
//! differential variables over the base `(t, x, u)` subject to the
//! constraints that kill all but their natural dependencies, so the only
//! surviving first-order coordinates are `E_u` and `h_x`; the constrained
//! atoms `E_t`, `E_x`, `h_t`, `h_u` are eliminated to zero on
//! construction.

use crate::expr::{Expr, Symbol};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("total derivative overflows jet order {order}: cannot promote `{coord}` by `{wrt}`")]
    OrderOverflow {
        coord: Symbol,
        wrt: Symbol,
        order: usize,
    },
    #[error("operation requires an equivalence-mode context")]
    ModeError,
    #[error("`{0}` is not an independent variable of the context")]
    NotIndependent(Symbol),
    #[error("`{0}` is not a base direction of the differential variables")]
    NotBaseDirection(Symbol),
    #[error("vector field lives on {got:?}, expected the base space {want:?}")]
    SpaceMismatch { got: Vec<Symbol>, want: Vec<Symbol> },
    #[error("field is already prolonged (space mentions jet coordinates)")]
    AlreadyProlonged,
    #[error("coefficient of `{coordinate}` mentions `{symbol}`, outside its declared arguments")]
    DependencyViolation { coordinate: Symbol, symbol: Symbol },
}

/// Compose a jet-coordinate name: `u` + `[t,x]` -> `u_tx`.
pub fn jet_name(dep: &Symbol, index: &[Symbol]) -> Symbol {
    let mut s = dep.as_str().to_string();
    if !index.is_empty() {
        s.push('_');
        for i in index {
            s.push_str(i.as_str());
        }
    }
    Symbol::new(s)
}

/// A differential variable of the equivalence extension: a function slot
/// over the base `(t, x, u)` whose effective dependencies are `deps`
/// (e.g. `E` depends on `u` only, `h` on `x` only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffVar {
    pub name: Symbol,
    pub base: Vec<Symbol>,
    pub deps: Vec<Symbol>,
}

impl DiffVar {
    fn jet(&self, dir: &Symbol) -> Symbol {
        jet_name(&self.name, std::slice::from_ref(dir))
    }
}

/// Jet space of declared order over independents and dependents, with an
/// optional equivalence extension.
#[derive(Debug, Clone)]
pub struct JetContext {
    independents: Vec<Symbol>,
    dependents: Vec<Symbol>,
    order: usize,
    diffvars: Vec<DiffVar>,
    /// jet symbol -> (dependent, sorted multi-index)
    jets: BTreeMap<Symbol, (Symbol, Vec<Symbol>)>,
}

impl JetContext {
    pub fn base(independents: Vec<Symbol>, dependents: Vec<Symbol>, order: usize) -> Self {
        let mut ctx = JetContext {
            independents,
            dependents,
            order,
            diffvars: Vec::new(),
            jets: BTreeMap::new(),
        };
        ctx.index_jets();
        ctx
    }

    /// Extend with differential variables (equivalence mode).
    pub fn equivalence(
        independents: Vec<Symbol>,
        dependents: Vec<Symbol>,
        order: usize,
        diffvars: Vec<DiffVar>,
    ) -> Self {
        let mut ctx = JetContext {
            independents,
            dependents,
            order,
            diffvars,
            jets: BTreeMap::new(),
        };
        ctx.index_jets();
        ctx
    }

    fn index_jets(&mut self) {
        let mut jets = BTreeMap::new();
        for dep in &self.dependents {
            let mut frontier: Vec<Vec<Symbol>> = vec![vec![]];
            for _ in 0..self.order {
                let mut next = Vec::new();
                for idx in &frontier {
                    for ind in &self.independents {
                        let mut j = idx.clone();
                        j.push(ind.clone());
                        j = sort_index(&self.independents, j);
                        let name = jet_name(dep, &j);
                        if !jets.contains_key(&name) {
                            jets.insert(name, (dep.clone(), j.clone()));
                        }
                        next.push(j);
                    }
                }
                frontier = next;
            }
        }
        self.jets = jets;
    }

    pub fn independents(&self) -> &[Symbol] {
        &self.independents
    }

    pub fn dependents(&self) -> &[Symbol] {
        &self.dependents
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn diffvars(&self) -> &[DiffVar] {
        &self.diffvars
    }

    pub fn is_equivalence(&self) -> bool {
        !self.diffvars.is_empty()
    }

    /// The base space the generator ansatz lives on.
    pub fn base_space(&self) -> Vec<Symbol> {
        let mut v = self.independents.clone();
        v.extend(self.dependents.iter().cloned());
        if self.is_equivalence() {
            v.extend(self.diffvars.iter().map(|d| d.name.clone()));
        }
        v
    }

    /// All jet coordinates of the dependents, by increasing order.
    pub fn jet_coordinates(&self) -> Vec<Symbol> {
        let mut v: Vec<_> = self.jets.keys().cloned().collect();
        v.sort_by_key(|s| {
            let (_, idx) = &self.jets[s];
            (idx.len(), s.clone())
        });
        v
    }

    /// Surviving first-order coordinates of the differential variables
    /// (`E_u`, `h_x`).
    pub fn diffvar_jets(&self) -> Vec<Symbol> {
        self.diffvars
            .iter()
            .flat_map(|d| d.deps.iter().map(move |dep| d.jet(dep)))
            .collect()
    }

    /// The full coordinate list of the prolonged space.
    pub fn full_space(&self) -> Vec<Symbol> {
        let mut v = self.base_space();
        v.extend(self.jet_coordinates());
        v.extend(self.diffvar_jets());
        v
    }

    pub fn is_jet(&self, s: &Symbol) -> bool {
        self.jets.contains_key(s)
    }

    pub fn jet_index(&self, s: &Symbol) -> Option<(&Symbol, &[Symbol])> {
        self.jets.get(s).map(|(d, i)| (d, i.as_slice()))
    }

    fn diffvar_named(&self, s: &Symbol) -> Option<&DiffVar> {
        self.diffvars.iter().find(|d| &d.name == s)
    }

    fn diffvar_jet_owner(&self, s: &Symbol) -> Option<&DiffVar> {
        self.diffvars
            .iter()
            .find(|d| d.deps.iter().any(|dep| &d.jet(dep) == s))
    }

    /// Resolve a first-derivative atom of a differential variable in a
    /// named direction: surviving directions give the jet coordinate,
    /// constrained ones are eliminated to zero.
    pub fn diffvar_derivative(&self, var: &Symbol, dir: &Symbol) -> Option<Expr> {
        let d = self.diffvar_named(var)?;
        if d.deps.contains(dir) {
            Some(Expr::Sym(d.jet(dir)))
        } else if d.base.contains(dir) {
            Some(Expr::zero())
        } else {
            None
        }
    }

    /// Total derivative along an independent variable.
    ///
    /// Dependent atoms promote their jet index; function atoms chain
    /// through their arguments (`Dx E(u) = E_u*u_x`); differential
    /// variables chain through their surviving dependencies.
    pub fn total_derivative(&self, e: &Expr, wrt: &Symbol) -> Result<Expr, JetError> {
        if !self.independents.contains(wrt) {
            return Err(JetError::NotIndependent(wrt.clone()));
        }
        self.dtotal(e, wrt)
    }

    fn dtotal(&self, e: &Expr, wrt: &Symbol) -> Result<Expr, JetError> {
        Ok(match e {
            Expr::Rat(_) => Expr::zero(),
            Expr::Sym(s) => {
                if s == wrt {
                    Expr::one()
                } else if self.independents.contains(s) {
                    Expr::zero()
                } else if self.dependents.contains(s) {
                    Expr::Sym(jet_name(s, std::slice::from_ref(wrt)))
                } else if let Some((dep, idx)) = self.jets.get(s) {
                    if idx.len() + 1 > self.order {
                        return Err(JetError::OrderOverflow {
                            coord: s.clone(),
                            wrt: wrt.clone(),
                            order: self.order,
                        });
                    }
                    let mut j = idx.clone();
                    j.push(wrt.clone());
                    Expr::Sym(jet_name(dep, &sort_index(&self.independents, j)))
                } else if let Some(d) = self.diffvar_named(s) {
                    let mut terms = Vec::new();
                    for dep in &d.deps {
                        let inner = self.dtotal(&Expr::Sym(dep.clone()), wrt)?;
                        if !inner.is_zero() {
                            terms.push(Expr::Sym(d.jet(dep)) * inner);
                        }
                    }
                    Expr::sum(terms)
                } else if let Some(d) = self.diffvar_jet_owner(s) {
                    return Err(JetError::OrderOverflow {
                        coord: d.name.clone(),
                        wrt: wrt.clone(),
                        order: 1,
                    });
                } else {
                    // parameter symbol
                    Expr::zero()
                }
            }
            Expr::Func(atom) => {
                let mut terms = Vec::new();
                for a in atom.args() {
                    let da = self.dtotal(&Expr::Sym(a.clone()), wrt)?;
                    if da.is_zero() {
                        continue;
                    }
                    terms.push(Expr::Func(atom.derived(a).expect("arg checked")) * da);
                }
                Expr::sum(terms)
            }
            Expr::Pow(b, q) => {
                let db = self.dtotal(b, wrt)?;
                if db.is_zero() {
                    Expr::zero()
                } else {
                    let q1 = q - crate::expr::rat(1, 1);
                    Expr::prod(vec![Expr::Rat(q.clone()), Expr::pow((**b).clone(), q1), db])
                }
            }
            Expr::Exp(a) => {
                let da = self.dtotal(a, wrt)?;
                if da.is_zero() {
                    Expr::zero()
                } else {
                    Expr::prod(vec![e.clone(), da])
                }
            }
            Expr::Prod(fs) => {
                let mut terms = Vec::new();
                for (i, _) in fs.iter().enumerate() {
                    let df = self.dtotal(&fs[i], wrt)?;
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors = fs.clone();
                    factors[i] = df;
                    terms.push(Expr::prod(factors));
                }
                Expr::sum(terms)
            }
            Expr::Sum(ts) => {
                let mut terms = Vec::new();
                for t in ts {
                    terms.push(self.dtotal(t, wrt)?);
                }
                Expr::sum(terms)
            }
        })
    }

    /// Restricted total derivative on the extended space: the reduced
    /// operators after imposing the dependency constraints,
    /// `D~_t = d/dt`, `D~_x = d/dx + h_x d/dh`, `D~_u = d/du + E_u d/dE`.
    pub fn restricted_total_derivative(&self, e: &Expr, wrt: &Symbol) -> Result<Expr, JetError> {
        if !self.is_equivalence() {
            return Err(JetError::ModeError);
        }
        let on_base = self.diffvars.iter().any(|d| d.base.contains(wrt));
        if !on_base {
            return Err(JetError::NotBaseDirection(wrt.clone()));
        }
        let mut out = e.differentiate(wrt);
        for d in &self.diffvars {
            if d.deps.contains(wrt) {
                let partial = e.differentiate(&d.name);
                if !partial.is_zero() {
                    out = out + Expr::Sym(d.jet(wrt)) * partial;
                }
            }
        }
        Ok(out)
    }
}

fn sort_index(independents: &[Symbol], mut idx: Vec<Symbol>) -> Vec<Symbol> {
    idx.sort_by_key(|s| {
        independents
            .iter()
            .position(|i| i == s)
            .unwrap_or(usize::MAX)
    });
    idx
}

/// A vector field: a total coefficient map over an ordered coordinate
/// space.  Zero coefficients are stored explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    space: Vec<Symbol>,
    coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn new(space: Vec<Symbol>, coeffs: Vec<Expr>) -> Self {
        assert_eq!(space.len(), coeffs.len(), "total coefficient map required");
        VectorField { space, coeffs }
    }

    pub fn zero(space: Vec<Symbol>) -> Self {
        let coeffs = vec![Expr::zero(); space.len()];
        VectorField { space, coeffs }
    }

    /// Build from (coordinate, coefficient) pairs; missing coordinates get
    /// zero coefficients.
    pub fn from_components(space: Vec<Symbol>, parts: &[(Symbol, Expr)]) -> Self {
        let mut f = VectorField::zero(space);
        for (coord, coeff) in parts {
            let i = f
                .space
                .iter()
                .position(|s| s == coord)
                .unwrap_or_else(|| panic!("coordinate `{coord}` not in space"));
            f.coeffs[i] = coeff.clone();
        }
        f
    }

    pub fn space(&self) -> &[Symbol] {
        &self.space
    }

    pub fn coefficient(&self, coord: &Symbol) -> &Expr {
        let i = self
            .space
            .iter()
            .position(|s| s == coord)
            .unwrap_or_else(|| panic!("coordinate `{coord}` not in space"));
        &self.coeffs[i]
    }

    pub fn components(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.space.iter().zip(self.coeffs.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    /// Apply as a derivation: `v(e) = sum coeff_i * de/dcoord_i`.
    pub fn apply(&self, e: &Expr) -> Expr {
        let mut terms = Vec::new();
        for (coord, coeff) in self.components() {
            if coeff.is_zero() {
                continue;
            }
            let d = e.differentiate(coord);
            if d.is_zero() {
                continue;
            }
            terms.push(coeff.clone() * d);
        }
        Expr::sum(terms)
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|e| c.clone() * e.clone()).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        assert_eq!(self.space, other.space, "coordinate space mismatch");
        VectorField {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Restrict to a coordinate subset (components outside are dropped).
    pub fn project(&self, coords: &[Symbol]) -> VectorField {
        let coeffs = coords
            .iter()
            .map(|c| {
                self.space
                    .iter()
                    .position(|s| s == c)
                    .map(|i| self.coeffs[i].clone())
                    .unwrap_or_else(Expr::zero)
            })
            .collect();
        VectorField {
            space: coords.to_vec(),
            coeffs,
        }
    }
}

impl std::fmt::Display for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (coord, coeff) in self.components() {
            if coeff.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            wrote = true;
            if coeff.is_one() {
                write!(f, "d/d{coord}")?;
            } else if matches!(coeff, Expr::Sum(_)) {
                write!(f, "({coeff})*d/d{coord}")?;
            } else {
                write!(f, "{coeff}*d/d{coord}")?;
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Second-order prolongation of a base-space generator.
///
/// Coefficients are generated recursively, `eta^{J,k} = D_k(eta^J) -
/// sum_j u_{J,j} D_k(xi^j)`: the standard characteristic-based formula
/// with `Q = eta - sum_j xi^j u_j`, organized so that no intermediate
/// atom ever exceeds the declared jet order.
pub fn prolong(v: &VectorField, ctx: &JetContext) -> Result<VectorField, JetError> {
    let base: Vec<Symbol> = {
        let mut b = ctx.independents().to_vec();
        b.extend(ctx.dependents().iter().cloned());
        b
    };
    if v.space().iter().any(|s| ctx.is_jet(s)) {
        return Err(JetError::AlreadyProlonged);
    }
    if v.space() != base.as_slice() {
        return Err(JetError::SpaceMismatch {
            got: v.space().to_vec(),
            want: base,
        });
    }

    let xis: Vec<Expr> = ctx
        .independents()
        .iter()
        .map(|i| v.coefficient(i).clone())
        .collect();

    let mut parts: Vec<(Symbol, Expr)> = v
        .components()
        .map(|(c, e)| (c.clone(), e.clone()))
        .collect();

    for dep in ctx.dependents() {
        let mut level: Vec<(Vec<Symbol>, Expr)> = vec![(vec![], v.coefficient(dep).clone())];
        for _ in 0..ctx.order() {
            let mut next: BTreeMap<Vec<Symbol>, Expr> = BTreeMap::new();
            for (idx, eta_j) in &level {
                for k in ctx.independents() {
                    let mut j = idx.clone();
                    j.push(k.clone());
                    j = sort_index(ctx.independents(), j);
                    if next.contains_key(&j) {
                        continue;
                    }
                    let mut coeff = ctx.total_derivative(eta_j, k)?;
                    for (j_pos, indep) in ctx.independents().iter().enumerate() {
                        let dxi = ctx.total_derivative(&xis[j_pos], k)?;
                        if dxi.is_zero() {
                            continue;
                        }
                        let mut promoted = idx.clone();
                        promoted.push(indep.clone());
                        let u_jj = Expr::Sym(jet_name(dep, &sort_index(ctx.independents(), promoted)));
                        coeff = coeff - u_jj * dxi;
                    }
                    next.insert(j, coeff);
                }
            }
            for (idx, coeff) in &next {
                parts.push((jet_name(dep, idx), coeff.clone()));
            }
            level = next.into_iter().collect();
        }
    }

    let mut space = base;
    space.extend(ctx.jet_coordinates());
    Ok(VectorField::from_components(space, &parts))
}

/// Prolongation of an equivalence-mode generator: the base `eta^J`
/// coefficients plus the differential-variable coefficients.
///
/// For `E` over base `(t,x,u)` with the constrained directions imposed,
/// the surviving formulas reduce to `phi^w = D~_w(phi) - E_u*D~_w(eta)`
/// and, for `h`, `chi^w = D~_w(chi) - h_x*D~_w(xi2)`.  Coefficients on
/// the constrained directions (`E_t`, `E_x`, `h_t`, `h_u`) are returned
/// separately: their vanishing is the auxiliary part of the determining
/// system.
pub struct EquivalenceProlongation {
    /// Field on base + u-jets + surviving diffvar jets.
    pub field: VectorField,
    /// (constrained-direction atom, coefficient that must vanish)
    pub aux: Vec<(Symbol, Expr)>,
}

pub fn prolong_equivalence(
    v: &VectorField,
    deps: &BTreeMap<Symbol, Vec<Symbol>>,
    ctx: &JetContext,
) -> Result<EquivalenceProlongation, JetError> {
    if !ctx.is_equivalence() {
        return Err(JetError::ModeError);
    }
    let base = ctx.base_space();
    if v.space() != base.as_slice() {
        return Err(JetError::SpaceMismatch {
            got: v.space().to_vec(),
            want: base,
        });
    }

    // coefficients may mention coordinates only within the declared
    // argument list of their ansatz slot
    for (coord, coeff) in v.components() {
        if let Some(allowed) = deps.get(coord) {
            for atom in coeff.atoms() {
                if let Expr::Sym(s) = &atom {
                    let coordinate_like = base.contains(s)
                        || ctx.is_jet(s)
                        || ctx.diffvar_jets().contains(s);
                    if coordinate_like && !allowed.contains(s) {
                        return Err(JetError::DependencyViolation {
                            coordinate: coord.clone(),
                            symbol: s.clone(),
                        });
                    }
                }
            }
        }
    }

    // base part: prolong (xi, eta) over the u-jets
    let base_only: Vec<Symbol> = {
        let mut b = ctx.independents().to_vec();
        b.extend(ctx.dependents().iter().cloned());
        b
    };
    let base_ctx = JetContext::base(
        ctx.independents().to_vec(),
        ctx.dependents().to_vec(),
        ctx.order(),
    );
    let prolonged = prolong(&v.project(&base_only), &base_ctx)?;

    let mut parts: Vec<(Symbol, Expr)> = prolonged
        .components()
        .map(|(c, e)| (c.clone(), e.clone()))
        .collect();
    for d in ctx.diffvars() {
        parts.push((d.name.clone(), v.coefficient(&d.name).clone()));
    }

    let mut aux = Vec::new();
    for d in ctx.diffvars() {
        let slot_coeff = v.coefficient(&d.name).clone();
        for dir in &d.base {
            let mut coeff = ctx.restricted_total_derivative(&slot_coeff, dir)?;
            for dep in &d.deps {
                let jet = Expr::Sym(d.jet(dep));
                let w = v.coefficient(dep).clone();
                let dw = ctx.restricted_total_derivative(&w, dir)?;
                if !dw.is_zero() {
                    coeff = coeff - jet * dw;
                }
            }
            if d.deps.contains(dir) {
                parts.push((d.jet(dir), coeff));
            } else {
                aux.push((jet_name(&d.name, std::slice::from_ref(dir)), coeff));
            }
        }
    }

    Ok(EquivalenceProlongation {
        field: VectorField::from_components(ctx.full_space(), &parts),
        aux,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn base_ctx() -> JetContext {
        JetContext::base(vec![sym("t"), sym("x")], vec![sym("u")], 2)
    }

    #[test]
    fn index_promotion() {
        let ctx = base_ctx();
        let d = ctx.total_derivative(&Expr::sym("u"), &sym("x")).unwrap();
        assert_eq!(d, Expr::sym("u_x"));
        let mixed = ctx.total_derivative(&Expr::sym("u_t"), &sym("x")).unwrap();
        assert_eq!(mixed, Expr::sym("u_tx"));
        assert!(ctx.total_derivative(&Expr::sym("u_xx"), &sym("x")).is_err());
    }

    #[test]
    fn chain_rule_through_function_atoms() {
        let ctx = base_ctx();
        // Dx(E*u_x) = E_u*u_x^2 + E*u_xx
        let e = Expr::func("E", &["u"]) * Expr::sym("u_x");
        let d = ctx.total_derivative(&e, &sym("x")).unwrap();
        let want = Expr::func_d("E", &["u"], &["u"]) * Expr::sym("u_x").powi(2)
            + Expr::func("E", &["u"]) * Expr::sym("u_xx");
        assert_eq!(d, want);
        // Dt(h) = 0 for h = h(x)
        let h = Expr::func("h", &["x"]);
        assert!(ctx.total_derivative(&h, &sym("t")).unwrap().is_zero());
    }

    #[test]
    fn total_derivatives_commute() {
        let ctx = base_ctx();
        let samples = [
            Expr::func("eta", &["t", "x", "u"]),
            Expr::func("E", &["u"]) * Expr::sym("u"),
            Expr::sym("u") * Expr::sym("x") + Expr::exp(Expr::sym("u").neg()),
        ];
        for e in samples {
            let tx = ctx
                .total_derivative(&ctx.total_derivative(&e, &sym("t")).unwrap(), &sym("x"))
                .unwrap();
            let xt = ctx
                .total_derivative(&ctx.total_derivative(&e, &sym("x")).unwrap(), &sym("t"))
                .unwrap();
            assert_eq!(tx, xt);
        }
    }

    fn base_field(xi1: Expr, xi2: Expr, eta: Expr) -> VectorField {
        VectorField::new(vec![sym("t"), sym("x"), sym("u")], vec![xi1, xi2, eta])
    }

    #[test]
    fn translation_prolongs_trivially() {
        let ctx = base_ctx();
        let v = base_field(Expr::one(), Expr::zero(), Expr::zero());
        let p = prolong(&v, &ctx).unwrap();
        for jet in ctx.jet_coordinates() {
            assert!(p.coefficient(&jet).is_zero(), "eta^{jet} should vanish");
        }
    }

    #[test]
    fn scaling_field_prolongation() {
        // v = 2t d/dt + x d/dx: eta^t = -2u_t, eta^x = -u_x, eta^xx = -2u_xx
        let ctx = base_ctx();
        let v = base_field(Expr::int(2) * Expr::sym("t"), Expr::sym("x"), Expr::zero());
        let p = prolong(&v, &ctx).unwrap();
        assert_eq!(*p.coefficient(&sym("u_t")), Expr::int(-2) * Expr::sym("u_t"));
        assert_eq!(*p.coefficient(&sym("u_x")), Expr::sym("u_x").neg());
        assert_eq!(
            *p.coefficient(&sym("u_xx")),
            Expr::int(-2) * Expr::sym("u_xx")
        );
    }

    #[test]
    fn vertical_field_prolongation() {
        // v = u d/du: eta^x = u_x, eta^xx = u_xx
        let ctx = base_ctx();
        let v = base_field(Expr::zero(), Expr::zero(), Expr::sym("u"));
        let p = prolong(&v, &ctx).unwrap();
        assert_eq!(*p.coefficient(&sym("u_x")), Expr::sym("u_x"));
        assert_eq!(*p.coefficient(&sym("u_xx")), Expr::sym("u_xx"));
    }

    #[test]
    fn prolongation_is_linear() {
        let ctx = base_ctx();
        let v = base_field(
            Expr::sym("t") * Expr::sym("x"),
            Expr::sym("x").powi(2),
            Expr::sym("u") * Expr::sym("t"),
        );
        let w = base_field(Expr::sym("x"), Expr::sym("t"), Expr::sym("u"));
        let a = Expr::rat(3, 2);
        let b = Expr::int(-2);
        let lhs = prolong(&v.scale(&a).add(&w.scale(&b)), &ctx).unwrap();
        let rhs = prolong(&v, &ctx)
            .unwrap()
            .scale(&a)
            .add(&prolong(&w, &ctx).unwrap().scale(&b));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn double_prolongation_rejected() {
        let ctx = base_ctx();
        let v = base_field(Expr::one(), Expr::zero(), Expr::zero());
        let p = prolong(&v, &ctx).unwrap();
        assert!(matches!(prolong(&p, &ctx), Err(JetError::AlreadyProlonged)));
    }

    fn equiv_ctx() -> JetContext {
        JetContext::equivalence(
            vec![sym("t"), sym("x")],
            vec![sym("u")],
            2,
            vec![
                DiffVar {
                    name: sym("E"),
                    base: vec![sym("t"), sym("x"), sym("u")],
                    deps: vec![sym("u")],
                },
                DiffVar {
                    name: sym("h"),
                    base: vec![sym("t"), sym("x"), sym("u")],
                    deps: vec![sym("x")],
                },
            ],
        )
    }

    #[test]
    fn restricted_derivatives_reduce() {
        let ctx = equiv_ctx();
        // D~_x chi(x,h) = chi_x + h_x*chi_h
        let chi = Expr::func("chi", &["x", "h"]);
        let d = ctx.restricted_total_derivative(&chi, &sym("x")).unwrap();
        let want = Expr::func_d("chi", &["x", "h"], &["x"])
            + Expr::sym("h_x") * Expr::func_d("chi", &["x", "h"], &["h"]);
        assert_eq!(d, want);
        // D~_u phi(u,E) = phi_u + E_u*phi_E
        let phi = Expr::func("phi", &["u", "E"]);
        let du = ctx.restricted_total_derivative(&phi, &sym("u")).unwrap();
        let want_u = Expr::func_d("phi", &["u", "E"], &["u"])
            + Expr::sym("E_u") * Expr::func_d("phi", &["u", "E"], &["E"]);
        assert_eq!(du, want_u);
        // D~_t kills anything free of t
        assert!(ctx
            .restricted_total_derivative(&phi, &sym("t"))
            .unwrap()
            .is_zero());
        assert!(matches!(
            base_ctx().restricted_total_derivative(&phi, &sym("t")),
            Err(JetError::ModeError)
        ));
    }

    #[test]
    fn equivalence_prolongation_of_scaling() {
        // Y3 = 2t d/dt + x d/dx - 2h d/dh: chi^t = 0 and chi^u = 0
        let ctx = equiv_ctx();
        let y3 = VectorField::from_components(
            ctx.base_space(),
            &[
                (sym("t"), Expr::int(2) * Expr::sym("t")),
                (sym("x"), Expr::sym("x")),
                (sym("h"), Expr::int(-2) * Expr::sym("h")),
            ],
        );
        let deps = BTreeMap::new();
        let p = prolong_equivalence(&y3, &deps, &ctx).unwrap();
        let aux: BTreeMap<_, _> = p.aux.iter().cloned().collect();
        assert!(aux[&sym("h_t")].is_zero());
        assert!(aux[&sym("h_u")].is_zero());
        // chi^x rides along in the field: D~_x(-2h) - h_x*D~_x(x) = -3h_x
        assert_eq!(
            *p.field.coefficient(&sym("h_x")),
            Expr::int(-3) * Expr::sym("h_x")
        );
    }

    #[test]
    fn equivalence_prolongation_of_vertical_slot() {
        // exp(-u) F(E) d/dE has phi^t = 0
        let ctx = equiv_ctx();
        let yf = VectorField::from_components(
            ctx.base_space(),
            &[(
                sym("E"),
                Expr::exp(Expr::sym("u").neg()) * Expr::func("F", &["E"]),
            )],
        );
        let deps = BTreeMap::new();
        let p = prolong_equivalence(&yf, &deps, &ctx).unwrap();
        let aux: BTreeMap<_, _> = p.aux.iter().cloned().collect();
        assert!(aux[&sym("E_t")].is_zero());
        assert!(aux[&sym("E_x")].is_zero());
    }

    #[test]
    fn generic_equivalence_coefficients_match_reduced_formulas() {
        // chi^t = D~_t(chi) - h_x*D~_t(xi2) = chi_t - h_x*xi2_t
        let ctx = equiv_ctx();
        let args = ["t", "x", "u", "E", "h"];
        let chi = Expr::func("chi", &args);
        let xi2 = Expr::func("xi2", &["t", "x", "u"]);
        let y = VectorField::from_components(
            ctx.base_space(),
            &[(sym("x"), xi2), (sym("h"), chi)],
        );
        let deps = BTreeMap::new();
        let p = prolong_equivalence(&y, &deps, &ctx).unwrap();
        let aux: BTreeMap<_, _> = p.aux.iter().cloned().collect();
        let want = Expr::func_d("chi", &args, &["t"])
            - Expr::sym("h_x") * Expr::func_d("xi2", &["t", "x", "u"], &["t"]);
        assert_eq!(aux[&sym("h_t")], want);
        let want_u = Expr::func_d("chi", &args, &["u"])
            + Expr::sym("E_u") * Expr::func_d("chi", &args, &["E"])
            - Expr::sym("h_x") * Expr::func_d("xi2", &["t", "x", "u"], &["u"]);
        assert_eq!(aux[&sym("h_u")], want_u);
    }
}
