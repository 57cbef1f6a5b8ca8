//! Exact symbolic engine for Lie point-symmetry analysis of quasilinear
//! diffusion equations of the form `u_t = Dx(E(u)*u_x) + h(x)*u`.
//!
//! The crate is organized around a small exact-rational expression kernel
//! ([`expr`]) on top of which the analysis layers are built:
//!
//! * [`jet`] — jet-space contexts, total derivatives (standard and
//!   restricted), and second-order prolongation of generator ansätze,
//!   including the extended setting where the constitutive functions are
//!   differential variables.
//! * [`determining`] — applying a prolonged generator to the equation,
//!   on-shell reduction, monomial splitting into determining systems,
//!   residual verification of candidate generators, and diffing generated
//!   systems against transcribed fixtures.
//! * [`solver`] — finite-dimensional polynomial ansätze and exact
//!   null-space computation of the resulting homogeneous linear systems.
//! * [`lie`] — finite-dimensional Lie-algebra computations: brackets,
//!   structure constants, adjoint actions, Killing form, derived series,
//!   and the one-dimensional subalgebra reduction procedure.
//! * [`flow`] — one-parameter flows of supported vector fields, discrete
//!   reflections, scaling families, equation push-forward, and solution
//!   transport.
//! * [`classify`] — projections of subalgebra representatives, invariants
//!   by the method of characteristics, and assembly of the classification
//!   table.
//! * [`dsl`] — the line-oriented problem/algebra/fixture file formats.
//!
//! Everything is exact: rational arithmetic only, no floating point.
//! All values are immutable and all operations are pure functions, so the
//! types can be used freely across threads.

pub mod classify;
pub mod determining;
pub mod dsl;
pub mod expr;
pub mod flow;
pub mod jet;
pub mod lie;
pub mod linalg;
pub mod problem;
pub mod solver;

pub use expr::{Expr, FuncAtom, Rat, Symbol};
