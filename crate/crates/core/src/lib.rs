//! Twisted Mellin transform
//!
//! `Mf(s) = ∫ f(x) x^s e^{-x} dx / Γ(s+1)`, the mean of `f` under a
//! Gamma(s+1) law. This crate evaluates it numerically (generalized
//! Gauss–Laguerre quadrature, Monte Carlo), in closed form for a catalog of
//! elementary functions, and through its asymptotic expansion
//! `Mf(s) ~ Σ f^(r)(s) f_r(s) / r!` whose polynomials `f_r` are computed
//! exactly.

pub mod asymptotics;
pub mod descriptor;
pub mod error;
pub mod function;
pub mod polyseq;
pub mod quadrature;
pub mod specfun;
pub mod transform;
pub mod verify;

pub use asymptotics::{expansion, n_expansion, n_twisted, remainder_scan, ExpansionResult};
pub use error::{Error, Result};
pub use function::{FunctionKind, FunctionSpec};
pub use quadrature::{adaptive_transform, build_rule, GaussLaguerreRule, Method, TransformValue};
pub use transform::{alpha_twisted, closed_form, twisted_mellin};
