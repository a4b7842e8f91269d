//! Mining and survival analysis of self-admitted technical debt (SATD).
//!
//! The pipeline: walk a git repository's first-parent history, lex comments
//! out of every touched file version, classify which comments admit debt,
//! track each debt instance from introduction to removal (or censoring at a
//! release), and run the survival / hypothesis-test battery over the result.
//!
//! Modules map onto pipeline stages:
//!
//! - [`history`]: commit chain linearization, file version enumeration,
//!   rename detection, author identity merging.
//! - [`comments`]: string-literal-aware comment lexers for C, C++, Java and
//!   Python, plus normalization and scope hints.
//! - [`classify`]: information-gain feature selection and per-project
//!   naive-Bayes voting for SATD detection and debt typing.
//! - [`lifecycle`]: comment lineage tracking, right-censoring, remover
//!   attribution.
//! - [`survival`]: Kaplan-Meier, log-rank family, Cox proportional hazards,
//!   parametric fits with AIC.
//! - [`stats`]: Kruskal-Wallis, Dunn post-hoc, Cliff's delta, Mann-Whitney,
//!   Cohen's kappa, normalized entropy.
//! - [`phases`]: equal-commit-count development phases and the per-phase
//!   tables built on them.
//!
//! Heavy inner loops (batch lexing, batch prediction, per-lineage tracking)
//! run on rayon when the default `parallel` feature is enabled and fall back
//! to sequential iteration otherwise.

pub mod classify;
pub mod comments;
pub mod fixture;
pub mod history;
pub mod lifecycle;
pub mod numeric;
pub mod par;
pub mod phases;
pub mod stats;
pub mod survival;
