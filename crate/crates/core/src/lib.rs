//! Semantics engine for the ABCdE process algebra: CCS extended with
//! broadcast communication and signals.
//!
//! Transitions are derivation names ([`sos::Derivation`]); on top of the
//! labelled transition system the [`ltss`] module computes the successor
//! relation that records which transitions survive the execution of others.
//! [`epbisim`] decides enabling preserving bisimilarity, [`justness`]
//! classifies lasso-shaped infinite paths, and [`synchrons`] is an
//! independent characterisation of the successor relation used to
//! cross-check it.

#![allow(clippy::type_complexity)]

pub mod checks;
pub mod corpus;
pub mod epbisim;
pub mod justness;
pub mod ltss;
pub mod sos;
pub mod synchrons;
pub mod syntax;

pub use sos::{enabled, validate, Derivation, DerivationKind, SosError};
pub use syntax::{
    check_guarded, parse, Declarations, Document, Label, Name, ParseError, Process, Relabelling,
    Term,
};
