//! Finite information systems with witnesses.
//!
//! The crate models token-level logics whose states form local-lub domains:
//! consistency is witnessed, entailment may depend on the witness, and the
//! state spaces carry witness-dependent local joins. On top of the base
//! systems sit approximable mappings, finite poset oracles, binary products
//! with a terminal object, the function-space construction, and
//! machine-checked verification of the Cartesian-closure equations on small
//! instances.

pub mod associate;
pub mod approx;
pub mod axioms;
pub mod closure;
pub mod error;
pub mod expcheck;
pub mod expspace;
pub mod fixtures;
pub mod poset;
pub mod product;
pub mod state;
pub mod system;
pub mod textio;
pub mod token;
pub mod witness;

pub use error::{Error, Result};
pub use system::{ConsPair, InfoSystem};
pub use token::{Token, TokenSet};
