//! Sieve-valued valuations on finite presheaf toposes.
//!
//! The crate builds finite categories from composition tables, enumerates
//! the subobject classifier `Ω` with its Heyting operations, and checks
//! generalised valuations (assignments of sieves to propositions) for the
//! functional-composition rule and the null, monotonicity and exclusivity
//! conditions. Two physics backends produce such valuations:
//!
//! - [`quantum`]: operators with finite spectra, their functional relations,
//!   the spectral presheaf and the Kochen-Specker section search.
//! - [`classical`]: functions on a finite state space, microstates,
//!   macrostates and probability measures.
//!
//! ```
//! use toposval::fixtures;
//! use toposval::linalg::int;
//!
//! let q3 = fixtures::q3();
//! let (g, _) = q3.coarse_graining_presheaf();
//! let v = q3.partial_valuation(&[("P", int(0)), ("I", int(1))]).unwrap();
//! let nu = q3.nu_from_partial_valuation(&g, &v).unwrap();
//! let (a, delta) = q3.proposition("A", &[int(1)]).unwrap();
//! assert_eq!(nu.value(a, delta as usize).labels(q3.category()), ["p", "u"]);
//! assert!(nu.verify().is_empty());
//! ```

pub mod classical;
pub mod error;
pub mod fincat;
pub mod fixtures;
pub mod genval;
pub mod linalg;
pub mod omega;
pub mod presheaf;
pub mod quantity;
pub mod quantum;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use fincat::{CategoryBuilder, FiniteCategory, MorId, ObjId, Sieve};
pub use genval::{GeneralisedValuation, PropositionPresheaf};
pub use omega::{Omega, OmegaAt};
pub use presheaf::{NaturalTransformation, Presheaf, Section, Subobject};
pub use report::{Report, Violation};
