//! Curves on K3 surfaces of Picard rank two and their consequences for
//! rigid curves on Calabi–Yau threefolds.
//!
//! The rank-two lattice `S(n, d, g) = ZH ⊕ ZC` lives in [`lattice`];
//! [`oracle`] answers effectivity, nefness and `h⁰` questions on it;
//! [`bn`] decides Brill–Noether generality; [`existence`] holds the closed
//! existence criteria and [`families`] applies them to complete
//! intersection Calabi–Yau threefolds.

pub mod bn;
pub mod existence;
pub mod families;
pub mod lattice;
pub mod oracle;
pub mod verify;

pub use bn::{bn_general, oracle_bn_general, BnError, BnRoute, BnVerdict, Witness};
pub use existence::{bn_curve_exists, k3_curve_exists, ClauseReading, ExistenceVerdict};
pub use families::{derived_admissible, registry, theorem_result, FamilyError, FamilyVerdict};
pub use lattice::{DivisorClass, IntersectionLattice, LatticeError};
pub use oracle::{h_is_ample, OracleContext, OracleError};
pub use verify::{run_suite, Suite, SweepOptions, SweepReport};
