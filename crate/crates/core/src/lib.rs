//! Cache-aided private variable-length coding.
//!
//! A server holds `N` correlated files and serves `K` cache-equipped users
//! over a shared link that an adversary can read. The delivered response must
//! let every user reconstruct its demanded file exactly while leaking nothing
//! about a private attribute `X` (mutual information exactly zero, certified
//! in rational arithmetic).
//!
//! The crate provides the building blocks and their verifiers:
//!
//! * [`prob`] — exact (rational-mass) distributions, joints, kernels,
//!   entropy/information functionals, majorization utilities;
//! * [`caching`] — uncoded placement and XOR multicast delivery;
//! * [`coupling`] — the greedy minimum-entropy coupling of the conditional
//!   family of the delivered message given `X`, and the functional
//!   representation used by the encoder;
//! * [`codec`] — the two-part response (one-time pad on `X`, prefix code on
//!   the coupling variable), with exhaustive losslessness and exact leakage
//!   checks;
//! * [`zero_leakage`] — the perfect-privacy polytope, its vertex enumeration,
//!   and the common-information machinery;
//! * [`bounds`] — worst-case upper bounds on the expected response length,
//!   each tagged with the shared-key size it requires.

pub mod bits;
pub mod bounds;
pub mod caching;
pub mod codec;
pub mod coupling;
mod error;
mod linalg;
pub mod prob;
pub mod rational;
pub mod scenario;
pub mod zero_leakage;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
