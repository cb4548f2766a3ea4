//! Computation, verification and comparison of information-theoretic
//! generalization bounds under a unified leave-m-out supersample framework.
//!
//! The library has three layers:
//!
//! - exact machinery: scalar divergences ([`divergence`]), supersample
//!   combinatorics ([`supersample`]), closed-form Bernoulli information
//!   quantities ([`bernoulli`]) and a brute-force enumeration oracle
//!   ([`oracle`]) that serves as ground truth for everything discrete;
//! - bound assembly: per-family coefficient rules, CGF constants, scalar
//!   lambda optimization and the JS inversion ([`catalog`]);
//! - Monte-Carlo / quadrature evaluation for the Gaussian examples
//!   ([`gaussian`]) and an end-to-end verification suite ([`verify`]).

pub mod bernoulli;
pub mod catalog;
pub mod divergence;
pub mod gaussian;
pub mod oracle;
pub mod supersample;
pub mod verify;

pub use bernoulli::{BernoulliInstance, InfoKind, InfoQuantity, Provenance};
pub use catalog::{BoundKind, BoundParams, BoundValue};
pub use divergence::{JsWeight, Prob};
pub use gaussian::{GaussianInstance, GaussianLoss, McConfig};
pub use supersample::PartitionConfig;
