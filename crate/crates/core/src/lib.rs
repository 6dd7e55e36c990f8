//! Information contraction under (epsilon, delta)-locally differentially
//! private channels on finite alphabets.
//!
//! The crate has four layers:
//!
//! - [`divergence`]: exact hockey-stick, max, smooth-max, KL and f-divergences,
//!   the hockey-stick integral representation of f-divergences, and the
//!   contraction coefficient of a channel.
//! - [`ldp`]: privacy budgets, certification of channels, extremal mechanisms
//!   and a sampler of private channels.
//! - [`sdpi`] and [`fdiv_bounds`]: closed-form contraction bounds.
//! - [`harness`]: randomized suites that compare every bound with exact
//!   computation.
//!
//! Logarithms are natural throughout.
//!
//! ```
//! use ldp_contraction::{ldp, sdpi, PrivacyBudget, SdpiParams};
//!
//! let budget = PrivacyBudget::new(6f64.ln(), 0.01).unwrap();
//! let params = SdpiParams::new(budget, 2.5).unwrap();
//! assert!((sdpi::linear_sdpi_coeff(&params) - 0.505).abs() < 1e-12);
//! assert!(ldp::is_ldp(&ldp::make_bsc(budget), budget));
//! ```

pub mod curve;
pub mod distribution;
pub mod divergence;
pub mod error;
pub mod fdiv_bounds;
pub mod generator;
pub mod harness;
pub mod ldp;
pub mod parallel;
pub mod quadrature;
pub mod sdpi;

pub use curve::BoundCurve;
pub use distribution::{pushforward, Channel, Distribution};
pub use error::{Error, Result};
pub use fdiv_bounds::{FdivBoundInputs, LambdaChoice, SweepAxis};
pub use generator::FDivGenerator;
pub use harness::{Suite, SuiteParams, VerificationReport};
pub use ldp::PrivacyBudget;
pub use parallel::Execution;
pub use sdpi::{CompositionParams, SdpiParams};
