//! Bayesian games at desk scale, on discretized type and action spaces:
//! density-weighted payoffs, decompositions into coarse action-relevant
//! parts, behavioral ε-equilibrium computation by damped fictitious play,
//! and conditional purification of behavioral strategies into pure ones
//! that preserve payoffs, conditional action distributions, and supports.
//!
//! Module map:
//! - [`measure`]: discrete type spaces with nested fine/coarse partitions,
//!   conditional expectations, regular conditional distributions, and
//!   independent-supplement construction.
//! - [`game`]: grids, priors (tabulated or conditionally independent),
//!   payoffs, validation.
//! - [`dcpi`]: decomposition verification and the constructor for
//!   conditionally-independent-state games.
//! - [`equilibrium`]: interim payoffs (direct and factorized), best
//!   responses, ε-gaps, the solver.
//! - [`purify`](mod@purify): conditional purification and its verification.
//! - [`security`]: the uniform payoff security probe for all-pay auctions.
//! - [`fixtures`]: the built-in game corpus.
//! - [`io`]: file formats (game JSON, decomposition JSON, reports, CSV).
//!
//! ```
//! use bayespurify::{fixture, FixtureParams, purified_equilibrium, PurifyOptions, SolveOptions};
//!
//! let built = fixture("necessity", &FixtureParams { m: Some(2), cells: Some(32),
//!     coarse_factor: Some(8), ..Default::default() })?;
//! let result = purified_equilibrium(
//!     &built.game,
//!     built.decomp.as_ref().unwrap(),
//!     SolveOptions { max_iters: 50, ..Default::default() },
//!     PurifyOptions::default(),
//! )?;
//! // The canonical mixing strategy of this game purifies exactly.
//! assert!(result.pure_gaps.iter().all(|&g| g <= 1e-9));
//! # Ok::<(), bayespurify::Error>(())
//! ```

// The numeric kernels walk several parallel arrays by index on purpose;
// iterator-chained rewrites obscure the summation order that the
// determinism contract fixes.
#![allow(clippy::needless_range_loop)]

pub mod dcpi;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod io;
pub mod measure;
pub mod purify;
pub mod rng;
pub mod security;

pub use dcpi::{
    build_dcpi_from_ci, decomposition_residual_curve, identity_decomposition, state_posterior,
    verify_dcpi, DcpiComponent, DcpiDecomposition, DcpiReport, VerifyOptions,
};
pub use equilibrium::{
    best_response, epsilon_gap, epsilon_gap_pure, expected_payoff, expected_payoff_pure,
    interim_payoff, interim_payoff_direct, solve_behavioral, BehavioralProfile, PureProfile,
    SolveOptions, SolveReport,
};
pub use error::{Error, Result};
pub use fixtures::{fixture, Fixture, FixtureParams, FIXTURE_NAMES};
pub use game::{ActionGrid, BayesGame, CiState, PayoffFn, Payoffs, PriorSpec, ValidationReport};
pub use measure::{
    conditional_expectation, independence_deviation, independent_supplement,
    regular_conditional_distribution, DiscreteTypeSpace,
};
pub use purify::{
    purified_equilibrium, purify, purify_profile, verify_purification, PurifiedEquilibrium,
    PurifyOptions, PurifyReport,
};
pub use security::{payoff_security_probe, SecurityReport};
