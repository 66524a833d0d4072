//! Equilibrium pricing for an IoT market in which an IoT service provider,
//! a wireless service provider and a cloud service provider charge
//! end-users, under three interaction models:
//!
//! * **push**: WSP and CSP price the IoTSP, which then prices end-users;
//! * **pull**: all three price end-users simultaneously;
//! * **hybrid**: the CSP prices the IoTSP, then IoTSP and WSP price end-users.
//!
//! Closed-form equilibria live in [`push`], [`pull`] and [`hybrid`];
//! [`oracle`] checks them numerically and [`compare`] lines the models up
//! along the ad-revenue axis.
//!
//! ```
//! use iot_pricing::{solve, AdState, MarketParams, Model};
//!
//! let params = MarketParams::new(1.0, 15.0).unwrap();
//! let ad = AdState::from_revenue(3.0, &params).unwrap();
//! let pull = solve(Model::Pull, &params, &ad, 0.5).unwrap();
//! assert_eq!(pull.payoffs.demand, 4.5);
//! ```

pub mod admarket;
pub mod compare;
pub mod equilibrium;
pub mod error;
pub mod hybrid;
pub mod model;
pub mod oracle;
pub mod pull;
pub mod push;

pub use admarket::{optimal_b, participation, AdvertiserPool, BSelection, Demand};
pub use compare::{
    compare_models, crossing_points, table1, ComparisonReport, CrossingPoints, Entity,
};
pub use equilibrium::{solve, EquilibriumOutcome, PayoffBounds, Regime, DEFAULT_PUSH_LAMBDA};
pub use error::{Error, Result};
pub use model::{
    demand, effective_payments, payoffs, AdState, CloudOverhead, EffectivePayments,
    EffectiveProfile, MarketParams, Model, PayoffTriple, PriceProfile, Provider,
};
pub use oracle::{
    brute_force_equilibria, verify_profile, verify_spne, GridSpec, VerificationReport,
};
