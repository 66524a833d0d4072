use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AdState, EffectiveProfile, MarketParams, Model, PayoffTriple, UnitPrices};
use crate::{hybrid, pull, push};

/// Which branch of a model's closed form an ad revenue falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    LowAd,
    HighAd,
    /// Exactly on the push threshold `d R = 5 D_max`.
    Boundary,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::LowAd => "low_ad",
            Regime::HighAd => "high_ad",
            Regime::Boundary => "boundary",
        }
    }
}

/// Worst and best equilibrium payoffs of the two infrastructure providers.
/// Outside the push continuum both bounds equal the unique payoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffBounds {
    pub wsp_worst: f64,
    pub wsp_best: f64,
    pub csp_worst: f64,
    pub csp_best: f64,
}

impl PayoffBounds {
    pub fn point(payoffs: &PayoffTriple) -> Self {
        Self {
            wsp_worst: payoffs.u_wsp,
            wsp_best: payoffs.u_wsp,
            csp_worst: payoffs.u_csp,
            csp_best: payoffs.u_csp,
        }
    }
}

/// One equilibrium of one interaction model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumOutcome {
    pub model: Model,
    pub regime: Regime,
    /// False only for the push continuum, where `prices` is the selected
    /// member.
    pub unique: bool,
    pub ad_rev: f64,
    pub prices: EffectiveProfile,
    pub unit_prices: UnitPrices,
    pub payoffs: PayoffTriple,
    pub bounds: PayoffBounds,
}

/// Equilibrium selector for the push continuum (CSP share of the segment).
pub const DEFAULT_PUSH_LAMBDA: f64 = 0.5;

pub(crate) fn check_selector(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidSelector(lambda))
    }
}

pub(crate) fn validated(params: &MarketParams, ad: &AdState) -> Result<()> {
    params.validate()?;
    ad.validate_for(params)
}

/// Equilibrium of `model`; `push_lambda` only matters for the push
/// continuum.
pub fn solve(
    model: Model,
    params: &MarketParams,
    ad: &AdState,
    push_lambda: f64,
) -> Result<EquilibriumOutcome> {
    match model {
        Model::Push => push::push_spne(params, ad, push_lambda),
        Model::Pull => pull::pull_ne(params, ad),
        Model::Hybrid => hybrid::hybrid_spne(params, ad),
    }
}

/// Relative closeness, used for regime boundaries and equality checks.
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
