//! Push model: the WSP and CSP price the IoTSP simultaneously (leaders), then
//! the IoTSP prices end-users (follower).
//!
//! Below the threshold `d R = 5 D_max` the leader stage has a unique
//! equilibrium. Above it every split of `R - D_max/d` between the two leaders
//! with both shares in `[2 D_max/d, R - 3 D_max/d]` is an equilibrium; the
//! IoTSP then prices at zero and the market is fully served.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    approx_eq, check_selector, validated, EquilibriumOutcome, PayoffBounds, Regime,
};
use crate::error::{check_non_negative, Result};
use crate::model::{
    AdState, EffectivePayments, EffectiveProfile, MarketParams, Model, PayoffTriple,
};

const BOUNDARY_REL_EPS: f64 = 1e-12;

/// The leader equilibria `w + c = sum` with each share in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushSegment {
    pub sum: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PushSegment {
    /// Member at selector `lambda`: the CSP's share moves from `lo`
    /// (`lambda = 0`) to `hi` (`lambda = 1`).
    pub fn point(&self, lambda: f64) -> EffectivePayments {
        let c = if lambda >= 1.0 {
            self.hi
        } else {
            self.lo + lambda * (self.hi - self.lo)
        };
        EffectivePayments { w: self.sum - c, c }
    }

    pub fn contains(&self, w: f64, c: f64, tol: f64) -> bool {
        (w + c - self.sum).abs() <= tol
            && w >= self.lo - tol
            && w <= self.hi + tol
            && c >= self.lo - tol
            && c <= self.hi + tol
    }

    pub fn is_degenerate(&self) -> bool {
        self.hi <= self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushEquilibriumSet {
    pub regime: Regime,
    /// `(p_i*, w*, c*)` when the leader equilibrium is a single point.
    pub unique_point: Option<EffectiveProfile>,
    pub segment: Option<PushSegment>,
    pub iotsp_payoff: f64,
    pub wsp_csp_payoff_sum: f64,
    pub bounds: PayoffBounds,
}

pub fn classify(params: &MarketParams, ad: &AdState) -> Regime {
    let x = params.d * ad.ad_rev();
    let threshold = 5.0 * params.d_max;
    if approx_eq(x, threshold, BOUNDARY_REL_EPS) {
        Regime::Boundary
    } else if x < threshold {
        Regime::LowAd
    } else {
        Regime::HighAd
    }
}

/// IoTSP's optimal end-user price given the leaders' effective payments.
pub fn iotsp_best_response_push(
    w: f64,
    c: f64,
    params: &MarketParams,
    ad: &AdState,
) -> Result<f64> {
    validated(params, ad)?;
    check_non_negative("w", w)?;
    check_non_negative("c", c)?;
    Ok(best_response(w, c, params, ad.ad_rev()))
}

pub(crate) fn best_response(w: f64, c: f64, params: &MarketParams, ad_rev: f64) -> f64 {
    (params.d_max / (2.0 * params.d) - ad_rev / 2.0 + w / 2.0 + c / 2.0).max(0.0)
}

/// `d (D_max/(6d) + R/6)^2`, the IoTSP's low-regime payoff.
fn low_scale(params: &MarketParams, ad_rev: f64) -> f64 {
    let s = params.d_max / (6.0 * params.d) + ad_rev / 6.0;
    params.d * s * s
}

fn high_segment(params: &MarketParams, ad_rev: f64) -> PushSegment {
    let k = params.choke_price();
    PushSegment {
        sum: ad_rev - k,
        lo: 2.0 * k,
        hi: (ad_rev - 3.0 * k).max(2.0 * k),
    }
}

pub fn push_leader_equilibrium(params: &MarketParams, ad: &AdState) -> Result<PushEquilibriumSet> {
    validated(params, ad)?;
    let r = ad.ad_rev();
    let regime = classify(params, ad);
    let set = match regime {
        Regime::LowAd => {
            let share = params.d_max / (3.0 * params.d) + r / 3.0;
            let u = low_scale(params, r);
            PushEquilibriumSet {
                regime,
                unique_point: Some(EffectiveProfile::new(spne_price(params, r), share, share)),
                segment: None,
                iotsp_payoff: u,
                wsp_csp_payoff_sum: 4.0 * u,
                bounds: PayoffBounds {
                    wsp_worst: 2.0 * u,
                    wsp_best: 2.0 * u,
                    csp_worst: 2.0 * u,
                    csp_best: 2.0 * u,
                },
            }
        }
        Regime::HighAd | Regime::Boundary => {
            let segment = high_segment(params, r);
            let d_max = params.d_max;
            let worst = 2.0 * d_max * d_max / params.d;
            let best = ((r - 3.0 * params.choke_price()) * d_max).max(worst);
            let unique_point = (regime == Regime::Boundary).then(|| {
                let k2 = segment.lo;
                EffectiveProfile::new(0.0, k2, k2)
            });
            PushEquilibriumSet {
                regime,
                unique_point,
                segment: Some(segment),
                iotsp_payoff: d_max * d_max / params.d,
                wsp_csp_payoff_sum: r * d_max - d_max * d_max / params.d,
                bounds: PayoffBounds {
                    wsp_worst: worst,
                    wsp_best: best,
                    csp_worst: worst,
                    csp_best: best,
                },
            }
        }
    };
    Ok(set)
}

fn spne_price(params: &MarketParams, ad_rev: f64) -> f64 {
    (5.0 * params.d_max / (6.0 * params.d) - ad_rev / 6.0).max(0.0)
}

/// Subgame-perfect equilibrium. `lambda` selects the member of the high-regime
/// continuum and is ignored when the equilibrium is unique.
pub fn push_spne(params: &MarketParams, ad: &AdState, lambda: f64) -> Result<EquilibriumOutcome> {
    check_selector(lambda)?;
    let set = push_leader_equilibrium(params, ad)?;
    let r = ad.ad_rev();
    let p_i = spne_price(params, r);

    let (prices, payoffs) = match set.segment {
        None => {
            let point = set.unique_point.expect("low regime has a unique point");
            let u = set.iotsp_payoff;
            let payoffs = PayoffTriple {
                u_iotsp: u,
                u_wsp: 2.0 * u,
                u_csp: 2.0 * u,
                demand: (params.d_max + params.d * r) / 6.0,
            };
            (point, payoffs)
        }
        Some(segment) => {
            let pay = segment.point(lambda);
            let d_max = params.d_max;
            let payoffs = PayoffTriple {
                u_iotsp: set.iotsp_payoff,
                u_wsp: pay.w * d_max,
                u_csp: pay.c * d_max,
                demand: d_max,
            };
            (EffectiveProfile::new(p_i, pay.w, pay.c), payoffs)
        }
    };

    Ok(EquilibriumOutcome {
        model: Model::Push,
        regime: set.regime,
        unique: set.regime != Regime::HighAd,
        ad_rev: r,
        prices,
        unit_prices: prices.unit_prices(params, ad),
        payoffs,
        bounds: set.bounds,
    })
}

/// WSP/CSP worst and best equilibrium payoffs.
pub fn push_payoff_bounds(params: &MarketParams, ad: &AdState) -> Result<PayoffBounds> {
    Ok(push_leader_equilibrium(params, ad)?.bounds)
}
