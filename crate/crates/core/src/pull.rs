//! Pull model: IoTSP, WSP and CSP price end-users simultaneously. The Nash
//! equilibrium is unique; the IoTSP's price hits zero once `d R > D_max / 3`.

use crate::equilibrium::{validated, EquilibriumOutcome, PayoffBounds, Regime};
use crate::error::Result;
use crate::model::{AdState, EffectiveProfile, MarketParams, Model, PayoffTriple};

pub fn classify(params: &MarketParams, ad: &AdState) -> Regime {
    if params.d * ad.ad_rev() <= params.d_max / 3.0 {
        Regime::LowAd
    } else {
        Regime::HighAd
    }
}

pub fn pull_ne(params: &MarketParams, ad: &AdState) -> Result<EquilibriumOutcome> {
    validated(params, ad)?;
    let (d, d_max, r) = (params.d, params.d_max, ad.ad_rev());
    let regime = classify(params, ad);

    let (prices, payoffs) = match regime {
        Regime::LowAd => {
            let share = d_max / (4.0 * d) + r / 4.0;
            let u = d * share * share;
            (
                EffectiveProfile::new(d_max / (4.0 * d) - 3.0 * r / 4.0, share, share),
                PayoffTriple {
                    u_iotsp: u,
                    u_wsp: u,
                    u_csp: u,
                    demand: (d_max + d * r) / 4.0,
                },
            )
        }
        _ => {
            let share = d_max / (3.0 * d);
            let u = d_max * d_max / (9.0 * d);
            (
                EffectiveProfile::new(0.0, share, share),
                PayoffTriple {
                    u_iotsp: r * d_max / 3.0,
                    u_wsp: u,
                    u_csp: u,
                    demand: d_max / 3.0,
                },
            )
        }
    };

    Ok(EquilibriumOutcome {
        model: Model::Pull,
        regime,
        unique: true,
        ad_rev: r,
        prices,
        unit_prices: prices.unit_prices(params, ad),
        payoffs,
        bounds: PayoffBounds::point(&payoffs),
    })
}
