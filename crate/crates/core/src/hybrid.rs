//! Hybrid model: the CSP prices the IoTSP (leader), then the IoTSP and WSP
//! price end-users simultaneously (followers).

use crate::equilibrium::{validated, EquilibriumOutcome, PayoffBounds, Regime};
use crate::error::{check_non_negative, Result};
use crate::model::{AdState, EffectiveProfile, MarketParams, Model, PayoffTriple};

pub fn classify(params: &MarketParams, ad: &AdState) -> Regime {
    if params.d * ad.ad_rev() < 2.0 * params.d_max {
        Regime::LowAd
    } else {
        Regime::HighAd
    }
}

/// Follower equilibrium `(p_i*, w*)` given the CSP's effective charge `c`.
pub fn hybrid_followers_eq(c: f64, params: &MarketParams, ad: &AdState) -> Result<(f64, f64)> {
    validated(params, ad)?;
    check_non_negative("c", c)?;
    Ok(followers(c, params, ad.ad_rev()))
}

pub(crate) fn followers(c: f64, params: &MarketParams, ad_rev: f64) -> (f64, f64) {
    let (d, d_max) = (params.d, params.d_max);
    if c > ad_rev - d_max / (2.0 * d) {
        let p_i = (d_max / (3.0 * d) - 2.0 * ad_rev / 3.0 + 2.0 * c / 3.0).min(d_max / d);
        let w = (d_max / (3.0 * d) + ad_rev / 3.0 - c / 3.0).max(0.0);
        (p_i, w)
    } else {
        (0.0, d_max / (2.0 * d))
    }
}

/// The CSP's equilibrium effective charge `c*`.
pub fn hybrid_csp_price(params: &MarketParams, ad: &AdState) -> Result<f64> {
    validated(params, ad)?;
    Ok(csp_price(params, ad))
}

fn csp_price(params: &MarketParams, ad: &AdState) -> f64 {
    let (r, half_choke) = (ad.ad_rev(), params.choke_price() / 2.0);
    match classify(params, ad) {
        Regime::LowAd => r / 2.0 + half_choke,
        _ => r - half_choke,
    }
}

pub fn hybrid_spne(params: &MarketParams, ad: &AdState) -> Result<EquilibriumOutcome> {
    validated(params, ad)?;
    let (d, d_max, r) = (params.d, params.d_max, ad.ad_rev());
    let regime = classify(params, ad);
    let c = csp_price(params, ad);

    let (prices, payoffs) = match regime {
        Regime::LowAd => {
            let share = d_max / (6.0 * d) + r / 6.0;
            let u = d * share * share;
            (
                EffectiveProfile::new(2.0 * d_max / (3.0 * d) - r / 3.0, share, c),
                PayoffTriple {
                    u_iotsp: u,
                    u_wsp: u,
                    u_csp: 3.0 * u,
                    demand: (d_max + d * r) / 6.0,
                },
            )
        }
        _ => {
            let u = d_max * d_max / (4.0 * d);
            (
                EffectiveProfile::new(0.0, d_max / (2.0 * d), c),
                PayoffTriple {
                    u_iotsp: u,
                    u_wsp: u,
                    u_csp: (r - d_max / (2.0 * d)) * d_max / 2.0,
                    demand: d_max / 2.0,
                },
            )
        }
    };

    Ok(EquilibriumOutcome {
        model: Model::Hybrid,
        regime,
        unique: true,
        ad_rev: r,
        prices,
        unit_prices: prices.unit_prices(params, ad),
        payoffs,
        bounds: PayoffBounds::point(&payoffs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{demand_effective, payoffs_effective};
    use approx::assert_relative_eq;

    fn market() -> MarketParams {
        MarketParams::new(1.0, 15.0).unwrap()
    }

    fn ad(r: f64) -> AdState {
        AdState::from_revenue(r, &market()).unwrap()
    }

    #[test]
    fn follower_branches() {
        let m = market();
        assert_eq!(hybrid_followers_eq(9.0, &m, &ad(3.0)).unwrap(), (9.0, 3.0));
        assert_eq!(
            hybrid_followers_eq(20.0, &m, &ad(40.0)).unwrap(),
            (0.0, 7.5)
        );
        assert!(hybrid_followers_eq(-1.0, &m, &ad(3.0)).is_err());
    }

    #[test]
    fn follower_price_clamps_when_csp_overcharges() {
        let m = market();
        let r = 3.0;
        let (p_i, w) = hybrid_followers_eq(r + 15.0, &m, &ad(r)).unwrap();
        assert_eq!(p_i, 15.0);
        assert_eq!(w, 0.0);
        for w in [0.0, 1.0, 10.0] {
            let demand =
                demand_effective(Model::Hybrid, &EffectiveProfile::new(p_i, w, r + 15.0), &m);
            assert_eq!(demand, 0.0);
        }
    }

    #[test]
    fn csp_price_examples() {
        let m = market();
        assert_eq!(hybrid_csp_price(&m, &ad(3.0)).unwrap(), 9.0);
        assert_eq!(hybrid_csp_price(&m, &ad(30.0)).unwrap(), 22.5);
        let r = 30.0;
        assert_eq!(r / 2.0 + 7.5, r - 7.5);
        assert_eq!(hybrid_csp_price(&m, &ad(90.0)).unwrap(), 82.5);
    }

    #[test]
    fn csp_price_matches_grid_argmax() {
        let m = market();
        for r in [0.0, 3.0, 29.0, 30.0, 90.0] {
            let csp_payoff = |c: f64| {
                let (p_i, w) = followers(c, &m, r);
                payoffs_effective(Model::Hybrid, &EffectiveProfile::new(p_i, w, c), &m, r).u_csp
            };
            let best = (0..=200_000)
                .map(|i| i as f64 * 1e-3)
                .max_by(|a, b| csp_payoff(*a).partial_cmp(&csp_payoff(*b)).unwrap())
                .unwrap();
            let analytic = hybrid_csp_price(&m, &ad(r)).unwrap();
            assert!(
                (best - analytic).abs() <= 2e-3,
                "r={r}: grid {best} vs {analytic}"
            );
        }
    }

    #[test]
    fn spne_examples() {
        let m = market();
        let low = hybrid_spne(&m, &ad(3.0)).unwrap();
        assert_eq!(
            (low.prices.p_i, low.prices.w, low.prices.c),
            (9.0, 3.0, 9.0)
        );
        assert_eq!(low.payoffs.demand, 3.0);
        assert_eq!(
            (low.payoffs.u_iotsp, low.payoffs.u_wsp, low.payoffs.u_csp),
            (9.0, 9.0, 27.0)
        );

        let edge = hybrid_spne(&m, &ad(30.0)).unwrap();
        assert_eq!(edge.regime, Regime::HighAd);
        assert_eq!(edge.payoffs.demand, 7.5);
        assert_eq!(edge.payoffs.u_iotsp, 56.25);
        assert_eq!(edge.payoffs.u_wsp, 56.25);

        let high = hybrid_spne(&m, &ad(90.0)).unwrap();
        assert_eq!(high.payoffs.u_csp, 618.75);
    }

    #[test]
    fn closed_form_consistent_with_followers_and_payoffs() {
        let m = MarketParams::new(2.0, 40.0).unwrap();
        for r in [0.0, 5.0, 39.0, 40.0, 41.0, 200.0] {
            let a = AdState::from_revenue(r, &m).unwrap();
            let out = hybrid_spne(&m, &a).unwrap();
            let (p_i, w) = hybrid_followers_eq(out.prices.c, &m, &a).unwrap();
            assert_relative_eq!(p_i, out.prices.p_i, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(w, out.prices.w, max_relative = 1e-12);
            let direct = payoffs_effective(Model::Hybrid, &out.prices, &m, r);
            assert_relative_eq!(direct.demand, out.payoffs.demand, max_relative = 1e-12);
            assert_relative_eq!(direct.u_iotsp, out.payoffs.u_iotsp, max_relative = 1e-12);
            assert_relative_eq!(direct.u_wsp, out.payoffs.u_wsp, max_relative = 1e-12);
            assert_relative_eq!(direct.u_csp, out.payoffs.u_csp, max_relative = 1e-12);
        }
    }
}
