use approx::assert_relative_eq;
use iot_pricing::admarket::{participation, AdvertiserPool};
use iot_pricing::model::{payoffs_effective, EffectiveProfile};
use iot_pricing::oracle::{verify_profile, GridSpec};
use iot_pricing::push::push_leader_equilibrium;
use iot_pricing::{solve, AdState, MarketParams, Model, Regime};
use proptest::prelude::*;

fn market() -> impl Strategy<Value = (MarketParams, f64)> {
    (0.1..10.0_f64, 1.0..100.0_f64, 0.0..1.0_f64).prop_map(|(d, d_max, u)| {
        let m = MarketParams::new(d, d_max).unwrap();
        (m, u * 10.0 * d_max / d)
    })
}

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Push), Just(Model::Pull), Just(Model::Hybrid)]
}

fn at(model: Model, m: &MarketParams, r: f64, lambda: f64) -> iot_pricing::EquilibriumOutcome {
    solve(model, m, &AdState::from_revenue(r, m).unwrap(), lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_pass_coarse_oracle((m, r) in market(), model in model(), lambda in 0.0..=1.0_f64) {
        let ad = AdState::from_revenue(r, &m).unwrap();
        let eq = solve(model, &m, &ad, lambda).unwrap();
        let grid = GridSpec::covering(&m, r, 401);
        let rep = verify_profile(model, &eq.prices, &m, &ad, &grid, 1e-6).unwrap();
        prop_assert!(rep.passed, "{rep:?}");
        prop_assert!(rep.max_gain >= 0.0);
    }

    #[test]
    fn shifted_prices_are_caught((m, r) in market(), model in model(), shift in 0.05..0.5_f64) {
        let ad = AdState::from_revenue(r, &m).unwrap();
        let eq = solve(model, &m, &ad, 0.5).unwrap();
        prop_assume!(eq.regime == Regime::LowAd);
        // A raised WSP price loses demand the WSP can recover in pull and
        // hybrid; in push a raised CSP price leaves the CSP worse off.
        let bump = shift * m.choke_price();
        let off = match model {
            Model::Push => eq.prices.with(iot_pricing::Provider::Csp, eq.prices.c + bump),
            _ => eq.prices.with(iot_pricing::Provider::Wsp, eq.prices.w + bump),
        };
        let grid = GridSpec::covering(&m, r, 401);
        let rep = verify_profile(model, &off, &m, &ad, &grid, 1e-6).unwrap();
        prop_assert!(!rep.passed, "{off:?} {rep:?}");
    }

    #[test]
    fn payoffs_continuous_in_revenue((m, r) in market(), model in model()) {
        let h = 1e-7 * m.choke_price();
        let (a, b) = (at(model, &m, r, 0.5), at(model, &m, r + h, 0.5));
        // Every equilibrium quantity is piecewise linear or quadratic in R
        // with slopes bounded by the market scale.
        let scale = m.d_max * (m.choke_price() + r + h) * 10.0;
        prop_assert!((a.payoffs.demand - b.payoffs.demand).abs() <= m.d * h + 1e-9);
        prop_assert!((a.payoffs.u_iotsp - b.payoffs.u_iotsp).abs() <= scale * h / m.choke_price() + 1e-9);
        prop_assert!((a.bounds.wsp_worst - b.bounds.wsp_worst).abs() <= scale * h / m.choke_price() + 1e-9);
        prop_assert!((a.bounds.csp_best - b.bounds.csp_best).abs() <= scale * h / m.choke_price() + 1e-9);
    }

    #[test]
    fn demand_and_iotsp_payoff_monotone_in_revenue((m, r) in market(), model in model(), dr in 0.0..5.0_f64) {
        let (a, b) = (at(model, &m, r, 0.5), at(model, &m, r + dr, 0.5));
        prop_assert!(b.payoffs.demand >= a.payoffs.demand * (1.0 - 1e-12));
        prop_assert!(b.payoffs.u_iotsp >= a.payoffs.u_iotsp * (1.0 - 1e-12));
    }

    #[test]
    fn intensities_only_rescale_unit_prices(
        (m, r) in market(),
        model in model(),
        alpha in 0.1..10.0_f64,
        beta in 0.1..10.0_f64,
        a1 in 0.1..5.0_f64,
    ) {
        let scaled = m.with_intensities(alpha, beta).unwrap();
        let base = solve(model, &m, &AdState::with_revenue(r, a1, &m).unwrap(), 0.5).unwrap();
        let ad = AdState::with_revenue(r, a1, &scaled).unwrap();
        let other = solve(model, &scaled, &ad, 0.5).unwrap();
        prop_assert_eq!(base.prices, other.prices);
        prop_assert_eq!(base.payoffs, other.payoffs);
        if let Some(p_w) = other.unit_prices.p_w {
            assert_relative_eq!(p_w * (alpha + ad.a1()), other.prices.w, max_relative = 1e-12);
        }
        if let Some(p_c) = other.unit_prices.p_c {
            assert_relative_eq!(p_c * (beta + ad.a2()), other.prices.c, max_relative = 1e-12);
        }
    }

    #[test]
    fn surplus_splits_end_user_spend_and_ad_revenue((m, r) in market(), model in model(), lambda in 0.0..=1.0_f64) {
        let eq = at(model, &m, r, lambda);
        let u = eq.payoffs;
        let spend = match model {
            Model::Push => eq.prices.p_i,
            Model::Pull => eq.prices.p_i + eq.prices.w + eq.prices.c,
            Model::Hybrid => eq.prices.p_i + eq.prices.w,
        };
        let total = u.u_iotsp + u.u_wsp + u.u_csp;
        assert_relative_eq!(total, (spend + r) * u.demand, max_relative = 1e-10, epsilon = 1e-9);
        assert_relative_eq!(m.d_max - m.d * spend, u.demand, max_relative = 1e-10, epsilon = 1e-9);
    }

    #[test]
    fn closed_form_payoffs_match_payoff_function((m, r) in market(), model in model(), lambda in 0.0..=1.0_f64) {
        let eq = at(model, &m, r, lambda);
        let direct = payoffs_effective(model, &eq.prices, &m, r);
        for (a, b) in [
            (direct.demand, eq.payoffs.demand),
            (direct.u_iotsp, eq.payoffs.u_iotsp),
            (direct.u_wsp, eq.payoffs.u_wsp),
            (direct.u_csp, eq.payoffs.u_csp),
        ] {
            assert_relative_eq!(a, b, max_relative = 1e-10, epsilon = 1e-9);
        }
    }

    #[test]
    fn market_scaling((m, r) in market(), model in model(), k in 0.1..10.0_f64) {
        let big = MarketParams::new(m.d, m.d_max * k).unwrap();
        let (a, b) = (at(model, &m, r, 0.5), at(model, &big, r * k, 0.5));
        assert_relative_eq!(b.prices.p_i, k * a.prices.p_i, max_relative = 1e-9, epsilon = 1e-9);
        assert_relative_eq!(b.payoffs.demand, k * a.payoffs.demand, max_relative = 1e-9, epsilon = 1e-9);
        assert_relative_eq!(b.payoffs.u_iotsp, k * k * a.payoffs.u_iotsp, max_relative = 1e-9, epsilon = 1e-9);
        assert_relative_eq!(b.payoffs.u_csp, k * k * a.payoffs.u_csp, max_relative = 1e-9, epsilon = 1e-9);
    }

    #[test]
    fn push_segment_members_all_verify((m, _) in market(), lambda in 0.0..=1.0_f64, extra in 0.01..5.0_f64) {
        let r = (5.0 + extra) * m.choke_price();
        let ad = AdState::from_revenue(r, &m).unwrap();
        let set = push_leader_equilibrium(&m, &ad).unwrap();
        let seg = set.segment.unwrap();
        let iot_pricing::EffectivePayments { w, c } = seg.point(lambda);
        assert_relative_eq!(w + c, r - m.choke_price(), max_relative = 1e-12);
        let profile = EffectiveProfile::new(0.0, w, c);
        let grid = GridSpec::covering(&m, r, 401);
        let rep = verify_profile(Model::Push, &profile, &m, &ad, &grid, 1e-6).unwrap();
        prop_assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn participation_non_increasing(vals in prop::collection::vec(0.0..50.0_f64, 0..20), b in 0.0..60.0_f64, db in 0.0..10.0_f64) {
        let pool = AdvertiserPool::discrete(vals, 8.0, 60.0).unwrap();
        prop_assert!(participation(b + db, &pool).unwrap() <= participation(b, &pool).unwrap());
        let linear = AdvertiserPool::linear(12.0, 8.0, 60.0).unwrap();
        prop_assert!(participation(b + db, &linear).unwrap() <= participation(b, &linear).unwrap());
    }
}
