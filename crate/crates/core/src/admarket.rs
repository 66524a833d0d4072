//! Advertiser participation and the IoTSP's choice of the ad price `b`.
//!
//! A firm with per-user valuation `r_i` advertises (one unit of volume per
//! firm by default) when `r_i >= b`; total volume is capped at `a_max`.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve, DEFAULT_PUSH_LAMBDA};
use crate::error::{check_non_negative, check_positive, invalid, Error, Result};
use crate::model::{AdState, MarketParams, Model};

/// Candidate grid size for functional pools.
pub const DEFAULT_PRICE_GRID: usize = 1001;

const TIE_REL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Demand {
    /// Explicit firms; participation counts valuations `>= b`.
    Discrete { valuations: Vec<f64> },
    /// `G(b) = firms * max(0, 1 - b / b_max)`.
    Linear { firms: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvertiserPool {
    pub demand: Demand,
    pub volume_per_firm: f64,
    pub a_max: f64,
    pub b_max: f64,
}

impl AdvertiserPool {
    pub fn discrete(valuations: Vec<f64>, a_max: f64, b_max: f64) -> Result<Self> {
        let pool = Self {
            demand: Demand::Discrete { valuations },
            volume_per_firm: 1.0,
            a_max,
            b_max,
        };
        pool.validate()?;
        Ok(pool)
    }

    pub fn linear(firms: f64, a_max: f64, b_max: f64) -> Result<Self> {
        let pool = Self {
            demand: Demand::Linear { firms },
            volume_per_firm: 1.0,
            a_max,
            b_max,
        };
        pool.validate()?;
        Ok(pool)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("volume_per_firm", self.volume_per_firm)?;
        check_non_negative("a_max", self.a_max)?;
        check_positive("b_max", self.b_max)?;
        match &self.demand {
            Demand::Discrete { valuations } => {
                for &r in valuations {
                    check_non_negative("valuations", r)?;
                    // G(b_max) must be zero, so every firm drops out by b_max.
                    if r >= self.b_max {
                        return Err(invalid(
                            "b_max",
                            format!("must exceed every valuation, {r} >= {}", self.b_max),
                        ));
                    }
                }
                Ok(())
            }
            Demand::Linear { firms } => check_non_negative("firms", *firms),
        }
    }

    fn is_empty(&self) -> bool {
        match &self.demand {
            Demand::Discrete { valuations } => valuations.is_empty(),
            Demand::Linear { firms } => *firms == 0.0,
        }
    }
}

/// Ad volume per user at price `b`: `min(a_max, G(b))`.
pub fn participation(b: f64, pool: &AdvertiserPool) -> Result<f64> {
    check_non_negative("b", b)?;
    Ok(volume(b, pool))
}

fn volume(b: f64, pool: &AdvertiserPool) -> f64 {
    if b >= pool.b_max {
        return 0.0;
    }
    let uncapped = match &pool.demand {
        Demand::Discrete { valuations } => {
            valuations.iter().filter(|&&r| r >= b).count() as f64 * pool.volume_per_firm
        }
        Demand::Linear { firms } => firms * (1.0 - b / pool.b_max) * pool.volume_per_firm,
    };
    uncapped.min(pool.a_max)
}

/// Candidate ad prices: valuations plus the endpoints for a discrete pool
/// (revenue is piecewise linear with breakpoints at valuations), otherwise a
/// uniform grid on `[0, b_max]`.
pub fn candidate_prices(pool: &AdvertiserPool, grid_points: usize) -> Vec<f64> {
    let mut out = match &pool.demand {
        Demand::Discrete { valuations } => {
            let mut v = valuations.clone();
            v.push(0.0);
            v.push(pool.b_max);
            v
        }
        Demand::Linear { .. } => {
            let n = grid_points.max(2);
            (0..n)
                .map(|i| pool.b_max * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// One row of the ad revenue table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevenuePoint {
    pub b: f64,
    pub a1: f64,
    pub ad_rev: f64,
}

pub fn revenue_table(pool: &AdvertiserPool, candidates: &[f64]) -> Vec<RevenuePoint> {
    candidates
        .iter()
        .map(|&b| {
            let a1 = volume(b, pool);
            RevenuePoint {
                b,
                a1,
                ad_rev: b * a1,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSelection {
    pub model: Model,
    /// Every candidate `b` that maximizes the IoTSP's equilibrium payoff.
    pub maximizers: Vec<f64>,
    /// Largest `b * a1` among the maximizers.
    pub achieved_ad_rev: f64,
    pub payoff_at_max: f64,
}

/// Ad revenue above which the IoTSP's equilibrium payoff stops growing.
pub fn saturation_threshold(model: Model, params: &MarketParams) -> Option<f64> {
    match model {
        Model::Push => Some(5.0 * params.choke_price()),
        Model::Hybrid => Some(2.0 * params.choke_price()),
        Model::Pull => None,
    }
}

pub fn optimal_b(model: Model, pool: &AdvertiserPool, params: &MarketParams) -> Result<BSelection> {
    optimal_b_on_grid(model, pool, params, DEFAULT_PRICE_GRID)
}

pub fn optimal_b_on_grid(
    model: Model,
    pool: &AdvertiserPool,
    params: &MarketParams,
    grid_points: usize,
) -> Result<BSelection> {
    params.validate()?;
    pool.validate()?;
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let table = revenue_table(pool, &candidate_prices(pool, grid_points));
    let best = table.iter().map(|p| p.ad_rev).fold(0.0_f64, f64::max);

    let saturated: Vec<&RevenuePoint> = match saturation_threshold(model, params) {
        Some(t) => table
            .iter()
            .filter(|p| p.ad_rev >= t * (1.0 - TIE_REL_EPS))
            .collect(),
        None => Vec::new(),
    };
    let chosen: Vec<&RevenuePoint> = if saturated.is_empty() {
        table
            .iter()
            .filter(|p| p.ad_rev >= best - TIE_REL_EPS * best.max(1.0))
            .collect()
    } else {
        saturated
    };

    let top = chosen
        .iter()
        .max_by(|a, b| a.ad_rev.total_cmp(&b.ad_rev))
        .expect("candidate set is never empty");
    let ad = AdState::new(top.b, top.a1, params)?;
    let payoff_at_max = solve(model, params, &ad, DEFAULT_PUSH_LAMBDA)?
        .payoffs
        .u_iotsp;

    Ok(BSelection {
        model,
        maximizers: chosen.iter().map(|p| p.b).collect(),
        achieved_ad_rev: top.ad_rev,
        payoff_at_max,
    })
}

/// Expected per-period payoff of a firm with valuation `r_i` at ad price `b`.
pub fn advertiser_payoff(r_i: f64, b: f64, demand: f64) -> f64 {
    if r_i >= b {
        (r_i - b) * demand
    } else {
        0.0
    }
}

/// Extra cloud resource per user for ad volume `a1`.
pub fn cloud_overhead(a1: f64, params: &MarketParams) -> Result<f64> {
    check_non_negative("a1", a1)?;
    Ok(params.cloud_overhead(a1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CloudOverhead;

    fn pool() -> AdvertiserPool {
        AdvertiserPool::discrete((1..=10).map(f64::from).collect(), 10.0, 11.0).unwrap()
    }

    fn market() -> MarketParams {
        MarketParams::new(1.0, 15.0).unwrap()
    }

    #[test]
    fn participation_examples() {
        assert_eq!(participation(5.0, &pool()).unwrap(), 6.0);
        assert_eq!(participation(11.0, &pool()).unwrap(), 0.0);
        let capped =
            AdvertiserPool::discrete((1..=10).map(f64::from).collect(), 4.0, 11.0).unwrap();
        assert_eq!(participation(0.0, &capped).unwrap(), 4.0);
        assert!(participation(-1.0, &pool()).is_err());
    }

    #[test]
    fn linear_pool() {
        let p = AdvertiserPool::linear(8.0, 5.0, 4.0).unwrap();
        assert_eq!(participation(0.0, &p).unwrap(), 5.0);
        assert_eq!(participation(2.0, &p).unwrap(), 4.0);
        assert_eq!(participation(4.0, &p).unwrap(), 0.0);
        assert_eq!(participation(9.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn pool_validation() {
        assert!(AdvertiserPool::discrete(vec![1.0, 5.0], 3.0, 5.0).is_err());
        assert!(AdvertiserPool::discrete(vec![-1.0], 3.0, 5.0).is_err());
        assert!(AdvertiserPool::linear(3.0, 3.0, 0.0).is_err());
        let empty = AdvertiserPool::discrete(vec![], 3.0, 5.0).unwrap();
        assert_eq!(
            optimal_b(Model::Pull, &empty, &market()),
            Err(Error::EmptyPool)
        );
    }

    #[test]
    fn optimal_b_examples() {
        for model in Model::ALL {
            let sel = optimal_b(model, &pool(), &market()).unwrap();
            assert_eq!(sel.maximizers, vec![5.0, 6.0], "{model}");
            assert_eq!(sel.achieved_ad_rev, 30.0);
        }
        let pull = optimal_b(Model::Pull, &pool(), &market()).unwrap();
        assert_eq!(pull.payoff_at_max, 150.0);
    }

    #[test]
    fn push_saturation_admits_every_b_past_threshold() {
        // Four firms at 30 and one at 80: R(30) = 150, R(80) = 80; both clear
        // 5 D_max / d = 75 when D_max = 15.
        let p = AdvertiserPool::discrete(vec![30.0, 30.0, 30.0, 30.0, 80.0], 10.0, 100.0).unwrap();
        let push = optimal_b(Model::Push, &p, &market()).unwrap();
        assert_eq!(push.maximizers, vec![30.0, 80.0]);
        assert_eq!(push.achieved_ad_rev, 150.0);
        assert_eq!(push.payoff_at_max, 225.0);

        let pull = optimal_b(Model::Pull, &p, &market()).unwrap();
        assert_eq!(pull.maximizers, vec![30.0]);
    }

    #[test]
    fn advertiser_payoff_examples() {
        assert_eq!(advertiser_payoff(7.0, 5.0, 5.0), 10.0);
        assert_eq!(advertiser_payoff(5.0, 5.0, 5.0), 0.0);
        assert_eq!(advertiser_payoff(4.0, 5.0, 5.0), 0.0);
    }

    #[test]
    fn cloud_overhead_examples() {
        let m = market();
        assert_eq!(cloud_overhead(0.0, &m).unwrap(), 0.0);
        assert_eq!(cloud_overhead(1.0, &m).unwrap(), 0.5);
        assert_eq!(cloud_overhead(6.0, &m).unwrap(), 3.0);
        let steep = m
            .with_overhead(CloudOverhead::Affine { kappa: 2.0 })
            .unwrap();
        assert_eq!(cloud_overhead(6.0, &steep).unwrap(), 12.0);
    }
}
