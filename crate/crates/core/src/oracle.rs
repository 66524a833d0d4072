//! Numeric equilibrium verification.
//!
//! `verify_ne` scans every mover's unilateral deviations on a price grid (with
//! local refinement) while the others stay fixed. `verify_spne` does the same
//! for the leaders of a sequential model, letting followers re-respond through
//! the analytic best-response maps. `brute_force_equilibria` enumerates whole
//! grids of profiles and keeps those no mover can improve on at grid
//! resolution.
//!
//! Gains are measured relative to `max(1, |payoff of the deviator|)`.

use serde::{Deserialize, Serialize};

use crate::equilibrium::validated;
use crate::error::{Error, Result};
use crate::model::{
    demand_effective, payoffs_effective, AdState, EffectivePayments, EffectiveProfile,
    MarketParams, Model, PayoffTriple, Provider,
};
use crate::{hybrid, push};

pub const DEFAULT_GRID_STEPS: usize = 2001;
pub const DEFAULT_REFINE_ROUNDS: usize = 3;
/// Cap on payoff evaluations for `brute_force_equilibria`.
pub const DEFAULT_EVALUATION_CAP: u128 = 50_000_000;

/// Deviation grid shared by every decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub refine_rounds: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, steps: usize, refine_rounds: usize) -> Result<Self> {
        let grid = Self {
            lo,
            hi,
            steps,
            refine_rounds,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `[0, max(2 D_max/d, 1.2 R)]` with the default resolution.
    pub fn default_for(params: &MarketParams, ad_rev: f64) -> Self {
        Self::covering(params, ad_rev, DEFAULT_GRID_STEPS)
    }

    pub fn covering(params: &MarketParams, ad_rev: f64, steps: usize) -> Self {
        Self {
            lo: 0.0,
            hi: (2.0 * params.choke_price()).max(1.2 * ad_rev),
            steps,
            refine_rounds: DEFAULT_REFINE_ROUNDS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.lo < 0.0 {
            return Err(Error::InvalidGrid(format!("lo = {} is negative", self.lo)));
        }
        if self.lo > self.hi {
            return Err(Error::InvalidGrid(format!(
                "lo = {} > hi = {}",
                self.lo, self.hi
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidGrid(format!("steps = {} < 2", self.steps)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.steps - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + self.spacing() * i as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max_gain <= tolerance`.
    pub passed: bool,
    /// Largest deviation gain, relative to `max(1, |payoff|)` of the deviator.
    pub max_gain: f64,
    /// The same gain in currency.
    pub max_abs_gain: f64,
    pub worst_deviator: Option<Provider>,
    /// Price (effective payment) at which the worst gain was found.
    pub worst_deviation: Option<f64>,
    pub tolerance: f64,
}

impl VerificationReport {
    fn clean(tolerance: f64) -> Self {
        Self {
            passed: true,
            max_gain: 0.0,
            max_abs_gain: 0.0,
            worst_deviator: None,
            worst_deviation: None,
            tolerance,
        }
    }

    fn record(&mut self, deviator: Provider, base: f64, best: f64, at: f64) {
        let abs_gain = (best - base).max(0.0);
        let rel_gain = abs_gain / base.abs().max(1.0);
        if self.worst_deviator.is_none() || rel_gain > self.max_gain {
            self.max_gain = rel_gain;
            self.max_abs_gain = abs_gain;
            self.worst_deviator = Some(deviator);
            self.worst_deviation = Some(at);
        }
        self.passed = self.max_gain <= self.tolerance;
    }

    /// Keeps the larger of the two gains; passes only if both pass.
    pub fn merge(self, other: Self) -> Self {
        let mut out = if other.max_gain > self.max_gain {
            other
        } else {
            self
        };
        out.passed = self.passed && other.passed;
        out
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!(
            "tolerance must be finite and >= 0, got {tol}"
        )))
    }
}

/// Best value of `payoff` over the grid, then `refine_rounds` passes over a
/// window shrunk tenfold each round around the incumbent.
fn scan<F: Fn(f64) -> f64>(grid: &GridSpec, payoff: F) -> (f64, f64) {
    let mut best = (grid.lo, f64::NEG_INFINITY);
    let sweep = |g: &GridSpec, best: &mut (f64, f64)| {
        for i in 0..g.steps {
            let x = g.point(i);
            let u = payoff(x);
            if u > best.1 {
                *best = (x, u);
            }
        }
    };
    sweep(grid, &mut best);
    let mut half_width = grid.hi - grid.lo;
    for _ in 0..grid.refine_rounds {
        half_width /= 10.0;
        let local = GridSpec {
            lo: (best.0 - half_width).max(grid.lo),
            hi: (best.0 + half_width).min(grid.hi),
            steps: grid.steps,
            refine_rounds: 0,
        };
        sweep(&local, &mut best);
    }
    best
}

/// Providers that choose simultaneously in the last stage of `model`.
pub fn last_stage_movers(model: Model) -> &'static [Provider] {
    match model {
        Model::Pull => &[Provider::Iotsp, Provider::Wsp, Provider::Csp],
        Model::Push => &[Provider::Iotsp],
        Model::Hybrid => &[Provider::Iotsp, Provider::Wsp],
    }
}

fn leaders(model: Model) -> Result<&'static [Provider]> {
    match model {
        Model::Push => Ok(&[Provider::Wsp, Provider::Csp]),
        Model::Hybrid => Ok(&[Provider::Csp]),
        Model::Pull => Err(Error::InvalidModel("pull")),
    }
}

/// Unilateral-deviation check of the last (simultaneous) stage of `model`
/// at `profile`; earlier-stage prices are held fixed.
pub fn verify_ne(
    model: Model,
    profile: &EffectiveProfile,
    params: &MarketParams,
    ad: &AdState,
    grid: &GridSpec,
    tol: f64,
) -> Result<VerificationReport> {
    validated(params, ad)?;
    profile.validate()?;
    grid.validate()?;
    check_tolerance(tol)?;
    let r = ad.ad_rev();
    let base = payoffs_effective(model, profile, params, r);
    let mut report = VerificationReport::clean(tol);
    for &mover in last_stage_movers(model) {
        let (at, best) = scan(grid, |x| {
            payoffs_effective(model, &profile.with(mover, x), params, r).of(mover)
        });
        report.record(mover, base.of(mover), best, at);
    }
    Ok(report)
}

/// Full profile after followers respond to the leaders' prices.
pub fn follower_response(
    model: Model,
    leaders: &EffectivePayments,
    params: &MarketParams,
    ad_rev: f64,
) -> Result<EffectiveProfile> {
    match model {
        Model::Push => Ok(EffectiveProfile::new(
            push::best_response(leaders.w, leaders.c, params, ad_rev),
            leaders.w,
            leaders.c,
        )),
        Model::Hybrid => {
            let (p_i, w) = hybrid::followers(leaders.c, params, ad_rev);
            Ok(EffectiveProfile::new(p_i, w, leaders.c))
        }
        Model::Pull => Err(Error::InvalidModel("pull")),
    }
}

fn induced_payoffs(
    model: Model,
    leaders: &EffectivePayments,
    params: &MarketParams,
    ad_rev: f64,
) -> PayoffTriple {
    let profile = follower_response(model, leaders, params, ad_rev).expect("sequential model");
    payoffs_effective(model, &profile, params, ad_rev)
}

/// Subgame-perfect check for push (leaders `w`, `c`) or hybrid (leader `c`;
/// `leaders.w` is ignored because the WSP follows). Each leader deviation is
/// answered by the followers' analytic best response; the follower stage is
/// then checked at the leaders' prices with `verify_ne`.
pub fn verify_spne(
    model: Model,
    leaders_prices: &EffectivePayments,
    params: &MarketParams,
    ad: &AdState,
    grid: &GridSpec,
    tol: f64,
) -> Result<VerificationReport> {
    let movers = leaders(model)?;
    validated(params, ad)?;
    grid.validate()?;
    check_tolerance(tol)?;
    EffectiveProfile::new(0.0, leaders_prices.w, leaders_prices.c).validate()?;
    let r = ad.ad_rev();
    let base = induced_payoffs(model, leaders_prices, params, r);
    let mut report = VerificationReport::clean(tol);
    for &leader in movers {
        let (at, best) = scan(grid, |x| {
            let mut dev = *leaders_prices;
            match leader {
                Provider::Wsp => dev.w = x,
                _ => dev.c = x,
            }
            induced_payoffs(model, &dev, params, r).of(leader)
        });
        report.record(leader, base.of(leader), best, at);
    }
    let profile = follower_response(model, leaders_prices, params, r)?;
    let followers = verify_ne(model, &profile, params, ad, grid, tol)?;
    Ok(report.merge(followers))
}

/// Checks a complete profile of `model`: the leader stage via `verify_spne`
/// and the given follower prices via `verify_ne`.
pub fn verify_profile(
    model: Model,
    profile: &EffectiveProfile,
    params: &MarketParams,
    ad: &AdState,
    grid: &GridSpec,
    tol: f64,
) -> Result<VerificationReport> {
    let last = verify_ne(model, profile, params, ad, grid, tol)?;
    match model {
        Model::Pull => Ok(last),
        _ => Ok(verify_spne(model, &profile.payments(), params, ad, grid, tol)?.merge(last)),
    }
}

/// Profiles that are equilibria at grid resolution.
///
/// Pull enumerates all three prices. Push enumerates the leaders' `(w, c)`
/// with the IoTSP responding analytically. Hybrid enumerates the CSP's `c`
/// with analytic followers and, at every surviving `c`, enumerates the
/// followers' `(p_i, w)` as well.
///
/// No-trade profiles (zero demand) are dropped: with every price at or above
/// the choke price no single deviation restores demand, so they pass at any
/// resolution without being of interest.
pub fn brute_force_equilibria(
    model: Model,
    params: &MarketParams,
    ad: &AdState,
    grid: &GridSpec,
    tol: f64,
) -> Result<Vec<EffectiveProfile>> {
    brute_force_with_cap(model, params, ad, grid, tol, DEFAULT_EVALUATION_CAP)
}

pub fn brute_force_with_cap(
    model: Model,
    params: &MarketParams,
    ad: &AdState,
    grid: &GridSpec,
    tol: f64,
    cap: u128,
) -> Result<Vec<EffectiveProfile>> {
    validated(params, ad)?;
    grid.validate()?;
    check_tolerance(tol)?;
    let r = ad.ad_rev();
    let points = grid.points();
    let n = points.len() as u128;
    let budget = |movers: u32| (movers as u128 + 1) * n.pow(movers);

    let found: Vec<EffectiveProfile> = match model {
        Model::Pull => {
            check_cap(budget(3), cap)?;
            let movers = [Provider::Iotsp, Provider::Wsp, Provider::Csp];
            grid_nash(&movers, EffectiveProfile::default(), &points, tol, |p| {
                payoffs_effective(Model::Pull, p, params, r)
            })
        }
        Model::Push => {
            check_cap(budget(2), cap)?;
            let movers = [Provider::Wsp, Provider::Csp];
            let leaders = grid_nash(&movers, EffectiveProfile::default(), &points, tol, |p| {
                induced_payoffs(Model::Push, &p.payments(), params, r)
            });
            leaders
                .into_iter()
                .map(|p| follower_response(Model::Push, &p.payments(), params, r))
                .collect::<Result<_>>()?
        }
        Model::Hybrid => {
            let leader_cost = budget(1);
            check_cap(leader_cost, cap)?;
            let leaders = grid_nash(
                &[Provider::Csp],
                EffectiveProfile::default(),
                &points,
                tol,
                |p| induced_payoffs(Model::Hybrid, &p.payments(), params, r),
            );
            check_cap(leader_cost + leaders.len() as u128 * budget(2), cap)?;
            let followers = [Provider::Iotsp, Provider::Wsp];
            leaders
                .into_iter()
                .flat_map(|leader| {
                    grid_nash(&followers, leader, &points, tol, |p| {
                        payoffs_effective(Model::Hybrid, p, params, r)
                    })
                })
                .collect()
        }
    };
    Ok(found
        .into_iter()
        .filter(|p| demand_effective(model, p, params) > 0.0)
        .collect())
}

fn check_cap(needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::GridTooLarge { needed, cap })
    } else {
        Ok(())
    }
}

/// Grid profiles of `movers` (others fixed at `base`) where no mover gains
/// more than `tol * max(1, |payoff|)` by switching to another grid value.
fn grid_nash<F>(
    movers: &[Provider],
    base: EffectiveProfile,
    points: &[f64],
    tol: f64,
    payoff: F,
) -> Vec<EffectiveProfile>
where
    F: Fn(&EffectiveProfile) -> PayoffTriple + Sync,
{
    let k = movers.len();
    let n = points.len();
    let total = n.pow(k as u32);
    let profile_at = |idx: usize| {
        let mut p = base;
        let mut rest = idx;
        for &m in movers {
            p = p.with(m, points[rest % n]);
            rest /= n;
        }
        p
    };
    // Best payoff of mover j for every assignment of the other movers: the
    // table is indexed by the flat profile index with digit j removed.
    let best_tables: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let stride = n.pow(j as u32);
            par_map(total / n, |t| {
                let (high, low) = (t / stride, t % stride);
                let mut best = f64::NEG_INFINITY;
                for own in 0..n {
                    let idx = (high * n + own) * stride + low;
                    best = best.max(payoff(&profile_at(idx)).of(movers[j]));
                }
                best
            })
        })
        .collect();

    let accepted = par_map(total, |idx| {
        let p = profile_at(idx);
        let u = payoff(&p);
        movers.iter().enumerate().all(|(j, &m)| {
            let stride = n.pow(j as u32);
            let t = (idx / (stride * n)) * stride + idx % stride;
            let own = u.of(m);
            best_tables[j][t] - own <= tol * own.abs().max(1.0)
        })
    });
    accepted
        .into_iter()
        .enumerate()
        .filter(|&(_, ok)| ok)
        .map(|(idx, _)| profile_at(idx))
        .collect()
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(len: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F: Fn(usize) -> T>(len: usize, f: F) -> Vec<T> {
    (0..len).map(f).collect()
}

/// Single-linkage clusters of candidate profiles: two candidates link when
/// every coordinate differs by at most `radius`.
pub fn cluster_candidates(
    candidates: &[EffectiveProfile],
    radius: f64,
) -> Vec<Vec<EffectiveProfile>> {
    let n = candidates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| candidates[i].p_i.total_cmp(&candidates[j].p_i));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            let (a, b) = (&candidates[i], &candidates[j]);
            if b.p_i - a.p_i > radius {
                break;
            }
            let dist = (a.p_i - b.p_i)
                .abs()
                .max((a.w - b.w).abs())
                .max((a.c - b.c).abs());
            if dist <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut clusters: Vec<(usize, Vec<EffectiveProfile>)> = Vec::new();
    for (i, cand) in candidates.iter().enumerate() {
        let root = find(&mut parent, i);
        match clusters.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(*cand),
            None => clusters.push((root, vec![*cand])),
        }
    }
    clusters.into_iter().map(|(_, members)| members).collect()
}

/// Clusters at the default linkage radius of two grid cells.
pub fn cluster_on_grid(
    candidates: &[EffectiveProfile],
    grid: &GridSpec,
) -> Vec<Vec<EffectiveProfile>> {
    cluster_candidates(candidates, 2.0 * grid.spacing() * (1.0 + 1e-9))
}
