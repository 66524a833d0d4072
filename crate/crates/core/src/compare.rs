//! Cross-model comparison along the ad-revenue axis: per-entity series,
//! the revenue thresholds where orderings flip, the ordering case tables, and
//! the preferred model per entity at low and high ad revenue.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{approx_eq, solve, EquilibriumOutcome};
use crate::error::{Error, Result};
use crate::model::{AdState, MarketParams, Model};

/// Relative tolerance for "equal" in the ordering tables.
pub const ORDER_REL_TOL: f64 = 1e-9;
/// Width to which crossing brackets are shrunk.
pub const BRACKET_WIDTH: f64 = 1e-9;

/// Named revenue thresholds, in the order they occur on the axis.
pub const THRESHOLD_NAMES: [&str; 6] = [
    "pull_free",
    "wsp_push_pull",
    "wsp_hybrid_pull",
    "hybrid_free",
    "push_free",
    "csp_push_hybrid",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub name: String,
    /// Closed-form threshold on `R = b a1`.
    pub value: f64,
    /// Bracket around the sign change of the witness, found by bisection on
    /// equilibrium outputs.
    pub bracket: (f64, f64),
    pub witness: String,
}

impl Crossing {
    pub fn confirmed(&self) -> bool {
        let (lo, hi) = self.bracket;
        hi - lo <= BRACKET_WIDTH
            && lo <= self.value + BRACKET_WIDTH
            && self.value - BRACKET_WIDTH <= hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoints {
    pub entries: Vec<Crossing>,
}

impl CrossingPoints {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.value).collect()
    }
}

fn outcome(model: Model, params: &MarketParams, r: f64, lambda: f64) -> EquilibriumOutcome {
    let ad = AdState::from_revenue(r, params).expect("non-negative revenue");
    solve(model, params, &ad, lambda).expect("validated inputs")
}

/// Bisection for the sign change of `f` on `[lo, hi]` (`f(lo) <= 0 < f(hi)`
/// or the reverse).
fn bracket_root<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> (f64, f64) {
    let lo_sign = f(lo) > 0.0;
    debug_assert_ne!(lo_sign, f(hi) > 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        if hi - lo <= BRACKET_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Revenue thresholds, each confirmed by bracketing a sign change computed
/// from the equilibrium modules.
///
/// The three "free" thresholds are where the IoTSP's equilibrium price first
/// reaches zero. The other three are sign changes of a payoff difference.
pub fn crossing_points(params: &MarketParams) -> Result<CrossingPoints> {
    params.validate()?;
    let k = params.choke_price();
    let p = *params;
    let price = move |model: Model| move |r: f64| outcome(model, &p, r, 0.5).prices.p_i;
    let free = |name: &str, model: Model, value: f64| Crossing {
        name: name.into(),
        value,
        bracket: bracket_root(0.0, 10.0 * k, price(model)),
        witness: format!("{model} IoTSP equilibrium price reaches zero"),
    };

    let wsp_push_pull = |r: f64| {
        outcome(Model::Push, &p, r, 0.5).bounds.wsp_worst
            - outcome(Model::Pull, &p, r, 0.5).payoffs.u_wsp
    };
    let wsp_hybrid_pull = |r: f64| {
        outcome(Model::Hybrid, &p, r, 0.5).payoffs.u_wsp
            - outcome(Model::Pull, &p, r, 0.5).payoffs.u_wsp
    };
    let csp_push_hybrid = |r: f64| {
        outcome(Model::Push, &p, r, 0.5).bounds.csp_best
            - outcome(Model::Hybrid, &p, r, 0.5).payoffs.u_csp
    };

    let entries = vec![
        free("pull_free", Model::Pull, k / 3.0),
        Crossing {
            name: "wsp_push_pull".into(),
            value: (2.0_f64.sqrt() - 1.0) * k,
            bracket: bracket_root(k / 3.0, k, wsp_push_pull),
            witness: "u_wsp(push) - u_wsp(pull)".into(),
        },
        Crossing {
            name: "wsp_hybrid_pull".into(),
            value: k,
            bracket: bracket_root(k / 3.0, 2.0 * k, wsp_hybrid_pull),
            witness: "u_wsp(hybrid) - u_wsp(pull)".into(),
        },
        free("hybrid_free", Model::Hybrid, 2.0 * k),
        free("push_free", Model::Push, 5.0 * k),
        Crossing {
            name: "csp_push_hybrid".into(),
            value: 5.5 * k,
            bracket: bracket_root(5.0 * k, 10.0 * k, csp_push_hybrid),
            witness: "u_csp,best(push) - u_csp(hybrid)".into(),
        },
    ];
    Ok(CrossingPoints { entries })
}

/// One value per model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerModel {
    pub push: f64,
    pub pull: f64,
    pub hybrid: f64,
}

impl PerModel {
    pub fn get(&self, model: Model) -> f64 {
        match model {
            Model::Push => self.push,
            Model::Pull => self.pull,
            Model::Hybrid => self.hybrid,
        }
    }
}

/// Equilibrium quantities of all three models at one ad revenue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub ba1: f64,
    pub demand: PerModel,
    pub u_iotsp: PerModel,
    /// Push entries are the selected member of the push equilibrium set.
    pub u_wsp: PerModel,
    pub u_csp: PerModel,
    pub push_wsp_worst: f64,
    pub push_wsp_best: f64,
    pub push_csp_worst: f64,
    pub push_csp_best: f64,
}

impl ComparisonRow {
    pub fn evaluate(params: &MarketParams, ba1: f64, push_lambda: f64) -> Self {
        let [push, pull, hybrid] = Model::ALL.map(|m| outcome(m, params, ba1, push_lambda));
        let per = |f: fn(&EquilibriumOutcome) -> f64| PerModel {
            push: f(&push),
            pull: f(&pull),
            hybrid: f(&hybrid),
        };
        Self {
            ba1,
            demand: per(|o| o.payoffs.demand),
            u_iotsp: per(|o| o.payoffs.u_iotsp),
            u_wsp: per(|o| o.payoffs.u_wsp),
            u_csp: per(|o| o.payoffs.u_csp),
            push_wsp_worst: push.bounds.wsp_worst,
            push_wsp_best: push.bounds.wsp_best,
            push_csp_worst: push.bounds.csp_worst,
            push_csp_best: push.bounds.csp_best,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Greater,
    Equal,
    Less,
}

pub fn relation(a: f64, b: f64) -> Relation {
    if approx_eq(a, b, ORDER_REL_TOL) {
        Relation::Equal
    } else if a > b {
        Relation::Greater
    } else {
        Relation::Less
    }
}

/// An ordering the case tables require but the computed values break.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub ba1: f64,
    pub entity: Entity,
    pub expected: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entity {
    EndUsers,
    Iotsp,
    Wsp,
    Csp,
    Advertisers,
}

impl Entity {
    pub const ALL: [Entity; 5] = [
        Entity::EndUsers,
        Entity::Iotsp,
        Entity::Wsp,
        Entity::Csp,
        Entity::Advertisers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Entity::EndUsers => "end_users",
            Entity::Iotsp => "iotsp",
            Entity::Wsp => "wsp",
            Entity::Csp => "csp",
            Entity::Advertisers => "advertisers",
        }
    }
}

/// Where `x = d R` sits relative to a threshold `t` (also scaled by `d`).
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    At,
    Above,
}

fn side(x: f64, t: f64) -> Side {
    if approx_eq(x, t, 1e-12) {
        Side::At
    } else if x < t {
        Side::Below
    } else {
        Side::Above
    }
}

struct Checker<'a> {
    row: &'a ComparisonRow,
    out: Vec<OrderingViolation>,
}

impl Checker<'_> {
    fn expect(&mut self, entity: Entity, label: &str, lhs: f64, rel: Relation, rhs: f64) {
        if relation(lhs, rhs) != rel {
            let sym = match rel {
                Relation::Greater => ">",
                Relation::Equal => "=",
                Relation::Less => "<",
            };
            self.out.push(OrderingViolation {
                ba1: self.row.ba1,
                entity,
                expected: format!("{label} ({sym})"),
                lhs,
                rhs,
            });
        }
    }
}

/// Checks one row against the demand, IoTSP, WSP and CSP ordering tables.
pub fn check_orderings(params: &MarketParams, row: &ComparisonRow) -> Vec<OrderingViolation> {
    use Relation::*;
    let d_max = params.d_max;
    let x = params.d * row.ba1;
    let x0 = (2.0_f64.sqrt() - 1.0) * d_max;
    let mut ck = Checker {
        row,
        out: Vec::new(),
    };
    let (dm, ui, uw, uc) = (row.demand, row.u_iotsp, row.u_wsp, row.u_csp);

    match side(x, d_max) {
        Side::Below => {
            ck.expect(Entity::EndUsers, "pull > push", dm.pull, Greater, dm.push);
            ck.expect(Entity::EndUsers, "push = hybrid", dm.push, Equal, dm.hybrid);
        }
        Side::At => {
            ck.expect(Entity::EndUsers, "pull = push", dm.pull, Equal, dm.push);
            ck.expect(Entity::EndUsers, "push = hybrid", dm.push, Equal, dm.hybrid);
        }
        Side::Above => {
            ck.expect(
                Entity::EndUsers,
                "hybrid > pull",
                dm.hybrid,
                Greater,
                dm.pull,
            );
            if side(x, 2.0 * d_max) == Side::Above {
                ck.expect(
                    Entity::EndUsers,
                    "push > hybrid",
                    dm.push,
                    Greater,
                    dm.hybrid,
                );
            } else {
                ck.expect(Entity::EndUsers, "push = hybrid", dm.push, Equal, dm.hybrid);
            }
        }
    }

    ck.expect(Entity::Iotsp, "pull > push", ui.pull, Greater, ui.push);
    if side(x, 2.0 * d_max) == Side::Above {
        ck.expect(Entity::Iotsp, "push > hybrid", ui.push, Greater, ui.hybrid);
    } else {
        ck.expect(Entity::Iotsp, "push = hybrid", ui.push, Equal, ui.hybrid);
    }

    // Push WSP payoff is its worst equilibrium payoff (unique below 5 D_max).
    let wsp_push = row.push_wsp_worst;
    ck.expect(Entity::Wsp, "push > hybrid", wsp_push, Greater, uw.hybrid);
    match side(x, x0) {
        Side::Below => ck.expect(Entity::Wsp, "pull > push", uw.pull, Greater, wsp_push),
        Side::At => ck.expect(Entity::Wsp, "pull = push", uw.pull, Equal, wsp_push),
        Side::Above => ck.expect(Entity::Wsp, "push > pull", wsp_push, Greater, uw.pull),
    }
    match side(x, d_max) {
        Side::Below => ck.expect(Entity::Wsp, "pull > hybrid", uw.pull, Greater, uw.hybrid),
        Side::At => ck.expect(Entity::Wsp, "pull = hybrid", uw.pull, Equal, uw.hybrid),
        Side::Above => ck.expect(Entity::Wsp, "hybrid > pull", uw.hybrid, Greater, uw.pull),
    }

    let (csp_worst, csp_best) = (row.push_csp_worst, row.push_csp_best);
    match side(x, x0) {
        Side::Below => {
            ck.expect(Entity::Csp, "hybrid > pull", uc.hybrid, Greater, uc.pull);
            ck.expect(Entity::Csp, "pull > push", uc.pull, Greater, csp_best);
        }
        Side::At => {
            ck.expect(Entity::Csp, "hybrid > pull", uc.hybrid, Greater, uc.pull);
            ck.expect(Entity::Csp, "pull = push", uc.pull, Equal, csp_best);
        }
        Side::Above => {
            ck.expect(
                Entity::Csp,
                "push(worst) > pull",
                csp_worst,
                Greater,
                uc.pull,
            );
            ck.expect(
                Entity::Csp,
                "hybrid > push(worst)",
                uc.hybrid,
                Greater,
                csp_worst,
            );
            match side(x, 5.5 * d_max) {
                Side::Below => ck.expect(
                    Entity::Csp,
                    "hybrid > push(best)",
                    uc.hybrid,
                    Greater,
                    csp_best,
                ),
                Side::At => ck.expect(
                    Entity::Csp,
                    "hybrid = push(best)",
                    uc.hybrid,
                    Equal,
                    csp_best,
                ),
                Side::Above => ck.expect(
                    Entity::Csp,
                    "push(best) > hybrid",
                    csp_best,
                    Greater,
                    uc.hybrid,
                ),
            }
        }
    }
    ck.out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRow {
    pub entity: Entity,
    pub low: Model,
    /// Preferred model at high revenue under the selected push equilibrium.
    pub high: Model,
    /// Every model that is preferred at high revenue under some push
    /// equilibrium selection.
    pub high_candidates: Vec<Model>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceTable {
    pub low_r: f64,
    pub high_r: f64,
    pub push_lambda: f64,
    pub rows: Vec<PreferenceRow>,
}

impl PreferenceTable {
    pub fn row(&self, entity: Entity) -> &PreferenceRow {
        self.rows
            .iter()
            .find(|r| r.entity == entity)
            .expect("every entity has a row")
    }
}

/// Which push value stands in for the push model's payoff.
#[derive(Clone, Copy)]
enum PushPick {
    Selected,
    Worst,
    Best,
}

fn entity_value(entity: Entity, model: Model, row: &ComparisonRow, pick: PushPick) -> f64 {
    let push_bound = |worst: f64, best: f64, selected: f64| match pick {
        PushPick::Selected => selected,
        PushPick::Worst => worst,
        PushPick::Best => best,
    };
    match (entity, model) {
        (Entity::EndUsers | Entity::Advertisers, m) => row.demand.get(m),
        (Entity::Iotsp, m) => row.u_iotsp.get(m),
        (Entity::Wsp, Model::Push) => {
            push_bound(row.push_wsp_worst, row.push_wsp_best, row.u_wsp.push)
        }
        (Entity::Wsp, m) => row.u_wsp.get(m),
        (Entity::Csp, Model::Push) => {
            push_bound(row.push_csp_worst, row.push_csp_best, row.u_csp.push)
        }
        (Entity::Csp, m) => row.u_csp.get(m),
    }
}

fn preferred(entity: Entity, row: &ComparisonRow, pick: PushPick) -> Model {
    Model::ALL
        .into_iter()
        .max_by(|a, b| {
            entity_value(entity, *a, row, pick).total_cmp(&entity_value(entity, *b, row, pick))
        })
        .expect("three models")
}

/// Preferred model per entity at `low_r` (below every threshold) and `high_r`
/// (above every threshold).
pub fn table1(
    params: &MarketParams,
    low_r: f64,
    high_r: f64,
    push_lambda: f64,
) -> Result<PreferenceTable> {
    params.validate()?;
    crate::equilibrium::check_selector(push_lambda)?;
    let k = params.choke_price();
    let (lowest, highest) = (k / 3.0, 5.5 * k);
    if !(low_r >= 0.0 && low_r < lowest) {
        return Err(Error::Regime(format!(
            "low revenue {low_r} must lie in [0, {lowest})"
        )));
    }
    if !(high_r > highest && high_r.is_finite()) {
        return Err(Error::Regime(format!(
            "high revenue {high_r} must exceed {highest}"
        )));
    }
    let low = ComparisonRow::evaluate(params, low_r, push_lambda);
    let high = ComparisonRow::evaluate(params, high_r, push_lambda);
    let rows = Entity::ALL
        .into_iter()
        .map(|entity| {
            let mut high_candidates = vec![
                preferred(entity, &high, PushPick::Worst),
                preferred(entity, &high, PushPick::Best),
            ];
            high_candidates.sort();
            high_candidates.dedup();
            PreferenceRow {
                entity,
                low: preferred(entity, &low, PushPick::Selected),
                high: preferred(entity, &high, PushPick::Selected),
                high_candidates,
            }
        })
        .collect();
    Ok(PreferenceTable {
        low_r,
        high_r,
        push_lambda,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub push_lambda: f64,
    pub ba1_axis: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
    pub thresholds: CrossingPoints,
    pub violations: Vec<OrderingViolation>,
    pub table1: PreferenceTable,
}

/// Uniform samples on `[start, stop]` plus every threshold inside the range
/// and its neighbours at relative distance `1e-6`.
pub fn comparison_axis(
    params: &MarketParams,
    start: f64,
    stop: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) || start < 0.0 || start > stop {
        return Err(Error::InvalidRange(format!("[{start}, {stop}]")));
    }
    if samples < 2 {
        return Err(Error::InvalidRange(format!("samples = {samples} < 2")));
    }
    let mut axis: Vec<f64> = (0..samples)
        .map(|i| start + (stop - start) * i as f64 / (samples - 1) as f64)
        .collect();
    let k = params.choke_price();
    let thresholds = [
        k / 3.0,
        (2.0_f64.sqrt() - 1.0) * k,
        k,
        2.0 * k,
        5.0 * k,
        5.5 * k,
    ];
    for t in thresholds {
        let eps = 1e-6 * t.max(1.0);
        for r in [t - eps, t, t + eps] {
            if r >= start && r <= stop {
                axis.push(r);
            }
        }
    }
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    Ok(axis)
}

pub fn compare_models(
    params: &MarketParams,
    ba1_range: (f64, f64),
    samples: usize,
    push_lambda: f64,
) -> Result<ComparisonReport> {
    params.validate()?;
    crate::equilibrium::check_selector(push_lambda)?;
    let axis = comparison_axis(params, ba1_range.0, ba1_range.1, samples)?;
    let rows: Vec<ComparisonRow> = axis
        .iter()
        .map(|&r| ComparisonRow::evaluate(params, r, push_lambda))
        .collect();
    let violations = rows
        .iter()
        .flat_map(|row| check_orderings(params, row))
        .collect();
    let k = params.choke_price();
    Ok(ComparisonReport {
        push_lambda,
        ba1_axis: axis,
        rows,
        thresholds: crossing_points(params)?,
        violations,
        table1: table1(params, k / 6.0, 8.0 * k, push_lambda)?,
    })
}
