//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use iot_pricing::admarket::{participation, revenue_table, AdvertiserPool};
use iot_pricing::compare::{crossing_points, table1, Entity};
use iot_pricing::equilibrium::approx_eq;
use iot_pricing::model::payoffs_effective;
use iot_pricing::oracle::{brute_force_equilibria, cluster_on_grid, verify_profile, GridSpec};
use iot_pricing::{optimal_b, solve, AdState, EquilibriumOutcome, MarketParams, Model};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fig_market() -> MarketParams {
    MarketParams::new(1.0, 15.0).unwrap()
}

fn outcome(model: Model, params: &MarketParams, r: f64, lambda: f64) -> EquilibriumOutcome {
    let ad = AdState::from_revenue(r, params).unwrap();
    solve(model, params, &ad, lambda).unwrap()
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> std::result::Result<(), String> {
    ensure(elapsed < limit, || {
        format!("{what} took {elapsed:?}, limit {limit:?}")
    })
}

fn push_sweep_shape() -> Check {
    let m = fig_market();
    let start = Instant::now();
    let rows: Vec<(f64, EquilibriumOutcome)> = (0..=1500)
        .map(|i| {
            let r = i as f64 * 0.1;
            (r, outcome(Model::Push, &m, r, 0.5))
        })
        .collect();
    let elapsed = start.elapsed();
    let mut checked = 0;
    for (r, out) in &rows {
        if *r < 75.0 {
            continue;
        }
        checked += 1;
        let u = &out.payoffs;
        ensure(approx_eq(u.u_iotsp, 225.0, 1e-9), || {
            format!("u_iotsp({r}) = {}", u.u_iotsp)
        })?;
        let leaders = u.u_wsp + u.u_csp;
        ensure(approx_eq(leaders, 15.0 * r - 225.0, 1e-9), || {
            format!("u_wsp+u_csp({r}) = {leaders}")
        })?;
    }
    within(elapsed, Duration::from_secs(1), "sweep")?;
    Ok(format!(
        "{} points, {checked} past the saturation point, {elapsed:?}",
        rows.len()
    ))
}

fn pull_and_hybrid_shapes() -> Check {
    let m = fig_market();
    for i in 0..=1500 {
        let r = i as f64 * 0.1;
        let pull = outcome(Model::Pull, &m, r, 0.5).payoffs;
        if r <= 5.0 {
            ensure(approx_eq(pull.u_iotsp, pull.u_wsp, 1e-12), || {
                format!("pull r={r}: {pull:?}")
            })?;
        } else {
            ensure(pull.u_iotsp > pull.u_wsp, || {
                format!("pull r={r}: {pull:?}")
            })?;
        }
        let hybrid = outcome(Model::Hybrid, &m, r, 0.5).payoffs;
        ensure(approx_eq(hybrid.u_iotsp, hybrid.u_wsp, 1e-12), || {
            format!("hybrid r={r}: {hybrid:?}")
        })?;
        if r >= 30.0 {
            ensure(approx_eq(hybrid.u_iotsp, 56.25, 1e-12), || {
                format!("hybrid r={r}: {hybrid:?}")
            })?;
        }
    }
    Ok("1501 points per model".into())
}

fn oracle_agreement() -> Check {
    let mut rng = StdRng::seed_from_u64(0x0107_5eed);
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for case in 0..200 {
        let d = rng.random_range(0.1..=10.0);
        let d_max = rng.random_range(1.0..=100.0);
        let m = MarketParams::new(d, d_max).unwrap();
        let r = rng.random_range(0.0..=10.0 * d_max / d);
        let lambda = rng.random_range(0.0..=1.0);
        let ad = AdState::from_revenue(r, &m).unwrap();
        let grid = GridSpec::default_for(&m, r);
        for model in Model::ALL {
            let eq = solve(model, &m, &ad, lambda).unwrap();
            let rep = verify_profile(model, &eq.prices, &m, &ad, &grid, 1e-6).unwrap();
            worst = worst.max(rep.max_gain);
            ensure(rep.passed, || {
                format!("case {case} {model} d={d} D_max={d_max} R={r} lambda={lambda}: {rep:?}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60), "oracle run")?;
    Ok(format!(
        "600 equilibria, max relative gain {worst:.2e}, {elapsed:?}"
    ))
}

fn brute_force_structure() -> Check {
    let m = fig_market();
    let start = Instant::now();
    let single = |model: Model, r: f64, hi: f64, steps: usize| -> std::result::Result<(), String> {
        let ad = AdState::from_revenue(r, &m).unwrap();
        let grid = GridSpec::new(0.0, hi, steps, 0).unwrap();
        let found = brute_force_equilibria(model, &m, &ad, &grid, 1e-9).unwrap();
        let clusters = cluster_on_grid(&found, &grid);
        ensure(clusters.len() == 1, || {
            format!("{model} R={r}: {} clusters", clusters.len())
        })?;
        let eq = outcome(model, &m, r, 0.5).prices;
        let reach = 2.0 * grid.spacing() + 1e-9;
        ensure(
            clusters[0].iter().any(|p| {
                (p.p_i - eq.p_i).abs() <= reach
                    && (p.w - eq.w).abs() <= reach
                    && (p.c - eq.c).abs() <= reach
            }),
            || format!("{model} R={r}: cluster misses {eq:?}"),
        )
    };
    single(Model::Pull, 3.0, 30.0, 101)?;
    single(Model::Hybrid, 3.0, 30.0, 101)?;
    single(Model::Push, 3.0, 30.0, 201)?;
    single(Model::Push, 60.0, 80.0, 201)?;

    let r = 90.0;
    let ad = AdState::from_revenue(r, &m).unwrap();
    let grid = GridSpec::new(0.0, 100.0, 201, 0).unwrap();
    let found = brute_force_equilibria(Model::Push, &m, &ad, &grid, 1e-9).unwrap();
    let clusters = cluster_on_grid(&found, &grid);
    ensure(clusters.len() == 1, || {
        format!("push R=90: {} clusters", clusters.len())
    })?;
    let h = grid.spacing();
    let (lo, hi) = (30.0, 45.0);
    for p in &found {
        ensure((p.w + p.c - 75.0).abs() <= 2.0 * h, || {
            format!("off the line: {p:?}")
        })?;
        ensure(p.w >= lo - 2.0 * h && p.w <= hi + 2.0 * h, || {
            format!("w outside: {p:?}")
        })?;
    }
    let c_min = found.iter().map(|p| p.c).fold(f64::INFINITY, f64::min);
    let c_max = found.iter().map(|p| p.c).fold(f64::NEG_INFINITY, f64::max);
    ensure(c_min <= lo + 2.0 * h && c_max >= hi - 2.0 * h, || {
        format!("span [{c_min}, {c_max}]")
    })?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30), "brute force")?;
    Ok(format!(
        "single clusters for pull/hybrid/push-low; push R=90 spans c in [{c_min}, {c_max}] with {} points, {elapsed:?}",
        found.len()
    ))
}

fn boundary_continuity() -> Check {
    let mut checked = 0;
    for (d, d_max) in [(1.0, 15.0), (0.3, 42.0), (4.0, 7.5)] {
        let m = MarketParams::new(d, d_max).unwrap();
        let k = d_max / d;
        for t in [k / 3.0, 2.0 * k, 5.0 * k] {
            let eps = 1e-13 * t;
            for model in Model::ALL {
                let below = outcome(model, &m, t - eps, 0.5);
                let above = outcome(model, &m, t + eps, 0.5);
                let pairs = [
                    ("demand", below.payoffs.demand, above.payoffs.demand),
                    ("p_i", below.prices.p_i, above.prices.p_i),
                    ("u_iotsp", below.payoffs.u_iotsp, above.payoffs.u_iotsp),
                    ("wsp_worst", below.bounds.wsp_worst, above.bounds.wsp_worst),
                    ("wsp_best", below.bounds.wsp_best, above.bounds.wsp_best),
                    ("csp_worst", below.bounds.csp_worst, above.bounds.csp_worst),
                    ("csp_best", below.bounds.csp_best, above.bounds.csp_best),
                ];
                for (name, a, b) in pairs {
                    ensure(approx_eq(a, b, 1e-10), || {
                        format!("{model} {name} jumps at R={t} (d={d}, D_max={d_max}): {a} vs {b}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} two-sided comparisons"))
}

fn crossing_thresholds() -> Check {
    let m = fig_market();
    let cp = crossing_points(&m).unwrap();
    let k = m.choke_price();
    let expected = [
        k / 3.0,
        (2.0_f64.sqrt() - 1.0) * k,
        k,
        2.0 * k,
        5.0 * k,
        5.5 * k,
    ];
    ensure(cp.entries.len() == expected.len(), || format!("{cp:?}"))?;
    for (c, want) in cp.entries.iter().zip(expected) {
        ensure(approx_eq(c.value, want, 1e-12), || {
            format!("{} = {}, want {want}", c.name, c.value)
        })?;
        ensure(c.confirmed(), || {
            format!("{} not bracketed: {:?}", c.name, c.bracket)
        })?;
    }

    // Payoffs at the crossings, recomputed from prices through the payoff
    // function rather than read from the closed forms.
    let x0 = expected[1];
    let direct = |model: Model, r: f64, lambda: f64| {
        let out = outcome(model, &m, r, lambda);
        payoffs_effective(model, &out.prices, &m, r)
    };
    let wsp_push = direct(Model::Push, x0, 0.5).u_wsp;
    let wsp_pull = direct(Model::Pull, x0, 0.5).u_wsp;
    ensure(
        approx_eq(wsp_push, 25.0, 1e-9) && approx_eq(wsp_pull, 25.0, 1e-9),
        || format!("WSP at {x0}: push {wsp_push}, pull {wsp_pull}"),
    )?;
    let csp_push_best = direct(Model::Push, 82.5, 1.0).u_csp;
    let csp_hybrid = direct(Model::Hybrid, 82.5, 0.5).u_csp;
    ensure(
        approx_eq(csp_push_best, 562.5, 1e-9) && approx_eq(csp_hybrid, 562.5, 1e-9),
        || format!("CSP at 82.5: push best {csp_push_best}, hybrid {csp_hybrid}"),
    )?;
    Ok(format!(
        "{:?}; WSP crossing 25, CSP crossing 562.5",
        cp.values()
    ))
}

fn preference_table() -> Check {
    let m = fig_market();
    let t = table1(&m, 1.0, 120.0, 0.5).unwrap();
    let expected = [
        (Entity::EndUsers, Model::Pull, Model::Push),
        (Entity::Iotsp, Model::Pull, Model::Pull),
        (Entity::Wsp, Model::Pull, Model::Push),
        (Entity::Advertisers, Model::Pull, Model::Push),
    ];
    for (entity, low, high) in expected {
        let row = t.row(entity);
        ensure(row.low == low && row.high == high, || format!("{row:?}"))?;
    }
    let csp = t.row(Entity::Csp);
    ensure(csp.low == Model::Hybrid, || format!("{csp:?}"))?;
    ensure(
        csp.high_candidates == vec![Model::Push, Model::Hybrid],
        || format!("{csp:?}"),
    )?;
    let at = |lambda: f64| {
        table1(&m, 1.0, 120.0, lambda)
            .unwrap()
            .row(Entity::Csp)
            .high
    };
    ensure(at(0.0) == Model::Hybrid, || "CSP high at lambda=0".into())?;
    ensure(at(1.0) == Model::Push, || "CSP high at lambda=1".into())?;
    Ok("all entries match; CSP high-R: hybrid at lambda=0, push at lambda=1".into())
}

fn advertiser_stage() -> Check {
    let m = fig_market();
    let valuations: Vec<f64> = (1..=10).map(f64::from).collect();
    let pool = AdvertiserPool::discrete(valuations.clone(), 10.0, 11.0).unwrap();

    // Exhaustive: every breakpoint, IoTSP payoff at its induced revenue.
    let mut breakpoints = valuations.clone();
    breakpoints.extend([0.0, 11.0]);
    for model in Model::ALL {
        let sel = optimal_b(model, &pool, &m).unwrap();
        ensure(sel.maximizers == vec![5.0, 6.0], || {
            format!("{model}: {sel:?}")
        })?;
        ensure(sel.achieved_ad_rev == 30.0, || format!("{model}: {sel:?}"))?;

        let scored: Vec<(f64, f64)> = breakpoints
            .iter()
            .map(|&b| {
                let a1 = participation(b, &pool).unwrap();
                let ad = AdState::new(b, a1, &m).unwrap();
                (b, solve(model, &m, &ad, 0.5).unwrap().payoffs.u_iotsp)
            })
            .collect();
        let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let mut argmax: Vec<f64> = scored
            .iter()
            .filter(|s| approx_eq(s.1, best, 1e-12))
            .map(|s| s.0)
            .collect();
        argmax.sort_by(f64::total_cmp);
        ensure(argmax == vec![5.0, 6.0], || {
            format!("{model}: enumeration gives {argmax:?}")
        })?;
    }
    let revenue = revenue_table(&pool, &breakpoints);
    let top = revenue.iter().map(|p| p.ad_rev).fold(0.0, f64::max);
    ensure(top == 30.0, || format!("max revenue {top}"))?;
    Ok("b in {5, 6}, R = 30 in push, pull and hybrid".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "push sweep: flat IoTSP payoff, linear leader payoff",
            push_sweep_shape,
        ),
        ("pull and hybrid payoff equalities", pull_and_hybrid_shapes),
        (
            "closed forms agree with the deviation oracle",
            oracle_agreement,
        ),
        (
            "brute-force uniqueness and push continuum",
            brute_force_structure,
        ),
        ("continuity across regime boundaries", boundary_continuity),
        ("crossing thresholds", crossing_thresholds),
        ("preferred model per entity", preference_table),
        ("advertiser stage optimal ad price", advertiser_stage),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
