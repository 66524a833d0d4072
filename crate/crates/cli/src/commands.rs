use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use iot_pricing::admarket::{
    candidate_prices, participation, revenue_table, RevenuePoint, DEFAULT_PRICE_GRID,
};
use iot_pricing::oracle::{verify_profile, GridSpec};
use iot_pricing::{
    compare_models, optimal_b as select_b, solve, AdState, AdvertiserPool, BSelection,
    EquilibriumOutcome, MarketParams, Model, Provider, VerificationReport,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, Format, Loaded, ScenarioConfig, SweepSpec, SweepVar};
use crate::figures::Figure;
use crate::output::{self, csv_number, SweepRow};
use crate::{CliError, Common};

/// Sweep used by `sweep` and `compare` when none is configured.
fn default_sweep() -> SweepSpec {
    SweepSpec::ba1(0.0, 150.0, 1.0)
}

/// Twenty points for `verify` when none is configured.
fn default_verify_sweep() -> SweepSpec {
    SweepSpec::ba1(0.0, 142.5, 7.5)
}

struct Resolved {
    loaded: Loaded,
    params: MarketParams,
    sweep: SweepSpec,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Resolved {
    fn config(&self) -> &ScenarioConfig {
        &self.loaded.config
    }

    fn hash<T: Serialize>(&self, command: &str, extra: &T) -> String {
        output::config_hash(&(command, self.config(), &self.sweep, extra))
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        match &self.out {
            Some(path) => {
                let f = File::create(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Ok(Box::new(BufWriter::new(f)))
            }
            None => Ok(Box::new(BufWriter::new(std::io::stdout().lock()))),
        }
    }
}

fn parse_models(text: &str) -> Result<Vec<Model>, CliError> {
    if text == "all" {
        return Ok(Model::ALL.to_vec());
    }
    text.split(',')
        .map(|m| {
            m.trim()
                .parse::<Model>()
                .map_err(|e| CliError::config("--model", e))
        })
        .collect()
}

fn resolve(common: &Common, fallback: SweepSpec) -> Result<Resolved, CliError> {
    let mut loaded = config::load(common.config.as_deref())?;
    let cfg = &mut loaded.config;
    if let Some(m) = &common.model {
        cfg.models = parse_models(m)?;
    }
    if cfg.models.is_empty() {
        return Err(CliError::Config("models: empty".into()));
    }
    cfg.models.sort();
    cfg.models.dedup();
    if let Some(l) = common.lambda {
        cfg.push_lambda = l;
    }
    if !(0.0..=1.0).contains(&cfg.push_lambda) {
        return Err(CliError::Config(format!(
            "push_lambda = {} outside [0, 1]",
            cfg.push_lambda
        )));
    }
    if let Some(a1) = cfg.ad.a1 {
        if !(a1.is_finite() && a1 > 0.0) {
            return Err(CliError::Config(format!("ad.a1 = {a1} must be positive")));
        }
    }
    let sweep = match (&common.sweep, &cfg.sweep, cfg.ad.b) {
        (Some(text), _, _) => SweepSpec::parse(text)?,
        (None, Some(s), _) => s.clone(),
        (None, None, Some(b)) => SweepSpec {
            var: SweepVar::B,
            start: b,
            stop: b,
            step: 1.0,
        },
        (None, None, None) => fallback,
    };
    sweep.validate()?;
    let params = cfg.market.params()?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(|p| loaded.base_dir.join(p)));
    let format = common.format.or(cfg.output.format);
    Ok(Resolved {
        params,
        sweep,
        out,
        format,
        loaded,
    })
}

/// Ad state at one sweep value.
fn ad_at(res: &Resolved, pool: Option<&AdvertiserPool>, x: f64) -> Result<AdState, CliError> {
    let a1_cfg = res.config().ad.a1.unwrap_or(1.0);
    let state = match res.sweep.var {
        SweepVar::Ba1 => AdState::with_revenue(x, a1_cfg, &res.params),
        SweepVar::B => {
            let a1 = match pool {
                Some(p) => participation(x, p).map_err(|e| CliError::config("sweep", e))?,
                None => a1_cfg,
            };
            AdState::new(x, a1, &res.params)
        }
    };
    state.map_err(|e| CliError::config("ad", e))
}

fn outcomes(res: &Resolved) -> Result<Vec<(EquilibriumOutcome, AdState)>, CliError> {
    let pool = match res.sweep.var {
        SweepVar::B => res.loaded.pool(None)?,
        SweepVar::Ba1 => None,
    };
    let states: Vec<AdState> = res
        .sweep
        .points()
        .into_iter()
        .map(|x| ad_at(res, pool.as_ref(), x))
        .collect::<Result<_, _>>()?;
    let lambda = res.config().push_lambda;
    let mut rows = Vec::new();
    for &model in &res.config().models {
        // Points ascend in the sweep variable, so rows are already ordered.
        let per_model: Vec<(EquilibriumOutcome, AdState)> = states
            .par_iter()
            .map(|ad| {
                solve(model, &res.params, ad, lambda)
                    .map(|o| (o, *ad))
                    .map_err(|e| CliError::config("scenario", e))
            })
            .collect::<Result<_, _>>()?;
        rows.extend(per_model);
    }
    Ok(rows)
}

pub fn sweep(common: &Common, figure: Option<Figure>) -> Result<(), CliError> {
    let res = resolve(common, default_sweep())?;
    if let Some(fig) = figure {
        if res.sweep.var != SweepVar::Ba1 {
            return Err(CliError::Config("figure presets sweep ba1".into()));
        }
        let data = fig.data(&res.sweep.points(), res.config().push_lambda);
        let hash = res.hash("figure", &fig.name());
        let mut out = res.sink()?;
        return match res.format_or(Format::Csv) {
            Format::Csv => output::write_csv(&mut out, &hash, &data.columns(), data.records()),
            Format::Json => output::write_json(&mut out, &data),
        };
    }
    let rows: Vec<SweepRow> = outcomes(&res)?
        .iter()
        .map(|(o, _)| SweepRow::from(o))
        .collect();
    let hash = res.hash("sweep", &());
    let mut out = res.sink()?;
    match res.format_or(Format::Csv) {
        Format::Csv => output::write_sweep_csv(&mut out, &hash, &rows),
        Format::Json => output::write_json(&mut out, &rows),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Perturbation {
    provider: Provider,
    delta: f64,
}

fn parse_perturb(text: &str) -> Result<Perturbation, CliError> {
    let bad = || {
        CliError::Config(format!(
            "--perturb: expected VAR:+DELTA with VAR in p_i, w, c; got {text:?}"
        ))
    };
    let (var, delta) = text.split_once(':').ok_or_else(bad)?;
    let provider = match var {
        "p_i" => Provider::Iotsp,
        "w" => Provider::Wsp,
        "c" => Provider::Csp,
        _ => return Err(bad()),
    };
    let delta: f64 = delta.parse().map_err(|_| bad())?;
    if !delta.is_finite() {
        return Err(bad());
    }
    Ok(Perturbation { provider, delta })
}

#[derive(Debug, Serialize)]
struct PointCheck {
    model: Model,
    ba1: f64,
    passed: bool,
    max_gain: f64,
    max_abs_gain: f64,
    worst_deviator: Option<Provider>,
    worst_deviation: Option<f64>,
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    tolerance: f64,
    grid_steps: usize,
    perturb: Option<Perturbation>,
    passed: bool,
    failures: usize,
    points: Vec<PointCheck>,
}

pub fn verify(
    common: &Common,
    grid_steps: usize,
    tol: f64,
    perturb: Option<&str>,
) -> Result<(), CliError> {
    let res = resolve(common, default_verify_sweep())?;
    if grid_steps < 2 {
        return Err(CliError::Config(format!("--grid {grid_steps} < 2")));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Config(format!(
            "--tol {tol} must be finite and non-negative"
        )));
    }
    let perturb = perturb.map(parse_perturb).transpose()?;
    let cases = outcomes(&res)?;
    let points: Vec<PointCheck> = cases
        .par_iter()
        .map(|(o, ad)| {
            let mut prices = o.prices;
            if let Some(p) = perturb {
                prices = prices.with(p.provider, (prices.get(p.provider) + p.delta).max(0.0));
            }
            let grid = GridSpec::covering(&res.params, o.ad_rev, grid_steps);
            let rep: VerificationReport =
                verify_profile(o.model, &prices, &res.params, ad, &grid, tol)
                    .map_err(|e| CliError::config("verify", e))?;
            Ok(PointCheck {
                model: o.model,
                ba1: o.ad_rev,
                passed: rep.passed,
                max_gain: rep.max_gain,
                max_abs_gain: rep.max_abs_gain,
                worst_deviator: rep.worst_deviator,
                worst_deviation: rep.worst_deviation,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let failures = points.iter().filter(|p| !p.passed).count();
    let summary = VerifySummary {
        tool: "iot-pricing",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: res.hash("verify", &(grid_steps, tol, perturb)),
        tolerance: tol,
        grid_steps,
        perturb,
        passed: failures == 0,
        failures,
        points,
    };
    let mut out = res.sink()?;
    output::write_json(&mut out, &summary)?;
    drop(out);
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{failures} of {} points failed verification",
            summary.points.len()
        )))
    }
}

const COMPARE_COLUMNS: [&str; 17] = [
    "ba1",
    "demand_push",
    "demand_pull",
    "demand_hybrid",
    "u_iotsp_push",
    "u_iotsp_pull",
    "u_iotsp_hybrid",
    "u_wsp_push",
    "u_wsp_pull",
    "u_wsp_hybrid",
    "u_csp_push",
    "u_csp_pull",
    "u_csp_hybrid",
    "u_wsp_push_worst",
    "u_wsp_push_best",
    "u_csp_push_worst",
    "u_csp_push_best",
];

pub fn compare(common: &Common) -> Result<(), CliError> {
    let res = resolve(common, default_sweep())?;
    if res.sweep.var != SweepVar::Ba1 {
        return Err(CliError::Config("compare sweeps ba1".into()));
    }
    let samples = res.sweep.points().len().max(2);
    let report = compare_models(
        &res.params,
        (res.sweep.start, res.sweep.stop),
        samples,
        res.config().push_lambda,
    )
    .map_err(|e| CliError::config("compare", e))?;
    let hash = res.hash("compare", &());
    let mut out = res.sink()?;
    match res.format_or(Format::Json) {
        Format::Json => output::write_json(&mut out, &report)?,
        Format::Csv => {
            let records = report.rows.iter().map(|r| {
                [
                    r.ba1,
                    r.demand.push,
                    r.demand.pull,
                    r.demand.hybrid,
                    r.u_iotsp.push,
                    r.u_iotsp.pull,
                    r.u_iotsp.hybrid,
                    r.u_wsp.push,
                    r.u_wsp.pull,
                    r.u_wsp.hybrid,
                    r.u_csp.push,
                    r.u_csp.pull,
                    r.u_csp.hybrid,
                    r.push_wsp_worst,
                    r.push_wsp_best,
                    r.push_csp_worst,
                    r.push_csp_best,
                ]
                .into_iter()
                .map(csv_number)
                .collect()
            });
            output::write_csv(&mut out, &hash, &COMPARE_COLUMNS, records)?;
        }
    }
    drop(out);
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} ordering violations",
            report.violations.len()
        )))
    }
}

#[derive(Debug, Serialize)]
struct OptimalBReport {
    selections: Vec<BSelection>,
    revenue: Vec<RevenuePoint>,
}

pub fn optimal_b(common: &Common, pool_path: Option<&Path>) -> Result<(), CliError> {
    let res = resolve(common, default_sweep())?;
    let pool = res
        .loaded
        .pool(pool_path)?
        .ok_or_else(|| CliError::Config("optimal-b needs --pool or ad.pool".into()))?;
    let selections: Vec<BSelection> = res
        .config()
        .models
        .iter()
        .map(|&m| select_b(m, &pool, &res.params).map_err(|e| CliError::config("pool", e)))
        .collect::<Result<_, _>>()?;
    let revenue = revenue_table(&pool, &candidate_prices(&pool, DEFAULT_PRICE_GRID));
    let hash = res.hash("optimal-b", &pool);
    let mut out = res.sink()?;
    match res.format_or(Format::Json) {
        Format::Json => output::write_json(
            &mut out,
            &OptimalBReport {
                selections,
                revenue,
            },
        ),
        Format::Csv => {
            let records = selections.iter().flat_map(|s| {
                s.maximizers.iter().map(move |&b| {
                    vec![
                        s.model.to_string(),
                        csv_number(b),
                        csv_number(s.achieved_ad_rev),
                        csv_number(s.payoff_at_max),
                    ]
                })
            });
            output::write_csv(
                &mut out,
                &hash,
                &["model", "b", "achieved_ad_rev", "u_iotsp"],
                records,
            )
        }
    }
}
