use iot_pricing::compare::ComparisonRow;
use iot_pricing::MarketParams;

use crate::output::{FigureData, Series};

/// Figure presets; each pins `d = 1`, `D_max = 15`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Push: IoTSP payoff and the WSP + CSP payoff sum.
    Fig2,
    /// Pull payoffs.
    Fig3,
    /// Hybrid payoffs.
    Fig4,
    /// End-user demand in all three models.
    #[value(alias = "demand-compare")]
    Fig5,
    /// IoTSP payoff in all three models.
    Fig6,
    /// WSP payoff, push worst and best.
    Fig7,
    /// CSP payoff, push worst and best.
    Fig8,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
        }
    }

    pub fn params() -> MarketParams {
        MarketParams::new(1.0, 15.0).expect("preset market is valid")
    }

    pub fn series_names(self) -> &'static [&'static str] {
        match self {
            Figure::Fig2 => &["u_iotsp_push", "u_wsp_plus_u_csp_push"],
            Figure::Fig3 => &["u_iotsp_pull", "u_wsp_pull", "u_csp_pull"],
            Figure::Fig4 => &["u_iotsp_hybrid", "u_wsp_hybrid", "u_csp_hybrid"],
            Figure::Fig5 => &["demand_push", "demand_pull", "demand_hybrid"],
            Figure::Fig6 => &["u_iotsp_push", "u_iotsp_pull", "u_iotsp_hybrid"],
            Figure::Fig7 => &[
                "u_wsp_push_worst",
                "u_wsp_push_best",
                "u_wsp_pull",
                "u_wsp_hybrid",
            ],
            Figure::Fig8 => &[
                "u_csp_push_worst",
                "u_csp_push_best",
                "u_csp_pull",
                "u_csp_hybrid",
            ],
        }
    }

    fn values(self, r: &ComparisonRow) -> Vec<f64> {
        match self {
            Figure::Fig2 => vec![r.u_iotsp.push, r.u_wsp.push + r.u_csp.push],
            Figure::Fig3 => vec![r.u_iotsp.pull, r.u_wsp.pull, r.u_csp.pull],
            Figure::Fig4 => vec![r.u_iotsp.hybrid, r.u_wsp.hybrid, r.u_csp.hybrid],
            Figure::Fig5 => vec![r.demand.push, r.demand.pull, r.demand.hybrid],
            Figure::Fig6 => vec![r.u_iotsp.push, r.u_iotsp.pull, r.u_iotsp.hybrid],
            Figure::Fig7 => vec![
                r.push_wsp_worst,
                r.push_wsp_best,
                r.u_wsp.pull,
                r.u_wsp.hybrid,
            ],
            Figure::Fig8 => vec![
                r.push_csp_worst,
                r.push_csp_best,
                r.u_csp.pull,
                r.u_csp.hybrid,
            ],
        }
    }

    pub fn data(self, axis: &[f64], push_lambda: f64) -> FigureData {
        let params = Self::params();
        let names = self.series_names();
        let mut series: Vec<Series> = names
            .iter()
            .map(|n| Series {
                name: (*n).to_string(),
                values: Vec::with_capacity(axis.len()),
            })
            .collect();
        for &x in axis {
            let row = ComparisonRow::evaluate(&params, x, push_lambda);
            for (s, v) in series.iter_mut().zip(self.values(&row)) {
                s.values.push(v);
            }
        }
        FigureData {
            figure: self.name().to_string(),
            ba1: axis.to_vec(),
            series,
        }
    }
}
