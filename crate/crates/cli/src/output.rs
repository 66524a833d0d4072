use std::io::Write;

use iot_pricing::{EquilibriumOutcome, Model};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SWEEP_COLUMNS: [&str; 17] = [
    "model",
    "ba1",
    "regime",
    "unique",
    "p_i",
    "w_eff",
    "c_eff",
    "p_w_unit",
    "p_c_unit",
    "demand",
    "u_iotsp",
    "u_wsp",
    "u_csp",
    "u_wsp_worst",
    "u_wsp_best",
    "u_csp_worst",
    "u_csp_best",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub model: Model,
    pub ba1: f64,
    pub regime: &'static str,
    pub unique: bool,
    pub p_i: f64,
    pub w_eff: f64,
    pub c_eff: f64,
    pub p_w_unit: Option<f64>,
    pub p_c_unit: Option<f64>,
    pub demand: f64,
    pub u_iotsp: f64,
    pub u_wsp: f64,
    pub u_csp: f64,
    pub u_wsp_worst: f64,
    pub u_wsp_best: f64,
    pub u_csp_worst: f64,
    pub u_csp_best: f64,
}

impl From<&EquilibriumOutcome> for SweepRow {
    fn from(o: &EquilibriumOutcome) -> Self {
        Self {
            model: o.model,
            ba1: o.ad_rev,
            regime: o.regime.name(),
            unique: o.unique,
            p_i: o.prices.p_i,
            w_eff: o.prices.w,
            c_eff: o.prices.c,
            p_w_unit: o.unit_prices.p_w,
            p_c_unit: o.unit_prices.p_c,
            demand: o.payoffs.demand,
            u_iotsp: o.payoffs.u_iotsp,
            u_wsp: o.payoffs.u_wsp,
            u_csp: o.payoffs.u_csp,
            u_wsp_worst: o.bounds.wsp_worst,
            u_wsp_best: o.bounds.wsp_best,
            u_csp_worst: o.bounds.csp_worst,
            u_csp_best: o.bounds.csp_best,
        }
    }
}

impl SweepRow {
    fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(csv_number).unwrap_or_default();
        vec![
            self.model.to_string(),
            csv_number(self.ba1),
            self.regime.to_string(),
            self.unique.to_string(),
            csv_number(self.p_i),
            csv_number(self.w_eff),
            csv_number(self.c_eff),
            opt(self.p_w_unit),
            opt(self.p_c_unit),
            csv_number(self.demand),
            csv_number(self.u_iotsp),
            csv_number(self.u_wsp),
            csv_number(self.u_csp),
            csv_number(self.u_wsp_worst),
            csv_number(self.u_wsp_best),
            csv_number(self.u_csp_worst),
            csv_number(self.u_csp_best),
        ]
    }
}

/// Ten significant digits, shortest form; exponent notation outside
/// `[1e-5, 1e15)`.
pub fn csv_number(x: f64) -> String {
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

pub fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn header_comment(hash: &str) -> String {
    format!(
        "# iot-pricing {} config_hash={hash}\n",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn write_csv<W: Write>(
    out: &mut W,
    hash: &str,
    columns: &[&str],
    records: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    out.write_all(header_comment(hash).as_bytes())
        .map_err(CliError::io)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).map_err(CliError::csv)?;
    for r in records {
        w.write_record(&r).map_err(CliError::csv)?;
    }
    w.flush().map_err(CliError::io)
}

pub fn write_sweep_csv<W: Write>(
    out: &mut W,
    hash: &str,
    rows: &[SweepRow],
) -> Result<(), CliError> {
    write_csv(out, hash, &SWEEP_COLUMNS, rows.iter().map(SweepRow::record))
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| match e.io_error_kind() {
        Some(kind) => CliError::io(kind.into()),
        None => CliError::Io(e.to_string()),
    })?;
    out.write_all(b"\n").map_err(CliError::io)
}

/// Named series over a shared `ba1` axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub figure: String,
    pub ba1: Vec<f64>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

impl FigureData {
    pub fn columns(&self) -> Vec<&str> {
        std::iter::once("ba1")
            .chain(self.series.iter().map(|s| s.name.as_str()))
            .collect()
    }

    pub fn records(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.ba1.iter().enumerate().map(|(i, &x)| {
            std::iter::once(csv_number(x))
                .chain(self.series.iter().map(|s| csv_number(s.values[i])))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_have_ten_significant_digits() {
        assert_eq!(csv_number(225.0), "225");
        assert_eq!(csv_number(14.0625), "14.0625");
        assert_eq!(csv_number(1.0 / 3.0), "0.3333333333");
        assert_eq!(csv_number(6.213203435596427), "6.213203436");
        assert_eq!(csv_number(-1e-300), "-1e-300");
        assert_eq!(csv_number(0.0), "0");
        assert_eq!(csv_number(-0.0), "0");
        assert_eq!(csv_number(2.5e20), "2.5e20");
        assert_eq!(csv_number(1.23456789012e-7), "1.23456789e-7");
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&("x", 1.0));
        assert_eq!(a, config_hash(&("x", 1.0)));
        assert_ne!(a, config_hash(&("x", 2.0)));
        assert_eq!(a.len(), 64);
    }
}
