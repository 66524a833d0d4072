//! Market data model and the demand/payoff functions of the three
//! interaction models, evaluated at arbitrary price profiles.
//!
//! Everything downstream works with *effective payments*: the per-user amount
//! `w = p_w (alpha + a1)` collected by the WSP and `c = p_c (beta + a2)`
//! collected by the CSP. Unit prices are only recovered at the edges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, invalid, Error, Result};

/// Default slope of the affine cloud-overhead map `a2 = kappa * a1`.
pub const DEFAULT_KAPPA: f64 = 0.5;

/// Who bills whom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// WSP and CSP bill the IoTSP, the IoTSP bills end-users.
    Push,
    /// All three providers bill end-users simultaneously.
    Pull,
    /// CSP bills the IoTSP; IoTSP and WSP bill end-users.
    Hybrid,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Push, Model::Pull, Model::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Model::Push => "push",
            Model::Pull => "pull",
            Model::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "push" => Ok(Model::Push),
            "pull" => Ok(Model::Pull),
            "hybrid" => Ok(Model::Hybrid),
            other => Err(invalid("model", format!("unknown model `{other}`"))),
        }
    }
}

/// The three price-setting providers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Iotsp,
    Wsp,
    Csp,
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provider::Iotsp => "iotsp",
            Provider::Wsp => "wsp",
            Provider::Csp => "csp",
        })
    }
}

/// Additional cloud resource per user required to serve `a1` units of
/// advertisement volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CloudOverhead {
    /// `a2 = kappa * a1`, `kappa >= 0`.
    Affine { kappa: f64 },
}

impl Default for CloudOverhead {
    fn default() -> Self {
        CloudOverhead::Affine {
            kappa: DEFAULT_KAPPA,
        }
    }
}

impl CloudOverhead {
    pub fn eval(&self, a1: f64) -> f64 {
        match *self {
            CloudOverhead::Affine { kappa } => kappa * a1,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            CloudOverhead::Affine { kappa } => check_non_negative("a2_model.kappa", kappa),
        }
    }
}

/// Demand curve and per-user resource intensities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Price sensitivity of end-users.
    pub d: f64,
    /// Demand at zero end-user payment.
    pub d_max: f64,
    /// Per-user application traffic.
    pub alpha: f64,
    /// Per-user cloud capacity.
    pub beta: f64,
    #[serde(default)]
    pub a2_model: CloudOverhead,
}

impl MarketParams {
    /// Unit resource intensities (`alpha = beta = 1`) and the default
    /// overhead map.
    pub fn new(d: f64, d_max: f64) -> Result<Self> {
        let params = Self {
            d,
            d_max,
            alpha: 1.0,
            beta: 1.0,
            a2_model: CloudOverhead::default(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_intensities(mut self, alpha: f64, beta: f64) -> Result<Self> {
        self.alpha = alpha;
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_overhead(mut self, a2_model: CloudOverhead) -> Result<Self> {
        self.a2_model = a2_model;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("d", self.d)?;
        check_positive("d_max", self.d_max)?;
        check_non_negative("alpha", self.alpha)?;
        check_non_negative("beta", self.beta)?;
        self.a2_model.validate()
    }

    /// `D_max / d`: the end-user payment at which demand vanishes.
    pub fn choke_price(&self) -> f64 {
        self.d_max / self.d
    }

    pub fn cloud_overhead(&self, a1: f64) -> f64 {
        self.a2_model.eval(a1)
    }
}

/// Advertiser-side quantities seen by the providers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdState {
    b: f64,
    a1: f64,
    a2: f64,
    ad_rev: f64,
}

impl AdState {
    /// Builds the state for ad price `b` and volume `a1`; `a2` comes from the
    /// market's overhead map.
    pub fn new(b: f64, a1: f64, params: &MarketParams) -> Result<Self> {
        check_non_negative("b", b)?;
        check_non_negative("a1", a1)?;
        let a2 = params.cloud_overhead(a1);
        check_non_negative("a2", a2)?;
        Ok(Self {
            b,
            a1,
            a2,
            ad_rev: b * a1,
        })
    }

    /// State with ad revenue per user `revenue` carried by volume `a1`.
    /// With `a1 == 0` only zero revenue is representable.
    pub fn with_revenue(revenue: f64, a1: f64, params: &MarketParams) -> Result<Self> {
        check_non_negative("ad_rev", revenue)?;
        check_non_negative("a1", a1)?;
        if a1 == 0.0 {
            if revenue != 0.0 {
                return Err(invalid("a1", "positive ad revenue needs a1 > 0"));
            }
            return Self::new(0.0, 0.0, params);
        }
        Self::new(revenue / a1, a1, params)
    }

    /// Unit ad volume at price `revenue`, so that `b * a1 == revenue` exactly.
    pub fn from_revenue(revenue: f64, params: &MarketParams) -> Result<Self> {
        Self::with_revenue(revenue, 1.0, params)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// `R = b * a1`.
    pub fn ad_rev(&self) -> f64 {
        self.ad_rev
    }

    /// Checks that this state was built against `params`' overhead map.
    pub fn validate_for(&self, params: &MarketParams) -> Result<()> {
        let expected = params.cloud_overhead(self.a1);
        let scale = expected.abs().max(1.0);
        if (self.a2 - expected).abs() > 1e-12 * scale {
            return Err(invalid(
                "a2",
                format!("{} does not match a2_model(a1) = {expected}", self.a2),
            ));
        }
        Ok(())
    }

    fn traffic(&self, params: &MarketParams) -> f64 {
        params.alpha + self.a1
    }

    fn capacity(&self, params: &MarketParams) -> f64 {
        params.beta + self.a2
    }
}

/// Raw unit prices.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PriceProfile {
    pub p_i: f64,
    pub p_w: f64,
    pub p_c: f64,
}

impl PriceProfile {
    pub fn new(p_i: f64, p_w: f64, p_c: f64) -> Result<Self> {
        let profile = Self { p_i, p_w, p_c };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("p_i", self.p_i)?;
        check_non_negative("p_w", self.p_w)?;
        check_non_negative("p_c", self.p_c)
    }
}

/// Per-user payments to the WSP and CSP.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EffectivePayments {
    pub w: f64,
    pub c: f64,
}

/// IoTSP price together with the effective payments: the coordinates every
/// equilibrium is computed in.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EffectiveProfile {
    pub p_i: f64,
    pub w: f64,
    pub c: f64,
}

impl EffectiveProfile {
    pub fn new(p_i: f64, w: f64, c: f64) -> Self {
        Self { p_i, w, c }
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("p_i", self.p_i)?;
        check_non_negative("w", self.w)?;
        check_non_negative("c", self.c)
    }

    pub fn get(&self, provider: Provider) -> f64 {
        match provider {
            Provider::Iotsp => self.p_i,
            Provider::Wsp => self.w,
            Provider::Csp => self.c,
        }
    }

    pub fn with(mut self, provider: Provider, value: f64) -> Self {
        match provider {
            Provider::Iotsp => self.p_i = value,
            Provider::Wsp => self.w = value,
            Provider::Csp => self.c = value,
        }
        self
    }

    pub fn payments(&self) -> EffectivePayments {
        EffectivePayments {
            w: self.w,
            c: self.c,
        }
    }

    /// Divides out the per-user volumes. A zero volume leaves the
    /// corresponding unit price undefined.
    pub fn unit_prices(&self, params: &MarketParams, ad: &AdState) -> UnitPrices {
        let recover = |amount: f64, volume: f64| (volume > 0.0).then(|| amount / volume);
        UnitPrices {
            p_i: self.p_i,
            p_w: recover(self.w, ad.traffic(params)),
            p_c: recover(self.c, ad.capacity(params)),
        }
    }
}

/// Unit prices recovered from effective payments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPrices {
    pub p_i: f64,
    /// `None` when `alpha + a1 == 0`.
    pub p_w: Option<f64>,
    /// `None` when `beta + a2 == 0`.
    pub p_c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PayoffTriple {
    pub u_iotsp: f64,
    pub u_wsp: f64,
    pub u_csp: f64,
    pub demand: f64,
}

impl PayoffTriple {
    pub fn of(&self, provider: Provider) -> f64 {
        match provider {
            Provider::Iotsp => self.u_iotsp,
            Provider::Wsp => self.u_wsp,
            Provider::Csp => self.u_csp,
        }
    }
}

pub fn effective_payments(
    profile: &PriceProfile,
    params: &MarketParams,
    ad: &AdState,
) -> EffectivePayments {
    EffectivePayments {
        w: profile.p_w * ad.traffic(params),
        c: profile.p_c * ad.capacity(params),
    }
}

fn to_effective(
    profile: &PriceProfile,
    params: &MarketParams,
    ad: &AdState,
) -> Result<EffectiveProfile> {
    params.validate()?;
    profile.validate()?;
    ad.validate_for(params)?;
    let pay = effective_payments(profile, params, ad);
    Ok(EffectiveProfile::new(profile.p_i, pay.w, pay.c))
}

pub fn demand(
    model: Model,
    profile: &PriceProfile,
    params: &MarketParams,
    ad: &AdState,
) -> Result<f64> {
    let eff = to_effective(profile, params, ad)?;
    Ok(demand_effective(model, &eff, params))
}

pub fn payoffs(
    model: Model,
    profile: &PriceProfile,
    params: &MarketParams,
    ad: &AdState,
) -> Result<PayoffTriple> {
    let eff = to_effective(profile, params, ad)?;
    Ok(payoffs_effective(model, &eff, params, ad.ad_rev()))
}

/// Demand at an effective profile. Inputs are assumed valid.
pub fn demand_effective(model: Model, profile: &EffectiveProfile, params: &MarketParams) -> f64 {
    let end_user_payment = match model {
        Model::Push => profile.p_i,
        Model::Pull => profile.p_i + profile.w + profile.c,
        Model::Hybrid => profile.p_i + profile.w,
    };
    (params.d_max - params.d * end_user_payment).clamp(0.0, params.d_max)
}

/// Payoffs at an effective profile with ad revenue per user `ad_rev`.
/// Inputs are assumed valid; this is the oracle's inner loop.
pub fn payoffs_effective(
    model: Model,
    profile: &EffectiveProfile,
    params: &MarketParams,
    ad_rev: f64,
) -> PayoffTriple {
    let demand = demand_effective(model, profile, params);
    let u_iotsp = match model {
        Model::Push => {
            profile.p_i * demand + ad_rev * demand - profile.w * demand - profile.c * demand
        }
        Model::Pull => profile.p_i * demand + ad_rev * demand,
        Model::Hybrid => demand * (profile.p_i - profile.c + ad_rev),
    };
    PayoffTriple {
        u_iotsp,
        u_wsp: profile.w * demand,
        u_csp: profile.c * demand,
        demand,
    }
}
