use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jump rates of the exclusion process.
///
/// Particles jump right at rate `p` and left at rate `q = 1 - p`, with
/// `0 < p < q`. The drift `gamma = q - p` and asymmetry `tau = p / q` are
/// always derived from `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    p: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.p)
    }
}

impl From<ModelParams> for RawParams {
    fn from(m: ModelParams) -> Self {
        RawParams { p: m.p }
    }
}

impl ModelParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0 && p < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "right-jump rate p must satisfy 0 < p < 1/2, got {p}"
            )));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.q() - self.p
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.p / self.q()
    }
}
