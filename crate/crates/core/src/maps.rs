//! Odd sign-preserving nonlinearities applied on nodes and links.
//!
//! Every map `g` here satisfies `g(-z) = -g(z)` and `g(0) = 0`; all except
//! the uniform quantizer are strongly sign-preserving (`g(z) z > 0` for
//! `z != 0`). Sector bounds `kappa <= g(z)/z <= K` certify a map for the
//! convergence analysis; [`NonlinearMap::sector_bounds`] returns tight
//! analytic constants where a closed form exists and falls back to a numeric
//! scan otherwise.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("invalid map parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sector domain bound must be positive, got {0}")]
    BadDomainBound(f64),

    #[error("map is not strongly sign-preserving at z = {z} (g(z) = {gz})")]
    SignViolation { z: f64, gz: f64 },
}

/// Scalar nonlinearity for node updates (`g_n`) or link messages (`g_l`).
#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearMap {
    Identity,
    /// `z + z^3`.
    CubicPlusLinear,
    /// `sgn(z) (|z|^v1 + |z|^v2)` with `0 < v1 < 1 < v2`.
    SignumPower { v1: f64, v2: f64 },
    /// `sgn(z) exp(rho [ln|z| / rho])`: multiplicative quantization with
    /// resolution `rho`; `g(0) = 0` by definition.
    LogQuantizer { rho: f64 },
    /// `rho [z / rho]` with rounding to the nearest integer, ties away from
    /// zero. Not strongly sign-preserving (it flattens `|z| < rho/2` to 0).
    UniformQuantizer { rho: f64 },
}

/// Certified sector `kappa <= g(z)/z <= upper` on `0 < |z| <= Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBounds {
    pub kappa: f64,
    pub upper: f64,
}

impl NonlinearMap {
    pub fn validate(&self) -> Result<(), MapError> {
        match *self {
            NonlinearMap::Identity | NonlinearMap::CubicPlusLinear => Ok(()),
            NonlinearMap::SignumPower { v1, v2 } => {
                if !(v1 > 0.0 && v1 < 1.0) {
                    return Err(MapError::InvalidParameter {
                        name: "v1",
                        reason: format!("need 0 < v1 < 1, got {v1}"),
                    });
                }
                if !(v2 > 1.0) {
                    return Err(MapError::InvalidParameter {
                        name: "v2",
                        reason: format!("need v2 > 1, got {v2}"),
                    });
                }
                Ok(())
            }
            NonlinearMap::LogQuantizer { rho } | NonlinearMap::UniformQuantizer { rho } => {
                if !(rho > 0.0) {
                    return Err(MapError::InvalidParameter {
                        name: "rho",
                        reason: format!("quantizer resolution must be positive, got {rho}"),
                    });
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            NonlinearMap::Identity => z,
            NonlinearMap::CubicPlusLinear => z + z * z * z,
            NonlinearMap::SignumPower { v1, v2 } => {
                if z == 0.0 {
                    0.0
                } else {
                    z.signum() * (z.abs().powf(v1) + z.abs().powf(v2))
                }
            }
            NonlinearMap::LogQuantizer { rho } => {
                if z == 0.0 {
                    0.0
                } else {
                    // f64::round ties away from zero, which keeps the map odd.
                    z.signum() * (rho * (z.abs().ln() / rho).round()).exp()
                }
            }
            NonlinearMap::UniformQuantizer { rho } => rho * (z / rho).round(),
        }
    }

    /// Sector constants on `0 < |z| <= z_max`.
    ///
    /// Identity, cubic-plus-linear and the log quantizer have closed forms
    /// (the log quantizer's `(e^(-rho/2), e^(rho/2))` holds for every `z`,
    /// not just up to `z_max`). Other maps are scanned over a log-spaced
    /// sample of `(0, z_max]`; a sample point with `g(z) z <= 0` fails the
    /// certification and is reported.
    pub fn sector_bounds(&self, z_max: f64) -> Result<SectorBounds, MapError> {
        self.validate()?;
        if !(z_max > 0.0) {
            return Err(MapError::BadDomainBound(z_max));
        }
        match *self {
            NonlinearMap::Identity => Ok(SectorBounds { kappa: 1.0, upper: 1.0 }),
            NonlinearMap::CubicPlusLinear => {
                Ok(SectorBounds { kappa: 1.0, upper: 1.0 + z_max * z_max })
            }
            NonlinearMap::LogQuantizer { rho } => Ok(SectorBounds {
                kappa: (-rho / 2.0).exp(),
                upper: (rho / 2.0).exp(),
            }),
            _ => self.numeric_sector(z_max),
        }
    }

    /// Infimum/supremum of `g(z)/z` over a log-spaced sample of `(0, z_max]`,
    /// eight decades deep, 256 points per decade. The map is odd so positive
    /// arguments cover both signs.
    fn numeric_sector(&self, z_max: f64) -> Result<SectorBounds, MapError> {
        const DECADES: usize = 8;
        const PER_DECADE: usize = 256;
        let total = DECADES * PER_DECADE;
        let mut kappa = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for i in 0..=total {
            let exponent = -(DECADES as f64) * i as f64 / total as f64;
            let z = z_max * 10f64.powf(exponent);
            let gz = self.eval(z);
            if !(gz * z > 0.0) {
                return Err(MapError::SignViolation { z, gz });
            }
            let ratio = gz / z;
            kappa = kappa.min(ratio);
            upper = upper.max(ratio);
        }
        Ok(SectorBounds { kappa, upper })
    }
}
