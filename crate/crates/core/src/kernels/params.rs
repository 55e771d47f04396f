use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `v` the vacuum overlap `exp(s(0))` underflows to zero.
pub const SMALL_V_THRESHOLD: f64 = 1e-4;

const NORM_TOL: f64 = 1e-12;

/// Physical parameters of the correlated dephasing model (units with hbar = 1).
///
/// Construction validates every field, so a `ModelParams` value in hand is
/// always usable by the kernel and dynamics routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    alpha: f64,
    mu: f64,
    v: f64,
    omega_c: f64,
    omega_0: f64,
    lambda: f64,
    c_e: Complex64,
    c_g: Complex64,
}

/// Scalar model parameters addressable by name (sweeps, config files).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Alpha,
    Mu,
    V,
    OmegaC,
    Omega0,
    Lambda,
}

impl Param {
    pub const ALL: [Param; 6] = [
        Param::Alpha,
        Param::Mu,
        Param::V,
        Param::OmegaC,
        Param::Omega0,
        Param::Lambda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Mu => "mu",
            Param::V => "v",
            Param::OmegaC => "omega_c",
            Param::Omega0 => "omega_0",
            Param::Lambda => "lambda",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown parameter `{s}`")))
    }
}

impl Default for ModelParams {
    /// `alpha = v = 0.01`, `omega_c = omega_0 = 1`, `mu = 5`, `lambda = 0`,
    /// and equal-weight amplitudes `c_e = c_g = 1/sqrt(2)`.
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ModelParams {
            alpha: 0.01,
            mu: 5.0,
            v: 0.01,
            omega_c: 1.0,
            omega_0: 1.0,
            lambda: 0.0,
            c_e: Complex64::new(h, 0.0),
            c_g: Complex64::new(h, 0.0),
        }
    }
}

fn invalid(name: &'static str, value: f64, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason: reason.to_string(),
    }
}

impl ModelParams {
    /// Builds a parameter set with the equal-weight amplitudes `1/sqrt(2)`.
    pub fn new(
        alpha: f64,
        mu: f64,
        v: f64,
        omega_c: f64,
        omega_0: f64,
        lambda: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            alpha,
            mu,
            v,
            omega_c,
            omega_0,
            lambda,
            ..ModelParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let finite = |name, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, x, "must be finite"))
            }
        };
        finite("alpha", self.alpha)?;
        finite("mu", self.mu)?;
        finite("v", self.v)?;
        finite("omega_c", self.omega_c)?;
        finite("omega_0", self.omega_0)?;
        finite("lambda", self.lambda)?;
        if self.alpha < 0.0 {
            return Err(invalid("alpha", self.alpha, "must be >= 0"));
        }
        if self.mu <= 0.0 {
            return Err(invalid("mu", self.mu, "must be > 0 (super-ohmic bath)"));
        }
        if self.v <= 0.0 {
            return Err(invalid("v", self.v, "must be > 0"));
        }
        if self.omega_c <= 0.0 {
            return Err(invalid("omega_c", self.omega_c, "must be > 0"));
        }
        if self.omega_0 < 0.0 {
            return Err(invalid("omega_0", self.omega_0, "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(invalid("lambda", self.lambda, "must lie in [0, 1]"));
        }
        for (name, c) in [("c_e", self.c_e), ("c_g", self.c_g)] {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(invalid(name, c.norm(), "must be finite"));
            }
        }
        let norm = self.c_e.norm_sqr() + self.c_g.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(
                "c_e",
                norm,
                "|c_e|^2 + |c_g|^2 must equal 1 within 1e-12",
            ));
        }
        Ok(())
    }

    /// Returns a copy with one scalar parameter replaced, re-validated.
    pub fn with(mut self, param: Param, value: f64) -> Result<Self> {
        match param {
            Param::Alpha => self.alpha = value,
            Param::Mu => self.mu = value,
            Param::V => self.v = value,
            Param::OmegaC => self.omega_c = value,
            Param::Omega0 => self.omega_0 = value,
            Param::Lambda => self.lambda = value,
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_amplitudes(mut self, c_e: Complex64, c_g: Complex64) -> Result<Self> {
        self.c_e = c_e;
        self.c_g = c_g;
        self.validate()?;
        Ok(self)
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::Alpha => self.alpha,
            Param::Mu => self.mu,
            Param::V => self.v,
            Param::OmegaC => self.omega_c,
            Param::Omega0 => self.omega_0,
            Param::Lambda => self.lambda,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega_0(&self) -> f64 {
        self.omega_0
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn c_e(&self) -> Complex64 {
        self.c_e
    }
    pub fn c_g(&self) -> Complex64 {
        self.c_g
    }

    /// Mixed exponent `(mu + v) / 2` of the `J f` cross spectrum.
    pub fn chi(&self) -> f64 {
        0.5 * (self.mu + self.v)
    }

    /// Set when `v` is so small that the vacuum overlap underflows.
    pub fn small_v(&self) -> bool {
        self.v < SMALL_V_THRESHOLD
    }

    /// True when both amplitudes equal `1/sqrt(2)` within 1e-12.
    pub fn has_equal_amplitudes(&self) -> bool {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let target = Complex64::new(h, 0.0);
        (self.c_e - target).norm() <= NORM_TOL && (self.c_g - target).norm() <= NORM_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_values() {
        assert!(ModelParams::new(0.01, 0.0, 0.01, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.01, -1.0, 0.01, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(-0.1, 5.0, 0.01, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.01, 5.0, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.01, 5.0, 0.01, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.01, 5.0, 0.01, 1.0, -1.0, 0.0).is_err());
        assert!(ModelParams::new(0.01, 5.0, 0.01, 1.0, 1.0, 1.5).is_err());
        assert!(ModelParams::new(f64::NAN, 5.0, 0.01, 1.0, 1.0, 0.5).is_err());
        assert!(ModelParams::new(0.0, 5.0, 0.01, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn error_names_offending_parameter() {
        let err = ModelParams::default().with(Param::Mu, -1.0).unwrap_err();
        assert!(err.to_string().contains("`mu`"));
    }

    #[test]
    fn amplitude_normalization_is_enforced() {
        let p = ModelParams::default();
        assert!(p
            .with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .is_ok());
        assert!(p
            .with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0))
            .is_err());
        assert!(p.has_equal_amplitudes());
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert!("beta".parse::<Param>().is_err());
    }
}
