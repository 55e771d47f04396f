//! Flat `key = value` run configuration.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use crate::distinguishability::Exponent;
use crate::kernels::ModelParams;
use crate::qsl::Convention;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected `csv` or `json`, got `{other}`")),
        }
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: ModelParams,
    pub exponent: Exponent,
    pub convention: Convention,
    pub horizon: f64,
    pub tau: f64,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Overrides::default().resolve().expect("defaults are valid")
    }
}

/// Partially specified settings; later layers win when merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub v: Option<f64>,
    pub omega_c: Option<f64>,
    pub omega_0: Option<f64>,
    pub lambda: Option<f64>,
    pub c_e_re: Option<f64>,
    pub c_e_im: Option<f64>,
    pub c_g_re: Option<f64>,
    pub c_g_im: Option<f64>,
    pub exponent: Option<Exponent>,
    pub convention: Option<Convention>,
    pub horizon: Option<f64>,
    pub tau: Option<f64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 17] = [
    "alpha",
    "mu",
    "v",
    "omega_c",
    "omega_0",
    "lambda",
    "c_e_re",
    "c_e_im",
    "c_g_re",
    "c_g_im",
    "exponent",
    "convention",
    "horizon",
    "tau",
    "tol",
    "format",
    "out",
];

impl Overrides {
    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: Overrides) -> Overrides {
        Overrides {
            alpha: other.alpha.or(self.alpha),
            mu: other.mu.or(self.mu),
            v: other.v.or(self.v),
            omega_c: other.omega_c.or(self.omega_c),
            omega_0: other.omega_0.or(self.omega_0),
            lambda: other.lambda.or(self.lambda),
            c_e_re: other.c_e_re.or(self.c_e_re),
            c_e_im: other.c_e_im.or(self.c_e_im),
            c_g_re: other.c_g_re.or(self.c_g_re),
            c_g_im: other.c_g_im.or(self.c_g_im),
            exponent: other.exponent.or(self.exponent),
            convention: other.convention.or(self.convention),
            horizon: other.horizon.or(self.horizon),
            tau: other.tau.or(self.tau),
            tol: other.tol.or(self.tol),
            format: other.format.or(self.format),
            out: other.out.or(self.out),
        }
    }

    /// Fills defaults and validates.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let params = ModelParams::new(
            self.alpha.unwrap_or(0.01),
            self.mu.unwrap_or(5.0),
            self.v.unwrap_or(0.01),
            self.omega_c.unwrap_or(1.0),
            self.omega_0.unwrap_or(1.0),
            self.lambda.unwrap_or(0.0),
        )?;
        let params = if [self.c_e_re, self.c_e_im, self.c_g_re, self.c_g_im]
            .iter()
            .any(Option::is_some)
        {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let c_e = Complex64::new(self.c_e_re.unwrap_or(h), self.c_e_im.unwrap_or(0.0));
            let c_g = Complex64::new(self.c_g_re.unwrap_or(h), self.c_g_im.unwrap_or(0.0));
            params.with_amplitudes(c_e, c_g)?
        } else {
            params
        };
        let horizon = positive("horizon", self.horizon.unwrap_or(100.0))?;
        let tau = self.tau.unwrap_or(1.0);
        if !tau.is_finite() || tau < 0.0 {
            return Err(CliError::usage(format!(
                "invalid parameter `tau` = {tau}: must be finite and >= 0"
            )));
        }
        let tol = positive("tol", self.tol.unwrap_or(1e-6))?;
        Ok(RunConfig {
            params,
            exponent: self.exponent.unwrap_or_default(),
            convention: self.convention.unwrap_or_default(),
            horizon,
            tau,
            tol,
            format: self.format.unwrap_or_default(),
            out: self.out,
        })
    }
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::usage(format!(
            "invalid parameter `{name}` = {x}: must be finite and > 0"
        )))
    }
}

fn line_of(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            l.split_once('=')
                .is_some_and(|(k, _)| k.trim().trim_matches('"') == key)
        })
        .map_or(0, |i| i + 1)
}

/// Reads a flat configuration text; values are numbers, strings or booleans.
pub fn parse_overrides(text: &str) -> Result<Overrides, CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        CliError::usage(
            format!("config parse error: {}", e.message())
                + &e.span().map_or(String::new(), |s| {
                    format!(" (line {})", text[..s.start].lines().count().max(1))
                }),
        )
    })?;
    let mut o = Overrides::default();
    for (key, value) in &table {
        let line = line_of(text, key);
        let bad = |what: &str| CliError::usage(format!("config line {line}: key `{key}` {what}"));
        if !KEYS.contains(&key.as_str()) {
            return Err(bad("is not recognised"));
        }
        let number = || match value {
            toml::Value::Float(x) => Ok(*x),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(bad("expects a number")),
        };
        match key.as_str() {
            "alpha" => o.alpha = Some(number()?),
            "mu" => o.mu = Some(number()?),
            "v" => o.v = Some(number()?),
            "omega_c" => o.omega_c = Some(number()?),
            "omega_0" => o.omega_0 = Some(number()?),
            "lambda" => o.lambda = Some(number()?),
            "c_e_re" => o.c_e_re = Some(number()?),
            "c_e_im" => o.c_e_im = Some(number()?),
            "c_g_re" => o.c_g_re = Some(number()?),
            "c_g_im" => o.c_g_im = Some(number()?),
            "horizon" => o.horizon = Some(number()?),
            "tau" => o.tau = Some(number()?),
            "tol" => o.tol = Some(number()?),
            "exponent" => {
                let s = match value {
                    toml::Value::Integer(i) => i.to_string(),
                    toml::Value::String(s) => s.clone(),
                    _ => return Err(bad("expects 1 or 2")),
                };
                o.exponent = Some(s.parse().map_err(|_| bad("expects 1 or 2"))?);
            }
            "convention" => {
                let s = value.as_str().ok_or_else(|| bad("expects a string"))?;
                o.convention = Some(
                    s.parse()
                        .map_err(|_| bad("expects `as-printed` or `with-tau-factor`"))?,
                );
            }
            "format" => {
                let s = value.as_str().ok_or_else(|| bad("expects a string"))?;
                o.format = Some(s.parse().map_err(|e: String| bad(&e))?);
            }
            "out" => {
                let s = value.as_str().ok_or_else(|| bad("expects a string"))?;
                o.out = Some(PathBuf::from(s));
            }
            _ => unreachable!("key list and match arms agree"),
        }
    }
    Ok(o)
}

/// Parses and resolves a configuration text on its own.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_overrides(text)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.params.alpha(), 0.01);
        assert_eq!(c.params.v(), 0.01);
        assert_eq!(c.params.omega_c(), 1.0);
        assert_eq!(c.params.omega_0(), 1.0);
        assert_eq!(c.params.lambda(), 0.0);
        assert_eq!(c.exponent, Exponent::Two);
        assert_eq!(c.convention, Convention::AsPrinted);
        assert_eq!(c.horizon, 100.0);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn values_override_defaults() {
        let c =
            parse_config("lambda = 0.25\nmu = 8\nexponent = 1\nconvention = \"with-tau-factor\"\n")
                .unwrap();
        assert_eq!(c.params.lambda(), 0.25);
        assert_eq!(c.params.mu(), 8.0);
        assert_eq!(c.exponent, Exponent::One);
        assert_eq!(c.convention, Convention::DerivedWithTauFactor);
    }

    #[test]
    fn out_of_range_lambda_names_the_bounds() {
        let e = parse_config("lambda = 1.5").unwrap_err();
        assert_eq!(e.code, 2);
        assert!(e.message.contains("lambda"), "{}", e.message);
        assert!(e.message.contains("[0, 1]"), "{}", e.message);
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let e = parse_config("alpha = 0.02\n\nbeta = 3\n").unwrap_err();
        assert_eq!(e.code, 2);
        assert!(e.message.contains("`beta`"), "{}", e.message);
        assert!(e.message.contains("line 3"), "{}", e.message);
    }

    #[test]
    fn wrong_value_type_is_rejected() {
        let e = parse_config("mu = \"five\"").unwrap_err();
        assert!(e.message.contains("`mu`") && e.message.contains("number"));
    }

    #[test]
    fn syntax_errors_report_a_line() {
        let e = parse_config("alpha = 0.01\nmu = = 3\n").unwrap_err();
        assert_eq!(e.code, 2);
        assert!(e.message.contains("line 2"), "{}", e.message);
    }

    #[test]
    fn later_layer_wins() {
        let file = parse_overrides("mu = 8\nlambda = 0.5").unwrap();
        let flags = Overrides {
            mu: Some(3.0),
            ..Overrides::default()
        };
        let c = file.merge(flags).resolve().unwrap();
        assert_eq!(c.params.mu(), 3.0);
        assert_eq!(c.params.lambda(), 0.5);
    }

    #[test]
    fn amplitudes_are_validated() {
        assert!(parse_config("c_e_re = 1.0\nc_g_re = 1.0").is_err());
        let c = parse_config("c_e_re = 0.6\nc_g_re = 0.8").unwrap();
        assert!(!c.params.has_equal_amplitudes());
    }
}
