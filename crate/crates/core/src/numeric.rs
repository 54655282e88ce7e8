//! Shared numerical settings and result types.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A numerical value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0 };

    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn scale(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value - rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// Which evaluation route produced (or should produce) a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    Fyodorov,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
            Method::Fyodorov => "fyodorov",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed-form" => Ok(Method::ClosedForm),
            "quadrature" => Ok(Method::Quadrature),
            "monte-carlo" => Ok(Method::MonteCarlo),
            "fyodorov" => Ok(Method::Fyodorov),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// Tolerances and sample sizes for quadrature and Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    /// Relative tolerance requested from each adaptive 1-D rule.
    pub rel_tol: f64,
    /// Absolute tolerance floor for each adaptive 1-D rule.
    pub abs_tol: f64,
    /// Maximum number of bisections per adaptive 1-D rule.
    pub max_subdivisions: usize,
    /// Number of Monte Carlo draws.
    pub mc_samples: u64,
    /// Draws per deterministic sub-stream.
    pub mc_chunk: u64,
    /// Master seed for all random streams.
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 200,
            mc_samples: 1_000_000,
            mc_chunk: 10_000,
            seed: 0,
        }
    }
}

impl NumericConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.mc_samples = samples;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

/// Method request plus numerical settings. `method: None` selects the default route.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalOptions {
    pub method: Option<Method>,
    pub numeric: NumericConfig,
}

impl EvalOptions {
    pub fn new(method: Method) -> Self {
        EvalOptions {
            method: Some(method),
            numeric: NumericConfig::default(),
        }
    }

    pub fn auto() -> Self {
        EvalOptions::default()
    }

    pub fn with_numeric(mut self, numeric: NumericConfig) -> Self {
        self.numeric = numeric;
        self
    }
}
