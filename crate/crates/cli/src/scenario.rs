//! Scenario files: TOML with `[[models]]`, `[distribution]`, and optional
//! `[quadrature]`, `[opp]` and `[sweep]` tables. See `docs/cli.md`.

use std::path::{Path, PathBuf};

use prompt_pricing::{
    AmbiguityDistribution, GaiModel, ModelSet, OppConfig, PriceSchedule, QuadratureConfig,
};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_ORACLE_GRID: usize = 400;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    models: Vec<RawModel>,
    distribution: Option<RawDistribution>,
    quadrature: Option<RawQuadrature>,
    opp: Option<RawOpp>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    id: String,
    utility: f64,
    cost: f64,
    price: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Uniform { min: f64, max: f64 },
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    nodes: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOpp {
    alpha: Option<f64>,
    refinement: Option<bool>,
    oracle_grid: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: String,
    start: f64,
    stop: f64,
    points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Eps,
    EpsMin,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            Self::Eps => "eps",
            Self::EpsMin => "eps_min",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub path: PathBuf,
    pub models: ModelSet,
    /// Present only when every model lists a price.
    pub prices: Option<PriceSchedule>,
    pub distribution: AmbiguityDistribution,
    pub quad: QuadratureConfig,
    pub alpha: Option<f64>,
    pub refinement: bool,
    pub oracle_grid: usize,
    pub sweep: Option<Sweep>,
}

/// Overrides from the command line, applied before validation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub nodes: Option<usize>,
    pub alpha: Option<f64>,
}

impl Scenario {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path, overrides)
    }

    pub fn parse(text: &str, path: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let invalid = |violations: Vec<String>| CliError::Validation {
            path: path.to_path_buf(),
            violations,
        };
        let raw: RawScenario = toml::from_str(text).map_err(|e| invalid(vec![e.to_string()]))?;
        let mut errs = Vec::new();

        let mut models = Vec::new();
        if raw.models.is_empty() {
            errs.push("models: at least one [[models]] entry is required".to_string());
        }
        for (i, m) in raw.models.iter().enumerate() {
            if m.id.trim().is_empty() {
                errs.push(format!("models[{i}].id: must be non-empty"));
            }
            if !(m.utility.is_finite() && m.utility > 0.0) {
                errs.push(format!(
                    "models[{i}].utility: must be > 0, got {}",
                    m.utility
                ));
            }
            if !(m.cost.is_finite() && m.cost >= 0.0) {
                errs.push(format!("models[{i}].cost: must be >= 0, got {}", m.cost));
            }
            if let Some(p) = m.price {
                if !(p.is_finite() && p >= 0.0) {
                    errs.push(format!("models[{i}].price: must be >= 0, got {p}"));
                }
            }
            if let Ok(g) = GaiModel::new(m.id.clone(), m.utility, m.cost) {
                models.push(g);
            }
        }
        let model_set = if models.len() == raw.models.len() && !models.is_empty() {
            match ModelSet::new(models) {
                Ok(set) => Some(set),
                Err(e) => {
                    errs.push(format!("models: {e}"));
                    None
                }
            }
        } else {
            None
        };

        let distribution = match raw.distribution {
            None => {
                errs.push("distribution: section is required".to_string());
                None
            }
            Some(RawDistribution::Uniform { min, max }) => AmbiguityDistribution::uniform(min, max)
                .map_err(|e| errs.push(format!("distribution: {e}")))
                .ok(),
            Some(RawDistribution::Tabulated { knots, values }) => {
                AmbiguityDistribution::tabulated(knots, values)
                    .map_err(|e| errs.push(format!("distribution: {e}")))
                    .ok()
            }
        };

        let nodes = overrides
            .nodes
            .or(raw.quadrature.map(|q| q.nodes))
            .unwrap_or(prompt_pricing::numeric::DEFAULT_NODE_COUNT);
        let quad = QuadratureConfig::new(nodes)
            .map_err(|_| errs.push(format!("quadrature.nodes: must be >= 3, got {nodes}")))
            .ok();

        let raw_opp = raw.opp.unwrap_or(RawOpp {
            alpha: None,
            refinement: None,
            oracle_grid: None,
        });
        let alpha = overrides.alpha.or(raw_opp.alpha);
        if let Some(a) = alpha {
            if !(a.is_finite() && a > 0.0) {
                errs.push(format!("opp.alpha: must be > 0, got {a}"));
            }
        }
        let oracle_grid = raw_opp.oracle_grid.unwrap_or(DEFAULT_ORACLE_GRID);
        if oracle_grid < prompt_pricing::heterogeneous::MIN_ORACLE_GRID {
            errs.push(format!(
                "opp.oracle_grid: must be >= {}, got {oracle_grid}",
                prompt_pricing::heterogeneous::MIN_ORACLE_GRID
            ));
        }

        let sweep = raw.sweep.and_then(|s| {
            let variable = match s.variable.as_str() {
                "eps" => SweepVariable::Eps,
                "eps_min" => SweepVariable::EpsMin,
                other => {
                    errs.push(format!(
                        "sweep.variable: expected `eps` or `eps_min`, got `{other}`"
                    ));
                    return None;
                }
            };
            if s.points == 0 {
                errs.push("sweep.points: must be >= 1".to_string());
            }
            let in_range = |x: f64| match variable {
                SweepVariable::Eps => x > 0.0 && x < 1.0,
                SweepVariable::EpsMin => (0.0..1.0).contains(&x),
            };
            for (name, x) in [("start", s.start), ("stop", s.stop)] {
                if !(x.is_finite() && in_range(x)) {
                    let range = match variable {
                        SweepVariable::Eps => "(0, 1)",
                        SweepVariable::EpsMin => "[0, 1)",
                    };
                    errs.push(format!("sweep.{name}: must lie in {range}, got {x}"));
                }
            }
            if s.stop < s.start {
                errs.push(format!(
                    "sweep: stop ({}) must not be below start ({})",
                    s.stop, s.start
                ));
            }
            Some(Sweep {
                variable,
                start: s.start,
                stop: s.stop,
                points: s.points,
            })
        });

        if !errs.is_empty() {
            return Err(invalid(errs));
        }
        let models = model_set.expect("validated");
        let prices = if raw.models.iter().all(|m| m.price.is_some()) {
            let ps: Vec<f64> = raw.models.iter().map(|m| m.price.unwrap()).collect();
            Some(PriceSchedule::for_models(&models, &ps).expect("validated"))
        } else {
            None
        };
        Ok(Self {
            path: path.to_path_buf(),
            models,
            prices,
            distribution: distribution.expect("validated"),
            quad: quad.expect("validated"),
            alpha,
            refinement: raw_opp.refinement.unwrap_or(true),
            oracle_grid,
            sweep,
        })
    }

    pub fn invalid(&self, violations: Vec<String>) -> CliError {
        CliError::Validation {
            path: self.path.clone(),
            violations,
        }
    }

    pub fn opp_config(&self) -> OppConfig {
        let mut cfg = OppConfig::for_models(&self.models);
        if let Some(a) = self.alpha {
            cfg.step_alpha = a;
        }
        cfg.refinement = self.refinement;
        cfg.quad = self.quad;
        cfg
    }
}
