use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{snap_step, CircularOrbitSpec, CostWeights, ErrorNorm, SweepSpec};
use crate::dgrad::{DiscreteGradientSpec, GradientStrategy};
use crate::error::{Error, Result};
use crate::integrate::{Scheme, SchemeForm, SolverSettings};
use crate::model::PotentialModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Kepler circular orbit.
    Fig1,
    /// Anharmonic-oscillator circular orbit.
    Fig2,
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Scenario::Fig1),
            "fig2" => Ok(Scenario::Fig2),
            "custom" => Ok(Scenario::Custom),
            other => Err(Error::Validation {
                key: "scenario".into(),
                message: format!("expected fig1, fig2 or custom, got '{other}'"),
            }),
        }
    }
}

/// Radial potentials that admit circular orbits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialChoice {
    Kepler { kappa: f64 },
    Anharmonic { alpha: f64, beta: f64 },
    Harmonic,
    RadialPower { coeff: f64, exponent: f64 },
}

impl PotentialChoice {
    fn default_for(kind: &str) -> Option<Self> {
        Some(match kind {
            "kepler" => PotentialChoice::Kepler { kappa: 1.0 },
            "anharmonic" => PotentialChoice::Anharmonic {
                alpha: 0.5,
                beta: 0.0,
            },
            "harmonic" => PotentialChoice::Harmonic,
            "radial_power" => PotentialChoice::RadialPower {
                coeff: 1.0,
                exponent: 2.0,
            },
            _ => return None,
        })
    }

    pub fn build(&self, dim: usize) -> Result<PotentialModel> {
        match *self {
            PotentialChoice::Kepler { kappa } => PotentialModel::kepler(kappa, dim),
            PotentialChoice::Anharmonic { alpha, beta } => {
                PotentialModel::anharmonic(alpha, beta, dim)
            }
            PotentialChoice::Harmonic => PotentialModel::harmonic(dim),
            PotentialChoice::RadialPower { coeff, exponent } => {
                PotentialModel::radial_power(coeff, exponent, dim)
            }
        }
    }
}

/// Step sizes, either explicit or as divisions of the orbital period.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ladder {
    Steps(Vec<f64>),
    PerPeriod(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientChoice {
    /// Closed form when available, otherwise Gauss-Legendre with the default node count.
    Preferred,
    GaussLegendre(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub potential: Option<PotentialChoice>,
    pub dim: usize,
    pub radius: Option<f64>,
    pub t_end: f64,
    pub schemes: Vec<Scheme>,
    pub ladder: Ladder,
    pub form: SchemeForm,
    pub solver: SolverSettings,
    pub gradient: GradientChoice,
    pub weights: CostWeights,
    pub norm: ErrorNorm,
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
}

/// Every key a document may set, with a one-line description.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("scenario", "fig1 | fig2 | custom (default custom)"),
    (
        "potential.kind",
        "kepler | anharmonic | harmonic | radial_power",
    ),
    (
        "potential.kappa",
        "Kepler strength, V = -kappa/r (default 1)",
    ),
    ("potential.alpha", "V = alpha r^2 - beta r^4 (default 0.5)"),
    ("potential.beta", "quartic coefficient (default 0)"),
    ("potential.coeff", "V = coeff r^exponent (default 1)"),
    ("potential.exponent", "radial power (default 2)"),
    (
        "potential.dim",
        "configuration-space dimension, >= 2 (default 3)",
    ),
    ("orbit.radius", "circular orbit radius"),
    ("time.t_end", "integration time (default 100)"),
    (
        "schemes",
        "comma-separated list of avf, lex, slex (default all)",
    ),
    ("ladder.h", "explicit step sizes, strictly decreasing"),
    (
        "ladder.per_period",
        "steps per orbital period, strictly increasing (default 100, 200, 400, 800)",
    ),
    ("scheme.form", "separable | general (default separable)"),
    (
        "solver.tol",
        "fixed-point tolerance in [1e-16, 1e-6] (default 1e-14)",
    ),
    ("solver.max_iter", "iteration cap in [1, 500] (default 100)"),
    (
        "solver.damping",
        "fixed-point relaxation in (0, 1] (default 1)",
    ),
    (
        "dgrad.strategy",
        "preferred | gauss_legendre (default preferred)",
    ),
    ("dgrad.nodes", "Gauss-Legendre node count (default 8)"),
    (
        "cost.gradient",
        "cost of one gradient evaluation (default 1)",
    ),
    ("cost.hessian", "cost of one Hessian evaluation (default 1)"),
    (
        "cost.matrix_function",
        "cost of one matrix-function build (default 2)",
    ),
    ("analysis.norm", "phase | position (default phase)"),
    ("run.workers", "concurrent (scheme, h) cells (default 1)"),
    (
        "output.dir",
        "directory for results.csv, summary.json, plot.gp",
    ),
];

impl ExperimentConfig {
    /// Defaults of a scenario before any document keys are applied.
    pub fn preset(scenario: Scenario) -> Self {
        let (potential, radius, per_period) = match scenario {
            Scenario::Fig1 => (
                Some(PotentialChoice::Kepler { kappa: 1.0 }),
                Some(3.5),
                vec![100.0, 200.0, 400.0, 800.0],
            ),
            Scenario::Fig2 => (
                Some(PotentialChoice::Anharmonic {
                    alpha: 0.5,
                    beta: 0.01,
                }),
                Some(3.5),
                vec![50.0, 100.0, 200.0, 400.0],
            ),
            Scenario::Custom => (None, None, vec![100.0, 200.0, 400.0, 800.0]),
        };
        Self {
            scenario,
            potential,
            dim: 3,
            radius,
            t_end: 100.0,
            schemes: Scheme::ALL.to_vec(),
            ladder: Ladder::PerPeriod(per_period),
            form: SchemeForm::Separable,
            solver: SolverSettings::default(),
            gradient: GradientChoice::Preferred,
            weights: CostWeights::default(),
            norm: ErrorNorm::Phase,
            workers: 1,
            out_dir: None,
        }
    }

    /// The circular orbit this experiment follows.
    pub fn orbit(&self) -> Result<CircularOrbitSpec> {
        let potential = self
            .potential
            .ok_or_else(|| validation("potential.kind", "no potential given"))?;
        let radius = self
            .radius
            .ok_or_else(|| validation("orbit.radius", "no orbit radius given"))?;
        let model = potential
            .build(self.dim)
            .map_err(|e| validation("potential.kind", &e.to_string()))?;
        CircularOrbitSpec::new(model, radius)
            .map_err(|e| validation("orbit.radius", &e.to_string()))
    }

    /// Step sizes after snapping to whole step counts over `t_end`.
    pub fn step_sizes(&self) -> Result<Vec<f64>> {
        let raw = match &self.ladder {
            Ladder::Steps(h) => h.clone(),
            Ladder::PerPeriod(n) => {
                let period = self.orbit()?.period();
                n.iter().map(|d| period / d).collect()
            }
        };
        Ok(raw.into_iter().map(|h| snap_step(self.t_end, h)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(validation("potential.dim", "must be at least 2"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(validation("time.t_end", "must be positive"));
        }
        if self.schemes.is_empty() {
            return Err(validation("schemes", "at least one scheme is required"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(validation("schemes", &format!("{s} is listed twice")));
            }
        }
        let (key, values) = match &self.ladder {
            Ladder::Steps(v) => ("ladder.h", v),
            Ladder::PerPeriod(v) => ("ladder.per_period", v),
        };
        if values.is_empty() {
            return Err(validation(key, "at least one step size is required"));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(validation(key, "entries must be positive"));
        }
        let ordered = match &self.ladder {
            Ladder::Steps(v) => v.windows(2).all(|w| w[0] > w[1]),
            Ladder::PerPeriod(v) => v.windows(2).all(|w| w[0] < w[1]),
        };
        if !ordered {
            let want = if key == "ladder.h" {
                "decreasing"
            } else {
                "increasing"
            };
            return Err(validation(key, &format!("entries must be strictly {want}")));
        }
        let steps = self.step_sizes()?;
        if steps.windows(2).any(|w| w[0] <= w[1]) {
            return Err(validation(
                key,
                "step sizes collide after rounding to whole step counts",
            ));
        }
        self.solver
            .validate()
            .map_err(|e| validation("solver", &e.to_string()))?;
        self.weights
            .validate()
            .map_err(|e| validation("cost", &e.to_string()))?;
        if self.workers == 0 {
            return Err(validation("run.workers", "must be at least 1"));
        }
        self.dgrad_spec()?;
        Ok(())
    }

    fn dgrad_spec(&self) -> Result<DiscreteGradientSpec> {
        let potential = self.orbit()?.potential().clone();
        match self.gradient {
            GradientChoice::Preferred => Ok(DiscreteGradientSpec::preferred(potential)),
            GradientChoice::GaussLegendre(n) => {
                DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(n), potential)
                    .map_err(|e| validation("dgrad.nodes", &e.to_string()))
            }
        }
    }

    /// The convergence study described by this configuration.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        self.validate()?;
        Ok(SweepSpec {
            orbit: self.orbit()?,
            dgrad: self.dgrad_spec()?,
            form: self.form,
            solver: self.solver,
            t_end: self.t_end,
            ladder: self.step_sizes()?,
            schemes: self.schemes.clone(),
            weights: self.weights,
            norm: self.norm,
        })
    }
}

fn validation(key: &str, message: &str) -> Error {
    Error::Validation {
        key: key.to_string(),
        message: message.to_string(),
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Splits a document into entries. `#` starts a comment outside quotes.
fn tokenize(text: &str) -> Result<BTreeMap<String, Entry>> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut in_quote = false;
        let mut content = raw;
        for (i, c) in raw.char_indices() {
            match c {
                '"' => in_quote = !in_quote,
                '#' if !in_quote => {
                    content = &raw[..i];
                    break;
                }
                _ => {}
            }
        }
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(parse_error(line, indent, "expected `key = value`"));
        };
        let key = content[..eq].trim();
        let valid_key = !key.is_empty()
            && key.split('.').all(|seg| {
                !seg.is_empty()
                    && seg
                        .chars()
                        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            });
        if !valid_key {
            return Err(parse_error(line, indent, &format!("invalid key '{key}'")));
        }
        let after = &content[eq + 1..];
        let value_col = eq + 1 + (after.len() - after.trim_start().len());
        let mut value = after.trim().to_string();
        if value.starts_with('"') {
            if value.len() < 2 || !value.ends_with('"') || value[1..value.len() - 1].contains('"') {
                return Err(parse_error(line, value_col, "unterminated string"));
            }
            value = value[1..value.len() - 1].to_string();
        } else if value.is_empty() {
            return Err(parse_error(line, value_col, "missing value"));
        }
        if let Some(prev) = entries.insert(key.to_string(), Entry { value, line }) {
            return Err(parse_error(
                line,
                indent,
                &format!("duplicate key '{key}' (first set on line {})", prev.line),
            ));
        }
    }
    Ok(entries)
}

/// `column` is a 0-based byte offset; errors report it 1-based.
fn parse_error(line: usize, column: usize, message: &str) -> Error {
    Error::Parse {
        line,
        column: column + 1,
        message: message.to_string(),
    }
}

struct Reader {
    entries: BTreeMap<String, Entry>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|e| e.value)
    }

    fn parse<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        self.take(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| validation(key, &format!("expected {what}, got '{v}'")))
            })
            .transpose()
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        self.parse::<f64>(key, "a number")
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        self.parse::<usize>(key, "a non-negative integer")
    }

    fn list<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<Vec<T>>> {
        self.take(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        let item = item.trim();
                        item.parse::<T>().map_err(|_| {
                            validation(key, &format!("expected a list of {what}, got '{item}'"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Reads a flat `key = value` document (dotted section prefixes, `#`
/// comments, optional double quotes) into a validated configuration.
/// Keys not set keep the defaults of the selected scenario.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut r = Reader {
        entries: tokenize(text)?,
    };
    let scenario = r
        .parse::<Scenario>("scenario", "fig1, fig2 or custom")?
        .unwrap_or(Scenario::Custom);
    let mut cfg = ExperimentConfig::preset(scenario);

    if let Some(kind) = r.take("potential.kind") {
        cfg.potential = Some(PotentialChoice::default_for(&kind).ok_or_else(|| {
            validation(
                "potential.kind",
                &format!("expected kepler, anharmonic, harmonic or radial_power, got '{kind}'"),
            )
        })?);
    }
    apply_potential_params(&mut r, &mut cfg)?;
    if let Some(dim) = r.count("potential.dim")? {
        cfg.dim = dim;
    }
    if let Some(radius) = r.number("orbit.radius")? {
        cfg.radius = Some(radius);
    }
    if let Some(t) = r.number("time.t_end")? {
        cfg.t_end = t;
    }
    if let Some(schemes) = r.list::<Scheme>("schemes", "avf, lex, slex")? {
        cfg.schemes = schemes;
    }
    let steps = r.list::<f64>("ladder.h", "numbers")?;
    let per_period = r.list::<f64>("ladder.per_period", "numbers")?;
    match (steps, per_period) {
        (Some(_), Some(_)) => {
            return Err(validation(
                "ladder.h",
                "give either ladder.h or ladder.per_period, not both",
            ));
        }
        (Some(h), None) => cfg.ladder = Ladder::Steps(h),
        (None, Some(n)) => cfg.ladder = Ladder::PerPeriod(n),
        (None, None) => {}
    }
    if let Some(form) = r.take("scheme.form") {
        cfg.form = match form.as_str() {
            "separable" => SchemeForm::Separable,
            "general" => SchemeForm::General,
            other => {
                return Err(validation(
                    "scheme.form",
                    &format!("expected separable or general, got '{other}'"),
                ))
            }
        };
    }
    if let Some(tol) = r.number("solver.tol")? {
        cfg.solver.tol = tol;
    }
    if let Some(n) = r.count("solver.max_iter")? {
        cfg.solver.max_iter = n;
    }
    if let Some(d) = r.number("solver.damping")? {
        cfg.solver.damping = d;
    }
    let strategy = r.take("dgrad.strategy");
    let nodes = r.count("dgrad.nodes")?;
    cfg.gradient = match (strategy.as_deref(), nodes) {
        (None | Some("preferred"), None) => GradientChoice::Preferred,
        (Some("preferred"), Some(_)) => {
            return Err(validation(
                "dgrad.nodes",
                "only used with dgrad.strategy = gauss_legendre",
            ))
        }
        (Some("gauss_legendre") | None, n) => {
            GradientChoice::GaussLegendre(n.unwrap_or(crate::dgrad::DEFAULT_GAUSS_NODES))
        }
        (Some(other), _) => {
            return Err(validation(
                "dgrad.strategy",
                &format!("expected preferred or gauss_legendre, got '{other}'"),
            ))
        }
    };
    if let Some(w) = r.number("cost.gradient")? {
        cfg.weights.gradient = w;
    }
    if let Some(w) = r.number("cost.hessian")? {
        cfg.weights.hessian = w;
    }
    if let Some(w) = r.number("cost.matrix_function")? {
        cfg.weights.matrix_function = w;
    }
    if let Some(norm) = r.parse::<ErrorNorm>("analysis.norm", "phase or position")? {
        cfg.norm = norm;
    }
    if let Some(n) = r.count("run.workers")? {
        cfg.workers = n;
    }
    if let Some(dir) = r.take("output.dir") {
        cfg.out_dir = Some(PathBuf::from(dir));
    }

    if let Some((key, entry)) = r.entries.iter().next() {
        return Err(validation(
            key,
            &format!("unknown key (line {})", entry.line),
        ));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_potential_params(r: &mut Reader, cfg: &mut ExperimentConfig) -> Result<()> {
    let params = ["kappa", "alpha", "beta", "coeff", "exponent"];
    for name in params {
        let key = format!("potential.{name}");
        let Some(value) = r.number(&key)? else {
            continue;
        };
        let slot = match (&mut cfg.potential, name) {
            (Some(PotentialChoice::Kepler { kappa }), "kappa") => kappa,
            (Some(PotentialChoice::Anharmonic { alpha, .. }), "alpha") => alpha,
            (Some(PotentialChoice::Anharmonic { beta, .. }), "beta") => beta,
            (Some(PotentialChoice::RadialPower { coeff, .. }), "coeff") => coeff,
            (Some(PotentialChoice::RadialPower { exponent, .. }), "exponent") => exponent,
            (None, _) => return Err(validation(&key, "set potential.kind first")),
            (Some(_), _) => return Err(validation(&key, "not a parameter of this potential kind")),
        };
        *slot = value;
    }
    Ok(())
}
