//! Scenario files, the JSON input shared by every subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sle0::config::{Configuration, Point, RawConfiguration, Uniformization};
use sle0::loewner::CapacityWeights;
use sle0::C64;

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub uniformization: Uniformization,
    /// Growth points: a number, an `[re, im]` pair.
    pub x: Vec<Point>,
    /// Screening charges. When absent they are solved for, which needs `m`.
    #[serde(default)]
    pub xi: Option<Vec<Point>>,
    #[serde(default)]
    pub m: Option<usize>,
    /// Marked point; defaults to `inf` (half-plane) or `-1` (disk).
    #[serde(default)]
    pub u: Option<Point>,
    #[serde(default)]
    pub nu: Option<NuSpec>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    /// Points tracked by the Loewner flow, in the scenario's own picture.
    #[serde(default)]
    pub monitors: Option<Vec<Point>>,
    #[serde(default)]
    pub seed: u64,
    /// Solver solution used downstream when `xi` is absent (0-based).
    #[serde(default)]
    pub solution: Option<usize>,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Capacity weights: a constant vector or a named schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    Constant(Vec<f64>),
    Named(NamedSchedule),
    Sequential(SequentialSchedule),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSchedule {
    Uniform,
    /// Only the first curve grows.
    First,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentialSchedule {
    pub sequential_period: f64,
}

impl NuSpec {
    pub fn weights(&self, n: usize) -> Result<CapacityWeights, String> {
        match self {
            NuSpec::Constant(nu) if nu.len() != n => Err(format!("nu has {} entries for {n} growth points", nu.len())),
            NuSpec::Constant(nu) => Ok(CapacityWeights::Constant { nu: nu.clone() }),
            NuSpec::Named(NamedSchedule::Uniform) => Ok(CapacityWeights::Uniform),
            NuSpec::Named(NamedSchedule::First) if n == 0 => Err("nu = first needs a growth point".into()),
            NuSpec::Named(NamedSchedule::First) => Ok(CapacityWeights::single(0, n)),
            NuSpec::Sequential(s) => Ok(CapacityWeights::Sequential { period: s.sequential_period }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub report: String,
    pub trace_csv: String,
    pub trajectory_csv: String,
    pub svg: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            report: "report.json".into(),
            trace_csv: "trace.csv".into(),
            trajectory_csv: "trajectory.csv".into(),
            svg: "trace.svg".into(),
        }
    }
}

impl Scenario {
    pub fn new(uniformization: Uniformization, x: Vec<Point>) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            name: None,
            uniformization,
            x,
            xi: None,
            m: None,
            u: None,
            nu: None,
            t_end: None,
            dt: None,
            monitors: None,
            seed: 0,
            solution: None,
            outputs: Outputs::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let sc: Scenario =
            serde_json::from_str(text).map_err(|e| Failure::Validation(format!("scenario: {e}")))?;
        sc.check()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks that do not need a solver run.
    pub fn check(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::Validation(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.x.iter().any(|p| p.is_infinite()) {
            return bad("growth points must be finite".into());
        }
        if self.xi.as_ref().is_some_and(|xi| xi.iter().any(|p| p.is_infinite())) {
            return bad("screening charges must be finite".into());
        }
        if self.xi.is_none() && self.m.is_none() {
            return bad("scenario needs either xi or m".into());
        }
        if let (Some(xi), Some(m)) = (&self.xi, self.m) {
            if xi.len() != m {
                return bad(format!("m = {m} but {} charges are given", xi.len()));
            }
        }
        for (name, v) in [("t_end", self.t_end), ("dt", self.dt)] {
            if v.is_some_and(|v| !v.is_finite() || v < 0.0) {
                return bad(format!("{name} must be finite and nonnegative"));
            }
        }
        if let Some(nu) = &self.nu {
            nu.weights(self.x.len()).map_err(Failure::Validation)?;
        }
        Ok(())
    }

    pub fn growth_points(&self) -> Vec<C64> {
        self.x.iter().filter_map(|p| p.finite()).collect()
    }

    pub fn charges(&self) -> Option<Vec<C64>> {
        self.xi.as_ref().map(|xi| xi.iter().filter_map(|p| p.finite()).collect())
    }

    pub fn marked_point(&self) -> Point {
        self.u.unwrap_or_else(|| self.uniformization.default_marked_point())
    }

    pub fn raw(&self, xi: Vec<C64>) -> RawConfiguration {
        RawConfiguration { uniformization: self.uniformization, x: self.growth_points(), xi, u: Some(self.marked_point()) }
    }

    /// The configuration without charges, which fixes the canonical order.
    pub fn base(&self) -> Result<Configuration, Failure> {
        Configuration::new(&self.raw(vec![])).map_err(|e| Failure::Validation(e.to_string()))
    }

    pub fn weights(&self) -> CapacityWeights {
        match &self.nu {
            Some(nu) => nu.weights(self.x.len()).unwrap_or(CapacityWeights::Uniform),
            None => CapacityWeights::Uniform,
        }
    }
}
