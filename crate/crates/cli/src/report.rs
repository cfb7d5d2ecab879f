//! The JSON report written by every subcommand.

use serde::{Deserialize, Serialize};
use sle0::calogero::{CouplingFit, Energy};
use sle0::config::{Regime, ValidationReport};
use sle0::locus::Terminal;
use sle0::loewner::{CapacityWeights, Halt, IomReport, TipPolyline};
use sle0::C64;

use crate::scenario::Scenario;
use crate::settings::Tolerances;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub scenario: Scenario,
    pub tolerances: Tolerances,
    pub exit_code: i32,
    pub messages: Vec<String>,
    pub validation: Option<ValidationReport>,
    pub solve: Option<SolveSection>,
    pub traces: Vec<TraceSection>,
    pub evolve: Option<EvolveSection>,
    pub calogero: Vec<CalogeroSection>,
    pub checks: Vec<CheckRow>,
    pub figure: Option<FigureSection>,
}

impl Report {
    pub fn new(command: &str, scenario: &Scenario, tolerances: &Tolerances) -> Self {
        Report {
            schema_version: REPORT_SCHEMA,
            tool: "sle0".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: scenario.seed,
            scenario: scenario.clone(),
            tolerances: tolerances.clone(),
            exit_code: 0,
            messages: vec![],
            validation: None,
            solve: None,
            traces: vec![],
            evolve: None,
            calogero: vec![],
            checks: vec![],
            figure: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub n: usize,
    pub m: usize,
    pub regime: Regime,
    pub expected: Option<u64>,
    pub complete: bool,
    pub explanation: Option<String>,
    pub warnings: Vec<String>,
    pub solutions: Vec<SolutionRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRow {
    pub index: usize,
    pub xi: Vec<C64>,
    pub stationary_residual: f64,
    /// Largest null vector residual in the half-plane picture with `u = inf`.
    pub null_vector_residual: Option<f64>,
    pub ward_residual: Option<[f64; 2]>,
    pub near_degenerate: bool,
    pub pattern: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub solution: Option<usize>,
    pub xi: Vec<C64>,
    pub curves: Vec<CurveSummary>,
    pub pattern: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSummary {
    /// 1-based growth point index in canonical order.
    pub start: usize,
    pub terminal: Terminal,
    pub points: usize,
    pub poles_passed: usize,
    pub max_level_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    /// Growth points and charges after transport to the half-plane with `u = inf`.
    pub x0: Vec<f64>,
    pub xi0: Vec<C64>,
    pub weights: CapacityWeights,
    pub dt: f64,
    pub t_end: f64,
    pub steps: usize,
    pub t_last: f64,
    pub halt: Halt,
    pub iom: IomReport,
    pub iom_max_drift: f64,
    pub stationarity_drift: f64,
    pub null_vector_drift: f64,
    pub tips: Vec<TipPolyline>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalogeroSection {
    pub solution: Option<usize>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub hamiltonians: Vec<f64>,
    /// `max_j |(L^2 1)_j|`.
    pub lax_square_ones: f64,
    pub energy: Energy,
    /// Coupling fitted along the flow; absent for a single growth point.
    pub coupling: Option<CouplingFit>,
    /// The coupling as printed in the literature, kept for comparison.
    pub printed_coupling: f64,
    pub halt: Halt,
    pub conservation: Vec<ConservationRow>,
    pub hamiltonian_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConservationRow {
    pub t: f64,
    pub h: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRow {
    pub solution: Option<usize>,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub id: String,
    pub listed_points: Vec<C64>,
    pub printed_xi: Vec<C64>,
    pub used_xi: Vec<C64>,
    /// Distance from the printed charges to the solver solution used.
    pub printed_distance: Option<f64>,
    pub caption_pattern: Option<String>,
    /// Realized pattern in the numbering of the listed points.
    pub realized_pattern: Option<String>,
    pub matches: Option<bool>,
    pub notes: Vec<String>,
}
