//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every configuration lives in the unit disk with the marked point at `-1`.
//! Growth points are given as angles in degrees and charges as interleaved
//! `re, im` pairs. Each export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch a thrown value.

use serde::Serialize;
use sle0::config::{unit, Configuration, Point, RawConfiguration, Uniformization};
use sle0::locus::{realized_pattern, TraceOptions};
use sle0::loewner::{evolve as run_flow, reconstruct_tips, CapacityWeights, EvolveOptions, Halt};
use sle0::mobius::{transport_configuration, MobiusMap};
use sle0::solver::{solve_stationary, SolverOptions};
use sle0::C64;
use wasm_bindgen::prelude::*;

const TIP_SAMPLES: usize = 60;

#[derive(Serialize)]
struct Traced {
    xi: Vec<[f64; 2]>,
    residual: f64,
    pattern: Option<String>,
    curves: Vec<Vec<[f64; 2]>>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Solved {
    growth: Vec<[f64; 2]>,
    expected: Option<u64>,
    complete: bool,
    note: Option<String>,
    solutions: Vec<Traced>,
}

#[derive(Serialize)]
struct Grown {
    growth: Vec<[f64; 2]>,
    t_last: f64,
    halt: String,
    tips: Vec<Vec<[f64; 2]>>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn growth_points(angles: &[f64]) -> Vec<C64> {
    angles.iter().map(|a| unit(a.to_radians())).collect()
}

fn charges(flat: &[f64]) -> Result<Vec<C64>, String> {
    if flat.len() % 2 != 0 {
        return Err("charges need an even number of coordinates".into());
    }
    Ok(flat.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

fn configuration(angles: &[f64], xi: Vec<C64>) -> Result<Configuration, String> {
    let raw = RawConfiguration {
        uniformization: Uniformization::Disk,
        x: growth_points(angles),
        xi,
        u: Some(Point::real(-1.0)),
    };
    Configuration::new(&raw).map_err(|e| e.to_string())
}

fn traced(cfg: &Configuration) -> Traced {
    let residual = sle0::stationary::stationary_residual(cfg).max_abs;
    let xi = cfg.xi().into_iter().map(pair).collect();
    match realized_pattern(cfg, &TraceOptions::default()) {
        Ok((traces, pattern)) => Traced {
            xi,
            residual,
            pattern: Some(pattern.to_string()),
            curves: traces.iter().map(|t| t.points.iter().copied().map(pair).collect()).collect(),
            error: None,
        },
        Err(e) => Traced { xi, residual, pattern: None, curves: vec![], error: Some(e) },
    }
}

fn json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("plain data serializes"),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

/// All solutions with `m` charges, each traced.
pub fn solve_json(angles: &[f64], m: usize, seed: u64) -> String {
    json((|| {
        let x = growth_points(angles);
        let opts = SolverOptions { seed, ..SolverOptions::default() };
        let set = solve_stationary(Uniformization::Disk, &x, Point::real(-1.0), m, &opts).map_err(|e| e.to_string())?;
        let solutions = set
            .solutions
            .iter()
            .map(|s| configuration(angles, s.xi()).map(|cfg| traced(&cfg)))
            .collect::<Result<Vec<_>, _>>()?;
        let growth = configuration(angles, vec![])?.x().iter().copied().map(pair).collect();
        Ok(Solved {
            growth,
            expected: set.expected.map(|e| e as u64),
            complete: set.complete,
            note: set.explanation,
            solutions,
        })
    })())
}

/// Traces the level lines for user-supplied charges.
pub fn trace_json(angles: &[f64], xi: &[f64]) -> String {
    json(charges(xi).and_then(|xi| configuration(angles, xi)).map(|cfg| traced(&cfg)))
}

/// Grows all curves with unit weights and returns their tips in the disk.
pub fn evolve_json(angles: &[f64], xi: &[f64], t_end: f64, dt: f64) -> String {
    json((|| {
        let cfg = configuration(angles, charges(xi)?)?;
        let map = MobiusMap::to_normal_form(&cfg);
        let normal = transport_configuration(&cfg, &map).map_err(|e| e.to_string())?;
        let opts = EvolveOptions { dt, t_end, weights: CapacityWeights::Uniform, ..EvolveOptions::default() };
        let h = run_flow(&normal, &opts).map_err(|e| e.to_string())?;
        let back = map.inverse();
        let tips = reconstruct_tips(&h, TIP_SAMPLES)
            .iter()
            .map(|tip| tip.points.iter().filter_map(|&z| back.apply_finite(z).finite()).map(pair).collect())
            .collect();
        let halt = match h.halt {
            Halt::Completed => "completed".to_string(),
            Halt::Collision { t, .. } => format!("collision at t = {t:.5}"),
            Halt::NonFinite { t } => format!("non-finite state at t = {t:.5}"),
        };
        Ok(Grown { growth: cfg.x().iter().copied().map(pair).collect(), t_last: h.last().t, halt, tips })
    })())
}

#[wasm_bindgen]
pub fn solve(angles: &[f64], m: u32, seed: u32) -> String {
    solve_json(angles, m as usize, seed as u64)
}

#[wasm_bindgen]
pub fn trace(angles: &[f64], xi: &[f64]) -> String {
    trace_json(angles, xi)
}

#[wasm_bindgen]
pub fn grow(angles: &[f64], xi: &[f64], t_end: f64, dt: f64) -> String {
    evolve_json(angles, xi, t_end, dt)
}
