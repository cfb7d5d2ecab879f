//! Multi-slit chordal Loewner flow driven by a stationary configuration in
//! the upper half-plane with `u = inf`.
//!
//! Growth points, screening charges and monitor points are integrated
//! together with a fixed-step RK4 scheme. Each step is split into `2^k`
//! substeps when the growth points come close to each other.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, Point, ScreeningCharges, Uniformization};
use crate::stationary::{drift_at, null_vector_at, residual_at};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapacityWeights {
    /// `nu_j = 1` for every curve.
    Uniform,
    /// Time-independent weights.
    Constant { nu: Vec<f64> },
    /// One curve grows at a time, cycling through them every `period`.
    Sequential { period: f64 },
}

impl CapacityWeights {
    /// Weight one on curve `j`, zero elsewhere.
    pub fn single(j: usize, n: usize) -> Self {
        let mut nu = vec![0.0; n];
        nu[j] = 1.0;
        CapacityWeights::Constant { nu }
    }

    pub fn at(&self, t: f64, n: usize) -> Vec<f64> {
        match self {
            CapacityWeights::Uniform => vec![1.0; n],
            CapacityWeights::Constant { nu } => nu.clone(),
            CapacityWeights::Sequential { period } => {
                let mut nu = vec![0.0; n];
                if n > 0 {
                    let k = (t / period).floor().max(0.0) as usize % n;
                    nu[k] = 1.0;
                }
                nu
            }
        }
    }

    pub fn is_uniform(&self) -> bool {
        match self {
            CapacityWeights::Uniform => true,
            CapacityWeights::Constant { nu } => nu.iter().all(|&v| v == 1.0),
            CapacityWeights::Sequential { .. } => false,
        }
    }

    fn check(&self, n: usize) -> Result<(), LoewnerError> {
        match self {
            CapacityWeights::Uniform => Ok(()),
            CapacityWeights::Constant { nu } => {
                if nu.len() != n {
                    return Err(LoewnerError::Weights(format!("{} weights for {n} curves", nu.len())));
                }
                if nu.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(LoewnerError::Weights("weights must be finite and nonnegative".into()));
                }
                Ok(())
            }
            CapacityWeights::Sequential { period } => {
                if !(period.is_finite() && *period > 0.0) {
                    return Err(LoewnerError::Weights("sequential period must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_end: f64,
    pub monitors: Vec<C64>,
    pub weights: CapacityWeights,
    pub collision_gap: f64,
    pub swallow_tol: f64,
    /// Largest stationary residual accepted for the initial configuration.
    pub stationary_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dt: 1e-4,
            t_end: 0.1,
            monitors: Vec::new(),
            weights: CapacityWeights::Uniform,
            collision_gap: 1e-5,
            swallow_tol: 1e-10,
            stationary_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoewnerError {
    #[error("Loewner evolution needs the half-plane picture with u = inf")]
    NotNormalForm,
    #[error("configuration is not stationary (residual {0:e})")]
    NotStationary(f64),
    #[error("time step and end time must be finite with dt > 0 and t_end >= 0")]
    BadStep,
    #[error("monitor point {0} is not in the upper half-plane")]
    BadMonitor(C64),
    #[error("{0}")]
    Weights(String),
}

/// A monitor point `z0` and its image: `g = z0 + shift`, `g' = dg`.
/// The displacement is stored instead of `g` so far monitors keep their
/// small `2nt/z` correction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tracked {
    pub z0: C64,
    pub shift: C64,
    pub dg: C64,
    pub swallowed: bool,
}

impl Tracked {
    pub fn g(&self) -> C64 {
        self.z0 + self.shift
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerState {
    pub t: f64,
    pub x: Vec<f64>,
    pub charges: ScreeningCharges,
    pub tracked: Vec<Tracked>,
    /// Driving velocities at this time.
    pub velocity: Vec<f64>,
}

impl LoewnerState {
    pub fn xi(&self) -> Vec<C64> {
        self.charges.points()
    }

    pub fn configuration(&self) -> Option<Configuration> {
        Configuration::half_plane(&self.x, &self.xi()).ok()
    }

    fn min_gap(&self) -> f64 {
        let reps: Vec<C64> = self.charges.fixed().iter().chain(self.charges.paired()).copied().collect();
        feature_gap(&self.x, &reps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Halt {
    Completed,
    /// Two growth points, or a growth point and a charge, came within the
    /// collision gap.
    Collision { t: f64, gap: f64 },
    NonFinite { t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub states: Vec<LoewnerState>,
    pub weights: CapacityWeights,
    pub dt: f64,
    pub halt: Halt,
    /// Time at which each monitor was swallowed, if it was.
    pub swallowed_at: Vec<Option<f64>>,
}

impl History {
    pub fn last(&self) -> &LoewnerState {
        self.states.last().expect("history has the initial state")
    }

    pub fn n(&self) -> usize {
        self.states[0].x.len()
    }

    /// Growth points and their velocities at time `r`, by cubic Hermite
    /// interpolation on the recorded grid.
    pub fn x_at(&self, r: f64) -> Vec<f64> {
        let s = &self.states;
        if s.len() == 1 || r <= s[0].t {
            return s[0].x.clone();
        }
        let last = s.len() - 1;
        if r >= s[last].t {
            return s[last].x.clone();
        }
        let i = s.partition_point(|st| st.t <= r).saturating_sub(1).min(last - 1);
        let (a, b) = (&s[i], &s[i + 1]);
        let h = b.t - a.t;
        let u = (r - a.t) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        (0..a.x.len())
            .map(|j| h00 * a.x[j] + h10 * h * a.velocity[j] + h01 * b.x[j] + h11 * h * b.velocity[j])
            .collect()
    }
}

fn boundary_speed(x: &[f64], charges: &[C64], xi: &[C64], nu: &[f64]) -> f64 {
    let mut speed = driving_velocity(x, xi, nu).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for c in charges {
        let v: C64 = x.iter().zip(nu).map(|(&xj, &w)| 2.0 * w / (c - xj)).sum();
        speed = speed.max(v.norm());
    }
    speed
}

/// Smallest distance between growth points, and from a growth point to a
/// charge. Either going to zero makes the flow singular.
fn feature_gap(x: &[f64], charges: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            gap = gap.min((x[i] - x[j]).abs());
        }
        for c in charges {
            gap = gap.min((c - x[i]).norm());
        }
    }
    gap
}

/// `x_j' = nu_j dlogZ/dx_j + sum_{k != j} 2 nu_k / (x_j - x_k)` with
/// `dlogZ/dx_j = sum 2/(x_j - x_k) - sum 4/(x_j - xi_l)`.
pub fn driving_velocity(x: &[f64], xi: &[C64], nu: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            let mut dlog = 0.0;
            let mut passive = 0.0;
            for k in 0..n {
                if k != j {
                    let d = x[j] - x[k];
                    dlog += 2.0 / d;
                    passive += 2.0 * nu[k] / d;
                }
            }
            for &z in xi {
                dlog -= (4.0 / (C64::new(x[j], 0.0) - z)).re;
            }
            nu[j] * dlog + passive
        })
        .collect()
}

/// Packed state: `x`, boundary charges, pair representatives, then for each
/// monitor its shift and derivative.
struct Layout {
    n: usize,
    fixed: usize,
    paired: usize,
    monitors: usize,
}

impl Layout {
    fn len(&self) -> usize {
        self.n + self.fixed + self.paired + 2 * self.monitors
    }

    fn pack(&self, x: &[f64], ch: &ScreeningCharges, tracked: &[Tracked]) -> Vec<C64> {
        let mut y = Vec::with_capacity(self.len());
        y.extend(x.iter().map(|&v| C64::new(v, 0.0)));
        y.extend(ch.fixed().iter().map(|z| C64::new(z.re, 0.0)));
        y.extend_from_slice(ch.paired());
        for tr in tracked {
            y.push(tr.shift);
            y.push(tr.dg);
        }
        y
    }

    fn x(&self, y: &[C64]) -> Vec<f64> {
        y[..self.n].iter().map(|z| z.re).collect()
    }

    fn charges(&self, y: &[C64]) -> Vec<C64> {
        let mut xi: Vec<C64> = y[self.n..self.n + self.fixed].to_vec();
        for &z in &y[self.n + self.fixed..self.n + self.fixed + self.paired] {
            xi.push(z);
            xi.push(z.conj());
        }
        xi
    }

    fn rhs(&self, y: &[C64], nu: &[f64], z0: &[C64], live: &[bool]) -> Vec<C64> {
        let x = self.x(y);
        let xi = self.charges(y);
        let mut out = Vec::with_capacity(y.len());
        out.extend(driving_velocity(&x, &xi, nu).into_iter().map(|v| C64::new(v, 0.0)));
        let flow = |z: C64| -> C64 { x.iter().zip(nu).map(|(&xj, &v)| 2.0 * v / (z - xj)).sum() };
        let charges = self.n..self.n + self.fixed + self.paired;
        for i in charges {
            let f = flow(y[i]);
            out.push(if i < self.n + self.fixed { C64::new(f.re, 0.0) } else { f });
        }
        let base = self.n + self.fixed + self.paired;
        for k in 0..self.monitors {
            if !live[k] {
                out.push(C64::new(0.0, 0.0));
                out.push(C64::new(0.0, 0.0));
                continue;
            }
            let g = z0[k] + y[base + 2 * k];
            let dg = y[base + 2 * k + 1];
            let mut vel = C64::new(0.0, 0.0);
            let mut dvel = C64::new(0.0, 0.0);
            for (&xj, &v) in x.iter().zip(nu) {
                let inv = 1.0 / (g - xj);
                vel += 2.0 * v * inv;
                dvel -= 2.0 * v * inv * inv;
            }
            out.push(vel);
            out.push(dg * dvel);
        }
        out
    }
}

fn axpy(y: &[C64], k: &[C64], h: f64) -> Vec<C64> {
    y.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

fn rk4_step(layout: &Layout, weights: &CapacityWeights, t: f64, h: f64, y: &[C64], z0: &[C64], live: &[bool]) -> Vec<C64> {
    let n = layout.n;
    let k1 = layout.rhs(y, &weights.at(t, n), z0, live);
    let k2 = layout.rhs(&axpy(y, &k1, 0.5 * h), &weights.at(t + 0.5 * h, n), z0, live);
    let k3 = layout.rhs(&axpy(y, &k2, 0.5 * h), &weights.at(t + 0.5 * h, n), z0, live);
    let k4 = layout.rhs(&axpy(y, &k3, h), &weights.at(t + h, n), z0, live);
    y.iter()
        .enumerate()
        .map(|(i, v)| v + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
        .collect()
}

/// Integrates the flow from a stationary configuration, recording one state
/// per grid step of size `dt`.
pub fn evolve(cfg: &Configuration, opts: &EvolveOptions) -> Result<History, LoewnerError> {
    if !cfg.is_normal_form() {
        return Err(LoewnerError::NotNormalForm);
    }
    if !(opts.dt.is_finite() && opts.dt > 0.0 && opts.t_end.is_finite() && opts.t_end >= 0.0) {
        return Err(LoewnerError::BadStep);
    }
    let n = cfg.n();
    opts.weights.check(n)?;
    for &z in &opts.monitors {
        if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
            return Err(LoewnerError::BadMonitor(z));
        }
    }
    let x0 = cfg.x_real();
    let xi0 = cfg.xi();
    let res = residual_at(cfg.x(), &xi0, Point::Infinity).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(res < opts.stationary_tol) {
        return Err(LoewnerError::NotStationary(res));
    }

    let charges = cfg.charges().clone();
    let layout = Layout { n, fixed: charges.fixed().len(), paired: charges.paired().len(), monitors: opts.monitors.len() };
    let z0 = opts.monitors.clone();
    let tracked: Vec<Tracked> = z0
        .iter()
        .map(|&z| Tracked { z0: z, shift: C64::new(0.0, 0.0), dg: C64::new(1.0, 0.0), swallowed: false })
        .collect();
    let state = LoewnerState {
        t: 0.0,
        velocity: driving_velocity(&x0, &xi0, &opts.weights.at(0.0, n)),
        x: x0.clone(),
        charges: charges.clone(),
        tracked,
    };
    let mut swallowed_at = vec![None; z0.len()];
    let mut live = vec![true; z0.len()];
    let mut states = vec![state];
    let mut y = layout.pack(&x0, &charges, &states[0].tracked);
    let mut t = 0.0;
    let mut halt = Halt::Completed;
    let steps = (opts.t_end / opts.dt - 1e-9).ceil().max(0.0) as usize;

    for step in 1..=steps {
        let t_next = (step as f64 * opts.dt).min(opts.t_end);
        let mut gap = f64::INFINITY;
        while t < t_next {
            let x = layout.x(&y);
            let reps: Vec<C64> = y[n..n + layout.fixed + layout.paired].to_vec();
            gap = feature_gap(&x, &reps);
            if !(gap >= opts.collision_gap) {
                break;
            }
            let h = t_next - t;
            let nu = opts.weights.at(t, n);
            let speed = boundary_speed(&x, &reps, &layout.charges(&y), &nu);
            // split until one substep moves a boundary point by at most 0.5% of the gap
            let mut sub = 0;
            while sub < 60 && gap.is_finite() && h * 0.5f64.powi(sub) * speed > 0.005 * gap {
                sub += 1;
            }
            let hs = h * 0.5f64.powi(sub);
            y = rk4_step(&layout, &opts.weights, t, hs, &y, &z0, &live);
            t = if sub == 0 { t_next } else { t + hs };
            if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                break;
            }
        }
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            halt = Halt::NonFinite { t };
            break;
        }
        let base = n + layout.fixed + layout.paired;
        for k in 0..z0.len() {
            if live[k] && (z0[k] + y[base + 2 * k]).im < opts.swallow_tol {
                live[k] = false;
                swallowed_at[k] = Some(t);
            }
        }
        let x = layout.x(&y);
        let fixed: Vec<C64> = y[n..n + layout.fixed].to_vec();
        let paired: Vec<C64> = y[n + layout.fixed..base].to_vec();
        let charges = match ScreeningCharges::from_parts(Uniformization::HalfPlane, &fixed, &paired) {
            Ok(c) => c,
            Err(_) => {
                halt = Halt::NonFinite { t };
                break;
            }
        };
        let tracked = (0..z0.len())
            .map(|k| Tracked { z0: z0[k], shift: y[base + 2 * k], dg: y[base + 2 * k + 1], swallowed: !live[k] })
            .collect();
        let state = LoewnerState {
            t,
            velocity: driving_velocity(&x, &layout.charges(&y), &opts.weights.at(t, n)),
            x,
            charges,
            tracked,
        };
        let gap = gap.min(state.min_gap());
        states.push(state);
        if gap < opts.collision_gap {
            halt = Halt::Collision { t, gap };
            break;
        }
    }
    Ok(History { states, weights: opts.weights.clone(), dt: opts.dt, halt, swallowed_at })
}

/// `N = g' prod (g - x_j) / prod (g - xi_l)^2` in the `u = inf` picture.
pub fn field_integral(g: C64, dg: C64, x: &[f64], xi: &[C64]) -> C64 {
    let mut v = dg;
    for &xj in x {
        v *= g - xj;
    }
    for &z in xi {
        v /= (g - z) * (g - z);
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorDrift {
    pub z0: C64,
    pub n0: C64,
    pub max_drift: f64,
    pub swallowed_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IomReport {
    pub monitors: Vec<MonitorDrift>,
    /// Last grid time included.
    pub t_max: f64,
    pub notes: Vec<String>,
}

impl IomReport {
    /// Largest drift over monitors that were never swallowed in the window.
    pub fn max_drift(&self) -> f64 {
        self.monitors.iter().filter(|m| m.swallowed_at.is_none()).map(|m| m.max_drift).fold(0.0, f64::max)
    }
}

/// Relative drift `|N_t / N_0 - 1|` per monitor over grid times `t <= t_max`.
pub fn iom_drift(history: &History, t_max: Option<f64>) -> IomReport {
    let t_max = t_max.unwrap_or(f64::INFINITY).min(history.last().t);
    let first = &history.states[0];
    let xi0 = first.xi();
    let mut monitors: Vec<MonitorDrift> = first
        .tracked
        .iter()
        .map(|tr| MonitorDrift {
            z0: tr.z0,
            n0: field_integral(tr.g(), tr.dg, &first.x, &xi0),
            max_drift: 0.0,
            swallowed_at: None,
        })
        .collect();
    for st in history.states.iter().filter(|s| s.t <= t_max) {
        let xi = st.xi();
        for (k, tr) in st.tracked.iter().enumerate() {
            if tr.swallowed {
                monitors[k].swallowed_at.get_or_insert(st.t);
                continue;
            }
            let val = field_integral(tr.g(), tr.dg, &st.x, &xi);
            let drift = (val / monitors[k].n0 - 1.0).norm();
            monitors[k].max_drift = monitors[k].max_drift.max(drift);
        }
    }
    let notes = monitors
        .iter()
        .filter_map(|m| m.swallowed_at.map(|t| format!("monitor {} swallowed at t = {t}; excluded", m.z0)))
        .collect();
    IomReport { monitors, t_max, notes }
}

/// Largest stationary residual along the trajectory.
pub fn stationarity_drift(history: &History) -> f64 {
    history
        .states
        .iter()
        .map(|st| {
            let x: Vec<C64> = st.x.iter().map(|&v| C64::new(v, 0.0)).collect();
            residual_at(&x, &st.xi(), Point::Infinity).iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Largest null vector residual of the drift vector recomputed along the trajectory.
pub fn null_vector_drift(history: &History) -> f64 {
    history
        .states
        .iter()
        .map(|st| {
            let (u, _) = drift_at(&st.x, &st.xi());
            null_vector_at(&st.x, &u).iter().fold(0.0f64, |a, v| a.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

/// Flows `w`, a point in the picture at time `s`, back to time zero, i.e.
/// evaluates `g_s^{-1}(w)`. Returns `None` if the path leaves the upper
/// half-plane.
pub fn pull_back(history: &History, s: f64, w: C64) -> Option<C64> {
    let n = history.n();
    let rhs = |r: f64, w: C64| -> C64 {
        let x = history.x_at(r);
        let nu = history.weights.at(r, n);
        -x.iter().zip(&nu).map(|(&xk, &v)| 2.0 * v / (w - xk)).sum::<C64>()
    };
    let mut w = w;
    let mut r = s;
    while r > 0.0 {
        let x = history.x_at(r);
        let d = x.iter().map(|&xk| (w - xk).norm()).fold(f64::INFINITY, f64::min);
        // the field scales like 2n/d, so steps shrink with d^2 near the boundary
        let h = history.dt.min(0.02 * d * d / n.max(1) as f64).min(r).max(1e-300);
        let k1 = rhs(r, w);
        let k2 = rhs(r - 0.5 * h, w + k1 * (0.5 * h));
        let k3 = rhs(r - 0.5 * h, w + k2 * (0.5 * h));
        let k4 = rhs(r - h, w + k3 * h);
        w += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        r -= h;
        if r < 1e-15 {
            r = 0.0;
        }
        if !(w.im > 0.0 && w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
    }
    Some(w)
}

pub const TIP_LIFT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipPolyline {
    pub curve: usize,
    pub times: Vec<f64>,
    pub points: Vec<C64>,
    /// Sample times where the backward solve left the half-plane.
    pub unreliable: Vec<f64>,
}

/// Curve tips at `samples + 1` equally spaced times in `[0, t_final]`. After
/// a collision `t_final` is the last grid time before it, since the hull
/// pinches off at the collision itself.
pub fn reconstruct_tips(history: &History, samples: usize) -> Vec<TipPolyline> {
    let n = history.n();
    let len = history.states.len();
    let t_final = match history.halt {
        Halt::Collision { .. } | Halt::NonFinite { .. } if len >= 2 => history.states[len - 2].t,
        _ => history.last().t,
    };
    let samples = samples.max(1);
    let times: Vec<f64> = (0..=samples).map(|i| t_final * i as f64 / samples as f64).collect();
    let work: Vec<(usize, f64)> = (0..n).flat_map(|j| times.iter().map(move |&s| (j, s))).collect();
    let tips = crate::par_map(work, |(j, s)| {
        if s == 0.0 {
            return Some(C64::new(history.states[0].x[j], 0.0));
        }
        let xj = history.x_at(s)[j];
        pull_back(history, s, C64::new(xj, TIP_LIFT))
    });
    let mut out: Vec<TipPolyline> =
        (0..n).map(|j| TipPolyline { curve: j, times: vec![], points: vec![], unreliable: vec![] }).collect();
    for (idx, tip) in tips.into_iter().enumerate() {
        let j = idx / times.len();
        let s = times[idx % times.len()];
        match tip {
            Some(z) => {
                out[j].times.push(s);
                out[j].points.push(z);
            }
            None => out[j].unreliable.push(s),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Configuration;
    use crate::stationary::stationary_residual;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn semicircle() -> Configuration {
        Configuration::half_plane(&[-1.0, 1.0], &[c(0.0, 0.0)]).unwrap()
    }

    fn three_one() -> Configuration {
        Configuration::half_plane(&[-1.0, 0.0, 1.0], &[c(1.0 / 3f64.sqrt(), 0.0)]).unwrap()
    }

    #[test]
    fn semicircle_driving_closed_form() {
        let opts = EvolveOptions { dt: 1e-5, t_end: 0.15, ..Default::default() };
        let h = evolve(&semicircle(), &opts).unwrap();
        assert_eq!(h.halt, Halt::Completed);
        let last = h.last();
        assert!((last.t - 0.15).abs() < 1e-12);
        assert!((last.x[1] - 0.4f64.sqrt()).abs() < 1e-8, "{}", last.x[1]);
        assert!((last.x[0] + 0.4f64.sqrt()).abs() < 1e-8);
        assert!(last.xi()[0].norm() < 1e-14);
    }

    #[test]
    fn single_curve_weights_leave_passive_point_on_one_slit_flow() {
        let opts = EvolveOptions { dt: 1e-4, t_end: 0.05, weights: CapacityWeights::single(0, 2), ..Default::default() };
        let h = evolve(&semicircle(), &opts).unwrap();
        for st in &h.states {
            let expect = 2.0 / (st.x[1] - st.x[0]);
            assert!((st.velocity[1] - expect).abs() < 1e-12);
        }
        // the passive point and the charge are both images under the flow
        let st = h.last();
        assert!(st.x[1] > 1.0 && st.xi()[0].re > 0.0);
    }

    #[test]
    fn zero_time_is_identity() {
        let opts = EvolveOptions { t_end: 0.0, monitors: vec![c(0.0, 2.0)], ..Default::default() };
        let h = evolve(&semicircle(), &opts).unwrap();
        assert_eq!(h.states.len(), 1);
        assert_eq!(h.states[0].x, vec![-1.0, 1.0]);
        assert_eq!(iom_drift(&h, None).max_drift(), 0.0);
        assert_eq!(stationarity_drift(&h), stationary_residual(&semicircle()).max_abs);
        let tips = reconstruct_tips(&h, 4);
        assert_eq!(tips[0].points[0], c(-1.0, 0.0));
        assert_eq!(tips[1].points[0], c(1.0, 0.0));
    }

    #[test]
    fn refuses_bad_input() {
        let bad = Configuration::half_plane(&[-1.0, 1.0], &[c(0.5, 0.0)]).unwrap();
        assert!(matches!(evolve(&bad, &Default::default()), Err(LoewnerError::NotStationary(_))));
        let opts = EvolveOptions { dt: 0.0, ..Default::default() };
        assert_eq!(evolve(&semicircle(), &opts), Err(LoewnerError::BadStep));
        let opts = EvolveOptions { monitors: vec![c(1.0, 0.0)], ..Default::default() };
        assert!(matches!(evolve(&semicircle(), &opts), Err(LoewnerError::BadMonitor(_))));
    }

    #[test]
    fn field_integral_conserved_for_semicircle() {
        let z = c(0.0, 2.0);
        let n0 = field_integral(z, c(1.0, 0.0), &[-1.0, 1.0], &[c(0.0, 0.0)]);
        let expect = (z * z - 1.0) / (z * z);
        assert!((n0 - expect).norm() < 1e-15);
        assert!((n0 - c(1.25, 0.0)).norm() < 1e-15);
        for weights in [CapacityWeights::Uniform, CapacityWeights::single(0, 2)] {
            let opts = EvolveOptions { dt: 1e-4, t_end: 0.2, monitors: vec![z], weights, ..Default::default() };
            let h = evolve(&semicircle(), &opts).unwrap();
            let rep = iom_drift(&h, None);
            assert!(rep.max_drift() < 1e-6, "{rep:?}");
            assert!(stationarity_drift(&h) < 1e-7);
        }
    }

    #[test]
    fn three_point_flow_stays_stationary() {
        let opts = EvolveOptions { dt: 1e-5, t_end: 0.05, ..Default::default() };
        let h = evolve(&three_one(), &opts).unwrap();
        assert!(stationarity_drift(&h) < 1e-6);
        assert!(null_vector_drift(&h) < 1e-6);
    }

    #[test]
    fn hydrodynamic_normalization() {
        let z = c(0.0, 1e6);
        let opts = EvolveOptions { dt: 1e-4, t_end: 0.1, monitors: vec![z], ..Default::default() };
        let h = evolve(&semicircle(), &opts).unwrap();
        let a = h.last().tracked[0].shift * z;
        assert!((a.re - 0.4).abs() < 1e-4 * 0.4, "{a}");
        // (3,1) runs into a collision before t = 0.1; the relation holds up to it
        let h = evolve(&three_one(), &opts).unwrap();
        assert!(matches!(h.halt, Halt::Collision { .. }));
        let last = h.last();
        let a = last.tracked[0].shift * z;
        assert!((a.re - 6.0 * last.t).abs() < 1e-4 * 6.0 * last.t, "{a}");
    }

    #[test]
    fn backward_flow_inverts_forward_flow() {
        let monitors = vec![c(0.3, 0.5), c(-2.0, 1.0), c(0.0, 3.0)];
        let opts = EvolveOptions { dt: 1e-4, t_end: 0.05, monitors: monitors.clone(), ..Default::default() };
        let h = evolve(&three_one(), &opts).unwrap();
        let last = h.last();
        for tr in &last.tracked {
            let back = pull_back(&h, last.t, tr.g()).unwrap();
            assert!((back - tr.z0).norm() < 1e-6, "{back} vs {}", tr.z0);
        }
    }

    #[test]
    fn semicircle_tips_on_unit_circle() {
        let opts = EvolveOptions { dt: 1e-4, t_end: 0.2, ..Default::default() };
        let h = evolve(&semicircle(), &opts).unwrap();
        let tips = reconstruct_tips(&h, 20);
        for poly in &tips {
            assert!(poly.unreliable.is_empty());
            assert_eq!(poly.points.len(), 21);
            for z in &poly.points {
                assert!((z.norm() - 1.0).abs() < 1e-4, "{z}");
            }
            assert!(poly.points.last().unwrap().im > 0.3);
        }
    }

    #[test]
    fn collision_halts_integration() {
        // the two curves of the semicircle meet at t = 1/4
        let opts = EvolveOptions { dt: 1e-3, t_end: 1.0, ..Default::default() };
        let h = evolve(&semicircle(), &opts).unwrap();
        match h.halt {
            Halt::Collision { t, gap } => {
                assert!(gap < 1e-5);
                assert!((t - 0.25).abs() < 1e-3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sequential_weights_cycle() {
        let w = CapacityWeights::Sequential { period: 0.1 };
        assert_eq!(w.at(0.05, 3), vec![1.0, 0.0, 0.0]);
        assert_eq!(w.at(0.15, 3), vec![0.0, 1.0, 0.0]);
        assert_eq!(w.at(0.35, 3), vec![1.0, 0.0, 0.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn drift_stays_small_under_constant_weights(a in 0.0f64..1.0, b in 0.0f64..1.0, arg in 0.3f64..2.8, r in 1.5f64..4.0) {
            prop_assume!(a + b > 0.1);
            let z = C64::from_polar(r, arg);
            let opts = EvolveOptions {
                dt: 1e-4,
                t_end: 0.05,
                monitors: vec![z],
                weights: CapacityWeights::Constant { nu: vec![a, b] },
                ..Default::default()
            };
            let h = evolve(&semicircle(), &opts).unwrap();
            prop_assert!(iom_drift(&h, None).max_drift() < 1e-6);
        }
    }
}
