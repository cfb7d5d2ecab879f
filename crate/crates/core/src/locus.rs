//! Tracing the real locus `Im R = const` as flow lines from the critical
//! points, and reading off the link pattern it realizes.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, Point, Regime, Uniformization};
use crate::link::{LinkError, LinkPattern};
use crate::rational::{derivative_from_configuration, primitive, pullback_disk, FactoredDerivative, RationalError, RationalMap};
use crate::{par_map, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Seed offset as a fraction of the smallest feature separation.
    pub seed_fraction: f64,
    /// Step as a fraction of the distance to the nearest feature.
    pub step_fraction: f64,
    /// Smallest and largest steps, as fractions of the domain scale.
    pub min_step: f64,
    pub max_step: f64,
    /// Escape radius in domain scales (only used with `u = inf`).
    pub escape_radius: f64,
    /// Snap and pole-hop radius in multiples of the seed offset.
    pub snap_multiple: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            seed_fraction: 1e-4,
            step_fraction: 0.02,
            min_step: 1e-6,
            max_step: 0.05,
            escape_radius: 1e3,
            snap_multiple: 50.0,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    /// Reached the boundary at the growth point with this index.
    Boundary(usize),
    /// Reached the finite marked point.
    Marked,
    /// Left every bounded region (the marked point at infinity).
    Escaped,
    StepLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub start: usize,
    pub points: Vec<C64>,
    pub terminal: Terminal,
    /// Indices into the problem's pole list, in crossing order.
    pub passed_poles: Vec<usize>,
    /// The level `Im R` held along the trace.
    pub level: f64,
    /// Largest `|Im R - level| / (1 + |Re R|)` seen after correction.
    pub max_level_error: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocusError {
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("seed at growth point {0} did not converge onto the locus")]
    Seed(usize),
    #[error("trace from {start} reached the boundary at {at} away from every growth point")]
    StrayBoundary { start: usize, at: C64 },
    #[error("R' vanishes at {0} away from the known critical points")]
    Degenerate(C64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PatternError {
    #[error("trace {0} did not terminate on the boundary or the marked point")]
    Unterminated(usize),
    #[error("traces {0} and {1} do not pair symmetrically")]
    Asymmetric(usize, usize),
    #[error("expected {expected} arcs, traces give {found}")]
    ArcCount { expected: usize, found: usize },
    #[error("trace {0} escaped although the marked point is finite")]
    Escaped(usize),
    #[error(transparent)]
    Invalid(#[from] LinkError),
}

/// Everything the tracer needs: the map, the growth points and features.
#[derive(Clone, Debug)]
pub struct LocusProblem {
    pub domain: Uniformization,
    pub map: RationalMap,
    pub critical: Vec<C64>,
    pub poles: Vec<C64>,
    pub marked: Point,
    center: C64,
    scale: f64,
    separation: f64,
}

/// Derivative in the configuration's own coordinates; the constant phase
/// makes `R` real along the boundary up to an additive constant.
fn own_derivative(cfg: &Configuration) -> Result<FactoredDerivative, RationalError> {
    if cfg.is_normal_form() {
        return derivative_from_configuration(cfg);
    }
    if let Ok(d) = pullback_disk(cfg) {
        return Ok(d);
    }
    let u = cfg.u().finite().expect("finite marked point outside the normal form");
    let exponent = 2 * cfg.m() as i64 - cfg.n() as i64 - 2;
    let mut zeros = cfg.x().to_vec();
    let mut poles: Vec<(C64, usize)> = cfg.xi().into_iter().map(|p| (p, 2)).collect();
    if exponent < 0 {
        poles.push((u, (-exponent) as usize));
    } else {
        zeros.extend(std::iter::repeat(u).take(exponent as usize));
    }
    let mut d = FactoredDerivative { zeros, poles, scale: C64::new(1.0, 0.0) };
    let domain = cfg.uniformization();
    let feats: Vec<C64> = cfg.x().iter().copied().chain(cfg.xi()).chain([u]).collect();
    let sample = |k: usize| match domain {
        Uniformization::Disk => C64::from_polar(1.0, -std::f64::consts::PI + (k as f64 + 0.5) * std::f64::consts::TAU / 64.0),
        Uniformization::HalfPlane => {
            let lo = feats.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            let hi = feats.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            C64::new(lo - 1.0 + (hi - lo + 2.0) * k as f64 / 63.0, 0.0)
        }
    };
    let z0 = (0..64)
        .map(sample)
        .max_by(|a, b| {
            let da = feats.iter().map(|f| (a - f).norm()).fold(f64::INFINITY, f64::min);
            let db = feats.iter().map(|f| (b - f).norm()).fold(f64::INFINITY, f64::min);
            da.total_cmp(&db)
        })
        .unwrap();
    let tangent = match domain {
        Uniformization::Disk => C64::i() * z0,
        Uniformization::HalfPlane => C64::new(1.0, 0.0),
    };
    let w = d.eval(z0) * tangent;
    d.scale = w.conj() / w.norm();
    Ok(d)
}

impl LocusProblem {
    pub fn from_configuration(cfg: &Configuration) -> Result<Self, LocusError> {
        let map = primitive(&own_derivative(cfg)?)?;
        let critical = cfg.x().to_vec();
        let poles = cfg.xi();
        let feats: Vec<C64> = critical.iter().chain(&poles).copied().collect();
        let (center, scale) = match cfg.uniformization() {
            Uniformization::Disk => (C64::new(0.0, 0.0), 1.0),
            Uniformization::HalfPlane => {
                let mut pts: Vec<C64> = critical.clone();
                if let Point::Finite(u) = cfg.u() {
                    pts.push(u);
                }
                let center = pts.iter().sum::<C64>() / pts.len() as f64;
                let spread = feats.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
                (center, spread.max(cfg.min_separation()).max(1e-300))
            }
        };
        let mut separation = cfg.min_separation();
        if let Point::Finite(u) = cfg.u() {
            for z in &feats {
                separation = separation.min((z - u).norm());
            }
        }
        Ok(LocusProblem {
            domain: cfg.uniformization(),
            map,
            critical,
            poles,
            marked: cfg.u(),
            center,
            scale,
            separation,
        })
    }

    pub fn seed_offset(&self, opts: &TraceOptions) -> f64 {
        opts.seed_fraction * self.separation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn nearest_feature(&self, z: C64) -> f64 {
        let mut d = f64::INFINITY;
        for &c in self.critical.iter().chain(self.map.critical_points()) {
            d = d.min((z - c).norm());
        }
        for &(p, _) in &self.map.derivative().poles {
            d = d.min((z - p).norm());
        }
        if let Point::Finite(u) = self.marked {
            d = d.min((z - u).norm());
        }
        d
    }

    fn boundary_gap(&self, z: C64) -> f64 {
        match self.domain {
            Uniformization::HalfPlane => z.im,
            Uniformization::Disk => 1.0 - z.norm(),
        }
    }

    /// Unit direction of the level line, oriented along `reference`.
    fn direction(&self, z: C64, reference: C64) -> Result<C64, LocusError> {
        let d = self.map.eval_derivative(z);
        let n = d.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(LocusError::Degenerate(z));
        }
        let v = d.conj() / n;
        Ok(if (v * reference.conj()).re < 0.0 { -v } else { v })
    }

    /// Moves `z` onto `Im R = level` along the gradient of `Im R`.
    fn correct(&self, mut z: C64, level: f64, steps: usize) -> C64 {
        for _ in 0..steps {
            let d = self.map.eval_derivative(z);
            let n2 = d.norm_sqr();
            if !(n2 > 0.0) || !n2.is_finite() {
                break;
            }
            let err = self.map.eval(z).im - level;
            z -= C64::i() * d.conj() * (err / n2);
        }
        z
    }

    fn level_error(&self, z: C64, level: f64) -> f64 {
        let r = self.map.eval(z);
        (r.im - level).abs() / (1.0 + r.re.abs())
    }
}

pub fn trace_from(problem: &LocusProblem, j: usize, opts: &TraceOptions) -> Result<Trace, LocusError> {
    let x = problem.critical[j];
    let eps = problem.seed_offset(opts);
    let snap = opts.snap_multiple * eps;
    let normal = problem.domain.inward_normal(x);
    let level = problem.map.eval(x).im;

    let mut z = x + normal * eps;
    let mut seeded = false;
    for _ in 0..10 {
        if problem.level_error(z, level) < 1e-12 {
            seeded = true;
            break;
        }
        z = problem.correct(z, level, 1);
    }
    if !seeded && problem.level_error(z, level) >= 1e-9 {
        return Err(LocusError::Seed(j));
    }

    let mut points = vec![x, z];
    let mut tangent = normal;
    let mut passed = Vec::new();
    let mut max_err = problem.level_error(z, level);
    let h_min = opts.min_step * problem.scale;
    let h_max = opts.max_step * problem.scale;

    for _ in 0..opts.max_steps {
        if let Point::Finite(u) = problem.marked {
            if (z - u).norm() < snap {
                points.push(u);
                return Ok(Trace { start: j, points, terminal: Terminal::Marked, passed_poles: passed, level, max_level_error: max_err });
            }
        }
        if problem.boundary_gap(z) < 0.5 * eps {
            let (k, d) = problem
                .critical
                .iter()
                .enumerate()
                .map(|(k, &c)| (k, (z - c).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if d < snap && k != j {
                points.push(problem.critical[k]);
                return Ok(Trace { start: j, points, terminal: Terminal::Boundary(k), passed_poles: passed, level, max_level_error: max_err });
            }
            return Err(LocusError::StrayBoundary { start: j, at: z });
        }
        if problem.marked.is_infinite() && (z - problem.center).norm() > opts.escape_radius * problem.scale {
            return Ok(Trace { start: j, points, terminal: Terminal::Escaped, passed_poles: passed, level, max_level_error: max_err });
        }

        // hop across a pole we are heading into
        if let Some((k, &p)) = problem
            .poles
            .iter()
            .enumerate()
            .filter(|(_, &p)| (z - p).norm() < snap && ((p - z) * tangent.conj()).re > 0.0)
            .min_by(|a, b| (z - a.1).norm().total_cmp(&(z - b.1).norm()))
        {
            let hopped = problem.correct(2.0 * p - z, level, 3);
            passed.push(k);
            points.push(hopped);
            z = hopped;
            max_err = max_err.max(problem.level_error(z, level));
            continue;
        }

        let h = (opts.step_fraction * problem.nearest_feature(z)).clamp(h_min, h_max);
        let k1 = problem.direction(z, tangent)?;
        let k2 = problem.direction(z + k1 * (0.5 * h), k1)?;
        let k3 = problem.direction(z + k2 * (0.5 * h), k1)?;
        let k4 = problem.direction(z + k3 * h, k1)?;
        let predicted = z + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        let corrected = problem.correct(predicted, level, 3);
        tangent = problem.direction(corrected, k1)?;
        z = corrected;
        max_err = max_err.max(problem.level_error(z, level));
        points.push(z);
    }
    Ok(Trace { start: j, points, terminal: Terminal::StepLimit, passed_poles: passed, level, max_level_error: max_err })
}

/// One trace per growth point, computed in parallel.
pub fn trace_all(problem: &LocusProblem, opts: &TraceOptions) -> Vec<Result<Trace, LocusError>> {
    par_map((0..problem.critical.len()).collect(), |j| trace_from(problem, j, opts))
}

pub fn extract_pattern(traces: &[Trace], cfg: &Configuration) -> Result<LinkPattern, PatternError> {
    let n = cfg.n();
    let mut arcs = Vec::new();
    let mut rays = Vec::new();
    for t in traces {
        match t.terminal {
            Terminal::Boundary(k) => {
                let back = traces.iter().find(|s| s.start == k).map(|s| &s.terminal);
                if back != Some(&Terminal::Boundary(t.start)) {
                    return Err(PatternError::Asymmetric(t.start, k));
                }
                if t.start < k {
                    arcs.push((t.start, k));
                }
            }
            Terminal::Marked => rays.push(t.start),
            Terminal::Escaped if cfg.u().is_infinite() => rays.push(t.start),
            Terminal::Escaped => return Err(PatternError::Escaped(t.start)),
            Terminal::StepLimit => return Err(PatternError::Unterminated(t.start)),
        }
    }
    if cfg.regime() == Regime::Underscreening && arcs.len() != cfg.m() {
        return Err(PatternError::ArcCount { expected: cfg.m(), found: arcs.len() });
    }
    Ok(LinkPattern::new(arcs, rays, n)?)
}

/// Traces every growth point of `cfg` and extracts its pattern.
pub fn realized_pattern(cfg: &Configuration, opts: &TraceOptions) -> Result<(Vec<Trace>, LinkPattern), String> {
    let problem = LocusProblem::from_configuration(cfg).map_err(|e| e.to_string())?;
    let traces: Vec<Trace> = trace_all(&problem, opts).into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let pattern = extract_pattern(&traces, cfg).map_err(|e| e.to_string())?;
    Ok((traces, pattern))
}

/// Distance from `z` to a polyline.
pub fn distance_to_polyline(z: C64, line: &[C64]) -> f64 {
    match line.len() {
        0 => f64::INFINITY,
        1 => (z - line[0]).norm(),
        _ => line
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let ab = b - a;
                let len2 = ab.norm_sqr();
                let t = if len2 > 0.0 { ((z - a) * ab.conj()).re / len2 } else { 0.0 };
                (z - (a + ab * t.clamp(0.0, 1.0))).norm()
            })
            .fold(f64::INFINITY, f64::min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::enumerate_link_patterns;
    use crate::solver::{solve_half_plane, SolverOptions};
    use proptest::prelude::*;
    use std::collections::HashSet;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn single_point_traces_the_imaginary_axis() {
        let cfg = Configuration::half_plane(&[0.0], &[]).unwrap();
        let problem = LocusProblem::from_configuration(&cfg).unwrap();
        let t = trace_from(&problem, 0, &TraceOptions::default()).unwrap();
        assert_eq!(t.terminal, Terminal::Escaped);
        let dev = t.points.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "{dev}");
        assert_eq!(extract_pattern(&[t], &cfg).unwrap(), LinkPattern::new(vec![], vec![0], 1).unwrap());
    }

    #[test]
    fn semicircle() {
        let cfg = Configuration::half_plane(&[-1.0, 1.0], &[c(0.0, 0.0)]).unwrap();
        let (traces, pattern) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
        assert_eq!(traces[0].terminal, Terminal::Boundary(1));
        for t in &traces {
            let dev = t.points.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-6, "{dev}");
            assert!(t.max_level_error < 1e-6);
        }
        assert_eq!(pattern, LinkPattern::new(vec![(0, 1)], vec![], 2).unwrap());
    }

    #[test]
    fn three_points_realize_both_patterns() {
        let s = 1.0 / 3f64.sqrt();
        let cfg = Configuration::half_plane(&[-1.0, 0.0, 1.0], &[c(s, 0.0)]).unwrap();
        let (_, p) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
        assert_eq!(p, LinkPattern::new(vec![(1, 2)], vec![0], 3).unwrap());
        let cfg = Configuration::half_plane(&[-1.0, 0.0, 1.0], &[c(-s, 0.0)]).unwrap();
        let (_, q) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
        assert_eq!(q, p.mirrored(3));
    }

    #[test]
    fn figure_4_14_crosses_a_pole() {
        let s3 = 3f64.sqrt();
        let cfg = Configuration::disk(
            &[C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, -PI / 3.0)],
            &[c(2.0 - s3, 0.0), c(2.0 + s3, 0.0)],
        )
        .unwrap();
        let (traces, pattern) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
        assert_eq!(pattern, LinkPattern::new(vec![(0, 1)], vec![], 2).unwrap());
        assert!(traces.iter().all(|t| t.passed_poles.len() == 1));
        assert!(traces.iter().all(|t| t.max_level_error < 1e-6));
    }

    #[test]
    fn figure_4_1_runs_to_the_marked_point() {
        let cfg = Configuration::disk(&[c(1.0, 0.0)], &[]).unwrap();
        let (traces, pattern) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
        assert_eq!(traces[0].terminal, Terminal::Marked);
        assert_eq!(pattern.rays, vec![0]);
    }

    #[test]
    fn re_r_is_monotone_between_pole_crossings() {
        let s3 = 3f64.sqrt();
        let cfg = Configuration::disk(
            &[C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, -PI / 3.0)],
            &[c(2.0 - s3, 0.0), c(2.0 + s3, 0.0)],
        )
        .unwrap();
        let problem = LocusProblem::from_configuration(&cfg).unwrap();
        let t = trace_from(&problem, 0, &TraceOptions::default()).unwrap();
        let vals: Vec<f64> = t.points[1..t.points.len() - 1].iter().map(|&z| problem.map.eval(z).re).collect();
        let steps: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
        let up = steps.iter().filter(|d| **d > 0.0).count();
        let down = steps.iter().filter(|d| **d < 0.0).count();
        // the only reversal is the jump across the pole
        assert_eq!(up.min(down), t.passed_poles.len());
        assert_eq!(up + down, steps.len());
    }

    #[test]
    fn patterns_exhaust_enumeration() {
        let xs = [-1.3, -0.4, 0.1, 0.9, 2.2];
        for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2)] {
            let set = solve_half_plane(&xs[..n], m, &SolverOptions::default()).unwrap();
            let mut seen = HashSet::new();
            for s in &set.solutions {
                let cfg = Configuration::half_plane(&xs[..n], &s.xi()).unwrap();
                let (_, p) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
                seen.insert(p);
            }
            let all: HashSet<_> = enumerate_link_patterns(n, m).into_iter().collect();
            assert_eq!(seen, all, "(n,m)=({n},{m})");
        }
    }

    #[test]
    fn polyline_distance() {
        let line = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)];
        assert!((distance_to_polyline(c(0.5, 0.3), &line) - 0.3).abs() < 1e-15);
        assert!((distance_to_polyline(c(2.0, 0.5), &line) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn mirrored_configuration_traces_mirror(xs in proptest::collection::btree_set(-20i32..20, 3..4)) {
            let xs: Vec<f64> = xs.into_iter().map(|v| v as f64 / 10.0).collect();
            let set = solve_half_plane(&xs, 1, &SolverOptions::default()).unwrap();
            let opts = TraceOptions::default();
            let mirror_x: Vec<f64> = xs.iter().rev().map(|v| -v).collect();
            for s in &set.solutions {
                let cfg = Configuration::half_plane(&xs, &s.xi()).unwrap();
                let mirror_xi: Vec<C64> = s.xi().iter().map(|z| -z.conj()).collect();
                let mcfg = Configuration::half_plane(&mirror_x, &mirror_xi).unwrap();
                let p = LocusProblem::from_configuration(&cfg).unwrap();
                let q = LocusProblem::from_configuration(&mcfg).unwrap();
                for j in 0..xs.len() {
                    let a = trace_from(&p, j, &opts).unwrap();
                    let b = trace_from(&q, xs.len() - 1 - j, &opts).unwrap();
                    prop_assert!(a.max_level_error < 1e-6);
                    let limit = 10.0 * p.scale();
                    let reflected: Vec<C64> = b.points.iter().map(|z| -z.conj()).take_while(|z| z.norm() < 2.0 * limit).collect();
                    for z in a.points.iter().filter(|z| z.norm() < limit).step_by(7) {
                        prop_assert!(distance_to_polyline(*z, &reflected) < 1e-6);
                    }
                }
            }
        }
    }
}
