//! The subcommand pipelines. Each returns a report plus the files to write;
//! nothing touches the filesystem here.

use sle0::calogero::{
    energy, fit_coupling, hamiltonian_drift, lax_square_ones, null_hamiltonians, phase_from_configuration, PhasePoint,
};
use sle0::config::{Configuration, Point, Regime};
use sle0::link::LinkPattern;
use sle0::locus::{extract_pattern, trace_all, LocusProblem, Trace};
use sle0::loewner::{
    evolve, iom_drift, null_vector_drift, reconstruct_tips, stationarity_drift, CapacityWeights, EvolveOptions, Halt,
    History,
};
use sle0::mobius::{transport_configuration, MobiusMap};
use sle0::rational::{derivative_from_configuration, primitive, residues};
use sle0::solver::{near_degenerate, solve_stationary};
use sle0::stationary::{null_vector_residual, stationary_residual, ward_residual};
use sle0::C64;

use crate::presets::{self, Preset};
use crate::report::{
    CalogeroSection, CheckRow, ConservationRow, CurveSummary, EvolveSection, FigureSection, Report, SolutionRow,
    SolveSection, TraceSection,
};
use crate::scenario::Scenario;
use crate::settings::Tolerances;
use crate::{svg, Failure};

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_T_END: f64 = 0.1;
/// The pair coupling as printed in the literature; the fit is compared to it.
pub const PRINTED_COUPLING: f64 = 8.0;

pub struct Ctx {
    pub scenario: Scenario,
    pub tol: Tolerances,
    pub all_solutions: bool,
    pub svg: bool,
    pub csv: bool,
    pub patterns: bool,
    pub tips: usize,
}

impl Ctx {
    fn dt(&self) -> f64 {
        self.scenario.dt.unwrap_or(DEFAULT_DT)
    }

    fn t_end(&self) -> f64 {
        self.scenario.t_end.unwrap_or(DEFAULT_T_END)
    }
}

pub struct Run {
    pub report: Report,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Run {
    fn new(command: &str, ctx: &Ctx) -> Self {
        Run { report: Report::new(command, &ctx.scenario, &ctx.tol), files: vec![] }
    }

    fn finish(mut self, result: Result<(), Failure>) -> Self {
        if let Err(f) = result {
            self.report.exit_code = f.code();
            self.report.messages.push(f.to_string());
        }
        let json = self.report.to_json();
        self.files.insert(0, (self.report.scenario.outputs.report.clone(), json.into_bytes()));
        self
    }
}

/// Selected configurations, tagged with their solver index when solved.
type Selected = Vec<(Option<usize>, Configuration)>;

fn normal_form(cfg: &Configuration) -> Result<(MobiusMap, Configuration), Failure> {
    let map = MobiusMap::to_normal_form(cfg);
    let normal = transport_configuration(cfg, &map).map_err(|e| Failure::Validation(e.to_string()))?;
    Ok((map, normal))
}

fn solution_row(index: usize, cfg: &Configuration, pattern: Option<String>) -> SolutionRow {
    let normal = normal_form(cfg).ok().map(|(_, c)| c);
    let nv = normal.as_ref().and_then(|c| null_vector_residual(c).ok()).map(|r| max_abs(&r));
    let ward = normal.as_ref().and_then(|c| ward_residual(c).ok()).map(|(a, b)| [a, b]);
    SolutionRow {
        index,
        xi: cfg.xi(),
        stationary_residual: stationary_residual(cfg).max_abs,
        null_vector_residual: nv,
        ward_residual: ward,
        near_degenerate: near_degenerate(cfg.x(), &cfg.xi()),
        pattern,
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Supplied charges, or the solver's solutions with the solve section filled in.
fn resolve(ctx: &Ctx, report: &mut Report, select: bool) -> Result<Selected, Failure> {
    let sc = &ctx.scenario;
    if let Some(xi) = sc.charges() {
        let raw = sc.raw(xi);
        report.validation = Some(sle0::config::validate_configuration(&raw));
        let cfg = Configuration::new(&raw).map_err(|e| Failure::Validation(e.to_string()))?;
        return Ok(vec![(None, cfg)]);
    }
    let base = sc.base()?;
    report.validation = Some(base.validate());
    let m = sc.m.unwrap_or(0);
    let set = solve_stationary(
        sc.uniformization,
        &sc.growth_points(),
        sc.marked_point(),
        m,
        &ctx.tol.solver(sc.seed),
    )
    .map_err(|e| Failure::Validation(e.to_string()))?;
    let mut cfgs = Vec::new();
    for sol in &set.solutions {
        cfgs.push(base.with_charges(sol.charges.clone()).map_err(|e| Failure::Validation(e.to_string()))?);
    }
    let rows = cfgs
        .iter()
        .enumerate()
        .map(|(k, cfg)| {
            let pattern = ctx.patterns.then(|| trace_configuration(cfg, ctx).2.ok()).flatten().map(|p| p.to_string());
            solution_row(k, cfg, pattern)
        })
        .collect();
    let mut warnings = set.warnings.clone();
    if set.regime == Regime::Threshold || (m > base.n() && set.solutions.is_empty()) {
        warnings.push("no solutions exist at threshold".into());
    }
    report.solve = Some(SolveSection {
        n: base.n(),
        m,
        regime: set.regime,
        expected: set.expected.map(|e| e as u64),
        complete: set.complete,
        explanation: set.explanation.clone(),
        warnings,
        solutions: rows,
    });
    if !set.complete {
        return Err(Failure::Incomplete(format!(
            "found {} of {} solutions",
            set.solutions.len(),
            set.expected.unwrap_or(0)
        )));
    }
    if cfgs.is_empty() {
        let why = if set.regime == Regime::Threshold { "no solutions exist at threshold" } else { "no solutions exist" };
        return Err(Failure::Validation(why.into()));
    }
    if !select || ctx.all_solutions {
        return Ok(cfgs.into_iter().enumerate().map(|(k, c)| (Some(k), c)).collect());
    }
    let k = sc.solution.unwrap_or(0);
    let count = cfgs.len();
    let cfg = cfgs
        .into_iter()
        .nth(k)
        .ok_or_else(|| Failure::Validation(format!("solution {k} requested, {count} found")))?;
    Ok(vec![(Some(k), cfg)])
}

pub fn solve(ctx: &Ctx) -> Run {
    let mut run = Run::new("solve", ctx);
    let result = (|| {
        if ctx.scenario.xi.is_some() {
            let sel = resolve(ctx, &mut run.report, true)?;
            let cfg = &sel[0].1;
            let pattern = ctx.patterns.then(|| trace_configuration(cfg, ctx).2.ok()).flatten().map(|p| p.to_string());
            let row = solution_row(0, cfg, pattern);
            let residual = row.stationary_residual;
            run.report.solve = Some(SolveSection {
                n: cfg.n(),
                m: cfg.m(),
                regime: cfg.regime(),
                expected: None,
                complete: true,
                explanation: Some("charges supplied; residuals evaluated only".into()),
                warnings: vec![],
                solutions: vec![row],
            });
            if residual >= ctx.tol.accept_tol {
                run.report.messages.push(format!(
                    "supplied charges are not stationary: residual {residual:e} >= {:e}",
                    ctx.tol.accept_tol
                ));
            }
            return Ok(());
        }
        match resolve(ctx, &mut run.report, false) {
            Err(Failure::Validation(msg)) if run.report.solve.is_some() => {
                // An empty solution set is a result, not an error.
                run.report.messages.push(msg);
                Ok(())
            }
            other => other.map(|_| ()),
        }
    })();
    run.finish(result)
}

fn trace_configuration(cfg: &Configuration, ctx: &Ctx) -> (Vec<Trace>, Option<String>, Result<LinkPattern, String>) {
    let problem = match LocusProblem::from_configuration(cfg) {
        Ok(p) => p,
        Err(e) => return (vec![], Some(e.to_string()), Err(e.to_string())),
    };
    let mut traces = Vec::new();
    let mut error = None;
    for r in trace_all(&problem, &ctx.tol.trace()) {
        match r {
            Ok(t) => traces.push(t),
            Err(e) => {
                error.get_or_insert(e.to_string());
            }
        }
    }
    if let Some(e) = error {
        return (traces, Some(e.clone()), Err(e));
    }
    let pattern = extract_pattern(&traces, cfg).map_err(|e| e.to_string());
    let error = pattern.as_ref().err().cloned();
    (traces, error, pattern)
}

fn suffixed(name: &str, index: Option<usize>, all: bool) -> String {
    match (index, all) {
        (Some(k), true) => match name.rsplit_once('.') {
            Some((stem, ext)) => format!("{stem}-{}.{ext}", k + 1),
            None => format!("{name}-{}", k + 1),
        },
        _ => name.to_string(),
    }
}

fn visible_poles(cfg: &Configuration) -> Vec<C64> {
    let ch = cfg.charges();
    ch.fixed().iter().chain(ch.paired()).copied().collect()
}

fn trace_csv(traces: &[Trace]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["trace_id", "step", "re", "im"]).expect("in-memory write");
    for t in traces {
        for (k, z) in t.points.iter().enumerate() {
            w.serialize((t.start + 1, k, z.re, z.im)).expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Traces every selected configuration and queues SVG/CSV files.
fn trace_into(ctx: &Ctx, run: &mut Run, sel: &Selected, title: &str) -> Result<Vec<Option<LinkPattern>>, Failure> {
    let out = &ctx.scenario.outputs;
    let mut patterns = Vec::new();
    let mut first_error = None;
    for (index, cfg) in sel {
        let (traces, error, pattern) = trace_configuration(cfg, ctx);
        run.report.traces.push(TraceSection {
            solution: *index,
            xi: cfg.xi(),
            curves: traces
                .iter()
                .map(|t| CurveSummary {
                    start: t.start + 1,
                    terminal: t.terminal.clone(),
                    points: t.points.len(),
                    poles_passed: t.passed_poles.len(),
                    max_level_error: t.max_level_error,
                })
                .collect(),
            pattern: pattern.as_ref().ok().map(|p| p.to_string()),
            error: error.clone(),
        });
        if let Some(e) = error {
            first_error.get_or_insert(e);
        }
        patterns.push(pattern.ok());
        if ctx.svg {
            let fig = svg::Figure {
                title,
                domain: cfg.uniformization(),
                traces: traces.iter().map(|t| t.points.as_slice()).collect(),
                critical: cfg.x(),
                poles: visible_poles(cfg),
                marked: cfg.u(),
            };
            run.files.push((suffixed(&out.svg, *index, ctx.all_solutions), svg::render(&fig).into_bytes()));
        }
        if ctx.csv {
            run.files.push((suffixed(&out.trace_csv, *index, ctx.all_solutions), trace_csv(&traces)));
        }
    }
    match first_error {
        Some(e) => Err(Failure::Pattern(e)),
        None => Ok(patterns),
    }
}

pub fn trace(ctx: &Ctx) -> Run {
    let mut run = Run::new("trace", ctx);
    let title = ctx.scenario.name.clone().unwrap_or_else(|| "real locus".into());
    let result = (|| {
        let sel = resolve(ctx, &mut run.report, true)?;
        trace_into(ctx, &mut run, &sel, &title).map(|_| ())
    })();
    run.finish(result)
}

/// Monitors in the normal-form picture.
fn monitors(ctx: &Ctx, map: &MobiusMap, normal: &Configuration) -> Result<Vec<C64>, Failure> {
    match &ctx.scenario.monitors {
        Some(list) => list
            .iter()
            .map(|&p| match p.finite().map(|z| map.apply_finite(z)) {
                Some(Point::Finite(w)) if w.im > 0.0 => Ok(w),
                _ => Err(Failure::Validation(format!("monitor {p} is not an interior point"))),
            })
            .collect(),
        None => {
            let x = normal.x_real();
            let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let (center, half) = if x.is_empty() { (0.0, 1.0) } else { (0.5 * (lo + hi), (0.5 * (hi - lo)).max(1.0)) };
            let mut out = Vec::new();
            for b in [0.5, 1.5, 3.0] {
                for a in [-1.5, -0.5, 0.5, 1.5] {
                    out.push(C64::new(center + a * half, b * half));
                }
            }
            Ok(out)
        }
    }
}

fn run_flow(ctx: &Ctx, normal: &Configuration, monitors: Vec<C64>, weights: CapacityWeights) -> Result<History, Failure> {
    let opts = EvolveOptions { dt: ctx.dt(), t_end: ctx.t_end(), monitors, weights, ..ctx.tol.evolve() };
    evolve(normal, &opts).map_err(|e| Failure::Validation(e.to_string()))
}

fn collision(h: &History, t_end: f64) -> Option<Failure> {
    match h.halt {
        Halt::Completed => None,
        Halt::Collision { t, gap } => Some(Failure::Collision(format!(
            "collision at t = {t:.6} (gap {gap:.3e}) before t_end = {t_end}"
        ))),
        Halt::NonFinite { t } => Some(Failure::Collision(format!("flow became non-finite at t = {t:.6}"))),
    }
}

fn trajectory_csv(h: &History) -> Vec<u8> {
    let n = h.n();
    let first = &h.states[0];
    let m = first.xi().len();
    let k = first.tracked.len();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("x_{j}")));
    for l in 1..=m {
        header.push(format!("xi_{l}_re"));
        header.push(format!("xi_{l}_im"));
    }
    for l in 1..=k {
        header.push(format!("g_{l}_re"));
        header.push(format!("g_{l}_im"));
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&header).expect("in-memory write");
    for st in &h.states {
        let mut row = vec![st.t];
        row.extend(&st.x);
        for z in st.xi() {
            row.push(z.re);
            row.push(z.im);
        }
        for tr in &st.tracked {
            let g = tr.g();
            row.push(g.re);
            row.push(g.im);
        }
        w.serialize(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn evolve_cmd(ctx: &Ctx) -> Run {
    let mut run = Run::new("evolve", ctx);
    let result = (|| {
        let sel = resolve(ctx, &mut run.report, true)?;
        let (_, cfg) = &sel[0];
        let (map, normal) = normal_form(cfg)?;
        let mons = monitors(ctx, &map, &normal)?;
        let h = run_flow(ctx, &normal, mons, ctx.scenario.weights())?;
        let iom = iom_drift(&h, None);
        let tips = if ctx.tips > 0 { reconstruct_tips(&h, ctx.tips) } else { vec![] };
        run.report.evolve = Some(EvolveSection {
            x0: normal.x_real(),
            xi0: normal.xi(),
            weights: h.weights.clone(),
            dt: h.dt,
            t_end: ctx.t_end(),
            steps: h.states.len() - 1,
            t_last: h.last().t,
            halt: h.halt.clone(),
            iom_max_drift: iom.max_drift(),
            iom,
            stationarity_drift: stationarity_drift(&h),
            null_vector_drift: null_vector_drift(&h),
            tips,
        });
        if ctx.csv || !ctx.svg {
            run.files.push((ctx.scenario.outputs.trajectory_csv.clone(), trajectory_csv(&h)));
        }
        collision(&h, ctx.t_end()).map_or(Ok(()), Err)
    })();
    run.finish(result)
}

fn calogero_section(ctx: &Ctx, index: Option<usize>, cfg: &Configuration) -> Result<(CalogeroSection, History), Failure> {
    let (_, normal) = normal_form(cfg)?;
    let ph = phase_from_configuration(&normal).map_err(|e| Failure::Validation(e.to_string()))?;
    let h = run_flow(ctx, &normal, vec![], CapacityWeights::Uniform)?;
    let rows = 10.min(h.states.len() - 1).max(1);
    let conservation = (0..=rows)
        .map(|r| r * (h.states.len() - 1) / rows)
        .filter(|&i| i < h.states.len())
        .map(|i| {
            let st = &h.states[i];
            ConservationRow { t: st.t, h: null_hamiltonians(&PhasePoint::new(st.x.clone(), st.velocity.clone())) }
        })
        .collect::<Vec<_>>();
    let mut conservation = conservation;
    conservation.dedup_by(|a, b| a.t == b.t);
    let section = CalogeroSection {
        solution: index,
        hamiltonians: null_hamiltonians(&ph),
        lax_square_ones: max_abs(&lax_square_ones(&ph)),
        energy: energy(&ph),
        coupling: (ph.n() >= 2).then(|| fit_coupling(&h)),
        printed_coupling: PRINTED_COUPLING,
        halt: h.halt.clone(),
        conservation,
        hamiltonian_drift: hamiltonian_drift(&h),
        x: ph.x,
        p: ph.p,
    };
    Ok((section, h))
}

pub fn calogero(ctx: &Ctx) -> Run {
    let mut run = Run::new("calogero", ctx);
    let result = (|| {
        let sel = resolve(ctx, &mut run.report, true)?;
        let mut halt = None;
        for (index, cfg) in &sel {
            let (section, h) = calogero_section(ctx, *index, cfg)?;
            run.report.calogero.push(section);
            halt = halt.or_else(|| collision(&h, ctx.t_end()));
        }
        halt.map_or(Ok(()), Err)
    })();
    run.finish(result)
}

fn check(rows: &mut Vec<CheckRow>, solution: Option<usize>, name: &str, value: f64, tolerance: f64) {
    let passed = value.is_finite() && value < tolerance;
    let value = if value.is_finite() { value } else { f64::MAX };
    rows.push(CheckRow { solution, name: name.into(), value, tolerance, passed });
}

/// A failed computation counts as the largest representable error.
fn or_max<E>(r: Result<f64, E>) -> f64 {
    r.unwrap_or(f64::MAX)
}

fn verify_one(ctx: &Ctx, index: Option<usize>, cfg: &Configuration, rows: &mut Vec<CheckRow>) {
    let tol = &ctx.tol;
    check(rows, index, "validation_failures", cfg.validate().failures().len() as f64, 0.5);
    check(rows, index, "stationary_residual", stationary_residual(cfg).max_abs, tol.accept_tol);
    let Ok((_, normal)) = normal_form(cfg) else {
        check(rows, index, "transport", f64::MAX, 0.0);
        return;
    };
    check(rows, index, "null_vector_residual", or_max(null_vector_residual(&normal).map(|r| max_abs(&r))), tol.null_vector_tol);
    let ward = ward_residual(&normal);
    check(rows, index, "ward_sum", or_max(ward.as_ref().map(|w| w.0.abs())), tol.null_vector_tol);
    check(rows, index, "ward_moment", or_max(ward.as_ref().map(|w| w.1.abs())), tol.null_vector_tol);
    check(rows, index, "residues_b", or_max(residues(&normal).map(|r| r.max_b())), tol.residue_tol);
    let critical = derivative_from_configuration(&normal)
        .map_err(|e| e.to_string())
        .and_then(|d| primitive(&d).map_err(|e| e.to_string()))
        .map(|map| {
            let found = map.critical_points_from_coefficients();
            if found.len() != normal.n() {
                return f64::MAX;
            }
            normal
                .x()
                .iter()
                .map(|x| found.iter().map(|z| (z - x).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        });
    check(rows, index, "critical_points", or_max(critical), tol.critical_point_tol);

    let (traces, _, pattern) = trace_configuration(cfg, ctx);
    let level = traces.iter().map(|t| t.max_level_error).fold(0.0, f64::max);
    let level = if pattern.is_ok() || !traces.is_empty() { level } else { f64::MAX };
    check(rows, index, "trace_level_error", level, tol.level_tol);
    check(rows, index, "pattern_errors", if pattern.is_ok() { 0.0 } else { 1.0 }, 0.5);

    let Ok((map, _)) = normal_form(cfg) else { return };
    let flow = monitors(ctx, &map, &normal).and_then(|m| run_flow(ctx, &normal, m, ctx.scenario.weights()));
    let Ok(h) = flow else {
        check(rows, index, "loewner_flow", f64::MAX, 0.0);
        return;
    };
    // Flow checks run on [0, 0.8 tau] when the flow collides at tau.
    let h = match h.halt {
        Halt::Completed => h,
        Halt::Collision { t, .. } | Halt::NonFinite { t } => History {
            states: h.states.iter().filter(|s| s.t <= 0.8 * t).cloned().collect(),
            halt: Halt::Completed,
            ..h
        },
    };
    check(rows, index, "iom_drift", iom_drift(&h, None).max_drift(), tol.iom_tol);
    check(rows, index, "stationarity_drift", stationarity_drift(&h), tol.drift_tol);
    check(rows, index, "null_vector_drift", null_vector_drift(&h), tol.drift_tol);

    let Ok(ph) = phase_from_configuration(&normal) else {
        check(rows, index, "phase_point", f64::MAX, 0.0);
        return;
    };
    check(rows, index, "hamiltonians", max_abs(&null_hamiltonians(&ph)), tol.hamiltonian_tol);
    check(rows, index, "lax_square_ones", max_abs(&lax_square_ones(&ph)), tol.hamiltonian_tol);
    let e = energy(&ph);
    check(rows, index, "energy_identity", (e.sum_h - e.cm_energy_resummed).abs(), tol.energy_tol);
    if ctx.scenario.weights().is_uniform() {
        check(rows, index, "hamiltonian_drift", hamiltonian_drift(&h), tol.conservation_tol);
    }
}

pub fn verify(ctx: &Ctx) -> Run {
    let mut run = Run::new("verify", ctx);
    let result = (|| {
        let sel = resolve(ctx, &mut run.report, true)?;
        let mut rows = Vec::new();
        for (index, cfg) in &sel {
            verify_one(ctx, *index, cfg, &mut rows);
        }
        let failed = rows.iter().filter(|r| !r.passed).count();
        let total = rows.len();
        run.report.checks = rows;
        if failed > 0 {
            return Err(Failure::Verification(format!("{failed} of {total} checks failed")));
        }
        run.report.messages.push(format!("all {total} checks passed"));
        Ok(())
    })();
    run.finish(result)
}

/// Largest distance from a printed charge to the nearest charge of `xi`.
fn printed_distance(printed: &[C64], xi: &[C64]) -> f64 {
    printed
        .iter()
        .map(|p| xi.iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Renders a preset. `base` supplies tolerances and output switches.
pub fn figure(p: &Preset, base: &Ctx) -> Run {
    let mut sc = p.scenario();
    sc.seed = base.scenario.seed;
    let mut ctx = Ctx { scenario: sc, tol: base.tol.clone(), all_solutions: false, ..*base };
    let n = p.listed.len();
    let m = p.printed_xi.len();
    let solved = Regime::classify(n, m) == Regime::Underscreening && m > 0;
    let mut run = Run::new("render-figure", &ctx);
    let mut section = FigureSection {
        id: p.id.into(),
        listed_points: p.listed.clone(),
        printed_xi: p.printed_xi.clone(),
        used_xi: vec![],
        printed_distance: None,
        caption_pattern: p.caption_display(),
        realized_pattern: None,
        matches: None,
        notes: p.notes.iter().map(|s| s.to_string()).collect(),
    };
    let result = (|| {
        let sel = if solved {
            let mut probe = Run::new("solve", &ctx);
            let all = resolve(&Ctx { all_solutions: true, ..ctx.clone_shallow() }, &mut probe.report, false)?;
            let (k, cfg) = all
                .iter()
                .min_by(|a, b| {
                    printed_distance(&p.printed_xi, &a.1.xi()).total_cmp(&printed_distance(&p.printed_xi, &b.1.xi()))
                })
                .cloned()
                .ok_or_else(|| Failure::Validation("no solutions".into()))?;
            section.printed_distance = Some(printed_distance(&p.printed_xi, &cfg.xi()));
            ctx.scenario.solution = k;
            run.report.solve = probe.report.solve;
            run.report.validation = probe.report.validation;
            run.report.scenario = ctx.scenario.clone();
            vec![(k, cfg)]
        } else {
            ctx.scenario.xi = Some(p.printed_xi.iter().map(|&z| Point::Finite(z)).collect());
            ctx.scenario.m = None;
            run.report.scenario = ctx.scenario.clone();
            resolve(&ctx, &mut run.report, true)?
        };
        let cfg = &sel[0].1;
        section.used_xi = cfg.xi();
        check(&mut run.report.checks, sel[0].0, "stationary_residual", stationary_residual(cfg).max_abs, ctx.tol.accept_tol);
        let title = format!("Figure {}", p.id);
        let patterns = trace_into(&ctx, &mut run, &sel, &title)?;
        let Some(realized) = patterns.into_iter().next().flatten() else {
            return Err(Failure::Pattern("no pattern realized".into()));
        };
        let listed_index = |k: usize| {
            let z = cfg.x()[k];
            (0..n).min_by(|&a, &b| (p.listed[a] - z).norm().total_cmp(&(p.listed[b] - z).norm())).unwrap() + 1
        };
        let arcs: Vec<(usize, usize)> = realized.arcs.iter().map(|&(a, b)| (listed_index(a), listed_index(b))).collect();
        let rays: Vec<usize> = realized.rays.iter().map(|&r| listed_index(r)).collect();
        let shown = presets::display(&arcs, &rays);
        section.matches = section.caption_pattern.as_ref().map(|c| *c == shown);
        section.realized_pattern = Some(shown.clone());
        match (section.matches, &section.caption_pattern) {
            (Some(false), Some(c)) => Err(Failure::Pattern(format!("caption names {c}, traced locus realizes {shown}"))),
            _ => Ok(()),
        }
    })();
    run.report.figure = Some(section);
    run.files.push((
        format!("{}.scenario.json", p.file_stem()),
        format!("{}\n", serde_json::to_string_pretty(&run.report.scenario).expect("scenario serializes")).into_bytes(),
    ));
    run.finish(result)
}

impl Ctx {
    fn clone_shallow(&self) -> Ctx {
        Ctx {
            scenario: self.scenario.clone(),
            tol: self.tol.clone(),
            all_solutions: self.all_solutions,
            svg: self.svg,
            csv: self.csv,
            patterns: false,
            tips: self.tips,
        }
    }
}
