//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sle0::calogero::{
    cm_dynamics_residual, energy, lax_square_ones, null_hamiltonians, phase_from_configuration, poisson_bracket,
    NullHamiltonian, PhasePoint,
};
use sle0::config::{unit, Configuration, Point, Uniformization};
use sle0::link::{ballot_number, enumerate_link_patterns};
use sle0::locus::{distance_to_polyline, realized_pattern, TraceOptions};
use sle0::loewner::{evolve, iom_drift, reconstruct_tips, CapacityWeights, EvolveOptions, Halt};
use sle0::mobius::{transport_configuration, MobiusMap};
use sle0::rational::{derivative_from_configuration, primitive};
use sle0::solver::{solve_half_plane, solve_stationary, SolverOptions};
use sle0::stationary::{null_vector_residual, stationary_residual, ward_residual};
use sle0::C64;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// Sorted real points in roughly `[-2, 2]` with gaps at least `0.3`.
fn generic_x(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.2)).collect();
    let total: f64 = gaps[1..].iter().sum();
    let mut x = Vec::with_capacity(n);
    let mut acc = -0.5 * total;
    for (i, g) in gaps.iter().enumerate() {
        if i > 0 {
            acc += g;
        }
        x.push(acc);
    }
    x
}

fn semicircle() -> Configuration {
    Configuration::half_plane(&[-1.0, 1.0], &[c(0.0, 0.0)]).unwrap()
}

fn three_one() -> Configuration {
    Configuration::half_plane(&[-1.0, 0.0, 1.0], &[c(1.0 / 3f64.sqrt(), 0.0)]).unwrap()
}

fn four_two() -> Vec<Configuration> {
    let x = [-1.5, -0.5, 0.5, 1.5];
    let set = solve_half_plane(&x, 2, &SolverOptions::default()).unwrap();
    set.solutions.iter().map(|s| Configuration::half_plane(&x, &s.xi()).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let x = [c(0.0, 1.0), unit(PI / 4.0), unit(-PI / 4.0), c(0.0, -1.0)];
    let set = solve_stationary(Uniformization::Disk, &x, Point::real(-1.0), 2, &SolverOptions::default())
        .map_err(|e| e.to_string())?;
    let target = [0.49604, 2.0160];
    let mut best = f64::INFINITY;
    for sol in &set.solutions {
        let xi = sol.xi();
        if xi.iter().any(|z| z.im.abs() > 1e-9) {
            continue;
        }
        let mut re: Vec<f64> = xi.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let err = re.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        best = best.min(err);
    }
    check(best < 1e-3, format!("closest real solution off by {best:.3e}"))?;
    Ok(format!("{} solutions, real pair within {best:.2e} of (0.49604, 2.0160)", set.solutions.len()))
}

fn criterion_2() -> Outcome {
    let s3 = 3f64.sqrt();
    let cfg = Configuration::disk(&[unit(PI / 3.0), unit(-PI / 3.0)], &[c(2.0 - s3, 0.0), c(2.0 + s3, 0.0)])
        .map_err(|e| e.to_string())?;
    let res = stationary_residual(&cfg).max_abs;
    check(res < 1e-9, format!("residual {res:.3e}"))?;
    let (_, pattern) = realized_pattern(&cfg, &TraceOptions::default())?;
    check(pattern.arcs == vec![(0, 1)] && pattern.rays.is_empty(), format!("pattern {pattern}"))?;
    Ok(format!("residual {res:.2e}, pattern {pattern}"))
}

fn criterion_3() -> Outcome {
    let set = solve_half_plane(&[-1.0, 1.0], 1, &SolverOptions::default()).map_err(|e| e.to_string())?;
    check(set.solutions.len() == 1, "expected one solution")?;
    let xi = set.solutions[0].xi()[0];
    check(xi.norm() < 1e-12, format!("xi = {xi}"))?;

    let cfg = semicircle();
    let r = primitive(&derivative_from_configuration(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut r_err: f64 = 0.0;
    for k in 0..16 {
        let z = C64::from_polar(0.3 + 0.2 * k as f64, 0.4 * k as f64 + 0.1);
        r_err = r_err.max((r.eval(z) - (z + 1.0 / z)).norm() / (z + 1.0 / z).norm());
    }
    check(r_err < 1e-12, format!("R differs from z + 1/z by {r_err:.3e}"))?;

    let (traces, _) = realized_pattern(&cfg, &TraceOptions::default())?;
    let circle_err = traces.iter().flat_map(|t| t.points.iter()).map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    check(circle_err < 1e-6, format!("locus off the unit circle by {circle_err:.3e}"))?;

    let h = evolve(&cfg, &EvolveOptions { dt: 1e-5, t_end: 0.2, ..Default::default() }).map_err(|e| e.to_string())?;
    let drive_err = h
        .states
        .iter()
        .map(|st| {
            let s = (1.0 - 4.0 * st.t).sqrt();
            (st.x[0] + s).abs().max((st.x[1] - s).abs())
        })
        .fold(0.0, f64::max);
    check(h.halt == Halt::Completed && (h.last().t - 0.2).abs() < 1e-12, "evolution stopped early")?;
    check(drive_err < 1e-8, format!("driving error {drive_err:.3e}"))?;
    Ok(format!(
        "|xi| = {:.1e}, R err {r_err:.1e}, circle err {circle_err:.1e}, driving err {drive_err:.1e}",
        xi.norm()
    ))
}

fn monitors() -> Vec<C64> {
    let mut out = Vec::new();
    for re in [-3.0, -1.5, 0.0, 1.5, 3.0] {
        for im in [1.5, 3.0] {
            out.push(c(re, im));
        }
    }
    out.push(c(0.4, 5.0));
    out.push(c(-6.0, 0.8));
    out
}

/// First collision time of the flow, or infinity if none before `horizon`.
fn collision_time(cfg: &Configuration, weights: &CapacityWeights, horizon: f64) -> Result<f64, String> {
    let opts = EvolveOptions { dt: 1e-3, t_end: horizon, weights: weights.clone(), ..Default::default() };
    let h = evolve(cfg, &opts).map_err(|e| e.to_string())?;
    Ok(match h.halt {
        Halt::Collision { t, .. } | Halt::NonFinite { t } => t,
        Halt::Completed => f64::INFINITY,
    })
}

fn criterion_4() -> Outcome {
    let mut scenarios = vec![("(2,1)", semicircle()), ("(3,1)", three_one())];
    for cfg in four_two() {
        scenarios.push(("(4,2)", cfg));
    }
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for (name, cfg) in &scenarios {
        for weights in [CapacityWeights::Uniform, CapacityWeights::single(0, cfg.n())] {
            let tau = collision_time(cfg, &weights, 1.0)?;
            let t_end = 0.2f64.min(0.8 * tau);
            let opts = EvolveOptions { dt: 1e-4, t_end, monitors: monitors(), weights: weights.clone(), ..Default::default() };
            let h = evolve(cfg, &opts).map_err(|e| e.to_string())?;
            let rep = iom_drift(&h, Some(t_end));
            let live = rep.monitors.iter().filter(|m| m.swallowed_at.is_none()).count();
            check(live >= 10, format!("{name}: only {live} monitors survived"))?;
            check(
                rep.max_drift() < 1e-6,
                format!("{name} {weights:?}: drift {:.3e} up to t = {t_end:.4}", rep.max_drift()),
            )?;
            worst = worst.max(rep.max_drift());
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, max relative drift {worst:.2e}"))
}

/// All solver solutions over underscreened `(n, m)` with `n <= 6`.
fn stationary_sweep() -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for n in 1..=6 {
        for m in 0..=n / 2 {
            let x = generic_x(&mut rng, n);
            let set = solve_half_plane(&x, m, &SolverOptions::default()).unwrap();
            for s in &set.solutions {
                out.push(Configuration::half_plane(&x, &s.xi()).unwrap());
            }
        }
    }
    out
}

fn criterion_5(sweep: &[Configuration]) -> Outcome {
    let mut worst_null: f64 = 0.0;
    let mut worst_ward: f64 = 0.0;
    for cfg in sweep {
        let nv = null_vector_residual(cfg).map_err(|e| e.to_string())?;
        let (sum, moment) = ward_residual(cfg).map_err(|e| e.to_string())?;
        worst_null = nv.iter().fold(worst_null, |a, v| a.max(v.abs()));
        worst_ward = worst_ward.max(sum.abs()).max(moment.abs());
    }
    check(worst_null < 1e-9, format!("null vector residual {worst_null:.3e}"))?;
    check(worst_ward < 1e-9, format!("Ward residual {worst_ward:.3e}"))?;
    Ok(format!("{} solutions, null {worst_null:.2e}, Ward {worst_ward:.2e}", sweep.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0;
    for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2)] {
        let mut all = enumerate_link_patterns(n, m);
        all.sort_by_key(|p| p.to_string());
        for _ in 0..5 {
            let x = generic_x(&mut rng, n);
            let set = solve_half_plane(&x, m, &SolverOptions::default()).map_err(|e| e.to_string())?;
            let expected = ballot_number(n, m) as usize;
            check(set.solutions.len() == expected, format!("({n},{m}) at {x:?}: {} of {expected}", set.solutions.len()))?;
            let mut patterns = Vec::new();
            for s in &set.solutions {
                let cfg = Configuration::half_plane(&x, &s.xi()).unwrap();
                let (_, p) = realized_pattern(&cfg, &TraceOptions::default()).map_err(|e| format!("({n},{m}): {e}"))?;
                patterns.push(p);
            }
            patterns.sort_by_key(|p| p.to_string());
            check(patterns == all, format!("({n},{m}) at {x:?}: patterns do not exhaust the enumeration"))?;
            total += set.solutions.len();
        }
    }
    Ok(format!("25 point sets, {total} solutions, patterns exhaustive and distinct"))
}

fn random_phase(rng: &mut ChaCha8Rng, n: usize) -> PhasePoint {
    let x = generic_x(rng, n);
    let p = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    PhasePoint::new(x, p)
}

fn criterion_7(sweep: &[Configuration]) -> Outcome {
    let mut worst_h: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    for cfg in sweep {
        let ph = phase_from_configuration(cfg).map_err(|e| e.to_string())?;
        worst_h = null_hamiltonians(&ph).iter().fold(worst_h, |a, v| a.max(v.abs()));
        worst_l = lax_square_ones(&ph).iter().fold(worst_l, |a, v| a.max(v.abs()));
    }
    check(worst_h < 1e-8, format!("|H_j| up to {worst_h:.3e}"))?;
    check(worst_l < 1e-8, format!("|L^2 1| up to {worst_l:.3e}"))?;

    let mut drift: f64 = 0.0;
    let mut g_err: f64 = 0.0;
    let mut fits = Vec::new();
    let mut trajectories = vec![semicircle(), three_one()];
    trajectories.extend(four_two());
    for cfg in &trajectories {
        let tau = collision_time(cfg, &CapacityWeights::Uniform, 1.0)?;
        let fit = cm_dynamics_residual(cfg, 0.1f64.min(0.8 * tau), 1e-4).map_err(|e| e.to_string())?;
        drift = drift.max(fit.hamiltonian_drift);
        g_err = g_err.max((fit.g - 32.0).abs());
        if let Some(gx) = fit.g_xi {
            g_err = g_err.max((gx - 32.0).abs());
        }
        fits.push(fit.g);
    }
    check(drift < 1e-7, format!("H_j drift {drift:.3e}"))?;
    check(g_err < 1e-4, format!("fitted couplings {fits:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut energy_err: f64 = 0.0;
    let mut printed_gap: f64 = 0.0;
    for i in 0..1000 {
        let ph = random_phase(&mut rng, 1 + i % 6);
        let e = energy(&ph);
        energy_err = energy_err.max((e.sum_h - e.cm_energy_resummed).abs());
        printed_gap = printed_gap.max((e.sum_h - e.cm_energy_printed).abs());
    }
    check(energy_err < 1e-10, format!("energy identity off by {energy_err:.3e}"))?;

    let mut bracket: f64 = 0.0;
    let mut sampled = 0;
    while sampled < 100 {
        let n = 2 + sampled % 4;
        let mut ph = random_phase(&mut rng, n);
        let (j, k) = (sampled % n, (sampled + 1) % n);
        // H_j - H_k is quadratic in p_j; move p_j onto a root
        let diff = |v: f64, ph: &PhasePoint| {
            let mut q = ph.clone();
            q.p[j] = v;
            let h = null_hamiltonians(&q);
            h[j] - h[k]
        };
        let (c0, c1, cm) = (diff(0.0, &ph), diff(1.0, &ph), diff(-1.0, &ph));
        let a = 0.5 * (c1 + cm) - c0;
        let b = 0.5 * (c1 - cm);
        let disc = b * b - 4.0 * a * c0;
        if disc < 0.0 {
            continue;
        }
        ph.p[j] = (-b + disc.sqrt()) / (2.0 * a);
        let h = null_hamiltonians(&ph);
        if (h[j] - h[k]).abs() > 1e-9 {
            continue;
        }
        bracket = bracket.max(poisson_bracket(&NullHamiltonian(j), &NullHamiltonian(k), &ph).abs());
        sampled += 1;
    }
    check(bracket < 1e-8, format!("bracket on common levels {bracket:.3e}"))?;
    Ok(format!(
        "|H| {worst_h:.1e}, |L^2 1| {worst_l:.1e}, H drift {drift:.1e}, energy {energy_err:.1e}, g = 32 within {g_err:.1e}, bracket {bracket:.1e}; printed coupling 8 misses sum H by up to {printed_gap:.2e}"
    ))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for cfg in [semicircle(), three_one()] {
        let (traces, _) = realized_pattern(&cfg, &TraceOptions::default())?;
        let h = evolve(&cfg, &EvolveOptions { dt: 1e-4, t_end: 0.1, ..Default::default() }).map_err(|e| e.to_string())?;
        for poly in reconstruct_tips(&h, 40) {
            check(poly.unreliable.is_empty(), format!("unreliable tips at {:?}", poly.unreliable))?;
            for &z in &poly.points {
                let d = traces.iter().map(|t| distance_to_polyline(z, &t.points)).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
                count += 1;
            }
        }
    }
    check(worst < 1e-3, format!("tip distance {worst:.3e}"))?;
    Ok(format!("{count} tips, directed Hausdorff distance {worst:.2e}"))
}

fn random_real_map(rng: &mut ChaCha8Rng) -> MobiusMap {
    loop {
        let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let det = v[0] * v[3] - v[1] * v[2];
        if det > 0.2 {
            return MobiusMap::new(c(v[0], 0.0), c(v[1], 0.0), c(v[2], 0.0), c(v[3], 0.0)).unwrap();
        }
    }
}

fn criterion_9(sweep: &[Configuration]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut round: f64 = 0.0;
    for _ in 0..200 {
        let map = random_real_map(&mut rng);
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0));
        if let Some(w) = map.apply_finite(z).finite() {
            if let Some(back) = map.inverse().apply_finite(w).finite() {
                round = round.max((back - z).norm() / (1.0 + z.norm()));
            }
        }
        let cay = MobiusMap::cayley();
        if let Some(back) = cay.inverse().apply_finite(cay.apply_finite(z).finite().unwrap()).finite() {
            round = round.max((back - z).norm() / (1.0 + z.norm()));
        }
    }
    check(round < 1e-10, format!("Mobius round trip {round:.3e}"))?;

    let mut transport: f64 = 0.0;
    for cfg in sweep.iter().filter(|c| c.n() >= 2).take(40) {
        let map = random_real_map(&mut rng);
        let moved = match transport_configuration(cfg, &map) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let back = transport_configuration(&moved, &map.inverse()).map_err(|e| e.to_string())?;
        transport = transport.max(stationary_residual(&moved).max_abs).max(stationary_residual(&back).max_abs);
    }
    check(transport < 1e-8, format!("transported residual {transport:.3e}"))?;

    let mut level: f64 = 0.0;
    for cfg in sweep.iter().filter(|c| c.n() >= 2 && c.n() <= 4) {
        let (traces, _) = realized_pattern(cfg, &TraceOptions::default())?;
        level = traces.iter().fold(level, |a, t| a.max(t.max_level_error));
    }
    check(level < 1e-6, format!("tracer level error {level:.3e}"))?;

    let x = [-1.7, -0.6, 0.2, 0.9, 2.1];
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let set = solve_half_plane(&x, 2, &SolverOptions { seed: 5, ..Default::default() }).unwrap();
            let xi: Vec<Vec<C64>> = set.solutions.iter().map(|s| s.xi()).collect();
            let cfg = Configuration::half_plane(&x, &xi[0]).unwrap();
            let (traces, _) = realized_pattern(&cfg, &TraceOptions::default()).unwrap();
            (xi, traces)
        })
    };
    let one = run(1);
    let four = run(4);
    check(one == four, "results differ between 1 and 4 threads")?;
    Ok(format!(
        "round trip {round:.1e}, transport {transport:.1e}, level {level:.1e}, 1 vs 4 threads identical"
    ))
}

fn main() {
    let started = Instant::now();
    let sweep = stationary_sweep();
    let criteria: Vec<(&str, f64, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 Figure 4.11 disk poles", 10.0, Box::new(criterion_1)),
        ("2 Figure 4.14 residual and pattern", 5.0, Box::new(criterion_2)),
        ("3 exact semicircle solution", 5.0, Box::new(criterion_3)),
        ("4 field integral of motion", 60.0, Box::new(criterion_4)),
        ("5 null vector and Ward identities", 30.0, Box::new(|| criterion_5(&sweep))),
        ("6 enumeration by link patterns", 300.0, Box::new(criterion_6)),
        ("7 Calogero-Moser suite", 120.0, Box::new(|| criterion_7(&sweep))),
        ("8 Loewner tips vs traced locus", 60.0, Box::new(criterion_8)),
        ("9 property suite", 60.0, Box::new(|| criterion_9(&sweep))),
    ];
    let mut failed = 0;
    for (name, budget, run) in &criteria {
        let t0 = Instant::now();
        let outcome = run();
        let secs = t0.elapsed().as_secs_f64();
        let over = secs > *budget;
        match (&outcome, over) {
            (Ok(detail), false) => println!("PASS criterion {name}: {detail} ({secs:.2} s)"),
            (Ok(detail), true) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}, but took {secs:.2} s > {budget} s");
            }
            (Err(why), _) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({secs:.2} s)");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed in {:.1} s", criteria.len() - failed, criteria.len(), started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
