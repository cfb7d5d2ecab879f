//! Enumeration of screening-charge solutions of the stationary relations.
//!
//! With `u = inf` the relations for the roots of a monic `q` are equivalent
//! to the polynomial identity `a q'' - a' q' = c q` with `a = prod (z - x_j)`
//! and `deg c = n - 2`. Newton's method runs on the real coefficients of
//! `(q, c)`, so conjugation closure of the roots is automatic. Solutions at a
//! generic target are reached by homotopy from a reference configuration on
//! Chebyshev nodes, backed by seeded random multistart. Finite `u` is handled
//! by moving to the `u = inf` picture and polishing back in the original
//! coordinates.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, Configuration, Point, RawConfiguration, Regime, ScreeningCharges, Uniformization};
use crate::link::{ballot_number, LinkPattern};
use crate::mobius::{transport_configuration, MobiusError, MobiusMap};
use crate::poly::RealPolynomial;
use crate::stationary::residual_at;
use crate::{par_map, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub seed: u64,
    /// Newton stops once the residual falls below this.
    pub newton_tol: f64,
    pub max_newton_iter: usize,
    /// Random starts tried at the reference configuration.
    pub restart_budget: usize,
    /// Random starts tried directly at the target when homotopy falls short.
    pub fallback_starts: usize,
    pub homotopy_steps: usize,
    /// Solutions closer than this (sorted, componentwise) are identified.
    pub dedup_tol: f64,
    /// Largest stationary residual accepted for a solution.
    pub accept_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            seed: 0,
            newton_tol: 1e-12,
            max_newton_iter: 50,
            restart_budget: 500,
            fallback_starts: 200,
            homotopy_steps: 32,
            dedup_tol: 1e-6,
            accept_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub charges: ScreeningCharges,
    pub residual: f64,
    /// Link pattern realized by the real locus, once traced.
    pub pattern: Option<LinkPattern>,
}

impl Solution {
    pub fn xi(&self) -> Vec<C64> {
        self.charges.points()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub regime: Regime,
    /// Number of link patterns, when the regime has isolated solutions.
    pub expected: Option<u128>,
    pub solutions: Vec<Solution>,
    pub complete: bool,
    pub explanation: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    #[error("overscreening regime (n = {n}, m = {m}): solutions are not isolated, supply xi for verification instead")]
    Overscreened { n: usize, m: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Transport(#[from] MobiusError),
}

/// Finds all isolated solutions with `m` charges for the given boundary data.
pub fn solve_stationary(
    uniformization: Uniformization,
    x: &[C64],
    u: Point,
    m: usize,
    opts: &SolverOptions,
) -> Result<SolutionSet, SolverError> {
    let base = Configuration::new(&RawConfiguration { uniformization, x: x.to_vec(), xi: vec![], u: Some(u) })?;
    let n = base.n();
    let regime = Regime::classify(n, m);
    let empty = |explanation: &str| SolutionSet {
        regime,
        expected: Some(0),
        solutions: vec![],
        complete: true,
        explanation: Some(explanation.to_string()),
        warnings: vec![],
    };
    if m > n {
        return Ok(empty("m > n: there are no such R"));
    }
    match regime {
        Regime::Threshold => return Ok(empty("threshold regime n+1-m = m: there are no such R")),
        Regime::Overscreening | Regime::Empty => return Err(SolverError::Overscreened { n, m }),
        Regime::Underscreening => {}
    }
    let expected = ballot_number(n, m);

    let to_normal = MobiusMap::to_normal_form(&base);
    let normal = transport_configuration(&base, &to_normal)?;
    let candidates = solve_normal_form(&normal.x_real(), m, opts);

    let back = to_normal.inverse();
    let mut pool = Pool::new(opts.dedup_tol);
    for roots in candidates {
        let own: Option<Vec<C64>> = roots.iter().map(|&z| back.apply_finite(z).finite()).collect();
        if let Some(own) = own {
            if let Some(sol) = polish(&base, own, opts) {
                pool.insert(sol);
            }
        }
    }
    if (pool.len() as u128) < expected && !base.is_normal_form() {
        own_coordinate_multistart(&base, m, expected, opts, &mut pool);
    }

    let mut warnings = Vec::new();
    let found = pool.len() as u128;
    if found != expected {
        warnings.push(format!("found {found} of {expected} expected solutions; x may be non-generic"));
    }
    let solutions = pool.into_sorted();
    let spacing = growth_spacing(base.x());
    for (k, sol) in solutions.iter().enumerate() {
        let gap = sol
            .xi()
            .iter()
            .flat_map(|z| base.x().iter().map(move |x| (z - x).norm()))
            .fold(f64::INFINITY, f64::min);
        if gap < NEAR_DEGENERATE * spacing {
            warnings.push(format!(
                "solution {k} has a charge {gap:.3e} from a growth point; x is close to a degenerate configuration and the solution is ill-conditioned"
            ));
        }
    }
    Ok(SolutionSet {
        regime,
        expected: Some(expected),
        solutions,
        complete: found == expected,
        explanation: None,
        warnings,
    })
}

/// Charges closer than this fraction of the growth-point spacing are flagged.
pub const NEAR_DEGENERATE: f64 = 1e-2;

fn growth_spacing(x: &[C64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            sep = sep.min((x[i] - x[j]).norm());
        }
    }
    if sep.is_finite() {
        sep
    } else {
        1.0
    }
}

/// True when some charge sits within `NEAR_DEGENERATE` spacings of a growth point.
pub fn near_degenerate(x: &[C64], xi: &[C64]) -> bool {
    let spacing = growth_spacing(x);
    xi.iter().any(|z| x.iter().any(|p| (z - p).norm() < NEAR_DEGENERATE * spacing))
}

pub fn solve_half_plane(x: &[f64], m: usize, opts: &SolverOptions) -> Result<SolutionSet, SolverError> {
    let x: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    solve_stationary(Uniformization::HalfPlane, &x, Point::Infinity, m, opts)
}

struct Pool {
    tol: f64,
    items: Vec<(Vec<C64>, Solution)>,
}

fn sorted_points(z: &[C64]) -> Vec<C64> {
    let mut v = z.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

impl Pool {
    fn new(tol: f64) -> Self {
        Pool { tol, items: Vec::new() }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn insert(&mut self, sol: Solution) -> bool {
        let key = sorted_points(&sol.xi());
        let dup = self
            .items
            .iter()
            .any(|(k, _)| k.iter().zip(&key).all(|(a, b)| (a - b).norm() <= self.tol * (1.0 + a.norm())));
        if !dup {
            self.items.push((key, sol));
        }
        !dup
    }

    fn into_sorted(mut self) -> Vec<Solution> {
        self.items.sort_by(|(a, _), (b, _)| {
            for (p, q) in a.iter().zip(b) {
                let o = p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im));
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
        self.items.into_iter().map(|(_, s)| s).collect()
    }
}

/// Root sets (unpolished) of the `u = inf` problem at real growth points.
fn solve_normal_form(x: &[f64], m: usize, opts: &SolverOptions) -> Vec<Vec<C64>> {
    let n = x.len();
    if m == 0 {
        return vec![vec![]];
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = if n > 1 { 0.5 * (hi - lo) } else { 1.0 };
    let xs: Vec<f64> = x.iter().map(|&v| (v - mid) / half).collect();
    let unscale = |roots: Vec<C64>| roots.into_iter().map(|z| z * half + mid).collect::<Vec<C64>>();

    if m == 1 {
        let a = RealPolynomial::from_roots(&xs);
        return a.derivative().roots().into_iter().map(|z| unscale(vec![z])).collect();
    }

    let expected = ballot_number(n, m) as usize;
    let reference = chebyshev_lobatto(n);
    let ref_problem = HsProblem::new(&reference, m);
    let mut ref_sols: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut ref_keys: Vec<Vec<C64>> = Vec::new();
    let chunk = 32;
    let mut next = 0;
    while ref_sols.len() < expected && next < opts.restart_budget {
        let ids: Vec<usize> = (next..(next + chunk).min(opts.restart_budget)).collect();
        next += ids.len();
        let found = par_map(ids, |id| {
            let mut rng = stream_rng(opts.seed, id as u64);
            let (q, c) = ref_problem.random_start(&mut rng);
            ref_problem.newton(q, c, opts.max_newton_iter).filter(|(q, _)| ref_problem.acceptable(q))
        });
        for (q, c) in found.into_iter().flatten() {
            let key = sorted_points(&monic_roots(&q));
            if !ref_keys.iter().any(|k| keys_close(k, &key, opts.dedup_tol)) {
                ref_keys.push(key);
                ref_sols.push((q, c));
            }
        }
    }

    let target = HsProblem::new(&xs, m);
    let tracked = par_map(ref_sols, |(q, c)| track(&reference, &xs, m, q, c, opts));
    let mut out: Vec<Vec<C64>> = Vec::new();
    let push = |q: &[f64], out: &mut Vec<Vec<C64>>| {
        let key = sorted_points(&monic_roots(q));
        if !out.iter().any(|k| keys_close(k, &key, opts.dedup_tol)) {
            out.push(key);
        }
    };
    for q in tracked.into_iter().flatten() {
        push(&q, &mut out);
    }
    let mut next = 0;
    while out.len() < expected && next < opts.fallback_starts {
        let ids: Vec<usize> = (next..(next + chunk).min(opts.fallback_starts)).collect();
        next += ids.len();
        let found = par_map(ids, |id| {
            let mut rng = stream_rng(opts.seed ^ 0x5eed_f00d, id as u64);
            let (q, c) = target.random_start(&mut rng);
            target.newton(q, c, opts.max_newton_iter).filter(|(q, _)| target.acceptable(q)).map(|(q, _)| q)
        });
        for q in found.into_iter().flatten() {
            push(&q, &mut out);
        }
    }
    out.into_iter().map(unscale).collect()
}

fn keys_close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).norm() <= tol * (1.0 + p.norm()))
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|j| -(std::f64::consts::PI * j as f64 / (n - 1) as f64).cos()).collect()
}

/// Roots of `z^m + q[m-1] z^{m-1} + ... + q[0]`.
fn monic_roots(q: &[f64]) -> Vec<C64> {
    let mut c = q.to_vec();
    c.push(1.0);
    RealPolynomial::new(c).roots()
}

/// Follows one solution from the reference nodes to the target by linear
/// interpolation of the growth points, halving steps that fail.
fn track(from: &[f64], to: &[f64], m: usize, q: Vec<f64>, c: Vec<f64>, opts: &SolverOptions) -> Option<Vec<f64>> {
    let steps = opts.homotopy_steps.max(1);
    let min_ds = 1.0 / (steps as f64 * 256.0);
    let mut s = 0.0;
    let mut ds = 1.0 / steps as f64;
    let (mut q, mut c) = (q, c);
    while s < 1.0 {
        let s_next = (s + ds).min(1.0);
        let xs: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + s_next * (b - a)).collect();
        let problem = HsProblem::new(&xs, m);
        match problem.newton(q.clone(), c.clone(), 20).filter(|(q, _)| problem.acceptable(q)) {
            Some((qn, cn)) => {
                q = qn;
                c = cn;
                s = s_next;
                ds = (ds * 2.0).min(1.0 / steps as f64);
            }
            None => {
                ds *= 0.5;
                if ds < min_ds {
                    return None;
                }
            }
        }
    }
    Some(q)
}

/// The coefficient system `a q'' - a' q' - c q = 0`.
struct HsProblem {
    x: Vec<f64>,
    a: RealPolynomial,
    da: RealPolynomial,
    n: usize,
    m: usize,
}

impl HsProblem {
    fn new(x: &[f64], m: usize) -> Self {
        let a = RealPolynomial::from_roots(x);
        let da = a.derivative();
        HsProblem { x: x.to_vec(), a, da, n: x.len(), m }
    }

    fn q_poly(&self, q: &[f64]) -> RealPolynomial {
        let mut c = q.to_vec();
        c.push(1.0);
        RealPolynomial::new(c)
    }

    fn operator(&self, p: &RealPolynomial) -> RealPolynomial {
        self.a.mul(&p.derivative().derivative()).sub(&self.da.mul(&p.derivative()))
    }

    fn equations(&self) -> usize {
        self.n + self.m - 1
    }

    fn residual(&self, q: &[f64], c: &[f64]) -> Vec<f64> {
        let qp = self.q_poly(q);
        let f = self.operator(&qp).sub(&RealPolynomial::new(c.to_vec()).mul(&qp));
        (0..self.equations()).map(|k| f.coeff(k)).collect()
    }

    fn jacobian(&self, q: &[f64], c: &[f64]) -> DMatrix<f64> {
        let eqs = self.equations();
        let mut jac = DMatrix::zeros(eqs, eqs);
        let cp = RealPolynomial::new(c.to_vec());
        for i in 0..self.m {
            let zi = RealPolynomial::monomial(i);
            let col = self.operator(&zi).sub(&cp.mul(&zi));
            for k in 0..eqs {
                jac[(k, i)] = col.coeff(k);
            }
        }
        let qp = self.q_poly(q);
        for i in 0..self.n.saturating_sub(1) {
            let col = RealPolynomial::monomial(i).mul(&qp);
            for k in 0..eqs {
                jac[(k, self.m + i)] = -col.coeff(k);
            }
        }
        jac
    }

    /// `c` as the polynomial quotient of `a q'' - a' q'` by `q`.
    fn quotient(&self, q: &[f64]) -> Vec<f64> {
        let qp = self.q_poly(q);
        let (c, _) = self.operator(&qp).div_rem(&qp);
        (0..self.n.saturating_sub(1)).map(|k| c.coeff(k)).collect()
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        let pairs = rng.gen_range(0..=self.m / 2);
        let mut roots = Vec::with_capacity(self.m);
        for _ in 0..pairs {
            let z = C64::new(rng.gen_range(-1.2..1.2), rng.gen_range(0.05..1.2));
            roots.push(z);
            roots.push(z.conj());
        }
        while roots.len() < self.m {
            roots.push(C64::new(rng.gen_range(-1.3..1.3), 0.0));
        }
        let q = crate::poly::ComplexPolynomial::from_roots(&roots);
        let q: Vec<f64> = (0..self.m).map(|k| q.coeff(k).re).collect();
        let c = self.quotient(&q);
        (q, c)
    }

    fn newton(&self, mut q: Vec<f64>, mut c: Vec<f64>, iters: usize) -> Option<(Vec<f64>, Vec<f64>)> {
        let norm = |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let mut f = self.residual(&q, &c);
        let mut fnorm = norm(&f);
        for _ in 0..iters {
            if !fnorm.is_finite() {
                return None;
            }
            if fnorm < 1e-13 {
                return Some((q, c));
            }
            let jac = self.jacobian(&q, &c);
            let rhs = DVector::from_vec(f.iter().map(|v| -v).collect());
            let step = jac.lu().solve(&rhs)?;
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..12 {
                let qn: Vec<f64> = (0..self.m).map(|i| q[i] + t * step[i]).collect();
                let cn: Vec<f64> = (0..c.len()).map(|i| c[i] + t * step[self.m + i]).collect();
                let fnew = self.residual(&qn, &cn);
                let nn = norm(&fnew);
                if nn < fnorm || (t == 1.0 && nn <= 1e-12) {
                    q = qn;
                    c = cn;
                    f = fnew;
                    fnorm = nn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (fnorm < 1e-10).then_some((q, c))
    }

    /// Rejects degenerate `q`: repeated roots or roots on growth points.
    fn acceptable(&self, q: &[f64]) -> bool {
        let roots = monic_roots(q);
        for (i, a) in roots.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() || a.norm() > 1e6 {
                return false;
            }
            if roots[i + 1..].iter().any(|b| (a - b).norm() < 1e-6) {
                return false;
            }
            if self.x.iter().any(|&x| (a - x).norm() < 1e-6) {
                return false;
            }
        }
        true
    }
}

/// Damped Newton on the pairwise relations in the configuration's own
/// coordinates, projecting onto the mirror-closed structure after each step.
fn polish(base: &Configuration, start: Vec<C64>, opts: &SolverOptions) -> Option<Solution> {
    let domain = base.uniformization();
    let x = base.x();
    let u = base.u();
    let m = start.len();
    let project = |pts: &[C64]| ScreeningCharges::from_points(domain, pts, 1e-6).ok();
    let mut charges = project(&start)?;
    let residual = |pts: &[C64]| residual_at(x, pts, u);
    let norm = |r: &[C64]| r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut pts = charges.points();
    let mut r = residual(&pts);
    let mut rn = norm(&r);
    let (wx, wxi) = if u.is_infinite() { (1.0, 2.0) } else { (2.0, 4.0) };
    let cu = 2.0 * x.len() as f64 - 4.0 * m as f64 + 4.0;
    for _ in 0..opts.max_newton_iter {
        if rn < opts.newton_tol || !rn.is_finite() {
            break;
        }
        let mut jac = DMatrix::<C64>::zeros(m, m);
        for k in 0..m {
            let mut diag = C64::new(0.0, 0.0);
            for &xj in x {
                diag += wx / ((pts[k] - xj) * (pts[k] - xj));
            }
            for l in 0..m {
                if l != k {
                    let d = pts[k] - pts[l];
                    diag -= wxi / (d * d);
                    jac[(k, l)] = wxi / (d * d);
                }
            }
            if let Point::Finite(uu) = u {
                diag -= cu / ((pts[k] - uu) * (pts[k] - uu));
            }
            jac[(k, k)] = diag;
        }
        let rhs = DVector::from_vec(r.iter().map(|v| -v).collect());
        let step = jac.lu().solve(&rhs)?;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let trial: Vec<C64> = (0..m).map(|k| pts[k] + step[k] * t).collect();
            if let Some(ch) = project(&trial) {
                let p = ch.points();
                let rr = residual(&p);
                let nn = norm(&rr);
                if nn < rn {
                    charges = ch;
                    pts = p;
                    r = rr;
                    rn = nn;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if !(rn < opts.accept_tol) {
        return None;
    }
    // the configuration must still be valid (no charge on x or u, distinct charges)
    base.with_charges(charges.clone()).ok()?;
    Some(Solution { charges, residual: rn, pattern: None })
}

/// Random closed starts in the configuration's own coordinates.
fn own_coordinate_multistart(base: &Configuration, m: usize, expected: u128, opts: &SolverOptions, pool: &mut Pool) {
    let domain = base.uniformization();
    let scale = base.x().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let chunk = 32;
    let mut next = 0;
    while (pool.len() as u128) < expected && next < opts.fallback_starts {
        let ids: Vec<usize> = (next..(next + chunk).min(opts.fallback_starts)).collect();
        next += ids.len();
        let found = par_map(ids, |id| {
            let mut rng = stream_rng(opts.seed ^ 0x00c0_ffee, id as u64);
            let pairs = rng.gen_range(0..=m / 2);
            let mut fixed = Vec::new();
            let mut paired = Vec::new();
            for _ in 0..pairs {
                paired.push(match domain {
                    Uniformization::HalfPlane => {
                        C64::new(rng.gen_range(-2.0..2.0) * scale, rng.gen_range(0.05..1.5) * scale)
                    }
                    Uniformization::Disk => C64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(-PI..PI)),
                });
            }
            while fixed.len() + 2 * paired.len() < m {
                fixed.push(match domain {
                    Uniformization::HalfPlane => C64::new(rng.gen_range(-2.0..2.0) * scale, 0.0),
                    Uniformization::Disk => C64::from_polar(1.0, rng.gen_range(-PI..PI)),
                });
            }
            let ch = ScreeningCharges::from_parts(domain, &fixed, &paired).ok()?;
            polish(base, ch.points(), opts)
        });
        for sol in found.into_iter().flatten() {
            pool.insert(sol);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::stationary_residual;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cubic_growth_points_give_critical_points_of_a() {
        let set = solve_half_plane(&[-1.0, 0.0, 1.0], 1, &SolverOptions::default()).unwrap();
        assert!(set.complete);
        let s = 1.0 / 3f64.sqrt();
        let xi: Vec<C64> = set.solutions.iter().map(|s| s.xi()[0]).collect();
        assert_eq!(xi.len(), 2);
        assert!((xi[0] - c(-s, 0.0)).norm() < 1e-12 && (xi[1] - c(s, 0.0)).norm() < 1e-12, "{xi:?}");
    }

    #[test]
    fn two_points_one_charge() {
        let set = solve_half_plane(&[-1.0, 1.0], 1, &SolverOptions::default()).unwrap();
        assert_eq!(set.solutions.len(), 1);
        assert!(set.solutions[0].xi()[0].norm() < 1e-12);
    }

    #[test]
    fn no_charges_gives_the_empty_solution() {
        let set = solve_half_plane(&[0.3], 0, &SolverOptions::default()).unwrap();
        assert_eq!(set.solutions.len(), 1);
        assert!(set.solutions[0].xi().is_empty());
    }

    #[test]
    fn threshold_is_empty_with_explanation() {
        let set = solve_half_plane(&[-1.0, 0.0, 1.0], 2, &SolverOptions::default()).unwrap();
        assert!(set.solutions.is_empty());
        assert!(set.explanation.unwrap().contains("no such R"));
    }

    #[test]
    fn overscreening_is_refused() {
        let r = solve_half_plane(&[-1.0, 1.0], 2, &SolverOptions::default());
        assert!(matches!(r, Err(SolverError::Overscreened { .. })));
    }

    #[test]
    fn counts_match_ballot_numbers() {
        let xs = [-1.3, -0.4, 0.1, 0.9, 2.2, 3.0];
        for (n, m) in [(4, 1), (4, 2), (5, 2), (6, 2), (6, 3)] {
            let set = solve_half_plane(&xs[..n], m, &SolverOptions::default()).unwrap();
            assert!(set.complete, "(n,m)=({n},{m}): {:?}", set.warnings);
            assert_eq!(set.solutions.len() as u128, ballot_number(n, m));
            for s in &set.solutions {
                let cfg = Configuration::half_plane(&xs[..n], &s.xi()).unwrap();
                assert!(stationary_residual(&cfg).max_abs < 1e-9);
            }
        }
    }

    #[test]
    fn disk_figure_4_11() {
        let x = [C64::i(), C64::from_polar(1.0, PI / 4.0), C64::from_polar(1.0, -PI / 4.0), -C64::i()];
        let set = solve_stationary(Uniformization::Disk, &x, Point::real(-1.0), 2, &SolverOptions::default()).unwrap();
        assert!(set.complete);
        assert_eq!(set.solutions.len(), 2);
        let hit = set.solutions.iter().any(|s| {
            let mut xi = s.xi();
            xi.sort_by(|a, b| a.re.total_cmp(&b.re));
            xi.iter().all(|z| z.im.abs() < 1e-9)
                && (xi[0].re - 0.49604).abs() < 1e-3
                && (xi[1].re - 2.0160).abs() < 1e-3
        });
        assert!(hit, "{:?}", set.solutions);
    }

    #[test]
    fn finite_marked_point_in_half_plane() {
        let x = [c(-1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)];
        let set = solve_stationary(Uniformization::HalfPlane, &x, Point::real(4.0), 1, &SolverOptions::default()).unwrap();
        assert!(set.complete, "{:?}", set.warnings);
        assert_eq!(set.solutions.len(), 2);
        for s in &set.solutions {
            assert!(s.residual < 1e-9);
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let xs = [-1.0, -0.2, 0.5, 1.7, 2.1];
        let opts = SolverOptions { seed: 7, ..Default::default() };
        let a = solve_half_plane(&xs, 2, &opts).unwrap();
        let b = solve_half_plane(&xs, 2, &opts).unwrap();
        assert_eq!(a, b);
    }
}
