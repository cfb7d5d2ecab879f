//! Calogero–Moser side of the half-plane picture: momenta from drift
//! coefficients, null vector Hamiltonians, the Lax pair and Poisson brackets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::loewner::{evolve, EvolveOptions, Halt, History, LoewnerError};
use crate::stationary::{drift_vector, StationaryError};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Self {
        assert_eq!(x.len(), p.len(), "positions and momenta differ in length");
        PhasePoint { x, p }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `f_jk = 2/(x_j - x_k)`, zero on the diagonal.
    pub fn f(&self, j: usize, k: usize) -> f64 {
        if j == k {
            0.0
        } else {
            2.0 / (self.x[j] - self.x[k])
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalogeroError {
    #[error(transparent)]
    Stationary(#[from] StationaryError),
    #[error(transparent)]
    Loewner(#[from] LoewnerError),
    #[error("collision at t = {0} before the end of the fit window")]
    Collision(f64),
}

/// `p_j = U_j + sum_{k != j} 2/(x_j - x_k)`.
pub fn phase_from_configuration(cfg: &Configuration) -> Result<PhasePoint, CalogeroError> {
    let u = drift_vector(cfg)?.u;
    let x = cfg.x_real();
    let mut ph = PhasePoint::new(x, u);
    for j in 0..ph.n() {
        let s: f64 = (0..ph.n()).map(|k| ph.f(j, k)).sum();
        ph.p[j] += s;
    }
    Ok(ph)
}

/// `H_j = p_j^2/2 - sum_k (p_j + p_k) f_jk + sum_{k != l} f_jk f_jl - 2 sum_k f_jk^2`.
pub fn null_hamiltonians(ph: &PhasePoint) -> Vec<f64> {
    let n = ph.n();
    (0..n)
        .map(|j| {
            let mut h = 0.5 * ph.p[j] * ph.p[j];
            let mut s = 0.0;
            let mut q = 0.0;
            for k in 0..n {
                let f = ph.f(j, k);
                h -= (ph.p[j] + ph.p[k]) * f;
                s += f;
                q += f * f;
            }
            h + s * s - q - 2.0 * q
        })
        .collect()
}

/// Gradient of `H_j` as `(dH/dx, dH/dp)`.
pub fn hamiltonian_gradient(ph: &PhasePoint, j: usize) -> (Vec<f64>, Vec<f64>) {
    let n = ph.n();
    let mut dx = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let s: f64 = (0..n).map(|k| ph.f(j, k)).sum();
    dp[j] = ph.p[j] - s;
    for i in 0..n {
        if i == j {
            continue;
        }
        let f = ph.f(j, i);
        // d f_ji / d x_j; the derivative in x_i has the opposite sign
        let d = -0.5 * f * f;
        dp[i] = -f;
        dx[j] += -(ph.p[j] + ph.p[i]) * d + 2.0 * s * d - 6.0 * f * d;
        dx[i] = (ph.p[j] + ph.p[i]) * d - 2.0 * s * d + 6.0 * f * d;
    }
    (dx, dp)
}

pub struct LaxPair {
    pub l: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

impl LaxPair {
    pub fn rows(mat: &DMatrix<f64>) -> Vec<Vec<f64>> {
        (0..mat.nrows()).map(|i| mat.row(i).iter().copied().collect()).collect()
    }
}

/// `L = diag(p) - X` with `X_jk = 2 f_jk`; `M_jk = f_jk^2` off the diagonal
/// and `M_jj = -sum_l f_jl^2`.
pub fn lax_matrices(ph: &PhasePoint) -> LaxPair {
    let n = ph.n();
    let l = DMatrix::from_fn(n, n, |j, k| if j == k { ph.p[j] } else { -2.0 * ph.f(j, k) });
    let mut m = DMatrix::from_fn(n, n, |j, k| ph.f(j, k).powi(2));
    for j in 0..n {
        let s: f64 = m.row(j).sum();
        m[(j, j)] = -s;
    }
    LaxPair { l, m }
}

/// `L^2 1`; on the null manifold this vanishes and `H_j = (L^2 1)_j / 2` always.
pub fn lax_square_ones(ph: &PhasePoint) -> Vec<f64> {
    let l = lax_matrices(ph).l;
    let ones = nalgebra::DVector::from_element(ph.n(), 1.0);
    (&l * (&l * ones)).iter().copied().collect()
}

/// A smooth function on phase space. The default gradient uses central
/// differences with step `1e-6`.
pub trait PhaseFunction {
    fn value(&self, ph: &PhasePoint) -> f64;

    fn gradient(&self, ph: &PhasePoint) -> (Vec<f64>, Vec<f64>) {
        let h = 1e-6;
        let n = ph.n();
        let mut dx = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut q = ph.clone();
        for i in 0..n {
            q.x[i] = ph.x[i] + h;
            let a = self.value(&q);
            q.x[i] = ph.x[i] - h;
            let b = self.value(&q);
            q.x[i] = ph.x[i];
            dx[i] = (a - b) / (2.0 * h);
            q.p[i] = ph.p[i] + h;
            let a = self.value(&q);
            q.p[i] = ph.p[i] - h;
            let b = self.value(&q);
            q.p[i] = ph.p[i];
            dp[i] = (a - b) / (2.0 * h);
        }
        (dx, dp)
    }
}

/// The null vector Hamiltonian `H_j`, with its closed-form gradient.
pub struct NullHamiltonian(pub usize);

impl PhaseFunction for NullHamiltonian {
    fn value(&self, ph: &PhasePoint) -> f64 {
        null_hamiltonians(ph)[self.0]
    }

    fn gradient(&self, ph: &PhasePoint) -> (Vec<f64>, Vec<f64>) {
        hamiltonian_gradient(ph, self.0)
    }
}

/// Wraps a closure; its gradient falls back to finite differences.
pub struct Sampled<F>(pub F);

impl<F: Fn(&PhasePoint) -> f64> PhaseFunction for Sampled<F> {
    fn value(&self, ph: &PhasePoint) -> f64 {
        (self.0)(ph)
    }
}

/// `{F, G} = sum_j dF/dp_j dG/dx_j - dF/dx_j dG/dp_j`, so `{p_i, x_j} = delta_ij`.
pub fn poisson_bracket(f: &dyn PhaseFunction, g: &dyn PhaseFunction, ph: &PhasePoint) -> f64 {
    let (fx, fp) = f.gradient(ph);
    let (gx, gp) = g.gradient(ph);
    (0..ph.n()).map(|j| fp[j] * gx[j] - fx[j] * gp[j]).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub sum_h: f64,
    /// `sum p^2/2 - sum_{j<k} 8/(x_j - x_k)^2`.
    pub cm_energy_printed: f64,
    /// `sum p^2/2 - sum_{j<k} 16/(x_j - x_k)^2`, which equals `sum_h` identically.
    pub cm_energy_resummed: f64,
}

pub fn energy(ph: &PhasePoint) -> Energy {
    let kinetic: f64 = ph.p.iter().map(|p| 0.5 * p * p).sum();
    let mut pot = 0.0;
    for j in 0..ph.n() {
        for k in j + 1..ph.n() {
            pot += 1.0 / (ph.x[j] - ph.x[k]).powi(2);
        }
    }
    Energy {
        sum_h: null_hamiltonians(ph).iter().sum(),
        cm_energy_printed: kinetic - 8.0 * pot,
        cm_energy_resummed: kinetic - 16.0 * pot,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingFit {
    /// Least-squares `g` in `x_j'' = -sum_k g/(x_j - x_k)^3`.
    pub g: f64,
    pub max_residual: f64,
    /// Same fit for the charges, `xi_k'' = -sum_l g/(xi_k - xi_l)^3`, when
    /// there are at least two of them.
    pub g_xi: Option<f64>,
    pub max_residual_xi: Option<f64>,
    pub samples: usize,
    /// Largest change of any `H_j(x(t), x'(t))` along the trajectory.
    pub hamiltonian_drift: f64,
}

/// Second derivatives of growth points and charges from the first-order
/// system `x_j' = sum 4/(x_j - x_k) - sum 4/(x_j - xi_l)`,
/// `xi_l' = sum 2/(xi_l - x_j)`, differentiated in closed form.
pub fn accelerations(x: &[f64], xi: &[C64]) -> (Vec<f64>, Vec<C64>) {
    let n = x.len();
    let xd = crate::loewner::driving_velocity(x, xi, &vec![1.0; n]);
    let xid: Vec<C64> = xi.iter().map(|&z| x.iter().map(|&xj| 2.0 / (z - xj)).sum()).collect();
    let xdd = (0..n)
        .map(|j| {
            let mut a = C64::new(0.0, 0.0);
            for k in 0..n {
                if k != j {
                    a -= 4.0 * (xd[j] - xd[k]) / (x[j] - x[k]).powi(2);
                }
            }
            for (l, &z) in xi.iter().enumerate() {
                let d = C64::new(x[j], 0.0) - z;
                a += 4.0 * (xd[j] - xid[l]) / (d * d);
            }
            a.re
        })
        .collect();
    let xidd = xi
        .iter()
        .enumerate()
        .map(|(l, &z)| (0..n).map(|j| -2.0 * (xid[l] - xd[j]) / ((z - x[j]) * (z - x[j]))).sum())
        .collect();
    (xdd, xidd)
}

fn inverse_cubes_real(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| (0..x.len()).filter(|&k| k != j).map(|k| 1.0 / (x[j] - x[k]).powi(3)).sum())
        .collect()
}

fn inverse_cubes(z: &[C64]) -> Vec<C64> {
    (0..z.len())
        .map(|j| (0..z.len()).filter(|&k| k != j).map(|k| 1.0 / (z[j] - z[k]).powu(3)).sum())
        .collect()
}

/// Fits the pair coupling of the second-order dynamics along the flow from
/// a stationary configuration with `nu = 1`.
pub fn cm_dynamics_residual(cfg: &Configuration, t_end: f64, dt: f64) -> Result<CouplingFit, CalogeroError> {
    let history = evolve(cfg, &EvolveOptions { dt, t_end, ..Default::default() })?;
    if let Halt::Collision { t, .. } | Halt::NonFinite { t } = history.halt {
        return Err(CalogeroError::Collision(t));
    }
    Ok(fit_coupling(&history))
}

pub fn fit_coupling(history: &History) -> CouplingFit {
    let mut samples = Vec::with_capacity(history.states.len());
    for st in &history.states {
        let xi = st.xi();
        let (a, axi) = accelerations(&st.x, &xi);
        samples.push((a, inverse_cubes_real(&st.x), axi, inverse_cubes(&xi)));
    }
    let (mut num, mut den) = (0.0, 0.0);
    let (mut num_xi, mut den_xi) = (0.0, 0.0);
    for (a, b, axi, bxi) in &samples {
        for (ai, bi) in a.iter().zip(b) {
            num -= ai * bi;
            den += bi * bi;
        }
        for (ai, bi) in axi.iter().zip(bxi) {
            num_xi -= (ai * bi.conj()).re;
            den_xi += bi.norm_sqr();
        }
    }
    let g = if den > 0.0 { num / den } else { 0.0 };
    let has_xi = history.states[0].xi().len() >= 2 && den_xi > 0.0;
    let g_xi = has_xi.then(|| num_xi / den_xi);
    let mut max_residual: f64 = 0.0;
    let mut max_residual_xi: f64 = 0.0;
    for (a, b, axi, bxi) in &samples {
        for (ai, bi) in a.iter().zip(b) {
            max_residual = max_residual.max((ai + g * bi).abs());
        }
        if let Some(gx) = g_xi {
            for (ai, bi) in axi.iter().zip(bxi) {
                max_residual_xi = max_residual_xi.max((ai + gx * bi).norm());
            }
        }
    }
    CouplingFit {
        g,
        max_residual,
        g_xi,
        max_residual_xi: g_xi.map(|_| max_residual_xi),
        samples: samples.len(),
        hamiltonian_drift: hamiltonian_drift(history),
    }
}

/// Largest `|H_j(x(t), p(t)) - H_j(x(0), p(0))|` with `p = x'`.
pub fn hamiltonian_drift(history: &History) -> f64 {
    let h0 = null_hamiltonians(&PhasePoint::new(history.states[0].x.clone(), history.states[0].velocity.clone()));
    history
        .states
        .iter()
        .map(|st| {
            let h = null_hamiltonians(&PhasePoint::new(st.x.clone(), st.velocity.clone()));
            h.iter().zip(&h0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn semicircle_phase_point() {
        let ph = phase_from_configuration(&semicircle()).unwrap();
        assert!((ph.p[0] - 2.0).abs() < 1e-14 && (ph.p[1] + 2.0).abs() < 1e-14);
        let h = null_hamiltonians(&ph);
        assert!(h.iter().all(|v| v.abs() < 1e-14));
        let lax = lax_matrices(&ph);
        assert_eq!(LaxPair::rows(&lax.l), vec![vec![2.0, 2.0], vec![-2.0, -2.0]]);
        assert!((&lax.l * &lax.l).iter().all(|v| v.abs() < 1e-14));
        let e = energy(&ph);
        assert!(e.sum_h.abs() < 1e-14);
        assert!((e.cm_energy_printed - 2.0).abs() < 1e-14);
        assert!(e.cm_energy_resummed.abs() < 1e-14);
    }

    #[test]
    fn three_point_momenta_match_driving_velocity() {
        let cfg = three_one();
        let ph = phase_from_configuration(&cfg).unwrap();
        let v = crate::loewner::driving_velocity(&cfg.x_real(), &cfg.xi(), &[1.0; 3]);
        for (a, b) in ph.p.iter().zip(&v) {
            assert!((a - b).abs() < 1e-10);
        }
        let h = evolve(&cfg, &EvolveOptions { dt: 1e-4, t_end: 0.0, ..Default::default() }).unwrap();
        assert_eq!(h.states[0].velocity, v);
        assert!(null_hamiltonians(&ph).iter().all(|h| h.abs() < 1e-8));
    }

    #[test]
    fn symmetric_configuration_has_odd_momenta() {
        let x = [-2.0, -0.5, 0.5, 2.0];
        let set = crate::solver::solve_half_plane(&x, 1, &Default::default()).unwrap();
        // the symmetric solution has its charge at the origin
        let sol = set.solutions.iter().find(|s| s.xi()[0].norm() < 1e-9).unwrap();
        let ph = phase_from_configuration(&Configuration::half_plane(&x, &sol.xi()).unwrap()).unwrap();
        for j in 0..4 {
            assert!((ph.p[j] + ph.p[3 - j]).abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_sizes() {
        let ph = PhasePoint::new(vec![0.3], vec![0.0]);
        assert_eq!(null_hamiltonians(&ph), vec![0.0]);
        let ph = PhasePoint::new(vec![0.3], vec![1.5]);
        let lax = lax_matrices(&ph);
        assert_eq!(lax.l[(0, 0)], 1.5);
        assert_eq!(lax.m[(0, 0)], 0.0);
        let e = energy(&ph);
        assert_eq!(e.sum_h, 1.125);
        assert_eq!(e.cm_energy_printed, 1.125);
    }

    #[test]
    fn off_manifold_momenta_break_the_null_relations() {
        let mut ph = phase_from_configuration(&three_one()).unwrap();
        ph.p[1] += 0.1;
        assert!(null_hamiltonians(&ph).iter().any(|h| h.abs() > 1e-3));
    }

    #[test]
    fn canonical_brackets() {
        let ph = PhasePoint::new(vec![-1.0, 0.2, 1.3], vec![0.5, -0.1, 0.7]);
        for i in 0..3 {
            for j in 0..3 {
                let pi = Sampled(move |q: &PhasePoint| q.p[i]);
                let xj = Sampled(move |q: &PhasePoint| q.x[j]);
                let b = poisson_bracket(&pi, &xj, &ph);
                assert!((b - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn coupling_from_semicircle_initial_data() {
        let (a, _) = accelerations(&[-1.0, 1.0], &[c(0.0, 0.0)]);
        assert!((a[0] - 4.0).abs() < 1e-14);
        let b = inverse_cubes_real(&[-1.0, 1.0]);
        assert!((-a[0] / b[0] - 32.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_fit_along_three_point_flow() {
        let fit = cm_dynamics_residual(&three_one(), 0.04, 1e-4).unwrap();
        assert!((fit.g - 32.0).abs() < 1e-4, "{fit:?}");
        assert!(fit.max_residual < 1e-6, "{fit:?}");
        assert!(fit.hamiltonian_drift < 1e-7, "{fit:?}");
        assert!(fit.g_xi.is_none());
    }

    #[test]
    fn coupling_fit_in_charge_sector() {
        let x = [-2.0, -0.7, 0.6, 1.9];
        let set = crate::solver::solve_half_plane(&x, 2, &Default::default()).unwrap();
        assert!(!set.solutions.is_empty());
        for sol in &set.solutions {
            let cfg = Configuration::half_plane(&x, &sol.xi()).unwrap();
            let fit = cm_dynamics_residual(&cfg, 0.01, 1e-4).unwrap();
            assert!((fit.g - 32.0).abs() < 1e-4, "{fit:?}");
            let gx = fit.g_xi.unwrap();
            assert!((gx - 32.0).abs() < 1e-4, "{fit:?}");
        }
    }

    #[test]
    fn collision_is_reported() {
        assert!(matches!(cm_dynamics_residual(&semicircle(), 0.3, 1e-3), Err(CalogeroError::Collision(_))));
    }

    fn phase(n: usize) -> impl Strategy<Value = PhasePoint> {
        (proptest::collection::vec(0.2f64..1.5, n), proptest::collection::vec(-3.0f64..3.0, n)).prop_map(|(gaps, p)| {
            let mut x = Vec::with_capacity(gaps.len());
            let mut acc = -1.0;
            for g in gaps {
                acc += g;
                x.push(acc);
            }
            PhasePoint::new(x, p)
        })
    }

    proptest! {
        #[test]
        fn lax_identity(ph in (1usize..7).prop_flat_map(phase)) {
            let h = null_hamiltonians(&ph);
            let l2 = lax_square_ones(&ph);
            for (a, b) in h.iter().zip(&l2) {
                prop_assert!((a - 0.5 * b).abs() < 1e-10 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn energy_identity(ph in (1usize..7).prop_flat_map(phase)) {
            let e = energy(&ph);
            prop_assert!((e.sum_h - e.cm_energy_resummed).abs() < 1e-10 * (1.0 + e.sum_h.abs()));
        }

        #[test]
        fn lax_pair_shape(ph in (1usize..7).prop_flat_map(phase)) {
            let lax = lax_matrices(&ph);
            let n = ph.n();
            for j in 0..n {
                prop_assert!(lax.m.row(j).sum().abs() < 1e-12 * (1.0 + lax.m[(j, j)].abs()));
                for k in 0..n {
                    prop_assert_eq!(lax.m[(j, k)], lax.m[(k, j)]);
                    if j != k {
                        prop_assert_eq!(lax.l[(j, k)], -lax.l[(k, j)]);
                    }
                }
            }
        }

        #[test]
        fn analytic_gradient_matches_differences(ph in (2usize..6).prop_flat_map(phase), j in 0usize..6) {
            let j = j % ph.n();
            let (ax, ap) = hamiltonian_gradient(&ph, j);
            let fd = Sampled(|q: &PhasePoint| null_hamiltonians(q)[j]);
            let (fx, fp) = fd.gradient(&ph);
            let scale = 1.0 + ax.iter().chain(&ap).fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..ph.n() {
                prop_assert!((ax[i] - fx[i]).abs() < 1e-6 * scale);
                prop_assert!((ap[i] - fp[i]).abs() < 1e-6 * scale);
            }
        }

        #[test]
        fn bracket_antisymmetry_and_leibniz(ph in (1usize..5).prop_flat_map(phase)) {
            let f = Sampled(|q: &PhasePoint| q.x.iter().zip(&q.p).map(|(x, p)| x * x * p).sum::<f64>());
            let g = Sampled(|q: &PhasePoint| q.p.iter().map(|p| p * p).sum::<f64>() + q.x[0]);
            let h = Sampled(|q: &PhasePoint| q.x.iter().sum::<f64>() * q.p[0]);
            let fg = Sampled(|q: &PhasePoint| f.value(q) * g.value(q));
            let ab = poisson_bracket(&f, &g, &ph);
            prop_assert!((ab + poisson_bracket(&g, &f, &ph)).abs() < 1e-8 * (1.0 + ab.abs()));
            let lhs = poisson_bracket(&fg, &h, &ph);
            let rhs = f.value(&ph) * poisson_bracket(&g, &h, &ph) + g.value(&ph) * poisson_bracket(&f, &h, &ph);
            prop_assert!((lhs - rhs).abs() < 1e-6 * (1.0 + lhs.abs()));
        }

        #[test]
        fn hamiltonians_commute_on_common_levels(x in phase(3), j in 0usize..3, k in 0usize..3) {
            prop_assume!(j != k);
            // move p_j until H_j = H_k; H_j is quadratic in p_j
            let mut ph = x;
            let solve = |ph: &PhasePoint| {
                // H_j - H_k as a function of p_j is a p_j^2/2 + b p_j + c
                let eval = |v: f64| {
                    let mut q = ph.clone();
                    q.p[j] = v;
                    let h = null_hamiltonians(&q);
                    h[j] - h[k]
                };
                let c0 = eval(0.0);
                let c1 = eval(1.0);
                let cm = eval(-1.0);
                let a = 0.5 * (c1 + cm) - c0;
                let b = 0.5 * (c1 - cm);
                let disc = b * b - 4.0 * a * c0;
                (disc >= 0.0).then(|| (-b + disc.sqrt()) / (2.0 * a))
            };
            let root = solve(&ph);
            prop_assume!(root.is_some());
            ph.p[j] = root.unwrap();
            let h = null_hamiltonians(&ph);
            prop_assume!((h[j] - h[k]).abs() < 1e-9);
            let b = poisson_bracket(&NullHamiltonian(j), &NullHamiltonian(k), &ph);
            prop_assert!(b.abs() < 1e-8, "bracket {b}");
        }
    }

    #[test]
    fn bracket_ratio_is_a_configuration_function() {
        // {H_1, H_2} / (H_2 - H_1) at fixed x for random p
        let x = vec![-0.4, 0.9];
        let f12 = 2.0 / (x[0] - x[1]);
        let mut ratios = Vec::new();
        for (a, b) in [(0.3, -1.2), (2.0, 0.7), (-1.1, -0.4), (0.05, 1.9), (1.3, 1.4)] {
            let ph = PhasePoint::new(x.clone(), vec![a, b]);
            let h = null_hamiltonians(&ph);
            let br = poisson_bracket(&NullHamiltonian(0), &NullHamiltonian(1), &ph);
            ratios.push(br / (h[1] - h[0]));
        }
        let r = sorted(ratios);
        assert!((r[r.len() - 1] - r[0]).abs() < 1e-9 * (1.0 + r[0].abs()), "{r:?}");
        // the ratio is f_12^2 itself, not its reciprocal
        assert!((r[0] - f12 * f12).abs() < 1e-9 * f12 * f12, "{} vs {}", r[0], f12 * f12);
    }
}
