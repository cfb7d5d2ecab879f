//! The rational function whose critical points are the growth points and
//! whose finite poles are the screening charges.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, Point, Uniformization};
use crate::poly::{ComplexPolynomial, RealPolynomial};
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RationalError {
    #[error("operation needs the half-plane picture with u = inf")]
    NotNormalForm,
    #[error("operation needs a disk configuration with u = -1")]
    NotDefaultDisk,
    #[error("poles {0} and {1} coincide")]
    RepeatedPole(C64, C64),
    #[error("derivative has nonzero residues (max |B| = {max:e}); no rational primitive")]
    NotIntegrable { max: f64 },
    #[error("primitive failed its self-check (relative error {0:e})")]
    SelfCheck(f64),
}

/// `scale * prod (z - zeros) / prod (z - pole)^order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoredDerivative {
    pub zeros: Vec<C64>,
    pub poles: Vec<(C64, usize)>,
    pub scale: C64,
}

impl FactoredDerivative {
    pub fn eval(&self, z: C64) -> C64 {
        let mut v = self.scale;
        for &a in &self.zeros {
            v *= z - a;
        }
        for &(p, k) in &self.poles {
            v /= (z - p).powi(k as i32);
        }
        v
    }

    pub fn numerator(&self) -> ComplexPolynomial {
        ComplexPolynomial::from_roots(&self.zeros).scale(self.scale)
    }

    pub fn denominator(&self) -> ComplexPolynomial {
        let roots: Vec<C64> = self.poles.iter().flat_map(|&(p, k)| std::iter::repeat(p).take(k)).collect();
        ComplexPolynomial::from_roots(&roots)
    }

    /// Coefficients `c_{-1}, ..., c_{-k}` of the principal part at pole `idx`.
    pub fn principal_part(&self, idx: usize) -> Vec<C64> {
        let (zeta, order) = self.poles[idx];
        // Taylor series of the regular factor in w = z - zeta, built factor by
        // factor so nothing is expanded around the origin first
        let mut s = vec![C64::new(0.0, 0.0); order];
        s[0] = self.scale;
        let mul_series = |s: &mut Vec<C64>, f: &[C64]| {
            let prev = s.clone();
            for i in 0..s.len() {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..=i.min(f.len() - 1) {
                    acc += f[j] * prev[i - j];
                }
                s[i] = acc;
            }
        };
        for &x in &self.zeros {
            mul_series(&mut s, &[zeta - x, C64::new(1.0, 0.0)]);
        }
        for (j, &(p, k)) in self.poles.iter().enumerate() {
            if j == idx {
                continue;
            }
            let d = zeta - p;
            let inv: Vec<C64> = (0..order).map(|i| (-1.0 / d).powu(i as u32) / d).collect();
            for _ in 0..k {
                mul_series(&mut s, &inv);
            }
        }
        // c_{-j} = s[order - j]
        (1..=order).map(|j| s[order - j]).collect()
    }
}

/// Partial-fraction data at the double poles: `A_k`, `B_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueData {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
}

impl ResidueData {
    pub fn max_b(&self) -> f64 {
        self.b.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `R' = prod (z - x_j) / prod (z - xi_k)^2` in the half-plane with `u = inf`.
pub fn derivative_from_configuration(cfg: &Configuration) -> Result<FactoredDerivative, RationalError> {
    if !cfg.is_normal_form() {
        return Err(RationalError::NotNormalForm);
    }
    Ok(FactoredDerivative {
        zeros: cfg.x().to_vec(),
        poles: cfg.xi().into_iter().map(|p| (p, 2)).collect(),
        scale: C64::new(1.0, 0.0),
    })
}

pub fn residues(cfg: &Configuration) -> Result<ResidueData, RationalError> {
    if !cfg.is_normal_form() {
        return Err(RationalError::NotNormalForm);
    }
    let x = cfg.x();
    let xi = cfg.xi();
    for k in 0..xi.len() {
        for l in k + 1..xi.len() {
            if (xi[k] - xi[l]).norm() <= 1e-10 {
                return Err(RationalError::RepeatedPole(xi[k], xi[l]));
            }
        }
    }
    let mut a = Vec::with_capacity(xi.len());
    let mut b = Vec::with_capacity(xi.len());
    for (k, &z) in xi.iter().enumerate() {
        let mut ak = C64::new(1.0, 0.0);
        let mut log_der = C64::new(0.0, 0.0);
        for &xj in x {
            ak *= z - xj;
            log_der += 1.0 / (z - xj);
        }
        for (l, &w) in xi.iter().enumerate() {
            if l != k {
                ak /= (z - w) * (z - w);
                log_der -= 2.0 / (z - w);
            }
        }
        a.push(ak);
        b.push(log_der * ak);
    }
    Ok(ResidueData { a, b })
}

/// Pulls the half-plane derivative back to the disk along
/// `z -> i (1 - z)/(1 + z)`, including the factor `(z + 1)^{2m - n - 2}`.
pub fn pullback_disk(cfg: &Configuration) -> Result<FactoredDerivative, RationalError> {
    let minus_one = C64::new(-1.0, 0.0);
    let default_u = matches!(cfg.u(), Point::Finite(u) if (u - minus_one).norm() < 1e-12);
    if cfg.uniformization() != Uniformization::Disk || !default_u {
        return Err(RationalError::NotDefaultDisk);
    }
    let n = cfg.n() as i64;
    let m = cfg.m() as i64;
    let xi = cfg.xi();
    let one = C64::new(1.0, 0.0);
    let mut scale = C64::i().powi((n + 1) as i32);
    for &w in &xi {
        scale *= (one + w) * (one + w);
    }
    for &x in cfg.x() {
        scale /= one + x;
    }
    if scale.im.abs() < 1e-10 * scale.norm() {
        scale = C64::new(scale.re, 0.0);
    }
    let mut zeros = cfg.x().to_vec();
    let mut poles: Vec<(C64, usize)> = xi.iter().map(|&p| (p, 2)).collect();
    let exponent = 2 * m - n - 2;
    if exponent < 0 {
        poles.push((minus_one, (-exponent) as usize));
    } else {
        zeros.extend(std::iter::repeat(minus_one).take(exponent as usize));
    }
    Ok(FactoredDerivative { zeros, poles, scale })
}

/// `R = P / Q` with complex coefficients, together with its factored derivative.
///
/// In the half-plane picture the coefficients are real; pulled back to the
/// disk they generally are not, and `R` is instead constant-imaginary on
/// the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    numerator: ComplexPolynomial,
    denominator: ComplexPolynomial,
    derivative: FactoredDerivative,
}

impl RationalMap {
    pub fn numerator(&self) -> &ComplexPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &ComplexPolynomial {
        &self.denominator
    }

    pub fn real_numerator(&self) -> Option<RealPolynomial> {
        self.numerator().to_real(1e-12)
    }

    pub fn real_denominator(&self) -> Option<RealPolynomial> {
        self.denominator().to_real(1e-12)
    }

    pub fn derivative(&self) -> &FactoredDerivative {
        &self.derivative
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.numerator.eval(z) / self.denominator.eval(z)
    }

    pub fn eval_derivative(&self, z: C64) -> C64 {
        self.derivative.eval(z)
    }

    /// `(P'Q - PQ')/Q^2` from the coefficients.
    pub fn coefficient_derivative(&self, z: C64) -> C64 {
        let p = self.numerator();
        let q = self.denominator();
        let qz = q.eval(z);
        (p.derivative().eval(z) * qz - p.eval(z) * q.derivative().eval(z)) / (qz * qz)
    }

    pub fn critical_points(&self) -> &[C64] {
        &self.derivative.zeros
    }

    pub fn poles(&self) -> Vec<C64> {
        self.derivative.poles.iter().map(|&(p, _)| p).collect()
    }

    /// Roots of `P'Q - PQ'` away from the poles.
    pub fn critical_points_from_coefficients(&self) -> Vec<C64> {
        let p = self.numerator();
        let q = self.denominator();
        let w = p.derivative().mul(&q).sub(&p.mul(&q.derivative()));
        let poles = self.poles();
        w.roots().into_iter().filter(|z| poles.iter().all(|p| (z - p).norm() > 1e-3)).collect()
    }

    /// `deg P - deg Q`; positive values are the pole order at infinity.
    pub fn pole_order_at_infinity(&self) -> i64 {
        self.numerator().degree() as i64 - self.denominator().degree() as i64
    }
}

/// Integrates a factored derivative with zero integration constant.
pub fn primitive(d: &FactoredDerivative) -> Result<RationalMap, RationalError> {
    let num = d.numerator();
    let den = d.denominator();
    let (poly_part, _) = num.div_rem(&den);
    let mut max_res: f64 = 0.0;
    let mut parts = Vec::with_capacity(d.poles.len());
    for idx in 0..d.poles.len() {
        let pp = d.principal_part(idx);
        let size = pp.iter().map(|z| z.norm()).fold(0.0, f64::max);
        max_res = max_res.max(pp[0].norm() / (1.0 + size));
        parts.push(pp);
    }
    if max_res > 1e-8 {
        return Err(RationalError::NotIntegrable { max: max_res });
    }

    // R = int p + sum_k sum_{j>=2} c_{-j} / ((1-j) (z - zeta_k)^{j-1})
    let lowered: Vec<ComplexPolynomial> = d
        .poles
        .iter()
        .map(|&(p, k)| ComplexPolynomial::from_roots(&vec![p; k.saturating_sub(1)]))
        .collect();
    let q = lowered.iter().fold(ComplexPolynomial::constant(C64::new(1.0, 0.0)), |acc, f| acc.mul(f));
    let mut p = poly_part.integral().mul(&q);
    for (idx, &(zeta, order)) in d.poles.iter().enumerate() {
        let rest = lowered
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .fold(ComplexPolynomial::constant(C64::new(1.0, 0.0)), |acc, (_, f)| acc.mul(f));
        for j in 2..=order {
            let coef = parts[idx][j - 1] / (1.0 - j as f64);
            let term = ComplexPolynomial::from_roots(&vec![zeta; order - j]).mul(&rest).scale(coef);
            p = p.add(&term);
        }
    }
    let map = RationalMap { numerator: p, denominator: q, derivative: d.clone() };
    let err = self_check(&map);
    if !(err <= 1e-9) {
        return Err(RationalError::SelfCheck(err));
    }
    Ok(map)
}

fn self_check(map: &RationalMap) -> f64 {
    let d = &map.derivative;
    let feats: Vec<C64> = d.zeros.iter().copied().chain(d.poles.iter().map(|&(p, _)| p)).collect();
    let center = if feats.is_empty() { C64::new(0.0, 0.0) } else { feats.iter().sum::<C64>() / feats.len() as f64 };
    let radius = feats.iter().map(|z| (z - center).norm()).fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    for ring in [0.37, 0.81, 1.3] {
        // errors are measured against the largest value on the ring, since
        // R' can be arbitrarily small near its zeros
        let mut err: f64 = 0.0;
        let mut size: f64 = 0.0;
        for k in 0..24 {
            let z = center + C64::from_polar(ring * radius, 0.1 + k as f64 * std::f64::consts::TAU / 24.0);
            let near = feats.iter().map(|f| (z - f).norm()).fold(f64::INFINITY, f64::min);
            if near < 0.05 * radius {
                continue;
            }
            let exact = d.eval(z);
            err = err.max((map.coefficient_derivative(z) - exact).norm());
            size = size.max(exact.norm());
        }
        if size > 0.0 {
            worst = worst.max(err / size);
        }
    }
    worst
}
