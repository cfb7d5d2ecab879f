//! Master function, stationary relations and the drift coefficients derived
//! from them.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, Point};
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StationaryError {
    #[error("operation needs the half-plane picture with u = inf")]
    NotNormalForm,
    #[error("drift has imaginary part {0:e}; screening charges are not conjugation closed")]
    NotClosed(f64),
    #[error("coincident points {0} and {1}: master function undefined")]
    Coincident(C64, C64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryResidual {
    /// One complex residual per screening charge, in materialized order.
    pub r: Vec<C64>,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftVector {
    pub u: Vec<f64>,
}

fn u_coefficient(n: usize, m: usize) -> f64 {
    2.0 * n as f64 - 4.0 * m as f64 + 4.0
}

/// Residuals of the stationary relations for arbitrary points.
///
/// With finite `u` each entry is `-sum 2/(xi-x) + sum 4/(xi-xi') + (2n-4m+4)/(xi-u)`,
/// at `u = inf` it is `-sum 1/(xi-x) + sum 2/(xi-xi')`.
pub fn residual_at(x: &[C64], xi: &[C64], u: Point) -> Vec<C64> {
    let n = x.len();
    let m = xi.len();
    let (wx, wxi) = match u {
        Point::Infinity => (1.0, 2.0),
        Point::Finite(_) => (2.0, 4.0),
    };
    (0..m)
        .map(|k| {
            let z = xi[k];
            let mut r = C64::new(0.0, 0.0);
            for &xj in x {
                r -= wx / (z - xj);
            }
            for (l, &w) in xi.iter().enumerate() {
                if l != k {
                    r += wxi / (z - w);
                }
            }
            if let Point::Finite(u) = u {
                r += u_coefficient(n, m) / (z - u);
            }
            r
        })
        .collect()
}

pub fn stationary_residual(cfg: &Configuration) -> StationaryResidual {
    let r = residual_at(cfg.x(), &cfg.xi(), cfg.u());
    let max_abs = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    StationaryResidual { r, max_abs }
}

/// `log |Phi|` for arbitrary points; used directly by finite-difference checks.
pub fn master_log_at(x: &[C64], xi: &[C64], u: Point) -> Result<f64, StationaryError> {
    let n = x.len() as f64;
    let m = xi.len() as f64;
    let mut acc = 0.0;
    let mut term = |a: C64, b: C64, w: f64| -> Result<(), StationaryError> {
        let d = (a - b).norm();
        if d == 0.0 {
            return Err(StationaryError::Coincident(a, b));
        }
        acc += w * d.ln();
        Ok(())
    };
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            term(x[j], x[k], 2.0)?;
        }
    }
    for k in 0..xi.len() {
        for l in k + 1..xi.len() {
            term(xi[k], xi[l], 8.0)?;
        }
    }
    for &a in x {
        for &b in xi {
            term(a, b, -4.0)?;
        }
    }
    if let Point::Finite(u) = u {
        for &a in x {
            term(a, u, 2.0 * (-2.0 - n + 2.0 * m))?;
        }
        for &b in xi {
            term(b, u, 4.0 * (2.0 + n - 2.0 * m))?;
        }
    }
    Ok(acc)
}

pub fn master_log(cfg: &Configuration) -> Result<f64, StationaryError> {
    master_log_at(cfg.x(), &cfg.xi(), cfg.u())
}

/// Drift coefficients `U_j` from real growth points and closed charges,
/// together with the largest discarded imaginary part.
pub fn drift_at(x: &[f64], xi: &[C64]) -> (Vec<f64>, f64) {
    let mut max_im: f64 = 0.0;
    let u = (0..x.len())
        .map(|j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..x.len() {
                if k != j {
                    s += 2.0 / (x[j] - x[k]);
                }
            }
            for &w in xi {
                s -= 4.0 / (x[j] - w);
            }
            max_im = max_im.max(s.im.abs());
            s.re
        })
        .collect();
    (u, max_im)
}

pub fn drift_vector(cfg: &Configuration) -> Result<DriftVector, StationaryError> {
    if !cfg.is_normal_form() {
        return Err(StationaryError::NotNormalForm);
    }
    let (u, max_im) = drift_at(&cfg.x_real(), &cfg.xi());
    if max_im > 1e-9 {
        return Err(StationaryError::NotClosed(max_im));
    }
    Ok(DriftVector { u })
}

/// `1/2 U_j^2 + sum 2 U_k/(x_k - x_j) - sum 6/(x_k - x_j)^2` for given drift values.
pub fn null_vector_at(x: &[f64], u: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let mut v = 0.5 * u[j] * u[j];
            for k in 0..x.len() {
                if k != j {
                    let d = x[k] - x[j];
                    v += 2.0 * u[k] / d - 6.0 / (d * d);
                }
            }
            v
        })
        .collect()
}

pub fn null_vector_residual(cfg: &Configuration) -> Result<Vec<f64>, StationaryError> {
    let u = drift_vector(cfg)?;
    Ok(null_vector_at(&cfg.x_real(), &u.u))
}

/// `(sum U_j, sum x_j U_j - [(n-2m)^2 - n - 4m])`.
pub fn ward_residual(cfg: &Configuration) -> Result<(f64, f64), StationaryError> {
    let u = drift_vector(cfg)?.u;
    let x = cfg.x_real();
    let n = cfg.n() as f64;
    let m = cfg.m() as f64;
    let target = (n - 2.0 * m).powi(2) - n - 4.0 * m;
    let sum: f64 = u.iter().sum();
    let moment: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
    Ok((sum, moment - target))
}
