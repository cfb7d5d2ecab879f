//! Möbius maps and transport of configurations between uniformizations.

use crate::config::{ConfigError, Configuration, Point, RawConfiguration, ScreeningCharges, Uniformization};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum MobiusError {
    #[error("degenerate Möbius map (ad - bc = {0})")]
    Degenerate(C64),
    #[error("map does not send the boundary of the source domain onto a line or circle boundary")]
    NotDomainMap,
    #[error("map sends the domain interior to the exterior")]
    ReversesInterior,
    #[error("{0} is sent to infinity")]
    PointAtInfinity(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

const PROJECTIVE_EPS: f64 = 1e-15;

impl MobiusMap {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self, MobiusError> {
        let map = MobiusMap { a, b, c, d };
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if map.det().norm() <= 1e-14 * scale * scale {
            return Err(MobiusError::Degenerate(map.det()));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        MobiusMap { a: one, b: zero, c: zero, d: one }
    }

    /// `z -> i (1 - z) / (1 + z)`, sending the unit disk onto the upper
    /// half-plane with `-1 -> inf`, `1 -> 0`, `0 -> i`.
    pub fn cayley() -> Self {
        let i = C64::i();
        MobiusMap { a: -i, b: i, c: C64::new(1.0, 0.0), d: C64::new(1.0, 0.0) }
    }

    /// `z -> scale * z + shift`.
    pub fn affine(scale: C64, shift: C64) -> Self {
        MobiusMap { a: scale, b: shift, c: C64::new(0.0, 0.0), d: C64::new(1.0, 0.0) }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Point {
        match p {
            Point::Finite(z) => self.apply_finite(z),
            Point::Infinity => {
                if self.c.norm() <= PROJECTIVE_EPS * self.a.norm() {
                    Point::Infinity
                } else {
                    Point::Finite(self.a / self.c)
                }
            }
        }
    }

    pub fn apply_finite(&self, z: C64) -> Point {
        let den = self.c * z + self.d;
        if den.norm() <= PROJECTIVE_EPS * (self.c.norm() * z.norm() + self.d.norm()) {
            Point::Infinity
        } else {
            Point::Finite((self.a * z + self.b) / den)
        }
    }

    pub fn derivative(&self, z: C64) -> C64 {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Whether the coefficients are real after removing a common complex factor.
    pub fn has_real_coefficients(&self, tol: f64) -> bool {
        let coeffs = [self.a, self.b, self.c, self.d];
        let lead = coeffs.iter().copied().max_by(|p, q| p.norm().total_cmp(&q.norm())).unwrap();
        coeffs.iter().all(|&z| (z / lead).im.abs() <= tol)
    }

    /// Boundary-preserving map taking `cfg` to the half-plane with `u = inf`.
    pub fn to_normal_form(cfg: &Configuration) -> MobiusMap {
        match (cfg.uniformization(), cfg.u()) {
            (Uniformization::HalfPlane, Point::Infinity) => MobiusMap::identity(),
            (Uniformization::HalfPlane, Point::Finite(u)) => MobiusMap {
                a: C64::new(0.0, 0.0),
                b: C64::new(-1.0, 0.0),
                c: C64::new(1.0, 0.0),
                d: -u,
            },
            (Uniformization::Disk, Point::Finite(u)) => {
                let rotate = MobiusMap::affine(-1.0 / u, C64::new(0.0, 0.0));
                MobiusMap::cayley().compose(&rotate)
            }
            (Uniformization::Disk, Point::Infinity) => MobiusMap::cayley(),
        }
    }
}

fn approx_eq_point(a: Point, b: Point, tol: f64) -> bool {
    match (a, b) {
        (Point::Infinity, Point::Infinity) => true,
        (Point::Finite(p), Point::Finite(q)) => (p - q).norm() <= tol * (1.0 + p.norm()),
        _ => false,
    }
}

/// Determines which model domain the map sends `source` onto.
fn target_domain(source: Uniformization, map: &MobiusMap) -> Result<Uniformization, MobiusError> {
    let samples: Vec<Point> = match source {
        Uniformization::HalfPlane => {
            vec![Point::real(-2.0), Point::real(0.0), Point::real(1.5), Point::Infinity]
        }
        Uniformization::Disk => [0.3, 2.0, -2.5, 4.0]
            .iter()
            .map(|&t| Point::Finite(C64::from_polar(1.0, t)))
            .collect(),
    };
    let images: Vec<Point> = samples.iter().map(|&p| map.apply(p)).collect();
    let on_line = images.iter().all(|p| match p {
        Point::Infinity => true,
        Point::Finite(w) => w.im.abs() <= 1e-9 * (1.0 + w.norm()),
    });
    let on_circle = images.iter().all(|p| match p {
        Point::Infinity => false,
        Point::Finite(w) => (w.norm() - 1.0).abs() <= 1e-9,
    });
    let target = if on_line {
        Uniformization::HalfPlane
    } else if on_circle {
        Uniformization::Disk
    } else {
        return Err(MobiusError::NotDomainMap);
    };
    let inner = match source {
        Uniformization::HalfPlane => C64::i(),
        Uniformization::Disk => C64::new(0.0, 0.0),
    };
    match map.apply_finite(inner) {
        Point::Finite(w) if target.contains(w) => Ok(target),
        _ => Err(MobiusError::ReversesInterior),
    }
}

/// Maps growth points, screening charges and the marked point through `map`.
///
/// The target uniformization is inferred from where the boundary lands, the
/// growth points are re-sorted into canonical order and the mirror-pair
/// structure of the charges is rebuilt in the target domain.
pub fn transport_configuration(cfg: &Configuration, map: &MobiusMap) -> Result<Configuration, MobiusError> {
    MobiusMap::new(map.a, map.b, map.c, map.d)?;
    let source = cfg.uniformization();
    let target = target_domain(source, map)?;
    let finite = |p: Point, what: &'static str| p.finite().ok_or(MobiusError::PointAtInfinity(what));

    let x = cfg
        .x()
        .iter()
        .map(|&z| finite(map.apply_finite(z), "a growth point").map(|w| target.snap_to_boundary(w)))
        .collect::<Result<Vec<_>, _>>()?;
    let u = match map.apply(cfg.u()) {
        Point::Finite(w) => Point::Finite(target.snap_to_boundary(w)),
        Point::Infinity => Point::Infinity,
    };
    let charges = cfg.charges();
    let fixed = charges
        .fixed()
        .iter()
        .map(|&z| finite(map.apply_finite(z), "a screening charge"))
        .collect::<Result<Vec<_>, _>>()?;
    let paired = charges
        .paired()
        .iter()
        .map(|&z| finite(map.apply_finite(z), "a screening charge"))
        .collect::<Result<Vec<_>, _>>()?;
    let structured = ScreeningCharges::from_parts(target, &fixed, &paired)
        .map_err(|e| MobiusError::Config(ConfigError::Invalid(vec![e.to_string()])))?;
    let raw = RawConfiguration { uniformization: target, x, xi: structured.points(), u: Some(u) };
    let out = Configuration::new(&raw)?;
    Ok(out.with_charges(structured)?)
}

/// Componentwise comparison used by round-trip checks.
pub fn configurations_close(a: &Configuration, b: &Configuration, tol: f64) -> bool {
    if a.uniformization() != b.uniformization() || a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    let xs = a.x().iter().zip(b.x()).all(|(p, q)| (p - q).norm() <= tol * (1.0 + p.norm()));
    let mut pa = a.xi();
    let mut pb = b.xi();
    let key = |z: &C64, w: &C64| z.re.total_cmp(&w.re).then(z.im.total_cmp(&w.im));
    pa.sort_by(key);
    pb.sort_by(key);
    let xis = pa.iter().zip(&pb).all(|(p, q)| (p - q).norm() <= tol * (1.0 + p.norm()));
    xs && xis && approx_eq_point(a.u(), b.u(), tol)
}
