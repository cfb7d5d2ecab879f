//! Configurations of growth points, screening charges and the marked point.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::C64;

/// Minimum separation between any two marked points of a configuration.
pub const COLLISION_TOL: f64 = 1e-10;
/// Tolerance for boundary membership of growth points.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Tolerance used to recognise reflection partners among screening charges.
pub const CLOSURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniformization {
    /// Upper half-plane; the boundary is the real line, default marked point at infinity.
    HalfPlane,
    /// Unit disk; the boundary is the unit circle, default marked point `-1`.
    Disk,
}

impl Uniformization {
    /// The anti-holomorphic reflection fixing the boundary.
    pub fn reflect(self, z: C64) -> C64 {
        match self {
            Uniformization::HalfPlane => z.conj(),
            Uniformization::Disk => z.conj().inv(),
        }
    }

    pub fn boundary_distance(self, z: C64) -> f64 {
        match self {
            Uniformization::HalfPlane => z.im.abs(),
            Uniformization::Disk => (z.norm() - 1.0).abs(),
        }
    }

    pub fn snap_to_boundary(self, z: C64) -> C64 {
        match self {
            Uniformization::HalfPlane => C64::new(z.re, 0.0),
            Uniformization::Disk => z / z.norm(),
        }
    }

    /// Whether `z` lies strictly inside the domain.
    pub fn contains(self, z: C64) -> bool {
        match self {
            Uniformization::HalfPlane => z.im > 0.0,
            Uniformization::Disk => z.norm_sqr() < 1.0,
        }
    }

    pub fn default_marked_point(self) -> Point {
        match self {
            Uniformization::HalfPlane => Point::Infinity,
            Uniformization::Disk => Point::Finite(C64::new(-1.0, 0.0)),
        }
    }

    /// Inward unit normal at the boundary point `x`.
    pub fn inward_normal(self, x: C64) -> C64 {
        match self {
            Uniformization::HalfPlane => C64::i(),
            Uniformization::Disk => -x / x.norm(),
        }
    }
}

/// A point of the Riemann sphere. Infinity is a tag, never a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(C64),
    Infinity,
}

impl Point {
    pub fn real(x: f64) -> Self {
        Point::Finite(C64::new(x, 0.0))
    }

    pub fn finite(self) -> Option<C64> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn distance(self, other: Point) -> f64 {
        match (self, other) {
            (Point::Finite(a), Point::Finite(b)) => (a - b).norm(),
            (Point::Infinity, Point::Infinity) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "{}", z),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Tag(String),
    Pair([f64; 2]),
    Real(f64),
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Finite(z) => PointRepr::Pair([z.re, z.im]).serialize(s),
            Point::Infinity => PointRepr::Tag("inf".into()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Tag(t) if t == "inf" || t == "infinity" => Ok(Point::Infinity),
            PointRepr::Tag(t) => Err(serde::de::Error::custom(format!("unknown point tag `{t}`"))),
            PointRepr::Pair([re, im]) => Ok(Point::Finite(C64::new(re, im))),
            PointRepr::Real(re) => Ok(Point::real(re)),
        }
    }
}

/// Screening charges stored so that closure under the boundary reflection
/// holds exactly: `fixed` lie on the boundary (real axis or unit circle),
/// every entry of `paired` stands for itself and its mirror image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningCharges {
    domain: Uniformization,
    fixed: Vec<C64>,
    paired: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClosureError {
    #[error("screening charge {0} has no mirror partner")]
    MissingPartner(C64),
    #[error("screening charge {0} is mirrored to the point at infinity")]
    MirrorAtInfinity(C64),
}

impl ScreeningCharges {
    pub fn empty(domain: Uniformization) -> Self {
        ScreeningCharges { domain, fixed: Vec::new(), paired: Vec::new() }
    }

    /// Builds the structured form from boundary charges and one representative
    /// per mirror pair. Representatives are moved into the domain if needed.
    pub fn from_parts(domain: Uniformization, fixed: &[C64], paired: &[C64]) -> Result<Self, ClosureError> {
        let fixed = fixed.iter().map(|&z| domain.snap_to_boundary(z)).collect();
        let mut reps = Vec::with_capacity(paired.len());
        for &z in paired {
            if domain == Uniformization::Disk && z.norm() == 0.0 {
                return Err(ClosureError::MirrorAtInfinity(z));
            }
            reps.push(if domain.contains(z) { z } else { domain.reflect(z) });
        }
        let mut out = ScreeningCharges { domain, fixed, paired: reps };
        out.sort();
        Ok(out)
    }

    /// Groups a flat list of charges into boundary charges and mirror pairs.
    pub fn from_points(domain: Uniformization, points: &[C64], tol: f64) -> Result<Self, ClosureError> {
        let mut used = vec![false; points.len()];
        let mut fixed = Vec::new();
        let mut paired = Vec::new();
        for i in 0..points.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let p = points[i];
            if domain.boundary_distance(p) <= tol {
                fixed.push(domain.snap_to_boundary(p));
                continue;
            }
            if domain == Uniformization::Disk && p.norm() == 0.0 {
                return Err(ClosureError::MirrorAtInfinity(p));
            }
            let mirror = domain.reflect(p);
            let partner = (0..points.len())
                .filter(|&j| !used[j])
                .map(|j| (j, (points[j] - mirror).norm()))
                .filter(|&(_, d)| d <= tol * (1.0 + mirror.norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match partner {
                Some((j, _)) => {
                    used[j] = true;
                    let (inside, outside) = if domain.contains(p) { (p, points[j]) } else { (points[j], p) };
                    paired.push(0.5 * (inside + domain.reflect(outside)));
                }
                None => return Err(ClosureError::MissingPartner(p)),
            }
        }
        let mut out = ScreeningCharges { domain, fixed, paired };
        out.sort();
        Ok(out)
    }

    fn sort(&mut self) {
        let domain = self.domain;
        let key = |z: &C64| match domain {
            Uniformization::HalfPlane => z.re,
            Uniformization::Disk => z.arg(),
        };
        self.fixed.sort_by(|a, b| key(a).total_cmp(&key(b)));
        self.paired.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    }

    pub fn domain(&self) -> Uniformization {
        self.domain
    }

    pub fn fixed(&self) -> &[C64] {
        &self.fixed
    }

    pub fn paired(&self) -> &[C64] {
        &self.paired
    }

    pub fn len(&self) -> usize {
        self.fixed.len() + 2 * self.paired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All charges; mirror partners are materialized exactly.
    pub fn points(&self) -> Vec<C64> {
        let mut out = self.fixed.clone();
        for &rep in &self.paired {
            out.push(rep);
            out.push(self.domain.reflect(rep));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n + 1 - m > m`: finitely many solutions, one per link pattern.
    Underscreening,
    /// `n + 1 - m = m`: no solutions.
    Threshold,
    /// `0 <= n + 1 - m < m`: continuous families of solutions.
    Overscreening,
    /// `n + 1 - m < 0`: no solutions.
    Empty,
}

impl Regime {
    pub fn classify(n: usize, m: usize) -> Regime {
        let excess = n as i64 + 1 - m as i64;
        let m = m as i64;
        if excess > m {
            Regime::Underscreening
        } else if excess == m {
            Regime::Threshold
        } else if excess >= 0 {
            Regime::Overscreening
        } else {
            Regime::Empty
        }
    }
}

/// Configuration as supplied by a user, before any canonicalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfiguration {
    pub uniformization: Uniformization,
    pub x: Vec<C64>,
    #[serde(default)]
    pub xi: Vec<C64>,
    #[serde(default)]
    pub u: Option<Point>,
}

impl RawConfiguration {
    pub fn marked_point(&self) -> Point {
        self.u.unwrap_or_else(|| self.uniformization.default_marked_point())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    /// Structural checks must pass for a [`Configuration`] to exist.
    pub structural: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub m: usize,
    pub regime: Regime,
    pub checks: Vec<InvariantCheck>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn structurally_sound(&self) -> bool {
        self.checks.iter().filter(|c| c.structural).all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Canonical boundary ordering: counterclockwise starting right after `u`.
fn ordering_key(domain: Uniformization, u: Point, x: C64) -> f64 {
    match (domain, u) {
        (Uniformization::HalfPlane, Point::Infinity) => x.re,
        (Uniformization::HalfPlane, Point::Finite(u)) => -1.0 / (x.re - u.re),
        (Uniformization::Disk, Point::Finite(u)) => (-x / u).arg(),
        (Uniformization::Disk, Point::Infinity) => x.arg(),
    }
}

pub fn validate_configuration(raw: &RawConfiguration) -> ValidationReport {
    let domain = raw.uniformization;
    let u = raw.marked_point();
    let n = raw.x.len();
    let m = raw.xi.len();
    let mut checks = Vec::new();
    let mut push = |name: &str, structural: bool, failure: Option<String>| {
        checks.push(InvariantCheck {
            name: name.to_string(),
            passed: failure.is_none(),
            structural,
            detail: failure.unwrap_or_else(|| "ok".into()),
        });
    };

    let off_boundary: Vec<String> = raw
        .x
        .iter()
        .enumerate()
        .filter(|(_, &z)| domain.boundary_distance(z) > BOUNDARY_TOL)
        .map(|(j, z)| format!("x[{j}]={z}"))
        .collect();
    push(
        "boundary_membership",
        true,
        (!off_boundary.is_empty() || n == 0).then(|| {
            if n == 0 {
                "no growth points".to_string()
            } else {
                format!("growth points off the boundary: {}", off_boundary.join(", "))
            }
        }),
    );

    let marked_ok = match (domain, u) {
        (Uniformization::HalfPlane, Point::Infinity) => true,
        (_, Point::Finite(z)) => domain.boundary_distance(z) <= BOUNDARY_TOL,
        (Uniformization::Disk, Point::Infinity) => false,
    };
    let marked_clash = raw.x.iter().any(|&z| Point::Finite(z).distance(u) <= COLLISION_TOL);
    push(
        "marked_point",
        true,
        (!marked_ok || marked_clash).then(|| format!("marked point {u} is not a free boundary point")),
    );

    let mut dup = None;
    'outer: for j in 0..n {
        for k in j + 1..n {
            if (raw.x[j] - raw.x[k]).norm() <= COLLISION_TOL {
                dup = Some(format!("duplicate growth points x[{j}] and x[{k}]"));
                break 'outer;
            }
        }
    }
    push("distinct_growth_points", true, dup);

    let keys: Vec<f64> = raw.x.iter().map(|&z| ordering_key(domain, u, z)).collect();
    let ordered = keys.windows(2).all(|w| w[0] < w[1]);
    push(
        "ordering",
        false,
        (!ordered).then(|| "growth points are not in counterclockwise order starting after u".to_string()),
    );

    let closure = ScreeningCharges::from_points(domain, &raw.xi, CLOSURE_TOL);
    push("screening_closure", true, closure.err().map(|e| e.to_string()));

    push(
        "charge_count",
        false,
        (m > n).then(|| format!("m = {m} exceeds n = {n}: there are no such R")),
    );

    let mut clash = None;
    for (k, &xi) in raw.xi.iter().enumerate() {
        if let Some(j) = raw.x.iter().position(|&x| (x - xi).norm() <= COLLISION_TOL) {
            clash = Some(format!("xi[{k}] coincides with x[{j}]"));
            break;
        }
        if Point::Finite(xi).distance(u) <= COLLISION_TOL {
            clash = Some(format!("xi[{k}] coincides with the marked point"));
            break;
        }
        if let Some(l) = (k + 1..m).find(|&l| (raw.xi[l] - xi).norm() <= COLLISION_TOL) {
            clash = Some(format!("xi[{k}] and xi[{l}] coincide"));
            break;
        }
    }
    push("charge_separation", true, clash);

    let regime = Regime::classify(n, m);
    let mut warnings = Vec::new();
    let mut notes = Vec::new();
    match regime {
        Regime::Threshold => warnings.push("threshold regime n+1-m = m: there are no such R".into()),
        Regime::Overscreening => {
            notes.push("overscreening regime 0 <= n+1-m < m: solutions come in continuous families".into())
        }
        Regime::Empty => warnings.push("n+1-m < 0: the master function has no critical points".into()),
        Regime::Underscreening => {}
    }
    ValidationReport { n, m, regime, checks, warnings, notes }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// A structurally valid configuration in canonical order.
///
/// Growth points are sorted counterclockwise starting right after `u`
/// (increasing for the half-plane with `u = inf`). Soft invariants such as
/// `m <= n` are reported by [`validate_configuration`] but do not prevent
/// construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    uniformization: Uniformization,
    x: Vec<C64>,
    xi: ScreeningCharges,
    u: Point,
}

impl Configuration {
    pub fn new(raw: &RawConfiguration) -> Result<Self, ConfigError> {
        let domain = raw.uniformization;
        let u = raw.marked_point();
        // Only rounding-level offsets are snapped; anything larger fails validation.
        let mut x: Vec<C64> = raw
            .x
            .iter()
            .map(|&z| if domain.boundary_distance(z) <= BOUNDARY_TOL { domain.snap_to_boundary(z) } else { z })
            .collect();
        x.sort_by(|a, b| ordering_key(domain, u, *a).total_cmp(&ordering_key(domain, u, *b)));
        let u = match u {
            Point::Finite(z) if domain.boundary_distance(z) <= BOUNDARY_TOL => {
                Point::Finite(domain.snap_to_boundary(z))
            }
            other => other,
        };
        let canonical = RawConfiguration { uniformization: domain, x, xi: raw.xi.clone(), u: Some(u) };
        let report = validate_configuration(&canonical);
        if !report.structurally_sound() {
            let failures = report
                .checks
                .iter()
                .filter(|c| c.structural && !c.passed)
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            return Err(ConfigError::Invalid(failures));
        }
        let xi = ScreeningCharges::from_points(domain, &raw.xi, CLOSURE_TOL)
            .map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?;
        Ok(Configuration { uniformization: domain, x: canonical.x, xi, u })
    }

    /// Half-plane configuration with `u = inf`.
    pub fn half_plane(x: &[f64], xi: &[C64]) -> Result<Self, ConfigError> {
        Self::new(&RawConfiguration {
            uniformization: Uniformization::HalfPlane,
            x: x.iter().map(|&v| C64::new(v, 0.0)).collect(),
            xi: xi.to_vec(),
            u: None,
        })
    }

    /// Disk configuration with `u = -1`.
    pub fn disk(x: &[C64], xi: &[C64]) -> Result<Self, ConfigError> {
        Self::new(&RawConfiguration { uniformization: Uniformization::Disk, x: x.to_vec(), xi: xi.to_vec(), u: None })
    }

    /// Same growth points and marked point with different screening charges.
    pub fn with_charges(&self, xi: ScreeningCharges) -> Result<Self, ConfigError> {
        let mut raw = self.raw();
        raw.xi = xi.points();
        let mut cfg = Self::new(&raw)?;
        cfg.xi = xi;
        Ok(cfg)
    }

    pub fn raw(&self) -> RawConfiguration {
        RawConfiguration {
            uniformization: self.uniformization,
            x: self.x.clone(),
            xi: self.xi.points(),
            u: Some(self.u),
        }
    }

    pub fn uniformization(&self) -> Uniformization {
        self.uniformization
    }

    pub fn x(&self) -> &[C64] {
        &self.x
    }

    /// Real parts of the growth points (exact for the half-plane).
    pub fn x_real(&self) -> Vec<f64> {
        self.x.iter().map(|z| z.re).collect()
    }

    pub fn charges(&self) -> &ScreeningCharges {
        &self.xi
    }

    pub fn xi(&self) -> Vec<C64> {
        self.xi.points()
    }

    pub fn u(&self) -> Point {
        self.u
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.xi.len()
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.n(), self.m())
    }

    /// Half-plane with the marked point at infinity.
    pub fn is_normal_form(&self) -> bool {
        self.uniformization == Uniformization::HalfPlane && self.u.is_infinite()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_configuration(&self.raw())
    }

    /// Smallest distance among growth points and screening charges.
    pub fn min_separation(&self) -> f64 {
        let pts: Vec<C64> = self.x.iter().copied().chain(self.xi.points()).collect();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min((pts[i] - pts[j]).norm());
            }
        }
        if best.is_finite() {
            best
        } else {
            1.0
        }
    }
}

/// Unit-circle point `e^{i theta}`.
pub fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}
