//! Dense polynomials with real or complex coefficients.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::C64;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + std::ops::Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn modulus(self) -> f64;
    fn to_complex(self) -> C64;
    fn from_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl Scalar for C64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> C64 {
        self
    }
    fn from_f64(v: f64) -> Self {
        C64::new(v, 0.0)
    }
}

/// Coefficients in ascending degree; trailing zeros are trimmed so the
/// leading coefficient is nonzero unless the polynomial is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Scalar> {
    coeffs: Vec<T>,
}

pub type RealPolynomial = Polynomial<f64>;
pub type ComplexPolynomial = Polynomial<C64>;

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Polynomial { coeffs: c }
    }

    /// `prod (z - r)`, multiplied pairwise in a balanced tree.
    pub fn from_roots(roots: &[T]) -> Self {
        match roots.len() {
            0 => Self::constant(T::one()),
            1 => Polynomial { coeffs: vec![-roots[0], T::one()] },
            k => {
                let (l, r) = roots.split_at(k / 2);
                Self::from_roots(l).mul(&Self::from_roots(r))
            }
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().copied().unwrap_or_else(T::zero)
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, z: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * z + c)
    }

    pub fn eval_complex(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::zero(), |acc, &c| acc * z + c.to_complex())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * T::from_f64(k as f64)).collect())
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut c = vec![T::zero()];
        c.extend(self.coeffs.iter().enumerate().map(|(k, &v)| v / T::from_f64((k + 1) as f64)));
        Self::new(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = c[i + j] + a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree();
        if self.coeffs.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j] - q * d;
            }
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Coefficients of `p(z + a)`.
    pub fn taylor_shift(&self, a: T) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                c[k] = c[k] + a * c[k + 1];
            }
        }
        Self::new(c)
    }

    pub fn to_complex(&self) -> ComplexPolynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect() }
    }

    /// Complex roots from the eigenvalues of the companion matrix, each
    /// refined by a few Newton steps on the polynomial itself.
    pub fn roots(&self) -> Vec<C64> {
        let p = self.to_complex();
        let d = p.degree();
        if p.is_zero() || d == 0 {
            return Vec::new();
        }
        let lead = p.leading();
        let mut comp = DMatrix::<C64>::zeros(d, d);
        for i in 1..d {
            comp[(i, i - 1)] = C64::one();
        }
        for i in 0..d {
            comp[(i, d - 1)] = -p.coeffs[i] / lead;
        }
        let eig = comp.clone().schur().eigenvalues().unwrap_or_else(|| {
            // nalgebra's complex Schur always triangularizes; keep a fallback anyway
            comp.diagonal()
        });
        let dp = p.derivative();
        let mut roots: Vec<C64> = eig
            .iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..3 {
                    let den = dp.eval(z);
                    if den.norm() == 0.0 {
                        break;
                    }
                    let step = p.eval(z) / den;
                    if !(step.norm() < 1e-3 * (1.0 + z.norm())) {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        roots
    }
}

impl RealPolynomial {
    /// Real roots, those with `|Im| <= tol * (1 + |z|)`, ascending.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        let mut r: Vec<f64> =
            self.roots().into_iter().filter(|z| z.im.abs() <= tol * (1.0 + z.norm())).map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }
}

impl ComplexPolynomial {
    /// Real polynomial when every imaginary part is below `tol` times the largest coefficient.
    pub fn to_real(&self, tol: f64) -> Option<RealPolynomial> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs
            .iter()
            .all(|c| c.im.abs() <= tol * scale)
            .then(|| RealPolynomial::new(self.coeffs.iter().map(|c| c.re).collect()))
    }
}
