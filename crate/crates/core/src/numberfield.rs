//! Exact arithmetic in a number field Q(θ) presented by a monic integer
//! minimal polynomial, together with the archimedean house function
//! μ(α) = max over conjugates of |α'|.
//!
//! Elements live in the power basis 1, θ, ..., θ^{n-1} with exact rational
//! coordinates; nothing on the arithmetic path touches floating point. The
//! complex embeddings (and hence house values) are floating approximations
//! carrying an explicit error bound, so that every comparison made against a
//! house value can be certified.
//!
//! Integrality is taken relative to the order `Z[θ]`, not the maximal order:
//! every bound derived from it remains valid (`Z[θ]` is a subring of the ring
//! of integers), at the price of possibly excluding a few extra primes and
//! reporting a slightly larger scale constant M.

use crate::poly;
use crate::roots::{self, RootError};
use crate::scalar::{scalar_from_rational, Scalar};
use num::complex::Complex;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumberFieldError {
    #[error("minimal polynomial must be monic")]
    NotMonic,
    #[error("minimal polynomial must have degree at least 1")]
    DegreeZero,
    #[error("minimal polynomial is not squarefree")]
    NotSquarefree,
    #[error("minimal polynomial of degree {0} has the rational root {1}")]
    NotIrreducible(usize, BigInt),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("division by zero (or by a zero divisor of a reducible presentation)")]
    DivisionByZero,
    #[error("embedding computation failed: {0}")]
    Embeddings(#[from] RootError),
}

pub struct NumberField<S: Scalar> {
    minpoly: Vec<BigInt>,
    degree: usize,
    embeddings: Vec<Complex<S>>,
    embedding_error: S,
}

impl<S: Scalar> fmt::Debug for NumberField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.minpoly_string())
    }
}

impl<S: Scalar> PartialEq for NumberField<S> {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}
impl<S: Scalar> Eq for NumberField<S> {}

impl<S: Scalar> NumberField<S> {
    /// Build a field from ascending integer coefficients (constant first).
    /// The polynomial must be monic, squarefree, of degree >= 1; for degrees
    /// 2 and 3 an exact rational-root check rejects reducible input.
    pub fn new(minpoly: Vec<BigInt>) -> Result<Arc<Self>, NumberFieldError> {
        if minpoly.len() < 2 {
            return Err(NumberFieldError::DegreeZero);
        }
        if minpoly.last() != Some(&BigInt::one()) {
            return Err(NumberFieldError::NotMonic);
        }
        let degree = minpoly.len() - 1;

        let f = poly::from_integers(&minpoly);
        let g = poly::gcd(&f, &poly::derivative(&f));
        if poly::degree(&g) != Some(0) {
            return Err(NumberFieldError::NotSquarefree);
        }
        if (2..=3).contains(&degree) {
            if let Some(r) = integer_root(&minpoly) {
                return Err(NumberFieldError::NotIrreducible(degree, r));
            }
        }

        let (embeddings, embedding_error) = compute_embeddings(&minpoly)?;
        Ok(Arc::new(Self { minpoly, degree, embeddings, embedding_error }))
    }

    /// The rational field, presented as `Q[x]/(x)`.
    pub fn rationals() -> Arc<Self> {
        Self::new(vec![BigInt::zero(), BigInt::one()]).expect("x is a valid minimal polynomial")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn embeddings(&self) -> &[Complex<S>] {
        &self.embeddings
    }

    pub fn embedding_error(&self) -> S {
        self.embedding_error
    }

    pub fn same_field(&self, other: &Self) -> bool {
        self == other
    }

    /// Resultant of the minimal polynomial with its derivative, as an exact
    /// integer. Primes dividing it are excluded from splitting scans.
    pub fn disc_resultant(&self) -> BigInt {
        let f = poly::from_integers(&self.minpoly);
        let r = poly::resultant(&f, &poly::derivative(&f));
        debug_assert!(r.is_integer());
        r.to_integer()
    }

    pub fn minpoly_string(&self) -> String {
        let names: Vec<String> = self
            .minpoly
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        names.join(" + ")
    }

    /// Element from power-basis coordinates; shorter vectors are padded,
    /// longer ones reduced modulo the minimal polynomial.
    pub fn element(self: &Arc<Self>, coeffs: Vec<BigRational>) -> FieldElement<S> {
        let mut c = coeffs;
        if c.len() > self.degree {
            c = self.reduce(c);
        }
        c.resize(self.degree, BigRational::zero());
        FieldElement { field: Arc::clone(self), coeffs: c }
    }

    pub fn from_integer(self: &Arc<Self>, v: i64) -> FieldElement<S> {
        self.element(vec![BigRational::from_integer(BigInt::from(v))])
    }

    pub fn from_rational(self: &Arc<Self>, r: BigRational) -> FieldElement<S> {
        self.element(vec![r])
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement<S> {
        self.element(Vec::new())
    }

    pub fn one(self: &Arc<Self>) -> FieldElement<S> {
        self.from_integer(1)
    }

    /// The generator θ (for the rational field this is 0, since θ = 0
    /// is the root of x).
    pub fn theta(self: &Arc<Self>) -> FieldElement<S> {
        self.element(vec![BigRational::zero(), BigRational::one()])
    }

    /// Reduce a coefficient vector of any length modulo the minimal
    /// polynomial, using x^n = -(c_0 + ... + c_{n-1} x^{n-1}).
    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let n = self.degree;
        while c.len() > n {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = c.len() - n;
            for i in 0..n {
                let t = &top * BigRational::from_integer(self.minpoly[i].clone());
                c[base + i] -= t;
            }
        }
        c
    }
}

/// One exact integer root of a monic integer polynomial, if any exists
/// (rational roots of monic integer polynomials are integers dividing the
/// constant term).
fn integer_root(minpoly: &[BigInt]) -> Option<BigInt> {
    let c0 = &minpoly[0];
    if c0.is_zero() {
        return Some(BigInt::zero());
    }
    let eval = |x: &BigInt| -> BigInt {
        let mut acc = BigInt::zero();
        for c in minpoly.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let bound = c0.abs();
    let mut d = BigInt::one();
    while &d * &d <= bound {
        if (&bound % &d).is_zero() {
            for cand in [d.clone(), -d.clone(), &bound / &d, -(&bound / &d)] {
                if eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
        d += 1;
    }
    None
}

fn compute_embeddings<S: Scalar>(
    minpoly: &[BigInt],
) -> Result<(Vec<Complex<S>>, S), NumberFieldError> {
    let degree = minpoly.len() - 1;
    let coeffs: Vec<S> = minpoly
        .iter()
        .map(|c| S::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan))
        .collect();
    if degree == 1 {
        // Root is exactly -c0; only the integer-to-scalar rounding remains.
        let root = -coeffs[0];
        let err = root.abs() * S::epsilon();
        return Ok((vec![Complex::new(root, S::zero())], err));
    }
    let found = roots::monic_roots(&coeffs)?;

    // Inflate the Newton inclusion radius by the effect of rounding the
    // integer coefficients into the scalar type.
    let mut err = found.inclusion_radius;
    for z in &found.values {
        let rho = z.norm() + found.inclusion_radius;
        let mut coeff_term = S::zero();
        let mut deriv = S::zero();
        let mut rho_pow = S::one();
        for (k, c) in coeffs.iter().enumerate() {
            coeff_term = coeff_term + c.abs() * rho_pow * S::epsilon();
            if k >= 1 {
                deriv = deriv + S::from_usize(k).unwrap() * c.abs() * rho_pow / rho.max(S::epsilon());
            }
            rho_pow = rho_pow * rho;
        }
        if deriv > S::zero() {
            err = err.max(found.inclusion_radius + coeff_term / deriv);
        }
    }
    Ok((found.values, err))
}

/// A floating house (or absolute-value) estimate with a certified error
/// radius: the true value lies in [value - error, value + error].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HouseBound<S: Scalar> {
    pub value: S,
    pub error: S,
}

impl<S: Scalar> HouseBound<S> {
    pub fn upper(&self) -> S {
        self.value + self.error
    }

    pub fn lower(&self) -> S {
        self.value - self.error
    }
}

#[derive(Clone)]
pub struct FieldElement<S: Scalar> {
    field: Arc<NumberField<S>>,
    coeffs: Vec<BigRational>,
}

impl<S: Scalar> PartialEq for FieldElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl<S: Scalar> Eq for FieldElement<S> {}

impl<S: Scalar> FieldElement<S> {
    pub fn field(&self) -> &Arc<NumberField<S>> {
        &self.field
    }

    /// Power-basis coordinates, always exactly `degree` entries.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Membership in the order `Z[θ]`: every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn guard_field(&self, other: &Self) -> Result<(), NumberFieldError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(NumberFieldError::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, NumberFieldError> {
        self.guard_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { field: Arc::clone(&self.field), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, NumberFieldError> {
        self.guard_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { field: Arc::clone(&self.field), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, NumberFieldError> {
        self.guard_field(other)?;
        let n = self.field.degree;
        if n == 1 {
            return Ok(Self {
                field: Arc::clone(&self.field),
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            });
        }
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let mut reduced = self.field.reduce(prod);
        reduced.resize(n, BigRational::zero());
        Ok(Self { field: Arc::clone(&self.field), coeffs: reduced })
    }

    pub fn neg(&self) -> Self {
        Self {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the minimal polynomial.
    pub fn inv(&self) -> Result<Self, NumberFieldError> {
        if self.is_zero() {
            return Err(NumberFieldError::DivisionByZero);
        }
        let f = poly::trim(self.coeffs.clone());
        let m = poly::from_integers(&self.field.minpoly);
        let (g, s, _) = poly::extended_gcd(&f, &m);
        if poly::degree(&g) != Some(0) {
            // Happens only for reducible presentations of degree >= 4.
            return Err(NumberFieldError::DivisionByZero);
        }
        Ok(self.field.element(s))
    }

    /// Field norm N_{k/Q} as the exact determinant of the multiplication-by-
    /// self matrix in the power basis. Never touches floating point.
    pub fn norm(&self) -> BigRational {
        let n = self.field.degree;
        if n == 1 {
            return self.coeffs[0].clone();
        }
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut current = self.clone();
        cols.push(current.coeffs.clone());
        let theta = self.field.theta();
        for _ in 1..n {
            current = current.checked_mul(&theta).expect("same field");
            cols.push(current.coeffs.clone());
        }
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|r| (0..n).map(|c| cols[c][r].clone()).collect())
            .collect();
        poly::determinant(rows)
    }

    /// House μ: the maximum modulus over all complex embeddings, with a
    /// propagated error bound. μ(0) = 0 by convention.
    pub fn house(&self) -> HouseBound<S> {
        if self.is_zero() {
            return HouseBound { value: S::zero(), error: S::zero() };
        }
        let e = self.field.embedding_error;
        let coeffs_s: Vec<S> = self.coeffs.iter().map(scalar_from_rational).collect();
        let n = self.field.degree;
        let mut best = HouseBound { value: S::zero(), error: S::zero() };
        for theta in &self.field.embeddings {
            let mut v = Complex::new(S::zero(), S::zero());
            for &c in coeffs_s.iter().rev() {
                v = v * theta + Complex::new(c, S::zero());
            }
            let value = v.norm();

            // |q(θ̂) - q(θ)| <= Σ k|c_k| ρ^{k-1} · e, plus Horner/rounding slop.
            let rho = theta.norm() + e;
            let mut abs_sum = S::zero();
            let mut slope = S::zero();
            let mut rho_pow = S::one();
            for (k, c) in coeffs_s.iter().enumerate() {
                abs_sum = abs_sum + c.abs() * rho_pow;
                if k >= 1 {
                    slope = slope + S::from_usize(k).unwrap() * c.abs() * rho_pow
                        / rho.max(S::epsilon());
                }
                rho_pow = rho_pow * rho;
            }
            let float_slop = S::from_usize(3 * n + 3).unwrap() * S::epsilon() * abs_sum;
            let error = slope * e + float_slop;
            if value + error > best.value + best.error {
                best = HouseBound { value, error };
            }
        }
        best
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(&base).expect("same field");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.checked_mul(&base).expect("same field");
            }
        }
        acc
    }

    /// Least positive integer d with d * self integral (a lcm of coordinate
    /// denominators).
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| {
            num::integer::lcm(acc, c.denom().clone())
        })
    }

    pub fn scale_by_int(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        Self {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| c * &k).collect(),
        }
    }
}

impl<S: Scalar> fmt::Debug for FieldElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for FieldElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 if c.is_one() => "θ".to_string(),
                1 => format!("{c}θ"),
                _ if c.is_one() => format!("θ^{i}"),
                _ => format!("{c}θ^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<S: Scalar> std::ops::Add for &FieldElement<S> {
    type Output = FieldElement<S>;
    fn add(self, rhs: Self) -> FieldElement<S> {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl<S: Scalar> std::ops::Sub for &FieldElement<S> {
    type Output = FieldElement<S>;
    fn sub(self, rhs: Self) -> FieldElement<S> {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl<S: Scalar> std::ops::Mul for &FieldElement<S> {
    type Output = FieldElement<S>;
    fn mul(self, rhs: Self) -> FieldElement<S> {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl<S: Scalar> std::ops::Neg for &FieldElement<S> {
    type Output = FieldElement<S>;
    fn neg(self) -> FieldElement<S> {
        FieldElement::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn qq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2_field() -> Arc<NumberField<f64>> {
        NumberField::new(vec![BigInt::from(-2), BigInt::from(0), BigInt::from(1)]).unwrap()
    }

    #[test]
    fn rational_field_has_zero_embedding() {
        let nf: Arc<NumberField<f64>> = NumberField::rationals();
        assert_eq!(nf.degree(), 1);
        assert_eq!(nf.embeddings().len(), 1);
        assert_eq!(nf.embeddings()[0], Complex::new(0.0, 0.0));
    }

    #[test]
    fn sqrt2_embeddings() {
        let nf = sqrt2_field();
        assert_eq!(nf.degree(), 2);
        let s = 2f64.sqrt();
        let mut got: Vec<f64> = nf.embeddings().iter().map(|z| z.re).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((got[0] + s).abs() < 1e-12);
        assert!((got[1] - s).abs() < 1e-12);
        assert!(nf.embedding_error() < 1e-12);
    }

    #[test]
    fn rejects_bad_minpolys() {
        assert_eq!(
            NumberField::<f64>::new(vec![BigInt::from(4), BigInt::from(0), BigInt::from(2)])
                .unwrap_err(),
            NumberFieldError::NotMonic
        );
        assert_eq!(
            NumberField::<f64>::new(vec![BigInt::from(7)]).unwrap_err(),
            NumberFieldError::DegreeZero
        );
        // (x-1)^2
        assert_eq!(
            NumberField::<f64>::new(vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)])
                .unwrap_err(),
            NumberFieldError::NotSquarefree
        );
        // x^2 - 1 is squarefree but reducible
        assert!(matches!(
            NumberField::<f64>::new(vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)])
                .unwrap_err(),
            NumberFieldError::NotIrreducible(2, _)
        ));
    }

    #[test]
    fn arithmetic_in_sqrt2() {
        let nf = sqrt2_field();
        let one_plus = nf.element(vec![q(1), q(1)]);
        let one_minus = nf.element(vec![q(1), q(-1)]);
        // (1+θ)(1-θ) = 1 - θ^2 = -1
        assert_eq!(&one_plus * &one_minus, nf.from_integer(-1));
        // (1+θ) + (2-θ) = 3
        let two_minus = nf.element(vec![q(2), q(-1)]);
        assert_eq!(&one_plus + &two_minus, nf.from_integer(3));
        // θ^{-1} = θ/2
        let theta = nf.theta();
        assert_eq!(theta.inv().unwrap(), nf.element(vec![q(0), qq(1, 2)]));
        assert!((&theta.inv().unwrap() * &theta).is_one());
    }

    #[test]
    fn inverse_of_zero_fails() {
        let nf = sqrt2_field();
        assert_eq!(nf.zero().inv().unwrap_err(), NumberFieldError::DivisionByZero);
    }

    #[test]
    fn field_mismatch_detected() {
        let nf = sqrt2_field();
        let other: Arc<NumberField<f64>> =
            NumberField::new(vec![BigInt::from(-3), BigInt::from(0), BigInt::from(1)]).unwrap();
        let a = nf.one();
        let b = other.one();
        assert_eq!(a.checked_add(&b).unwrap_err(), NumberFieldError::FieldMismatch);
        assert_eq!(a.checked_mul(&b).unwrap_err(), NumberFieldError::FieldMismatch);
    }

    #[test]
    fn house_values() {
        let nf = sqrt2_field();
        let h = nf.one().house();
        assert!((h.value - 1.0).abs() <= h.error + 1e-12);

        // max(|1+√2|, |1-√2|) = 1+√2
        let h = nf.element(vec![q(1), q(1)]).house();
        assert!((h.value - (1.0 + 2f64.sqrt())).abs() < 1e-9);

        let rat: Arc<NumberField<f64>> = NumberField::rationals();
        let h = rat.from_integer(2).house();
        assert!((h.value - 2.0).abs() < 1e-12);

        assert_eq!(nf.zero().house().value, 0.0);
    }

    #[test]
    fn norms() {
        let nf = sqrt2_field();
        assert_eq!(nf.element(vec![q(1), q(1)]).norm(), q(-1));
        assert_eq!(nf.zero().norm(), q(0));
        assert_eq!(nf.from_integer(5).norm(), q(25));
    }

    #[test]
    fn integrality() {
        let nf = sqrt2_field();
        assert!(nf.element(vec![q(1), q(1)]).is_integral());
        assert!(!nf.element(vec![q(0), qq(1, 2)]).is_integral());
        let rat: Arc<NumberField<f64>> = NumberField::rationals();
        assert!(rat.from_integer(7).is_integral());
    }

    #[test]
    fn denominator_lcm_and_scaling() {
        let nf = sqrt2_field();
        let e = nf.element(vec![qq(1, 2), qq(2, 3)]);
        assert_eq!(e.denominator_lcm(), BigInt::from(6));
        assert!(e.scale_by_int(&BigInt::from(6)).is_integral());
    }

    #[test]
    fn works_in_f32_too() {
        let nf: Arc<NumberField<f32>> =
            NumberField::new(vec![BigInt::from(-2), BigInt::from(0), BigInt::from(1)]).unwrap();
        let h = nf.element(vec![q(1), q(1)]).house();
        assert!((h.value - (1.0 + 2f32.sqrt())).abs() < 1e-4);
    }
}
