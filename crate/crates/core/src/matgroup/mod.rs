//! 2x2 matrices over a number field, free words in a two-generator system,
//! denominator clearing t = (1/α)·t*, and the derived constants M (largest
//! house over the cleared generator data) and C = 1/(n·ln 3M) that lower-
//! bounds girth growth as C·ln p.

mod relations;
mod word;

pub use relations::{search_short_relations, RelationSearch};
pub use word::{Letter, ReducedWord, LETTERS};

use crate::numberfield::{FieldElement, NumberField, NumberFieldError};
use crate::scalar::Scalar;
use num::{BigInt, BigRational, One};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatGroupError {
    #[error("matrix entries belong to different number fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("generator {0} must have determinant exactly 1")]
    NotUnimodular(char),
    #[error("generators coincide up to sign/inverse; the pair cannot be free of rank 2")]
    CoincidentGenerators,
    #[error("generator {which} has finite order {order}; the pair cannot be free of rank 2")]
    TorsionGenerator { which: char, order: u64 },
    #[error("word is not freely reduced at position {0}")]
    NotReduced(usize),
    #[error("unknown letter {0:?}; words use a, A, b, B with capitals for inverses")]
    UnknownLetter(char),
    #[error(transparent)]
    Field(#[from] NumberFieldError),
}

/// A 2x2 matrix over a number field, row-major entries.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2K<S: Scalar> {
    field: Arc<NumberField<S>>,
    e: [FieldElement<S>; 4],
}

impl<S: Scalar> Mat2K<S> {
    pub fn new(e: [FieldElement<S>; 4]) -> Result<Self, MatGroupError> {
        let field = Arc::clone(e[0].field());
        for x in &e[1..] {
            if x.field() != &field {
                return Err(MatGroupError::FieldMismatch);
            }
        }
        Ok(Self { field, e })
    }

    pub fn from_integers(field: &Arc<NumberField<S>>, m: [[i64; 2]; 2]) -> Self {
        Self {
            field: Arc::clone(field),
            e: [
                field.from_integer(m[0][0]),
                field.from_integer(m[0][1]),
                field.from_integer(m[1][0]),
                field.from_integer(m[1][1]),
            ],
        }
    }

    pub fn identity(field: &Arc<NumberField<S>>) -> Self {
        Self::from_integers(field, [[1, 0], [0, 1]])
    }

    pub fn field(&self) -> &Arc<NumberField<S>> {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement<S>; 4] {
        &self.e
    }

    pub fn entry(&self, row: usize, col: usize) -> &FieldElement<S> {
        &self.e[2 * row + col]
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, MatGroupError> {
        if self.field != rhs.field {
            return Err(MatGroupError::FieldMismatch);
        }
        let a = &self.e;
        let b = &rhs.e;
        let ent = |i: usize, j: usize, k: usize, l: usize| -> FieldElement<S> {
            &(&a[i] * &b[j]) + &(&a[k] * &b[l])
        };
        Ok(Self {
            field: Arc::clone(&self.field),
            e: [ent(0, 0, 1, 2), ent(0, 1, 1, 3), ent(2, 0, 3, 2), ent(2, 1, 3, 3)],
        })
    }

    pub fn det(&self) -> FieldElement<S> {
        &(&self.e[0] * &self.e[3]) - &(&self.e[1] * &self.e[2])
    }

    pub fn trace(&self) -> FieldElement<S> {
        &self.e[0] + &self.e[3]
    }

    /// Inverse via the adjugate; for det = 1 this is exactly the adjugate.
    pub fn inv(&self) -> Result<Self, MatGroupError> {
        let det = self.det();
        if det.is_zero() {
            return Err(MatGroupError::SingularMatrix);
        }
        let det_inv = det.inv()?;
        Ok(Self {
            field: Arc::clone(&self.field),
            e: [
                &self.e[3] * &det_inv,
                &self.e[1].neg() * &det_inv,
                &self.e[2].neg() * &det_inv,
                &self.e[0] * &det_inv,
            ],
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            field: Arc::clone(&self.field),
            e: [self.e[0].neg(), self.e[1].neg(), self.e[2].neg(), self.e[3].neg()],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.e[0].is_one() && self.e[1].is_zero() && self.e[2].is_zero() && self.e[3].is_one()
    }

    pub fn is_neg_identity(&self) -> bool {
        self.neg().is_identity()
    }
}

impl<S: Scalar> fmt::Debug for Mat2K<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for Mat2K<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

/// An integral matrix t* together with a denominator α such that the
/// original matrix is exactly (1/α)·t*. The denominator convention here is
/// the least positive rational integer clearing every power-basis
/// coordinate, so α is rational, μ(α) = α, and every derived bound stays
/// valid (M can only grow, C only shrink).
#[derive(Clone, Debug)]
pub struct ClearedMatrix<S: Scalar> {
    star: Mat2K<S>,
    denom: FieldElement<S>,
}

impl<S: Scalar> ClearedMatrix<S> {
    pub fn clear(m: &Mat2K<S>) -> Self {
        let d = m
            .e
            .iter()
            .fold(BigInt::one(), |acc, e| num::integer::lcm(acc, e.denominator_lcm()));
        let star = Mat2K {
            field: Arc::clone(&m.field),
            e: [
                m.e[0].scale_by_int(&d),
                m.e[1].scale_by_int(&d),
                m.e[2].scale_by_int(&d),
                m.e[3].scale_by_int(&d),
            ],
        };
        let denom = m.field.from_rational(BigRational::from_integer(d));
        debug_assert!(star.e.iter().all(|e| e.is_integral()));
        Self { star, denom }
    }

    pub fn star(&self) -> &Mat2K<S> {
        &self.star
    }

    pub fn denom(&self) -> &FieldElement<S> {
        &self.denom
    }
}

/// Certified bound on the constant M: the true maximum house lies in
/// [value - error, upper], and `upper` is what every downstream bound uses.
#[derive(Debug, Clone, Copy)]
pub struct ScaleBound<S: Scalar> {
    pub value: S,
    pub upper: S,
}

/// M for a generator pair: the maximum house over the sixteen entries of
/// a*, (a^{-1})*, b*, (b^{-1})* together with the four denominators.
pub fn scale_bound<S: Scalar>(
    a: &Mat2K<S>,
    b: &Mat2K<S>,
) -> Result<ScaleBound<S>, MatGroupError> {
    let cleared = cleared_quadruple(a, b)?;
    Ok(scale_bound_of(&cleared))
}

fn cleared_quadruple<S: Scalar>(
    a: &Mat2K<S>,
    b: &Mat2K<S>,
) -> Result<[ClearedMatrix<S>; 4], MatGroupError> {
    if a.field != b.field {
        return Err(MatGroupError::FieldMismatch);
    }
    Ok([
        ClearedMatrix::clear(a),
        ClearedMatrix::clear(&a.inv()?),
        ClearedMatrix::clear(b),
        ClearedMatrix::clear(&b.inv()?),
    ])
}

fn scale_bound_of<S: Scalar>(cleared: &[ClearedMatrix<S>; 4]) -> ScaleBound<S> {
    let mut value = S::zero();
    let mut upper = S::zero();
    for c in cleared {
        for e in c.star.entries().iter().chain(std::iter::once(c.denom())) {
            let h = e.house();
            value = value.max(h.value);
            upper = upper.max(h.upper());
        }
    }
    ScaleBound { value, upper }
}

/// C = 1/(n·ln(3M)), natural logarithm. Fed the certified upper bound on M
/// this is a certified lower bound on the girth-growth constant.
pub fn girth_constant<S: Scalar>(m: S, degree: usize) -> S {
    let three = S::from_f64(3.0).unwrap();
    (S::from_usize(degree).unwrap() * (three * m).ln()).recip()
}

/// A pair of unimodular generators validated to look like a free basis:
/// determinants exactly 1, no coincidence up to sign and inverse, and no
/// finite-order generator (exact check over all candidate torsion orders).
#[derive(Clone, Debug)]
pub struct GeneratorSystem<S: Scalar> {
    a: Mat2K<S>,
    b: Mat2K<S>,
    a_inv: Mat2K<S>,
    b_inv: Mat2K<S>,
    cleared: [ClearedMatrix<S>; 4],
    scale: ScaleBound<S>,
    c_lower: S,
}

impl<S: Scalar> GeneratorSystem<S> {
    pub fn new(a: Mat2K<S>, b: Mat2K<S>) -> Result<Self, MatGroupError> {
        if a.field != b.field {
            return Err(MatGroupError::FieldMismatch);
        }
        if !a.det().is_one() {
            return Err(MatGroupError::NotUnimodular('a'));
        }
        if !b.det().is_one() {
            return Err(MatGroupError::NotUnimodular('b'));
        }
        let a_inv = a.inv()?;
        let b_inv = b.inv()?;
        if a == b || a == b_inv || a == b.neg() || a == b_inv.neg() {
            return Err(MatGroupError::CoincidentGenerators);
        }
        for (which, g) in [('a', &a), ('b', &b)] {
            if let Some(order) = finite_order(g, a.field.degree()) {
                return Err(MatGroupError::TorsionGenerator { which, order });
            }
        }
        let cleared = cleared_quadruple(&a, &b)?;
        let scale = scale_bound_of(&cleared);
        let c_lower = girth_constant(scale.upper, a.field.degree());
        Ok(Self { a, b, a_inv, b_inv, cleared, scale, c_lower })
    }

    pub fn field(&self) -> &Arc<NumberField<S>> {
        self.a.field()
    }

    pub fn generator(&self, letter: Letter) -> &Mat2K<S> {
        match letter {
            Letter::A => &self.a,
            Letter::AInv => &self.a_inv,
            Letter::B => &self.b,
            Letter::BInv => &self.b_inv,
        }
    }

    pub fn cleared(&self, letter: Letter) -> &ClearedMatrix<S> {
        &self.cleared[letter.index()]
    }

    /// Certified upper bound on M; this is the M all reports quote. For the
    /// `Z[θ]`-integral presentation supplied it is an upper bound on the
    /// optimal constant (a different clearing over the maximal order could
    /// only shrink it).
    pub fn scale_m(&self) -> S {
        self.scale.upper
    }

    pub fn scale_m_raw(&self) -> ScaleBound<S> {
        self.scale
    }

    /// Certified lower bound on C = 1/(n·ln 3M).
    pub fn girth_c(&self) -> S {
        self.c_lower
    }

    pub fn degree(&self) -> usize {
        self.a.field.degree()
    }

    /// Exact product of the generator matrices named by a reduced word;
    /// the empty word gives the identity.
    pub fn eval_word(&self, w: &ReducedWord) -> Mat2K<S> {
        let mut acc = Mat2K::identity(self.a.field());
        for &l in w.letters() {
            acc = acc.mul(self.generator(l)).expect("same field");
        }
        acc
    }

    /// Product over the cleared letter matrices: returns the integral star
    /// product together with Z, the product of the letter denominators, so
    /// that (1/Z)·star equals `eval_word` exactly.
    pub fn eval_word_cleared(&self, w: &ReducedWord) -> ClearedMatrix<S> {
        let field = self.a.field();
        let mut star = Mat2K::identity(field);
        let mut z = field.one();
        for &l in w.letters() {
            let c = self.cleared(l);
            star = star.mul(c.star()).expect("same field");
            z = &z * c.denom();
        }
        ClearedMatrix { star, denom: z }
    }

    /// Exhaustive search for freely reduced words of length <= max_len that
    /// evaluate to +-identity.
    pub fn assert_no_short_relations(&self, max_len: usize) -> RelationSearch {
        relations::search_with_inverses(&self.a, &self.a_inv, &self.b, &self.b_inv, max_len)
    }

    pub fn describe(&self) -> String {
        format!("a={} b={}", self.a, self.b)
    }
}

/// Exact finite-order test. An element of SL(2,k) of finite order m has a
/// primitive m-th root of unity as eigenvalue, forcing φ(m) <= 2n and hence
/// m <= 8n²; powers up to that bound decide the question exactly. Returns
/// the order if finite (powers hitting -id have twice the exponent).
fn finite_order<S: Scalar>(g: &Mat2K<S>, degree: usize) -> Option<u64> {
    let bound = 8 * degree as u64 * degree as u64;
    let mut cur = g.clone();
    for m in 1..=bound {
        if cur.is_identity() {
            return Some(m);
        }
        if cur.is_neg_identity() {
            return Some(2 * m);
        }
        cur = cur.mul(g).expect("same field");
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    type Nf = NumberField<f64>;

    fn rat() -> Arc<Nf> {
        Nf::rationals()
    }

    fn sqrt2() -> Arc<Nf> {
        Nf::new(vec![BigInt::from(-2), BigInt::from(0), BigInt::from(1)]).unwrap()
    }

    fn sanov(field: &Arc<Nf>) -> (Mat2K<f64>, Mat2K<f64>) {
        (
            Mat2K::from_integers(field, [[1, 2], [0, 1]]),
            Mat2K::from_integers(field, [[1, 0], [2, 1]]),
        )
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sanov_product() {
        let f = rat();
        let (a, b) = sanov(&f);
        assert_eq!(a.mul(&b).unwrap(), Mat2K::from_integers(&f, [[5, 2], [2, 1]]));
    }

    #[test]
    fn unipotent_inverse_and_det() {
        let f = rat();
        let a = Mat2K::from_integers(&f, [[1, 2], [0, 1]]);
        assert_eq!(a.inv().unwrap(), Mat2K::from_integers(&f, [[1, -2], [0, 1]]));
        assert!(a.det().is_one());
    }

    #[test]
    fn singular_matrix_rejected() {
        let f = rat();
        let m = Mat2K::from_integers(&f, [[1, 2], [2, 4]]);
        assert_eq!(m.inv().unwrap_err(), MatGroupError::SingularMatrix);
    }

    #[test]
    fn mixed_field_matrices_rejected() {
        let x = Mat2K::from_integers(&rat(), [[1, 0], [0, 1]]);
        let y = Mat2K::from_integers(&sqrt2(), [[1, 0], [0, 1]]);
        assert_eq!(x.mul(&y).unwrap_err(), MatGroupError::FieldMismatch);
        let mixed = Mat2K::new([rat().one(), rat().zero(), sqrt2().zero(), rat().one()]);
        assert_eq!(mixed.unwrap_err(), MatGroupError::FieldMismatch);
    }

    #[test]
    fn clear_integral_matrix_is_identity_denominator() {
        let f = rat();
        let a = Mat2K::from_integers(&f, [[1, 2], [0, 1]]);
        let c = ClearedMatrix::clear(&a);
        assert_eq!(c.star(), &a);
        assert!(c.denom().is_one());
    }

    #[test]
    fn clear_rational_matrix() {
        let f = rat();
        let m = Mat2K::new([
            f.from_rational(q(1, 2)),
            f.zero(),
            f.zero(),
            f.from_integer(2),
        ])
        .unwrap();
        let c = ClearedMatrix::clear(&m);
        assert_eq!(c.star(), &Mat2K::from_integers(&f, [[1, 0], [0, 4]]));
        assert_eq!(c.denom(), &f.from_integer(2));
    }

    #[test]
    fn clear_field_matrix() {
        let f = sqrt2();
        // [[θ/2, 1], [0, 1]] -> star [[θ, 2], [0, 2]], denom 2
        let m = Mat2K::new([
            f.element(vec![q(0, 1), q(1, 2)]),
            f.one(),
            f.zero(),
            f.one(),
        ])
        .unwrap();
        let c = ClearedMatrix::clear(&m);
        assert_eq!(
            c.star(),
            &Mat2K::new([
                f.theta(),
                f.from_integer(2),
                f.zero(),
                f.from_integer(2)
            ])
            .unwrap()
        );
        assert_eq!(c.denom(), &f.from_integer(2));
    }

    #[test]
    fn sanov_scale_and_constant() {
        let f = rat();
        let (a, b) = sanov(&f);
        let gs = GeneratorSystem::new(a, b).unwrap();
        assert!((gs.scale_m() - 2.0).abs() < 1e-9);
        assert!((gs.girth_c() - 1.0 / 6f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn identity_pair_scale_is_one() {
        let f = rat();
        let id = Mat2K::identity(&f);
        let m = scale_bound(&id, &id).unwrap();
        assert!((m.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt2_translations_scale() {
        let f = sqrt2();
        let a = Mat2K::new([f.one(), f.theta(), f.zero(), f.one()]).unwrap();
        let b = Mat2K::new([f.one(), f.zero(), f.theta(), f.one()]).unwrap();
        let m = scale_bound(&a, &b).unwrap();
        assert!((m.upper - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn girth_constant_values() {
        assert!((girth_constant(2.0f64, 1) - 0.55811).abs() < 1e-5);
        assert!((girth_constant(1.0f64, 1) - 0.91024).abs() < 1e-5);
        assert!((girth_constant(2.0f64, 2) - 0.27906).abs() < 1e-5);
    }

    #[test]
    fn word_evaluation() {
        let f = rat();
        let (a, b) = sanov(&f);
        let gs = GeneratorSystem::new(a, b).unwrap();
        assert!(gs.eval_word(&ReducedWord::empty()).is_identity());
        let w = ReducedWord::parse("ab").unwrap();
        assert_eq!(gs.eval_word(&w), Mat2K::from_integers(&rat(), [[5, 2], [2, 1]]));
        let c = gs.eval_word_cleared(&w);
        assert_eq!(c.star(), &Mat2K::from_integers(&rat(), [[5, 2], [2, 1]]));
        assert!(c.denom().is_one());
    }

    #[test]
    fn degenerate_generator_pairs_rejected() {
        let f = rat();
        let (a, _) = sanov(&f);
        assert_eq!(
            GeneratorSystem::new(a.clone(), a.clone()).unwrap_err(),
            MatGroupError::CoincidentGenerators
        );
        assert_eq!(
            GeneratorSystem::new(a.clone(), a.inv().unwrap()).unwrap_err(),
            MatGroupError::CoincidentGenerators
        );
        let s = Mat2K::from_integers(&f, [[0, -1], [1, 0]]);
        assert_eq!(
            GeneratorSystem::new(a.clone(), s).unwrap_err(),
            MatGroupError::TorsionGenerator { which: 'b', order: 4 }
        );
        let not_uni = Mat2K::from_integers(&f, [[2, 0], [0, 1]]);
        assert_eq!(
            GeneratorSystem::new(a, not_uni).unwrap_err(),
            MatGroupError::NotUnimodular('b')
        );
    }
}
