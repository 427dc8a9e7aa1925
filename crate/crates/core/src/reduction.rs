//! Reduction homomorphisms onto SL(2,p): enumerate rational primes that
//! split completely in the field (the minimal polynomial has a full set of
//! distinct roots mod p), pick a root to define π(θ) = root, and reduce
//! matrices entrywise with modular inverses for the denominators. Products
//! of distinct split primes reduce componentwise into product groups.

use crate::matgroup::{GeneratorSystem, Mat2K};
use crate::numberfield::{FieldElement, NumberField};
use crate::poly;
use crate::scalar::Scalar;
use num::{BigInt, Signed, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("prime range is empty or starts at or below 2 (need 2 < p_min <= p_max)")]
    EmptyRange,
    #[error("denominator of an entry is not invertible mod {p}; exclude this prime")]
    NonInvertibleDenominator { p: u64 },
    #[error("prime {0} appears more than once in an ideal product")]
    DuplicatePrime(u64),
    #[error("prime {p} is not usable here: {reason}")]
    BadPrime { p: u64, reason: String },
}

/// Why a prime was left out of a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeStatus {
    /// Completely split: full set of distinct roots mod p, none of the
    /// exclusion conditions hit.
    Split(Vec<u64>),
    /// Fewer than n distinct roots mod p.
    NotSplit { roots_found: usize },
    DividesDiscResultant,
    DividesDenominatorNorm,
}

impl PrimeStatus {
    pub fn reason(&self) -> Option<&'static str> {
        match self {
            PrimeStatus::Split(_) => None,
            PrimeStatus::NotSplit { .. } => Some("not completely split"),
            PrimeStatus::DividesDiscResultant => Some("divides disc resultant"),
            PrimeStatus::DividesDenominatorNorm => Some("divides a generator denominator norm"),
        }
    }
}

/// A completely split rational prime with all of its roots mod p; each root
/// indexes one prime ideal above p.
#[derive(Debug, Clone)]
pub struct SplitPrime {
    pub p: u64,
    pub roots: Vec<u64>,
}

impl SplitPrime {
    /// All sites above p, in ascending root order.
    pub fn sites<S: Scalar>(&self, field: &Arc<NumberField<S>>) -> Vec<PrimeSite<S>> {
        self.roots
            .iter()
            .map(|&root| PrimeSite { p: self.p, root, field: Arc::clone(field) })
            .collect()
    }

    /// The default site (smallest root).
    pub fn default_site<S: Scalar>(&self, field: &Arc<NumberField<S>>) -> PrimeSite<S> {
        PrimeSite { p: self.p, root: self.roots[0], field: Arc::clone(field) }
    }
}

/// One prime ideal above p, identified by a root of the minimal polynomial
/// mod p; defines the reduction map θ -> root into SL(2,p).
#[derive(Debug, Clone)]
pub struct PrimeSite<S: Scalar> {
    p: u64,
    root: u64,
    field: Arc<NumberField<S>>,
}

impl<S: Scalar> PrimeSite<S> {
    /// Build a site directly; validates that p is an odd prime and the root
    /// actually solves the minimal polynomial mod p.
    pub fn new(field: &Arc<NumberField<S>>, p: u64, root: u64) -> Result<Self, ReductionError> {
        if p <= 2 || !is_prime(p) {
            return Err(ReductionError::BadPrime { p, reason: "need an odd prime".into() });
        }
        if root >= p || poly::eval_mod(field.minpoly(), root, p) != 0 {
            return Err(ReductionError::BadPrime {
                p,
                reason: format!("{root} is not a root of the minimal polynomial mod {p}"),
            });
        }
        Ok(Self { p, root, field: Arc::clone(field) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn field(&self) -> &Arc<NumberField<S>> {
        &self.field
    }

    /// Reduce a field element: evaluate its power-basis polynomial at the
    /// root, mapping each rational coefficient via a modular inverse.
    pub fn reduce_element(&self, e: &FieldElement<S>) -> Result<u64, ReductionError> {
        let p = self.p;
        let mut acc: u64 = 0;
        for c in e.coeffs().iter().rev() {
            let num = poly::bigint_mod(c.numer(), p);
            let den = poly::bigint_mod(c.denom(), p);
            let den_inv =
                mod_inverse(den, p).ok_or(ReductionError::NonInvertibleDenominator { p })?;
            acc = (acc * self.root + num * den_inv) % p;
        }
        Ok(acc)
    }

    pub fn reduce(&self, m: &Mat2K<S>) -> Result<ModpMatrix, ReductionError> {
        let e = m.entries();
        Ok(ModpMatrix {
            p: self.p,
            e: [
                self.reduce_element(&e[0])?,
                self.reduce_element(&e[1])?,
                self.reduce_element(&e[2])?,
                self.reduce_element(&e[3])?,
            ],
        })
    }
}

/// The image of the generator quadruple under one site, kept as a multiset
/// of four labelled matrices even when images coincide.
#[derive(Debug, Clone)]
pub struct GeneratorImages {
    pub mats: [ModpMatrix; 4],
    /// Some pair of the four images coincides.
    pub has_coincidence: bool,
    /// Some image squares to the identity without being the identity.
    pub has_involution: bool,
    /// Some image is the identity itself.
    pub has_identity: bool,
}

pub fn reduce_generators<S: Scalar>(
    site: &PrimeSite<S>,
    gs: &GeneratorSystem<S>,
) -> Result<GeneratorImages, ReductionError> {
    use crate::matgroup::Letter;
    let mats = [
        site.reduce(gs.generator(Letter::A))?,
        site.reduce(gs.generator(Letter::AInv))?,
        site.reduce(gs.generator(Letter::B))?,
        site.reduce(gs.generator(Letter::BInv))?,
    ];
    Ok(classify_images(mats))
}

pub fn classify_images(mats: [ModpMatrix; 4]) -> GeneratorImages {
    let mut has_coincidence = false;
    for i in 0..4 {
        for j in i + 1..4 {
            if mats[i] == mats[j] {
                has_coincidence = true;
            }
        }
    }
    let has_identity = mats.iter().any(|m| m.is_identity());
    let has_involution = mats
        .iter()
        .any(|m| !m.is_identity() && m.mul(m).is_identity());
    GeneratorImages { mats, has_coincidence, has_involution, has_identity }
}

/// A 2x2 matrix over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModpMatrix {
    pub p: u64,
    pub e: [u64; 4],
}

impl ModpMatrix {
    pub fn identity(p: u64) -> Self {
        Self { p, e: [1, 0, 0, 1] }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p;
        let a = &self.e;
        let b = &rhs.e;
        Self {
            p,
            e: [
                (a[0] * b[0] + a[1] * b[2]) % p,
                (a[0] * b[1] + a[1] * b[3]) % p,
                (a[2] * b[0] + a[3] * b[2]) % p,
                (a[2] * b[1] + a[3] * b[3]) % p,
            ],
        }
    }

    pub fn det(&self) -> u64 {
        let p = self.p;
        (self.e[0] * self.e[3] % p + p - self.e[1] * self.e[2] % p) % p
    }

    /// Inverse assuming det is invertible mod p.
    pub fn inv(&self) -> Self {
        let p = self.p;
        let det_inv = mod_inverse(self.det(), p).expect("matrix is invertible mod p");
        let neg = |x: u64| (p - x % p) % p;
        Self {
            p,
            e: [
                self.e[3] * det_inv % p,
                neg(self.e[1]) * det_inv % p,
                neg(self.e[2]) * det_inv % p,
                self.e[0] * det_inv % p,
            ],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }
}

/// A squarefree product of prime ideals above pairwise distinct split
/// primes; reduction modulo it lands in the product of the SL(2,p_i).
#[derive(Debug, Clone)]
pub struct IdealProduct<S: Scalar> {
    sites: Vec<PrimeSite<S>>,
}

impl<S: Scalar> IdealProduct<S> {
    pub fn new(sites: Vec<PrimeSite<S>>) -> Result<Self, ReductionError> {
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                if sites[i].p == sites[j].p {
                    return Err(ReductionError::DuplicatePrime(sites[i].p));
                }
            }
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> &[PrimeSite<S>] {
        &self.sites
    }

    pub fn primes(&self) -> Vec<u64> {
        self.sites.iter().map(|s| s.p).collect()
    }
}

/// Componentwise reduction into the product group; an empty ideal gives the
/// empty tuple (the trivial group).
pub fn crt_reduce<S: Scalar>(
    ideal: &IdealProduct<S>,
    m: &Mat2K<S>,
) -> Result<Vec<ModpMatrix>, ReductionError> {
    ideal.sites.iter().map(|s| s.reduce(m)).collect()
}

/// Per-system exclusion data for prime scans, computed once: the resultant
/// of the minimal polynomial with its derivative and the four denominator
/// norms (primes dividing any of them are skipped).
pub struct PrimeScanner<'a, S: Scalar> {
    nf: &'a NumberField<S>,
    disc: BigInt,
    denom_norms: Vec<BigInt>,
}

impl<'a, S: Scalar> PrimeScanner<'a, S> {
    pub fn new(nf: &'a NumberField<S>, gs: &GeneratorSystem<S>) -> Self {
        let denom_norms = crate::matgroup::LETTERS
            .iter()
            .map(|&l| {
                let norm = gs.cleared(l).denom().norm();
                debug_assert!(norm.is_integer());
                norm.numer().abs()
            })
            .collect();
        Self { nf, disc: nf.disc_resultant(), denom_norms }
    }

    /// Classify one odd prime: excluded primes carry the reason, splitting
    /// is decided by exhaustive root counting mod p.
    pub fn status(&self, p: u64) -> PrimeStatus {
        debug_assert!(p > 2 && is_prime(p));
        let bp = BigInt::from(p);
        if (&self.disc % &bp).is_zero() {
            return PrimeStatus::DividesDiscResultant;
        }
        if self.denom_norms.iter().any(|n| (n % &bp).is_zero()) {
            return PrimeStatus::DividesDenominatorNorm;
        }
        let roots = roots_mod_p(self.nf.minpoly(), p);
        if roots.len() == self.nf.degree() {
            PrimeStatus::Split(roots)
        } else {
            PrimeStatus::NotSplit { roots_found: roots.len() }
        }
    }
}

pub fn prime_status<S: Scalar>(
    nf: &NumberField<S>,
    gs: &GeneratorSystem<S>,
    p: u64,
) -> PrimeStatus {
    PrimeScanner::new(nf, gs).status(p)
}

/// All completely split primes in [p_min, p_max] admissible for the system,
/// each with its full set of roots.
pub fn split_primes<S: Scalar>(
    nf: &NumberField<S>,
    gs: &GeneratorSystem<S>,
    p_min: u64,
    p_max: u64,
) -> Result<Vec<SplitPrime>, ReductionError> {
    if p_min <= 2 || p_min > p_max {
        return Err(ReductionError::EmptyRange);
    }
    let scanner = PrimeScanner::new(nf, gs);
    let mut out = Vec::new();
    for p in odd_primes_in(p_min, p_max) {
        if let PrimeStatus::Split(roots) = scanner.status(p) {
            out.push(SplitPrime { p, roots });
        }
    }
    Ok(out)
}

/// Distinct roots of an integer polynomial mod p by exhaustive evaluation
/// over [0, p); O(p·n), intended for p up to about 10^6.
pub fn roots_mod_p(minpoly: &[BigInt], p: u64) -> Vec<u64> {
    (0..p).filter(|&x| poly::eval_mod(minpoly, x, p) == 0).collect()
}

pub fn odd_primes_in(p_min: u64, p_max: u64) -> impl Iterator<Item = u64> {
    (p_min.max(3)..=p_max).filter(|&p| p % 2 == 1 && is_prime(p))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
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

    fn sanov_system(field: &Arc<Nf>) -> GeneratorSystem<f64> {
        GeneratorSystem::new(
            Mat2K::from_integers(field, [[1, 2], [0, 1]]),
            Mat2K::from_integers(field, [[1, 0], [2, 1]]),
        )
        .unwrap()
    }

    #[test]
    fn every_odd_prime_splits_in_q() {
        let f = rat();
        let gs = sanov_system(&f);
        let got = split_primes(&f, &gs, 3, 20).unwrap();
        let ps: Vec<u64> = got.iter().map(|s| s.p).collect();
        assert_eq!(ps, vec![3, 5, 7, 11, 13, 17, 19]);
        assert!(got.iter().all(|s| s.roots == vec![0]));
    }

    #[test]
    fn sqrt2_split_primes_in_range() {
        let f = sqrt2();
        let a = Mat2K::new([f.one(), f.theta(), f.zero(), f.one()]).unwrap();
        let b = Mat2K::new([f.one(), f.zero(), f.theta(), f.one()]).unwrap();
        let gs = GeneratorSystem::new(a, b).unwrap();
        let got = split_primes(&f, &gs, 3, 20).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].p, 7);
        assert_eq!(got[0].roots, vec![3, 4]); // 3^2 = 9 = 2 mod 7
        assert_eq!(got[1].p, 17);
        assert_eq!(got[1].roots, vec![6, 11]); // 6^2 = 36 = 2 mod 17
        assert_eq!(
            prime_status(&f, &gs, 3),
            PrimeStatus::NotSplit { roots_found: 0 }
        );
    }

    #[test]
    fn empty_range_rejected() {
        let f = rat();
        let gs = sanov_system(&f);
        assert_eq!(split_primes(&f, &gs, 2, 5).unwrap_err(), ReductionError::EmptyRange);
        assert_eq!(split_primes(&f, &gs, 7, 5).unwrap_err(), ReductionError::EmptyRange);
    }

    #[test]
    fn reduce_integer_matrix() {
        let f = rat();
        let site = PrimeSite::new(&f, 5, 0).unwrap();
        let a = Mat2K::from_integers(&f, [[1, 2], [0, 1]]);
        assert_eq!(site.reduce(&a).unwrap().e, [1, 2, 0, 1]);
    }

    #[test]
    fn reduce_substitutes_root() {
        let f = sqrt2();
        let site = PrimeSite::new(&f, 7, 3).unwrap();
        let m = Mat2K::new([f.one(), f.theta(), f.zero(), f.one()]).unwrap();
        assert_eq!(site.reduce(&m).unwrap().e, [1, 3, 0, 1]);
    }

    #[test]
    fn reduce_inverts_denominators() {
        let f = rat();
        let site = PrimeSite::new(&f, 5, 0).unwrap();
        let m = Mat2K::new([
            f.from_rational(BigRational::new(BigInt::from(1), BigInt::from(2))),
            f.zero(),
            f.zero(),
            f.from_integer(2),
        ])
        .unwrap();
        assert_eq!(site.reduce(&m).unwrap().e, [3, 0, 0, 2]);
    }

    #[test]
    fn denominator_not_invertible() {
        let f = rat();
        let site = PrimeSite::new(&f, 5, 0).unwrap();
        let m = Mat2K::new([
            f.from_rational(BigRational::new(BigInt::from(1), BigInt::from(5))),
            f.zero(),
            f.zero(),
            f.one(),
        ])
        .unwrap();
        assert_eq!(
            site.reduce(&m).unwrap_err(),
            ReductionError::NonInvertibleDenominator { p: 5 }
        );
    }

    #[test]
    fn generator_images_mod_3_are_distinct() {
        let f = rat();
        let gs = sanov_system(&f);
        let site = PrimeSite::new(&f, 3, 0).unwrap();
        let imgs = reduce_generators(&site, &gs).unwrap();
        assert!(!imgs.has_coincidence);
        assert!(!imgs.has_involution);
        // pi(a)^{-1} = [[1,1],[0,1]] mod 3
        assert_eq!(imgs.mats[1].e, [1, 1, 0, 1]);
    }

    #[test]
    fn identity_images_flagged() {
        let id = ModpMatrix::identity(5);
        let imgs = classify_images([id, id, id, id]);
        assert!(imgs.has_coincidence);
        assert!(imgs.has_identity);
    }

    #[test]
    fn crt_componentwise_and_duplicates() {
        let f = rat();
        let s3 = PrimeSite::new(&f, 3, 0).unwrap();
        let s5 = PrimeSite::new(&f, 5, 0).unwrap();
        let ideal = IdealProduct::new(vec![s3.clone(), s5]).unwrap();
        let a = Mat2K::from_integers(&f, [[1, 2], [0, 1]]);
        let t = crt_reduce(&ideal, &a).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].e, [1, 2, 0, 1]);
        assert_eq!(t[1].e, [1, 2, 0, 1]);

        let empty = IdealProduct::<f64>::new(vec![]).unwrap();
        assert!(crt_reduce(&empty, &a).unwrap().is_empty());

        let dup = IdealProduct::new(vec![s3.clone(), s3]);
        assert_eq!(dup.unwrap_err(), ReductionError::DuplicatePrime(3));
    }

    #[test]
    fn modp_matrix_algebra() {
        let m = ModpMatrix { p: 7, e: [1, 3, 0, 1] };
        assert_eq!(m.det(), 1);
        assert!(m.mul(&m.inv()).is_identity());
    }
}
