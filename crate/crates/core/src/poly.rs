//! Exact polynomial arithmetic over the rationals, plus the handful of
//! integer-polynomial helpers the splitting scan needs (evaluation mod p,
//! resultants for the discriminant).
//!
//! Polynomials are coefficient vectors in ascending order; the zero
//! polynomial is the empty vector.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type QPoly = Vec<BigRational>;

pub fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn trim(mut p: QPoly) -> QPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn from_integers(coeffs: &[BigInt]) -> QPoly {
    coeffs
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

pub fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let ai = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let bi = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        out.push(ai - bi);
    }
    trim(out)
}

pub fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim(out)
}

pub fn derivative(p: &[BigRational]) -> QPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

/// Division with remainder; panics on a zero divisor.
pub fn div_rem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut rem: QPoly = trim(a.to_vec());
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(db)];
    let lead_inv = b[db].recip();
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let shift = dr - db;
        let coeff = &rem[dr] * &lead_inv;
        for i in 0..=db {
            let t = &b[i] * &coeff;
            rem[shift + i] -= t;
        }
        quot[shift] = coeff;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

/// Monic gcd via the Euclidean algorithm.
pub fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    while !r1.is_empty() {
        let (_, r) = div_rem(&r0, &r1);
        r0 = r1;
        r1 = r;
    }
    make_monic(r0)
}

/// Extended gcd: returns (g, s, t) with g = s*a + t*b and g monic.
pub fn extended_gcd(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly, QPoly) {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    let mut s0: QPoly = vec![BigRational::one()];
    let mut s1: QPoly = Vec::new();
    let mut t0: QPoly = Vec::new();
    let mut t1: QPoly = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        let t2 = sub(&t0, &mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    if let Some(d) = degree(&r0) {
        let inv = r0[d].recip();
        let scale = |p: &[BigRational]| trim(p.iter().map(|c| c * &inv).collect());
        (scale(&r0), scale(&s0), scale(&t0))
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    }
}

pub fn make_monic(p: QPoly) -> QPoly {
    match degree(&p) {
        None => p,
        Some(d) => {
            let inv = p[d].recip();
            trim(p.into_iter().map(|c| c * &inv).collect())
        }
    }
}

/// Resultant of two rational polynomials as the determinant of their
/// Sylvester matrix. Degrees here are tiny, so exact Gaussian elimination
/// with rational pivots is fine.
pub fn resultant(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let da = match degree(a) {
        Some(d) => d,
        None => return BigRational::zero(),
    };
    let db = match degree(b) {
        Some(d) => d,
        None => return BigRational::zero(),
    };
    if da == 0 {
        return pow_rational(&a[0], db);
    }
    if db == 0 {
        return pow_rational(&b[0], da);
    }
    let n = da + db;
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for row in 0..db {
        for (k, c) in a.iter().enumerate().take(da + 1) {
            m[row][row + da - k] = c.clone();
        }
    }
    for row in 0..da {
        for (k, c) in b.iter().enumerate().take(db + 1) {
            m[db + row][row + db - k] = c.clone();
        }
    }
    determinant(m)
}

fn pow_rational(base: &BigRational, exp: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// Exact determinant by fraction Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        let pinv = p.recip();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &pinv;
            for c in col..n {
                let t = &m[col][c] * &factor;
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Evaluate an integer polynomial at x modulo an odd prime p.
pub fn eval_mod(coeffs: &[BigInt], x: u64, p: u64) -> u64 {
    let mut acc: u64 = 0;
    for c in coeffs.iter().rev() {
        acc = (acc * x + bigint_mod(c, p)) % p;
    }
    acc
}

pub fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    use num::ToPrimitive;
    let m = v % BigInt::from(p);
    let m = if m.is_negative() { m + BigInt::from(p) } else { m };
    m.to_u64().expect("residue fits in u64")
}
