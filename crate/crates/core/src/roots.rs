//! Complex roots of monic real polynomials, via shifted inverse iteration on
//! the companion matrix with deflation, followed by a Newton polish against
//! the original polynomial. Degrees here are the degrees of minimal
//! polynomials, i.e. small.

use crate::scalar::Scalar;
use num::complex::Complex;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootError {
    #[error("polynomial must have degree at least 1")]
    DegreeZero,
    #[error("shifted iteration failed to converge on a root")]
    NoConvergence,
}

pub struct Roots<S: Scalar> {
    /// Roots sorted by (re, im), conjugates adjacent.
    pub values: Vec<Complex<S>>,
    /// Radius r such that each returned z has a true root within r of it
    /// (the classical n*|p(z)/p'(z)| inclusion disk, maximised over roots).
    pub inclusion_radius: S,
}

/// `coeffs` ascending with leading coefficient exactly 1.
pub fn monic_roots<S: Scalar>(coeffs: &[S]) -> Result<Roots<S>, RootError> {
    let n = coeffs.len().checked_sub(1).filter(|&n| n >= 1).ok_or(RootError::DegreeZero)?;
    assert!(coeffs[n] == S::one(), "leading coefficient must be 1");

    let original: Vec<Complex<S>> = coeffs.iter().map(|&c| Complex::new(c, S::zero())).collect();
    let mut work = original.clone();
    let mut roots: Vec<Complex<S>> = Vec::with_capacity(n);

    while work.len() - 1 > 2 {
        let raw = companion_eigenvalue(&work)?;
        let z = newton_polish(&original, raw);
        roots.push(z);
        work = deflate(&work, z);
    }
    match work.len() - 1 {
        1 => roots.push(newton_polish(&original, -work[0])),
        2 => {
            for z in quadratic_roots(work[0], work[1]) {
                roots.push(newton_polish(&original, z));
            }
        }
        _ => unreachable!(),
    }

    // Residual Im parts left by complex arithmetic on what is a real root.
    let snap = S::from_f64(32.0).unwrap() * S::epsilon();
    for z in &mut roots {
        if z.im.abs() <= snap * (S::one() + z.norm()) {
            z.im = S::zero();
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });

    let mut radius = S::zero();
    let deg = S::from_usize(n).unwrap();
    for &z in &roots {
        let (pv, dv) = eval_with_derivative(&original, z);
        let r = if dv.norm() > S::zero() {
            deg * pv.norm() / dv.norm()
        } else {
            S::infinity()
        };
        radius = radius.max(r);
    }
    Ok(Roots { values: roots, inclusion_radius: radius })
}

fn eval_with_derivative<S: Scalar>(
    p: &[Complex<S>],
    z: Complex<S>,
) -> (Complex<S>, Complex<S>) {
    let mut v = Complex::new(S::zero(), S::zero());
    let mut d = Complex::new(S::zero(), S::zero());
    for &c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn newton_polish<S: Scalar>(p: &[Complex<S>], mut z: Complex<S>) -> Complex<S> {
    let tol = S::epsilon() + S::epsilon();
    for _ in 0..60 {
        let (v, d) = eval_with_derivative(p, z);
        if d.norm() == S::zero() {
            break;
        }
        let step = v / d;
        z = z - step;
        if step.norm() <= tol * (S::one() + z.norm()) {
            break;
        }
    }
    z
}

fn deflate<S: Scalar>(p: &[Complex<S>], root: Complex<S>) -> Vec<Complex<S>> {
    // Synthetic division by (x - root); quotient stays monic.
    let n = p.len() - 1;
    let mut q = vec![Complex::new(S::zero(), S::zero()); n];
    let mut carry = p[n];
    for i in (0..n).rev() {
        q[i] = carry;
        carry = p[i] + carry * root;
    }
    q
}

fn quadratic_roots<S: Scalar>(c0: Complex<S>, c1: Complex<S>) -> [Complex<S>; 2] {
    // x^2 + c1 x + c0, with the stable branch choice for the first root.
    let two = Complex::new(S::from_f64(2.0).unwrap(), S::zero());
    let four = Complex::new(S::from_f64(4.0).unwrap(), S::zero());
    let disc = (c1 * c1 - four * c0).sqrt();
    // Pick the branch that avoids cancellation: |c1 + disc| is the larger
    // when Re(conj(c1)·disc) >= 0.
    let s = if (c1.conj() * disc).re >= S::zero() { -c1 - disc } else { -c1 + disc };
    let r0 = s / two;
    let r1 = if r0.norm() > S::zero() { c0 / r0 } else { -c1 - r0 };
    [r0, r1]
}

/// One eigenvalue of the companion matrix of a monic polynomial, by inverse
/// iteration with Rayleigh-quotient shift updates, restarted from shifts on
/// the Cauchy root-bound circle.
fn companion_eigenvalue<S: Scalar>(p: &[Complex<S>]) -> Result<Complex<S>, RootError> {
    let m = p.len() - 1;
    let bound = p[..m]
        .iter()
        .fold(S::one(), |acc, c| acc.max(c.norm()))
        + S::one();
    let p_scale = p.iter().fold(S::zero(), |acc, c| acc.max(c.norm()));
    let accept = S::epsilon() * S::from_f64(64.0).unwrap() * p_scale.max(S::one());

    for attempt in 0..24usize {
        // Golden-angle sweep around the root bound circle, kept off the real
        // axis so conjugate pairs stay reachable.
        let t = S::from_f64(0.7548776662 * (attempt as f64 + 0.37)).unwrap();
        let ang = (t - t.floor()) * S::from_f64(std::f64::consts::TAU).unwrap();
        let rad = bound * S::from_f64(0.5 + 0.4 * ((attempt % 3) as f64) / 3.0).unwrap();
        let mut shift = Complex::from_polar(rad, ang)
            + Complex::new(S::zero(), S::from_f64(1e-3).unwrap() * bound);

        let mut v: Vec<Complex<S>> = (0..m)
            .map(|i| {
                let x = splitmix(0x9E3779B97F4A7C15 ^ (i as u64).wrapping_mul(0xBF58476D1CE4E5B9));
                Complex::new(
                    S::from_f64((x >> 11) as f64 / (1u64 << 53) as f64 - 0.5).unwrap(),
                    S::from_f64((x & 0xFFFF) as f64 / 65536.0 - 0.5).unwrap(),
                )
            })
            .collect();
        normalize(&mut v);

        for it in 0..80usize {
            let solved = match solve_shifted_companion(p, shift, &v) {
                Some(w) => w,
                // Singular shift: the shift itself is (numerically) a root.
                None => return Ok(shift),
            };
            v = solved;
            normalize(&mut v);
            if it >= 1 {
                shift = rayleigh_companion(p, &v);
            }
            let (pv, _) = eval_with_derivative(p, shift);
            if pv.norm() <= accept {
                return Ok(shift);
            }
        }
        let (pv, _) = eval_with_derivative(p, shift);
        if pv.norm() <= accept * S::from_f64(1e4).unwrap() {
            return Ok(shift);
        }
    }
    Err(RootError::NoConvergence)
}

fn normalize<S: Scalar>(v: &mut [Complex<S>]) {
    let norm = v.iter().fold(S::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    if norm > S::zero() {
        for z in v.iter_mut() {
            *z = *z / norm;
        }
    }
}

/// Rayleigh quotient v^H C v for the companion matrix C of p (v unit).
fn rayleigh_companion<S: Scalar>(p: &[Complex<S>], v: &[Complex<S>]) -> Complex<S> {
    let m = v.len();
    let mut acc = Complex::new(S::zero(), S::zero());
    for i in 0..m {
        let mut ci = -p[i] * v[m - 1];
        if i > 0 {
            ci = ci + v[i - 1];
        }
        acc = acc + v[i].conj() * ci;
    }
    acc
}

/// Solve (C - shift I) w = v for the companion matrix C by dense LU with
/// partial pivoting. Returns None when the system is numerically singular,
/// i.e. the shift already sits on an eigenvalue.
fn solve_shifted_companion<S: Scalar>(
    p: &[Complex<S>],
    shift: Complex<S>,
    v: &[Complex<S>],
) -> Option<Vec<Complex<S>>> {
    let m = v.len();
    let zero = Complex::new(S::zero(), S::zero());
    let mut a = vec![zero; m * m];
    for i in 0..m {
        a[i * m + m - 1] = -p[i];
        if i > 0 {
            a[i * m + i - 1] = Complex::new(S::one(), S::zero());
        }
        a[i * m + i] = a[i * m + i] - shift;
    }
    let mut x: Vec<Complex<S>> = v.to_vec();
    let tiny = S::epsilon() * S::epsilon();
    for col in 0..m {
        let (pivot, mag) = (col..m)
            .map(|r| (r, a[r * m + col].norm()))
            .max_by(|l, r| l.1.partial_cmp(&r.1).unwrap())
            .unwrap();
        if mag <= tiny {
            return None;
        }
        if pivot != col {
            for c in 0..m {
                a.swap(pivot * m + c, col * m + c);
            }
            x.swap(pivot, col);
        }
        let inv = Complex::new(S::one(), S::zero()) / a[col * m + col];
        for r in col + 1..m {
            let f = a[r * m + col] * inv;
            if f.norm() == S::zero() {
                continue;
            }
            for c in col..m {
                let t = a[col * m + c] * f;
                a[r * m + c] = a[r * m + c] - t;
            }
            let t = x[col] * f;
            x[r] = x[r] - t;
        }
    }
    for col in (0..m).rev() {
        let mut s = x[col];
        for c in col + 1..m {
            s = s - a[col * m + c] * x[c];
        }
        x[col] = s / a[col * m + col];
    }
    Some(x)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
