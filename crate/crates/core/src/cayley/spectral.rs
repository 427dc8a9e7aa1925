//! Second adjacency eigenvalue of a connected k-regular multigraph.
//!
//! Two power-iteration lanes run on the space orthogonal to the all-ones
//! vector (the eigenvector of k): a plain lane tracking the dominant
//! remaining eigenvalue by modulus, and a lane on A + kI whose dominant
//! eigenvalue is k + λ₂ regardless of how negative the bottom of the
//! spectrum is. λ₂ is reported as the larger signed estimate and both are
//! recorded. Rayleigh quotients never overshoot the true eigenvalue on the
//! deflated space, so a positive reported gap never certifies more than the
//! truth. Small graphs are cross-checked against a dense Jacobi
//! eigendecomposition.

use super::CayleyGraph;
use crate::scalar::Scalar;
use serde::Serialize;

/// Graphs up to this size also get a dense eigendecomposition.
pub const DENSE_CROSSCHECK_LIMIT: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport<S: Scalar> {
    /// Second-largest adjacency eigenvalue (multiplicities counted).
    pub lambda2: S,
    /// k_reg - lambda2.
    pub gap: S,
    /// Signed estimate of the modulus-dominant eigenvalue orthogonal to the
    /// all-ones vector (may be the most negative one on near-bipartite
    /// graphs).
    pub dominant_signed: S,
    pub iterations: usize,
    /// Residual ||A v - λ v|| of the λ₂ estimate, relative to k_reg.
    pub residual: S,
    pub converged: bool,
    /// Dense λ₂ when the graph is small enough to afford it.
    pub dense_lambda2: Option<S>,
}

pub fn spectral_gap<S: Scalar>(g: &CayleyGraph, tol: S, max_iter: usize) -> SpectralReport<S> {
    let n = g.vertex_count();
    let k = S::from_usize(g.k_reg()).unwrap();
    if n == 1 {
        // Single vertex: the spectrum is {k}; report the vacuous gap.
        return SpectralReport {
            lambda2: -k,
            gap: k + k,
            dominant_signed: -k,
            iterations: 0,
            residual: S::zero(),
            converged: true,
            dense_lambda2: None,
        };
    }

    // The two lanes are interleaved (x[2v] plain, x[2v+1] shifted) so one
    // pass over the adjacency serves both.
    let mut x = interleaved_start(n);
    let mut y = vec![S::zero(); 2 * n];

    let mut r_plain = S::zero();
    let mut r_shift = S::zero();
    let mut res_plain = S::infinity();
    let mut res_shift = S::infinity();
    let mut iterations = 0;

    for it in 0..max_iter {
        iterations = it + 1;

        matvec2(g, &x, &mut y);
        r_plain = lane_dot(&x, &y, 0);
        res_plain = lane_residual(&y, r_plain, &x, 0);
        for v in 0..n {
            y[2 * v + 1] = y[2 * v + 1] + k * x[2 * v + 1];
        }
        let rq = lane_dot(&x, &y, 1);
        r_shift = rq - k;
        res_shift = lane_residual(&y, rq, &x, 1);
        for lane in 0..2 {
            lane_center(&mut y, lane);
            lane_normalize(&mut y, lane);
        }
        std::mem::swap(&mut x, &mut y);

        if res_shift <= tol * k && res_plain <= tol * k {
            break;
        }
    }

    let lambda2 = r_plain.max(r_shift);
    let residual = if r_plain > r_shift { res_plain } else { res_shift };
    let dense_lambda2 = if n <= DENSE_CROSSCHECK_LIMIT {
        Some(dense_lambda2(g))
    } else {
        None
    };
    SpectralReport {
        lambda2,
        gap: k - lambda2,
        dominant_signed: r_plain,
        iterations,
        residual: residual / k,
        converged: res_shift <= tol * k,
        dense_lambda2,
    }
}

fn interleaved_start<S: Scalar>(n: usize) -> Vec<S> {
    let salts = [0x517cc1b727220a95u64, 0x2545f4914f6cdd1d];
    let mut v: Vec<S> = (0..2 * n)
        .map(|i| {
            let x = splitmix(salts[i % 2] ^ ((i / 2) as u64).wrapping_mul(0x9E3779B97F4A7C15));
            S::from_f64((x >> 11) as f64 / (1u64 << 53) as f64 - 0.5).unwrap()
        })
        .collect();
    for lane in 0..2 {
        lane_center(&mut v, lane);
        lane_normalize(&mut v, lane);
    }
    v
}

/// y = A x on both interleaved lanes at once.
fn matvec2<S: Scalar>(g: &CayleyGraph, x: &[S], y: &mut [S]) {
    let k = g.k_reg();
    for v in 0..g.vertex_count() {
        let mut a0 = S::zero();
        let mut a1 = S::zero();
        for l in 0..k {
            let w = g.neighbor(v as u32, l) as usize;
            a0 = a0 + x[2 * w];
            a1 = a1 + x[2 * w + 1];
        }
        y[2 * v] = a0;
        y[2 * v + 1] = a1;
    }
}

fn lane_dot<S: Scalar>(a: &[S], b: &[S], lane: usize) -> S {
    let mut acc = S::zero();
    for v in 0..a.len() / 2 {
        acc = acc + a[2 * v + lane] * b[2 * v + lane];
    }
    acc
}

fn lane_residual<S: Scalar>(av: &[S], lambda: S, v: &[S], lane: usize) -> S {
    let mut acc = S::zero();
    for i in 0..v.len() / 2 {
        let d = av[2 * i + lane] - lambda * v[2 * i + lane];
        acc = acc + d * d;
    }
    acc.sqrt()
}

fn lane_center<S: Scalar>(v: &mut [S], lane: usize) {
    let n = v.len() / 2;
    let mut sum = S::zero();
    for i in 0..n {
        sum = sum + v[2 * i + lane];
    }
    let mean = sum / S::from_usize(n).unwrap();
    for i in 0..n {
        v[2 * i + lane] = v[2 * i + lane] - mean;
    }
}

fn lane_normalize<S: Scalar>(v: &mut [S], lane: usize) {
    let norm = lane_dot(v, v, lane).sqrt();
    if norm > S::zero() {
        let n = v.len() / 2;
        for i in 0..n {
            v[2 * i + lane] = v[2 * i + lane] / norm;
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// λ₂ from a full dense symmetric eigendecomposition (cyclic Jacobi).
pub fn dense_lambda2<S: Scalar>(g: &CayleyGraph) -> S {
    let n = g.vertex_count();
    let mut a = vec![S::zero(); n * n];
    for v in 0..n {
        for l in 0..g.k_reg() {
            let w = g.neighbor(v as u32, l) as usize;
            a[v * n + w] = a[v * n + w] + S::one();
        }
    }
    let mut evals = jacobi_eigenvalues(&mut a, n);
    evals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    evals[1]
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi sweeps.
pub fn jacobi_eigenvalues<S: Scalar>(a: &mut [S], n: usize) -> Vec<S> {
    assert_eq!(a.len(), n * n);
    let eps = S::epsilon();
    let frob = a.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt();
    let stop = frob * eps * S::from_usize(n).unwrap();
    for _sweep in 0..64 {
        let mut off = S::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                let apq = a[i * n + j];
                if apq.abs() <= eps * frob / S::from_usize(n * n).unwrap() {
                    continue;
                }
                let app = a[i * n + i];
                let aqq = a[j * n + j];
                let tau = (aqq - app) / (apq + apq);
                let t = {
                    let s = if tau >= S::zero() { S::one() } else { -S::one() };
                    s / (tau.abs() + (S::one() + tau * tau).sqrt())
                };
                let c = (S::one() + t * t).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let aik = a[i * n + k];
                    let ajk = a[j * n + k];
                    a[i * n + k] = c * aik - s * ajk;
                    a[j * n + k] = s * aik + c * ajk;
                }
                for k in 0..n {
                    let aki = a[k * n + i];
                    let akj = a[k * n + j];
                    a[k * n + i] = c * aki - s * akj;
                    a[k * n + j] = s * aki + c * akj;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle_spectrum() {
        // C4 eigenvalues: 2, 0, 0, -2.
        let g = CayleyGraph::cycle(4);
        let r: SpectralReport<f64> = spectral_gap(&g, 1e-10, 2000);
        assert!(r.lambda2.abs() < 1e-8, "lambda2 = {}", r.lambda2);
        assert!((r.gap - 2.0).abs() < 1e-8);
        assert!((r.dominant_signed + 2.0).abs() < 1e-8);
        assert!((r.dense_lambda2.unwrap() - 0.0).abs() < 1e-9);
    }

    #[test]
    fn complete_graph_spectrum() {
        // K4 eigenvalues: 3, -1, -1, -1.
        let g = CayleyGraph::complete(4);
        let r: SpectralReport<f64> = spectral_gap(&g, 1e-10, 2000);
        assert!((r.lambda2 + 1.0).abs() < 1e-8, "lambda2 = {}", r.lambda2);
        assert!((r.gap - 4.0).abs() < 1e-8);
        assert!((r.dense_lambda2.unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn jacobi_on_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let mut a: Vec<f64> = vec![2.0, 1.0, 1.0, 2.0];
        let mut ev = jacobi_eigenvalues(&mut a, 2);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn larger_cycle_lambda2() {
        // C8: lambda2 = 2 cos(2*pi/8) = sqrt(2).
        let g = CayleyGraph::cycle(8);
        let r: SpectralReport<f64> = spectral_gap(&g, 1e-12, 5000);
        assert!((r.lambda2 - 2f64.sqrt()).abs() < 1e-7, "lambda2 = {}", r.lambda2);
        assert!((r.dense_lambda2.unwrap() - 2f64.sqrt()).abs() < 1e-9);
    }
}
