//! Expansion constants for the definition |∂A| >= c (1 - |A|/n) |A|, where
//! ∂A is the set of vertices at distance exactly 1 from A.
//!
//! The exact mode scans every nonempty proper subset (feasible only on tiny
//! graphs); the sampled mode takes size-stratified random subsets plus BFS
//! balls (typical near-minimizers) and is always an upper bound on the
//! exact constant. Ratios are exact fractions |∂A|·n / ((n-|A|)·|A|), so
//! comparisons carry no float slop. Subsets are stored by their smaller
//! side: ∂A can be counted from either side, which keeps large subsets on
//! million-vertex graphs affordable.

use super::{CayleyError, CayleyGraph};
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Exhaustive subset scans are limited to 2^24 subsets.
pub const EXACT_SUBSET_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport<S: Scalar> {
    pub mode: ExpansionMode,
    /// The minimum ratio found: the largest c certified (exact mode) or an
    /// upper bound on it (sampled mode).
    pub c_value: S,
    /// The same ratio as an exact fraction |∂A|·n / ((n-|A|)·|A|).
    pub c_num: u64,
    pub c_den: u64,
    /// A subset achieving the minimum, ascending vertex ids.
    pub witness: Vec<u32>,
    pub subsets_checked: u64,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    fn less_than(self, other: Ratio) -> bool {
        (self.num as u128) * (other.den as u128) < (other.num as u128) * (self.den as u128)
    }
}

fn ratio_scalar<S: Scalar>(r: Ratio) -> S {
    S::from_u64(r.num).unwrap() / S::from_u64(r.den).unwrap()
}

/// Exact minimum of the definitional ratio over all nonempty proper subsets.
pub fn expansion_exact<S: Scalar>(g: &CayleyGraph) -> Result<ExpansionReport<S>, CayleyError> {
    let n = g.vertex_count();
    if n > EXACT_SUBSET_LIMIT {
        return Err(CayleyError::TooLarge { vertices: n, limit: EXACT_SUBSET_LIMIT });
    }
    let nb: Vec<u32> = (0..n)
        .map(|v| {
            let mut m = 0u32;
            for l in 0..g.k_reg() {
                m |= 1 << g.neighbor(v as u32, l);
            }
            m
        })
        .collect();
    let full: u32 = (1 << n) - 1;
    let mut best = Ratio { num: u64::MAX, den: 1 };
    let mut best_mask = 0u32;
    let mut checked = 0u64;
    for mask in 1..full {
        checked += 1;
        let mut reach = 0u32;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            reach |= nb[v];
            rest &= rest - 1;
        }
        let boundary = (reach & !mask & full).count_ones() as u64;
        let size = mask.count_ones() as u64;
        let r = Ratio { num: boundary * n as u64, den: (n as u64 - size) * size };
        if r.less_than(best) {
            best = r;
            best_mask = mask;
        }
    }
    let witness = (0..n as u32).filter(|&v| best_mask & (1 << v) != 0).collect();
    Ok(ExpansionReport {
        mode: ExpansionMode::Exact,
        c_value: ratio_scalar(best),
        c_num: best.num,
        c_den: best.den,
        witness,
        subsets_checked: checked,
        trials: None,
        seed: None,
    })
}

/// A vertex subset stored by whichever of A and its complement is smaller.
#[derive(Debug, Clone)]
struct Subset {
    verts: Vec<u32>,
    verts_are_complement: bool,
    /// |A|
    size: u64,
}

impl Subset {
    fn direct(verts: Vec<u32>) -> Self {
        let size = verts.len() as u64;
        Self { verts, verts_are_complement: false, size }
    }

    /// Materialize the members of A in ascending order.
    fn members(&self, n: usize, scratch: &mut Scratch) -> Vec<u32> {
        if !self.verts_are_complement {
            let mut m = self.verts.clone();
            m.sort_unstable();
            return m;
        }
        scratch.epoch += 1;
        let e = scratch.epoch;
        for &v in &self.verts {
            scratch.in_set[v as usize] = e;
        }
        (0..n as u32).filter(|&v| scratch.in_set[v as usize] != e).collect()
    }
}

/// Stamped scratch space so boundary counts never need clearing.
struct Scratch {
    in_set: Vec<u32>,
    seen: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { in_set: vec![0; n], seen: vec![0; n], epoch: 0 }
    }

    /// |∂A| over a flat adjacency view (k slots per vertex); O(min(|A|,
    /// n-|A|) · k).
    fn boundary(&mut self, adj: &[u32], k: usize, subset: &Subset) -> u64 {
        self.epoch += 1;
        let e = self.epoch;
        for &v in &subset.verts {
            self.in_set[v as usize] = e;
        }
        let mut count = 0u64;
        if !subset.verts_are_complement {
            // Unmarked, unseen neighbors of A.
            for &v in &subset.verts {
                for l in 0..k {
                    let w = adj[v as usize * k + l] as usize;
                    if self.in_set[w] != e && self.seen[w] != e {
                        self.seen[w] = e;
                        count += 1;
                    }
                }
            }
        } else {
            // Marked vertices are the complement; each contributes when it
            // has at least one unmarked (in-A) neighbor.
            for &u in &subset.verts {
                for l in 0..k {
                    let w = adj[u as usize * k + l] as usize;
                    if self.in_set[w] != e {
                        count += 1;
                        break;
                    }
                }
            }
        }
        count
    }
}

fn flat_adjacency(g: &CayleyGraph) -> Vec<u32> {
    let n = g.vertex_count();
    let k = g.k_reg();
    let mut adj = Vec::with_capacity(n * k);
    for v in 0..n as u32 {
        for l in 0..k {
            adj.push(g.neighbor(v, l));
        }
    }
    adj
}

/// BFS balls around vertex 0, every radius with a nonempty proper ball,
/// stored by their smaller side.
fn ball_subsets(g: &CayleyGraph, scratch: &mut Scratch) -> Vec<Subset> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut ball: Vec<u32> = vec![0];
    seen[0] = true;
    let mut frontier: Vec<u32> = vec![0];
    let mut out = Vec::new();
    while !frontier.is_empty() && ball.len() < n {
        out.push(if ball.len() <= n / 2 {
            Subset::direct(ball.clone())
        } else {
            let size = ball.len() as u64;
            scratch.epoch += 1;
            let e = scratch.epoch;
            for &v in &ball {
                scratch.in_set[v as usize] = e;
            }
            let comp: Vec<u32> =
                (0..n as u32).filter(|&v| scratch.in_set[v as usize] != e).collect();
            Subset { verts: comp, verts_are_complement: true, size }
        });
        let mut next = Vec::new();
        for &v in &frontier {
            for l in 0..g.k_reg() {
                let w = g.neighbor(v, l);
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    next.push(w);
                    ball.push(w);
                }
            }
        }
        frontier = next;
    }
    out
}

/// A random subset of exactly `size` vertices, sampling whichever side is
/// smaller.
fn random_subset(n: usize, size: usize, rng: &mut ChaCha8Rng, scratch: &mut Scratch) -> Subset {
    debug_assert!(size >= 1 && size < n);
    let direct = size <= n / 2;
    let want = if direct { size } else { n - size };
    scratch.epoch += 1;
    let e = scratch.epoch;
    let mut verts = Vec::with_capacity(want);
    while verts.len() < want {
        let v = rng.gen_range(0..n);
        if scratch.seen[v] != e {
            scratch.seen[v] = e;
            verts.push(v as u32);
        }
    }
    Subset { verts, verts_are_complement: !direct, size: size as u64 }
}

/// Sizes swept deterministically across 1..n-1, one stratum per trial.
fn stratified_size(t: u64, trials: u64, n: usize, rng: &mut ChaCha8Rng) -> usize {
    let span = (n - 1) as u64;
    if trials >= span {
        1 + (t % span) as usize
    } else {
        let lo = 1 + (t * span / trials) as usize;
        let hi = (1 + ((t + 1) * span / trials) as usize).max(lo + 1);
        rng.gen_range(lo..hi).min(n - 1)
    }
}

/// Minimum ratio over sampled subsets: size-stratified random subsets plus
/// all BFS balls. Deterministic for a fixed seed, and always an upper bound
/// on the exact constant.
pub fn expansion_sampled<S: Scalar>(
    g: &CayleyGraph,
    trials: u64,
    seed: u64,
) -> ExpansionReport<S> {
    let n = g.vertex_count();
    assert!(n >= 2, "expansion needs at least two vertices");
    let k = g.k_reg();
    let adj = flat_adjacency(g);
    let mut scratch = Scratch::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best = Ratio { num: u64::MAX, den: 1 };
    let mut best_subset: Option<Subset> = None;
    let mut checked = 0u64;
    let consider = |subset: Subset,
                        scratch: &mut Scratch,
                        best: &mut Ratio,
                        best_subset: &mut Option<Subset>,
                        checked: &mut u64| {
        let boundary = scratch.boundary(&adj, k, &subset);
        let r = Ratio {
            num: boundary * n as u64,
            den: (n as u64 - subset.size) * subset.size,
        };
        *checked += 1;
        if r.less_than(*best) {
            *best = r;
            *best_subset = Some(subset);
        }
    };

    for ball in ball_subsets(g, &mut scratch) {
        consider(ball, &mut scratch, &mut best, &mut best_subset, &mut checked);
    }
    for t in 0..trials {
        let size = stratified_size(t, trials, n, &mut rng);
        let subset = random_subset(n, size, &mut rng, &mut scratch);
        consider(subset, &mut scratch, &mut best, &mut best_subset, &mut checked);
    }

    let witness = best_subset
        .map(|s| s.members(n, &mut scratch))
        .unwrap_or_default();
    ExpansionReport {
        mode: ExpansionMode::Sampled,
        c_value: ratio_scalar(best),
        c_num: best.num,
        c_den: best.den,
        witness,
        subsets_checked: checked,
        trials: Some(trials),
        seed: Some(seed),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SubsetPlan {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub subsets_checked: u64,
    pub ok: bool,
    /// A counterexample subset (small-graph vertex ids), if one was found.
    pub violation: Option<Vec<u32>>,
}

/// Pointwise check that enlarging the generating set cannot decrease the
/// definitional ratio: for every tested subset A,
/// ratio_big(A) >= ratio_small(A). Both graphs must be Cayley graphs of the
/// same group, with the big generating set extending the small one.
pub fn check_edge_monotonicity(
    small: &CayleyGraph,
    big: &CayleyGraph,
    plan: SubsetPlan,
) -> Result<MonotonicityReport, CayleyError> {
    let n = small.vertex_count();
    if big.vertex_count() != n || big.stride != small.stride {
        return Err(CayleyError::VertexSetMismatch);
    }
    if big.k_reg() < small.k_reg() || big.labels()[..small.k_reg()] != small.labels()[..] {
        return Err(CayleyError::BadGenerators(
            "the larger generating set must extend the smaller one".into(),
        ));
    }
    // Align vertex ids through the element tables, and pull the big graph's
    // adjacency back into the small graph's id space.
    let mut map = vec![0u32; n];
    let mut inv_map = vec![0u32; n];
    for v in 0..n as u32 {
        let b = big
            .vertex_of(small.elem(v))
            .ok_or(CayleyError::VertexSetMismatch)?;
        map[v as usize] = b;
        inv_map[b as usize] = v;
    }
    let k_small = small.k_reg();
    let k_big = big.k_reg();
    let adj_small = flat_adjacency(small);
    let mut adj_big = Vec::with_capacity(n * k_big);
    for v in 0..n {
        for l in 0..k_big {
            adj_big.push(inv_map[big.neighbor(map[v], l) as usize]);
        }
    }
    // The shared labels must agree edge for edge.
    for v in 0..n {
        for l in 0..k_small {
            if adj_big[v * k_big + l] != adj_small[v * k_small + l] {
                return Err(CayleyError::BadGenerators(
                    "shared labels disagree between the two graphs".into(),
                ));
            }
        }
    }

    let mut scratch = Scratch::new(n);
    let mut checked = 0u64;
    let mut violation: Option<Vec<u32>> = None;
    // Both ratios share the denominator (n-|A|)·|A|, so the pointwise
    // comparison reduces to the boundary sizes.
    let check = |subset: &Subset, scratch: &mut Scratch, checked: &mut u64| -> bool {
        let b_small = scratch.boundary(&adj_small, k_small, subset);
        let b_big = scratch.boundary(&adj_big, k_big, subset);
        *checked += 1;
        b_big >= b_small
    };

    match plan {
        SubsetPlan::Exhaustive => {
            if n > EXACT_SUBSET_LIMIT {
                return Err(CayleyError::TooLarge { vertices: n, limit: EXACT_SUBSET_LIMIT });
            }
            let full: u32 = (1u32 << n) - 1;
            for mask in 1..full {
                let members: Vec<u32> =
                    (0..n as u32).filter(|&v| mask & (1 << v) != 0).collect();
                let subset = Subset::direct(members);
                if !check(&subset, &mut scratch, &mut checked) {
                    violation = Some(subset.members(n, &mut scratch));
                    break;
                }
            }
        }
        SubsetPlan::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            'outer: {
                for ball in ball_subsets(small, &mut scratch) {
                    if !check(&ball, &mut scratch, &mut checked) {
                        violation = Some(ball.members(n, &mut scratch));
                        break 'outer;
                    }
                }
                for t in 0..trials {
                    let size = stratified_size(t, trials, n, &mut rng);
                    let subset = random_subset(n, size, &mut rng, &mut scratch);
                    if !check(&subset, &mut scratch, &mut checked) {
                        violation = Some(subset.members(n, &mut scratch));
                        break 'outer;
                    }
                }
            }
        }
    }

    Ok(MonotonicityReport { subsets_checked: checked, ok: violation.is_none(), violation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle_exact_constant() {
        // All 14 proper subsets of C4; the minimum is 4/3 at any 3-subset.
        let g = CayleyGraph::cycle(4);
        let r: ExpansionReport<f64> = expansion_exact(&g).unwrap();
        assert_eq!((r.c_num, r.c_den), (4, 3));
        assert_eq!(r.subsets_checked, 14);
        assert_eq!(r.witness.len(), 3);
        assert!((r.c_value - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_edge_exact_constant() {
        // K2: one vertex, |∂A| = 1, bound (1 - 1/2)·1 = 1/2, ratio 2.
        let g = CayleyGraph::complete(2);
        let r: ExpansionReport<f64> = expansion_exact(&g).unwrap();
        assert_eq!((r.c_num, r.c_den), (2, 1));
        assert_eq!(r.subsets_checked, 2);
    }

    #[test]
    fn exact_scan_size_limit() {
        let g = CayleyGraph::cycle(30);
        assert!(matches!(
            expansion_exact::<f64>(&g),
            Err(CayleyError::TooLarge { vertices: 30, .. })
        ));
    }

    #[test]
    fn sampled_never_below_exact() {
        for g in [CayleyGraph::cycle(4), CayleyGraph::cycle(9), CayleyGraph::complete(5)] {
            let exact: ExpansionReport<f64> = expansion_exact(&g).unwrap();
            for seed in [1u64, 7, 42] {
                let sampled: ExpansionReport<f64> = expansion_sampled(&g, 200, seed);
                let lhs = (sampled.c_num as u128) * (exact.c_den as u128);
                let rhs = (exact.c_num as u128) * (sampled.c_den as u128);
                assert!(lhs >= rhs, "sampled {sampled:?} below exact {exact:?}");
            }
        }
    }

    #[test]
    fn sampled_finds_four_thirds_on_c4() {
        let g = CayleyGraph::cycle(4);
        let r: ExpansionReport<f64> = expansion_sampled(&g, 100, 3);
        assert_eq!((r.c_num, r.c_den), (4, 3));
    }

    #[test]
    fn sampled_is_deterministic() {
        let g = CayleyGraph::cycle(16);
        let a: ExpansionReport<f64> = expansion_sampled(&g, 500, 99);
        let b: ExpansionReport<f64> = expansion_sampled(&g, 500, 99);
        assert_eq!(a.c_num, b.c_num);
        assert_eq!(a.c_den, b.c_den);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn boundary_counts_agree_between_subset_sides() {
        // The same subset evaluated directly and via its complement.
        let g = CayleyGraph::cycle(9);
        let adj = flat_adjacency(&g);
        let mut scratch = Scratch::new(9);
        for members in [vec![0u32, 1, 2], vec![0, 2, 4, 6], vec![1, 3, 5, 7, 8]] {
            let direct = Subset::direct(members.clone());
            let comp: Vec<u32> =
                (0..9u32).filter(|v| !members.contains(v)).collect();
            let via_comp = Subset {
                verts: comp,
                verts_are_complement: true,
                size: members.len() as u64,
            };
            let b1 = scratch.boundary(&adj, 2, &direct);
            let b2 = scratch.boundary(&adj, 2, &via_comp);
            assert_eq!(b1, b2);
            assert_eq!(direct.members(9, &mut scratch), via_comp.members(9, &mut scratch));
        }
    }
}
